//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! All checks are exact (tolerance zero). Three sub-criteria encode published
//! values that the engine's brute-force computation contradicts (the two
//! flag dimensions of 15 and the θ-lift infeasibility); they are implemented
//! exactly as published and left red, with the machine's verdict in the
//! failure message. Everything else passes.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;

use superflag::atlas::Atlas;
use superflag::fields::{base_chart, fundamental_field, SuperDerivation};
use superflag::lie::{gl_basis, h4_basis, span_dimension, GlElement};
use superflag::reference::{gr2211_extra_fields, gr2211_mu_table};
use superflag::solver::{self, LiftOutcome};
use superflag::weights;

fn vectors(fields: &[SuperDerivation]) -> (Vec<(superflag::superpoly::VarId, superflag::superpoly::Monomial)>, Vec<Vec<BigRational>>) {
    let keys = solver::field_keys(fields);
    let vecs = fields.iter().map(|f| solver::field_vector(f, &keys)).collect();
    (keys, vecs)
}

#[test]
fn criterion_1_golden_bases() {
    let t0 = Instant::now();
    // the sixteen fundamental-field expressions on Gr(2|2; 1|1)
    let atlas = Atlas::parse("Gr(2|2; 1|1)").unwrap();
    let chart = atlas.standard_chart();
    for ((i, j), expected) in gr2211_mu_table(chart).unwrap() {
        let got = fundamental_field(&GlElement::elementary(2, 2, i - 1, j - 1), chart).unwrap();
        assert_eq!(got, expected, "μ(E{i}{j}) must match the published expression");
    }
    // the fifteen graded fields on Gr(2|2; 1|2): independent, global, and
    // together with z they exhaust the computed space
    let atlas2 = Atlas::parse("Gr(2|2; 1|2)").unwrap();
    let chart2 = atlas2.standard_chart();
    let h4 = h4_basis(chart2).unwrap();
    let sizes: Vec<usize> = h4.graded.iter().map(|(_, fs)| fs.len()).collect();
    assert_eq!(sizes, vec![4, 6, 4, 1]);
    let mut all = h4.all_fields();
    for f in &all {
        solver::certify_global(&atlas2, f).expect("every listed field is global");
    }
    all.push(h4.z.clone());
    let report = solver::solve_global_fields(&atlas2, 3).unwrap();
    let mut everything = all.clone();
    everything.extend(report.basis.iter().map(|f| f.representative.clone()));
    let (keys, _) = vectors(&everything);
    let listed: Vec<Vec<BigRational>> = all.iter().map(|f| solver::field_vector(f, &keys)).collect();
    let solved: Vec<Vec<BigRational>> = report
        .basis
        .iter()
        .map(|f| solver::field_vector(&f.representative, &keys))
        .collect();
    assert_eq!(span_dimension(&listed), 16);
    assert_eq!(span_dimension(&solved), 16);
    for v in &listed {
        assert!(superflag::lie::in_span(&solved, v), "listed field must be global");
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 10, "criterion 1 must finish in under 10 s, took {dt:?}");
    println!("ACCEPTANCE 1: PASS — golden bases reproduced exactly ({dt:?})");
}

#[test]
fn criterion_2_homomorphism_sweep() {
    // Exact action-compatibility on every basis pair. The published fields
    // (criterion 1) force the contravariant orientation of the fundamental
    // map of this left action: [μ(X), μ(Y)] = μ([Y, X]) — verified exactly
    // on all pairs; the covariant orientation is impossible over ℚ with the
    // published tables (see the project notes).
    let t0 = Instant::now();
    for (space, pairs) in [
        ("Gr(2|2; 1|1)", 256usize),
        ("Gr(2|1; 1|1)", 81),
        ("F(2|2; 1,1 | 2,1)", 256),
    ] {
        let atlas = Atlas::parse(space).unwrap();
        let chart = atlas.standard_chart();
        let (m, n) = (atlas.flag().m(), atlas.flag().n());
        let basis = gl_basis(m, n);
        let mu: Vec<SuperDerivation> =
            basis.iter().map(|x| fundamental_field(x, chart).unwrap()).collect();
        let mut checked = 0;
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let lhs = mu[i].bracket(&mu[j]).unwrap();
                let rhs = fundamental_field(&y.bracket(x).unwrap(), chart).unwrap();
                assert_eq!(lhs, rhs, "{space}: pair (E{}, E{})", i, j);
                checked += 1;
            }
        }
        assert_eq!(checked, pairs);
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 120, "criterion 2 must finish in under 2 min, took {dt:?}");
    println!("ACCEPTANCE 2: PASS — 593 bracket identities, exact ({dt:?})");
}

#[test]
fn criterion_3_kernel() {
    for space in ["Gr(2|2; 1|1)", "Gr(2|1; 1|1)", "F(2|2; 1,1 | 2,1)"] {
        let atlas = Atlas::parse(space).unwrap();
        let kernel = solver::mu_kernel(&atlas).unwrap();
        let (m, n) = (atlas.flag().m(), atlas.flag().n());
        assert_eq!(kernel.len(), 1, "{space}: kernel must be one-dimensional");
        let g = &kernel[0];
        let c = g.get(0, 0);
        assert!(!c.is_zero());
        assert_eq!(g, &GlElement::identity(m, n).scaled(&c), "{space}: kernel = ⟨identity⟩");
        println!(
            "ACCEPTANCE 3: PASS — {space}: Ker μ = ⟨E⟩, rank μ = {}",
            (m + n) * (m + n) - 1
        );
    }
}

#[test]
fn criterion_4_solver_dimensions() {
    let t0 = Instant::now();
    for (space, d, expect) in [
        ("Gr(2|1; 1|1)", 2u32, 8usize),
        ("Gr(3|1; 1|0)", 2, 15),
        ("Gr(2|2; 1|1)", 2, 17),
        ("Gr(2|2; 1|2)", 3, 16),
        ("Gr(1|3; 0|2)", 3, 24),
    ] {
        let start = Instant::now();
        let atlas = Atlas::parse(space).unwrap();
        let report = solver::solve_global_fields(&atlas, d).unwrap();
        assert!(report.stabilized, "{space}: dimension must stabilize");
        assert_eq!(report.dimension, expect, "{space}");
        assert!(start.elapsed().as_secs() < 300, "{space} exceeded 5 min");
        println!(
            "ACCEPTANCE 4: PASS — {space} at D={d}: dim = {} (stabilized, {:?})",
            report.dimension,
            start.elapsed()
        );
    }

    // Gr(2|2; 1|1): exactly two directions beyond the μ-image, spanned by
    // η∂/∂ξ and ξ∂/∂η
    let atlas = Atlas::parse("Gr(2|2; 1|1)").unwrap();
    let report = solver::solve_global_fields(&atlas, 2).unwrap();
    let mu = solver::mu_image_fields(&atlas).unwrap();
    let extras = gr2211_extra_fields(atlas.standard_chart()).unwrap();
    let mut all: Vec<SuperDerivation> =
        report.basis.iter().map(|f| f.representative.clone()).collect();
    all.extend(mu.iter().cloned());
    all.extend(extras.iter().cloned());
    let (keys, _) = vectors(&all);
    let mu_vecs: Vec<Vec<BigRational>> = mu.iter().map(|f| solver::field_vector(f, &keys)).collect();
    let sol_vecs: Vec<Vec<BigRational>> = report
        .basis
        .iter()
        .map(|f| solver::field_vector(&f.representative, &keys))
        .collect();
    assert_eq!(span_dimension(&mu_vecs), 15);
    let mut extended = mu_vecs.clone();
    for f in &extras {
        let v = solver::field_vector(f, &keys);
        assert!(superflag::lie::in_span(&sol_vecs, &v), "extra field must be global");
        extended.push(v);
    }
    assert_eq!(span_dimension(&extended), 17, "μ-image plus the two extras fills the space");
    println!("ACCEPTANCE 4: PASS — Gr(2|2;1|1): 17 = 15 + span{{η∂ξ, ξ∂η}}");

    // Gr(2|2; 1|2): z-eigenvalue dimensions (4, 7, 4, 1) at (−1, 0, 1, 2)
    let atlas = Atlas::parse("Gr(2|2; 1|2)").unwrap();
    let report = solver::solve_global_fields(&atlas, 3).unwrap();
    let h4 = h4_basis(atlas.standard_chart()).unwrap();
    let basis: Vec<SuperDerivation> =
        report.basis.iter().map(|f| f.representative.clone()).collect();
    let dims = solver::ad_eigenvalue_dimensions(&basis, &h4.z).unwrap();
    let expected: std::collections::BTreeMap<i64, usize> =
        [(-1, 4), (0, 7), (1, 4), (2, 1)].into_iter().collect();
    assert_eq!(dims, expected);
    println!("ACCEPTANCE 4: PASS — Gr(2|2;1|2): ad-z eigenspace dimensions (4,7,4,1)");
    println!("ACCEPTANCE 4 total: {:?}", t0.elapsed());
}

#[test]
fn criterion_5_flag_dimension_1121_as_published() {
    // Published value: dim 𝔳(F(2|2; 1,1|2,1)) = 15 (isomorphic to pgl(2|2)).
    // The engine computes 16, stabilized, with every basis field certified
    // regular on every chart; the extra dimension is the certified lift
    // w₀ = ξ₁ξ₂∂x − (yξ₁ + ξ₂)∂η of θ. See the project notes for the full
    // sign analysis of the published proof. The criterion is asserted as
    // published and fails.
    let atlas = Atlas::parse("F(2|2; 1,1 | 2,1)").unwrap();
    let report = solver::solve_global_fields(&atlas, 3).unwrap();
    assert!(report.stabilized);
    println!(
        "ACCEPTANCE 5 (dim F(2|2;1,1|2,1)): engine verdict dim = {} (even {}, odd {}), stabilized",
        report.dimension, report.even_dimension, report.odd_dimension
    );
    assert_eq!(
        report.dimension, 15,
        "published dimension 15 contradicted by the brute-force solver: \
         dim = {} with all {} basis fields certified regular on every chart \
         (stabilized across degrees 3 and 4); the space is isomorphic under \
         projection to the full 16-dimensional algebra of the base",
        report.dimension,
        report.basis.len()
    );
}

#[test]
fn criterion_5_flag_dimension_1021_as_published() {
    // Published value: dim 𝔳(F(2|2; 1,0|2,1)) = 15. Engine verdict: 16.
    let atlas = Atlas::parse("F(2|2; 1,0 | 2,1)").unwrap();
    let report = solver::solve_global_fields(&atlas, 3).unwrap();
    assert!(report.stabilized);
    println!(
        "ACCEPTANCE 5 (dim F(2|2;1,0|2,1)): engine verdict dim = {} (stabilized)",
        report.dimension
    );
    assert_eq!(
        report.dimension, 15,
        "published dimension 15 contradicted by the brute-force solver: dim = {}",
        report.dimension
    );
}

#[test]
fn criterion_5_vertical_fields_and_w_case() {
    let t0 = Instant::now();
    // vertical global fields vanish on both exceptional-base flags
    for space in ["F(2|2; 1,1 | 2,1)", "F(2|2; 1,0 | 2,1)"] {
        let atlas = Atlas::parse(space).unwrap();
        let v = solver::vertical_global_fields(&atlas, 3).unwrap();
        assert!(v.is_empty(), "{space}: vertical global fields must vanish");
        println!("ACCEPTANCE 5: PASS — {space}: vertical global fields = {{0}}");
    }
    // the degenerate-base flag carries the semidirect-product answer:
    // dim = mn·2^{mn} + 2^{mn}(n²−1) = 8 + 12 = 20
    let atlas = Atlas::parse("F(1|2; 0,0 | 2,1)").unwrap();
    let report = solver::solve_global_fields(&atlas, 4).unwrap();
    assert!(report.stabilized);
    assert_eq!(report.dimension, 20);
    assert!(t0.elapsed().as_secs() < 600);
    println!("ACCEPTANCE 5: PASS — F(1|2;0,0|2,1): dim = 20 (stabilized, {:?})", t0.elapsed());
}

#[test]
fn criterion_6_theta_lift_as_published() {
    // Published: θ has no global lift to F(2|2; 1,1|2,1), certified by the
    // incompatible pair ∂g/∂ξ₁ = y, ∂g/∂y = −ξ₁. Engine verdict: the lift is
    // FEASIBLE; with the sign-consistent fundamental fields the bracket
    // conditions read ∂g/∂ξ₁ = −y, ∂g/∂ξ₂ = −1, ∂g/∂y = −ξ₁, which are
    // jointly solvable by g = −yξ₁ − ξ₂, and the resulting field is regular
    // on every chart. The criterion is asserted as published and fails.
    let atlas = Atlas::parse("F(2|2; 1,1 | 2,1)").unwrap();
    let base = base_chart(atlas.standard_chart());
    let h4 = h4_basis(&base).unwrap();
    let theta = &h4.graded.last().unwrap().1[0];
    match solver::lift_query(&atlas, theta, 3).unwrap() {
        LiftOutcome::Infeasible(cert) => {
            // were this reached, the certificate must contain the published
            // constraint pair on the ∂/∂η coefficient
            let has_xi1 = cert.derived.iter().any(|d| {
                atlas.standard_chart().table().name(d.wrt).starts_with('ξ') && !d.rhs.is_zero()
            });
            let has_y = cert.derived.iter().any(|d| {
                atlas.standard_chart().table().name(d.wrt).starts_with('y') && !d.rhs.is_zero()
            });
            assert!(has_xi1 && has_y, "certificate must contain the published pair");
            println!("ACCEPTANCE 6: PASS — θ-lift infeasible with the published pair");
        }
        LiftOutcome::Feasible { witness, vertical_basis } => {
            println!(
                "ACCEPTANCE 6: engine verdict — θ lifts, witness {} (certified on {} charts, vertical ambiguity {})",
                witness.representative,
                witness.certified.len(),
                vertical_basis.len()
            );
            panic!(
                "published infeasibility contradicted: lift_query(θ) is feasible with the \
                 certified witness {}; see the project notes for the sign analysis",
                witness.representative
            );
        }
    }
}

#[test]
fn criterion_7_global_functions() {
    for (space, d, expect) in [
        ("Gr(2|1; 1|1)", 2u32, 1usize),
        ("F(2|2; 1,1 | 2,1)", 2, 1),
        ("Gr(1|1; 0|1)", 2, 2),
        ("Gr(1|2; 0|2)", 2, 4),
    ] {
        let atlas = Atlas::parse(space).unwrap();
        let report = solver::solve_global_functions(&atlas, d).unwrap();
        assert!(report.stabilized, "{space}");
        assert_eq!(report.dimension, expect, "{space}");
        println!("ACCEPTANCE 7: PASS — {space}: global functions dimension {expect}");
    }
}

#[test]
fn criterion_8_bwb_table() {
    // oracle pre-validation: Weyl formula vs brute-force GT pattern count,
    // exhaustive over weakly decreasing strings in [−3, 3]^d for d ≤ 3
    for d in 1..=3usize {
        let mut strings: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..d {
            let mut next = Vec::new();
            for s in &strings {
                let hi = s.last().copied().unwrap_or(3);
                for v in -3..=hi {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
            strings = next;
        }
        for s in strings {
            let w = weights::Weight { mu: s.clone(), lambda: vec![] };
            assert_eq!(
                weights::weyl_dim(&w).unwrap(),
                weights::gt_pattern_count(&s),
                "oracle mismatch at {s:?}"
            );
        }
    }
    println!("ACCEPTANCE 8: PASS — weyl_dim validated against the GT enumeration oracle");

    // every table row with m, n ≤ 4: dimension and survivor modules
    let mut rows = 0usize;
    for m in 1..=4usize {
        for n in 1..=4usize {
            for k1 in 0..=m {
                for l1 in 0..=n {
                    if k1 + l1 == 0 || k1 + l1 >= m + n {
                        continue;
                    }
                    let mods = match weights::w0_sections_row(m, n, k1, l1) {
                        Ok(r) => r,
                        Err(superflag::Error::NoTableRow(..)) => continue,
                        Err(e) => panic!("unexpected error {e}"),
                    };
                    let expected = weights::w0_sections_dim(m, n, &mods).unwrap();
                    let rep =
                        weights::psi_weights(m, n, k1, l1, weights::PsiCase::Generic).unwrap();
                    let (dim, survivors) = weights::bwb_sections(&rep).unwrap();
                    assert_eq!(dim, expected, "({m},{n},{k1},{l1})");
                    let mut a: Vec<_> =
                        survivors.iter().map(|w| (w.mu.clone(), w.lambda.clone())).collect();
                    let mut b: Vec<_> = mods
                        .iter()
                        .map(|md| {
                            let w = md.weight(m, n);
                            (w.mu, w.lambda)
                        })
                        .collect();
                    a.sort();
                    b.sort();
                    assert_eq!(a, b, "survivors at ({m},{n},{k1},{l1})");
                    rows += 1;
                }
            }
        }
    }
    println!("ACCEPTANCE 8: PASS — section table reproduced on {rows} parameter rows (m,n ≤ 4)");
}
