//! Batch command-line front end: dimensions of global vector fields and
//! functions, kernel and projection reports, lift queries, verification
//! suites and the section-dimension table.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 usage error,
//! 3 non-stabilized dimension.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superflag::atlas::Atlas;
use superflag::fields::{
    base_chart, fundamental_field, project_to_base, SuperDerivation,
};
use superflag::lie::{gl_basis, h4_basis, h_tilde_df_family, GlElement};
use superflag::solver::{self, LiftOutcome};
use superflag::superpoly::{RationalSuperFunction, SuperPolynomial};
use superflag::weights;

const DEFAULT_SEED: u64 = 0x5f1a_6001;

#[derive(Parser)]
#[command(name = "superflag", version, about = "Exact vector fields on flag supermanifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension and basis of the global holomorphic vector fields
    Dim {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Print the echelon basis fields
        #[arg(long)]
        basis: bool,
        /// Generate constraint rows on worker threads
        #[arg(long)]
        parallel: bool,
    },
    /// Dimension and basis of the global holomorphic functions
    Functions {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        basis: bool,
    },
    /// Exact kernel of the fundamental-field map μ
    Kernel {
        #[arg(long)]
        space: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Projectability of the fundamental fields along F → Gr
    Project {
        #[arg(long)]
        space: String,
    },
    /// Lift a global base field to the flag (vertical-correction solve)
    Lift {
        #[arg(long)]
        space: String,
        /// Base field: "theta" (on a Gr(2|2;1|2) base), "zero", or "Eij"
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Verification suites
    Verify {
        /// homomorphism | kernel | golden-fields | h4 | bwb-table | functions | lift
        suite: String,
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Seed of the randomized spot checks
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Section-dimension table of the bundle W₀ over the base Grassmannians
    Table {
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> superflag::Result<ExitCode> {
    match cli.command {
        Command::Dim { space, degree, format, basis, parallel } => {
            let atlas = Atlas::parse(&space)?;
            let report = solver::solve_global_fields_with(&atlas, degree, parallel)?;
            match format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&report.to_doc()).unwrap())
                }
                Format::Text => {
                    println!(
                        "space {}  degree {}  dimension {}  (even {}, odd {})  stabilized {}",
                        report.space,
                        report.degree,
                        report.dimension,
                        report.even_dimension,
                        report.odd_dimension,
                        report.stabilized
                    );
                    if basis {
                        for (i, f) in report.basis.iter().enumerate() {
                            println!("  [{i}] {}", f.representative);
                        }
                    }
                }
            }
            Ok(if report.stabilized { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Functions { space, degree, format, basis } => {
            let atlas = Atlas::parse(&space)?;
            let report = solver::solve_global_functions(&atlas, degree)?;
            match format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&report.to_doc()).unwrap())
                }
                Format::Text => {
                    println!(
                        "space {}  degree {}  dimension {}  stabilized {}",
                        report.space, report.degree, report.dimension, report.stabilized
                    );
                    if basis {
                        for (i, f) in report.basis.iter().enumerate() {
                            println!("  [{i}] {f}");
                        }
                    }
                }
            }
            Ok(if report.stabilized { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Command::Kernel { space, format } => {
            let atlas = Atlas::parse(&space)?;
            let kernel = solver::mu_kernel(&atlas)?;
            let (m, n) = (atlas.flag().m(), atlas.flag().n());
            let is_identity_line = kernel.len() == 1 && {
                let g = &kernel[0];
                let c = g.get(0, 0);
                !c.is_zero() && *g == GlElement::identity(m, n).scaled(&c)
            };
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "space": atlas.flag().to_string(),
                        "kernel_dimension": kernel.len(),
                        "kernel_is_identity_line": is_identity_line,
                        "mu_rank": (m + n) * (m + n) - kernel.len(),
                    })
                ),
                Format::Text => {
                    println!(
                        "space {}  dim Ker μ = {}  rank μ = {}  kernel = ⟨identity⟩: {}",
                        atlas.flag(),
                        kernel.len(),
                        (m + n) * (m + n) - kernel.len(),
                        is_identity_line
                    );
                }
            }
            Ok(if is_identity_line { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Project { space } => {
            let atlas = Atlas::parse(&space)?;
            if atlas.flag().length() < 2 {
                return Err(superflag::Error::Other(
                    "projection needs a flag of length ≥ 2".into(),
                ));
            }
            let chart = atlas.standard_chart();
            let base = base_chart(chart);
            let (m, n) = (atlas.flag().m(), atlas.flag().n());
            let mut ok = true;
            for (idx, x) in gl_basis(m, n).iter().enumerate() {
                let (i, j) = (idx / (m + n), idx % (m + n));
                let mu = fundamental_field(x, chart)?;
                let outcome = project_to_base(&mu, chart)?;
                match outcome {
                    superflag::fields::ProjectOutcome::Projectable(p) => {
                        let mu_base = fundamental_field(x, &base)?;
                        let agrees = p == mu_base;
                        ok &= agrees;
                        println!(
                            "μ(E{}{}) projectable, equals base fundamental field: {}",
                            i + 1,
                            j + 1,
                            agrees
                        );
                    }
                    superflag::fields::ProjectOutcome::NotProjectable { var, .. } => {
                        ok = false;
                        println!(
                            "μ(E{}{}) NOT projectable (offending ∂/∂{})",
                            i + 1,
                            j + 1,
                            chart.table().name(var)
                        );
                    }
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Lift { space, field, degree } => {
            let atlas = Atlas::parse(&space)?;
            let chart = atlas.standard_chart();
            let base = base_chart(chart);
            let w = parse_base_field(&field, &base)?;
            match solver::lift_query(&atlas, &w, degree)? {
                LiftOutcome::Feasible { witness, vertical_basis } => {
                    println!("feasible: lift of ({w}) on {space}");
                    println!("  witness: {}", witness.representative);
                    println!(
                        "  certified regular on {} charts; vertical ambiguity dimension {}",
                        witness.certified.len(),
                        vertical_basis.len()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                LiftOutcome::Infeasible(cert) => {
                    println!("infeasible: no global lift of ({w}) on {space}");
                    println!("  minimal inconsistent subsystem:");
                    for r in &cert.inconsistent_rows {
                        println!("    {r}");
                    }
                    for d in &cert.derived {
                        println!(
                            "  condition: ∂(coeff ∂/∂{})/∂{} = {}   [{}]{}",
                            chart.table().name(d.vertical),
                            chart.table().name(d.wrt),
                            d.rhs,
                            d.source,
                            if d.conflicting { "  ← conflicts" } else { "" }
                        );
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Verify { suite, space, degree, seed } => run_verify(&suite, space, degree, seed),
        Command::Table { max_m, max_n, format } => {
            let mut rows = Vec::new();
            for m in 1..=max_m {
                for n in 1..=max_n {
                    for k1 in 0..=m {
                        for l1 in 0..=n {
                            if k1 + l1 == 0 || k1 + l1 >= m + n {
                                continue;
                            }
                            let Ok(mods) = weights::w0_sections_row(m, n, k1, l1) else {
                                continue;
                            };
                            let dim = weights::w0_sections_dim(m, n, &mods)?;
                            rows.push((m, n, k1, l1, mods, dim));
                        }
                    }
                }
            }
            match format {
                Format::Json => {
                    let arr: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(m, n, k1, l1, mods, dim)| {
                            serde_json::json!({
                                "m": m, "n": n, "k1": k1, "l1": l1,
                                "modules": mods.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>(),
                                "dimension": dim,
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&arr).unwrap());
                }
                Format::Text => {
                    use std::io::Write;
                    // tolerate a closed pipe (e.g. `superflag table | head`)
                    let stdout = std::io::stdout();
                    let mut out = stdout.lock();
                    let mut emit = |line: String| writeln!(out, "{line}").is_ok();
                    if emit(format!(
                        "{:>2} {:>2} {:>3} {:>3}  {:>4}  modules",
                        "m", "n", "k1", "l1", "dim"
                    )) {
                        for (m, n, k1, l1, mods, dim) in rows {
                            if !emit(format!("{m:>2} {n:>2} {k1:>3} {l1:>3}  {dim:>4}  {mods:?}")) {
                                break;
                            }
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_base_field(name: &str, base: &superflag::atlas::Chart) -> superflag::Result<SuperDerivation> {
    let flag = base.flag();
    let (m, n) = (flag.m(), flag.n());
    match name {
        "zero" => Ok(SuperDerivation::zero(base.table())),
        "theta" => {
            let h4 = h4_basis(base)?;
            Ok(h4.graded.last().unwrap().1[0].clone())
        }
        other => {
            let digits: Vec<u32> = other
                .strip_prefix('E')
                .map(|t| t.chars().filter_map(|c| c.to_digit(10)).collect())
                .unwrap_or_default();
            if digits.len() == 2 {
                let (i, j) = (digits[0] as usize, digits[1] as usize);
                if i >= 1 && j >= 1 && i <= m + n && j <= m + n {
                    return fundamental_field(&GlElement::elementary(m, n, i - 1, j - 1), base);
                }
            }
            Err(superflag::Error::Other(format!(
                "unknown base field `{other}` (use zero, theta or Eij)"
            )))
        }
    }
}

struct SuiteReport {
    passed: usize,
    failed: usize,
}

impl SuiteReport {
    fn new() -> SuiteReport {
        SuiteReport { passed: 0, failed: 0 }
    }

    fn check(&mut self, label: &str, ok: bool) {
        if ok {
            self.passed += 1;
            println!("PASS {label}");
        } else {
            self.failed += 1;
            println!("FAIL {label}");
        }
    }

    fn exit(self) -> ExitCode {
        println!("{} passed, {} failed", self.passed, self.failed);
        if self.failed == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    }
}

fn run_verify(
    suite: &str,
    space: Option<String>,
    degree: u32,
    seed: u64,
) -> superflag::Result<ExitCode> {
    let mut report = SuiteReport::new();
    match suite {
        "homomorphism" => {
            // exact action-compatibility sweep over all basis pairs; for the
            // left action the fundamental map composes contravariantly, so
            // the identity checked is [μ(X), μ(Y)] = μ([Y, X]).
            let spaces = match space {
                Some(s) => vec![s],
                None => vec![
                    "Gr(2|2; 1|1)".to_string(),
                    "Gr(2|1; 1|1)".to_string(),
                    "F(2|2; 1,1 | 2,1)".to_string(),
                ],
            };
            for s in spaces {
                let atlas = Atlas::parse(&s)?;
                let chart = atlas.standard_chart();
                let (m, n) = (atlas.flag().m(), atlas.flag().n());
                let basis = gl_basis(m, n);
                let mu: Vec<SuperDerivation> = basis
                    .iter()
                    .map(|x| fundamental_field(x, chart))
                    .collect::<superflag::Result<_>>()?;
                let mut bad = 0usize;
                let mut total = 0usize;
                for (i, x) in basis.iter().enumerate() {
                    for (j, y) in basis.iter().enumerate() {
                        total += 1;
                        let lhs = mu[i].bracket(&mu[j])?;
                        let rhs = fundamental_field(&y.bracket(x)?, chart)?;
                        if lhs != rhs {
                            bad += 1;
                        }
                    }
                }
                report.check(
                    &format!("{s}: [μ(X),μ(Y)] = μ([Y,X]) on {total} basis pairs ({bad} failures)"),
                    bad == 0,
                );
            }
        }
        "kernel" => {
            let spaces = match space {
                Some(s) => vec![s],
                None => vec![
                    "Gr(2|2; 1|1)".to_string(),
                    "Gr(2|1; 1|1)".to_string(),
                    "F(2|2; 1,1 | 2,1)".to_string(),
                ],
            };
            for s in spaces {
                let atlas = Atlas::parse(&s)?;
                let kernel = solver::mu_kernel(&atlas)?;
                let (m, n) = (atlas.flag().m(), atlas.flag().n());
                let ok = kernel.len() == 1 && {
                    let g = &kernel[0];
                    let c = g.get(0, 0);
                    !c.is_zero() && *g == GlElement::identity(m, n).scaled(&c)
                };
                report.check(&format!("{s}: Ker μ = ⟨identity⟩, rank μ = {}", (m + n) * (m + n) - 1), ok);
            }
        }
        "golden-fields" => {
            let atlas = Atlas::parse("Gr(2|2; 1|1)")?;
            let chart = atlas.standard_chart();
            for ((i, j), expected) in superflag::reference::gr2211_mu_table(chart)? {
                let got = fundamental_field(&GlElement::elementary(2, 2, i - 1, j - 1), chart)?;
                report.check(&format!("μ(E{i}{j}) matches the published expression"), got == expected);
            }
            for (k, extra) in superflag::reference::gr2211_extra_fields(chart)?.iter().enumerate() {
                let cert = solver::certify_global(&atlas, extra).is_ok();
                report.check(&format!("extra field #{k} ({extra}) is global"), cert);
            }
            // seeded spot check: pushforward compatibility with apply
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let from = atlas.standard_id();
            let table = chart.table();
            let mut ok = true;
            for _ in 0..50 {
                let to = rng.gen_range(0..atlas.chart_count());
                let f = random_polynomial(&mut rng, table, 2);
                let x = GlElement::elementary(2, 2, rng.gen_range(0..4), rng.gen_range(0..4));
                let v = fundamental_field(&x, chart)?;
                let pushed = v.pushforward(&atlas, from, to)?;
                // v(f) transported = pushed(f transported)
                let back = atlas.transition(to, from)?;
                let sub = back.as_substitution(atlas.chart(to).table());
                let lhs = v.apply_poly(&f)?.substitute(&sub)?;
                let rhs = pushed.apply(&RationalSuperFunction::from_poly(f.clone()).substitute(&sub)?)?;
                ok &= lhs == rhs;
            }
            report.check(&format!("pushforward/apply compatibility, 50 seeded cases (seed {seed:#x})"), ok);
        }
        "h4" => {
            let atlas = Atlas::parse("Gr(2|2; 1|2)")?;
            let chart = atlas.standard_chart();
            let h4 = h4_basis(chart)?;
            let sizes: Vec<usize> = h4.graded.iter().map(|(_, fs)| fs.len()).collect();
            report.check("graded dimensions are (4, 6, 4, 1)", sizes == vec![4, 6, 4, 1]);
            let all = h4.all_fields();
            let keys = solver::field_keys(&all);
            let vecs: Vec<Vec<_>> = all.iter().map(|f| solver::field_vector(f, &keys)).collect();
            report.check("the 15 fields are linearly independent", superflag::lie::span_dimension(&vecs) == 15);
            // closure with additive degrees
            let mut closed = true;
            let mut degrees_add = true;
            for (da, fs_a) in &h4.graded {
                for a in fs_a {
                    for (db, fs_b) in &h4.graded {
                        for b in fs_b {
                            let br = a.bracket(b)?;
                            if br.is_zero() {
                                continue;
                            }
                            let keys2 = solver::field_keys(&[all.clone(), vec![br.clone()]].concat());
                            let vecs2: Vec<Vec<_>> =
                                all.iter().map(|f| solver::field_vector(f, &keys2)).collect();
                            closed &= superflag::lie::in_span(&vecs2, &solver::field_vector(&br, &keys2));
                            // degree of the bracket adds: check by z-eigenvalue
                            if let Some(w) = eigenvalue_of_ad(&h4.z, &br)? {
                                degrees_add &= w == da + db;
                            } else {
                                degrees_add = false;
                            }
                        }
                    }
                }
            }
            report.check("the basis closes under the bracket", closed);
            report.check("bracket degrees add (z-eigenvalues)", degrees_add);
            // [z, θ] = 2θ
            let theta = &h4.graded.last().unwrap().1[0];
            let ztheta = h4.z.bracket(theta)?;
            report.check("[z, θ] = 2θ", ztheta == theta.scaled(&num_rational::BigRational::from_integer(2.into())));
            // D_f cross-check: 15 independent derivations of Λ(4)
            let (_, dfs) = h_tilde_df_family(4);
            let dkeys = solver::field_keys(&dfs);
            let dvecs: Vec<Vec<_>> = dfs.iter().map(|f| solver::field_vector(f, &dkeys)).collect();
            report.check(
                "D_f family: 15 independent derivations of Λ(4)",
                dfs.len() == 15 && superflag::lie::span_dimension(&dvecs) == 15,
            );
            // all 15 fields are global and exhaust the non-z part of 𝔳
            let solve = solver::solve_global_fields(&atlas, 3)?;
            report.check("solver dimension is 16 (15 graded fields + z)", solve.dimension == 16);
        }
        "bwb-table" => {
            // oracle pre-validation: Weyl formula vs GT pattern count
            let mut ok = true;
            for d in 1..=3usize {
                let mut strings: Vec<Vec<i64>> = vec![vec![]];
                for _ in 0..d {
                    let mut next = Vec::new();
                    for s in &strings {
                        let hi = s.last().copied().unwrap_or(2);
                        for v in -2..=hi {
                            let mut t = s.clone();
                            t.push(v);
                            next.push(t);
                        }
                    }
                    strings = next;
                }
                for s in strings {
                    let w = weights::Weight { mu: s.clone(), lambda: vec![] };
                    ok &= weights::weyl_dim(&w)? == weights::gt_pattern_count(&s);
                }
            }
            report.check("weyl_dim matches the Gelfand–Tsetlin oracle (ranks ≤ 3)", ok);
            let mut rows_checked = 0usize;
            let mut all_ok = true;
            for m in 1..=4usize {
                for n in 1..=4usize {
                    for k1 in 0..=m {
                        for l1 in 0..=n {
                            if k1 + l1 == 0 || k1 + l1 >= m + n {
                                continue;
                            }
                            let Ok(mods) = weights::w0_sections_row(m, n, k1, l1) else { continue };
                            let expected = weights::w0_sections_dim(m, n, &mods)?;
                            let rep = weights::psi_weights(m, n, k1, l1, weights::PsiCase::Generic)?;
                            let (dim, _) = weights::bwb_sections(&rep)?;
                            all_ok &= dim == expected;
                            rows_checked += 1;
                        }
                    }
                }
            }
            report.check(
                &format!("section table rows reproduced for m,n ≤ 4 ({rows_checked} rows)"),
                all_ok,
            );
        }
        "functions" => {
            for (s, d, expect) in [
                ("Gr(2|1; 1|1)", 2u32, 1usize),
                ("F(2|2; 1,1 | 2,1)", 2, 1),
                ("Gr(1|1; 0|1)", 2, 2),
                ("Gr(1|2; 0|2)", 2, 4),
            ] {
                let atlas = Atlas::parse(s)?;
                let r = solver::solve_global_functions(&atlas, d)?;
                report.check(
                    &format!("{s}: global functions dimension {} (stabilized {})", r.dimension, r.stabilized),
                    r.dimension == expect && r.stabilized,
                );
            }
        }
        "lift" => {
            let atlas = Atlas::parse("F(2|2; 1,1 | 2,1)")?;
            let chart = atlas.standard_chart();
            let base = base_chart(chart);
            let h4 = h4_basis(&base)?;
            let theta = &h4.graded.last().unwrap().1[0];
            match solver::lift_query(&atlas, theta, degree.max(3))? {
                LiftOutcome::Feasible { witness, vertical_basis } => {
                    println!("NOTE θ lifts: witness {}", witness.representative);
                    println!("NOTE the published account asserts non-liftability; the engine's");
                    println!("NOTE brute-force verdict (dim 16, certified witness) differs.");
                    report.check(
                        "θ-lift witness certified on every chart",
                        witness.certified.len() == atlas.chart_count(),
                    );
                    report.check("vertical ambiguity is zero", vertical_basis.is_empty());
                    let projected = project_to_base(&witness.representative, chart)?
                        .projected()
                        .expect("witness is projectable");
                    report.check("witness projects back to θ", &projected == theta);
                }
                LiftOutcome::Infeasible(cert) => {
                    println!("θ does not lift; certificate rows:");
                    for r in &cert.inconsistent_rows {
                        println!("  {r}");
                    }
                    report.check("θ-lift query resolved", true);
                }
            }
            // a genuinely non-liftable input exercises the certificate path
            let bad = non_global_base_field(&base)?;
            match solver::lift_query(&atlas, &bad, degree.max(3))? {
                LiftOutcome::Infeasible(cert) => {
                    report.check(
                        &format!(
                            "non-global base field rejected with a {}-row minimal certificate",
                            cert.inconsistent_rows.len()
                        ),
                        !cert.inconsistent_rows.is_empty(),
                    );
                }
                LiftOutcome::Feasible { .. } => {
                    report.check("non-global base field rejected", false);
                }
            }
        }
        other => {
            eprintln!("unknown suite `{other}`");
            return Ok(ExitCode::from(2));
        }
    }
    Ok(report.exit())
}

fn eigenvalue_of_ad(
    z: &SuperDerivation,
    v: &SuperDerivation,
) -> superflag::Result<Option<i32>> {
    let b = z.bracket(v)?;
    for c in -4..=4i32 {
        if b == v.scaled(&num_rational::BigRational::from_integer(c.into())) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn random_polynomial(
    rng: &mut ChaCha8Rng,
    table: &std::sync::Arc<superflag::superpoly::VarTable>,
    degree: u32,
) -> SuperPolynomial {
    let monomials = solver::monomials_up_to(table, degree);
    let mut p = SuperPolynomial::zero(table);
    for m in monomials {
        if rng.gen_bool(0.4) {
            let c: i32 = rng.gen_range(-4..=4);
            if c != 0 {
                p = &p
                    + &SuperPolynomial::from_terms(
                        table,
                        [(m, num_rational::BigRational::from_integer(c.into()))],
                    );
            }
        }
    }
    p
}

fn non_global_base_field(base: &superflag::atlas::Chart) -> superflag::Result<SuperDerivation> {
    // x²·∂/∂ξ₁ is not global on Gr(2|2; 1|2)
    let t = base.table();
    let x = base.var_at(1, 0, 0).ok_or(superflag::Error::IndexOutOfRange)?;
    let xi1 = base.var_at(1, 0, 1).ok_or(superflag::Error::IndexOutOfRange)?;
    let xp = SuperPolynomial::var(t, x);
    Ok(SuperDerivation::from_coeffs(
        t,
        [(xi1, RationalSuperFunction::from_poly(xp.pow(2)))],
    ))
}
