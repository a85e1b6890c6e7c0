//! Global holomorphic vector fields and functions by brute-force exact
//! linear algebra: a degree-bounded polynomial ansatz on the standard chart
//! is pushed to every other chart of the atlas, and holomorphy of every
//! coefficient becomes an exact linear condition (the fixed denominator must
//! divide the numerator). The nullspace of the assembled system is the space
//! of global objects within the ansatz; a stabilization check against degree
//! D+1 substitutes for the missing a-priori degree bound.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::atlas::{Atlas, FlagType};
use crate::fields::{base_chart, fundamental_field, lift_from_base, SuperDerivation};
use crate::lie::{gl_basis, GlElement};
use crate::linalg::{AffineOutcome, AffineSystem, Eliminator, SparseRow};
use crate::superpoly::{
    Monomial, Parity, RationalSuperFunction, Substitution, SuperPolynomial, VarId, VarTable,
};
use crate::{Error, Result};

/// A certified global vector field: a representative on the standard chart
/// together with the charts on which regularity has been verified.
#[derive(Debug, Clone)]
pub struct GlobalField {
    pub flag: FlagType,
    pub representative: SuperDerivation,
    pub certified: Vec<usize>,
}

/// Result of a global-field computation.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub space: FlagType,
    pub degree: u32,
    pub dimension: usize,
    pub even_dimension: usize,
    pub odd_dimension: usize,
    /// dim at degree D equals dim at degree D+1.
    pub stabilized: bool,
    pub basis: Vec<GlobalField>,
}

/// Result of a global-function computation.
#[derive(Debug, Clone)]
pub struct FunctionReport {
    pub space: FlagType,
    pub degree: u32,
    pub dimension: usize,
    pub stabilized: bool,
    pub basis: Vec<SuperPolynomial>,
}

/// All monomials of total degree ≤ d over a table, each paired with its
/// rewrite into another chart (the image under `sub`), canonical order.
fn monomials_with_images(
    table: &Arc<VarTable>,
    d: u32,
    sub: &Substitution,
) -> Result<Vec<(Monomial, RationalSuperFunction)>> {
    let mut out: Vec<(Monomial, RationalSuperFunction)> = Vec::new();
    let one = (Monomial::one(table), RationalSuperFunction::one(sub.target()));
    out.push(one);
    // multiply in each variable up to the degree budget, preserving order
    for v in table.vars() {
        let img = match sub.get(v) {
            Some(i) => i.clone(),
            None => return Err(Error::UnknownVariable(table.name(v).to_string())),
        };
        let max_pow = match v.parity {
            Parity::Odd => 1,
            Parity::Even => d,
        };
        let mut extended = Vec::with_capacity(out.len() * 2);
        for (m, mi) in &out {
            extended.push((m.clone(), mi.clone()));
            let mut cur_m = m.clone();
            let mut cur_i = mi.clone();
            for _ in 0..max_pow {
                if cur_m.degree() >= d {
                    break;
                }
                let Some((next, sign)) = cur_m.mul(&Monomial::var(table, v), table) else {
                    break;
                };
                debug_assert_eq!(sign, 1);
                cur_i = cur_i.mul(&img);
                cur_m = next;
                extended.push((cur_m.clone(), cur_i.clone()));
            }
        }
        out = extended;
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Plain monomial enumeration (identity images), canonical order.
pub fn monomials_up_to(table: &Arc<VarTable>, d: u32) -> Vec<Monomial> {
    let sub = Substitution::identity(table);
    monomials_with_images(table, d, &sub)
        .expect("identity substitution is total")
        .into_iter()
        .map(|(m, _)| m)
        .collect()
}

/// Unknowns of the field ansatz: coefficient monomial × target coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzKey {
    pub coordinate: VarId,
    pub monomial: Monomial,
}

/// Pushforward data of one non-standard chart.
struct ChartData {
    /// rewrite of standard-chart functions into this chart's coordinates
    rewrite: Substitution,
    /// unit-field pushforward: coefficient of ∂/∂w for ∂/∂u, over this chart
    unit: BTreeMap<(VarId, VarId), RationalSuperFunction>,
}

fn chart_data(atlas: &Atlas, j: usize) -> Result<ChartData> {
    let std_id = atlas.standard_id();
    let fwd = atlas.transition(std_id, j)?;
    let back = atlas.transition(j, std_id)?;
    let target = atlas.chart(j);
    let source = atlas.chart(std_id);
    let rewrite = back.as_substitution(target.table());
    let mut unit = BTreeMap::new();
    for w in target.vars() {
        let expr = fwd.expr(w);
        for u in source.vars() {
            let d = expr.partial(u)?;
            if d.is_zero() {
                continue;
            }
            unit.insert((w, u), d.substitute(&rewrite)?);
        }
    }
    Ok(ChartData { rewrite, unit })
}

/// lcm of two admissible denominators via mutual divisibility, with the
/// product as fallback.
fn den_lcm(a: &SuperPolynomial, b: &SuperPolynomial) -> SuperPolynomial {
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    if b.div_exact(a).is_some() {
        return b.clone();
    }
    if a.div_exact(b).is_some() {
        return a.clone();
    }
    a * b
}

/// Append to `rows` the exact linear conditions "Σ c_i f_i + g ≡ 0 as a
/// polynomial", where each f_i (and the affine part g) is a rational
/// superfunction over one chart: bring everything over the common
/// denominator and decompose the division remainders per monomial.
/// Returns (rows, rhs) pairs keyed by remainder monomial.
fn regularity_rows(
    terms: &[(usize, RationalSuperFunction)],
    affine: Option<&RationalSuperFunction>,
) -> Vec<(Monomial, SparseRow, BigRational)> {
    let mut den: Option<SuperPolynomial> = None;
    for (_, f) in terms {
        if !f.den().is_one() {
            den = Some(match den {
                None => f.den().clone(),
                Some(d) => den_lcm(&d, f.den()),
            });
        }
    }
    if let Some(g) = affine {
        if !g.den().is_one() {
            den = Some(match den {
                None => g.den().clone(),
                Some(d) => den_lcm(&d, g.den()),
            });
        }
    }
    let Some(den) = den else { return Vec::new() };
    let mut by_monomial: BTreeMap<Monomial, (SparseRow, BigRational)> = BTreeMap::new();
    let mut add = |idx: Option<usize>, f: &RationalSuperFunction| {
        let scale = den.div_exact(f.den()).expect("lcm divides");
        let num = f.num() * &scale;
        let (_, rem) = num.divrem(&den).expect("denominator admissible");
        for (mono, c) in rem.terms() {
            let entry = by_monomial
                .entry(mono.clone())
                .or_insert_with(|| (SparseRow::new(), BigRational::zero()));
            match idx {
                Some(i) => entry.0.push((i, c.clone())),
                None => entry.1 = &entry.1 + c,
            }
        }
    };
    for (i, f) in terms {
        add(Some(*i), f);
    }
    if let Some(g) = affine {
        add(None, g);
    }
    by_monomial
        .into_iter()
        .map(|(m, (mut row, rhs))| {
            row.sort_by_key(|(i, _)| *i);
            (m, row, rhs)
        })
        .collect()
}

/// Solve one parity sector of the global-field problem at a fixed degree.
/// `allow` filters the ansatz coordinates (all coordinates for the full
/// problem, fiber coordinates only for vertical fields).
fn sector_rows_for_chart(
    atlas: &Atlas,
    j: usize,
    keys: &[AnsatzKey],
    degree: u32,
) -> Result<Vec<SparseRow>> {
    let table = atlas.standard_chart().table();
    let data = chart_data(atlas, j)?;
    let images = monomials_with_images(table, degree, &data.rewrite)?;
    let image_of: HashMap<&Monomial, &RationalSuperFunction> =
        images.iter().map(|(m, i)| (m, i)).collect();
    let mut rows = Vec::new();
    for w in atlas.chart(j).vars() {
        // P_{i} = image(M_i) · unit[(w, u_i)]
        let mut terms: Vec<(usize, RationalSuperFunction)> = Vec::new();
        for (i, key) in keys.iter().enumerate() {
            let Some(g) = data.unit.get(&(w, key.coordinate)) else { continue };
            let mi = image_of[&key.monomial];
            let p = mi.mul(g);
            if !p.is_zero() {
                terms.push((i, p));
            }
        }
        for (_m, row, rhs) in regularity_rows(&terms, None) {
            debug_assert!(rhs.is_zero());
            rows.push(row);
        }
    }
    Ok(rows)
}

fn solve_fields_sector(
    atlas: &Atlas,
    degree: u32,
    sector: Parity,
    allow: &dyn Fn(VarId) -> bool,
    parallel: bool,
) -> Result<Vec<SuperDerivation>> {
    let std_chart = atlas.standard_chart();
    let table = std_chart.table();
    let coords: Vec<VarId> = std_chart.vars().into_iter().filter(|v| allow(*v)).collect();
    // enumerate unknowns in canonical (coordinate, monomial) order
    let plain = monomials_up_to(table, degree);
    let mut keys: Vec<AnsatzKey> = Vec::new();
    for &u in &coords {
        for m in &plain {
            if m.parity().plus(u.parity) == sector {
                keys.push(AnsatzKey { coordinate: u, monomial: m.clone() });
            }
        }
    }
    if keys.is_empty() {
        return Ok(Vec::new());
    }
    let chart_ids: Vec<usize> =
        (0..atlas.chart_count()).filter(|&j| j != atlas.standard_id()).collect();
    let row_sets: Vec<Result<Vec<SparseRow>>> = if parallel && chart_ids.len() > 1 {
        std::thread::scope(|scope| {
            let keys = &keys;
            let handles: Vec<_> = chart_ids
                .iter()
                .map(|&j| scope.spawn(move || sector_rows_for_chart(atlas, j, keys, degree)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    } else {
        chart_ids.iter().map(|&j| sector_rows_for_chart(atlas, j, &keys, degree)).collect()
    };
    let mut elim = Eliminator::new();
    for rows in row_sets {
        for row in rows? {
            elim.insert(row);
        }
    }
    let basis = elim.nullspace(keys.len());
    Ok(basis
        .into_iter()
        .map(|vec| {
            SuperDerivation::from_coeffs(
                table,
                vec.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| {
                    let key = &keys[i];
                    let p = SuperPolynomial::from_terms(
                        table,
                        [(key.monomial.clone(), c.clone())],
                    );
                    (key.coordinate, RationalSuperFunction::from_poly(p))
                }),
            )
        })
        .fold(BTreeMap::<usize, SuperDerivation>::new(), |mut acc, d| {
            let i = acc.len();
            acc.insert(i, d);
            acc
        })
        .into_values()
        .collect())
}

fn merge_sector_fields(
    atlas: &Atlas,
    degree: u32,
    allow: &dyn Fn(VarId) -> bool,
    parallel: bool,
) -> Result<(Vec<SuperDerivation>, usize, usize)> {
    let mut even = solve_fields_sector(atlas, degree, Parity::Even, allow, parallel)?;
    let odd = solve_fields_sector(atlas, degree, Parity::Odd, allow, parallel)?;
    let (ne, no) = (even.len(), odd.len());
    even.extend(odd);
    Ok((even, ne, no))
}

/// Certify a field by pushing it to every chart; returns the chart ids on
/// which every coefficient is regular, or an error naming the offender.
pub fn certify_global(atlas: &Atlas, field: &SuperDerivation) -> Result<Vec<usize>> {
    let std_id = atlas.standard_id();
    let mut certified = Vec::new();
    for j in 0..atlas.chart_count() {
        let pushed = field.pushforward(atlas, std_id, j)?;
        for (v, c) in pushed.coeffs() {
            if c.is_regular().is_none() {
                return Err(Error::Other(format!(
                    "coefficient of ∂/∂{} on chart {} is not regular: {}",
                    atlas.chart(j).table().name(*v),
                    j,
                    c
                )));
            }
        }
        certified.push(j);
    }
    Ok(certified)
}

/// Global holomorphic vector fields at ansatz degree D, with the
/// stabilization check at D+1.
pub fn solve_global_fields(atlas: &Atlas, degree: u32) -> Result<SolveReport> {
    solve_global_fields_with(atlas, degree, false)
}

/// As `solve_global_fields`, optionally generating the per-chart constraint
/// rows on worker threads (pure work; the elimination stays sequential).
pub fn solve_global_fields_with(atlas: &Atlas, degree: u32, parallel: bool) -> Result<SolveReport> {
    let allow = |_: VarId| true;
    let (fields, ne, no) = merge_sector_fields(atlas, degree, &allow, parallel)?;
    let (next, _, _) = merge_sector_fields(atlas, degree + 1, &allow, parallel)?;
    let stabilized = fields.len() == next.len();
    let mut basis = Vec::with_capacity(fields.len());
    for f in fields {
        let certified = certify_global(atlas, &f)?;
        basis.push(GlobalField { flag: atlas.flag().clone(), representative: f, certified });
    }
    Ok(SolveReport {
        space: atlas.flag().clone(),
        degree,
        dimension: basis.len(),
        even_dimension: ne,
        odd_dimension: no,
        stabilized,
        basis,
    })
}

/// Vertical global fields (ansatz on the fiber directions only); the flag
/// must have length ≥ 2.
pub fn vertical_global_fields(atlas: &Atlas, degree: u32) -> Result<Vec<SuperDerivation>> {
    if atlas.flag().length() < 2 {
        return Err(Error::Other("vertical fields need a flag of length ≥ 2".into()));
    }
    let chart = atlas.standard_chart().clone();
    let allow = move |v: VarId| chart.level_of(v) >= 2;
    let (fields, _, _) = merge_sector_fields(atlas, degree, &allow, false)?;
    Ok(fields)
}

/// Global holomorphic functions at ansatz degree D with stabilization.
pub fn solve_global_functions(atlas: &Atlas, degree: u32) -> Result<FunctionReport> {
    let dim_at = |d: u32| -> Result<Vec<SuperPolynomial>> {
        let table = atlas.standard_chart().table();
        let plain = monomials_up_to(table, d);
        let mut elim = Eliminator::new();
        for j in 0..atlas.chart_count() {
            if j == atlas.standard_id() {
                continue;
            }
            let data = chart_data(atlas, j)?;
            let images = monomials_with_images(table, d, &data.rewrite)?;
            let terms: Vec<(usize, RationalSuperFunction)> = images
                .iter()
                .enumerate()
                .map(|(i, (_, img))| (i, img.clone()))
                .collect();
            for (_m, row, rhs) in regularity_rows(&terms, None) {
                debug_assert!(rhs.is_zero());
                elim.insert(row);
            }
        }
        let ns = elim.nullspace(plain.len());
        Ok(ns
            .into_iter()
            .map(|vec| {
                SuperPolynomial::from_terms(
                    table,
                    vec.into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (plain[i].clone(), c)),
                )
            })
            .collect())
    };
    let basis = dim_at(degree)?;
    let next = dim_at(degree + 1)?;
    Ok(FunctionReport {
        space: atlas.flag().clone(),
        degree,
        dimension: basis.len(),
        stabilized: basis.len() == next.len(),
        basis,
    })
}

/// Common vectorization of polynomial-coefficient fields: canonical key set
/// and dense coefficient vectors.
pub fn field_keys(fields: &[SuperDerivation]) -> Vec<(VarId, Monomial)> {
    let mut keys: Vec<(VarId, Monomial)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for f in fields {
        for (v, c) in f.coeffs() {
            let p = c.is_regular().expect("vectorization needs polynomial coefficients");
            for (m, _) in p.terms() {
                if seen.insert((*v, m.clone())) {
                    keys.push((*v, m.clone()));
                }
            }
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    keys
}

pub fn field_vector(f: &SuperDerivation, keys: &[(VarId, Monomial)]) -> Vec<BigRational> {
    let index: HashMap<(VarId, &Monomial), usize> =
        keys.iter().enumerate().map(|(i, (v, m))| ((*v, m), i)).collect();
    let mut out = vec![BigRational::zero(); keys.len()];
    for (v, c) in f.coeffs() {
        let p = c.is_regular().expect("vectorization needs polynomial coefficients");
        for (m, coeff) in p.terms() {
            let i = index
                .get(&(*v, m))
                .copied()
                .expect("key table covers all coefficients");
            out[i] = coeff.clone();
        }
    }
    out
}

/// μ(E_ab) for every elementary matrix, on the standard chart.
pub fn mu_image_fields(atlas: &Atlas) -> Result<Vec<SuperDerivation>> {
    let chart = atlas.standard_chart();
    gl_basis(atlas.flag().m(), atlas.flag().n())
        .iter()
        .map(|x| fundamental_field(x, chart))
        .collect()
}

/// Exact kernel of μ: the gl elements whose fundamental field vanishes on
/// the standard chart (a field vanishing on a dense chart vanishes).
pub fn mu_kernel(atlas: &Atlas) -> Result<Vec<GlElement>> {
    let (m, n) = (atlas.flag().m(), atlas.flag().n());
    let fields = mu_image_fields(atlas)?;
    let keys = field_keys(&fields);
    let mut elim = Eliminator::new();
    // rows indexed by coefficient keys, unknowns = the (m+n)² coefficients
    let vectors: Vec<Vec<BigRational>> = fields.iter().map(|f| field_vector(f, &keys)).collect();
    for key_pos in 0..keys.len() {
        let row: SparseRow = (0..vectors.len())
            .filter(|&i| !vectors[i][key_pos].is_zero())
            .map(|i| (i, vectors[i][key_pos].clone()))
            .collect();
        elim.insert(row);
    }
    let ns = elim.nullspace(vectors.len());
    Ok(ns
        .into_iter()
        .map(|vec| {
            let mut g = GlElement::zero(m, n);
            for (idx, c) in vec.into_iter().enumerate() {
                if !c.is_zero() {
                    let (i, j) = (idx / (m + n), idx % (m + n));
                    g.set(i, j, c);
                }
            }
            g
        })
        .collect())
}

/// A derivative condition "∂(coefficient of ∂/∂vertical)/∂wrt = rhs"
/// extracted from a bracket constraint group during a lift query.
#[derive(Debug, Clone)]
pub struct DerivedCondition {
    pub vertical: VarId,
    pub wrt: VarId,
    pub rhs: SuperPolynomial,
    pub source: String,
    /// Set when the condition conflicts with previously determined data.
    pub conflicting: bool,
}

#[derive(Debug, Clone)]
pub struct LiftCertificate {
    /// Tags of a 1-minimal inconsistent subsystem of the full constraint set.
    pub inconsistent_rows: Vec<String>,
    /// Derivative conditions reconstructed from the bracket groups, in
    /// processing order; the conflicting ones carry the flag.
    pub derived: Vec<DerivedCondition>,
    pub note: String,
}

#[derive(Debug)]
pub enum LiftOutcome {
    Feasible {
        witness: GlobalField,
        /// Basis of vertical global fields (the ambiguity of the witness).
        vertical_basis: Vec<SuperDerivation>,
    },
    Infeasible(Box<LiftCertificate>),
}

/// Can the base field `w` be corrected by a vertical field into a global
/// field of the flag? Solves for a degree-D vertical ansatz; an infeasible
/// system is reported with a minimal inconsistent subsystem and the
/// derivative conditions of the bracket constraints.
pub fn lift_query(atlas: &Atlas, w: &SuperDerivation, degree: u32) -> Result<LiftOutcome> {
    let flag = atlas.flag();
    if flag.length() < 2 {
        return Err(Error::Other("lift query needs a flag of length ≥ 2".into()));
    }
    let std_chart = atlas.standard_chart();
    let table = std_chart.table();
    let lifted = lift_from_base(w, std_chart)?;

    // vertical ansatz unknowns, both parities
    let fiber_coords: Vec<VarId> =
        std_chart.vars().into_iter().filter(|v| std_chart.level_of(*v) >= 2).collect();
    let plain = monomials_up_to(table, degree);
    let mut keys: Vec<AnsatzKey> = Vec::new();
    for &u in &fiber_coords {
        for m in &plain {
            keys.push(AnsatzKey { coordinate: u, monomial: m.clone() });
        }
    }
    let unit_fields: Vec<SuperDerivation> = keys
        .iter()
        .map(|k| {
            SuperDerivation::from_coeffs(
                table,
                [(
                    k.coordinate,
                    RationalSuperFunction::from_poly(SuperPolynomial::from_terms(
                        table,
                        [(k.monomial.clone(), BigRational::from_integer(1.into()))],
                    )),
                )],
            )
        })
        .collect();

    let mut sys = AffineSystem::new(keys.len());
    let mut group_ranges: Vec<(String, usize, usize)> = Vec::new();

    // bracket constraint groups (only valid when there are no vertical
    // global fields, which makes the global lift of a base field unique)
    let verticals = vertical_global_fields(atlas, degree)?;
    let mut derived: Vec<DerivedCondition> = Vec::new();
    if verticals.is_empty() {
        let base_flag = flag.base();
        let base = base_chart(std_chart);
        if w.table() != base.table() {
            return Err(Error::TableMismatch);
        }
        let (m, n) = (base_flag.m(), base_flag.n());
        let base_mu: Vec<SuperDerivation> = gl_basis(m, n)
            .iter()
            .map(|x| fundamental_field(x, &base))
            .collect::<Result<_>>()?;
        let bracket_results: Vec<SuperDerivation> = base_mu
            .iter()
            .map(|f| f.bracket(w))
            .collect::<Result<_>>()?;
        let all_base: Vec<SuperDerivation> = {
            let mut v = base_mu.clone();
            v.push(w.clone());
            v.extend(bracket_results.iter().cloned());
            v
        };
        let base_keys = field_keys(&all_base);
        let base_vecs: Vec<Vec<BigRational>> =
            base_mu.iter().map(|f| field_vector(f, &base_keys)).collect();
        for idx in 0..base_mu.len() {
            let (a, b) = (idx / (m + n), idx % (m + n));
            let tag = format!("[μ(E{}{}), w]", a + 1, b + 1);
            let bx = &bracket_results[idx];
            let bx_vec = field_vector(bx, &base_keys);
            let Some(beta) = crate::linalg::express_in_span(&base_vecs, &bx_vec) else {
                continue; // bracket leaves the fundamental image: no constraint
            };
            // F_X = μ(Σ β_cd E_cd) on the flag
            let mut combo = GlElement::zero(m, n);
            for (k, c) in beta.iter().enumerate() {
                if !c.is_zero() {
                    let (i, j) = (k / (m + n), k % (m + n));
                    let mut e = GlElement::elementary(m, n, i, j).scaled(c);
                    e = e.add(&combo);
                    combo = e;
                }
            }
            let f_x = fundamental_field(&combo, std_chart)?;
            let mu_x = fundamental_field(&gl_basis(m, n)[idx], std_chart)?;
            // equation: [μ(X), lifted + Σ c_i V_i] − F_X = 0
            let fixed = mu_x.bracket(&lifted)?.sub(&f_x);
            let start = sys.len();
            let coord_list: Vec<VarId> = std_chart.vars();
            for target in &coord_list {
                let mut terms: Vec<(usize, RationalSuperFunction)> = Vec::new();
                for (i, v_i) in unit_fields.iter().enumerate() {
                    let t = mu_x.bracket(v_i)?.coeff(*target);
                    if !t.is_zero() {
                        terms.push((i, t));
                    }
                }
                let affine = fixed.coeff(*target);
                // polynomial identity: denominators are all 1 here, so add
                // the rows directly per monomial
                let mut by_mono: BTreeMap<Monomial, (SparseRow, BigRational)> = BTreeMap::new();
                for (i, t) in &terms {
                    let p = t.is_regular().expect("bracket of polynomial fields");
                    for (mo, c) in p.terms() {
                        let e = by_mono
                            .entry(mo.clone())
                            .or_insert_with(|| (SparseRow::new(), BigRational::zero()));
                        e.0.push((*i, c.clone()));
                    }
                }
                let ap = affine.is_regular().expect("bracket of polynomial fields");
                for (mo, c) in ap.terms() {
                    let e = by_mono
                        .entry(mo.clone())
                        .or_insert_with(|| (SparseRow::new(), BigRational::zero()));
                    e.1 = &e.1 + c;
                }
                for (_mo, (mut row, aff)) in by_mono {
                    row.sort_by_key(|(i, _)| *i);
                    // rows state Σ c_i t_i + aff = 0  ⇒  Σ c_i t_i = −aff
                    sys.push(
                        row,
                        -aff,
                        format!("{tag} = μ(expansion): ∂/∂{}", table.name(*target)),
                    );
                }
            }
            if sys.len() > start {
                group_ranges.push((tag, start, sys.len()));
            }
        }
        derived = derive_conditions(&sys, &group_ranges, &keys, table);
    }

    // regularity constraint groups: the definition of being global
    for j in 0..atlas.chart_count() {
        if j == atlas.standard_id() {
            continue;
        }
        let data = chart_data(atlas, j)?;
        let images = monomials_with_images(table, degree, &data.rewrite)?;
        let image_of: HashMap<&Monomial, &RationalSuperFunction> =
            images.iter().map(|(m, i)| (m, i)).collect();
        let pushed_lift = lifted.pushforward(atlas, atlas.standard_id(), j)?;
        let start = sys.len();
        for wv in atlas.chart(j).vars() {
            let mut terms: Vec<(usize, RationalSuperFunction)> = Vec::new();
            for (i, key) in keys.iter().enumerate() {
                let Some(g) = data.unit.get(&(wv, key.coordinate)) else { continue };
                let p = image_of[&key.monomial].mul(g);
                if !p.is_zero() {
                    terms.push((i, p));
                }
            }
            let affine = pushed_lift.coeff(wv);
            for (_m, row, rhs) in regularity_rows(&terms, Some(&affine)) {
                sys.push(
                    row,
                    -rhs,
                    format!("regularity on chart {}: ∂/∂{}", j, atlas.chart(j).table().name(wv)),
                );
            }
        }
        if sys.len() > start {
            group_ranges.push((format!("regularity chart {j}"), start, sys.len()));
        }
    }

    match sys.solve() {
        AffineOutcome::Feasible { particular, nullspace } => {
            let mut correction = SuperDerivation::zero(table);
            for (i, c) in particular.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let key = &keys[i];
                let p = SuperPolynomial::from_terms(table, [(key.monomial.clone(), c.clone())]);
                correction =
                    correction.add(&SuperDerivation::from_coeffs(
                        table,
                        [(key.coordinate, RationalSuperFunction::from_poly(p))],
                    ));
            }
            let witness_field = lifted.add(&correction);
            let certified = certify_global(atlas, &witness_field)?;
            let vertical_basis = nullspace
                .into_iter()
                .map(|vec| {
                    SuperDerivation::from_coeffs(
                        table,
                        vec.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(
                            |(i, c)| {
                                let key = &keys[i];
                                let p = SuperPolynomial::from_terms(
                                    table,
                                    [(key.monomial.clone(), c)],
                                );
                                (key.coordinate, RationalSuperFunction::from_poly(p))
                            },
                        ),
                    )
                })
                .collect();
            Ok(LiftOutcome::Feasible {
                witness: GlobalField {
                    flag: flag.clone(),
                    representative: witness_field,
                    certified,
                },
                vertical_basis,
            })
        }
        AffineOutcome::Infeasible { support } => {
            let rows = support.iter().map(|&i| sys.tag(i).to_string()).collect();
            Ok(LiftOutcome::Infeasible(Box::new(LiftCertificate {
                inconsistent_rows: rows,
                derived,
                note: "vertical correction system has no solution".into(),
            })))
        }
    }
}

/// Replay the bracket groups in order, tracking which ansatz unknowns get
/// forced; whenever a full derivative ∂(coeff of ∂/∂u)/∂q becomes
/// determined, record the condition. A group that turns the system
/// infeasible contributes its implied conditions flagged as conflicting.
fn derive_conditions(
    sys: &AffineSystem,
    groups: &[(String, usize, usize)],
    keys: &[AnsatzKey],
    table: &Arc<VarTable>,
) -> Vec<DerivedCondition> {
    let mut out: Vec<DerivedCondition> = Vec::new();
    let mut acc = AffineSystem::new(keys.len());
    let mut determined: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut reported: std::collections::HashSet<(VarId, VarId)> = std::collections::HashSet::new();

    let fiber_coords: Vec<VarId> = {
        let mut v: Vec<VarId> = keys.iter().map(|k| k.coordinate).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    };

    let derivative_if_determined =
        |vertical: VarId, q: VarId, det: &BTreeMap<usize, BigRational>| -> Option<SuperPolynomial> {
            let mut rhs = SuperPolynomial::zero(table);
            for (i, key) in keys.iter().enumerate() {
                if key.coordinate != vertical {
                    continue;
                }
                let dm = SuperPolynomial::from_terms(
                    table,
                    [(key.monomial.clone(), BigRational::from_integer(1.into()))],
                )
                .partial(q)
                .ok()?;
                if dm.is_zero() {
                    continue;
                }
                match det.get(&i) {
                    Some(c) => rhs = &rhs + &dm.scaled(c),
                    None => return None,
                }
            }
            Some(rhs)
        };

    for (tag, start, end) in groups {
        let mut trial = acc.clone();
        for idx in *start..*end {
            let (row, rhs) = sys.row(idx);
            trial.push(row.clone(), rhs.clone(), sys.tag(idx).to_string());
        }
        match trial.solve() {
            AffineOutcome::Feasible { particular, nullspace } => {
                acc = trial;
                determined.clear();
                for (i, c) in particular.iter().enumerate() {
                    if nullspace.iter().all(|v| v[i].is_zero()) {
                        determined.insert(i, c.clone());
                    }
                }
                for &vertical in &fiber_coords {
                    for q in table.vars() {
                        if reported.contains(&(vertical, q)) {
                            continue;
                        }
                        if let Some(rhs) = derivative_if_determined(vertical, q, &determined) {
                            // only worth reporting once the derivative is
                            // constrained at all
                            let touched = keys.iter().enumerate().any(|(i, k)| {
                                k.coordinate == vertical
                                    && determined.contains_key(&i)
                                    && SuperPolynomial::from_terms(
                                        table,
                                        [(k.monomial.clone(), BigRational::from_integer(1.into()))],
                                    )
                                    .partial(q)
                                    .map(|d| !d.is_zero())
                                    .unwrap_or(false)
                            });
                            if touched {
                                reported.insert((vertical, q));
                                out.push(DerivedCondition {
                                    vertical,
                                    wrt: q,
                                    rhs,
                                    source: tag.clone(),
                                    conflicting: false,
                                });
                            }
                        }
                    }
                }
            }
            AffineOutcome::Infeasible { .. } => {
                // substitute the determined values into this group's rows and
                // read off what the group would force
                let mut tentative = determined.clone();
                for idx in *start..*end {
                    let (row, rhs) = sys.row(idx);
                    let mut residual_rhs = rhs.clone();
                    let mut unknowns: Vec<(usize, BigRational)> = Vec::new();
                    for (i, c) in row {
                        match tentative.get(i) {
                            Some(v) => residual_rhs = &residual_rhs - &(c * v),
                            None => unknowns.push((*i, c.clone())),
                        }
                    }
                    if unknowns.len() == 1 {
                        let (i, c) = unknowns.pop().unwrap();
                        tentative.insert(i, residual_rhs / c);
                    }
                }
                for &vertical in &fiber_coords {
                    for q in table.vars() {
                        if let Some(rhs) = derivative_if_determined(vertical, q, &tentative) {
                            let fresh = !reported.contains(&(vertical, q));
                            let changed = match derivative_if_determined(vertical, q, &determined)
                            {
                                Some(old) => old != rhs,
                                None => true,
                            };
                            if fresh || changed {
                                out.push(DerivedCondition {
                                    vertical,
                                    wrt: q,
                                    rhs,
                                    source: format!("{tag} (conflicting)"),
                                    conflicting: true,
                                });
                            }
                        }
                    }
                }
                break;
            }
        }
    }
    out
}

/// Eigenspace dimensions of ad(z) on the span of `basis`, together with the
/// check that the span closes under bracket with z. Returns pairs
/// (eigenvalue, dimension) for the integer eigenvalues found.
pub fn ad_eigenvalue_dimensions(
    basis: &[SuperDerivation],
    z: &SuperDerivation,
) -> Result<BTreeMap<i64, usize>> {
    let n = basis.len();
    let mut all: Vec<SuperDerivation> = basis.to_vec();
    let brackets: Vec<SuperDerivation> =
        basis.iter().map(|b| z.bracket(b)).collect::<Result<_>>()?;
    all.extend(brackets.iter().cloned());
    let keys = field_keys(&all);
    let vecs: Vec<Vec<BigRational>> = basis.iter().map(|b| field_vector(b, &keys)).collect();
    // ad matrix: [z, b_i] = Σ_j A_ji b_j
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for (i, br) in brackets.iter().enumerate() {
        let v = field_vector(br, &keys);
        let coeffs = crate::linalg::express_in_span(&vecs, &v)
            .ok_or_else(|| Error::Other("span not closed under ad z".into()))?;
        for (j, c) in coeffs.into_iter().enumerate() {
            a[j][i] = c;
        }
    }
    // integer eigenvalues: kernel dimensions of (A − λ)
    let mut dims = BTreeMap::new();
    let mut total = 0usize;
    for lam in -8i64..=8 {
        let mut elim = Eliminator::new();
        for row_i in 0..n {
            let mut row: SparseRow = Vec::new();
            for col in 0..n {
                let mut v = a[row_i][col].clone();
                if row_i == col {
                    v -= BigRational::from_integer(lam.into());
                }
                if !v.is_zero() {
                    row.push((col, v));
                }
            }
            elim.insert(row);
        }
        let k = n - elim.rank();
        if k > 0 {
            dims.insert(lam, k);
            total += k;
        }
    }
    if total != n {
        return Err(Error::Other(format!(
            "ad z is not diagonalizable over the scanned integer range: {total} of {n}"
        )));
    }
    Ok(dims)
}

/// Serializable mirror of a solve report (stable JSON schema).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReportDoc {
    pub space: String,
    pub mode: String,
    pub degree: u32,
    pub dimension: usize,
    pub even_dimension: Option<usize>,
    pub odd_dimension: Option<usize>,
    pub stabilized: bool,
    pub basis: Vec<serde_json::Value>,
    pub certificates: Vec<String>,
}

impl SolveReport {
    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            space: self.space.to_string(),
            mode: "fields".into(),
            degree: self.degree,
            dimension: self.dimension,
            even_dimension: Some(self.even_dimension),
            odd_dimension: Some(self.odd_dimension),
            stabilized: self.stabilized,
            basis: self.basis.iter().map(|f| f.representative.to_json()).collect(),
            certificates: self
                .basis
                .iter()
                .enumerate()
                .map(|(i, f)| format!("basis[{i}] regular on charts {:?}", f.certified))
                .collect(),
        }
    }
}

impl FunctionReport {
    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            space: self.space.to_string(),
            mode: "functions".into(),
            degree: self.degree,
            dimension: self.dimension,
            even_dimension: None,
            odd_dimension: None,
            stabilized: self.stabilized,
            basis: self.basis.iter().map(|p| p.to_json_terms()).collect(),
            certificates: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_enumeration_counts() {
        let t = VarTable::new(vec!["x", "y"], vec!["a", "b"]);
        // deg ≤ 2 over 2 even + 2 odd vars:
        // even part: 1, x, y, x², xy, y² (6); odd ∅/a/b/ab with budget
        let ms = monomials_up_to(&t, 2);
        // |o|=0: 6;  |o|=1: 2·3 = 6;  |o|=2: 1
        assert_eq!(ms.len(), 13);
        // canonical order, strictly increasing
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kernel_of_mu_is_the_identity_line() {
        for space in ["Gr(2|1; 1|1)", "Gr(2|2; 1|1)"] {
            let atlas = Atlas::parse(space).unwrap();
            let ker = mu_kernel(&atlas).unwrap();
            assert_eq!(ker.len(), 1, "{space}");
            let g = &ker[0];
            let (m, n) = (atlas.flag().m(), atlas.flag().n());
            let c = g.get(0, 0);
            assert!(!c.is_zero());
            assert_eq!(g, &GlElement::identity(m, n).scaled(&c), "{space}");
        }
    }

    #[test]
    fn solver_on_gr2111_finds_pgl() {
        let atlas = Atlas::parse("Gr(2|1; 1|1)").unwrap();
        let report = solve_global_fields(&atlas, 2).unwrap();
        assert_eq!(report.dimension, 8);
        assert!(report.stabilized);
        // fundamental fields are global and exhaust the space
        let mu = mu_image_fields(&atlas).unwrap();
        let mut all = report.basis.iter().map(|f| f.representative.clone()).collect::<Vec<_>>();
        all.extend(mu.iter().cloned());
        let keys = field_keys(&all);
        let vecs: Vec<Vec<BigRational>> =
            report.basis.iter().map(|f| field_vector(&f.representative, &keys)).collect();
        for f in &mu {
            assert!(crate::linalg::in_span(&vecs, &field_vector(f, &keys)));
        }
    }

    #[test]
    fn functions_on_small_spaces() {
        // Gr(1|1; 0|1): Λ(1), dimension 2
        let atlas = Atlas::parse("Gr(1|1; 0|1)").unwrap();
        let r = solve_global_functions(&atlas, 2).unwrap();
        assert_eq!(r.dimension, 2);
        assert!(r.stabilized);
        // Gr(2|1; 1|1): constants only
        let atlas = Atlas::parse("Gr(2|1; 1|1)").unwrap();
        let r = solve_global_functions(&atlas, 2).unwrap();
        assert_eq!(r.dimension, 1);
        assert!(r.stabilized);
    }

    #[test]
    fn report_doc_round_trips() {
        let atlas = Atlas::parse("Gr(1|1; 0|1)").unwrap();
        let r = solve_global_functions(&atlas, 2).unwrap();
        let doc = r.to_doc();
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: ReportDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, back);
    }
}
