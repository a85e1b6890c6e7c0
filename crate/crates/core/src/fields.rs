//! Vector fields (superderivations) in a chart: application to functions,
//! the super-bracket, pushforward along chart transitions, the fundamental
//! fields of the GL(m|n) action and projection to the base Grassmannian.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::atlas::{Atlas, Chart, ChartIndex};
use crate::lie::GlElement;
use crate::supermatrix::SuperMatrix;
use crate::superpoly::{
    same_table, Parity, RationalSuperFunction, SuperPolynomial, VarId, VarTable,
};
use crate::{Error, Result};

/// A first-order operator Σ c_v ∂/∂v with rational-superfunction
/// coefficients over a fixed variable table.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperDerivation {
    table: Arc<VarTable>,
    coeffs: BTreeMap<VarId, RationalSuperFunction>,
}

impl SuperDerivation {
    pub fn zero(table: &Arc<VarTable>) -> SuperDerivation {
        SuperDerivation { table: table.clone(), coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs<I>(table: &Arc<VarTable>, coeffs: I) -> SuperDerivation
    where
        I: IntoIterator<Item = (VarId, RationalSuperFunction)>,
    {
        let mut d = SuperDerivation::zero(table);
        for (v, c) in coeffs {
            d.add_coeff(v, c);
        }
        d
    }

    /// ∂/∂v.
    pub fn partial(table: &Arc<VarTable>, v: VarId) -> SuperDerivation {
        SuperDerivation::from_coeffs(
            table,
            [(v, RationalSuperFunction::one(table))],
        )
    }

    fn add_coeff(&mut self, v: VarId, c: RationalSuperFunction) {
        assert!(self.table.contains(v), "coordinate outside table");
        assert!(same_table(c.table(), &self.table), "coefficient over wrong table");
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(v) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn coeff(&self, v: VarId) -> RationalSuperFunction {
        self.coeffs.get(&v).cloned().unwrap_or_else(|| RationalSuperFunction::zero(&self.table))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&VarId, &RationalSuperFunction)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Parity of the field: parity(coeff of ∂/∂v) + parity(v) must agree for
    /// every term. `None` for inhomogeneous fields.
    pub fn parity(&self) -> Option<Parity> {
        let mut result: Option<Parity> = None;
        for (v, c) in &self.coeffs {
            let cp = c.parity()?;
            let p = cp.plus(v.parity);
            match result {
                None => result = Some(p),
                Some(q) if q == p => {}
                _ => return None,
            }
        }
        result.or(Some(Parity::Even))
    }

    pub fn is_homogeneous(&self, p: Parity) -> bool {
        self.is_zero() || self.parity() == Some(p)
    }

    /// Split into (even field, odd field).
    pub fn parity_parts(&self) -> (SuperDerivation, SuperDerivation) {
        let mut even = SuperDerivation::zero(&self.table);
        let mut odd = SuperDerivation::zero(&self.table);
        for (v, c) in &self.coeffs {
            let ce = RationalSuperFunction::new(
                c.num().parity_part(v.parity.plus(Parity::Even)),
                c.den().clone(),
            )
            .expect("den unchanged");
            let co = RationalSuperFunction::new(
                c.num().parity_part(v.parity.plus(Parity::Odd)),
                c.den().clone(),
            )
            .expect("den unchanged");
            even.add_coeff(*v, ce);
            odd.add_coeff(*v, co);
        }
        (even, odd)
    }

    pub fn add(&self, other: &SuperDerivation) -> SuperDerivation {
        assert!(same_table(&self.table, &other.table), "table mismatch in field +");
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_coeff(*v, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SuperDerivation) -> SuperDerivation {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SuperDerivation {
        SuperDerivation {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c.neg())).collect(),
        }
    }

    pub fn scaled(&self, k: &BigRational) -> SuperDerivation {
        let mut out = SuperDerivation::zero(&self.table);
        for (v, c) in &self.coeffs {
            out.add_coeff(*v, c.scaled(k));
        }
        out
    }

    /// Left multiplication by a function: (f·X)(g) = f·X(g).
    pub fn left_mul(&self, f: &RationalSuperFunction) -> SuperDerivation {
        let mut out = SuperDerivation::zero(&self.table);
        for (v, c) in &self.coeffs {
            out.add_coeff(*v, f.mul(c));
        }
        out
    }

    /// Action on a function: Σ c_v · ∂f/∂v (left odd derivatives).
    pub fn apply(&self, f: &RationalSuperFunction) -> Result<RationalSuperFunction> {
        if !same_table(f.table(), &self.table) {
            return Err(Error::TableMismatch);
        }
        let mut acc = RationalSuperFunction::zero(&self.table);
        for (v, c) in &self.coeffs {
            acc = acc.add(&c.mul(&f.partial(*v)?));
        }
        Ok(acc)
    }

    pub fn apply_poly(&self, f: &SuperPolynomial) -> Result<RationalSuperFunction> {
        self.apply(&RationalSuperFunction::from_poly(f.clone()))
    }

    /// Super-commutator [a, b] = a∘b − (−1)^{p(a)p(b)} b∘a as a first-order
    /// operator; inhomogeneous inputs are split first.
    pub fn bracket(&self, other: &SuperDerivation) -> Result<SuperDerivation> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        let (ae, ao) = self.parity_parts();
        let (be, bo) = other.parity_parts();
        let mut out = SuperDerivation::zero(&self.table);
        for (a, pa) in [(&ae, Parity::Even), (&ao, Parity::Odd)] {
            if a.is_zero() {
                continue;
            }
            for (b, pb) in [(&be, Parity::Even), (&bo, Parity::Odd)] {
                if b.is_zero() {
                    continue;
                }
                out = out.add(&bracket_homogeneous(a, pa, b, pb)?);
            }
        }
        Ok(out)
    }

    /// All coefficients extend to polynomials (no genuine denominators).
    pub fn is_polynomial(&self) -> bool {
        self.coeffs.values().all(|c| c.is_regular().is_some())
    }

    /// Transport to another chart of the atlas: coefficients of ∂/∂w are
    /// (field applied to the transition expression of w), rewritten in target
    /// coordinates through the inverse transition.
    pub fn pushforward(&self, atlas: &Atlas, from: usize, to: usize) -> Result<SuperDerivation> {
        let source = atlas.chart(from);
        if !same_table(source.table(), &self.table) {
            return Err(Error::TableMismatch);
        }
        if from == to {
            return Ok(self.clone());
        }
        let fwd = atlas.transition(from, to)?;
        let back = atlas.transition(to, from)?;
        let target = atlas.chart(to);
        let rewrite = back.as_substitution(target.table());
        let mut out = SuperDerivation::zero(target.table());
        for w in target.vars() {
            let in_source = self.apply(fwd.expr(w))?;
            if in_source.is_zero() {
                continue;
            }
            out.add_coeff(w, in_source.substitute(&rewrite)?);
        }
        Ok(out)
    }

    /// Stable JSON rendering: coefficient term lists keyed by coordinate.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|(v, c)| {
                serde_json::json!({
                    "coordinate": self.table.name(*v),
                    "num": c.num().to_json_terms(),
                    "den": c.den().to_json_terms(),
                })
            })
            .collect();
        serde_json::Value::Array(coeffs)
    }
}

fn bracket_homogeneous(
    a: &SuperDerivation,
    pa: Parity,
    b: &SuperDerivation,
    pb: Parity,
) -> Result<SuperDerivation> {
    let sign = pa.sign_of_swap(pb);
    let mut out = SuperDerivation::zero(&a.table);
    let vars: std::collections::BTreeSet<VarId> =
        a.coeffs.keys().chain(b.coeffs.keys()).copied().collect();
    for v in vars {
        let mut c = a.apply(&b.coeff(v))?;
        let ba = b.apply(&a.coeff(v))?;
        c = if sign < 0 { c.add(&ba) } else { c.sub(&ba) };
        out.add_coeff(v, c);
    }
    Ok(out)
}

impl fmt::Display for SuperDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (v, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.to_string();
            if cs == "1" {
                write!(f, "∂/∂{}", self.table.name(*v))?;
            } else if cs.contains(' ') || cs.contains('/') {
                write!(f, "({})·∂/∂{}", cs, self.table.name(*v))?;
            } else {
                write!(f, "{}·∂/∂{}", cs, self.table.name(*v))?;
            }
        }
        Ok(())
    }
}

/// A formal one-parameter direction: name and parity; it squares to zero
/// when adjoined to a variable table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalParameter {
    pub name: String,
    pub parity: Parity,
}

/// Remap a chart polynomial into the table extended by a leading parameter.
fn inject_into_extended(
    p: &SuperPolynomial,
    ext: &Arc<VarTable>,
    param_parity: Parity,
) -> SuperPolynomial {
    p.remap(ext, |v| {
        Some(if v.parity == param_parity { VarId { parity: v.parity, index: v.index + 1 } } else { v })
    })
    .expect("injection cannot fail")
}

/// Inverse of `inject_into_extended` for values free of the parameter.
fn restrict_from_extended(
    p: &SuperPolynomial,
    chart_table: &Arc<VarTable>,
    param_parity: Parity,
) -> Result<SuperPolynomial> {
    p.remap(chart_table, |v| {
        if v.parity == param_parity {
            if v.index == 0 {
                None // parameter survived — caller's invariant broken
            } else {
                Some(VarId { parity: v.parity, index: v.index - 1 })
            }
        } else {
            Some(v)
        }
    })
}

/// The fundamental vector field μ(X) on a chart: differentiate the action
/// Z̃ = L·Z₁·C₁⁻¹, Z̃_s = C_{s−1}·Z_s·C_s⁻¹ along L = E + τX at τ = 0, with
/// τ a formal parameter of X's parity (τ² = 0) and J = I. The coefficient of
/// ∂/∂v is the left τ-coefficient of the transformed coordinate v.
pub fn fundamental_field(x: &GlElement, chart: &Chart) -> Result<SuperDerivation> {
    let flag = chart.flag();
    if x.size() != (flag.m(), flag.n()) {
        return Err(Error::SizeMismatch);
    }
    match x.parity() {
        Some(p) => fundamental_field_homogeneous(x, p, chart),
        None => {
            let even = fundamental_field_homogeneous(&x.parity_part(Parity::Even), Parity::Even, chart)?;
            let odd = fundamental_field_homogeneous(&x.parity_part(Parity::Odd), Parity::Odd, chart)?;
            Ok(even.add(&odd))
        }
    }
}

fn fundamental_field_homogeneous(
    x: &GlElement,
    parity: Parity,
    chart: &Chart,
) -> Result<SuperDerivation> {
    let table = chart.table();
    if x.is_zero() {
        return Ok(SuperDerivation::zero(table));
    }
    let flag = chart.flag();
    let (m, n) = (flag.m(), flag.n());
    let (ext, tau) = table.with_parameter("τ", parity);
    let tau_poly = SuperPolynomial::var(&ext, tau);

    // L = E + τ·X
    let mut l = SuperMatrix::identity(&ext, (m, n));
    for i in 0..m + n {
        for j in 0..m + n {
            let c = x.get(i, j);
            if c.is_zero() {
                continue;
            }
            let add = RationalSuperFunction::from_poly(tau_poly.scaled(&c));
            let cur = l.get(i, j).clone();
            l.set(i, j, cur.add(&add));
        }
    }

    // chart matrices over the extended table
    let lift_matrix = |z: &SuperMatrix| -> SuperMatrix {
        let mut out = SuperMatrix::zero(&ext, z.row_split(), z.col_split());
        for i in 0..z.rows() {
            for j in 0..z.cols() {
                let e = z.get(i, j);
                let num = inject_into_extended(e.num(), &ext, parity);
                let den = inject_into_extended(e.den(), &ext, parity);
                out.set(i, j, RationalSuperFunction::new(num, den).expect("den admissible"));
            }
        }
        out
    };

    let mut coeffs: Vec<(VarId, RationalSuperFunction)> = Vec::new();
    let mut c_prev: Option<SuperMatrix> = None;
    for s in 1..=flag.length() {
        let z = lift_matrix(chart.matrix(s));
        let prod = match &c_prev {
            None => l.mul(&z)?,
            Some(cp) => cp.mul(&z)?,
        };
        // J = I: select the chart's own identity rows
        let c = prod.select_rows(&chart.index().even[s - 1], &chart.index().odd[s - 1])?;
        let z_tilde = prod.mul(&c.inverse()?)?;
        for row in 0..z_tilde.rows() {
            for col in 0..z_tilde.cols() {
                match chart.var_at(s, row, col) {
                    Some(v) => {
                        let v_ext = VarId {
                            parity: v.parity,
                            index: v.index + usize::from(v.parity == parity),
                        };
                        let delta = z_tilde
                            .get(row, col)
                            .sub(&RationalSuperFunction::var(&ext, v_ext));
                        let coeff = extract_left_param_coeff(&delta, tau)?;
                        let num = restrict_from_extended(coeff.num(), table, parity)?;
                        let den = restrict_from_extended(coeff.den(), table, parity)?;
                        let c = RationalSuperFunction::new(num, den)?;
                        if !c.is_zero() {
                            coeffs.push((v, c));
                        }
                    }
                    None => {
                        // planted cells stay exactly planted under J = I
                        let expected = chart.matrix(s).get(row, col);
                        let got = z_tilde.get(row, col);
                        let want_one = expected.is_regular().map_or(false, |p| p.is_one());
                        if want_one {
                            assert!(
                                got.is_regular().map_or(false, |p| p.is_one()),
                                "identity cell moved under the infinitesimal action"
                            );
                        } else {
                            assert!(got.is_zero(), "zero cell moved under the infinitesimal action");
                        }
                    }
                }
            }
        }
        c_prev = Some(c);
    }
    Ok(SuperDerivation::from_coeffs(table, coeffs))
}

/// Write `delta = τ·c` and return c. The parameter sits at index 0 of its
/// parity class, so the stored canonical coefficient is already the LEFT
/// τ-coefficient. Fails if delta has a τ-free part.
fn extract_left_param_coeff(
    delta: &RationalSuperFunction,
    tau: VarId,
) -> Result<RationalSuperFunction> {
    debug_assert_eq!(tau.index, 0, "parameter must be the leading variable");
    let table = delta.table().clone();
    let mut coeff_terms = SuperPolynomial::zero(&table);
    for (mono, c) in delta.num().terms() {
        let has = match tau.parity {
            Parity::Even => mono.even_exponent(0) == 1,
            Parity::Odd => mono.has_odd(0),
        };
        if !has {
            return Err(Error::Other(format!(
                "transformed coordinate is not linear in the parameter: {}",
                delta.num()
            )));
        }
        let stripped = SuperPolynomial::from_terms(
            &table,
            [(mono.clone(), c.clone())],
        );
        let d = stripped.partial(tau)?; // strips τ; left coefficient by index 0
        coeff_terms = &coeff_terms + &d;
    }
    Ok(RationalSuperFunction::new(coeff_terms, delta.den().clone())?)
}

/// Outcome of projecting a field along the bundle F → Gr (drop all levels
/// beyond the first).
#[derive(Debug, Clone)]
pub enum ProjectOutcome {
    Projectable(SuperDerivation),
    /// The offending coordinate and its coefficient witnessing failure.
    NotProjectable { var: VarId, coeff: RationalSuperFunction },
}

impl ProjectOutcome {
    pub fn is_projectable(&self) -> bool {
        matches!(self, ProjectOutcome::Projectable(_))
    }

    pub fn projected(self) -> Option<SuperDerivation> {
        match self {
            ProjectOutcome::Projectable(d) => Some(d),
            ProjectOutcome::NotProjectable { .. } => None,
        }
    }
}

/// The base-Grassmannian chart under a flag chart: level 1 with the same
/// index.
pub fn base_chart(chart: &Chart) -> Chart {
    let flag = chart.flag();
    let base = flag.base();
    let ix = ChartIndex {
        even: vec![chart.index().even[0].clone()],
        odd: vec![chart.index().odd[0].clone()],
    };
    Chart::new(base, ix)
}

/// Projectability along F → Gr in a chart: every ∂/∂(level-1 coordinate)
/// coefficient may involve only level-1 coordinates. The projection keeps
/// exactly those coefficients on the base chart.
pub fn project_to_base(v: &SuperDerivation, chart: &Chart) -> Result<ProjectOutcome> {
    if chart.flag().length() < 2 {
        return Err(Error::Other("projection requires a flag of length ≥ 2".into()));
    }
    if !same_table(v.table(), chart.table()) {
        return Err(Error::TableMismatch);
    }
    let base = base_chart(chart);
    let base_table = base.table().clone();
    // map level-1 variables of the flag chart onto the base chart by cell
    let to_base = |var: VarId| -> Option<VarId> {
        let cell = chart.cell_of(var);
        if cell.level != 1 {
            return None;
        }
        base.var_at(1, cell.row, cell.col)
    };
    let mut out = SuperDerivation::zero(&base_table);
    for (var, coeff) in v.coeffs() {
        if chart.level_of(*var) != 1 {
            continue; // vertical directions project away
        }
        // the coefficient must only involve level-1 coordinates
        let bad = coeff
            .num()
            .support()
            .into_iter()
            .chain(coeff.den().support())
            .find(|u| chart.level_of(*u) != 1);
        if bad.is_some() {
            return Ok(ProjectOutcome::NotProjectable { var: *var, coeff: coeff.clone() });
        }
        let num = coeff.num().remap(&base_table, to_base)?;
        let den = coeff.den().remap(&base_table, to_base)?;
        out.add_coeff(to_base(*var).expect("level-1 var maps to base"), RationalSuperFunction::new(num, den)?);
    }
    Ok(ProjectOutcome::Projectable(out))
}

/// Lift a field on the base chart to the flag chart (coefficients on the
/// level-1 coordinates, no vertical part).
pub fn lift_from_base(w: &SuperDerivation, chart: &Chart) -> Result<SuperDerivation> {
    if chart.flag().length() < 2 {
        return Err(Error::Other("lift requires a flag of length ≥ 2".into()));
    }
    let base = base_chart(chart);
    if !same_table(w.table(), base.table()) {
        return Err(Error::TableMismatch);
    }
    let flag_table = chart.table().clone();
    let to_flag = |var: VarId| -> Option<VarId> {
        let cell = base.cell_of(var);
        chart.var_at(1, cell.row, cell.col)
    };
    let mut out = SuperDerivation::zero(&flag_table);
    for (var, coeff) in w.coeffs() {
        let num = coeff.num().remap(&flag_table, to_flag)?;
        let den = coeff.den().remap(&flag_table, to_flag)?;
        out.add_coeff(
            to_flag(*var).ok_or(Error::IndexOutOfRange)?,
            RationalSuperFunction::new(num, den)?,
        );
    }
    Ok(out)
}
