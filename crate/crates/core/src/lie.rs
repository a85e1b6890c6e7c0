//! The finite-dimensional Lie superalgebras of the answers: gl(m|n) and its
//! quotient pgl, the derivation algebras W_n = Der Λ(n), the Cartan-type
//! algebra H̃₄ with its grading operator, and exact subspace/ideal tests.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::atlas::Chart;
use crate::fields::SuperDerivation;
use crate::linalg;
use crate::superpoly::{Parity, RationalSuperFunction, SuperPolynomial, VarId, VarTable};
use crate::{Error, Result};

/// Element of gl(m|n): an (m+n)×(m+n) rational matrix with rows/columns
/// 1..m even and m+1..m+n odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlElement {
    m: usize,
    n: usize,
    entries: Vec<BigRational>,
}

impl GlElement {
    pub fn zero(m: usize, n: usize) -> GlElement {
        GlElement { m, n, entries: vec![BigRational::zero(); (m + n) * (m + n)] }
    }

    pub fn identity(m: usize, n: usize) -> GlElement {
        let mut e = GlElement::zero(m, n);
        for i in 0..m + n {
            e.set(i, i, BigRational::one());
        }
        e
    }

    /// Elementary matrix E_{ij}, 0-based.
    pub fn elementary(m: usize, n: usize, i: usize, j: usize) -> GlElement {
        let mut e = GlElement::zero(m, n);
        e.set(i, j, BigRational::one());
        e
    }

    pub fn size(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        self.entries[i * (self.m + self.n) + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        let d = self.m + self.n;
        self.entries[i * d + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.is_zero())
    }

    fn index_parity(&self, i: usize) -> Parity {
        if i < self.m {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Block parity of position (i, j).
    pub fn entry_parity(&self, i: usize, j: usize) -> Parity {
        self.index_parity(i).plus(self.index_parity(j))
    }

    /// Parity when supported on blocks of one parity; `None` for mixed.
    pub fn parity(&self) -> Option<Parity> {
        let mut result: Option<Parity> = None;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.entries[i * self.dim() + j].is_zero() {
                    continue;
                }
                let p = self.entry_parity(i, j);
                match result {
                    None => result = Some(p),
                    Some(q) if q == p => {}
                    _ => return None,
                }
            }
        }
        result.or(Some(Parity::Even))
    }

    pub fn parity_part(&self, p: Parity) -> GlElement {
        let mut out = GlElement::zero(self.m, self.n);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if self.entry_parity(i, j) == p {
                    out.set(i, j, self.get(i, j));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &GlElement) -> GlElement {
        assert_eq!((self.m, self.n), (other.m, other.n));
        GlElement {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &GlElement) -> GlElement {
        assert_eq!((self.m, self.n), (other.m, other.n));
        GlElement {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> GlElement {
        GlElement { m: self.m, n: self.n, entries: self.entries.iter().map(|a| -a).collect() }
    }

    pub fn scaled(&self, k: &BigRational) -> GlElement {
        GlElement { m: self.m, n: self.n, entries: self.entries.iter().map(|a| a * k).collect() }
    }

    pub fn matmul(&self, other: &GlElement) -> GlElement {
        assert_eq!((self.m, self.n), (other.m, other.n));
        let d = self.dim();
        let mut out = GlElement::zero(self.m, self.n);
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &other.entries[k * d + j];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    /// Super-commutator [X, Y] = XY − (−1)^{p(X)p(Y)} YX, extended
    /// bilinearly to inhomogeneous arguments.
    pub fn bracket(&self, other: &GlElement) -> Result<GlElement> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::SizeMismatch);
        }
        let mut out = GlElement::zero(self.m, self.n);
        for pa in [Parity::Even, Parity::Odd] {
            let a = self.parity_part(pa);
            if a.is_zero() {
                continue;
            }
            for pb in [Parity::Even, Parity::Odd] {
                let b = other.parity_part(pb);
                if b.is_zero() {
                    continue;
                }
                let ab = a.matmul(&b);
                let ba = b.matmul(&a);
                let term = if pa.sign_of_swap(pb) < 0 { ab.add(&ba) } else { ab.sub(&ba) };
                out = out.add(&term);
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> BigRational {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// str X = tr A − tr D in the block convention.
    pub fn supertrace(&self) -> BigRational {
        let plus: BigRational = (0..self.m).map(|i| self.get(i, i)).sum();
        let minus: BigRational = (self.m..self.dim()).map(|i| self.get(i, i)).sum();
        plus - minus
    }

    /// Canonical coset representative modulo ⟨E⟩: subtract the (1,1) entry
    /// times the identity, so the representative has vanishing (1,1) entry.
    pub fn pgl_project(&self) -> GlElement {
        let c = self.get(0, 0);
        if c.is_zero() {
            return self.clone();
        }
        self.sub(&GlElement::identity(self.m, self.n).scaled(&c))
    }

    /// Flattened coefficient vector (row-major) for exact linear algebra.
    pub fn flatten(&self) -> Vec<BigRational> {
        self.entries.clone()
    }
}

impl fmt::Display for GlElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        for i in 0..d {
            write!(f, "[")?;
            for j in 0..d {
                write!(f, " {}", self.get(i, j))?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

/// All elementary matrices E_{ab} in row-major order — the standard basis.
pub fn gl_basis(m: usize, n: usize) -> Vec<GlElement> {
    let mut out = Vec::with_capacity((m + n) * (m + n));
    for i in 0..m + n {
        for j in 0..m + n {
            out.push(GlElement::elementary(m, n, i, j));
        }
    }
    out
}

/// dim W_n = dim Der Λ(ζ₁..ζ_n) = n·2ⁿ.
pub fn wn_dimension(n: usize) -> usize {
    n * (1usize << n)
}

/// Basis of W_n = Der Λ(n) as actual derivations (each monomial times each
/// ∂/∂ζ_i); useful as an enumeration cross-check of `wn_dimension`.
pub fn wn_basis(n: usize) -> (Arc<VarTable>, Vec<SuperDerivation>) {
    let names: Vec<String> = (1..=n).map(|i| format!("ζ{i}")).collect();
    let table = VarTable::new(Vec::<String>::new(), names);
    let mut monomials = vec![SuperPolynomial::one(&table)];
    for i in 0..n {
        let v = SuperPolynomial::var(&table, VarId::odd(i));
        let mut next = monomials.clone();
        for m in &monomials {
            next.push(m * &v);
        }
        monomials = next;
    }
    let mut fields = Vec::with_capacity(n * monomials.len());
    for f in &monomials {
        for i in 0..n {
            fields.push(SuperDerivation::from_coeffs(
                &table,
                [(VarId::odd(i), RationalSuperFunction::from_poly(f.clone()))],
            ));
        }
    }
    (table, fields)
}

/// The H̃₄ image inside the vector fields on the Gr(2|2; 1|2) standard chart
/// (coordinates x, ξ₁, ξ₂), grouped by ℤ-degree, together with the grading
/// operator z = ξ₁∂ξ₁ + ξ₂∂ξ₂.
#[derive(Debug, Clone)]
pub struct H4Basis {
    /// (degree, fields) in increasing degree: sizes 4, 6, 4, 1.
    pub graded: Vec<(i32, Vec<SuperDerivation>)>,
    pub z: SuperDerivation,
}

impl H4Basis {
    pub fn all_fields(&self) -> Vec<SuperDerivation> {
        self.graded.iter().flat_map(|(_, fs)| fs.iter().cloned()).collect()
    }
}

/// Construct the 15 fields of the H̃₄ basis on the given chart, which must
/// be the standard chart of Gr(2|2; 1|2).
pub fn h4_basis(chart: &Chart) -> Result<H4Basis> {
    let flag = chart.flag();
    if (flag.m(), flag.n(), flag.length()) != (2, 2, 1) || flag.k(1) != 1 || flag.l(1) != 2 {
        return Err(Error::Other(format!("H̃₄ lives on Gr(2|2; 1|2), not {flag}")));
    }
    let t = chart.table();
    let x = chart.var_at(1, 0, 0).ok_or(Error::IndexOutOfRange)?;
    let xi1 = chart.var_at(1, 0, 1).ok_or(Error::IndexOutOfRange)?;
    let xi2 = chart.var_at(1, 0, 2).ok_or(Error::IndexOutOfRange)?;
    let xp = SuperPolynomial::var(t, x);
    let xi1p = SuperPolynomial::var(t, xi1);
    let xi2p = SuperPolynomial::var(t, xi2);
    let pol = |p: &SuperPolynomial| RationalSuperFunction::from_poly(p.clone());
    let field = |coeffs: Vec<(VarId, SuperPolynomial)>| {
        SuperDerivation::from_coeffs(t, coeffs.into_iter().map(|(v, p)| (v, pol(&p))))
    };

    let deg_m1 = vec![
        field(vec![(xi1, SuperPolynomial::one(t))]),
        field(vec![(xi2, SuperPolynomial::one(t))]),
        field(vec![(xi1, xp.clone())]),
        field(vec![(xi2, xp.clone())]),
    ];
    let deg_0 = vec![
        field(vec![(x, SuperPolynomial::one(t))]),
        field(vec![(x, xp.clone()), (xi1, xi1p.clone())]),
        field(vec![(x, xp.clone()), (xi2, xi2p.clone())]),
        field(vec![(xi2, xi1p.clone())]),
        field(vec![(xi1, xi2p.clone())]),
        field(vec![
            (xi1, &xp * &xi1p),
            (xi2, &xp * &xi2p),
            (x, xp.pow(2)),
        ]),
    ];
    let xi12 = &xi1p * &xi2p;
    let deg_1 = vec![
        field(vec![(x, xi1p.clone())]),
        field(vec![(x, xi2p.clone())]),
        field(vec![(x, &xp * &xi1p), (xi2, xi12.clone())]),
        field(vec![(x, &xp * &xi2p), (xi1, -&xi12)]),
    ];
    let deg_2 = vec![field(vec![(x, xi12.clone())])];
    let z = field(vec![(xi1, xi1p.clone()), (xi2, xi2p.clone())]);
    Ok(H4Basis {
        graded: vec![(-1, deg_m1), (0, deg_0), (1, deg_1), (2, deg_2)],
        z,
    })
}

/// The Cartan-type family H̃_n inside Der Λ(θ₁..θ_n): all D_f = Σ ∂f/∂θᵢ ∂/∂θᵢ
/// for f without constant term. Returns one derivation per nonconstant
/// monomial f (2ⁿ − 1 of them).
pub fn h_tilde_df_family(n: usize) -> (Arc<VarTable>, Vec<SuperDerivation>) {
    let names: Vec<String> = (1..=n).map(|i| format!("θ{i}")).collect();
    let table = VarTable::new(Vec::<String>::new(), names);
    let mut monomials = vec![SuperPolynomial::one(&table)];
    for i in 0..n {
        let v = SuperPolynomial::var(&table, VarId::odd(i));
        let mut next = monomials.clone();
        for m in &monomials {
            next.push(m * &v);
        }
        monomials = next;
    }
    let mut out = Vec::new();
    for f in monomials.into_iter().filter(|m| !m.is_constant()) {
        let mut coeffs = Vec::new();
        for i in 0..n {
            let d = f.partial(VarId::odd(i)).expect("valid variable");
            if !d.is_zero() {
                coeffs.push((VarId::odd(i), RationalSuperFunction::from_poly(d)));
            }
        }
        out.push(SuperDerivation::from_coeffs(&table, coeffs));
    }
    (table, out)
}

/// An abstract Lie superalgebra given by a basis with parities and exact
/// structure constants. Construction validates super-antisymmetry and the
/// super-Jacobi identity.
#[derive(Debug, Clone)]
pub struct AbstractSuperAlgebra {
    labels: Vec<String>,
    parities: Vec<Parity>,
    /// constants[i][j] = sparse expansion of [e_i, e_j] in the basis.
    constants: Vec<Vec<Vec<(usize, BigRational)>>>,
}

impl AbstractSuperAlgebra {
    pub fn new(
        labels: Vec<String>,
        parities: Vec<Parity>,
        constants: Vec<Vec<Vec<(usize, BigRational)>>>,
    ) -> Result<AbstractSuperAlgebra> {
        let dim = labels.len();
        if parities.len() != dim || constants.len() != dim || constants.iter().any(|r| r.len() != dim) {
            return Err(Error::ShapeMismatch("structure constant table shape".into()));
        }
        let alg = AbstractSuperAlgebra { labels, parities, constants };
        alg.validate()?;
        Ok(alg)
    }

    /// Build from concrete coefficient vectors with a bracket closure; the
    /// span must close under the bracket.
    pub fn from_vectors<F>(
        labels: Vec<String>,
        parities: Vec<Parity>,
        vectors: &[Vec<BigRational>],
        bracket: F,
    ) -> Result<AbstractSuperAlgebra>
    where
        F: Fn(usize, usize) -> Vec<BigRational>,
    {
        let dim = vectors.len();
        if linalg::span_rank(vectors) != dim {
            return Err(Error::Other("basis vectors are linearly dependent".into()));
        }
        let mut constants = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let b = bracket(i, j);
                let coeffs = linalg::express_in_span(vectors, &b)
                    .ok_or_else(|| Error::Other(format!("[e{i}, e{j}] leaves the span")))?;
                constants[i][j] = coeffs
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
            }
        }
        AbstractSuperAlgebra::new(labels, parities, constants)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Bracket of coordinate vectors in this basis.
    pub fn bracket_coords(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let dim = self.dim();
        let mut out = vec![BigRational::zero(); dim];
        for i in 0..dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                if y[j].is_zero() {
                    continue;
                }
                let scale = &x[i] * &y[j];
                for (k, c) in &self.constants[i][j] {
                    out[*k] += c * &scale;
                }
            }
        }
        out
    }

    fn basis_vec(&self, i: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.dim()];
        v[i] = BigRational::one();
        v
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        // super-antisymmetry
        for i in 0..dim {
            for j in 0..dim {
                let ij = self.bracket_coords(&self.basis_vec(i), &self.basis_vec(j));
                let ji = self.bracket_coords(&self.basis_vec(j), &self.basis_vec(i));
                let sign = self.parities[i].sign_of_swap(self.parities[j]);
                for k in 0..dim {
                    let rhs = if sign < 0 { ji[k].clone() } else { -ji[k].clone() };
                    if ij[k] != rhs {
                        return Err(Error::Other(format!(
                            "super-antisymmetry fails at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        // super-Jacobi: [x,[y,z]] = [[x,y],z] + (−1)^{p(x)p(y)} [y,[x,z]]
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let x = self.basis_vec(i);
                    let y = self.basis_vec(j);
                    let z = self.basis_vec(k);
                    let lhs = self.bracket_coords(&x, &self.bracket_coords(&y, &z));
                    let a = self.bracket_coords(&self.bracket_coords(&x, &y), &z);
                    let b = self.bracket_coords(&y, &self.bracket_coords(&x, &z));
                    let sign = self.parities[i].sign_of_swap(self.parities[j]);
                    for t in 0..dim {
                        let rhs = if sign < 0 { &a[t] - &b[t] } else { &a[t] + &b[t] };
                        if lhs[t] != rhs {
                            return Err(Error::Other(format!(
                                "super-Jacobi fails at ({i}, {j}, {k})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON dump of the structure constants for golden tests.
    pub fn to_json(&self) -> serde_json::Value {
        let constants: Vec<serde_json::Value> = (0..self.dim())
            .flat_map(|i| {
                (0..self.dim()).filter_map(move |j| {
                    if self.constants[i][j].is_empty() {
                        return None;
                    }
                    let terms: Vec<serde_json::Value> = self.constants[i][j]
                        .iter()
                        .map(|(k, c)| serde_json::json!([self.labels[*k], c.to_string()]))
                        .collect();
                    Some(serde_json::json!({
                        "left": self.labels[i],
                        "right": self.labels[j],
                        "bracket": terms,
                    }))
                })
            })
            .collect();
        serde_json::json!({
            "basis": self.labels,
            "parity": self.parities.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>(),
            "constants": constants,
        })
    }
}

/// Exact span dimension of coefficient vectors.
pub fn span_dimension(vectors: &[Vec<BigRational>]) -> usize {
    linalg::span_rank(vectors)
}

/// Membership of `v` in the span of `vectors`.
pub fn in_span(vectors: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    linalg::in_span(vectors, v)
}

/// Ideal test: brackets of the subspace against every algebra basis element
/// stay inside the subspace span.
pub fn is_ideal<F>(
    subspace: &[Vec<BigRational>],
    algebra_basis: &[Vec<BigRational>],
    bracket: F,
) -> bool
where
    F: Fn(&[BigRational], &[BigRational]) -> Vec<BigRational>,
{
    let mut e = linalg::Eliminator::new();
    for s in subspace {
        e.insert(linalg::row_from_dense(s));
    }
    for b in algebra_basis {
        for s in subspace {
            let br = bracket(b, s);
            if !e.contains(linalg::row_from_dense(&br)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    fn e(m: usize, n: usize, i: usize, j: usize) -> GlElement {
        GlElement::elementary(m, n, i - 1, j - 1)
    }

    #[test]
    fn classical_gl2_commutator() {
        // [E12, E21] = E11 − E22 in gl(2) = gl(2|0)
        let lhs = e(2, 0, 1, 2).bracket(&e(2, 0, 2, 1)).unwrap();
        assert_eq!(lhs, e(2, 0, 1, 1).sub(&e(2, 0, 2, 2)));
    }

    #[test]
    fn odd_odd_anticommutator() {
        // [E14, E41] = E11 + E44 in gl(2|2)
        let lhs = e(2, 2, 1, 4).bracket(&e(2, 2, 4, 1)).unwrap();
        assert_eq!(lhs, e(2, 2, 1, 1).add(&e(2, 2, 4, 4)));
    }

    #[test]
    fn identity_is_central() {
        let id = GlElement::identity(2, 2);
        for x in gl_basis(2, 2) {
            assert!(id.bracket(&x).unwrap().is_zero());
            assert!(x.bracket(&id).unwrap().is_zero());
        }
    }

    #[test]
    fn pgl_projection_normalization() {
        assert!(GlElement::identity(3, 1).pgl_project().is_zero());
        let p = e(2, 2, 1, 1).pgl_project();
        assert!(p.get(0, 0).is_zero());
        assert_eq!(p, e(2, 2, 1, 1).sub(&GlElement::identity(2, 2)));
        assert_eq!(e(2, 2, 1, 2).pgl_project(), e(2, 2, 1, 2));
        // representatives agree iff elements differ by a multiple of E
        let a = e(2, 2, 1, 1).add(&e(2, 2, 2, 2));
        let b = a.add(&GlElement::identity(2, 2).scaled(&int(7)));
        assert_eq!(a.pgl_project(), b.pgl_project());
    }

    #[test]
    fn pgl_dimension_by_rank() {
        for (m, n) in [(2usize, 1usize), (2, 2), (3, 1)] {
            let vecs: Vec<Vec<BigRational>> =
                gl_basis(m, n).iter().map(|x| x.pgl_project().flatten()).collect();
            assert_eq!(span_dimension(&vecs), (m + n) * (m + n) - 1);
        }
    }

    #[test]
    fn super_jacobi_exhaustive_gl22() {
        let basis = gl_basis(2, 2);
        for x in &basis {
            let px = x.parity().unwrap();
            for y in &basis {
                for z in &basis {
                    let lhs = x.bracket(&y.bracket(z).unwrap()).unwrap();
                    let a = x.bracket(y).unwrap().bracket(z).unwrap();
                    let b = y.bracket(&x.bracket(z).unwrap()).unwrap();
                    let rhs = if px.sign_of_swap(y.parity().unwrap()) < 0 {
                        a.sub(&b)
                    } else {
                        a.add(&b)
                    };
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn wn_dimension_formula_and_enumeration() {
        assert_eq!(wn_dimension(1), 2);
        assert_eq!(wn_dimension(3), 24);
        assert_eq!(wn_dimension(4), 64);
        // enumeration cross-check for n = 3: the basis really is independent
        let (_, fields) = wn_basis(3);
        assert_eq!(fields.len(), 24);
        let keys = derivation_keys(&fields);
        let vecs: Vec<Vec<BigRational>> =
            fields.iter().map(|f| derivation_vector(f, &keys)).collect();
        assert_eq!(span_dimension(&vecs), 24);
    }

    #[test]
    fn subspace_and_ideal_examples() {
        // span{E4 identity} is an ideal in gl(2|2)
        let basis = gl_basis(2, 2);
        let vecs: Vec<Vec<BigRational>> = basis.iter().map(GlElement::flatten).collect();
        let id = vec![GlElement::identity(2, 2).flatten()];
        let bracket = |a: &[BigRational], b: &[BigRational]| {
            let ga = from_flat(2, 2, a);
            let gb = from_flat(2, 2, b);
            ga.bracket(&gb).unwrap().flatten()
        };
        assert!(is_ideal(&id, &vecs, bracket));
        // span{E12} is not an ideal in gl(2)
        let basis2 = gl_basis(2, 0);
        let vecs2: Vec<Vec<BigRational>> = basis2.iter().map(GlElement::flatten).collect();
        let e12 = vec![e(2, 0, 1, 2).flatten()];
        let bracket2 = |a: &[BigRational], b: &[BigRational]| {
            let ga = from_flat(2, 0, a);
            let gb = from_flat(2, 0, b);
            ga.bracket(&gb).unwrap().flatten()
        };
        assert!(!is_ideal(&e12, &vecs2, bracket2));
    }

    #[test]
    fn psl22_is_a_14_dimensional_ideal_of_pgl22() {
        // work in coordinates of pgl(2|2): images of E_ab under pgl_project
        let reps: Vec<GlElement> = gl_basis(2, 2).iter().map(GlElement::pgl_project).collect();
        let pgl_span: Vec<Vec<BigRational>> = reps.iter().map(GlElement::flatten).collect();
        assert_eq!(span_dimension(&pgl_span), 15);
        // psl(2|2): supertrace-zero elements modulo the identity — the
        // off-diagonal elementaries plus a basis of the str-zero diagonal
        let mut sl: Vec<GlElement> = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    sl.push(GlElement::elementary(2, 2, i, j));
                }
            }
        }
        sl.push(e(2, 2, 1, 1).sub(&e(2, 2, 2, 2)));
        sl.push(e(2, 2, 1, 1).add(&e(2, 2, 3, 3)));
        sl.push(e(2, 2, 1, 1).add(&e(2, 2, 4, 4)));
        assert!(sl.iter().all(|x| x.supertrace().is_zero()));
        let psl: Vec<Vec<BigRational>> =
            sl.iter().map(|x| x.pgl_project().flatten()).collect();
        assert_eq!(span_dimension(&psl), 14);
        let bracket = |a: &[BigRational], b: &[BigRational]| {
            let ga = from_flat(2, 2, a);
            let gb = from_flat(2, 2, b);
            ga.bracket(&gb).unwrap().pgl_project().flatten()
        };
        assert!(is_ideal(&psl, &pgl_span, bracket));
    }

    #[test]
    fn abstract_algebra_from_gl21() {
        let basis = gl_basis(2, 1);
        let vecs: Vec<Vec<BigRational>> = basis.iter().map(GlElement::flatten).collect();
        let labels: Vec<String> = (0..3)
            .flat_map(|i| (0..3).map(move |j| format!("E{}{}", i + 1, j + 1)))
            .collect();
        let parities: Vec<Parity> = basis.iter().map(|x| x.parity().unwrap()).collect();
        let alg = AbstractSuperAlgebra::from_vectors(labels, parities, &vecs, |i, j| {
            basis[i].bracket(&basis[j]).unwrap().flatten()
        })
        .unwrap();
        assert_eq!(alg.dim(), 9);
        let json = alg.to_json();
        assert!(json["constants"].as_array().unwrap().len() > 0);
    }

    #[test]
    fn df_family_gives_15_independent_derivations() {
        let (_, dfs) = h_tilde_df_family(4);
        assert_eq!(dfs.len(), 15);
        let keys = derivation_keys(&dfs);
        let vecs: Vec<Vec<BigRational>> = dfs.iter().map(|f| derivation_vector(f, &keys)).collect();
        assert_eq!(span_dimension(&vecs), 15);
        // the family closes under bracket
        let bracket_vec = |a: &SuperDerivation, b: &SuperDerivation| {
            derivation_vector(&a.bracket(b).unwrap(), &keys)
        };
        let mut elim = linalg::Eliminator::new();
        for v in &vecs {
            elim.insert(linalg::row_from_dense(v));
        }
        for a in &dfs {
            for b in &dfs {
                assert!(elim.contains(linalg::row_from_dense(&bracket_vec(a, b))));
            }
        }
    }

    fn from_flat(m: usize, n: usize, v: &[BigRational]) -> GlElement {
        let mut g = GlElement::zero(m, n);
        for i in 0..m + n {
            for j in 0..m + n {
                g.set(i, j, v[i * (m + n) + j].clone());
            }
        }
        g
    }

    // test-local vectorization of polynomial-coefficient derivations
    fn derivation_keys(
        fields: &[SuperDerivation],
    ) -> Vec<(crate::superpoly::VarId, crate::superpoly::Monomial)> {
        let mut keys = Vec::new();
        for f in fields {
            for (v, c) in f.coeffs() {
                let p = c.is_regular().expect("polynomial coefficients");
                for (m, _) in p.terms() {
                    let key = (*v, m.clone());
                    if !keys.contains(&key) {
                        keys.push(key);
                    }
                }
            }
        }
        keys.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        keys
    }

    fn derivation_vector(
        f: &SuperDerivation,
        keys: &[(crate::superpoly::VarId, crate::superpoly::Monomial)],
    ) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); keys.len()];
        for (v, c) in f.coeffs() {
            let p = c.is_regular().expect("polynomial coefficients");
            for (m, coeff) in p.terms() {
                let pos = keys
                    .iter()
                    .position(|(kv, km)| kv == v && km == m)
                    .expect("key present");
                out[pos] = coeff.clone();
            }
        }
        out
    }
}
