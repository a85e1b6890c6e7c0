//! Exact linear algebra over ℚ: sparse echelon reduction, nullspaces, affine
//! systems with infeasibility certificates, and fraction-free (Bareiss)
//! determinants over polynomial entries.
//!
//! Rows are kept with coprime integer coefficients (content divided out after
//! every combination step), so no rounding and no coefficient swell beyond
//! the fraction-free bound.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::superpoly::SuperPolynomial;
use crate::{Error, Result};

/// Sparse row: strictly increasing column indices with nonzero coefficients.
pub type SparseRow = Vec<(usize, BigRational)>;

pub fn row_from_dense(v: &[BigRational]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn row_to_dense(row: &SparseRow, ncols: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); ncols];
    for (i, c) in row {
        out[*i] = c.clone();
    }
    out
}

/// dest + factor·src, merged.
pub fn row_add_scaled(dest: &SparseRow, src: &SparseRow, factor: &BigRational) -> SparseRow {
    let mut out = SparseRow::with_capacity(dest.len() + src.len());
    let mut i = 0;
    let mut j = 0;
    while i < dest.len() || j < src.len() {
        let next = match (dest.get(i), src.get(j)) {
            (Some((ci, a)), Some((cj, b))) => match ci.cmp(cj) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    (*ci, a.clone())
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    (*cj, b * factor)
                }
                std::cmp::Ordering::Equal => {
                    let v = a + &(b * factor);
                    i += 1;
                    j += 1;
                    (*ci, v)
                }
            },
            (Some((ci, a)), None) => {
                i += 1;
                (*ci, a.clone())
            }
            (None, Some((cj, b))) => {
                j += 1;
                (*cj, b * factor)
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    out
}

/// Divide out the rational content, making coefficients coprime integers with
/// the leading (lowest-column) one positive.
pub fn row_normalize(row: &mut SparseRow) {
    if row.is_empty() {
        return;
    }
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for (_, c) in row.iter() {
        num_gcd = num_gcd.gcd(c.numer());
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut scale = BigRational::new(den_lcm, num_gcd);
    if row[0].1.is_negative() {
        scale = -scale;
    }
    if !scale.is_one() {
        for (_, c) in row.iter_mut() {
            *c *= &scale;
        }
    }
}

/// Incremental echelon form: one row per pivot column.
#[derive(Debug, Clone, Default)]
pub struct Eliminator {
    rows: BTreeMap<usize, SparseRow>,
}

impl Eliminator {
    pub fn new() -> Eliminator {
        Eliminator { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduce a row against the current echelon rows.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        loop {
            let Some(&(col, ref lead)) = row.first() else { return row };
            match self.rows.get(&col) {
                None => return row,
                Some(pivot_row) => {
                    let factor = -(lead / &pivot_row[0].1);
                    row = row_add_scaled(&row, pivot_row, &factor);
                    row_normalize(&mut row);
                }
            }
        }
    }

    /// Reduce and insert; returns the new pivot column if the row was
    /// independent.
    pub fn insert(&mut self, row: SparseRow) -> Option<usize> {
        let mut row = self.reduce(row);
        row_normalize(&mut row);
        let col = row.first()?.0;
        self.rows.insert(col, row);
        Some(col)
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    /// Full reduction to reduced echelon form (each pivot column appears in
    /// exactly one row, pivot coefficient 1).
    fn rref(&self) -> BTreeMap<usize, SparseRow> {
        let mut rows = self.rows.clone();
        let pivots: Vec<usize> = rows.keys().copied().collect();
        for &p in pivots.iter().rev() {
            let row = rows.get(&p).unwrap().clone();
            for &q in pivots.iter() {
                if q >= p {
                    break;
                }
                let r = rows.get_mut(&q).unwrap();
                if let Some(pos) = r.iter().position(|(c, _)| *c == p) {
                    let factor = -(&r[pos].1 / &row[0].1);
                    *r = row_add_scaled(r, &row, &factor);
                }
            }
        }
        // normalize pivots to 1
        for row in rows.values_mut() {
            let lead = row[0].1.clone();
            if !lead.is_one() {
                for (_, c) in row.iter_mut() {
                    *c /= &lead;
                }
            }
        }
        rows
    }

    /// Canonical basis of the nullspace of the row span, as dense vectors of
    /// length `ncols`: one vector per free column, with entry 1 there.
    pub fn nullspace(&self, ncols: usize) -> Vec<Vec<BigRational>> {
        let rref = self.rref();
        let pivot_cols: Vec<usize> = rref.keys().copied().collect();
        let mut basis = Vec::new();
        for free in 0..ncols {
            if rref.contains_key(&free) {
                continue;
            }
            let mut v = vec![BigRational::zero(); ncols];
            v[free] = BigRational::one();
            for &p in &pivot_cols {
                let row = &rref[&p];
                if let Some(pos) = row.iter().position(|(c, _)| *c == free) {
                    v[p] = -row[pos].1.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of a list of dense vectors.
pub fn span_rank(vecs: &[Vec<BigRational>]) -> usize {
    let mut e = Eliminator::new();
    for v in vecs {
        e.insert(row_from_dense(v));
    }
    e.rank()
}

/// Whether `v` lies in the span of `vecs`.
pub fn in_span(vecs: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let mut e = Eliminator::new();
    for w in vecs {
        e.insert(row_from_dense(w));
    }
    e.contains(row_from_dense(v))
}

/// Coefficients expressing `v` as a combination of `vecs`, if any.
pub fn express_in_span(vecs: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = vecs.len();
    if v.iter().all(|c| c.is_zero()) {
        return Some(vec![BigRational::zero(); n]);
    }
    let dim = v.len();
    let mut sys = AffineSystem::new(n);
    for p in 0..dim {
        let row: SparseRow = (0..n)
            .filter(|&i| !vecs[i][p].is_zero())
            .map(|i| (i, vecs[i][p].clone()))
            .collect();
        sys.push(row, v[p].clone(), p.to_string());
    }
    match sys.solve() {
        AffineOutcome::Feasible { particular, .. } => Some(particular),
        AffineOutcome::Infeasible { .. } => None,
    }
}

/// An affine system A·x = b with tagged rows, solved exactly.
#[derive(Debug, Clone)]
pub struct AffineSystem {
    ncols: usize,
    rows: Vec<(SparseRow, BigRational, String)>,
}

#[derive(Debug, Clone)]
pub enum AffineOutcome {
    Feasible {
        /// One solution (free unknowns set to zero).
        particular: Vec<BigRational>,
        /// Basis of the homogeneous solution space.
        nullspace: Vec<Vec<BigRational>>,
    },
    Infeasible {
        /// Indices into the original row list forming a 1-minimal
        /// inconsistent subsystem.
        support: Vec<usize>,
    },
}

impl AffineSystem {
    pub fn new(ncols: usize) -> AffineSystem {
        AffineSystem { ncols, rows: Vec::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: SparseRow, rhs: BigRational, tag: String) {
        debug_assert!(row.iter().all(|(c, v)| *c < self.ncols && !v.is_zero()));
        self.rows.push((row, rhs, tag));
    }

    pub fn tag(&self, idx: usize) -> &str {
        &self.rows[idx].2
    }

    pub fn row(&self, idx: usize) -> (&SparseRow, &BigRational) {
        (&self.rows[idx].0, &self.rows[idx].1)
    }

    /// Augmented row with the right-hand side at virtual column `ncols`.
    fn augmented(&self, idx: usize) -> SparseRow {
        let (row, rhs, _) = &self.rows[idx];
        let mut aug = row.clone();
        if !rhs.is_zero() {
            aug.push((self.ncols, rhs.clone()));
        }
        aug
    }

    fn subset_feasible(&self, subset: &[usize]) -> bool {
        let mut e = Eliminator::new();
        for &idx in subset {
            if let Some(p) = e.insert(self.augmented(idx)) {
                if p == self.ncols {
                    return false;
                }
            }
        }
        true
    }

    pub fn solve(&self) -> AffineOutcome {
        let mut e = Eliminator::new();
        for idx in 0..self.rows.len() {
            if let Some(p) = e.insert(self.augmented(idx)) {
                if p == self.ncols {
                    // contradiction; shrink to a 1-minimal inconsistent subset
                    let mut support: Vec<usize> = (0..=idx).collect();
                    let mut i = 0;
                    while i < support.len() {
                        let mut trial = support.clone();
                        trial.remove(i);
                        if !self.subset_feasible(&trial) {
                            support = trial;
                        } else {
                            i += 1;
                        }
                    }
                    return AffineOutcome::Infeasible { support };
                }
            }
        }
        // feasible: back-substitute
        let rref = e.rref();
        let mut particular = vec![BigRational::zero(); self.ncols];
        for (&p, row) in &rref {
            debug_assert!(p < self.ncols);
            let rhs = row
                .iter()
                .find(|(c, _)| *c == self.ncols)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(BigRational::zero);
            // free unknowns are zero, so x_p = rhs
            particular[p] = rhs;
        }
        // homogeneous nullspace: drop the rhs column
        let mut hom = Eliminator::new();
        for (row, _, _) in &self.rows {
            hom.insert(row.clone());
        }
        AffineOutcome::Feasible { particular, nullspace: hom.nullspace(self.ncols) }
    }
}

/// Bareiss fraction-free determinant of a square matrix of body-only
/// polynomial entries (an integral domain, so the exact divisions succeed).
pub fn poly_det(mat: &[Vec<SuperPolynomial>]) -> Result<SuperPolynomial> {
    let n = mat.len();
    if n == 0 {
        return Err(Error::ShapeMismatch("empty matrix".into()));
    }
    let table = mat[0][0].table().clone();
    for row in mat {
        if row.len() != n {
            return Err(Error::ShapeMismatch("non-square matrix".into()));
        }
        for e in row {
            if !e.is_body_only() {
                return Err(Error::BadDenominator(e.to_string()));
            }
        }
    }
    let mut m: Vec<Vec<SuperPolynomial>> = mat.to_vec();
    let mut sign = 1i8;
    let mut prev = SuperPolynomial::one(&table);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(SuperPolynomial::zero(&table)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss division is exact over an integral domain");
            }
            m[i][k] = SuperPolynomial::zero(&table);
        }
        prev = m[k][k].clone();
    }
    let mut det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det = -&det;
    }
    Ok(det)
}

/// Cofactor expansion entry: (−1)^{i+j} · det of the minor.
pub fn poly_cofactor(mat: &[Vec<SuperPolynomial>], i: usize, j: usize) -> Result<SuperPolynomial> {
    let n = mat.len();
    if n == 1 {
        return Ok(SuperPolynomial::one(mat[0][0].table()));
    }
    let minor: Vec<Vec<SuperPolynomial>> = (0..n)
        .filter(|&r| r != i)
        .map(|r| (0..n).filter(|&c| c != j).map(|c| mat[r][c].clone()).collect())
        .collect();
    let d = poly_det(&minor)?;
    Ok(if (i + j) % 2 == 0 { d } else { -&d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;
    use crate::superpoly::VarTable;

    fn dense(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn nullspace_of_simple_system() {
        // x + y + z = 0, x - z = 0 → span{(1, -2, 1)}
        let mut e = Eliminator::new();
        e.insert(row_from_dense(&[int(1), int(1), int(1)]));
        e.insert(row_from_dense(&[int(1), int(0), int(-1)]));
        let ns = e.nullspace(3);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(&v[0] + &(&v[1] + &v[2]), int(0));
        assert_eq!(&v[0] - &v[2], int(0));
    }

    #[test]
    fn rank_and_membership() {
        let vecs = dense(&[&[1, 0, 2], &[0, 1, 1], &[1, 1, 3]]);
        assert_eq!(span_rank(&vecs), 2);
        assert!(in_span(&vecs[..2], &[int(2), int(3), int(7)]));
        assert!(!in_span(&vecs[..2], &[int(0), int(0), int(1)]));
        let c = express_in_span(&vecs[..2], &[int(2), int(3), int(7)]).unwrap();
        assert_eq!(c, vec![int(2), int(3)]);
    }

    #[test]
    fn affine_infeasible_minimal_support() {
        // x = 1, y = 1, x + y = 0 is minimally inconsistent as a whole;
        // an unrelated consistent row must not appear in the support.
        let mut sys = AffineSystem::new(3);
        sys.push(vec![(2, int(1))], int(5), "unrelated".into());
        sys.push(vec![(0, int(1))], int(1), "x=1".into());
        sys.push(vec![(1, int(1))], int(1), "y=1".into());
        sys.push(vec![(0, int(1)), (1, int(1))], int(0), "x+y=0".into());
        match sys.solve() {
            AffineOutcome::Infeasible { support } => {
                assert_eq!(support, vec![1, 2, 3]);
            }
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn affine_feasible_particular_solution() {
        let mut sys = AffineSystem::new(2);
        sys.push(vec![(0, int(2))], int(4), "2x=4".into());
        sys.push(vec![(0, int(1)), (1, int(1))], int(5), "x+y=5".into());
        match sys.solve() {
            AffineOutcome::Feasible { particular, nullspace } => {
                assert_eq!(particular, vec![int(2), int(3)]);
                assert!(nullspace.is_empty());
            }
            _ => panic!("expected feasible"),
        }
    }

    #[test]
    fn bareiss_det_matches_cofactors() {
        let t = VarTable::new(vec!["a", "b", "c", "d"], Vec::<&str>::new());
        let a = SuperPolynomial::var_named(&t, "a").unwrap();
        let b = SuperPolynomial::var_named(&t, "b").unwrap();
        let c = SuperPolynomial::var_named(&t, "c").unwrap();
        let d = SuperPolynomial::var_named(&t, "d").unwrap();
        let one = SuperPolynomial::one(&t);
        let mat = vec![
            vec![a.clone(), b.clone(), one.clone()],
            vec![c.clone(), d.clone(), one.clone()],
            vec![one.clone(), one.clone(), one.clone()],
        ];
        let det = poly_det(&mat).unwrap();
        // expansion along the last row
        let mut expect = SuperPolynomial::zero(&t);
        for j in 0..3 {
            expect = &expect + &(&mat[2][j] * &poly_cofactor(&mat, 2, j).unwrap());
        }
        assert_eq!(det, expect);
    }
}
