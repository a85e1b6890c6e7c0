//! Parity-blocked matrices over the super-ring: the carriers of the chart
//! matrices Z, the glueing submatrices C and the acting group elements L.
//!
//! A matrix has `(p, q)` even|odd rows and `(r, s)` even|odd columns. An
//! *even* matrix holds even-homogeneous entries on the diagonal blocks and
//! odd-homogeneous entries off the diagonal; products of even matrices stay
//! even. Only multiplication, row selection and exact inversion are provided.

use std::fmt;
use std::sync::Arc;

use crate::superpoly::{
    same_table, Parity, RationalSuperFunction, SuperPolynomial, VarTable,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrix {
    table: Arc<VarTable>,
    row_split: (usize, usize),
    col_split: (usize, usize),
    /// Dense row-major grid of size (p+q) × (r+s).
    entries: Vec<RationalSuperFunction>,
}

impl SuperMatrix {
    pub fn zero(
        table: &Arc<VarTable>,
        row_split: (usize, usize),
        col_split: (usize, usize),
    ) -> SuperMatrix {
        let n = (row_split.0 + row_split.1) * (col_split.0 + col_split.1);
        SuperMatrix {
            table: table.clone(),
            row_split,
            col_split,
            entries: vec![RationalSuperFunction::zero(table); n],
        }
    }

    pub fn identity(table: &Arc<VarTable>, split: (usize, usize)) -> SuperMatrix {
        let mut m = SuperMatrix::zero(table, split, split);
        for i in 0..split.0 + split.1 {
            m.set(i, i, RationalSuperFunction::one(table));
        }
        m
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn row_split(&self) -> (usize, usize) {
        self.row_split
    }

    pub fn col_split(&self) -> (usize, usize) {
        self.col_split
    }

    pub fn rows(&self) -> usize {
        self.row_split.0 + self.row_split.1
    }

    pub fn cols(&self) -> usize {
        self.col_split.0 + self.col_split.1
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalSuperFunction {
        &self.entries[i * self.cols() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RationalSuperFunction) {
        let c = self.cols();
        self.entries[i * c + j] = v;
    }

    pub fn row_parity(&self, i: usize) -> Parity {
        if i < self.row_split.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn col_parity(&self, j: usize) -> Parity {
        if j < self.col_split.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Parity a homogeneous entry must have at position (i, j) for the matrix
    /// to be even.
    pub fn block_parity(&self, i: usize, j: usize) -> Parity {
        self.row_parity(i).plus(self.col_parity(j))
    }

    /// Even in the supermatrix sense: every entry homogeneous of its block
    /// parity (zero allowed anywhere).
    pub fn is_even(&self) -> bool {
        (0..self.rows()).all(|i| {
            (0..self.cols()).all(|j| self.get(i, j).is_homogeneous(self.block_parity(i, j)))
        })
    }

    /// Matrix product over the supercommutative ring.
    pub fn mul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        if self.col_split != other.row_split {
            return Err(Error::ShapeMismatch(format!(
                "{:?} columns vs {:?} rows",
                self.col_split, other.row_split
            )));
        }
        let mut out = SuperMatrix::zero(&self.table, self.row_split, other.col_split);
        for i in 0..self.rows() {
            for j in 0..other.cols() {
                let mut acc = RationalSuperFunction::zero(&self.table);
                for k in 0..self.cols() {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                out.set(i, j, acc);
            }
        }
        debug_assert!(
            !(self.is_even() && other.is_even()) || out.is_even(),
            "product of even matrices must be even"
        );
        Ok(out)
    }

    /// Square submatrix of the selected rows: `even_rows` index into the even
    /// rows, `odd_rows` into the odd rows (both 0-based and strictly
    /// increasing). This is the C-matrix selection of the glueing formulas.
    pub fn select_rows(&self, even_rows: &[usize], odd_rows: &[usize]) -> Result<SuperMatrix> {
        for &i in even_rows {
            if i >= self.row_split.0 {
                return Err(Error::IndexOutOfRange);
            }
        }
        for &i in odd_rows {
            if i >= self.row_split.1 {
                return Err(Error::IndexOutOfRange);
            }
        }
        let mut out = SuperMatrix::zero(
            &self.table,
            (even_rows.len(), odd_rows.len()),
            self.col_split,
        );
        for (new_i, &i) in even_rows.iter().enumerate() {
            for j in 0..self.cols() {
                out.set(new_i, j, self.get(i, j).clone());
            }
        }
        for (new_i, &i) in odd_rows.iter().enumerate() {
            for j in 0..self.cols() {
                out.set(even_rows.len() + new_i, j, self.get(self.row_split.0 + i, j).clone());
            }
        }
        Ok(out)
    }

    /// Bring all entries over one denominator; returns (numerators, den).
    fn over_common_den(&self) -> (Vec<SuperPolynomial>, SuperPolynomial) {
        let mut den = SuperPolynomial::one(&self.table);
        for e in &self.entries {
            if e.den().is_one() {
                continue;
            }
            den = match den.div_exact(e.den()) {
                Some(_) => den,
                None => match e.den().div_exact(&den) {
                    Some(_) => e.den().clone(),
                    None => &den * e.den(),
                },
            };
        }
        let nums = self
            .entries
            .iter()
            .map(|e| {
                let q = den.div_exact(e.den()).expect("common denominator divides");
                e.num() * &q
            })
            .collect();
        (nums, den)
    }

    /// Exact inverse of a square even matrix with invertible body: the body
    /// is inverted by fraction-free elimination (adjugate over the Bareiss
    /// determinant) and the nilpotent remainder by the terminating series
    /// (E + B⁻¹N)⁻¹ B⁻¹ = Σ (−B⁻¹N)^j B⁻¹.
    pub fn inverse(&self) -> Result<SuperMatrix> {
        let n = self.rows();
        if n != self.cols() || self.row_split != self.col_split {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        if !self.is_even() {
            return Err(Error::ParityViolation("inverse of a non-even matrix".into()));
        }
        let (nums, den) = self.over_common_den();
        // body of the numerator matrix
        let body: Vec<Vec<SuperPolynomial>> = (0..n)
            .map(|i| (0..n).map(|j| nums[i * n + j].body()).collect())
            .collect();
        let det = crate::linalg::poly_det(&body)?;
        if det.is_zero() {
            return Err(Error::SingularBody);
        }
        // B⁻¹ = adjugate / det (note adj[j][i] = cofactor(i, j))
        let mut binv = SuperMatrix::zero(&self.table, self.row_split, self.col_split);
        for i in 0..n {
            for j in 0..n {
                let cof = crate::linalg::poly_cofactor(&body, j, i)?;
                binv.set(i, j, RationalSuperFunction::new(cof, det.clone())?);
            }
        }
        // nilpotent part of the numerator matrix
        let mut soul = SuperMatrix::zero(&self.table, self.row_split, self.col_split);
        let mut soul_zero = true;
        for i in 0..n {
            for j in 0..n {
                let s = nums[i * n + j].soul();
                if !s.is_zero() {
                    soul_zero = false;
                }
                soul.set(i, j, RationalSuperFunction::from_poly(s));
            }
        }
        let num_inv = if soul_zero {
            binv.clone()
        } else {
            // Σ_{j≥0} (−B⁻¹N)^j B⁻¹, terminating
            let step = binv.mul(&soul)?.scale_all(-1);
            let mut acc = binv.clone();
            let mut power = binv.clone();
            let cap = self.table.odd_count() + self.table.even_count() + 2;
            for _ in 0..cap {
                power = step.mul(&power)?;
                if power.is_zero_matrix() {
                    break;
                }
                acc = acc.entrywise_add(&power);
            }
            acc
        };
        // M = N / den  ⇒  M⁻¹ = den · N⁻¹
        let den_rf = RationalSuperFunction::from_poly(den);
        let mut out = num_inv;
        for e in out.entries.iter_mut() {
            *e = e.mul(&den_rf);
        }
        Ok(out)
    }

    fn scale_all(&self, k: i64) -> SuperMatrix {
        let c = crate::rat::int(k);
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            *e = e.scaled(&c);
        }
        out
    }

    fn entrywise_add(&self, other: &SuperMatrix) -> SuperMatrix {
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e = e.add(o);
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols()
            && (0..self.rows()).all(|i| {
                (0..self.cols()).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e == &RationalSuperFunction::one(&self.table)
                    } else {
                        e.is_zero()
                    }
                })
            })
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strings: Vec<Vec<String>> = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        let widths: Vec<usize> = (0..self.cols())
            .map(|j| strings.iter().map(|r| r[j].chars().count()).max().unwrap_or(1))
            .collect();
        for (i, row) in strings.iter().enumerate() {
            if i == self.row_split.0 && self.row_split.1 > 0 {
                let total: usize =
                    widths.iter().sum::<usize>() + 3 * widths.len() + 1 + usize::from(self.col_split.1 > 0);
                writeln!(f, "{}", "-".repeat(total))?;
            }
            write!(f, "[")?;
            for (j, s) in row.iter().enumerate() {
                if j == self.col_split.0 && self.col_split.1 > 0 {
                    write!(f, " |")?;
                }
                write!(f, " {:>width$} ", s, width = widths[j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
