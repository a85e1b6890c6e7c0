//! Exact arithmetic in the free supercommutative ring ℚ[x₁..x_p] ⊗ Λ(ξ₁..ξ_q)
//! and in its localization at even, odd-free denominators.
//!
//! Even variables commute, odd variables anticommute and square to zero. A
//! variable table fixes the names and the canonical order once; every value
//! carries a shared reference to its table. Terms are kept in a canonical
//! order (graded lex on the even exponents, then lex on the odd index sets)
//! with odd index sets strictly increasing — the Koszul sign of sorting is
//! absorbed into the coefficient.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// ℤ₂ parity of a variable, monomial or homogeneous element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity of a product: addition in ℤ₂.
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn of_len(len: usize) -> Parity {
        if len % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign_of_swap(self, other: Parity) -> i8 {
        if self == Parity::Odd && other == Parity::Odd {
            -1
        } else {
            1
        }
    }
}

/// Identifier of a variable inside its table: parity class plus position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId {
    pub parity: Parity,
    pub index: usize,
}

impl VarId {
    pub fn even(index: usize) -> VarId {
        VarId { parity: Parity::Even, index }
    }

    pub fn odd(index: usize) -> VarId {
        VarId { parity: Parity::Odd, index }
    }
}

// Even variables sort before odd ones; this fixes coordinate order in
// derivations and ansatz unknowns.
impl Ord for VarId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.parity, self.index).cmp(&(other.parity, other.index))
    }
}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered table of even and odd variable names, fixed for the lifetime of a
/// computation. At most 64 odd variables (index sets live in a `u64`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    even: Vec<String>,
    /// Even variables flagged nilpotent square to zero (formal parameters).
    nilpotent: Vec<bool>,
    odd: Vec<String>,
}

impl VarTable {
    pub fn new<S: Into<String>>(even: Vec<S>, odd: Vec<S>) -> Arc<VarTable> {
        let even: Vec<String> = even.into_iter().map(Into::into).collect();
        let odd: Vec<String> = odd.into_iter().map(Into::into).collect();
        assert!(odd.len() <= 64, "at most 64 odd variables supported");
        let mut seen = std::collections::HashSet::new();
        for name in even.iter().chain(odd.iter()) {
            assert!(seen.insert(name.clone()), "duplicate variable name `{name}`");
        }
        let nilpotent = vec![false; even.len()];
        Arc::new(VarTable { even, nilpotent, odd })
    }

    /// New table with a formal parameter prepended to its parity class.
    /// An even parameter is marked nilpotent (t² = 0). Returns the id of the
    /// parameter in the new table; existing variables keep their relative
    /// order, shifted by one inside the parameter's parity class.
    pub fn with_parameter(self: &Arc<Self>, name: &str, parity: Parity) -> (Arc<VarTable>, VarId) {
        let mut even = self.even.clone();
        let mut nilpotent = self.nilpotent.clone();
        let mut odd = self.odd.clone();
        match parity {
            Parity::Even => {
                even.insert(0, name.to_string());
                nilpotent.insert(0, true);
            }
            Parity::Odd => {
                assert!(odd.len() < 64, "odd variable limit reached");
                odd.insert(0, name.to_string());
            }
        }
        let table = Arc::new(VarTable { even, nilpotent, odd });
        (table, VarId { parity, index: 0 })
    }

    pub fn even_count(&self) -> usize {
        self.even.len()
    }

    pub fn odd_count(&self) -> usize {
        self.odd.len()
    }

    pub fn is_nilpotent(&self, index: usize) -> bool {
        self.nilpotent[index]
    }

    pub fn name(&self, v: VarId) -> &str {
        match v.parity {
            Parity::Even => &self.even[v.index],
            Parity::Odd => &self.odd[v.index],
        }
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        if let Some(i) = self.even.iter().position(|n| n == name) {
            return Some(VarId::even(i));
        }
        self.odd.iter().position(|n| n == name).map(VarId::odd)
    }

    pub fn contains(&self, v: VarId) -> bool {
        match v.parity {
            Parity::Even => v.index < self.even.len(),
            Parity::Odd => v.index < self.odd.len(),
        }
    }

    /// All variables, even before odd, each class in table order.
    pub fn vars(&self) -> Vec<VarId> {
        (0..self.even.len())
            .map(VarId::even)
            .chain((0..self.odd.len()).map(VarId::odd))
            .collect()
    }
}

pub(crate) fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent data of one term: even exponents plus a strictly increasing odd
/// index set stored as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    even: Vec<u32>,
    odd: u64,
}

impl Monomial {
    pub fn one(table: &VarTable) -> Monomial {
        Monomial { even: vec![0; table.even_count()], odd: 0 }
    }

    pub fn var(table: &VarTable, v: VarId) -> Monomial {
        let mut m = Monomial::one(table);
        match v.parity {
            Parity::Even => m.even[v.index] = 1,
            Parity::Odd => m.odd = 1u64 << v.index,
        }
        m
    }

    pub fn even_exponent(&self, index: usize) -> u32 {
        self.even[index]
    }

    pub fn has_odd(&self, index: usize) -> bool {
        self.odd & (1u64 << index) != 0
    }

    pub fn odd_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(|i| self.odd & (1u64 << i) != 0)
    }

    pub fn even_degree(&self) -> u32 {
        self.even.iter().sum()
    }

    pub fn odd_degree(&self) -> u32 {
        self.odd.count_ones()
    }

    pub fn degree(&self) -> u32 {
        self.even_degree() + self.odd_degree()
    }

    pub fn parity(&self) -> Parity {
        Parity::of_len(self.odd_degree() as usize)
    }

    pub fn is_one(&self) -> bool {
        self.odd == 0 && self.even.iter().all(|&e| e == 0)
    }

    /// Variables occurring in this monomial.
    pub fn support(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .even
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| VarId::even(i))
            .collect();
        vars.extend(self.odd_indices().map(VarId::odd));
        vars
    }

    /// Product with the Koszul sign of merging the odd index sets; `None` when
    /// an odd index repeats or a nilpotent even variable exceeds power one.
    pub fn mul(&self, other: &Monomial, table: &VarTable) -> Option<(Monomial, i8)> {
        if self.odd & other.odd != 0 {
            return None;
        }
        let mut even = self.even.clone();
        for (i, e) in other.even.iter().enumerate() {
            even[i] += e;
            if table.nilpotent[i] && even[i] > 1 {
                return None;
            }
        }
        let sign = koszul_sign(self.odd, other.odd);
        Some((Monomial { even, odd: self.odd | other.odd }, sign))
    }

    /// Whether `self` divides `other` in the even part with equal odd part —
    /// the divisibility used by exact division with an even divisor.
    fn even_divides(&self, other: &Monomial) -> bool {
        self.odd == 0 && self.even.iter().zip(&other.even).all(|(a, b)| a <= b)
    }

    fn even_quotient(&self, other: &Monomial) -> Monomial {
        Monomial {
            even: other.even.iter().zip(&self.even).map(|(b, a)| b - a).collect(),
            odd: other.odd,
        }
    }
}

/// Sign of moving every odd generator of `b` into place after those of `a`:
/// (−1)^{#inversions}.
fn koszul_sign(a: u64, b: u64) -> i8 {
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        // generators of `a` with index greater than j must jump over ξ_j
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

// Canonical term order: graded lex on even exponents, then lex on the odd
// index sets read as increasing sequences.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.even_degree()
            .cmp(&other.even_degree())
            .then_with(|| self.even.cmp(&other.even))
            .then_with(|| cmp_odd_sets(self.odd, other.odd))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cmp_odd_sets(mut a: u64, mut b: u64) -> Ordering {
    loop {
        match (a, b) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {
                let ia = a.trailing_zeros();
                let ib = b.trailing_zeros();
                match ia.cmp(&ib) {
                    Ordering::Equal => {
                        a &= a - 1;
                        b &= b - 1;
                    }
                    ord => return ord,
                }
            }
        }
    }
}

/// Element of ℚ[even vars] ⊗ Λ(odd vars): a map from monomials to nonzero
/// rational coefficients over a fixed variable table.
#[derive(Debug, Clone)]
pub struct SuperPolynomial {
    table: Arc<VarTable>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PartialEq for SuperPolynomial {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for SuperPolynomial {}

impl SuperPolynomial {
    pub fn zero(table: &Arc<VarTable>) -> SuperPolynomial {
        SuperPolynomial { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn one(table: &Arc<VarTable>) -> SuperPolynomial {
        SuperPolynomial::constant(table, BigRational::one())
    }

    pub fn constant(table: &Arc<VarTable>, c: BigRational) -> SuperPolynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(table), c);
        }
        SuperPolynomial { table: table.clone(), terms }
    }

    pub fn var(table: &Arc<VarTable>, v: VarId) -> SuperPolynomial {
        assert!(table.contains(v), "variable outside table");
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(table, v), BigRational::one());
        SuperPolynomial { table: table.clone(), terms }
    }

    pub fn var_named(table: &Arc<VarTable>, name: &str) -> Result<SuperPolynomial> {
        let v = table.lookup(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(SuperPolynomial::var(table, v))
    }

    pub fn from_terms<I>(table: &Arc<VarTable>, iter: I) -> SuperPolynomial
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = SuperPolynomial::zero(table);
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().map_or(false, |(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Monomial::one(&self.table)).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Maximal total degree, 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Homogeneous parity: `Some` when all terms agree (zero counts as even).
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Some(Parity::Even),
            Some(m) => m.parity(),
        };
        if it.all(|m| m.parity() == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self, p: Parity) -> bool {
        self.is_zero() || self.parity() == Some(p)
    }

    /// Part of the given parity.
    pub fn parity_part(&self, p: Parity) -> SuperPolynomial {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.parity() == p)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The body: terms free of odd variables and of nilpotent even variables.
    pub fn body(&self) -> SuperPolynomial {
        let nilp = &self.table.nilpotent;
        SuperPolynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| {
                    m.odd == 0 && m.even.iter().enumerate().all(|(i, &e)| e == 0 || !nilp[i])
                })
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The nilpotent part `self − body`.
    pub fn soul(&self) -> SuperPolynomial {
        self - &self.body()
    }

    /// True when no odd and no nilpotent even variable occurs.
    pub fn is_body_only(&self) -> bool {
        self.terms.keys().all(|m| {
            m.odd == 0 && m.even.iter().enumerate().all(|(i, &e)| e == 0 || !self.table.nilpotent[i])
        })
    }

    pub fn support(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for m in self.terms.keys() {
            for v in m.support() {
                if seen.insert(v) {
                    out.push(v);
                }
            }
        }
        out.sort();
        out
    }

    pub fn depends_on(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| match v.parity {
            Parity::Even => m.even[v.index] > 0,
            Parity::Odd => m.has_odd(v.index),
        })
    }

    pub fn checked_add(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &SuperPolynomial) -> Result<SuperPolynomial> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        let mut out = SuperPolynomial::zero(&self.table);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb, &self.table) {
                    let mut c = ca * cb;
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &BigRational) -> SuperPolynomial {
        if c.is_zero() {
            return SuperPolynomial::zero(&self.table);
        }
        SuperPolynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> SuperPolynomial {
        let mut out = SuperPolynomial::one(&self.table);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative. Odd variables use the LEFT derivative: the
    /// generator is moved to the front of the monomial (collecting the sign)
    /// and struck out.
    pub fn partial(&self, v: VarId) -> Result<SuperPolynomial> {
        if !self.table.contains(v) {
            return Err(Error::UnknownVariable(format!("#{:?}", v)));
        }
        let mut out = SuperPolynomial::zero(&self.table);
        match v.parity {
            Parity::Even => {
                for (m, c) in &self.terms {
                    let e = m.even[v.index];
                    if e == 0 {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2.even[v.index] -= 1;
                    out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
                }
            }
            Parity::Odd => {
                let bit = 1u64 << v.index;
                for (m, c) in &self.terms {
                    if m.odd & bit == 0 {
                        continue;
                    }
                    // sign of moving ξ_v past the lower-index generators
                    let below = (m.odd & (bit - 1)).count_ones();
                    let mut m2 = m.clone();
                    m2.odd &= !bit;
                    let mut coeff = c.clone();
                    if below % 2 == 1 {
                        coeff = -coeff;
                    }
                    out.add_term(m2, coeff);
                }
            }
        }
        Ok(out)
    }

    /// Ring homomorphism into the rational superfunctions over the target
    /// table of `images`. Every variable in the support must have an image of
    /// its own parity.
    pub fn substitute(&self, images: &Substitution) -> Result<RationalSuperFunction> {
        let target = &images.target;
        let mut acc = RationalSuperFunction::zero(target);
        let mut power_cache: HashMap<(usize, u32), RationalSuperFunction> = HashMap::new();
        for (m, c) in &self.terms {
            let mut term = RationalSuperFunction::constant(target, c.clone());
            for (i, &e) in m.even.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = images
                    .get(VarId::even(i))
                    .ok_or_else(|| Error::UnknownVariable(self.table.even[i].clone()))?;
                let p = power_cache
                    .entry((i, e))
                    .or_insert_with(|| img.pow(e))
                    .clone();
                term = term.mul(&p);
            }
            for j in m.odd_indices() {
                let img = images
                    .get(VarId::odd(j))
                    .ok_or_else(|| Error::UnknownVariable(self.table.odd[j].clone()))?;
                term = term.mul(img);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Inverse 1/a for an even element with nonzero body, as the terminating
    /// geometric series (1/b)·Σ (−n/b)^j where a = b + n with n nilpotent.
    pub fn invert(&self) -> Result<RationalSuperFunction> {
        if !self.is_homogeneous(Parity::Even) {
            return Err(Error::ParityViolation("inverse of a non-even element".into()));
        }
        let body = self.body();
        if body.is_zero() {
            return Err(Error::ZeroBody);
        }
        let soul = self.soul();
        // collect powers n^j until they vanish
        let mut powers = vec![SuperPolynomial::one(&self.table)];
        let mut p = soul.clone();
        while !p.is_zero() {
            powers.push(p.clone());
            p = &p * &soul;
        }
        let last = powers.len() - 1; // n^{last+1} = 0
        // 1/a = Σ_{j=0..last} (−1)^j n^j b^{last−j} / b^{last+1}
        let mut num = SuperPolynomial::zero(&self.table);
        for (j, nj) in powers.iter().enumerate() {
            let mut t = nj * &body.pow((last - j) as u32);
            if j % 2 == 1 {
                t = -&t;
            }
            num = &num + &t;
        }
        let den = body.pow(last as u32 + 1);
        RationalSuperFunction::new(num, den)
    }

    /// Exact division with remainder by an even, odd-free, body-only divisor.
    /// Returns `(quotient, remainder)` with `self = q·d + r` and no term of
    /// `r` divisible by the leading term of `d`.
    pub fn divrem(&self, divisor: &SuperPolynomial) -> Result<(SuperPolynomial, SuperPolynomial)> {
        if !same_table(&self.table, &divisor.table) {
            return Err(Error::TableMismatch);
        }
        if divisor.is_zero() {
            return Err(Error::ZeroBody);
        }
        if !divisor.is_body_only() {
            return Err(Error::BadDenominator(divisor.to_string()));
        }
        let (lead_m, lead_c) = divisor.terms.iter().next_back().expect("nonzero divisor");
        let mut rem_terms: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        let mut quot = SuperPolynomial::zero(&self.table);
        let mut work = self.clone();
        while let Some((m, c)) = work.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if lead_m.even_divides(&m) {
                let qm = lead_m.even_quotient(&m);
                let qc = &c / lead_c;
                // work -= (qc·qm)·divisor; the leading term cancels
                for (dm, dc) in &divisor.terms {
                    let (pm, sign) = qm.mul(dm, &self.table).expect("even divisor cannot annihilate");
                    debug_assert_eq!(sign, 1);
                    work.add_term(pm, -(&qc * dc));
                }
                quot.add_term(qm, qc);
            } else {
                work.terms.remove(&m);
                rem_terms.insert(m, c);
            }
        }
        let rem = SuperPolynomial { table: self.table.clone(), terms: rem_terms };
        Ok((quot, rem))
    }

    /// Exact quotient when the divisor divides exactly, else `None`.
    pub fn div_exact(&self, divisor: &SuperPolynomial) -> Option<SuperPolynomial> {
        match self.divrem(divisor) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// Rational content: positive rational c such that `self / c` has coprime
    /// integer coefficients. Zero polynomial reports content 1.
    pub fn rational_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Componentwise minimum exponent vector over all terms (the common even
    /// monomial factor). Zero polynomial has none.
    fn common_even_monomial(&self) -> Option<Vec<u32>> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut min = first.even.clone();
        for m in it {
            for (a, b) in min.iter_mut().zip(&m.even) {
                *a = (*a).min(*b);
            }
        }
        Some(min)
    }

    fn shift_down(&self, shift: &[u32]) -> SuperPolynomial {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let even = m.even.iter().zip(shift).map(|(e, s)| e - s).collect();
                    (Monomial { even, odd: m.odd }, c.clone())
                })
                .collect(),
        }
    }

    /// Transport to another table along a variable map. The map must be
    /// injective on the support; odd reindexings contribute the sign of the
    /// induced permutation.
    pub fn remap<F>(&self, target: &Arc<VarTable>, map: F) -> Result<SuperPolynomial>
    where
        F: Fn(VarId) -> Option<VarId>,
    {
        let mut out = SuperPolynomial::zero(target);
        for (m, c) in &self.terms {
            let mut even = vec![0u32; target.even_count()];
            for (i, &e) in m.even.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let w = map(VarId::even(i))
                    .ok_or_else(|| Error::UnknownVariable(self.table.even[i].clone()))?;
                assert_eq!(w.parity, Parity::Even, "parity change in remap");
                even[w.index] += e;
            }
            let mut images: Vec<usize> = Vec::new();
            for j in m.odd_indices() {
                let w = map(VarId::odd(j))
                    .ok_or_else(|| Error::UnknownVariable(self.table.odd[j].clone()))?;
                assert_eq!(w.parity, Parity::Odd, "parity change in remap");
                images.push(w.index);
            }
            // sign of sorting the image sequence
            let mut sign = 1i8;
            let mut odd = 0u64;
            for (pos, &j) in images.iter().enumerate() {
                let bit = 1u64 << j;
                assert!(odd & bit == 0, "remap not injective on odd variables");
                let inversions = images[..pos].iter().filter(|&&k| k > j).count();
                if inversions % 2 == 1 {
                    sign = -sign;
                }
                odd |= bit;
            }
            let mut coeff = c.clone();
            if sign < 0 {
                coeff = -coeff;
            }
            out.add_term(Monomial { even, odd }, coeff);
        }
        Ok(out)
    }

    /// Stable JSON rendering as a list of terms (used by golden tests).
    pub fn to_json_terms(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let even: Vec<serde_json::Value> = m
                    .even
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| serde_json::json!([self.table.even[i].clone(), e]))
                    .collect();
                let odd: Vec<String> =
                    m.odd_indices().map(|j| self.table.odd[j].clone()).collect();
                serde_json::json!({
                    "coeff": c.to_string(),
                    "even": even,
                    "odd": odd,
                })
            })
            .collect();
        serde_json::Value::Array(terms)
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in m.even.iter().enumerate() {
                if e == 1 {
                    factors.push(self.table.even[i].clone());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.table.even[i], e));
                }
            }
            for j in m.odd_indices() {
                factors.push(self.table.odd[j].clone());
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_add(rhs).expect("variable table mismatch in +")
    }
}

impl std::ops::Sub for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.checked_mul(rhs).expect("variable table mismatch in *")
    }
}

impl std::ops::Neg for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        SuperPolynomial {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

/// A substitution: images for source variables over a common target table.
/// Images must be homogeneous of the source variable's parity.
#[derive(Debug, Clone)]
pub struct Substitution {
    target: Arc<VarTable>,
    images: HashMap<VarId, RationalSuperFunction>,
}

impl Substitution {
    pub fn new(target: &Arc<VarTable>) -> Substitution {
        Substitution { target: target.clone(), images: HashMap::new() }
    }

    pub fn target(&self) -> &Arc<VarTable> {
        &self.target
    }

    pub fn insert(&mut self, v: VarId, image: RationalSuperFunction) -> Result<()> {
        if !same_table(image.table(), &self.target) {
            return Err(Error::TableMismatch);
        }
        if !image.is_homogeneous(v.parity) {
            return Err(Error::ParityViolation(format!(
                "image of a {:?} variable must be {:?}-homogeneous",
                v.parity, v.parity
            )));
        }
        self.images.insert(v, image);
        Ok(())
    }

    pub fn get(&self, v: VarId) -> Option<&RationalSuperFunction> {
        self.images.get(&v)
    }

    /// Identity substitution on a table (handy base case for tests).
    pub fn identity(table: &Arc<VarTable>) -> Substitution {
        let mut s = Substitution::new(table);
        for v in table.vars() {
            s.insert(v, RationalSuperFunction::var(table, v)).expect("identity image");
        }
        s
    }
}

/// Quotient num/den with an even, odd-free denominator of nonzero body.
/// Reduction divides out the denominator exactly whenever possible and
/// otherwise cancels the common rational-and-monomial content.
#[derive(Debug, Clone)]
pub struct RationalSuperFunction {
    num: SuperPolynomial,
    den: SuperPolynomial,
}

impl RationalSuperFunction {
    pub fn new(num: SuperPolynomial, den: SuperPolynomial) -> Result<RationalSuperFunction> {
        if !same_table(num.table(), den.table()) {
            return Err(Error::TableMismatch);
        }
        if den.is_zero() {
            return Err(Error::ZeroBody);
        }
        if !den.is_body_only() {
            return Err(Error::BadDenominator(den.to_string()));
        }
        let mut f = RationalSuperFunction { num, den };
        f.reduce();
        Ok(f)
    }

    pub fn from_poly(p: SuperPolynomial) -> RationalSuperFunction {
        let den = SuperPolynomial::one(p.table());
        RationalSuperFunction { num: p, den }
    }

    pub fn zero(table: &Arc<VarTable>) -> RationalSuperFunction {
        RationalSuperFunction::from_poly(SuperPolynomial::zero(table))
    }

    pub fn one(table: &Arc<VarTable>) -> RationalSuperFunction {
        RationalSuperFunction::from_poly(SuperPolynomial::one(table))
    }

    pub fn constant(table: &Arc<VarTable>, c: BigRational) -> RationalSuperFunction {
        RationalSuperFunction::from_poly(SuperPolynomial::constant(table, c))
    }

    pub fn var(table: &Arc<VarTable>, v: VarId) -> RationalSuperFunction {
        RationalSuperFunction::from_poly(SuperPolynomial::var(table, v))
    }

    pub fn num(&self) -> &SuperPolynomial {
        &self.num
    }

    pub fn den(&self) -> &SuperPolynomial {
        &self.den
    }

    pub fn table(&self) -> &Arc<VarTable> {
        self.num.table()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_homogeneous(&self, p: Parity) -> bool {
        self.num.is_homogeneous(p)
    }

    pub fn parity(&self) -> Option<Parity> {
        self.num.parity()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = SuperPolynomial::one(self.num.table());
            return;
        }
        if self.den.is_one() {
            return;
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            self.num = q;
            self.den = SuperPolynomial::one(self.num.table());
            return;
        }
        // cancel the common even monomial factor
        let mn = self.num.common_even_monomial().expect("nonzero num");
        let md = self.den.common_even_monomial().expect("nonzero den");
        let shared: Vec<u32> = mn.iter().zip(&md).map(|(a, b)| *a.min(b)).collect();
        if shared.iter().any(|&s| s > 0) {
            self.num = self.num.shift_down(&shared);
            self.den = self.den.shift_down(&shared);
        }
        // canonical denominator: coprime integer coefficients, positive lead
        let mut scale = self.den.rational_content();
        let lead_positive = self
            .den
            .terms
            .iter()
            .next_back()
            .map_or(true, |(_, c)| c.is_positive());
        if !lead_positive {
            scale = -scale;
        }
        if !scale.is_one() {
            let inv = scale.recip();
            self.num = self.num.scaled(&inv);
            self.den = self.den.scaled(&inv);
        }
    }

    pub fn add(&self, other: &RationalSuperFunction) -> RationalSuperFunction {
        assert!(same_table(self.table(), other.table()), "table mismatch in +");
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // lcm of denominators by mutual divisibility, with product fallback
        let (den, la, lb) = if let Some(q) = other.den.div_exact(&self.den) {
            (other.den.clone(), q, SuperPolynomial::one(self.table()))
        } else if let Some(q) = self.den.div_exact(&other.den) {
            (self.den.clone(), SuperPolynomial::one(self.table()), q)
        } else {
            (&self.den * &other.den, other.den.clone(), self.den.clone())
        };
        let num = &(&self.num * &la) + &(&other.num * &lb);
        RationalSuperFunction::new(num, den).expect("denominator stays admissible")
    }

    pub fn sub(&self, other: &RationalSuperFunction) -> RationalSuperFunction {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalSuperFunction {
        RationalSuperFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, other: &RationalSuperFunction) -> RationalSuperFunction {
        assert!(same_table(self.table(), other.table()), "table mismatch in *");
        RationalSuperFunction::new(&self.num * &other.num, &self.den * &other.den)
            .expect("denominator stays admissible")
    }

    pub fn scaled(&self, c: &BigRational) -> RationalSuperFunction {
        RationalSuperFunction { num: self.num.scaled(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> RationalSuperFunction {
        let mut out = RationalSuperFunction::one(self.table());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Inverse: the numerator must be even with nonzero body, so the result
    /// keeps an odd-free denominator (den · invert(num)).
    pub fn invert(&self) -> Result<RationalSuperFunction> {
        let ninv = self.num.invert()?;
        Ok(RationalSuperFunction::new(&self.den * &ninv.num, ninv.den)?)
    }

    /// Partial derivative (quotient rule; odd derivatives skip it since the
    /// denominator is odd-free).
    pub fn partial(&self, v: VarId) -> Result<RationalSuperFunction> {
        match v.parity {
            Parity::Odd => {
                Ok(RationalSuperFunction::new(self.num.partial(v)?, self.den.clone())?)
            }
            Parity::Even => {
                let dn = self.num.partial(v)?;
                let dd = self.den.partial(v)?;
                if dd.is_zero() {
                    return Ok(RationalSuperFunction::new(dn, self.den.clone())?);
                }
                let num = &(&dn * &self.den) - &(&self.num * &dd);
                let den = &self.den * &self.den;
                Ok(RationalSuperFunction::new(num, den)?)
            }
        }
    }

    pub fn substitute(&self, images: &Substitution) -> Result<RationalSuperFunction> {
        let num = self.num.substitute(images)?;
        if self.den.is_one() {
            return Ok(num);
        }
        let den = self.den.substitute(images)?;
        Ok(num.mul(&den.invert()?))
    }

    /// Holomorphy test: `Some(quotient)` when the denominator divides the
    /// numerator exactly, i.e. the function extends to a polynomial.
    pub fn is_regular(&self) -> Option<SuperPolynomial> {
        if self.den.is_one() {
            return Some(self.num.clone());
        }
        self.num.div_exact(&self.den)
    }

    /// Bring `self` and `other` over a common denominator; returns the two
    /// numerators and the shared denominator.
    pub fn over_common_den(
        &self,
        other: &RationalSuperFunction,
    ) -> (SuperPolynomial, SuperPolynomial, SuperPolynomial) {
        if self.den == other.den {
            return (self.num.clone(), other.num.clone(), self.den.clone());
        }
        if let Some(q) = other.den.div_exact(&self.den) {
            return (&self.num * &q, other.num.clone(), other.den.clone());
        }
        if let Some(q) = self.den.div_exact(&other.den) {
            return (self.num.clone(), &other.num * &q, self.den.clone());
        }
        (&self.num * &other.den, &other.num * &self.den, &self.den * &other.den)
    }
}

impl PartialEq for RationalSuperFunction {
    fn eq(&self, other: &Self) -> bool {
        if !same_table(self.table(), other.table()) {
            return false;
        }
        // cross multiplication avoids relying on canonical form
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalSuperFunction {}

impl fmt::Display for RationalSuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, int};

    fn table_xy() -> Arc<VarTable> {
        VarTable::new(vec!["x", "y"], vec!["ξ", "η"])
    }

    fn x(t: &Arc<VarTable>) -> SuperPolynomial {
        SuperPolynomial::var_named(t, "x").unwrap()
    }
    fn y(t: &Arc<VarTable>) -> SuperPolynomial {
        SuperPolynomial::var_named(t, "y").unwrap()
    }
    fn xi(t: &Arc<VarTable>) -> SuperPolynomial {
        SuperPolynomial::var_named(t, "ξ").unwrap()
    }
    fn eta(t: &Arc<VarTable>) -> SuperPolynomial {
        SuperPolynomial::var_named(t, "η").unwrap()
    }

    #[test]
    fn additive_inverse_cancels() {
        let t = table_xy();
        let p = &x(&t) + &-&x(&t);
        assert!(p.is_zero());
    }

    #[test]
    fn anticommutation_normalizes() {
        let t = table_xy();
        let a = &xi(&t) * &eta(&t);
        let b = &eta(&t) * &xi(&t);
        assert!((&a + &b).is_zero());
        assert_eq!(b, -&a);
    }

    #[test]
    fn disjoint_supports_add() {
        let t = table_xy();
        let s = &(&x(&t) + &xi(&t)) + &(&y(&t) + &eta(&t));
        assert_eq!(s.term_count(), 4);
    }

    #[test]
    fn odd_square_vanishes() {
        let t = table_xy();
        let p = &(&xi(&t) * &eta(&t)) * &eta(&t);
        assert!(p.is_zero());
    }

    #[test]
    fn soul_squares_away() {
        // (x + ξη)(x − ξη) = x²
        let t = table_xy();
        let xieta = &xi(&t) * &eta(&t);
        let p = &(&x(&t) + &xieta) * &(&x(&t) - &xieta);
        assert_eq!(p, x(&t).pow(2));
    }

    #[test]
    fn left_odd_derivative() {
        let t = table_xy();
        let m = &xi(&t) * &eta(&t); // ξη, indices 0 < 1
        let v_xi = t.lookup("ξ").unwrap();
        let v_eta = t.lookup("η").unwrap();
        assert_eq!(m.partial(v_xi).unwrap(), eta(&t));
        assert_eq!(m.partial(v_eta).unwrap(), -&xi(&t));
    }

    #[test]
    fn even_derivative() {
        let t = table_xy();
        let p = &x(&t).pow(2) * &eta(&t);
        let d = p.partial(t.lookup("x").unwrap()).unwrap();
        assert_eq!(d, (&x(&t) * &eta(&t)).scaled(&int(2)));
    }

    #[test]
    fn mixed_odd_partials_anticommute() {
        let t = table_xy();
        let v_xi = t.lookup("ξ").unwrap();
        let v_eta = t.lookup("η").unwrap();
        let p = &(&(&x(&t) + &xi(&t)) * &eta(&t)) + &(&y(&t) * &xi(&t));
        let ab = p.partial(v_xi).unwrap().partial(v_eta).unwrap();
        let ba = p.partial(v_eta).unwrap().partial(v_xi).unwrap();
        assert!((&ab + &ba).is_zero());
        assert!(p.partial(v_xi).unwrap().partial(v_xi).unwrap().is_zero());
    }

    #[test]
    fn invert_examples() {
        let t = table_xy();
        // 1/x
        let ix = x(&t).invert().unwrap();
        assert_eq!(ix.num(), &SuperPolynomial::one(&t));
        assert_eq!(ix.den(), &x(&t));
        // 1/(1 + ξη) = 1 − ξη
        let xieta = &xi(&t) * &eta(&t);
        let a = &SuperPolynomial::one(&t) + &xieta;
        let ia = a.invert().unwrap();
        assert_eq!(ia, RationalSuperFunction::from_poly(&SuperPolynomial::one(&t) - &xieta));
        // 1/(x + ξη) = 1/x − ξη/x², checked by multiplying back
        let b = &x(&t) + &xieta;
        let ib = b.invert().unwrap();
        assert_eq!(ib.mul(&RationalSuperFunction::from_poly(b.clone())), RationalSuperFunction::one(&t));
        let expected = RationalSuperFunction::new(&x(&t) - &xieta, x(&t).pow(2)).unwrap();
        assert_eq!(ib, expected);
    }

    #[test]
    fn invert_rejects_zero_body_and_odd() {
        let t = table_xy();
        let xieta = &xi(&t) * &eta(&t);
        assert!(matches!(xieta.invert(), Err(Error::ZeroBody)));
        assert!(matches!(xi(&t).invert(), Err(Error::ParityViolation(_))));
    }

    #[test]
    fn inverse_round_trip_for_random_even_elements() {
        // a · (1/a) = 1 for a with nonzero body
        let t = table_xy();
        let xieta = &xi(&t) * &eta(&t);
        let candidates = vec![
            x(&t),
            &x(&t) + &SuperPolynomial::one(&t),
            &(&x(&t) * &y(&t)) + &xieta,
            &x(&t).pow(2) + &xieta.scaled(&frac(3, 2)),
            &SuperPolynomial::constant(&t, frac(-7, 3)) + &xieta,
        ];
        for a in candidates {
            let inv = a.invert().unwrap();
            assert_eq!(inv.mul(&RationalSuperFunction::from_poly(a.clone())), RationalSuperFunction::one(&t));
        }
    }

    #[test]
    fn substitute_examples() {
        let src = table_xy();
        let dst = VarTable::new(vec!["x'"], vec!["ξ'", "η'"]);
        let xp = RationalSuperFunction::var(&dst, dst.lookup("x'").unwrap());
        let xip = RationalSuperFunction::var(&dst, dst.lookup("ξ'").unwrap());
        let etap = RationalSuperFunction::var(&dst, dst.lookup("η'").unwrap());

        // x ↦ 1/x' in x² gives 1/x'²
        let mut s = Substitution::new(&dst);
        s.insert(src.lookup("x").unwrap(), xp.invert().unwrap()).unwrap();
        let img = x(&src).pow(2).substitute(&s).unwrap();
        let expected = RationalSuperFunction::new(
            SuperPolynomial::one(&dst),
            SuperPolynomial::var_named(&dst, "x'").unwrap().pow(2),
        )
        .unwrap();
        assert_eq!(img, expected);

        // ξ ↦ −ξ'/x', η ↦ η'/x' in ξη gives −ξ'η'/x'²
        let mut s2 = Substitution::new(&dst);
        s2.insert(src.lookup("ξ").unwrap(), xip.neg().mul(&xp.invert().unwrap())).unwrap();
        s2.insert(src.lookup("η").unwrap(), etap.mul(&xp.invert().unwrap())).unwrap();
        let img2 = (&xi(&src) * &eta(&src)).substitute(&s2).unwrap();
        let expect_num = -&(&SuperPolynomial::var_named(&dst, "ξ'").unwrap()
            * &SuperPolynomial::var_named(&dst, "η'").unwrap());
        let expected2 = RationalSuperFunction::new(
            expect_num,
            SuperPolynomial::var_named(&dst, "x'").unwrap().pow(2),
        )
        .unwrap();
        assert_eq!(img2, expected2);

        // identity substitution fixes everything
        let ids = Substitution::identity(&src);
        let p = &(&x(&src) * &eta(&src)) + &xi(&src).scaled(&frac(5, 2));
        assert_eq!(p.substitute(&ids).unwrap(), RationalSuperFunction::from_poly(p.clone()));
    }

    #[test]
    fn substitute_rejects_parity_violation() {
        let t = table_xy();
        let mut s = Substitution::new(&t);
        let err = s.insert(t.lookup("x").unwrap(), RationalSuperFunction::var(&t, t.lookup("ξ").unwrap()));
        assert!(matches!(err, Err(Error::ParityViolation(_))));
    }

    #[test]
    fn regularity_examples() {
        let t = table_xy();
        // (x²ξ)/x regular with quotient xξ
        let f = RationalSuperFunction::new(&x(&t).pow(2) * &xi(&t), x(&t)).unwrap();
        assert_eq!(f.is_regular().unwrap(), &x(&t) * &xi(&t));
        // ξ/x not regular
        let g = RationalSuperFunction::new(xi(&t), x(&t)).unwrap();
        assert!(g.is_regular().is_none());
        // (xy − xy + x)/x = 1 after cancellation
        let num = &(&(&x(&t) * &y(&t)) - &(&x(&t) * &y(&t))) + &x(&t);
        let h = RationalSuperFunction::new(num, x(&t)).unwrap();
        assert_eq!(h.is_regular().unwrap(), SuperPolynomial::one(&t));
    }

    #[test]
    fn nilpotent_parameter_squares_to_zero() {
        let t = table_xy();
        let (ext, tid) = t.with_parameter("t", Parity::Even);
        let tp = SuperPolynomial::var(&ext, tid);
        assert!((&tp * &tp).is_zero());
        // body strips the parameter
        let a = &SuperPolynomial::one(&ext) + &tp;
        assert_eq!(a.body(), SuperPolynomial::one(&ext));
        let inv = a.invert().unwrap();
        assert_eq!(inv, RationalSuperFunction::from_poly(&SuperPolynomial::one(&ext) - &tp));
    }

    #[test]
    fn divrem_is_exact_division_detector() {
        let t = table_xy();
        let d = &x(&t) + &y(&t);
        let p = &(&x(&t).pow(2) - &y(&t).pow(2)) * &xi(&t);
        let q = p.div_exact(&d).unwrap();
        assert_eq!(&q * &d, p);
        let (_, r) = (&p + &eta(&t)).divrem(&d).unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn remap_tracks_odd_permutation_sign() {
        let a = VarTable::new(vec!["x"], vec!["ξ", "η"]);
        let b = VarTable::new(vec!["x"], vec!["η", "ξ"]);
        let p = &SuperPolynomial::var_named(&a, "ξ").unwrap()
            * &SuperPolynomial::var_named(&a, "η").unwrap();
        // index swap: ξ lands at slot 1, η at slot 0 — one transposition
        let q = p
            .remap(&b, |v| match v.parity {
                Parity::Even => Some(v),
                Parity::Odd => Some(VarId::odd(1 - v.index)),
            })
            .unwrap();
        let canonical = &SuperPolynomial::var_named(&b, "η").unwrap()
            * &SuperPolynomial::var_named(&b, "ξ").unwrap();
        assert_eq!(q, -&canonical);
    }
}
