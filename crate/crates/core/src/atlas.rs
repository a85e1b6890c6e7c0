//! Flag types, chart enumeration, coordinate matrices and exact transition
//! maps between charts.
//!
//! A flag type F(m|n; k₁..k_r | l₁..l_r) determines a supermanifold glued
//! from charts indexed by subsets I_s ⊆ {1..k_{s−1}} × {1..l_{s−1}}. Each
//! chart carries coordinate matrices Z_s of shape
//! (k_{s−1}+l_{s−1}) × (k_s+l_s) with the identity planted in the I_s rows
//! and free entries elsewhere; transitions between charts are computed by
//! exact supermatrix inversion and cached per (from, to) pair.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::supermatrix::SuperMatrix;
use crate::superpoly::{Parity, RationalSuperFunction, Substitution, VarId, VarTable};
#[cfg(test)]
use crate::superpoly::SuperPolynomial;
use crate::{Error, Result};

/// Flag type: dimensions (m|n) and the two non-increasing size vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlagType {
    m: usize,
    n: usize,
    k: Vec<usize>,
    l: Vec<usize>,
}

impl FlagType {
    pub fn new(m: usize, n: usize, k: Vec<usize>, l: Vec<usize>) -> Result<FlagType> {
        let fail = |msg: String| Err(Error::InvalidFlagType(msg));
        if k.len() != l.len() || k.is_empty() {
            return fail(format!("k and l must have equal positive length, got {k:?} | {l:?}"));
        }
        if k[0] > m || l[0] > n {
            return fail(format!("k1 ≤ m and l1 ≤ n required, got {k:?} ≤ {m}, {l:?} ≤ {n}"));
        }
        for i in 1..k.len() {
            if k[i] > k[i - 1] || l[i] > l[i - 1] {
                return fail(format!("k and l must be non-increasing, got {k:?} | {l:?}"));
            }
        }
        let r = k.len();
        if k[r - 1] + l[r - 1] == 0 {
            return fail("k_r + l_r must be positive".into());
        }
        if k[0] + l[0] >= m + n {
            return fail(format!("k1 + l1 < m + n required, got {} ≥ {}", k[0] + l[0], m + n));
        }
        for i in 1..r {
            if k[i] + l[i] >= k[i - 1] + l[i - 1] {
                return fail(format!("k_s + l_s must strictly decrease, got {k:?} | {l:?}"));
            }
        }
        Ok(FlagType { m, n, k, l })
    }

    pub fn grassmannian(m: usize, n: usize, k: usize, l: usize) -> Result<FlagType> {
        FlagType::new(m, n, vec![k], vec![l])
    }

    /// Parse `F(m|n; k1,..,kr | l1,..,lr)` or `Gr(m|n; k|l)`.
    pub fn parse(text: &str) -> Result<FlagType> {
        let fail = || Error::InvalidFlagType(format!("cannot parse `{text}`"));
        let s = text.trim();
        let inner = s
            .strip_prefix("F")
            .or_else(|| s.strip_prefix("Gr"))
            .ok_or_else(fail)?
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(fail)?;
        let (dims, rest) = inner.split_once(';').ok_or_else(fail)?;
        let (ms, ns) = dims.split_once('|').ok_or_else(fail)?;
        let m: usize = ms.trim().parse().map_err(|_| fail())?;
        let n: usize = ns.trim().parse().map_err(|_| fail())?;
        let (ks, ls) = rest.split_once('|').ok_or_else(fail)?;
        let parse_list = |t: &str| -> Result<Vec<usize>> {
            t.split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|_| fail()))
                .collect()
        };
        FlagType::new(m, n, parse_list(ks)?, parse_list(ls)?)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length r of the flag.
    pub fn length(&self) -> usize {
        self.k.len()
    }

    /// k_s with the convention k_0 = m; valid for 0 ≤ s ≤ r.
    pub fn k(&self, s: usize) -> usize {
        if s == 0 {
            self.m
        } else {
            self.k[s - 1]
        }
    }

    /// l_s with the convention l_0 = n.
    pub fn l(&self, s: usize) -> usize {
        if s == 0 {
            self.n
        } else {
            self.l[s - 1]
        }
    }

    /// The base super-Grassmannian Gr(m|n; k1|l1) of the bundle picture.
    pub fn base(&self) -> FlagType {
        FlagType::grassmannian(self.m, self.n, self.k[0], self.l[0])
            .expect("base of a valid flag is valid")
    }

    /// Fiber flag type F(k1|l1; k2..kr | l2..lr); `None` when r = 1.
    pub fn fiber(&self) -> Option<FlagType> {
        if self.length() < 2 {
            return None;
        }
        Some(
            FlagType::new(self.k[0], self.l[0], self.k[1..].to_vec(), self.l[1..].to_vec())
                .expect("fiber of a valid flag is valid"),
        )
    }

    pub fn even_dimension(&self) -> usize {
        (1..=self.length())
            .map(|s| (self.k(s - 1) - self.k(s)) * self.k(s) + (self.l(s - 1) - self.l(s)) * self.l(s))
            .sum()
    }

    pub fn odd_dimension(&self) -> usize {
        (1..=self.length())
            .map(|s| (self.k(s - 1) - self.k(s)) * self.l(s) + (self.l(s - 1) - self.l(s)) * self.k(s))
            .sum()
    }

    pub fn chart_count(&self) -> usize {
        (1..=self.length())
            .map(|s| binomial(self.k(s - 1), self.k(s)) * binomial(self.l(s - 1), self.l(s)))
            .product()
    }
}

impl fmt::Display for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.k.iter().map(|v| v.to_string()).collect();
        let ls: Vec<String> = self.l.iter().map(|v| v.to_string()).collect();
        if self.length() == 1 {
            write!(f, "Gr({}|{}; {}|{})", self.m, self.n, ks[0], ls[0])
        } else {
            write!(f, "F({}|{}; {} | {})", self.m, self.n, ks.join(","), ls.join(","))
        }
    }
}

impl serde::Serialize for FlagType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for FlagType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        FlagType::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All k-subsets of {0..n-1} in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Chart index: per level the 0-based row subsets carrying the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartIndex {
    /// I_{s0̄} ⊆ {0..k_{s−1}−1}, |I_{s0̄}| = k_s, strictly increasing.
    pub even: Vec<Vec<usize>>,
    /// I_{s1̄} ⊆ {0..l_{s−1}−1}, |I_{s1̄}| = l_s, strictly increasing.
    pub odd: Vec<Vec<usize>>,
}

impl fmt::Display for ChartIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_set = |s: &[usize]| {
            let xs: Vec<String> = s.iter().map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", xs.join(","))
        };
        let levels: Vec<String> = self
            .even
            .iter()
            .zip(&self.odd)
            .map(|(e, o)| format!("({}, {})", fmt_set(e), fmt_set(o)))
            .collect();
        write!(f, "[{}]", levels.join(", "))
    }
}

/// Where a coordinate lives: level s (1-based) and its matrix cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub level: usize,
    pub row: usize,
    pub col: usize,
}

/// One chart: variable table plus the coordinate matrices with identities
/// planted in the index rows.
#[derive(Debug, Clone)]
pub struct Chart {
    flag: FlagType,
    index: ChartIndex,
    table: Arc<VarTable>,
    matrices: Vec<SuperMatrix>,
    even_cells: Vec<Cell>,
    odd_cells: Vec<Cell>,
    cell_to_var: HashMap<(usize, usize, usize), VarId>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.flag == other.flag && self.index == other.index
    }
}

impl Chart {
    pub fn new(flag: FlagType, index: ChartIndex) -> Chart {
        let r = flag.length();
        assert_eq!(index.even.len(), r);
        assert_eq!(index.odd.len(), r);
        for s in 1..=r {
            assert_eq!(index.even[s - 1].len(), flag.k(s));
            assert_eq!(index.odd[s - 1].len(), flag.l(s));
            assert!(index.even[s - 1].iter().all(|&i| i < flag.k(s - 1)));
            assert!(index.odd[s - 1].iter().all(|&i| i < flag.l(s - 1)));
        }

        // First pass: collect variable names and cells. Within each level the
        // even variables come as X then Y row-major, the odd ones as Ξ then Η.
        let mut even_names: Vec<String> = Vec::new();
        let mut odd_names: Vec<String> = Vec::new();
        let mut even_cells: Vec<Cell> = Vec::new();
        let mut odd_cells: Vec<Cell> = Vec::new();
        for s in 1..=r {
            let (re, ro) = (flag.k(s - 1), flag.l(s - 1));
            let (ce, co) = (flag.k(s), flag.l(s));
            let id_even = &index.even[s - 1];
            let id_odd = &index.odd[s - 1];
            let free_even_rows: Vec<usize> = (0..re).filter(|i| !id_even.contains(i)).collect();
            let free_odd_rows: Vec<usize> = (0..ro).filter(|i| !id_odd.contains(i)).collect();
            // X block
            for &i in &free_even_rows {
                for j in 0..ce {
                    even_names.push(var_name("x", s, i, j));
                    even_cells.push(Cell { level: s, row: i, col: j });
                }
            }
            // Y block
            for &i in &free_odd_rows {
                for j in 0..co {
                    even_names.push(var_name("y", s, i, j));
                    even_cells.push(Cell { level: s, row: re + i, col: ce + j });
                }
            }
            // Ξ block
            for &i in &free_even_rows {
                for j in 0..co {
                    odd_names.push(var_name("ξ", s, i, j));
                    odd_cells.push(Cell { level: s, row: i, col: ce + j });
                }
            }
            // Η block
            for &i in &free_odd_rows {
                for j in 0..ce {
                    odd_names.push(var_name("η", s, i, j));
                    odd_cells.push(Cell { level: s, row: re + i, col: j });
                }
            }
        }
        let table = VarTable::new(even_names, odd_names);
        let mut cell_to_var = HashMap::new();
        for (idx, c) in even_cells.iter().enumerate() {
            cell_to_var.insert((c.level, c.row, c.col), VarId::even(idx));
        }
        for (idx, c) in odd_cells.iter().enumerate() {
            cell_to_var.insert((c.level, c.row, c.col), VarId::odd(idx));
        }

        // Second pass: plant identities and variables into the matrices.
        let mut matrices = Vec::with_capacity(r);
        for s in 1..=r {
            let (re, ro) = (flag.k(s - 1), flag.l(s - 1));
            let (ce, co) = (flag.k(s), flag.l(s));
            let mut z = SuperMatrix::zero(&table, (re, ro), (ce, co));
            for (pos, &i) in index.even[s - 1].iter().enumerate() {
                z.set(i, pos, RationalSuperFunction::one(&table));
            }
            for (pos, &i) in index.odd[s - 1].iter().enumerate() {
                z.set(re + i, ce + pos, RationalSuperFunction::one(&table));
            }
            for row in 0..re + ro {
                for col in 0..ce + co {
                    if let Some(&v) = cell_to_var.get(&(s, row, col)) {
                        z.set(row, col, RationalSuperFunction::var(&table, v));
                    }
                }
            }
            debug_assert!(z.is_even());
            matrices.push(z);
        }

        Chart { flag, index, table, matrices, even_cells, odd_cells, cell_to_var }
    }

    pub fn flag(&self) -> &FlagType {
        &self.flag
    }

    pub fn index(&self) -> &ChartIndex {
        &self.index
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn matrices(&self) -> &[SuperMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, s: usize) -> &SuperMatrix {
        &self.matrices[s - 1]
    }

    /// Variable planted at a free cell, if any.
    pub fn var_at(&self, level: usize, row: usize, col: usize) -> Option<VarId> {
        self.cell_to_var.get(&(level, row, col)).copied()
    }

    pub fn cell_of(&self, v: VarId) -> Cell {
        match v.parity {
            Parity::Even => self.even_cells[v.index],
            Parity::Odd => self.odd_cells[v.index],
        }
    }

    /// Level (1-based) a coordinate belongs to.
    pub fn level_of(&self, v: VarId) -> usize {
        self.cell_of(v).level
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.table.vars()
    }

    pub fn dimension(&self) -> (usize, usize) {
        (self.table.even_count(), self.table.odd_count())
    }
}

fn var_name(block: &str, s: usize, i: usize, j: usize) -> String {
    // classical superscript/subscript notation, 1-based inside the block
    if i + 1 < 10 && j + 1 < 10 {
        format!("{block}^{s}_{{{}{}}}", i + 1, j + 1)
    } else {
        format!("{block}^{s}_{{{},{}}}", i + 1, j + 1)
    }
}

/// Transition map between two charts of the same atlas: the image of every
/// target coordinate as a rational superfunction of the source coordinates.
#[derive(Debug, Clone)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    exprs_even: Vec<RationalSuperFunction>,
    exprs_odd: Vec<RationalSuperFunction>,
}

impl Transition {
    /// Expression of a target-chart coordinate in source coordinates.
    pub fn expr(&self, target_var: VarId) -> &RationalSuperFunction {
        match target_var.parity {
            Parity::Even => &self.exprs_even[target_var.index],
            Parity::Odd => &self.exprs_odd[target_var.index],
        }
    }

    /// The substitution sending target-chart variables to their source-chart
    /// expressions: applying it to a polynomial in target coordinates yields
    /// the same function written in source coordinates.
    pub fn as_substitution(&self, source_table: &Arc<VarTable>) -> Substitution {
        let mut s = Substitution::new(source_table);
        for (i, e) in self.exprs_even.iter().enumerate() {
            s.insert(VarId::even(i), e.clone()).expect("transition images are parity-clean");
        }
        for (i, e) in self.exprs_odd.iter().enumerate() {
            s.insert(VarId::odd(i), e.clone()).expect("transition images are parity-clean");
        }
        s
    }
}

/// The full chart cover of a flag supermanifold with a transition cache.
#[derive(Debug)]
pub struct Atlas {
    flag: FlagType,
    charts: Vec<Arc<Chart>>,
    standard: usize,
    cache: Mutex<HashMap<(usize, usize), Arc<Transition>>>,
}

impl Atlas {
    pub fn new(flag: FlagType) -> Atlas {
        let indices = enumerate_charts(&flag);
        let charts: Vec<Arc<Chart>> =
            indices.into_iter().map(|ix| Arc::new(Chart::new(flag.clone(), ix))).collect();
        let std_index = standard_index(&flag);
        let standard = charts
            .iter()
            .position(|c| c.index() == &std_index)
            .expect("standard chart occurs in the enumeration");
        Atlas { flag, charts, standard, cache: Mutex::new(HashMap::new()) }
    }

    pub fn parse(text: &str) -> Result<Atlas> {
        Ok(Atlas::new(FlagType::parse(text)?))
    }

    pub fn flag(&self) -> &FlagType {
        &self.flag
    }

    pub fn charts(&self) -> &[Arc<Chart>] {
        &self.charts
    }

    pub fn chart(&self, id: usize) -> &Arc<Chart> {
        &self.charts[id]
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    pub fn standard_id(&self) -> usize {
        self.standard
    }

    pub fn standard_chart(&self) -> &Arc<Chart> {
        &self.charts[self.standard]
    }

    /// Transition from chart `from` to chart `to`, cached.
    pub fn transition(&self, from: usize, to: usize) -> Result<Arc<Transition>> {
        if let Some(t) = self.cache.lock().unwrap().get(&(from, to)) {
            return Ok(t.clone());
        }
        let t = Arc::new(compute_transition(&self.charts[from], &self.charts[to], from, to)?);
        self.cache.lock().unwrap().insert((from, to), t.clone());
        Ok(t)
    }
}

/// All chart indices of a flag type, deterministic order (level-major
/// cartesian product of lexicographic subsets).
pub fn enumerate_charts(flag: &FlagType) -> Vec<ChartIndex> {
    let r = flag.length();
    let mut level_choices: Vec<Vec<(Vec<usize>, Vec<usize>)>> = Vec::new();
    for s in 1..=r {
        let evens = subsets(flag.k(s - 1), flag.k(s));
        let odds = subsets(flag.l(s - 1), flag.l(s));
        let mut pairs = Vec::new();
        for e in &evens {
            for o in &odds {
                pairs.push((e.clone(), o.clone()));
            }
        }
        level_choices.push(pairs);
    }
    let mut out = vec![ChartIndex { even: Vec::new(), odd: Vec::new() }];
    for level in level_choices {
        let mut next = Vec::with_capacity(out.len() * level.len());
        for base in &out {
            for (e, o) in &level {
                let mut ix = base.clone();
                ix.even.push(e.clone());
                ix.odd.push(o.clone());
                next.push(ix);
            }
        }
        out = next;
    }
    out
}

/// The chart with bottom-aligned identity blocks:
/// I_{s0̄} = {k_{s−1}−k_s+1, …, k_{s−1}}, I_{s1̄} = {l_{s−1}−l_s+1, …, l_{s−1}}.
pub fn standard_index(flag: &FlagType) -> ChartIndex {
    let r = flag.length();
    let even = (1..=r).map(|s| (flag.k(s - 1) - flag.k(s)..flag.k(s - 1)).collect()).collect();
    let odd = (1..=r).map(|s| (flag.l(s - 1) - flag.l(s)..flag.l(s - 1)).collect()).collect();
    ChartIndex { even, odd }
}

pub fn standard_chart(flag: &FlagType) -> Chart {
    Chart::new(flag.clone(), standard_index(flag))
}

/// Z_{J_1} = Z_{I_1}·C_{I_1J_1}⁻¹ and Z_{J_s} = C_{I_{s−1}J_{s−1}}·Z_{I_s}·C_{I_sJ_s}⁻¹:
/// compute the target coordinate expressions and check the planted identity
/// entries come out exactly 0 or 1.
fn compute_transition(from: &Chart, to: &Chart, from_id: usize, to_id: usize) -> Result<Transition> {
    assert_eq!(from.flag(), to.flag(), "transition requires equal flag types");
    let flag = from.flag();
    let r = flag.length();
    let table = from.table();
    let mut exprs_even: Vec<Option<RationalSuperFunction>> =
        vec![None; to.table().even_count()];
    let mut exprs_odd: Vec<Option<RationalSuperFunction>> = vec![None; to.table().odd_count()];
    let mut c_prev: Option<SuperMatrix> = None;
    for s in 1..=r {
        // C_s is cut from C_{s−1}·Z_s (C_0 = E): exactly the choice that
        // plants the identity into the J_s rows of Z_{J_s}.
        let prod = match &c_prev {
            None => from.matrix(s).clone(),
            Some(cp) => cp.mul(from.matrix(s))?,
        };
        let c = prod.select_rows(&to.index().even[s - 1], &to.index().odd[s - 1])?;
        let c_inv = c.inverse().map_err(|e| match e {
            Error::SingularBody => Error::SingularTransition {
                from: from.index().to_string(),
                to: to.index().to_string(),
            },
            other => other,
        })?;
        let z_new = prod.mul(&c_inv)?;
        for row in 0..z_new.rows() {
            for col in 0..z_new.cols() {
                let entry = z_new.get(row, col);
                match to.var_at(s, row, col) {
                    Some(v) => match v.parity {
                        Parity::Even => exprs_even[v.index] = Some(entry.clone()),
                        Parity::Odd => exprs_odd[v.index] = Some(entry.clone()),
                    },
                    None => {
                        // planted identity entry of the target template
                        let expected = to.matrix(s).get(row, col);
                        let want_one = expected.is_regular().map_or(false, |p| p.is_one());
                        if want_one {
                            assert!(
                                entry.is_regular().map_or(false, |p| p.is_one()),
                                "planted identity entry must be exactly 1"
                            );
                        } else {
                            assert!(entry.is_zero(), "planted zero entry must be exactly 0");
                        }
                    }
                }
            }
        }
        c_prev = Some(c);
    }
    let _ = table;
    Ok(Transition {
        from: from_id,
        to: to_id,
        exprs_even: exprs_even.into_iter().map(|e| e.expect("every even var assigned")).collect(),
        exprs_odd: exprs_odd.into_iter().map(|e| e.expect("every odd var assigned")).collect(),
    })
}
