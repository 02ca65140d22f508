//! Point-wise Thom-Boardman symbols of polynomial sections, exhaustive
//! stratum scans over extension fields, and dimension estimation from point
//! counts.
//!
//! The first index i is the corank of the Jacobian at the point; the second
//! index j is the corank of the second intrinsic differential, the map
//! K -> Hom(K, C) induced by the Hessians on the kernel and cokernel of the
//! Jacobian. Both are computed intrinsically (kernel/cokernel linear
//! algebra), never through adapted coordinates.

mod scan;

pub use scan::{max_extension_within, scan_level_sequential};

/// Symbol histogram of one extension level (parallel when the feature is on).
pub fn scan_histogram(
    s: &Section,
    m: u32,
    budget: u64,
) -> Result<std::collections::BTreeMap<(u32, u32), u64>> {
    scan::scan_level(s, m, budget)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::{codim_tb, CodimQuery};
use crate::error::{Error, Result};
use crate::ffield::{Embedding, Field, FqElement};
use crate::linalg::{self, Cokernel};
use crate::poly::{determinant, monomials_up_to, parse_poly, Poly, VarTable};

/// A section of a trivial rank-e bundle over affine n-space: e exact
/// polynomials over F_q.
#[derive(Debug, Clone)]
pub struct Section {
    field: Field,
    n: u32,
    e: u32,
    degree_bound: u32,
    polys: Vec<Poly>,
}

impl Section {
    pub fn new(field: &Field, n: u32, polys: Vec<Poly>, degree_bound: u32) -> Result<Section> {
        let e = polys.len() as u32;
        if e == 0 {
            return Err(Error::BadInput("a section needs at least one component".into()));
        }
        for p in &polys {
            if p.nvars() != n || p.field() != field {
                return Err(Error::ContextMismatch("section component context mismatch".into()));
            }
            if p.total_degree().unwrap_or(0) > degree_bound {
                return Err(Error::BadInput(format!(
                    "component degree exceeds the bound {degree_bound}"
                )));
            }
        }
        Ok(Section { field: field.clone(), n, e, degree_bound, polys })
    }

    /// Seeded random section: coefficients i.i.d. uniform over F_q on all
    /// monomials of degree <= d, components sampled in order.
    pub fn sample(field: &Field, n: u32, e: u32, d: u32, seed: u64, second_order: bool) -> Result<Section> {
        if second_order && d < 2 {
            return Err(Error::BadInput(
                "degree bound must be >= 2 for second-order experiments".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.order();
        let monos = monomials_up_to(n, d);
        let polys = (0..e)
            .map(|_| {
                Poly::from_terms(
                    field,
                    n,
                    monos.iter().map(|m| {
                        let idx = rng.gen_range(0..q);
                        (m.clone(), field.from_index(idx))
                    }),
                )
            })
            .collect();
        Section::new(field, n, polys, d)
    }

    /// Parse one polynomial per line, variables x1..xn.
    pub fn parse(field: &Field, n: u32, text: &str, degree_bound: Option<u32>) -> Result<Section> {
        let vars = VarTable::xs(n);
        let mut polys = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            polys.push(parse_poly(line, &vars, field)?);
        }
        let d = degree_bound
            .unwrap_or_else(|| polys.iter().filter_map(|p| p.total_degree()).max().unwrap_or(0));
        Section::new(field, n, polys, d)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> u32 {
        self.n
    }

    pub fn ncomponents(&self) -> u32 {
        self.e
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn embed(&self, emb: &Embedding) -> Section {
        Section {
            field: emb.target().clone(),
            n: self.n,
            e: self.e,
            degree_bound: self.degree_bound,
            polys: self.polys.iter().map(|p| p.embed(emb)).collect(),
        }
    }

    /// The e x n matrix of first partials.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.polys
            .iter()
            .map(|f| (0..self.n as usize).map(|b| f.partial(b)).collect())
            .collect()
    }

    /// Hessian matrices of the components, each n x n.
    pub fn hessians(&self) -> Vec<Vec<Vec<Poly>>> {
        self.polys
            .iter()
            .map(|f| {
                let firsts: Vec<Poly> = (0..self.n as usize).map(|a| f.partial(a)).collect();
                firsts
                    .iter()
                    .map(|fa| (0..self.n as usize).map(|b| fa.partial(b)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn render(&self) -> Vec<String> {
        let vars = VarTable::xs(self.n);
        self.polys.iter().map(|p| p.render(&vars)).collect()
    }
}

/// Full symbol data at a point: the symbol (i, j) together with the two
/// underlying ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymbolData {
    pub i: u32,
    pub j: u32,
    pub jac_rank: u32,
    pub second_rank: u32,
}

/// Thom-Boardman symbol of the section at a rational point of its field.
pub fn tb_symbol_at(s: &Section, point: &[FqElement]) -> SymbolData {
    assert_eq!(point.len(), s.n as usize, "point dimension mismatch");
    let field = &s.field;
    let (n, e) = (s.n as usize, s.e as usize);
    let m = s.n.min(s.e);

    let jac: linalg::Matrix =
        s.polys.iter().map(|f| (0..n).map(|b| f.partial(b).eval(point)).collect()).collect();
    let jac_rank = linalg::rank(&jac) as u32;
    let i = m - jac_rank;

    let kernel = linalg::kernel_basis(&jac, field, n);
    let coker = Cokernel::of_column_space(&jac, field, e);
    let kdim = kernel.len();
    let cdim = coker.dim();
    debug_assert_eq!(kdim as u32, s.n - m + i);
    debug_assert_eq!(cdim as u32, s.e - m + i);

    if kdim == 0 || cdim == 0 {
        // the second differential lives in Hom(K, C) = 0
        return SymbolData { i, j: 0, jac_rank, second_rank: 0 };
    }

    // Hessian values H_l(P)
    let hessians: Vec<linalg::Matrix> = s
        .polys
        .iter()
        .map(|f| {
            (0..n)
                .map(|a| {
                    let fa = f.partial(a);
                    (0..n).map(|b| fa.partial(b).eval(point)).collect()
                })
                .collect()
        })
        .collect();

    // matrix of K -> Hom(K, C): row per kernel basis vector u, columns
    // indexed by (kernel vector v, cokernel coordinate)
    let mut rows = Vec::with_capacity(kdim);
    for u in &kernel {
        let mut row = Vec::with_capacity(kdim * cdim);
        for v in &kernel {
            let mut w = Vec::with_capacity(e);
            for h in &hessians {
                let mut acc = field.zero();
                for a in 0..n {
                    if u[a].is_zero() {
                        continue;
                    }
                    for b in 0..n {
                        if h[a][b].is_zero() || v[b].is_zero() {
                            continue;
                        }
                        acc = acc.add(&u[a].mul(&h[a][b]).mul(&v[b]));
                    }
                }
                w.push(acc);
            }
            row.extend(coker.project(&w));
        }
        rows.push(row);
    }
    let second_rank = linalg::rank(&rows) as u32;
    let j = kdim as u32 - second_rank;
    SymbolData { i, j, jac_rank, second_rank }
}

/// All (m-i+1)-minors of the symbolic Jacobian; they cut out the locus of
/// first index >= i. For i = 0 the minor size exceeds both dimensions and
/// the list is empty (the whole space).
pub fn degeneracy_minors(s: &Section, i: u32) -> Result<Vec<Poly>> {
    let m = s.n.min(s.e);
    if i > m {
        return Err(Error::BadInput(format!("i = {i} exceeds min(n, e) = {m}")));
    }
    let size = (m - i + 1) as usize;
    let jac = s.jacobian();
    let (rows, cols) = (s.e as usize, s.n as usize);
    if size > rows || size > cols {
        return Ok(Vec::new());
    }
    let mut minors = Vec::new();
    for rsel in combinations(rows, size) {
        for csel in combinations(cols, size) {
            let sub: Vec<Vec<Poly>> = rsel
                .iter()
                .map(|&r| csel.iter().map(|&c| jac[r][c].clone()).collect())
                .collect();
            minors.push(determinant(&sub, &s.field, s.n));
        }
    }
    Ok(minors)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(out, cur, i + 1, n, k);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, k);
    out
}

// ---------------------------------------------------------------------------
// Scan reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SymbolCount {
    pub i: u32,
    pub j: u32,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanLevel {
    pub m: u32,
    pub field_order: u64,
    pub points: u64,
    pub counts: Vec<SymbolCount>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolEstimate {
    pub i: u32,
    pub j: u32,
    /// codimension predicted by the closed-form oracle
    pub codim_formula: i64,
    pub expected_dim: i64,
    /// per-extension point counts, m = 1..=ext_max
    pub counts: Vec<u64>,
    /// round(log_q count(M) / M) over the largest extension, when it has points
    pub estimate: Option<i64>,
    /// set when the stratum was empty at every scanned extension
    pub empty_up_to: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrataReport {
    pub field: String,
    pub n: u32,
    pub e: u32,
    pub degree: u32,
    pub seed: Option<u64>,
    pub ext_max: u32,
    pub budget: u64,
    pub section: Vec<String>,
    pub levels: Vec<ScanLevel>,
    pub estimates: Vec<SymbolEstimate>,
}

impl StrataReport {
    pub fn counts_for(&self, i: u32, j: u32) -> Vec<u64> {
        self.levels
            .iter()
            .map(|lvl| {
                lvl.counts
                    .iter()
                    .find(|c| c.i == i && c.j == j)
                    .map(|c| c.count)
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Total points with first index >= 1, per extension.
    pub fn sigma1_counts(&self) -> Vec<u64> {
        self.levels
            .iter()
            .map(|lvl| lvl.counts.iter().filter(|c| c.i >= 1).map(|c| c.count).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DimEstimate {
    /// no points at any scanned extension
    EmptyUpTo(u32),
    /// points appeared at some level but not the top one, so the log
    /// estimator has nothing to work with
    NoTopPoints,
    Dim(i64),
}

/// round(log_q count(M) / M) on the largest scanned extension.
pub fn estimate_dim(counts: &[u64], q: u64) -> DimEstimate {
    let m_max = counts.len() as u32;
    if counts.iter().all(|&c| c == 0) {
        return DimEstimate::EmptyUpTo(m_max);
    }
    let top = *counts.last().unwrap();
    if top == 0 {
        return DimEstimate::NoTopPoints;
    }
    let est = (top as f64).ln() / (m_max as f64 * (q as f64).ln());
    DimEstimate::Dim(est.round() as i64)
}

/// Exhaustive stratum scan over F_{q^m} for m = 1..=ext_max.
pub fn strata_scan(s: &Section, ext_max: u32, budget: u64) -> Result<StrataReport> {
    strata_scan_seeded(s, ext_max, budget, None)
}

pub fn strata_scan_seeded(
    s: &Section,
    ext_max: u32,
    budget: u64,
    seed: Option<u64>,
) -> Result<StrataReport> {
    if s.e > s.n {
        return Err(Error::TooManyComponents { e: s.e, n: s.n });
    }
    if ext_max == 0 {
        return Err(Error::BadInput("ext-max must be >= 1".into()));
    }
    let q = s.field.order();
    let mut levels = Vec::new();
    for m in 1..=ext_max {
        let tally = scan::scan_level(s, m, budget)?;
        let field_order = q.pow(m);
        let points = (field_order as u128).pow(s.n) as u64;
        let counts: Vec<SymbolCount> =
            tally.into_iter().map(|((i, j), count)| SymbolCount { i, j, count }).collect();
        debug_assert_eq!(counts.iter().map(|c| c.count).sum::<u64>(), points);
        levels.push(ScanLevel { m, field_order, points, counts });
    }

    // estimates per observed symbol
    let mut symbols: Vec<(u32, u32)> = levels
        .iter()
        .flat_map(|lvl| lvl.counts.iter().map(|c| (c.i, c.j)))
        .collect();
    symbols.sort_unstable();
    symbols.dedup();
    let char2 = s.field.characteristic() == 2;
    let mut estimates = Vec::new();
    for (i, j) in symbols {
        let counts: Vec<u64> = levels
            .iter()
            .map(|lvl| {
                lvl.counts.iter().find(|c| c.i == i && c.j == j).map(|c| c.count).unwrap_or(0)
            })
            .collect();
        let codim = codim_tb(&CodimQuery { n: s.n, e: s.e, i, j: Some(j), char2 })
            .unwrap_or(i64::MAX);
        let (estimate, empty_up_to) = match estimate_dim(&counts, q) {
            DimEstimate::EmptyUpTo(m) => (None, Some(m)),
            DimEstimate::NoTopPoints => (None, None),
            DimEstimate::Dim(d) => (Some(d), None),
        };
        estimates.push(SymbolEstimate {
            i,
            j,
            codim_formula: codim,
            expected_dim: s.n as i64 - codim,
            counts,
            estimate,
            empty_up_to,
        });
    }

    Ok(StrataReport {
        field: s.field.literal(),
        n: s.n,
        e: s.e,
        degree: s.degree_bound,
        seed,
        ext_max,
        budget,
        section: s.render(),
        levels,
        estimates,
    })
}

/// Reference scan used by tests: per-point exact symbols, no fast path.
pub fn scan_level_naive(s: &Section, m: u32) -> Result<std::collections::BTreeMap<(u32, u32), u64>> {
    let emb = Embedding::new(&s.field, m)?;
    let big = s.embed(&emb);
    let target = emb.target().clone();
    let q = target.order();
    let total = (q as u128).pow(s.n);
    let mut tally = std::collections::BTreeMap::new();
    let mut point = vec![target.zero(); s.n as usize];
    for idx in 0..total {
        let mut rest = idx;
        for c in point.iter_mut().rev() {
            *c = target.from_index((rest % q as u128) as u64);
            rest /= q as u128;
        }
        let sym = tb_symbol_at(&big, &point);
        *tally.entry((sym.i, sym.j)).or_insert(0u64) += 1;
    }
    Ok(tally)
}


#[cfg(test)]
mod big_field_tests {
    use super::*;
    use crate::poly::parse_poly;

    /// Fields beyond the table limit take the generic exact path; the
    /// histogram must still be right.
    #[test]
    fn scan_falls_back_above_table_limit() {
        let f5 = Field::new(5, 1).unwrap();
        let vars = VarTable::xs(1);
        let p = parse_poly("x1^2", &vars, &f5).unwrap();
        let s = Section::new(&f5, 1, vec![p], 2).unwrap();
        // 5^6 = 15625 elements > 4096: only the origin is critical
        let tally = scan_histogram(&s, 6, 1 << 20).unwrap();
        let mut expected = std::collections::BTreeMap::new();
        expected.insert((0u32, 0u32), 15624u64);
        expected.insert((1, 0), 1);
        assert_eq!(tally, expected);
    }
}
