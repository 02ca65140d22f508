//! Closed-form codimensions of Thom-Boardman loci, the exception tables,
//! and the arithmetic irrationality criteria for complete intersections.
//! All comparisons are exact integer arithmetic after clearing denominators;
//! several clauses are sharp, so no floating point is allowed anywhere here.

use serde::Serialize;

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The twelve pairs of E' (excluded in every characteristic).
pub const E_PRIME: [(u32, u32); 12] = [
    (1, 2),
    (2, 3),
    (2, 4),
    (3, 4),
    (3, 5),
    (4, 5),
    (4, 6),
    (4, 7),
    (5, 7),
    (5, 8),
    (6, 9),
    (7, 11),
];

/// The eight extra pairs of E'' (excluded only for p = 2).
pub const E_DOUBLE_PRIME: [(u32, u32); 8] =
    [(1, 3), (2, 5), (3, 6), (4, 8), (5, 9), (6, 10), (7, 12), (8, 13)];

/// The exception tables, injectable so tests can corrupt them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionSets {
    pub e_prime: Vec<(u32, u32)>,
    pub e_double_prime: Vec<(u32, u32)>,
}

impl ExceptionSets {
    pub fn standard() -> ExceptionSets {
        ExceptionSets { e_prime: E_PRIME.to_vec(), e_double_prime: E_DOUBLE_PRIME.to_vec() }
    }

    /// Copy with one pair dropped from E' (mutation testing).
    pub fn without_prime_pair(&self, pair: (u32, u32)) -> ExceptionSets {
        ExceptionSets {
            e_prime: self.e_prime.iter().copied().filter(|&p| p != pair).collect(),
            e_double_prime: self.e_double_prime.clone(),
        }
    }

    /// E_p: E' for odd p, E' plus E'' for p = 2.
    pub fn contains(&self, p: u64, pair: (u32, u32)) -> bool {
        self.e_prime.contains(&pair) || (p == 2 && self.e_double_prime.contains(&pair))
    }

    pub fn pairs_for(&self, p: u64) -> Vec<(u32, u32)> {
        let mut v = self.e_prime.clone();
        if p == 2 {
            v.extend(&self.e_double_prime);
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodimQuery {
    pub n: u32,
    pub e: u32,
    pub i: u32,
    pub j: Option<u32>,
    pub char2: bool,
}

/// Codimension of the stratum with symbol (i) or (i, j):
/// i(|n-e|+i) + j(n-m+i-j)(e-m+i-1) + j(j +/- 1)(e-m+i)/2,
/// plus for odd characteristic, minus in characteristic 2.
pub fn codim_tb(q: &CodimQuery) -> Result<i64> {
    let m = q.n.min(q.e);
    if q.i > m {
        return Err(Error::BadInput(format!("i = {} exceeds min(n, e) = {m}", q.i)));
    }
    let (n, e, i) = (q.n as i64, q.e as i64, q.i as i64);
    let m = m as i64;
    let first = i * ((n - e).abs() + i);
    let Some(j) = q.j else {
        return Ok(first);
    };
    let kdim = n - m + i;
    if (j as i64) > kdim {
        return Err(Error::BadInput(format!("j = {j} exceeds the kernel dimension {kdim}")));
    }
    let j = j as i64;
    let sign = if q.char2 { -1 } else { 1 };
    let second = j * (n - m + i - j) * (e - m + i - 1);
    let third = j * (j + sign) * (e - m + i) / 2;
    debug_assert_eq!(j * (j + sign) % 2, 0);
    Ok(first + second + third)
}

/// The codimension bound governing the exception tables: for a rank-e bundle
/// on an n-fold, the deep second-order stratum has codimension
/// C = (n-e) + 1 + (n-e-1)(n-e-1 +/- 1)/2, and (e, n) is an exception
/// exactly when C <= n.
pub fn deep_stratum_codim(n: u32, e: u32, char2: bool) -> i64 {
    let delta = n as i64 - e as i64;
    let sign = if char2 { -1 } else { 1 };
    delta + 1 + (delta - 1) * (delta - 1 + sign) / 2
}

/// Recompute the exception pairs from the codimension bound, for table
/// validation: pairs (e, n) in the admissible range with C <= n.
pub fn derived_exception_pairs(char2: bool, n_max: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for e in 1..=n {
            if e <= n - 1 && 2 * e <= n + 3 && deep_stratum_codim(n, e, char2) <= n as i64 {
                out.push((e, n));
            }
        }
    }
    out.sort_by_key(|&(e, n)| (n, e));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleReport {
    pub n: u32,
    pub e: u32,
    pub p: u64,
    pub e_le_n_minus_1: bool,
    pub two_e_le_n_plus_3: bool,
    pub pair: (u32, u32),
    pub exception_hit: bool,
    pub pass: bool,
    /// caller-asserted hypotheses, echoed but never computed
    pub bigness_assumed: Option<bool>,
    pub jet_generation_assumed: Option<bool>,
}

/// Dimensional clauses of the inseparable-cover irrationality theorem:
/// e <= n-1, 2e <= n+3, (e, n) not an exception for p.
pub fn check_bundle(
    n: u32,
    e: u32,
    p: u64,
    bigness_assumed: Option<bool>,
    jet_generation_assumed: Option<bool>,
) -> BundleReport {
    let tables = ExceptionSets::standard();
    let e_le_n_minus_1 = e + 1 <= n;
    let two_e_le_n_plus_3 = 2 * e <= n + 3;
    let exception_hit = tables.contains(p, (e, n));
    BundleReport {
        n,
        e,
        p,
        e_le_n_minus_1,
        two_e_le_n_plus_3,
        pair: (e, n),
        exception_hit,
        pass: e_le_n_minus_1 && two_e_le_n_plus_3 && !exception_hit,
        bigness_assumed,
        jet_generation_assumed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub big_n: u32,
    pub degrees: Vec<u32>,
    pub p: u64,
    pub c: u32,
    pub remainders: Vec<u32>,
    /// c <= N/2 - 1, exactly: 2c <= N - 2
    pub h1_half: bool,
    /// c <= N/3 + 1, exactly: 3c <= N + 3
    pub h1_third: bool,
    pub h1_pair: (u32, u32),
    pub h1_exception_hit: bool,
    pub h1: bool,
    /// every d_i >= p
    pub h2: bool,
    /// (p+1) * sum(d_i - r_i) > p * (N+1)
    pub h3_lhs: u64,
    pub h3_rhs: u64,
    pub h3: bool,
    pub verdict: bool,
    /// sum d_i >= N+1: irrational already by the canonical-class argument;
    /// reported separately, never merged into the verdict
    pub general_type: bool,
}

pub fn check_ci(big_n: u32, degrees: &[u32], p: u64) -> CriterionReport {
    check_ci_with(big_n, degrees, p, &ExceptionSets::standard())
}

pub fn check_ci_with(big_n: u32, degrees: &[u32], p: u64, tables: &ExceptionSets) -> CriterionReport {
    let c = degrees.len() as u32;
    let remainders: Vec<u32> = degrees.iter().map(|&d| d % p as u32).collect();
    let h1_half = 2 * c + 2 <= big_n;
    let h1_third = 3 * c <= big_n + 3;
    let pair = (c, big_n.saturating_sub(c));
    let h1_exception_hit = tables.contains(p, pair);
    let h1 = h1_half && h1_third && !h1_exception_hit;
    let h2 = degrees.iter().all(|&d| d as u64 >= p);
    let drop_sum: u64 = degrees.iter().zip(&remainders).map(|(&d, &r)| (d - r) as u64).sum();
    let h3_lhs = (p + 1) * drop_sum;
    let h3_rhs = p * (big_n as u64 + 1);
    let h3 = h3_lhs > h3_rhs;
    let degree_sum: u64 = degrees.iter().map(|&d| d as u64).sum();
    CriterionReport {
        big_n,
        degrees: degrees.to_vec(),
        p,
        c,
        remainders,
        h1_half,
        h1_third,
        h1_pair: pair,
        h1_exception_hit,
        h1,
        h2,
        h3_lhs,
        h3_rhs,
        h3,
        verdict: h1 && h2 && h3,
        general_type: degree_sum >= big_n as u64 + 1,
    }
}

/// Try all primes p <= max(d_i) and return the first passing report, plus
/// everything tried.
pub fn check_ci_auto(big_n: u32, degrees: &[u32]) -> (Option<CriterionReport>, Vec<CriterionReport>) {
    let max_d = degrees.iter().copied().max().unwrap_or(2) as u64;
    let mut tried = Vec::new();
    let mut witness = None;
    for p in 2..=max_d {
        if !(2..p).all(|d| p % d != 0) {
            continue;
        }
        let rep = check_ci(big_n, degrees, p);
        if witness.is_none() && rep.verdict {
            witness = Some(rep.clone());
        }
        tried.push(rep);
    }
    (witness, tried)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorollaryPath {
    NotApplicable,
    GeneralType,
    Theorem,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub big_n: u32,
    pub degrees: Vec<u32>,
    pub c: u32,
    /// 3 sum(d_i) >= 2N + 3c + 3
    pub applicable: bool,
    pub path: CorollaryPath,
    pub theorem_report: Option<CriterionReport>,
    /// when applicable, one of the two paths must hold
    pub ok: bool,
}

/// The intro corollary: sum d_i >= (2/3)N + c + 1 forces irrationality,
/// through the general-type shortcut or the p = 2 theorem.
pub fn corollary_check(big_n: u32, degrees: &[u32]) -> CorollaryReport {
    let c = degrees.len() as u32;
    let sum: u64 = degrees.iter().map(|&d| d as u64).sum();
    let applicable = 3 * sum >= 2 * big_n as u64 + 3 * c as u64 + 3;
    if !applicable {
        return CorollaryReport {
            big_n,
            degrees: degrees.to_vec(),
            c,
            applicable,
            path: CorollaryPath::NotApplicable,
            theorem_report: None,
            ok: true,
        };
    }
    if sum >= big_n as u64 + 1 {
        return CorollaryReport {
            big_n,
            degrees: degrees.to_vec(),
            c,
            applicable,
            path: CorollaryPath::GeneralType,
            theorem_report: None,
            ok: true,
        };
    }
    let rep = check_ci(big_n, degrees, 2);
    let ok = rep.verdict;
    CorollaryReport {
        big_n,
        degrees: degrees.to_vec(),
        c,
        applicable,
        path: CorollaryPath::Theorem,
        theorem_report: Some(rep),
        ok,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n_max: u32,
    pub cases_checked: u64,
    /// multidegrees satisfying the corollary inequality on which the p = 2
    /// criterion nevertheless fails
    pub counterexamples: Vec<(u32, Vec<u32>)>,
    /// disagreements between the exception tables and the codimension-bound
    /// characterization that derives them
    pub table_mismatches: Vec<TableMismatch>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableMismatch {
    pub char2: bool,
    pub pair: (u32, u32),
    pub in_table: bool,
    pub derived: bool,
}

/// Exhaustive consistency sweep. Two things are checked:
///
/// 1. for every N <= n_max and every multidegree with d_i >= 2,
///    sum d_i <= N and 3 sum d_i >= 2N + 3c + 3, the p = 2 criterion passes;
/// 2. the exception tables agree with the codimension-bound derivation
///    (this is what catches a corrupted table: the pairs a deletion removes
///    can never be reached by clause 1, whose cases all have N >= 3c + 3
///    while every tabled pair has N < 3c + 3).
pub fn corollary_sweep(n_max: u32, tables: &ExceptionSets) -> SweepReport {
    let per_n = |big_n: u32| -> (u64, Vec<(u32, Vec<u32>)>) {
        let mut cases = 0u64;
        let mut bad = Vec::new();
        let mut degrees = Vec::new();
        enumerate_multidegrees(big_n, &mut degrees, 2, &mut |ds| {
            let c = ds.len() as u32;
            let sum: u64 = ds.iter().map(|&d| d as u64).sum();
            if 3 * sum >= 2 * big_n as u64 + 3 * c as u64 + 3 {
                cases += 1;
                if !check_ci_with(big_n, ds, 2, tables).verdict {
                    bad.push((big_n, ds.to_vec()));
                }
            }
        });
        (cases, bad)
    };

    #[cfg(feature = "parallel")]
    let results: Vec<(u64, Vec<(u32, Vec<u32>)>)> =
        (1..=n_max).into_par_iter().map(per_n).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(u64, Vec<(u32, Vec<u32>)>)> = (1..=n_max).map(per_n).collect();

    let mut cases_checked = 0;
    let mut counterexamples = Vec::new();
    for (c, bad) in results {
        cases_checked += c;
        counterexamples.extend(bad);
    }

    // table-versus-formula cross-check; the range is generous, the derived
    // sets are empty far below it
    let bound = (3 * n_max).max(60);
    let mut table_mismatches = Vec::new();
    for char2 in [false, true] {
        let derived = derived_exception_pairs(char2, bound);
        let tabled: Vec<(u32, u32)> = if char2 { tables.pairs_for(2) } else { tables.pairs_for(3) };
        for n in 1..=bound {
            for e in 1..=n {
                let pair = (e, n);
                let in_table = tabled.contains(&pair);
                let is_derived = derived.contains(&pair);
                if in_table != is_derived {
                    table_mismatches.push(TableMismatch { char2, pair, in_table, derived: is_derived });
                }
            }
        }
    }

    let ok = counterexamples.is_empty() && table_mismatches.is_empty();
    SweepReport { n_max, cases_checked, counterexamples, table_mismatches, ok }
}

/// Multidegrees as multisets: nondecreasing sequences with entries >= min_d
/// and sum <= big_n.
fn enumerate_multidegrees(big_n: u32, cur: &mut Vec<u32>, min_d: u32, f: &mut impl FnMut(&[u32])) {
    let used: u32 = cur.iter().sum();
    let lo = cur.last().copied().unwrap_or(min_d);
    let mut d = lo;
    while used + d <= big_n {
        cur.push(d);
        f(cur);
        enumerate_multidegrees(big_n, cur, min_d, f);
        cur.pop();
        d += 1;
    }
}
