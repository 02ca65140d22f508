//! Local algebra of power series with finite Milnor number: Jacobian-ideal
//! membership, Milnor numbers, determinacy bounds and versal unfoldings.
//!
//! Everything reduces to exact linear algebra on the monomial basis of
//! k[x]/m^r (Macaulay-matrix style): the Nakayama reduction
//! m^r <= jac(f) + m^{r+1}  ==>  m^r <= jac(f)
//! makes finite truncations sufficient, no standard bases needed.

mod qf;
mod split;

pub use qf::{normal_form_poly, QFNormalForm, QfTag, QuadraticForm};
pub use split::{split, SplitResult};

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{monomials_of_degree, monomials_up_to, Monomial, Poly};
use crate::powerseries::{LocalAutomorphism, TruncatedSeries};

/// Default search cap for the least r with m^r inside jac(f).
pub const DEFAULT_CAP: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mu {
    Finite(u64),
    /// No r <= cap worked; mu(f) is at least this large in the only sense we
    /// can certify at this truncation.
    InfiniteAtLeast(u32),
}

#[derive(Debug, Clone)]
pub struct MilnorResult {
    pub mu: Mu,
    pub r_min: Option<u32>,
    /// monomials spanning the Milnor algebra, in graded-lex order
    pub basis: Vec<Monomial>,
}

/// Rows spanning the image of jac(f) inside k[x]/m^bound, as coefficient
/// vectors over the monomials of degree < bound.
fn jacobian_rows(f: &TruncatedSeries, bound: u32) -> (Vec<Monomial>, linalg::Matrix) {
    let field = f.field().clone();
    let n = f.nvars();
    let monos = monomials_up_to(n, bound.saturating_sub(1));
    let index: std::collections::HashMap<&Monomial, usize> =
        monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let partials: Vec<Poly> = (0..n as usize).map(|i| f.poly().partial(i)).collect();
    let mut rows = Vec::new();
    for alpha in &monos {
        for dp in &partials {
            let mut row = vec![field.zero(); monos.len()];
            let mut nonzero = false;
            for (m, c) in dp.terms() {
                let prod = alpha.mul(m);
                if prod.total_degree() < bound {
                    let idx = index[&prod];
                    row[idx] = row[idx].add(c);
                    nonzero = true;
                }
            }
            if nonzero {
                rows.push(row);
            }
        }
    }
    (monos, rows)
}

fn check_preconditions(f: &TruncatedSeries, need: u32) -> Result<()> {
    if f.trunc() < need {
        return Err(Error::InsufficientPrecision { need, have: f.trunc() });
    }
    if !f.constant_term().is_zero() {
        return Err(Error::BadInput("series must have zero constant term".into()));
    }
    Ok(())
}

/// Does m^r lie inside jac(f)? Decided through the Nakayama reduction:
/// it suffices that every degree-r monomial lies in the span of
/// { x^alpha d_i f  mod m^{r+1} }.
pub fn contains_power(f: &TruncatedSeries, r: u32) -> Result<bool> {
    check_preconditions(f, r + 1)?;
    let field = f.field().clone();
    let (monos, mut rows) = jacobian_rows(f, r + 1);
    let index: std::collections::HashMap<&Monomial, usize> =
        monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let pivots = linalg::rref(&mut rows);
    for target in monomials_of_degree(f.nvars(), r) {
        let mut v = vec![field.zero(); monos.len()];
        v[index[&target]] = field.one();
        if !linalg::in_row_space(&rows, &pivots, &v) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Milnor number, degree bound r_min, and the canonical monomial basis of
/// the Milnor algebra (complement of the column-echelon pivots, graded-lex).
///
/// The search cap is clamped to the available precision: r is only probed
/// up to trunc - 1, and an unsuccessful search reports "infinite at least
/// the clamped cap".
pub fn milnor_number(f: &TruncatedSeries, cap: u32) -> Result<MilnorResult> {
    let cap = cap.min(f.trunc().saturating_sub(1));
    check_preconditions(f, cap + 1)?;
    let r_min = (0..=cap).find(|&r| contains_power(f, r).unwrap_or(false));
    let Some(r_min) = r_min else {
        return Ok(MilnorResult { mu: Mu::InfiniteAtLeast(cap), r_min: None, basis: Vec::new() });
    };
    let (monos, mut rows) = jacobian_rows(f, r_min);
    let pivots = linalg::rref(&mut rows);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let basis: Vec<Monomial> = monos
        .iter()
        .enumerate()
        .filter(|(i, _)| !pivot_set.contains(i))
        .map(|(_, m)| m.clone())
        .collect();
    let mu = (monos.len() - pivots.len()) as u64;
    debug_assert_eq!(mu as usize, basis.len());
    Ok(MilnorResult { mu: Mu::Finite(mu), r_min: Some(r_min), basis })
}

/// 2 r_min, per the determinacy bound for series with m^r <= jac(f);
/// None when no r <= cap works.
pub fn determinacy_bound(f: &TruncatedSeries, cap: u32) -> Result<Option<u32>> {
    Ok(milnor_number(f, cap)?.r_min.map(|r| 2 * r))
}

#[derive(Debug, Clone)]
pub struct VersalUnfolding {
    pub mu: u64,
    pub basis: Vec<Monomial>,
    /// F = f + s_1 g_1 + .. + s_mu g_mu over mu + n variables, the
    /// parameters s_i occupying the leading indices.
    pub unfolding: TruncatedSeries,
    pub param_count: u32,
}

/// The right-complete unfolding built on the Milnor basis monomials.
pub fn versal_unfolding(f: &TruncatedSeries, cap: u32) -> Result<VersalUnfolding> {
    let milnor = milnor_number(f, cap)?;
    let Mu::Finite(mu) = milnor.mu else {
        return Err(Error::InfiniteMilnor { cap });
    };
    let n = f.nvars();
    let total = mu as u32 + n;
    let field = f.field().clone();
    let mut big = f.poly().shift_vars(mu as u32, total);
    for (idx, g) in milnor.basis.iter().enumerate() {
        // s_idx * g, with g's variables shifted past the parameters
        let mut exps = vec![0u16; total as usize];
        exps[idx] = 1;
        exps[mu as usize..].copy_from_slice(g.exps());
        big.add_term(Monomial::new(exps), field.one());
    }
    Ok(VersalUnfolding {
        mu,
        basis: milnor.basis,
        unfolding: TruncatedSeries::from_poly(big, f.trunc()),
        param_count: mu as u32,
    })
}

/// Convenience used by tests: mu is invariant under right equivalence.
pub fn milnor_of_transformed(
    f: &TruncatedSeries,
    phi: &LocalAutomorphism,
    cap: u32,
) -> Result<MilnorResult> {
    milnor_number(&phi.apply(f), cap)
}
