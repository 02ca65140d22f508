//! Morse lemma with parameters: split a series F over R = k[[s_1..s_t]]
//! into a quadratic normal form in the first r active variables plus a
//! residual involving only parameters and the remaining variables.
//!
//! The variable layout is: parameters first (indices 0..t), then the active
//! variables. After the linear classification of the quadratic-in-x part,
//! every monomial touching a split variable is eliminated in increasing
//! graded-lex order by completing the square (odd characteristic) or by
//! shifting the symplectic partner (characteristic 2). Each step cancels the
//! lowest offending monomial and only creates strictly later ones, so the
//! loop terminates at the truncation order.

use crate::error::{Error, Result};
use crate::ffield::Embedding;
use crate::linalg;
use crate::localalg::qf::{normal_form_poly, QfTag, QuadraticForm};
use crate::poly::Poly;
use crate::powerseries::{LocalAutomorphism, TruncatedSeries};

#[derive(Debug, Clone)]
pub struct SplitResult {
    /// Sends the (possibly field-extended) input to quadratic + residual.
    pub phi: LocalAutomorphism,
    /// Rank of the split quadratic block.
    pub rank: u32,
    pub q_tag: QfTag,
    /// The split-off normal quadric, as a series in the full variable set.
    pub quadratic: TruncatedSeries,
    /// Series in parameters and non-split variables only.
    pub residual: TruncatedSeries,
    pub extension_degree: u32,
}

pub fn split(f: &TruncatedSeries, param_count: u32, allow_extension: bool) -> Result<SplitResult> {
    let trunc = f.trunc();
    if trunc < 3 {
        return Err(Error::InsufficientPrecision { need: 3, have: trunc });
    }
    let n = f.nvars();
    if param_count >= n {
        return Err(Error::BadInput("no active variables left after parameters".into()));
    }
    let nx = n - param_count;
    let t = param_count as usize;

    // the residue in k[[x]] must vanish to order 2 (constant aside)
    for (m, _) in f.poly().terms() {
        let s_deg: u32 = m.exps()[..t].iter().map(|&e| e as u32).sum();
        let x_deg = m.total_degree() - s_deg;
        if s_deg == 0 && x_deg == 1 {
            return Err(Error::BadInput(
                "active-variable residue has a linear term; the origin is not critical".into(),
            ));
        }
    }

    // classify the quadratic-in-x part of the residue
    let mut quad = QuadraticForm::new(f.field(), nx);
    for (m, c) in f.poly().terms() {
        let s_deg: u32 = m.exps()[..t].iter().map(|&e| e as u32).sum();
        if s_deg != 0 || m.total_degree() != 2 {
            continue;
        }
        let nz: Vec<(usize, u16)> = m.exps()[t..]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
            .collect();
        match nz.as_slice() {
            [(a, 2)] => quad.set(*a as u16, *a as u16, c.clone()),
            [(a, 1), (b, 1)] => quad.set(*a as u16, *b as u16, c.clone()),
            _ => unreachable!(),
        }
    }
    let nf = quad.classify(allow_extension)?;
    let extension_degree = nf.extension_degree;

    // work over the (possibly extended) field from here on
    let (field, work) = if extension_degree == 1 {
        (f.field().clone(), f.clone())
    } else {
        let emb = Embedding::new(f.field(), extension_degree)?;
        (emb.target().clone(), f.embed(&emb))
    };

    // linear step: identity on parameters, inverse transform on active vars
    let t_inv = linalg::invert(&nf.transform, &field)?;
    let mut lin = linalg::identity(&field, n as usize);
    for a in 0..nx as usize {
        for b in 0..nx as usize {
            lin[t + a][t + b] = t_inv[a][b].clone();
        }
    }
    let linear_aut = LocalAutomorphism::from_linear(&field, &lin, trunc)?;
    let mut g = linear_aut.apply(&work);

    let rank = nf.rank;
    let tag = nf.tag;
    // split variables occupy global indices t .. t + rank
    let split_lo = t;
    let split_hi = t + rank as usize;
    let qn_poly = normal_form_poly(&field, nx, rank, tag);
    // drop the extra square from the split target: in the plus-square case
    // x_{r+1} is demoted to the residual block
    let qn_poly = Poly::from_terms(
        &field,
        nx,
        qn_poly
            .terms()
            .filter(|(m, _)| {
                m.exps()[..rank as usize].iter().any(|&e| e > 0)
            })
            .map(|(m, c)| (m.clone(), c.clone())),
    );
    let qn = TruncatedSeries::from_poly(qn_poly.shift_vars(param_count, n), trunc);

    let inv2 = if field.characteristic() == 2 {
        field.zero()
    } else {
        field.from_u64(2).inv().expect("odd characteristic")
    };

    // the accumulated automorphism, kept as raw images so each elimination
    // step is a single-variable substitution
    let mut phi_images: Vec<TruncatedSeries> = linear_aut.images().to_vec();

    let mut guard = 0usize;
    loop {
        guard += 1;
        assert!(guard < 500_000, "split elimination failed to terminate");
        let w = g.sub(&qn);
        // lowest offending monomial in graded-lex order
        let offending = w.poly().terms().find(|(m, _)| {
            m.exps()[split_lo..split_hi].iter().any(|&e| e > 0)
        });
        let Some((mono, coef)) = offending else {
            // done: everything left is the residual
            let residual = w;
            let phi = LocalAutomorphism::new(phi_images)?;
            debug_assert!(phi.fixes_params(param_count));
            let check = phi.apply(&work).sub(&qn.add(&residual));
            assert!(check.is_zero(), "split postcondition violated");
            return Ok(SplitResult {
                phi,
                rank,
                q_tag: tag,
                quadratic: qn,
                residual,
                extension_degree,
            });
        };
        let mono = mono.clone();
        let coef = coef.clone();
        let v = (split_lo..split_hi)
            .find(|&i| mono.exps()[i] > 0)
            .expect("offending monomial has a split variable");
        let cofactor = mono.div_var(v).expect("divisible by its own variable");
        // one substitution step on a single variable
        let (target, shift_coef) = if field.characteristic() == 2 {
            // shift the symplectic partner
            let local = v - split_lo;
            let partner = split_lo + (local ^ 1);
            (partner, coef)
        } else {
            (v, coef.mul(&inv2).neg())
        };
        let mut shift = Poly::var(&field, n, target);
        shift.add_term(cofactor, shift_coef);
        let image = TruncatedSeries::from_poly(shift, trunc);
        g = g.subst_var(target, &image);
        for im in phi_images.iter_mut() {
            *im = im.subst_var(target, &image);
        }
    }
}
