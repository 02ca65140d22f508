//! Classification of quadratic forms over F_q up to linear changes of
//! coordinates, in the two shapes the splitting lemma needs:
//! sums of squares (odd characteristic) and symplectic sums
//! x1 x2 + .. + x_{r-1} x_r, possibly plus one extra square (char 2).
//!
//! The characteristic-2 path reduces the polar form to hyperbolic pairs,
//! then cleans each block a u^2 + u v + c v^2 via Artin-Schreier solving.
//! Two obstructed blocks cancel against each other through an explicit
//! 4-variable change, and a nonzero square on the radical absorbs block
//! obstructions entirely, so a field extension (degree 2) is needed only
//! when a single obstructed block survives with nothing to absorb it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ffield::{Embedding, Field, FqElement};
use crate::linalg::{self, Matrix};
use crate::poly::{Monomial, Poly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfTag {
    /// x_1^2 + .. + x_r^2 (odd characteristic)
    DiagonalSquares,
    /// x_1 x_2 + .. + x_{r-1} x_r (characteristic 2)
    Symplectic,
    /// x_1 x_2 + .. + x_{r-1} x_r + x_{r+1}^2 (characteristic 2)
    SymplecticPlusSquare,
}

impl QfTag {
    pub fn name(&self) -> &'static str {
        match self {
            QfTag::DiagonalSquares => "diagonal-squares",
            QfTag::Symplectic => "symplectic",
            QfTag::SymplecticPlusSquare => "symplectic-plus-square",
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticForm {
    field: Field,
    n: u32,
    /// coefficient of x_a x_b, keys a <= b, no zeros stored
    coeffs: BTreeMap<(u16, u16), FqElement>,
}

#[derive(Debug, Clone)]
pub struct QFNormalForm {
    pub rank: u32,
    pub tag: QfTag,
    /// Linear substitution matrix T over `field`: substituting
    /// x_i <- sum_j T[i][j] x_j into the normal form reproduces the input
    /// (embedded into `field` when extension_degree > 1).
    pub transform: Matrix,
    pub extension_degree: u32,
    pub field: Field,
}

enum Obstruction {
    NonResiduePivot(FqElement),
    TraceOne(FqElement),
}

impl Obstruction {
    fn describe(&self) -> String {
        match self {
            Obstruction::NonResiduePivot(d) => format!("non-residue pivot {d}"),
            Obstruction::TraceOne(c) => format!("Artin-Schreier obstruction, trace({c}) = 1"),
        }
    }
}

impl QuadraticForm {
    pub fn new(field: &Field, n: u32) -> QuadraticForm {
        QuadraticForm { field: field.clone(), n, coeffs: BTreeMap::new() }
    }

    pub fn set(&mut self, a: u16, b: u16, c: FqElement) {
        let key = if a <= b { (a, b) } else { (b, a) };
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
    }

    pub fn add_to(&mut self, a: u16, b: u16, c: FqElement) {
        let key = if a <= b { (a, b) } else { (b, a) };
        let cur = self.coeffs.get(&key).cloned().unwrap_or_else(|| self.field.zero());
        self.set(key.0, key.1, cur.add(&c));
    }

    pub fn coeff(&self, a: u16, b: u16) -> FqElement {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.coeffs.get(&key).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&(u16, u16), &FqElement)> {
        self.coeffs.iter()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Read the degree-2 part of a polynomial as a quadratic form.
    pub fn from_poly(p: &Poly) -> QuadraticForm {
        let mut q = QuadraticForm::new(p.field(), p.nvars());
        for (m, c) in p.terms() {
            if m.total_degree() != 2 {
                continue;
            }
            let nz: Vec<(usize, u16)> =
                m.exps().iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
            match nz.as_slice() {
                [(a, 2)] => q.set(*a as u16, *a as u16, c.clone()),
                [(a, 1), (b, 1)] => q.set(*a as u16, *b as u16, c.clone()),
                _ => unreachable!("degree-2 monomial shape"),
            }
        }
        q
    }

    pub fn to_poly(&self) -> Poly {
        let n = self.n as usize;
        let mut p = Poly::zero(&self.field, self.n);
        for (&(a, b), c) in &self.coeffs {
            let mut exps = vec![0u16; n];
            exps[a as usize] += 1;
            exps[b as usize] += 1;
            p.add_term(Monomial::new(exps), c.clone());
        }
        p
    }

    pub fn embed(&self, emb: &Embedding) -> QuadraticForm {
        let mut q = QuadraticForm::new(emb.target(), self.n);
        for (&(a, b), c) in &self.coeffs {
            q.set(a, b, emb.map(c));
        }
        q
    }

    /// Polar matrix H: H_ab = c_ab for a != b, H_aa = 2 c_aa. Alternating
    /// (zero diagonal) in characteristic 2.
    pub fn polar_matrix(&self) -> Matrix {
        let n = self.n as usize;
        let mut h = linalg::zeros(&self.field, n, n);
        for (&(a, b), c) in &self.coeffs {
            let (a, b) = (a as usize, b as usize);
            if a == b {
                h[a][a] = c.scale(2);
            } else {
                h[a][b] = c.clone();
                h[b][a] = c.clone();
            }
        }
        h
    }

    pub fn polar_rank(&self) -> u32 {
        linalg::rank(&self.polar_matrix()) as u32
    }

    /// Substitute x_i <- sum_j m[i][j] x_j.
    pub fn apply_matrix(&self, m: &Matrix) -> QuadraticForm {
        let n = self.n as usize;
        let mut out = QuadraticForm::new(&self.field, self.n);
        for (&(a, b), c) in &self.coeffs {
            let (a, b) = (a as usize, b as usize);
            // c * L_a(x) * L_b(x)
            for i in 0..n {
                if m[a][i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if m[b][j].is_zero() {
                        continue;
                    }
                    out.add_to(i as u16, j as u16, c.mul(&m[a][i]).mul(&m[b][j]));
                }
            }
        }
        out
    }

    pub fn equals(&self, other: &QuadraticForm) -> bool {
        self.coeffs == other.coeffs
    }

    /// Classification per the quadratic-form lemma. With `allow_extension`
    /// an obstruction triggers one degree-2 field extension, which always
    /// suffices; without it the obstruction is reported as an error.
    pub fn classify(&self, allow_extension: bool) -> Result<QFNormalForm> {
        match self.attempt() {
            Ok((rank, tag, a_total)) => {
                let transform = linalg::invert(&a_total, &self.field)?;
                let nf = QFNormalForm {
                    rank,
                    tag,
                    transform,
                    extension_degree: 1,
                    field: self.field.clone(),
                };
                self.certify(&nf, None);
                Ok(nf)
            }
            Err(obstruction) => {
                if !allow_extension {
                    return Err(Error::QfObstruction(obstruction.describe()));
                }
                let emb = Embedding::new(&self.field, 2)?;
                let lifted = self.embed(&emb);
                let (rank, tag, a_total) = lifted
                    .attempt()
                    .unwrap_or_else(|_| unreachable!("degree-2 extension resolves the obstruction"));
                let transform = linalg::invert(&a_total, lifted.field())?;
                let nf = QFNormalForm {
                    rank,
                    tag,
                    transform,
                    extension_degree: 2,
                    field: lifted.field().clone(),
                };
                self.certify(&nf, Some(&emb));
                Ok(nf)
            }
        }
    }

    /// Normal form applied through the transform must reproduce the input.
    fn certify(&self, nf: &QFNormalForm, emb: Option<&Embedding>) {
        let target = match emb {
            Some(e) => self.embed(e),
            None => self.clone(),
        };
        let normal = normal_form(&nf.field, self.n, nf.rank, nf.tag);
        assert!(
            normal.apply_matrix(&nf.transform).equals(&target),
            "classification transform failed to certify"
        );
    }

    /// One classification attempt over the form's own field. On success,
    /// returns (rank, tag, A) with  q o A = normal form.
    fn attempt(&self) -> std::result::Result<(u32, QfTag, Matrix), Obstruction> {
        if self.field.characteristic() == 2 {
            self.attempt_char2()
        } else {
            self.attempt_odd()
        }
    }

    fn attempt_odd(&self) -> std::result::Result<(u32, QfTag, Matrix), Obstruction> {
        let field = &self.field;
        let n = self.n as usize;
        let two_inv = field.from_u64(2).inv().expect("odd characteristic");
        // symmetric Gram matrix: q(x) = x^T S x
        let mut s = linalg::zeros(field, n, n);
        for (&(a, b), c) in &self.coeffs {
            let (a, b) = (a as usize, b as usize);
            if a == b {
                s[a][a] = c.clone();
            } else {
                let half = c.mul(&two_inv);
                s[a][b] = half.clone();
                s[b][a] = half;
            }
        }
        // congruence diagonalization, tracking the basis matrix B (x = B y)
        let mut basis = linalg::identity(field, n);
        let mut rank = 0usize;
        for t in 0..n {
            if s[t][t].is_zero() {
                if let Some(u) = (t + 1..n).find(|&u| !s[u][u].is_zero()) {
                    swap_basis(&mut s, &mut basis, t, u);
                } else if let Some((u, v)) = find_offdiag(&s, t, n) {
                    // b_u += b_v makes S_uu = 2 S_uv nonzero
                    add_basis(&mut s, &mut basis, u, v, &field.one());
                    if u != t {
                        swap_basis(&mut s, &mut basis, t, u);
                    }
                } else {
                    break; // zero block from here on
                }
            }
            let pivot_inv = s[t][t].inv().expect("pivot nonzero");
            for w in t + 1..n {
                if !s[t][w].is_zero() {
                    let f = s[t][w].mul(&pivot_inv).neg();
                    add_basis(&mut s, &mut basis, w, t, &f);
                }
            }
            rank += 1;
        }
        let mut a_total = basis;
        let mut q_cur = self.apply_matrix(&a_total);

        // pair up non-residue pivots: d(x^2 + y^2) rotates to x^2 + y^2 over
        // the base field because every element is a sum of two squares
        let mut nonres: Vec<usize> =
            (0..rank).filter(|&t| field.sqrt(&q_cur.coeff(t as u16, t as u16)).is_none()).collect();
        while nonres.len() >= 2 {
            let tj = nonres.pop().unwrap();
            let ti = nonres.pop().unwrap();
            let di = q_cur.coeff(ti as u16, ti as u16);
            let dj = q_cur.coeff(tj as u16, tj as u16);
            // x_tj <- lambda x_tj with lambda^2 = d_i / d_j (a residue)
            let lam = field
                .sqrt(&di.mul(&dj.inv().expect("nonzero pivot")))
                .expect("ratio of two non-residues is a square");
            let mut step = linalg::identity(field, n);
            step[tj][tj] = lam;
            apply_qstep(&mut a_total, &mut q_cur, self, &step);
            // rotate: x_ti <- a x_ti + b x_tj, x_tj <- b x_ti - a x_tj with
            // a^2 + b^2 = 1/d_i
            let target = di.inv().expect("nonzero pivot");
            let (ca, cb) = sum_of_two_squares(field, &target);
            let mut step = linalg::identity(field, n);
            step[ti][ti] = ca.clone();
            step[ti][tj] = cb.clone();
            step[tj][ti] = cb;
            step[tj][tj] = ca.neg();
            apply_qstep(&mut a_total, &mut q_cur, self, &step);
            debug_assert!(q_cur.coeff(ti as u16, ti as u16).is_one());
            debug_assert!(q_cur.coeff(tj as u16, tj as u16).is_one());
        }
        if let Some(&t) = nonres.first() {
            return Err(Obstruction::NonResiduePivot(q_cur.coeff(t as u16, t as u16)));
        }
        // remaining pivots are residues: scale them to 1
        let mut step = linalg::identity(field, n);
        for t in 0..rank {
            let d = q_cur.coeff(t as u16, t as u16);
            if !d.is_one() {
                let root = field.sqrt(&d).expect("residue pivot");
                step[t][t] = root.inv().expect("nonzero root");
            }
        }
        apply_qstep(&mut a_total, &mut q_cur, self, &step);
        debug_assert!(q_cur.equals(&normal_form(field, self.n, rank as u32, QfTag::DiagonalSquares)));
        Ok((rank as u32, QfTag::DiagonalSquares, a_total))
    }

    fn attempt_char2(&self) -> std::result::Result<(u32, QfTag, Matrix), Obstruction> {
        let field = &self.field;
        let n = self.n as usize;
        // symplectic reduction of the polar form, tracking basis columns
        let mut a_total = linalg::identity(field, n);
        let mut h = self.polar_matrix();
        let mut pairs = 0usize;
        loop {
            let start = 2 * pairs;
            let Some((u, v)) = find_offdiag(&h, start, n) else {
                break;
            };
            let mut step = linalg::identity(field, n);
            // move u, v into positions (start, start+1)
            step_swap(&mut step, u, start);
            let v = if v == start { u } else { v };
            step_swap(&mut step, v, start + 1);
            apply_step(&mut a_total, &mut h, self, &step);
            // normalize pairing to 1
            let coef = h[start][start + 1].inv().expect("nonzero pairing");
            let mut step = linalg::identity(field, n);
            step[start + 1][start + 1] = coef;
            apply_step(&mut a_total, &mut h, self, &step);
            // clear pairings of later basis vectors against this pair:
            // b_w <- b_w + H(b_w, b_v) b_u + H(b_w, b_u) b_v (columns of the step)
            let mut step = linalg::identity(field, n);
            for w in start + 2..n {
                step[start][w] = h[w][start + 1].clone();
                step[start + 1][w] = h[w][start].clone();
            }
            apply_step(&mut a_total, &mut h, self, &step);
            pairs += 1;
        }
        let rank = 2 * pairs;

        // current form: blocks (a_t, 1, c_t) on (2t, 2t+1), squares on the radical
        let mut q_cur = self.apply_matrix(&a_total);
        let radical: Vec<usize> = (rank..n).collect();
        debug_assert!(radical
            .iter()
            .all(|&i| radical.iter().all(|&j| i == j || q_cur.coeff(i as u16, j as u16).is_zero())));
        let defect: Vec<usize> =
            radical.iter().copied().filter(|&j| !q_cur.coeff(j as u16, j as u16).is_zero()).collect();

        if !defect.is_empty() {
            // collapse all radical squares onto the first defective variable
            let j0 = defect[0];
            let d0 = q_cur.coeff(j0 as u16, j0 as u16);
            let s0 = field.sqrt(&d0).expect("char-2 square roots always exist");
            let s0_inv = s0.inv().expect("nonzero");
            let mut step = linalg::identity(field, n);
            for &j in &defect[1..] {
                let sj = field.sqrt(&q_cur.coeff(j as u16, j as u16)).expect("char 2");
                step[j0][j] = sj.mul(&s0_inv);
            }
            apply_qstep(&mut a_total, &mut q_cur, self, &step);
            // scale the surviving square to coefficient 1
            let mut step = linalg::identity(field, n);
            step[j0][j0] = s0_inv;
            apply_qstep(&mut a_total, &mut q_cur, self, &step);
            // absorb every block's outer coefficients into the square
            let mut step = linalg::identity(field, n);
            for t in 0..pairs {
                let (u, v) = (2 * t, 2 * t + 1);
                step[j0][u] = field.sqrt(&q_cur.coeff(u as u16, u as u16)).expect("char 2");
                step[j0][v] = field.sqrt(&q_cur.coeff(v as u16, v as u16)).expect("char 2");
            }
            apply_qstep(&mut a_total, &mut q_cur, self, &step);
            // bring the square next to the symplectic block
            if j0 != rank {
                let mut step = linalg::identity(field, n);
                step_swap(&mut step, j0, rank);
                apply_qstep(&mut a_total, &mut q_cur, self, &step);
            }
            debug_assert!(q_cur.equals(&normal_form(field, self.n, rank as u32, QfTag::SymplecticPlusSquare)));
            return Ok((rank as u32, QfTag::SymplecticPlusSquare, a_total));
        }

        // nondefective: clean blocks, pairing obstructed ones against each other
        let mut obstructed = Vec::new();
        for t in 0..pairs {
            match clean_block(field, n, &mut a_total, &mut q_cur, self, t) {
                Ok(()) => {}
                Err(()) => obstructed.push(t),
            }
        }
        while obstructed.len() >= 2 {
            let t2 = obstructed.pop().unwrap();
            let t1 = obstructed.pop().unwrap();
            cancel_block_pair(field, n, &mut a_total, &mut q_cur, self, t1, t2);
            // both blocks are now unobstructed
            clean_block(field, n, &mut a_total, &mut q_cur, self, t1)
                .unwrap_or_else(|_| unreachable!("hyperbolic after pair cancellation"));
            clean_block(field, n, &mut a_total, &mut q_cur, self, t2)
                .unwrap_or_else(|_| unreachable!("trace-zero block after pair cancellation"));
        }
        if let Some(&t) = obstructed.first() {
            let (u, v) = (2 * t, 2 * t + 1);
            let prod = q_cur.coeff(u as u16, u as u16).mul(&q_cur.coeff(v as u16, v as u16));
            return Err(Obstruction::TraceOne(prod));
        }
        debug_assert!(q_cur.equals(&normal_form(field, self.n, rank as u32, QfTag::Symplectic)));
        Ok((rank as u32, QfTag::Symplectic, a_total))
    }
}

/// Reduce one hyperbolic block (a, 1, c) at pair `t` to (0, 1, 0).
/// Err(()) when the Artin-Schreier equation for it has no root here.
fn clean_block(
    field: &Field,
    n: usize,
    a_total: &mut Matrix,
    q_cur: &mut QuadraticForm,
    original: &QuadraticForm,
    t: usize,
) -> std::result::Result<(), ()> {
    let (u, v) = (2 * t, 2 * t + 1);
    let a = q_cur.coeff(u as u16, u as u16);
    let c = q_cur.coeff(v as u16, v as u16);
    if !a.is_zero() {
        // v <- v + s u with c s^2 + s + a = 0
        let s = if c.is_zero() {
            a.clone()
        } else {
            let root = field.artin_schreier(&a.mul(&c)).ok_or(())?;
            root.mul(&c.inv().expect("nonzero"))
        };
        let mut step = linalg::identity(field, n);
        step[v][u] = s;
        apply_qstep(a_total, q_cur, original, &step);
    }
    let c = q_cur.coeff(v as u16, v as u16);
    if !c.is_zero() {
        // u <- u + c v
        let mut step = linalg::identity(field, n);
        step[u][v] = c;
        apply_qstep(a_total, q_cur, original, &step);
    }
    debug_assert!(q_cur.coeff(u as u16, u as u16).is_zero());
    debug_assert!(q_cur.coeff(v as u16, v as u16).is_zero());
    Ok(())
}

/// Turn two obstructed blocks N(d1) | N(d2) into hyperbolic | N(d1+d2),
/// where the latter has trace zero and splits afterwards.
fn cancel_block_pair(
    field: &Field,
    n: usize,
    a_total: &mut Matrix,
    q_cur: &mut QuadraticForm,
    original: &QuadraticForm,
    t1: usize,
    t2: usize,
) {
    let (u1, v1) = (2 * t1, 2 * t1 + 1);
    let (u2, v2) = (2 * t2, 2 * t2 + 1);
    // normalize both blocks to (1, 1, delta)
    let mut step = linalg::identity(field, n);
    for &(u, v) in &[(u1, v1), (u2, v2)] {
        let a = q_cur.coeff(u as u16, u as u16);
        let lam = field.sqrt(&a).expect("char 2").inv().expect("a nonzero when obstructed");
        step[u][u] = lam.clone();
        step[v][v] = lam.inv().expect("nonzero");
    }
    apply_qstep(a_total, q_cur, original, &step);
    let d1 = q_cur.coeff(v1 as u16, v1 as u16);
    // new basis: w = u1+u2, w'' = v1 + d1 u1 + d1 u2, z1 = u2, z2 = v1+v2
    let mut step = linalg::identity(field, n);
    for row in [u1, v1, u2, v2] {
        for col in [u1, v1, u2, v2] {
            step[row][col] = field.zero();
        }
    }
    let one = field.one();
    step[u1][u1] = one.clone(); // w has u1-coord 1
    step[u2][u1] = one.clone();
    step[u1][v1] = d1.clone(); // w''
    step[v1][v1] = one.clone();
    step[u2][v1] = d1.clone();
    step[u2][u2] = one.clone(); // z1
    step[v1][v2] = one.clone(); // z2
    step[v2][v2] = one;
    apply_qstep(a_total, q_cur, original, &step);
    debug_assert!(q_cur.coeff(u1 as u16, u1 as u16).is_zero());
    debug_assert!(q_cur.coeff(v1 as u16, v1 as u16).is_zero());
}

/// Deterministic (a, b) with a^2 + b^2 = target, odd characteristic.
fn sum_of_two_squares(field: &Field, target: &FqElement) -> (FqElement, FqElement) {
    for a in field.enumerate() {
        let rest = target.sub(&a.mul(&a));
        if let Some(b) = field.sqrt(&rest) {
            return (a, b);
        }
    }
    unreachable!("every element of an odd finite field is a sum of two squares")
}

fn find_offdiag(m: &Matrix, start: usize, n: usize) -> Option<(usize, usize)> {
    for u in start..n {
        for v in u + 1..n {
            if !m[u][v].is_zero() {
                return Some((u, v));
            }
        }
    }
    None
}

fn step_swap(step: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for row in step.iter_mut() {
        row.swap(a, b);
    }
}

/// A <- A * S, H <- S^T H S (recomputed through the quadratic form).
fn apply_step(a_total: &mut Matrix, h: &mut Matrix, original: &QuadraticForm, step: &Matrix) {
    let field = original.field();
    *a_total = linalg::mat_mul(a_total, step, field);
    *h = original.apply_matrix(a_total).polar_matrix();
}

fn apply_qstep(a_total: &mut Matrix, q_cur: &mut QuadraticForm, original: &QuadraticForm, step: &Matrix) {
    let field = original.field();
    *a_total = linalg::mat_mul(a_total, step, field);
    *q_cur = original.apply_matrix(a_total);
}

/// The target shapes of the classification lemma.
pub fn normal_form(field: &Field, n: u32, rank: u32, tag: QfTag) -> QuadraticForm {
    let mut q = QuadraticForm::new(field, n);
    let one = field.one();
    match tag {
        QfTag::DiagonalSquares => {
            for t in 0..rank as u16 {
                q.set(t, t, one.clone());
            }
        }
        QfTag::Symplectic | QfTag::SymplecticPlusSquare => {
            debug_assert_eq!(rank % 2, 0);
            for t in 0..(rank / 2) as u16 {
                q.set(2 * t, 2 * t + 1, one.clone());
            }
            if tag == QfTag::SymplecticPlusSquare {
                q.set(rank as u16, rank as u16, one.clone());
            }
        }
    }
    q
}

pub fn normal_form_poly(field: &Field, n: u32, rank: u32, tag: QfTag) -> Poly {
    normal_form(field, n, rank, tag).to_poly()
}

fn swap_basis(s: &mut Matrix, b: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    s.swap(i, j);
    for row in s.iter_mut() {
        row.swap(i, j);
    }
    for row in b.iter_mut() {
        row.swap(i, j);
    }
}

/// Basis column op b_i += f * b_j, with the Gram matrix updated to match.
fn add_basis(s: &mut Matrix, b: &mut Matrix, i: usize, j: usize, f: &FqElement) {
    let n = s.len();
    for r in 0..n {
        let t = b[r][j].mul(f);
        b[r][i] = b[r][i].add(&t);
    }
    // row and column i of S pick up f * (row/col j)
    for cidx in 0..n {
        let t = s[j][cidx].mul(f);
        s[i][cidx] = s[i][cidx].add(&t);
    }
    for ridx in 0..n {
        let t = s[ridx][j].mul(f);
        s[ridx][i] = s[ridx][i].add(&t);
    }
}


#[cfg(test)]
mod extension_minimality_tests {
    use super::*;
    use crate::poly::{parse_poly, VarTable};

    /// The extension degree is the smallest m over which reduction succeeds:
    /// checked exhaustively against brute-force base-field equivalence for
    /// n = 2 over F_3 and F_5.
    #[test]
    fn odd_extension_degree_is_minimal() {
        for p in [3u64, 5] {
            let field = Field::new(p, 1).unwrap();
            // all invertible 2x2 matrices
            let mut gl = Vec::new();
            let q = field.order();
            for idx in 0..q.pow(4) {
                let mut rest = idx;
                let m: Matrix = (0..2)
                    .map(|_| {
                        (0..2)
                            .map(|_| {
                                let v = field.from_index(rest % q);
                                rest /= q;
                                v
                            })
                            .collect()
                    })
                    .collect();
                if linalg::invert(&m, &field).is_ok() {
                    gl.push(m);
                }
            }
            // forms of full polar rank 2
            let vars = VarTable::xs(2);
            let all: Vec<QuadraticForm> = {
                let mut v = Vec::new();
                for a in 0..q {
                    for b in 0..q {
                        for c in 0..q {
                            let mut qf = QuadraticForm::new(&field, 2);
                            qf.set(0, 0, field.from_index(a));
                            qf.set(0, 1, field.from_index(b));
                            qf.set(1, 1, field.from_index(c));
                            v.push(qf);
                        }
                    }
                }
                v
            };
            let q0 = QuadraticForm::from_poly(
                &parse_poly("x1^2 + x2^2", &vars, &field).unwrap(),
            );
            for qf in &all {
                if qf.polar_rank() != 2 {
                    continue;
                }
                let base_equivalent = gl.iter().any(|g| qf.apply_matrix(g).equals(&q0));
                let nf = qf.classify(true).unwrap();
                assert_eq!(
                    nf.extension_degree == 1,
                    base_equivalent,
                    "form over F_{p} misclassified"
                );
            }
        }
    }

    /// And likewise in characteristic 2 for the nondegenerate rank-2 forms.
    #[test]
    fn char2_extension_degree_is_minimal() {
        let field = Field::new(2, 2).unwrap();
        let q = field.order();
        let mut gl = Vec::new();
        for idx in 0..q.pow(4) {
            let mut rest = idx;
            let m: Matrix = (0..2)
                .map(|_| {
                    (0..2)
                        .map(|_| {
                            let v = field.from_index(rest % q);
                            rest /= q;
                            v
                        })
                        .collect()
                })
                .collect();
            if linalg::invert(&m, &field).is_ok() {
                gl.push(m);
            }
        }
        let hyperbolic = normal_form(&field, 2, 2, QfTag::Symplectic);
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let mut qf = QuadraticForm::new(&field, 2);
                    qf.set(0, 0, field.from_index(a));
                    qf.set(0, 1, field.from_index(b));
                    qf.set(1, 1, field.from_index(c));
                    if qf.polar_rank() != 2 {
                        continue;
                    }
                    let split_here = gl.iter().any(|g| qf.apply_matrix(g).equals(&hyperbolic));
                    let nf = qf.classify(true).unwrap();
                    assert_eq!(nf.extension_degree == 1, split_here);
                }
            }
        }
    }
}
