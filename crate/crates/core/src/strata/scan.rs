//! Exhaustive point-scan engine. Field elements are u16 indices into
//! precomputed addition/multiplication tables, gradients are evaluated
//! incrementally (Horner in the fastest-moving coordinate, coefficient
//! refresh when the prefix changes), and the full symbol computation runs
//! only at points where the Jacobian drops rank, which are rare.
//!
//! The parallel path splits on the first coordinate; tallies merge by
//! addition, so results are independent of the thread count.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ffield::{Embedding, Field};
use crate::strata::Section;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest field size we build full tables for; bigger scans take the
/// generic exact path.
const TABLE_LIMIT: u64 = 4096;

pub type Tally = BTreeMap<(u32, u32), u64>;

/// Largest M >= 1 with q^(M n) <= budget, or 0 when even M = 1 blows it.
pub fn max_extension_within(q: u64, n: u32, budget: u64) -> u32 {
    let mut m = 0u32;
    loop {
        let next = (m + 1) as u64 * n as u64;
        let points = (q as u128).checked_pow(next as u32);
        match points {
            Some(p) if p <= budget as u128 => m += 1,
            _ => return m,
        }
    }
}

struct ScanField {
    size: usize,
    /// table index of the multiplicative identity (p^(k-1), not 1)
    one: u16,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl ScanField {
    fn build(field: &Field) -> ScanField {
        let q = field.order();
        let size = q as usize;
        let p = field.characteristic();
        let k = field.extension_degree() as usize;
        let modulus = field.modulus().to_vec();
        // decode every index into digits (digit i = coefficient of w^i)
        let mut digits = vec![0u64; size * k];
        for idx in 0..size {
            let mut rest = idx as u64;
            for i in (0..k).rev() {
                digits[idx * k + i] = rest % p;
                rest /= p;
            }
        }
        let encode = |c: &[u64]| -> u16 {
            let mut idx = 0u64;
            for &d in c.iter().take(k) {
                idx = idx * p + d;
            }
            idx as u16
        };
        let mut add = vec![0u16; size * size];
        let mut mul = vec![0u16; size * size];
        let mut buf = vec![0u64; 2 * k];
        let mut red = vec![0u64; k];
        for a in 0..size {
            let da = &digits[a * k..a * k + k];
            for b in 0..size {
                let db = &digits[b * k..b * k + k];
                // addition: digit-wise
                for i in 0..k {
                    red[i] = (da[i] + db[i]) % p;
                }
                add[a * size + b] = encode(&red);
                // multiplication: convolution then reduction by the modulus
                buf.iter_mut().for_each(|x| *x = 0);
                for i in 0..k {
                    if da[i] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        buf[i + j] = (buf[i + j] + da[i] * db[j]) % p;
                    }
                }
                for d in (k..2 * k - 1).rev() {
                    let lead = buf[d];
                    if lead != 0 {
                        buf[d] = 0;
                        for (j, &mc) in modulus.iter().enumerate().take(k) {
                            let t = d - k + j;
                            buf[t] = (buf[t] + (p - mc % p) * lead) % p;
                        }
                    }
                }
                red.copy_from_slice(&buf[..k]);
                mul[a * size + b] = encode(&red);
            }
        }
        let one = p.pow(k as u32 - 1) as u16;
        let mut neg = vec![0u16; size];
        let mut inv = vec![0u16; size];
        for idx in 0..size {
            for i in 0..k {
                red[i] = (p - digits[idx * k + i]) % p;
            }
            neg[idx] = encode(&red);
            if idx != 0 {
                inv[idx] = pow_tab(&mul, size, one, idx as u16, q - 2);
            }
        }
        ScanField { size, one, add, mul, neg, inv }
    }

    #[inline(always)]
    fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.size + b as usize]
    }

    #[inline(always)]
    fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.size + b as usize]
    }

    #[inline(always)]
    fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg[b as usize])
    }
}

fn pow_tab(mul: &[u16], size: usize, one: u16, base: u16, mut e: u64) -> u16 {
    let mut acc = one;
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul[acc as usize * size + b as usize];
        }
        b = mul[b as usize * size + b as usize];
        e >>= 1;
    }
    acc
}

/// Sparse polynomial with table-indexed coefficients.
#[derive(Clone)]
struct CompiledPoly {
    terms: Vec<(u16, Vec<u8>)>,
}

impl CompiledPoly {
    fn compile(p: &crate::poly::Poly, target: &Field) -> CompiledPoly {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let idx = target.index_of(c) as u16;
                (idx, m.exps().iter().map(|&e| e as u8).collect())
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, sf: &ScanField, pows: &PowTable, coords: &[u16]) -> u16 {
        let mut acc = 0u16;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = sf.mul(t, pows.get(coords[v], e));
                }
            }
            acc = sf.add(acc, t);
        }
        acc
    }
}

struct PowTable {
    dmax: usize,
    table: Vec<u16>,
}

impl PowTable {
    fn build(sf: &ScanField, dmax: usize) -> PowTable {
        let mut table = vec![0u16; sf.size * (dmax + 1)];
        for v in 0..sf.size {
            table[v * (dmax + 1)] = sf.one;
            for e in 1..=dmax {
                table[v * (dmax + 1) + e] = sf.mul(table[v * (dmax + 1) + e - 1], v as u16);
            }
        }
        PowTable { dmax, table }
    }

    #[inline(always)]
    fn get(&self, v: u16, e: u8) -> u16 {
        self.table[v as usize * (self.dmax + 1) + e as usize]
    }
}

/// A polynomial split for incremental evaluation: terms grouped by the
/// exponent of the last variable, prefix exponents kept separately.
struct LastVarPoly {
    by_exp: Vec<Vec<(u16, Vec<u8>)>>,
}

impl LastVarPoly {
    fn compile(p: &crate::poly::Poly, target: &Field, nvars: usize) -> LastVarPoly {
        let mut by_exp: Vec<Vec<(u16, Vec<u8>)>> = Vec::new();
        for (m, c) in p.terms() {
            let exps = m.exps();
            let last = if nvars == 0 { 0 } else { exps[nvars - 1] as usize };
            if by_exp.len() <= last {
                by_exp.resize_with(last + 1, Vec::new);
            }
            let prefix: Vec<u8> = exps[..nvars.saturating_sub(1)].iter().map(|&e| e as u8).collect();
            by_exp[last].push((target.index_of(c) as u16, prefix));
        }
        if by_exp.is_empty() {
            by_exp.push(Vec::new());
        }
        LastVarPoly { by_exp }
    }

    /// Coefficients of the univariate in the last variable at this prefix.
    fn refresh(&self, sf: &ScanField, pows: &PowTable, prefix: &[u16], out: &mut Vec<u16>) {
        out.clear();
        for bucket in &self.by_exp {
            let mut acc = 0u16;
            for (c, exps) in bucket {
                let mut t = *c;
                for (v, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        t = sf.mul(t, pows.get(prefix[v], e));
                    }
                }
                acc = sf.add(acc, t);
            }
            out.push(acc);
        }
    }
}

struct ScanCtx {
    sf: ScanField,
    pows: PowTable,
    nvars: usize,
    ncomp: usize,
    m_rank: u32,
    gradients: Vec<LastVarPoly>,
    hessians: Vec<CompiledPoly>,
}

impl ScanCtx {
    fn build(section: &Section, m: u32) -> Result<ScanCtx> {
        let emb = Embedding::new(section.field(), m)?;
        let big = section.embed(&emb);
        let target = emb.target().clone();
        let sf = ScanField::build(&target);
        let dmax = big
            .polys()
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap_or(0)
            .max(1) as usize;
        let pows = PowTable::build(&sf, dmax);
        let nvars = big.nvars() as usize;
        let ncomp = big.ncomponents() as usize;
        let mut gradients = Vec::with_capacity(ncomp * nvars);
        for f in big.polys() {
            for b in 0..nvars {
                gradients.push(LastVarPoly::compile(&f.partial(b), &target, nvars));
            }
        }
        let mut hessians = Vec::with_capacity(ncomp * nvars * nvars);
        for f in big.polys() {
            for a in 0..nvars {
                let fa = f.partial(a);
                for b in 0..nvars {
                    hessians.push(CompiledPoly::compile(&fa.partial(b), &target));
                }
            }
        }
        Ok(ScanCtx {
            sf,
            pows,
            nvars,
            ncomp,
            m_rank: big.nvars().min(big.ncomponents()),
            gradients,
            hessians,
        })
    }

    /// Scan all points with the given first coordinate.
    fn scan_slice(&self, first: u16) -> Tally {
        let mut tally = Tally::new();
        let n = self.nvars;
        let q = self.sf.size as u16;
        let mut coords = vec![0u16; n];
        coords[0] = first;
        let mut uni: Vec<Vec<u16>> = vec![Vec::new(); self.gradients.len()];
        let mut jac = vec![0u16; self.ncomp * n];

        if n == 1 {
            self.refresh_all(&coords, &mut uni);
            self.scan_point(&mut coords, first, &uni, &mut jac, &mut tally);
            return tally;
        }

        // odometer over coords[1..n-1], innermost loop over coords[n-1]
        let mid = &mut vec![0u16; n - 2][..];
        loop {
            for (d, &v) in mid.iter().enumerate() {
                coords[1 + d] = v;
            }
            self.refresh_all(&coords, &mut uni);
            for x in 0..q {
                self.scan_point(&mut coords, x, &uni, &mut jac, &mut tally);
            }
            // advance the middle odometer
            let mut d = mid.len();
            loop {
                if d == 0 {
                    return tally;
                }
                d -= 1;
                mid[d] += 1;
                if mid[d] < q {
                    break;
                }
                mid[d] = 0;
            }
        }
    }

    fn refresh_all(&self, coords: &[u16], uni: &mut [Vec<u16>]) {
        let prefix = &coords[..self.nvars - 1];
        for (g, u) in self.gradients.iter().zip(uni.iter_mut()) {
            g.refresh(&self.sf, &self.pows, prefix, u);
        }
    }

    #[inline]
    fn scan_point(
        &self,
        coords: &mut [u16],
        x: u16,
        uni: &[Vec<u16>],
        jac: &mut [u16],
        tally: &mut Tally,
    ) {
        coords[self.nvars - 1] = x;
        let sf = &self.sf;
        for (g, u) in uni.iter().enumerate() {
            let mut acc = *u.last().unwrap();
            for e in (0..u.len() - 1).rev() {
                acc = sf.add(sf.mul(acc, x), u[e]);
            }
            jac[g] = acc;
        }
        let rank = rank_tab(sf, jac, self.ncomp, self.nvars);
        let i = self.m_rank - rank as u32;
        let key = if i == 0 { (0, 0) } else { self.full_symbol(coords, jac, i) };
        *tally.entry(key).or_insert(0) += 1;
    }

    /// Kernel/cokernel linear algebra at a degenerate point.
    fn full_symbol(&self, coords: &[u16], jac: &[u16], i: u32) -> (u32, u32) {
        let sf = &self.sf;
        let (e, n) = (self.ncomp, self.nvars);
        let mat: Vec<Vec<u16>> = (0..e).map(|r| jac[r * n..(r + 1) * n].to_vec()).collect();
        let kernel = kernel_tab(sf, &mat, n);
        let coker = CokerTab::build(sf, &mat, e);
        let kdim = kernel.len();
        let cdim = coker.complement.len();
        if kdim == 0 || cdim == 0 {
            return (i, 0);
        }
        // Hessian values on the kernel, projected to the cokernel
        let hvals: Vec<u16> = self
            .hessians
            .iter()
            .map(|h| h.eval(sf, &self.pows, coords))
            .collect();
        let mut rows = Vec::with_capacity(kdim);
        for u in &kernel {
            let mut row = Vec::with_capacity(kdim * cdim);
            for v in &kernel {
                let mut w = Vec::with_capacity(e);
                for l in 0..e {
                    let mut acc = 0u16;
                    for a in 0..n {
                        if u[a] == 0 {
                            continue;
                        }
                        let mut part = 0u16;
                        for b in 0..n {
                            if v[b] == 0 {
                                continue;
                            }
                            part = sf.add(part, sf.mul(hvals[l * n * n + a * n + b], v[b]));
                        }
                        acc = sf.add(acc, sf.mul(u[a], part));
                    }
                    w.push(acc);
                }
                row.extend(coker.project(sf, &w));
            }
            rows.push(row);
        }
        let rank2 = rank_rows_tab(sf, &mut rows);
        (i, kdim as u32 - rank2 as u32)
    }
}

fn rank_tab(sf: &ScanField, vals: &[u16], rows: usize, cols: usize) -> usize {
    let mut m: Vec<Vec<u16>> = (0..rows).map(|r| vals[r * cols..(r + 1) * cols].to_vec()).collect();
    rank_rows_tab(sf, &mut m)
}

fn rank_rows_tab(sf: &ScanField, m: &mut Vec<Vec<u16>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = sf.inv[m[r][c] as usize];
        for j in c..cols {
            m[r][j] = sf.mul(m[r][j], inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in c..cols {
                    let t = sf.mul(f, m[r][j]);
                    m[i][j] = sf.sub(m[i][j], t);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn kernel_tab(sf: &ScanField, m: &[Vec<u16>], cols: usize) -> Vec<Vec<u16>> {
    let mut red: Vec<Vec<u16>> = m.to_vec();
    let rows = red.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| red[i][c] != 0) else { continue };
        red.swap(r, pr);
        let inv = sf.inv[red[r][c] as usize];
        for j in 0..cols {
            red[r][j] = sf.mul(red[r][j], inv);
        }
        for i in 0..rows {
            if i != r && red[i][c] != 0 {
                let f = red[i][c];
                for j in 0..cols {
                    let t = sf.mul(f, red[r][j]);
                    red[i][j] = sf.sub(red[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for fc in 0..cols {
        if pivots.contains(&fc) {
            continue;
        }
        let mut v = vec![0u16; cols];
        v[fc] = sf.one;
        for (rr, &pc) in pivots.iter().enumerate() {
            v[pc] = sf.neg[red[rr][fc] as usize];
        }
        basis.push(v);
    }
    basis
}

struct CokerTab {
    red: Vec<Vec<u16>>,
    pivots: Vec<usize>,
    complement: Vec<usize>,
}

impl CokerTab {
    fn build(sf: &ScanField, m: &[Vec<u16>], target_dim: usize) -> CokerTab {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut t: Vec<Vec<u16>> = (0..cols).map(|j| (0..target_dim).map(|i| m[i][j]).collect()).collect();
        let trows = t.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..target_dim {
            let Some(pr) = (r..trows).find(|&i| t[i][c] != 0) else { continue };
            t.swap(r, pr);
            let inv = sf.inv[t[r][c] as usize];
            for j in 0..target_dim {
                t[r][j] = sf.mul(t[r][j], inv);
            }
            for i in 0..trows {
                if i != r && t[i][c] != 0 {
                    let f = t[i][c];
                    for j in 0..target_dim {
                        let tt = sf.mul(f, t[r][j]);
                        t[i][j] = sf.sub(t[i][j], tt);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let complement = (0..target_dim).filter(|c| !pivots.contains(c)).collect();
        CokerTab { red: t, pivots, complement }
    }

    fn project(&self, sf: &ScanField, v: &[u16]) -> Vec<u16> {
        let mut v = v.to_vec();
        for (r, &c) in self.pivots.iter().enumerate() {
            if v[c] != 0 {
                let f = v[c];
                for j in 0..v.len() {
                    let t = sf.mul(f, self.red[r][j]);
                    v[j] = sf.sub(v[j], t);
                }
            }
        }
        self.complement.iter().map(|&c| v[c]).collect()
    }
}

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// One extension level of a scan, through the fast engine when the field
/// fits in the tables.
pub(super) fn scan_level(s: &Section, m: u32, budget: u64) -> Result<Tally> {
    let q = s.field().order();
    let order = (q as u128).pow(m);
    let points = order.pow(s.nvars());
    if points > budget as u128 {
        return Err(Error::BudgetExceeded { needed: points, budget });
    }
    if order > TABLE_LIMIT as u128 {
        return super::scan_level_naive(s, m);
    }
    let ctx = ScanCtx::build(s, m)?;
    let size = ctx.sf.size as u16;
    Ok(run_slices(&ctx, size))
}

/// Sequential variant regardless of the `parallel` feature, for the bench
/// suite and for differential tests.
pub fn scan_level_sequential(s: &Section, m: u32, budget: u64) -> Result<Tally> {
    let q = s.field().order();
    let order = (q as u128).pow(m);
    let points = order.pow(s.nvars());
    if points > budget as u128 {
        return Err(Error::BudgetExceeded { needed: points, budget });
    }
    if order > TABLE_LIMIT as u128 {
        return super::scan_level_naive(s, m);
    }
    let ctx = ScanCtx::build(s, m)?;
    let size = ctx.sf.size as u16;
    Ok((0..size).map(|first| ctx.scan_slice(first)).fold(Tally::new(), merge))
}

#[cfg(feature = "parallel")]
fn run_slices(ctx: &ScanCtx, size: u16) -> Tally {
    (0..size)
        .into_par_iter()
        .map(|first| ctx.scan_slice(first))
        .reduce(Tally::new, merge)
}

#[cfg(not(feature = "parallel"))]
fn run_slices(ctx: &ScanCtx, size: u16) -> Tally {
    (0..size).map(|first| ctx.scan_slice(first)).fold(Tally::new(), merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_exact_arithmetic() {
        for (p, k) in [(2u64, 1u32), (5, 1), (2, 2), (3, 2), (2, 3)] {
            let field = Field::new(p, k).unwrap();
            let sf = ScanField::build(&field);
            let els: Vec<_> = field.enumerate().collect();
            for (i, a) in els.iter().enumerate() {
                for (j, b) in els.iter().enumerate() {
                    let add = field.index_of(&a.add(b)) as u16;
                    let mul = field.index_of(&a.mul(b)) as u16;
                    assert_eq!(sf.add(i as u16, j as u16), add, "add {i}+{j} in F_{}", field.literal());
                    assert_eq!(sf.mul(i as u16, j as u16), mul, "mul {i}*{j} in F_{}", field.literal());
                }
                if i != 0 {
                    let inv = field.index_of(&a.inv().unwrap()) as u16;
                    assert_eq!(sf.inv[i], inv);
                }
                let neg = field.index_of(&a.neg()) as u16;
                assert_eq!(sf.neg[i], neg);
            }
        }
    }
}
