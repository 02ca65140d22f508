//! Univariate polynomial arithmetic used internally by the field layer:
//! dense polynomials over F_p for modulus selection, and dense polynomials
//! with `FqElement` coefficients for root finding in extension fields.

use super::{Field, FqElement};

// ---------------------------------------------------------------------------
// Polynomials over the prime field, represented as coefficient vectors
// (index = degree), always normalized so the last entry is nonzero.
// ---------------------------------------------------------------------------

pub(super) fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(super) fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo monic `m`.
pub(super) fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &c) in m.iter().enumerate() {
                let idx = j + shift;
                r[idx] = (r[idx] + (p - lead % p) * c) % p;
            }
        }
        r.pop();
        r = trim(r);
        if r.len() <= dm {
            break;
        }
    }
    trim(r)
}

fn pgcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    while !b.is_empty() {
        let monic = make_monic(b.clone(), p);
        let r = prem(&a, &monic, p);
        a = monic;
        b = r;
    }
    a
}

fn make_monic(v: Vec<u64>, p: u64) -> Vec<u64> {
    let lead = *v.last().unwrap();
    if lead == 1 {
        return v;
    }
    let inv = mod_inv(lead, p);
    v.into_iter().map(|c| c * inv % p).collect()
}

pub(super) fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid on i128 to dodge sign juggling
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "not invertible");
    (t.rem_euclid(p as i128)) as u64
}

/// x^(p^e) mod m, by repeated p-th powering.
fn frob_pow(m: &[u64], p: u64, e: u32) -> Vec<u64> {
    let mut x = prem(&[0, 1], m, p);
    for _ in 0..e {
        x = ppow_u64(&x, p, m, p);
    }
    x
}

fn ppow_u64(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), m, p);
        }
        b = prem(&pmul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

/// Rabin irreducibility test for a monic polynomial of degree k over F_p.
pub(super) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = (f.len() - 1) as u32;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    // x^(p^k) == x mod f
    let xqk = frob_pow(f, p, k);
    if trim_eq(&xqk, &[0, 1]) == false {
        return false;
    }
    // gcd(x^(p^(k/l)) - x, f) == 1 for every prime l | k
    let mut rem = k;
    let mut l = 2;
    let mut prime_divs = Vec::new();
    while l * l <= rem {
        if rem % l == 0 {
            prime_divs.push(l);
            while rem % l == 0 {
                rem /= l;
            }
        }
        l += 1;
    }
    if rem > 1 {
        prime_divs.push(rem);
    }
    for l in prime_divs {
        let mut h = frob_pow(f, p, k / l);
        // h - x
        if h.len() < 2 {
            h.resize(2, 0);
        }
        h[1] = (h[1] + p - 1) % p;
        let h = trim(h);
        let g = pgcd(f.to_vec(), h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn trim_eq(a: &[u64], b: &[u64]) -> bool {
    trim(a.to_vec()) == trim(b.to_vec())
}

/// The canonical modulus for F_{p^k}: the monic irreducible of degree k whose
/// coefficient vector (c_0, .., c_{k-1}) is lexicographically least.
pub(super) fn canonical_modulus(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let mut low = vec![0u64; k];
    loop {
        let mut f = low.clone();
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
        // next vector in lex order: last coordinate fastest
        let mut i = k;
        loop {
            debug_assert!(i > 0, "no irreducible of degree {k} found");
            i -= 1;
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomials with coefficients in an extension field, for locating the
// roots of the base modulus inside a bigger field.
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub(super) struct FPoly {
    pub field: Field,
    /// index = degree, last entry nonzero (empty = zero polynomial)
    pub c: Vec<FqElement>,
}

impl FPoly {
    fn trim(mut self) -> Self {
        while self.c.last().map(|x| x.is_zero()) == Some(true) {
            self.c.pop();
        }
        self
    }

    pub fn from_coeffs(field: &Field, c: Vec<FqElement>) -> Self {
        FPoly { field: field.clone(), c }.trim()
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return FPoly { field: self.field.clone(), c: Vec::new() };
        }
        let mut out = vec![self.field.zero(); self.c.len() + other.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        FPoly { field: self.field.clone(), c: out }.trim()
    }

    /// Remainder modulo a monic polynomial.
    fn rem(&self, m: &Self) -> Self {
        let dm = m.deg();
        let mut r = self.clone();
        while !r.is_zero() && r.deg() >= dm && r.c.len() >= m.c.len() {
            let lead = r.c.last().unwrap().clone();
            let shift = r.c.len() - m.c.len();
            for (j, mc) in m.c.iter().enumerate() {
                r.c[j + shift] = r.c[j + shift].sub(&lead.mul(mc));
            }
            r = r.trim();
        }
        r
    }

    fn make_monic(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let inv = self.c.last().unwrap().inv().expect("nonzero lead");
        let c = self.c.iter().map(|x| x.mul(&inv)).collect();
        FPoly { field: self.field, c }
    }

    fn gcd(a: Self, b: Self) -> Self {
        let (mut a, mut b) = (a, b);
        while !b.is_zero() {
            let monic = b.clone().make_monic();
            let r = a.rem(&monic);
            a = monic;
            b = r;
        }
        a.make_monic()
    }

    fn pow_mod(&self, mut exp: u64, m: &Self) -> Self {
        let mut acc = FPoly::from_coeffs(&self.field, vec![self.field.one()]);
        let mut base = self.rem(m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            exp >>= 1;
        }
        acc
    }
}

/// All roots in `field` of a squarefree monic polynomial that is known to
/// split there. Deterministic: the shift elements are drawn from the field's
/// canonical enumeration.
pub(super) fn roots_in_field(field: &Field, poly: &FPoly) -> Vec<FqElement> {
    let mut roots = Vec::new();
    let mut stack = vec![poly.clone().make_monic()];
    let p = field.characteristic();
    let order = field.order();
    'outer: while let Some(g) = stack.pop() {
        if g.deg() == 0 {
            continue;
        }
        if g.deg() == 1 {
            roots.push(g.c[0].neg());
            continue;
        }
        for delta in field.enumerate() {
            let splitter = if p == 2 {
                // trace polynomial of delta * x
                let bits = 63 - order.leading_zeros() as u32; // order = 2^bits
                let x = FPoly::from_coeffs(field, vec![field.zero(), delta.clone()]);
                let mut term = x.rem(&g);
                let mut acc = term.clone();
                for _ in 1..bits {
                    term = term.mul(&term).rem(&g);
                    acc = add_fpoly(&acc, &term);
                }
                acc
            } else {
                // (x + delta)^((q-1)/2) - 1
                let x_shift = FPoly::from_coeffs(field, vec![delta.clone(), field.one()]);
                let h = x_shift.pow_mod((order - 1) / 2, &g);
                let mut c = h.c.clone();
                if c.is_empty() {
                    c.push(field.zero());
                }
                c[0] = c[0].sub(&field.one());
                FPoly::from_coeffs(field, c)
            };
            let d = FPoly::gcd(g.clone(), splitter);
            if d.deg() > 0 && d.deg() < g.deg() {
                let q = divide_exact(&g, &d);
                stack.push(d);
                stack.push(q);
                continue 'outer;
            }
        }
        unreachable!("split search exhausted the field");
    }
    roots
}

fn add_fpoly(a: &FPoly, b: &FPoly) -> FPoly {
    let n = a.c.len().max(b.c.len());
    let mut c = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.c.get(i).cloned().unwrap_or_else(|| a.field.zero());
        let y = b.c.get(i).cloned().unwrap_or_else(|| a.field.zero());
        c.push(x.add(&y));
    }
    FPoly::from_coeffs(&a.field, c)
}

fn divide_exact(a: &FPoly, b: &FPoly) -> FPoly {
    // long division, remainder known to vanish
    let mut r = a.clone();
    let mut q = vec![a.field.zero(); a.deg() - b.deg() + 1];
    let lead_inv = b.c.last().unwrap().inv().expect("monic-ish divisor");
    while !r.is_zero() && r.deg() >= b.deg() {
        let shift = r.c.len() - b.c.len();
        let coef = r.c.last().unwrap().mul(&lead_inv);
        q[shift] = coef.clone();
        for (j, bc) in b.c.iter().enumerate() {
            r.c[j + shift] = r.c[j + shift].sub(&coef.mul(bc));
        }
        r = r.trim();
    }
    FPoly::from_coeffs(&a.field, q)
}
