//! Exact arithmetic in F_p and F_{p^k}.
//!
//! Every field is represented by its canonical [`FieldSpec`]: the modulus is
//! the monic irreducible of degree k over F_p whose coefficient vector is
//! lexicographically least. This makes serialized elements stable across runs
//! and platforms, which the golden tests rely on.

mod upoly;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Hard cap on field size; scans refuse to enumerate beyond their own budget
/// long before this, but the constructor enforces a sane bound regardless.
pub const MAX_FIELD_BITS: u32 = 40;

/// The canonical description of F_{p^k}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    k: u32,
    /// monic, degree k, coefficient `modulus[i]` on x^i
    modulus: Vec<u64>,
}

/// Cheap-to-clone handle on a [`FieldSpec`].
#[derive(Clone)]
pub struct Field(Arc<FieldSpec>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.k == other.0.k)
    }
}
impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.k).hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.literal())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// F_{p^k} under the canonical modulus.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::BadExtensionDegree);
        }
        let bits = (k as f64) * (p as f64).log2();
        if bits > MAX_FIELD_BITS as f64 + 1e-9 {
            return Err(Error::FieldTooLarge { p, k });
        }
        let modulus = upoly::canonical_modulus(p, k);
        Ok(Field(Arc::new(FieldSpec { p, k, modulus })))
    }

    /// Parse a field literal of the form `p` or `p^k`.
    pub fn from_literal(s: &str) -> Result<Field> {
        let (p, k) = match s.split_once('^') {
            None => (s.trim().parse::<u64>().map_err(|_| bad_literal(s))?, 1),
            Some((a, b)) => (
                a.trim().parse::<u64>().map_err(|_| bad_literal(s))?,
                b.trim().parse::<u32>().map_err(|_| bad_literal(s))?,
            ),
        };
        Field::new(p, k)
    }

    pub fn literal(&self) -> String {
        if self.0.k == 1 {
            format!("{}", self.0.p)
        } else {
            format!("{}^{}", self.0.p, self.0.k)
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.0.k
    }

    /// q = p^k.
    pub fn order(&self) -> u64 {
        self.0.p.pow(self.0.k)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FqElement {
        FqElement { field: self.clone(), c: vec![0; self.0.k as usize] }
    }

    pub fn one(&self) -> FqElement {
        self.from_u64(1)
    }

    /// The residue of an integer, embedded via the prime subfield.
    pub fn from_u64(&self, n: u64) -> FqElement {
        let mut c = vec![0; self.0.k as usize];
        c[0] = n % self.0.p;
        FqElement { field: self.clone(), c }
    }

    /// The class of x modulo the defining polynomial (only interesting for k >= 2).
    pub fn gen(&self) -> FqElement {
        if self.0.k == 1 {
            return self.zero();
        }
        let mut c = vec![0; self.0.k as usize];
        c[1] = 1;
        FqElement { field: self.clone(), c }
    }

    /// Build an element from residues on the power basis 1, w, .., w^{k-1}.
    pub fn elem(&self, coeffs: &[u64]) -> FqElement {
        let mut c = vec![0; self.0.k as usize];
        for (i, &x) in coeffs.iter().enumerate().take(self.0.k as usize) {
            c[i] = x % self.0.p;
        }
        FqElement { field: self.clone(), c }
    }

    /// Index of an element in the canonical enumeration (lex order on the
    /// coefficient vector, c_0 most significant).
    pub fn index_of(&self, a: &FqElement) -> u64 {
        let mut idx = 0u64;
        for &c in &a.c {
            idx = idx * self.0.p + c;
        }
        idx
    }

    pub fn from_index(&self, mut idx: u64) -> FqElement {
        let k = self.0.k as usize;
        let mut c = vec![0; k];
        for i in (0..k).rev() {
            c[i] = idx % self.0.p;
            idx /= self.0.p;
        }
        FqElement { field: self.clone(), c }
    }

    /// All q elements, in canonical order.
    pub fn enumerate(&self) -> impl Iterator<Item = FqElement> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// Absolute trace down to F_p, returned as a residue.
    pub fn abs_trace(&self, a: &FqElement) -> u64 {
        let mut acc = self.zero();
        let mut x = a.clone();
        for _ in 0..self.0.k {
            acc = acc.add(&x);
            x = x.pow(self.0.p);
        }
        debug_assert!(acc.c[1..].iter().all(|&c| c == 0));
        acc.c[0]
    }

    /// Canonical square root: the root whose coefficient vector is lex-least,
    /// or None for a non-residue (odd q). In characteristic 2 every element
    /// has exactly one root.
    pub fn sqrt(&self, a: &FqElement) -> Option<FqElement> {
        assert_eq!(a.field, *self, "sqrt over a foreign field");
        let q = self.order();
        if a.is_zero() {
            return Some(self.zero());
        }
        if self.0.p == 2 {
            let mut r = a.clone();
            let bits = 63 - q.leading_zeros() as u32;
            for _ in 0..bits - 1 {
                r = r.mul(&r);
            }
            debug_assert_eq!(r.mul(&r), *a);
            return Some(r);
        }
        if a.pow((q - 1) / 2) != self.one() {
            return None;
        }
        let r = self.tonelli_shanks(a);
        let other = r.neg();
        let canon = if self.index_of(&r) <= self.index_of(&other) { r } else { other };
        Some(canon)
    }

    fn tonelli_shanks(&self, a: &FqElement) -> FqElement {
        let q = self.order();
        let mut t = q - 1;
        let mut s = 0u32;
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        // deterministic non-residue
        let z = self
            .enumerate()
            .find(|x| !x.is_zero() && x.pow((q - 1) / 2) != self.one())
            .expect("non-residue exists in odd characteristic");
        let mut m = s;
        let mut c = z.pow(t);
        let mut u = a.pow(t);
        let mut r = a.pow((t + 1) / 2);
        while u != self.one() {
            let mut i = 0u32;
            let mut probe = u.clone();
            while probe != self.one() {
                probe = probe.mul(&probe);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..m - i - 1 {
                b = b.mul(&b);
            }
            m = i;
            c = b.mul(&b);
            u = u.mul(&c);
            r = r.mul(&b);
        }
        r
    }

    /// Canonical solution of t^2 + t = c over F_{2^k}, or None when the
    /// absolute trace of c is 1. Requires characteristic 2.
    pub fn artin_schreier(&self, c: &FqElement) -> Option<FqElement> {
        assert_eq!(self.0.p, 2, "Artin-Schreier solving requires characteristic 2");
        assert_eq!(c.field, *self);
        let k = self.0.k as usize;
        // t -> t^2 + t is F_2-linear; solve by elimination on the power basis
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let mut v = vec![0u64; k];
            v[j] = 1;
            let wj = self.elem(&v);
            cols.push(wj.mul(&wj).add(&wj).c);
        }
        // augmented system rows over F_2
        let mut rows = vec![vec![0u64; k + 1]; k];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..k {
                rows[i][j] = col[i];
            }
        }
        for i in 0..k {
            rows[i][k] = c.c[i];
        }
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..k {
            if let Some(pr) = (r..k).find(|&i| rows[i][col] == 1) {
                rows.swap(r, pr);
                for i in 0..k {
                    if i != r && rows[i][col] == 1 {
                        for j in 0..=k {
                            rows[i][j] ^= rows[r][j];
                        }
                    }
                }
                pivots.push(col);
                r += 1;
            }
        }
        for row in rows.iter().skip(r) {
            if row[k] == 1 {
                debug_assert_eq!(self.abs_trace(c), 1);
                return None;
            }
        }
        let mut t = vec![0u64; k];
        for (rr, &col) in pivots.iter().enumerate() {
            t[col] = rows[rr][k];
        }
        let t0 = self.elem(&t);
        let t1 = t0.add(&self.one());
        debug_assert_eq!(t0.mul(&t0).add(&t0), *c);
        Some(if self.index_of(&t0) <= self.index_of(&t1) { t0 } else { t1 })
    }
}

/// An exact element of F_{p^k}: residues on the power basis of the canonical
/// modulus root w.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqElement {
    field: Field,
    c: Vec<u64>,
}

impl FqElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Err when the operands live in different fields.
    pub fn same_field(&self, other: &FqElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn assert_same(&self, other: &FqElement) {
        assert!(self.field == other.field, "operands belong to different fields");
    }

    pub fn add(&self, other: &FqElement) -> FqElement {
        self.assert_same(other);
        let p = self.field.0.p;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| (a + b) % p).collect();
        FqElement { field: self.field.clone(), c }
    }

    pub fn sub(&self, other: &FqElement) -> FqElement {
        self.assert_same(other);
        let p = self.field.0.p;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| (a + p - b) % p).collect();
        FqElement { field: self.field.clone(), c }
    }

    pub fn neg(&self) -> FqElement {
        let p = self.field.0.p;
        let c = self.c.iter().map(|&a| (p - a) % p).collect();
        FqElement { field: self.field.clone(), c }
    }

    pub fn mul(&self, other: &FqElement) -> FqElement {
        self.assert_same(other);
        let spec = &*self.field.0;
        let prod = upoly::pmul(&self.c, &other.c, spec.p);
        let red = upoly::prem(&prod, &spec.modulus, spec.p);
        let mut c = vec![0; spec.k as usize];
        c[..red.len()].copy_from_slice(&red);
        FqElement { field: self.field.clone(), c }
    }

    pub fn scale(&self, n: u64) -> FqElement {
        let p = self.field.0.p;
        let n = n % p;
        let c = self.c.iter().map(|&a| a * n % p).collect();
        FqElement { field: self.field.clone(), c }
    }

    pub fn inv(&self) -> Result<FqElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a^(q-2); fields are capped small enough that this is fine
        Ok(self.pow(self.field.order() - 2))
    }

    pub fn pow(&self, mut e: u64) -> FqElement {
        let mut acc = self.field.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// x -> x^p, the absolute Frobenius.
    pub fn frobenius(&self) -> FqElement {
        self.pow(self.field.0.p)
    }

    /// Residue in the prime subfield, when the element lies there.
    pub fn as_prime_residue(&self) -> Option<u64> {
        if self.c[1..].iter().all(|&x| x == 0) {
            Some(self.c[0])
        } else {
            None
        }
    }
}

impl fmt::Display for FqElement {
    /// Serializes as `c0+c1*w+...` with `w` the modulus root; plain residue
    /// when k = 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.len() == 1 {
            return write!(f, "{}", self.c[0]);
        }
        for (j, &c) in self.c.iter().enumerate() {
            if j == 0 {
                write!(f, "{c}")?;
            } else if j == 1 {
                write!(f, "+{c}*w")?;
            } else {
                write!(f, "+{c}*w^{j}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {:?}", self, self.field)
    }
}

// ---------------------------------------------------------------------------
// Embeddings into extension fields
// ---------------------------------------------------------------------------

/// A ring embedding F_{p^k} -> F_{p^{km}}.
///
/// Built as a chain of prime-degree steps (factors of m in ascending order),
/// each step sending the current modulus root to its lexicographically least
/// root in the next field. Chaining makes embeddings compose: the direct map
/// F_q -> F_{q^4} is by construction the composite F_q -> F_{q^2} -> F_{q^4}.
pub struct Embedding {
    base: Field,
    target: Field,
    /// images of 1, w, .., w^{k-1} in the target
    basis_images: Vec<FqElement>,
}

impl Embedding {
    pub fn new(base: &Field, m: u32) -> Result<Embedding> {
        if m == 0 {
            return Err(Error::BadExtensionDegree);
        }
        let p = base.characteristic();
        let target = Field::new(p, base.extension_degree() * m)?;
        if m == 1 {
            let basis_images = (0..base.extension_degree())
                .map(|j| {
                    let mut v = vec![0; base.extension_degree() as usize];
                    v[j as usize] = 1;
                    base.elem(&v)
                })
                .collect();
            return Ok(Embedding { base: base.clone(), target, basis_images });
        }

        let mut factors = Vec::new();
        let mut rem = m;
        let mut l = 2;
        while l * l <= rem {
            while rem % l == 0 {
                factors.push(l);
                rem /= l;
            }
            l += 1;
        }
        if rem > 1 {
            factors.push(rem);
        }
        factors.sort_unstable();

        let mut cur_field = base.clone();
        // image of the base root in cur_field
        let mut root_image = base.gen();
        if base.extension_degree() == 1 {
            root_image = base.zero();
        }
        for l in factors {
            let next = Field::new(p, cur_field.extension_degree() * l)?;
            let step_root = least_modulus_root(&cur_field, &next);
            root_image = apply_on_basis(&cur_field, &next, &step_root, &root_image);
            cur_field = next;
        }
        debug_assert!(cur_field == target);

        let mut basis_images = Vec::with_capacity(base.extension_degree() as usize);
        let mut acc = target.one();
        for _ in 0..base.extension_degree() {
            basis_images.push(acc.clone());
            acc = acc.mul(&root_image);
        }
        Ok(Embedding { base: base.clone(), target, basis_images })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn map(&self, a: &FqElement) -> FqElement {
        assert!(*a.field() == self.base, "embedding applied to a foreign element");
        let mut acc = self.target.zero();
        for (j, img) in self.basis_images.iter().enumerate() {
            let coef = a.c[j];
            if coef != 0 {
                acc = acc.add(&img.scale(coef));
            }
        }
        acc
    }
}

/// Lexicographically least root of `small`'s modulus inside `big`.
fn least_modulus_root(small: &Field, big: &Field) -> FqElement {
    let coeffs: Vec<FqElement> = small.modulus().iter().map(|&c| big.from_u64(c)).collect();
    let poly = upoly::FPoly::from_coeffs(big, coeffs);
    let roots = upoly::roots_in_field(big, &poly);
    debug_assert_eq!(roots.len(), small.extension_degree() as usize);
    roots
        .into_iter()
        .min_by_key(|r| big.index_of(r))
        .expect("modulus splits in any extension of its own degree")
}

/// Map an element of `from` into `to`, sending the modulus root of `from`
/// to `root`.
fn apply_on_basis(from: &Field, to: &Field, root: &FqElement, a: &FqElement) -> FqElement {
    let mut acc = to.zero();
    let mut pow = to.one();
    for j in 0..from.extension_degree() as usize {
        if a.c[j] != 0 {
            acc = acc.add(&pow.scale(a.c[j]));
        }
        pow = pow.mul(root);
    }
    acc
}

// parsing ------------------------------------------------------------------

impl Field {
    /// Parse an element literal: a residue (`3`) or a tuple `c0+c1*w+c2*w^2`.
    /// Sparse forms like `w`, `1+w`, `2*w^3` are accepted.
    pub fn parse_element(&self, s: &str) -> Result<FqElement> {
        let mut acc = self.zero();
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("empty term in element literal '{s}'")));
            }
            let (coef_str, pow) = match part.find('w') {
                None => (part, None),
                Some(i) => {
                    let (c, w) = part.split_at(i);
                    let c = c.trim().trim_end_matches('*').trim();
                    let exp = match w[1..].trim() {
                        "" => 1u32,
                        rest => rest
                            .strip_prefix('^')
                            .ok_or_else(|| Error::Parse(format!("bad power in '{part}'")))?
                            .trim()
                            .parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad exponent in '{part}'")))?,
                    };
                    (c, Some(exp))
                }
            };
            let coef: u64 = if coef_str.is_empty() {
                1
            } else {
                coef_str
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{coef_str}'")))?
            };
            let term = match pow {
                None => self.from_u64(coef),
                Some(e) => self.gen().pow(e as u64).scale(coef),
            };
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

fn bad_literal(s: &str) -> Error {
    Error::Parse(format!("bad field literal '{s}', expected `p` or `p^k`"))
}
