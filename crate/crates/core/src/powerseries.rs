//! Truncated multivariate power series and local coordinate changes.
//!
//! A series is a polynomial together with a truncation order D; every
//! constructor and operation re-truncates eagerly, so a series never stores
//! a term of total degree > D. Parameter variables (the s1..sK of unfoldings)
//! are ordinary variables occupying the leading index range; nothing in this
//! module treats them specially except [`LocalAutomorphism::fixes_params`].

use crate::error::{Error, Result};
use crate::ffield::{Embedding, Field, FqElement};
use crate::linalg;
use crate::poly::{parse_poly, Monomial, Poly, VarTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: Poly,
    trunc: u32,
}

impl TruncatedSeries {
    pub fn from_poly(poly: Poly, trunc: u32) -> TruncatedSeries {
        TruncatedSeries { poly: poly.truncate_degree(trunc), trunc }
    }

    pub fn zero(field: &Field, n: u32, trunc: u32) -> TruncatedSeries {
        TruncatedSeries { poly: Poly::zero(field, n), trunc }
    }

    pub fn parse(text: &str, vars: &VarTable, trunc: u32, field: &Field) -> Result<TruncatedSeries> {
        Ok(TruncatedSeries::from_poly(parse_poly(text, vars, field)?, trunc))
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn field(&self) -> &Field {
        self.poly.field()
    }

    pub fn nvars(&self) -> u32 {
        self.poly.nvars()
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn constant_term(&self) -> FqElement {
        self.poly.coeff(&Monomial::one(self.nvars() as usize))
    }

    /// Minimal total degree of a term, None for the zero series.
    pub fn order(&self) -> Option<u32> {
        self.poly.order()
    }

    fn same_context(&self, other: &TruncatedSeries) -> Result<()> {
        if self.field() != other.field() || self.nvars() != other.nvars() || self.trunc != other.trunc
        {
            return Err(Error::ContextMismatch(
                "series contexts differ (field, variable count or truncation)".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.same_context(other).expect("mismatched series context");
        TruncatedSeries::from_poly(self.poly.add(&other.poly), self.trunc)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.same_context(other).expect("mismatched series context");
        TruncatedSeries::from_poly(self.poly.sub(&other.poly), self.trunc)
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries { poly: self.poly.neg(), trunc: self.trunc }
    }

    pub fn scale(&self, c: &FqElement) -> TruncatedSeries {
        TruncatedSeries { poly: self.poly.scale(c), trunc: self.trunc }
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.same_context(other).expect("mismatched series context");
        // drop cross terms beyond the truncation as we go
        let mut out = Poly::zero(self.field(), self.nvars());
        for (ma, ca) in self.poly.terms() {
            for (mb, cb) in other.poly.terms() {
                if ma.total_degree() + mb.total_degree() <= self.trunc {
                    out.add_term(ma.mul(mb), ca.mul(cb));
                }
            }
        }
        TruncatedSeries { poly: out, trunc: self.trunc }
    }

    /// Formal partial derivative. The result is still reported at order D;
    /// callers doing precision accounting track the D-1 loss themselves.
    pub fn partial(&self, i: usize) -> TruncatedSeries {
        TruncatedSeries::from_poly(self.poly.partial(i), self.trunc)
    }

    pub fn truncate_to(&self, d: u32) -> TruncatedSeries {
        TruncatedSeries { poly: self.poly.truncate_degree(d), trunc: d }
    }

    pub fn embed(&self, emb: &Embedding) -> TruncatedSeries {
        TruncatedSeries { poly: self.poly.embed(emb), trunc: self.trunc }
    }

    /// Substitute variables by series (the core of automorphism application).
    pub fn subst(&self, images: &[TruncatedSeries]) -> TruncatedSeries {
        assert_eq!(images.len(), self.nvars() as usize);
        let trunc = images.first().map(|s| s.trunc).unwrap_or(self.trunc);
        let field = images.first().map(|s| s.field().clone()).unwrap_or_else(|| self.field().clone());
        let n = images.first().map(|s| s.nvars()).unwrap_or(self.nvars());
        let mut max_exp = vec![0u16; self.nvars() as usize];
        for (m, _) in self.poly.terms() {
            for (i, &e) in m.exps().iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let pows: Vec<Vec<TruncatedSeries>> = images
            .iter()
            .zip(&max_exp)
            .map(|(img, &me)| {
                let mut v = Vec::with_capacity(me as usize + 1);
                v.push(TruncatedSeries::from_poly(Poly::one(&field, n), trunc));
                for _ in 0..me {
                    v.push(v.last().unwrap().mul(img));
                }
                v
            })
            .collect();
        let mut acc = TruncatedSeries::zero(&field, n, trunc);
        for (m, c) in self.poly.terms() {
            let mut t = TruncatedSeries::from_poly(Poly::constant(&field, n, c.clone()), trunc);
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = t.mul(&pows[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitute a single variable, leaving the others alone. Much cheaper
    /// than a full substitution when the image is short (the elimination
    /// loop of the splitting lemma substitutes y <- y + monomial).
    pub fn subst_var(&self, var: usize, image: &TruncatedSeries) -> TruncatedSeries {
        let max_k = self
            .poly
            .terms()
            .map(|(m, _)| m.exps()[var])
            .max()
            .unwrap_or(0);
        let one = TruncatedSeries::from_poly(Poly::one(self.field(), self.nvars()), self.trunc);
        let mut pows = Vec::with_capacity(max_k as usize + 1);
        pows.push(one);
        for _ in 0..max_k {
            pows.push(pows.last().unwrap().mul(image));
        }
        let mut out = Poly::zero(self.field(), self.nvars());
        for (m, c) in self.poly.terms() {
            let k = m.exps()[var];
            if k == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut stripped = m.exps().to_vec();
            stripped[var] = 0;
            let base = Monomial::new(stripped);
            for (pm, pc) in pows[k as usize].poly.terms() {
                let prod = base.mul(pm);
                if prod.total_degree() <= self.trunc {
                    out.add_term(prod, c.mul(pc));
                }
            }
        }
        TruncatedSeries { poly: out, trunc: self.trunc }
    }

    pub fn render(&self, vars: &VarTable) -> String {
        self.poly.render(vars)
    }
}

/// A coordinate change of k[[x1..xn]] fixing the origin, with invertible
/// linear part, truncated at order D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalAutomorphism {
    field: Field,
    n: u32,
    trunc: u32,
    images: Vec<TruncatedSeries>,
}

impl LocalAutomorphism {
    pub fn new(images: Vec<TruncatedSeries>) -> Result<LocalAutomorphism> {
        let n = images.len() as u32;
        if n == 0 {
            return Err(Error::BadInput("automorphism needs at least one variable".into()));
        }
        let field = images[0].field().clone();
        let trunc = images[0].trunc();
        for img in &images {
            if img.nvars() != n || img.field() != &field || img.trunc() != trunc {
                return Err(Error::ContextMismatch("automorphism image contexts differ".into()));
            }
            if !img.constant_term().is_zero() {
                return Err(Error::BadInput("automorphism images must have zero constant term".into()));
            }
        }
        let aut = LocalAutomorphism { field, n, trunc, images };
        // linear part must be invertible
        linalg::invert(&aut.linear_matrix(), aut.images[0].field())?;
        Ok(aut)
    }

    pub fn identity(field: &Field, n: u32, trunc: u32) -> LocalAutomorphism {
        let images = (0..n)
            .map(|i| TruncatedSeries::from_poly(Poly::var(field, n, i as usize), trunc))
            .collect();
        LocalAutomorphism { field: field.clone(), n, trunc, images }
    }

    /// Linear automorphism with image of x_i equal to sum_j m[i][j] x_j.
    pub fn from_linear(field: &Field, m: &[Vec<FqElement>], trunc: u32) -> Result<LocalAutomorphism> {
        let n = m.len() as u32;
        let images = m
            .iter()
            .map(|row| {
                let mut p = Poly::zero(field, n);
                for (j, c) in row.iter().enumerate() {
                    p.add_term(Monomial::var(n as usize, j), c.clone());
                }
                TruncatedSeries::from_poly(p, trunc)
            })
            .collect();
        LocalAutomorphism::new(images)
    }

    pub fn images(&self) -> &[TruncatedSeries] {
        &self.images
    }

    pub fn nvars(&self) -> u32 {
        self.n
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn linear_matrix(&self) -> linalg::Matrix {
        let n = self.n as usize;
        let mut m = linalg::zeros(&self.field, n, n);
        for (i, img) in self.images.iter().enumerate() {
            for j in 0..n {
                m[i][j] = img.poly().coeff(&Monomial::var(n, j));
            }
        }
        m
    }

    /// Whether the leading `params` variables map to themselves (the local
    /// R-algebra condition for unfoldings).
    pub fn fixes_params(&self, params: u32) -> bool {
        let n = self.n;
        (0..params as usize).all(|i| {
            let expected = TruncatedSeries::from_poly(Poly::var(&self.field, n, i), self.trunc);
            self.images[i] == expected
        })
    }

    /// phi(f) = f(phi_1, .., phi_n), truncated.
    pub fn apply(&self, f: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(f.nvars(), self.n, "automorphism and series variable counts differ");
        f.subst(&self.images)
    }

    /// Composition under `apply`: apply(compose(a, b), f) = apply(a, apply(b, f)).
    pub fn compose(a: &LocalAutomorphism, b: &LocalAutomorphism) -> LocalAutomorphism {
        let images = b.images.iter().map(|img| img.subst(&a.images)).collect();
        LocalAutomorphism { field: a.field.clone(), n: a.n, trunc: a.trunc, images }
    }

    /// Inverse up to the truncation order, computed degree by degree.
    pub fn invert(&self) -> Result<LocalAutomorphism> {
        let n = self.n as usize;
        let l_inv = linalg::invert(&self.linear_matrix(), &self.field)?;
        // higher-order parts of the images
        let higher: Vec<TruncatedSeries> = self
            .images
            .iter()
            .map(|img| {
                let lin = img.poly().truncate_degree(1);
                TruncatedSeries::from_poly(img.poly().sub(&lin), self.trunc)
            })
            .collect();
        // psi_j = sum_i linv[j][i] * (x_i - H_i(psi)), iterated to stability
        let xs: Vec<TruncatedSeries> = (0..n)
            .map(|i| TruncatedSeries::from_poly(Poly::var(&self.field, self.n, i), self.trunc))
            .collect();
        let mut psi: Vec<TruncatedSeries> = (0..n)
            .map(|j| {
                let mut acc = TruncatedSeries::zero(&self.field, self.n, self.trunc);
                for i in 0..n {
                    acc = acc.add(&xs[i].scale(&l_inv[j][i]));
                }
                acc
            })
            .collect();
        for _ in 0..self.trunc {
            let mut next = Vec::with_capacity(n);
            for j in 0..n {
                let mut acc = TruncatedSeries::zero(&self.field, self.n, self.trunc);
                for i in 0..n {
                    let hi = higher[i].subst(&psi);
                    let term = xs[i].sub(&hi);
                    acc = acc.add(&term.scale(&l_inv[j][i]));
                }
                next.push(acc);
            }
            if next == psi {
                break;
            }
            psi = next;
        }
        let inv = LocalAutomorphism { field: self.field.clone(), n: self.n, trunc: self.trunc, images: psi };
        debug_assert!((0..n).all(|i| {
            let xi = TruncatedSeries::from_poly(Poly::var(&self.field, self.n, i), self.trunc);
            inv.apply(&self.images[i].clone()) == xi
        }));
        Ok(inv)
    }
}
