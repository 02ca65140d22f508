//! Exact sparse multivariate polynomials over F_q, with the shared term
//! grammar used by the CLI and all file formats.
//!
//! Terms are kept in a BTreeMap keyed by graded-lex order (total degree
//! first, then x1 before x2 before ..), which is also the canonical
//! printing order.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ffield::{Embedding, Field, FqElement};

/// Exponent vector with cached total degree. Ordered by graded lex:
/// lower total degree first; ties broken so that x1^d sorts before x2^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    total: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Monomial {
        let total = exps.iter().map(|&e| e as u32).sum();
        Monomial { total, exps }
    }

    pub fn one(n: usize) -> Monomial {
        Monomial { total: 0, exps: vec![0; n] }
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { total: 1, exps }
    }

    pub fn total_degree(&self) -> u32 {
        self.total
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { total: self.total + other.total, exps }
    }

    /// Divide by the i-th variable; None if it does not occur.
    pub fn div_var(&self, i: usize) -> Option<Monomial> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut exps = self.exps.clone();
        exps[i] -= 1;
        Some(Monomial { total: self.total - 1, exps })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total.cmp(&other.total).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse exact polynomial. No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    n: u32,
    terms: BTreeMap<Monomial, FqElement>,
}

impl Poly {
    pub fn zero(field: &Field, n: u32) -> Poly {
        Poly { field: field.clone(), n, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, n: u32, c: FqElement) -> Poly {
        let mut p = Poly::zero(field, n);
        p.add_term(Monomial::one(n as usize), c);
        p
    }

    pub fn one(field: &Field, n: u32) -> Poly {
        Poly::constant(field, n, field.one())
    }

    pub fn var(field: &Field, n: u32, i: usize) -> Poly {
        let mut p = Poly::zero(field, n);
        p.add_term(Monomial::var(n as usize, i), field.one());
        p
    }

    pub fn from_terms(field: &Field, n: u32, it: impl IntoIterator<Item = (Monomial, FqElement)>) -> Poly {
        let mut p = Poly::zero(field, n);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FqElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> FqElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; None for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total).max()
    }

    /// Lowest total degree among the terms (the order), None for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total).min()
    }

    pub fn add_term(&mut self, m: Monomial, c: FqElement) {
        debug_assert_eq!(m.exps.len(), self.n as usize);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn same_context(&self, other: &Poly) -> Result<()> {
        if self.field != other.field || self.n != other.n {
            return Err(Error::ContextMismatch(format!(
                "polynomials over {:?}/{} vars vs {:?}/{} vars",
                self.field, self.n, other.field, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.same_context(other).expect("mismatched polynomial context");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        Poly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn scale(&self, c: &FqElement) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field, self.n);
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect();
        Poly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.same_context(other).expect("mismatched polynomial context");
        let mut out = Poly::zero(&self.field, self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.field, self.n);
        for (m, c) in &self.terms {
            if let Some(dm) = m.div_var(i) {
                out.add_term(dm, c.scale(m.exps[i] as u64));
            }
        }
        out
    }

    pub fn eval(&self, point: &[FqElement]) -> FqElement {
        assert_eq!(point.len(), self.n as usize);
        // per-variable power cache up to the max exponent present
        let mut max_exp = vec![0u16; self.n as usize];
        for m in self.terms.keys() {
            for (i, &e) in m.exps.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let pows: Vec<Vec<FqElement>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &me)| {
                let mut v = Vec::with_capacity(me as usize + 1);
                v.push(self.field.one());
                for _ in 0..me {
                    v.push(v.last().unwrap().mul(x));
                }
                v
            })
            .collect();
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&pows[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitute each variable by the given polynomial (all in the same
    /// target context).
    pub fn subst(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.n as usize);
        let (tf, tn) = (images[0].field.clone(), images[0].n);
        let mut max_exp = vec![0u16; self.n as usize];
        for m in self.terms.keys() {
            for (i, &e) in m.exps.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let pows: Vec<Vec<Poly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(img, &me)| {
                let mut v = Vec::with_capacity(me as usize + 1);
                v.push(Poly::one(&tf, tn));
                for _ in 0..me {
                    v.push(v.last().unwrap().mul(img));
                }
                v
            })
            .collect();
        let mut acc = Poly::zero(&tf, tn);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&tf, tn, c.clone());
            for (i, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&pows[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Same polynomial over more variables (new ones appended, unused).
    pub fn pad_vars(&self, new_n: u32) -> Poly {
        assert!(new_n >= self.n);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = m.exps.clone();
                exps.resize(new_n as usize, 0);
                (Monomial::new(exps), c.clone())
            })
            .collect();
        Poly { field: self.field.clone(), n: new_n, terms }
    }

    /// Shift all variables up by `offset` inside a context of `new_n` variables.
    pub fn shift_vars(&self, offset: u32, new_n: u32) -> Poly {
        assert!(self.n + offset <= new_n);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u16; new_n as usize];
                exps[offset as usize..(offset + self.n) as usize].copy_from_slice(&m.exps);
                (Monomial::new(exps), c.clone())
            })
            .collect();
        Poly { field: self.field.clone(), n: new_n, terms }
    }

    /// Map every coefficient through an embedding into an extension field.
    pub fn embed(&self, emb: &Embedding) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), emb.map(c))).collect();
        Poly { field: emb.target().clone(), n: self.n, terms }
    }

    /// Discard terms of total degree > `d`.
    pub fn truncate_degree(&self, d: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.total <= d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Poly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn render(&self, vars: &VarTable) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            parts.push(render_term(m, c, vars));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&VarTable::xs(self.n)))
    }
}

fn render_term(m: &Monomial, c: &FqElement, vars: &VarTable) -> String {
    let mut factors = Vec::new();
    let coef = match c.as_prime_residue() {
        Some(r) => {
            if r != 1 || m.total == 0 {
                Some(format!("{r}"))
            } else {
                None
            }
        }
        None => Some(format!("({c})")),
    };
    if let Some(cs) = coef {
        factors.push(cs);
    }
    for (i, &e) in m.exps.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(vars.name(i).to_string()),
            _ => factors.push(format!("{}^{}", vars.name(i), e)),
        }
    }
    factors.join("*")
}

// ---------------------------------------------------------------------------
// Variable tables and the term grammar parser
// ---------------------------------------------------------------------------

/// Maps variable names to indices for parsing and printing.
#[derive(Debug, Clone)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new(names: Vec<String>) -> VarTable {
        VarTable { names }
    }

    /// x1..xn
    pub fn xs(n: u32) -> VarTable {
        VarTable { names: (1..=n).map(|i| format!("x{i}")).collect() }
    }

    /// s1..sK followed by x1..xN (parameters occupy the leading indices).
    pub fn params_xs(params: u32, xs: u32) -> VarTable {
        let mut names: Vec<String> = (1..=params).map(|i| format!("s{i}")).collect();
        names.extend((1..=xs).map(|i| format!("x{i}")));
        VarTable { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Parse the shared polynomial grammar:
/// terms joined by `+`/`-`; term = factors joined by `*`; factor =
/// integer | parenthesized field element | var[^exp].
pub fn parse_poly(text: &str, vars: &VarTable, field: &Field) -> Result<Poly> {
    let n = vars.len() as u32;
    let mut out = Poly::zero(field, n);
    let mut chars = text.chars().peekable();
    let mut sign_neg = false;
    let mut first = true;
    loop {
        skip_ws(&mut chars);
        if chars.peek().is_none() {
            if first {
                return Err(Error::Parse("empty polynomial".into()));
            }
            break;
        }
        if !first {
            match chars.next() {
                Some('+') => sign_neg = false,
                Some('-') => sign_neg = true,
                Some(c) => return Err(Error::Parse(format!("expected + or -, found '{c}'"))),
                None => break,
            }
        } else {
            // optional leading sign
            if let Some(&c) = chars.peek() {
                if c == '-' {
                    chars.next();
                    sign_neg = true;
                } else if c == '+' {
                    chars.next();
                }
            }
        }
        first = false;
        let (mono, coef) = parse_term(&mut chars, vars, field)?;
        let coef = if sign_neg { coef.neg() } else { coef };
        out.add_term(mono, coef);
    }
    Ok(out)
}

fn skip_ws(chars: &mut std::iter::Peekable<std::str::Chars>) {
    while chars.peek().is_some_and(|c| c.is_whitespace()) {
        chars.next();
    }
}

fn parse_term(
    chars: &mut std::iter::Peekable<std::str::Chars>,
    vars: &VarTable,
    field: &Field,
) -> Result<(Monomial, FqElement)> {
    let n = vars.len();
    let mut coef = field.one();
    let mut exps = vec![0u16; n];
    loop {
        skip_ws(chars);
        let Some(&c) = chars.peek() else {
            return Err(Error::Parse("unexpected end of term".into()));
        };
        if c.is_ascii_digit() {
            let num = take_while(chars, |c| c.is_ascii_digit());
            let v: u64 = num.parse().map_err(|_| Error::Parse(format!("bad integer '{num}'")))?;
            coef = coef.mul(&field.from_u64(v));
        } else if c == '(' {
            chars.next();
            let inner = take_while(chars, |c| c != ')');
            if chars.next() != Some(')') {
                return Err(Error::Parse("unclosed '(' in coefficient".into()));
            }
            coef = coef.mul(&field.parse_element(&inner)?);
        } else if c.is_ascii_alphabetic() {
            let name = take_while(chars, |c| c.is_ascii_alphanumeric() || c == '_');
            let idx = vars
                .index(&name)
                .ok_or_else(|| Error::Parse(format!("unknown variable '{name}'")))?;
            let mut exp = 1u16;
            skip_ws(chars);
            if chars.peek() == Some(&'^') {
                chars.next();
                skip_ws(chars);
                let num = take_while(chars, |c| c.is_ascii_digit());
                exp = num.parse().map_err(|_| Error::Parse(format!("bad exponent '{num}'")))?;
            }
            exps[idx] = exps[idx]
                .checked_add(exp)
                .ok_or_else(|| Error::Parse("exponent overflow".into()))?;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}'")));
        }
        skip_ws(chars);
        if chars.peek() == Some(&'*') {
            chars.next();
            continue;
        }
        break;
    }
    Ok((Monomial::new(exps), coef))
}

fn take_while(chars: &mut std::iter::Peekable<std::str::Chars>, pred: impl Fn(char) -> bool) -> String {
    let mut s = String::new();
    while let Some(&c) = chars.peek() {
        if pred(c) {
            s.push(c);
            chars.next();
        } else {
            break;
        }
    }
    s
}

/// All monomials in `n` variables of total degree <= `d`, in graded-lex order.
pub fn monomials_up_to(n: u32, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; n as usize];
    rec(&mut out, &mut cur, 0, d as u16, n as usize);
    fn rec(out: &mut Vec<Monomial>, cur: &mut Vec<u16>, i: usize, rem: u16, n: usize) {
        if i == n {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for e in 0..=rem {
            cur[i] = e;
            rec(out, cur, i + 1, rem - e, n);
            cur[i] = 0;
        }
    }
    out.sort();
    out
}

/// All monomials of total degree exactly `d`.
pub fn monomials_of_degree(n: u32, d: u32) -> Vec<Monomial> {
    monomials_up_to(n, d).into_iter().filter(|m| m.total_degree() == d).collect()
}

/// Determinant of a square matrix of polynomials, by cofactor expansion
/// (matrices here stay tiny).
pub fn determinant(m: &[Vec<Poly>], field: &Field, n: u32) -> Poly {
    let size = m.len();
    if size == 0 {
        return Poly::one(field, n);
    }
    if size == 1 {
        return m[0][0].clone();
    }
    let mut det = Poly::zero(field, n);
    for (col, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let cof = entry.mul(&determinant(&minor, field, n));
        if col % 2 == 0 {
            det = det.add(&cof);
        } else {
            det = det.sub(&cof);
        }
    }
    det
}
