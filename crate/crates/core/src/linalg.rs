//! Small exact linear algebra over `FqElement` matrices. Dimensions here are
//! tiny (monomial counts, variable counts), so plain Gaussian elimination is
//! all we need.

use crate::error::{Error, Result};
use crate::ffield::{Field, FqElement};

pub type Matrix = Vec<Vec<FqElement>>;

pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
    vec![vec![field.zero(); cols]; rows]
}

pub fn identity(field: &Field, n: usize) -> Matrix {
    let mut m = zeros(field, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = field.one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix, field: &Field) -> Matrix {
    let (ra, ca) = (a.len(), a[0].len());
    let cb = b[0].len();
    debug_assert_eq!(ca, b.len());
    let mut out = zeros(field, ra, cb);
    for i in 0..ra {
        for k in 0..ca {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cb {
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

/// Reduced row echelon form in place; returns the pivot column indices.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv().expect("pivot nonzero");
        for j in c..cols {
            m[r][j] = m[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut copy = m.clone();
    rref(&mut copy).len()
}

/// Is `v` in the row space of an already-reduced matrix?
pub fn in_row_space(rref_m: &Matrix, pivots: &[usize], v: &[FqElement]) -> bool {
    let mut v = v.to_vec();
    for (r, &c) in pivots.iter().enumerate() {
        if !v[c].is_zero() {
            let f = v[c].clone();
            for j in 0..v.len() {
                let t = f.mul(&rref_m[r][j]);
                v[j] = v[j].sub(&t);
            }
        }
    }
    v.iter().all(|x| x.is_zero())
}

/// Basis of the right kernel of an `rows x cols` matrix.
pub fn kernel_basis(m: &Matrix, field: &Field, cols: usize) -> Vec<Vec<FqElement>> {
    let mut red = m.clone();
    let pivots = rref(&mut red);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![field.zero(); cols];
        v[fc] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = red[r][fc].neg();
        }
        basis.push(v);
    }
    basis
}

pub fn invert(m: &Matrix, field: &Field) -> Result<Matrix> {
    let n = m.len();
    let mut aug = zeros(field, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[i][j] = m[i][j].clone();
        }
        aug[i][n + i] = field.one();
    }
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return Err(Error::SingularLinearPart);
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Reduction map onto the cokernel of the column space of an `rows x cols`
/// matrix: returns (reduced transpose, its pivots, non-pivot coordinates).
/// Cokernel coordinates of a vector are its non-pivot entries after
/// reduction by the row space of the transpose.
pub struct Cokernel {
    red: Matrix,
    pivots: Vec<usize>,
    pub complement: Vec<usize>,
}

impl Cokernel {
    /// Cokernel of the map whose image is spanned by the columns of `m`
    /// inside the target of dimension `target_dim`.
    pub fn of_column_space(m: &Matrix, field: &Field, target_dim: usize) -> Cokernel {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut t = zeros(field, cols, target_dim);
        for i in 0..rows {
            for j in 0..cols {
                t[j][i] = m[i][j].clone();
            }
        }
        let pivots = rref(&mut t);
        let complement: Vec<usize> = (0..target_dim).filter(|c| !pivots.contains(c)).collect();
        Cokernel { red: t, pivots, complement }
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Coordinates of the class of `v` on the complement basis.
    pub fn project(&self, v: &[FqElement]) -> Vec<FqElement> {
        let mut v = v.to_vec();
        for (r, &c) in self.pivots.iter().enumerate() {
            if !v[c].is_zero() {
                let f = v[c].clone();
                for j in 0..v.len() {
                    let t = f.mul(&self.red[r][j]);
                    v[j] = v[j].sub(&t);
                }
            }
        }
        self.complement.iter().map(|&c| v[c].clone()).collect()
    }
}
