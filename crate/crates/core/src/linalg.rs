//! Dense complex matrices and the tensor-network plumbing (Kronecker
//! products, partial traces, partial transposes, factor-local operators)
//! used by the rest of the crate. Everything here is small: Hilbert spaces
//! stay at or below 64 dimensions per factor and 4096 in total.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest total dimension any tensor product may reach.
pub const MAX_DIM: usize = 4096;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Row-major construction; panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Matrix::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// |a⟩⟨b|
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Matrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[&[C64]]) -> Self {
        let rows = columns.first().map_or(0, |c| c.len());
        Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&self.adjoint() * self).max_abs_diff(&Matrix::identity(self.rows)) <= tol
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self · rho · self†`
    pub fn conjugate_by(&self, rho: &Matrix) -> Matrix {
        &(self * rho) * &self.adjoint()
    }

    /// Kronecker product; fails if the result would exceed [`MAX_DIM`].
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let big = rows.max(cols);
        if big > MAX_DIM {
            return Err(Error::Size {
                dim: big,
                max: MAX_DIM,
            });
        }
        Ok(Matrix::from_fn(rows, cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        }))
    }

    /// Hermitian part `(A + A†)/2`, used to strip rounding asymmetry.
    pub fn hermitian_part(&self) -> Matrix {
        let adj = self.adjoint();
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + adj[(i, j)]) * 0.5
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Result<Vec<C64>> {
    let dim = a.len() * b.len();
    if dim > MAX_DIM {
        return Err(Error::Size { dim, max: MAX_DIM });
    }
    let mut out = Vec::with_capacity(dim);
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    Ok(out)
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::shape("factor dimensions must be positive"));
    }
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::shape(format!(
            "factor dims {dims:?} multiply to {prod}, expected {total}"
        )));
    }
    Ok(())
}

/// Row-major strides (first factor most significant).
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// All offsets `Σ digit_k · stride_k` over the chosen factors, enumerated in
/// row-major order of those factors.
fn offsets(dims: &[usize], factors: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for digit in 0..dims[f] {
                next.push(base + digit * st[f]);
            }
        }
        out = next;
    }
    out
}

/// Traces out every factor not listed in `keep`. Kept factors appear in the
/// result in ascending factor order.
pub fn partial_trace(m: &Matrix, dims: &[usize], keep: &[usize]) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::shape("partial trace needs a square matrix"));
    }
    check_dims(m.rows(), dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::shape(format!("keep set {keep:?} out of range")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let ko = offsets(dims, &kept);
    let to = offsets(dims, &traced);
    Ok(Matrix::from_fn(ko.len(), ko.len(), |a, b| {
        to.iter().map(|&t| m[(ko[a] + t, ko[b] + t)]).sum()
    }))
}

/// Transposes the listed factors (in the product basis) and leaves the rest.
pub fn partial_transpose(m: &Matrix, dims: &[usize], factors: &[usize]) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::shape("partial transpose needs a square matrix"));
    }
    check_dims(m.rows(), dims)?;
    if factors.iter().any(|&k| k >= dims.len()) {
        return Err(Error::shape(format!("factor set {factors:?} out of range")));
    }
    let st = strides(dims);
    let n = m.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (mut ii, mut jj) = (i, j);
            for &f in factors {
                let di = (i / st[f]) % dims[f];
                let dj = (j / st[f]) % dims[f];
                ii = ii - di * st[f] + dj * st[f];
                jj = jj - dj * st[f] + di * st[f];
            }
            out[(ii, jj)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Applies a (possibly rectangular) operator to one tensor factor of a state
/// vector. Returns the new vector and the updated factor dimensions.
pub fn apply_to_factor(
    v: &[C64],
    dims: &[usize],
    factor: usize,
    op: &Matrix,
) -> Result<(Vec<C64>, Vec<usize>)> {
    check_dims(v.len(), dims)?;
    if factor >= dims.len() {
        return Err(Error::shape(format!("factor {factor} out of range")));
    }
    if op.cols() != dims[factor] {
        return Err(Error::shape(format!(
            "operator acts on dim {}, factor has dim {}",
            op.cols(),
            dims[factor]
        )));
    }
    let outer: usize = dims[..factor].iter().product();
    let inner_len: usize = dims[factor + 1..].iter().product();
    let din = dims[factor];
    let dout = op.rows();
    let mut out = vec![ZERO; outer * dout * inner_len];
    let mut buf = vec![ZERO; din];
    for o in 0..outer {
        for t in 0..inner_len {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = v[(o * din + k) * inner_len + t];
            }
            for r in 0..dout {
                let acc: C64 = op.row(r).iter().zip(&buf).map(|(a, b)| a * b).sum();
                out[(o * dout + r) * inner_len + t] = acc;
            }
        }
    }
    let mut new_dims = dims.to_vec();
    new_dims[factor] = dout;
    Ok((out, new_dims))
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` on the given factor.
pub fn embed(op: &Matrix, dims: &[usize], factor: usize) -> Result<Matrix> {
    if factor >= dims.len() || op.cols() != dims[factor] {
        return Err(Error::shape("embedding operator does not match factor"));
    }
    let before: usize = dims[..factor].iter().product();
    let after: usize = dims[factor + 1..].iter().product();
    Matrix::identity(before)
        .kron(op)?
        .kron(&Matrix::identity(after))
}

/// Pauli matrices I, X, Y, Z.
pub fn pauli(k: usize) -> Matrix {
    match k {
        0 => Matrix::identity(2),
        1 => Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        2 => Matrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]),
        3 => Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        _ => panic!("pauli index {k} out of range"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = Matrix::identity(2).kron(&Matrix::identity(2)).unwrap();
        assert_eq!(i4, Matrix::identity(4));
    }

    #[test]
    fn basis_vectors_tensor_to_index() {
        let v = kron_vec(&[ONE, ZERO], &[ZERO, ONE]).unwrap();
        assert_eq!(v, vec![ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn x_tensor_i_flips_first_factor() {
        let op = pauli(1).kron(&Matrix::identity(2)).unwrap();
        let v = kron_vec(&[ONE, ZERO], &[ONE, ZERO]).unwrap();
        assert_eq!(op.apply(&v), kron_vec(&[ZERO, ONE], &[ONE, ZERO]).unwrap());
    }

    #[test]
    fn kron_size_limit() {
        let big = Matrix::identity(65);
        assert!(matches!(big.kron(&big), Err(Error::Size { .. })));
        let v = vec![ONE; 65];
        assert!(kron_vec(&v, &v).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = Matrix::from_real(2, 2, &[0.25, 0.1, 0.1, 0.75]);
        let sigma = Matrix::diagonal(&[0.2, 0.3, 0.5]);
        let joint = rho.kron(&sigma).unwrap();
        let back = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-15);
        let other = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(other.max_abs_diff(&sigma) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = Matrix::identity(6);
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[0]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[2]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn partial_transpose_of_bell_state() {
        let h = 0.5;
        let phi = Matrix::from_real(
            4,
            4,
            &[
                h, 0.0, 0.0, h, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                h, 0.0, 0.0, h,
            ],
        );
        let pt = partial_transpose(&phi, &[2, 2], &[0]).unwrap();
        // Φ⁺ partial transpose is SWAP/2
        assert_eq!(pt[(1, 2)], c(0.5));
        assert_eq!(pt[(2, 1)], c(0.5));
        assert_eq!(pt[(0, 3)], ZERO);
        let twice = partial_transpose(&pt, &[2, 2], &[0]).unwrap();
        assert_eq!(twice, phi);
    }

    #[test]
    fn factor_application_matches_embedding() {
        let v: Vec<C64> = (0..12)
            .map(|k| C64::new(k as f64, -(k as f64) / 3.0))
            .collect();
        let op = Matrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64, (i * j) as f64));
        let (out, dims) = apply_to_factor(&v, &[2, 3, 2], 1, &op).unwrap();
        assert_eq!(dims, vec![2, 3, 2]);
        let full = embed(&op, &[2, 3, 2], 1).unwrap().apply(&v);
        for (a, b) in out.iter().zip(&full) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rectangular_factor_application_contracts() {
        // ⟨1| on the first factor of |1⟩⊗|0⟩ leaves |0⟩
        let v = kron_vec(&[ZERO, ONE], &[ONE, ZERO]).unwrap();
        let bra = Matrix::from_vec(1, 2, vec![ZERO, ONE]);
        let (out, dims) = apply_to_factor(&v, &[2, 2], 0, &bra).unwrap();
        assert_eq!(dims, vec![1, 2]);
        assert_eq!(out, vec![ONE, ZERO]);
    }

    #[test]
    fn paulis_are_unitary_and_hermitian() {
        for k in 0..4 {
            assert!(pauli(k).is_unitary(1e-15));
            assert!(pauli(k).is_hermitian(1e-15));
        }
    }
}
