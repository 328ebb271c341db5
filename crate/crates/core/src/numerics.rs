//! Dense complex linear algebra for small Hermitian matrices.
//!
//! Everything the state functionals need: products, traces, a cyclic Jacobi
//! eigensolver for Hermitian matrices and the PSD square root built on it.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Largest dimension accepted by the eigensolver.
pub const MAX_DIM: usize = 64;

const MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting ragged or non-finite input.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos / dim, pos % dim));
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("rows must all have length equal to the row count".into()));
        }
        Self::from_row_major(dim, rows.concat())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let dim = u.len();
        debug_assert_eq!(dim, v.len());
        let mut entries = Vec::with_capacity(dim * dim);
        for ui in u {
            for vj in v {
                entries.push(ui * vj.conj());
            }
        }
        Self { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Rows as nested vectors.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[Complex64]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance between two matrices of equal dimension.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `max |A - A†|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// Replaces `A` with `(A + A†)/2`.
    pub(crate) fn hermitize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            self[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        self.mul_unchecked(rhs)
    }
}

/// Spectrum of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(h(λ)) V†`.
    pub fn reconstruct_with(&self, h: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| h(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, w) in weights.iter().enumerate() {
                    if *w != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * *w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigen(a: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigen> {
    let n = a.dim();
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge(n, MAX_DIM));
    }
    let asym = a.hermitian_deviation();
    if asym > tol.hermitian {
        return Err(Error::NotHermitian(asym));
    }

    let mut m = a.clone();
    m.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius();
    let target = f64::EPSILON * scale;

    let mut converged = n == 1 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        // Off-diagonal mass can stall a hair above the target on exact round-off.
        if off > 1e-14 * scale.max(1.0) {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge after {MAX_SWEEPS} sweeps (off-diagonal norm {off:e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[(row, col)] = v[(row, k)];
        }
    }
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

/// One Jacobi step zeroing `m[p][q]`: `m <- U† m U`, `v <- v U`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if r <= 0.25 * f64::EPSILON * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    // phase e with apq = r e; the block diag(1, conj(e)) makes apq real
    let e = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() { 0.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.dim();
    let ec = e.conj();

    // columns: U[p][p] = c, U[q][p] = -s conj(e), U[p][q] = s, U[q][q] = c conj(e)
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * ec * s;
        m[(k, q)] = akp * s + akq * ec * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ec * s;
        v[(k, q)] = vkp * s + vkq * ec * c;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c - aqk * e * s;
        m[(q, k)] = apk * s + aqk * e * c;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-tol.psd, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn psd_sqrt(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(a, tol)?;
    let lowest = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if lowest < -tol.psd {
        return Err(Error::NotPsd(lowest));
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Unitary polar factor `W V†` of `X = W Σ V†`, built from the eigenvectors of
/// `X†X`. Directions with singular values at round-off level are completed to
/// an orthonormal frame; `eig` must be the decomposition of `X†X`.
pub fn polar_unitary(x: &ComplexMatrix, eig: &HermitianEigen) -> ComplexMatrix {
    let n = x.dim();
    let v = &eig.eigenvectors;
    let scale = x.frobenius().max(f64::MIN_POSITIVE);
    let mut w: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let orthogonalize = |c: &mut Vec<Complex64>, basis: &[Vec<Complex64>]| {
        for _ in 0..2 {
            for b in basis {
                let p: Complex64 = b.iter().zip(c.iter()).map(|(bi, ci)| bi.conj() * ci).sum();
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= p * bi;
                }
            }
        }
    };
    let norm = |c: &[Complex64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // largest singular values first, so the well-determined columns fix the frame
    for k in (0..n).rev() {
        let mut c: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| x[(i, j)] * v[(j, k)]).sum()).collect();
        orthogonalize(&mut c, &w);
        if norm(&c) <= 1e3 * f64::EPSILON * scale {
            c = (0..n)
                .map(|e| {
                    let mut c: Vec<Complex64> =
                        (0..n).map(|i| Complex64::new(if i == e { 1.0 } else { 0.0 }, 0.0)).collect();
                    orthogonalize(&mut c, &w);
                    c
                })
                .max_by(|a, b| norm(a).total_cmp(&norm(b)))
                .expect("nonempty");
        }
        let m = norm(&c);
        w.push(c.into_iter().map(|z| z / m).collect());
    }
    let mut u = ComplexMatrix::zeros(n);
    for (idx, col) in w.iter().enumerate() {
        let k = n - 1 - idx;
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] += col[i] * v[(j, k)].conj();
            }
        }
    }
    u
}

/// `Re Tr(AB)` for Hermitian `A`, `B`.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    a.check_same_dim(b)?;
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    let scale = a.frobenius() * b.frobenius();
    if acc.im.abs() > tol.imaginary * scale.max(1.0) {
        return Err(Error::Numerical(format!("trace of Hermitian product has imaginary part {:e}", acc.im)));
    }
    Ok(acc.re)
}
