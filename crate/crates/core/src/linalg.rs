//! Dense complex linear algebra for the small operators used throughout the crate.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Dimensions stay tiny (at most 32 for five qubits), so the
//! routines favour clarity and accuracy over blocking or SIMD.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative off-diagonal mass at which the Jacobi sweep stops.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Tolerance for the Hermitian precondition of [`herm_eig`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, `max |H_ij - conj(H_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    /// Columns orthonormal within `tol` (the matrix need not be square).
    pub fn has_orthonormal_columns(&self, tol: f64) -> bool {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.cols)) <= tol
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "elementwise dimension mismatch"
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:>+9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Kronecker product `A ⊗ B`, with `A` on the most significant index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (q, r) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * q, a.cols * r, |row, col| {
        a.get(row / q, col / r) * b.get(row % q, col % r)
    })
}

/// Kronecker product of a vector pair, `v ⊗ w`.
pub fn kron_vec(v: &[C64], w: &[C64]) -> Vec<C64> {
    v.iter().flat_map(|a| w.iter().map(move |b| a * b)).collect()
}

/// Reduced operator on the subsystems listed in `keep`.
///
/// `dims` gives the subsystem dimensions in tensor order (first entry is the
/// most significant index). The kept subsystems appear in ascending order in
/// the result regardless of the order in `keep`.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch("subsystem dimensions must be positive".into()));
    }
    if !rho.is_square() || rho.rows != total {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but subsystem dimensions multiply to {total}",
            rho.rows, rho.cols
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem {k} out of range for {} subsystems",
                dims.len()
            )));
        }
        kept[k] = true;
    }
    if !kept.iter().any(|&k| k) {
        return Err(Error::InvalidArgument("partial trace must keep at least one subsystem".into()));
    }

    let keep_dims: Vec<usize> = (0..dims.len()).filter(|&k| kept[k]).map(|k| dims[k]).collect();
    let trace_dims: Vec<usize> = (0..dims.len()).filter(|&k| !kept[k]).map(|k| dims[k]).collect();
    let kd: usize = keep_dims.iter().product();
    let td: usize = trace_dims.iter().product();

    // Maps (kept index, traced index) to the full index.
    let compose = |ki: usize, ti: usize| -> usize {
        let mut kdigits = digits(ki, &keep_dims).into_iter();
        let mut tdigits = digits(ti, &trace_dims).into_iter();
        let mut full = 0;
        for (k, &d) in dims.iter().enumerate() {
            let digit = if kept[k] { kdigits.next() } else { tdigits.next() }.unwrap();
            full = full * d + digit;
        }
        full
    };

    let mut out = ComplexMatrix::zeros(kd, kd);
    for i in 0..kd {
        for j in 0..kd {
            let mut acc = ZERO;
            for t in 0..td {
                acc += rho.get(compose(i, t), compose(j, t));
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Mixed-radix digits of `index`, most significant first.
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V · diag(f(λ)) · V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let v = &self.eigenvectors;
        &(v * &ComplexMatrix::real_diag(&mapped)) * &v.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius mass falls below
/// `JACOBI_TOLERANCE · ‖H‖_F`; gives up after `JACOBI_MAX_SWEEPS` sweeps.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let defect = h.hermitian_defect();
    let scale = h.frobenius_norm().max(1.0);
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(Error::NotHermitian(defect));
    }

    let n = h.rows;
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h.get(i, j) + h.get(j, i).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let threshold = JACOBI_TOLERANCE * norm;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold || norm == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the original index order on ties.
    order.sort_by(|&x, &y| a.get(y, y).re.total_cmp(&a.get(x, x).re));
    let eigenvalues = order.iter().map(|&k| a.get(k, k).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `J`, updating `a ← J† a J` and `v ← v J`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a.get(p, q);
    let mag = g.norm();
    if mag == 0.0 {
        return;
    }
    let phase = g / mag;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J restricted to (p, q): [[c, s], [-s·conj(phase), c·conj(phase)]].
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.rows;
    // a ← a J (columns p, q)
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * jpp + akq * jqp);
        a.set(k, q, akp * jpq + akq * jqq);
    }
    // a ← J† a (rows p, q)
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
        a.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, C64::new(a.get(p, p).re, 0.0));
    a.set(q, q, C64::new(a.get(q, q).re, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * jpp + vkq * jqp);
        v.set(k, q, vkp * jpq + vkq * jqq);
    }
}

/// Thin singular value decomposition `A = U · diag(s) · V†`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `m × k` with orthonormal columns, `k = min(m, n)`.
    pub u: ComplexMatrix,
    /// Descending and nonnegative.
    pub singular_values: Vec<f64>,
    /// `n × k` with orthonormal columns.
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s: Vec<f64> = self.singular_values.clone();
        &(&self.u * &ComplexMatrix::real_diag(&s)) * &self.v.adjoint()
    }
}

/// SVD through the eigendecomposition of `A†A`.
///
/// Each right singular vector is rotated so that its first component above
/// `1e-12` in modulus is real and positive; the left vectors follow as
/// `A v / s`. Left vectors for vanishing singular values are completed by
/// Gram–Schmidt against the standard basis.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = (a.rows, a.cols);
    let k = m.min(n);
    let gram = &a.adjoint() * a;
    let eig = herm_eig(&gram)?;

    let mut right: Vec<Vec<C64>> = (0..k).map(|j| eig.eigenvector(j)).collect();
    for col in &mut right {
        fix_phase(col);
    }
    // ‖A v‖ is far more accurate than sqrt(λ) for small singular values.
    let mut pairs: Vec<(f64, Vec<C64>, Vec<C64>)> = right
        .into_iter()
        .map(|v| {
            let av = a.mul_vec(&v);
            (vec_norm(&av), av, v)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let s_max = pairs.first().map_or(0.0, |p| p.0);
    let cutoff = 1e-12 * s_max.max(f64::MIN_POSITIVE);
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(k);
    let mut singular_values = Vec::with_capacity(k);
    let mut right_cols = Vec::with_capacity(k);
    let mut pending = Vec::new();
    for (idx, (s, av, v)) in pairs.into_iter().enumerate() {
        if s > cutoff {
            left.push(av.iter().map(|z| z / s).collect());
        } else {
            left.push(vec![ZERO; m]);
            pending.push(idx);
        }
        singular_values.push(s);
        right_cols.push(v);
    }
    complete_orthonormal(&mut left, &pending, m);

    Ok(Svd {
        u: ComplexMatrix::from_columns(&left),
        singular_values,
        v: ComplexMatrix::from_columns(&right_cols),
    })
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Rotates `v` so its first significant component is real positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    if let Some(lead) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Extends orthonormal `columns` to a full orthonormal basis of `dim`-space.
pub fn complete_basis(columns: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    assert!(columns.len() <= dim);
    let mut out: Vec<Vec<C64>> = columns.to_vec();
    let pending: Vec<usize> = (columns.len()..dim).collect();
    out.resize(dim, vec![ZERO; dim]);
    complete_orthonormal(&mut out, &pending, dim);
    out
}

/// Fills the columns listed in `pending` with unit vectors orthogonal to all others.
fn complete_orthonormal(columns: &mut [Vec<C64>], pending: &[usize], dim: usize) {
    let mut candidate = 0;
    for &slot in pending {
        loop {
            assert!(candidate < dim, "cannot complete an orthonormal set");
            let mut e = vec![ZERO; dim];
            e[candidate] = ONE;
            candidate += 1;
            for (idx, col) in columns.iter().enumerate() {
                if idx == slot || (pending.contains(&idx) && vec_norm(col) == 0.0) {
                    continue;
                }
                let overlap = inner(col, &e);
                for (x, c) in e.iter_mut().zip(col) {
                    *x -= overlap * c;
                }
            }
            let norm = vec_norm(&e);
            if norm > 1e-6 {
                columns[slot] = e.into_iter().map(|z| z / norm).collect();
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma(k: usize) -> ComplexMatrix {
        match k {
            1 => ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
            2 => ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
            3 => ComplexMatrix::real_diag(&[1.0, -1.0]),
            _ => ComplexMatrix::identity(2),
        }
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        (&a + &a.adjoint()).scale_real(0.5)
    }

    fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        // Eigenvectors of a random Hermitian matrix form a unitary.
        herm_eig(&random_hermitian(rng, n)).unwrap().eigenvectors
    }

    #[test]
    fn kron_identity_and_diagonal() {
        let i4 = kron(&sigma(0), &sigma(0));
        assert_eq!(i4, ComplexMatrix::identity(4));
        let zz = kron(&sigma(3), &sigma(3));
        assert_eq!(zz, ComplexMatrix::real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_x_y_matches_block_expansion() {
        // σ1 ⊗ σ2 = [[0, σ2], [σ2, 0]]: anti-diagonal (-i, i, -i, i) read bottom-up.
        let xy = kron(&sigma(1), &sigma(2));
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(0, 3, -I);
        expected.set(1, 2, I);
        expected.set(2, 1, -I);
        expected.set(3, 0, I);
        assert_eq!(xy, expected);
    }

    #[test]
    fn kron_trace_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let lhs = kron(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let ra = random_hermitian(&mut rng, 2);
            let rb = random_hermitian(&mut rng, 4);
            let rb = rb.scale(ONE / rb.trace());
            let pt = partial_trace(&kron(&ra, &rb), &[2, 4], &[0]).unwrap();
            assert!(pt.max_abs_diff(&ra) <= 1e-12);
        }
    }

    #[test]
    fn partial_trace_singlet_by_index_sum() {
        let h = 0.5;
        let rho = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, h, -h, 0.0],
            &[0.0, -h, h, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        // Oracle: (ρ_a)_{ij} = Σ_k ρ_{2i+k, 2j+k}
        let mut oracle = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let v = (0..2).map(|k| rho.get(2 * i + k, 2 * j + k)).sum();
                oracle.set(i, j, v);
            }
        }
        let got = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(got.max_abs_diff(&oracle) <= 1e-15);
        assert!(got.max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 0.5])) <= 1e-15);
        let got_b = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(got_b.max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 0.5])) <= 1e-15);
    }

    #[test]
    fn partial_trace_keeps_ascending_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let cm = ComplexMatrix::real_diag(&[0.25, 0.75]);
        let full = kron(&kron(&a, &cm), &b);
        let kept = partial_trace(&full, &[2, 2, 2], &[2, 0]).unwrap();
        assert!(kept.max_abs_diff(&kron(&a, &b)) <= 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn eig_diagonal_and_pauli() {
        let d = herm_eig(&ComplexMatrix::real_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 1.0]);
        let x = herm_eig(&sigma(1)).unwrap();
        assert!((x.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((x.eigenvalues[1] + 1.0).abs() < 1e-14);
        let y = herm_eig(&sigma(2)).unwrap();
        assert!((y.eigenvalues[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_singlet_density_is_projector() {
        let h = 0.5;
        let rho = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, h, -h, 0.0],
            &[0.0, -h, h, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let e = herm_eig(&rho).unwrap();
        let expected = [1.0, 0.0, 0.0, 0.0];
        for (got, want) in e.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14, "{:?}", e.eigenvalues);
        }
    }

    #[test]
    fn eig_ties_keep_index_order() {
        let e = herm_eig(&ComplexMatrix::real_diag(&[2.0, 5.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![5.0, 2.0, 2.0]);
        assert_eq!(e.eigenvector(1)[0], ONE);
        assert_eq!(e.eigenvector(2)[2], ONE);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(herm_eig(&rect).is_err());
    }

    #[test]
    fn eig_random_hermitian_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..200 {
            let n = 1 + trial % 8;
            let h = random_hermitian(&mut rng, n);
            let e = herm_eig(&h).unwrap();
            let hn = h.frobenius_norm();
            let recon = e.map_spectrum(|l| l);
            assert!(recon.max_abs_diff(&h) <= 1e-9 * hn.max(1e-300) + 1e-15);
            assert!((&recon - &h).frobenius_norm() <= 1e-9 * hn);
            assert!(e.eigenvectors.is_unitary(1e-10));
            for k in 0..n {
                let v = e.eigenvector(k);
                let hv = h.mul_vec(&v);
                let resid: f64 = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * e.eigenvalues[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(resid <= 1e-10 * hn, "residual {resid}");
            }
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_zero_matrix() {
        let e = herm_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn svd_examples() {
        let s = svd(&ComplexMatrix::real_diag(&[2.0, 1.0])).unwrap();
        assert!((s.singular_values[0] - 2.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);

        let u = [c(1.0, 0.5), c(-2.0, 0.0)];
        let v = [c(0.0, 1.0), c(3.0, -1.0)];
        let rank1 = ComplexMatrix::outer(&u, &v);
        let s = svd(&rank1).unwrap();
        assert!((s.singular_values[0] - vec_norm(&u) * vec_norm(&v)).abs() < 1e-12);
        assert!(s.singular_values[1].abs() < 1e-12);
        assert!(s.u.has_orthonormal_columns(1e-10));
        assert!(s.reconstruct().max_abs_diff(&rank1) < 1e-12);

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = ComplexMatrix::from_real_rows(&[&[0.0, r], &[-r, 0.0]]);
        let s = svd(&singlet).unwrap();
        assert!((s.singular_values[0] - r).abs() < 1e-14);
        assert!((s.singular_values[1] - r).abs() < 1e-14);
        assert!(s.reconstruct().max_abs_diff(&singlet) < 1e-14);
    }

    #[test]
    fn svd_rectangular_and_phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (m, n) in [(2, 4), (4, 2), (3, 3), (1, 8), (8, 1)] {
            let a = random_matrix(&mut rng, m, n);
            let s = svd(&a).unwrap();
            assert_eq!(s.singular_values.len(), m.min(n));
            assert!(s.u.has_orthonormal_columns(1e-10));
            assert!(s.v.has_orthonormal_columns(1e-10));
            assert!(s.reconstruct().max_abs_diff(&a) < 1e-12);
            for j in 0..s.v.cols() {
                let lead = s.v.column(j).into_iter().find(|z| z.norm() > 1e-12).unwrap();
                assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
            }
        }
    }

    #[test]
    fn svd_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 4, 4);
            let ul = random_unitary(&mut rng, 4);
            let ur = random_unitary(&mut rng, 4);
            let s0 = svd(&a).unwrap().singular_values;
            let s1 = svd(&(&(&ul * &a) * &ur)).unwrap().singular_values;
            for (x, y) in s0.iter().zip(&s1) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
    }
}
