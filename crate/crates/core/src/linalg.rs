//! Dense complex linear algebra for small operators (d ≤ 16, realified ≤ 64).
//!
//! Storage is row-major. Multipartite index conventions follow the Kronecker
//! product: the first subsystem is the most significant digit.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::tolerances;
use crate::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    /// Real matrix from row-major entries. Panics on a length mismatch; meant for literals.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "from_real: wrong entry count");
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(psi: &[C64]) -> Self {
        Self::outer(psi, psi)
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

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
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

    /// `‖A − A†‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol * self.frobenius_norm().max(1.0)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply: dimension mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    /// `Tr(A·B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += self[(r, c)] * other[(c, r)];
            }
        }
        acc
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let a_psi = self.apply(psi);
        psi.iter().zip(&a_psi).map(|(p, q)| p.conj() * q).sum()
    }

    /// `W† A W`.
    pub fn compress(&self, w: &Self) -> Self {
        w.dagger().matmul(&self.matmul(w))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add_assign: shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Which factor of a bipartite system an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// `(kron(a,b))[(i·rb+k),(j·cb+l)] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

fn check_multipartite(m: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for subsystem dimensions {dims:?}",
            m.rows, m.cols
        )));
    }
    Ok(())
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Traces out `subsystem` of a bipartite operator on `dims = (d1, d2)`.
///
/// `Subsystem::Second` gives `Tr₂(m)`, a `d1×d1` operator.
pub fn partial_trace(
    m: &ComplexMatrix,
    subsystem: Subsystem,
    dims: (usize, usize),
) -> Result<ComplexMatrix> {
    let keep = match subsystem {
        Subsystem::First => [1],
        Subsystem::Second => [0],
    };
    partial_trace_keep(m, &[dims.0, dims.1], &keep)
}

/// Reduced operator on the subsystems listed in `keep` (ascending), all others traced out.
pub fn partial_trace_keep(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_multipartite(m, dims)?;
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!(
            "kept subsystems {keep:?} must be ascending indices below {}",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let nk: usize = keep_dims.iter().product();
    let nt: usize = traced_dims.iter().product();

    let mut kd = vec![0; keep.len()];
    let mut td = vec![0; traced.len()];
    let mut full = vec![0; dims.len()];
    // Full index for every (kept, traced) combination.
    let mut index = vec![0usize; nk * nt];
    for a in 0..nk {
        digits(a, &keep_dims, &mut kd);
        for t in 0..nt {
            digits(t, &traced_dims, &mut td);
            for (slot, &k) in keep.iter().enumerate() {
                full[k] = kd[slot];
            }
            for (slot, &k) in traced.iter().enumerate() {
                full[k] = td[slot];
            }
            index[a * nt + t] = compose(&full, dims);
        }
    }
    let mut out = ComplexMatrix::zeros(nk, nk);
    for a in 0..nk {
        for b in 0..nk {
            let mut acc = ZERO;
            for t in 0..nt {
                acc += m[(index[a * nt + t], index[b * nt + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Transposes `subsystem` of a bipartite operator on `dims = (d1, d2)` in the computational basis.
pub fn partial_transpose(
    m: &ComplexMatrix,
    subsystem: Subsystem,
    dims: (usize, usize),
) -> Result<ComplexMatrix> {
    let mask = match subsystem {
        Subsystem::First => [true, false],
        Subsystem::Second => [false, true],
    };
    partial_transpose_mask(m, &[dims.0, dims.1], &mask)
}

/// Transposes every subsystem whose `mask` entry is set.
pub fn partial_transpose_mask(m: &ComplexMatrix, dims: &[usize], mask: &[bool]) -> Result<ComplexMatrix> {
    check_multipartite(m, dims)?;
    if mask.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "mask of length {} for {} subsystems",
            mask.len(),
            dims.len()
        )));
    }
    let n = m.rows;
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        digits(r, dims, &mut rd);
        for c in 0..n {
            digits(c, dims, &mut cd);
            let mut nr = rd.clone();
            let mut nc = cd.clone();
            for k in 0..dims.len() {
                if mask[k] {
                    nr[k] = cd[k];
                    nc[k] = rd[k];
                }
            }
            out[(compose(&nr, dims), compose(&nc, dims))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Unitary permutation of tensor factors: maps `|i_0 … i_{K-1}⟩` to the state whose
/// factor `perm[k]` carries `i_k`.
pub fn subsystem_permutation(dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    assert_eq!(dims.len(), perm.len());
    let n: usize = dims.iter().product();
    let mut new_dims = vec![0; dims.len()];
    for (k, &p) in perm.iter().enumerate() {
        new_dims[p] = dims[k];
    }
    let mut out = ComplexMatrix::zeros(n, n);
    let mut d = vec![0; dims.len()];
    let mut nd = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut d);
        for (k, &p) in perm.iter().enumerate() {
            nd[p] = d[k];
        }
        out[(compose(&nd, &new_dims), i)] = ONE;
    }
    out
}

/// Entry-wise product.
pub fn hadamard_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_shape(b, "hadamard_product")?;
    Ok(ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

/// Real symmetric embedding `[[Re h, −Im h], [Im h, Re h]]` of a Hermitian matrix.
///
/// `h ⪰ 0` iff the embedding is PSD; each eigenvalue of `h` appears twice, and
/// `⟨realify(a), realify(b)⟩ = 2·Re Tr(a b)`.
pub fn realify(h: &ComplexMatrix) -> Result<DMatrix<f64>> {
    if !h.is_hermitian(tolerances::HERMITICITY) {
        return Err(Error::NotHermitian {
            deviation: h.hermitian_deviation(),
        });
    }
    Ok(realify_unchecked(h))
}

pub(crate) fn realify_unchecked(h: &ComplexMatrix) -> DMatrix<f64> {
    let n = h.rows;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            out[(r, c)] = z.re;
            out[(r + n, c + n)] = z.re;
            out[(r, c + n)] = -z.im;
            out[(r + n, c)] = z.im;
        }
    }
    out
}

/// Inverse of [`realify`]. Averages the two copies, so any real symmetric PSD
/// input maps to a Hermitian PSD output.
pub fn derealify(x: &DMatrix<f64>) -> Result<ComplexMatrix> {
    if x.nrows() != x.ncols() || !x.nrows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "derealify needs an even square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let n = x.nrows() / 2;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let re = 0.5 * (x[(r, c)] + x[(r + n, c + n)]);
        let im = 0.5 * (x[(r + n, c)] - x[(r, c + n)]);
        C64::new(re, im)
    }))
}

/// Coordinates of a Hermitian matrix in the orthonormal basis
/// `{e_kk} ∪ {(e_kl + e_lk)/√2} ∪ {i(e_kl − e_lk)/√2}` (k < l) under `Re Tr(A B)`.
///
/// The layout is: `n` diagonal entries, then for every `k < l` the pair
/// `(√2·Re A_kl, √2·Im A_kl)`.
pub fn hermitian_coordinates(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.rows;
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push(a[(k, k)].re);
    }
    let s = std::f64::consts::SQRT_2;
    for k in 0..n {
        for l in k + 1..n {
            // Average the two triangles so slightly non-Hermitian input is projected.
            let z = 0.5 * (a[(k, l)] + a[(l, k)].conj());
            out.push(s * z.re);
            out.push(s * z.im);
        }
    }
    out
}

/// Inverse of [`hermitian_coordinates`].
pub fn from_hermitian_coordinates(n: usize, coords: &[f64]) -> ComplexMatrix {
    assert_eq!(coords.len(), n * n, "hermitian coordinate count");
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        a[(k, k)] = C64::new(coords[k], 0.0);
    }
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = n;
    for k in 0..n {
        for l in k + 1..n {
            let z = C64::new(coords[idx] * inv, coords[idx + 1] * inv);
            a[(k, l)] = z;
            a[(l, k)] = z.conj();
            idx += 2;
        }
    }
    a
}

/// Spectral decomposition `A = V Λ V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|k| v[(r, k)] * v[(c, k)].conj() * fl[k]).sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if !a.is_hermitian(tolerances::HERMITICITY) {
        return Err(Error::NotHermitian {
            deviation: a.hermitian_deviation(),
        });
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let target = tolerances::JACOBI_OFFDIAG * scale.max(f64::MIN_POSITIVE);

    let off_norm = |m: &ComplexMatrix| -> f64 {
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    acc += m[(r, c)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = n <= 1 || off_norm(&m) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == tolerances::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE || mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = D·J with D = diag(1, e^{-iφ}) on (p,q) and J the real rotation.
                let upp = C64::new(c, 0.0);
                let upq = C64::new(s, 0.0);
                let uqp = phase.conj() * (-s);
                let uqq = phase.conj() * c;
                // Columns: M ← M U.
                for r in 0..n {
                    let mp = m[(r, p)];
                    let mq = m[(r, q)];
                    m[(r, p)] = mp * upp + mq * uqp;
                    m[(r, q)] = mp * upq + mq * uqq;
                }
                // Rows: M ← U† M.
                for col in 0..n {
                    let mp = m[(p, col)];
                    let mq = m[(q, col)];
                    m[(p, col)] = upp.conj() * mp + uqp.conj() * mq;
                    m[(q, col)] = upq.conj() * mp + uqq.conj() * mq;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = vp * upp + vq * uqp;
                    v[(r, q)] = vp * upq + vq * uqq;
                }
            }
        }
        converged = off_norm(&m) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Orthonormal basis of the column span of `a`, via eigendecomposition of `a a†`.
pub fn range_basis(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let gram = a.matmul(&a.dagger());
    let eig = eig_hermitian(&gram)?;
    let cols: Vec<usize> = (0..eig.dim())
        .filter(|&k| eig.eigenvalues[k] > tol)
        .collect();
    Ok(ComplexMatrix::from_fn(a.rows, cols.len(), |r, c| {
        eig.eigenvectors[(r, cols[c])]
    }))
}
