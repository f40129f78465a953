//! Standard operators and validated states.
//!
//! Transposes are always taken in the computational basis.

use num_complex::Complex64 as C64;

use crate::linalg::{self, eig_hermitian, kron, ComplexMatrix};
use crate::tolerances;
use crate::{Error, Result};

/// Hermitian matrix together with its subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "subsystem dimensions {dims:?} do not multiply to {}",
                matrix.rows()
            )));
        }
        if !matrix.is_hermitian(tolerances::HERMITICITY) {
            return Err(Error::NotHermitian {
                deviation: matrix.hermitian_deviation(),
            });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            dims,
        })
    }

    /// Single-system operator.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, vec![n])
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self {
            matrix: matrix.hermitian_part(),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn transpose(&self) -> Self {
        Self::from_trusted(self.matrix.transpose(), self.dims.clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_trusted(self.matrix.scale_real(s), self.dims.clone())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_trusted(kron(&self.matrix, &other.matrix), dims)
    }

    pub fn eigen(&self) -> Result<linalg::EigenDecomposition> {
        eig_hermitian(&self.matrix)
    }
}

/// Trace-one positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        validate_density(&matrix, &dims)
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        validate_density(&matrix, &[n])
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("state vector has zero or non-finite norm".into()));
        }
        Self::from_matrix(ComplexMatrix::projector(psi).scale_real(1.0 / norm))
    }

    pub fn pure_with_dims(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let rho = Self::pure(psi)?;
        Self::new(rho.op.matrix, dims)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self {
            op: HermitianOperator::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64), vec![d]),
        })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self {
            op: HermitianOperator::from_trusted(matrix, dims),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn transpose(&self) -> Self {
        Self {
            op: self.op.transpose(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            op: self.op.kron(&other.op),
        }
    }

    pub fn purity(&self) -> f64 {
        self.matrix().trace_product(self.matrix()).re
    }

    pub fn eigen(&self) -> Result<linalg::EigenDecomposition> {
        self.op.eigen()
    }

    /// Same matrix with different subsystem dimensions.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        HermitianOperator::new(self.matrix().clone(), dims).map(|op| Self { op })
    }
}

impl From<DensityMatrix> for HermitianOperator {
    fn from(rho: DensityMatrix) -> Self {
        rho.op
    }
}

/// Checks Hermiticity, unit trace and positivity, naming the first violated invariant.
pub fn validate_density(m: &ComplexMatrix, dims: &[usize]) -> Result<DensityMatrix> {
    let op = HermitianOperator::new(m.clone(), dims.to_vec())?;
    let trace = op.matrix.trace().re;
    if (trace - 1.0).abs() > tolerances::UNIT_TRACE {
        return Err(Error::NotUnitTrace { trace });
    }
    let min_eigenvalue = op.eigen()?.min_eigenvalue();
    if min_eigenvalue < tolerances::PSD_FLOOR {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(DensityMatrix { op })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> HermitianOperator {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let data = match axis {
        Axis::X => vec![z, one, one, z],
        Axis::Y => vec![z, -i, i, z],
        Axis::Z => vec![one, z, z, -one],
    };
    HermitianOperator::from_trusted(ComplexMatrix::from_vec(2, 2, data).expect("finite"), vec![2])
}

/// Generalized Gell-Mann matrices with `Tr(G_n G_m) = 2δ_nm`.
///
/// Order: for every `k < l` the symmetric then antisymmetric element, followed by
/// the `d − 1` diagonal elements. For `d = 2` this is `(σ_x, σ_y, σ_z)`.
pub fn su_generators(d: usize) -> Result<Vec<HermitianOperator>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut out = Vec::with_capacity(d * d - 1);
    for k in 0..d {
        for l in k + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(k, l)] = C64::new(1.0, 0.0);
            s[(l, k)] = C64::new(1.0, 0.0);
            out.push(HermitianOperator::from_trusted(s, vec![d]));
            let mut a = ComplexMatrix::zeros(d, d);
            a[(k, l)] = C64::new(0.0, -1.0);
            a[(l, k)] = C64::new(0.0, 1.0);
            out.push(HermitianOperator::from_trusted(a, vec![d]));
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(HermitianOperator::from_trusted(ComplexMatrix::diag_real(&diag), vec![d]));
    }
    Ok(out)
}

/// Spin-`j` operators `(j_x, j_y, j_z)` with `j_z = diag(−j, …, +j)` and
/// `(j₊)_{m,n} = δ_{m,n+1} √(j(j+1) − (j−n)(j+1−n))` (1-based indices).
///
/// For `j = 1/2` the triple is `(σ_x/2, −σ_y/2, −σ_z/2)`, which is unitarily
/// equivalent to `(σ_x, σ_y, σ_z)/2` via conjugation by `σ_x`.
pub fn angular_momentum(j: f64) -> Result<(HermitianOperator, HermitianOperator, HermitianOperator)> {
    let two_j = 2.0 * j;
    if !(two_j.is_finite() && two_j >= 1.0 && (two_j - two_j.round()).abs() < 1e-12) || two_j > 64.0 {
        return Err(Error::InvalidSpin(j));
    }
    let dim = two_j.round() as usize + 1;
    let mut jplus = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        let nf = n as f64;
        let v = (j * (j + 1.0) - (j - nf) * (j + 1.0 - nf)).sqrt();
        // 1-based (n+1, n) is 0-based (n, n−1).
        jplus[(n, n - 1)] = C64::new(v, 0.0);
    }
    let jminus = jplus.dagger();
    let jx = (&jplus + &jminus).scale_real(0.5);
    let jy = (&jplus - &jminus).scale(C64::new(0.0, -0.5));
    let jz = ComplexMatrix::diag_real(&(0..dim).map(|k| -j + k as f64).collect::<Vec<_>>());
    Ok((
        HermitianOperator::from_trusted(jx, vec![dim]),
        HermitianOperator::from_trusted(jy, vec![dim]),
        HermitianOperator::from_trusted(jz, vec![dim]),
    ))
}

pub fn basis_vector(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// `(1/√d) Σ_k |k⟩|k⟩`.
pub fn maximally_entangled_vector(d: usize) -> Vec<C64> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for k in 0..d {
        v[k * d + k] = C64::new(s, 0.0);
    }
    v
}

pub fn maximally_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(DensityMatrix::from_trusted(
        ComplexMatrix::projector(&maximally_entangled_vector(d)),
        vec![d, d],
    ))
}

/// `F|m⟩|n⟩ = |n⟩|m⟩`.
pub fn flip_operator(d: usize) -> Result<HermitianOperator> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut f = ComplexMatrix::zeros(d * d, d * d);
    for m in 0..d {
        for n in 0..d {
            f[(n * d + m, m * d + n)] = C64::new(1.0, 0.0);
        }
    }
    Ok(HermitianOperator::from_trusted(f, vec![d, d]))
}

/// `(I + F)/2`.
pub fn symmetric_projector(d: usize) -> Result<HermitianOperator> {
    let f = flip_operator(d)?;
    let p = (&ComplexMatrix::identity(d * d) + f.matrix()).scale_real(0.5);
    Ok(HermitianOperator::from_trusted(p, vec![d, d]))
}
