//! Variance, quantum Fisher information, skew information and the generalized
//! family generated by standard matrix-monotone functions.
//!
//! Kernels (`Q`, `Y_f`, `Z_f`) are real symmetric matrices expressed in the
//! eigenbasis of the state; [`apply_kernel`] maps them back to the computational basis.

use std::fmt;
use std::sync::Arc;

use crate::linalg::{eig_hermitian, hadamard_product, ComplexMatrix};
use crate::qstates::{DensityMatrix, HermitianOperator};
use crate::tolerances;
use crate::{Error, Result, C64};

/// A standard matrix-monotone function `f` with mean `m_f(a,b) = a·f(b/a)`.
#[derive(Clone)]
pub struct MonotoneFunction {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    f_zero: f64,
}

impl fmt::Debug for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFunction")
            .field("name", &self.name)
            .field("f_zero", &self.f_zero)
            .finish()
    }
}

impl MonotoneFunction {
    /// `f(x) = (1+x)/2`, the arithmetic mean. Generates the usual QFI.
    pub fn f_max() -> Self {
        Self {
            name: "f_max".into(),
            f: Arc::new(|x| (1.0 + x) / 2.0),
            f_zero: 0.5,
        }
    }

    /// `f(x) = (√x+1)²/4`. Generates four times the Wigner–Yanase skew information.
    pub fn f_wy() -> Self {
        Self {
            name: "f_WY".into(),
            f: Arc::new(|x| (x.sqrt() + 1.0).powi(2) / 4.0),
            f_zero: 0.25,
        }
    }

    /// A user-supplied function, admitted after probing `f(1) = 1` and the
    /// symmetry `f(x) = x·f(1/x)` on sample points.
    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let bad = |reason: String| Error::InvalidMonotoneFunction {
            name: name.to_string(),
            reason,
        };
        let one = f(1.0);
        if (one - 1.0).abs() > 1e-12 {
            return Err(bad(format!("f(1) = {one}")));
        }
        for &x in &[1e-3, 0.1, 0.37, 0.5, 0.9, 2.0, 7.5, 100.0] {
            let (a, b) = (f(x), x * f(1.0 / x));
            if !a.is_finite() || a < 0.0 {
                return Err(bad(format!("f({x}) = {a}")));
            }
            if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(bad(format!("f({x}) = {a} but x·f(1/x) = {b}")));
            }
        }
        let f_zero = f(0.0);
        Ok(Self {
            name: name.to_string(),
            f: Arc::new(f),
            f_zero,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// `m_f(1,0) = f(0)`.
    pub fn f_zero(&self) -> f64 {
        self.f_zero
    }

    pub fn is_regular(&self) -> bool {
        self.f_zero > 0.0
    }

    /// `m_f(a,b)`, evaluated as `max·f(min/max)` with `m_f(0,0) = 0`.
    pub fn mean(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if hi <= 0.0 {
            return 0.0;
        }
        hi * self.eval(lo.max(0.0) / hi)
    }

    fn require_regular(&self) -> Result<()> {
        if self.is_regular() {
            Ok(())
        } else {
            Err(Error::IrregularFunction {
                name: self.name.clone(),
                f_zero: self.f_zero,
            })
        }
    }
}

/// Clamps negative eigenvalues and rounding noise to zero.
fn snap(l: f64) -> f64 {
    if l < tolerances::EIGEN_NOISE {
        0.0
    } else {
        l
    }
}

/// Eigendecomposition of a state with degeneracy clustering.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    /// Eigenvalues with negatives and rounding noise snapped to zero, ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors `|k⟩`.
    pub eigenvectors: ComplexMatrix,
    pub deg_tol: f64,
}

impl SpectralContext {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        let eig = eig_hermitian(rho.matrix())?;
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().map(|&l| snap(l)).collect(),
            eigenvectors: eig.eigenvectors,
            deg_tol: tolerances::DEGENERACY,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `|λ_k − λ_l| < deg_tol`.
    pub fn same_cluster(&self, k: usize, l: usize) -> bool {
        (self.eigenvalues[k] - self.eigenvalues[l]).abs() < self.deg_tol
    }

    /// `H_kl = ⟨k|H|l⟩`.
    pub fn to_eigenbasis(&self, h: &ComplexMatrix) -> ComplexMatrix {
        h.compress(&self.eigenvectors)
    }

    pub fn from_eigenbasis(&self, k: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.matmul(k).matmul(&self.eigenvectors.dagger())
    }

    fn kernel(&self, entry: impl Fn(f64, f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |k, l| {
            if self.same_cluster(k, l) {
                C64::new(0.0, 0.0)
            } else {
                C64::new(entry(self.eigenvalues[k], self.eigenvalues[l]), 0.0)
            }
        })
    }
}

fn check_dims(rho: &DensityMatrix, h: &HermitianOperator) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} with observable of dimension {}",
            rho.dim(),
            h.dim()
        )));
    }
    Ok(())
}

/// `Tr(ρH)`.
pub fn expectation(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    Ok(rho.matrix().trace_product(h.matrix()).re)
}

/// `⟨H²⟩ − ⟨H⟩²`.
pub fn variance(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    let h2 = h.matrix().matmul(h.matrix());
    let mean = rho.matrix().trace_product(h.matrix()).re;
    Ok(rho.matrix().trace_product(&h2).re - mean * mean)
}

/// `2 Σ_{kl} (λ_k−λ_l)²/(λ_k+λ_l) |H_kl|²`.
pub fn qfi(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    gen_qfi(rho, h, &MonotoneFunction::f_max())
}

/// `Tr(H²ρ) − Tr(H√ρ H√ρ)`.
pub fn skew_information(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    let sqrt_rho = eig_hermitian(rho.matrix())?.map(|l| snap(l).sqrt());
    let hm = h.matrix();
    let h2 = hm.matmul(hm);
    let cross = hm.matmul(&sqrt_rho).matmul(hm).matmul(&sqrt_rho).trace().re;
    Ok(rho.matrix().trace_product(&h2).re - cross)
}

/// `2 Σ m_f(1,0)/m_f(λ_k,λ_l) (λ_k−λ_l)² |H_kl|²`, skipping pairs in the kernel of ρ.
pub fn gen_qfi(rho: &DensityMatrix, h: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    check_dims(rho, h)?;
    f.require_regular()?;
    let ctx = SpectralContext::new(rho)?;
    Ok(gen_qfi_in(&ctx, &ctx.to_eigenbasis(h.matrix()), f))
}

fn gen_qfi_in(ctx: &SpectralContext, hk: &ComplexMatrix, f: &MonotoneFunction) -> f64 {
    let n = ctx.dim();
    let mut acc = 0.0;
    for k in 0..n {
        for l in 0..n {
            let (a, b) = (ctx.eigenvalues[k], ctx.eigenvalues[l]);
            if a + b < tolerances::KERNEL || ctx.same_cluster(k, l) {
                continue;
            }
            acc += f.f_zero() / f.mean(a, b) * (a - b).powi(2) * hk[(k, l)].norm_sqr();
        }
    }
    2.0 * acc
}

/// `½ Σ m_f(λ_k,λ_l)/m_f(1,0) |H_kl|² − |Σ λ_k H_kk|² / (2 m_f(1,0))`.
pub fn gen_variance(rho: &DensityMatrix, h: &HermitianOperator, f: &MonotoneFunction) -> Result<f64> {
    check_dims(rho, h)?;
    f.require_regular()?;
    let ctx = SpectralContext::new(rho)?;
    let hk = ctx.to_eigenbasis(h.matrix());
    let n = ctx.dim();
    let mut acc = 0.0;
    for k in 0..n {
        for l in 0..n {
            acc += f.mean(ctx.eigenvalues[k], ctx.eigenvalues[l]) * hk[(k, l)].norm_sqr();
        }
    }
    let mean: f64 = (0..n).map(|k| ctx.eigenvalues[k] * hk[(k, k)].re).sum();
    Ok(0.5 * acc / f.f_zero() - mean * mean / (2.0 * f.f_zero()))
}

/// `(Q_{f1,f2})_kl = (X_{f1})_kl/(X_{f2})_kl` off-cluster, 0 within a cluster,
/// where `(X_f)_kl = √(m_f(1,0)/m_f(λ_k,λ_l))`.
pub fn conversion_matrix(rho: &DensityMatrix, f1: &MonotoneFunction, f2: &MonotoneFunction) -> Result<ComplexMatrix> {
    f1.require_regular()?;
    f2.require_regular()?;
    let ctx = SpectralContext::new(rho)?;
    Ok(conversion_kernel(&ctx, f1, f2))
}

pub(crate) fn conversion_kernel(ctx: &SpectralContext, f1: &MonotoneFunction, f2: &MonotoneFunction) -> ComplexMatrix {
    ctx.kernel(|a, b| {
        let num = f1.f_zero() * f2.mean(a, b);
        let den = f2.f_zero() * f1.mean(a, b);
        if den <= 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    })
}

/// `Y_f = Q_{f, f_max}`, the kernel of the separable two-copy formulation.
pub fn roof_kernel_y(rho: &DensityMatrix, f: &MonotoneFunction) -> Result<ComplexMatrix> {
    conversion_matrix(rho, f, &MonotoneFunction::f_max())
}

/// `Z_f = Q_{f, f_WY}`, the kernel of the unrestricted two-copy formulation.
pub fn general_kernel_z(rho: &DensityMatrix, f: &MonotoneFunction) -> Result<ComplexMatrix> {
    conversion_matrix(rho, f, &MonotoneFunction::f_wy())
}

/// `K ∘ H` with the Hadamard product taken in the eigenbasis of `rho`.
pub fn apply_kernel(rho: &DensityMatrix, kernel: &ComplexMatrix, h: &HermitianOperator) -> Result<HermitianOperator> {
    check_dims(rho, h)?;
    let ctx = SpectralContext::new(rho)?;
    apply_kernel_in(&ctx, kernel, h)
}

pub(crate) fn apply_kernel_in(ctx: &SpectralContext, kernel: &ComplexMatrix, h: &HermitianOperator) -> Result<HermitianOperator> {
    let hk = ctx.to_eigenbasis(h.matrix());
    let converted = hadamard_product(kernel, &hk)?;
    HermitianOperator::new(ctx.from_eigenbasis(&converted), h.dims().to_vec())
}
