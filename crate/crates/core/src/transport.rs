//! Transport maps for separable couplings.
//!
//! A coupling `Σ_k p_k |Ψ_k⟩⟨Ψ_k| ⊗ |Φ_k⟩⟨Φ_k|` defines the channel with Kraus
//! operators `B_k = √p_k |Φ_k⟩⟨Ψ_k| ρ^{−1/2}`, which maps `ρ = Σ p_k|Ψ_k⟩⟨Ψ_k|`
//! to `σ = Σ p_k|Φ_k⟩⟨Φ_k|`.
//!
//! The channel reproduces the coupling from `ρ₀ = Σ p_k |Ψ_k⟩⟨Ψ_k| ⊗ |Ψ_k⟩⟨Ψ_k|`
//! only when the `|Ψ_k⟩` are pairwise orthogonal; otherwise `ρ^{−1/2}` mixes the
//! ensemble members and `(id⊗Φ)(ρ₀)` differs from the coupling.

use crate::linalg::{eig_hermitian, kron, ComplexMatrix};
use crate::qstates::DensityMatrix;
use crate::tolerances;
use crate::{Error, Result, C64};

/// Weighted pairs of source and target pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    weights: Vec<f64>,
    sources: Vec<Vec<C64>>,
    targets: Vec<Vec<C64>>,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, sources: Vec<Vec<C64>>, targets: Vec<Vec<C64>>) -> Result<Self> {
        if weights.is_empty() || weights.len() != sources.len() || weights.len() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights, {} sources, {} targets",
                weights.len(),
                sources.len(),
                targets.len()
            )));
        }
        let d = sources[0].len();
        if d == 0 || sources.iter().chain(&targets).any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch("ensemble vectors differ in length".into()));
        }
        if weights.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerances::EQUALITY {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        if let Some(v) = sources.iter().chain(&targets).find(|v| (norm(v) - 1.0).abs() > tolerances::EQUALITY) {
            return Err(Error::InvalidArgument(format!("vector of norm {} in ensemble", norm(v))));
        }
        Ok(Self {
            weights,
            sources,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sources[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sources(&self) -> &[Vec<C64>] {
        &self.sources
    }

    pub fn targets(&self) -> &[Vec<C64>] {
        &self.targets
    }

    fn mixture(&self, vectors: &[Vec<C64>]) -> ComplexMatrix {
        let d = self.dim();
        self.weights
            .iter()
            .zip(vectors)
            .fold(ComplexMatrix::zeros(d, d), |acc, (&p, v)| &acc + &ComplexMatrix::projector(v).scale_real(p))
    }

    /// `Σ p_k |Ψ_k⟩⟨Ψ_k|`.
    pub fn source_state(&self) -> ComplexMatrix {
        self.mixture(&self.sources)
    }

    /// `Σ p_k |Φ_k⟩⟨Φ_k|`.
    pub fn target_state(&self) -> ComplexMatrix {
        self.mixture(&self.targets)
    }

    fn pairs(&self, left: &[Vec<C64>], conjugate: bool) -> DensityMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for ((&p, a), b) in self.weights.iter().zip(left).zip(&self.targets) {
            let mut pa = ComplexMatrix::projector(a);
            if conjugate {
                pa = pa.transpose();
            }
            m = &m + &kron(&pa, &ComplexMatrix::projector(b)).scale_real(p);
        }
        DensityMatrix::from_trusted(m, vec![d, d])
    }

    /// `Σ p_k |Ψ_k⟩⟨Ψ_k| ⊗ |Φ_k⟩⟨Φ_k|`.
    pub fn coupling(&self) -> DensityMatrix {
        self.pairs(&self.sources, false)
    }

    /// `Σ p_k (|Ψ_k⟩⟨Ψ_k|)ᵀ ⊗ |Φ_k⟩⟨Φ_k|`, the coupling in the DPT convention.
    pub fn transposed_coupling(&self) -> DensityMatrix {
        self.pairs(&self.sources, true)
    }

    /// `ρ₀ = Σ p_k |Ψ_k⟩⟨Ψ_k| ⊗ |Ψ_k⟩⟨Ψ_k|`.
    pub fn reference_state(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for (&p, a) in self.weights.iter().zip(&self.sources) {
            let pa = ComplexMatrix::projector(a);
            m = &m + &kron(&pa, &pa).scale_real(p);
        }
        DensityMatrix::from_trusted(m, vec![d, d])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    notes: Vec<String>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument("a channel needs at least one Kraus operator".into()))?;
        let (r, c) = (first.rows(), first.cols());
        if operators.iter().any(|b| b.rows() != r || b.cols() != c) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        Ok(Self {
            operators,
            notes: Vec::new(),
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(d)],
            notes: Vec::new(),
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].cols()
    }

    /// `Σ_k B_k† B_k`.
    pub fn completeness(&self) -> ComplexMatrix {
        let d = self.input_dim();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, b| &acc + &b.dagger().matmul(b))
    }

    /// `Φ(X) = Σ_k B_k X B_k†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.input_dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {d} applied to a {}x{} matrix",
                x.rows(),
                x.cols()
            )));
        }
        let out = self.operators[0].rows();
        Ok(self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(out, out), |acc, b| &acc + &b.matmul(x).matmul(&b.dagger())))
    }

    /// `(id ⊗ Φ)(X)` for `X` on `d_1 × d`.
    pub fn apply_to_second(&self, x: &ComplexMatrix, d1: usize) -> Result<ComplexMatrix> {
        let d = self.input_dim();
        if x.rows() != d1 * d || x.cols() != d1 * d {
            return Err(Error::DimensionMismatch(format!(
                "expected a {0}x{0} bipartite matrix, got {1}x{2}",
                d1 * d,
                x.rows(),
                x.cols()
            )));
        }
        let id = ComplexMatrix::identity(d1);
        let out = d1 * self.operators[0].rows();
        Ok(self.operators.iter().fold(ComplexMatrix::zeros(out, out), |acc, b| {
            let k = kron(&id, b);
            &acc + &k.matmul(x).matmul(&k.dagger())
        }))
    }
}

/// Orthogonal projector onto the support of `rho`.
pub fn support_projector(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(rho.matrix())?;
    Ok(eig.map(|l| if l > tolerances::SUPPORT { 1.0 } else { 0.0 }))
}

/// `ρ^{−1/2}` on the support; eigenvalues at or below the support threshold map to zero.
pub fn inverse_sqrt(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(rho.matrix())?;
    Ok(eig.map(|l| if l > tolerances::SUPPORT { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Kraus operators `B_k = √p_k |Φ_k⟩⟨Ψ_k| ρ^{−1/2}`.
pub fn build_channel(ensemble: &Ensemble, rho: &DensityMatrix) -> Result<KrausChannel> {
    if ensemble.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ensemble of dimension {} for a state of dimension {}",
            ensemble.dim(),
            rho.dim()
        )));
    }
    let deviation = ensemble.source_state().max_abs_diff(rho.matrix());
    if deviation > tolerances::EQUALITY {
        return Err(Error::EnsembleMismatch {
            which: "source",
            deviation,
        });
    }
    let inv = inverse_sqrt(rho)?;
    let operators = ensemble
        .weights()
        .iter()
        .zip(ensemble.sources())
        .zip(ensemble.targets())
        .map(|((&p, psi), phi)| ComplexMatrix::outer(phi, psi).matmul(&inv).scale_real(p.sqrt()))
        .collect();
    let mut channel = KrausChannel::new(operators)?;
    let rank = eig_hermitian(rho.matrix())?
        .eigenvalues
        .iter()
        .filter(|&&l| l > tolerances::SUPPORT)
        .count();
    if rank < rho.dim() {
        channel
            .notes
            .push(format!("state has rank {rank} < {}; the map is trace preserving on its support only", rho.dim()));
    }
    Ok(channel)
}

/// Splits `v` on `C^d ⊗ C^d` as `ψ ⊗ φ`, failing when it is not a product within tolerance.
fn factor_product(v: &[C64], d: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    let m = ComplexMatrix::from_fn(d, d, |a, b| v[a * d + b]);
    let eig = eig_hermitian(&m.matmul(&m.dagger()))?;
    let psi = eig.eigenvector(d - 1);
    let mut phi: Vec<C64> = (0..d).map(|b| (0..d).map(|a| psi[a].conj() * m[(a, b)]).sum()).collect();
    let n = norm(&phi);
    phi.iter_mut().for_each(|z| *z /= n);
    let rebuilt: Vec<C64> = crate::linalg::kron_vec(&psi, &phi).iter().map(|z| z * n).collect();
    let deviation = rebuilt.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if deviation > tolerances::EQUALITY {
        return Err(Error::EnsembleMismatch {
            which: "product factorization",
            deviation,
        });
    }
    Ok((psi, phi))
}

/// Reads an ensemble off the spectral decomposition of a coupling whose
/// eigenvectors are all product vectors (classical-classical couplings).
pub fn ensemble_from_coupling(coupling: &DensityMatrix) -> Result<Ensemble> {
    let n = coupling.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::DimensionMismatch(format!("coupling of dimension {n} is not d×d")));
    }
    let eig = coupling.eigen()?;
    let mut weights = Vec::new();
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for k in 0..n {
        let p = eig.eigenvalues[k];
        if p <= tolerances::SUPPORT {
            continue;
        }
        let (psi, phi) = factor_product(&eig.eigenvector(k), d)?;
        weights.push(p);
        sources.push(psi);
        targets.push(phi);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|p| *p /= total);
    Ensemble::new(weights, sources, targets)
}
