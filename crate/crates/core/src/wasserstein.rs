//! Wasserstein distances, variance-like quantities and self-distance tables.
//!
//! `D²(ρ,σ) = ½ min Σ_n Tr(C_n ρ₁₂)` over couplings `ρ₁₂` in a [`CouplingSet`], where
//! `C_n = (H_nᵀ⊗I − I⊗H_n)²` (DPT) or `(H_n⊗I − I⊗H_n)²` (GMPC). The variance-like
//! quantity `V` is the same expression maximized.

pub mod sweep;

use crate::coupling::{exactness, exactness_note, Convention, CouplingProblem, CouplingSet, Diagnostics, Exactness};
use crate::linalg::{eig_hermitian, kron, ComplexMatrix};
use crate::metrology::{self, MonotoneFunction};
use crate::qstates::{DensityMatrix, HermitianOperator};
use crate::sdp::{SdpOptions, Sense};
use crate::{Error, Result, C64};

/// Observables `H₁..H_N` together with the cost convention.
#[derive(Debug, Clone)]
pub struct CostSpec {
    observables: Vec<HermitianOperator>,
    convention: Convention,
}

impl CostSpec {
    pub fn new(observables: Vec<HermitianOperator>, convention: Convention) -> Result<Self> {
        let first = observables
            .first()
            .ok_or_else(|| Error::InvalidArgument("at least one observable is needed".into()))?;
        let d = first.dim();
        if let Some(h) = observables.iter().find(|h| h.dim() != d) {
            return Err(Error::DimensionMismatch(format!(
                "observables of dimension {d} and {}",
                h.dim()
            )));
        }
        Ok(Self {
            observables,
            convention,
        })
    }

    pub fn single(h: HermitianOperator, convention: Convention) -> Self {
        Self {
            observables: vec![h],
            convention,
        }
    }

    pub fn observables(&self) -> &[HermitianOperator] {
        &self.observables
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn with_convention(&self, convention: Convention) -> Self {
        Self {
            observables: self.observables.clone(),
            convention,
        }
    }

    /// `(H_nᵀ⊗I − I⊗H_n)²` or `(H_n⊗I − I⊗H_n)²` for each observable.
    pub fn cost_terms(&self) -> Vec<ComplexMatrix> {
        let id = ComplexMatrix::identity(self.dim());
        self.observables
            .iter()
            .map(|h| {
                let left = match self.convention {
                    Convention::Dpt => h.matrix().transpose(),
                    Convention::Gmpc => h.matrix().clone(),
                };
                let diff = &kron(&left, &id) - &kron(&id, h.matrix());
                diff.matmul(&diff)
            })
            .collect()
    }

    /// `½ Σ_n C_n`, so that `D² = min Tr(K ρ₁₂)`.
    pub fn cost_operator(&self) -> ComplexMatrix {
        let d2 = self.dim() * self.dim();
        self.cost_terms()
            .iter()
            .fold(ComplexMatrix::zeros(d2, d2), |acc, c| &acc + c)
            .scale_real(0.5)
    }

    /// `½ Σ_n Re Tr(C_n ρ₁₂)`.
    pub fn evaluate(&self, coupling: &ComplexMatrix) -> f64 {
        self.cost_operator().trace_product(coupling).re
    }
}

#[derive(Debug, Clone)]
pub struct TransportResult {
    pub value: f64,
    /// Absent when the value comes from a closed form.
    pub coupling: Option<DensityMatrix>,
    pub set: CouplingSet,
    pub convention: Convention,
    pub sense: Sense,
    pub exactness: Exactness,
    pub exactness_note: Option<&'static str>,
    pub diagnostics: Option<Diagnostics>,
    pub notes: Vec<String>,
}

impl TransportResult {
    pub fn gap(&self) -> f64 {
        self.diagnostics.as_ref().map_or(0.0, |d| d.gap)
    }

    pub fn iterations(&self) -> usize {
        self.diagnostics.as_ref().map_or(0, |d| d.iterations)
    }
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix, spec: &CostSpec) -> Result<()> {
    if rho.dim() != sigma.dim() || rho.dim() != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ρ is {}-dimensional, σ {}-dimensional, observables {}-dimensional",
            rho.dim(),
            sigma.dim(),
            spec.dim()
        )));
    }
    Ok(())
}

/// `½ Σ_n [var_ρ(H_n) + var_σ(H_n) + (⟨H_n⟩_ρ − ⟨H_n⟩_σ)²]`: the cost of the product
/// coupling in either convention, and the distance whenever one state is pure.
pub fn product_closed_form(rho: &DensityMatrix, sigma: &DensityMatrix, spec: &CostSpec) -> Result<f64> {
    check_dims(rho, sigma, spec)?;
    let mut total = 0.0;
    for h in spec.observables() {
        let (mr, ms) = (metrology::expectation(rho, h)?, metrology::expectation(sigma, h)?);
        total += metrology::variance(rho, h)? + metrology::variance(sigma, h)? + (mr - ms).powi(2);
    }
    Ok(0.5 * total)
}

/// `½ Σ_n (⟨H_n⟩_ρ − ⟨H_n⟩_σ)²`, fixed by the marginals alone.
pub fn mean_shift_correction(rho: &DensityMatrix, sigma: &DensityMatrix, spec: &CostSpec) -> Result<f64> {
    check_dims(rho, sigma, spec)?;
    let mut total = 0.0;
    for h in spec.observables() {
        total += (metrology::expectation(rho, h)? - metrology::expectation(sigma, h)?).powi(2);
    }
    Ok(0.5 * total)
}

/// Optimizes the cost over a coupling set in the given direction.
pub fn optimize(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    spec: &CostSpec,
    set: CouplingSet,
    sense: Sense,
    options: &SdpOptions,
) -> Result<TransportResult> {
    check_dims(rho, sigma, spec)?;
    let d = rho.dim();
    let base = TransportResult {
        value: 0.0,
        coupling: None,
        set,
        convention: spec.convention(),
        sense,
        exactness: exactness(set, d),
        exactness_note: exactness_note(set, d),
        diagnostics: None,
        notes: Vec::new(),
    };
    if set == CouplingSet::Product {
        return Ok(TransportResult {
            value: product_closed_form(rho, sigma, spec)?,
            ..base
        });
    }
    let problem = CouplingProblem::build(rho, sigma, set, spec.convention())?;
    let sol = problem.solve(&spec.cost_operator(), sense, options)?;
    Ok(TransportResult {
        value: sol.value,
        notes: sol.diagnostics.notes.clone(),
        coupling: Some(sol.coupling),
        diagnostics: Some(sol.diagnostics),
        ..base
    })
}

pub fn distance_squared(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    spec: &CostSpec,
    set: CouplingSet,
) -> Result<TransportResult> {
    optimize(rho, sigma, spec, set, Sense::Minimize, &SdpOptions::default())
}

/// The maximized cost `V`.
pub fn wasserstein_variance(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    spec: &CostSpec,
    set: CouplingSet,
) -> Result<TransportResult> {
    optimize(rho, sigma, spec, set, Sense::Maximize, &SdpOptions::default())
}

fn shifted(mut r: TransportResult, correction: f64) -> TransportResult {
    r.value -= correction;
    r
}

/// `D̃² = D² − ½Σ(⟨H_n⟩_ρ − ⟨H_n⟩_σ)²`: the variance replaces the second moment in the cost.
pub fn tilde_distance_squared(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    spec: &CostSpec,
    set: CouplingSet,
) -> Result<TransportResult> {
    let c = mean_shift_correction(rho, sigma, spec)?;
    Ok(shifted(distance_squared(rho, sigma, spec, set)?, c))
}

pub fn tilde_variance(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    spec: &CostSpec,
    set: CouplingSet,
) -> Result<TransportResult> {
    let c = mean_shift_correction(rho, sigma, spec)?;
    Ok(shifted(wasserstein_variance(rho, sigma, spec, set)?, c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneralizedMode {
    /// GMPC cost with `Y_f ∘ H` over separable (PPT) couplings.
    SepYf,
    /// DPT cost with `Z_f ∘ H` over all couplings.
    GeneralZf,
}

/// Distance whose self-distance is `F_Q^f[ρ,H]/4`. The kernel is built in the
/// eigenbasis of `rho`; for `ρ ≠ σ` that choice is flagged in the notes.
pub fn generalized_distance_squared(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    h: &HermitianOperator,
    f: &MonotoneFunction,
    mode: GeneralizedMode,
) -> Result<TransportResult> {
    if !f.is_regular() {
        return Err(Error::IrregularFunction {
            name: f.name().to_string(),
            f_zero: f.f_zero(),
        });
    }
    let (kernel, convention, set) = match mode {
        GeneralizedMode::SepYf => (metrology::roof_kernel_y(rho, f)?, Convention::Gmpc, CouplingSet::SEPARABLE),
        GeneralizedMode::GeneralZf => (metrology::general_kernel_z(rho, f)?, Convention::Dpt, CouplingSet::General),
    };
    let modified = metrology::apply_kernel(rho, &kernel, h)?;
    let mut result = distance_squared(rho, sigma, &CostSpec::single(modified, convention), set)?;
    if rho.matrix().frobenius_distance(sigma.matrix()) > 1e-12 {
        result
            .notes
            .push("kernel built in the eigenbasis of the first state".to_string());
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfDistanceRow {
    pub name: &'static str,
    pub value: f64,
    /// Value of the matching closed-form identity.
    pub closed_form: f64,
    pub identity: &'static str,
    /// Whether the identity holds with equality in this dimension.
    pub exact: bool,
}

/// `Σ_k λ_k |k⟩⟨k| ⊗ |k⟩⟨k|` in the eigenbasis of `rho`.
pub fn classical_coupling(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let eig = rho.eigen()?;
    let d = rho.dim();
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for k in 0..d {
        let v = eig.eigenvector(k);
        let p = ComplexMatrix::projector(&v);
        m = &m + &kron(&p, &p).scale_real(eig.eigenvalues[k].max(0.0));
    }
    let t = m.trace().re;
    Ok(DensityMatrix::from_trusted(m.scale_real(1.0 / t), vec![d, d]))
}

/// Self-distances of `rho` for one observable across coupling sets, each next to
/// the closed form it should reproduce.
pub fn self_distance_table(rho: &DensityMatrix, h: &HermitianOperator) -> Result<Vec<SelfDistanceRow>> {
    let d = rho.dim();
    let dpt = CostSpec::single(h.clone(), Convention::Dpt);
    let gmpc = CostSpec::single(h.clone(), Convention::Gmpc);
    let skew = metrology::skew_information(rho, h)?;
    let fq4 = metrology::qfi(rho, h)? / 4.0;
    let var = metrology::variance(rho, h)?;

    let eig = rho.eigen()?;
    let mut cc_closed = 0.0;
    for k in 0..d {
        let v = eig.eigenvector(k);
        let m = h.matrix().expectation(&v).re;
        let m2 = h.matrix().matmul(h.matrix()).expectation(&v).re;
        cc_closed += eig.eigenvalues[k].max(0.0) * (m2 - m * m);
    }
    let cc_value = gmpc.evaluate(classical_coupling(rho)?.matrix());

    Ok(vec![
        SelfDistanceRow {
            name: "general-dpt",
            value: distance_squared(rho, rho, &dpt, CouplingSet::General)?.value,
            closed_form: skew,
            identity: "skew information I(rho,H)",
            exact: true,
        },
        SelfDistanceRow {
            name: "ppt-dpt",
            value: distance_squared(rho, rho, &dpt, CouplingSet::Ppt)?.value,
            closed_form: fq4,
            identity: "quantum Fisher information F_Q/4",
            exact: d == 2,
        },
        SelfDistanceRow {
            name: "ppt-gmpc",
            value: distance_squared(rho, rho, &gmpc, CouplingSet::Ppt)?.value,
            closed_form: fq4,
            identity: "quantum Fisher information F_Q/4",
            exact: d == 2,
        },
        SelfDistanceRow {
            name: "rho-cc",
            value: cc_value,
            closed_form: cc_closed,
            identity: "eigenstate-averaged variance sum_k p_k var_k(H)",
            exact: true,
        },
        SelfDistanceRow {
            name: "product",
            value: product_closed_form(rho, rho, &gmpc)?,
            closed_form: var,
            identity: "variance var(rho,H)",
            exact: true,
        },
    ])
}

/// `¼(h_max − h_min)²` and the equal superposition of extremal eigenvectors attaining it.
pub fn maximal_self_distance(h: &HermitianOperator) -> Result<(f64, DensityMatrix)> {
    let eig = eig_hermitian(h.matrix())?;
    let d = eig.dim();
    let (lo, hi) = (eig.eigenvector(0), eig.eigenvector(d - 1));
    let psi: Vec<C64> = lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2f64.sqrt()).collect();
    let value = 0.25 * (eig.max_eigenvalue() - eig.min_eigenvalue()).powi(2);
    Ok((value, DensityMatrix::pure(&psi)?))
}
