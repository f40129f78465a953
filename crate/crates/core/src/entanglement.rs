//! Entanglement criteria for couplings.
//!
//! Two families are covered: variance and second-moment inequalities that every
//! separable two-party state obeys, evaluated directly on a coupling; and
//! thresholds on optimized distances, where crossing the separable bound means
//! every optimal coupling is entangled. Verdicts only ever speak about couplings,
//! never about the states being compared.

use std::fmt;

use crate::coupling::{Convention, CouplingSet};
use crate::linalg::{kron, ComplexMatrix};
use crate::qstates::{angular_momentum, pauli, su_generators, Axis, DensityMatrix, HermitianOperator};
use crate::tolerances;
use crate::wasserstein::{distance_squared, wasserstein_variance, CostSpec};
use crate::{Error, Result};

/// Which side of the bound signals entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    BelowIsEntangled,
    AboveIsEntangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The bound is crossed: the coupling (or every optimal coupling) is entangled.
    Violated,
    /// The bound holds; nothing follows.
    Satisfied,
    /// The bound holds, but the comparison set only relaxes separability, so even
    /// the inconclusive answer is weaker than usual.
    NotCertified,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Violated => "violated",
            Verdict::Satisfied => "satisfied",
            Verdict::NotCertified => "not-certified",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: String,
    pub lhs: f64,
    pub bound: f64,
    pub direction: Direction,
    pub verdict: Verdict,
    /// Signed distance from the bound on the separable side; negative when violated.
    pub margin: f64,
    pub tol: f64,
    pub note: String,
}

impl CriterionReport {
    pub fn new(id: &str, lhs: f64, bound: f64, direction: Direction, tol: f64, note: &str) -> Self {
        let margin = match direction {
            Direction::BelowIsEntangled => lhs - bound,
            Direction::AboveIsEntangled => bound - lhs,
        };
        let verdict = if margin < -tol {
            Verdict::Violated
        } else {
            Verdict::Satisfied
        };
        Self {
            id: id.to_string(),
            lhs,
            bound,
            direction,
            verdict,
            margin,
            tol,
            note: note.to_string(),
        }
    }

    fn weakened(mut self, note: &str) -> Self {
        if self.verdict == Verdict::Satisfied {
            self.verdict = Verdict::NotCertified;
        }
        self.note = format!("{}; {note}", self.note);
        self
    }
}

fn bipartite_dim(coupling: &DensityMatrix) -> Result<usize> {
    let n = coupling.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d < 2 || d * d != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a d×d coupling, got dimension {n}"
        )));
    }
    Ok(d)
}

/// `A ⊗ I + s · I ⊗ B`.
fn two_body(a: &ComplexMatrix, b: &ComplexMatrix, s: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(a.rows());
    &kron(a, &id) + &kron(&id, b).scale_real(s)
}

fn second_moment(rho: &ComplexMatrix, o: &ComplexMatrix) -> f64 {
    o.matmul(o).trace_product(rho).re
}

fn variance(rho: &ComplexMatrix, o: &ComplexMatrix) -> f64 {
    let m = o.trace_product(rho).re;
    second_moment(rho, o) - m * m
}

/// `Σ_n ⟨(G_nᵀ⊗I − I⊗G_n)²⟩ ≥ 4(d−1)` over the SU(d) generators.
pub fn su_criterion(coupling: &DensityMatrix) -> Result<CriterionReport> {
    let d = bipartite_dim(coupling)?;
    let lhs = su_generators(d)?
        .iter()
        .map(|g| second_moment(coupling.matrix(), &two_body(&g.matrix().transpose(), g.matrix(), -1.0)))
        .sum();
    Ok(CriterionReport::new(
        "su",
        lhs,
        4.0 * (d as f64 - 1.0),
        Direction::BelowIsEntangled,
        tolerances::CRITERION,
        "second moments of G^T x 1 - 1 x G over SU(d) generators",
    ))
}

/// `Σ_l [Δ(j_lᵀ⊗I − I⊗j_l)]² ≥ 2j` with `d = 2j + 1`.
pub fn angular_momentum_criterion(coupling: &DensityMatrix) -> Result<CriterionReport> {
    let d = bipartite_dim(coupling)?;
    let j = (d as f64 - 1.0) / 2.0;
    let (jx, jy, jz) = angular_momentum(j)?;
    let lhs = [jx, jy, jz]
        .iter()
        .map(|op| variance(coupling.matrix(), &two_body(&op.matrix().transpose(), op.matrix(), -1.0)))
        .sum();
    Ok(CriterionReport::new(
        "angular",
        lhs,
        2.0 * j,
        Direction::BelowIsEntangled,
        tolerances::CRITERION,
        "variances of j^T x 1 - 1 x j for spin j = (d-1)/2",
    ))
}

/// The two-qubit variance inequality with the sign pattern `(−, +, −)` on
/// `σ_x, σ_y, σ_z`, bound 4.
pub fn qubit_variance_criterion(coupling: &DensityMatrix) -> Result<CriterionReport> {
    if bipartite_dim(coupling)? != 2 {
        return Err(Error::DimensionMismatch("the qubit criterion needs a two-qubit coupling".into()));
    }
    let lhs = [(Axis::X, -1.0), (Axis::Y, 1.0), (Axis::Z, -1.0)]
        .iter()
        .map(|&(a, s)| variance(coupling.matrix(), &two_body(pauli(a).matrix(), pauli(a).matrix(), s)))
        .sum();
    Ok(CriterionReport::new(
        "qubit",
        lhs,
        4.0,
        Direction::BelowIsEntangled,
        tolerances::CRITERION,
        "variances of sx x 1 - 1 x sx, sy x 1 + 1 x sy, sz x 1 - 1 x sz",
    ))
}

fn xy_operators() -> Vec<ComplexMatrix> {
    [Axis::X, Axis::Y]
        .iter()
        .map(|&a| two_body(pauli(a).matrix(), pauli(a).matrix(), -1.0))
        .collect()
}

/// `⟨(σ_x⊗I − I⊗σ_x)² + (σ_y⊗I − I⊗σ_y)²⟩`, which separable states keep in `[2, 6]`.
///
/// Returns the second moment together with the upper and lower reports.
pub fn pauli_xy_bounds(coupling: &DensityMatrix) -> Result<(f64, Vec<CriterionReport>)> {
    if bipartite_dim(coupling)? != 2 {
        return Err(Error::DimensionMismatch("the Pauli-xy bounds need a two-qubit coupling".into()));
    }
    let m: f64 = xy_operators().iter().map(|o| second_moment(coupling.matrix(), o)).sum();
    let upper = CriterionReport::new(
        "pauli-xy-upper",
        m,
        6.0,
        Direction::AboveIsEntangled,
        tolerances::CRITERION,
        "second moment of the x and y differences",
    );
    let lower = CriterionReport::new(
        "pauli-xy-lower",
        m,
        2.0,
        Direction::BelowIsEntangled,
        tolerances::CRITERION,
        "second moment of the x and y differences",
    );
    Ok((m, vec![upper, lower]))
}

/// Variance form of the lower Pauli-xy bound.
pub fn pauli_xy_variance(coupling: &DensityMatrix) -> Result<CriterionReport> {
    if bipartite_dim(coupling)? != 2 {
        return Err(Error::DimensionMismatch("the Pauli-xy bounds need a two-qubit coupling".into()));
    }
    let v = xy_operators().iter().map(|o| variance(coupling.matrix(), o)).sum();
    Ok(CriterionReport::new(
        "pauli-xy-variance",
        v,
        2.0,
        Direction::BelowIsEntangled,
        tolerances::CRITERION,
        "variances of the x and y differences",
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    Su,
    Angular,
    PauliXy,
    Qubit,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 4] = [
        CriterionKind::Su,
        CriterionKind::Angular,
        CriterionKind::PauliXy,
        CriterionKind::Qubit,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "su" => Ok(CriterionKind::Su),
            "angular" => Ok(CriterionKind::Angular),
            "pauli-xy" => Ok(CriterionKind::PauliXy),
            "qubit" => Ok(CriterionKind::Qubit),
            other => Err(Error::InvalidArgument(format!("unknown criterion `{other}`"))),
        }
    }

    pub fn applies_to(&self, d: usize) -> bool {
        match self {
            CriterionKind::Su | CriterionKind::Angular => d >= 2,
            CriterionKind::PauliXy | CriterionKind::Qubit => d == 2,
        }
    }
}

/// Evaluates one criterion family; the Pauli-xy family yields its upper, lower and
/// variance reports.
pub fn evaluate(coupling: &DensityMatrix, kind: CriterionKind) -> Result<Vec<CriterionReport>> {
    Ok(match kind {
        CriterionKind::Su => vec![su_criterion(coupling)?],
        CriterionKind::Angular => vec![angular_momentum_criterion(coupling)?],
        CriterionKind::Qubit => vec![qubit_variance_criterion(coupling)?],
        CriterionKind::PauliXy => {
            let (_, mut reports) = pauli_xy_bounds(coupling)?;
            reports.push(pauli_xy_variance(coupling)?);
            reports
        }
    })
}

/// Every criterion that applies to the coupling's dimension.
pub fn evaluate_all(coupling: &DensityMatrix) -> Result<Vec<CriterionReport>> {
    let d = bipartite_dim(coupling)?;
    let mut out = Vec::new();
    for kind in CriterionKind::ALL.iter().filter(|k| k.applies_to(d)) {
        out.extend(evaluate(coupling, *kind)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Distance,
    Variance,
}

const OPTIMIZER_SCOPE: &str = "about the optimal couplings, not the input states";
const RELAXATION_NOTE: &str = "PPT only relaxes separability for d > 2";

/// Compares the optimum over all couplings with the PPT optimum. A strictly better
/// general optimum means no optimal general coupling is separable.
pub fn wasserstein_verdict(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    spec: &CostSpec,
    quantity: Quantity,
) -> Result<CriterionReport> {
    let (general, ppt, direction, id) = match quantity {
        Quantity::Distance => (
            distance_squared(rho, sigma, spec, CouplingSet::General)?.value,
            distance_squared(rho, sigma, spec, CouplingSet::Ppt)?.value,
            Direction::BelowIsEntangled,
            "general-vs-ppt-distance",
        ),
        Quantity::Variance => (
            wasserstein_variance(rho, sigma, spec, CouplingSet::General)?.value,
            wasserstein_variance(rho, sigma, spec, CouplingSet::Ppt)?.value,
            Direction::AboveIsEntangled,
            "general-vs-ppt-variance",
        ),
    };
    let report = CriterionReport::new(id, general, ppt, direction, tolerances::SOLVER_COMPARISON, OPTIMIZER_SCOPE);
    Ok(if rho.dim() > 2 {
        report.weakened(RELAXATION_NOTE)
    } else {
        report
    })
}

/// Fixed separable thresholds on optimized quantities over all couplings:
/// the SU(d) set (`D² < 2(d−1)`), spin components (`D² < j`), and for qubits
/// `V^{σx,σy} > 3` and `D²^{σx,σy} < 1` in the GMPC convention.
pub fn threshold_verdicts(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Vec<CriterionReport>> {
    let d = rho.dim();
    let tol = tolerances::SOLVER_COMPARISON;
    let mut out = Vec::new();

    let su: Vec<HermitianOperator> = su_generators(d)?;
    let v = distance_squared(rho, sigma, &CostSpec::new(su, Convention::Dpt)?, CouplingSet::General)?.value;
    out.push(CriterionReport::new(
        "su-distance",
        v,
        2.0 * (d as f64 - 1.0),
        Direction::BelowIsEntangled,
        tol,
        OPTIMIZER_SCOPE,
    ));

    let j = (d as f64 - 1.0) / 2.0;
    let (jx, jy, jz) = angular_momentum(j)?;
    let v = distance_squared(rho, sigma, &CostSpec::new(vec![jx, jy, jz], Convention::Dpt)?, CouplingSet::General)?.value;
    out.push(CriterionReport::new(
        "angular-distance",
        v,
        j,
        Direction::BelowIsEntangled,
        tol,
        OPTIMIZER_SCOPE,
    ));

    if d == 2 {
        let xy = CostSpec::new(vec![pauli(Axis::X), pauli(Axis::Y)], Convention::Gmpc)?;
        let v = wasserstein_variance(rho, sigma, &xy, CouplingSet::General)?.value;
        out.push(CriterionReport::new(
            "pauli-xy-variance-threshold",
            v,
            3.0,
            Direction::AboveIsEntangled,
            tol,
            OPTIMIZER_SCOPE,
        ));
        let v = distance_squared(rho, sigma, &xy, CouplingSet::General)?.value;
        out.push(CriterionReport::new(
            "pauli-xy-distance-threshold",
            v,
            1.0,
            Direction::BelowIsEntangled,
            tol,
            OPTIMIZER_SCOPE,
        ));
    }
    Ok(out)
}
