//! Distances between a fixed qubit state and its rotations about the y axis.
//!
//! For `ρ = ½|1⟩ₓ⟨1|ₓ + ¼I` and `σ_φ = e^{−iσ_yφ/2} ρ e^{iσ_yφ/2}` with `H = σ_z`,
//! the general-coupling DPT distance lies strictly below the PPT one for small
//! angles and the two curves merge beyond a critical angle `φ₀`.

use rayon::prelude::*;

use crate::coupling::{Convention, CouplingSet};
use crate::linalg::ComplexMatrix;
use crate::qstates::{pauli, Axis, DensityMatrix};
use crate::sdp::SdpStatus;
use crate::wasserstein::{distance_squared, CostSpec, TransportResult};
use crate::{Error, Result};

/// Gap below which the two curves count as coinciding.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub phi: f64,
    pub d2_general: f64,
    pub d2_ppt: f64,
    pub status_general: SdpStatus,
    pub status_ppt: SdpStatus,
    /// Larger of the two solver duality gaps.
    pub solver_gap: f64,
    /// Larger of the two couplings' marginal residuals.
    pub marginal_residual: f64,
}

impl SweepRecord {
    pub fn gap(&self) -> f64 {
        self.d2_ppt - self.d2_general
    }
}

/// `½|1⟩ₓ⟨1|ₓ + ¼I`.
pub fn base_state() -> DensityMatrix {
    DensityMatrix::from_matrix(ComplexMatrix::from_real(2, 2, &[0.5, -0.25, -0.25, 0.5])).expect("valid state")
}

/// `e^{−iσ_yφ/2} ρ e^{iσ_yφ/2}`.
pub fn rotated(rho: &DensityMatrix, phi: f64) -> DensityMatrix {
    let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
    // e^{−iσ_yφ/2} = cos(φ/2) I − i sin(φ/2) σ_y = [[c, −s], [s, c]].
    let u = ComplexMatrix::from_real(2, 2, &[c, -s, s, c]);
    let m = u.matmul(rho.matrix()).matmul(&u.dagger()).hermitian_part();
    DensityMatrix::from_matrix(m).expect("unitary conjugation keeps the state valid")
}

/// DPT distances of `ρ` and `σ_φ` over general and PPT couplings.
pub fn evaluate(phi: f64) -> Result<SweepRecord> {
    let rho = base_state();
    let sigma = rotated(&rho, phi);
    let spec = CostSpec::single(pauli(Axis::Z), Convention::Dpt);
    let g = distance_squared(&rho, &sigma, &spec, CouplingSet::General)?;
    let p = distance_squared(&rho, &sigma, &spec, CouplingSet::Ppt)?;
    let status = |r: &TransportResult| r.diagnostics.as_ref().map_or(SdpStatus::Optimal, |d| d.status);
    let residual = |r: &TransportResult| r.diagnostics.as_ref().map_or(0.0, |d| d.marginal_residual);
    Ok(SweepRecord {
        phi,
        d2_general: g.value,
        d2_ppt: p.value,
        status_general: status(&g),
        status_ppt: status(&p),
        solver_gap: g.gap().max(p.gap()),
        marginal_residual: residual(&g).max(residual(&p)),
    })
}

/// `points` uniform angles on `[0, π/2]`, endpoints included.
pub fn grid(points: usize) -> Vec<f64> {
    let step = std::f64::consts::FRAC_PI_2 / (points - 1) as f64;
    (0..points).map(|k| k as f64 * step).collect()
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Evaluates the grid with at most `jobs` worker threads (0 picks the default).
/// Records come back in angle order.
pub fn run(points: usize, jobs: usize) -> Result<Vec<SweepRecord>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!("a sweep needs at least 2 points, got {points}")));
    }
    let phis = grid(points);
    pool(jobs)?.install(|| phis.par_iter().map(|&phi| evaluate(phi)).collect())
}

/// Bisects for the smallest angle where the gap drops below `threshold`, starting
/// from the first grid interval in which it does.
pub fn locate_phi0(records: &[SweepRecord], threshold: f64, tol: f64) -> Result<f64> {
    let k = records
        .iter()
        .position(|r| r.gap() < threshold)
        .ok_or_else(|| Error::InvalidArgument("the gap never closes on this grid".into()))?;
    if k == 0 {
        return Ok(records[0].phi);
    }
    let (mut lo, mut hi) = (records[k - 1].phi, records[k].phi);
    while hi - lo > tol {
        let (mid, record) = probe_inside(lo, hi)?;
        if record.gap() < threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The crossing is a degenerate point of the PPT program where the solver can stall.
/// Any interior point keeps the bracket valid, so a stalled midpoint is retried nearby.
fn probe_inside(lo: f64, hi: f64) -> Result<(f64, SweepRecord)> {
    let mut last = None;
    for frac in [0.5, 0.45, 0.55, 0.4, 0.6] {
        let phi = lo + frac * (hi - lo);
        match evaluate(phi) {
            Ok(r) => return Ok((phi, r)),
            Err(e @ Error::Solver { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one probe"))
}
