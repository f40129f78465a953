//! Primal-dual interior-point solver for small block-diagonal SDPs.
//!
//! Standard form:
//!
//! ```text
//! minimize ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! maximize bᵀy     s.t.  C − Σ y_i A_i = S ⪰ 0
//! ```
//!
//! Search direction is HKM with Mehrotra predictor-corrector and an infeasible start.
//! [`LmiProblem`] poses `min/max cᵀy s.t. F₀ + Σ y_i F_i ⪰ 0` through the dual side.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::{tolerances, Error, Result};

const STEP_FRACTION: f64 = 0.98;
const DIVERGENCE: f64 = 1e12;
/// Largest primal residual the terminal correction is allowed to repair.
const POLISH_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

/// Block-diagonal real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockMatrix {
    pub fn new(blocks: Vec<DMatrix<f64>>) -> Self {
        Self { blocks }
    }

    pub fn single(m: DMatrix<f64>) -> Self {
        Self { blocks: vec![m] }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        Self {
            blocks: sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn identity(sizes: &[usize]) -> Self {
        Self {
            blocks: sizes.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows()).sum()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|b| b * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip(other, |a, b| a + b * s)
    }

    pub fn add_scaled_in_place(&mut self, s: f64, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn symmetrized(&self) -> Self {
        self.map(|b| (b + b.transpose()) * 0.5)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.blocks
            .iter()
            .all(|b| b.is_square() && (b - b.transpose()).amax() <= tol * b.amax().max(1.0))
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                b.clone()
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn map(&self, f: impl Fn(&DMatrix<f64>) -> DMatrix<f64>) -> Self {
        Self {
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&DMatrix<f64>, &DMatrix<f64>) -> DMatrix<f64>) -> Self {
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub cost: BlockMatrix,
    pub constraints: Vec<(BlockMatrix, f64)>,
    pub sense: Sense,
}

impl SdpProblem {
    pub fn new(cost: BlockMatrix, constraints: Vec<(BlockMatrix, f64)>, sense: Sense) -> Result<Self> {
        let p = Self {
            cost,
            constraints,
            sense,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.constraints.is_empty() {
            return Err(Error::MalformedProblem("no constraints".into()));
        }
        let sizes = self.cost.sizes();
        if !self.cost.is_symmetric(1e-12) {
            return Err(Error::MalformedProblem("cost matrix is not symmetric".into()));
        }
        for (i, (a, b)) in self.constraints.iter().enumerate() {
            if a.sizes() != sizes {
                return Err(Error::MalformedProblem(format!(
                    "constraint {i} has block sizes {:?}, cost has {sizes:?}",
                    a.sizes()
                )));
            }
            if !a.is_symmetric(1e-12) {
                return Err(Error::MalformedProblem(format!("constraint {i} is not symmetric")));
            }
            if !b.is_finite() {
                return Err(Error::MalformedProblem(format!("constraint {i} has non-finite rhs")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iters: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iters: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_matrix: BlockMatrix,
    pub dual_vector: Vec<f64>,
    pub dual_slack: BlockMatrix,
    /// Objective values in the caller's sense (negated back for maximization).
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal − dual| / max(1, |primal|, |dual|)`.
    pub gap: f64,
    /// `max_i |⟨A_i, X⟩ − b_i|`.
    pub primal_residual: f64,
    /// `max |C − Σ y_i A_i − S|`.
    pub dual_residual: f64,
    pub status: SdpStatus,
    pub iterations: usize,
}

struct Iterate {
    x: BlockMatrix,
    y: DVector<f64>,
    s: BlockMatrix,
}

struct Residuals {
    rp: DVector<f64>,
    rd: BlockMatrix,
    pobj: f64,
    dobj: f64,
}

fn apply_a(a: &[BlockMatrix], x: &BlockMatrix) -> DVector<f64> {
    DVector::from_iterator(a.len(), a.iter().map(|ai| ai.inner(x)))
}

fn apply_at(a: &[BlockMatrix], y: &DVector<f64>, sizes: &[usize]) -> BlockMatrix {
    let mut out = BlockMatrix::zeros(sizes);
    for (ai, &yi) in a.iter().zip(y.iter()) {
        if yi != 0.0 {
            out.add_scaled_in_place(yi, ai);
        }
    }
    out
}

fn cholesky_blocks(m: &BlockMatrix) -> Option<Vec<Cholesky<f64, Dyn>>> {
    m.blocks.iter().map(|b| Cholesky::new(b.clone())).collect()
}

fn inverse_from_cholesky(ch: &[Cholesky<f64, Dyn>]) -> BlockMatrix {
    BlockMatrix::new(ch.iter().map(|c| c.inverse()).collect())
}

/// Largest `α` with `M + α·D ⪰ 0`, given the Cholesky factors of `M ≻ 0`.
fn max_step(ch: &[Cholesky<f64, Dyn>], d: &BlockMatrix) -> f64 {
    let mut alpha = f64::INFINITY;
    for (c, db) in ch.iter().zip(&d.blocks) {
        let l = c.l();
        let Some(linv) = l.clone().try_inverse() else {
            return 0.0;
        };
        let w = &linv * db * linv.transpose();
        let w = (&w + w.transpose()) * 0.5;
        let lmin = w.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

fn residuals(cost: &BlockMatrix, b: &DVector<f64>, a: &[BlockMatrix], it: &Iterate) -> Residuals {
    let sizes = cost.sizes();
    let rp = b - apply_a(a, &it.x);
    let rd = cost.axpy(-1.0, &apply_at(a, &it.y, &sizes)).axpy(-1.0, &it.s);
    Residuals {
        rp,
        rd,
        pobj: cost.inner(&it.x),
        dobj: b.dot(&it.y),
    }
}

fn relative_gap(p: f64, d: f64) -> f64 {
    (p - d).abs() / 1f64.max(p.abs()).max(d.abs())
}

/// Solves a standard-form SDP. Never returns an error for a well-formed problem;
/// non-convergence is reported through [`SdpSolution::status`].
pub fn solve(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let sizes = problem.cost.sizes();
    let n = problem.cost.dim() as f64;
    let cost = match problem.sense {
        Sense::Minimize => problem.cost.clone(),
        Sense::Maximize => problem.cost.scaled(-1.0),
    };
    let a: Vec<BlockMatrix> = problem.constraints.iter().map(|(ai, _)| ai.clone()).collect();
    let b = DVector::from_iterator(a.len(), problem.constraints.iter().map(|(_, bi)| *bi));
    let m = a.len();

    // X = I·(b_trace/n) when an identity-multiple constraint fixes the trace, else I.
    let ident = BlockMatrix::identity(&sizes);
    let mut x0 = 1.0;
    for (ai, bi) in a.iter().zip(b.iter()) {
        let diff = ai.axpy(-ai.blocks.first().map_or(0.0, |blk| blk[(0, 0)]), &ident);
        if diff.max_abs() < 1e-14 && ai.max_abs() > 0.0 && *bi > 0.0 {
            let scale = ai.blocks[0][(0, 0)];
            x0 = bi / (scale * n);
            break;
        }
    }
    let mut it = Iterate {
        x: ident.scaled(x0),
        y: DVector::zeros(m),
        s: ident.clone(),
    };

    // Gram matrix ⟨A_i, A_j⟩, used to project X back onto A(X) = b.
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = a[i].inner(&a[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let gram = gram.svd(true, true);
    let gram_eps = 1e-12 * gram.singular_values.max();

    let b_scale = 1.0 + b.amax();
    let c_scale = 1.0 + cost.max_abs();
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;

    loop {
        let r = residuals(&cost, &b, &a, &it);
        let gap = relative_gap(r.pobj, r.dobj);
        let pinf = r.rp.amax();
        let dinf = r.rd.max_abs();
        if gap <= options.gap_tol && pinf <= options.feas_tol * b_scale && dinf <= options.feas_tol * c_scale {
            status = SdpStatus::Optimal;
            break;
        }
        // Near degenerate optima the gap closes while A(X) drifts off b. A
        // least-squares correction of X is accepted if X stays PSD and the gap holds.
        if gap <= options.gap_tol && dinf <= options.feas_tol * c_scale && pinf <= POLISH_LIMIT {
            if let Ok(w) = gram.solve(&r.rp, gram_eps) {
                let xp = it.x.axpy(1.0, &apply_at(&a, &w, &sizes)).symmetrized();
                let pinf_p = (&b - apply_a(&a, &xp)).amax();
                let gap_p = relative_gap(cost.inner(&xp), r.dobj);
                if gap_p <= options.gap_tol && pinf_p <= options.feas_tol * b_scale && xp.min_eigenvalue() >= tolerances::PSD_FLOOR {
                    it.x = xp;
                    status = SdpStatus::Optimal;
                    break;
                }
            }
        }
        if iterations >= options.max_iters {
            break;
        }
        if it.y.amax() > DIVERGENCE || it.x.max_abs() > DIVERGENCE {
            status = SdpStatus::Infeasible;
            break;
        }
        iterations += 1;

        let (Some(chx), Some(chs)) = (cholesky_blocks(&it.x), cholesky_blocks(&it.s)) else {
            break;
        };
        let sinv = inverse_from_cholesky(&chs);
        let mu = it.x.inner(&it.s) / n;

        // Schur complement M_ij = Tr(A_i X A_j S⁻¹).
        let xa: Vec<BlockMatrix> = a.iter().map(|aj| it.x.matmul(aj).matmul(&sinv)).collect();
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = a[i].inner(&xa[j].symmetrized());
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        // Redundant constraints make M singular; fall back to a pseudo-inverse.
        let factor = Cholesky::new(schur.clone());
        let svd = if factor.is_none() { Some(schur.clone().svd(true, true)) } else { None };
        let solve_once = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
            match (&factor, &svd) {
                (Some(f), _) => Some(f.solve(rhs)),
                (None, Some(d)) => {
                    let eps = 1e-13 * d.singular_values.max();
                    d.solve(rhs, eps).ok()
                }
                _ => None,
            }
        };
        // M is badly conditioned close to the optimum; refinement keeps A(ΔX) on target.
        let solve_m = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
            let mut sol = solve_once(rhs)?;
            for _ in 0..2 {
                let resid = rhs - &schur * &sol;
                sol += solve_once(&resid)?;
            }
            Some(sol)
        };

        let x_rd_sinv = it.x.matmul(&r.rd).matmul(&sinv);
        let base_rhs = &r.rp + apply_a(&a, &it.x) + apply_a(&a, &x_rd_sinv);

        let direction = |target: &BlockMatrix| -> Option<(BlockMatrix, DVector<f64>, BlockMatrix)> {
            // target = R in X S + ΔX S + X ΔS = R.
            let r_sinv = target.matmul(&sinv);
            let rhs = &base_rhs - apply_a(&a, &r_sinv);
            let dy = solve_m(&rhs)?;
            let ds = r.rd.axpy(-1.0, &apply_at(&a, &dy, &sizes));
            let dx = r_sinv
                .axpy(-1.0, &it.x)
                .axpy(-1.0, &it.x.matmul(&ds).matmul(&sinv))
                .symmetrized();
            Some((dx, dy, ds))
        };

        let Some((dxa, dya, dsa)) = direction(&BlockMatrix::zeros(&sizes)) else {
            break;
        };
        let ap = max_step(&chx, &dxa).min(1.0);
        let ad = max_step(&chs, &dsa).min(1.0);
        let mu_aff = it.x.axpy(ap, &dxa).inner(&it.s.axpy(ad, &dsa)) / n;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let target = ident.scaled(sigma * mu).axpy(-1.0, &dxa.matmul(&dsa));
        let (dx, dy, ds) = match direction(&target) {
            Some(d) => d,
            None => (dxa, dya, dsa),
        };
        let ap = (STEP_FRACTION * max_step(&chx, &dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&chs, &ds)).min(1.0);
        if !(ap > 0.0 && ad > 0.0) || !ap.is_finite() || !ad.is_finite() {
            break;
        }
        it.x = it.x.axpy(ap, &dx).symmetrized();
        it.y += dy * ad;
        it.s = it.s.axpy(ad, &ds).symmetrized();
    }

    let r = residuals(&cost, &b, &a, &it);
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    Ok(SdpSolution {
        gap: relative_gap(r.pobj, r.dobj),
        primal_value: sign * r.pobj,
        dual_value: sign * r.dobj,
        primal_residual: r.rp.amax(),
        dual_residual: r.rd.max_abs(),
        primal_matrix: it.x,
        dual_vector: it.y.iter().copied().collect(),
        dual_slack: it.s,
        status,
        iterations,
    })
}

/// `minimize/maximize cᵀy  s.t.  F₀ + Σ y_i F_i ⪰ 0`.
#[derive(Debug, Clone)]
pub struct LmiProblem {
    pub objective: Vec<f64>,
    pub offset: BlockMatrix,
    pub coefficients: Vec<BlockMatrix>,
    pub sense: Sense,
}

#[derive(Debug, Clone)]
pub struct LmiSolution {
    pub y: Vec<f64>,
    /// `cᵀy` at the returned point.
    pub value: f64,
    /// `F₀ + Σ y_i F_i` evaluated directly.
    pub slack: BlockMatrix,
    pub sdp: SdpSolution,
}

impl LmiProblem {
    pub fn evaluate(&self, y: &[f64]) -> BlockMatrix {
        let mut out = self.offset.clone();
        for (fi, &yi) in self.coefficients.iter().zip(y) {
            out.add_scaled_in_place(yi, fi);
        }
        out
    }

    /// The standard-form SDP whose dual is this LMI.
    pub fn to_standard_form(&self) -> Result<SdpProblem> {
        if self.objective.len() != self.coefficients.len() {
            return Err(Error::MalformedProblem(format!(
                "{} objective coefficients for {} matrices",
                self.objective.len(),
                self.coefficients.len()
            )));
        }
        let sign = match self.sense {
            Sense::Minimize => -1.0,
            Sense::Maximize => 1.0,
        };
        let constraints = self
            .coefficients
            .iter()
            .zip(&self.objective)
            .map(|(fi, ci)| (fi.scaled(-1.0), sign * ci))
            .collect();
        SdpProblem::new(self.offset.clone(), constraints, Sense::Minimize)
    }
}

pub fn solve_lmi(problem: &LmiProblem, options: &SdpOptions) -> Result<LmiSolution> {
    let sdp = solve(&problem.to_standard_form()?, options)?;
    let y = sdp.dual_vector.clone();
    let value = problem.objective.iter().zip(&y).map(|(c, v)| c * v).sum();
    Ok(LmiSolution {
        slack: problem.evaluate(&y),
        y,
        value,
        sdp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{realify, ComplexMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_block(rows: usize, data: &[f64]) -> BlockMatrix {
        BlockMatrix::single(DMatrix::from_row_slice(rows, rows, data))
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&m + m.transpose()) * 0.5
    }

    /// Minimize ⟨C,X⟩ over Tr X = 1 plus random constraints satisfied by a random PD point.
    fn random_problem(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> SdpProblem {
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let mut x0 = &g * g.transpose() + DMatrix::identity(n, n) * 0.5;
        x0 /= x0.trace();
        let mut constraints = vec![(BlockMatrix::single(DMatrix::identity(n, n)), 1.0)];
        for _ in 0..extra {
            let a = random_symmetric(rng, n);
            let b = a.dot(&x0);
            constraints.push((BlockMatrix::single(a), b));
        }
        SdpProblem::new(BlockMatrix::single(random_symmetric(rng, n)), constraints, Sense::Minimize).unwrap()
    }

    #[test]
    fn fully_constrained_scalar() {
        let p = SdpProblem::new(one_block(1, &[1.0]), vec![(one_block(1, &[1.0]), 3.0)], Sense::Minimize).unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 3.0).abs() < 1e-7);
    }

    #[test]
    fn smallest_eigenvalue_selection() {
        let p = SdpProblem::new(
            one_block(2, &[1.0, 0.0, 0.0, 2.0]),
            vec![(BlockMatrix::single(DMatrix::identity(2, 2)), 1.0)],
            Sense::Minimize,
        )
        .unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 1.0).abs() < 1e-7);
        let x = &s.primal_matrix.blocks[0];
        assert!((x[(0, 0)] - 1.0).abs() < 1e-6 && x[(1, 1)].abs() < 1e-6);
    }

    #[test]
    fn realified_pauli_x_with_trace_budget() {
        let sx = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let c = realify(&sx).unwrap();
        let p = SdpProblem::new(
            BlockMatrix::single(c.clone()),
            vec![(BlockMatrix::single(DMatrix::identity(4, 4)), 2.0)],
            Sense::Minimize,
        )
        .unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value + 2.0).abs() < 1e-7);
        // Oracle: grid over 2×2 real PSD matrices [[a, b], [b, t−a]] embedded on one copy.
        let mut best = f64::INFINITY;
        let steps = 200;
        for i in 0..=steps {
            let a = 2.0 * i as f64 / steps as f64;
            let r = (a * (2.0 - a)).sqrt();
            for k in 0..=steps {
                let b = -r + 2.0 * r * k as f64 / steps as f64;
                // X = diag block [[a,b],[b,2−a]] on (0,1) gives ⟨C,X⟩ = 2b.
                best = best.min(2.0 * b);
            }
        }
        assert!((best + 2.0).abs() < 1e-9);
        assert!(s.primal_value >= best - 1e-7);
    }

    #[test]
    fn maximize_by_negation() {
        let p = SdpProblem::new(
            one_block(2, &[1.0, 0.0, 0.0, 2.0]),
            vec![(BlockMatrix::single(DMatrix::identity(2, 2)), 1.0)],
            Sense::Maximize,
        )
        .unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_malformed_problems() {
        let c = one_block(2, &[1.0, 0.0, 0.0, 2.0]);
        assert!(SdpProblem::new(c.clone(), vec![], Sense::Minimize).is_err());
        assert!(SdpProblem::new(c.clone(), vec![(one_block(1, &[1.0]), 1.0)], Sense::Minimize).is_err());
        assert!(SdpProblem::new(c.clone(), vec![(one_block(2, &[0.0, 1.0, 0.0, 0.0]), 1.0)], Sense::Minimize).is_err());
        assert!(SdpProblem::new(c, vec![(BlockMatrix::single(DMatrix::identity(2, 2)), f64::NAN)], Sense::Minimize).is_err());
    }

    #[test]
    fn detects_infeasibility_or_stops() {
        // Tr X = −1 has no PSD solution.
        let p = SdpProblem::new(
            one_block(2, &[1.0, 0.0, 0.0, 1.0]),
            vec![(BlockMatrix::single(DMatrix::identity(2, 2)), -1.0)],
            Sense::Minimize,
        )
        .unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_ne!(s.status, SdpStatus::Optimal);
    }

    #[test]
    fn block_diagonal_problem() {
        // Two independent trace-one blocks: minimum is the sum of smallest eigenvalues.
        let cost = BlockMatrix::new(vec![
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
            DMatrix::from_row_slice(1, 1, &[5.0]),
        ]);
        let c1 = BlockMatrix::new(vec![DMatrix::identity(2, 2), DMatrix::zeros(1, 1)]);
        let c2 = BlockMatrix::new(vec![DMatrix::zeros(2, 2), DMatrix::identity(1, 1)]);
        let p = SdpProblem::new(cost, vec![(c1, 1.0), (c2, 1.0)], Sense::Minimize).unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_value - 6.0).abs() < 1e-7);
    }

    #[test]
    fn weak_duality_and_certificate_on_random_problems() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let p = random_problem(&mut rng, 5, 4);
            let s = solve(&p, &SdpOptions::default()).unwrap();
            assert_eq!(s.status, SdpStatus::Optimal);
            assert!(s.dual_value <= s.primal_value + 1e-10 * s.primal_value.abs().max(1.0));
            assert!(s.gap <= 1e-8);
            assert!(s.primal_residual <= 1e-8 * 2.0);
            assert!(s.primal_matrix.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn cost_scaling_scales_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_problem(&mut rng, 4, 3);
        let base = solve(&p, &SdpOptions::default()).unwrap().primal_value;
        let mut q = p.clone();
        q.cost = q.cost.scaled(3.5);
        let scaled = solve(&q, &SdpOptions::default()).unwrap().primal_value;
        assert!((scaled - 3.5 * base).abs() < 1e-7 * scaled.abs().max(1.0));
    }

    #[test]
    fn duplicate_constraint_is_harmless() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_problem(&mut rng, 4, 2);
        let base = solve(&p, &SdpOptions::default()).unwrap();
        let mut q = p.clone();
        q.constraints.push(p.constraints[1].clone());
        let dup = solve(&q, &SdpOptions::default()).unwrap();
        assert_eq!(dup.status, SdpStatus::Optimal);
        assert!((dup.primal_value - base.primal_value).abs() <= 1e-7);
    }

    #[test]
    fn lmi_scalar_bounds() {
        // minimize y s.t. [[y, 1], [1, y]] ⪰ 0 → y = 1.
        let lmi = LmiProblem {
            objective: vec![1.0],
            offset: one_block(2, &[0.0, 1.0, 1.0, 0.0]),
            coefficients: vec![BlockMatrix::single(DMatrix::identity(2, 2))],
            sense: Sense::Minimize,
        };
        let s = solve_lmi(&lmi, &SdpOptions::default()).unwrap();
        assert_eq!(s.sdp.status, SdpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-7);
        assert!(s.slack.min_eigenvalue() >= -1e-7);

        // maximize y s.t. 1 − y² ≥ 0 written as [[1, y], [y, 1]] ⪰ 0 → y = 1.
        let lmi = LmiProblem {
            objective: vec![1.0],
            offset: BlockMatrix::single(DMatrix::identity(2, 2)),
            coefficients: vec![one_block(2, &[0.0, 1.0, 1.0, 0.0])],
            sense: Sense::Maximize,
        };
        let s = solve_lmi(&lmi, &SdpOptions::default()).unwrap();
        assert_eq!(s.sdp.status, SdpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn realified_hermitian_problem_keeps_doubling_symmetry() {
        // minimize Re Tr(H ρ) over 2×2 density matrices, posed on the realified cone.
        let h = ComplexMatrix::from_rows(&[
            vec![crate::C64::new(0.3, 0.0), crate::C64::new(0.2, -0.7)],
            vec![crate::C64::new(0.2, 0.7), crate::C64::new(-0.4, 0.0)],
        ])
        .unwrap();
        let p = SdpProblem::new(
            BlockMatrix::single(realify(&h).unwrap() * 0.5),
            vec![(BlockMatrix::single(DMatrix::identity(4, 4) * 0.5), 1.0)],
            Sense::Minimize,
        )
        .unwrap();
        let s = solve(&p, &SdpOptions::default()).unwrap();
        let lmin = crate::linalg::eig_hermitian(&h).unwrap().min_eigenvalue();
        assert!((s.primal_value - lmin).abs() < 1e-7);
        let x = &s.primal_matrix.blocks[0];
        let n = 2;
        for r in 0..n {
            for c in 0..n {
                assert!((x[(r, c)] - x[(r + n, c + n)]).abs() < 1e-6);
                assert!((x[(r + n, c)] + x[(r, c + n)]).abs() < 1e-6);
            }
        }
    }
}
