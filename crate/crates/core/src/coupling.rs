//! Feasible sets of couplings and their reduction to LMI problems.
//!
//! A coupling is a state `ρ₁₂` on `d×d` with `Tr₂ρ₁₂ = M₁` and `Tr₁ρ₁₂ = σ`,
//! where `M₁ = ρᵀ` (DPT convention) or `M₁ = ρ` (GMPC convention).
//!
//! Every set is posed as an LMI in the free coordinates of the coupling:
//!
//! 1. Any coupling lives on `supp(M₁) ⊗ supp(σ)`, so the variable is restricted
//!    to that subspace ("reduced" coordinates). For the symmetric set it is further
//!    restricted to the symmetric subspace, for extensions it lives on
//!    `supp(M₁)^{⊗n} ⊗ supp(σ)`.
//! 2. All linear equalities (marginals, permutation invariance, block structure)
//!    are eliminated: the variable is `Y(z) = Y₀ + Σ z_i N_i`.
//! 3. The positivity conditions become PSD blocks of realified matrices that are
//!    affine in `z`, and [`sdp::solve_lmi`] optimizes the linear cost.
//!
//! This keeps the LMI strictly feasible whenever the marginals are, which the
//! interior-point solver needs.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{
    eig_hermitian, from_hermitian_coordinates, hermitian_coordinates, kron, kron_all, partial_trace, partial_trace_keep,
    partial_transpose_mask, realify_unchecked, subsystem_permutation, ComplexMatrix, Subsystem,
};
use crate::qstates::{su_generators, DensityMatrix};
use crate::sdp::{self, BlockMatrix, LmiProblem, SdpOptions, SdpStatus, Sense};
use crate::tolerances;
use crate::{Error, Result, C64};

/// Largest number of copies of the first party in [`CouplingSet::PptExtension`].
pub const MAX_EXTENSION: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingSet {
    /// All bipartite states.
    General,
    /// States with positive partial transpose.
    Ppt,
    /// PPT states invariant under the flip operator. Requires `ρ = σ`.
    SymmetricPpt,
    /// Couplings with an `n:1` extension symmetric in the copies of the first party
    /// and PPT across every cut.
    PptExtension(usize),
    /// `Σ_k |k⟩⟨k| ⊗ τ_k` in the eigenbasis of the first marginal.
    ClassicalQuantum,
    /// `Σ_k τ_k ⊗ |k⟩⟨k|` in the eigenbasis of the second marginal.
    QuantumClassical,
    /// The product of the marginals.
    Product,
}

impl CouplingSet {
    /// Separable couplings are handled through their PPT relaxation.
    pub const SEPARABLE: CouplingSet = CouplingSet::Ppt;

    pub fn name(&self) -> String {
        match self {
            CouplingSet::General => "general".into(),
            CouplingSet::Ppt => "ppt".into(),
            CouplingSet::SymmetricPpt => "symmetric-ppt".into(),
            CouplingSet::PptExtension(n) => format!("ppt-ext-{n}"),
            CouplingSet::ClassicalQuantum => "classical-quantum".into(),
            CouplingSet::QuantumClassical => "quantum-classical".into(),
            CouplingSet::Product => "product".into(),
        }
    }

    /// Parses the names produced by [`CouplingSet::name`], plus `separable` and `ppt-ext:N`.
    pub fn parse(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let set = match lower.as_str() {
            "general" => CouplingSet::General,
            "ppt" | "separable" | "sep" => CouplingSet::Ppt,
            "symmetric-ppt" | "symppt" => CouplingSet::SymmetricPpt,
            "classical-quantum" | "cq" => CouplingSet::ClassicalQuantum,
            "quantum-classical" | "qc" => CouplingSet::QuantumClassical,
            "product" => CouplingSet::Product,
            other => {
                let n = other
                    .strip_prefix("ppt-ext-")
                    .or_else(|| other.strip_prefix("ppt-ext:"))
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| Error::InvalidCouplingSet(format!("unknown coupling set `{s}`")))?;
                CouplingSet::PptExtension(n)
            }
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if let CouplingSet::PptExtension(n) = *self {
            if !(2..=MAX_EXTENSION).contains(&n) {
                return Err(Error::InvalidCouplingSet(format!(
                    "extension order {n} outside 2..={MAX_EXTENSION}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CouplingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    /// Cost `(Hᵀ⊗I − I⊗H)²`, first marginal `ρᵀ`.
    Dpt,
    /// Cost `(H⊗I − I⊗H)²`, first marginal `ρ`.
    Gmpc,
}

impl Convention {
    pub fn name(&self) -> &'static str {
        match self {
            Convention::Dpt => "dpt",
            Convention::Gmpc => "gmpc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dpt" => Ok(Convention::Dpt),
            "gmpc" => Ok(Convention::Gmpc),
            _ => Err(Error::InvalidArgument(format!("unknown convention `{s}`"))),
        }
    }
}

/// Whether optimizing over a set gives the separable optimum or only bounds it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exactness {
    ExactSeparable,
    LowerBoundOnly,
}

impl Exactness {
    pub fn name(&self) -> &'static str {
        match self {
            Exactness::ExactSeparable => "exact-separable",
            Exactness::LowerBoundOnly => "lower-bound-only",
        }
    }
}

/// PPT-type sets coincide with separable couplings only for two qubits.
pub fn exactness(set: CouplingSet, d: usize) -> Exactness {
    match set {
        CouplingSet::Ppt | CouplingSet::SymmetricPpt | CouplingSet::PptExtension(_) if d > 2 => Exactness::LowerBoundOnly,
        _ => Exactness::ExactSeparable,
    }
}

/// Explanation attached to the exactness flag where the label alone is misleading.
pub fn exactness_note(set: CouplingSet, d: usize) -> Option<&'static str> {
    match set {
        CouplingSet::General => Some("not a separable relaxation; label does not apply"),
        CouplingSet::ClassicalQuantum | CouplingSet::QuantumClassical | CouplingSet::Product => {
            Some("subset of separable couplings; value bounds the separable optimum from the other side")
        }
        _ if d > 2 => Some("PPT relaxation; a minimum bounds the separable minimum from below"),
        _ => None,
    }
}

/// Solver bookkeeping attached to every optimized coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub status: SdpStatus,
    pub gap: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Largest entry-wise deviation of the returned coupling's marginals.
    pub marginal_residual: f64,
    /// Smallest eigenvalue of the coupling before clamping.
    pub min_eigenvalue: f64,
    pub free_variables: usize,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CouplingSolution {
    /// Optimal `Re Tr(K ρ₁₂)`, evaluated before the coupling is clamped.
    pub value: f64,
    pub coupling: DensityMatrix,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
struct PsdBlock {
    mask: Vec<bool>,
    /// Columns span the range of the partially transposed variable.
    compression: Option<ComplexMatrix>,
}

/// A coupling set instantiated for concrete marginals.
#[derive(Debug, Clone)]
pub struct CouplingProblem {
    set: CouplingSet,
    convention: Convention,
    d: usize,
    first: ComplexMatrix,
    second: ComplexMatrix,
    /// Support isometries of the two marginals (`d × r`).
    v1: ComplexMatrix,
    v2: ComplexMatrix,
    copies: usize,
    /// Party dimensions of the reduced variable space: `r₁` repeated `copies` times, then `r₂`.
    party_dims: Vec<usize>,
    /// Isometry from the variable space into the reduced party space.
    subspace: Option<ComplexMatrix>,
    blocks: Vec<PsdBlock>,
    /// Affine parametrization of the variable in Hermitian coordinates.
    offset: Vec<f64>,
    directions: Vec<Vec<f64>>,
    notes: Vec<String>,
}

fn support(m: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, bool)> {
    let eig = eig_hermitian(m)?;
    let keep: Vec<usize> = (0..eig.dim()).filter(|&k| eig.eigenvalues[k] > tolerances::SUPPORT).collect();
    let degenerate = eig
        .eigenvalues
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() < tolerances::DEGENERACY);
    let v = ComplexMatrix::from_fn(m.rows(), keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    Ok((v, keep.iter().map(|&k| eig.eigenvalues[k]).collect(), degenerate))
}

/// Isometry onto the symmetric subspace of `C^r ⊗ C^r`.
fn symmetric_isometry(r: usize) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::new();
    for k in 0..r {
        for l in k..r {
            if k == l {
                cols.push(vec![(k * r + k, 1.0)]);
            } else {
                cols.push(vec![(k * r + l, h), (l * r + k, h)]);
            }
        }
    }
    let mut s = ComplexMatrix::zeros(r * r, cols.len());
    for (c, entries) in cols.iter().enumerate() {
        for &(row, v) in entries {
            s[(row, c)] = C64::new(v, 0.0);
        }
    }
    s
}

/// Minimum-norm solution and null-space basis of `L x = t`.
fn affine_solution(l: &DMatrix<f64>, t: &DVector<f64>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (rows, cols) = l.shape();
    // Pad to at least square so the SVD exposes the full right singular basis.
    let padded_rows = rows.max(cols);
    let mut lp = DMatrix::zeros(padded_rows, cols);
    lp.view_mut((0, 0), (rows, cols)).copy_from(l);
    let mut tp = DVector::zeros(padded_rows);
    tp.rows_mut(0, rows).copy_from(t);
    let svd = lp.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = tolerances::RANK * smax.max(1.0);
    let x = svd
        .solve(&tp, eps)
        .map_err(|e| Error::MalformedProblem(format!("constraint solve failed: {e}")))?;
    let residual = (&lp * &x - &tp).amax();
    if residual > 1e-9 * (1.0 + t.amax()) {
        return Err(Error::Infeasible { residual });
    }
    let vt = svd.v_t.as_ref().expect("requested");
    let null = (0..cols)
        .filter(|&k| svd.singular_values[k] <= eps)
        .map(|k| vt.row(k).iter().copied().collect())
        .collect();
    Ok((x.iter().copied().collect(), null))
}

impl CouplingProblem {
    pub fn build(rho: &DensityMatrix, sigma: &DensityMatrix, set: CouplingSet, convention: Convention) -> Result<Self> {
        set.validate()?;
        let d = rho.dim();
        if sigma.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "states of dimension {d} and {}",
                sigma.dim()
            )));
        }
        let first = match convention {
            Convention::Dpt => rho.matrix().transpose(),
            Convention::Gmpc => rho.matrix().clone(),
        };
        let second = sigma.matrix().clone();
        if set == CouplingSet::SymmetricPpt {
            let diff = first.frobenius_distance(&second);
            if diff > 1e-8 {
                return Err(Error::MarginalMismatch(format!(
                    "the symmetric set needs equal marginals, ‖M₁ − σ‖_F = {diff:.3e}"
                )));
            }
        }

        let mut notes = Vec::new();
        let (mut v1, _, deg1) = support(&first)?;
        let (mut v2, _, deg2) = support(&second)?;
        if set == CouplingSet::SymmetricPpt {
            v2 = v1.clone();
        }
        if set == CouplingSet::ClassicalQuantum && deg1 {
            notes.push("first marginal is degenerate; classical basis is the eigensolver's choice".to_string());
        }
        if set == CouplingSet::QuantumClassical && deg2 {
            notes.push("second marginal is degenerate; classical basis is the eigensolver's choice".to_string());
        }
        if set == CouplingSet::Product {
            // Keep the full space; the product coupling is fixed, nothing is optimized.
            v1 = ComplexMatrix::identity(d);
            v2 = ComplexMatrix::identity(d);
        }
        let (r1, r2) = (v1.cols(), v2.cols());
        let copies = match set {
            CouplingSet::PptExtension(n) => n,
            _ => 1,
        };
        let mut party_dims = vec![r1; copies];
        party_dims.push(r2);
        let subspace = (set == CouplingSet::SymmetricPpt).then(|| symmetric_isometry(r1));

        let parties = copies + 1;
        let blocks = match set {
            CouplingSet::Ppt | CouplingSet::SymmetricPpt => vec![PsdBlock {
                mask: vec![true, false],
                compression: None,
            }],
            CouplingSet::PptExtension(n) => (1..=n)
                .map(|k| PsdBlock {
                    mask: (0..parties).map(|p| p < k).collect(),
                    compression: None,
                })
                .collect(),
            _ => Vec::new(),
        };

        let mut problem = Self {
            set,
            convention,
            d,
            first,
            second,
            v1,
            v2,
            copies,
            party_dims,
            subspace,
            blocks,
            offset: Vec::new(),
            directions: Vec::new(),
            notes,
        };
        problem.parametrize()?;
        Ok(problem)
    }

    pub fn set(&self) -> CouplingSet {
        self.set
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The prescribed first marginal (`ρᵀ` or `ρ`).
    pub fn first_marginal(&self) -> &ComplexMatrix {
        &self.first
    }

    pub fn second_marginal(&self) -> &ComplexMatrix {
        &self.second
    }

    pub fn free_variables(&self) -> usize {
        self.directions.len()
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    fn variable_dim(&self) -> usize {
        match &self.subspace {
            Some(s) => s.cols(),
            None => self.party_dims.iter().product(),
        }
    }

    /// Variable embedded into the reduced party space.
    fn embed(&self, y: &ComplexMatrix) -> ComplexMatrix {
        match &self.subspace {
            Some(s) => s.matmul(y).matmul(&s.dagger()),
            None => y.clone(),
        }
    }

    /// Reduced coupling (`r₁r₂ × r₁r₂`) of an embedded variable.
    fn reduced_coupling(&self, z: &ComplexMatrix) -> ComplexMatrix {
        if self.copies == 1 {
            z.clone()
        } else {
            partial_trace_keep(z, &self.party_dims, &[0, self.copies]).expect("consistent dimensions")
        }
    }

    fn lift(&self, c: &ComplexMatrix) -> ComplexMatrix {
        let w = kron(&self.v1, &self.v2);
        w.matmul(c).matmul(&w.dagger())
    }

    /// Linear functionals whose values are pinned, evaluated on an embedded variable.
    fn constraint_outputs(&self, z: &ComplexMatrix) -> Vec<f64> {
        let (r1, r2) = (self.v1.cols(), self.v2.cols());
        let c = self.reduced_coupling(z);
        let mut out = hermitian_coordinates(&partial_trace(&c, Subsystem::Second, (r1, r2)).expect("dims"));
        out.extend(hermitian_coordinates(&partial_trace(&c, Subsystem::First, (r1, r2)).expect("dims")));
        match self.set {
            CouplingSet::PptExtension(n) => {
                for i in 0..n - 1 {
                    let mut perm: Vec<usize> = (0..=n).collect();
                    perm.swap(i, i + 1);
                    let p = subsystem_permutation(&self.party_dims, &perm);
                    let moved = p.matmul(z).matmul(&p.dagger());
                    out.extend(hermitian_coordinates(&(&moved - z)));
                }
            }
            CouplingSet::ClassicalQuantum | CouplingSet::QuantumClassical => {
                let classical_first = self.set == CouplingSet::ClassicalQuantum;
                for row in 0..r1 * r2 {
                    for col in row + 1..r1 * r2 {
                        let differ = if classical_first {
                            row / r2 != col / r2
                        } else {
                            row % r2 != col % r2
                        };
                        if differ {
                            out.push(c[(row, col)].re);
                            out.push(c[(row, col)].im);
                        }
                    }
                }
            }
            CouplingSet::Product => {
                // Pin the reduced coupling itself.
                out.extend(hermitian_coordinates(&c));
            }
            _ => {}
        }
        out
    }

    fn constraint_targets(&self, count: usize) -> Vec<f64> {
        let m1 = self.first.compress(&self.v1);
        let m2 = self.second.compress(&self.v2);
        let mut t = hermitian_coordinates(&m1);
        t.extend(hermitian_coordinates(&m2));
        if self.set == CouplingSet::Product {
            t.extend(hermitian_coordinates(&kron(&m1, &m2)));
        }
        t.resize(count, 0.0);
        t
    }

    fn basis_variable(&self, coords: &[f64]) -> ComplexMatrix {
        from_hermitian_coordinates(self.variable_dim(), coords)
    }

    fn parametrize(&mut self) -> Result<()> {
        let s = self.variable_dim();
        let n = s * s;
        let mut columns = Vec::with_capacity(n);
        let mut unit = vec![0.0; n];
        for j in 0..n {
            unit[j] = 1.0;
            let z = self.embed(&self.basis_variable(&unit));
            columns.push(self.constraint_outputs(&z));
            unit[j] = 0.0;
        }
        let rows = columns[0].len();
        let l = DMatrix::from_fn(rows, n, |r, c| columns[c][r]);
        let t = DVector::from_vec(self.constraint_targets(rows));
        let (offset, directions) = affine_solution(&l, &t)?;
        self.offset = offset;
        self.directions = directions;
        Ok(())
    }

    fn variable_at(&self, z: &[f64]) -> ComplexMatrix {
        let mut coords = self.offset.clone();
        for (dir, &zi) in self.directions.iter().zip(z) {
            for (c, &v) in coords.iter_mut().zip(dir) {
                *c += zi * v;
            }
        }
        self.basis_variable(&coords)
    }

    /// Coupling on `d×d` for free coordinates `z`.
    pub fn coupling_at(&self, z: &[f64]) -> ComplexMatrix {
        self.lift(&self.reduced_coupling(&self.embed(&self.variable_at(z))))
    }

    /// PSD blocks, realified, for a variable (linear in the variable).
    fn psd_blocks(&self, y: &ComplexMatrix) -> BlockMatrix {
        let mut blocks = vec![realify_unchecked(y)];
        if !self.blocks.is_empty() {
            let z = self.embed(y);
            for b in &self.blocks {
                let pt = partial_transpose_mask(&z, &self.party_dims, &b.mask).expect("dims");
                let pt = match &b.compression {
                    Some(w) => pt.compress(w),
                    None => pt,
                };
                blocks.push(realify_unchecked(&pt));
            }
        }
        BlockMatrix::new(blocks)
    }

    /// `Re Tr(K ρ₁₂)` as a function of the free coordinates: constant and gradient.
    fn linear_objective(&self, cost: &ComplexMatrix) -> (f64, Vec<f64>) {
        let w = kron(&self.v1, &self.v2);
        let k_red = cost.compress(&w);
        let eval = |y: &ComplexMatrix| k_red.trace_product(&self.reduced_coupling(&self.embed(y))).re;
        let constant = eval(&self.basis_variable(&self.offset));
        let grad = self.directions.iter().map(|dir| eval(&self.basis_variable(dir))).collect();
        (constant, grad)
    }

    /// The LMI `min/max c·z s.t. F₀ + Σ z_i F_i ⪰ 0` together with the objective constant.
    pub fn to_lmi(&self, cost: &ComplexMatrix, sense: Sense) -> Result<(LmiProblem, f64)> {
        let dd = self.d * self.d;
        if cost.rows() != dd || cost.cols() != dd {
            return Err(Error::DimensionMismatch(format!(
                "cost of size {}x{} for couplings of size {dd}",
                cost.rows(),
                cost.cols()
            )));
        }
        let (constant, objective) = self.linear_objective(cost);
        let offset = self.psd_blocks(&self.basis_variable(&self.offset));
        let coefficients = self.directions.iter().map(|dir| self.psd_blocks(&self.basis_variable(dir))).collect();
        Ok((
            LmiProblem {
                objective,
                offset,
                coefficients,
                sense,
            },
            constant,
        ))
    }

    /// Optimizes `Re Tr(K ρ₁₂)` and reports the solver status without judging it.
    pub fn solve_raw(&self, cost: &ComplexMatrix, sense: Sense, options: &SdpOptions) -> Result<CouplingSolution> {
        let (lmi, constant) = self.to_lmi(cost, sense)?;
        let (z, value, status, gap, iterations, pres, dres) = if self.directions.is_empty() {
            (Vec::new(), constant, SdpStatus::Optimal, 0.0, 0, 0.0, 0.0)
        } else {
            let sol = sdp::solve_lmi(&lmi, options)?;
            (
                sol.y.clone(),
                constant + sol.value,
                sol.sdp.status,
                sol.sdp.gap,
                sol.sdp.iterations,
                sol.sdp.primal_residual,
                sol.sdp.dual_residual,
            )
        };
        let raw = self.coupling_at(&z).hermitian_part();
        let eig = eig_hermitian(&raw)?;
        let min_eigenvalue = eig.min_eigenvalue();
        let clamped = eig.map(|l| l.max(0.0));
        let trace = clamped.trace().re;
        let coupling = clamped.scale_real(1.0 / trace);
        let marginal_residual = self.marginal_residual(&coupling);
        Ok(CouplingSolution {
            value,
            coupling: DensityMatrix::from_trusted(coupling, vec![self.d, self.d]),
            diagnostics: Diagnostics {
                status,
                gap,
                iterations,
                primal_residual: pres,
                dual_residual: dres,
                marginal_residual,
                min_eigenvalue,
                free_variables: self.directions.len(),
                notes: self.notes.clone(),
            },
        })
    }

    /// Like [`CouplingProblem::solve_raw`], but a non-optimal solver status is an error.
    pub fn solve(&self, cost: &ComplexMatrix, sense: Sense, options: &SdpOptions) -> Result<CouplingSolution> {
        let sol = self.solve_raw(cost, sense, options)?;
        if sol.diagnostics.status != SdpStatus::Optimal {
            return Err(Error::Solver {
                status: sol.diagnostics.status,
                iterations: sol.diagnostics.iterations,
                gap: sol.diagnostics.gap,
            });
        }
        Ok(sol)
    }

    /// Marginal constraints `Tr(A_i ρ₁₂) = b_i` on the full `d×d` space: an orthonormal
    /// Hermitian basis for the first marginal and the traceless generators for the
    /// second, so the shared trace condition appears once (`2d² − 1` constraints).
    pub fn marginal_constraints(&self) -> Vec<(ComplexMatrix, f64)> {
        let d = self.d;
        let id = ComplexMatrix::identity(d);
        let mut out = Vec::with_capacity(2 * d * d - 1);
        let mut unit = vec![0.0; d * d];
        for j in 0..d * d {
            unit[j] = 1.0;
            let b = from_hermitian_coordinates(d, &unit);
            let rhs = b.trace_product(&self.first).re;
            out.push((kron(&b, &id), rhs));
            unit[j] = 0.0;
        }
        for g in su_generators(d).expect("d ≥ 2") {
            let g = g.matrix().scale_real(std::f64::consts::FRAC_1_SQRT_2);
            let rhs = g.trace_product(&self.second).re;
            out.push((kron(&id, &g), rhs));
        }
        out
    }

    /// Largest entry-wise deviation of the two partial traces from the marginals.
    pub fn marginal_residual(&self, coupling: &ComplexMatrix) -> f64 {
        let dims = (self.d, self.d);
        let a = partial_trace(coupling, Subsystem::Second, dims).expect("dims");
        let b = partial_trace(coupling, Subsystem::First, dims).expect("dims");
        a.max_abs_diff(&self.first).max(b.max_abs_diff(&self.second))
    }

    /// `M₁ ⊗ σ`, feasible for every set except the symmetric one.
    pub fn product_coupling(&self) -> ComplexMatrix {
        kron(&self.first, &self.second)
    }

    /// Checks the conditions of the set that can be read off a coupling alone:
    /// marginals, PSD, partial transpose, flip symmetry, block structure.
    /// Extension existence is not checked. Returns the worst violation.
    pub fn violation(&self, coupling: &ComplexMatrix) -> Result<f64> {
        let d = self.d;
        let mut worst = self.marginal_residual(coupling);
        worst = worst.max(coupling.hermitian_deviation());
        let herm = coupling.hermitian_part();
        worst = worst.max(-eig_hermitian(&herm)?.min_eigenvalue());
        if matches!(
            self.set,
            CouplingSet::Ppt | CouplingSet::SymmetricPpt | CouplingSet::PptExtension(_)
        ) {
            let pt = partial_transpose_mask(&herm, &[d, d], &[true, false])?;
            worst = worst.max(-eig_hermitian(&pt)?.min_eigenvalue());
        }
        if self.set == CouplingSet::SymmetricPpt {
            let f = crate::qstates::flip_operator(d)?;
            worst = worst.max(f.matrix().matmul(&herm).max_abs_diff(&herm));
        }
        if matches!(self.set, CouplingSet::ClassicalQuantum | CouplingSet::QuantumClassical) {
            let (v, r) = if self.set == CouplingSet::ClassicalQuantum {
                (kron(&self.v1, &ComplexMatrix::identity(d)), self.v1.cols())
            } else {
                (kron(&ComplexMatrix::identity(d), &self.v2), self.v2.cols())
            };
            let c = herm.compress(&v);
            let inner = c.rows() / r;
            for row in 0..c.rows() {
                for col in 0..c.cols() {
                    let differ = if self.set == CouplingSet::ClassicalQuantum {
                        row / inner != col / inner
                    } else {
                        row % r != col % r
                    };
                    if differ {
                        worst = worst.max(c[(row, col)].norm());
                    }
                }
            }
        }
        if self.set == CouplingSet::Product {
            worst = worst.max(herm.max_abs_diff(&self.product_coupling()));
        }
        Ok(worst)
    }

    /// The `n`-copy product extension `M₁^{⊗n} ⊗ σ` of the product coupling.
    pub fn product_extension(&self) -> ComplexMatrix {
        let mut factors = vec![&self.first; self.copies];
        factors.push(&self.second);
        kron_all(factors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstates::{maximally_entangled, pauli, Axis};
    use crate::random::{random_density, random_pure, rng_from_seed};

    fn mixed() -> DensityMatrix {
        DensityMatrix::maximally_mixed(2).unwrap()
    }

    fn example4_rho() -> DensityMatrix {
        DensityMatrix::from_matrix(ComplexMatrix::from_real(2, 2, &[0.5, -0.25, -0.25, 0.5])).unwrap()
    }

    fn sz_cost() -> ComplexMatrix {
        let z = pauli(Axis::Z);
        let id = ComplexMatrix::identity(2);
        let diff = &kron(z.matrix(), &id) - &kron(&id, z.matrix());
        diff.matmul(&diff).scale_real(0.5)
    }

    #[test]
    fn set_names_roundtrip() {
        for set in [
            CouplingSet::General,
            CouplingSet::Ppt,
            CouplingSet::SymmetricPpt,
            CouplingSet::PptExtension(2),
            CouplingSet::PptExtension(3),
            CouplingSet::ClassicalQuantum,
            CouplingSet::QuantumClassical,
            CouplingSet::Product,
        ] {
            assert_eq!(CouplingSet::parse(&set.name()).unwrap(), set);
        }
        assert_eq!(CouplingSet::parse("separable").unwrap(), CouplingSet::SEPARABLE);
        assert!(CouplingSet::parse("ppt-ext-4").is_err());
        assert!(CouplingSet::parse("ppt-ext-1").is_err());
        assert!(CouplingSet::parse("bogus").is_err());
    }

    #[test]
    fn exactness_labels() {
        assert_eq!(exactness(CouplingSet::Ppt, 2), Exactness::ExactSeparable);
        assert_eq!(exactness(CouplingSet::Ppt, 3), Exactness::LowerBoundOnly);
        assert_eq!(exactness(CouplingSet::PptExtension(2), 3), Exactness::LowerBoundOnly);
        assert_eq!(exactness(CouplingSet::General, 5), Exactness::ExactSeparable);
        assert!(exactness_note(CouplingSet::General, 2).is_some());
        assert!(exactness_note(CouplingSet::Ppt, 2).is_none());
    }

    #[test]
    fn marginal_constraint_count_and_witness() {
        let p = CouplingProblem::build(&mixed(), &mixed(), CouplingSet::General, Convention::Gmpc).unwrap();
        let cons = p.marginal_constraints();
        assert_eq!(cons.len(), 7);
        let w = p.product_coupling();
        for (a, b) in &cons {
            assert!((a.trace_product(&w).re - b).abs() < 1e-14);
        }
        // 16 real parameters minus 7 independent marginal conditions.
        assert_eq!(p.free_variables(), 9);
    }

    #[test]
    fn product_witness_is_feasible_for_every_set() {
        let mut rng = rng_from_seed(61);
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        for conv in [Convention::Dpt, Convention::Gmpc] {
            for set in [
                CouplingSet::General,
                CouplingSet::Ppt,
                CouplingSet::PptExtension(2),
                CouplingSet::ClassicalQuantum,
                CouplingSet::QuantumClassical,
                CouplingSet::Product,
            ] {
                let p = CouplingProblem::build(&rho, &sigma, set, conv).unwrap();
                assert!(p.violation(&p.product_coupling()).unwrap() < 1e-12, "{set} {conv:?}");
            }
        }
    }

    #[test]
    fn dpt_first_marginal_is_transposed() {
        let mut rng = rng_from_seed(3);
        let rho = random_density(&mut rng, 2);
        let p = CouplingProblem::build(&rho, &mixed(), CouplingSet::Ppt, Convention::Dpt).unwrap();
        assert!(p.first_marginal().max_abs_diff(&rho.matrix().transpose()) < 1e-15);
        let q = CouplingProblem::build(&rho, &mixed(), CouplingSet::Ppt, Convention::Gmpc).unwrap();
        assert!(q.first_marginal().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn parametrized_couplings_have_exact_marginals() {
        let mut rng = rng_from_seed(5);
        let rho = random_density(&mut rng, 3);
        let sigma = random_pure(&mut rng, 3);
        let p = CouplingProblem::build(&rho, &sigma, CouplingSet::Ppt, Convention::Dpt).unwrap();
        let z: Vec<f64> = (0..p.free_variables()).map(|k| ((k * 7 % 5) as f64 - 2.0) * 0.1).collect();
        let c = p.coupling_at(&z);
        assert!(p.marginal_residual(&c) < 1e-12);
        // Pure second marginal: every coupling is M₁ ⊗ σ, so nothing is free.
        assert_eq!(p.free_variables(), 0);
    }

    #[test]
    fn symmetric_set_rejects_different_marginals() {
        let mut rng = rng_from_seed(9);
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        assert!(matches!(
            CouplingProblem::build(&rho, &sigma, CouplingSet::SymmetricPpt, Convention::Gmpc),
            Err(Error::MarginalMismatch(_))
        ));
        assert!(CouplingProblem::build(&rho, &rho, CouplingSet::SymmetricPpt, Convention::Gmpc).is_ok());
    }

    #[test]
    fn symmetric_witness_from_maximally_mixed() {
        // ¼(|00⟩⟨00| + |11⟩⟨11| + 2|Ψ⁺⟩⟨Ψ⁺|) is symmetric, PPT and has I/2 marginals.
        let p = CouplingProblem::build(&mixed(), &mixed(), CouplingSet::SymmetricPpt, Convention::Gmpc).unwrap();
        let mut w = ComplexMatrix::zeros(4, 4);
        w[(0, 0)] = C64::new(0.25, 0.0);
        w[(3, 3)] = C64::new(0.25, 0.0);
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            w[(r, c)] = C64::new(0.25, 0.0);
        }
        assert!(p.violation(&w).unwrap() < 1e-12);
        let sol = p.solve(&sz_cost(), Sense::Maximize, &SdpOptions::default()).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn example2_zero_cost_coupling() {
        let p = CouplingProblem::build(&mixed(), &mixed(), CouplingSet::Ppt, Convention::Gmpc).unwrap();
        let sol = p.solve(&sz_cost(), Sense::Minimize, &SdpOptions::default()).unwrap();
        assert!(sol.value.abs() < 1e-7);
        assert!(sol.diagnostics.gap <= 1e-8);
        assert!(sol.diagnostics.marginal_residual <= 1e-7);
        // Zero cost forces support on |00⟩, |11⟩; PPT removes the coherence.
        let c = sol.coupling.matrix();
        assert!((c[(0, 0)].re - 0.5).abs() < 1e-5 && (c[(3, 3)].re - 0.5).abs() < 1e-5);
        assert!(c[(0, 3)].norm() < 1e-4);
    }

    #[test]
    fn general_set_reaches_entangled_optimum() {
        // The maximally entangled state has zero σ_z cost and I/2 marginals.
        let p = CouplingProblem::build(&mixed(), &mixed(), CouplingSet::General, Convention::Gmpc).unwrap();
        let me = maximally_entangled(2).unwrap();
        assert!(p.violation(me.matrix()).unwrap() < 1e-12);
        let sol = p.solve(&sz_cost(), Sense::Minimize, &SdpOptions::default()).unwrap();
        assert!(sol.value.abs() < 1e-7);
    }

    #[test]
    fn example4_anchor_values() {
        let rho = example4_rho();
        let opts = SdpOptions::default();
        let general = CouplingProblem::build(&rho, &rho, CouplingSet::General, Convention::Dpt).unwrap();
        let v = general.solve(&sz_cost(), Sense::Minimize, &opts).unwrap().value;
        assert!((v - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-6, "{v}");
        let ppt = CouplingProblem::build(&rho, &rho, CouplingSet::Ppt, Convention::Dpt).unwrap();
        let v = ppt.solve(&sz_cost(), Sense::Minimize, &opts).unwrap().value;
        assert!((v - 0.25).abs() < 1e-6, "{v}");
    }

    #[test]
    fn classical_quantum_dominates_ppt() {
        let mut rng = rng_from_seed(71);
        let opts = SdpOptions::default();
        for _ in 0..5 {
            let rho = random_density(&mut rng, 2);
            let sigma = random_density(&mut rng, 2);
            let ppt = CouplingProblem::build(&rho, &sigma, CouplingSet::Ppt, Convention::Gmpc).unwrap();
            let cq = CouplingProblem::build(&rho, &sigma, CouplingSet::ClassicalQuantum, Convention::Gmpc).unwrap();
            let qc = CouplingProblem::build(&rho, &sigma, CouplingSet::QuantumClassical, Convention::Gmpc).unwrap();
            let a = ppt.solve(&sz_cost(), Sense::Minimize, &opts).unwrap();
            let b = cq.solve(&sz_cost(), Sense::Minimize, &opts).unwrap();
            let c = qc.solve(&sz_cost(), Sense::Minimize, &opts).unwrap();
            assert!(b.value >= a.value - 1e-7 && c.value >= a.value - 1e-7);
            assert!(cq.violation(b.coupling.matrix()).unwrap() < 1e-6);
            assert!(qc.violation(c.coupling.matrix()).unwrap() < 1e-6);
        }
    }

    #[test]
    fn extension_hierarchy_is_monotone() {
        let mut rng = rng_from_seed(73);
        let opts = SdpOptions::default();
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        let h = crate::random::random_hermitian(&mut rng, 2);
        let id = ComplexMatrix::identity(2);
        let diff = &kron(&h.matrix().transpose(), &id) - &kron(&id, h.matrix());
        let cost = diff.matmul(&diff).scale_real(0.5);
        let mut last = f64::NEG_INFINITY;
        for set in [
            CouplingSet::General,
            CouplingSet::Ppt,
            CouplingSet::PptExtension(2),
            CouplingSet::PptExtension(3),
        ] {
            let p = CouplingProblem::build(&rho, &sigma, set, Convention::Dpt).unwrap();
            let sol = p.solve(&cost, Sense::Minimize, &opts).unwrap();
            assert!(sol.value >= last - 1e-7, "{set}: {} < {last}", sol.value);
            assert!(sol.diagnostics.marginal_residual <= 1e-7);
            last = sol.value;
        }
    }

    #[test]
    fn product_set_has_no_free_variables() {
        let mut rng = rng_from_seed(79);
        let rho = random_density(&mut rng, 2);
        let sigma = random_density(&mut rng, 2);
        let p = CouplingProblem::build(&rho, &sigma, CouplingSet::Product, Convention::Gmpc).unwrap();
        assert_eq!(p.free_variables(), 0);
        let sol = p.solve(&sz_cost(), Sense::Minimize, &SdpOptions::default()).unwrap();
        assert!(sol.coupling.matrix().max_abs_diff(&p.product_coupling()) < 1e-12);
        assert_eq!(sol.diagnostics.iterations, 0);
    }

    #[test]
    fn degenerate_classical_basis_is_noted() {
        let p = CouplingProblem::build(&mixed(), &mixed(), CouplingSet::ClassicalQuantum, Convention::Gmpc).unwrap();
        assert_eq!(p.notes().len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            CouplingProblem::build(&a, &b, CouplingSet::General, Convention::Dpt),
            Err(Error::DimensionMismatch(_))
        ));
        let p = CouplingProblem::build(&a, &a, CouplingSet::General, Convention::Dpt).unwrap();
        assert!(p.to_lmi(&ComplexMatrix::identity(9), Sense::Minimize).is_err());
    }
}
