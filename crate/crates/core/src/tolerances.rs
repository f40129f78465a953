//! Numerical tolerances shared by every module.
//!
//! Adjusting a threshold for test calibration happens here and nowhere else.

/// Maximum relative Frobenius deviation `‖A − A†‖` for a matrix to count as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-8;

/// Generic equality tolerance for derived linear identities.
pub const EQUALITY: f64 = 1e-8;

/// Allowed deviation of a density matrix trace from one.
pub const UNIT_TRACE: f64 = 1e-10;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY: f64 = 1e-9;

/// Pairs with `λ_k + λ_l` below this lie in the kernel of the state and are skipped.
pub const KERNEL: f64 = 1e-12;

/// Eigenvalues of a state below this are rounding noise and snap to zero.
pub const EIGEN_NOISE: f64 = 1e-14;

/// Eigenvalues below this are treated as zero when inverting on the support.
pub const SUPPORT: f64 = 1e-10;

/// Relative singular value threshold for null-space extraction of constraint maps.
pub const RANK: f64 = 1e-10;

/// Allowed residual of the marginal constraints of a returned coupling.
pub const MARGINAL: f64 = 1e-7;

/// Off-diagonal Frobenius norm at which a Jacobi sweep stops, relative to `‖A‖_F`.
pub const JACOBI_OFFDIAG: f64 = 1e-15;

/// Sweep budget of the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Separation used by entanglement criteria evaluated on explicit states.
pub const CRITERION: f64 = 1e-8;

/// Separation used by verdicts that compare two SDP optima.
pub const SOLVER_COMPARISON: f64 = 1e-6;
