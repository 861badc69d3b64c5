//! Tolerances pinned by the acceptance checks.
//!
//! These are the defaults used by the `verify` and `compare` command-line
//! suites; each constant names the check it gates.

/// Closed-form eigenvalues vs. dense eigensolve, `j <= D/4`.
pub const EIGENVALUE_MATCH: f64 = 1e-6;

/// The stationary eigenvalue recovered numerically.
pub const ZERO_MODE: f64 = 1e-10;

/// `|pairing - delta|` over mode pairs.
pub const BIORTHONORMALITY: f64 = 1e-9;

/// Relative right-eigenvector residual.
pub const RIGHT_RESIDUAL: f64 = 1e-9;

/// Relative left-eigenvector residual on the interior block.
pub const LEFT_RESIDUAL: f64 = 1e-8;

/// Pairwise trace distance between the three propagators.
pub const CROSS_METHOD: f64 = 1e-7;

/// Closed-form observable trajectories vs. oracle traces.
pub const OBSERVABLE_VS_ORACLE: f64 = 1e-8;

/// `|tr rho(t) - 1|` along any propagation.
pub const TRACE_PRESERVATION: f64 = 1e-10;

/// Trace-norm distance to the Gibbs state at `t = 200/kappa`.
pub const EQUILIBRIUM_CONVERGENCE: f64 = 1e-10;

/// Ladder commutator identities on interior blocks.
pub const LADDER_COMMUTATORS: f64 = 1e-10;

/// Ladder kets vs. spectral kets after phase alignment.
pub const LADDER_COLLINEARITY: f64 = 1e-8;

/// Ladder-propagated state vs. spectral mode sum.
pub const LADDER_VS_SPECTRAL: f64 = 1e-8;

/// Mode-sum reconstruction of an interior-supported state at `t = 0`.
pub const COMPLETENESS: f64 = 1e-8;

/// Guard on the thermal tail used when constructing eigenvectors.
pub const EIGENVECTOR_TAIL: f64 = 1e-12;
