//! Closed-form eigenvalues, biorthogonal eigenvectors, eigenprojections and
//! the spectral propagator.
//!
//! Modes are labelled by the dissipation number `j >= 0` and the phase
//! number `k` with `|k| <= j` and `j - |k|` even; `l = (j - |k|)/2`. The
//! eigenvalue is `lambda_{j,k} = -(j/2) kappa - i k omega`. For `k >= 0` the
//! right eigenvector and the left functional are
//!
//! ```text
//! v_{j,k} = sqrt(C_{k,l}) sum_{m=0}^{l} A_{k,l,m} (a_dag)^(k+m) xi^N a^m
//! W_{j,k} = sqrt(C_{k,l}) sum_{n=0}^{l} B_{k,l,n} (a_dag)^n a^(k+n)
//! ```
//!
//! and the `k < 0` modes are the adjoints of their `k > 0` partners (both
//! vectors and eigenvalue conjugated), never built from separate formulas.
//!
//! # Left-vector convention (normative)
//!
//! The eigenprojection acts as `P_{j,k} rho = v_{j,k} * tr(W_{j,k} rho)` —
//! the trace carries *no* adjoint. A Hilbert-Schmidt bra would pair as
//! `tr(B_dag rho)`; we store `W` directly so that the stored operator is the
//! one appearing inside the trace. The two conventions are reconciled by
//! `B = W_dag`: the left eigen-relation in Hilbert-Schmidt form reads
//! `L_dag (W_dag) = conj(lambda) W_dag`, which is what
//! [`SpectralMode::left_residual`] checks.
//!
//! Both vector families are banded: `v_{j,k}` is supported on the `k`-th
//! subdiagonal (`row = col + k`) and `W_{j,k}` on the `k`-th superdiagonal,
//! so entries are accumulated directly per diagonal instead of multiplying
//! dense operator powers.

use crate::combinatorics::{self, ExactRational};
use crate::fock::thermal_kernel;
use crate::tolerances;
use crate::{superop, DensityMatrix, Error, FockOperator, ModelParams, Result, C64};

/// One eigenmode: label, eigenvalue, right vector and left functional.
#[derive(Debug, Clone)]
pub struct SpectralMode {
    pub j: usize,
    pub k: isize,
    pub lambda: C64,
    /// Right eigenvector `v_{j,k}` (a decaying, trace-class-like matrix).
    pub right: FockOperator,
    /// Operator `W_{j,k}` defining the left functional `rho -> tr(W rho)`.
    pub left: FockOperator,
}

impl SpectralMode {
    /// `l = (j - |k|)/2`.
    pub fn l(&self) -> usize {
        (self.j - self.k.unsigned_abs()) / 2
    }

    /// Relative residual of the right eigen-relation, `|L v - lambda v| / |v|`.
    pub fn right_residual(&self, params: &ModelParams) -> f64 {
        let lv = superop::liouvillian_apply(params, &self.right);
        lv.sub(&self.right.scale(self.lambda)).norm() / self.right.norm()
    }

    /// Relative residual of the left eigen-relation
    /// `L_dag W_dag = conj(lambda) W_dag`, restricted to the interior block
    /// (two guard levels): truncation distorts only the edge rows/columns of
    /// the polynomial left vectors.
    pub fn left_residual(&self, params: &ModelParams) -> f64 {
        let w_dag = self.left.adjoint();
        let out = superop::adjoint_liouvillian_apply(params, &w_dag);
        let expect = w_dag.scale(self.lambda.conj());
        let interior = self.left.dim().saturating_sub(2);
        let denom = w_dag.leading_block(interior).norm();
        out.sub(&expect).leading_block(interior).norm() / denom
    }

    /// `|tr(W v) - 1|`.
    pub fn pairing_defect(&self) -> f64 {
        (pairing(&self.left, &self.right).unwrap() - C64::new(1.0, 0.0)).norm()
    }
}

fn mode_l(j: usize, k: isize) -> Result<usize> {
    let abs_k = k.unsigned_abs();
    if abs_k > j || (j - abs_k) % 2 != 0 {
        return Err(Error::InvalidMode { j, k });
    }
    Ok((j - abs_k) / 2)
}

/// Closed-form eigenvalue `lambda_{j,k} = -(j/2)(gamma - gamma') - i k omega`.
pub fn eigenvalue(j: usize, k: isize, params: &ModelParams) -> Result<C64> {
    mode_l(j, k)?;
    Ok(C64::new(
        -(j as f64) * params.kappa() / 2.0,
        -(k as f64) * params.omega(),
    ))
}

/// Smallest dimension satisfying the tail guard `xi^(D-j) < 1e-12`.
fn required_dim(j: usize, xi: f64) -> usize {
    j + (tolerances::EIGENVECTOR_TAIL.ln() / xi.ln()).ceil().max(0.0) as usize
}

fn check_tail_guard(j: usize, params: &ModelParams, dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let required = required_dim(j, params.xi());
    if dim < required {
        return Err(Error::InsufficientDim { dim, j, required });
    }
    Ok(())
}

/// Exact-rational coefficient bundle converted to floats once, at the end.
struct ModeCoefficients {
    sqrt_c: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

fn mode_coefficients(k: usize, l: usize, xi_exact: &ExactRational) -> Result<ModeCoefficients> {
    let coeffs = combinatorics::spectral_coefficients(k, l, xi_exact)?;
    Ok(ModeCoefficients {
        sqrt_c: combinatorics::sqrt_to_f64(&coeffs.c),
        a: coeffs.a.iter().map(combinatorics::to_f64).collect(),
        b: coeffs.b.iter().map(combinatorics::to_f64).collect(),
    })
}

fn factorial_table(dim: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(dim);
    t.push(1.0);
    for n in 1..dim {
        t.push(t[n - 1] * n as f64);
    }
    t
}

fn xi_powers(xi: f64, dim: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(dim);
    t.push(1.0);
    for n in 1..dim {
        t.push(t[n - 1] * xi);
    }
    t
}

/// Builds the `k >= 0` right vector on the `k`-th subdiagonal:
/// entry `(c+k, c) = sqrt(C) sum_m A_m xi^(c-m) sqrt(c! (c+k)!) / (c-m)!`.
fn right_vector_raw(
    k: usize,
    l: usize,
    coeffs: &ModeCoefficients,
    xi_pow: &[f64],
    fact: &[f64],
    dim: usize,
) -> FockOperator {
    let mut op = FockOperator::zeros(dim);
    for c in 0..dim.saturating_sub(k) {
        let row = c + k;
        let scale = (fact[c] * fact[row]).sqrt();
        let mut acc = 0.0;
        for m in 0..=l.min(c) {
            acc += coeffs.a[m] * xi_pow[c - m] / fact[c - m];
        }
        op.set(row, c, C64::new(coeffs.sqrt_c * scale * acc, 0.0));
    }
    op
}

/// Builds the `k >= 0` left vector on the `k`-th superdiagonal:
/// entry `(r, r+k) = sqrt(C) sum_n B_n sqrt(r! (r+k)!) / (r-n)!`.
fn left_vector_raw(
    k: usize,
    l: usize,
    coeffs: &ModeCoefficients,
    fact: &[f64],
    dim: usize,
) -> FockOperator {
    let mut op = FockOperator::zeros(dim);
    for r in 0..dim.saturating_sub(k) {
        let col = r + k;
        let scale = (fact[r] * fact[col]).sqrt();
        let mut acc = 0.0;
        for n in 0..=l.min(r) {
            acc += coeffs.b[n] / fact[r - n];
        }
        op.set(r, col, C64::new(coeffs.sqrt_c * scale * acc, 0.0));
    }
    op
}

fn build_mode(
    j: usize,
    k: isize,
    params: &ModelParams,
    dim: usize,
    xi_exact: &ExactRational,
    xi_pow: &[f64],
    fact: &[f64],
) -> Result<SpectralMode> {
    let l = mode_l(j, k)?;
    let abs_k = k.unsigned_abs();
    let coeffs = mode_coefficients(abs_k, l, xi_exact)?;
    let right = right_vector_raw(abs_k, l, &coeffs, xi_pow, fact, dim);
    let left = left_vector_raw(abs_k, l, &coeffs, fact, dim);
    let lambda = eigenvalue(j, k, params)?;
    if k < 0 {
        return Ok(SpectralMode {
            j,
            k,
            lambda,
            right: right.adjoint(),
            left: left.adjoint(),
        });
    }
    Ok(SpectralMode {
        j,
        k,
        lambda,
        right,
        left,
    })
}

fn build_mode_standalone(
    j: usize,
    k: isize,
    params: &ModelParams,
    dim: usize,
) -> Result<SpectralMode> {
    let xi_exact = combinatorics::from_float(params.xi()).ok_or(Error::NonFiniteEntry)?;
    let xi_pow = xi_powers(params.xi(), dim);
    let fact = factorial_table(dim);
    build_mode(j, k, params, dim, &xi_exact, &xi_pow, &fact)
}

/// Right eigenvector `v_{j,k}` at dimension `dim`.
///
/// Rejects dimensions that violate the tail guard `xi^(D-j) < 1e-12`; use
/// [`SpectralBasis`] for mode sums, which tolerate high-`j` modes on
/// interior-supported states.
pub fn right_vector(j: usize, k: isize, params: &ModelParams, dim: usize) -> Result<FockOperator> {
    mode_l(j, k)?;
    check_tail_guard(j, params, dim)?;
    Ok(build_mode_standalone(j, k, params, dim)?.right)
}

/// Left-functional operator `W_{j,k}` at dimension `dim` (same guard as
/// [`right_vector`]).
pub fn left_vector(j: usize, k: isize, params: &ModelParams, dim: usize) -> Result<FockOperator> {
    mode_l(j, k)?;
    check_tail_guard(j, params, dim)?;
    Ok(build_mode_standalone(j, k, params, dim)?.left)
}

/// The biorthogonal pairing `tr(left * a)` — no adjoint on `left`.
pub fn pairing(left: &FockOperator, a: &FockOperator) -> Result<C64> {
    if left.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: left.dim(),
            right: a.dim(),
        });
    }
    let d = left.dim();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            acc += left.get(r, c) * a.get(c, r);
        }
    }
    Ok(acc)
}

/// Rank-one eigenprojection action `P_{j,k} rho = v_{j,k} tr(W_{j,k} rho)`.
pub fn projection_apply(
    j: usize,
    k: isize,
    rho: &FockOperator,
    params: &ModelParams,
    dim: usize,
) -> Result<FockOperator> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: dim,
        });
    }
    let mode = build_mode_standalone(j, k, params, dim)?;
    let weight = pairing(&mode.left, rho)?;
    Ok(mode.right.scale(weight))
}

/// All modes with `j <= j_max`, in the normative iteration order: `j`
/// ascending, `k` descending within each `j`. The ordering is stable and is
/// what the spectrum table emits.
///
/// Modes with `|k| >= dim` vanish identically at this truncation (their
/// vectors live on a diagonal outside the matrix) and are skipped. No tail
/// guard is applied here: mode sums over interior-supported states stay
/// accurate for `j` well beyond the single-mode guard, which is exactly how
/// the completeness and propagation sums use them.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    params: ModelParams,
    dim: usize,
    j_max: usize,
    modes: Vec<SpectralMode>,
}

impl SpectralBasis {
    pub fn new(params: &ModelParams, dim: usize, j_max: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall { dim });
        }
        let xi_exact = combinatorics::from_float(params.xi()).ok_or(Error::NonFiniteEntry)?;
        let xi_pow = xi_powers(params.xi(), dim);
        let fact = factorial_table(dim);
        let mut modes = Vec::new();
        for j in 0..=j_max {
            let mut k = j as isize;
            while k >= -(j as isize) {
                if k.unsigned_abs() < dim {
                    modes.push(build_mode(j, k, params, dim, &xi_exact, &xi_pow, &fact)?);
                }
                k -= 2;
            }
        }
        Ok(Self {
            params: *params,
            dim,
            j_max,
            modes,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn modes(&self) -> &[SpectralMode] {
        &self.modes
    }

    /// Mode sum at `t = 0`: `sum_j P_{j,k} rho`. Converges to `rho` as
    /// `j_max` grows when `rho` is supported well inside the truncation.
    pub fn completeness_sum(&self, rho: &FockOperator) -> Result<FockOperator> {
        let mut acc = FockOperator::zeros(self.dim);
        for mode in &self.modes {
            let weight = pairing(&mode.left, rho)?;
            acc = acc.add(&mode.right.scale(weight));
        }
        Ok(acc)
    }

    /// Truncated mode-sum propagation of `rho0` to time `t`.
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<SpectralEvolution> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                requirement: "non-negative",
                value: t,
            });
        }
        if rho0.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: rho0.dim(),
                right: self.dim,
            });
        }
        let mut evolved = FockOperator::zeros(self.dim);
        let mut projected = FockOperator::zeros(self.dim);
        for mode in &self.modes {
            let weight = pairing(&mode.left, rho0.op())?;
            let term = mode.right.scale(weight);
            evolved = evolved.add(&term.scale((mode.lambda * t).exp()));
            projected = projected.add(&term);
        }
        // What the retained modes miss of rho0 at t = 0, damped at the decay
        // rate of the first dropped mode band.
        let missed = rho0.op().sub(&projected).norm();
        let damping = (-((self.j_max + 1) as f64) * self.params.kappa() * t / 2.0).exp();
        Ok(SpectralEvolution {
            state: DensityMatrix::wrap(evolved),
            remainder_bound: missed * damping,
        })
    }
}

/// Result of a spectral propagation: the evolved state and an estimate of
/// the truncated-mode remainder.
#[derive(Debug, Clone)]
pub struct SpectralEvolution {
    pub state: DensityMatrix,
    /// Frobenius norm of the `t = 0` projection residual, scaled by
    /// `exp(-(j_max+1) kappa t / 2)`.
    pub remainder_bound: f64,
}

/// One-shot spectral propagation (builds a [`SpectralBasis`] internally).
pub fn spectral_propagate(
    rho0: &DensityMatrix,
    t: f64,
    j_max: usize,
    params: &ModelParams,
    dim: usize,
) -> Result<SpectralEvolution> {
    SpectralBasis::new(params, dim, j_max)?.propagate(rho0, t)
}

/// Stationary state shortcut: the `(0,0)` projection of any unit-trace state
/// is the truncated Gibbs state.
pub fn equilibrium_state(params: &ModelParams, dim: usize) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let xi = params.xi();
    Ok(DensityMatrix::wrap(
        thermal_kernel(xi, dim).scale_re(1.0 - xi),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::gibbs_state;
    use crate::superop::{adjoint_liouvillian_apply, liouvillian_apply};
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn std_params() -> ModelParams {
        ModelParams::new(1.0, 1.0, std::f64::consts::LN_2).unwrap()
    }

    fn random_hermitian_unit_trace(dim: usize, support: usize, seed: u64) -> DensityMatrix {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut op = FockOperator::zeros(dim);
        for i in 0..=support {
            for j in 0..=i {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if i == j {
                    op.set(i, i, C64::new(z.re.abs() + 0.2, 0.0));
                } else {
                    op.set(i, j, z);
                    op.set(j, i, z.conj());
                }
            }
        }
        let tr = op.trace().re;
        DensityMatrix::wrap(op.scale_re(1.0 / tr))
    }

    #[test]
    fn eigenvalue_table() {
        let p = std_params();
        assert_eq!(eigenvalue(0, 0, &p).unwrap(), C64::new(0.0, 0.0));
        let l11 = eigenvalue(1, 1, &p).unwrap();
        assert_abs_diff_eq!(l11.re, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(l11.im, -1.0, epsilon = 1e-15);
        let l20 = eigenvalue(2, 0, &p).unwrap();
        assert_abs_diff_eq!(l20.re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l20.im, 0.0, epsilon = 1e-15);
        // parity violations
        assert!(eigenvalue(1, 0, &p).is_err());
        assert!(eigenvalue(2, 1, &p).is_err());
        assert!(eigenvalue(1, 2, &p).is_err());
    }

    #[test]
    fn ground_right_vector_is_scaled_thermal_kernel() {
        let p = std_params();
        let dim = 44;
        let v = right_vector(0, 0, &p, dim).unwrap();
        let xi = p.xi();
        let expect = thermal_kernel(xi, dim).scale_re((1.0 - xi).sqrt());
        assert!(v.sub(&expect).max_abs_entry() < 1e-14);
    }

    #[test]
    fn ground_left_vector_is_scaled_identity() {
        let p = std_params();
        let dim = 44;
        let w = left_vector(0, 0, &p, dim).unwrap();
        let expect = FockOperator::identity(dim).scale_re((1.0 - p.xi()).sqrt());
        assert!(w.sub(&expect).max_abs_entry() < 1e-14);
        // pairing with the ground right vector is 1 up to the thermal tail
        let v = right_vector(0, 0, &p, dim).unwrap();
        let pair = pairing(&w, &v).unwrap();
        assert!((pair - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn tail_guard_reports_required_dimension() {
        let p = std_params();
        let err = right_vector(2, 0, &p, 40).unwrap_err();
        match err {
            Error::InsufficientDim { required, j, dim } => {
                assert_eq!(j, 2);
                assert_eq!(dim, 40);
                assert_eq!(required, 42);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(right_vector(2, 0, &p, 42).is_ok());
    }

    #[test]
    fn negative_k_is_adjoint_of_positive_k() {
        let p = std_params();
        let dim = 46;
        let v_plus = right_vector(1, 1, &p, dim).unwrap();
        let v_minus = right_vector(1, -1, &p, dim).unwrap();
        assert!(v_minus.sub(&v_plus.adjoint()).max_abs_entry() == 0.0);
        let lam_p = eigenvalue(1, 1, &p).unwrap();
        let lam_m = eigenvalue(1, -1, &p).unwrap();
        assert_eq!(lam_m, lam_p.conj());
    }

    #[test]
    fn right_vectors_satisfy_eigen_relation() {
        let p = std_params();
        let dim = 60;
        for j in 0..=6usize {
            let mut k = j as isize;
            while k >= -(j as isize) {
                let v = right_vector(j, k, &p, dim).unwrap();
                let lam = eigenvalue(j, k, &p).unwrap();
                let res = liouvillian_apply(&p, &v).sub(&v.scale(lam)).norm() / v.norm();
                assert!(res <= 1e-9, "j={j} k={k}: residual {res}");
                k -= 2;
            }
        }
    }

    #[test]
    fn left_vectors_satisfy_adjoint_eigen_relation() {
        let p = std_params();
        let dim = 40;
        let (j, k) = (2usize, 2isize);
        let basis = SpectralBasis::new(&p, dim, j).unwrap();
        let mode = basis
            .modes()
            .iter()
            .find(|m| m.j == j && m.k == k)
            .unwrap();
        let w_dag = mode.left.adjoint();
        let out = adjoint_liouvillian_apply(&p, &w_dag);
        let expect = w_dag.scale(mode.lambda.conj());
        let interior = dim - 2;
        let res = out.sub(&expect).leading_block(interior).norm()
            / w_dag.leading_block(interior).norm();
        assert!(res <= 1e-10, "left residual {res}");
    }

    #[test]
    fn left_vector_k0_terms() {
        // W_{2,0} = sqrt(C_{0,1}) (1 - (1-xi)/xi * N) at xi = 1/2:
        // sqrt(1/4) * (1 - N), i.e. diag(1/2, 0, -1/2, -1, ...)
        let p = std_params();
        let dim = 44;
        let w = left_vector(2, 0, &p, dim).unwrap();
        for r in 0..6 {
            let expect = 0.5 * (1.0 - r as f64);
            assert_abs_diff_eq!(w.get(r, r).re, expect, epsilon = 1e-13);
        }
        // trace against the stationary mode vanishes
        let v00 = right_vector(0, 0, &p, dim).unwrap();
        assert!(pairing(&w, &v00).unwrap().norm() < 1e-10);
        // and the identity has zero pairing with the (2,0) right vector
        let v20 = SpectralBasis::new(&p, dim, 2)
            .unwrap()
            .modes()
            .iter()
            .find(|m| m.j == 2 && m.k == 0)
            .unwrap()
            .right
            .clone();
        let one = FockOperator::identity(dim);
        assert!(pairing(&one, &v20).unwrap().norm() < 1e-10);
    }

    #[test]
    fn biorthonormality_block() {
        let p = std_params();
        let dim = 60;
        let basis = SpectralBasis::new(&p, dim, 8).unwrap();
        for left_mode in basis.modes() {
            for right_mode in basis.modes() {
                let pair = pairing(&left_mode.left, &right_mode.right).unwrap();
                let expect = if left_mode.j == right_mode.j && left_mode.k == right_mode.k {
                    1.0
                } else {
                    0.0
                };
                let defect = (pair - C64::new(expect, 0.0)).norm();
                assert!(
                    defect <= 1e-9,
                    "({},{}) vs ({},{}): defect {defect}",
                    left_mode.j,
                    left_mode.k,
                    right_mode.j,
                    right_mode.k,
                );
            }
        }
    }

    #[test]
    fn projection_of_unit_trace_state_onto_ground_mode() {
        let p = std_params();
        let dim = 44;
        let rho = random_hermitian_unit_trace(dim, 5, 17);
        let out = projection_apply(0, 0, rho.op(), &p, dim).unwrap();
        let expect = equilibrium_state(&p, dim).unwrap();
        assert!(out.sub(expect.op()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn projection_example_first_excited_coherence() {
        // P_{1,1} |1><0| = (1-xi)^2 a_dag xi^N
        let p = std_params();
        let dim = 46;
        let rho = FockOperator::basis(1, 0, dim);
        let out = projection_apply(1, 1, &rho, &p, dim).unwrap();
        let xi = p.xi();
        let expect = FockOperator::creation(dim)
            .mul(&thermal_kernel(xi, dim))
            .scale_re((1.0 - xi) * (1.0 - xi));
        assert!(out.sub(&expect).max_abs_entry() < 1e-12);
    }

    #[test]
    fn projections_are_orthogonal_idempotents() {
        let p = std_params();
        let dim = 48;
        let basis = SpectralBasis::new(&p, dim, 4).unwrap();
        let rho = random_hermitian_unit_trace(dim, 5, 23);
        for m1 in basis.modes() {
            let proj1 = m1.right.scale(pairing(&m1.left, rho.op()).unwrap());
            for m2 in basis.modes() {
                let proj21 = m2.right.scale(pairing(&m2.left, &proj1).unwrap());
                let expect = if m1.j == m2.j && m1.k == m2.k {
                    proj1.clone()
                } else {
                    FockOperator::zeros(dim)
                };
                let defect = proj21.sub(&expect).norm();
                assert!(
                    defect < 1e-9,
                    "({},{}) o ({},{}): {defect}",
                    m2.j,
                    m2.k,
                    m1.j,
                    m1.k
                );
            }
        }
    }

    #[test]
    fn gibbs_is_fixed_point_of_propagation() {
        let p = std_params();
        let dim = 40;
        let rho = gibbs_state(&p, dim).unwrap();
        let out = spectral_propagate(&rho, 3.7, 0, &p, dim).unwrap();
        assert!(out.state.op().sub(rho.op()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn long_time_limit_is_equilibrium() {
        let p = std_params();
        let dim = 40;
        let t = 200.0 / p.kappa();
        let rho = random_hermitian_unit_trace(dim, 5, 5);
        let out = spectral_propagate(&rho, t, 12, &p, dim).unwrap();
        let eq = equilibrium_state(&p, dim).unwrap();
        let diff = out.state.op().sub(eq.op());
        assert!(diff.norm() < 1e-10);
    }

    #[test]
    fn completeness_at_t_zero() {
        let p = std_params();
        let dim = 40;
        let basis = SpectralBasis::new(&p, dim, 2 * dim).unwrap();
        let rho = random_hermitian_unit_trace(dim, 5, 31);
        let rebuilt = basis.completeness_sum(rho.op()).unwrap();
        let err = rebuilt.sub(rho.op()).norm();
        assert!(err <= 1e-8, "completeness error {err}");
    }

    #[test]
    fn propagation_preserves_trace_and_hermiticity() {
        let p = std_params();
        let dim = 32;
        let basis = SpectralBasis::new(&p, dim, 24).unwrap();
        let rho = random_hermitian_unit_trace(dim, 4, 9);
        for &t in &[0.0, 0.4, 1.7] {
            let out = basis.propagate(&rho, t).unwrap();
            assert!((out.state.op().trace().re - 1.0).abs() < 1e-10);
            assert!(out.state.op().trace().im.abs() < 1e-12);
            assert!(out.state.op().hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn remainder_bound_shrinks_with_time_and_modes() {
        let p = std_params();
        let dim = 24;
        let rho = random_hermitian_unit_trace(dim, 4, 77);
        let small = spectral_propagate(&rho, 1.0, 2, &p, dim).unwrap();
        let large = spectral_propagate(&rho, 1.0, 30, &p, dim).unwrap();
        assert!(large.remainder_bound < small.remainder_bound);
        let later = spectral_propagate(&rho, 4.0, 2, &p, dim).unwrap();
        assert!(later.remainder_bound < small.remainder_bound);
    }

    #[test]
    fn mode_ordering_is_normative() {
        let p = std_params();
        let basis = SpectralBasis::new(&p, 16, 2).unwrap();
        let labels: Vec<(usize, isize)> = basis.modes().iter().map(|m| (m.j, m.k)).collect();
        assert_eq!(labels, vec![(0, 0), (1, 1), (1, -1), (2, 2), (2, 0), (2, -2)]);
    }
}
