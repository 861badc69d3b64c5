//! Ladder superoperators and the alternative spectral resolution they
//! generate.
//!
//! Two commuting ladder pairs move through the mode lattice, built from the
//! one-sided multiplications:
//!
//! ```text
//! CoRaise      rho = a_dag rho - rho a_dag        (j+1, k+1)
//! CoLower      rho = gamma' rho a - gamma a rho   (j-1, k-1)
//! CounterRaise rho = rho a - a rho                (j+1, k-1)
//! CounterLower rho = gamma' a_dag rho - gamma rho a_dag   (j-1, k+1)
//! ```
//!
//! Both lowering operators annihilate the thermal kernel `xi^N`, so every
//! eigenstate is reached by raising it:
//! `ket_{m,n} = CoRaise^m CounterRaise^n xi^N` with eigenvalue
//! `mu_{m,n} = -((m+n)/2) kappa - i (m-n) omega = lambda_{m+n, m-n}`.
//!
//! The ground normalization is fixed to `ket_0 = xi^N` and
//! `bra_0 = (1-xi) * 1`, which makes the order-by-order weights of
//! [`ladder_propagate`] reproduce the eigenprojection sum exactly.
//!
//! Dual vectors act on the bra side through the trace dual
//! (`tr((S* W) rho) = tr(W (S rho))`, the transpose of the superoperator
//! matrix under the fixed vectorization — not the Hilbert-Schmidt adjoint).
//! For the one-sided multiplications the trace dual reduces by cyclicity to
//! multiplication from the other side, which is how it is evaluated here;
//! the unit tests pin this against the transposed matrix route.

use crate::fock::thermal_kernel;
use crate::spectral::eigenvalue;
use crate::{superop, DensityMatrix, Error, FockOperator, ModelParams, Result, C64};

/// The four ladder superoperators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOp {
    /// Raises both mode indices: `rho -> a_dag rho - rho a_dag`.
    CoRaise,
    /// Lowers both mode indices: `rho -> gamma' rho a - gamma a rho`.
    CoLower,
    /// Raises the decay index, lowers the phase index: `rho -> rho a - a rho`.
    CounterRaise,
    /// Lowers the decay index, raises the phase index:
    /// `rho -> gamma' a_dag rho - gamma rho a_dag`.
    CounterLower,
}

/// Direct action of a ladder superoperator.
pub fn apply_ladder(which: LadderOp, a: &FockOperator, params: &ModelParams) -> FockOperator {
    let ann = FockOperator::annihilation(a.dim());
    let cre = ann.adjoint();
    let g = params.gamma();
    let gp = params.gamma_prime();
    match which {
        LadderOp::CoRaise => cre.mul(a).sub(&a.mul(&cre)),
        LadderOp::CoLower => a.mul(&ann).scale_re(gp).sub(&ann.mul(a).scale_re(g)),
        LadderOp::CounterRaise => a.mul(&ann).sub(&ann.mul(a)),
        LadderOp::CounterLower => cre.mul(a).scale_re(gp).sub(&a.mul(&cre).scale_re(g)),
    }
}

/// Trace-dual action of a ladder superoperator on a left-functional
/// operator: `tr((S* W) rho) = tr(W (S rho))`. Obtained from the direct
/// action by trace cyclicity.
pub fn apply_ladder_dual(which: LadderOp, w: &FockOperator, params: &ModelParams) -> FockOperator {
    let ann = FockOperator::annihilation(w.dim());
    let cre = ann.adjoint();
    let g = params.gamma();
    let gp = params.gamma_prime();
    match which {
        // tr(W (a_dag rho - rho a_dag)) = tr((W a_dag - a_dag W) rho)
        LadderOp::CoRaise => w.mul(&cre).sub(&cre.mul(w)),
        // tr(W (g' rho a - g a rho)) = tr((g' a W - g W a) rho)
        LadderOp::CoLower => ann.mul(w).scale_re(gp).sub(&w.mul(&ann).scale_re(g)),
        // tr(W (rho a - a rho)) = tr((a W - W a) rho)
        LadderOp::CounterRaise => ann.mul(w).sub(&w.mul(&ann)),
        // tr(W (g' a_dag rho - g rho a_dag)) = tr((g' W a_dag - g a_dag W) rho)
        LadderOp::CounterLower => w.mul(&cre).scale_re(gp).sub(&cre.mul(w).scale_re(g)),
    }
}

/// One ladder-built eigenmode.
#[derive(Debug, Clone)]
pub struct LadderState {
    pub m: usize,
    pub n: usize,
    /// `mu_{m,n} = lambda_{m+n, m-n}` (same arithmetic, not a re-derivation).
    pub mu: C64,
    /// `CoRaise^m CounterRaise^n xi^N`.
    pub ket: FockOperator,
    /// Dual operator, paired as `tr(bra * rho)`.
    pub bra: FockOperator,
}

impl LadderState {
    /// Relative eigen-relation residual `|L ket - mu ket| / |ket|`.
    pub fn residual(&self, params: &ModelParams) -> f64 {
        let out = superop::liouvillian_apply(params, &self.ket);
        out.sub(&self.ket.scale(self.mu)).norm() / self.ket.norm()
    }
}

fn spread_guard(m: usize, n: usize, dim: usize) -> Result<()> {
    let guard = dim / 4;
    if m + n > guard {
        return Err(Error::LadderGuard {
            order: m + n,
            guard,
            dim,
        });
    }
    Ok(())
}

/// `mu_{m,n}` via the closed-form eigenvalue at `(j, k) = (m+n, m-n)`.
pub fn ladder_eigenvalue(m: usize, n: usize, params: &ModelParams) -> C64 {
    eigenvalue(m + n, m as isize - n as isize, params)
        .expect("(m+n, m-n) always satisfies the mode parity")
}

fn raise_ket(m: usize, n: usize, params: &ModelParams, dim: usize) -> FockOperator {
    let mut ket = thermal_kernel(params.xi(), dim);
    for _ in 0..n {
        ket = apply_ladder(LadderOp::CounterRaise, &ket, params);
    }
    for _ in 0..m {
        ket = apply_ladder(LadderOp::CoRaise, &ket, params);
    }
    ket
}

/// Weight prefactor `1 / (m! n! (gamma' - gamma)^(m+n))`.
fn dual_prefactor(m: usize, n: usize, params: &ModelParams) -> f64 {
    let mut fact = 1.0;
    for i in 2..=m {
        fact *= i as f64;
    }
    for i in 2..=n {
        fact *= i as f64;
    }
    let base = params.gamma_prime() - params.gamma(); // = -kappa
    1.0 / (fact * base.powi((m + n) as i32))
}

/// Dual vector of `ket_{m,n}`:
/// `bra = (1/(m! n! (gamma'-gamma)^(m+n))) * bra_0 CoLower^m CounterLower^n`
/// with `bra_0 = (1-xi) 1`, materialized through the trace dual.
pub fn dual_vector(m: usize, n: usize, params: &ModelParams, dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    spread_guard(m, n, dim)?;
    let mut w = FockOperator::identity(dim).scale_re(1.0 - params.xi());
    // functional rho -> tr(bra_0 CoLower^m CounterLower^n rho): dualize the
    // innermost application first
    for _ in 0..m {
        w = apply_ladder_dual(LadderOp::CoLower, &w, params);
    }
    for _ in 0..n {
        w = apply_ladder_dual(LadderOp::CounterLower, &w, params);
    }
    Ok(w.scale_re(dual_prefactor(m, n, params)))
}

/// Builds the `(m, n)` eigenmode with its dual.
pub fn build_eigenstate(
    m: usize,
    n: usize,
    params: &ModelParams,
    dim: usize,
) -> Result<LadderState> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    spread_guard(m, n, dim)?;
    Ok(LadderState {
        m,
        n,
        mu: ladder_eigenvalue(m, n, params),
        ket: raise_ket(m, n, params, dim),
        bra: dual_vector(m, n, params, dim)?,
    })
}

/// Propagation through the ladder resolution:
/// `rho(t) = sum_{m+n <= order_max} e^{mu t} (1-xi)/(m! n! (gamma'-gamma)^(m+n))
///  * tr[CoLower^m CounterLower^n rho0] * CoRaise^m CounterRaise^n xi^N`.
pub fn ladder_propagate(
    rho0: &DensityMatrix,
    t: f64,
    order_max: usize,
    params: &ModelParams,
    dim: usize,
) -> Result<DensityMatrix> {
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: dim,
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            requirement: "non-negative",
            value: t,
        });
    }
    spread_guard(order_max, 0, dim)?;

    let one_minus_xi = 1.0 - params.xi();
    let mut acc = FockOperator::zeros(dim);
    // lowered_n = CounterLower^n rho0, then lowered further by CoLower
    let mut lowered_n = rho0.op().clone();
    for n in 0..=order_max {
        if n > 0 {
            lowered_n = apply_ladder(LadderOp::CounterLower, &lowered_n, params);
        }
        let mut lowered = lowered_n.clone();
        for m in 0..=(order_max - n) {
            if m > 0 {
                lowered = apply_ladder(LadderOp::CoLower, &lowered, params);
            }
            let weight = lowered.trace() * dual_prefactor(m, n, params) * one_minus_xi;
            let mu = ladder_eigenvalue(m, n, params);
            let ket = raise_ket(m, n, params, dim);
            acc = acc.add(&ket.scale(weight * (mu * t).exp()));
        }
    }
    Ok(DensityMatrix::wrap(acc))
}

/// Norm distance between the rays of `a` and `b` after optimal global phase
/// alignment: `sqrt(2 - 2 |<a/|a|, b/|b|>|)`.
pub fn collinearity_defect(a: &FockOperator, b: &FockOperator) -> f64 {
    let inner = a.adjoint().mul(b).trace().norm() / (a.norm() * b.norm());
    (2.0 - 2.0 * inner).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::gibbs_state;
    use crate::spectral::{pairing, spectral_propagate, SpectralBasis};
    use crate::states;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn std_params() -> ModelParams {
        ModelParams::new(1.0, 1.0, std::f64::consts::LN_2).unwrap()
    }

    fn random_supported(dim: usize, support: usize, seed: u64) -> FockOperator {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut op = FockOperator::zeros(dim);
        for i in 0..=support {
            for j in 0..=support {
                op.set(
                    i,
                    j,
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        op
    }

    #[test]
    fn lowering_kills_the_thermal_kernel() {
        let p = std_params();
        let dim = 32;
        let rho = gibbs_state(&p, dim).unwrap();
        for which in [LadderOp::CoLower, LadderOp::CounterLower] {
            let out = apply_ladder(which, rho.op(), &p);
            // detailed balance cancels entry by entry, even at truncation
            assert!(out.max_abs_entry() < 1e-15, "{which:?}");
        }
    }

    #[test]
    fn generator_commutators_with_ladders() {
        // [L, CoRaise] = (-kappa/2 - i w) CoRaise and friends, checked as
        // actions on interior-supported operators
        let p = std_params();
        let dim = 20;
        let lio = |x: &FockOperator| superop::liouvillian_apply(&p, x);
        let shifts = [
            (LadderOp::CoRaise, C64::new(-p.kappa() / 2.0, -p.omega())),
            (LadderOp::CoLower, C64::new(p.kappa() / 2.0, p.omega())),
            (LadderOp::CounterRaise, C64::new(-p.kappa() / 2.0, p.omega())),
            (LadderOp::CounterLower, C64::new(p.kappa() / 2.0, -p.omega())),
        ];
        for (which, shift) in shifts {
            for seed in 0..2 {
                let a = random_supported(dim, dim - 4, 7 + seed);
                let ladder = |x: &FockOperator| apply_ladder(which, x, &p);
                let comm = lio(&ladder(&a)).sub(&ladder(&lio(&a)));
                let expect = ladder(&a).scale(shift);
                let defect = comm.sub(&expect).max_abs_entry();
                assert!(defect < 1e-10 * a.norm(), "{which:?}: {defect}");
            }
        }
    }

    #[test]
    fn ladder_pair_commutators() {
        let p = std_params();
        let dim = 20;
        let pairs = [
            (LadderOp::CoLower, LadderOp::CoRaise),
            (LadderOp::CounterLower, LadderOp::CounterRaise),
        ];
        for (lower, raise) in pairs {
            for seed in 0..2 {
                let a = random_supported(dim, dim - 4, 40 + seed);
                let lo = |x: &FockOperator| apply_ladder(lower, x, &p);
                let ra = |x: &FockOperator| apply_ladder(raise, x, &p);
                let comm = lo(&ra(&a)).sub(&ra(&lo(&a)));
                // [lower, raise] = -kappa
                let expect = a.scale_re(-p.kappa());
                assert!(comm.sub(&expect).max_abs_entry() < 1e-10 * a.norm());
            }
        }
        // the two families commute
        let cross = [
            (LadderOp::CoRaise, LadderOp::CounterRaise),
            (LadderOp::CoRaise, LadderOp::CounterLower),
            (LadderOp::CoLower, LadderOp::CounterRaise),
            (LadderOp::CoLower, LadderOp::CounterLower),
        ];
        for (f, g) in cross {
            let a = random_supported(dim, dim - 4, 99);
            let ff = |x: &FockOperator| apply_ladder(f, x, &p);
            let gg = |x: &FockOperator| apply_ladder(g, x, &p);
            let comm = ff(&gg(&a)).sub(&gg(&ff(&a)));
            assert!(comm.max_abs_entry() < 1e-10 * a.norm(), "{f:?},{g:?}");
        }
    }

    #[test]
    fn trace_dual_matches_transposed_matrix() {
        let p = std_params();
        let dim = 6;
        for which in [
            LadderOp::CoRaise,
            LadderOp::CoLower,
            LadderOp::CounterRaise,
            LadderOp::CounterLower,
        ] {
            let matrix = superop::SuperOperator::from_action(dim, |x| apply_ladder(which, x, &p));
            let dual_matrix = matrix.trace_dual();
            let w = random_supported(dim, dim - 1, 3);
            // the trace dual acts on vec(W^T); undo the transposes around
            // the matrix application
            let lhs = apply_ladder_dual(which, &w, &p);
            let rhs = dual_matrix
                .apply(&FockOperator::from_matrix_unchecked(
                    w.matrix().t().to_owned(),
                ))
                .unwrap();
            let rhs = FockOperator::from_matrix_unchecked(rhs.matrix().t().to_owned());
            assert!(lhs.sub(&rhs).max_abs_entry() < 1e-12, "{which:?}");
        }
    }

    #[test]
    fn ground_state_and_eigenvalues() {
        let p = std_params();
        let dim = 24;
        let ground = build_eigenstate(0, 0, &p, dim).unwrap();
        assert_eq!(ground.mu, C64::new(0.0, 0.0));
        assert!(ground
            .ket
            .sub(&thermal_kernel(p.xi(), dim))
            .max_abs_entry()
            < 1e-15);

        let first = build_eigenstate(1, 0, &p, dim).unwrap();
        assert_abs_diff_eq!(first.mu.re, -p.kappa() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(first.mu.im, -p.omega(), epsilon = 1e-15);
        assert_eq!(first.mu, eigenvalue(1, 1, &p).unwrap());
    }

    #[test]
    fn eigenvalue_identification_is_exact() {
        let p = std_params();
        for m in 0..=5usize {
            for n in 0..=5usize {
                let mu = ladder_eigenvalue(m, n, &p);
                let lam = eigenvalue(m + n, m as isize - n as isize, &p).unwrap();
                assert_eq!(mu, lam, "(m,n)=({m},{n})");
            }
        }
    }

    #[test]
    fn kets_satisfy_eigen_relation() {
        let p = std_params();
        let dim = 40;
        for (m, n) in [(1usize, 0usize), (0, 1), (1, 1), (2, 1), (3, 2)] {
            let state = build_eigenstate(m, n, &p, dim).unwrap();
            let res = state.residual(&p);
            assert!(res < 1e-10, "(m,n)=({m},{n}): residual {res}");
        }
    }

    #[test]
    fn ladder_kets_align_with_spectral_vectors() {
        let p = std_params();
        let dim = 60;
        let basis = SpectralBasis::new(&p, dim, 6).unwrap();
        for m in 0..=3usize {
            for n in 0..=3usize {
                if m + n == 0 || m + n > 6 {
                    continue;
                }
                let state = build_eigenstate(m, n, &p, dim).unwrap();
                let (j, k) = (m + n, m as isize - n as isize);
                let spectral = &basis
                    .modes()
                    .iter()
                    .find(|md| md.j == j && md.k == k)
                    .unwrap()
                    .right;
                let defect = collinearity_defect(&state.ket, spectral);
                assert!(defect <= 1e-8, "(m,n)=({m},{n}): defect {defect}");
            }
        }
    }

    #[test]
    fn dual_pairings_are_biorthonormal() {
        let p = std_params();
        let dim = 40;
        let orders = [(0usize, 0usize), (1, 0), (0, 1), (1, 1), (2, 0), (2, 1)];
        for &(m, n) in &orders {
            for &(mp, np) in &orders {
                let bra = dual_vector(m, n, &p, dim).unwrap();
                let ket = raise_ket(mp, np, &p, dim);
                let pair = pairing(&bra, &ket).unwrap();
                let expect = if (m, n) == (mp, np) { 1.0 } else { 0.0 };
                assert!(
                    (pair - C64::new(expect, 0.0)).norm() < 1e-8,
                    "bra({m},{n}) ket({mp},{np}): {pair}"
                );
            }
        }
    }

    #[test]
    fn ground_dual_normalization() {
        let p = std_params();
        let dim = 40;
        let bra0 = dual_vector(0, 0, &p, dim).unwrap();
        let ket0 = thermal_kernel(p.xi(), dim);
        let pair = pairing(&bra0, &ket0).unwrap();
        assert!((pair - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn propagation_matches_spectral_resolution() {
        let p = std_params();
        let dim = 40;
        let rho = states::superposition_benchmark(dim).unwrap();
        for &t in &[0.2, 1.0] {
            let via_ladder = ladder_propagate(&rho, t, 8, &p, dim).unwrap();
            let via_modes = spectral_propagate(&rho, t, 8, &p, dim).unwrap();
            let diff = via_ladder.op().sub(via_modes.state.op()).norm();
            assert!(diff <= 1e-8, "t={t}: {diff}");
        }
    }

    #[test]
    fn gibbs_is_stationary_under_ladder_propagation() {
        let p = std_params();
        let dim = 40;
        let rho = gibbs_state(&p, dim).unwrap();
        let out = ladder_propagate(&rho, 2.0, 6, &p, dim).unwrap();
        assert!(out.op().sub(rho.op()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn spread_guard_enforced() {
        let p = std_params();
        assert!(build_eigenstate(4, 3, &p, 24).is_err());
        assert!(build_eigenstate(3, 3, &p, 24).is_ok());
        assert!(ladder_propagate(&states::fock_state(0, 16).unwrap(), 1.0, 8, &p, 16).is_err());
    }
}
