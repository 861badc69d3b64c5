//! Brute-force reference propagator and numerical spectrum cross-check.
//!
//! Everything the closed-form machinery claims is validated against two
//! blunt instruments: `exp(t L)` of the vectorized generator, computed by
//! scaling-and-squaring with a 13th-order Pade kernel, and a dense
//! eigensolve of the `D^2 x D^2` generator matrix. Neither knows anything
//! about the mode structure.

use ndarray::Array2;
use ndarray_linalg::{EigVals, Inverse};

use crate::spectral::eigenvalue;
use crate::{superop, DensityMatrix, Error, FockOperator, ModelParams, Result, C64};

/// Largest base dimension for which the dense `D^2 x D^2` exponential is
/// attempted (4096^2 worst case).
pub const MAX_EXPM_DIM: usize = 64;

/// Largest base dimension for the full dense eigensolve.
pub const MAX_SPECTRUM_DIM: usize = 40;

// Pade-13 numerator coefficients; the denominator uses the same ones with
// alternating signs.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm threshold for the order-13 approximant in double precision.
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Array2<C64>) -> f64 {
    let mut worst = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        worst = worst.max(s);
    }
    worst
}

fn scaled_eye(n: usize, scale: f64) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(scale, 0.0))
}

/// Dense matrix exponential by scaling-and-squaring with a fixed Pade-13
/// kernel. Relative accuracy is at the 1e-13 level for the generators used
/// here; the semigroup self-consistency test pins it.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;

    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(squarings as i32));

    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let u_inner = &a6.mapv(|z| z * PADE13[13])
        + &a4.mapv(|z| z * PADE13[11])
        + &a2.mapv(|z| z * PADE13[9]);
    let u_poly = a6.dot(&u_inner)
        + &a6.mapv(|z| z * PADE13[7])
        + &a4.mapv(|z| z * PADE13[5])
        + &a2.mapv(|z| z * PADE13[3])
        + &scaled_eye(n, PADE13[1]);
    let u = scaled.dot(&u_poly);

    let v_inner = &a6.mapv(|z| z * PADE13[12])
        + &a4.mapv(|z| z * PADE13[10])
        + &a2.mapv(|z| z * PADE13[8]);
    let v = a6.dot(&v_inner)
        + &a6.mapv(|z| z * PADE13[6])
        + &a4.mapv(|z| z * PADE13[4])
        + &a2.mapv(|z| z * PADE13[2])
        + &scaled_eye(n, PADE13[0]);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut result = lhs.inv()?.dot(&rhs);
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

/// Precomputed `exp(t L)` for one time, reusable across initial states.
#[derive(Debug, Clone)]
pub struct ExpmPropagator {
    dim: usize,
    t: f64,
    matrix: Array2<C64>,
}

impl ExpmPropagator {
    pub fn new(params: &ModelParams, dim: usize, t: f64) -> Result<Self> {
        if dim > MAX_EXPM_DIM {
            return Err(Error::DimensionTooLarge {
                dim,
                max: MAX_EXPM_DIM,
            });
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                requirement: "non-negative",
                value: t,
            });
        }
        let generator = superop::liouvillian_matrix(params, dim)?;
        let scaled = generator.matrix().mapv(|z| z * t);
        Ok(Self {
            dim,
            t,
            matrix: expm(&scaled)?,
        })
    }

    /// Builds the propagator from an explicit generator matrix (used to
    /// chain uniform time steps without recomputing the exponential).
    pub fn from_matrix(dim: usize, t: f64, matrix: Array2<C64>) -> Self {
        Self { dim, t, matrix }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn apply_operator(&self, op: &FockOperator) -> Result<FockOperator> {
        if op.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: self.dim,
            });
        }
        let v = self.matrix.dot(&superop::vectorize(op));
        superop::devectorize(&v, self.dim)
    }

    pub fn apply(&self, rho0: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::wrap(self.apply_operator(rho0.op())?))
    }
}

/// One-shot reference propagation `devec(exp(t L) vec(rho0))`.
pub fn expm_propagate(
    rho0: &DensityMatrix,
    t: f64,
    params: &ModelParams,
    dim: usize,
) -> Result<DensityMatrix> {
    ExpmPropagator::new(params, dim, t)?.apply(rho0)
}

/// Full dense spectrum of the generator, sorted by descending real part
/// (ties broken by ascending imaginary part) for deterministic output.
pub fn numerical_spectrum(params: &ModelParams, dim: usize) -> Result<Vec<C64>> {
    if dim > MAX_SPECTRUM_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_SPECTRUM_DIM,
        });
    }
    let generator = superop::liouvillian_matrix(params, dim)?;
    let eigs = generator.matrix().eigvals()?;
    let mut vals: Vec<C64> = eigs.to_vec();
    vals.sort_by(|a, b| {
        b.re.total_cmp(&a.re)
            .then_with(|| a.im.total_cmp(&b.im))
    });
    Ok(vals)
}

/// Pairing of one closed-form eigenvalue with its nearest numerical partner.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumMatch {
    pub j: usize,
    pub k: isize,
    pub closed: C64,
    pub numeric: C64,
    pub error: f64,
}

/// Greedily matches closed-form eigenvalues `lambda_{j,k}`, `j <= j_cut`, to
/// the numerical spectrum, consuming each numerical eigenvalue at most once.
/// Higher-`j` closed-form modes are truncation-distorted and excluded by the
/// default cut `j_cut = D/4`.
pub fn match_spectrum(params: &ModelParams, dim: usize, j_cut: usize) -> Result<Vec<SpectrumMatch>> {
    let numeric = numerical_spectrum(params, dim)?;
    let mut used = vec![false; numeric.len()];
    let mut matches = Vec::new();
    for j in 0..=j_cut {
        let mut k = j as isize;
        while k >= -(j as isize) {
            let closed = eigenvalue(j, k, params)?;
            let mut best: Option<(usize, f64)> = None;
            for (idx, cand) in numeric.iter().enumerate() {
                if used[idx] {
                    continue;
                }
                let err = (closed - cand).norm();
                if best.map(|(_, b)| err < b).unwrap_or(true) {
                    best = Some((idx, err));
                }
            }
            let (idx, error) = best.ok_or_else(|| Error::Linalg("spectrum exhausted".into()))?;
            used[idx] = true;
            matches.push(SpectrumMatch {
                j,
                k,
                closed,
                numeric: numeric[idx],
                error,
            });
            k -= 2;
        }
    }
    Ok(matches)
}

/// Default matching cut `D/4`.
pub fn default_j_cut(dim: usize) -> usize {
    dim / 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::gibbs_state;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn std_params() -> ModelParams {
        ModelParams::new(1.0, 1.0, std::f64::consts::LN_2).unwrap()
    }

    fn random_state(dim: usize, support: usize, seed: u64) -> DensityMatrix {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut op = FockOperator::zeros(dim);
        for i in 0..=support {
            for j in 0..=i {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if i == j {
                    op.set(i, i, C64::new(z.re.abs() + 0.3, 0.0));
                } else {
                    op.set(i, j, z.unscale(4.0));
                    op.set(j, i, z.conj().unscale(4.0));
                }
            }
        }
        let tr = op.trace().re;
        DensityMatrix::wrap(op.scale_re(1.0 / tr))
    }

    #[test]
    fn expm_of_diagonal() {
        let a = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(-2.0, 0.5)]
        ];
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - C64::new(1.0, 0.0).exp()).norm() < 1e-14);
        assert!((e[[1, 1]] - C64::new(-2.0, 0.5).exp()).norm() < 1e-14);
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn expm_of_nilpotent() {
        let a = array![
            [C64::new(0.0, 0.0), C64::new(3.0, -1.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
        ];
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((e[[0, 1]] - C64::new(3.0, -1.0)).norm() < 1e-13);
    }

    #[test]
    fn expm_rotation_block() {
        // exp(theta [[0,1],[-1,0]]) = [[cos, sin],[-sin, cos]]
        let theta = 17.3; // forces several squarings
        let a = array![
            [C64::new(0.0, 0.0), C64::new(theta, 0.0)],
            [C64::new(-theta, 0.0), C64::new(0.0, 0.0)]
        ];
        let e = expm(&a).unwrap();
        assert_abs_diff_eq!(e[[0, 0]].re, theta.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[[0, 1]].re, theta.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[[1, 0]].re, -theta.sin(), epsilon = 1e-12);
    }

    #[test]
    fn propagate_at_time_zero_is_identity() {
        let p = std_params();
        let dim = 12;
        let rho = random_state(dim, 4, 5);
        let out = expm_propagate(&rho, 0.0, &p, dim).unwrap();
        assert!(out.op().sub(rho.op()).max_abs_entry() < 1e-13);
    }

    #[test]
    fn semigroup_property() {
        let p = std_params();
        let dim = 16;
        let rho = random_state(dim, 5, 9);
        let direct = expm_propagate(&rho, 1.0, &p, dim).unwrap();
        let first = expm_propagate(&rho, 0.3, &p, dim).unwrap();
        let chained = expm_propagate(&first, 0.7, &p, dim).unwrap();
        let diff = direct.op().sub(chained.op()).norm();
        assert!(diff < 1e-10, "semigroup defect {diff}");
    }

    #[test]
    fn gibbs_is_stationary_under_expm() {
        let p = std_params();
        let dim = 20;
        let rho = gibbs_state(&p, dim).unwrap();
        let out = expm_propagate(&rho, 2.5, &p, dim).unwrap();
        let drift = out.op().sub(rho.op()).norm();
        let bound = p.xi().powi(dim as i32) * 4.0 * dim as f64;
        assert!(drift <= bound.max(1e-12), "drift {drift}");
    }

    #[test]
    fn propagation_preserves_density_properties() {
        let p = std_params();
        let dim = 16;
        let rho = random_state(dim, 5, 21);
        let out = expm_propagate(&rho, 0.8, &p, dim).unwrap();
        let report = crate::validate_density(out.op()).unwrap();
        assert!(report.hermiticity_defect < 1e-10);
        assert!(report.trace_defect < 1e-10);
        assert!(report.min_eigenvalue > -1e-9);
    }

    #[test]
    fn spectrum_contains_the_advertised_eigenvalues() {
        let p = std_params();
        let vals = numerical_spectrum(&p, 20).unwrap();
        // stationary eigenvalue
        let nearest_zero = vals.iter().map(|v| v.norm()).fold(f64::MAX, f64::min);
        assert!(nearest_zero <= 1e-10, "zero mode at distance {nearest_zero}");
        // first oscillating pair
        for target in [C64::new(-0.25, 1.0), C64::new(-0.25, -1.0)] {
            let nearest = vals
                .iter()
                .map(|v| (v - target).norm())
                .fold(f64::MAX, f64::min);
            assert!(nearest <= 1e-6, "missing {target}: nearest {nearest}");
        }
    }

    #[test]
    fn greedy_matching_resolves_low_modes() {
        let p = std_params();
        let matches = match_spectrum(&p, 20, 4).unwrap();
        assert_eq!(matches.len(), (0..=4).map(|j| j + 1).sum::<usize>());
        for m in &matches {
            assert!(m.error <= 1e-6, "({},{}) error {}", m.j, m.k, m.error);
        }
    }

    #[test]
    fn dimension_limits_enforced() {
        let p = std_params();
        assert!(numerical_spectrum(&p, 41).is_err());
        assert!(ExpmPropagator::new(&p, 65, 1.0).is_err());
        assert!(ExpmPropagator::new(&p, 8, -1.0).is_err());
    }
}
