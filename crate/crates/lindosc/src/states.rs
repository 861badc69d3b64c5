//! Initial-state constructors and the fixed benchmark corpus.

use crate::{DensityMatrix, Error, FockOperator, ModelParams, Result, C64};

/// Pure number state `|n><n|`.
pub fn fock_state(n: usize, dim: usize) -> Result<DensityMatrix> {
    if n >= dim {
        return Err(Error::DimensionMismatch {
            left: n + 1,
            right: dim,
        });
    }
    DensityMatrix::new(FockOperator::basis(n, n, dim))
}

/// Pure state from amplitudes on the lowest levels; normalized, remaining
/// levels zero.
pub fn pure_state(amplitudes: &[C64], dim: usize) -> Result<DensityMatrix> {
    if amplitudes.len() > dim {
        return Err(Error::DimensionMismatch {
            left: amplitudes.len(),
            right: dim,
        });
    }
    let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "amplitudes",
            requirement: "not all zero",
            value: 0.0,
        });
    }
    let scale = norm_sq.sqrt();
    let mut op = FockOperator::zeros(dim);
    for (i, zi) in amplitudes.iter().enumerate() {
        for (j, zj) in amplitudes.iter().enumerate() {
            op.set(i, j, (zi / scale) * (zj / scale).conj());
        }
    }
    DensityMatrix::new(op)
}

/// The two-level superposition benchmark
/// `(|0> + |1>)(<0| + <1|)/2 = (|0><0| + |0><1| + |1><0| + |1><1|)/2`,
/// whose position expectation traces out a damped cosine.
pub fn superposition_benchmark(dim: usize) -> Result<DensityMatrix> {
    pure_state(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)], dim)
}

/// Coherent-like pure state truncated to the lowest `levels + 1` amplitudes
/// and renormalized.
pub fn coherent_state_truncated(alpha: C64, levels: usize, dim: usize) -> Result<DensityMatrix> {
    let mut amps = Vec::with_capacity(levels + 1);
    let mut amp = C64::new(1.0, 0.0);
    amps.push(amp);
    for n in 1..=levels {
        amp *= alpha / (n as f64).sqrt();
        amps.push(amp);
    }
    pure_state(&amps, dim)
}

/// Thermal-like diagonal mixture on the lowest `levels + 1` levels,
/// weights proportional to `xi^n`, renormalized.
pub fn truncated_thermal(xi: f64, levels: usize, dim: usize) -> Result<DensityMatrix> {
    let weights: Vec<f64> = (0..=levels).map(|n| xi.powi(n as i32)).collect();
    diagonal_mixture(&weights, dim)
}

/// Diagonal mixture from non-negative weights (renormalized).
pub fn diagonal_mixture(weights: &[f64], dim: usize) -> Result<DensityMatrix> {
    if weights.len() > dim {
        return Err(Error::DimensionMismatch {
            left: weights.len(),
            right: dim,
        });
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
        return Err(Error::InvalidParameter {
            name: "weights",
            requirement: "non-negative with positive sum",
            value: total,
        });
    }
    let mut op = FockOperator::zeros(dim);
    for (n, w) in weights.iter().enumerate() {
        op.set(n, n, C64::new(w / total, 0.0));
    }
    DensityMatrix::new(op)
}

/// The fixed ten-state corpus used for cross-propagator comparisons. Every
/// member is supported on levels `0..=5`, deterministic, and a strictly
/// valid density matrix.
pub fn benchmark_corpus(params: &ModelParams, dim: usize) -> Result<Vec<(String, DensityMatrix)>> {
    let mut corpus: Vec<(String, DensityMatrix)> = Vec::with_capacity(10);
    for n in [0usize, 1, 3, 5] {
        corpus.push((format!("fock{n}"), fock_state(n, dim)?));
    }
    corpus.push(("plus01".into(), superposition_benchmark(dim)?));
    corpus.push((
        "coherent-r".into(),
        coherent_state_truncated(C64::new(0.8, 0.0), 5, dim)?,
    ));
    corpus.push((
        "coherent-c".into(),
        coherent_state_truncated(C64::new(0.5, 0.4), 5, dim)?,
    ));
    corpus.push(("thermal5".into(), truncated_thermal(params.xi(), 5, dim)?));
    // half ground, half a two-level superposition of |2> and |4>
    let psi24 = pure_state(
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ],
        dim,
    )?;
    let ground = fock_state(0, dim)?;
    let mixed = ground.op().scale_re(0.5).add(&psi24.op().scale_re(0.5));
    corpus.push(("mixed024".into(), DensityMatrix::new(mixed)?));
    corpus.push((
        "ramp5".into(),
        diagonal_mixture(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0], dim)?,
    ));
    Ok(corpus)
}
