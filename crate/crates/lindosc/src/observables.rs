//! Closed-form observable trajectories and generic numerical expectations.
//!
//! Only finitely many eigenmodes contribute to any polynomial observable:
//! the energy mean needs the `(0,0)` and `(2,0)` projections, its second
//! moment adds `(4,0)`, and the quadratures live in the `k = ±1, ±2` towers.
//! That is why every trajectory below is a short combination of
//! `exp(-kappa t)` and `exp(-2 kappa t)` envelopes with phase factors
//! `exp(-i omega t)` — no mode sum required.
//!
//! Closed-form real observables are evaluated in complex arithmetic; the
//! imaginary residue is asserted below `1e-10` and dropped.

use crate::fock::trace_distance;
use crate::oracle;
use crate::spectral::SpectralBasis;
use crate::{
    disentangle, superop, DensityMatrix, Error, FockOperator, ModelParams, Result, C64,
};

const IMAG_RESIDUE_TOL: f64 = 1e-10;

fn coerce_real(z: C64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAG_RESIDUE_TOL * scale.max(1.0) {
        return Err(Error::ResidualImaginary(z.im));
    }
    Ok(z.re)
}

/// `tr(obs * rho)`.
pub fn expectation(rho: &FockOperator, obs: &FockOperator) -> Result<C64> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: obs.dim(),
        });
    }
    Ok(obs.mul(rho).trace())
}

/// Observables with closed-form trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    Energy,
    EnergySquared,
    EnergyVariance,
    Position,
    Momentum,
    PositionSquared,
    MomentumSquared,
    PositionVariance,
    MomentumVariance,
}

impl Observable {
    pub const ALL: [Observable; 9] = [
        Observable::Energy,
        Observable::EnergySquared,
        Observable::EnergyVariance,
        Observable::Position,
        Observable::Momentum,
        Observable::PositionSquared,
        Observable::MomentumSquared,
        Observable::PositionVariance,
        Observable::MomentumVariance,
    ];

    /// Token used on the command line and in CSV headers.
    pub fn label(&self) -> &'static str {
        match self {
            Observable::Energy => "E",
            Observable::EnergySquared => "E2",
            Observable::EnergyVariance => "VarE",
            Observable::Position => "x",
            Observable::Momentum => "p",
            Observable::PositionSquared => "x2",
            Observable::MomentumSquared => "p2",
            Observable::PositionVariance => "Varx",
            Observable::MomentumVariance => "Varp",
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        let t = token.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "e" | "energy" => Observable::Energy,
            "e2" => Observable::EnergySquared,
            "vare" => Observable::EnergyVariance,
            "x" | "position" => Observable::Position,
            "p" | "momentum" => Observable::Momentum,
            "x2" => Observable::PositionSquared,
            "p2" => Observable::MomentumSquared,
            "varx" => Observable::PositionVariance,
            "varp" => Observable::MomentumVariance,
            _ => return Err(Error::UnknownObservable(token.to_string())),
        })
    }
}

/// Position operator `x = (a + a_dag)/sqrt(2 omega)` (hbar = 1).
pub fn position_operator(params: &ModelParams, dim: usize) -> FockOperator {
    let a = FockOperator::annihilation(dim);
    a.add(&a.adjoint())
        .scale_re(1.0 / (2.0 * params.omega()).sqrt())
}

/// Momentum operator `p = -i sqrt(omega/2) (a - a_dag)`.
pub fn momentum_operator(params: &ModelParams, dim: usize) -> FockOperator {
    let a = FockOperator::annihilation(dim);
    a.sub(&a.adjoint())
        .scale(C64::new(0.0, -(params.omega() / 2.0).sqrt()))
}

/// Energy mean, second moment and variance at one time.
#[derive(Debug, Clone, Copy)]
pub struct EnergyMoments {
    pub mean: f64,
    pub second: f64,
    pub variance: f64,
}

/// Equilibrium energy `omega xi/(1-xi)`.
pub fn energy_equilibrium(params: &ModelParams) -> f64 {
    params.omega() * params.xi() / (1.0 - params.xi())
}

/// Equilibrium second moment `omega^2 xi (1+xi) / (1-xi)^2` (geometric
/// occupation statistics).
pub fn energy_second_equilibrium(params: &ModelParams) -> f64 {
    let xi = params.xi();
    params.omega().powi(2) * xi * (1.0 + xi) / ((1.0 - xi) * (1.0 - xi))
}

/// Closed-form energy moments at time `t` from the initial moments.
///
/// Only `exp(-kappa t)` and `exp(-2 kappa t)` envelopes appear. The variance
/// is computed as `<E^2> - <E>^2` from the two moment trajectories.
pub fn energy_trajectory(e0: f64, e2_0: f64, t: f64, params: &ModelParams) -> EnergyMoments {
    let omega = params.omega();
    let e_eq = energy_equilibrium(params);
    let e2_eq = energy_second_equilibrium(params);
    let u = (-params.kappa() * t).exp();

    let mean = e_eq - u * (e_eq - e0);
    let mid = e2_eq + 2.0 * e_eq * e_eq - 4.0 * e_eq * e0 - omega * e0;
    let last = 2.0 * e_eq * e_eq - 4.0 * e_eq * e0 - omega * e0 + e2_0;
    let second = e2_eq - u * mid + u * u * last;
    EnergyMoments {
        mean,
        second,
        variance: second - mean * mean,
    }
}

/// The four input traces the quadrature trajectories need, computed once
/// from the initial state.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSeed {
    /// `tr(a rho0)`.
    pub lowering: C64,
    /// `tr(a^2 rho0)`.
    pub lowering_sq: C64,
    /// `tr(a_dag a rho0)`.
    pub occupation: f64,
    /// `tr(a a_dag rho0)`.
    pub antioccupation: f64,
}

impl QuadratureSeed {
    pub fn from_state(rho0: &DensityMatrix) -> Result<Self> {
        let dim = rho0.dim();
        let a = FockOperator::annihilation(dim);
        let lowering = expectation(rho0.op(), &a)?;
        let lowering_sq = expectation(rho0.op(), &a.mul(&a))?;
        let n = a.adjoint().mul(&a);
        let aad = a.mul(&a.adjoint());
        let occupation = coerce_real(expectation(rho0.op(), &n)?, 1.0)?;
        let antioccupation = coerce_real(expectation(rho0.op(), &aad)?, 1.0)?;
        Ok(Self {
            lowering,
            lowering_sq,
            occupation,
            antioccupation,
        })
    }
}

/// Quadrature means, second moments and variances at one time.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureMoments {
    pub x: f64,
    pub p: f64,
    pub x_sq: f64,
    pub p_sq: f64,
    pub var_x: f64,
    pub var_p: f64,
}

/// Equilibrium position variance `(1/2 omega)(1+xi)/(1-xi)`.
pub fn position_variance_equilibrium(params: &ModelParams) -> f64 {
    (1.0 + params.xi()) / (1.0 - params.xi()) / (2.0 * params.omega())
}

/// Equilibrium momentum variance `(omega/2)(1+xi)/(1-xi)`.
pub fn momentum_variance_equilibrium(params: &ModelParams) -> f64 {
    params.omega() * (1.0 + params.xi()) / (1.0 - params.xi()) / 2.0
}

/// Closed-form quadrature moments at time `t` from the seed traces:
///
/// ```text
/// <x>_t = sqrt(2/omega) e^{-kappa t/2} Re[e^{-i omega t} tr(a rho0)]
/// <p>_t = sqrt(2 omega) e^{-kappa t/2} Im[e^{-i omega t} tr(a rho0)]
/// <x^2>_t = <x^2>_eq + (1/2 omega) e^{-kappa t} [ 2 Re(e^{-2 i omega t} tr(a^2 rho0))
///           + tr(a_dag a rho0) + tr(a a_dag rho0) - 2 omega <x^2>_eq ]
/// <p^2>_t = <p^2>_eq - (omega/2) e^{-kappa t} [ 2 Re(e^{-2 i omega t} tr(a^2 rho0))
///           - tr(a_dag a rho0) - tr(a a_dag rho0) + (2/omega) <p^2>_eq ]
/// ```
pub fn quadrature_at(seed: &QuadratureSeed, t: f64, params: &ModelParams) -> QuadratureMoments {
    let omega = params.omega();
    let half_u = (-params.kappa() * t / 2.0).exp();
    let u = half_u * half_u;
    let phase = C64::new(0.0, -omega * t).exp();
    let rotated = phase * seed.lowering;

    let x = (2.0 / omega).sqrt() * half_u * rotated.re;
    let p = (2.0 * omega).sqrt() * half_u * rotated.im;

    let x2_eq = position_variance_equilibrium(params);
    let p2_eq = momentum_variance_equilibrium(params);
    let twisted = (phase * phase * seed.lowering_sq).re * 2.0;
    let occ = seed.occupation + seed.antioccupation;

    let x_sq = x2_eq + u / (2.0 * omega) * (twisted + occ - 2.0 * omega * x2_eq);
    let p_sq = p2_eq - omega / 2.0 * u * (twisted - occ + 2.0 / omega * p2_eq);

    QuadratureMoments {
        x,
        p,
        x_sq,
        p_sq,
        var_x: x_sq - x * x,
        var_p: p_sq - p * p,
    }
}

/// One-shot quadrature trajectory evaluation.
pub fn quadrature_trajectory(
    rho0: &DensityMatrix,
    t: f64,
    params: &ModelParams,
) -> Result<QuadratureMoments> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            requirement: "non-negative",
            value: t,
        });
    }
    Ok(quadrature_at(&QuadratureSeed::from_state(rho0)?, t, params))
}

/// Trajectory evaluation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Spectral { j_max: usize },
    Disentangled,
    Oracle,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::ClosedForm => "closed-form".into(),
            Method::Spectral { j_max } => format!("spectral(jmax={j_max})"),
            Method::Disentangled => "disentangled".into(),
            Method::Oracle => "oracle".into(),
        }
    }

    /// Parses a method token; `default_j_max` fills in `spectral` when no
    /// explicit `spectral:J` count is given.
    pub fn parse(token: &str, default_j_max: usize) -> Result<Self> {
        let t = token.trim().to_ascii_lowercase();
        if let Some(rest) = t.strip_prefix("spectral:") {
            let j_max: usize = rest
                .parse()
                .map_err(|_| Error::UnknownMethod(token.to_string()))?;
            return Ok(Method::Spectral { j_max });
        }
        Ok(match t.as_str() {
            "closed-form" | "closed" => Method::ClosedForm,
            "spectral" => Method::Spectral {
                j_max: default_j_max,
            },
            "disentangled" => Method::Disentangled,
            "oracle" | "expm" => Method::Oracle,
            _ => return Err(Error::UnknownMethod(token.to_string())),
        })
    }
}

/// A sampled observable series produced by one method.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub observable: Observable,
    pub method: Method,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Per-observable worst-case disagreement between two methods.
#[derive(Debug, Clone)]
pub struct ObservableReport {
    pub observable: Observable,
    pub max_discrepancy: f64,
    pub worst_pair: (Method, Method),
    pub worst_time: f64,
}

/// Cross-method comparison summary.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub observables: Vec<ObservableReport>,
    pub max_discrepancy: f64,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter {
            name: "times",
            requirement: "non-empty",
            value: 0.0,
        });
    }
    for pair in times.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidParameter {
                name: "times",
                requirement: "strictly increasing",
                value: pair[1],
            });
        }
    }
    if !(times[0] >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "times",
            requirement: "non-negative",
            value: times[0],
        });
    }
    Ok(())
}

/// Evaluates the observables of a propagated state by plain traces.
fn trace_route(
    rho: &DensityMatrix,
    params: &ModelParams,
    observables: &[Observable],
) -> Result<Vec<f64>> {
    let dim = rho.dim();
    let h = FockOperator::number(dim).scale_re(params.omega());
    let x = position_operator(params, dim);
    let p = momentum_operator(params, dim);
    let scale = rho.op().norm();

    let e = coerce_real(expectation(rho.op(), &h)?, scale)?;
    let e2 = coerce_real(expectation(rho.op(), &h.mul(&h))?, scale)?;
    let xv = coerce_real(expectation(rho.op(), &x)?, scale)?;
    let pv = coerce_real(expectation(rho.op(), &p)?, scale)?;
    let x2 = coerce_real(expectation(rho.op(), &x.mul(&x))?, scale)?;
    let p2 = coerce_real(expectation(rho.op(), &p.mul(&p))?, scale)?;

    Ok(observables
        .iter()
        .map(|obs| match obs {
            Observable::Energy => e,
            Observable::EnergySquared => e2,
            Observable::EnergyVariance => e2 - e * e,
            Observable::Position => xv,
            Observable::Momentum => pv,
            Observable::PositionSquared => x2,
            Observable::MomentumSquared => p2,
            Observable::PositionVariance => x2 - xv * xv,
            Observable::MomentumVariance => p2 - pv * pv,
        })
        .collect())
}

fn closed_form_route(
    rho0: &DensityMatrix,
    times: &[f64],
    params: &ModelParams,
    observables: &[Observable],
) -> Result<Vec<Vec<f64>>> {
    let dim = rho0.dim();
    let h = FockOperator::number(dim).scale_re(params.omega());
    let scale = rho0.op().norm();
    let e0 = coerce_real(expectation(rho0.op(), &h)?, scale)?;
    let e2_0 = coerce_real(expectation(rho0.op(), &h.mul(&h))?, scale)?;
    let seed = QuadratureSeed::from_state(rho0)?;

    Ok(times
        .iter()
        .map(|&t| {
            let energy = energy_trajectory(e0, e2_0, t, params);
            let quad = quadrature_at(&seed, t, params);
            observables
                .iter()
                .map(|obs| match obs {
                    Observable::Energy => energy.mean,
                    Observable::EnergySquared => energy.second,
                    Observable::EnergyVariance => energy.variance,
                    Observable::Position => quad.x,
                    Observable::Momentum => quad.p,
                    Observable::PositionSquared => quad.x_sq,
                    Observable::MomentumSquared => quad.p_sq,
                    Observable::PositionVariance => quad.var_x,
                    Observable::MomentumVariance => quad.var_p,
                })
                .collect()
        })
        .collect())
}

/// Oracle series over an ascending time grid. The exponential is computed
/// once per distinct time increment and chained through the semigroup
/// property, so a uniform grid costs a single `expm`.
fn oracle_states(
    rho0: &DensityMatrix,
    times: &[f64],
    params: &ModelParams,
    dim: usize,
) -> Result<Vec<DensityMatrix>> {
    let generator = superop::liouvillian_matrix(params, dim)?;
    let mut cache: Vec<(u64, ndarray::Array2<C64>)> = Vec::new();
    let mut current = superop::vectorize(rho0.op());
    let mut now = 0.0f64;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let dt = t - now;
        if dt > 0.0 {
            let key = dt.to_bits();
            let step = match cache.iter().find(|(k, _)| *k == key) {
                Some((_, m)) => m.clone(),
                None => {
                    let m = oracle::expm(&generator.matrix().mapv(|z| z * dt))?;
                    cache.push((key, m.clone()));
                    m
                }
            };
            current = step.dot(&current);
            now = t;
        }
        out.push(DensityMatrix::wrap(superop::devectorize(&current, dim)?));
    }
    Ok(out)
}

fn method_route(
    rho0: &DensityMatrix,
    times: &[f64],
    params: &ModelParams,
    dim: usize,
    method: Method,
    observables: &[Observable],
) -> Result<Vec<Vec<f64>>> {
    match method {
        Method::ClosedForm => closed_form_route(rho0, times, params, observables),
        Method::Spectral { j_max } => {
            let basis = SpectralBasis::new(params, dim, j_max)?;
            times
                .iter()
                .map(|&t| trace_route(&basis.propagate(rho0, t)?.state, params, observables))
                .collect()
        }
        Method::Disentangled => times
            .iter()
            .map(|&t| {
                trace_route(
                    &disentangle::disentangled_propagate(rho0, t, params, dim)?,
                    params,
                    observables,
                )
            })
            .collect(),
        Method::Oracle => oracle_states(rho0, times, params, dim)?
            .iter()
            .map(|rho| trace_route(rho, params, observables))
            .collect(),
    }
}

/// Evaluates the requested observables along one method, one trajectory per
/// observable.
pub fn evaluate_method(
    rho0: &DensityMatrix,
    times: &[f64],
    params: &ModelParams,
    dim: usize,
    method: Method,
    observables: &[Observable],
) -> Result<Vec<Trajectory>> {
    check_times(times)?;
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: rho0.dim(),
            right: dim,
        });
    }
    let table = method_route(rho0, times, params, dim, method, observables)?;
    Ok(observables
        .iter()
        .enumerate()
        .map(|(idx, &observable)| Trajectory {
            observable,
            method,
            times: times.to_vec(),
            values: table.iter().map(|row| row[idx]).collect(),
        })
        .collect())
}

/// Runs every requested method and reports the per-observable maximum
/// absolute discrepancy over all method pairs and times.
pub fn trajectory_compare(
    rho0: &DensityMatrix,
    times: &[f64],
    params: &ModelParams,
    dim: usize,
    methods: &[Method],
    observables: &[Observable],
) -> Result<(Vec<Trajectory>, CompareReport)> {
    check_times(times)?;
    if methods.is_empty() {
        return Err(Error::UnknownMethod("(empty method list)".into()));
    }
    let mut trajectories = Vec::new();
    for &method in methods {
        trajectories.extend(evaluate_method(rho0, times, params, dim, method, observables)?);
    }

    let mut reports = Vec::new();
    let mut overall = 0.0f64;
    for &observable in observables {
        let series: Vec<&Trajectory> = trajectories
            .iter()
            .filter(|tr| tr.observable == observable)
            .collect();
        let mut worst = 0.0f64;
        let mut worst_pair = (methods[0], methods[0]);
        let mut worst_time = times[0];
        for (i, ta) in series.iter().enumerate() {
            for tb in series.iter().skip(i + 1) {
                for (idx, &t) in times.iter().enumerate() {
                    let d = (ta.values[idx] - tb.values[idx]).abs();
                    if d > worst {
                        worst = d;
                        worst_pair = (ta.method, tb.method);
                        worst_time = t;
                    }
                }
            }
        }
        overall = overall.max(worst);
        reports.push(ObservableReport {
            observable,
            max_discrepancy: worst,
            worst_pair,
            worst_time,
        });
    }
    Ok((
        trajectories,
        CompareReport {
            observables: reports,
            max_discrepancy: overall,
        },
    ))
}
