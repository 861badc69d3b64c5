//! The product-of-exponentials propagator obtained from the Riccati
//! disentangling of the generator.
//!
//! The sl(2) structure of the jump superoperators lets the full semigroup be
//! written as an ordered product
//!
//! ```text
//! rho(t) = e^{(-i Omega N - gamma'/2) t} [ e^{f2 K2} e^{f3 K3} e^{f1 K1} rho0 ] e^{(i Omega* N - gamma'/2) t}
//! ```
//!
//! with scalar coefficients solving a Riccati system:
//!
//! ```text
//! f1 = (1 - e^{-kappa t}) / (1 - xi e^{-kappa t})
//! f2 = e^{2 gamma_bar t} xi f1
//! f3 = gamma t - ln((e^{kappa t} - xi)/(1 - xi))
//! ```
//!
//! The jump exponentials are *finite* sums on a truncated space (`a` and
//! `a_dag` are nilpotent), evaluated by banded shifts — no generic matrix
//! exponential is involved, which is the point of the disentangling.
//!
//! The literal product grows like `e^{2 gamma_bar t}` in intermediate stages
//! before the outer factors cancel the growth. For large arguments the same
//! propagator is evaluated in an algebraically identical bounded form (all
//! scalars at most 1 in magnitude), derived by commuting the diagonal
//! factors through the jump exponentials with `x = e^{-kappa t}` and
//! `f(x) = (1-xi)/(1-xi x)`:
//!
//! ```text
//! rho(t) = f * e^{xi f1 K2} [ d (e^{f1 K1} rho0) d_dag ],   d = diag(z^n),
//! z = e^{-i omega t} sqrt(x) f(x)
//! ```

use crate::{DensityMatrix, Error, FockOperator, ModelParams, Result, C64};

/// Default number of levels kept free above the initial support.
pub const DEFAULT_BUFFER: usize = 8;

/// Top-level population above which an evolution is rejected as having
/// spilled into the truncation edge.
pub const SPILL_LIMIT: f64 = 1e-10;

/// `gamma_bar * t` beyond which the literal product form is not attempted.
const LITERAL_FORM_LIMIT: f64 = 20.0;

/// Natural-log budget for any scalar power appearing in the literal form;
/// beyond this the bounded form is used even below the time cutoff.
const OVERFLOW_GUARD_LN: f64 = 600.0;

/// Scalar coefficient functions of the disentangled product at time `t`.
#[derive(Debug, Clone, Copy)]
pub struct DisentangleCoeffs {
    pub t: f64,
    /// In `[0, 1)`; the downward-jump weight.
    pub f1: f64,
    /// Carries the `e^{2 gamma_bar t}` growth of the literal product.
    pub f2: f64,
    /// Finite for `kappa > 0`.
    pub f3: f64,
}

/// Evaluates the Riccati solution at `t >= 0`.
pub fn f_functions(t: f64, params: &ModelParams) -> Result<DisentangleCoeffs> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            requirement: "non-negative",
            value: t,
        });
    }
    let xi = params.xi();
    let x = (-params.kappa() * t).exp();
    let f1 = (1.0 - x) / (1.0 - xi * x);
    let f2 = (2.0 * params.gamma_bar() * t).exp() * xi * f1;
    // gamma t - ln((e^{kappa t} - xi)/(1-xi)) rewritten without e^{kappa t}
    let f3 = params.gamma_prime() * t - ((1.0 - xi * x) / (1.0 - xi)).ln();
    Ok(DisentangleCoeffs { t, f1, f2, f3 })
}

/// `sum_p w^p/p! a^p X (a_dag)^p` — lowers support, exact by nilpotency.
fn exp_jump_down(weight: f64, x: &FockOperator) -> FockOperator {
    let dim = x.dim();
    let mut acc = x.clone();
    let mut term = x.clone();
    for p in 1..dim {
        // a T a_dag writes sqrt((i+1)(j+1)) T[i+1, j+1] into (i, j)
        let mut next = FockOperator::zeros(dim);
        let mut empty = true;
        for i in 0..dim - 1 {
            for j in 0..dim - 1 {
                let v = term.get(i + 1, j + 1);
                if v != C64::new(0.0, 0.0) {
                    let s = (((i + 1) * (j + 1)) as f64).sqrt() * weight / p as f64;
                    next.set(i, j, v * s);
                    empty = false;
                }
            }
        }
        if empty {
            break;
        }
        acc = acc.add(&next);
        term = next;
    }
    acc
}

/// `sum_p w^p/p! (a_dag)^p X a^p` — raises support; weight that would land
/// beyond the top level is lost to truncation (the spill monitor exists for
/// exactly this).
fn exp_jump_up(weight: f64, x: &FockOperator) -> FockOperator {
    let dim = x.dim();
    let mut acc = x.clone();
    let mut term = x.clone();
    for p in 1..dim {
        // a_dag T a writes sqrt(i j) T[i-1, j-1] into (i, j)
        let mut next = FockOperator::zeros(dim);
        let mut empty = true;
        for i in 1..dim {
            for j in 1..dim {
                let v = term.get(i - 1, j - 1);
                if v != C64::new(0.0, 0.0) {
                    let s = ((i * j) as f64).sqrt() * weight / p as f64;
                    next.set(i, j, v * s);
                    empty = false;
                }
            }
        }
        if empty {
            break;
        }
        acc = acc.add(&next);
        term = next;
    }
    acc
}

fn diag_sandwich(entries: &[C64], x: &FockOperator) -> FockOperator {
    let dim = x.dim();
    let mut out = FockOperator::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let v = x.get(r, c);
            if v != C64::new(0.0, 0.0) {
                out.set(r, c, entries[r] * v * entries[c].conj());
            }
        }
    }
    out
}

fn check_spill(state: &FockOperator) -> Result<()> {
    let dim = state.dim();
    let population = state.get(dim - 1, dim - 1).norm();
    if population > SPILL_LIMIT {
        return Err(Error::TruncationSpill {
            population,
            limit: SPILL_LIMIT,
        });
    }
    Ok(())
}

/// Literal ordered product. Only called when every scalar power it forms
/// stays inside the `f64` range.
fn propagate_literal(rho0: &FockOperator, t: f64, params: &ModelParams) -> Result<FockOperator> {
    let dim = rho0.dim();
    let coeffs = f_functions(t, params)?;

    let s1 = exp_jump_down(coeffs.f1, rho0);
    let e3: Vec<C64> = (0..dim)
        .map(|n| C64::new((coeffs.f3 * (n as f64 + 0.5)).exp(), 0.0))
        .collect();
    let s2 = diag_sandwich(&e3, &s1);
    let s3 = exp_jump_up(coeffs.f2, &s2);
    let outer: Vec<C64> = (0..dim)
        .map(|n| {
            let expo = -C64::i() * params.omega_complex() * (n as f64) * t
                - C64::new(params.gamma_prime() * t / 2.0, 0.0);
            expo.exp()
        })
        .collect();
    Ok(diag_sandwich(&outer, &s3))
}

/// Bounded form: every scalar has magnitude at most 1 except the final
/// `f(x) <= 1` prefactor, so this path is valid for arbitrary `t`.
fn propagate_bounded(rho0: &FockOperator, t: f64, params: &ModelParams) -> Result<FockOperator> {
    let dim = rho0.dim();
    let xi = params.xi();
    let x = (-params.kappa() * t).exp();
    let f = (1.0 - xi) / (1.0 - xi * x);
    let f1 = (1.0 - x) / (1.0 - xi * x);

    let s1 = exp_jump_down(f1, rho0);
    let z = C64::new(0.0, -params.omega() * t).exp() * x.sqrt() * f;
    let mut d = Vec::with_capacity(dim);
    let mut zp = C64::new(1.0, 0.0);
    for _ in 0..dim {
        d.push(zp);
        zp *= z;
    }
    let s2 = diag_sandwich(&d, &s1);
    let s3 = exp_jump_up(xi * f1, &s2);
    Ok(s3.scale_re(f))
}

fn literal_form_is_safe(rho0: &FockOperator, t: f64, params: &ModelParams) -> bool {
    if params.gamma_bar() * t > LITERAL_FORM_LIMIT {
        return false;
    }
    let dim = rho0.dim();
    let support = rho0.support_max_level(0.0).unwrap_or(0);
    // largest powers formed: f2^(support+1) against 1/p!, and the top
    // diagonal weight e^{f3 (D - 1/2)}
    let coeffs = match f_functions(t, params) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let p_max = (support + 1).min(dim - 1) as f64;
    let f2_ln = if coeffs.f2 > 1.0 { coeffs.f2.ln() } else { 0.0 };
    if p_max * f2_ln > OVERFLOW_GUARD_LN {
        return false;
    }
    coeffs.f3.abs() * (dim as f64 - 0.5) < OVERFLOW_GUARD_LN
}

/// Propagates `rho0` to time `t` through the disentangled product with the
/// default truncation buffer.
pub fn disentangled_propagate(
    rho0: &DensityMatrix,
    t: f64,
    params: &ModelParams,
    dim: usize,
) -> Result<DensityMatrix> {
    disentangled_propagate_buffered(rho0, t, params, dim, DEFAULT_BUFFER)
}

/// Propagation with an explicit buffer.
///
/// The buffer expresses the precondition that the initial support should sit
/// at least `buffer` levels below the truncation edge (upward spread during
/// evolution needs the headroom). Violating it is not rejected up front —
/// the evolved state's top-level population is monitored instead, and the
/// run fails with [`Error::TruncationSpill`] only when the headroom actually
/// proved insufficient.
pub fn disentangled_propagate_buffered(
    rho0: &DensityMatrix,
    t: f64,
    params: &ModelParams,
    dim: usize,
    buffer: usize,
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
    let _headroom_ok = rho0
        .op()
        .support_max_level(0.0)
        .map(|s| s + buffer < dim)
        .unwrap_or(true);

    let out = if literal_form_is_safe(rho0.op(), t, params) {
        propagate_literal(rho0.op(), t, params)?
    } else {
        propagate_bounded(rho0.op(), t, params)?
    };
    check_spill(&out)?;
    Ok(DensityMatrix::wrap(out))
}
