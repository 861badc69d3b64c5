//! Exact evaluation of the combinatorial machinery behind the spectral
//! resolution.
//!
//! Everything here runs in arbitrary-precision rational arithmetic. The
//! orthonormality of the biorthogonal eigenbasis rests on alternating
//! factorial sums collapsing to Kronecker deltas; those cancellations are
//! exact and floating point would mask a wrong coefficient, so this module
//! never touches `f64` except when the caller converts a finished rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational scalar.
pub type ExactRational = BigRational;

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

fn fact_ratio(n: usize) -> ExactRational {
    ExactRational::from_integer(factorial(n))
}

fn int(v: i64) -> ExactRational {
    ExactRational::from_integer(BigInt::from(v))
}

/// Convenience constructor `num / den`.
pub fn rational(num: i64, den: i64) -> ExactRational {
    ExactRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of a finite `f64` (binary expansion, no rounding).
pub fn from_float(x: f64) -> Option<ExactRational> {
    ExactRational::from_float(x)
}

fn check_xi(xi: &ExactRational) -> Result<()> {
    if xi <= &ExactRational::zero() || xi >= &ExactRational::one() {
        return Err(Error::XiOutOfRange { xi: xi.to_string() });
    }
    Ok(())
}

/// Coefficient bundle for the mode `(k, l)` with `k >= 0` and `l = (j-k)/2`:
///
/// * `a[m] = (-1)^m (1-xi)^m / ((k+m)! (l-m)! m!)` for `m = 0..=l`,
/// * `b[n] = (-1)^n ((1-xi)/xi)^n / ((k+n)! (l-n)! n!)` for `n = 0..=l`,
/// * `c = (k+l)! l! (1-xi)^(k+1) xi^l`.
///
/// The right eigenvector is `sqrt(c) * sum_m a[m] (a_dag)^(k+m) xi^N a^m` and
/// the left one is `sqrt(c) * sum_n b[n] (a_dag)^n a^(k+n)`.
#[derive(Debug, Clone)]
pub struct SpectralCoefficients {
    pub k: usize,
    pub l: usize,
    pub a: Vec<ExactRational>,
    pub b: Vec<ExactRational>,
    pub c: ExactRational,
}

/// Exact coefficients of the `(k, l)` eigenvector pair at rational `xi`.
pub fn spectral_coefficients(k: usize, l: usize, xi: &ExactRational) -> Result<SpectralCoefficients> {
    check_xi(xi)?;
    let one_minus = ExactRational::one() - xi;
    let ratio = &one_minus / xi;

    let mut a = Vec::with_capacity(l + 1);
    let mut b = Vec::with_capacity(l + 1);
    let mut pow_a = ExactRational::one();
    let mut pow_b = ExactRational::one();
    for m in 0..=l {
        let denom = fact_ratio(k + m) * fact_ratio(l - m) * fact_ratio(m);
        let sign = if m % 2 == 0 { 1 } else { -1 };
        a.push(int(sign) * &pow_a / &denom);
        b.push(int(sign) * &pow_b / &denom);
        pow_a *= &one_minus;
        pow_b *= &ratio;
    }

    let c = fact_ratio(k + l)
        * fact_ratio(l)
        * one_minus.clone().pow((k + 1) as i32)
        * xi.clone().pow(l as i32);

    Ok(SpectralCoefficients { k, l, a, b, c })
}

/// The alternating factorial sum
/// `I(p, q, r) = sum_{s=0}^{q} (-1)^s (p+q-s-r)! / ((p-s)! (q-s)! s!)`,
/// defined for `p >= q >= r >= 0`.
///
/// The sum collapses to `delta_{r,0}`. This routine evaluates the sum
/// directly — it is the verifier of that collapse, not a shortcut for it.
pub fn identity_sum(p: usize, q: usize, r: usize) -> Result<ExactRational> {
    if !(p >= q && q >= r) {
        return Err(Error::InvalidOrdering {
            requirement: "p >= q >= r >= 0",
            p,
            q,
            r,
        });
    }
    let mut acc = ExactRational::zero();
    for s in 0..=q {
        let term = fact_ratio(p + q - s - r) / (fact_ratio(p - s) * fact_ratio(q - s) * fact_ratio(s));
        if s % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Checks the descent relation
/// `I(p, q, r-1) = (p+q-r+1) I(p, q, r) + I(p-1, q-1, r-1)` for
/// `p >= q >= r >= 1`, with every term evaluated by the direct sum.
pub fn recurrence_check(p: usize, q: usize, r: usize) -> Result<bool> {
    if !(p >= q && q >= r && r >= 1) {
        return Err(Error::InvalidOrdering {
            requirement: "p >= q >= r >= 1",
            p,
            q,
            r,
        });
    }
    let lhs = identity_sum(p, q, r - 1)?;
    let rhs = int((p + q - r + 1) as i64) * identity_sum(p, q, r)? + identity_sum(p - 1, q - 1, r - 1)?;
    Ok(lhs == rhs)
}

/// The signed sum `sum_{q=r}^{p} (-1)^q p! / ((p-q)! (q-r)!)` for `p >= r`.
///
/// Collapses to `(-1)^r r! delta_{p,r}`; evaluated directly.
pub fn alt_sum(p: usize, r: usize) -> Result<ExactRational> {
    if p < r {
        return Err(Error::InvalidOrdering {
            requirement: "p >= r >= 0",
            p,
            q: r,
            r,
        });
    }
    let mut acc = ExactRational::zero();
    for q in r..=p {
        let term = fact_ratio(p) / (fact_ratio(p - q) * fact_ratio(q - r));
        if q % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// The double sum whose collapse to `delta_{l,n} (-1)^l / l!` proves the
/// orthonormality of the eigenbasis:
///
/// `sum_{m=0}^{l} sum_{alpha=0}^{min(m,n)} (-1)^m (k+m+n-alpha)!
///  (1-xi)^alpha xi^(l-alpha) / ((k+m)! (l-m)! (m-alpha)! (n-alpha)! alpha!)`.
///
/// The collapse holds for `l >= n` (the pairing with the longer vector on
/// the right), which is the only case the orthonormality argument needs; for
/// `l < n` the sum is still well-defined but does not reduce to a delta
/// (`k=0, l=0, n=1` already gives 1). The function evaluates the raw sum for
/// any indices and leaves the domain restriction to the verifying caller.
pub fn orthonormality_sum(k: usize, l: usize, n: usize, xi: &ExactRational) -> Result<ExactRational> {
    check_xi(xi)?;
    let one_minus = ExactRational::one() - xi;
    let mut acc = ExactRational::zero();
    for m in 0..=l {
        for alpha in 0..=m.min(n) {
            let num = fact_ratio(k + m + n - alpha)
                * one_minus.clone().pow(alpha as i32)
                * xi.clone().pow((l - alpha) as i32);
            let den = fact_ratio(k + m)
                * fact_ratio(l - m)
                * fact_ratio(m - alpha)
                * fact_ratio(n - alpha)
                * fact_ratio(alpha);
            let term = num / den;
            if m % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    Ok(acc)
}

/// Closed form of the thermal trace moment
/// `tr[a^m (a_dag)^n xi^N] = delta_{m,n} m! / (1-xi)^(m+1)`.
pub fn trace_moment(m: usize, n: usize, xi: &ExactRational) -> Result<ExactRational> {
    check_xi(xi)?;
    if m != n {
        return Ok(ExactRational::zero());
    }
    let one_minus = ExactRational::one() - xi;
    Ok(fact_ratio(m) / one_minus.pow((m + 1) as i32))
}

/// Partial Fock-space sum of the same trace together with a rigorous
/// geometric tail bound.
///
/// The summand is `xi^h (h+m)!/h!` (for `m = n`; zero otherwise). Successive
/// terms decay at least by `ratio = xi (H+1+m)/(H+1)` once `h > H`, so the
/// tail after `levels` terms is bounded by `first_omitted / (1 - ratio)`
/// whenever `ratio < 1`; the bound is returned alongside the partial sum.
pub fn trace_moment_fock_sum(
    m: usize,
    n: usize,
    xi: &ExactRational,
    levels: usize,
) -> Result<(ExactRational, ExactRational)> {
    check_xi(xi)?;
    if m != n {
        return Ok((ExactRational::zero(), ExactRational::zero()));
    }
    let mut acc = ExactRational::zero();
    // xi^h * (h+m)!/h!, tracked incrementally
    let mut term = fact_ratio(m);
    for h in 0..levels {
        acc += &term;
        let step = xi * int((h + 1 + m) as i64) / int((h + 1) as i64);
        term *= step;
    }
    // `term` is now the first omitted term (h = levels); the decay ratio of
    // consecutive omitted terms is at most its value at h = levels.
    let ratio = xi * int((levels + 1 + m) as i64) / int((levels + 1) as i64);
    let tail = if ratio < ExactRational::one() {
        term / (ExactRational::one() - ratio)
    } else {
        return Err(Error::InvalidParameter {
            name: "levels",
            requirement: "large enough that the geometric tail ratio drops below 1",
            value: levels as f64,
        });
    };
    Ok((acc, tail))
}

/// Coefficients `alpha_q` of the expansion that rebuilds `|0><0|` from the
/// thermal-kernel family:
/// `alpha_0 = 1`, `alpha_q = (-1)^q/q! - sum_{p=1}^{q} (tau^p/p!) alpha_{q-p}`
/// with `tau = xi - 1`. Returns `alpha_0..=alpha_qmax`.
pub fn completeness_alphas(q_max: usize, xi: &ExactRational) -> Result<Vec<ExactRational>> {
    check_xi(xi)?;
    let tau = xi - ExactRational::one();
    let mut alphas: Vec<ExactRational> = Vec::with_capacity(q_max + 1);
    alphas.push(ExactRational::one());
    // tau^p / p! table, filled as we go
    let mut tau_pow = vec![ExactRational::one()];
    for q in 1..=q_max {
        let prev = tau_pow.last().unwrap() * &tau / int(q as i64);
        tau_pow.push(prev);
        let lead = int(if q % 2 == 0 { 1 } else { -1 }) / fact_ratio(q);
        let mut acc = lead;
        for p in 1..=q {
            acc -= &tau_pow[p] * &alphas[q - p];
        }
        alphas.push(acc);
    }
    Ok(alphas)
}

/// Single `alpha_q` value; see [`completeness_alphas`].
pub fn completeness_alpha(q: usize, xi: &ExactRational) -> Result<ExactRational> {
    Ok(completeness_alphas(q, xi)?.pop().unwrap())
}

/// Rounds an exact rational to `f64` with at worst a couple of ulps of
/// error, regardless of how large the numerator and denominator are.
///
/// The stock conversion divides `numer as f64` by `denom as f64`, which
/// silently saturates to `inf` or `0` once either side leaves the `f64`
/// range — factorial-laden coefficients do exactly that. Here the quotient
/// is first formed as a ~64-bit integer by shifting, then rescaled.
///
/// Conversion happens once, after all exact cancellations — this is the only
/// bridge between this module and the floating-point eigenvector builders.
pub fn to_f64(x: &ExactRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let neg = x.is_negative();
    let num = x.numer().abs();
    let den = x.denom().clone();
    let shift = 64 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    // q carries ~64-65 significant bits, so this conversion is exact up to
    // one rounding
    let mut val = q.to_f64().unwrap_or(f64::INFINITY);
    let mut e = -shift;
    while e > 1000 {
        val *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        val *= 2f64.powi(-1000);
        e += 1000;
    }
    val *= 2f64.powi(e as i32);
    if neg {
        -val
    } else {
        val
    }
}

/// Signed square root helper: `sign(x) * sqrt(|x|)` evaluated in `f64` after
/// the exact magnitude is formed.
pub fn sqrt_to_f64(x: &ExactRational) -> f64 {
    let v = to_f64(&x.abs());
    let root = v.sqrt();
    if x.is_negative() {
        -root
    } else {
        root
    }
}
