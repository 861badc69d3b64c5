//! Model parameters of the damped oscillator and their derived rates.

use crate::{Error, Result, C64};

/// Physical constants of the model together with the derived quantities used
/// throughout the crate.
///
/// The model is fixed by three positive reals: the oscillator frequency
/// `omega`, the downward transition rate `gamma` and the inverse bath
/// temperature `beta`. Detailed balance ties the upward rate to them,
/// `gamma' = gamma * exp(-beta * omega)`, so everything else is derived:
///
/// * `xi = exp(-beta * omega)` — Boltzmann factor, `0 < xi < 1`,
/// * `kappa = gamma - gamma'` — net relaxation rate of the energy,
/// * `gamma_bar = (gamma + gamma') / 2`,
/// * `omega_complex = omega - i * gamma_bar` — the complex frequency entering
///   the disentangled propagator.
///
/// All fields are immutable after construction, which keeps the derived
/// values consistent by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    gamma: f64,
    beta: f64,
    xi: f64,
    gamma_prime: f64,
    kappa: f64,
    gamma_bar: f64,
    omega_complex: C64,
}

impl ModelParams {
    /// Builds the parameter set, rejecting non-positive or non-finite input.
    ///
    /// `beta <= 0` is rejected explicitly: at `beta = 0` the net relaxation
    /// rate `kappa` vanishes and the generator stops being diagonalizable.
    pub fn new(omega: f64, gamma: f64, beta: f64) -> Result<Self> {
        check_positive("omega", omega)?;
        check_positive("gamma", gamma)?;
        check_positive("beta", beta)?;

        let xi = (-beta * omega).exp();
        // xi < 1 strictly because beta * omega > 0; equality would need a
        // zero exponent, which the positivity checks exclude.
        let gamma_prime = gamma * xi;
        let kappa = gamma - gamma_prime;
        let gamma_bar = 0.5 * (gamma + gamma_prime);
        let omega_complex = C64::new(omega, -gamma_bar);

        Ok(Self {
            omega,
            gamma,
            beta,
            xi,
            gamma_prime,
            kappa,
            gamma_bar,
            omega_complex,
        })
    }

    /// Oscillator angular frequency.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Downward (emission) rate.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Inverse bath temperature.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Boltzmann factor `xi = exp(-beta * omega) = gamma' / gamma`.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Upward (absorption) rate `gamma' = gamma * xi`.
    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    /// Net relaxation rate `kappa = gamma - gamma'`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Mean rate `(gamma + gamma') / 2`.
    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    /// Complex frequency `omega - i * gamma_bar`.
    pub fn omega_complex(&self) -> C64 {
        self.omega_complex
    }

    /// Smallest dimension for which the thermal tail `xi^D` drops below
    /// `1e-12`, clamped to the supported dense envelope `[16, 64]`.
    ///
    /// This is the default truncation used by the command-line tools.
    pub fn default_dim(&self) -> usize {
        let needed = (1e-12f64.ln() / self.xi.ln()).ceil();
        if !needed.is_finite() {
            return 16;
        }
        (needed as usize).clamp(16, 64)
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            requirement: "finite and strictly positive",
            value,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn std_params() -> ModelParams {
        ModelParams::new(1.0, 1.0, std::f64::consts::LN_2).unwrap()
    }

    #[test]
    fn standard_parameters_are_round_numbers() {
        let p = std_params();
        assert_abs_diff_eq!(p.xi(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.gamma_prime(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.kappa(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.gamma_bar(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p.omega_complex().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.omega_complex().im, -0.75, epsilon = 1e-15);
    }

    #[test]
    fn cold_limit_kills_the_upward_rate() {
        let p = ModelParams::new(1.0, 1.0, 100.0).unwrap();
        assert!(p.gamma_prime() < 1e-43);
        assert_abs_diff_eq!(p.kappa(), p.gamma(), epsilon = 1e-43);
    }

    #[test]
    fn direct_substitution() {
        let p = ModelParams::new(2.0, 0.2, 1.0).unwrap();
        assert_abs_diff_eq!(p.xi(), (-2.0f64).exp(), epsilon = 1e-16);
        assert_abs_diff_eq!(p.gamma_prime(), 0.2 * (-2.0f64).exp(), epsilon = 1e-16);
    }

    #[test]
    fn rejects_nonpositive_input() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn xi_in_open_unit_interval() {
        for &(w, g, b) in &[(1.0, 1.0, 0.1), (3.0, 0.5, 2.0), (0.2, 2.0, 5.0)] {
            let p = ModelParams::new(w, g, b).unwrap();
            assert!(p.xi() > 0.0 && p.xi() < 1.0);
            assert!(p.kappa() > 0.0);
            assert!(p.omega_complex().im < 0.0);
        }
    }

    #[test]
    fn default_dim_matches_thermal_tail() {
        assert_eq!(std_params().default_dim(), 40);
        // very cold bath: tail is negligible at any dimension
        assert_eq!(ModelParams::new(1.0, 1.0, 100.0).unwrap().default_dim(), 16);
    }
}
