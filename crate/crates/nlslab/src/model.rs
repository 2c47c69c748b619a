//! Model families and their parameter validation.

use serde::{Deserialize, Serialize};

use crate::error::{NlsError, Result};

/// Which nonlinear Schrödinger family a `ModelSpec` describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// i u_t + Δu = ε |u|^p u, zero background.
    PowerNLS,
    /// i v_t + Δv = ε (|v|^p − 1) v, constant background v → 1, p = 2q even.
    GrossPitaevskii,
    /// i u_t + Δu = λ₁|u|²u − λ₂|u|⁴u with λ₁λ₂ > 0.
    CubicQuintic,
    /// i u_t + μΔu − Δ²u = ε |u|^p u.
    Biharmonic,
    /// i u_t + u_xx − i ε (|u|²u)_x = 0, one dimension only.
    DerivativeNLS,
    /// i u_t + Δu = ε log(|u|²) u.
    LogNLS,
}

/// A fully specified model: family plus every parameter it needs.
///
/// Unused parameters are carried at their defaults (`p = 2`, `mu = 0`,
/// `lambda1 = lambda2 = 1`) so the struct stays plain data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    /// Sign of the nonlinearity, ±1.
    pub epsilon: f64,
    /// Nonlinearity power (PowerNLS / GrossPitaevskii / Biharmonic).
    pub p: f64,
    /// Spatial dimension. Analytic formulas support any n ≥ 1; grid
    /// evolution requires n = 1.
    pub n: u32,
    /// Biharmonic second-order dispersion coefficient.
    pub mu: f64,
    /// Cubic-quintic coefficients, λ₁λ₂ > 0.
    pub lambda1: f64,
    pub lambda2: f64,
}

impl ModelSpec {
    pub fn power_nls(epsilon: f64, p: f64, n: u32) -> Result<Self> {
        ModelSpec {
            family: Family::PowerNLS,
            epsilon,
            p,
            n,
            mu: 0.0,
            lambda1: 1.0,
            lambda2: 1.0,
        }
        .validated()
    }

    pub fn gross_pitaevskii(epsilon: f64, p: f64, n: u32) -> Result<Self> {
        ModelSpec {
            family: Family::GrossPitaevskii,
            epsilon,
            p,
            n,
            mu: 0.0,
            lambda1: 1.0,
            lambda2: 1.0,
        }
        .validated()
    }

    pub fn cubic_quintic(lambda1: f64, lambda2: f64, n: u32) -> Result<Self> {
        ModelSpec {
            family: Family::CubicQuintic,
            epsilon: 1.0,
            p: 2.0,
            n,
            mu: 0.0,
            lambda1,
            lambda2,
        }
        .validated()
    }

    pub fn biharmonic(epsilon: f64, mu: f64, p: f64, n: u32) -> Result<Self> {
        ModelSpec {
            family: Family::Biharmonic,
            epsilon,
            p,
            n,
            mu,
            lambda1: 1.0,
            lambda2: 1.0,
        }
        .validated()
    }

    pub fn derivative_nls(epsilon: f64) -> Result<Self> {
        ModelSpec {
            family: Family::DerivativeNLS,
            epsilon,
            p: 2.0,
            n: 1,
            mu: 0.0,
            lambda1: 1.0,
            lambda2: 1.0,
        }
        .validated()
    }

    pub fn log_nls(epsilon: f64, n: u32) -> Result<Self> {
        ModelSpec {
            family: Family::LogNLS,
            epsilon,
            p: 2.0,
            n,
            mu: 0.0,
            lambda1: 1.0,
            lambda2: 1.0,
        }
        .validated()
    }

    /// Energy-critical power for the second-order families: ∞ for n ≤ 2,
    /// 4/(n−2) for n ≥ 3.
    pub fn critical_power_second_order(n: u32) -> f64 {
        if n <= 2 {
            f64::INFINITY
        } else {
            4.0 / (n as f64 - 2.0)
        }
    }

    /// Energy-critical power for the biharmonic family: ∞ for n ≤ 4,
    /// 8/(n−4) for n ≥ 5.
    pub fn critical_power_biharmonic(n: u32) -> f64 {
        if n <= 4 {
            f64::INFINITY
        } else {
            8.0 / (n as f64 - 4.0)
        }
    }

    pub fn validated(self) -> Result<Self> {
        if self.n == 0 {
            return Err(NlsError::InvalidParameter("dimension n must be >= 1".into()));
        }
        match self.family {
            Family::PowerNLS => {
                self.check_epsilon()?;
                let pmax = Self::critical_power_second_order(self.n);
                if !(self.p > 0.0 && self.p < pmax) {
                    return Err(NlsError::InvalidParameter(format!(
                        "PowerNLS requires 0 < p < {pmax}, got p = {}",
                        self.p
                    )));
                }
            }
            Family::GrossPitaevskii => {
                self.check_epsilon()?;
                let q = self.p / 2.0;
                if !(self.p > 0.0 && q.fract() == 0.0) {
                    return Err(NlsError::InvalidParameter(format!(
                        "GrossPitaevskii requires p = 2q with integer q >= 1, got p = {}",
                        self.p
                    )));
                }
            }
            Family::CubicQuintic => {
                if !(self.lambda1 * self.lambda2 > 0.0) {
                    return Err(NlsError::InvalidParameter(format!(
                        "CubicQuintic requires lambda1*lambda2 > 0, got {} * {}",
                        self.lambda1, self.lambda2
                    )));
                }
            }
            Family::Biharmonic => {
                self.check_epsilon()?;
                let pmax = Self::critical_power_biharmonic(self.n);
                if !(self.p > 0.0 && self.p < pmax) {
                    return Err(NlsError::InvalidParameter(format!(
                        "Biharmonic requires 0 < p < {pmax}, got p = {}",
                        self.p
                    )));
                }
                if !self.mu.is_finite() {
                    return Err(NlsError::InvalidParameter("mu must be finite".into()));
                }
            }
            Family::DerivativeNLS => {
                self.check_epsilon()?;
                if self.n != 1 {
                    return Err(NlsError::InvalidParameter(
                        "DerivativeNLS is one-dimensional only".into(),
                    ));
                }
            }
            Family::LogNLS => {
                self.check_epsilon()?;
            }
        }
        Ok(self)
    }

    fn check_epsilon(&self) -> Result<()> {
        if self.epsilon != 1.0 && self.epsilon != -1.0 {
            return Err(NlsError::InvalidParameter(format!(
                "epsilon must be +1 or -1, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Mass-critical power 4/n for the second-order families.
    pub fn mass_critical_power(&self) -> f64 {
        4.0 / self.n as f64
    }

    /// Critical Sobolev index s_c = n/2 − 2/p.
    pub fn s_c(&self) -> f64 {
        self.n as f64 / 2.0 - 2.0 / self.p
    }
}
