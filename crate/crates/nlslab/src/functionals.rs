//! Conserved quantities and virial functionals, computed by quadrature on
//! `Field1D` samples.
//!
//! Zero-background fields get mass/energy/momentum per family; Stokes-
//! background fields (supplied in the v-frame, i.e. with the `e^{it}` phase
//! removed) get the renormalized variants. The energy on the nonzero
//! background is the Hamiltonian of the constant-background equation,
//! `E_nz = int |v_x|^2 + eps [ (2/(p+2))(|v|^{p+2}-1) - (|v|^2-1) ]`,
//! which for the cubic defocusing case reduces to
//! `int (|v_x|^2 - (1/2)(|v|^2-1)^2)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NlsError, Result};
use crate::grid::{
    quadrature, quadrature_with_tail, spectral_derivative, BackgroundKind, Field1D,
    TailCorrection,
};
use crate::model::{Family, ModelSpec};

/// Flat report of every functional populated for a field.
///
/// `None` means "not applicable for this background/family", and such keys
/// are omitted from the serialized form.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct InvariantReport {
    #[serde(rename = "m", skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(rename = "e", skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(rename = "p", skip_serializing_if = "Option::is_none")]
    pub momentum: Option<f64>,
    #[serde(rename = "m_nz", skip_serializing_if = "Option::is_none")]
    pub mass_nz: Option<f64>,
    #[serde(rename = "e_nz", skip_serializing_if = "Option::is_none")]
    pub energy_nz: Option<f64>,
    #[serde(rename = "p_nz", skip_serializing_if = "Option::is_none")]
    pub momentum_nz: Option<f64>,
    #[serde(rename = "p_tilde", skip_serializing_if = "Option::is_none")]
    pub p_tilde: Option<f64>,
    #[serde(rename = "variance", skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(rename = "dnls_h", skip_serializing_if = "Option::is_none")]
    pub dnls_h: Option<f64>,
    #[serde(rename = "psi", skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
}

impl InvariantReport {
    /// Look an entry up by its serialized key name.
    pub fn get(&self, key: &str) -> Result<Option<f64>> {
        Ok(match key {
            "m" => self.mass,
            "e" => self.energy,
            "p" => self.momentum,
            "m_nz" => self.mass_nz,
            "e_nz" => self.energy_nz,
            "p_nz" => self.momentum_nz,
            "p_tilde" => self.p_tilde,
            "variance" => self.variance,
            "dnls_h" => self.dnls_h,
            "psi" => self.psi,
            _ => return Err(NlsError::UnknownKey(key.to_string())),
        })
    }

    /// Keys populated in this report, in serialization order.
    pub fn populated_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        for (k, v) in [
            ("m", self.mass),
            ("e", self.energy),
            ("p", self.momentum),
            ("m_nz", self.mass_nz),
            ("e_nz", self.energy_nz),
            ("p_nz", self.momentum_nz),
            ("p_tilde", self.p_tilde),
            ("variance", self.variance),
            ("dnls_h", self.dnls_h),
            ("psi", self.psi),
        ] {
            if v.is_some() {
                keys.push(k);
            }
        }
        keys
    }
}

fn density(f: &Field1D) -> Vec<f64> {
    f.values().iter().map(|v| v.norm_sqr()).collect()
}

fn pow_density(f: &Field1D, power: f64) -> Vec<f64> {
    f.values().iter().map(|v| v.norm_sqr().powf(power / 2.0)).collect()
}

/// `int |u|^2`.
pub fn mass(f: &Field1D) -> Result<f64> {
    quadrature(&density(f), &f.grid)
}

/// `Im int u_x conj(u)`.
pub fn momentum(f: &Field1D) -> Result<f64> {
    let ux = spectral_derivative(f, 1)?;
    let integrand: Vec<f64> = ux
        .values()
        .iter()
        .zip(f.values())
        .map(|(d, v)| (d * v.conj()).im)
        .collect();
    quadrature(&integrand, &f.grid)
}

/// `int |u_x|^2`.
pub fn grad_norm_sqr(f: &Field1D) -> Result<f64> {
    let ux = spectral_derivative(f, 1)?;
    quadrature(&density(&ux), &ux.grid)
}

/// `int |u|^{p+2}`.
pub fn lp_norm_pow(f: &Field1D, p_plus_2: f64) -> Result<f64> {
    quadrature(&pow_density(f, p_plus_2), &f.grid)
}

/// Family-appropriate energy of a zero-background field.
pub fn energy(f: &Field1D, model: &ModelSpec) -> Result<Option<f64>> {
    Ok(match model.family {
        Family::PowerNLS => {
            let kin = grad_norm_sqr(f)?;
            let pot = lp_norm_pow(f, model.p + 2.0)?;
            Some(kin + 2.0 * model.epsilon / (model.p + 2.0) * pot)
        }
        Family::CubicQuintic => {
            let kin = grad_norm_sqr(f)?;
            let l4 = lp_norm_pow(f, 4.0)?;
            let l6 = lp_norm_pow(f, 6.0)?;
            Some(kin + model.lambda1 / 2.0 * l4 - model.lambda2 / 3.0 * l6)
        }
        Family::Biharmonic => {
            let lap = spectral_derivative(f, 2)?;
            let bih = quadrature(&density(&lap), &f.grid)?;
            let kin = grad_norm_sqr(f)?;
            let pot = lp_norm_pow(f, model.p + 2.0)?;
            Some(bih + model.mu * kin + 2.0 * model.epsilon / (model.p + 2.0) * pot)
        }
        Family::LogNLS => {
            let kin = grad_norm_sqr(f)?;
            // int |u|^2 (log|u|^2 - 1); the integrand tends to 0 with |u|
            let integrand: Vec<f64> = f
                .values()
                .iter()
                .map(|v| {
                    let m = v.norm_sqr();
                    if m < 1e-300 {
                        0.0
                    } else {
                        m * (m.ln() - 1.0)
                    }
                })
                .collect();
            Some(kin + model.epsilon * quadrature(&integrand, &f.grid)?)
        }
        // the derivative NLS carries H instead of an energy here
        Family::DerivativeNLS | Family::GrossPitaevskii => None,
    })
}

/// Derivative-NLS Hamiltonian `H = -Im int conj(u) u_x + (eps/2) int |u|^4`.
pub fn dnls_h(f: &Field1D, model: &ModelSpec) -> Result<f64> {
    if model.family != Family::DerivativeNLS {
        return Err(NlsError::FamilyMismatch(format!(
            "dnls_h needs DerivativeNLS, got {:?}",
            model.family
        )));
    }
    let ux = spectral_derivative(f, 1)?;
    let imux: Vec<f64> = ux
        .values()
        .iter()
        .zip(f.values())
        .map(|(d, v)| (v.conj() * d).im)
        .collect();
    let first = quadrature(&imux, &f.grid)?;
    let l4 = lp_norm_pow(f, 4.0)?;
    Ok(-first + model.epsilon / 2.0 * l4)
}

/// Weighted momentum `P~ = Im int x conj(u) u_x` for zero-background fields.
pub fn virial_p_tilde(f: &Field1D) -> Result<f64> {
    if f.background != BackgroundKind::Zero {
        return Err(NlsError::BackgroundMismatch(
            "virial_p_tilde needs a zero-background field".into(),
        ));
    }
    let l = f.grid.half_width();
    if l * f.boundary_magnitude().powi(2) > 1e-10 {
        return Err(NlsError::WeightUnbounded(format!(
            "x |u|^2 at the boundary is {:.3e}",
            l * f.boundary_magnitude().powi(2)
        )));
    }
    let ux = spectral_derivative(f, 1)?;
    let integrand: Vec<f64> = (0..f.grid.len())
        .map(|j| f.grid.x(j) * (f.values()[j].conj() * ux.values()[j]).im)
        .collect();
    quadrature(&integrand, &f.grid)
}

/// Nonzero-background weighted momentum `Im int x (conj(v)-1) v_x` (v-frame).
pub fn virial_p_nz(f: &Field1D) -> Result<f64> {
    if f.background != BackgroundKind::Stokes {
        return Err(NlsError::BackgroundMismatch(
            "virial_p_nz needs a Stokes-background field in the v-frame".into(),
        ));
    }
    let vx = spectral_derivative(f, 1)?;
    let integrand: Vec<f64> = (0..f.grid.len())
        .map(|j| {
            f.grid.x(j) * ((f.values()[j].conj() - 1.0) * vx.values()[j]).im
        })
        .collect();
    let l = f.grid.half_width();
    let w_edge = (f.values()[0] - Complex64::new(1.0, 0.0)).norm();
    if l * l * w_edge * w_edge > 1e-6 {
        return Err(NlsError::WeightUnbounded(format!(
            "x (v-1) v_x at the boundary is too large ({:.3e})",
            l * l * w_edge * w_edge
        )));
    }
    quadrature(&integrand, &f.grid)
}

/// `int x^2 |u|^2`, the variance (zero background only).
pub fn variance(f: &Field1D) -> Result<f64> {
    if f.background != BackgroundKind::Zero {
        return Err(NlsError::BackgroundMismatch("variance needs zero background".into()));
    }
    let l = f.grid.half_width();
    let edge = l * l * f.boundary_magnitude().powi(2);
    if edge > 1e-12 {
        return Err(NlsError::WeightUnbounded(format!(
            "x^2 |u|^2 at the boundary is {edge:.3e} > 1e-12"
        )));
    }
    let integrand: Vec<f64> = (0..f.grid.len())
        .map(|j| {
            let x = f.grid.x(j);
            x * x * f.values()[j].norm_sqr()
        })
        .collect();
    quadrature(&integrand, &f.grid)
}

/// `ln cosh(y)` without overflow.
fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (1.0 + (-2.0 * a).exp()).ln() - std::f64::consts::LN_2
}

/// Mass-subcritical weighted virial `psi = Im int cosh(sqrt(omega) x) z`.
///
/// The hyperbolic weight is combined with `|z|` in log space so the
/// integrand never overflows even when `cosh(sqrt(omega) L)` would.
pub fn weighted_virial_psi(z: &Field1D, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(NlsError::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let sw = omega.sqrt();
    let l = z.grid.half_width();
    // hypothesis: z decays strictly faster than e^{-sqrt(omega)|x|}
    let edge = z.boundary_magnitude().max(1e-300);
    if edge.ln() + ln_cosh(sw * l) > (1e-10_f64).ln() {
        return Err(NlsError::WeightOverwhelmsDecay(format!(
            "|z| cosh(sqrt(omega) x) ~ {:.3e} at the boundary",
            (edge.ln() + ln_cosh(sw * l)).exp()
        )));
    }
    let integrand: Vec<f64> = (0..z.grid.len())
        .map(|j| {
            let v = z.values()[j];
            if v.im == 0.0 {
                return 0.0;
            }
            let x = z.grid.x(j);
            v.im.signum() * (v.im.abs().max(1e-300).ln() + ln_cosh(sw * x)).exp()
        })
        .collect();
    quadrature(&integrand, &z.grid)
}

/// Mass/energy/momentum (plus family extras) of a zero-background field.
pub fn invariants_zero_bc(f: &Field1D, model: &ModelSpec) -> Result<InvariantReport> {
    if f.background != BackgroundKind::Zero {
        return Err(NlsError::BackgroundMismatch(
            "invariants_zero_bc needs a zero-background field".into(),
        ));
    }
    let mut rep = InvariantReport {
        mass: Some(mass(f)?),
        energy: energy(f, model)?,
        momentum: Some(momentum(f)?),
        ..Default::default()
    };
    if model.family == Family::DerivativeNLS {
        rep.dnls_h = Some(dnls_h(f, model)?);
    }
    rep.p_tilde = virial_p_tilde(f).ok();
    rep.variance = variance(f).ok();
    Ok(rep)
}

/// Renormalized invariants of a Stokes-background field in the v-frame,
/// for the cubic (p = 2) constant-background equation.
///
/// Algebraically decaying fields (Peregrine) automatically get the
/// analytic `c/x^2` tail correction on the mass integrand; exponentially
/// decaying fields leave the correction negligible.
pub fn invariants_nonzero_bc(f: &Field1D) -> Result<InvariantReport> {
    if f.background != BackgroundKind::Stokes {
        return Err(NlsError::BackgroundMismatch(
            "invariants_nonzero_bc needs a Stokes-background field".into(),
        ));
    }
    let g = &f.grid;
    let m_int: Vec<f64> = f.values().iter().map(|v| v.norm_sqr() - 1.0).collect();
    let m_nz = quadrature_with_tail(&m_int, g, TailCorrection::AlgebraicX2)?.value;

    let vx = spectral_derivative(f, 1)?;
    let e_int: Vec<f64> = f
        .values()
        .iter()
        .zip(vx.values())
        .map(|(v, d)| {
            let w = v.norm_sqr() - 1.0;
            d.norm_sqr() - 0.5 * w * w
        })
        .collect();
    let e_nz = quadrature_with_tail(&e_int, g, TailCorrection::AlgebraicX2)?.value;

    let p_int: Vec<f64> = f
        .values()
        .iter()
        .zip(vx.values())
        .map(|(v, d)| ((v.conj() - 1.0) * d).im)
        .collect();
    let p_nz = quadrature_with_tail(&p_int, g, TailCorrection::AlgebraicX2)?.value;

    let mut rep = InvariantReport {
        mass_nz: Some(m_nz),
        energy_nz: Some(e_nz),
        momentum_nz: Some(p_nz),
        ..Default::default()
    };
    rep.p_tilde = virial_p_nz(f).ok();
    Ok(rep)
}

/// Generalized nonzero-background energy (Hamiltonian convention) for
/// arbitrary even power p: `int |v_x|^2 + eps [ (2/(p+2))(|v|^{p+2}-1) - (|v|^2-1) ]`.
pub fn energy_nz_general(f: &Field1D, model: &ModelSpec) -> Result<f64> {
    if model.family != Family::GrossPitaevskii {
        return Err(NlsError::FamilyMismatch(
            "energy_nz_general needs GrossPitaevskii".into(),
        ));
    }
    let vx = spectral_derivative(f, 1)?;
    let p = model.p;
    let integrand: Vec<f64> = f
        .values()
        .iter()
        .zip(vx.values())
        .map(|(v, d)| {
            let s = v.norm_sqr();
            d.norm_sqr()
                + model.epsilon
                    * (2.0 / (p + 2.0) * (s.powf((p + 2.0) / 2.0) - 1.0) - (s - 1.0))
        })
        .collect();
    Ok(quadrature_with_tail(&integrand, &f.grid, TailCorrection::AlgebraicX2)?.value)
}

/// Dispatch on the field's background.
pub fn invariants(f: &Field1D, model: &ModelSpec) -> Result<InvariantReport> {
    match f.background {
        BackgroundKind::Zero => invariants_zero_bc(f, model),
        BackgroundKind::Stokes => invariants_nonzero_bc(f),
    }
}

/// Max relative drift of a sampled invariant series against its first value.
pub fn series_drift(values: &[f64]) -> f64 {
    let v0 = values[0];
    values
        .iter()
        .map(|v| (v - v0).abs() / v0.abs().max(1.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{eval_exact, ExactSolution};
    use crate::grid::Grid1D;

    fn grid(l: f64, n: usize) -> Grid1D {
        Grid1D::new(l, n).unwrap()
    }

    #[test]
    fn satsuma_yajima_invariants() {
        let g = grid(20.0, 2048);
        let f = eval_exact(&ExactSolution::SatsumaYajima, 0.0, &g).unwrap();
        let model = ModelSpec::power_nls(-1.0, 2.0, 1).unwrap();
        let rep = invariants_zero_bc(&f, &model).unwrap();
        assert!((rep.mass.unwrap() - 16.0).abs() < 1e-8, "M = {:?}", rep.mass);
        assert!(
            (rep.energy.unwrap() + 112.0 / 3.0).abs() < 1e-6,
            "E = {:?}",
            rep.energy
        );
        assert!(rep.momentum.unwrap().abs() < 1e-10, "P = {:?}", rep.momentum);
    }

    #[test]
    fn standing_wave_mass_critical_energy_vanishes() {
        let g = grid(20.0, 1024);
        let f = eval_exact(&ExactSolution::StandingWave { omega: 1.0, p: 4.0 }, 0.0, &g).unwrap();
        let model = ModelSpec::power_nls(-1.0, 4.0, 1).unwrap();
        let rep = invariants_zero_bc(&f, &model).unwrap();
        assert!(rep.energy.unwrap().abs() < 1e-8, "E = {:?}", rep.energy);
    }

    #[test]
    fn zero_field_all_zero() {
        let g = grid(10.0, 64);
        let f = Field1D::zeros(g, BackgroundKind::Zero, 0.0);
        let model = ModelSpec::power_nls(-1.0, 2.0, 1).unwrap();
        let rep = invariants_zero_bc(&f, &model).unwrap();
        assert_eq!(rep.mass, Some(0.0));
        assert_eq!(rep.energy, Some(0.0));
        assert_eq!(rep.momentum, Some(0.0));
    }

    #[test]
    fn kuznetsov_ma_nonzero_invariants() {
        let g = grid(25.0, 2048);
        let f = eval_exact(&ExactSolution::KuznetsovMa { a: 1.0 }, 0.0, &g)
            .unwrap()
            .stokes_phase_removed();
        let rep = invariants_nonzero_bc(&f).unwrap();
        let beta = 2.0_f64.sqrt();
        assert!(
            (rep.mass_nz.unwrap() - 4.0 * beta).abs() < 1e-6,
            "M_nz = {:?}",
            rep.mass_nz
        );
        assert!(rep.momentum_nz.unwrap().abs() < 1e-8, "P_nz = {:?}", rep.momentum_nz);
        // Hamiltonian-convention energy: -(4/3) beta^3 (numerically pinned
        // by conservation across t; see the drift test below)
        let expect = -4.0 / 3.0 * beta.powi(3);
        assert!(
            (rep.energy_nz.unwrap() - expect).abs() < 1e-6,
            "E_nz = {:?}, expected {expect}",
            rep.energy_nz
        );
    }

    #[test]
    fn kuznetsov_ma_invariants_conserved_in_time() {
        let g = grid(25.0, 2048);
        let sol = ExactSolution::KuznetsovMa { a: 0.8 };
        let at = |t: f64| {
            let f = eval_exact(&sol, t, &g).unwrap().stokes_phase_removed();
            invariants_nonzero_bc(&f).unwrap()
        };
        let r0 = at(0.0);
        let r1 = at(0.37);
        for (a, b) in [
            (r0.mass_nz, r1.mass_nz),
            (r0.energy_nz, r1.energy_nz),
            (r0.momentum_nz, r1.momentum_nz),
        ] {
            assert!(
                (a.unwrap() - b.unwrap()).abs() < 1e-8 * a.unwrap().abs().max(1.0),
                "{a:?} vs {b:?}"
            );
        }
    }

    #[test]
    fn peregrine_invariants_vanish_with_tail_correction() {
        let g = grid(2000.0, 65536);
        let f = eval_exact(&ExactSolution::Peregrine, 0.0, &g)
            .unwrap()
            .stokes_phase_removed();
        let rep = invariants_nonzero_bc(&f).unwrap();
        assert!(rep.mass_nz.unwrap().abs() < 1e-3, "M_nz = {:?}", rep.mass_nz);
        assert!(rep.energy_nz.unwrap().abs() < 1e-3, "E_nz = {:?}", rep.energy_nz);
        assert!(rep.momentum_nz.unwrap().abs() < 1e-3, "P_nz = {:?}", rep.momentum_nz);
    }

    #[test]
    fn pure_stokes_wave_all_zero() {
        let g = grid(20.0, 256);
        let f = Field1D::from_fn(g, BackgroundKind::Stokes, 0.0, |_| Complex64::new(1.0, 0.0))
            .unwrap();
        let rep = invariants_nonzero_bc(&f).unwrap();
        assert!(rep.mass_nz.unwrap().abs() < 1e-12);
        assert!(rep.energy_nz.unwrap().abs() < 1e-12);
        assert!(rep.momentum_nz.unwrap().abs() < 1e-12);
    }

    #[test]
    fn p_tilde_examples() {
        let g = grid(25.0, 2048);
        // SY at t = 0: |u| even, phase x-independent, integrand odd
        let f = eval_exact(&ExactSolution::SatsumaYajima, 0.0, &g).unwrap();
        assert!(virial_p_tilde(&f).unwrap().abs() < 1e-8);
        // e^{ix} sech(x-1): Im(conj(u) u_x) = sech^2(x-1), weight x -> 2
        let f = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
            Complex64::new(0.0, x).exp() / (x - 1.0).cosh()
        })
        .unwrap();
        assert!((virial_p_tilde(&f).unwrap() - 2.0).abs() < 1e-8);
        let z = Field1D::zeros(g, BackgroundKind::Zero, 0.0);
        assert_eq!(virial_p_tilde(&z).unwrap(), 0.0);
    }

    #[test]
    fn p_nz_examples() {
        let g = grid(25.0, 2048);
        let one = Field1D::from_fn(g, BackgroundKind::Stokes, 0.0, |_| Complex64::new(1.0, 0.0))
            .unwrap();
        assert_eq!(virial_p_nz(&one).unwrap(), 0.0);
        // KM at t = 0 is even in x, so the integrand is odd
        let km = eval_exact(&ExactSolution::KuznetsovMa { a: 1.0 }, 0.0, &g)
            .unwrap()
            .stokes_phase_removed();
        assert!(virial_p_nz(&km).unwrap().abs() < 1e-8);
        // independent high-resolution quadrature oracle
        let f = Field1D::from_fn(g, BackgroundKind::Stokes, 0.0, |x| {
            Complex64::new(1.0, 0.0) + Complex64::new(0.0, x).exp() / (x - 1.0).cosh()
        })
        .unwrap();
        let val = virial_p_nz(&f).unwrap();
        let g2 = grid(25.0, 8192);
        let f2 = Field1D::from_fn(g2, BackgroundKind::Stokes, 0.0, |x| {
            Complex64::new(1.0, 0.0) + Complex64::new(0.0, x).exp() / (x - 1.0).cosh()
        })
        .unwrap();
        let oracle = virial_p_nz(&f2).unwrap();
        assert!((val - oracle).abs() < 1e-8, "{val} vs {oracle}");
    }

    #[test]
    fn variance_examples() {
        let g = grid(25.0, 2048);
        // closed form: int x^2 sech^2 x dx = pi^2 / 6
        let f = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
            Complex64::new(1.0 / x.cosh(), 0.0)
        })
        .unwrap();
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((variance(&f).unwrap() - pi2_6).abs() < 1e-8);
        // Q for p = 2 is sqrt(2) sech x: variance doubles
        let q = eval_exact(&ExactSolution::StandingWave { omega: 1.0, p: 2.0 }, 0.0, &g).unwrap();
        assert!((variance(&q).unwrap() - 2.0 * pi2_6).abs() < 1e-8);
        let z = Field1D::zeros(g, BackgroundKind::Zero, 0.0);
        assert_eq!(variance(&z).unwrap(), 0.0);
    }

    #[test]
    fn psi_examples() {
        let g = grid(25.0, 65536);
        // real-valued z integrates to 0
        let zr = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
            Complex64::new((-2.0 * x.abs()).exp(), 0.0)
        })
        .unwrap();
        assert_eq!(weighted_virial_psi(&zr, 1.0).unwrap(), 0.0);
        // z = i e^{-2|x|}: 2 int_0^inf cosh(x) e^{-2x} dx = 4/3
        let z = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
            Complex64::new(0.0, (-2.0 * x.abs()).exp())
        })
        .unwrap();
        let val = weighted_virial_psi(&z, 1.0).unwrap();
        assert!((val - 4.0 / 3.0).abs() < 1e-5, "psi = {val}");
        // decay slower than the weight must be rejected
        let slow = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
            Complex64::new(0.0, (-0.9 * x.abs()).exp())
        })
        .unwrap();
        assert!(matches!(
            weighted_virial_psi(&slow, 1.0),
            Err(NlsError::WeightOverwhelmsDecay(_))
        ));
    }

    #[test]
    fn dnls_h_sign_convention() {
        let g = grid(20.0, 1024);
        let model = ModelSpec::derivative_nls(1.0).unwrap();
        // u = e^{ix} sech x: -Im int conj(u) u_x = -int sech^2 = -2;
        // (eps/2) int sech^4 = (1/2)(4/3) = 2/3; H = -4/3
        let f = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
            Complex64::new(0.0, x).exp() / x.cosh()
        })
        .unwrap();
        let h = dnls_h(&f, &model).unwrap();
        assert!((h - (-2.0 + 2.0 / 3.0)).abs() < 1e-8, "H = {h}");
    }

    #[test]
    fn momentum_necessity_on_periodic_catalog() {
        let g = grid(25.0, 2048);
        for sol in [
            ExactSolution::SatsumaYajima,
            ExactSolution::StandingWave { omega: 1.0, p: 2.0 },
            ExactSolution::Gausson { omega: 1.0 },
        ] {
            let f = eval_exact(&sol, 0.21, &g).unwrap();
            assert!(momentum(&f).unwrap().abs() < 1e-8, "{sol:?}");
        }
        let km = eval_exact(&ExactSolution::KuznetsovMa { a: 1.0 }, 0.21, &g)
            .unwrap()
            .stokes_phase_removed();
        let rep = invariants_nonzero_bc(&km).unwrap();
        assert!(rep.momentum_nz.unwrap().abs() < 1e-8);
    }

    #[test]
    fn mass_scaling_covariance() {
        // u -> lambda^{2/p} u(lambda^2 t, lambda x) with p = 2 scales M by lambda
        let lam = 2.0;
        let g = grid(20.0, 4096);
        let f = eval_exact(&ExactSolution::SatsumaYajima, 0.0, &g).unwrap();
        let m0 = mass(&f).unwrap();
        let gs = grid(10.0, 4096);
        let scaled = Field1D::from_fn(gs, BackgroundKind::Zero, 0.0, |x| {
            let xs = lam * x;
            let den = (4.0 * xs).cosh() + 4.0 * (2.0 * xs).cosh() + 3.0;
            let num = Complex64::new((3.0 * xs).cosh() + 3.0 * xs.cosh(), 0.0);
            lam * 4.0 * 2.0_f64.sqrt() * num / den
        })
        .unwrap();
        let m1 = mass(&scaled).unwrap();
        assert!((m1 - lam * m0).abs() < 1e-8 * m0, "{m1} vs {}", lam * m0);
    }

    #[test]
    fn report_serialization_keys() {
        let rep = InvariantReport {
            mass: Some(16.0),
            momentum: Some(0.0),
            ..Default::default()
        };
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["m"], 16.0);
        assert!(json.get("e").is_none());
        assert_eq!(rep.populated_keys(), vec!["m", "p"]);
        assert!(rep.get("nope").is_err());
    }

    #[test]
    fn series_drift_reports_injected_drift() {
        let series = [10.0, 10.0, 10.5, 10.0];
        assert!((series_drift(&series) - 0.05).abs() < 1e-15);
        let constant = [3.0; 5];
        assert_eq!(series_drift(&constant), 0.0);
    }

    #[test]
    fn variance_nonnegative_property() {
        let g = grid(20.0, 512);
        for seed in 0..20u64 {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coef: Vec<(f64, f64)> = (0..8).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
                let envelope = (-x * x / 8.0).exp();
                let mut v = Complex64::new(0.0, 0.0);
                for (m, (a, b)) in coef.iter().enumerate() {
                    v += Complex64::new(*a, *b) * Complex64::new(0.0, m as f64 * 0.3 * x).exp();
                }
                envelope * v
            })
            .unwrap();
            assert!(variance(&f).unwrap() >= 0.0);
        }
    }
}
