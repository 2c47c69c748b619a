//! Pseudospectral time evolution (1-D) for all six model families.
//!
//! Strang splitting for the pointwise-phase nonlinearities, integrating-factor
//! RK4 for the derivative nonlinearity. Blow-up is a first-class outcome: a
//! run that loses finiteness or focuses past the kinetic threshold ends with
//! `blowup_time` set and the last healthy field retained.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{NlsError, Result};
use crate::functionals::{grad_norm_sqr, invariants, series_drift, virial_p_nz, virial_p_tilde, InvariantReport};
use crate::grid::{fft_forward, fft_inverse, BackgroundKind, Field1D, Grid1D};
use crate::model::{Family, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    StrangSplit,
    RK4Pseudospectral,
}

/// Time-stepping configuration.
///
/// `dt` may be negative (exact time reversal of the splitting scheme); the
/// stability bound is checked against `|dt|` in `evolve`, which knows the
/// family and grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    pub sample_stride: usize,
    pub scheme: Scheme,
    /// log-NLS modulus clamp: the logarithm sees max(|u|^2, log_floor^2)
    pub log_floor: f64,
    /// None = family default (2/3 rule on for p >= 4 and DNLS)
    pub dealias: Option<bool>,
    /// declare blow-up when ||grad u||^2 exceeds this factor times max(initial, 1)
    pub blowup_kinetic_factor: f64,
}

impl EvolveConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(NlsError::InvalidParameter(format!("dt must be finite and nonzero, got {dt}")));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(NlsError::InvalidParameter(format!("t_end must be positive, got {t_end}")));
        }
        Ok(EvolveConfig {
            dt,
            t_end,
            sample_stride: 100,
            scheme: Scheme::StrangSplit,
            log_floor: 1e-12,
            dealias: None,
            blowup_kinetic_factor: 200.0,
        })
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride.max(1);
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// Documented per-family step-size bound: the splitting substeps are exact,
/// so the bound is an accuracy cap on the nonlinear phase per step; the
/// DNLS RK4 bound is a CFL-type limit on the dealiased advective term.
pub fn stability_bound(model: &ModelSpec, grid: &Grid1D) -> f64 {
    match model.family {
        Family::DerivativeNLS => {
            let k_max = std::f64::consts::PI / grid.half_width() * (grid.len() as f64 / 2.0);
            1.0 / k_max
        }
        _ => 0.1,
    }
}

/// Time series of invariants and the model-appropriate virial along an orbit.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryDiagnostics {
    pub times: Vec<f64>,
    pub reports: Vec<InvariantReport>,
    pub virial: Vec<f64>,
    pub monotone_fraction: f64,
    pub blowup_time: Option<f64>,
    /// number of (point, substep) log-NLS clamp activations
    pub clamp_activations: u64,
    #[serde(skip)]
    pub final_field: Option<Field1D>,
}

impl TrajectoryDiagnostics {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn monotone_fraction(series: &[f64]) -> f64 {
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut total = 0usize;
    for w in series.windows(2) {
        let d = w[1] - w[0];
        if !d.is_finite() {
            continue;
        }
        total += 1;
        if d > 0.0 {
            pos += 1;
        } else if d < 0.0 {
            neg += 1;
        }
    }
    if total == 0 {
        return 1.0;
    }
    // zero increments count toward the majority
    (pos.max(neg) + (total - pos - neg)) as f64 / total as f64
}

/// Relative drift of one invariant along a trajectory.
pub fn conservation_drift(traj: &TrajectoryDiagnostics, key: &str) -> Result<f64> {
    if traj.len() < 2 {
        return Err(NlsError::InvalidParameter("trajectory needs at least 2 samples".into()));
    }
    let series: Result<Vec<f64>> = traj
        .reports
        .iter()
        .map(|r| {
            r.get(key)?
                .ok_or_else(|| NlsError::UnknownKey(format!("{key} is not populated on this trajectory")))
        })
        .collect();
    Ok(series_drift(&series?))
}

fn nonlinear_phase(model: &ModelSpec, s: f64, log_floor: f64, clamps: &mut u64) -> f64 {
    match model.family {
        Family::PowerNLS | Family::Biharmonic => model.epsilon * s.powf(model.p / 2.0),
        Family::GrossPitaevskii => model.epsilon * (s.powf(model.p / 2.0) - 1.0),
        Family::CubicQuintic => model.lambda1 * s - model.lambda2 * s * s,
        Family::LogNLS => {
            let floor = log_floor * log_floor;
            if s < floor {
                *clamps += 1;
            }
            model.epsilon * s.max(floor).ln()
        }
        Family::DerivativeNLS => unreachable!("DNLS has no pointwise phase"),
    }
}

fn dealias_default(model: &ModelSpec) -> bool {
    model.family == Family::DerivativeNLS
        || (model.family != Family::LogNLS && model.p >= 4.0)
}

fn dealias_mask(grid: &Grid1D) -> Vec<bool> {
    let ks = grid.wavenumbers();
    let k_cut = 2.0 / 3.0 * std::f64::consts::PI / grid.half_width() * (grid.len() as f64 / 2.0);
    ks.iter().map(|k| k.abs() <= k_cut).collect()
}

struct Stepper {
    model: ModelSpec,
    dt: f64,
    log_floor: f64,
    /// exact linear multiplier for one full step (Strang) or none (RK4)
    multiplier: Vec<Complex64>,
    /// e^{-i k^2 dt/2} and its square, for the integrating factor
    half_if: Vec<Complex64>,
    dealias: Option<Vec<bool>>,
    ik: Vec<Complex64>,
    clamps: u64,
}

impl Stepper {
    fn new(model: &ModelSpec, grid: &Grid1D, cfg: &EvolveConfig) -> Self {
        let ks = grid.wavenumbers();
        let multiplier: Vec<Complex64> = ks
            .iter()
            .map(|k| {
                let symbol = match model.family {
                    Family::Biharmonic => model.mu * k * k + k.powi(4),
                    _ => k * k,
                };
                Complex64::new(0.0, -symbol * cfg.dt).exp()
            })
            .collect();
        let half_if: Vec<Complex64> = ks
            .iter()
            .map(|k| Complex64::new(0.0, -k * k * cfg.dt / 2.0).exp())
            .collect();
        let dealias = if cfg.dealias.unwrap_or_else(|| dealias_default(model)) {
            Some(dealias_mask(grid))
        } else {
            None
        };
        let ik: Vec<Complex64> = ks.iter().map(|k| Complex64::new(0.0, *k)).collect();
        Stepper {
            model: *model,
            dt: cfg.dt,
            log_floor: cfg.log_floor,
            multiplier,
            half_if,
            dealias,
            ik,
            clamps: 0,
        }
    }

    fn apply_half_phase(&mut self, values: &mut [Complex64]) {
        let offset = if self.model.family == Family::GrossPitaevskii {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        for w in values.iter_mut() {
            let v = *w + offset;
            let theta = nonlinear_phase(&self.model, v.norm_sqr(), self.log_floor, &mut self.clamps);
            *w = Complex64::new(0.0, -theta * self.dt / 2.0).exp() * v - offset;
        }
    }

    fn apply_dealias(&self, spec: &mut [Complex64]) {
        if let Some(mask) = &self.dealias {
            for (v, keep) in spec.iter_mut().zip(mask) {
                if !keep {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// One Strang step on the decaying state (w = v - 1 for GP, u otherwise).
    fn strang(&mut self, values: &mut Vec<Complex64>) {
        self.apply_half_phase(values);
        fft_forward(values);
        for (v, m) in values.iter_mut().zip(&self.multiplier) {
            *v *= m;
        }
        self.apply_dealias(values);
        fft_inverse(values);
        self.apply_half_phase(values);
    }

    /// `N(u) = eps (|u|^2 u)_x` in Fourier space, dealiased.
    fn dnls_nonlinearity(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut u = spec.to_vec();
        fft_inverse(&mut u);
        let mut g: Vec<Complex64> = u.iter().map(|v| v.norm_sqr() * v).collect();
        fft_forward(&mut g);
        for (gv, ik) in g.iter_mut().zip(&self.ik) {
            *gv *= self.model.epsilon * ik;
        }
        self.apply_dealias(&mut g);
        g
    }

    /// One integrating-factor RK4 step for DNLS, acting on spectral state.
    fn if_rk4(&mut self, values: &mut Vec<Complex64>) {
        let dt = self.dt;
        fft_forward(values);
        self.apply_dealias(values);
        let e: &[Complex64] = &self.half_if;
        let u0 = values.clone();
        let k1 = self.dnls_nonlinearity(&u0);
        let s2: Vec<Complex64> = (0..u0.len()).map(|j| e[j] * (u0[j] + dt / 2.0 * k1[j])).collect();
        let k2 = self.dnls_nonlinearity(&s2);
        let s3: Vec<Complex64> = (0..u0.len()).map(|j| e[j] * u0[j] + dt / 2.0 * k2[j]).collect();
        let k3 = self.dnls_nonlinearity(&s3);
        let s4: Vec<Complex64> = (0..u0.len())
            .map(|j| e[j] * e[j] * u0[j] + dt * e[j] * k3[j])
            .collect();
        let k4 = self.dnls_nonlinearity(&s4);
        for j in 0..u0.len() {
            values[j] = e[j] * e[j] * u0[j]
                + dt / 6.0 * (e[j] * e[j] * k1[j] + 2.0 * e[j] * (k2[j] + k3[j]) + k4[j]);
        }
        fft_inverse(values);
    }

    fn advance(&mut self, values: &mut Vec<Complex64>, scheme: Scheme) {
        match (self.model.family, scheme) {
            (Family::DerivativeNLS, _) => self.if_rk4(values),
            (_, Scheme::RK4Pseudospectral) => self.if_rk4(values),
            (_, Scheme::StrangSplit) => self.strang(values),
        }
    }
}

fn state_values(f: &Field1D) -> Vec<Complex64> {
    match f.background {
        BackgroundKind::Zero => f.values().to_vec(),
        BackgroundKind::Stokes => f.values().iter().map(|v| v - 1.0).collect(),
    }
}

fn field_from_state(values: &[Complex64], grid: &Grid1D, background: BackgroundKind, t: f64) -> Result<Field1D> {
    let vals: Vec<Complex64> = match background {
        BackgroundKind::Zero => values.to_vec(),
        BackgroundKind::Stokes => values.iter().map(|v| v + 1.0).collect(),
    };
    Field1D::new(*grid, vals, background, t)
}

/// One time step. Builds the Fourier multipliers on each call; `evolve`
/// caches them across a whole trajectory.
pub fn step(f: &Field1D, model: &ModelSpec, dt: f64, cfg: &EvolveConfig) -> Result<Field1D> {
    check_background(f, model)?;
    let mut cfg = *cfg;
    cfg.dt = dt;
    if !(dt.is_finite() && dt != 0.0) {
        return Err(NlsError::InvalidParameter(format!("dt must be finite and nonzero, got {dt}")));
    }
    let mut stepper = Stepper::new(model, &f.grid, &cfg);
    let mut values = state_values(f);
    stepper.advance(&mut values, cfg.scheme);
    field_from_state(&values, &f.grid, f.background, f.time + dt)
}

fn check_background(f: &Field1D, model: &ModelSpec) -> Result<()> {
    let want = match model.family {
        Family::GrossPitaevskii => BackgroundKind::Stokes,
        _ => BackgroundKind::Zero,
    };
    if f.background != want {
        return Err(NlsError::BackgroundMismatch(format!(
            "{:?} evolves {:?}-background fields, got {:?}",
            model.family, want, f.background
        )));
    }
    Ok(())
}

fn model_virial(f: &Field1D, model: &ModelSpec) -> f64 {
    let v = match model.family {
        Family::GrossPitaevskii => virial_p_nz(f),
        Family::DerivativeNLS => crate::virial::dnls_v_tilde(f),
        _ => virial_p_tilde(f),
    };
    v.unwrap_or(f64::NAN)
}

/// Advance `f0` to `t_end`, sampling invariants and the virial every
/// `sample_stride` steps. Blow-up ends the run early with the trajectory
/// collected so far and the last healthy field retained.
pub fn evolve(f0: &Field1D, model: &ModelSpec, cfg: &EvolveConfig) -> Result<TrajectoryDiagnostics> {
    check_background(f0, model)?;
    let bound = stability_bound(model, &f0.grid);
    if cfg.dt.abs() > bound {
        return Err(NlsError::InvalidParameter(format!(
            "dt = {} exceeds the {:?} stability bound {bound:.3e}",
            cfg.dt, model.family
        )));
    }
    let n_steps = (cfg.t_end / cfg.dt.abs()).round().max(1.0) as usize;
    let mut stepper = Stepper::new(model, &f0.grid, cfg);
    let mut values = state_values(f0);

    let mut times = Vec::new();
    let mut reports = Vec::new();
    let mut virial = Vec::new();
    let mut blowup_time = None;
    let kinetic0 = grad_norm_sqr(f0)?.max(1.0);
    let mut last_good = f0.clone();

    let sample = |values: &[Complex64],
                      t: f64,
                      times: &mut Vec<f64>,
                      reports: &mut Vec<InvariantReport>,
                      virial: &mut Vec<f64>,
                      last_good: &mut Field1D|
     -> Result<bool> {
        let f = match field_from_state(values, &f0.grid, f0.background, t) {
            Ok(f) => f,
            Err(_) => return Ok(false), // lost finiteness
        };
        let kin = grad_norm_sqr(&f)?;
        if !kin.is_finite() || kin > cfg.blowup_kinetic_factor * kinetic0 {
            return Ok(false);
        }
        reports.push(invariants(&f, model)?);
        virial.push(model_virial(&f, model));
        times.push(t);
        *last_good = f;
        Ok(true)
    };

    sample(&values, f0.time, &mut times, &mut reports, &mut virial, &mut last_good)?;

    for i in 1..=n_steps {
        stepper.advance(&mut values, cfg.scheme);
        let t = f0.time + i as f64 * cfg.dt;
        // cheap per-step finiteness sentinel
        let probe: Complex64 = values.iter().take(8).sum();
        let lost = !probe.re.is_finite() || !probe.im.is_finite();
        if lost {
            blowup_time = Some(t);
            break;
        }
        if i % cfg.sample_stride == 0 || i == n_steps {
            if !sample(&values, t, &mut times, &mut reports, &mut virial, &mut last_good)? {
                blowup_time = Some(t);
                break;
            }
        }
    }

    Ok(TrajectoryDiagnostics {
        monotone_fraction: monotone_fraction(&virial),
        times,
        reports,
        virial,
        blowup_time,
        clamp_activations: stepper.clamps,
        final_field: Some(last_good),
    })
}

/// First spatial moment of the density, `int x |u|^2` (the DNLS virial).
pub fn first_moment(f: &Field1D) -> Result<f64> {
    crate::virial::dnls_v_tilde(f)
}
