//! Ground-state profiles of `-lap Q + omega_eff Q - Q^{p+1} = 0`:
//! closed form in 1-D, damped normalized gradient flow otherwise
//! (n = 2 on a radial grid), plus the mass-threshold sidecar cache.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NlsError, Result};
use crate::grid::{fft_forward, fft_inverse, BackgroundKind, Field1D, Grid1D};

/// Raw radial samples for an n = 2 solve (cell-centered, Neumann at r = 0).
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub q: Vec<f64>,
    pub dr: f64,
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// Even extension of the profile on the supplied symmetric grid
    /// (interpolated from the radial grid when n = 2).
    pub profile: Field1D,
    pub p: f64,
    pub n: u32,
    pub omega_eff: f64,
    /// sup norm of the elliptic residual on the solve grid
    pub residual: f64,
    /// n-dimensional L2 norm of the profile
    pub l2_norm: f64,
    pub radial: Option<RadialProfile>,
}

/// `Q_omega(x) = omega^{1/p} ((p+2)/2)^{1/p} sech^{2/p}((p/2) sqrt(omega) x)`.
pub fn ground_state_1d_exact(p: f64, omega: f64, grid: &Grid1D) -> Result<GroundStateResult> {
    if !(p > 0.0) || !(omega > 0.0) {
        return Err(NlsError::InvalidParameter(format!(
            "ground state needs p > 0 and omega > 0, got p = {p}, omega = {omega}"
        )));
    }
    let profile = Field1D::from_fn(*grid, BackgroundKind::Zero, 0.0, |x| {
        Complex64::new(crate::catalog::ground_state_profile(p, omega, x), 0.0)
    })?;
    let residual = elliptic_residual_1d(&profile, p, omega)?;
    let l2_norm = crate::functionals::mass(&profile)?.sqrt();
    Ok(GroundStateResult {
        profile,
        p,
        n: 1,
        omega_eff: omega,
        residual,
        l2_norm,
        radial: None,
    })
}

fn elliptic_residual_1d(q: &Field1D, p: f64, omega: f64) -> Result<f64> {
    let qxx = crate::grid::spectral_derivative(q, 2)?;
    Ok(q
        .values()
        .iter()
        .zip(qxx.values())
        .map(|(q, qxx)| {
            let q = q.re;
            (-qxx.re + omega * q - q.abs().powf(p) * q).abs()
        })
        .fold(0.0, f64::max))
}

const FLOW_DTAU: f64 = 1e-2;
const MAX_ITER: usize = 200_000;

/// Damped normalized gradient flow: semi-implicit backward-Euler on the
/// linear part (unconditionally stable at the fixed pseudo-time step 1e-2),
/// followed by the amplitude renormalization
/// `lambda = [(||grad u||^2 + omega ||u||^2) / ||u||_{p+2}^{p+2}]^{1/p}`,
/// which pins the unstable scaling mode (lambda = 1 exactly at the ground
/// state, by the elliptic equation tested against Q).
pub fn ground_state_imag_time(
    p: f64,
    n: u32,
    omega_eff: f64,
    grid: &Grid1D,
    tol: f64,
) -> Result<GroundStateResult> {
    if !(p > 0.0) || !(omega_eff > 0.0) || !(tol > 0.0) {
        return Err(NlsError::InvalidParameter(format!(
            "need p > 0, omega_eff > 0, tol > 0; got p = {p}, omega_eff = {omega_eff}, tol = {tol}"
        )));
    }
    match n {
        1 => solve_1d(p, omega_eff, grid, tol),
        2 => solve_radial_2d(p, omega_eff, grid, tol),
        _ => Err(NlsError::InvalidParameter(format!("iterative solver supports n = 1 or 2, got {n}"))),
    }
}

fn solve_1d(p: f64, omega: f64, grid: &Grid1D, tol: f64) -> Result<GroundStateResult> {
    let n = grid.len();
    let dx = grid.dx();
    let ks = grid.wavenumbers();
    // (1 + dtau (k^2 + omega))^{-1}
    let inv: Vec<f64> = ks.iter().map(|k| 1.0 / (1.0 + FLOW_DTAU * (k * k + omega))).collect();
    let mut u: Vec<f64> = grid.xs().iter().map(|x| (-x * x / 2.0).exp()).collect();
    let mut residual = f64::INFINITY;
    for iter in 0..MAX_ITER {
        // u <- (I - dtau(lap - omega))^{-1} (u + dtau u^{p+1})
        let mut spec: Vec<Complex64> = u
            .iter()
            .map(|&v| Complex64::new(v + FLOW_DTAU * v.abs().powf(p) * v, 0.0))
            .collect();
        fft_forward(&mut spec);
        for (s, w) in spec.iter_mut().zip(&inv) {
            *s *= w;
        }
        fft_inverse(&mut spec);
        for (v, s) in u.iter_mut().zip(&spec) {
            *v = s.re;
        }
        // amplitude renormalization
        let mut dspec: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut dspec);
        let kin: f64 =
            dspec.iter().zip(&ks).map(|(s, k)| k * k * s.norm_sqr()).sum::<f64>() * dx / n as f64;
        let m: f64 = u.iter().map(|v| v * v).sum::<f64>() * dx;
        let pot: f64 = u.iter().map(|v| v.abs().powf(p + 2.0)).sum::<f64>() * dx;
        if pot <= 0.0 {
            return Err(NlsError::NoConvergence(f64::INFINITY, iter));
        }
        let lambda = ((kin + omega * m) / pot).powf(1.0 / p);
        for v in u.iter_mut() {
            *v *= lambda;
        }
        if iter % 50 == 49 {
            let f = Field1D::new(
                *grid,
                u.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
                BackgroundKind::Zero,
                0.0,
            )?;
            residual = elliptic_residual_1d(&f, p, omega)?;
            if residual < tol {
                let l2_norm = crate::functionals::mass(&f)?.sqrt();
                return Ok(GroundStateResult {
                    profile: f,
                    p,
                    n: 1,
                    omega_eff: omega,
                    residual,
                    l2_norm,
                    radial: None,
                });
            }
        }
    }
    Err(NlsError::NoConvergence(residual, MAX_ITER))
}

/// Conservative radial Laplacian `(1/r)(r u')'` on cell centers
/// `r_j = (j + 1/2) dr`; `r_{-1/2} = 0` enforces Neumann regularity at the
/// origin and the outer boundary is Dirichlet.
fn solve_radial_2d(p: f64, omega: f64, grid: &Grid1D, tol: f64) -> Result<GroundStateResult> {
    let m = grid.len();
    let dr = grid.half_width() / m as f64;
    let r: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) * dr).collect();
    let mut u: Vec<f64> = r.iter().map(|r| (-r * r / 2.0).exp()).collect();

    // tridiagonal operator for (1 + dtau omega) I - dtau lap_r
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    for j in 0..m {
        let r_minus = if j == 0 { 0.0 } else { r[j] - dr / 2.0 };
        let r_plus = r[j] + dr / 2.0;
        let c = FLOW_DTAU / (r[j] * dr * dr);
        if j > 0 {
            lower[j] = -c * r_minus;
        }
        // outer Dirichlet: the r_plus flux couples to u = 0 beyond the grid
        if j < m - 1 {
            upper[j] = -c * r_plus;
        }
        diag[j] = 1.0 + FLOW_DTAU * omega + c * (r_minus + r_plus);
    }

    let lap = |u: &[f64], j: usize| -> f64 {
        let r_minus = if j == 0 { 0.0 } else { r[j] - dr / 2.0 };
        let r_plus = r[j] + dr / 2.0;
        let u_prev = if j == 0 { u[0] } else { u[j - 1] };
        let u_next = if j == m - 1 { 0.0 } else { u[j + 1] };
        (r_plus * (u_next - u[j]) - r_minus * (u[j] - u_prev)) / (r[j] * dr * dr)
    };

    let mut residual = f64::INFINITY;
    for iter in 0..MAX_ITER {
        let rhs: Vec<f64> = u.iter().map(|&v| v + FLOW_DTAU * v.abs().powf(p) * v).collect();
        u = thomas(&lower, &diag, &upper, &rhs);
        // amplitude renormalization with the 2-D radial measure 2 pi r dr
        let mut kin = 0.0;
        let mut mass = 0.0;
        let mut pot = 0.0;
        for j in 0..m {
            let du = if j == m - 1 { (0.0 - u[j]) / dr } else { (u[j + 1] - u[j]) / dr };
            let r_mid = r[j] + dr / 2.0;
            kin += du * du * r_mid;
            mass += u[j] * u[j] * r[j];
            pot += u[j].abs().powf(p + 2.0) * r[j];
        }
        let tau = std::f64::consts::TAU * dr;
        let (kin, mass, pot) = (kin * tau, mass * tau, pot * tau);
        if pot <= 0.0 {
            return Err(NlsError::NoConvergence(f64::INFINITY, iter));
        }
        let lambda = ((kin + omega * mass) / pot).powf(1.0 / p);
        for v in u.iter_mut() {
            *v *= lambda;
        }
        if iter % 50 == 49 {
            residual = (0..m)
                .map(|j| (-lap(&u, j) + omega * u[j] - u[j].abs().powf(p) * u[j]).abs())
                .fold(0.0, f64::max);
            if residual < tol {
                break;
            }
        }
    }
    if residual >= tol {
        return Err(NlsError::NoConvergence(residual, MAX_ITER));
    }

    let l2_sqr: f64 = std::f64::consts::TAU * dr * (0..m).map(|j| u[j] * u[j] * r[j]).sum::<f64>();
    let interp = |x: f64| -> f64 {
        let a = x.abs();
        // cell-centered linear interpolation, constant inside the first cell
        if a <= r[0] {
            return u[0];
        }
        let pos = (a / dr - 0.5).floor() as usize;
        if pos + 1 >= m {
            return 0.0;
        }
        let w = (a - r[pos]) / dr;
        u[pos] * (1.0 - w) + u[pos + 1] * w
    };
    let profile = Field1D::from_fn(*grid, BackgroundKind::Zero, 0.0, |x| Complex64::new(interp(x), 0.0))?;
    Ok(GroundStateResult {
        profile,
        p,
        n: 2,
        omega_eff: omega,
        residual,
        l2_norm: l2_sqr.sqrt(),
        radial: Some(RadialProfile { r, q: u, dr }),
    })
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for j in 1..n {
        let denom = diag[j] - lower[j] * c[j - 1];
        c[j] = upper[j] / denom;
        d[j] = (rhs[j] - lower[j] * d[j - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for j in (0..n - 1).rev() {
        x[j] = d[j] - c[j] * x[j + 1];
    }
    x
}

/// One cached mass threshold, keyed by the full solve configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ThresholdEntry {
    pub p: f64,
    pub n: u32,
    pub omega_eff: f64,
    pub grid_points: usize,
    pub grid_half_width: f64,
    pub l2_norm: f64,
}

/// JSON sidecar of ground-state mass thresholds.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ThresholdCache {
    pub entries: Vec<ThresholdEntry>,
}

impl ThresholdCache {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        if !path.exists() {
            return Ok(ThresholdCache::default());
        }
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| NlsError::InconsistentFacts(format!("bad threshold cache: {e}")))
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| NlsError::InconsistentFacts(format!("threshold serialize: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn insert(&mut self, entry: ThresholdEntry) {
        self.entries.retain(|e| {
            !(e.p == entry.p
                && e.n == entry.n
                && e.omega_eff == entry.omega_eff
                && e.grid_points == entry.grid_points
                && e.grid_half_width == entry.grid_half_width)
        });
        self.entries.push(entry);
    }

    pub fn lookup(&self, p: f64, n: u32, omega_eff: f64) -> Option<&ThresholdEntry> {
        self.entries
            .iter()
            .find(|e| e.p == p && e.n == n && e.omega_eff == omega_eff)
    }
}

impl GroundStateResult {
    pub fn threshold_entry(&self) -> ThresholdEntry {
        ThresholdEntry {
            p: self.p,
            n: self.n,
            omega_eff: self.omega_eff,
            grid_points: self.profile.grid.len(),
            grid_half_width: self.profile.grid.half_width(),
            l2_norm: self.l2_norm,
        }
    }

    /// CSV export `x,q` of the profile.
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("x,q\n");
        for j in 0..self.profile.grid.len() {
            out.push_str(&format!("{:.17e},{:.17e}\n", self.profile.grid.x(j), self.profile.values()[j].re));
        }
        out
    }
}
