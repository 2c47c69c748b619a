//! Scenario runner: parse a flat key-value scenario file, execute the
//! requested checks in order, and emit deterministic machine-readable
//! reports (report.json, series.csv, profile.csv).
//!
//! Scenario format: one `key = value` pair per line, `#` comments, dotted
//! section names (`model.family`, `grid.N`, `check.invariants`, ...).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::catalog::{eval_exact, ExactSolution};
use crate::classifier::{classify, classify_trajectory, InvariantFacts, RegimeVerdict};
use crate::error::{NlsError, Result};
use crate::functionals::invariants;
use crate::grid::{spectral_derivative, BackgroundKind, Field1D, Grid1D};
use crate::integrator::{conservation_drift, evolve, step, EvolveConfig, TrajectoryDiagnostics};
use crate::model::{Family, ModelSpec};
use crate::virial::{
    dnls_v_tilde, pohozaev_residuals, rhs_for_model, seeded_random_field, IdentityCheck,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Catalog { id: String, scale: f64, t0: f64 },
    Gaussian { amplitude: f64, width: f64, shift: f64, velocity: f64 },
    Sech { amplitude: f64, width: f64, shift: f64, velocity: f64 },
    Random { seed: u64, amplitude: f64 },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Invariants,
    VirialIdentity,
    Appendix,
    Classify,
    GroundState,
    Pohozaev,
}

impl CheckKind {
    fn parse(name: &str) -> Option<CheckKind> {
        Some(match name {
            "invariants" => CheckKind::Invariants,
            "virial-identity" => CheckKind::VirialIdentity,
            "appendix" => CheckKind::Appendix,
            "classify" => CheckKind::Classify,
            "ground-state" => CheckKind::GroundState,
            "pohozaev" => CheckKind::Pohozaev,
            _ => return None,
        })
    }

    fn key(&self) -> &'static str {
        match self {
            CheckKind::Invariants => "invariants",
            CheckKind::VirialIdentity => "virial_identity",
            CheckKind::Appendix => "appendix",
            CheckKind::Classify => "classify",
            CheckKind::GroundState => "ground_state",
            CheckKind::Pohozaev => "pohozaev",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValueAssert {
    pub key: String,
    pub expected: f64,
    pub tol: f64,
}

/// `assert.<key>.max` / `assert.<key>.min` bound on a produced scalar.
#[derive(Debug, Clone)]
pub struct BoundAssert {
    pub key: String,
    pub bound: f64,
    pub is_max: bool,
}

#[derive(Debug, Clone)]
pub struct EvolveSettings {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub expect_blowup: bool,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: Option<ModelSpec>,
    pub source: Source,
    pub grid_l: f64,
    pub grid_n: usize,
    pub evolve: Option<EvolveSettings>,
    pub checks: Vec<CheckKind>,
    pub value_asserts: Vec<ValueAssert>,
    pub bound_asserts: Vec<BoundAssert>,
    pub expect_verdict: Option<String>,
    pub expect_rule: Option<String>,
    pub tau0: Option<f64>,
    pub gs_omega: f64,
    pub gs_tol: f64,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> NlsError {
    NlsError::ScenarioParse { line, col, msg: msg.into() }
}

struct RawModel {
    family: Option<Family>,
    epsilon: f64,
    p: f64,
    n: u32,
    mu: f64,
    lambda1: f64,
    lambda2: f64,
}

/// Parse scenario text. `name` labels the report (usually the file stem).
pub fn parse_scenario(text: &str, name: &str) -> Result<Scenario> {
    let mut sc = Scenario {
        name: name.to_string(),
        model: None,
        source: Source::None,
        grid_l: 20.0,
        grid_n: 1024,
        evolve: None,
        checks: Vec::new(),
        value_asserts: Vec::new(),
        bound_asserts: Vec::new(),
        expect_verdict: None,
        expect_rule: None,
        tau0: None,
        gs_omega: 1.0,
        gs_tol: 1e-10,
    };
    let mut raw = RawModel {
        family: None,
        epsilon: -1.0,
        p: 2.0,
        n: 1,
        mu: 0.0,
        lambda1: 1.0,
        lambda2: 1.0,
    };
    // source scratch, assembled after the pass
    let mut src_kind: Option<String> = None;
    let mut src_catalog: Option<String> = None;
    let mut src = BTreeMap::<&'static str, f64>::new();
    let mut ev_dt: Option<f64> = None;
    let mut ev_tend: Option<f64> = None;
    let mut ev_stride = 100usize;
    let mut ev_blowup = false;
    let mut tols = BTreeMap::<String, f64>::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(h) => &raw_line[..h],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| perr(line_no, 1, "expected 'key = value'"))?;
        let key = line[..eq].trim();
        let key_col = line.find(key.chars().next().unwrap_or(' ')).unwrap_or(0) + 1;
        let value = line[eq + 1..].trim();
        let val_col = eq + 2 + line[eq + 1..].len() - line[eq + 1..].trim_start().len();
        if key.is_empty() {
            return Err(perr(line_no, 1, "empty key"));
        }
        if value.is_empty() {
            return Err(perr(line_no, val_col, "empty value"));
        }
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| perr(line_no, val_col, format!("expected a number, got '{v}'")))
        };
        let boolean = |v: &str| -> Result<bool> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(perr(line_no, val_col, format!("expected true/false, got '{v}'"))),
            }
        };
        match key {
            "scenario.name" => sc.name = value.to_string(),
            "model.family" => {
                raw.family = Some(match value {
                    "power-nls" => Family::PowerNLS,
                    "gross-pitaevskii" => Family::GrossPitaevskii,
                    "cubic-quintic" => Family::CubicQuintic,
                    "biharmonic" => Family::Biharmonic,
                    "derivative-nls" => Family::DerivativeNLS,
                    "log-nls" => Family::LogNLS,
                    _ => return Err(perr(line_no, val_col, format!("unknown family '{value}'"))),
                })
            }
            "model.epsilon" => raw.epsilon = num(value)?,
            "model.p" => raw.p = num(value)?,
            "model.n" => raw.n = num(value)? as u32,
            "model.mu" => raw.mu = num(value)?,
            "model.lambda1" => raw.lambda1 = num(value)?,
            "model.lambda2" => raw.lambda2 = num(value)?,
            "source.catalog" => src_catalog = Some(value.to_string()),
            "source.kind" => src_kind = Some(value.to_string()),
            "source.amplitude" => {
                src.insert("amplitude", num(value)?);
            }
            "source.width" => {
                src.insert("width", num(value)?);
            }
            "source.shift" => {
                src.insert("shift", num(value)?);
            }
            "source.velocity" => {
                src.insert("velocity", num(value)?);
            }
            "source.scale" => {
                src.insert("scale", num(value)?);
            }
            "source.t" => {
                src.insert("t", num(value)?);
            }
            "source.seed" => {
                src.insert("seed", num(value)?);
            }
            "grid.L" => sc.grid_l = num(value)?,
            "grid.N" => sc.grid_n = num(value)? as usize,
            "evolve.dt" => ev_dt = Some(num(value)?),
            "evolve.t_end" => ev_tend = Some(num(value)?),
            "evolve.stride" => ev_stride = num(value)? as usize,
            "evolve.expect_blowup" => ev_blowup = boolean(value)?,
            "expect.verdict" => sc.expect_verdict = Some(value.to_string()),
            "expect.rule" => sc.expect_rule = Some(value.to_string()),
            "classify.tau0" => sc.tau0 = Some(num(value)?),
            "ground_state.omega" => sc.gs_omega = num(value)?,
            "ground_state.tol" => sc.gs_tol = num(value)?,
            _ => {
                if let Some(name) = key.strip_prefix("check.") {
                    let kind = CheckKind::parse(name)
                        .ok_or_else(|| perr(line_no, key_col, format!("unknown check '{name}'")))?;
                    if boolean(value)? {
                        sc.checks.push(kind);
                    }
                } else if let Some(rest) = key.strip_prefix("assert.") {
                    if let Some(base) = rest.strip_suffix(".tol") {
                        tols.insert(base.to_string(), num(value)?);
                    } else if let Some(base) = rest.strip_suffix(".max") {
                        sc.bound_asserts.push(BoundAssert {
                            key: base.to_string(),
                            bound: num(value)?,
                            is_max: true,
                        });
                    } else if let Some(base) = rest.strip_suffix(".min") {
                        sc.bound_asserts.push(BoundAssert {
                            key: base.to_string(),
                            bound: num(value)?,
                            is_max: false,
                        });
                    } else {
                        sc.value_asserts.push(ValueAssert {
                            key: rest.to_string(),
                            expected: num(value)?,
                            tol: 1e-8,
                        });
                    }
                } else {
                    return Err(perr(line_no, key_col, format!("unknown key '{key}'")));
                }
            }
        }
    }

    for a in &mut sc.value_asserts {
        if let Some(t) = tols.get(&a.key) {
            a.tol = *t;
        }
    }

    sc.source = if let Some(id) = src_catalog {
        Source::Catalog {
            id,
            scale: src.get("scale").copied().unwrap_or(1.0),
            t0: src.get("t").copied().unwrap_or(0.0),
        }
    } else {
        match src_kind.as_deref() {
            Some("gaussian") => Source::Gaussian {
                amplitude: src.get("amplitude").copied().unwrap_or(1.0),
                width: src.get("width").copied().unwrap_or(1.0),
                shift: src.get("shift").copied().unwrap_or(0.0),
                velocity: src.get("velocity").copied().unwrap_or(0.0),
            },
            Some("sech") => Source::Sech {
                amplitude: src.get("amplitude").copied().unwrap_or(1.0),
                width: src.get("width").copied().unwrap_or(1.0),
                shift: src.get("shift").copied().unwrap_or(0.0),
                velocity: src.get("velocity").copied().unwrap_or(0.0),
            },
            Some("random") => Source::Random {
                seed: src.get("seed").copied().unwrap_or(0.0) as u64,
                amplitude: src.get("amplitude").copied().unwrap_or(1.0),
            },
            Some(other) => {
                return Err(perr(0, 0, format!("unknown source kind '{other}'")));
            }
            None => Source::None,
        }
    };

    if let Some(family) = raw.family {
        let spec = ModelSpec {
            family,
            epsilon: raw.epsilon,
            p: raw.p,
            n: raw.n,
            mu: raw.mu,
            lambda1: raw.lambda1,
            lambda2: raw.lambda2,
        }
        .validated()?;
        sc.model = Some(spec);
    }

    match (ev_dt, ev_tend) {
        (Some(dt), Some(t_end)) => {
            sc.evolve = Some(EvolveSettings { dt, t_end, stride: ev_stride, expect_blowup: ev_blowup })
        }
        (None, None) => {}
        _ => {
            return Err(perr(0, 0, "evolve needs both evolve.dt and evolve.t_end"));
        }
    }
    Ok(sc)
}

/// Evaluate a catalog solution with the scaling symmetry
/// `u_lambda(t, x) = lambda u(lambda^2 t, lambda x)` applied.
pub fn eval_catalog_scaled(sol: &ExactSolution, t: f64, grid: &Grid1D, lambda: f64) -> Result<Field1D> {
    if lambda == 1.0 {
        return eval_exact(sol, t, grid);
    }
    if sol.background() != BackgroundKind::Zero {
        return Err(NlsError::InvalidParameter(
            "scaling is only supported on zero-background solutions".into(),
        ));
    }
    let scaled_grid = Grid1D::new(grid.half_width() * lambda, grid.len())?;
    let inner = eval_exact(sol, lambda * lambda * t, &scaled_grid)?;
    let values: Vec<Complex64> = inner.values().iter().map(|v| lambda * v).collect();
    Field1D::new(*grid, values, BackgroundKind::Zero, t)
}

fn build_field(sc: &Scenario, model: &ModelSpec, grid: &Grid1D) -> Result<Option<Field1D>> {
    let background = match model.family {
        Family::GrossPitaevskii => BackgroundKind::Stokes,
        _ => BackgroundKind::Zero,
    };
    let envelope = |amplitude: f64, width: f64, shift: f64, velocity: f64, shape: fn(f64) -> f64| {
        Field1D::from_fn(*grid, background, 0.0, |x| {
            let xi = (x - shift) / width;
            let phase = Complex64::new(0.0, velocity / 2.0 * x).exp();
            let bump = amplitude * shape(xi) * phase;
            match background {
                BackgroundKind::Zero => bump,
                BackgroundKind::Stokes => bump + 1.0,
            }
        })
    };
    Ok(Some(match &sc.source {
        Source::Catalog { id, scale, t0 } => {
            let sol = ExactSolution::parse(id)?;
            eval_catalog_scaled(&sol, *t0, grid, *scale)?
        }
        Source::Gaussian { amplitude, width, shift, velocity } => {
            envelope(*amplitude, *width, *shift, *velocity, |x| (-x * x / 2.0).exp())?
        }
        Source::Sech { amplitude, width, shift, velocity } => {
            envelope(*amplitude, *width, *shift, *velocity, |x| 1.0 / x.cosh())?
        }
        Source::Random { seed, amplitude } => seeded_random_field(grid, background, *seed, *amplitude),
        Source::None => return Ok(None),
    }))
}

fn resolve_model(sc: &Scenario) -> Result<ModelSpec> {
    if let Some(m) = sc.model {
        return Ok(m);
    }
    if let Source::Catalog { id, .. } = &sc.source {
        return Ok(ExactSolution::parse(id)?.model());
    }
    Err(NlsError::InvalidParameter(
        "scenario needs model.family or a catalog source".into(),
    ))
}

/// Family-appropriate virial functional of a snapshot.
pub fn family_virial(f: &Field1D, model: &ModelSpec) -> Result<f64> {
    match model.family {
        // exact snapshots carry the global Stokes phase; the v-frame
        // functional needs it removed
        Family::GrossPitaevskii => crate::functionals::virial_p_nz(&f.stokes_phase_removed()),
        Family::DerivativeNLS => dnls_v_tilde(f),
        _ => crate::functionals::virial_p_tilde(f),
    }
}

/// Build classifier inputs from a measured invariant report.
pub fn facts_from_invariants(
    report: &crate::functionals::InvariantReport,
    model: &ModelSpec,
    p_tilde0: Option<f64>,
    tau0: Option<f64>,
) -> InvariantFacts {
    let nz = model.family == Family::GrossPitaevskii;
    let mut facts = InvariantFacts::new(*model);
    facts.mass = if nz { report.mass_nz } else { report.mass };
    facts.momentum = if nz { report.momentum_nz } else { report.momentum };
    facts.energy = if nz {
        // fold the mass term in: E_nz = E_hamiltonian + epsilon * M_nz
        match (report.energy_nz, facts.mass) {
            (Some(e), Some(m)) => Some(e + model.epsilon * m),
            _ => None,
        }
    } else {
        report.energy
    };
    facts.h = report.dnls_h;
    facts.p_tilde0 = p_tilde0;
    facts.l2_norm = facts.mass.map(|m| m.max(0.0).sqrt());
    if let Some(t) = tau0 {
        facts.tau0 = t;
    }
    facts
}

/// Everything a scenario run produces; the caller decides where it lands
/// on disk.
#[derive(Debug)]
pub struct RunArtifacts {
    pub name: String,
    pub report: Value,
    pub series_csv: Option<String>,
    pub profile_csv: Option<String>,
    /// failed assertions / unexpected blow-up, empty iff the run passes
    pub failures: Vec<String>,
}

pub fn run_scenario(sc: &Scenario) -> Result<RunArtifacts> {
    let grid = Grid1D::new(sc.grid_l, sc.grid_n)?;
    let model = resolve_model(sc)?;
    let f0 = build_field(sc, &model, &grid)?;
    if f0.is_none() && sc.checks.iter().any(|c| !matches!(c, CheckKind::GroundState | CheckKind::Pohozaev)) {
        return Err(NlsError::InvalidParameter(
            "field checks requested but the scenario has no source".into(),
        ));
    }

    let mut failures = Vec::new();
    let mut scalars = BTreeMap::<String, f64>::new();
    let mut checks_json = serde_json::Map::new();
    let mut series_csv = None;
    let mut profile_field = f0.clone();
    let mut traj: Option<TrajectoryDiagnostics> = None;
    let mut inv0 = None;

    if let (Some(f), Some(ev)) = (&f0, &sc.evolve) {
        let cfg = EvolveConfig::new(ev.dt, ev.t_end)?.with_stride(ev.stride);
        let t = evolve(f, &model, &cfg)?;
        scalars.insert("monotone_fraction".into(), t.monotone_fraction);
        let mut ev_json = serde_json::Map::new();
        ev_json.insert("samples".into(), json!(t.len()));
        ev_json.insert("monotone_fraction".into(), json!(t.monotone_fraction));
        ev_json.insert("clamp_activations".into(), json!(t.clamp_activations));
        if let Some(bt) = t.blowup_time {
            ev_json.insert("blowup_time".into(), json!(bt));
            scalars.insert("blowup_time".into(), bt);
        }
        match (t.blowup_time, ev.expect_blowup) {
            (Some(bt), false) => failures.push(format!("unexpected blow-up at t = {bt:.6e}")),
            (None, true) => failures.push("expected blow-up did not occur".into()),
            _ => {}
        }
        let mut drifts = serde_json::Map::new();
        if let Some(first) = t.reports.first() {
            for key in first.populated_keys() {
                if let Ok(d) = conservation_drift(&t, key) {
                    drifts.insert(key.to_string(), json!(d));
                    scalars.insert(format!("drift.{key}"), d);
                }
            }
        }
        ev_json.insert("drifts".into(), Value::Object(drifts));
        checks_json.insert("evolution".into(), Value::Object(ev_json));
        series_csv = Some(render_series_csv(&t));
        if let Some(ff) = &t.final_field {
            profile_field = Some(ff.clone());
        }
        traj = Some(t);
    }

    for check in &sc.checks {
        let entry: Value = match check {
            CheckKind::Invariants => {
                let f = f0.as_ref().unwrap();
                let report = invariants(f, &model)?;
                for key in report.populated_keys() {
                    if let Some(v) = report.get(key)? {
                        scalars.insert(key.to_string(), v);
                    }
                }
                inv0 = Some(report.clone());
                serde_json::to_value(&report).unwrap()
            }
            CheckKind::VirialIdentity => {
                let f = f0.as_ref().unwrap();
                let check = virial_identity_check(f, &model, &sc.source)?;
                scalars.insert("virial_residual".into(), check.rel_residual);
                serde_json::to_value(&check).unwrap()
            }
            CheckKind::Appendix => {
                let f = f0.as_ref().unwrap();
                let (i, ii, iii) = appendix_check(f, &model, &sc.source)?;
                let closure = (i + ii + iii).abs() / i.abs().max(ii.abs()).max(iii.abs()).max(1.0);
                scalars.insert("appendix_residual".into(), closure);
                json!({ "i": i, "ii": ii, "iii": iii, "closure": closure })
            }
            CheckKind::Classify => {
                let verdict: RegimeVerdict = if let Some(t) = &traj {
                    classify_trajectory(t, &model)?
                } else {
                    let f = f0.as_ref().unwrap();
                    let report = match &inv0 {
                        Some(r) => r.clone(),
                        None => invariants(f, &model)?,
                    };
                    let p_tilde0 = family_virial(f, &model).ok();
                    classify(&facts_from_invariants(&report, &model, p_tilde0, sc.tau0))?
                };
                let status = format!("{:?}", verdict.status);
                if let Some(expect) = &sc.expect_verdict {
                    if &status != expect {
                        failures.push(format!("verdict {status}, expected {expect}"));
                    }
                }
                if let Some(expect) = &sc.expect_rule {
                    if &verdict.rule != expect {
                        failures.push(format!("rule {}, expected {expect}", verdict.rule));
                    }
                }
                serde_json::to_value(&verdict).unwrap()
            }
            CheckKind::GroundState => {
                let gs = crate::ground_state::ground_state_imag_time(
                    model.p, model.n, sc.gs_omega, &grid, sc.gs_tol,
                )?;
                scalars.insert("gs_residual".into(), gs.residual);
                scalars.insert("gs_l2_norm".into(), gs.l2_norm);
                let entry = json!({
                    "p": gs.p, "n": gs.n, "omega_eff": gs.omega_eff,
                    "residual": gs.residual, "l2_norm": gs.l2_norm,
                });
                if profile_field.is_none() {
                    profile_field = Some(gs.profile);
                }
                entry
            }
            CheckKind::Pohozaev => {
                let gs = crate::ground_state::ground_state_1d_exact(model.p, sc.gs_omega, &grid)?;
                let (r1, r2) = pohozaev_residuals(&gs.profile, model.p, sc.gs_omega)?;
                scalars.insert("pohozaev_r1".into(), r1);
                scalars.insert("pohozaev_r2".into(), r2);
                json!({ "r1": r1, "r2": r2 })
            }
        };
        checks_json.insert(check.key().into(), entry);
    }

    let mut assertions = Vec::new();
    for a in &sc.value_asserts {
        match scalars.get(&a.key) {
            Some(&actual) => {
                let pass = (actual - a.expected).abs() <= a.tol;
                if !pass {
                    failures.push(format!(
                        "assert {}: got {actual:.9e}, expected {:.9e} +- {:.1e}",
                        a.key, a.expected, a.tol
                    ));
                }
                assertions.push(json!({
                    "key": a.key, "expected": a.expected, "actual": actual,
                    "tol": a.tol, "pass": pass,
                }));
            }
            None => failures.push(format!("assert {}: no such scalar was produced", a.key)),
        }
    }
    for a in &sc.bound_asserts {
        match scalars.get(&a.key) {
            Some(&actual) => {
                let pass = if a.is_max { actual <= a.bound } else { actual >= a.bound };
                if !pass {
                    let rel = if a.is_max { "<=" } else { ">=" };
                    failures.push(format!("assert {}: got {actual:.9e}, wanted {rel} {:.9e}", a.key, a.bound));
                }
                assertions.push(json!({
                    "key": a.key, "bound": a.bound, "actual": actual,
                    "max": a.is_max, "pass": pass,
                }));
            }
            None => failures.push(format!("assert {}: no such scalar was produced", a.key)),
        }
    }

    let report = json!({
        "format_version": 1,
        "scenario": sc.name,
        "model": serde_json::to_value(model).unwrap(),
        "grid": { "L": sc.grid_l, "N": sc.grid_n },
        "checks": Value::Object(checks_json),
        "scalars": scalars,
        "assertions": assertions,
        "pass": failures.is_empty(),
        "failures": failures,
    });

    Ok(RunArtifacts {
        name: sc.name.clone(),
        report,
        series_csv,
        profile_csv: profile_field.as_ref().map(render_profile_csv),
        failures,
    })
}

/// FD time derivative of the family virial against the closed-form rate.
/// Catalog sources use exact neighbour snapshots; everything else takes
/// one integrator step forward and backward.
pub fn virial_identity_check(f: &Field1D, model: &ModelSpec, source: &Source) -> Result<IdentityCheck> {
    let dt = 1e-5;
    let (fm, fp, sol_id) = neighbour_states(f, model, source, dt)?;
    let lhs = (family_virial(&fp, model)? - family_virial(&fm, model)?) / (2.0 * dt);
    let fc = v_frame(f, model);
    let rhs = rhs_for_model(&fc, model)?;
    Ok(IdentityCheck::new(lhs, rhs, dt, sol_id, f.time))
}

fn v_frame(f: &Field1D, model: &ModelSpec) -> Field1D {
    if model.family == Family::GrossPitaevskii {
        f.stokes_phase_removed()
    } else {
        f.clone()
    }
}

fn appendix_check(f: &Field1D, model: &ModelSpec, source: &Source) -> Result<(f64, f64, f64)> {
    let dt = 1e-5;
    let (fm, fp, _) = neighbour_states(f, model, source, dt)?;
    crate::virial::appendix_terms(&v_frame(&fm, model), &v_frame(f, model), &v_frame(&fp, model), model, dt)
}

fn neighbour_states(
    f: &Field1D,
    model: &ModelSpec,
    source: &Source,
    dt: f64,
) -> Result<(Field1D, Field1D, Option<String>)> {
    if let Source::Catalog { id, scale, .. } = source {
        let sol = ExactSolution::parse(id)?;
        let fm = eval_catalog_scaled(&sol, f.time - dt, &f.grid, *scale)?;
        let fp = eval_catalog_scaled(&sol, f.time + dt, &f.grid, *scale)?;
        return Ok((fm, fp, Some(id.clone())));
    }
    let cfg = EvolveConfig::new(dt, dt)?;
    let fp = step(f, model, dt, &cfg)?;
    let fm = step(f, model, -dt, &cfg)?;
    Ok((fm, fp, None))
}

/// Pointwise sup norm of the PDE residual of a catalog solution at time
/// `t`, with the time derivative by 4th-order centered differences
/// (h = 1e-4; the fast phase factors make 2nd-order too coarse).
pub fn pde_residual(sol: &ExactSolution, t: f64, grid: &Grid1D) -> Result<f64> {
    let h = 1e-4;
    let model = sol.model();
    // the GP equation holds in the v-frame: strip the global Stokes phase
    let at = |tt: f64| -> Result<Field1D> { Ok(v_frame(&eval_exact(sol, tt, grid)?, &model)) };
    let u = at(t)?;
    let um2 = at(t - 2.0 * h)?;
    let um = at(t - h)?;
    let up = at(t + h)?;
    let up2 = at(t + 2.0 * h)?;
    let uxx = spectral_derivative(&u, 2)?;
    let i = Complex64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for j in 0..grid.len() {
        let v = u.values()[j];
        let ut = (-up2.values()[j] + 8.0 * up.values()[j] - 8.0 * um.values()[j]
            + um2.values()[j])
            / (12.0 * h);
        let s = v.norm_sqr();
        let nonlinear = match model.family {
            Family::PowerNLS => model.epsilon * s.powf(model.p / 2.0) * v,
            Family::GrossPitaevskii => model.epsilon * (s.powf(model.p / 2.0) - 1.0) * v,
            Family::LogNLS => {
                if s < 1e-300 {
                    Complex64::new(0.0, 0.0)
                } else {
                    model.epsilon * s.ln() * v
                }
            }
            _ => {
                return Err(NlsError::FamilyMismatch(format!(
                    "pde_residual supports catalog families only, got {:?}",
                    model.family
                )))
            }
        };
        let r = i * ut + uxx.values()[j] - nonlinear;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// Fundamental period of a uniformly sampled periodic series, found as the
/// first self-similarity minimum of the shifted-difference distance and
/// refined by parabolic interpolation.
pub fn detect_period(times: &[f64], series: &[f64]) -> Result<f64> {
    let n = times.len().min(series.len());
    if n < 16 {
        return Err(NlsError::InvalidParameter("period detection needs >= 16 samples".into()));
    }
    let dt = times[1] - times[0];
    for w in times[..n].windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1e-12) {
            return Err(NlsError::InvalidParameter("period detection needs uniform sampling".into()));
        }
    }
    let window = n / 2;
    let dist = |k: usize| -> f64 {
        let mut acc = 0.0;
        for j in 0..window {
            let d = series[j] - series[j + k];
            acc += d * d;
        }
        acc / window as f64
    };
    let ks: Vec<f64> = (2..window).map(dist).collect();
    let max_d = ks.iter().cloned().fold(0.0, f64::max);
    if max_d <= 0.0 {
        return Err(NlsError::InvalidParameter("series is constant; no period".into()));
    }
    // first local minimum well below the typical distance = fundamental
    let thresh = 0.05 * max_d;
    let mut k_star = None;
    for i in 1..ks.len() - 1 {
        if ks[i] < thresh && ks[i] <= ks[i - 1] && ks[i] <= ks[i + 1] {
            k_star = Some(i);
            break;
        }
    }
    let i = k_star.ok_or_else(|| {
        NlsError::InvalidParameter("no period found within the sampled span".into())
    })?;
    let (dm, d0, dp) = (ks[i - 1], ks[i], ks[i + 1]);
    let denom = dm - 2.0 * d0 + dp;
    let frac = if denom.abs() > 0.0 { 0.5 * (dm - dp) / denom } else { 0.0 };
    Ok(((i + 2) as f64 + frac) * dt)
}

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Deterministic JSON with every float at 17 significant digits. Keys are
/// already sorted (serde_json maps are BTree-backed).
pub fn render_json_17(v: &Value) -> String {
    let mut out = String::new();
    render_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    out.push_str(&fmt17(f));
                } else {
                    out.push_str(&n.to_string());
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => {
            out.push('"');
            out.push_str(&escape_json(s));
            out.push('"');
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                out.push_str("  ");
                render_value(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str("  \"");
                out.push_str(&escape_json(k));
                out.push_str("\": ");
                render_value(item, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
    }
}

/// `t,<invariant keys>,virial` rows at 17 significant digits.
pub fn render_series_csv(traj: &TrajectoryDiagnostics) -> String {
    let keys = traj
        .reports
        .first()
        .map(|r| r.populated_keys())
        .unwrap_or_default();
    let mut out = String::from("t");
    for k in &keys {
        out.push(',');
        out.push_str(k);
    }
    out.push_str(",virial\n");
    for i in 0..traj.len() {
        out.push_str(&fmt17(traj.times[i]));
        for k in &keys {
            out.push(',');
            let v = traj.reports[i].get(k).ok().flatten().unwrap_or(f64::NAN);
            out.push_str(&fmt17(v));
        }
        out.push(',');
        out.push_str(&fmt17(traj.virial[i]));
        out.push('\n');
    }
    out
}

/// `x,re,im` snapshot rows at 17 significant digits.
pub fn render_profile_csv(f: &Field1D) -> String {
    let mut out = String::from("x,re,im\n");
    for j in 0..f.grid.len() {
        out.push_str(&fmt17(f.grid.x(j)));
        out.push(',');
        out.push_str(&fmt17(f.values()[j].re));
        out.push(',');
        out.push_str(&fmt17(f.values()[j].im));
        out.push('\n');
    }
    out
}

/// Exit code the CLI should report for an error: parse/configuration
/// problems are 2, numerical failures are 1.
pub fn error_exit_code(e: &NlsError) -> i32 {
    match e {
        NlsError::ScenarioParse { .. }
        | NlsError::InvalidGrid(_)
        | NlsError::InvalidParameter(_)
        | NlsError::UnknownCatalogId(_)
        | NlsError::FamilyMismatch(_)
        | NlsError::BackgroundMismatch(_)
        | NlsError::InconsistentFacts(_)
        | NlsError::UnknownKey(_)
        | NlsError::BadDerivativeOrder(_)
        | NlsError::WeightUnbounded(_)
        | NlsError::Io(_) => 2,
        _ => 1,
    }
}
