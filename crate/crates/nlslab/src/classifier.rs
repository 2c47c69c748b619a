//! Breather-nonexistence regime classifier: given a model and its measured
//! or declared invariants, reports which nonexistence result (if any)
//! precludes breather existence.
//!
//! Numerical semantics: "x = 0" is the predicate `|x|/max(1, M) < tau0`.
//! Non-strict sign conditions (<= 0, >= 0) fire only when the value is
//! strictly beyond the tau0 band; a value inside the band is reported as
//! Inconclusive, because measurement error cannot certify the sign either
//! way. Strict conditions (!= 0) fire outside the band and decline inside.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{NlsError, Result};
use crate::integrator::{conservation_drift, TrajectoryDiagnostics};
use crate::model::{Family, ModelSpec};

/// Ground-state reference quantities for the mass-supercritical rule.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroundStateThresholds {
    pub e_qstar: f64,
    pub m_qstar: f64,
    pub grad_qstar: f64,
}

/// Inputs to `classify`. Every rule consumes only populated fields; a rule
/// whose guard holds but whose inputs are missing yields Inconclusive.
#[derive(Debug, Clone)]
pub struct InvariantFacts {
    pub model: ModelSpec,
    /// P (zero background) or P_nz (Stokes background)
    pub momentum: Option<f64>,
    /// family-appropriate energy: E, E_1, E_2, or E_nz (the convention with
    /// the mass term folded in, E_nz = E_hamiltonian + epsilon * M_nz)
    pub energy: Option<f64>,
    /// M or M_nz
    pub mass: Option<f64>,
    /// initial virial P~(0)
    pub p_tilde0: Option<f64>,
    pub l2_norm: Option<f64>,
    pub grad_l2_at_0: Option<f64>,
    /// DNLS Hamiltonian
    pub h: Option<f64>,
    /// user assertion that the data is small (mass-subcritical 1-D theorem)
    pub mass_small: bool,
    /// user certificate of exponential decay faster than the ground state
    pub decay_certificate: bool,
    /// configured smallness bound for the small-data theorem (no operative
    /// value exists in closed form; must be supplied explicitly)
    pub eps_small: Option<f64>,
    /// DNLS even-or-odd total symmetry assertion
    pub dnls_symmetric: bool,
    /// mass-critical ground-state L2 norm (unsquared)
    pub q_l2_norm: Option<f64>,
    pub thresholds: Option<GroundStateThresholds>,
    pub tau0: f64,
}

impl InvariantFacts {
    pub fn new(model: ModelSpec) -> Self {
        InvariantFacts {
            model,
            momentum: None,
            energy: None,
            mass: None,
            p_tilde0: None,
            l2_norm: None,
            grad_l2_at_0: None,
            h: None,
            mass_small: false,
            decay_certificate: false,
            eps_small: None,
            dnls_symmetric: false,
            q_l2_norm: None,
            thresholds: None,
            tau0: 1e-9,
        }
    }

    fn scale(&self) -> f64 {
        self.mass.map(|m| m.abs()).unwrap_or(0.0).max(1.0)
    }

    fn is_zero(&self, v: f64) -> bool {
        v.abs() / self.scale() < self.tau0
    }

    fn is_pos(&self, v: f64) -> bool {
        v / self.scale() > self.tau0
    }

    fn is_neg(&self, v: f64) -> bool {
        v / self.scale() < -self.tau0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Precluded,
    NotPrecluded,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeVerdict {
    pub status: VerdictStatus,
    pub rule: String,
    /// human-readable instantiated condition with numbers
    pub inequality: String,
    pub table_row: Option<String>,
    pub inputs: BTreeMap<String, f64>,
}

enum RuleOutcome {
    Fired { inequality: String, table_row: Option<String> },
    /// guard holds but an input is missing or the value sits on the tau0
    /// boundary; carries the reason
    Pending(String),
    NoMatch,
}

fn mass_regime(model: &ModelSpec) -> (bool, bool, bool) {
    let pc = 4.0 / model.n as f64;
    let crit = (model.p - pc).abs() < 1e-12;
    (model.p < pc && !crit, crit, model.p > pc && !crit)
}

fn table_name(model: &ModelSpec) -> &'static str {
    let (sub, crit, _) = mass_regime(model);
    if sub {
        "Table 1"
    } else if crit {
        "Table 2"
    } else {
        "Table 3"
    }
}

type Rule = (&'static str, fn(&InvariantFacts) -> RuleOutcome);

fn r1(f: &InvariantFacts) -> RuleOutcome {
    if f.model.epsilon > 0.0 {
        RuleOutcome::Fired {
            inequality: "epsilon = +1 (defocusing)".into(),
            table_row: Some(format!("{}, row 1", table_name(&f.model))),
        }
    } else {
        RuleOutcome::NoMatch
    }
}

fn r2(f: &InvariantFacts) -> RuleOutcome {
    let Some(p) = f.momentum else {
        return RuleOutcome::Pending("R2 needs momentum".into());
    };
    if !f.is_zero(p) {
        RuleOutcome::Fired {
            inequality: format!("P = {p:.6e} != 0 (null momentum is necessary)"),
            table_row: Some(format!("{}, row 2", table_name(&f.model))),
        }
    } else {
        RuleOutcome::NoMatch
    }
}

fn r3(f: &InvariantFacts) -> RuleOutcome {
    if f.model.epsilon > 0.0 {
        return RuleOutcome::NoMatch;
    }
    let Some(e) = f.energy else {
        return RuleOutcome::Pending("R3 needs energy".into());
    };
    let (sub, crit, sup) = mass_regime(&f.model);
    let pc = 4.0 / f.model.n as f64;
    if f.is_pos(e) && (sub || crit) {
        return RuleOutcome::Fired {
            inequality: format!("E = {e:.6e} > 0 with p = {} <= 4/n = {pc}", f.model.p),
            table_row: Some(format!("{}, row 3", table_name(&f.model))),
        };
    }
    if f.is_zero(e) && !crit {
        return RuleOutcome::Fired {
            inequality: format!("E = {e:.6e} = 0 with p = {} != 4/n = {pc}", f.model.p),
            table_row: Some(format!("{}, row 3", table_name(&f.model))),
        };
    }
    if f.is_neg(e) && (crit || sup) {
        return RuleOutcome::Fired {
            inequality: format!("E = {e:.6e} < 0 with 4/n = {pc} <= p = {}", f.model.p),
            table_row: Some(format!("{}, row 3", table_name(&f.model))),
        };
    }
    RuleOutcome::NoMatch
}

fn r4(f: &InvariantFacts) -> RuleOutcome {
    let (_, crit, _) = mass_regime(&f.model);
    if !crit || f.model.epsilon > 0.0 {
        return RuleOutcome::NoMatch;
    }
    let (Some(p), Some(e)) = (f.momentum, f.energy) else {
        return RuleOutcome::Pending("R4 needs momentum and energy".into());
    };
    if !f.is_zero(p) || !f.is_zero(e) {
        return RuleOutcome::NoMatch;
    }
    // case (i): nonzero initial virial
    if let Some(pt) = f.p_tilde0 {
        if !f.is_zero(pt) {
            return RuleOutcome::Fired {
                inequality: format!("P = 0, E = 0, P~(0) = {pt:.6e} != 0"),
                table_row: Some("Table 2, row 5".into()),
            };
        }
    }
    // case (ii): subcritical mass (unsquared L2 norms compared)
    match (f.l2_norm, f.q_l2_norm) {
        (Some(l2), Some(q)) => {
            if l2 < q {
                return RuleOutcome::Fired {
                    inequality: format!(
                        "P = 0, E = 0, ||u||_L2 = {l2:.6e} < ||Q||_L2 = {q:.6e} (unsquared norms)"
                    ),
                    table_row: Some("Table 2, row 4".into()),
                };
            }
        }
        _ => {
            if f.p_tilde0.is_none() {
                return RuleOutcome::Pending(
                    "R4 needs P~(0) or the mass-critical ground-state norm".into(),
                );
            }
        }
    }
    RuleOutcome::NoMatch
}

fn r5(f: &InvariantFacts) -> RuleOutcome {
    let (_, _, sup) = mass_regime(&f.model);
    if !sup || f.model.epsilon > 0.0 {
        return RuleOutcome::NoMatch;
    }
    let (Some(p), Some(e)) = (f.momentum, f.energy) else {
        return RuleOutcome::Pending("R5 needs momentum and energy".into());
    };
    if !f.is_zero(p) || !f.is_pos(e) {
        return RuleOutcome::NoMatch;
    }
    let Some(th) = f.thresholds else {
        return RuleOutcome::Pending("R5 needs cached ground-state thresholds".into());
    };
    let (Some(m), Some(grad)) = (f.mass, f.grad_l2_at_0) else {
        return RuleOutcome::Pending("R5 needs mass and ||grad u(0)||".into());
    };
    let sc = f.model.s_c();
    let balance = e.powf(sc) * m.powf(1.0 - sc);
    let b_star = th.e_qstar.powf(sc) * th.m_qstar.powf(1.0 - sc);
    let g_balance = grad.powf(sc) * m.powf(1.0 - sc);
    let g_star = th.grad_qstar.powf(sc) * th.m_qstar.powf(1.0 - sc);
    if balance >= b_star {
        return RuleOutcome::NoMatch;
    }
    if (g_balance - g_star).abs() / g_star.max(1.0) < f.tau0 {
        return RuleOutcome::Pending("R5 gradient balance sits at the threshold".into());
    }
    RuleOutcome::Fired {
        inequality: format!(
            "E^sc M^(1-sc) = {balance:.6e} < {b_star:.6e} and ||grad u(0)||^sc M^(1-sc) = {g_balance:.6e} != {g_star:.6e}"
        ),
        table_row: Some("Table 3, row 4".into()),
    }
}

fn r6(f: &InvariantFacts) -> RuleOutcome {
    let in_range = f.model.n == 1 && f.model.p >= 2.0 && f.model.p < 4.0;
    if !in_range || f.model.epsilon > 0.0 || !(f.mass_small && f.decay_certificate) {
        return RuleOutcome::NoMatch;
    }
    let Some(eps_small) = f.eps_small else {
        return RuleOutcome::Pending("R6 needs the configured smallness bound eps_small".into());
    };
    let Some(l2) = f.l2_norm else {
        return RuleOutcome::Pending("R6 needs the L2 norm".into());
    };
    if l2 < eps_small {
        RuleOutcome::Fired {
            inequality: format!(
                "||u||_L2 = {l2:.6e} < eps_small = {eps_small:.6e} with certified exponential decay"
            ),
            table_row: Some("Table 1, row 4".into()),
        }
    } else {
        RuleOutcome::NoMatch
    }
}

fn r7(f: &InvariantFacts) -> RuleOutcome {
    let (Some(e), Some(m)) = (f.energy, f.mass) else {
        return RuleOutcome::Pending("R7 needs E_nz and M_nz".into());
    };
    let eps = f.model.epsilon;
    match (f.model.p as i32, f.model.n) {
        (2, 1) => {
            let val = eps * (e - eps / 2.0 * m);
            if f.is_neg(val) {
                RuleOutcome::Fired {
                    inequality: format!("epsilon*(E_nz - (epsilon/2) M_nz) = {val:.6e} <= 0"),
                    table_row: None,
                }
            } else if f.is_zero(val) {
                RuleOutcome::Pending(format!("R7 cubic n=1 value {val:.3e} within tau0 of 0"))
            } else {
                RuleOutcome::NoMatch
            }
        }
        (2, 2) => {
            if !f.is_zero(e) {
                RuleOutcome::Fired {
                    inequality: format!("E_nz = {e:.6e} != 0"),
                    table_row: None,
                }
            } else {
                RuleOutcome::NoMatch
            }
        }
        (4, 1) => {
            let val = eps * e;
            if f.is_pos(val) {
                RuleOutcome::Fired {
                    inequality: format!("epsilon*E_nz = {val:.6e} >= 0"),
                    table_row: None,
                }
            } else if f.is_zero(val) {
                RuleOutcome::Pending(format!("R7 quintic n=1 value {val:.3e} within tau0 of 0"))
            } else {
                RuleOutcome::NoMatch
            }
        }
        (4, 2) => {
            let val = eps * (e + eps * m);
            if f.is_pos(val) {
                RuleOutcome::Fired {
                    inequality: format!("epsilon*(E_nz + epsilon M_nz) = {val:.6e} >= 0"),
                    table_row: None,
                }
            } else if f.is_zero(val) {
                RuleOutcome::Pending(format!("R7 quintic n=2 value {val:.3e} within tau0 of 0"))
            } else {
                RuleOutcome::NoMatch
            }
        }
        _ => RuleOutcome::NoMatch,
    }
}

fn r8(f: &InvariantFacts) -> RuleOutcome {
    let Some(p) = f.momentum else {
        return RuleOutcome::Pending("R8 needs momentum (theorem hypothesis P = 0)".into());
    };
    if !f.is_zero(p) {
        return RuleOutcome::NoMatch;
    }
    let Some(e) = f.energy else {
        return RuleOutcome::Pending("R8 needs E_1".into());
    };
    let (l1, l2) = (f.model.lambda1, f.model.lambda2);
    match f.model.n {
        1 | 2 => {
            let coef = if f.model.n == 1 { l1 } else { l2 };
            let val = coef * e;
            if f.is_neg(val) {
                RuleOutcome::Fired {
                    inequality: format!("lambda_{} * E_1 = {val:.6e} <= 0", f.model.n),
                    table_row: None,
                }
            } else if f.is_zero(val) {
                RuleOutcome::Pending(format!("R8 n={} value {val:.3e} within tau0 of 0", f.model.n))
            } else {
                RuleOutcome::NoMatch
            }
        }
        3 => {
            if l1 < 0.0 {
                let Some(m) = f.mass else {
                    return RuleOutcome::Pending("R8 n=3 needs mass".into());
                };
                let bound = 3.0 * l1 * l1 / (128.0 * l2.abs()) * m * m;
                if e > bound {
                    return RuleOutcome::Fired {
                        inequality: format!("E_1 = {e:.6e} > (3 lambda_1^2/(128 |lambda_2|)) M^2 = {bound:.6e}"),
                        table_row: None,
                    };
                }
                RuleOutcome::NoMatch
            } else {
                let Some(pt) = f.p_tilde0 else {
                    return RuleOutcome::Pending("R8 n=3 needs P~(0)".into());
                };
                if f.is_neg(e) && f.is_pos(pt) {
                    return RuleOutcome::Fired {
                        inequality: format!("lambda_1 > 0, E_1 = {e:.6e} < 0, P~(0) = {pt:.6e} > 0"),
                        table_row: None,
                    };
                }
                RuleOutcome::NoMatch
            }
        }
        _ => RuleOutcome::NoMatch,
    }
}

fn r9(f: &InvariantFacts) -> RuleOutcome {
    let (eps, mu) = (f.model.epsilon, f.model.mu);
    if eps > 0.0 && mu >= 0.0 {
        return RuleOutcome::Fired {
            inequality: format!("epsilon = +1 and mu = {mu} >= 0"),
            table_row: None,
        };
    }
    if eps < 0.0 && mu <= 0.0 {
        let Some(e) = f.energy else {
            return RuleOutcome::Pending("R9 needs E_2".into());
        };
        if f.is_pos(e) {
            return RuleOutcome::Fired {
                inequality: format!("epsilon = -1, mu = {mu} <= 0, E_2 = {e:.6e} >= 0"),
                table_row: None,
            };
        }
        if f.is_zero(e) {
            return RuleOutcome::Pending(format!("R9 E_2 = {e:.3e} within tau0 of 0"));
        }
    }
    RuleOutcome::NoMatch
}

fn r10(f: &InvariantFacts) -> RuleOutcome {
    if f.dnls_symmetric {
        return RuleOutcome::Fired {
            inequality: "even-or-odd total symmetry".into(),
            table_row: None,
        };
    }
    let Some(h) = f.h else {
        return RuleOutcome::Pending("R10 needs H".into());
    };
    let eps = f.model.epsilon;
    let fires = (eps < 0.0 && f.is_neg(h)) || (eps > 0.0 && f.is_pos(h));
    if fires {
        RuleOutcome::Fired {
            inequality: format!("epsilon = {eps}, H = {h:.6e} (epsilon*H >= 0 regime)"),
            table_row: None,
        }
    } else if f.is_zero(h) {
        RuleOutcome::Pending(format!("R10 H = {h:.3e} within tau0 of 0"))
    } else {
        RuleOutcome::NoMatch
    }
}

fn r11(f: &InvariantFacts) -> RuleOutcome {
    if f.model.epsilon > 0.0 {
        RuleOutcome::Fired {
            inequality: "epsilon = +1 (defocusing logarithmic nonlinearity)".into(),
            table_row: None,
        }
    } else {
        RuleOutcome::NoMatch
    }
}

fn rules_for(family: Family) -> &'static [Rule] {
    match family {
        Family::PowerNLS => &[
            ("R1", r1),
            ("R2", r2),
            ("R3", r3),
            ("R4", r4),
            ("R5", r5),
            ("R6", r6),
        ],
        Family::GrossPitaevskii => &[("R2", r2), ("R7", r7)],
        Family::CubicQuintic => &[("R8", r8)],
        Family::Biharmonic => &[("R9", r9)],
        Family::DerivativeNLS => &[("R10", r10)],
        Family::LogNLS => &[("R11", r11)],
    }
}

fn check_consistency(facts: &InvariantFacts) -> Result<()> {
    if facts.h.is_some() && facts.model.family != Family::DerivativeNLS {
        return Err(NlsError::InconsistentFacts(format!(
            "DNLS Hamiltonian supplied for a {:?} model",
            facts.model.family
        )));
    }
    if facts.dnls_symmetric && facts.model.family != Family::DerivativeNLS {
        return Err(NlsError::InconsistentFacts(
            "DNLS parity assertion supplied for a non-DNLS model".into(),
        ));
    }
    Ok(())
}

fn inputs_map(facts: &InvariantFacts) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: Option<f64>| {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    };
    put("momentum", facts.momentum);
    put("energy", facts.energy);
    put("mass", facts.mass);
    put("p_tilde0", facts.p_tilde0);
    put("l2_norm", facts.l2_norm);
    put("grad_l2_at_0", facts.grad_l2_at_0);
    put("h", facts.h);
    put("q_l2_norm", facts.q_l2_norm);
    m.insert("tau0".into(), facts.tau0);
    m
}

fn surviving_regime(facts: &InvariantFacts) -> String {
    if facts.model.family == Family::PowerNLS && facts.model.epsilon < 0.0 {
        if let Some(e) = facts.energy {
            let (sub, crit, sup) = mass_regime(&facts.model);
            if facts.is_neg(e) && sub {
                return "surviving regime (1): E < 0 and p < 4/n".into();
            }
            if facts.is_zero(e) && crit {
                return "surviving regime (2): E = 0 and p = 4/n".into();
            }
            if facts.is_pos(e) && sup {
                return "surviving regime (3): E > 0 and p > 4/n".into();
            }
        }
    }
    "no nonexistence condition applies".into()
}

/// First matching rule (in R1..R11 order restricted to the family) wins.
pub fn classify(facts: &InvariantFacts) -> Result<RegimeVerdict> {
    check_consistency(facts)?;
    let mut pending: Vec<String> = Vec::new();
    for (id, rule) in rules_for(facts.model.family) {
        match rule(facts) {
            RuleOutcome::Fired { inequality, table_row } => {
                return Ok(RegimeVerdict {
                    status: VerdictStatus::Precluded,
                    rule: id.to_string(),
                    inequality,
                    table_row,
                    inputs: inputs_map(facts),
                });
            }
            RuleOutcome::Pending(reason) => pending.push(reason),
            RuleOutcome::NoMatch => {}
        }
    }
    if !pending.is_empty() {
        return Ok(RegimeVerdict {
            status: VerdictStatus::Inconclusive,
            rule: "none".into(),
            inequality: pending.join("; "),
            table_row: None,
            inputs: inputs_map(facts),
        });
    }
    Ok(RegimeVerdict {
        status: VerdictStatus::NotPrecluded,
        rule: "none".into(),
        inequality: surviving_regime(facts),
        table_row: None,
        inputs: inputs_map(facts),
    })
}

/// Outcome of every rule for a fact set (used by the order-independence
/// property tests: at most one rule fires on disjoint-guard fact sets).
pub fn fired_rules(facts: &InvariantFacts) -> Result<Vec<&'static str>> {
    check_consistency(facts)?;
    Ok(rules_for(facts.model.family)
        .iter()
        .filter(|(_, rule)| matches!(rule(facts), RuleOutcome::Fired { .. }))
        .map(|(id, _)| *id)
        .collect())
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Build facts from a measured trajectory (time-averages of the conserved
/// series) and classify; the virial monotone fraction and any blow-up time
/// are attached to the verdict inputs as corroboration.
pub fn classify_trajectory(traj: &TrajectoryDiagnostics, model: &ModelSpec) -> Result<RegimeVerdict> {
    if traj.is_empty() {
        return Err(NlsError::InvalidParameter("empty trajectory".into()));
    }
    let nz = model.family == Family::GrossPitaevskii;
    let mass_key = if nz { "m_nz" } else { "m" };
    let mut worst_drift: f64 = 0.0;
    for key in [mass_key, if nz { "e_nz" } else { "e" }] {
        if let Ok(d) = conservation_drift(traj, key) {
            worst_drift = worst_drift.max(d);
        }
    }
    if worst_drift > 1e-5 {
        return Ok(RegimeVerdict {
            status: VerdictStatus::Inconclusive,
            rule: "none".into(),
            inequality: format!("conserved-quantity drift {worst_drift:.3e} exceeds 1e-5"),
            table_row: None,
            inputs: BTreeMap::new(),
        });
    }

    let mut facts = InvariantFacts::new(*model);
    let reports = &traj.reports;
    facts.mass = mean(reports.iter().filter_map(|r| if nz { r.mass_nz } else { r.mass }));
    facts.momentum = mean(reports.iter().filter_map(|r| if nz { r.momentum_nz } else { r.momentum }));
    facts.energy = if nz {
        // fold the mass term in: E_nz = E_hamiltonian + epsilon * M_nz
        match (mean(reports.iter().filter_map(|r| r.energy_nz)), facts.mass) {
            (Some(e), Some(m)) => Some(e + model.epsilon * m),
            _ => None,
        }
    } else {
        mean(reports.iter().filter_map(|r| r.energy))
    };
    facts.h = mean(reports.iter().filter_map(|r| r.dnls_h));
    facts.p_tilde0 = traj.virial.first().copied().filter(|v| v.is_finite());
    facts.l2_norm = facts.mass.map(|m| m.max(0.0).sqrt());

    let mut verdict = classify(&facts)?;
    verdict.inputs.insert("monotone_fraction".into(), traj.monotone_fraction);
    if let Some(t) = traj.blowup_time {
        verdict.inputs.insert("blowup_time".into(), t);
    }
    Ok(verdict)
}
