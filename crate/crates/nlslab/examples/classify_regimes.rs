//! Classify several initial-data configurations: a defocusing run, a catalog
//! breather, and a hand-built fact set near a regime boundary.

use num_complex::Complex64;

use nlslab::catalog::{eval_exact, ExactSolution};
use nlslab::classifier::{classify, classify_trajectory, InvariantFacts};
use nlslab::functionals::invariants;
use nlslab::grid::{BackgroundKind, Field1D, Grid1D};
use nlslab::integrator::{evolve, EvolveConfig};
use nlslab::model::ModelSpec;
use nlslab::scenario::{facts_from_invariants, family_virial};

fn main() -> nlslab::Result<()> {
    // defocusing cubic Gaussian: precluded outright by the sign of epsilon
    let grid = Grid1D::new(20.0, 256)?;
    let model = ModelSpec::power_nls(1.0, 2.0, 1)?;
    let gauss = Field1D::from_fn(grid, BackgroundKind::Zero, 0.0, |x| {
        Complex64::new((-x * x / 2.0).exp(), 0.0)
    })?;
    let traj = evolve(&gauss, &model, &EvolveConfig::new(1e-3, 0.5)?.with_stride(5))?;
    let verdict = classify_trajectory(&traj, &model)?;
    println!("defocusing gaussian: {:?} by {} ({})", verdict.status, verdict.rule, verdict.inequality);

    // the Satsuma-Yajima breather survives every focusing rule
    let sy = ExactSolution::SatsumaYajima;
    let f = eval_exact(&sy, 0.0, &Grid1D::new(20.0, 2048)?)?;
    let inv = invariants(&f, &sy.model())?;
    let p_tilde0 = family_virial(&f, &sy.model()).ok();
    let verdict = classify(&facts_from_invariants(&inv, &sy.model(), p_tilde0, None))?;
    println!("satsuma-yajima:      {:?} ({})", verdict.status, verdict.inequality);

    // a measurement sitting inside the zero band cannot certify a sign
    let mut facts = InvariantFacts::new(ModelSpec::gross_pitaevskii(-1.0, 2.0, 1)?);
    facts.momentum = Some(0.0);
    // puts epsilon (E + M/2) a hair above zero, inside the zero band
    facts.energy = Some(-0.5 + 3e-13);
    facts.mass = Some(1.0);
    let verdict = classify(&facts)?;
    println!("boundary fact set:   {:?} ({})", verdict.status, verdict.inequality);
    Ok(())
}
