//! Evolve the Satsuma-Yajima breather through one full period and report
//! conservation drift and the L2 return error against the exact profile.

use nlslab::catalog::{eval_exact, exact_period, ExactSolution, Period};
use nlslab::grid::Grid1D;
use nlslab::integrator::{conservation_drift, evolve, EvolveConfig};

fn main() -> nlslab::Result<()> {
    let sol = ExactSolution::SatsumaYajima;
    let grid = Grid1D::new(20.0, 2048)?;
    let t_per = match exact_period(&sol)? {
        Period::Periodic(t) => t,
        _ => unreachable!("SY is periodic"),
    };
    let f0 = eval_exact(&sol, 0.0, &grid)?;
    let cfg = EvolveConfig::new(1e-4, t_per)?.with_stride(100);
    let traj = evolve(&f0, &sol.model(), &cfg)?;

    println!("period {t_per:.6}, {} samples", traj.times.len());
    for key in ["m", "e", "p"] {
        println!("  {key:<6} relative drift {:.3e}", conservation_drift(&traj, key)?);
    }
    let t_final = *traj.times.last().unwrap();
    let target = eval_exact(&sol, t_final, &grid)?;
    let err = traj.final_field.as_ref().unwrap().l2_relative_distance(&target);
    println!("  L2 return error after one period: {err:.3e}");
    Ok(())
}
