//! Compare a centered finite difference of the virial functional against its
//! closed-form rate for the Satsuma-Yajima breather at several times.

use nlslab::catalog::eval_exact;
use nlslab::catalog::ExactSolution;
use nlslab::grid::Grid1D;
use nlslab::scenario::{virial_identity_check, Source};

fn main() -> nlslab::Result<()> {
    let sol = ExactSolution::SatsumaYajima;
    let grid = Grid1D::new(20.0, 2048)?;
    println!("{:>6} {:>22} {:>22} {:>12}", "t", "d/dt of virial (FD)", "closed-form rate", "residual");
    for t in [0.0, 0.1, 0.25, std::f64::consts::PI / 8.0] {
        let f = eval_exact(&sol, t, &grid)?;
        let source = Source::Catalog { id: sol.id(), scale: 1.0, t0: t };
        let check = virial_identity_check(&f, &sol.model(), &source)?;
        println!(
            "{:>6.3} {:>22.12e} {:>22.12e} {:>12.3e}",
            t, check.lhs, check.rhs, check.rel_residual
        );
    }
    Ok(())
}
