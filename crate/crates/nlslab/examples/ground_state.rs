//! Solve the 1-D ground state by normalized gradient flow, compare against
//! the closed-form sech profile, and verify the Pohozaev identities.

use nlslab::grid::Grid1D;
use nlslab::ground_state::{ground_state_1d_exact, ground_state_imag_time};
use nlslab::virial::pohozaev_residuals;

fn main() -> nlslab::Result<()> {
    let grid = Grid1D::new(20.0, 1024)?;
    for p in [1.0, 2.0, 3.0, 4.0] {
        let numeric = ground_state_imag_time(p, 1, 1.0, &grid, 1e-12)?;
        let exact = ground_state_1d_exact(p, 1.0, &grid)?;
        let sup = numeric.profile.sup_distance(&exact.profile);
        let (r1, r2) = pohozaev_residuals(&numeric.profile, p, 1.0)?;
        println!(
            "p = {p}: residual {:.3e}, sup error vs exact {:.3e}, Pohozaev ({:.3e}, {:.3e}), ||Q||_L2 {:.12}",
            numeric.residual, sup, r1, r2, numeric.l2_norm
        );
    }
    Ok(())
}
