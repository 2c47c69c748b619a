//! Integrate the modulation ODE behind the logarithmic-NLS breather and print
//! its orbit: radius extrema, detected period, and a few samples.

use num_complex::Complex64;

use nlslab::catalog::solve_r_alpha;

fn main() -> nlslab::Result<()> {
    for ar in [1.0, 1.2, 2.0] {
        let orbit = solve_r_alpha(Complex64::new(ar, 0.0), 1.0, 60.0, 1e-12)?;
        let r_min = orbit.r.iter().cloned().fold(f64::INFINITY, f64::min);
        let r_max = orbit.r.iter().cloned().fold(0.0, f64::max);
        match (orbit.constant, orbit.period) {
            (true, _) => println!("alpha = {ar}: fixed point, r = {r_min:.12}"),
            (false, Some(t)) => {
                println!("alpha = {ar}: r in [{r_min:.6}, {r_max:.6}], period {t:.12}");
                for k in 0..4 {
                    let t_k = t * k as f64 / 4.0;
                    let (r, rdot, phi) = orbit.sample(t_k)?;
                    println!("    t = {t_k:.4}: r = {r:.8}, r' = {rdot:+.8}, Phi = {phi:.8}");
                }
            }
            (false, None) => println!("alpha = {ar}: no closed orbit detected"),
        }
    }
    Ok(())
}
