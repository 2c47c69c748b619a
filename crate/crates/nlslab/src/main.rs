use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Parser, Subcommand};
use serde_json::json;

use nlslab::catalog::{eval_exact, exact_period, ExactSolution, Period};
use nlslab::grid::Grid1D;
use nlslab::integrator::{evolve, EvolveConfig};
use nlslab::scenario::{
    error_exit_code, parse_scenario, pde_residual, render_json_17, render_profile_csv,
    run_scenario, virial_identity_check, RunArtifacts, Source,
};
use nlslab::NlsError;

#[derive(Parser)]
#[command(name = "nlslab", version, about = "Nonlinear Schrödinger numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files and write report.json / series.csv / profile.csv
    Run {
        files: Vec<PathBuf>,
        /// Output directory (per-scenario subdirectories when several files are given)
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the exact-solution catalog
    ListCatalog,
    /// Solve the ground-state profile by the damped normalized gradient flow
    GroundState {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 20.0)]
        grid_l: f64,
        #[arg(long, default_value_t = 1024)]
        grid_n: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Where to write profile.csv (stdout summary only when omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a named check against a catalog solution
    Verify {
        #[arg(long)]
        solution: String,
        /// invariants | virial | period | residual
        #[arg(long)]
        check: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { files, out } => cmd_run(&files, &out),
        Command::ListCatalog => cmd_list_catalog(),
        Command::GroundState { p, n, omega, grid_l, grid_n, tol, out } => {
            cmd_ground_state(p, n, omega, grid_l, grid_n, tol, out.as_deref())
        }
        Command::Verify { solution, check } => cmd_verify(&solution, &check),
    };
    ExitCode::from(code as u8)
}

fn worker_count(jobs: usize) -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = std::env::var("NLSLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    cap.min(jobs).max(1)
}

fn run_one(file: &Path, out_dir: &Path, nested: bool) -> i32 {
    let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
    let execute = || -> nlslab::Result<RunArtifacts> {
        let text = std::fs::read_to_string(file)?;
        let sc = parse_scenario(&text, &stem)?;
        run_scenario(&sc)
    };
    let art = match execute() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("ERROR {stem}: {e}");
            return error_exit_code(&e);
        }
    };
    let dir = if nested { out_dir.join(&art.name) } else { out_dir.to_path_buf() };
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("report.json"), render_json_17(&art.report))?;
        if let Some(series) = &art.series_csv {
            std::fs::write(dir.join("series.csv"), series)?;
        }
        if let Some(profile) = &art.profile_csv {
            std::fs::write(dir.join("profile.csv"), profile)?;
        }
        let now_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let meta = json!({
            "generated_at_unix_ms": now_ms,
            "scenario_file": file.display().to_string(),
            "tool_version": env!("CARGO_PKG_VERSION"),
        });
        std::fs::write(dir.join("metadata.json"), render_json_17(&meta))
    };
    if let Err(e) = write() {
        eprintln!("ERROR {stem}: {e}");
        return 2;
    }
    if art.failures.is_empty() {
        println!("PASS {}", art.name);
        0
    } else {
        for f in &art.failures {
            eprintln!("FAIL {}: {f}", art.name);
        }
        1
    }
}

fn cmd_run(files: &[PathBuf], out: &Path) -> i32 {
    if files.is_empty() {
        eprintln!("ERROR: no scenario files given");
        return 2;
    }
    let nested = files.len() > 1;
    let workers = worker_count(files.len());
    let next = AtomicUsize::new(0);
    let codes: Vec<AtomicUsize> = files.iter().map(|_| AtomicUsize::new(0)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= files.len() {
                    break;
                }
                codes[i].store(run_one(&files[i], out, nested) as usize, Ordering::SeqCst);
            });
        }
    });
    codes.iter().map(|c| c.load(Ordering::SeqCst) as i32).max().unwrap_or(0)
}

fn cmd_list_catalog() -> i32 {
    println!("{:<16} {:<22} {:<8} {}", "id", "parameters", "background", "period");
    for (id, params, background, period) in ExactSolution::registry() {
        println!("{id:<16} {params:<22} {background:<8} {period}");
    }
    0
}

fn cmd_ground_state(
    p: f64,
    n: u32,
    omega: f64,
    grid_l: f64,
    grid_n: usize,
    tol: f64,
    out: Option<&Path>,
) -> i32 {
    let solve = || -> nlslab::Result<()> {
        let grid = Grid1D::new(grid_l, grid_n)?;
        let gs = nlslab::ground_state::ground_state_imag_time(p, n, omega, &grid, tol)?;
        println!(
            "ground state p = {p}, n = {n}, omega = {omega}: residual = {:.3e}, ||Q||_L2 = {:.12}",
            gs.residual, gs.l2_norm
        );
        if let Some(dir) = out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("profile.csv"), render_profile_csv(&gs.profile))?;
        }
        Ok(())
    };
    match solve() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ERROR: {e}");
            error_exit_code(&e)
        }
    }
}

fn cmd_verify(solution: &str, check: &str) -> i32 {
    let run = || -> nlslab::Result<(bool, String)> {
        let sol = ExactSolution::parse(solution)?;
        let grid = Grid1D::new(20.0, 2048)?;
        let model = sol.model();
        Ok(match check {
            "invariants" => {
                // conserved keys must agree between two snapshot times
                let a = nlslab::functionals::invariants(&eval_exact(&sol, 0.0, &grid)?, &model)?;
                let b = nlslab::functionals::invariants(&eval_exact(&sol, 0.2, &grid)?, &model)?;
                let mut worst = 0.0f64;
                for key in ["m", "e", "p", "m_nz", "e_nz", "p_nz", "dnls_h"] {
                    if let (Some(x), Some(y)) = (a.get(key)?, b.get(key)?) {
                        worst = worst.max((x - y).abs() / x.abs().max(1.0));
                    }
                }
                (worst < 1e-6, format!("max conserved-key change {worst:.3e}"))
            }
            "virial" => {
                let f = eval_exact(&sol, 0.1, &grid)?;
                let source = Source::Catalog { id: solution.to_string(), scale: 1.0, t0: 0.1 };
                let c = virial_identity_check(&f, &model, &source)?;
                (c.rel_residual < 1e-4, format!("virial identity residual {:.3e}", c.rel_residual))
            }
            "period" => match exact_period(&sol)? {
                Period::Periodic(t_per) => {
                    // the GP evolution runs in the v-frame (no global Stokes
                    // phase), so remove it from both endpoints
                    let gp = model.family == nlslab::model::Family::GrossPitaevskii;
                    let strip = |f: &nlslab::grid::Field1D| {
                        if gp { f.stokes_phase_removed() } else { f.clone() }
                    };
                    let f0 = strip(&eval_exact(&sol, 0.0, &grid)?);
                    let cfg = EvolveConfig::new(1e-4, t_per)?.with_stride(1000);
                    let traj = evolve(&f0, &model, &cfg)?;
                    let t_final = *traj.times.last().unwrap();
                    let target = strip(&eval_exact(&sol, t_final, &grid)?);
                    let err = traj.final_field.as_ref().unwrap().l2_relative_distance(&target);
                    (err < 1e-3, format!("period {t_per:.6}: L2 return error {err:.3e}"))
                }
                Period::Constant => (true, "constant orbit (period-free)".into()),
                Period::Aperiodic => (true, "aperiodic (no period to verify)".into()),
            },
            "residual" => {
                // grid and tolerance adapted to the decay class: algebraic
                // tails (Peregrine) need a wide box and a loose bound;
                // spatially periodic solutions need a commensurate box
                let (rgrid, thresh) = match sol {
                    ExactSolution::Peregrine => (Grid1D::new(400.0, 16384)?, 1e-3),
                    ExactSolution::Akhmediev { a } => {
                        let alpha = (2.0 * (1.0 - 2.0 * a)).sqrt();
                        let pi = std::f64::consts::PI;
                        let m = (20.0 * alpha / pi).round().max(1.0);
                        (Grid1D::new(m * pi / alpha, 4096)?, 1e-6)
                    }
                    _ => (Grid1D::new(25.0, 4096)?, 1e-6),
                };
                let r = pde_residual(&sol, 0.1, &rgrid)?;
                (r < thresh, format!("PDE residual sup-norm {r:.3e}"))
            }
            other => {
                return Err(NlsError::InvalidParameter(format!(
                    "unknown check '{other}' (expected invariants|virial|period|residual)"
                )))
            }
        })
    };
    match run() {
        Ok((true, msg)) => {
            println!("PASS {solution} {check}: {msg}");
            0
        }
        Ok((false, msg)) => {
            eprintln!("FAIL {solution} {check}: {msg}");
            1
        }
        Err(e) => {
            eprintln!("ERROR: {e}");
            error_exit_code(&e)
        }
    }
}
