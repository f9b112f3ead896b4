//! szkit: command-line front end for the symplectic dynamics toolkit.
//!
//! Exit codes: 0 on success/pass, 1 on verification failure, 2 on usage or
//! input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use szkit_core::chern;
use szkit_core::cz;
use szkit_core::dynamics::{self, OrbitSearch};
use szkit_core::hofer;
use szkit_core::io;
use szkit_core::linalg::SymmetricMatrix;
use szkit_core::verify;
use szkit_core::{Error, Tolerances};

#[derive(Parser)]
#[command(
    name = "szkit",
    about = "Numerical toolkit for symplectic dynamics: Conley-Zehnder indices, windings and Chern numbers, Hamiltonian flows, Hofer geometry, action spectra and verification experiments",
    version
)]
struct Cli {
    /// JSON config file overriding tolerances
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Random seed for the seeded experiments
    #[arg(long, global = true, default_value_t = 20240210)]
    seed: u64,
    /// Write the JSON report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance profile
    #[arg(long, global = true, default_value = "default", value_parser = ["default", "strict"])]
    tol_profile: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conley-Zehnder index of a sampled symplectic path (crossing form)
    Cz {
        /// Path JSON (inline or a file path)
        #[arg(long)]
        path: String,
    },
    /// Closed-formula index of exp(J0 S t) from a symmetric matrix S
    CzExp {
        /// Matrix JSON rows (inline or a file path)
        #[arg(long)]
        matrix: String,
    },
    /// Winding number of a unitary or symplectic loop
    Wind {
        /// Loop JSON (inline or a file path)
        #[arg(long)]
        r#loop: String,
    },
    /// Flow a point along a Hamiltonian vector field
    Flow {
        #[arg(long)]
        ham: String,
        /// Starting point, comma-separated coordinates
        #[arg(long)]
        from: String,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Periodic-orbit search by Newton shooting over a seeding grid
    Orbits {
        #[arg(long)]
        ham: String,
        /// Period window "a:b"
        #[arg(long, default_value = "0.95:1.05")]
        period: String,
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Twist classification of a fixed critical point
    Twist {
        #[arg(long)]
        ham: String,
        /// The critical point, comma-separated coordinates
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
    },
    /// Hofer semi-norms of a Hamiltonian
    Hofer {
        #[arg(long)]
        ham: String,
        #[arg(long, default_value_t = 513)]
        t_samples: usize,
        #[arg(long, default_value_t = 48)]
        x_grid: usize,
    },
    /// Action spectrum over a recapping range
    Spectrum {
        #[arg(long)]
        ham: String,
        /// Recapping range "kmin:kmax"
        #[arg(long, default_value = "-1:1")]
        k: String,
        #[arg(long, default_value = "0.95:1.05")]
        period: String,
        #[arg(long, default_value_t = 12)]
        grid: usize,
    },
    /// Canonical small bounding disc of a loop and its areas
    Disc {
        /// Manifold loop JSON (inline or a file path)
        #[arg(long)]
        r#loop: String,
        #[arg(long, default_value_t = 64)]
        radial: usize,
    },
    /// Verification experiments
    Verify {
        #[command(subcommand)]
        experiment: VerifyCommand,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Index agreement of the crossing form with the closed formula
    CzOracle(CountArgs),
    /// Index shift under loops of known winding
    LoopShift(CountArgs),
    /// Transition-loop winding of the sphere tangent bundle
    TransitionS2 {
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Recapping index shifts on the sphere, both routes
    TheoremC {
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Continuation-trajectory action identity on torus Morse pairs
    EnergyIdentity {
        #[arg(long, default_value_t = 10)]
        cases: usize,
        #[arg(long, default_value_t = 40.0)]
        window: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Critical-value gaps and trajectory energy bounds
    EnergyGap,
    /// Small-orbit experiment on the perturbed torus Morse Hamiltonian
    Prop64 {
        #[arg(long, default_value = "1e-2,1e-3,1e-4")]
        deltas: String,
        #[arg(long, default_value_t = 0.05)]
        delta2: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 12)]
        grid: usize,
    },
    /// Hofer norm closed forms and the inverse-energy swap
    Hofer(CountArgs),
    /// Spectrum coset structure and reparameterization invariance
    Spectrum,
    /// Twist classification across the boundary frequency
    TwistBoundary,
    /// Canonical-disc area identities
    DiscAreas,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, default_value_t = 50)]
    count: usize,
}

/// Accept inline JSON or a path to a JSON file.
fn read_json_arg(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        Ok(std::fs::read_to_string(arg)?)
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidMatrix(format!("bad range '{text}'")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidMatrix(format!("bad range bound '{}'", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidMatrix(format!("bad range bound '{}'", parts[1])))?;
    Ok((a, b))
}

fn parse_point(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidMatrix(format!("bad coordinate '{c}'")))
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_tolerances(cli: &Cli) -> Result<Tolerances, Error> {
    let mut tol = if cli.tol_profile == "strict" {
        Tolerances::strict()
    } else {
        Tolerances::default()
    };
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if let Some(tols) = value.get("tolerances") {
            tol = serde_json::from_value(tols.clone())?;
        }
    }
    Ok(tol)
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let tol = load_tolerances(cli)?;
    match &cli.command {
        Command::Cz { path } => {
            let text = read_json_arg(path)?;
            let dto: io::SymplecticPathDto = serde_json::from_str(&text)?;
            let sp = io::path_from_dto(&dto, &tol)?;
            let result = cz::cz_index(&sp, &tol)?;
            emit(&cli.out, &serde_json::to_value(&result)?)?;
            Ok(true)
        }
        Command::CzExp { matrix } => {
            let text = read_json_arg(matrix)?;
            let rows: Vec<Vec<f64>> = serde_json::from_str(&text)?;
            let m = io::matrix_from_rows(&rows)?;
            let s = SymmetricMatrix::new(m, &tol)?;
            let result = cz::cz_exp_formula(&s, &tol)?;
            emit(&cli.out, &serde_json::to_value(&result)?)?;
            Ok(true)
        }
        Command::Wind { r#loop } => {
            let text = read_json_arg(r#loop)?;
            let dto: io::LoopDto = serde_json::from_str(&text)?;
            let w = match io::loop_from_dto(&dto)? {
                io::ParsedLoop::Unitary(ul) => chern::wind(&ul, &tol)?,
                io::ParsedLoop::Symplectic(samples) => chern::wind_sp(&samples, &tol)?,
            };
            emit(&cli.out, &serde_json::json!({ "winding": w }))?;
            Ok(true)
        }
        Command::Flow {
            ham,
            from,
            t0,
            t1,
            step,
        } => {
            let h = io::hamiltonian_from_json(&read_json_arg(ham)?)?;
            let p = parse_point(from)?;
            let traj = dynamics::flow_trajectory(&h, &p, *t0, *t1, 64, *step)?;
            let endpoint = traj.last().unwrap().1.clone();
            emit(
                &cli.out,
                &serde_json::json!({
                    "endpoint": endpoint,
                    "trajectory": traj
                        .iter()
                        .map(|(t, x)| serde_json::json!({"t": t, "x": x}))
                        .collect::<Vec<_>>()
                }),
            )?;
            Ok(true)
        }
        Command::Orbits { ham, period, grid } => {
            let h = io::hamiltonian_from_json(&read_json_arg(ham)?)?;
            let (t_min, t_max) = parse_range(period)?;
            let search = OrbitSearch {
                t_min,
                t_max,
                t_count: 3,
                grid: *grid,
                orbit_samples: 64,
                max_newton: 20,
            };
            let (orbits, stats) = dynamics::find_periodic_orbits(&h, &search, &tol)?;
            let listing: Vec<serde_json::Value> = orbits
                .iter()
                .map(|o| {
                    serde_json::json!({
                        "period": o.period,
                        "initial": o.initial,
                        "residual": o.residual,
                        "diameter": o.diameter,
                        "winding": o.winding,
                        "monodromy": io::matrix_to_rows(&o.monodromy)
                    })
                })
                .collect();
            emit(
                &cli.out,
                &serde_json::json!({"orbits": listing, "stats": stats}),
            )?;
            Ok(true)
        }
        Command::Twist { ham, point, period } => {
            let h = io::hamiltonian_from_json(&read_json_arg(ham)?)?;
            let p = parse_point(point)?;
            let report = dynamics::classify_twist(&h, &p, *period, &tol)?;
            emit(&cli.out, &serde_json::to_value(&report)?)?;
            Ok(true)
        }
        Command::Hofer {
            ham,
            t_samples,
            x_grid,
        } => {
            let h = io::hamiltonian_from_json(&read_json_arg(ham)?)?;
            let norms = hofer::hofer_norms(&h, *t_samples, *x_grid)?;
            emit(&cli.out, &serde_json::to_value(norms)?)?;
            Ok(true)
        }
        Command::Spectrum {
            ham,
            k,
            period,
            grid,
        } => {
            let h = io::hamiltonian_from_json(&read_json_arg(ham)?)?;
            let parts: Vec<&str> = k.split(':').collect();
            if parts.len() != 2 {
                return Err(Error::InvalidMatrix(format!("bad k range '{k}'")));
            }
            let k_min = parts[0]
                .parse::<i64>()
                .map_err(|_| Error::InvalidMatrix("bad k".into()))?;
            let k_max = parts[1]
                .parse::<i64>()
                .map_err(|_| Error::InvalidMatrix("bad k".into()))?;
            let (t_min, t_max) = parse_range(period)?;
            let search = OrbitSearch {
                t_min,
                t_max,
                t_count: 3,
                grid: *grid,
                orbit_samples: 64,
                max_newton: 20,
            };
            let (orbits, _) = dynamics::find_periodic_orbits(&h, &search, &tol)?;
            let spectrum =
                szkit_core::action::action_spectrum(&h, &orbits, (k_min, k_max), 32, &tol)?;
            emit(&cli.out, &serde_json::to_value(&spectrum)?)?;
            Ok(true)
        }
        Command::Disc { r#loop, radial } => {
            let text = read_json_arg(r#loop)?;
            let dto: io::ManifoldLoopDto = serde_json::from_str(&text)?;
            let z = io::manifold_loop_from_dto(&dto)?;
            let disc = szkit_core::geometry::canonical_disc(&z, *radial, &tol)?;
            let areas = szkit_core::geometry::disc_areas(&disc)?;
            emit(
                &cli.out,
                &serde_json::json!({
                    "center": disc.center,
                    "areas": areas
                }),
            )?;
            Ok(true)
        }
        Command::Verify { experiment } => {
            let report = match experiment {
                VerifyCommand::CzOracle(c) => verify::verify_cz_oracle(c.count, cli.seed, &tol)?,
                VerifyCommand::LoopShift(c) => verify::verify_loop_shift(c.count, cli.seed, &tol)?,
                VerifyCommand::TransitionS2 { samples } => {
                    verify::verify_transition_s2(*samples, &tol)?
                }
                VerifyCommand::TheoremC { samples } => {
                    verify::verify_theorem_c(*samples, &[-2, -1, 0, 1, 2], &tol)?
                }
                VerifyCommand::EnergyIdentity {
                    cases,
                    window,
                    step,
                } => verify::verify_energy_identity(*cases, cli.seed, *window, *step, &tol)?,
                VerifyCommand::EnergyGap => verify::verify_energy_gap(&tol)?,
                VerifyCommand::Prop64 {
                    deltas,
                    delta2,
                    eps,
                    grid,
                } => {
                    let ds: Result<Vec<f64>, Error> = deltas
                        .split(',')
                        .map(|d| {
                            d.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::InvalidMatrix(format!("bad delta '{d}'")))
                        })
                        .collect();
                    verify::verify_prop64(0.01, &ds?, *delta2, *eps, *grid, &tol)?
                }
                VerifyCommand::Hofer(c) => verify::verify_hofer(c.count, cli.seed, &tol)?,
                VerifyCommand::Spectrum => verify::verify_spectrum(&tol)?,
                VerifyCommand::TwistBoundary => verify::verify_twist_boundary(&tol)?,
                VerifyCommand::DiscAreas => verify::verify_disc_areas(&tol)?,
            };
            report.print_lines();
            if let Some(path) = &cli.out {
                std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
