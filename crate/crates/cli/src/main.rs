//! `gfa` — Fourier analysis on finite groupoids from the command line.
//!
//! Stdout carries the JSON payload; stderr carries human diagnostics.
//! Exit codes: 0 success, 1 check failure, 2 input error, 3 numerical
//! failure. All randomness flows from a single seed: `--seed`, then the
//! `GFA_SEED` environment variable, then the built-in default.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use groupoid_fourier::checks::{run_suite, Suite};
use groupoid_fourier::fourier::{convolve, convolve_fiber, fourier_fiber};
use groupoid_fourier::harmonic::{character_bundle, diag_transform, to_conjugacy};
use groupoid_fourier::io;
use groupoid_fourier::rep::{dual_object, RepError};
use groupoid_fourier::spectral::bench;
use groupoid_fourier::{FiniteGroupoid, GroupoidError, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "gfa", version, about = "Fourier analysis on finite groupoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// RNG seed; falls back to $GFA_SEED, then the built-in default.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed
            .or_else(|| std::env::var("GFA_SEED").ok()?.parse().ok())
            .unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a groupoid file against the axioms.
    Validate { file: PathBuf },
    /// Compute the unitary dual (complete irrep table).
    Irreps {
        file: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        /// Eigenvalue-clustering tolerance for the splitting engine.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the JSON here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Per-component character table (conjugacy classes × irreps).
    CharacterTable {
        file: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        /// Also print an aligned-text table to stderr.
        #[arg(long)]
        text: bool,
    },
    /// Fourier transform of a function file on one fiber, or the scalar
    /// diagonal transform of a class function.
    Fourier {
        groupoid: PathBuf,
        function: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        /// Fiber as two unit names: source then range.
        #[arg(long, num_args = 2, value_names = ["U", "V"], conflicts_with = "diag")]
        fiber: Option<Vec<String>>,
        /// Scalar diagonal transform (requires a class function).
        #[arg(long)]
        diag: bool,
        /// Component index for --diag.
        #[arg(long, default_value_t = 0)]
        component: usize,
    },
    /// Convolution of two function files.
    Convolve {
        groupoid: PathBuf,
        f1: PathBuf,
        f2: PathBuf,
        /// Use the fiberwise convolution (measure λ_u^v) instead of the
        /// global one (measure λ_u).
        #[arg(long)]
        fiber: bool,
    },
    /// Run a property suite and emit a check report.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        seed: SeedArg,
        /// Random instances per identity.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Benchmark spectral vs direct convolution powers.
    Bench {
        file: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        /// Base unit of the isotropy fiber (defaults to the first unit).
        #[arg(long)]
        unit: Option<String>,
        #[arg(long, default_value_t = 1024)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

/// 2 = input error, 3 = numerical failure, per the documented exit codes.
enum Failure {
    Input(String),
    Numerical(String),
}

impl From<GroupoidError> for Failure {
    fn from(e: GroupoidError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<RepError> for Failure {
    fn from(e: RepError) -> Self {
        match e {
            RepError::SplitFailure { .. } | RepError::ToleranceError(_) => {
                Failure::Numerical(e.to_string())
            }
            RepError::UnitOffOrbit(_) => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load(path: &PathBuf) -> Result<FiniteGroupoid, Failure> {
    io::from_file(path).map_err(Failure::from)
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Validate { file } => {
            let g = load(&file)?;
            let payload = serde_json::json!({
                "units": g.n_units(),
                "arrows": g.n_arrows(),
                "components": g.components().len(),
                "fingerprint": io::fingerprint(&g),
            });
            println!("{}", io::to_json_string(&payload));
            eprintln!(
                "ok: {} units, {} arrows, {} component(s)",
                g.n_units(),
                g.n_arrows(),
                g.components().len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Irreps {
            file,
            seed,
            tol,
            out,
        } => {
            let g = load(&file)?;
            let table = dual_object(&g, seed.resolve(), tol)?;
            let json = io::to_json_string(&io::irrep_table_to_file(&g, &table));
            match out {
                Some(path) => std::fs::write(&path, json + "\n")
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CharacterTable { file, seed, text } => {
            let g = load(&file)?;
            let table = dual_object(&g, seed.resolve(), 1e-9)?;
            let payload = character_table(&g, &table)?;
            println!("{}", io::to_json_string(&payload));
            if text {
                eprint!("{}", character_table_text(&payload));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fourier {
            groupoid,
            function,
            seed,
            fiber,
            diag,
            component,
        } => {
            let g = load(&groupoid)?;
            let f = io::load_function(&g, &function)?;
            let table = dual_object(&g, seed.resolve(), 1e-9)?;
            if diag {
                if component >= g.components().len() {
                    return Err(Failure::Input(format!(
                        "component {component} out of range ({} components)",
                        g.components().len()
                    )));
                }
                let (spec, dev) = diag_transform(&g, &table, &f, component);
                eprintln!("per-unit constancy deviation: {:e}", io::round_sig(dev));
                println!("{}", io::to_json_string(&io::spectral_to_file(&spec)));
            } else {
                let names = fiber.ok_or_else(|| {
                    Failure::Input("one of --fiber U V or --diag is required".to_string())
                })?;
                let u = g.unit_by_name(&names[0])?;
                let v = g.unit_by_name(&names[1])?;
                let h = fourier_fiber(&g, &table, &f, u, v);
                println!("{}", io::to_json_string(&io::coefficient_to_file(&g, &h)));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convolve {
            groupoid,
            f1,
            f2,
            fiber,
        } => {
            let g = load(&groupoid)?;
            let a = io::load_function(&g, &f1)?;
            let b = io::load_function(&g, &f2)?;
            let out = if fiber {
                convolve_fiber(&g, &a, &b)
            } else {
                convolve(&g, &a, &b)
            };
            println!("{}", io::to_json_string(&io::function_to_file(&g, &out)));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            file,
            suite,
            seed,
            trials,
        } => {
            let g = load(&file)?;
            let suite = Suite::parse(&suite)
                .ok_or_else(|| Failure::Input(format!("unknown suite {suite}")))?;
            let seed = seed.resolve();
            let table = dual_object(&g, seed, 1e-9)?;
            let report = run_suite(&g, &table, suite, seed, trials);
            let file_report = io::CheckReportFile {
                suite: report.suite.clone(),
                fingerprint: io::fingerprint(&g),
                seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                checks: report
                    .checks
                    .iter()
                    .map(|c| io::CheckLine {
                        name: c.name.clone(),
                        max_dev: io::round_sig(c.max_dev),
                        tol: c.tol,
                        pass: c.pass(),
                    })
                    .collect(),
                pass: report.pass(),
            };
            println!("{}", io::to_json_string(&file_report));
            for c in &report.checks {
                eprintln!(
                    "[{}] {} (max_dev {:.3e}, tol {:.0e})",
                    if c.pass() { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_dev,
                    c.tol
                );
            }
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Bench {
            file,
            seed,
            unit,
            k,
            reps,
        } => {
            let g = load(&file)?;
            let table = dual_object(&g, seed.resolve(), 1e-9)?;
            let u = io::resolve_unit(&g, unit.as_deref())?;
            // A fixed contractive density: interesting but numerically tame
            // at large k.
            let f = groupoid_fourier::fourier::FunctionBundle::from_fn(&g, |x| {
                groupoid_fourier::linalg::C64::new(0.9 + 0.2 * ((x.0 % 7) as f64) / 7.0, 0.0)
            });
            let report = bench(&g, &table, &f, u, k, reps)
                .map_err(|e| Failure::Input(e.to_string()))?;
            if report.max_abs_err > 1e-8 {
                return Err(Failure::Numerical(format!(
                    "spectral/direct cross-check disagrees by {:e}",
                    report.max_abs_err
                )));
            }
            println!("{}", io::to_json_string(&report));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Character table payload: per component, the classes (representative and
/// size) and each irrep's value on each class.
fn character_table(
    g: &FiniteGroupoid,
    table: &groupoid_fourier::rep::IrrepTable,
) -> Result<serde_json::Value, Failure> {
    let cq = g.conjugacy_groupoid();
    let mut components = Vec::new();
    for (ci, comp) in g.components().iter().enumerate() {
        let class_ids = cq.classes_of_component(ci);
        let classes: Vec<serde_json::Value> = class_ids
            .iter()
            .map(|&k| {
                let class = &cq.classes()[k];
                serde_json::json!({
                    "representative": g.arrow_name(class.arrows[0]),
                    "size": class.arrows.len(),
                })
            })
            .collect();
        let mut irreps = Vec::new();
        for entry in table.component_entries(ci) {
            let chi = character_bundle(g, &entry.rep);
            let values = to_conjugacy(g, &cq, &chi)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            let row: Vec<[f64; 2]> = class_ids
                .iter()
                .map(|&k| [io::round_sig(values[k].re), io::round_sig(values[k].im)])
                .collect();
            irreps.push(serde_json::json!({
                "id": entry.id,
                "dim": entry.rep.orbit_dim(),
                "values": row,
            }));
        }
        components.push(serde_json::json!({
            "component": ci,
            "units": comp.units.iter().map(|&u| g.unit_name(u)).collect::<Vec<_>>(),
            "classes": classes,
            "irreps": irreps,
        }));
    }
    Ok(serde_json::json!({ "components": components }))
}

/// Aligned-text rendering of the character-table payload.
fn character_table_text(payload: &serde_json::Value) -> String {
    let mut out = String::new();
    for comp in payload["components"].as_array().unwrap() {
        out.push_str(&format!("component {}\n", comp["component"]));
        let classes = comp["classes"].as_array().unwrap();
        let headers: Vec<String> = classes
            .iter()
            .map(|c| {
                format!(
                    "{}({})",
                    c["representative"].as_str().unwrap(),
                    c["size"]
                )
            })
            .collect();
        let ids: Vec<String> = comp["irreps"]
            .as_array()
            .unwrap()
            .iter()
            .map(|i| i["id"].as_str().unwrap().to_string())
            .collect();
        let id_width = ids.iter().map(String::len).max().unwrap_or(0).max(5);
        let col = headers.iter().map(String::len).max().unwrap_or(0).max(12);
        out.push_str(&format!("{:id_width$}", ""));
        for h in &headers {
            out.push_str(&format!(" {h:>col$}"));
        }
        out.push('\n');
        for irrep in comp["irreps"].as_array().unwrap() {
            out.push_str(&format!("{:id_width$}", irrep["id"].as_str().unwrap()));
            for v in irrep["values"].as_array().unwrap() {
                let re = v[0].as_f64().unwrap();
                let im = v[1].as_f64().unwrap();
                let cell = if im.abs() < 5e-13 {
                    format!("{re:.4}")
                } else {
                    format!("{re:.4}{im:+.4}i")
                };
                out.push_str(&format!(" {cell:>col$}"));
            }
            out.push('\n');
        }
    }
    out
}
