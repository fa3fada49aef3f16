use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sparseres::bridge::{
    am_to_res, build_from_hint, check_equivalence, emit_am_plan, res_to_am, BridgeError, EquivalenceReport,
};
use sparseres::library;
use sparseres::poly::{parse_system, CoefficientAssignment, OrderKind, SystemTemplate};
use sparseres::resgen::{emit_plan, generate, load_plan, GenConfig, ResgenError, SolverPlan, Variant};
use sparseres::runtime::{benchmark, solve_instance, RuntimeError, UnitNormal, FAIL_THRESHOLD, REAL_TOL};

const EXIT_USAGE: u8 = 2;
const EXIT_NO_SOLVER: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "sparseres", version, about = "Sparse-resultant solver generator and runtime")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a solver plan for a polynomial system.
    Generate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Single displacement magnitude instead of the default sweep.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        max_subset: Option<usize>,
        #[arg(long, default_value = "grevlex")]
        order: String,
        #[arg(long, default_value = "both")]
        variant: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Restrict the hidden variable (by name).
        #[arg(long)]
        hidden: Option<String>,
        /// Skip row-column removal.
        #[arg(long)]
        no_reduce: bool,
    },
    /// Solve one instance with a plan.
    Solve {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        /// Imaginary-part tolerance for the real flag.
        #[arg(long, default_value_t = REAL_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a plan on random unit-normal instances.
    Bench {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Failure threshold on the normalized residual.
        #[arg(long, default_value_t = FAIL_THRESHOLD)]
        tol: f64,
        /// Include wall-clock percentiles (not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Check action-matrix / resultant equivalence.
    Compare {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the action-matrix plan here.
        #[arg(long)]
        am_out: Option<PathBuf>,
    },
    /// List built-in systems, or print one.
    Library {
        name: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    #[value(name = "am-res")]
    AmRes,
    #[value(name = "res-am")]
    ResAm,
    #[value(name = "res-alt-am")]
    ResAltAm,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ResgenError> for Failure {
    fn from(e: ResgenError) -> Self {
        let code = match e {
            ResgenError::NoSolver(_) | ResgenError::Exhausted { .. } => EXIT_NO_SOLVER,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<RuntimeError> for Failure {
    fn from(e: RuntimeError) -> Self {
        let code = match e {
            RuntimeError::Poly(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<BridgeError> for Failure {
    fn from(e: BridgeError) -> Self {
        let code = match e {
            BridgeError::NoTemplate(_) | BridgeError::Unsupported(_) => EXIT_NO_SOLVER,
            BridgeError::Singular | BridgeError::Runtime(_) => EXIT_NUMERIC,
            BridgeError::Resgen(ResgenError::NoSolver(_) | ResgenError::Exhausted { .. }) => EXIT_NO_SOLVER,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<SystemTemplate, Failure> {
    let text = read(path)?;
    parse_system(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load_plan_file(path: &Path) -> Result<SolverPlan, Failure> {
    let text = read(path)?;
    load_plan(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn size_report(plan: &SolverPlan) -> String {
    let (a, b) = plan.size();
    format!(
        "hidden {} (index {}), variant {:?}, size {a}x{b}, eig size {}",
        plan.system.var_names[plan.hidden],
        plan.hidden,
        plan.variant,
        plan.n_solutions()
    )
}

fn print_equivalence(rep: &EquivalenceReport) {
    println!(
        "{} (size match: {}, max deviation {:.3e}, {} of {} trials failed)",
        if rep.equivalent { "equivalent" } else { "not equivalent" },
        rep.size_match,
        rep.max_rel_diff,
        rep.failures,
        rep.trials
    );
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            system,
            out,
            delta,
            max_subset,
            order,
            variant,
            seed,
            hidden,
            no_reduce,
        } => {
            let sys = load_system(&system)?;
            let order = match order.to_ascii_lowercase().as_str() {
                "grevlex" => OrderKind::Grevlex,
                "grlex" => OrderKind::Grlex,
                "lex" => OrderKind::Lex,
                other => return Err(Failure::new(EXIT_USAGE, format!("unknown order `{other}`"))),
            };
            let variants = Variant::parse_list(&variant)
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown variant `{variant}`")))?;
            let hidden = match hidden {
                Some(h) => Some(
                    sys.var_index(&h)
                        .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown variable `{h}`")))?,
                ),
                None => None,
            };
            let mut cfg = GenConfig {
                max_subset,
                order,
                variants,
                seed,
                hidden,
                reduce: !no_reduce,
                ..GenConfig::default()
            };
            if let Some(d) = delta {
                if !(d > 0.0 && d < 1.0) {
                    return Err(Failure::new(EXIT_USAGE, "--delta must lie in (0, 1)"));
                }
                cfg.magnitudes = vec![d];
            }
            let plan = generate(&sys, &cfg)?;
            if let Some(out) = out {
                write(&out, &emit_plan(&plan))?;
            }
            println!("{}", size_report(&plan));
            Ok(())
        }
        Command::Solve {
            plan,
            instance,
            tol,
            out,
        } => {
            let plan = load_plan_file(&plan)?;
            let coeffs = CoefficientAssignment::parse_json(&read(&instance)?)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", instance.display())))?;
            let sol = solve_instance(&plan, &coeffs, tol)?;
            let names = &plan.system.var_names;
            for r in &sol.roots {
                let coords: Vec<String> = names
                    .iter()
                    .zip(&r.point)
                    .map(|(n, z)| {
                        if z.im == 0.0 {
                            format!("{n}={:.12e}", z.re)
                        } else {
                            format!("{n}={:.12e}{:+.12e}i", z.re, z.im)
                        }
                    })
                    .collect();
                println!(
                    "{} residual={:.3e} {}",
                    coords.join(" "),
                    r.residual,
                    if r.is_real { "real" } else { "complex" }
                );
            }
            if let Some(out) = out {
                let mut s = serde_json::to_string_pretty(&sol).expect("serializable");
                s.push('\n');
                write(&out, &s)?;
            }
            Ok(())
        }
        Command::Bench {
            plan,
            trials,
            seed,
            report,
            tol,
            timing,
        } => {
            if trials == 0 {
                return Err(Failure::new(EXIT_USAGE, "--trials must be at least 1"));
            }
            let plan = load_plan_file(&plan)?;
            let generator = UnitNormal::for_plan(&plan, seed);
            let rep = benchmark(&plan, &generator, trials, tol, timing);
            if let Some(path) = report {
                write(&path, &rep.to_json())?;
            }
            println!(
                "trials {} mean log10 {:.3} median log10 {:.3} fail {:.2}%",
                rep.trials, rep.mean_log10, rep.median_log10, rep.fail_pct
            );
            Ok(())
        }
        Command::Compare {
            system,
            direction,
            trials,
            seed,
            am_out,
        } => {
            let sys = load_system(&system)?;
            let (am, res) = match direction {
                Direction::AmRes => {
                    let am = build_from_hint(&sys, seed)?;
                    let res = am_to_res(&am)?;
                    (am, res)
                }
                Direction::ResAm | Direction::ResAltAm => {
                    let variant = match direction {
                        Direction::ResAm => Variant::V1,
                        _ => Variant::V2,
                    };
                    let hidden = sys.action.as_ref().and_then(|h| sys.var_index(&h.action_var));
                    let cfg = GenConfig {
                        variants: vec![variant],
                        seed,
                        hidden,
                        ..GenConfig::default()
                    };
                    let res = generate(&sys, &cfg)?;
                    let am = res_to_am(&res)?;
                    (am, res)
                }
            };
            if let Some(path) = am_out {
                write(&path, &emit_am_plan(&am))?;
            }
            println!("resultant: {}", size_report(&res));
            let (r, c) = am.size();
            println!("action matrix: template {r}x{c}, basis size {}", am.basis.len());
            let rep = check_equivalence(&am, &res, trials, seed);
            print_equivalence(&rep);
            if rep.equivalent {
                Ok(())
            } else {
                Err(Failure::new(EXIT_NUMERIC, "plans are not equivalent"))
            }
        }
        Command::Library { name } => match name {
            None => {
                for (n, summary) in library::entries() {
                    println!("{n:16} {summary}");
                }
                Ok(())
            }
            Some(n) => {
                let text = library::source(&n)
                    .ok_or_else(|| Failure::new(EXIT_USAGE, format!("no built-in system `{n}`")))?;
                print!("{text}");
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
