use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use meshbound::bounds1d::{apriori_bound_1d, Growth1D};
use meshbound::boundsnd::apriori_bound_nd;
use meshbound::grid::{parse_domain, parse_mesh};
use meshbound::inequalities::{check_inequality, Inequality};
use meshbound::solver::{
    find, load_registry, solve_nonlinear, verify_solution, InitialGuess, Nonlinearity,
};
use meshbound::spectral::{distance_bound_check, eigen_oracle, first_eigenpair};
use meshbound::sweep::{run_sweep, write_outputs, SweepConfig, SweepMode};
use meshbound::Result;

#[derive(Parser)]
#[command(
    name = "meshbound",
    version,
    about = "Discrete elliptic bounds on boxes"
)]
struct Cli {
    /// Directory for output files; results are always printed as JSON
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Newton tolerance relative to max(1, ‖f‖∞)
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Subcritical,
    Supercritical,
}

#[derive(Subcommand)]
enum Command {
    /// First eigenpair, optionally against inverse iteration
    Eigen {
        /// e.g. 32x16 or 32x16@0:2,0:1
        #[arg(long)]
        mesh: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Randomized check of one inequality
    Verify {
        /// poincare, hardy, sobolev_n, sobolev_2_orlicz, sobolev_2_lp:<p>, hardy_sobolev:<a>,<b>
        #[arg(long)]
        inequality: String,
        #[arg(long)]
        mesh: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// One-dimensional bound on (-L, L) with f = g
    Bound1d {
        /// cubic_plus_one, power_plus_one:<p> or exp
        #[arg(long)]
        growth: String,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "L")]
        l: f64,
    },
    /// n-dimensional bound from growth constants
    Boundnd {
        /// e.g. 0:1,0:1
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "C1")]
        c1: f64,
        #[arg(long = "C2")]
        c2: f64,
        #[arg(long = "C3")]
        c3: f64,
    },
    /// Solve -Δu = f(x,u) for a registered nonlinearity
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        mesh: String,
        /// start from τφ instead of the default continuation
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Refinement sweep over uniform meshes
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        /// comma-separated points per axis, e.g. 8,16,32
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Subcritical)]
        mode: Mode,
    },
}

fn registry(path: &Path, id: &str) -> Result<Nonlinearity> {
    let reg = load_registry(BufReader::new(File::open(path)?))?;
    Ok(find(&reg, id)?.clone())
}

fn emit(out: Option<&Path>, name: &str, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{name}.json")), text + "\n")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Eigen { mesh, oracle } => {
            let mesh = parse_mesh(&mesh)?;
            let pair = first_eigenpair(&mesh);
            let oracle = if oracle {
                Some(eigen_oracle(&mesh)?)
            } else {
                None
            };
            let report = json!({
                "lambda1h": pair.lambda1h,
                "lambda1": pair.lambda1,
                "t_scale": pair.t_scale,
                "distance_ratio": distance_bound_check(&pair),
                "oracle": oracle,
            });
            emit(out, "eigen", &report)
        }
        Command::Verify {
            inequality,
            mesh,
            samples,
        } => {
            let mesh = parse_mesh(&mesh)?;
            let report =
                check_inequality(Inequality::parse(&inequality)?, &mesh, samples, cli.seed)?;
            emit(out, "verify", &report)
        }
        Command::Bound1d { growth, k, l } => {
            let g = Growth1D::by_name(&growth, k)?;
            let report = apriori_bound_1d(|_, s| g.g(s), &g, l)?;
            emit(out, "bound1d", &report)
        }
        Command::Boundnd {
            domain,
            p,
            lambda,
            c1,
            c2,
            c3,
        } => {
            let d = parse_domain(&domain)?;
            emit(
                out,
                "boundnd",
                &apriori_bound_nd(d.dim(), p, lambda, c1, c2, c3, &d)?,
            )
        }
        Command::Solve {
            config,
            id,
            mesh,
            tau,
        } => {
            let f = registry(&config, &id)?;
            let mesh = parse_mesh(&mesh)?;
            let init = InitialGuess::ScaledEigen(tau);
            let result = solve_nonlinear(&mesh, &f, init, cli.tol)?;
            let checks = verify_solution(&result, &f)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(dir)?;
                result
                    .u
                    .write_csv(File::create(dir.join("solution.csv"))?)?;
            }
            let report =
                json!({"id": id, "u_inf": result.u.max_abs(), "result": result, "checks": checks});
            emit(out, "solve", &report)
        }
        Command::Sweep {
            config,
            id,
            domain,
            sizes,
            mode,
        } => {
            let domain = parse_domain(&domain)?;
            let n = domain.dim();
            let cfg = SweepConfig {
                nonlinearity: registry(&config, &id)?,
                meshes: sizes.iter().map(|&s| vec![s; n]).collect(),
                domain,
                mode: match mode {
                    Mode::Subcritical => SweepMode::Subcritical,
                    Mode::Supercritical => SweepMode::Supercritical,
                },
                seed: cli.seed,
                tol: cli.tol,
            };
            let outcome = run_sweep(&cfg)?;
            write_outputs(&outcome, out.unwrap_or(Path::new(".")))?;
            emit(None, "sweep", &outcome)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
