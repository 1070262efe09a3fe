use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use cone_yamabe::dynamics;
use cone_yamabe::geometry::ConeParams;
use cone_yamabe::ode::{self, PortraitSpec};
use cone_yamabe::scenario::{self, Scenario, ScenarioParams, ScenarioSource};

use cone_yamabe_cli::emit;
use cone_yamabe_cli::error::{CliError, CliResult};
use cone_yamabe_cli::json::{render_text, Value};
use cone_yamabe_cli::report;
use cone_yamabe_cli::verify;

/// Closed-form constants, linear mode analysis and phase-plane dynamics on
/// product-sphere cones.
#[derive(Parser)]
#[command(name = "cone-yamabe", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConeArgs {
    /// Dimension of the first sphere factor
    #[arg(long)]
    p: u32,
    /// Dimension of the second sphere factor
    #[arg(long)]
    q: u32,
    /// Radius of the first sphere factor
    #[arg(long)]
    rp: f64,
    /// Radius of the second sphere factor
    #[arg(long)]
    rq: f64,
}

impl ConeArgs {
    fn build(&self) -> CliResult<ConeParams> {
        Ok(ConeParams::new(self.p, self.q, self.rp, self.rq)?)
    }
}

/// Where classify/phase/portrait take their parameters from: a built-in
/// figure scenario, a config file, or explicit cone parameters.
#[derive(Args)]
struct SourceArgs {
    /// Built-in scenario name (see `scenarios`)
    #[arg(long, conflicts_with_all = ["config", "p", "q", "rp", "rq", "alpha", "q_coef"])]
    scenario: Option<String>,
    /// Path to a key=value configuration file
    #[arg(long, conflicts_with_all = ["p", "q", "rp", "rq", "alpha", "q_coef"])]
    config: Option<PathBuf>,
    #[arg(long, requires_all = ["q", "rp", "rq", "alpha", "q_coef"])]
    p: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    rp: Option<f64>,
    #[arg(long)]
    rq: Option<f64>,
    /// Nonlinearity exponent, 1 < alpha <= (n+2)/(n-2)
    #[arg(long)]
    alpha: Option<f64>,
    /// Sign-carrying constant on the nonlinear term
    #[arg(long = "Q", allow_hyphen_values = true)]
    q_coef: Option<f64>,
}

impl SourceArgs {
    fn resolve(&self) -> CliResult<Scenario> {
        if let Some(name) = &self.scenario {
            return scenario::find_figure(name).ok_or_else(|| {
                CliError::Validation(format!(
                    "unknown scenario {name:?}; run `cone-yamabe scenarios` for the list"
                ))
            });
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            return Ok(scenario::parse_config(&text)?);
        }
        match (self.p, self.q, self.rp, self.rq, self.alpha, self.q_coef) {
            (Some(p), Some(q), Some(rp), Some(rq), Some(alpha), Some(q_coef)) => {
                let cone = ConeParams::new(p, q, rp, rq)?;
                dynamics::dyn_params(&cone, alpha, q_coef)?;
                Ok(Scenario {
                    name: "cli".to_string(),
                    source: ScenarioSource::UserConfig,
                    params: ScenarioParams::Cone {
                        cone,
                        alpha,
                        q_coef,
                    },
                    notes: String::new(),
                })
            }
            _ => Err(CliError::Validation(
                "provide --scenario NAME, --config PATH, or the full parameter set \
                 --p --q --rp --rq --alpha --Q"
                    .to_string(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form geometric constants of a cone
    Geometry {
        #[command(flatten)]
        cone: ConeArgs,
        /// Also evaluate curvature and volume density at this radius
        #[arg(long)]
        ell: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Mode table with coupling constants, exponents and memberships
    Spectral {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, default_value_t = 3)]
        imax: u32,
        #[arg(long, default_value_t = 3)]
        jmax: u32,
        /// Sign of the total-curvature integral, when known
        #[arg(long)]
        integral_r_positive: Option<bool>,
        #[arg(long)]
        json: bool,
    },
    /// Power-series solution of one mode on the upper indicial branch
    Series {
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, default_value_t = 0)]
        i: u32,
        #[arg(long, default_value_t = 0)]
        j: u32,
        /// Spectral parameter multiplying the zeroth-order term
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        q1: f64,
        /// Number of retained even-order corrections
        #[arg(long, default_value_t = cone_yamabe::spectral::DEFAULT_TRUNCATION)]
        terms: usize,
        /// Evaluation radii (repeatable)
        #[arg(long)]
        ell: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Case classification with equilibria and the solution-family table
    Classify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        json: bool,
    },
    /// Numerical verification of the local dynamics: shooting and, in the
    /// critical regime, first-integral conservation
    Phase {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Launch offset along each eigendirection
        #[arg(long, default_value_t = 1e-7)]
        offset: f64,
        #[arg(long)]
        json: bool,
    },
    /// Integrate a grid of seeds and emit the orbits
    Portrait {
        #[command(flatten)]
        source: SourceArgs,
        /// Seed grid as NXxNY
        #[arg(long, default_value = "8x8")]
        grid: String,
        /// x seed range as LO:HI (default derived from the equilibria)
        #[arg(long, allow_hyphen_values = true)]
        xrange: Option<String>,
        /// y seed range as LO:HI
        #[arg(long, allow_hyphen_values = true)]
        yrange: Option<String>,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write one CSV row per trajectory sample
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write an SVG rendering of the portrait
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the numerical verification suites
    Verify {
        /// identities | series | sobolev | modes | conservation | dynamics | all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Random draws for the identity suite
        #[arg(long, default_value_t = 10_000)]
        draws: u64,
    },
    /// List the built-in figure scenarios
    Scenarios {
        #[arg(long)]
        json: bool,
    },
}

fn print_report(value: &Value, json: bool) {
    if json {
        print!("{}", value.render());
    } else {
        print!("{}", render_text(value));
    }
}

fn parse_pair(text: &str, sep: char, what: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = text.split(sep).collect();
    if parts.len() != 2 {
        return Err(CliError::Validation(format!(
            "{what} must have the form LO{sep}HI, got {text:?}"
        )));
    }
    let lo = parts[0]
        .parse::<f64>()
        .map_err(|_| CliError::Validation(format!("{what}: {:?} is not a number", parts[0])))?;
    let hi = parts[1]
        .parse::<f64>()
        .map_err(|_| CliError::Validation(format!("{what}: {:?} is not a number", parts[1])))?;
    Ok((lo, hi))
}

fn parse_grid(text: &str) -> CliResult<(u32, u32)> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return Err(CliError::Validation(format!(
            "grid must have the form NXxNY, got {text:?}"
        )));
    }
    let nx = parts[0]
        .parse::<u32>()
        .map_err(|_| CliError::Validation(format!("grid: {:?} is not an integer", parts[0])))?;
    let ny = parts[1]
        .parse::<u32>()
        .map_err(|_| CliError::Validation(format!("grid: {:?} is not an integer", parts[1])))?;
    Ok((nx, ny))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Geometry { cone, ell, json } => {
            let cone = cone.build()?;
            if let Some(w) = cone.dimension_warning() {
                eprintln!("warning: {w}");
            }
            print_report(&report::geometry_report(&cone, ell)?, json);
        }
        Command::Spectral {
            cone,
            imax,
            jmax,
            integral_r_positive,
            json,
        } => {
            let cone = cone.build()?;
            print_report(
                &report::spectral_report(&cone, imax, jmax, integral_r_positive)?,
                json,
            );
        }
        Command::Series {
            cone,
            i,
            j,
            q1,
            terms,
            ell,
            json,
        } => {
            let cone = cone.build()?;
            print_report(&report::series_report(&cone, i, j, q1, terms, &ell)?, json);
        }
        Command::Classify { source, json } => {
            let scenario = source.resolve()?;
            print_report(&report::classify_report(&scenario)?, json);
        }
        Command::Phase {
            source,
            tol,
            offset,
            json,
        } => {
            let scenario = source.resolve()?;
            print_report(&report::phase_report(&scenario, tol, offset)?, json);
        }
        Command::Portrait {
            source,
            grid,
            xrange,
            yrange,
            tmax,
            tol,
            csv,
            svg,
            json,
        } => {
            let scenario = source.resolve()?;
            let dp = scenario.dyn_params()?;
            let (nx, ny) = parse_grid(&grid)?;
            let x_range = match xrange {
                Some(text) => parse_pair(&text, ':', "--xrange")?,
                None => (0.0, 2.0 * dp.x2().unwrap_or(1.0).max(0.5)),
            };
            let y_range = match yrange {
                Some(text) => parse_pair(&text, ':', "--yrange")?,
                None => {
                    let speed = (dp.a_bar.abs().sqrt() + dp.b_bar.abs()).max(1.0);
                    let m = 0.75 * speed * x_range.1.max(1e-3);
                    (-m, m)
                }
            };
            let spec = PortraitSpec {
                x_range,
                y_range,
                nx,
                ny,
                t_max: tmax,
                tol,
            };
            let trajectories = ode::sample_portrait(&dp, &spec)?;
            if let Some(path) = &csv {
                write_file(path, &emit::portrait_csv(&trajectories))?;
            }
            if let Some(path) = &svg {
                write_file(path, &emit::portrait_svg(&spec, &trajectories))?;
            }
            print_report(&report::portrait_summary(&spec, &trajectories), json);
        }
        Command::Verify { suite, draws } => {
            let reports = verify::run_suites(&suite, draws)?;
            let mut all_passed = true;
            for suite_report in &reports {
                for check in &suite_report.checks {
                    println!("{}", check.line());
                    all_passed &= check.passed;
                }
            }
            if !all_passed {
                return Err(CliError::Numerical(
                    "one or more verification checks exceeded tolerance".to_string(),
                ));
            }
        }
        Command::Scenarios { json } => {
            print_report(&report::scenarios_report(), json);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are successful outcomes; everything else
            // is a usage problem and exits with the validation code
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
