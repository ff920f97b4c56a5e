//! `tacert` command-line front end.
//!
//! Every subcommand writes a `tacert-report` record (or, for `coeffs`, one
//! `index value` line per coefficient) to stdout or `--output`. Exit codes:
//! 0 when the property holds or the solve succeeded, 1 when a property is
//! numerically violated, 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tacert::certify::{starlike_suite, Suite, SuiteConfig};
use tacert::matrix::{fmt_f64, SymMatrix};
use tacert::maxcut::{brute_force_opt, graph_to_objective, Graph, ObjectiveForm};
use tacert::report::CertificateReport;
use tacert::sdp::{elliptope_maximize, SdpOptions};
use tacert::series::{taylor_coeffs, DEFAULT_MAX_ORDER};
use tacert::trig::{starlike_ray_scan, ta_membership, TaCandidate, DEFAULT_GRID};
use tacert::Error;

const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_ROUNDING_SAMPLES: usize = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "tacert",
    version,
    about = "Numerical certificates for the trigonometric approximation of the cut polytope"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// PSD tolerance on minimum eigenvalues.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of lambda grid points.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Sample count (suite samples, or rounding draws for `solve --method round`).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Highest Taylor coefficient index.
    #[arg(long, global = true)]
    max_order: Option<usize>,
    /// Columns of the SDP Gram factor (default n).
    #[arg(long, global = true)]
    rank: Option<usize>,
    /// Independent SDP starts.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test whether a unit-diagonal matrix lies in TA.
    Membership { file: PathBuf },
    /// Scan the segment from TA points to the identity.
    Starlike {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        file: Option<PathBuf>,
        /// Sample COUNT points f(X) with X an n x n elliptope point.
        #[arg(long, num_args = 2, value_names = ["N", "COUNT"])]
        random: Option<Vec<usize>>,
    },
    /// Print the Taylor coefficients of sin(lambda * asin x).
    Coeffs {
        lambda: f64,
        /// Highest index; overrides --max-order.
        order: Option<usize>,
    },
    /// Maximize over cuts of a graph in Rudy format.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        /// `cut` maximizes the cut weight, `quadratic` maximizes x^T W x.
        #[arg(long, value_enum, default_value_t = Objective::Cut)]
        objective: Objective,
    },
    /// Run a named certification suite.
    Verify { suite: String },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Method {
    Brute,
    Sdp,
    Round,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Objective {
    Cut,
    Quadratic,
}

/// Failure that maps to an exit code.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    validate(&cli.opts)?;
    match &cli.command {
        Command::Membership { file } => membership(file, &cli.opts),
        Command::Starlike { file, random } => starlike(file.as_deref(), random.as_deref(), &cli.opts),
        Command::Coeffs { lambda, order } => coeffs(*lambda, *order, &cli.opts),
        Command::Solve {
            graph,
            method,
            objective,
        } => solve(graph, *method, *objective, &cli.opts),
        Command::Verify { suite } => verify(suite, &cli.opts),
    }
}

fn validate(o: &GlobalOpts) -> Result<(), Failure> {
    let bad = |msg: &str| Err(Failure::Usage(msg.to_string()));
    if o.tol.is_some_and(|t| !t.is_finite() || t < 0.0) {
        return bad("--tol must be a finite nonnegative number");
    }
    if o.grid.is_some_and(|g| g < 2) {
        return bad("--grid must be at least 2");
    }
    if o.samples == Some(0) {
        return bad("--samples must be positive");
    }
    if o.rank == Some(0) {
        return bad("--rank must be positive");
    }
    if o.restarts == Some(0) {
        return bad("--restarts must be positive");
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn load_matrix(path: &Path) -> Result<SymMatrix, Failure> {
    SymMatrix::parse(&read(path)?).map_err(|e| with_path(path, e))
}

fn emit(text: &str, o: &GlobalOpts) -> Result<(), Failure> {
    match &o.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(report: &CertificateReport, o: &GlobalOpts) -> CmdResult {
    emit(&report.to_text(), o)?;
    for w in report.witnesses().take(10) {
        eprintln!(
            "witness {} param {} value {}",
            w.label,
            fmt_f64(w.param),
            fmt_f64(w.value)
        );
    }
    Ok(report.pass)
}

fn sdp_options(o: &GlobalOpts) -> SdpOptions {
    let defaults = SdpOptions::default();
    SdpOptions {
        rank: o.rank,
        restarts: o.restarts.unwrap_or(defaults.restarts),
        ..defaults
    }
}

fn membership(file: &Path, o: &GlobalOpts) -> CmdResult {
    let candidate = TaCandidate::new(load_matrix(file)?).map_err(|e| with_path(file, e))?;
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    let v = ta_membership(&candidate, tol)?;
    let mut report = CertificateReport::new("membership");
    report.note("n", candidate.n());
    report.note("in_ta", v.in_ta);
    report.note_f64("preimage_min_eigenvalue", v.preimage_min_eigenvalue);
    report.note_f64("tol", tol);
    report.note("clamped", candidate.clamped());
    report.push_point("preimage", 0.0, v.preimage_min_eigenvalue, v.in_ta);
    emit_report(&report, o)
}

fn starlike(file: Option<&Path>, random: Option<&[usize]>, o: &GlobalOpts) -> CmdResult {
    let grid = o.grid.unwrap_or(DEFAULT_GRID);
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    if let Some(&[n, count]) = random {
        if n == 0 || count == 0 {
            return Err(Failure::Usage("--random needs positive N and COUNT".into()));
        }
        let report = starlike_suite(o.seed, count, &[n], grid, tol)?;
        return emit_report(&report, o);
    }
    let file = file.ok_or_else(|| Failure::Usage("a matrix file or --random N COUNT is required".into()))?;
    let candidate = TaCandidate::new(load_matrix(file)?).map_err(|e| with_path(file, e))?;
    let scan = match starlike_ray_scan(&candidate, grid, tol) {
        Err(e @ Error::NotInTa { .. }) => return Err(with_path(file, e)),
        other => other?,
    };
    let mut report = CertificateReport::new("starlike");
    report.grid = scan.lambda_grid.clone();
    report.note("n", candidate.n());
    report.note_f64("tol", tol);
    report.note_f64("min_eigenvalue", scan.min_eigenvalue());
    scan.record_into(&mut report, "input");
    emit_report(&report, o)
}

fn coeffs(lambda: f64, order: Option<usize>, o: &GlobalOpts) -> CmdResult {
    let max_order = order.or(o.max_order).unwrap_or(DEFAULT_MAX_ORDER);
    let table = taylor_coeffs(lambda, max_order)?;
    let text: String = table
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{i} {}\n", fmt_f64(*c)))
        .collect();
    emit(&text, o)?;
    Ok(true)
}

fn solve(path: &Path, method: Method, objective: Objective, o: &GlobalOpts) -> CmdResult {
    let graph = Graph::parse_rudy(&read(path)?).map_err(|e| with_path(path, e))?;
    let form = match objective {
        Objective::Cut => ObjectiveForm::CutValue,
        Objective::Quadratic => ObjectiveForm::Quadratic,
    };
    let inst = graph_to_objective(&graph, form)?;
    let mut report = CertificateReport::new(match method {
        Method::Brute => "solve-brute",
        Method::Sdp => "solve-sdp",
        Method::Round => "solve-round",
    });
    report.note("n", inst.n());
    report.note("edges", graph.edges.len());
    let signs = |x: &[i8]| x.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect::<String>();
    match method {
        Method::Brute => {
            let r = brute_force_opt(&inst)?;
            report.note_f64("optimum", r.optimum);
            report.note("cut", signs(&r.argmax));
            report.note("evaluations", r.evaluations);
        }
        Method::Sdp | Method::Round => {
            let sol = elliptope_maximize(&inst, &sdp_options(o), o.seed)?;
            report.seeds.push(o.seed);
            report.note_f64("sdp_value", sol.value);
            report.note("converged", sol.convergence.converged);
            report.note("iterations", sol.convergence.iterations);
            report.note_f64("gradient_norm", sol.convergence.gradient_norm);
            if let Method::Round = method {
                let samples = o.samples.unwrap_or(DEFAULT_ROUNDING_SAMPLES);
                let r = sol.round(&inst, samples, o.seed)?;
                report.note("samples", samples);
                if let (Some(v), Some(cut)) = (r.best_value, r.best_cut.as_deref()) {
                    report.note_f64("best_value", v);
                    report.note("cut", signs(cut));
                }
            }
        }
    }
    emit_report(&report, o)
}

fn verify(name: &str, o: &GlobalOpts) -> CmdResult {
    let suite: Suite = name.parse()?;
    let cfg = SuiteConfig {
        seed: o.seed,
        samples: o.samples,
        grid: o.grid,
        tol: o.tol,
        max_order: o.max_order,
        sdp: sdp_options(o),
    };
    let report = suite.run(&cfg)?;
    emit_report(&report, o)
}
