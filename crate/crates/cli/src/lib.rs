//! Load a Matrix Market system, build the preconditioner, solve with FGMRES
//! and report the statistics as JSON.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hilucsi::{build_preconditioner, fgmres, read_matrix_market, GmresOptions, MatrixSymmetry, SolverOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "hilucsi", version, about = "Multilevel ILDU preconditioned FGMRES on Matrix Market systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the preconditioner for a matrix and solve one system.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymmLevels {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Auto,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Matrix Market file (coordinate, real, general or symmetric).
    pub matrix: PathBuf,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub symm_levels: SymmLevels,
    #[arg(long, default_value_t = 30)]
    pub restart: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
    #[arg(long, default_value_t = 500)]
    pub maxit: usize,
    /// Right-hand side (Matrix Market vector or whitespace-separated values);
    /// defaults to `A * ones`.
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Append the report as a CSV row, writing a header for a new file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Start from tau = 1e-2, alpha = 3, kappa = 5; explicit flags still win.
    #[arg(long)]
    pub optimized_saddle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub tau: f64,
    pub alpha: f64,
    pub kappa: f64,
    /// `null` for automatic selection.
    pub symm_levels: Option<usize>,
    pub symm_levels_used: usize,
    pub restart: usize,
    pub rtol: f64,
    pub maxit: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub matrix_name: String,
    pub n: usize,
    pub nnz_input: usize,
    pub factor_seconds: f64,
    pub total_seconds: f64,
    pub gmres_iterations: usize,
    pub relative_residual: f64,
    pub nnz_ratio: f64,
    pub levels: usize,
    pub converged: bool,
    pub parameters: Parameters,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    matrix_name: &'a str,
    n: usize,
    nnz_input: usize,
    factor_seconds: f64,
    total_seconds: f64,
    gmres_iterations: usize,
    relative_residual: f64,
    nnz_ratio: f64,
    levels: usize,
    converged: bool,
    tau: f64,
    alpha: f64,
    kappa: f64,
    symm_levels_used: usize,
    restart: usize,
    rtol: f64,
    maxit: usize,
}

#[derive(Debug)]
pub enum RunError {
    /// Unreadable or malformed input; exit status 2.
    Input(String),
    /// The build or solve failed; exit status 1.
    Solver(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 2,
            RunError::Solver(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Input(m) => write!(f, "input error: {m}"),
            RunError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

fn solver_options(args: &SolveArgs) -> SolverOptions {
    let base = if args.optimized_saddle { SolverOptions::optimized_saddle() } else { SolverOptions::default() };
    SolverOptions {
        tau0: args.tau.unwrap_or(base.tau0),
        alpha0: args.alpha.unwrap_or(base.alpha0),
        kappa0: args.kappa.unwrap_or(base.kappa0),
        symm_pre_levels: match args.symm_levels {
            SymmLevels::Zero => Some(0),
            SymmLevels::One => Some(1),
            SymmLevels::Two => Some(2),
            SymmLevels::Auto => None,
        },
        restart: args.restart,
        rtol: args.rtol,
        maxit: args.maxit,
        ..base
    }
}

/// Reads a dense vector: Matrix Market `array` or `coordinate` (`n x 1`),
/// or plain whitespace-separated numbers.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = BufReader::new(file).lines();
    let first = match lines.next() {
        Some(l) => l.map_err(|e| e.to_string())?,
        None => return Ok(Vec::new()),
    };
    let header = first.to_ascii_lowercase();
    if header.starts_with("%%matrixmarket") && header.contains("coordinate") {
        let (m, _) = read_matrix_market(path).map_err(|e| e.to_string())?;
        if m.n_cols() != 1 {
            return Err(format!("right-hand side has {} columns", m.n_cols()));
        }
        return Ok((0..m.n_rows()).map(|i| m.get(i, 0)).collect());
    }
    let is_array = header.starts_with("%%matrixmarket");
    let mut tokens = Vec::new();
    if !is_array {
        tokens.extend(first.split_whitespace().map(str::to_owned));
    }
    let mut size_seen = !is_array;
    for line in lines {
        let line = line.map_err(|e| e.to_string())?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if !size_seen {
            size_seen = true;
            continue;
        }
        tokens.extend(t.split_whitespace().map(str::to_owned));
    }
    tokens
        .iter()
        .map(|s| s.parse::<f64>().map_err(|e| format!("bad value `{s}`: {e}")))
        .collect()
}

/// Runs one solve. A report is returned whether or not FGMRES converged.
pub fn solve(args: &SolveArgs) -> Result<RunReport, RunError> {
    let (a, symmetry) = read_matrix_market(&args.matrix).map_err(|e| RunError::Input(format!("{}: {e}", args.matrix.display())))?;
    if !a.is_square() || a.n_rows() == 0 {
        return Err(RunError::Input(format!("matrix is {}x{}", a.n_rows(), a.n_cols())));
    }
    let b = match &args.rhs {
        Some(p) => {
            let b = read_vector(p).map_err(RunError::Input)?;
            if b.len() != a.n_rows() {
                return Err(RunError::Input(format!("right-hand side has {} entries, matrix has {} rows", b.len(), a.n_rows())));
            }
            b
        }
        None => a.spmv(&vec![1.0; a.n_cols()]).map_err(|e| RunError::Input(e.to_string()))?,
    };
    let opts = solver_options(args);
    opts.validate().map_err(|e| RunError::Input(e.to_string()))?;

    let start = Instant::now();
    let m = build_preconditioner(&a, &opts, symmetry == MatrixSymmetry::Symmetric).map_err(|e| RunError::Solver(e.to_string()))?;
    let factor_seconds = start.elapsed().as_secs_f64();
    let gmres = GmresOptions {
        restart: opts.restart,
        rtol: opts.rtol,
        maxit: opts.maxit,
    };
    let (_, stats) = fgmres(&a, &b, &m, &gmres).map_err(|e| RunError::Solver(e.to_string()))?;
    let total_seconds = start.elapsed().as_secs_f64();

    let matrix_name = args
        .matrix
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(RunReport {
        matrix_name,
        n: a.n_rows(),
        nnz_input: a.nnz(),
        factor_seconds,
        total_seconds,
        gmres_iterations: stats.iterations,
        relative_residual: stats.relative_residual,
        nnz_ratio: m.nnz_ratio(),
        levels: m.num_levels(),
        converged: stats.converged,
        parameters: Parameters {
            tau: opts.tau0,
            alpha: opts.alpha0,
            kappa: opts.kappa0,
            symm_levels: opts.symm_pre_levels,
            symm_levels_used: m.symm_pre_levels,
            restart: opts.restart,
            rtol: opts.rtol,
            maxit: opts.maxit,
        },
    })
}

pub fn append_csv(path: &Path, r: &RunReport) -> Result<(), String> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    let p = &r.parameters;
    w.serialize(CsvRow {
        matrix_name: &r.matrix_name,
        n: r.n,
        nnz_input: r.nnz_input,
        factor_seconds: r.factor_seconds,
        total_seconds: r.total_seconds,
        gmres_iterations: r.gmres_iterations,
        relative_residual: r.relative_residual,
        nnz_ratio: r.nnz_ratio,
        levels: r.levels,
        converged: r.converged,
        tau: p.tau,
        alpha: p.alpha,
        kappa: p.kappa,
        symm_levels_used: p.symm_levels_used,
        restart: p.restart,
        rtol: p.rtol,
        maxit: p.maxit,
    })
    .map_err(|e| e.to_string())?;
    w.flush().map_err(|e| e.to_string())
}

/// Executes the parsed command and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve(args) => match solve(&args) {
            Ok(report) => {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
                if let Some(path) = &args.csv {
                    if let Err(e) = append_csv(path, &report) {
                        eprintln!("hilucsi: csv: {e}");
                        return 2;
                    }
                }
                if report.converged {
                    0
                } else {
                    eprintln!("hilucsi: no convergence after {} iterations", report.gmres_iterations);
                    1
                }
            }
            Err(e) => {
                eprintln!("hilucsi: {e}");
                e.exit_code()
            }
        },
    }
}
