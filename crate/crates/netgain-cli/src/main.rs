use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use netgain::{
    critical_scale, hinf_network, hinf_sweep, is_psd, lmi_feasible, log_grid, port_matrix,
    psd_check, solve, sym_eig, AllocateError, AllocationProblem, HinfError,
    NetworkSystem, SignedError, SolverOptions, TolerancePolicy,
};
use netgain_cli::input::NetworkFile;
use netgain_cli::report::{format_g, report, tolerance_echo, Value};

/// Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input
/// error, 3 port disconnection, 4 solver infeasibility.
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DISCONNECTED: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "netgain",
    version,
    about = "Gain analysis, weight allocation, and signed-Laplacian tests for flow networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Absolute PSD slack override (default: 1e-9 * max(1, |lambda|_max))
    #[arg(long, global = true)]
    tol_psd: Option<f64>,

    /// Absolute rank cutoff override (default: n * eps * |lambda|_max)
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Components, Laplacian spectrum, gain, and per-port bounds
    Analyze { file: PathBuf },
    /// Minimize the gain over the budget simplex
    Allocate {
        file: PathBuf,
        /// Total edge-weight budget (must be positive)
        #[arg(long)]
        budget: f64,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        /// Seed of the solver's perturbation restarts
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Signed-Laplacian semidefiniteness report
    Psd { file: PathBuf },
    /// Frequency sweep written as CSV (omega, sigma_max)
    Sweep {
        file: PathBuf,
        /// Total number of samples including omega = 0
        #[arg(long, default_value_t = 401)]
        points: usize,
        /// Upper end of the log-spaced grid (default: 1e3 * lambda_max)
        #[arg(long)]
        wmax: Option<f64>,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gain LMI feasibility at a fixed gamma
    Lmi {
        file: PathBuf,
        #[arg(long)]
        gamma: f64,
    },
}

struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<netgain::GraphError> for CmdError {
    fn from(e: netgain::GraphError) -> Self {
        CmdError::input(e.to_string())
    }
}

impl From<netgain::SpectralError> for CmdError {
    fn from(e: netgain::SpectralError) -> Self {
        CmdError::input(e.to_string())
    }
}

impl From<HinfError> for CmdError {
    fn from(e: HinfError) -> Self {
        let code = match e {
            HinfError::PortsDisconnected(_) => EXIT_DISCONNECTED,
            _ => EXIT_INPUT,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SignedError> for CmdError {
    fn from(e: SignedError) -> Self {
        let code = match e {
            SignedError::ProbeDisconnected { .. } => EXIT_DISCONNECTED,
            _ => EXIT_INPUT,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<AllocateError> for CmdError {
    fn from(e: AllocateError) -> Self {
        let code = match &e {
            AllocateError::Infeasible(_) | AllocateError::InfiniteObjective => EXIT_INFEASIBLE,
            AllocateError::Hinf(inner) => {
                return CmdError {
                    code: match inner {
                        HinfError::PortsDisconnected(_) => EXIT_DISCONNECTED,
                        _ => EXIT_INPUT,
                    },
                    message: e.to_string(),
                }
            }
            _ => EXIT_INPUT,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match TolerancePolicy::new(cli.tol_rank, cli.tol_psd) {
        Ok(tol) => tol,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let outcome = match cli.command {
        Command::Analyze { file } => cmd_analyze(&file, &tol),
        Command::Allocate {
            file,
            budget,
            max_iters,
            seed,
        } => cmd_allocate(&file, budget, max_iters, seed, &tol),
        Command::Psd { file } => cmd_psd(&file, &tol),
        Command::Sweep {
            file,
            points,
            wmax,
            out,
        } => cmd_sweep(&file, points, wmax, out.as_deref(), &tol),
        Command::Lmi { file, gamma } => cmd_lmi(&file, gamma, &tol),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct LoadedFile {
    digest: String,
    network: NetworkFile,
}

fn load(path: &std::path::Path) -> Result<LoadedFile, CmdError> {
    let bytes = fs::read(path)
        .map_err(|e| CmdError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest: String = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    let text = String::from_utf8(bytes)
        .map_err(|e| CmdError::input(format!("{} is not UTF-8: {e}", path.display())))?;
    let network = NetworkFile::parse(&text)
        .map_err(|e| CmdError::input(format!("cannot parse {}: {e}", path.display())))?;
    Ok(LoadedFile {
        digest: format!("sha256:{digest}"),
        network,
    })
}

fn cmd_analyze(path: &std::path::Path, tol: &TolerancePolicy) -> Result<u8, CmdError> {
    let loaded = load(path)?;
    let graph = loaded.network.graph()?;
    let ports = loaded.network.ports();
    let sys = NetworkSystem::new(graph.clone(), &ports)?;
    let l = graph.laplacian();
    let dec = sym_eig(&l)?;
    let cert = hinf_network(&sys, tol)?;

    let components = graph.connected_components(|e| e.w > 0.0).groups();
    let connected = components.len() == 1;
    let e = sys.port_matrix().as_matrix();
    let bounds: Vec<Value> = ports
        .iter()
        .map(|p| {
            if !connected {
                return Value::Null;
            }
            let single = port_matrix(std::slice::from_ref(p), graph.vertex_count())
                .expect("port validated at system construction");
            let ej = single.as_matrix();
            match netgain::corollary_bound(&l, ej, &ej.transpose(), tol) {
                Ok(b) => Value::Num(b),
                Err(_) => Value::Null,
            }
        })
        .collect();

    let results = Value::Object(vec![
        ("vertex_count", Value::Int(graph.vertex_count() as i64)),
        ("edge_count", Value::Int(graph.edge_count() as i64)),
        ("port_count", Value::Int(e.ncols() as i64)),
        (
            "components",
            Value::Array(
                components
                    .iter()
                    .map(|group| {
                        Value::Array(group.iter().map(|&v| Value::Int(v as i64)).collect())
                    })
                    .collect(),
            ),
        ),
        (
            "spectrum",
            Value::num_array(dec.eigenvalues().iter().copied()),
        ),
        ("gamma", Value::Num(cert.gamma)),
        ("lmi_margin", Value::Num(cert.lmi_margin)),
        ("corollary_bounds", Value::Array(bounds)),
    ]);
    print!(
        "{}",
        report(
            "analyze",
            loaded.digest,
            tolerance_echo(tol.psd_tol(), tol.rank_tol()),
            results
        )
    );
    Ok(0)
}

fn cmd_allocate(
    path: &std::path::Path,
    budget: f64,
    max_iters: usize,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<u8, CmdError> {
    if !budget.is_finite() || budget <= 0.0 {
        return Err(CmdError::input(format!(
            "--budget must be positive and finite (got {budget})"
        )));
    }
    let loaded = load(path)?;
    let graph = loaded.network.graph()?;
    let ports = loaded.network.ports();
    let problem = AllocationProblem::new(graph, ports, budget)?;
    let opts = SolverOptions {
        max_iters,
        seed,
        ..SolverOptions::default()
    };
    let result = solve(&problem, &opts, tol)?;

    let results = Value::Object(vec![
        ("budget", Value::Num(budget)),
        (
            "weights",
            Value::num_array(result.weights.iter().copied()),
        ),
        ("gamma", Value::Num(result.gamma)),
        ("iterations", Value::Int(result.iterations as i64)),
        ("best_gap", Value::Num(result.best_gap)),
        (
            "certificate_margin",
            Value::Num(result.certificate.lmi_margin),
        ),
    ]);
    print!(
        "{}",
        report(
            "allocate",
            loaded.digest,
            tolerance_echo(tol.psd_tol(), tol.rank_tol()),
            results
        )
    );
    Ok(0)
}

fn cmd_psd(path: &std::path::Path, tol: &TolerancePolicy) -> Result<u8, CmdError> {
    let loaded = load(path)?;
    let graph = loaded.network.graph()?;
    let verdict = psd_check(&graph, tol)?;
    let direct = is_psd(&graph.laplacian(), tol)?;
    // A negative edge across components breaks PSD at any scale, so the
    // supremum of safe scalings collapses to zero.
    let rho = if verdict.condition1 {
        critical_scale(&graph, tol)?
    } else {
        0.0
    };

    let slack_rows: Vec<Value> = (0..verdict.slack.nrows())
        .map(|i| Value::num_array(verdict.slack.row(i).iter().copied()))
        .collect();
    let results = Value::Object(vec![
        ("condition1", Value::Bool(verdict.condition1)),
        ("condition2", Value::Bool(verdict.condition2)),
        ("slack", Value::Array(slack_rows)),
        ("slack_lambda_min", Value::Num(verdict.slack_lambda_min)),
        ("critical_scale", Value::Num(rho)),
        ("lambda_min", Value::Num(direct.lambda_min)),
        ("psd", Value::Bool(direct.psd)),
    ]);
    print!(
        "{}",
        report(
            "psd",
            loaded.digest,
            tolerance_echo(tol.psd_tol(), tol.rank_tol()),
            results
        )
    );
    Ok(if direct.psd { 0 } else { EXIT_NEGATIVE })
}

fn cmd_sweep(
    path: &std::path::Path,
    points: usize,
    wmax: Option<f64>,
    out: Option<&std::path::Path>,
    tol: &TolerancePolicy,
) -> Result<u8, CmdError> {
    let loaded = load(path)?;
    let graph = loaded.network.graph()?;
    let ports = loaded.network.ports();
    let sys = NetworkSystem::new(graph.clone(), &ports)?;
    let l = graph.laplacian();
    let e = sys.port_matrix().as_matrix();
    let c = e.transpose();
    let grid = log_grid(&l, points, wmax, tol)?;
    let sweep = hinf_sweep(&l, e, &c, &grid, tol)?;

    let mut csv = String::from("omega,sigma_max\n");
    for (omega, sigma) in &sweep.samples {
        csv.push_str(&format_g(*omega, 12));
        csv.push(',');
        csv.push_str(&format_g(*sigma, 12));
        csv.push('\n');
    }
    match out {
        Some(path) => fs::write(path, csv)
            .map_err(|e| CmdError::input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_lmi(path: &std::path::Path, gamma: f64, tol: &TolerancePolicy) -> Result<u8, CmdError> {
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(CmdError::input(format!(
            "--gamma must be nonnegative and finite (got {gamma})"
        )));
    }
    let loaded = load(path)?;
    let graph = loaded.network.graph()?;
    let ports = loaded.network.ports();
    let e = port_matrix(&ports, graph.vertex_count())?;
    let out = lmi_feasible(&graph.laplacian(), e.as_matrix(), gamma, tol)?;

    let results = Value::Object(vec![
        ("gamma", Value::Num(gamma)),
        ("feasible", Value::Bool(out.feasible)),
        ("lambda_min", Value::Num(out.lambda_min)),
    ]);
    print!(
        "{}",
        report(
            "lmi",
            loaded.digest,
            tolerance_echo(tol.psd_tol(), tol.rank_tol()),
            results
        )
    );
    Ok(if out.feasible { 0 } else { EXIT_NEGATIVE })
}
