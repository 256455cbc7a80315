//! `ctqw` — command-line front end for quantum-walk simulations on 1D
//! regular networks under dephasing: spectra, time evolution, mixing-time
//! reports, bound tables, and parameter sweeps, as CSV or JSON.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 numerical invariant
//! violation.

mod output;
mod range;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value as Json};

use ctqw::coherent::quantum_distribution;
use ctqw::large_decoherence::approx_distribution;
use ctqw::master_eq::{diagonal, evolve_to_times, init_density, SimConfig};
use ctqw::mixing::{
    bounds_average, bounds_instantaneous, mixing_report, tv_to_uniform, MixingReport,
    SearchConfig,
};
use ctqw::{Error as CtqwError, ProbabilityDist, RegularNetwork};
use output::{render, Cell, Format as OutFormat, Table};

/// Largest network the master-equation engine accepts.
const MASTER_EQ_MAX_N: usize = 512;

#[derive(Debug)]
enum AppError {
    /// Exit code 2.
    Param(String),
    /// Exit code 3.
    Invariant(String),
    /// Exit code 1.
    Io(std::io::Error),
}

impl From<CtqwError> for AppError {
    fn from(e: CtqwError) -> Self {
        match e {
            CtqwError::InvariantViolation(m) => AppError::Invariant(m),
            other => AppError::Param(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// Spectral closed forms: the coherent sum at gamma = 0, the
    /// large-decoherence distribution otherwise.
    #[value(name = "closed_form")]
    ClosedForm,
    /// Direct fixed-step integration of the dephasing master equation.
    #[value(name = "master_eq")]
    MasterEq,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed_form",
            Engine::MasterEq => "master_eq",
        }
    }
}

#[derive(Parser)]
#[command(name = "ctqw", version, about = "Quantum walks on 1D regular networks under dephasing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-mode table of angles, Laplacian rates, sine sums, and (with
    /// --gamma) the surviving large-decoherence decay rates.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        /// Decoherence rate; when absent the gamma3 column is empty.
        #[arg(long)]
        gamma: Option<f64>,
        /// Hopping amplitude (1/4 matches the master-equation convention).
        #[arg(long, default_value_t = 0.25)]
        g: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time series of node distributions in long format (t, node, p).
    Evolve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.25)]
        g: f64,
        /// Single sample time (mutually exclusive with --t-end).
        #[arg(long, conflicts_with = "t_end")]
        t: Option<f64>,
        /// Final time of a sampled series over [0, t_end].
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 0)]
        origin: usize,
        #[arg(long, value_enum, default_value_t = Engine::ClosedForm)]
        engine: Engine,
        /// Number of samples across [0, t_end].
        #[arg(long, default_value_t = 101)]
        grid_points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured mixing times plus all four analytic bounds, one row.
    Mixing {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        origin: usize,
        /// closed_form measures the analytic distribution (scan plus
        /// bisection); master_eq scans an integrated trajectory and
        /// interpolates the crossing (can be very slow).
        #[arg(long, value_enum, default_value_t = Engine::ClosedForm)]
        engine: Engine,
        /// Scan-grid density for the crossing search.
        #[arg(long, default_value_t = 2048)]
        grid_points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic bound formulas only.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mixing report over a parameter grid, long format. Ranges accept a
    /// scalar, a comma list (10,20,40), or a geometric range (10:40:x2).
    Sweep {
        #[arg(long)]
        n: String,
        #[arg(long)]
        l: String,
        #[arg(long)]
        gamma: String,
        #[arg(long, default_value = "0.01")]
        eps: String,
        #[arg(long, default_value_t = 0)]
        origin: usize,
        #[arg(long, default_value_t = 2048)]
        grid_points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Param(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(AppError::Invariant(m)) => {
            eprintln!("numerical invariant violated: {m}");
            ExitCode::from(3)
        }
        Err(AppError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn out_format(f: Format) -> OutFormat {
    match f {
        Format::Csv => OutFormat::Csv,
        Format::Json => OutFormat::Json,
    }
}

fn emit(
    table: &Table,
    format: Format,
    spec: Map<String, Json>,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    match out {
        Some(path) => {
            let mut f = File::create(path)?;
            render(table, out_format(format), &spec, &mut f)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            render(table, out_format(format), &spec, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn linspace(end: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points).map(|i| end * i as f64 / (points - 1) as f64).collect()
}

fn run(cmd: Cmd) -> Result<(), AppError> {
    match cmd {
        Cmd::Spectrum { n, l, gamma, g, format, out } => cmd_spectrum(n, l, gamma, g, format, out),
        Cmd::Evolve { n, l, gamma, g, t, t_end, origin, engine, grid_points, format, out } => {
            cmd_evolve(n, l, gamma, g, t, t_end, origin, engine, grid_points, format, out)
        }
        Cmd::Mixing { n, l, gamma, eps, origin, engine, grid_points, format, out } => {
            cmd_mixing(n, l, gamma, eps, origin, engine, grid_points, format, out)
        }
        Cmd::Bounds { n, l, gamma, eps, format, out } => cmd_bounds(n, l, gamma, eps, format, out),
        Cmd::Sweep { n, l, gamma, eps, origin, grid_points, format, out } => {
            cmd_sweep(&n, &l, &gamma, &eps, origin, grid_points, format, out)
        }
    }
}

fn cmd_spectrum(
    n: usize,
    l: usize,
    gamma: Option<f64>,
    g: f64,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    if let Some(gamma) = gamma {
        if !(gamma > 0.0) {
            return Err(AppError::Param(format!("need gamma > 0, got {gamma}")));
        }
    }
    let net = RegularNetwork::new(n, l)?;
    let sp = net.spectrum(g)?;
    let rows = (0..n)
        .map(|k| {
            vec![
                Cell::Int(k),
                Cell::Num(sp.thetas[k]),
                Cell::Num(sp.laplacian_rates[k]),
                Cell::Num(sp.sin2_sums[k]),
                Cell::from(gamma.map(|gm| sp.sin2_sums[k] / (2.0 * gm))),
            ]
        })
        .collect();
    let table = Table { columns: vec!["n", "theta", "lambda", "s", "gamma3"], rows };
    let mut spec = Map::new();
    spec.insert("command".into(), json!("spectrum"));
    spec.insert("n".into(), json!(n));
    spec.insert("l".into(), json!(l));
    spec.insert("gamma".into(), json!(gamma));
    spec.insert("g".into(), json!(g));
    emit(&table, format, spec, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    n: usize,
    l: usize,
    gamma: f64,
    g: f64,
    t: Option<f64>,
    t_end: Option<f64>,
    origin: usize,
    engine: Engine,
    grid_points: usize,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    let net = RegularNetwork::new(n, l)?;
    if origin >= n {
        return Err(AppError::Param(format!("origin {origin} out of range for n = {n}")));
    }
    if gamma < 0.0 {
        return Err(AppError::Param(format!("need gamma >= 0, got {gamma}")));
    }
    let times: Vec<f64> = match (t, t_end) {
        (Some(t), None) => vec![t],
        (None, Some(t_end)) => linspace(t_end, grid_points),
        _ => return Err(AppError::Param("exactly one of --t or --t-end is required".into())),
    };
    if times.iter().any(|&t| t < 0.0) {
        return Err(AppError::Param("sample times must be >= 0".into()));
    }

    let dists: Vec<ProbabilityDist> = match engine {
        Engine::ClosedForm => times
            .iter()
            .map(|&ti| {
                if gamma == 0.0 {
                    Ok(quantum_distribution(&net, g, ti, origin))
                } else {
                    approx_distribution(&net, gamma, ti, origin).map_err(AppError::from)
                }
            })
            .collect::<Result<_, _>>()?,
        Engine::MasterEq => {
            if n > MASTER_EQ_MAX_N {
                return Err(AppError::Param(format!(
                    "master_eq engine is limited to n <= {MASTER_EQ_MAX_N}, got {n}"
                )));
            }
            let rho0 = init_density(n, origin)?;
            let cfg = SimConfig::new(*times.last().unwrap());
            let traj = evolve_to_times(&net, gamma, &rho0, &times, &cfg)?;
            traj.iter().map(diagonal).collect()
        }
    };
    for (ti, d) in times.iter().zip(&dists) {
        let total = d.total();
        if (total - 1.0).abs() > 1e-6 {
            return Err(AppError::Invariant(format!(
                "distribution sums to {total} at t = {ti}"
            )));
        }
    }

    let rows = times
        .iter()
        .zip(&dists)
        .flat_map(|(&ti, d)| {
            d.values
                .iter()
                .enumerate()
                .map(move |(node, &p)| vec![Cell::Num(ti), Cell::Int(node), Cell::Num(p)])
                .collect::<Vec<_>>()
        })
        .collect();
    let table = Table { columns: vec!["t", "node", "p"], rows };
    let mut spec = Map::new();
    spec.insert("command".into(), json!("evolve"));
    spec.insert("n".into(), json!(n));
    spec.insert("l".into(), json!(l));
    spec.insert("gamma".into(), json!(gamma));
    spec.insert("g".into(), json!(g));
    spec.insert("t".into(), json!(t));
    spec.insert("t_end".into(), json!(t_end));
    spec.insert("origin".into(), json!(origin));
    spec.insert("engine".into(), json!(engine.name()));
    spec.insert("grid_points".into(), json!(grid_points));
    emit(&table, format, spec, out)
}

/// First-crossing time from tabulated TV samples, linearly interpolated
/// inside the bracketing interval.
fn crossing_from_samples(times: &[f64], tvs: &[f64], eps: f64) -> Option<f64> {
    if tvs.first().map_or(false, |&tv| tv <= eps) {
        return Some(0.0);
    }
    for i in 1..tvs.len() {
        if tvs[i] <= eps {
            let (t0, t1, v0, v1) = (times[i - 1], times[i], tvs[i - 1], tvs[i]);
            let frac = if v0 > v1 { (v0 - eps) / (v0 - v1) } else { 1.0 };
            return Some(t0 + frac * (t1 - t0));
        }
    }
    None
}

/// Mixing measurement against master-equation diagonals: one trajectory per
/// quantity, crossings read off the sample grid.
fn master_eq_mixing(
    net: &RegularNetwork,
    gamma: f64,
    eps: f64,
    origin: usize,
    grid_points: usize,
) -> Result<MixingReport, AppError> {
    let n = net.n();
    let mut report = mixing_report(net, gamma, eps, origin, &SearchConfig {
        grid_points,
        rel_tol: 1e-6,
    })?;

    // Instantaneous: scan TV of the diagonal over the closed-form cap.
    let t_cap_ins = (2.0 * gamma / net.min_sin2_sum()) * (2.0 * n as f64 / eps).ln();
    let times = linspace(t_cap_ins, grid_points);
    let rho0 = init_density(n, origin)?;
    let cfg = SimConfig::new(t_cap_ins);
    let traj = evolve_to_times(net, gamma, &rho0, &times, &cfg)?;
    let tvs: Vec<f64> = traj.iter().map(|s| tv_to_uniform(&diagonal(s))).collect();
    report.t_ins_measured = crossing_from_samples(&times, &tvs, eps);

    // Average: running trapezoid average of the diagonal. The closed-form
    // crossing sizes the integration window; without one, fall back to ten
    // times the analytic upper bound.
    let t_cap_ave = report.t_ave_measured.map_or(10.0 * report.ave_upper, |t| 2.0 * t);
    let times = linspace(t_cap_ave, grid_points);
    let cfg = SimConfig::new(t_cap_ave);
    let traj = evolve_to_times(net, gamma, &rho0, &times, &cfg)?;
    let mut acc = vec![0.0f64; n];
    let mut tvs = vec![tv_to_uniform(&diagonal(&traj[0]))];
    for i in 1..traj.len() {
        let h = times[i] - times[i - 1];
        let prev = diagonal(&traj[i - 1]);
        let cur = diagonal(&traj[i]);
        for (a, (p, c)) in acc.iter_mut().zip(prev.values.iter().zip(&cur.values)) {
            *a += 0.5 * (p + c) * h;
        }
        let avg = ProbabilityDist {
            values: acc.iter().map(|a| a / times[i]).collect(),
            origin,
        };
        tvs.push(tv_to_uniform(&avg));
    }
    report.t_ave_measured = crossing_from_samples(&times, &tvs, eps);
    Ok(report)
}

fn report_row(n: usize, l: usize, gamma: f64, eps: f64, r: &MixingReport) -> Vec<Cell> {
    vec![
        Cell::Int(n),
        Cell::Int(l),
        Cell::Num(gamma),
        Cell::Num(eps),
        Cell::from(r.t_ins_measured),
        Cell::from(r.t_ave_measured),
        Cell::from(r.ins_lower_exact),
        Cell::from(r.ins_lower_asym),
        Cell::Num(r.ins_upper),
        Cell::Num(r.ave_lower),
        Cell::Num(r.ave_upper),
        Cell::Bool(r.epsilon_too_large_for_lower_bound),
        Cell::Bool(r.gamma_below_large_decoherence_gate),
    ]
}

const REPORT_COLUMNS: [&str; 13] = [
    "n",
    "l",
    "gamma",
    "eps",
    "t_ins_measured",
    "t_ave_measured",
    "ins_lower_exact",
    "ins_lower_asym",
    "ins_upper",
    "ave_lower",
    "ave_upper",
    "eps_too_large_for_lower_bound",
    "gamma_below_large_decoherence_gate",
];

#[allow(clippy::too_many_arguments)]
fn cmd_mixing(
    n: usize,
    l: usize,
    gamma: f64,
    eps: f64,
    origin: usize,
    engine: Engine,
    grid_points: usize,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    let net = RegularNetwork::new(n, l)?;
    if origin >= n {
        return Err(AppError::Param(format!("origin {origin} out of range for n = {n}")));
    }
    let report = match engine {
        Engine::ClosedForm => {
            mixing_report(&net, gamma, eps, origin, &SearchConfig { grid_points, rel_tol: 1e-6 })?
        }
        Engine::MasterEq => {
            if n > MASTER_EQ_MAX_N {
                return Err(AppError::Param(format!(
                    "master_eq engine is limited to n <= {MASTER_EQ_MAX_N}, got {n}"
                )));
            }
            master_eq_mixing(&net, gamma, eps, origin, grid_points)?
        }
    };
    let table = Table {
        columns: REPORT_COLUMNS.to_vec(),
        rows: vec![report_row(n, l, gamma, eps, &report)],
    };
    let mut spec = Map::new();
    spec.insert("command".into(), json!("mixing"));
    spec.insert("n".into(), json!(n));
    spec.insert("l".into(), json!(l));
    spec.insert("gamma".into(), json!(gamma));
    spec.insert("eps".into(), json!(eps));
    spec.insert("origin".into(), json!(origin));
    spec.insert("engine".into(), json!(engine.name()));
    spec.insert("grid_points".into(), json!(grid_points));
    emit(&table, format, spec, out)
}

fn cmd_bounds(
    n: usize,
    l: usize,
    gamma: f64,
    eps: f64,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    RegularNetwork::new(n, l)?;
    let ins = bounds_instantaneous(n, l, gamma, eps)?;
    let (ave_lower, ave_upper) = bounds_average(n, l, gamma, eps)?;
    let rows = vec![vec![
        Cell::Int(n),
        Cell::Int(l),
        Cell::Num(gamma),
        Cell::Num(eps),
        Cell::from(ins.lower_exact),
        Cell::from(ins.lower_asym),
        Cell::Num(ins.upper),
        Cell::Num(ave_lower),
        Cell::Num(ave_upper),
        Cell::Bool(ins.epsilon_too_large),
    ]];
    let table = Table {
        columns: vec![
            "n",
            "l",
            "gamma",
            "eps",
            "ins_lower_exact",
            "ins_lower_asym",
            "ins_upper",
            "ave_lower",
            "ave_upper",
            "eps_too_large_for_lower_bound",
        ],
        rows,
    };
    let mut spec = Map::new();
    spec.insert("command".into(), json!("bounds"));
    spec.insert("n".into(), json!(n));
    spec.insert("l".into(), json!(l));
    spec.insert("gamma".into(), json!(gamma));
    spec.insert("eps".into(), json!(eps));
    emit(&table, format, spec, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    n_range: &str,
    l_range: &str,
    gamma_range: &str,
    eps_range: &str,
    origin: usize,
    grid_points: usize,
    format: Format,
    out: Option<PathBuf>,
) -> Result<(), AppError> {
    let ns = range::parse_usize_range(n_range).map_err(AppError::Param)?;
    let ls = range::parse_usize_range(l_range).map_err(AppError::Param)?;
    let gammas = range::parse_f64_range(gamma_range).map_err(AppError::Param)?;
    let epss = range::parse_f64_range(eps_range).map_err(AppError::Param)?;

    // Materialize and validate the full grid before doing any work, so an
    // invalid point fails fast with exit code 2.
    let mut grid = Vec::new();
    for &n in &ns {
        for &l in &ls {
            for &gamma in &gammas {
                for &eps in &epss {
                    let net = RegularNetwork::new(n, l)?;
                    if origin >= n {
                        return Err(AppError::Param(format!(
                            "origin {origin} out of range for n = {n}"
                        )));
                    }
                    if !(gamma > 0.0) || !(eps > 0.0) {
                        return Err(AppError::Param(format!(
                            "need gamma > 0 and eps > 0, got gamma = {gamma}, eps = {eps}"
                        )));
                    }
                    grid.push((net, n, l, gamma, eps));
                }
            }
        }
    }

    let search = SearchConfig { grid_points, rel_tol: 1e-6 };
    let rows: Result<Vec<Vec<Cell>>, AppError> = grid
        .par_iter()
        .map(|&(ref net, n, l, gamma, eps)| {
            let report = mixing_report(net, gamma, eps, origin, &search)?;
            Ok(report_row(n, l, gamma, eps, &report))
        })
        .collect();
    let table = Table { columns: REPORT_COLUMNS.to_vec(), rows: rows? };
    let mut spec = Map::new();
    spec.insert("command".into(), json!("sweep"));
    spec.insert("n".into(), json!(n_range));
    spec.insert("l".into(), json!(l_range));
    spec.insert("gamma".into(), json!(gamma_range));
    spec.insert("eps".into(), json!(eps_range));
    spec.insert("origin".into(), json!(origin));
    spec.insert("grid_points".into(), json!(grid_points));
    emit(&table, format, spec, out)
}
