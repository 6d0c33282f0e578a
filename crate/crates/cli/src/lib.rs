//! Command-line runner for the qinsure experiments.
//!
//! Every subcommand writes one report, as JSON or CSV, to `--out` or stdout.
//! Files are written to a sibling temporary path and renamed into place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qinsure::ae::{ae_outcomes, encode_expectation, estimate, expected_value_from_mu, mc_baseline, mu_from_outcome,
    run_ae_sampled, EncodingMode, DEFAULT_C_APPROX};
use qinsure::distributions::{loader_circuit, DiscreteDistribution, LoaderBackend};
use qinsure::insurance::{dynamic_lapse_circuit, stopped_law, whole_life_circuit, Scenario};
use qinsure::sim::{marginal_probabilities, sample, StateVector};
use qinsure::transpile::{cumulative_report, CostTable};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "qinsure", version, about = "Quantum pricing experiments for insurance payoffs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Register laws of the dynamic-lapse circuit at every marker, and the PV.
    Dynlapse,
    /// Whole-life PV from the weighted-sum circuit against the classical value.
    Wholelife,
    /// Amplitude estimation of E[Z] for one step distribution or a probability.
    Ae,
    /// AE error per query-register size and MC error per shot count.
    Convergence,
    /// Cumulative basis-gate counts, depth and cost per marker.
    TranspileReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Scenario JSON file.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Sample this many shots instead of reading exact probabilities.
    /// For `convergence`, the largest MC shot count.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Query qubits for `ae`; the largest one for `convergence`.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Success probability to estimate, instead of a scenario distribution.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = DEFAULT_C_APPROX)]
    pub c_approx: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qinsure::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// The machine-readable error object printed on stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

const DEFAULT_AE_M: usize = 5;
const DEFAULT_CONVERGENCE_M: usize = 8;
const DEFAULT_CONVERGENCE_SHOTS: u64 = 1 << 14;
const MC_MIN_SHOTS: u64 = 1 << 6;
const MC_REPEATS: u64 = 100;

/// Run one subcommand and write its report.
pub fn execute(cli: &Cli) -> Result<()> {
    let text = render(cli.command, &cli.config)?;
    match &cli.config.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The report text a subcommand would write.
pub fn render(command: Command, config: &RunConfig) -> Result<String> {
    if config.shots == Some(0) {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    if config.m == Some(0) {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    let report = match command {
        Command::Dynlapse => dynlapse(config)?,
        Command::Wholelife => wholelife(config)?,
        Command::Ae => ae(config)?,
        Command::Convergence => convergence(config)?,
        Command::TranspileReport => transpile_report(config)?,
    };
    Ok(match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => report.csv,
    })
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let name = path.file_name().ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, text).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

struct Report {
    json: Value,
    csv: String,
}

fn load_scenario(config: &RunConfig) -> Result<Scenario> {
    let path = config.scenario.as_ref().ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(Scenario::from_json(&text)?)
}

fn encoding(config: &RunConfig) -> EncodingMode {
    match config.mode {
        Mode::Exact => EncodingMode::Exact,
        Mode::Linear => EncodingMode::Linear { c_approx: config.c_approx },
    }
}

/// The distribution AE and convergence work on: `(1 − p, p)` on `{0, 1}`
/// when `--p` is given, else the scenario's step law.
fn target_distribution(config: &RunConfig) -> Result<DiscreteDistribution> {
    match (config.p, &config.scenario) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --p or --scenario, not both".into())),
        (Some(p), None) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage(format!("--p {p} outside [0, 1]")));
            }
            Ok(DiscreteDistribution::on_unit_grid(1, vec![1.0 - p, p])?)
        }
        (None, _) => Ok(load_scenario(config)?.step_distribution()?),
    }
}

fn law_map(law: &[f64]) -> BTreeMap<usize, f64> {
    law.iter().copied().enumerate().collect()
}

#[derive(Serialize)]
struct MarkerOut {
    marker: String,
    lapse: BTreeMap<usize, f64>,
    result: BTreeMap<usize, f64>,
}

fn dynlapse(config: &RunConfig) -> Result<Report> {
    let s = load_scenario(config)?;
    let proc = s.process()?;
    let lapse = s.lapse_model()?;
    let dl = dynamic_lapse_circuit(&proc, &lapse)?;
    let grid = dl.grid_values();
    let lapse_reg = dl.layout.lapse_register();
    let result_reg = dl.layout.result_register();

    let mut markers = Vec::new();
    let mut state = StateVector::zero(dl.circuit.num_qubits())?;
    let mut done = 0;
    for (i, m) in dl.circuit.markers().iter().enumerate() {
        for op in &dl.circuit.ops()[done..m.position] {
            state.apply(op)?;
        }
        done = m.position;
        let (lapse_law, result_law) = match config.shots {
            None => (marginal_probabilities(&state, &lapse_reg)?, marginal_probabilities(&state, &result_reg)?),
            Some(shots) => {
                let seed = config.seed.wrapping_add(2 * i as u64);
                (
                    frequencies(&sample(&state, &lapse_reg, shots, seed)?, 1 << lapse_reg.len(), shots),
                    frequencies(&sample(&state, &result_reg, shots, seed + 1)?, 1 << result_reg.len(), shots),
                )
            }
        };
        markers.push(MarkerOut { marker: m.name.clone(), lapse: law_map(&lapse_law), result: law_map(&result_law) });
    }
    let last = markers.last().expect("dynamic-lapse circuits carry markers");
    let final_law: Vec<f64> = last.result.values().copied().collect();
    let pv = dl.pv_from_result_law(&final_law);
    let classical = stopped_law(&proc, &lapse)?;

    let json = json!({
        "method": if config.shots.is_some() { "sampled" } else { "analytic" },
        "shots": config.shots,
        "seed": config.shots.map(|_| config.seed),
        "width": dl.layout.width(),
        "grid": grid,
        "markers": markers,
        "pv": pv,
        "classical_pv": classical.pv,
    });
    let mut csv = String::from("marker,register,outcome,probability\n");
    for m in &markers {
        for (reg, law) in [("lapse", &m.lapse), ("result", &m.result)] {
            for (k, p) in law {
                writeln!(csv, "{},{reg},{k},{p:?}", m.marker).unwrap();
            }
        }
    }
    writeln!(csv, "final,pv,,{pv:?}").unwrap();
    Ok(Report { json, csv })
}

fn frequencies(counts: &BTreeMap<usize, u64>, len: usize, shots: u64) -> Vec<f64> {
    let mut law = vec![0.0; len];
    for (&k, &c) in counts {
        law[k] = c as f64 / shots as f64;
    }
    law
}

fn key_value_csv(rows: &[(String, String)]) -> String {
    let mut csv = String::from("key,value\n");
    for (k, v) in rows {
        writeln!(csv, "{k},{v}").unwrap();
    }
    csv
}

fn wholelife(config: &RunConfig) -> Result<Report> {
    let s = load_scenario(config)?;
    let proc = s.process()?;
    let weights = s.mortality_weights()?;
    let wl = whole_life_circuit(&proc, &weights, s.scale())?;
    let (law, method) = match config.shots {
        None => (wl.report(&proc)?.sum_distribution, "analytic"),
        Some(shots) => {
            let state = qinsure::sim::run_from_zero(&wl.circuit)?;
            let counts = sample(&state, &wl.sum_qubits, shots, config.seed)?;
            (frequencies(&counts, 1 << wl.sum_qubits.len(), shots), "sampled")
        }
    };
    let rep = wl.report(&proc)?;
    let quantum_pv = wl.pv_from_sum_law(&law);
    let json = json!({
        "method": method,
        "shots": config.shots,
        "weights": weights,
        "int_weights": rep.int_weights,
        "scale": rep.scale,
        "sum_distribution": law_map(&law),
        "quantum_pv": quantum_pv,
        "classical_pv": rep.classical_pv,
        "quantization_bound": rep.quantization_bound,
    });
    let mut rows = vec![
        ("quantum_pv".to_string(), format!("{quantum_pv:?}")),
        ("classical_pv".to_string(), format!("{:?}", rep.classical_pv)),
        ("quantization_bound".to_string(), format!("{:?}", rep.quantization_bound)),
    ];
    rows.extend(law.iter().enumerate().map(|(k, p)| (format!("sum_{k}"), format!("{p:?}"))));
    Ok(Report { json, csv: key_value_csv(&rows) })
}

fn ae(config: &RunConfig) -> Result<Report> {
    let dist = target_distribution(config)?;
    let m = config.m.unwrap_or(DEFAULT_AE_M);
    let loader = loader_circuit(&dist, LoaderBackend::Matrix)?;
    let enc = encode_expectation(&loader, &dist, encoding(config))?;
    let result = match config.shots {
        None => estimate(&ae_outcomes(&enc, m)?, enc.mode(), &dist)?,
        Some(shots) => run_ae_sampled(&enc, m, shots, config.seed)?,
    };
    let classical = dist.expected_value();
    let json = json!({
        "method": if config.shots.is_some() { "sampled" } else { "analytic" },
        "shots": config.shots,
        "result": result,
        "classical_expected_value": classical,
        "abs_error": (result.expected_value - classical).abs(),
    });
    let mut rows = vec![
        ("m".to_string(), result.m.to_string()),
        ("l_hat".to_string(), result.l_hat.to_string()),
        ("mu_hat".to_string(), format!("{:?}", result.mu_hat)),
        ("expected_value".to_string(), format!("{:?}", result.expected_value)),
        ("classical_expected_value".to_string(), format!("{classical:?}")),
    ];
    rows.extend(result.outcomes.iter().map(|(l, p)| (format!("outcome_{l}"), format!("{p:?}"))));
    Ok(Report { json, csv: key_value_csv(&rows) })
}

#[derive(Serialize)]
struct ConvergenceRow {
    method: &'static str,
    effort: u64,
    abs_error: f64,
}

/// AE rows: expected absolute error of the read-out under the exact outcome
/// law, per `m`, with effort `2^m`. MC rows: mean absolute error over 100
/// seeds per shot count.
fn convergence(config: &RunConfig) -> Result<Report> {
    let dist = target_distribution(config)?;
    let truth = dist.expected_value();
    let mode = encoding(config);
    let loader = loader_circuit(&dist, LoaderBackend::Matrix)?;
    let enc = encode_expectation(&loader, &dist, mode)?;
    let mut rows = Vec::new();
    for m in 1..=config.m.unwrap_or(DEFAULT_CONVERGENCE_M) {
        let law = ae_outcomes(&enc, m)?;
        let err: f64 = law
            .iter()
            .enumerate()
            .map(|(l, p)| p * (expected_value_from_mu(mu_from_outcome(l, m), mode, &dist) - truth).abs())
            .sum();
        rows.push(ConvergenceRow { method: "ae", effort: 1 << m, abs_error: err });
    }
    let max_shots = config.shots.unwrap_or(DEFAULT_CONVERGENCE_SHOTS);
    let mut shots = MC_MIN_SHOTS.min(max_shots);
    while shots <= max_shots {
        let mut total = 0.0;
        for rep in 0..MC_REPEATS {
            total += (mc_baseline(&dist, shots, config.seed.wrapping_add(rep))?.mean - truth).abs();
        }
        rows.push(ConvergenceRow { method: "mc", effort: shots, abs_error: total / MC_REPEATS as f64 });
        shots *= 2;
    }
    let mut csv = String::from("method,effort,abs_error\n");
    for r in &rows {
        writeln!(csv, "{},{},{:?}", r.method, r.effort, r.abs_error).unwrap();
    }
    Ok(Report { json: json!({ "expected_value": truth, "rows": rows }), csv })
}

/// Dynamic-lapse circuit when the scenario has a lapse table, else the
/// whole-life circuit.
fn transpile_report(config: &RunConfig) -> Result<Report> {
    let s = load_scenario(config)?;
    let proc = s.process()?;
    let circuit = if s.lapse.is_some() {
        dynamic_lapse_circuit(&proc, &s.lapse_model()?)?.circuit
    } else if s.mortality.is_some() {
        whole_life_circuit(&proc, &s.mortality_weights()?, s.scale())?.circuit
    } else {
        return Err(CliError::Usage("scenario has neither a lapse nor a mortality table".into()));
    };
    let report = cumulative_report(&circuit, &CostTable::default())?;
    let csv = report.to_csv();
    Ok(Report { json: serde_json::to_value(&report).expect("reports serialize"), csv })
}
