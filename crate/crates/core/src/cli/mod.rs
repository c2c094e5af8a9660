//! Command-line front end. Commands return their report as text so the
//! binary only prints and maps errors to exit codes.

pub mod cases;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algorithms::{
    run_classical_baseline, run_deutsch_jozsa, run_generalized, run_two_function_extension,
    EqualityVerdict, Verdict,
};
use crate::analysis::{aggregate_runs, export_chart_data, fidelity, ChartTable, RunSummary};
use crate::error::{Error, Result};
use crate::noise::{noisy_sample, NoiseModel};
use crate::oracles::{BooleanFunction, FunctionFamily};
use crate::sim::Histogram;

pub use cases::{case_circuit, decode_outcome, CaseSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PROMISE: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Input(_) => EXIT_USAGE,
        Error::Promise(_) => EXIT_PROMISE,
        Error::Config(_) => EXIT_CONFIG,
        Error::Consistency(_) | Error::Io(_) => EXIT_FAILURE,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "edj",
    version,
    about = "Entanglement-assisted Deutsch-Jozsa simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classic Deutsch-Jozsa on one truth table, e.g. `dj 0110`.
    Dj { table: String },
    /// Multi-function variant on one-bit truth tables, e.g. `gen 01 10`.
    Gen {
        #[arg(required = true)]
        tables: Vec<String>,
    },
    /// Two-function extension on n-bit truth tables, e.g. `ext 0011 0101`.
    Ext { f: String, g: String },
    /// Run one of the four experiment cases with sampling and noise.
    Case(CaseArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CaseArgs {
    /// Case number, 1 to 4.
    pub case_id: u8,
    #[arg(long, default_value_t = 8192)]
    pub shots: u64,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 2018)]
    pub seed: u64,
    /// Noise file, or `off`. Defaults to the shipped ibmqx4 table.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl CaseArgs {
    pub fn new(case_id: u8) -> Self {
        Self {
            case_id,
            shots: 8192,
            runs: 10,
            seed: 2018,
            noise: None,
            out: PathBuf::from("."),
        }
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Dj { table } => cmd_dj(table),
        Command::Gen { tables } => cmd_generalized(tables),
        Command::Ext { f, g } => cmd_ext(f, g),
        Command::Case(args) => cmd_case(args).map(|r| r.summary_text),
    }
}

fn plural(n: u64, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

pub fn cmd_dj(table: &str) -> Result<String> {
    let f: BooleanFunction = table.parse()?;
    let run = run_deutsch_jozsa(&f)?;
    Ok(format!(
        "{}, {}\nquery register: {}\n",
        run.verdict,
        plural(run.ledger.total(), "query"),
        run.histogram
    ))
}

pub fn cmd_generalized<S: AsRef<str>>(tables: &[S]) -> Result<String> {
    let functions = tables
        .iter()
        .map(|t| {
            let f: BooleanFunction = t.as_ref().parse()?;
            if f.arity() != 1 {
                return Err(Error::Input(format!(
                    "expected a 2-character truth table, got {:?}",
                    t.as_ref()
                )));
            }
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = FunctionFamily::new(functions)?;
    let quantum = run_generalized(&family)?;
    let classical = run_classical_baseline(&family)?;
    if quantum.verdict != classical.verdict {
        return Err(Error::Consistency(format!(
            "quantum verdict {} differs from classical {}",
            quantum.verdict, classical.verdict
        )));
    }
    Ok(format!(
        "{}; quantum {} vs classical {} queries\n",
        quantum.verdict,
        quantum.ledger.total(),
        classical.ledger.total()
    ))
}

pub fn cmd_ext(f: &str, g: &str) -> Result<String> {
    let f: BooleanFunction = f.parse()?;
    let g: BooleanFunction = g.parse()?;
    let run = run_two_function_extension(&f, &g)?;
    let equality = match run.equality {
        Some(e) => e.to_string(),
        None => "undetermined".to_string(),
    };
    Ok(format!(
        "{}; equality {equality}; register all-zeros probability {:.6}; correlated answer probability {:.6}; {}\n",
        run.promise,
        run.register_zero_probability,
        run.correlated_probability,
        plural(run.ledger.total(), "query"),
    ))
}

pub fn parse_noise_file(path: impl AsRef<Path>) -> Result<NoiseModel> {
    NoiseModel::from_file(path)
}

fn noise_from_flag(flag: Option<&str>) -> Result<NoiseModel> {
    match flag {
        None => Ok(NoiseModel::ibmqx4()),
        Some("off") => {
            let mut m = NoiseModel::noiseless(3);
            m.enabled = false;
            Ok(m)
        }
        Some(path) => parse_noise_file(path),
    }
}

/// Seed for run `index`, mixed so neighbouring runs are uncorrelated.
pub fn run_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub case: CaseSpec,
    pub ideal_outcome: String,
    pub decoded: Verdict,
    pub theory: Histogram,
    pub runs: Vec<Histogram>,
    pub summary: RunSummary,
    pub chart: ChartTable,
    pub run_fidelities: Vec<f64>,
    pub mean_fidelity: f64,
    pub fidelity_of_mean: f64,
    pub summary_text: String,
}

pub fn chart_file_name(case_id: u8) -> String {
    format!("case{case_id}_chart.csv")
}

pub fn summary_file_name(case_id: u8) -> String {
    format!("case{case_id}_summary.txt")
}

/// Runs a case, writes its chart table and summary into `args.out`.
pub fn cmd_case(args: &CaseArgs) -> Result<CaseReport> {
    let report = simulate_case(args)?;
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(
        args.out.join(chart_file_name(args.case_id)),
        report.chart.to_csv(),
    )?;
    std::fs::write(
        args.out.join(summary_file_name(args.case_id)),
        &report.summary_text,
    )?;
    Ok(report)
}

/// Everything `cmd_case` computes, without touching the filesystem.
pub fn simulate_case(args: &CaseArgs) -> Result<CaseReport> {
    let case = CaseSpec::get(args.case_id)?;
    if args.shots < 1 {
        return Err(Error::Input("--shots must be at least 1".into()));
    }
    if args.runs < 2 {
        return Err(Error::Input("--runs must be at least 2".into()));
    }
    let model = noise_from_flag(args.noise.as_deref())?;
    let circuit = case.circuit()?;
    let theory = circuit.probabilities()?;

    let (ideal_outcome, p) = theory
        .entries()
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k.clone(), *v))
        .ok_or_else(|| Error::Consistency("empty theoretical distribution".into()))?;
    crate::algorithms::decide(p, "ideal case outcome")?;
    let decoded = decode_outcome(&ideal_outcome)?;
    let library = run_generalized(&case.family()?)?.verdict;
    if decoded != library || decoded != case.expected {
        return Err(Error::Consistency(format!(
            "case {} decodes to {decoded}, library says {library}, expected {}",
            case.case_id, case.expected
        )));
    }

    let runs = (0..args.runs)
        .map(|r| noisy_sample(&circuit, &model, args.shots, run_seed(args.seed, r)))
        .collect::<Result<Vec<_>>>()?;
    let summary = aggregate_runs(&runs)?;
    let chart = export_chart_data(&summary, &theory)?;
    let run_fidelities = runs
        .iter()
        .map(|r| fidelity(&theory, r))
        .collect::<Result<Vec<_>>>()?;
    let mean_fidelity = run_fidelities.iter().sum::<f64>() / run_fidelities.len() as f64;
    let fidelity_of_mean = fidelity(&theory, &summary.mean_histogram()?)?;

    let noise_label = match args.noise.as_deref() {
        None => "ibmqx4 default table".to_string(),
        Some("off") => "off".to_string(),
        Some(path) => path.to_string(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "case {}: {}", case.case_id, case.description());
    let _ = writeln!(
        text,
        "ideal outcome |{ideal_outcome}> decodes to {}, {}",
        decoded.promise,
        match decoded.equality {
            EqualityVerdict::NotApplicable => "n/a".to_string(),
            e => e.to_string(),
        }
    );
    let _ = writeln!(
        text,
        "noise: {noise_label}; runs: {}; shots per run: {}; seed: {}",
        args.runs, args.shots, args.seed
    );
    let _ = writeln!(text, "fidelity of mean distribution: {fidelity_of_mean:.6}");
    let _ = writeln!(text, "mean per-run fidelity: {mean_fidelity:.6}");
    let per_run: Vec<String> = run_fidelities.iter().map(|f| format!("{f:.6}")).collect();
    let _ = writeln!(text, "per-run fidelities: {}", per_run.join(" "));
    let _ = writeln!(text);
    text.push_str(&chart.to_csv());

    Ok(CaseReport {
        case,
        ideal_outcome,
        decoded,
        theory,
        runs,
        summary,
        chart,
        run_fidelities,
        mean_fidelity,
        fidelity_of_mean,
        summary_text: text,
    })
}
