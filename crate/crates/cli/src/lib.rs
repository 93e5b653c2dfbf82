//! Command-line front end: CSV ingestion, estimation, testing, intervals,
//! simulation studies and SVG plots.
//!
//! Every command writes a [`ResultDocument`] as JSON (or CSV for `estimate
//! --out csv`). [`run`] returns the process exit code: 0 on success, 1 when a
//! simulation study check fails, 2 on usage or validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ordcif::simulation::{mc_consistency, mc_dominance, mc_fixed_t_limit, mc_null_distribution};
use ordcif::{
    estimate_cifs, ordered_test, pointwise_ci, restrict_cifs, tighten_bands, Band, CifSet, McReport,
    Sample, SimConfig, StepFunction, TestReport,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub mod svg;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: line {line}: {message}")]
    Input { path: String, line: u64, message: String },
    #[error("{0}")]
    Core(#[from] ordcif::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "ordcif", version, about = "Order-restricted cumulative incidence functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unrestricted and restricted CIF estimates.
    Estimate {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        /// Only the restricted estimates.
        #[arg(long, conflicts_with = "unrestricted")]
        restricted: bool,
        /// Only the unrestricted estimates.
        #[arg(long)]
        unrestricted: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
        /// Destination file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write an SVG plot of the estimates.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Test equality of the CIFs against the ordered alternative.
    Test {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Pointwise intervals for the restricted estimates, tightened under the ordering.
    Ci {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
        level: f64,
        /// Comma-separated evaluation times; the event times by default.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Seeded Monte Carlo study.
    Simulate {
        #[arg(long, value_enum)]
        study: Study,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Study {
    Consistency,
    Null,
    Dominance,
    FixedT,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub cause: usize,
    pub initial: f64,
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl Curve {
    fn new(cause: usize, f: &StepFunction) -> Self {
        Self { cause, initial: f.initial(), knots: f.knots().to_vec(), values: f.values().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cifs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unrestricted: Option<Vec<Curve>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted: Option<Vec<Curve>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bands {
    pub level: f64,
    pub times: Vec<f64>,
    /// Restricted estimates at `times`, per cause.
    pub estimate: Vec<Vec<f64>>,
    pub pointwise: Band,
    pub tightened: Band,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub version: String,
    pub input_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultDocument {
    pub command: String,
    pub k: usize,
    pub n: usize,
    pub censored: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cifs: Option<Cifs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<TestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bands: Option<Bands>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<McReport>,
    pub provenance: Provenance,
}

/// A parsed input file with its SHA-256.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub sample: Sample,
    pub hash: String,
}

fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses `time,cause` CSV text. `k` defaults to the largest cause code.
pub fn parse_dataset(text: &str, path: &str, k: Option<usize>) -> Result<Sample, CliError> {
    let input_err = |line: u64, message: String| CliError::Input { path: path.to_string(), line, message };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| input_err(1, e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "time" || &headers[1] != "cause" {
        return Err(input_err(1, format!("expected header `time,cause`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            input_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 2 {
            return Err(input_err(line, format!("expected 2 fields, found {}", row.len())));
        }
        let time: f64 = row[0].parse().map_err(|_| input_err(line, format!("invalid time `{}`", &row[0])))?;
        if !(time.is_finite() && time > 0.0) {
            return Err(input_err(line, format!("time must be positive, found {time}")));
        }
        let cause: u32 = row[1].parse().map_err(|_| input_err(line, format!("invalid cause `{}`", &row[1])))?;
        records.push((time, cause));
        lines.push(line);
    }
    if records.is_empty() {
        return Err(input_err(1, "no data rows".into()));
    }
    if records.iter().all(|r| r.1 == 0) {
        return Err(input_err(1, "every observation is censored".into()));
    }
    let observed = records.iter().map(|r| r.1).max().unwrap_or(0) as usize;
    let k = match k {
        Some(k) => {
            if let Some(m) = records.iter().position(|r| r.1 as usize > k) {
                return Err(input_err(lines[m], format!("cause {} exceeds k = {k}", records[m].1)));
            }
            k
        }
        None => observed,
    };
    if k < 2 {
        return Err(CliError::Usage(format!("{path}: need k >= 2 causes, got {k}; pass --k")));
    }
    Ok(Sample::new(&records, k)?)
}

pub fn load_dataset(path: &Path, k: Option<usize>) -> Result<Dataset, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Usage(format!("{}: not valid UTF-8", path.display())))?;
    let sample = parse_dataset(&text, &path.display().to_string(), k)?;
    Ok(Dataset { sample, hash: hex_sha256(&bytes) })
}

fn provenance(seed: Option<u64>, hash: String) -> Provenance {
    Provenance { seed, version: env!("CARGO_PKG_VERSION").to_string(), input_hash: hash }
}

fn curves(set: &CifSet) -> Vec<Curve> {
    set.cifs().iter().enumerate().map(|(j, f)| Curve::new(j + 1, f)).collect()
}

fn base_document(command: &str, data: &Dataset) -> ResultDocument {
    ResultDocument {
        command: command.to_string(),
        k: data.sample.k(),
        n: data.sample.n(),
        censored: data.sample.is_censored(),
        cifs: None,
        test: None,
        bands: None,
        report: None,
        provenance: provenance(None, data.hash.clone()),
    }
}

/// Both estimate sets, filtered by the `--restricted` / `--unrestricted` flags.
pub fn estimate_document(data: &Dataset, restricted_only: bool, unrestricted_only: bool) -> Result<ResultDocument, CliError> {
    let raw = estimate_cifs(&data.sample);
    let res = restrict_cifs(&raw)?;
    let mut doc = base_document("estimate", data);
    doc.cifs = Some(Cifs {
        unrestricted: (!restricted_only).then(|| curves(&raw)),
        restricted: (!unrestricted_only).then(|| curves(&res)),
    });
    Ok(doc)
}

pub fn test_document(data: &Dataset) -> Result<ResultDocument, CliError> {
    let mut doc = base_document("test", data);
    doc.test = Some(ordered_test(&data.sample)?);
    Ok(doc)
}

pub fn ci_document(data: &Dataset, level: f64, times: Option<&[f64]>) -> Result<ResultDocument, CliError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::Usage(format!("--level must lie in (0, 1), got {level}")));
    }
    let raw = estimate_cifs(&data.sample);
    let res = restrict_cifs(&raw)?;
    let times: Vec<f64> = match times {
        Some(ts) => {
            if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                return Err(CliError::Usage(format!("--times must be finite and >= 0, got {t}")));
            }
            ts.to_vec()
        }
        None => raw.grid(),
    };
    let pointwise = pointwise_ci(&res, &data.sample, level, &times)?;
    let tightened = tighten_bands(&pointwise);
    let estimate = res.cifs().iter().map(|f| times.iter().map(|&t| f.eval(t)).collect()).collect();
    let mut doc = base_document("ci", data);
    doc.bands = Some(Bands { level, times, estimate, pointwise, tightened });
    Ok(doc)
}

pub fn load_config(path: &Path, seed: Option<u64>) -> Result<(SimConfig, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut config: SimConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Usage(format!("{}: invalid config: {e}", path.display())))?;
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    Ok((config, hex_sha256(&bytes)))
}

pub fn simulate_document(study: Study, config: &SimConfig, hash: String) -> Result<ResultDocument, CliError> {
    let report = match study {
        Study::Consistency => mc_consistency(config)?,
        Study::Null => mc_null_distribution(config)?,
        Study::Dominance => mc_dominance(config)?,
        Study::FixedT => mc_fixed_t_limit(config)?,
    };
    Ok(ResultDocument {
        command: "simulate".into(),
        k: config.k(),
        n: config.n,
        censored: config.censor_rate > 0.0,
        cifs: None,
        test: None,
        bands: None,
        report: Some(report),
        provenance: provenance(Some(config.seed), hash),
    })
}

/// Long-format CSV of the estimates: `variant,cause,time,value`, one row per knot.
pub fn cifs_csv(cifs: &Cifs) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["variant", "cause", "time", "value"]).map_err(csv_io)?;
    for (name, set) in [("unrestricted", &cifs.unrestricted), ("restricted", &cifs.restricted)] {
        for curve in set.iter().flatten() {
            for (t, v) in curve.knots.iter().zip(&curve.values) {
                w.write_record([name.to_string(), curve.cause.to_string(), t.to_string(), v.to_string()])
                    .map_err(csv_io)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

pub fn to_json(doc: &ResultDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Estimate { input, k, restricted, unrestricted, out, output, plot } => {
            let data = load_dataset(&input, k)?;
            let doc = estimate_document(&data, restricted, unrestricted)?;
            if let Some(path) = plot {
                let raw = estimate_cifs(&data.sample);
                let (set, title) = if unrestricted {
                    (raw, "Unrestricted estimators of the cumulative incidence functions")
                } else {
                    (restrict_cifs(&raw)?, "Restricted estimators of the cumulative incidence functions")
                };
                let picture = svg::plot_cifs(&set, title);
                std::fs::write(&path, picture).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            }
            let text = match out {
                Format::Json => to_json(&doc),
                Format::Csv => cifs_csv(doc.cifs.as_ref().expect("estimate sets cifs"))?,
            };
            emit(&text, output.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Test { input, k, output } => {
            let data = load_dataset(&input, k)?;
            let doc = test_document(&data)?;
            let report = doc.test.as_ref().expect("test sets report");
            writeln!(stderr, "T = {:.4}, p = {:.6}", report.statistic, report.p_value)?;
            emit(&to_json(&doc), output.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Ci { input, k, level, times, output } => {
            if !(level > 0.0 && level < 1.0) {
                return Err(CliError::Usage(format!("--level must lie in (0, 1), got {level}")));
            }
            let data = load_dataset(&input, k)?;
            let doc = ci_document(&data, level, times.as_deref())?;
            emit(&to_json(&doc), output.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Simulate { study, config, seed, output } => {
            let (config, hash) = load_config(&config, seed)?;
            let doc = simulate_document(study, &config, hash)?;
            emit(&to_json(&doc), output.as_deref(), stdout)?;
            let report = doc.report.as_ref().expect("simulate sets report");
            for c in report.failed_checks() {
                writeln!(stderr, "FAILED {}: empirical {} vs {} (tolerance {})", c.label, c.empirical, c.theoretical, c.tolerance)?;
            }
            match report.passed {
                Some(true) => Ok(0),
                Some(false) => Ok(1),
                None => {
                    writeln!(stderr, "no verdict: fewer than {} replicates", ordcif::simulation::MIN_REPLICATES_FOR_VERDICT)?;
                    Ok(0)
                }
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
