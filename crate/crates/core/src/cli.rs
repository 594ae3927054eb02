//! Batch command-line front end. `main` only forwards to [`run`].
//!
//! Every command writes its outputs under `--out` (created if absent) along
//! with a `manifest.json` listing the inputs and their SHA-256 hashes.
//! Exit codes: 0 success, 1 invalid input, 2 market could not be cleared.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bidcurve::{derive_bid_curve, RepConfig};
use crate::dataset;
use crate::error::{Error, Result};
use crate::h2curve::{fit_piecewise_concave, uniform_breakpoints, SampledHydrogenCurve};
use crate::metrics::{merit_order, write_merit_order, SimulationReport};
use crate::opf::{reduce_network_with, NetworkMode};
use crate::rtsgmlc;
use crate::scenario::{load_scenario, Representation, Scenario, DEFAULT_PIECES};
use crate::sim::{read_consumption, write_records, HourRecord, RunKind, SimOptions, Simulator};

pub const REPORT_JSON: &str = "report.json";
pub const MANIFEST_JSON: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "rep-market", version, about = "Renewable-electrolyzer plant market simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a hydrogen curve and derive the plant's bid curve for one hour.
    DeriveBidCurve(DeriveArgs),
    /// Clear a single hour of a scenario.
    ClearHour(ClearHourArgs),
    /// Simulate the scenario horizon.
    Simulate(SimulateArgs),
    /// Tabulate relative changes between two simulation reports.
    Compare(CompareArgs),
    /// Write the zonal or copper-plate reduction of a grid dataset.
    ReduceNet(ReduceArgs),
    /// Convert RTS-GMLC source data to this tool's dataset layout.
    ConvertRtsgmlc(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nodal,
    Zonal,
    Copper,
}

impl From<ModeArg> for NetworkMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Nodal => NetworkMode::Nodal,
            ModeArg::Zonal => NetworkMode::Zonal,
            ModeArg::Copper => NetworkMode::CopperPlate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepArg {
    Bidder,
    Fixed,
    Base,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario TOML file.
    #[arg(long)]
    pub config: PathBuf,
    /// Grid dataset directory; defaults to the config file's directory.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Overrides the configured network model.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Truncates the horizon.
    #[arg(long)]
    pub hours: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// Sampled hydrogen curve, `power_mw,h2_kg_per_h`.
    #[arg(long)]
    pub curve: PathBuf,
    /// Hydrogen price, $/kg.
    #[arg(long)]
    pub price: f64,
    /// Available renewable power, MW.
    #[arg(long)]
    pub res: f64,
    /// Rescale the sampled curve to this rating (MW).
    #[arg(long)]
    pub capacity: Option<f64>,
    /// Number of uniform pieces.
    #[arg(long, conflicts_with = "breakpoints")]
    pub pieces: Option<usize>,
    /// Explicit breakpoints, MW.
    #[arg(long, value_delimiter = ',')]
    pub breakpoints: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClearHourArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long)]
    pub hour: usize,
    #[arg(long, value_enum)]
    pub rep: Option<RepArg>,
    /// Fixed consumption level (MW), required with `--rep fixed`.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Representation; defaults to the configured one.
    #[arg(long, value_enum)]
    pub rep: Option<RepArg>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Report directory used for delta columns; defaults to `<out>/base` if present.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Results go to `<out>/<rep>/`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Baseline report directory.
    pub baseline: PathBuf,
    /// Report directory to compare.
    pub other: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Scenario whose `[network] interregional` capacities override the computed ones.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// The `SourceData` directory.
    #[arg(long)]
    pub source: PathBuf,
    /// The `timeseries_data_files` directory; defaults to `<source>/../timeseries_data_files`.
    #[arg(long)]
    pub timeseries: Option<PathBuf>,
    #[arg(long)]
    pub hours: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct InputHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    command: Vec<String>,
    version: String,
    config_sha256: Option<String>,
    inputs: Vec<InputHash>,
    timestamp_unix: u64,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(format!("{:x}", Sha256::digest(bytes)))
}

fn version() -> String {
    Process::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .map_or_else(|| env!("CARGO_PKG_VERSION").to_string(), |g| format!("{} ({g})", env!("CARGO_PKG_VERSION")))
}

/// Existing CSV files directly under `dir`, sorted.
fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .into_iter()
        .flatten()
        .flatten()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    files
}

fn write_manifest(out: &Path, args: &[String], config: Option<&Path>, inputs: &[PathBuf]) -> Result<()> {
    let manifest = Manifest {
        command: args.to_vec(),
        version: version(),
        config_sha256: config.map(sha256_file).transpose()?,
        inputs: inputs
            .iter()
            .map(|p| {
                Ok(InputHash {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<_>>()?,
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    };
    write_json(&out.join(MANIFEST_JSON), &manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))
}

fn read_report(dir: &Path) -> Result<SimulationReport> {
    let path = dir.join(REPORT_JSON);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&path, e.line(), e.to_string()))
}

fn create(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn csv_out(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn load(args: &ScenarioArgs) -> Result<(Scenario, Vec<PathBuf>)> {
    let data = args
        .data
        .clone()
        .unwrap_or_else(|| args.config.parent().unwrap_or(Path::new(".")).to_path_buf());
    let mut scn = load_scenario(&args.config, &data)?;
    if let Some(m) = args.mode {
        scn.network_mode = m.into();
    }
    if let Some(h) = args.hours {
        scn.truncate(h);
    }
    Ok((scn, csv_files(&data)))
}

fn default_rep(scn: &Scenario) -> RepArg {
    match scn.rep.representation {
        Representation::Bidder => RepArg::Bidder,
        Representation::Fixed => RepArg::Fixed,
    }
}

fn derive(args: &DeriveArgs, argv: &[String]) -> Result<()> {
    create(&args.out)?;
    let mut sampled = SampledHydrogenCurve::from_csv_path(&args.curve)?;
    if let Some(cap) = args.capacity {
        sampled = sampled.scaled_to(cap)?;
    }
    let breakpoints = match &args.breakpoints {
        Some(b) => b.clone(),
        None => uniform_breakpoints(sampled.capacity(), args.pieces.unwrap_or(DEFAULT_PIECES)),
    };
    let fitted = fit_piecewise_concave(&sampled, &breakpoints)?;
    fitted.write_csv(csv_out(&args.out.join("electrolyzer_fitted.csv"))?)?;
    let bid = derive_bid_curve(&RepConfig::new(fitted, args.res, args.price, "rep")?)?;
    bid.write_csv(csv_out(&args.out.join("bid_curve.csv"))?)?;
    write_manifest(&args.out, argv, None, std::slice::from_ref(&args.curve))
}

fn clear_hour(args: &ClearHourArgs, argv: &[String]) -> Result<()> {
    let (scn, inputs) = load(&args.scenario)?;
    if args.hour >= scn.horizon() {
        return Err(Error::Validation(vec![format!(
            "hour {} is outside the horizon of {} hours",
            args.hour,
            scn.horizon()
        )]));
    }
    create(&args.out)?;
    let sim = Simulator::new(&scn)?;
    let rep = args.rep.unwrap_or_else(|| default_rep(&scn));
    let (record, net) = match rep {
        RepArg::Base => (sim.base_hour(args.hour)?, sim.hour_network(args.hour)),
        RepArg::Bidder => {
            let bid = derive_bid_curve(&sim.rep_config(args.hour)?)?;
            bid.write_csv(csv_out(&args.out.join("bid_curve.csv"))?)?;
            (sim.bidder_hour(args.hour)?, sim.bidder_network(args.hour)?)
        }
        RepArg::Fixed => {
            let level = args
                .level
                .ok_or_else(|| Error::Validation(vec!["--rep fixed needs --level <MW>".into()]))?;
            (sim.fixed_hour(args.hour, level)?, sim.hour_network(args.hour))
        }
    };
    write_records(&args.out, &net, std::slice::from_ref(&record))?;
    write_merit_order(&merit_order(&net), csv_out(&args.out.join("merit_order.csv"))?)?;
    write_manifest(&args.out, argv, Some(&args.scenario.config), &inputs)
}

fn run_kind(sim: &Simulator, kind: RepArg, out_root: &Path, prov: &Provenance, scn: &Scenario) -> Result<Vec<HourRecord>> {
    match kind {
        RepArg::Base => sim.run_base(),
        RepArg::Bidder => sim.run_bidder(),
        RepArg::Fixed => {
            let dir = out_root.join(RunKind::Bidder.to_string());
            let reusable = read_report(&dir)
                .ok()
                .filter(|r| r.hours == scn.horizon() && r.network_mode == scn.network_mode.to_string());
            let consumption = match reusable.map(|_| read_consumption(&dir)) {
                Some(Ok(c)) if c.len() == scn.horizon() => c,
                _ => {
                    let records = sim.run_bidder()?;
                    emit(sim, scn, &records, RunKind::Bidder, out_root, None, prov)?;
                    records.iter().map(|r| r.rep_electrolyzer_load).collect()
                }
            };
            let level = consumption.iter().sum::<f64>() / consumption.len().max(1) as f64;
            sim.run_fixed_at(level)
        }
    }
}

struct Provenance<'a> {
    argv: &'a [String],
    config: &'a Path,
    inputs: &'a [PathBuf],
}

fn emit(
    sim: &Simulator,
    scn: &Scenario,
    records: &[HourRecord],
    kind: RunKind,
    out_root: &Path,
    baseline: Option<&SimulationReport>,
    prov: &Provenance,
) -> Result<()> {
    let dir = out_root.join(kind.to_string());
    create(&dir)?;
    write_records(&dir, sim.network(), records)?;
    let mut report = SimulationReport::build(format!("{}/{kind}", scn.name), records, scn)?;
    if let Some(b) = baseline {
        report = report.with_baseline(b);
    }
    write_json(&dir.join(REPORT_JSON), &report)?;
    write_manifest(&dir, prov.argv, Some(prov.config), prov.inputs)
}

fn simulate(args: &SimulateArgs, argv: &[String]) -> Result<()> {
    let (scn, inputs) = load(&args.scenario)?;
    create(&args.out)?;
    let sim = Simulator::with_options(&scn, SimOptions { jobs: args.jobs })?;
    let kind = args.rep.unwrap_or_else(|| default_rep(&scn));
    let prov = Provenance {
        argv,
        config: &args.scenario.config,
        inputs: &inputs,
    };
    let records = run_kind(&sim, kind, &args.out, &prov, &scn)?;
    let run_kind = match kind {
        RepArg::Base => RunKind::Base,
        RepArg::Bidder => RunKind::Bidder,
        RepArg::Fixed => RunKind::Fixed,
    };
    let baseline_dir = args.baseline.clone().or_else(|| {
        let d = args.out.join(RunKind::Base.to_string());
        (run_kind != RunKind::Base && d.join(REPORT_JSON).exists()).then_some(d)
    });
    let baseline = baseline_dir.as_deref().map(read_report).transpose()?;
    emit(&sim, &scn, &records, run_kind, &args.out, baseline.as_ref(), &prov)
}

#[derive(Serialize)]
struct ComparisonRow {
    metric: &'static str,
    baseline: f64,
    other: f64,
    relative_change: Option<f64>,
}

fn compare(args: &CompareArgs, argv: &[String]) -> Result<()> {
    let base = read_report(&args.baseline)?;
    let other = read_report(&args.other)?;
    create(&args.out)?;
    let d = other.deltas_against(&base);
    let rows = [
        ("total_cost_of_generation", base.total_cost_of_generation, other.total_cost_of_generation, d.total_cost_of_generation),
        ("cost_per_load", base.cost_per_load, other.cost_per_load, d.cost_per_load),
        ("total_system_load", base.total_system_load, other.total_system_load, d.total_system_load),
        ("total_curtailment", base.total_curtailment, other.total_curtailment, d.total_curtailment),
        ("total_emissions", base.total_emissions, other.total_emissions, d.total_emissions),
        ("emissions_per_load", base.emissions_per_load, other.emissions_per_load, d.emissions_per_load),
        ("rep_profit", base.rep_profit, other.rep_profit, d.rep_profit),
        ("rep_avg_load", base.rep_avg_load, other.rep_avg_load, d.rep_avg_load),
        ("rep_avg_lmp", base.rep_avg_lmp, other.rep_avg_lmp, d.rep_avg_lmp),
    ]
    .map(|(metric, baseline, other, relative_change)| ComparisonRow {
        metric,
        baseline,
        other,
        relative_change,
    });
    dataset::write_rows(&args.out.join("comparison.csv"), rows.iter())?;
    write_json(&args.out.join("comparison.json"), &d)?;
    write_manifest(
        &args.out,
        argv,
        None,
        &[args.baseline.join(REPORT_JSON), args.other.join(REPORT_JSON)],
    )
}

fn reduce(args: &ReduceArgs, argv: &[String]) -> Result<()> {
    let net = dataset::read_network(&args.data)?;
    let ts = dataset::read_timeseries(&args.data, &net)?;
    let overrides = match &args.config {
        Some(c) => load_scenario(c, &args.data)?.interregional,
        None => Default::default(),
    };
    let red = reduce_network_with(&net, args.mode.into(), &overrides)?;
    create(&args.out)?;
    dataset::write_network(&args.out, &red.network)?;
    let reduced = dataset::Timeseries {
        loads: ts.loads.iter().map(|l| red.aggregate_loads(l)).collect(),
        res_available: ts.res_available.clone(),
    };
    dataset::write_timeseries(&args.out, &red.network, &reduced)?;
    write_manifest(&args.out, argv, args.config.as_deref(), &csv_files(&args.data))
}

fn convert(args: &ConvertArgs, argv: &[String]) -> Result<()> {
    let series = args.timeseries.clone().unwrap_or_else(|| {
        args.source
            .parent()
            .unwrap_or(Path::new("."))
            .join("timeseries_data_files")
    });
    let (net, ts) = rtsgmlc::convert(&args.source, &series, args.hours)?;
    create(&args.out)?;
    dataset::write_network(&args.out, &net)?;
    dataset::write_timeseries(&args.out, &net, &ts)?;
    write_manifest(&args.out, argv, None, &csv_files(&args.source))
}

/// Runs a parsed command.
pub fn execute(cli: &Cli, argv: &[String]) -> Result<()> {
    match &cli.command {
        Command::DeriveBidCurve(a) => derive(a, argv),
        Command::ClearHour(a) => clear_hour(a, argv),
        Command::Simulate(a) => simulate(a, argv),
        Command::Compare(a) => compare(a, argv),
        Command::ReduceNet(a) => reduce(a, argv),
        Command::ConvertRtsgmlc(a) => convert(a, argv),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
