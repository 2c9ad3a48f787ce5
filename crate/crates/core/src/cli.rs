//! Command-line front end: flag/config parsing and the CSV/JSON writers
//! behind the `report`, `sweep`, `spectrum`, `noise`, `ep-check` and
//! `fit` subcommands.
//!
//! Outputs are deterministic: numbers are printed with 17 significant
//! digits in scientific notation, rows follow the (deterministic) sweep
//! order, and every file carries the resolved parameter set in its meta
//! block so it is self-describing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{
    diffusion_matrix, drift_matrix, ep_detuning, mean_field_steady_state, Branch, ModelParams,
    Phase,
};
use crate::scaling::{
    fit_power_law, report_from_dataset, sweep, FitOutcome, Observable, Side, SweepDataset,
    SweepSpec,
};
use crate::spectral::{default_slow_tol, eigen_spectrum, ep_defect, DEFAULT_RANK_TOL};
use crate::steady::noise_spectrum;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed numeric formatting for text outputs: 17 significant digits,
/// scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Cavity detuning as requested: a literal value or the exceptional-point
/// tuning computed from `kappa` and `delta_kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSpec {
    Ep,
    Value(f64),
}

impl FromStr for DeltaSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "ep" {
            return Ok(DeltaSpec::Ep);
        }
        s.parse::<f64>()
            .map(DeltaSpec::Value)
            .map_err(|_| Error::Domain(format!("delta = '{s}' is neither a number nor 'ep'")))
    }
}

impl std::fmt::Display for DeltaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DeltaSpec::Ep => write!(f, "ep"),
            DeltaSpec::Value(v) => write!(f, "{}", format_number(*v)),
        }
    }
}

/// Coupling as requested: a literal value or the critical coupling of
/// the resolved parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GSpec {
    Critical,
    Value(f64),
}

impl FromStr for GSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "critical" {
            return Ok(GSpec::Critical);
        }
        s.parse::<f64>()
            .map(GSpec::Value)
            .map_err(|_| Error::Domain(format!("g = '{s}' is neither a number nor 'critical'")))
    }
}

impl std::fmt::Display for GSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GSpec::Critical => write!(f, "critical"),
            GSpec::Value(v) => write!(f, "{}", format_number(*v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Domain(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Json => write!(f, "json"),
        }
    }
}

/// The resolved model portion of a run: what every subcommand needs
/// before doing anything else.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega: f64,
    pub kappa: f64,
    pub delta_kappa: f64,
    pub delta: DeltaSpec,
    pub g: GSpec,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Serializes to the flat `key = value` form accepted by `--config`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "omega = {}", format_number(self.omega));
        let _ = writeln!(s, "kappa = {}", format_number(self.kappa));
        let _ = writeln!(s, "delta-kappa = {}", format_number(self.delta_kappa));
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "g = {}", self.g);
        let _ = writeln!(s, "format = {}", self.format);
        s
    }

    /// Parses the flat `key = value` form. Unknown keys are ignored
    /// (they may belong to grid options); `g` defaults to `critical`
    /// and `format` to `csv`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let kv = parse_kv(text)?;
        let need = |key: &str| -> Result<f64> {
            let raw = kv
                .get(key)
                .ok_or_else(|| Error::Domain(format!("missing required parameter '{key}'")))?;
            raw.parse::<f64>()
                .map_err(|_| Error::Domain(format!("{key} = '{raw}' is not a number")))
        };
        Ok(RunConfig {
            omega: need("omega")?,
            kappa: need("kappa")?,
            delta_kappa: need("delta-kappa")?,
            delta: kv
                .get("delta")
                .ok_or_else(|| Error::Domain("missing required parameter 'delta'".into()))?
                .parse()?,
            g: match kv.get("g") {
                Some(raw) => raw.parse()?,
                None => GSpec::Critical,
            },
            format: match kv.get("format") {
                Some(raw) => raw.parse()?,
                None => OutputFormat::Csv,
            },
        })
    }

    /// Resolves `ep` / `critical` placeholders into validated
    /// [`ModelParams`] plus the critical coupling.
    pub fn resolve(&self) -> Result<ResolvedModel> {
        let delta = match self.delta {
            DeltaSpec::Ep => ep_detuning(self.kappa, self.delta_kappa)?,
            DeltaSpec::Value(v) => v,
        };
        let base = ModelParams::new(self.omega, self.kappa, self.delta_kappa, delta, 0.0)?;
        let g_c = base.critical_coupling();
        let g = match self.g {
            GSpec::Critical => g_c,
            GSpec::Value(v) => v,
        };
        Ok(ResolvedModel {
            params: base.with_g(g)?,
            g_c,
        })
    }
}

/// Validated parameters with all placeholders substituted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedModel {
    pub params: ModelParams,
    pub g_c: f64,
}

/// Flat `key = value` parser; `#` starts a comment, keys are normalized
/// to dashes.
fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Domain(format!(
                "config line {}: expected 'key = value'",
                lineno + 1
            ))
        })?;
        map.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(map)
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Parser, Debug)]
#[command(
    name = "dicke-ep",
    version,
    about = "Steady states, spectra and critical exponents of the two-cavity open Dicke model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit critical exponents for all requested observables on both sides of the transition.
    Report(SweepArgs),
    /// Evaluate observables on a log-spaced coupling grid around g_c.
    Sweep(SweepArgs),
    /// Drift-matrix eigenvalues on a coupling grid around g_c.
    Spectrum(GridOnlyArgs),
    /// Symmetrized noise spectrum S(omega) at a fixed coupling.
    Noise(NoiseArgs),
    /// Jordan-defect diagnostic of the drift matrix at a fixed coupling.
    EpCheck(EpCheckArgs),
    /// Re-fit a power law from a stored CSV file.
    Fit(FitArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelFlags {
    /// Atomic transition frequency (> 0).
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Mean photon loss rate (> 0).
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Loss asymmetry, 0 < delta-kappa < kappa.
    #[arg(long, allow_negative_numbers = true)]
    delta_kappa: Option<f64>,
    /// Cavity detuning, or "ep" for the exceptional-point tuning.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Coupling, or "critical" for g = g_c (grid commands ignore it).
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Flat key = value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct GridFlags {
    /// Smallest relative distance |g - g_c| / g_c of the grid.
    #[arg(long)]
    eps_min: Option<f64>,
    /// Largest relative distance |g - g_c| / g_c of the grid.
    #[arg(long)]
    eps_max: Option<f64>,
    /// Grid points per decade of eps.
    #[arg(long)]
    points_per_decade: Option<usize>,
    /// Side of the transition: normal, superradiant or both.
    #[arg(long)]
    side: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[command(flatten)]
    grid: GridFlags,
    /// Comma-separated observables (adr, im_lambda, dn1, dn2, dnb,
    /// purity, quadratures) or "all".
    #[arg(long)]
    observables: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct GridOnlyArgs {
    #[command(flatten)]
    model: ModelFlags,
    #[command(flatten)]
    grid: GridFlags,
}

#[derive(Args, Debug, Clone)]
struct NoiseArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Smallest frequency of the grid.
    #[arg(long)]
    w_min: Option<f64>,
    /// Largest frequency of the grid.
    #[arg(long)]
    w_max: Option<f64>,
    /// Frequency grid points per decade.
    #[arg(long)]
    w_points_per_decade: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct EpCheckArgs {
    #[command(flatten)]
    model: ModelFlags,
    /// Absolute threshold under which an eigenvalue counts as slow;
    /// default 1e-6 of the spectral scale.
    #[arg(long)]
    slow_tol: Option<f64>,
    /// Relative singular-value threshold for the numerical rank.
    #[arg(long)]
    rank_tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct FitArgs {
    /// CSV file to re-fit ('#' lines are skipped; a status column, if
    /// present, restricts the fit to ok rows).
    #[arg(long)]
    input: PathBuf,
    /// Column holding the abscissa.
    #[arg(long, default_value = "eps")]
    x_col: String,
    /// Column holding the values to fit.
    #[arg(long)]
    y_col: String,
    /// Keep only rows with x >= this bound.
    #[arg(long)]
    x_min: Option<f64>,
    /// Keep only rows with x <= this bound.
    #[arg(long)]
    x_max: Option<f64>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

// ---------------------------------------------------------------------------
// execution

enum Failure {
    Usage(String),
    Run(String),
}

type ExecResult = std::result::Result<(), Failure>;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

/// Entry point used by the binary: parses `argv`, runs the subcommand,
/// and maps failures onto exit codes (0 success, 1 domain/runtime
/// errors, 2 usage errors).
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(cli: Cli) -> ExecResult {
    match cli.command {
        Command::Report(args) => run_report(args, true),
        Command::Sweep(args) => run_report(args, false),
        Command::Spectrum(args) => run_spectrum(args),
        Command::Noise(args) => run_noise(args),
        Command::EpCheck(args) => run_ep_check(args),
        Command::Fit(args) => run_fit(args),
    }
}

/// Everything resolved from flags + config file for a model-bearing
/// subcommand.
struct Resolved {
    config: RunConfig,
    model: ResolvedModel,
    file: BTreeMap<String, String>,
    out: Option<PathBuf>,
}

fn resolve_model(flags: &ModelFlags) -> std::result::Result<Resolved, Failure> {
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Run(format!("cannot read {}: {e}", path.display())))?;
            parse_kv(&text).map_err(|e| Failure::Usage(e.to_string()))?
        }
        None => BTreeMap::new(),
    };

    let lookup_f64 = |flag: Option<f64>, key: &str| -> std::result::Result<Option<f64>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match file.get(key) {
            Some(raw) => raw
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("config {key} = '{raw}' is not a number"))),
            None => Ok(None),
        }
    };
    let lookup_str = |flag: &Option<String>, key: &str| -> Option<String> {
        flag.clone().or_else(|| file.get(key).cloned())
    };
    let require = |value: Option<f64>, key: &str| -> std::result::Result<f64, Failure> {
        value.ok_or_else(|| {
            Failure::Usage(format!(
                "missing required parameter '{key}' (pass --{key} or put it in --config)"
            ))
        })
    };

    let omega = require(lookup_f64(flags.omega, "omega")?, "omega")?;
    let kappa = require(lookup_f64(flags.kappa, "kappa")?, "kappa")?;
    let delta_kappa = require(lookup_f64(flags.delta_kappa, "delta-kappa")?, "delta-kappa")?;
    let delta: DeltaSpec = lookup_str(&flags.delta, "delta")
        .ok_or_else(|| {
            Failure::Usage("missing required parameter 'delta' (a number or 'ep')".into())
        })?
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let g: GSpec = match lookup_str(&flags.g, "g") {
        Some(raw) => raw
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?,
        None => GSpec::Critical,
    };
    let format: OutputFormat = match lookup_str(&flags.format, "format") {
        Some(raw) => raw
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?,
        None => OutputFormat::Csv,
    };

    let config = RunConfig {
        omega,
        kappa,
        delta_kappa,
        delta,
        g,
        format,
    };
    let model = config.resolve()?;
    let out = flags
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));
    Ok(Resolved {
        config,
        model,
        file,
        out,
    })
}

fn resolve_grid(
    grid: &GridFlags,
    file: &BTreeMap<String, String>,
) -> std::result::Result<SweepSpec, Failure> {
    let f64_of =
        |flag: Option<f64>, key: &str, default: f64| -> std::result::Result<f64, Failure> {
            if let Some(v) = flag {
                return Ok(v);
            }
            match file.get(key) {
                Some(raw) => raw
                    .parse()
                    .map_err(|_| Failure::Usage(format!("config {key} = '{raw}' is not a number"))),
                None => Ok(default),
            }
        };
    let defaults = SweepSpec::default();
    let side: Side = match grid.side.clone().or_else(|| file.get("side").cloned()) {
        Some(raw) => raw
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?,
        None => Side::Both,
    };
    let points_per_decade = match grid.points_per_decade {
        Some(v) => v,
        None => match file.get("points-per-decade") {
            Some(raw) => raw.parse().map_err(|_| {
                Failure::Usage(format!("config points-per-decade = '{raw}' is not a count"))
            })?,
            None => defaults.points_per_decade,
        },
    };
    Ok(SweepSpec {
        side,
        rel_eps_min: f64_of(grid.eps_min, "eps-min", defaults.rel_eps_min)?,
        rel_eps_max: f64_of(grid.eps_max, "eps-max", defaults.rel_eps_max)?,
        points_per_decade,
        observables: defaults.observables,
    })
}

fn parse_observables(raw: &Option<String>) -> std::result::Result<Vec<Observable>, Failure> {
    match raw.as_deref() {
        None | Some("all") => Ok(Observable::ALL.to_vec()),
        Some(list) => list
            .split(',')
            .map(|name| {
                name.trim()
                    .parse::<Observable>()
                    .map_err(|e| Failure::Usage(e.to_string()))
            })
            .collect(),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> ExecResult {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// meta block and writers

/// Ordered key/value pairs carried by every output so results are
/// self-describing: the config as given, the resolved detuning and
/// coupling, and the computed critical coupling.
fn meta_entries(command: &str, resolved: &Resolved) -> Vec<(String, String)> {
    let cfg = &resolved.config;
    let params = resolved.model.params;
    let mut entries = vec![
        ("command".to_string(), command.to_string()),
        ("version".to_string(), VERSION.to_string()),
        ("omega".to_string(), format_number(cfg.omega)),
        ("kappa".to_string(), format_number(cfg.kappa)),
        ("delta-kappa".to_string(), format_number(cfg.delta_kappa)),
        ("delta".to_string(), cfg.delta.to_string()),
        ("g".to_string(), cfg.g.to_string()),
    ];
    if cfg.delta == DeltaSpec::Ep {
        entries.push(("delta-resolved".to_string(), format_number(params.delta())));
    }
    if cfg.g == GSpec::Critical {
        entries.push(("g-resolved".to_string(), format_number(params.g())));
    }
    entries.push(("g_c".to_string(), format_number(resolved.model.g_c)));
    entries
}

fn grid_meta(spec: &SweepSpec) -> Vec<(String, String)> {
    let side = match spec.side {
        Side::Normal => "normal",
        Side::Superradiant => "superradiant",
        Side::Both => "both",
    };
    vec![
        ("eps-min".to_string(), format_number(spec.rel_eps_min)),
        ("eps-max".to_string(), format_number(spec.rel_eps_max)),
        (
            "points-per-decade".to_string(),
            spec.points_per_decade.to_string(),
        ),
        ("side".to_string(), side.to_string()),
    ]
}

fn csv_meta(entries: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in entries {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s
}

fn json_meta(entries: &[(String, String)]) -> Value {
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.clone(), Value::String(v.clone()));
    }
    Value::Object(map)
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn opt_json(v: Option<f64>) -> Value {
    v.map(json_number).unwrap_or(Value::Null)
}

const SWEEP_HEADER: &str =
    "g,eps,phase,status,adr,im_lambda_plus,dn1,dn2,dnb,purity,xx1,pp1,xp1,xx2,pp2,xp2,xxb,ppb,xpb";

fn sweep_csv(dataset: &SweepDataset, meta: &[(String, String)]) -> String {
    let mut s = csv_meta(meta);
    let _ = writeln!(s, "{SWEEP_HEADER}");
    for row in &dataset.rows {
        let m = row.moments;
        let cells = [
            format_number(row.g),
            format_number(row.eps),
            row.phase.to_string(),
            row.status.to_string(),
            opt_cell(row.adr),
            opt_cell(row.im_lambda_plus),
            opt_cell(row.dn1),
            opt_cell(row.dn2),
            opt_cell(row.dnb),
            opt_cell(row.purity),
            opt_cell(m.map(|q| q.xx1)),
            opt_cell(m.map(|q| q.pp1)),
            opt_cell(m.map(|q| q.xp1)),
            opt_cell(m.map(|q| q.xx2)),
            opt_cell(m.map(|q| q.pp2)),
            opt_cell(m.map(|q| q.xp2)),
            opt_cell(m.map(|q| q.xxb)),
            opt_cell(m.map(|q| q.ppb)),
            opt_cell(m.map(|q| q.xpb)),
        ];
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn sweep_json(dataset: &SweepDataset, meta: &[(String, String)]) -> String {
    let rows: Vec<Value> = dataset
        .rows
        .iter()
        .map(|row| {
            let m = row.moments;
            json!({
                "g": json_number(row.g),
                "eps": json_number(row.eps),
                "phase": row.phase.to_string(),
                "status": row.status.to_string(),
                "adr": opt_json(row.adr),
                "im_lambda_plus": opt_json(row.im_lambda_plus),
                "dn1": opt_json(row.dn1),
                "dn2": opt_json(row.dn2),
                "dnb": opt_json(row.dnb),
                "purity": opt_json(row.purity),
                "xx1": opt_json(m.map(|q| q.xx1)),
                "pp1": opt_json(m.map(|q| q.pp1)),
                "xp1": opt_json(m.map(|q| q.xp1)),
                "xx2": opt_json(m.map(|q| q.xx2)),
                "pp2": opt_json(m.map(|q| q.pp2)),
                "xp2": opt_json(m.map(|q| q.xp2)),
                "xxb": opt_json(m.map(|q| q.xxb)),
                "ppb": opt_json(m.map(|q| q.ppb)),
                "xpb": opt_json(m.map(|q| q.xpb)),
            })
        })
        .collect();
    let doc = json!({ "meta": json_meta(meta), "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
    text.push('\n');
    text
}

const REPORT_HEADER: &str =
    "observable,phase,outcome,exponent,log_amplitude,r_squared,n_points,eps_min,eps_max,detail";

fn outcome_cells(outcome: &FitOutcome) -> (String, [String; 6], String) {
    match outcome {
        FitOutcome::Fit(f) => (
            "fit".into(),
            [
                format_number(f.exponent),
                format_number(f.log_amplitude),
                format_number(f.r_squared),
                f.n_points.to_string(),
                format_number(f.window.0),
                format_number(f.window.1),
            ],
            String::new(),
        ),
        FitOutcome::Flat { slope, log_range } => (
            "flat".into(),
            Default::default(),
            format!(
                "slope={};log_range={}",
                format_number(*slope),
                format_number(*log_range)
            ),
        ),
        FitOutcome::Zero => ("zero".into(), Default::default(), String::new()),
        FitOutcome::Failed(msg) => ("failed".into(), Default::default(), msg.replace(',', ";")),
    }
}

fn report_csv(entries: &[(String, Phase, FitOutcome)], meta: &[(String, String)]) -> String {
    let mut s = csv_meta(meta);
    let _ = writeln!(s, "{REPORT_HEADER}");
    for (observable, phase, outcome) in entries {
        let (kind, cells, detail) = outcome_cells(outcome);
        let _ = writeln!(
            s,
            "{observable},{phase},{kind},{},{detail}",
            cells.join(",")
        );
    }
    s
}

fn report_json(entries: &[(String, Phase, FitOutcome)], meta: &[(String, String)]) -> String {
    let rows: Vec<Value> = entries
        .iter()
        .map(|(observable, phase, outcome)| {
            let mut map = Map::new();
            map.insert("observable".into(), Value::String(observable.clone()));
            map.insert("phase".into(), Value::String(phase.to_string()));
            match outcome {
                FitOutcome::Fit(f) => {
                    map.insert("outcome".into(), Value::String("fit".into()));
                    map.insert("exponent".into(), json_number(f.exponent));
                    map.insert("log_amplitude".into(), json_number(f.log_amplitude));
                    map.insert("r_squared".into(), json_number(f.r_squared));
                    map.insert("n_points".into(), Value::from(f.n_points));
                    map.insert("eps_min".into(), json_number(f.window.0));
                    map.insert("eps_max".into(), json_number(f.window.1));
                }
                FitOutcome::Flat { slope, log_range } => {
                    map.insert("outcome".into(), Value::String("flat".into()));
                    map.insert("slope".into(), json_number(*slope));
                    map.insert("log_range".into(), json_number(*log_range));
                }
                FitOutcome::Zero => {
                    map.insert("outcome".into(), Value::String("zero".into()));
                }
                FitOutcome::Failed(msg) => {
                    map.insert("outcome".into(), Value::String("failed".into()));
                    map.insert("detail".into(), Value::String(msg.clone()));
                }
            }
            Value::Object(map)
        })
        .collect();
    let doc = json!({ "meta": json_meta(meta), "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
    text.push('\n');
    text
}

fn run_report(args: SweepArgs, fit: bool) -> ExecResult {
    let resolved = resolve_model(&args.model)?;
    let mut spec = resolve_grid(&args.grid, &resolved.file)?;
    spec.observables = parse_observables(&args.observables)?.into_iter().collect();
    let dataset = sweep(&resolved.model.params, &spec)?;

    let command = if fit { "report" } else { "sweep" };
    let mut meta = meta_entries(command, &resolved);
    meta.extend(grid_meta(&spec));

    let content = if fit {
        let report = report_from_dataset(&dataset, &spec);
        let entries: Vec<(String, Phase, FitOutcome)> = report
            .entries
            .into_iter()
            .map(|e| (e.observable, e.phase, e.outcome))
            .collect();
        match resolved.config.format {
            OutputFormat::Csv => report_csv(&entries, &meta),
            OutputFormat::Json => report_json(&entries, &meta),
        }
    } else {
        match resolved.config.format {
            OutputFormat::Csv => sweep_csv(&dataset, &meta),
            OutputFormat::Json => sweep_json(&dataset, &meta),
        }
    };
    emit(&resolved.out, &content)
}

fn run_spectrum(args: GridOnlyArgs) -> ExecResult {
    let resolved = resolve_model(&args.model)?;
    let spec = resolve_grid(&args.grid, &resolved.file)?;
    spec.validate()?;
    let g_c = resolved.model.g_c;

    let mut rows = Vec::new();
    let phases: &[Phase] = match spec.side {
        Side::Normal => &[Phase::Normal],
        Side::Superradiant => &[Phase::Superradiant],
        Side::Both => &[Phase::Normal, Phase::Superradiant],
    };
    for eps in spec.epsilons() {
        for &phase in phases {
            let sign = if phase == Phase::Normal { -1.0 } else { 1.0 };
            let g = g_c * (1.0 + sign * eps);
            let params = resolved.model.params.with_g(g)?;
            let state = mean_field_steady_state(&params, Branch::Plus);
            let spectrum = drift_matrix(&params, &state).and_then(|a| eigen_spectrum(&a));
            rows.push((g, eps, phase, spectrum));
        }
    }
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.2.cmp(&b.2)));

    let mut meta = meta_entries("spectrum", &resolved);
    meta.extend(grid_meta(&spec));

    let content = match resolved.config.format {
        OutputFormat::Csv => {
            let mut s = csv_meta(&meta);
            let mut header = "g,eps,phase,status".to_string();
            for i in 1..=6 {
                let _ = write!(header, ",re_lambda_{i},im_lambda_{i}");
            }
            let _ = writeln!(s, "{header}");
            for (g, eps, phase, spectrum) in &rows {
                let mut line = format!("{},{},{phase}", format_number(*g), format_number(*eps));
                match spectrum {
                    Ok(sp) => {
                        line.push_str(",ok");
                        for z in sp.eigenvalues {
                            let _ =
                                write!(line, ",{},{}", format_number(z.re), format_number(z.im));
                        }
                    }
                    Err(_) => {
                        line.push_str(",failed");
                        line.push_str(&",".repeat(12));
                    }
                }
                let _ = writeln!(s, "{line}");
            }
            s
        }
        OutputFormat::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|(g, eps, phase, spectrum)| {
                    let mut map = Map::new();
                    map.insert("g".into(), json_number(*g));
                    map.insert("eps".into(), json_number(*eps));
                    map.insert("phase".into(), Value::String(phase.to_string()));
                    match spectrum {
                        Ok(sp) => {
                            map.insert("status".into(), Value::String("ok".into()));
                            let ev: Vec<Value> = sp
                                .eigenvalues
                                .iter()
                                .map(
                                    |z| json!({ "re": json_number(z.re), "im": json_number(z.im) }),
                                )
                                .collect();
                            map.insert("eigenvalues".into(), Value::Array(ev));
                            map.insert("adr".into(), json_number(sp.adr));
                        }
                        Err(_) => {
                            map.insert("status".into(), Value::String("failed".into()));
                        }
                    }
                    Value::Object(map)
                })
                .collect();
            let doc = json!({ "meta": json_meta(&meta), "rows": json_rows });
            let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
            text.push('\n');
            text
        }
    };
    emit(&resolved.out, &content)
}

fn run_noise(args: NoiseArgs) -> ExecResult {
    let resolved = resolve_model(&args.model)?;
    let lookup =
        |flag: Option<f64>, key: &str, default: f64| -> std::result::Result<f64, Failure> {
            if let Some(v) = flag {
                return Ok(v);
            }
            match resolved.file.get(key) {
                Some(raw) => raw
                    .parse()
                    .map_err(|_| Failure::Usage(format!("config {key} = '{raw}' is not a number"))),
                None => Ok(default),
            }
        };
    let w_min = lookup(args.w_min, "w-min", 1e-4)?;
    let w_max = lookup(args.w_max, "w-max", 1e-2)?;
    let ppd = match args.w_points_per_decade {
        Some(v) => v,
        None => match resolved.file.get("w-points-per-decade") {
            Some(raw) => raw.parse().map_err(|_| {
                Failure::Usage(format!(
                    "config w-points-per-decade = '{raw}' is not a count"
                ))
            })?,
            None => 20,
        },
    };
    if !(w_min > 0.0 && w_max > w_min && ppd >= 1) {
        return Err(Failure::Usage(format!(
            "need 0 < w-min < w-max and w-points-per-decade >= 1, \
             got [{w_min}, {w_max}] with {ppd}"
        )));
    }

    let decades = (w_max / w_min).log10();
    let n = (decades * ppd as f64).floor() as usize + 1;
    let omegas: Vec<f64> = (0..n)
        .map(|i| w_min * 10f64.powf(i as f64 / ppd as f64))
        .collect();

    let params = resolved.model.params;
    let state = mean_field_steady_state(&params, Branch::Plus);
    let a = drift_matrix(&params, &state)?;
    let d = diffusion_matrix(&params);
    let spectrum = noise_spectrum(&a, &d, &omegas)?;

    let mut meta = meta_entries("noise", &resolved);
    meta.push(("w-min".into(), format_number(w_min)));
    meta.push(("w-max".into(), format_number(w_max)));
    meta.push(("w-points-per-decade".into(), ppd.to_string()));

    let content = match resolved.config.format {
        OutputFormat::Csv => {
            let mut s = csv_meta(&meta);
            let _ = writeln!(s, "omega,s11,s22,s33,s44,s55,s66");
            for (w, m) in spectrum.omegas.iter().zip(&spectrum.matrices) {
                let mut line = format_number(*w);
                for i in 0..6 {
                    let _ = write!(line, ",{}", format_number(m[(i, i)].re));
                }
                let _ = writeln!(s, "{line}");
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = spectrum
                .omegas
                .iter()
                .zip(&spectrum.matrices)
                .map(|(w, m)| {
                    let diag: Vec<Value> = (0..6).map(|i| json_number(m[(i, i)].re)).collect();
                    json!({ "omega": json_number(*w), "diag": diag })
                })
                .collect();
            let doc = json!({ "meta": json_meta(&meta), "rows": rows });
            let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
            text.push('\n');
            text
        }
    };
    emit(&resolved.out, &content)
}

fn run_ep_check(args: EpCheckArgs) -> ExecResult {
    let resolved = resolve_model(&args.model)?;
    let params = resolved.model.params;
    let state = mean_field_steady_state(&params, Branch::Plus);
    let a = drift_matrix(&params, &state)?;
    let spectrum = eigen_spectrum(&a)?;
    let slow_tol = args.slow_tol.unwrap_or_else(|| default_slow_tol(&spectrum));
    let rank_tol = args.rank_tol.unwrap_or(DEFAULT_RANK_TOL);
    let report = ep_defect(&a, slow_tol, rank_tol)?;

    let mut meta = meta_entries("ep-check", &resolved);
    meta.push(("slow-tol".into(), format_number(slow_tol)));
    meta.push(("rank-tol".into(), format_number(rank_tol)));

    let content = match resolved.config.format {
        OutputFormat::Csv => {
            let mut s = csv_meta(&meta);
            let _ = writeln!(s, "n_slow,numerical_rank,geometric_multiplicity,defective");
            let _ = writeln!(
                s,
                "{},{},{},{}",
                report.n_slow,
                report.numerical_rank,
                report.geometric_multiplicity,
                report.defective
            );
            s
        }
        OutputFormat::Json => {
            let doc = json!({
                "meta": json_meta(&meta),
                "n_slow": report.n_slow,
                "numerical_rank": report.numerical_rank,
                "geometric_multiplicity": report.geometric_multiplicity,
                "defective": report.defective,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
            text.push('\n');
            text
        }
    };
    emit(&resolved.out, &content)
}

fn run_fit(args: FitArgs) -> ExecResult {
    let format: OutputFormat = match &args.format {
        Some(raw) => raw
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?,
        None => OutputFormat::Csv,
    };
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Failure::Run(format!("cannot read {}: {e}", args.input.display())))?;
    let points = extract_csv_points(&text, &args.x_col, &args.y_col, args.x_min, args.x_max)
        .map_err(Failure::from)?;
    let fit = fit_power_law(&points)?;

    let meta = vec![
        ("command".to_string(), "fit".to_string()),
        ("version".to_string(), VERSION.to_string()),
        ("input".to_string(), args.input.display().to_string()),
        ("x-col".to_string(), args.x_col.clone()),
        ("y-col".to_string(), args.y_col.clone()),
    ];

    let content = match format {
        OutputFormat::Csv => {
            let mut s = csv_meta(&meta);
            let _ = writeln!(
                s,
                "observable,outcome,exponent,log_amplitude,r_squared,n_points,eps_min,eps_max"
            );
            let _ = writeln!(
                s,
                "{},fit,{},{},{},{},{},{}",
                args.y_col,
                format_number(fit.exponent),
                format_number(fit.log_amplitude),
                format_number(fit.r_squared),
                fit.n_points,
                format_number(fit.window.0),
                format_number(fit.window.1)
            );
            s
        }
        OutputFormat::Json => {
            let doc = json!({
                "meta": json_meta(&meta),
                "observable": args.y_col,
                "outcome": "fit",
                "exponent": json_number(fit.exponent),
                "log_amplitude": json_number(fit.log_amplitude),
                "r_squared": json_number(fit.r_squared),
                "n_points": fit.n_points,
                "eps_min": json_number(fit.window.0),
                "eps_max": json_number(fit.window.1),
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("json serialization");
            text.push('\n');
            text
        }
    };
    emit(&args.out, &content)
}

/// Pulls `(x, y)` pairs out of CSV text: `#` lines are meta, the first
/// remaining line is the header, a `status` column (when present)
/// restricts rows to `ok`, and rows with empty cells in either column
/// are skipped.
fn extract_csv_points(
    text: &str,
    x_col: &str,
    y_col: &str,
    x_min: Option<f64>,
    x_max: Option<f64>,
) -> Result<Vec<(f64, f64)>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Domain("input file has no header line".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Domain(format!("column '{name}' not found in header")))
    };
    let xi = find(x_col)?;
    let yi = find(y_col)?;
    let status_idx = columns.iter().position(|c| *c == "status");

    let mut points = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if let Some(si) = status_idx {
            if cells.get(si).map(|s| *s != "ok").unwrap_or(true) {
                continue;
            }
        }
        let (Some(xs), Some(ys)) = (cells.get(xi), cells.get(yi)) else {
            continue;
        };
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        let parse = |name: &str, raw: &str| -> Result<f64> {
            raw.parse::<f64>().map_err(|_| {
                Error::Domain(format!(
                    "row {}: {name} = '{raw}' is not a number",
                    lineno + 2
                ))
            })
        };
        let x = parse(x_col, xs)?;
        let y = parse(y_col, ys)?;
        if x_min.map(|lo| x < lo).unwrap_or(false) || x_max.map(|hi| x > hi).unwrap_or(false) {
            continue;
        }
        points.push((x, y));
    }
    Ok(points)
}
