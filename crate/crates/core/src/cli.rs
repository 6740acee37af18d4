//! The `cashsub` command line.
//!
//! ```text
//! cashsub <eval|check|penalty|reconstruct|lift-check> --spec PATH [--data PATH]
//!         [--trials K] [--tol T] [--box B] [--grid-step H] [--mode paper|conjugate]
//!         [--seed S] [--out PATH]
//! ```
//!
//! Scenario data is comma-separated text with a header `s1,...,sN` and one
//! position per row. Reports are pretty-printed JSON with a fixed field order;
//! only `generated_at` changes between identical runs. Exit codes: 0 when
//! every check passed, 1 when a claimed axiom or a reconstruction bound was
//! violated, 2 on usage or format errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::axioms::{
    check_cash_additivity, check_cash_subadditivity, check_continuity_proxy, check_convexity,
    check_loss_based, check_monotonicity, AxiomId, AxiomReport, CheckConfig,
};
use crate::duality::{
    penalty_surface, reconstruct_argmax, PenaltyMode, PenaltySurface, SearchConfig, WeightMode,
};
use crate::embedding::verify_lift;
use crate::error::{Error, Result};
use crate::scenario::ScenarioVector;
use crate::statistic::{Axiom, RiskStatistic, RiskStatisticSpec, StatisticKind};

pub const TOOL: &str = "cashsub";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Check,
    Penalty,
    Reconstruct,
    LiftCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    #[value(name = "paper")]
    #[serde(rename = "paper")]
    AcceptanceSet,
    Conjugate,
}

impl From<ModeArg> for PenaltyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AcceptanceSet => PenaltyMode::AcceptanceSet,
            ModeArg::Conjugate => PenaltyMode::Conjugate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightsArg {
    SubProbability,
    Simplex,
}

impl From<WeightsArg> for WeightMode {
    fn from(w: WeightsArg) -> Self {
        match w {
            WeightsArg::SubProbability => WeightMode::SubProbability,
            WeightsArg::Simplex => WeightMode::Simplex,
        }
    }
}

/// Everything a run needs. Echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Parser, Serialize)]
#[command(name = TOOL, version, about = "Cash sub-additive risk statistics on scenario data")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Risk statistic spec (JSON).
    #[arg(long = "spec")]
    pub spec_path: Option<PathBuf>,
    /// Scenario data, header `s1,...,sN`.
    #[arg(long = "data")]
    pub data_path: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Half-width of the sampling and search box.
    #[arg(long = "box", default_value_t = 10.0)]
    pub box_half_width: f64,
    #[arg(long, default_value_t = 0.05)]
    pub grid_step: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::AcceptanceSet)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = WeightsArg::SubProbability)]
    pub weights: WeightsArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dimension for statistics not tied to one, when no data is given.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Reuse a penalty table instead of recomputing it (reconstruct).
    #[arg(long = "table")]
    pub table_path: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long = "out")]
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            spec_path: None,
            data_path: None,
            trials: 10_000,
            tol: 1e-9,
            box_half_width: 10.0,
            grid_step: 0.05,
            mode: ModeArg::AcceptanceSet,
            weights: WeightsArg::SubProbability,
            seed: 0,
            dim: None,
            table_path: None,
            out_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: &str| Err(Error::Usage(m.to_string()));
        if self.spec_path.is_none() {
            return usage("--spec is required");
        }
        if matches!(self.command, Command::Eval | Command::Reconstruct) && self.data_path.is_none()
        {
            return usage("--data is required for eval and reconstruct");
        }
        if self.trials == 0 {
            return usage("--trials must be at least 1");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return usage("--tol must be positive");
        }
        if !(self.box_half_width > 0.0 && self.box_half_width.is_finite()) {
            return usage("--box must be positive");
        }
        if crate::duality::steps_per_unit(self.grid_step).is_err() {
            return usage("--grid-step must be 1/k for a whole number k");
        }
        if self.dim == Some(0) {
            return usage("--dim must be at least 1");
        }
        Ok(())
    }

    fn check_config(&self, dim: usize) -> CheckConfig {
        CheckConfig {
            trials: self.trials,
            tol: self.tol,
            box_half_width: self.box_half_width,
            seed: self.seed,
            dim,
            ..CheckConfig::default()
        }
    }

    fn search_config(&self) -> SearchConfig {
        SearchConfig::with_box(self.box_half_width)
    }
}

/// Parses scenario rows from text.
pub fn parse_scenarios(text: &str, origin: &str) -> Result<Vec<ScenarioVector>> {
    let err = |m: String| Error::format(origin, m);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(err("empty file".into())),
        Some(h) => h.map_err(|e| err(e.to_string()))?,
    };
    let dim = header.len();
    if dim == 0 || header.iter().all(str::is_empty) {
        return Err(err("header names no scenarios".into()));
    }
    for (i, name) in header.iter().enumerate() {
        if name != format!("s{}", i + 1) {
            return Err(err(format!(
                "header column {} must be s{}, got {name:?}",
                i + 1,
                i + 1
            )));
        }
    }
    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let row = rec.position().map_or(0, |p| p.line());
        if rec.len() != dim {
            return Err(err(format!(
                "ragged row {row}: expected {dim} fields, found {}",
                rec.len()
            )));
        }
        let values = rec
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.parse::<f64>().map_err(|_| {
                    err(format!(
                        "row {row}, column {}: {s:?} is not a number",
                        c + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(ScenarioVector::new(values).map_err(|e| err(format!("row {row}: {e}")))?);
    }
    if out.is_empty() {
        return Err(err("no scenario rows".into()));
    }
    Ok(out)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<ScenarioVector>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenarios(&text, &path.display().to_string())
}

pub fn load_spec(path: &Path) -> Result<RiskStatisticSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RiskStatisticSpec::from_json(&text)
        .map_err(|e| Error::format(path.display().to_string(), e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub generated_at: String,
    pub seed: u64,
    pub config: RunConfig,
    pub status: Status,
    pub results: Results,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Eval(EvalResults),
    Check(CheckResults),
    Penalty(PenaltyResults),
    Reconstruct(ReconstructResults),
    Lift(LiftResults),
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalRecord {
    pub row: usize,
    pub x: ScenarioVector,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResults {
    pub kind: StatisticKind,
    pub dimension: usize,
    pub records: Vec<EvalRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckedReport {
    pub claimed: bool,
    #[serde(flatten)]
    pub report: AxiomReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResults {
    pub kind: StatisticKind,
    pub dimension: usize,
    pub claimed_axioms: BTreeSet<Axiom>,
    pub reports: Vec<CheckedReport>,
    /// The pair form of cash sub-additivity agrees with its one-sided forms.
    pub cash_subadditivity_consistent: bool,
    /// Claimed axioms that were violated.
    pub violated_claims: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PenaltyResults {
    pub kind: StatisticKind,
    pub dimension: usize,
    pub mode: PenaltyMode,
    pub weights: WeightMode,
    pub grid_points: usize,
    pub boundary_flagged: usize,
    pub min_value: f64,
    pub max_value: f64,
    pub table_path: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub row: usize,
    pub x: ScenarioVector,
    pub eval: f64,
    pub reconstruct: f64,
    pub gap: f64,
    /// `grid_step · ‖X‖₁ + tol`.
    pub bound: f64,
    pub within_bound: bool,
    pub argmax_weight: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructResults {
    pub kind: StatisticKind,
    pub dimension: usize,
    pub mode: PenaltyMode,
    pub surface_source: &'static str,
    pub table_path: Option<String>,
    pub max_gap: f64,
    pub probes: Vec<ProbeRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftResults {
    pub kind: StatisticKind,
    pub dimension: usize,
    pub reports: Vec<AxiomReport>,
}

/// Sidecar table next to the report: `report.json` → `report.penalty.csv`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("penalty.csv")
}

struct Loaded {
    spec: RiskStatisticSpec,
    data: Option<Vec<ScenarioVector>>,
    dim: usize,
}

fn load(config: &RunConfig) -> Result<Loaded> {
    config.validate()?;
    let spec = load_spec(config.spec_path.as_deref().expect("validated"))?;
    let data = config
        .data_path
        .as_deref()
        .map(load_scenarios)
        .transpose()?;
    let data_dim = data.as_ref().map(|d| d[0].dim());
    let dim = match (spec.dimension(), data_dim) {
        (Some(s), Some(d)) if s != d => {
            return Err(Error::DimensionMismatch {
                expected: s,
                actual: d,
            })
        }
        (Some(s), _) => s,
        (None, Some(d)) => d,
        (None, None) => config.dim.unwrap_or(2),
    };
    Ok(Loaded { spec, data, dim })
}

fn claim_covers(claims: &BTreeSet<Axiom>, id: AxiomId) -> bool {
    let any_b = || {
        [Axiom::B1, Axiom::B2, Axiom::B3, Axiom::B4]
            .iter()
            .any(|b| claims.contains(b))
    };
    match id {
        AxiomId::A1 => claims.contains(&Axiom::A1),
        AxiomId::A2 => claims.contains(&Axiom::A2),
        AxiomId::A3 => claims.contains(&Axiom::A3),
        AxiomId::A5 | AxiomId::A5Left | AxiomId::A5Right => claims.contains(&Axiom::A5),
        AxiomId::B1 => claims.contains(&Axiom::B1),
        AxiomId::B2 => claims.contains(&Axiom::B2),
        AxiomId::B3 => claims.contains(&Axiom::B3),
        AxiomId::B4 => claims.contains(&Axiom::B4),
        AxiomId::LossImpliesCashSubadditivity => any_b(),
        AxiomId::A4Proxy | AxiomId::LiftExtension => true,
    }
}

fn run_check(config: &RunConfig, loaded: &Loaded) -> Result<(Status, Results)> {
    let spec = &loaded.spec;
    let cfg = config.check_config(loaded.dim);
    let claims = spec.claimed_axioms();
    let mut reports = vec![
        check_cash_additivity(spec, &cfg)?,
        check_monotonicity(spec, &cfg)?,
        check_convexity(spec, &cfg)?,
        check_continuity_proxy(spec, &cfg)?,
    ];
    let csa = check_cash_subadditivity(spec, &cfg)?;
    reports.extend(csa.reports().into_iter().cloned());
    let loss_claimed = claims
        .iter()
        .any(|a| matches!(a, Axiom::B1 | Axiom::B2 | Axiom::B3 | Axiom::B4));
    if spec.kind() == StatisticKind::LossBased || loss_claimed {
        let lb = check_loss_based(spec, &cfg)?;
        reports.extend(lb.reports().into_iter().cloned());
    }
    let reports: Vec<CheckedReport> = reports
        .into_iter()
        .map(|report| CheckedReport {
            claimed: claim_covers(&claims, report.axiom),
            report,
        })
        .collect();
    let violated_claims: Vec<String> = reports
        .iter()
        .filter(|r| r.claimed && !r.report.passed())
        .map(|r| match r.report.epsilon {
            Some(eps) => format!("{} (epsilon {eps})", r.report.axiom),
            None => r.report.axiom.to_string(),
        })
        .collect();
    let status = if violated_claims.is_empty() && csa.consistent {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok((
        status,
        Results::Check(CheckResults {
            kind: spec.kind(),
            dimension: loaded.dim,
            claimed_axioms: claims,
            reports,
            cash_subadditivity_consistent: csa.consistent,
            violated_claims,
        }),
    ))
}

fn compute_surface(config: &RunConfig, loaded: &Loaded) -> Result<PenaltySurface> {
    penalty_surface(
        &loaded.spec,
        loaded.dim,
        config.grid_step,
        config.weights.into(),
        config.mode.into(),
        &config.search_config(),
    )
}

fn write_sidecar(config: &RunConfig, surface: &PenaltySurface) -> Result<Option<String>> {
    match &config.out_path {
        Some(out) => {
            let path = sidecar_path(out);
            surface.save(&path)?;
            Ok(Some(path.display().to_string()))
        }
        None => Ok(None),
    }
}

fn run_penalty(config: &RunConfig, loaded: &Loaded) -> Result<(Status, Results)> {
    let surface = compute_surface(config, loaded)?;
    let table_path = write_sidecar(config, &surface)?;
    let values = surface.entries.iter().map(|e| e.value);
    Ok((
        Status::Pass,
        Results::Penalty(PenaltyResults {
            kind: loaded.spec.kind(),
            dimension: loaded.dim,
            mode: surface.mode,
            weights: config.weights.into(),
            grid_points: surface.entries.len(),
            boundary_flagged: surface.boundary_count(),
            min_value: values.clone().fold(f64::INFINITY, f64::min),
            max_value: values.fold(f64::NEG_INFINITY, f64::max),
            table_path,
        }),
    ))
}

fn run_reconstruct(config: &RunConfig, loaded: &Loaded) -> Result<(Status, Results)> {
    let (surface, source, table_path) = match &config.table_path {
        Some(path) => {
            let s = PenaltySurface::load(path)?;
            if s.dim != loaded.dim {
                return Err(Error::DimensionMismatch {
                    expected: loaded.dim,
                    actual: s.dim,
                });
            }
            (s, "imported", Some(path.display().to_string()))
        }
        None => {
            let s = compute_surface(config, loaded)?;
            let path = write_sidecar(config, &s)?;
            (s, "computed", path)
        }
    };
    let probes = loaded.data.as_ref().expect("validated");
    let mut records = Vec::with_capacity(probes.len());
    for (i, x) in probes.iter().enumerate() {
        let eval = loaded.spec.eval(x)?;
        let rec = reconstruct_argmax(&surface, x)?;
        let gap = (rec.value - eval).abs();
        let bound = surface.grid_step * x.iter().map(|v| v.abs()).sum::<f64>() + config.tol;
        records.push(ProbeRecord {
            row: i + 2,
            x: x.clone(),
            eval,
            reconstruct: rec.value,
            gap,
            bound,
            within_bound: gap <= bound,
            argmax_weight: rec.weight.into(),
        });
    }
    let status = if records.iter().all(|r| r.within_bound) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok((
        status,
        Results::Reconstruct(ReconstructResults {
            kind: loaded.spec.kind(),
            dimension: loaded.dim,
            mode: surface.mode,
            surface_source: source,
            table_path,
            max_gap: records.iter().map(|r| r.gap).fold(0.0, f64::max),
            probes: records,
        }),
    ))
}

fn run_eval(loaded: &Loaded) -> Result<(Status, Results)> {
    let data = loaded.data.as_ref().expect("validated");
    let records = data
        .iter()
        .enumerate()
        .map(|(i, x)| {
            Ok(EvalRecord {
                row: i + 2,
                x: x.clone(),
                value: loaded.spec.eval(x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        Status::Pass,
        Results::Eval(EvalResults {
            kind: loaded.spec.kind(),
            dimension: loaded.dim,
            records,
        }),
    ))
}

fn run_lift(config: &RunConfig, loaded: &Loaded) -> Result<(Status, Results)> {
    let report = verify_lift(&loaded.spec, &config.check_config(loaded.dim))?;
    let status = if report.passed() {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok((
        status,
        Results::Lift(LiftResults {
            kind: loaded.spec.kind(),
            dimension: loaded.dim,
            reports: report.reports().into_iter().cloned().collect(),
        }),
    ))
}

/// Runs a command and builds its report without writing anything but the
/// penalty sidecar.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let loaded = load(config)?;
    let (status, results) = match config.command {
        Command::Eval => run_eval(&loaded)?,
        Command::Check => run_check(config, &loaded)?,
        Command::Penalty => run_penalty(config, &loaded)?,
        Command::Reconstruct => run_reconstruct(config, &loaded)?,
        Command::LiftCheck => run_lift(config, &loaded)?,
    };
    Ok(Report {
        tool: TOOL,
        version: env!("CARGO_PKG_VERSION"),
        command: config.command,
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        seed: config.seed,
        config: config.clone(),
        status,
        results,
    })
}

/// Writes the report to `out`, or to stdout.
pub fn emit_report(report: &Report, out: Option<&Path>) -> Result<()> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Runs and writes the report, returning the exit code.
pub fn run(config: &RunConfig) -> Result<i32> {
    let report = execute(config)?;
    emit_report(&report, config.out_path.as_deref())?;
    Ok(if report.passed() { 0 } else { 1 })
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{TOOL}: error: {e}");
            2
        }
    }
}
