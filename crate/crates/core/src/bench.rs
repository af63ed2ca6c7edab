//! Multistart experiments reporting, per method, the best-known `W*`, the mean
//! final `W` and the attraction rate of `W*`.
//!
//! A report has a deterministic `body` (a pure function of the configuration
//! and the data) and a separate `timing` section holding wall-clock figures.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{
    cut_dendrogram, hierarchical_average_linkage, hierarchical_run, kmedoids_binary, pam_medians,
};
use crate::criteria::{within_inertia, CriterionKind, Problem};
use crate::datagen::{builtin_spec, generate};
use crate::dataset::BinaryDataset;
use crate::dissimilarity::{DissimilarityKind, DissimilarityMatrix};
use crate::error::{Error, Result};
use crate::partition::check_class_count;
use crate::population::{ant_colony, genetic_algorithm, AcParams, GaParams};
use crate::run::RunResult;
use crate::scalar::Scalar;
use crate::trajectory::{
    simulated_annealing, tabu_search, threshold_accepting, SaParams, TaParams, TsParams,
};

/// Environment variable holding the worker budget for concurrent runs.
pub const WORKERS_ENV: &str = "BINCLUST_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Sa,
    Ta,
    Ts,
    Ga,
    Ac,
    Pam,
    Kmed,
    Hc,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Sa,
        Method::Ta,
        Method::Ts,
        Method::Ga,
        Method::Ac,
        Method::Pam,
        Method::Kmed,
        Method::Hc,
    ];

    /// The methods compared in the standard results table.
    pub const TABLE: [Method; 7] =
        [Method::Sa, Method::Ta, Method::Ts, Method::Ga, Method::Ac, Method::Pam, Method::Hc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sa => "SA",
            Method::Ta => "TA",
            Method::Ts => "TS",
            Method::Ga => "GA",
            Method::Ac => "AC",
            Method::Pam => "PAM",
            Method::Kmed => "KMED",
            Method::Hc => "HC",
        }
    }

    /// Deterministic methods run once whatever the multistart size.
    pub fn is_deterministic(self) -> bool {
        self == Method::Hc
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sa" => Ok(Method::Sa),
            "ta" => Ok(Method::Ta),
            "ts" => Ok(Method::Ts),
            "ga" => Ok(Method::Ga),
            "ac" | "aco" => Ok(Method::Ac),
            "pam" => Ok(Method::Pam),
            "kmed" | "kmedoids" => Ok(Method::Kmed),
            "hc" => Ok(Method::Hc),
            other => Err(format!(
                "unknown method '{other}' (expected one of sa, ta, ts, ga, ac, pam, kmed, hc)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    File(PathBuf),
    /// One of the 16 generated tables (1-based id) with `p` variables.
    Builtin {
        id: usize,
        p: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodParams {
    pub sa: SaParams,
    pub ta: TaParams,
    pub ts: TsParams,
    pub ga: GaParams,
    pub ac: AcParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DataSource,
    pub criterion: CriterionKind,
    pub dissim: DissimilarityKind,
    /// Dissimilarity used to build the dendrogram; defaults to `dissim`.
    pub hc_dissim: Option<DissimilarityKind>,
    pub k: usize,
    pub methods: Vec<Method>,
    pub multistart: usize,
    pub base_seed: u64,
    pub tol: f64,
    /// Score each method's attraction rate against its own best run instead
    /// of the best over all methods.
    pub per_method_w_star: bool,
    pub params: MethodParams,
    /// Worker budget; results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    /// Standard protocol defaults: median criterion on L1, the seven
    /// compared methods, 100 runs each, relative tolerance 0.05.
    pub fn new(source: DataSource, k: usize) -> Self {
        ExperimentConfig {
            source,
            criterion: CriterionKind::L1Median,
            dissim: DissimilarityKind::L1,
            hc_dissim: None,
            k,
            methods: Method::TABLE.to_vec(),
            multistart: 100,
            base_seed: 0,
            tol: 0.05,
            per_method_w_star: false,
            params: MethodParams::default(),
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.multistart == 0 {
            return Err(Error::Config("multistart size must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker budget must be at least 1".into()));
        }
        if let DataSource::Builtin { id, p } = self.source {
            builtin_spec(id, p)?.validate()?;
        }
        for method in &self.methods {
            match method {
                Method::Sa => self.params.sa.validate()?,
                Method::Ta => self.params.ta.validate()?,
                Method::Ts => self.params.ts.validate()?,
                Method::Ga => self.params.ga.validate()?,
                Method::Ac => self.params.ac.validate()?,
                Method::Pam | Method::Kmed | Method::Hc => {}
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding of the configuration.
    pub fn config_hash(&self) -> Result<String> {
        let encoded = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&encoded)))
    }

    /// Selected methods in first-mention order, duplicates dropped.
    fn unique_methods(&self) -> Vec<Method> {
        let mut seen = Vec::new();
        for &m in &self.methods {
            if !seen.contains(&m) {
                seen.push(m);
            }
        }
        seen
    }
}

/// One run together with its wall-clock duration.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedRun<T> {
    pub result: RunResult<T>,
    pub seconds: f64,
}

fn hc_with<T: Scalar>(
    problem: &Problem<'_, T>,
    k: usize,
    kind: DissimilarityKind,
) -> Result<RunResult<T>> {
    if kind == problem.dissim().kind() {
        return hierarchical_run(problem, k);
    }
    check_class_count(problem.n(), k)?;
    let tree = match kind {
        DissimilarityKind::L1 => hierarchical_average_linkage(
            &DissimilarityMatrix::<i64>::compute(problem.data(), kind)?,
        ),
        DissimilarityKind::Jaccard => hierarchical_average_linkage(
            &DissimilarityMatrix::<f64>::compute(problem.data(), kind)?,
        ),
    };
    let best_partition = cut_dendrogram(&tree, k)?;
    let best_w = within_inertia(&best_partition, problem);
    Ok(RunResult {
        best_partition,
        best_w,
        trajectory: None,
        iterations: tree.merges.len(),
        seed: 0,
        escapes: 0,
    })
}

/// A single run of `method` with the given seed.
pub fn run_method<T: Scalar>(
    problem: &Problem<'_, T>,
    config: &ExperimentConfig,
    method: Method,
    seed: u64,
) -> Result<RunResult<T>> {
    let k = config.k;
    let params = &config.params;
    match method {
        Method::Sa => simulated_annealing(problem, k, &params.sa, seed, None),
        Method::Ta => threshold_accepting(problem, k, &params.ta, seed, None),
        Method::Ts => tabu_search(problem, k, &params.ts, seed, None),
        Method::Ga => genetic_algorithm(problem, k, &params.ga, seed),
        Method::Ac => ant_colony(problem, k, &params.ac, seed),
        Method::Pam => pam_medians(problem, k, seed, None),
        Method::Kmed => kmedoids_binary(problem, k, seed, None),
        Method::Hc => hc_with(problem, k, config.hc_dissim.unwrap_or(config.dissim)),
    }
}

/// Runs `method` with seeds `base_seed .. base_seed + m` (once for
/// deterministic methods) on the current rayon pool. Results are sorted by
/// seed; the first failing run is reported with its index.
pub fn multistart<T: Scalar>(
    problem: &Problem<'_, T>,
    config: &ExperimentConfig,
    method: Method,
) -> Result<Vec<TimedRun<T>>> {
    let runs = if method.is_deterministic() { 1 } else { config.multistart };
    let outcomes: Vec<Result<TimedRun<T>>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let seed = config.base_seed.wrapping_add(r as u64);
            let started = Instant::now();
            let result = run_method(problem, config, method, seed)?;
            Ok(TimedRun { result, seconds: started.elapsed().as_secs_f64() })
        })
        .collect();
    let mut done = Vec::with_capacity(runs);
    for (run, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(t) => done.push(t),
            Err(source) => {
                return Err(Error::Run {
                    method: method.name().into(),
                    run,
                    source: Box::new(source),
                })
            }
        }
    }
    done.sort_by_key(|t| t.result.seed);
    Ok(done)
}

/// Fraction of `ws` within relative tolerance of `w_star`; when `w_star` is
/// zero only exact zeros count.
pub fn attraction_rate(ws: &[f64], w_star: f64, tol: f64) -> Result<f64> {
    if ws.is_empty() {
        return Err(Error::Parameter("attraction rate of an empty run list".into()));
    }
    if !(tol >= 0.0) || w_star < 0.0 {
        return Err(Error::Parameter(format!(
            "need tol >= 0 and w_star >= 0, got tol = {tol}, w_star = {w_star}"
        )));
    }
    let hits = if w_star == 0.0 {
        ws.iter().filter(|&&w| w == 0.0).count()
    } else {
        let bound = w_star * (1.0 + tol);
        ws.iter().filter(|&&w| w <= bound).count()
    };
    Ok(hits as f64 / ws.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub source: DataSource,
    pub n: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub runs: usize,
    pub seeds: Vec<u64>,
    /// Final `W` of each run, in seed order.
    pub ws: Vec<f64>,
    pub best_w: f64,
    pub mean_w: f64,
    /// Absent for deterministic methods.
    pub attraction_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodError {
    pub method: Method,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub base_seed: u64,
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub dataset: DatasetInfo,
    pub criterion: CriterionKind,
    pub dissim: DissimilarityKind,
    pub k: usize,
    pub multistart: usize,
    pub tol: f64,
    /// Best `W` over every successful run of every method.
    pub w_star: Option<f64>,
    pub methods: Vec<MethodSummary>,
    pub errors: Vec<MethodError>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTiming {
    pub method: Method,
    pub total_seconds: f64,
    pub mean_seconds: f64,
    pub max_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub body: ReportBody,
    pub timing: Vec<MethodTiming>,
}

impl BenchReport {
    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        self.body.methods.iter().find(|s| s.method == method)
    }
}

pub fn load_dataset(source: &DataSource) -> Result<BinaryDataset> {
    match source {
        DataSource::File(path) => BinaryDataset::load(path),
        DataSource::Builtin { id, p } => Ok(generate(&builtin_spec(*id, *p)?)?.dataset),
    }
}

fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<BenchReport> {
    config.validate()?;
    let data = load_dataset(&config.source)?;
    run_experiment_on(&data, config)
}

/// Runs the experiment on already loaded data; `config.source` is only
/// recorded in the report.
pub fn run_experiment_on(data: &BinaryDataset, config: &ExperimentConfig) -> Result<BenchReport> {
    config.validate()?;
    check_class_count(data.n(), config.k)?;
    let pool = worker_pool(config.workers)?;
    match config.dissim {
        DissimilarityKind::L1 => {
            let d = DissimilarityMatrix::<i64>::compute(data, config.dissim)?;
            let problem = Problem::new(data, &d, config.criterion)?;
            pool.install(|| collect(&problem, config))
        }
        DissimilarityKind::Jaccard => {
            let d = DissimilarityMatrix::<f64>::compute(data, config.dissim)?;
            let problem = Problem::new(data, &d, config.criterion)?;
            pool.install(|| collect(&problem, config))
        }
    }
}

fn collect<T: Scalar>(problem: &Problem<'_, T>, config: &ExperimentConfig) -> Result<BenchReport> {
    let mut finished = Vec::new();
    let mut errors = Vec::new();
    for method in config.unique_methods() {
        match multistart(problem, config, method) {
            Ok(runs) => finished.push((method, runs)),
            Err(e) => {
                log::warn!("{method} failed: {e}");
                errors.push(MethodError { method, message: e.to_string() });
            }
        }
    }

    let w_star = finished
        .iter()
        .flat_map(|(_, runs)| runs.iter().map(|t| t.result.best_w.as_f64()))
        .reduce(f64::min);

    let mut methods = Vec::with_capacity(finished.len());
    let mut timing = Vec::with_capacity(finished.len());
    for (method, runs) in &finished {
        let ws: Vec<f64> = runs.iter().map(|t| t.result.best_w.as_f64()).collect();
        let best_w = ws.iter().copied().fold(f64::INFINITY, f64::min);
        let mean_w = ws.iter().sum::<f64>() / ws.len() as f64;
        let reference = if config.per_method_w_star { Some(best_w) } else { w_star };
        let attraction_rate = match (method.is_deterministic(), reference) {
            (false, Some(w)) => Some(attraction_rate(&ws, w, config.tol)?),
            _ => None,
        };
        methods.push(MethodSummary {
            method: *method,
            runs: runs.len(),
            seeds: runs.iter().map(|t| t.result.seed).collect(),
            ws,
            best_w,
            mean_w,
            attraction_rate,
        });
        let secs: Vec<f64> = runs.iter().map(|t| t.seconds).collect();
        let total: f64 = secs.iter().sum();
        timing.push(MethodTiming {
            method: *method,
            total_seconds: total,
            mean_seconds: total / secs.len() as f64,
            max_seconds: secs.iter().copied().fold(0.0, f64::max),
        });
    }

    Ok(BenchReport {
        body: ReportBody {
            dataset: DatasetInfo {
                source: config.source.clone(),
                n: problem.n(),
                p: problem.data().p(),
            },
            criterion: config.criterion,
            dissim: config.dissim,
            k: config.k,
            multistart: config.multistart,
            tol: config.tol,
            w_star,
            methods,
            errors,
            provenance: Provenance {
                base_seed: config.base_seed,
                config_hash: config.config_hash()?,
                version: env!("CARGO_PKG_VERSION").into(),
            },
        },
        timing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format '{other}' (expected table, json or csv)")),
        }
    }
}

fn source_label(source: &DataSource) -> String {
    match source {
        DataSource::File(path) => path.display().to_string(),
        DataSource::Builtin { id, p } => format!("builtin {id} (p = {p})"),
    }
}

pub fn render(report: &BenchReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Table => Ok(render_table(report)),
    }
}

fn render_table(report: &BenchReport) -> String {
    let b = &report.body;
    let mut out = format!(
        "data: {}  n = {}  p = {}  k = {}  criterion = {}  dissimilarity = {}  m = {}\n",
        source_label(&b.dataset.source),
        b.dataset.n,
        b.dataset.p,
        b.k,
        b.criterion,
        b.dissim,
        b.multistart
    );
    match b.w_star {
        Some(w) => out += &format!("W* = {w}\n"),
        None => out += "W* = (no successful runs)\n",
    }
    out += &format!(
        "{:<6}{:>6}{:>14}{:>14}{:>8}{:>12}\n",
        "method", "runs", "best W", "mean W", "a_r", "mean s"
    );
    for s in &b.methods {
        let ar = s.attraction_rate.map_or("-".to_string(), |a| format!("{:.0}%", 100.0 * a));
        let secs =
            report.timing.iter().find(|t| t.method == s.method).map_or(0.0, |t| t.mean_seconds);
        out += &format!(
            "{:<6}{:>6}{:>14}{:>14.2}{:>8}{:>12.4}\n",
            s.method.name(),
            s.runs,
            s.best_w,
            s.mean_w,
            ar,
            secs
        );
    }
    for e in &b.errors {
        out += &format!("error {}: {}\n", e.method, e.message);
    }
    out
}

fn render_csv(report: &BenchReport) -> Result<String> {
    let b = &report.body;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method",
        "runs",
        "w_star",
        "best_w",
        "mean_w",
        "attraction_rate",
        "mean_seconds",
    ])?;
    for s in &b.methods {
        let secs =
            report.timing.iter().find(|t| t.method == s.method).map_or(0.0, |t| t.mean_seconds);
        w.write_record([
            s.method.name().to_string(),
            s.runs.to_string(),
            b.w_star.map_or(String::new(), |x| x.to_string()),
            s.best_w.to_string(),
            s.mean_w.to_string(),
            s.attraction_rate.map_or(String::new(), |a| a.to_string()),
            secs.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
