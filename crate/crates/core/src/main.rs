use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use binclust::bench::{self, DataSource, ExperimentConfig, Method, MethodParams, OutputFormat};
use binclust::datagen::{self, CardinalityScheme, GeneratorSpec, DEFAULT_P};
use binclust::oracle;
use binclust::{
    BinaryDataset, CriterionKind, DissimilarityKind, DissimilarityMatrix, Problem, Scalar,
};

#[derive(Parser)]
#[command(
    name = "binclust",
    version,
    about = "Cluster binary data with combinatorial metaheuristics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted-partition dataset (CSV, truth labels, JSON spec).
    Generate(GenerateArgs),
    /// Run a single method once.
    Run(RunArgs),
    /// Multistart experiment over several methods.
    Bench(BenchArgs),
    /// Exact optimum by exhaustive enumeration (small n only).
    Oracle(OracleArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// CSV file of 0/1 values, one object per row.
    #[arg(long, conflicts_with = "builtin")]
    data: Option<PathBuf>,
    /// Builtin generated table, 1..=16.
    #[arg(long)]
    builtin: Option<usize>,
    /// Number of variables for builtin tables.
    #[arg(long, default_value_t = DEFAULT_P)]
    p: usize,
}

impl DataArgs {
    fn source(&self) -> anyhow::Result<DataSource> {
        match (&self.data, self.builtin) {
            (Some(path), None) => Ok(DataSource::File(path.clone())),
            (None, Some(id)) => Ok(DataSource::Builtin { id, p: self.p }),
            _ => bail!("exactly one of --data or --builtin is required"),
        }
    }

    /// Explicit `k`, or the planted class count of a builtin table.
    fn k(&self, k: Option<usize>) -> anyhow::Result<usize> {
        match (k, self.builtin) {
            (Some(k), _) => Ok(k),
            (None, Some(id)) => Ok(datagen::builtin_spec(id, self.p)?.k),
            (None, None) => bail!("--k is required with --data"),
        }
    }
}

#[derive(Args, Clone)]
struct ProblemArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of classes (defaults to the planted count for builtin tables).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "l1")]
    criterion: CriterionKind,
    #[arg(long, default_value = "l1")]
    dissim: DissimilarityKind,
}

#[derive(Args)]
struct GenerateArgs {
    /// Builtin table id; otherwise the design is given by the flags below.
    #[arg(long)]
    builtin: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_P)]
    p: usize,
    #[arg(long, required_unless_present = "builtin")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "builtin")]
    k: Option<usize>,
    /// equal or one-big-half
    #[arg(long, default_value = "equal")]
    scheme: String,
    /// Comma-separated probability of a one for each class.
    #[arg(long, value_delimiter = ',', required_unless_present = "builtin")]
    pis: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix; writes PREFIX.csv, PREFIX.truth and PREFIX.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Default)]
struct Overrides {
    #[arg(long = "sa.chi0")]
    sa_chi0: Option<f64>,
    #[arg(long = "sa.chain-length")]
    sa_chain_length: Option<usize>,
    #[arg(long = "sa.gamma")]
    sa_gamma: Option<f64>,
    #[arg(long = "sa.epsilon")]
    sa_epsilon: Option<f64>,
    #[arg(long = "sa.max-chains")]
    sa_max_chains: Option<usize>,
    #[arg(long = "ta.th0")]
    ta_th0: Option<f64>,
    #[arg(long = "ta.gamma")]
    ta_gamma: Option<f64>,
    #[arg(long = "ta.maxiter")]
    ta_maxiter: Option<usize>,
    #[arg(long = "ta.epsilon")]
    ta_epsilon: Option<f64>,
    #[arg(long = "ts.tabu-len")]
    ts_tabu_len: Option<usize>,
    #[arg(long = "ts.maxiter")]
    ts_maxiter: Option<usize>,
    #[arg(long = "ts.sample-fraction")]
    ts_sample_fraction: Option<f64>,
    #[arg(long = "ga.pop-size")]
    ga_pop_size: Option<usize>,
    #[arg(long = "ga.p-crossover")]
    ga_p_crossover: Option<f64>,
    #[arg(long = "ga.p-mutation")]
    ga_p_mutation: Option<f64>,
    #[arg(long = "ga.maxiter")]
    ga_maxiter: Option<usize>,
    #[arg(long = "ga.epsilon")]
    ga_epsilon: Option<f64>,
    #[arg(long = "ga.elite-count")]
    ga_elite_count: Option<usize>,
    #[arg(long = "ac.alpha")]
    ac_alpha: Option<f64>,
    #[arg(long = "ac.beta")]
    ac_beta: Option<f64>,
    #[arg(long = "ac.rho")]
    ac_rho: Option<f64>,
    #[arg(long = "ac.n-ants")]
    ac_n_ants: Option<usize>,
    #[arg(long = "ac.maxiter")]
    ac_maxiter: Option<usize>,
    #[arg(long = "ac.epsilon")]
    ac_epsilon: Option<f64>,
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Overrides {
    fn params(&self) -> MethodParams {
        let mut p = MethodParams::default();
        set(&mut p.sa.chi0, self.sa_chi0);
        set(&mut p.sa.chain_length, self.sa_chain_length);
        set(&mut p.sa.gamma, self.sa_gamma);
        set(&mut p.sa.epsilon, self.sa_epsilon);
        set(&mut p.sa.max_chains, self.sa_max_chains);
        set(&mut p.ta.th0, self.ta_th0);
        set(&mut p.ta.gamma, self.ta_gamma);
        set(&mut p.ta.maxiter, self.ta_maxiter);
        set(&mut p.ta.epsilon, self.ta_epsilon);
        set(&mut p.ts.tabu_len, self.ts_tabu_len);
        set(&mut p.ts.maxiter, self.ts_maxiter);
        set(&mut p.ts.sample_fraction, self.ts_sample_fraction);
        set(&mut p.ga.pop_size, self.ga_pop_size);
        set(&mut p.ga.p_crossover, self.ga_p_crossover);
        set(&mut p.ga.p_mutation, self.ga_p_mutation);
        set(&mut p.ga.maxiter, self.ga_maxiter);
        set(&mut p.ga.epsilon, self.ga_epsilon);
        set(&mut p.ga.elite_count, self.ga_elite_count);
        set(&mut p.ac.alpha, self.ac_alpha);
        set(&mut p.ac.beta, self.ac_beta);
        set(&mut p.ac.rho, self.ac_rho);
        set(&mut p.ac.n_ants, self.ac_n_ants);
        set(&mut p.ac.maxiter, self.ac_maxiter);
        set(&mut p.ac.epsilon, self.ac_epsilon);
        p
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "sa")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated subset of sa,ta,ts,ga,ac,pam,kmed,hc.
    #[arg(long, value_delimiter = ',', default_value = "sa,ta,ts,ga,ac,pam,hc")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 100)]
    multistart: usize,
    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for the attraction rate.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    /// Attraction rate against each method's own best run.
    #[arg(long)]
    per_method_w_star: bool,
    /// Dissimilarity for the hierarchical baseline (defaults to --dissim).
    #[arg(long)]
    hc_dissim: Option<DissimilarityKind>,
    #[arg(long, env = bench::WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Also report optimal W for k = 2..=K_MAX under both criteria.
    #[arg(long)]
    monotonicity: Option<usize>,
    /// Raise the size guard from 12 to 14 objects.
    #[arg(long)]
    allow_large: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Creates `path`, along with any missing parent directories.
fn create_file(path: &Path) -> anyhow::Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let mut f = BufWriter::new(create_file(path)?);
            f.write_all(text.as_bytes())?;
            f.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut spec = match args.builtin {
        Some(id) => datagen::builtin_spec(id, args.p)?,
        None => {
            let cardinality_scheme = match args.scheme.as_str() {
                "equal" => CardinalityScheme::Equal,
                "one-big-half" | "one_big_half" => CardinalityScheme::OneBigHalf,
                other => bail!("unknown scheme '{other}' (expected equal or one-big-half)"),
            };
            GeneratorSpec {
                n: args.n.unwrap_or_default(),
                p: args.p,
                k: args.k.unwrap_or_default(),
                cardinality_scheme,
                pis: args.pis.clone(),
                seed: 0,
            }
        }
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let planted = datagen::generate(&spec)?;
    planted.dataset.write_csv(create_file(&with_suffix(&args.out, "csv"))?)?;
    let truth: String = planted.truth.assign().iter().map(|c| format!("{c}\n")).collect();
    create_file(&with_suffix(&args.out, "truth"))?.write_all(truth.as_bytes())?;
    let json = serde_json::to_string_pretty(&spec)? + "\n";
    create_file(&with_suffix(&args.out, "json"))?.write_all(json.as_bytes())?;
    Ok(())
}

fn config_from(
    problem: &ProblemArgs,
    methods: Vec<Method>,
    overrides: &Overrides,
) -> anyhow::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::new(problem.data.source()?, problem.data.k(problem.k)?);
    config.criterion = problem.criterion;
    config.dissim = problem.dissim;
    config.methods = methods;
    config.params = overrides.params();
    Ok(config)
}

fn single_run<T: Scalar>(
    data: &BinaryDataset,
    config: &ExperimentConfig,
    seed: u64,
    format: OutputFormat,
) -> anyhow::Result<String> {
    let d = DissimilarityMatrix::<T>::compute(data, config.dissim)?;
    let problem = Problem::new(data, &d, config.criterion)?;
    let method = config.methods[0];
    let result = bench::run_method(&problem, config, method, seed)?;
    Ok(match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&json!({ "method": method, "result": result }))? + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("object,class\n");
            for (i, c) in result.best_partition.assign().iter().enumerate() {
                s += &format!("{i},{c}\n");
            }
            s
        }
        OutputFormat::Table => format!(
            "{method} seed {seed}: W = {}  iterations = {}  escapes = {}\nclasses: {:?}\n",
            result.best_w,
            result.iterations,
            result.escapes,
            result.best_partition.assign()
        ),
    })
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut config = config_from(&args.problem, vec![args.method], &args.overrides)?;
    config.multistart = 1;
    config.validate()?;
    let data = bench::load_dataset(&config.source)?;
    let text = match config.dissim {
        DissimilarityKind::L1 => single_run::<i64>(&data, &config, args.seed, args.format)?,
        DissimilarityKind::Jaccard => single_run::<f64>(&data, &config, args.seed, args.format)?,
    };
    emit(args.out.as_deref(), &text)
}

fn bench_cmd(args: BenchArgs) -> anyhow::Result<()> {
    let mut config = config_from(&args.problem, args.methods, &args.overrides)?;
    config.multistart = args.multistart;
    config.base_seed = args.seed;
    config.tol = args.tol;
    config.per_method_w_star = args.per_method_w_star;
    config.hc_dissim = args.hc_dissim;
    config.workers = args.workers;
    let report = bench::run_experiment(&config)?;
    emit(args.out.as_deref(), &bench::render(&report, args.format)?)
}

fn oracle_report<T: Scalar>(
    data: &BinaryDataset,
    args: &OracleArgs,
    k: usize,
) -> anyhow::Result<serde_json::Value> {
    let d = DissimilarityMatrix::<T>::compute(data, args.problem.dissim)?;
    let problem = Problem::new(data, &d, args.problem.criterion)?;
    let (partition, w) = oracle::brute_force_optimum(&problem, k, args.allow_large)?;
    let monotonicity = args
        .monotonicity
        .map(|k_max| oracle::verify_monotonicity(data, &d, k_max, args.allow_large))
        .transpose()?;
    Ok(json!({
        "k": k,
        "criterion": args.problem.criterion,
        "dissim": args.problem.dissim,
        "w": w.as_f64(),
        "partition": partition.assign(),
        "monotonicity": monotonicity,
    }))
}

fn oracle_cmd(args: OracleArgs) -> anyhow::Result<()> {
    let data = bench::load_dataset(&args.problem.data.source()?)?;
    let k = args.problem.data.k(args.problem.k)?;
    let value = match args.problem.dissim {
        DissimilarityKind::L1 => oracle_report::<i64>(&data, &args, k)?,
        DissimilarityKind::Jaccard => oracle_report::<f64>(&data, &args, k)?,
    };
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&value)? + "\n"))
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Generate(args) => generate(args),
        Command::Run(args) => run(args),
        Command::Bench(args) => bench_cmd(args),
        Command::Oracle(args) => oracle_cmd(args),
    }
}
