use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctxrf::dataset::{self, ColumnSchema, Dataset, Table, GENERATORS};
use ctxrf::importance::{analyze, characterize, AnalysisConfig, ImportanceReport};
use ctxrf::impurity::ImpurityKind;
use ctxrf::oracle::{check_definitions, oracle_report, verify_theorems, JointDistribution};
use ctxrf::pairwise::{baseline_pairwise, pairwise_analysis, synthetic_network, PairwiseConfig};
use ctxrf::permtest::{null_epsilon, permutation_pvalues, NullMode, PermutationConfig};
use ctxrf::report::{self, Format};
use ctxrf::rng::{Purpose, RngSpec};
use ctxrf::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Context-dependent variable importance with totally randomized trees.
#[derive(Parser, Debug)]
#[command(name = "ctxrf", version)]
struct Cli {
    /// Worker threads; results are identical for any value.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a built-in dataset as CSV.
    Generate(GenerateArgs),
    /// Grow one forest and report every importance score.
    Importance(ImportanceArgs),
    /// Exact asymptotic scores on the empirical distribution.
    Oracle(OracleArgs),
    /// Importance scores with permutation p-values.
    Permtest(PermtestArgs),
    /// Directed interaction matrices, each variable in turn as target.
    Pairwise(PairwiseArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Tsv,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Tsv => Format::Tsv,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NullArg {
    Rebuild,
    Reuse,
}

impl From<NullArg> for NullMode {
    fn from(n: NullArg) -> Self {
        match n {
            NullArg::Rebuild => NullMode::Rebuild,
            NullArg::Reuse => NullMode::Reuse,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScoreArg {
    Contextual,
    TwoForest,
}

#[derive(Args, Debug)]
struct Source {
    /// Built-in dataset: example1, problem1 or problem2.
    #[arg(long, conflicts_with = "input")]
    generate: Option<String>,
    /// CSV file with a header row.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Target column (CSV input).
    #[arg(long, requires = "input")]
    target: Option<String>,
    /// Context column (CSV input).
    #[arg(long, requires = "input")]
    context: Option<String>,
    /// Read the target as numbers and use variance impurity.
    #[arg(long, requires = "input")]
    numeric_target: bool,
}

#[derive(Args, Debug)]
struct Output {
    /// Directory receiving the output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// example1, problem1, problem2 or network.
    name: String,
    /// Output file; defaults to <NAME>.csv in the current directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Rows of the network dataset.
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ImportanceArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cut-off below which a score counts as zero.
    #[arg(long, default_value_t = 1e-3, value_parser = non_negative)]
    epsilon: f64,
    /// Also grow one forest per context value.
    #[arg(long)]
    baselines: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    source: Source,
    /// Distribution file instead of a dataset.
    #[arg(long, conflicts_with_all = ["generate", "input"])]
    dist: Option<PathBuf>,
    /// Context variable of the distribution file (its last column).
    #[arg(long, requires = "dist")]
    dist_context: Option<String>,
    /// Also write definition and theorem verdicts.
    #[arg(long)]
    check_definitions: bool,
    #[arg(long, default_value_t = 1e-9, value_parser = non_negative)]
    epsilon: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PermtestArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    trees: usize,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    permutations: usize,
    /// Trees per replicate forest.
    #[arg(long, default_value_t = 100, value_parser = positive)]
    replicate_trees: usize,
    #[arg(long, value_enum, default_value = "rebuild")]
    null: NullArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cut-off for the labels; defaults to the 95th percentile of null scores.
    #[arg(long, value_parser = non_negative)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.05, value_parser = level)]
    level: f64,
    #[arg(long)]
    baselines: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PairwiseArgs {
    /// CSV file; every column except the context is numeric.
    #[arg(long, required_unless_present = "generate")]
    input: Option<PathBuf>,
    /// Use the built-in network dataset (name: network).
    #[arg(long, conflicts_with = "input")]
    generate: Option<String>,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long, default_value = "ctx")]
    context: String,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    trees: usize,
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    permutations: usize,
    #[arg(long, default_value_t = 100, value_parser = positive)]
    replicate_trees: usize,
    #[arg(long, value_enum, default_value = "rebuild")]
    null: NullArg,
    /// Quantile bins for numeric inputs.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..))]
    bins: u32,
    #[arg(long, default_value_t = 0.05, value_parser = level)]
    level: f64,
    #[arg(long, value_enum, default_value = "contextual")]
    score: ScoreArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected an integer >= 1, got {s:?}")),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a number >= 0, got {s:?}")),
    }
}

fn level(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x < 1.0 => Ok(x),
        _ => Err(format!("expected a level in (0, 1), got {s:?}")),
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GuardExceeded(_) => 4,
            Error::InvalidParameter(_) | Error::NoContext => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

/// Files to write once everything has been computed.
type Files = Vec<(PathBuf, String)>;

fn load_source(src: &Source) -> Outcome<(Dataset, String)> {
    match (&src.generate, &src.input) {
        (Some(name), None) => {
            let ds = dataset::generate(name).ok_or_else(|| {
                Failure::config(format!(
                    "unknown generator {name:?}; expected one of {}",
                    GENERATORS.join(", ")
                ))
            })?;
            Ok((ds, format!("--generate {name}")))
        }
        (None, Some(path)) => {
            let target = src
                .target
                .as_deref()
                .ok_or_else(|| Failure::config("--input requires --target"))?;
            let header = dataset::read_header(path)?;
            let schema: Vec<ColumnSchema> = header
                .iter()
                .map(|h| {
                    if src.numeric_target && h == target {
                        ColumnSchema::numeric(h.clone())
                    } else {
                        ColumnSchema::categorical(h.clone())
                    }
                })
                .collect();
            let ds = dataset::load_csv(path, &schema, target, src.context.as_deref())?;
            let mut flags = format!("--input {} --target {target}", file_name(path));
            if let Some(c) = &src.context {
                flags.push_str(&format!(" --context {c}"));
            }
            if src.numeric_target {
                flags.push_str(" --numeric-target");
            }
            Ok((ds, flags))
        }
        _ => Err(Failure::config("give either --generate NAME or --input FILE")),
    }
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn meta(command: &str, seed: Option<u64>, flags: String) -> Vec<String> {
    let mut m = vec![format!("ctxrf {VERSION}"), format!("command: {command}")];
    if let Some(s) = seed {
        m.push(format!("seed: {s}"));
    }
    m.push(format!("flags: {flags}"));
    m
}

fn with_dataset_labels(mut report: ImportanceReport, ds: &Dataset) -> ImportanceReport {
    if let Some(c) = ds.context() {
        report.context_labels = ds.labels(c).unwrap().to_vec();
    }
    report
}

fn cmd_generate(args: &GenerateArgs) -> Outcome<Files> {
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", args.name)));
    let table: Table = if args.name == "network" {
        let mut rng = RngSpec::new(args.seed).stream(Purpose::Sampling, 0, 0);
        synthetic_network(args.samples, &mut rng)?
    } else {
        dataset::generate(&args.name)
            .ok_or_else(|| {
                Failure::config(format!(
                    "unknown generator {:?}; expected one of {}, network",
                    args.name,
                    GENERATORS.join(", ")
                ))
            })?
            .table()
            .clone()
    };
    Ok(vec![(path, dataset::table_to_csv(&table))])
}

fn cmd_importance(args: &ImportanceArgs) -> Outcome<Files> {
    let (ds, src_flags) = load_source(&args.source)?;
    let kind = ImpurityKind::for_target(ds.target_kind());
    let config = AnalysisConfig {
        n_trees: args.trees,
        rng: RngSpec::new(args.seed),
        kind,
        baselines: args.baselines,
        baseline_trees: None,
    };
    let report = analyze(&ds, &ds.input_columns(), &config)?;
    let report = characterize(with_dataset_labels(report, &ds), args.epsilon)?;
    let flags = format!(
        "{src_flags} --trees {} --epsilon {}{}",
        args.trees,
        args.epsilon,
        if args.baselines { " --baselines" } else { "" }
    );
    let m = meta("importance", Some(args.seed), flags);
    let format: Format = args.output.format.into();
    let body = report::render_importance(&report, &m, 0.05, format);
    Ok(vec![(
        args.output.out_dir.join(format!("importance.{}", format.extension())),
        body,
    )])
}

fn cmd_oracle(args: &OracleArgs) -> Outcome<Files> {
    let (dist, labels, flags) = match &args.dist {
        Some(path) => {
            let d = JointDistribution::load(path, args.dist_context.as_deref())?;
            let labels = match d.context_index() {
                Some(c) => (0..d.arities()[c]).map(|v| v.to_string()).collect(),
                None => Vec::new(),
            };
            let mut f = format!("--dist {}", file_name(path));
            if let Some(c) = &args.dist_context {
                f.push_str(&format!(" --dist-context {c}"));
            }
            (d, labels, f)
        }
        None => {
            let (ds, f) = load_source(&args.source)?;
            let labels = ds
                .context()
                .map(|c| ds.labels(c).unwrap().to_vec())
                .unwrap_or_default();
            (JointDistribution::from_dataset(&ds)?, labels, f)
        }
    };
    let mut report = oracle_report(&dist)?;
    report.context_labels = labels.clone();
    let report = characterize(report, args.epsilon)?;
    let flags = format!(
        "{flags} --epsilon {}{}",
        args.epsilon,
        if args.check_definitions { " --check-definitions" } else { "" }
    );
    let m = meta("oracle", None, flags);
    let format: Format = args.output.format.into();
    let mut files = vec![(
        args.output.out_dir.join(format!("oracle.{}", format.extension())),
        report::render_importance(&report, &m, 0.05, format),
    )];
    if args.check_definitions {
        let checks = check_definitions(&dist)?;
        let theorems = verify_theorems(&dist)?;
        files.push((
            args.output.out_dir.join("definitions.tsv"),
            report::definitions_tsv(&checks, &theorems, &labels, &m),
        ));
    }
    Ok(files)
}

fn cmd_permtest(args: &PermtestArgs) -> Outcome<Files> {
    let (ds, src_flags) = load_source(&args.source)?;
    if ds.context().is_none() {
        return Err(Failure::config("permtest needs a context column"));
    }
    let kind = ImpurityKind::for_target(ds.target_kind());
    let rng = RngSpec::new(args.seed);
    let inputs = ds.input_columns();
    let config = AnalysisConfig {
        n_trees: args.trees,
        rng,
        kind,
        baselines: args.baselines,
        baseline_trees: None,
    };
    let mut report = with_dataset_labels(analyze(&ds, &inputs, &config)?, &ds);
    let perm = PermutationConfig {
        n_permutations: args.permutations,
        n_trees: args.trees,
        replicate_trees: args.replicate_trees,
        rng,
        kind,
        mode: args.null.into(),
        keep_null: false,
    };
    let result = permutation_pvalues(&ds, &inputs, &perm)?;
    result.apply(&mut report)?;
    let eps = args.epsilon.unwrap_or_else(|| null_epsilon(&result));
    let report = characterize(report, eps)?;
    let mut flags = format!(
        "{src_flags} --trees {} --permutations {} --replicate-trees {} --null {} --level {}",
        args.trees,
        args.permutations,
        args.replicate_trees,
        NullMode::from(args.null),
        args.level
    );
    if let Some(e) = args.epsilon {
        flags.push_str(&format!(" --epsilon {e}"));
    }
    if args.baselines {
        flags.push_str(" --baselines");
    }
    let m = meta("permtest", Some(args.seed), flags);
    let format: Format = args.output.format.into();
    Ok(vec![(
        args.output.out_dir.join(format!("permtest.{}", format.extension())),
        report::render_importance(&report, &m, args.level, format),
    )])
}

fn cmd_pairwise(args: &PairwiseArgs) -> Outcome<Files> {
    let (table, src_flags) = match (&args.generate, &args.input) {
        (Some(name), None) if name == "network" => {
            let mut rng = RngSpec::new(args.seed).stream(Purpose::Sampling, 0, 0);
            (
                synthetic_network(args.samples, &mut rng)?,
                format!("--generate network --samples {}", args.samples),
            )
        }
        (Some(name), None) => {
            return Err(Failure::config(format!(
                "unknown network generator {name:?}; expected network"
            )))
        }
        (None, Some(path)) => {
            let header = dataset::read_header(path)?;
            let schema: Vec<ColumnSchema> = header
                .iter()
                .map(|h| {
                    if *h == args.context {
                        ColumnSchema::categorical(h.clone())
                    } else {
                        ColumnSchema::numeric(h.clone())
                    }
                })
                .collect();
            (dataset::load_table(path, &schema)?, format!("--input {}", file_name(path)))
        }
        _ => return Err(Failure::config("give either --generate network or --input FILE")),
    };
    let context = table.column_index(&args.context)?;
    let config = PairwiseConfig {
        n_trees: args.trees,
        n_permutations: args.permutations,
        replicate_trees: args.replicate_trees,
        rng: RngSpec::new(args.seed),
        level: args.level,
        bins: args.bins as usize,
        mode: args.null.into(),
    };
    let (matrices, score) = match args.score {
        ScoreArg::Contextual => (pairwise_analysis(&table, context, &config)?, "contextual"),
        ScoreArg::TwoForest => (baseline_pairwise(&table, context, &config)?, "two-forest"),
    };
    let flags = format!(
        "{src_flags} --context {} --trees {} --permutations {} --replicate-trees {} --null {} --bins {} --level {} --score {score}",
        args.context,
        args.trees,
        args.permutations,
        args.replicate_trees,
        NullMode::from(args.null),
        args.bins,
        args.level
    );
    let m = meta("pairwise", Some(args.seed), flags);
    let mut files = Vec::new();
    for mat in &matrices {
        let dir = args.out_dir.join(format!("xc_{}", mat.context_label));
        for (stem, body) in report::matrix_files(mat, &m) {
            files.push((dir.join(format!("{stem}.tsv")), body));
        }
        files.push((dir.join("cells.tsv"), report::cells_tsv(mat, &m)));
    }
    Ok(files)
}

fn write_all(files: &Files) -> Outcome<()> {
    for (path, body) in files {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
        }
        fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome<()> {
    let files = match &cli.command {
        Command::Generate(a) => cmd_generate(a)?,
        Command::Importance(a) => cmd_importance(a)?,
        Command::Oracle(a) => cmd_oracle(a)?,
        Command::Permtest(a) => cmd_permtest(a)?,
        Command::Pairwise(a) => cmd_pairwise(a)?,
    };
    write_all(&files)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
