//! The `lsq` command line: gen, run, score, report, chance.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{ConfigLayer, PoolChoice, RunConfig};
use crate::harness::{
    http_client, mock_client, read_records, run_eval, GenParams, HttpConfig, JsonlSink, MockKind,
    ModelClient, RunError, RunOptions,
};
use crate::idk::{idk_chance_rate, IdkOptions};
use crate::instance::{read_instances, serialize_instance, ContextBucket, TaskInstance, TaskKind};
use crate::latent_list::chance::{latent_list_chance_rate, MIN_TRIALS};
use crate::latent_list::generate::COMPLEXITY_LEVELS;
use crate::mrcr::{mrcr_chance_rate, ExternalPool, MrcrChanceMode, TemplatedPool, WritingPool};
use crate::report::{
    emit_report, score_output, score_run, summarize, ReportOptions, ScoreRecord, SliceBy,
};
use crate::rng::derive_rng;
use crate::stats::MeanAccumulator;
use crate::suite::{generate_one, generate_suite, GenContext};
use crate::tokenizer::{tokenizer_by_name, Tokenizer};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_TRANSPORT: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or provider settings.
    Usage(String),
    /// Unreadable or inconsistent input files, failed generation.
    Data(String),
    /// Model calls that could not be completed.
    Transport(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Transport(_) => "transport",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Transport(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Transport(_) => EXIT_TRANSPORT,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "lsq",
    version,
    about = "Generate, run and score long-context evaluation suites"
)]
struct Cli {
    /// TOML file with run settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate instances to a JSONL file.
    Gen(GenArgs),
    /// Send instances to a model and record raw outputs.
    Run(RunArgs),
    /// Score recorded outputs.
    Score(ScoreArgs),
    /// Write curves, plots and a summary from scores.
    Report(ReportArgs),
    /// Estimate chance rates.
    Chance(ChanceArgs),
}

#[derive(Debug, Args)]
struct GenFlags {
    /// Comma-separated: latent_list, mrcr, idk.
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<TaskKind>>,
    /// Comma-separated: 32k, 128k, 1m.
    #[arg(long, value_delimiter = ',')]
    buckets: Option<Vec<ContextBucket>>,
    /// Instances per task and bucket.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tokenizer: Option<String>,
    #[arg(long)]
    min_tokens: Option<usize>,
    /// templated or external.
    #[arg(long)]
    pool: Option<String>,
    #[arg(long)]
    pool_provider: Option<String>,
    #[arg(long)]
    idk_few_shot: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenFlags,
    /// Output path for instances.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    instances: Option<PathBuf>,
    #[arg(long)]
    results: Option<PathBuf>,
    /// mock:{oracle|choice|conv|silent} or http:{provider.toml}.
    #[arg(long)]
    provider: Option<String>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    retries: Option<u32>,
    #[arg(long)]
    max_output_tokens: Option<u32>,
    #[arg(long)]
    temperature: Option<f64>,
    /// Keep existing results and skip instances already answered.
    #[arg(long, conflicts_with = "overwrite")]
    resume: bool,
    /// Replace an existing results file.
    #[arg(long)]
    overwrite: bool,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    instances: Option<PathBuf>,
    #[arg(long)]
    results: Option<PathBuf>,
    /// Output path for scores.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// all, complexity, view_kind, answerable or key_arity.
    #[arg(long, default_value = "all")]
    slice: String,
    /// Restrict IDK curves to answerable (true) or unanswerable (false) items.
    #[arg(long)]
    answerable: Option<bool>,
    #[arg(long)]
    task: Option<TaskKind>,
    /// Comma-separated token positions for the curves; default is a quantile grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    no_plot: bool,
    #[arg(long)]
    no_csv: bool,
}

#[derive(Debug, Args)]
struct ChanceArgs {
    #[arg(long)]
    task: TaskKind,
    /// Scored guesses per complexity (latent_list).
    #[arg(long, default_value_t = MIN_TRIALS)]
    trials: usize,
    /// Instances to score against (mrcr, idk); generated when absent.
    #[arg(long)]
    instances: Option<PathBuf>,
    /// Instances generated when no file is given.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[command(flatten)]
    gen: GenFlags,
}

impl GenFlags {
    fn layer(&self) -> CliResult<ConfigLayer> {
        let pool = match self.pool.as_deref() {
            None => None,
            Some("templated") => Some(PoolChoice::Templated),
            Some("external") => Some(PoolChoice::External),
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown pool {other:?} (expected templated or external)"
                )))
            }
        };
        Ok(ConfigLayer {
            tasks: self.tasks.clone(),
            buckets: self.buckets.clone(),
            n: self.n,
            seed: self.seed,
            tokenizer: self.tokenizer.clone(),
            min_tokens: self.min_tokens,
            pool,
            pool_provider: self.pool_provider.clone(),
            idk_few_shot: self.idk_few_shot.then_some(true),
            ..Default::default()
        })
    }
}

impl Command {
    fn layer(&self) -> CliResult<ConfigLayer> {
        Ok(match self {
            Command::Gen(a) => ConfigLayer {
                instances: a.out.clone(),
                ..a.gen.layer()?
            },
            Command::Run(a) => ConfigLayer {
                instances: a.instances.clone(),
                results: a.results.clone(),
                provider: a.provider.clone(),
                concurrency: a.concurrency,
                retries: a.retries,
                max_output_tokens: a.max_output_tokens,
                temperature: a.temperature,
                ..Default::default()
            },
            Command::Score(a) => ConfigLayer {
                instances: a.instances.clone(),
                results: a.results.clone(),
                scores: a.out.clone(),
                ..Default::default()
            },
            Command::Report(a) => ConfigLayer {
                scores: a.scores.clone(),
                report_dir: a.out_dir.clone(),
                ..Default::default()
            },
            Command::Chance(a) => ConfigLayer {
                instances: a.instances.clone(),
                ..a.gen.layer()?
            },
        })
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return report_error(err, &CliError::Usage(e.kind().to_string()));
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &CliError) -> i32 {
    let line = json!({ "error": { "kind": e.kind(), "message": e.message() } });
    let _ = writeln!(err, "{line}");
    e.exit_code()
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let cfg =
        RunConfig::resolve(cli.config.as_deref(), cli.command.layer()?).map_err(CliError::Usage)?;
    let _ = writeln!(
        err,
        "{}",
        json!({ "config": serde_json::from_str::<serde_json::Value>(&cfg.to_json()).unwrap() })
    );
    match cli.command {
        Command::Gen(_) => cmd_gen(&cfg, out),
        Command::Run(a) => cmd_run(&cfg, a.resume, a.overwrite, out),
        Command::Score(_) => cmd_score(&cfg, out),
        Command::Report(a) => cmd_report(&cfg, &a, out),
        Command::Chance(a) => cmd_chance(&cfg, &a, out),
    }
}

/// `mock:{kind}` or `http:{path}`.
pub fn build_client(spec: &str) -> Result<Arc<dyn ModelClient>, CliError> {
    match spec.split_once(':') {
        Some(("mock", kind)) => {
            let kind: MockKind = kind.parse().map_err(CliError::Usage)?;
            Ok(Arc::new(mock_client(kind)))
        }
        Some(("http", path)) => {
            let config =
                HttpConfig::load(Path::new(path)).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Arc::new(
                http_client(config).map_err(|e| CliError::Usage(e.to_string()))?,
            ))
        }
        _ => Err(CliError::Usage(format!(
            "unknown provider {spec:?} (expected mock:KIND or http:PATH)"
        ))),
    }
}

fn tokenizer(cfg: &RunConfig) -> CliResult<Box<dyn Tokenizer>> {
    tokenizer_by_name(&cfg.tokenizer)
        .ok_or_else(|| CliError::Usage(format!("unknown tokenizer {:?}", cfg.tokenizer)))
}

fn pool(cfg: &RunConfig) -> CliResult<Box<dyn WritingPool>> {
    Ok(match cfg.pool {
        PoolChoice::Templated => Box::new(TemplatedPool::default()),
        PoolChoice::External => {
            let spec = cfg.pool_provider.as_deref().unwrap_or_default();
            Box::new(ExternalPool::with_default_keys(build_client(spec)?))
        }
    })
}

fn load_instances(path: &Path) -> CliResult<Vec<TaskInstance>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_instances(BufReader::new(file)).map_err(|e| io_err(path, e))
}

fn write_lines<I: IntoIterator<Item = String>>(path: &Path, lines: I) -> CliResult<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn cmd_gen(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let tok = tokenizer(cfg)?;
    let pool = pool(cfg)?;
    let ctx = GenContext {
        seed: cfg.seed,
        tokenizer: tok.as_ref(),
        pool: pool.as_ref(),
        min_tokens: cfg.min_tokens,
        idk: IdkOptions {
            few_shot: cfg.idk_few_shot,
        },
    };
    let started = std::time::Instant::now();
    let instances = generate_suite(&ctx, &cfg.tasks, &cfg.buckets, cfg.n)
        .map_err(|e| CliError::Data(e.to_string()))?;
    write_lines(&cfg.instances, instances.iter().map(serialize_instance))?;

    let mut groups: BTreeMap<(TaskKind, ContextBucket), Vec<usize>> = BTreeMap::new();
    for inst in &instances {
        groups
            .entry((inst.kind, inst.bucket))
            .or_default()
            .push(inst.prompt_tokens().unwrap_or(0));
    }
    for ((task, bucket), lens) in &groups {
        let mean = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
        let (lo, hi) = (lens.iter().min().unwrap(), lens.iter().max().unwrap());
        let _ = writeln!(
            out,
            "{task} {bucket}: {} instances, tokens min {lo} mean {mean:.0} max {hi}",
            lens.len()
        );
    }
    let _ = writeln!(
        out,
        "wrote {} instances to {} in {:.1}s",
        instances.len(),
        cfg.instances.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_run(cfg: &RunConfig, resume: bool, overwrite: bool, out: &mut dyn Write) -> CliResult<()> {
    let instances = load_instances(&cfg.instances)?;
    let client = build_client(&cfg.provider)?;
    let opts = RunOptions {
        max_in_flight: cfg.concurrency,
        retries: cfg.retries,
        params: GenParams {
            max_output_tokens: cfg.max_output_tokens,
            temperature: cfg.temperature,
            ..Default::default()
        },
        ..Default::default()
    };
    let path = &cfg.results;
    let mut sink = if resume {
        JsonlSink::resume(path)
    } else if path.exists() && !overwrite {
        return Err(CliError::Usage(format!(
            "{} exists; pass --resume or --overwrite",
            path.display()
        )));
    } else {
        JsonlSink::create(path)
    }
    .map_err(|e| CliError::Data(e.to_string()))?;
    let summary = run_eval(&instances, client.as_ref(), &opts, &mut sink).map_err(|e| match e {
        RunError::InvalidOptions(m) => CliError::Usage(m),
        RunError::Sink(s) => CliError::Data(s.to_string()),
    })?;
    let _ = writeln!(
        out,
        "{}: {} instances, {} already done, {} requests issued, {} succeeded, {} failed",
        client.id(),
        summary.total,
        summary.skipped,
        summary.requests_issued,
        summary.succeeded,
        summary.failed.len()
    );
    if !summary.failed.is_empty() {
        return Err(CliError::Transport(format!(
            "{} instances failed (first: {}); rerun with --resume to retry",
            summary.failed.len(),
            summary.failed[0]
        )));
    }
    Ok(())
}

fn cmd_score(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let instances = load_instances(&cfg.instances)?;
    let log = read_records(&cfg.results).map_err(|e| CliError::Data(e.to_string()))?;
    let scores = score_run(&instances, &log.records).map_err(|e| CliError::Data(e.to_string()))?;
    write_lines(
        &cfg.scores,
        scores
            .iter()
            .map(|s| serde_json::to_string(s).expect("score serializes")),
    )?;
    for s in summarize(&scores) {
        let _ = writeln!(
            out,
            "{} {}: n={} mean={:.4} se={:.4} errored={}",
            s.model_id, s.task, s.n, s.mean, s.std_err, s.errored
        );
    }
    let _ = writeln!(
        out,
        "wrote {} scores to {}",
        scores.len(),
        cfg.scores.display()
    );
    Ok(())
}

fn load_scores(path: &Path) -> CliResult<Vec<ScoreRecord>> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut scores = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        scores.push(
            serde_json::from_str(&line)
                .map_err(|e| io_err(path, format!("line {}: {e}", i + 1)))?,
        );
    }
    Ok(scores)
}

fn cmd_report(cfg: &RunConfig, args: &ReportArgs, out: &mut dyn Write) -> CliResult<()> {
    let slice = SliceBy::parse(&args.slice)
        .ok_or_else(|| CliError::Usage(format!("unknown slice {:?}", args.slice)))?;
    let scores = load_scores(&cfg.scores)?;
    let opts = ReportOptions {
        slice,
        answerable: args.answerable,
        task: args.task,
        grid: args.grid.clone(),
        csv: !args.no_csv,
        plot: !args.no_plot,
    };
    std::fs::create_dir_all(&cfg.report_dir).map_err(|e| io_err(&cfg.report_dir, e))?;
    let files =
        emit_report(&scores, &opts, &cfg.report_dir).map_err(|e| CliError::Data(e.to_string()))?;
    if let Some(csv) = &files.csv {
        let _ = writeln!(out, "curves: {} ({} rows)", csv.display(), files.rows);
    }
    for p in &files.plots {
        let _ = writeln!(out, "plot: {}", p.display());
    }
    let _ = writeln!(out, "summary: {}", files.summary.display());
    Ok(())
}

fn sample_instances(cfg: &RunConfig, args: &ChanceArgs) -> CliResult<Vec<TaskInstance>> {
    if args.instances.is_some() {
        let all = load_instances(&cfg.instances)?;
        let keep: Vec<_> = all.into_iter().filter(|i| i.kind == args.task).collect();
        if keep.is_empty() {
            return Err(CliError::Data(format!(
                "no {} instances in {}",
                args.task,
                cfg.instances.display()
            )));
        }
        return Ok(keep);
    }
    let tok = tokenizer(cfg)?;
    let pool = pool(cfg)?;
    let ctx = GenContext {
        seed: cfg.seed,
        tokenizer: tok.as_ref(),
        pool: pool.as_ref(),
        min_tokens: cfg.min_tokens,
        idk: IdkOptions {
            few_shot: cfg.idk_few_shot,
        },
    };
    (0..args.samples as u64)
        .map(|i| {
            generate_one(&ctx, args.task, cfg.buckets[0], i)
                .map_err(|e| CliError::Data(e.to_string()))
        })
        .collect()
}

fn cmd_chance(cfg: &RunConfig, args: &ChanceArgs, out: &mut dyn Write) -> CliResult<()> {
    match args.task {
        TaskKind::LatentList => {
            let mut avg = MeanAccumulator::default();
            for c in COMPLEXITY_LEVELS {
                let mut rng = derive_rng(cfg.seed, c as u64, "chance/latent_list");
                let est = latent_list_chance_rate(&mut rng, c as usize, args.trials);
                avg.push(est.mean);
                let _ = writeln!(
                    out,
                    "latent_list complexity {c}: {:.2}% (se {:.2}, {} guesses)",
                    100.0 * est.mean,
                    100.0 * est.std_err,
                    est.trials
                );
            }
            let _ = writeln!(out, "latent_list average: {:.2}%", 100.0 * avg.mean());
        }
        TaskKind::Mrcr => {
            let instances = sample_instances(cfg, args)?;
            for mode in [MrcrChanceMode::UniformAll, MrcrChanceMode::PartialKeyMatch] {
                let chance = mrcr_chance_rate(&instances, mode)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let _ = writeln!(
                    out,
                    "mrcr {mode:?}: {:.2}% over {} instances",
                    100.0 * chance.mean,
                    instances.len()
                );
                let hist = crate::mrcr::Histogram::unit(&chance.per_instance, args.bins);
                for (i, count) in hist.counts.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  [{:.2}, {:.2}{} {count}",
                        hist.edges[i],
                        hist.edges[i + 1],
                        if i + 1 == hist.counts.len() { "]" } else { ")" }
                    );
                }
            }
        }
        TaskKind::Idk => {
            let _ = writeln!(out, "idk analytic: {:.2}%", 100.0 * idk_chance_rate());
            let instances = sample_instances(cfg, args)?;
            let client = mock_client(MockKind::UniformChoice);
            let mut acc = MeanAccumulator::default();
            for inst in &instances {
                let req = crate::harness::GenRequest {
                    prompt: &inst.prompt,
                    params: &GenParams::default(),
                    instance: Some(inst),
                };
                let raw = client
                    .generate(&req)
                    .map_err(|e| CliError::Transport(e.to_string()))?;
                acc.push(score_output(inst, &raw).map_err(|e| CliError::Data(e.to_string()))?);
            }
            let _ = writeln!(
                out,
                "idk uniform choice: {:.2}% (se {:.2}) over {} instances",
                100.0 * acc.mean(),
                100.0 * acc.std_err(),
                acc.len()
            );
        }
    }
    Ok(())
}
