use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use reachnet::info::LogBase;
use reachnet::metrics::MetricName;
use reachnet::performance::DelayKind;
use reachnet::report::{self, AnalysisOptions, BinChoice, CliError, GenerateParams};
use reachnet::synth::{GeneratorConfig, LayerWidth, NoiseModel, PropagationConfig};

/// Reachability-heterogeneity analysis of project activity networks.
#[derive(Parser)]
#[command(name = "reachnet", version)]
struct Cli {
    /// Output directory. Required by `analyze` and `generate`; other
    /// subcommands print to stdout when it is omitted.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Logarithm base for mutual information.
    #[arg(long, global = true, default_value = "e", value_parser = ["e", "2"])]
    log_base: String,
    /// Bin count for delay statistics and frequency matrices, or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    bins: BinChoice,
    /// Seed for `generate` [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Performance indicator used as the target.
    #[arg(long, global = true, value_enum, default_value = "start")]
    metric: DelayArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelayArg {
    #[value(alias = "start_delay")]
    Start,
    #[value(alias = "end_delay")]
    End,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Activities CSV (`id,name,planned_start,planned_end,actual_start,actual_end`).
    #[arg(short, long)]
    activities: PathBuf,
    /// Dependencies CSV (`predecessor,successor`).
    #[arg(short, long)]
    dependencies: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, build and prune a schedule; report network statistics.
    Validate(ScheduleArgs),
    /// Run the full pipeline and write all artifacts to --out.
    Analyze {
        #[command(flatten)]
        schedule: ScheduleArgs,
        /// Metric along which delay statistics are binned.
        #[arg(long, default_value = "local_rh")]
        by: MetricName,
    },
    /// Global and per-node reachability heterogeneity.
    Rh {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// All eight node metrics as a wide CSV.
    Metrics(ScheduleArgs),
    /// Delay statistics in equal-width bins of a node metric.
    Bins {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, default_value = "local_rh")]
        by: MetricName,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Mutual information of every node metric with the delay target.
    Benchmark {
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Generate a synthetic schedule (activities.csv, dependencies.csv).
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON generator config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of layers [default: 40].
    #[arg(long)]
    layers: Option<usize>,
    /// Activities per layer [default: 17].
    #[arg(long)]
    width: Option<usize>,
    /// Probability of each candidate link between layers [default: 0.0215].
    #[arg(long)]
    edge_probability: Option<f64>,
    /// Links reach at most this many layers ahead [default: 3].
    #[arg(long)]
    skip_depth: Option<usize>,
    /// Planned duration range, `LO:HI` days [default: 1:10].
    #[arg(long)]
    duration: Option<String>,
    /// `none`, `uniform:LO:HI` or `two-point:P:DAYS` [default: two-point:0.05:20].
    #[arg(long)]
    noise: Option<NoiseModel>,
    /// Days of slack absorbed before upstream delay is inherited [default: 1].
    #[arg(long)]
    slack: Option<u32>,
    /// Allow negative start delays.
    #[arg(long)]
    no_clamp: bool,
    /// Seed for delay draws; defaults to the generator seed plus one.
    #[arg(long)]
    delay_seed: Option<u64>,
    /// Leave actual dates empty.
    #[arg(long)]
    planned_only: bool,
}

fn options(cli: &Cli, by: MetricName) -> AnalysisOptions {
    AnalysisOptions {
        bins: cli.bins,
        log_base: cli.log_base.parse::<LogBase>().expect("validated by clap"),
        delay: match cli.metric {
            DelayArg::Start => DelayKind::Start,
            DelayArg::End => DelayKind::End,
        },
        bin_metric: by,
    }
}

/// Writes `contents` to `out/name`, or stdout without --out.
fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            let path = dir.join(name);
            fs::create_dir_all(dir)
                .and_then(|_| fs::write(&path, contents))
                .map_err(|source| CliError::Write {
                    path: path.display().to_string(),
                    source,
                })
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn require_out(cli: &Cli, command: &str) -> Result<PathBuf, CliError> {
    cli.out
        .clone()
        .ok_or_else(|| CliError::Usage(format!("`{command}` requires --out DIR")))
}

fn generate_params(cli: &Cli, args: &GenerateArgs) -> Result<GenerateParams, CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<GeneratorConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => GeneratorConfig::default(),
    };
    if let Some(w) = args.width {
        config.layer_width = LayerWidth::Fixed(w);
    }
    if let Some(n) = args.layers {
        config.layer_count = n;
        if let LayerWidth::PerLayer(_) = config.layer_width {
            return Err(CliError::Usage(
                "--layers cannot override a per-layer width list".into(),
            ));
        }
    }
    if let Some(p) = args.edge_probability {
        config.edge_probability = p;
    }
    if let Some(s) = args.skip_depth {
        config.skip_depth = s;
    }
    if let Some(range) = &args.duration {
        let bad = || CliError::Usage(format!("--duration expects LO:HI, got `{range}`"));
        let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
        config.base_duration_days = [lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?];
    }
    if let Some(noise) = args.noise {
        config.endogenous_noise = noise;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let mut propagation = PropagationConfig::default();
    if let Some(s) = args.slack {
        propagation.slack_days = s;
    }
    propagation.clamp_negative = !args.no_clamp;
    let delay_seed = (!args.planned_only)
        .then(|| args.delay_seed.unwrap_or_else(|| config.seed.wrapping_add(1)));
    Ok(GenerateParams {
        config,
        propagation,
        delay_seed,
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Validate(s) => {
            let report = report::cmd_validate(&s.activities, &s.dependencies)?;
            emit(out, "manifest.json", &report.to_json())
        }
        Command::Analyze { schedule, by } => {
            let dir = require_out(cli, "analyze")?;
            let report =
                report::cmd_analyze(&schedule.activities, &schedule.dependencies, &options(cli, *by), &dir)?;
            print!("{}", report.to_json());
            Ok(())
        }
        Command::Rh { schedule, format } => {
            let rh = report::cmd_rh(&schedule.activities, &schedule.dependencies)?;
            match format {
                Format::Json => emit(out, "rh.json", &rh.to_json()),
                Format::Csv => emit(out, "rh.csv", &rh.to_csv()),
            }
        }
        Command::Metrics(s) => {
            let csv = report::cmd_metrics(&s.activities, &s.dependencies)?;
            emit(out, "metrics.csv", &csv)
        }
        Command::Bins {
            schedule,
            by,
            format,
        } => {
            let bins = report::cmd_bins(&schedule.activities, &schedule.dependencies, &options(cli, *by))?;
            match format {
                Format::Json => emit(out, "bins.json", &bins.to_json()),
                Format::Csv => emit(out, "bins.csv", &bins.stats.to_csv()),
            }
        }
        Command::Benchmark { schedule, format } => {
            let opts = options(cli, MetricName::LocalRh);
            let bench = report::cmd_benchmark(&schedule.activities, &schedule.dependencies, &opts)?;
            match format {
                Format::Json => emit(out, "benchmark.json", &report::benchmark_json(&bench)),
                Format::Csv => emit(out, "benchmark.csv", &bench.to_csv()),
            }
        }
        Command::Generate(args) => {
            let dir = require_out(cli, "generate")?;
            let report = report::cmd_generate(&generate_params(cli, args)?, &dir)?;
            print!("{}", report.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
