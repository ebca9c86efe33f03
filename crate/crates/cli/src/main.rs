use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gestaug::baselines::{MixConfig, MixMethod};
use gestaug::datasets::LabelScheme;
use gestaug::pipeline::Rederive;
use gestaug_cli::config::{parse_lambda, IngestSource, LambdaSetting};
use gestaug_cli::{commands, CliError, Outcome, RunConfig, CONFIG_ENV};

#[derive(Parser)]
#[command(
    name = "gestaug",
    version,
    about = "Deterministic augmentation for skeleton gesture images"
)]
struct Cli {
    /// TOML run config; overrides $GESTAUG_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = one per core). `bench` takes a comma-separated list.
    #[arg(long, global = true, value_delimiter = ',')]
    workers: Vec<usize>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ChainFlags {
    /// Augmented copies per original.
    #[arg(long)]
    copies: Option<u32>,
    #[arg(long)]
    no_crop: bool,
    #[arg(long)]
    no_rotate: bool,
    #[arg(long)]
    no_zoom: bool,
    #[arg(long)]
    no_brightness_contrast: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RederiveArg {
    None,
    One,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a dataset tree into normalized sequences plus an index.
    Ingest {
        dataset_dir: PathBuf,
        /// shrec17, dhg, normalized, or a profile TOML file.
        #[arg(long)]
        profile: Option<String>,
        /// Joints per frame for normalized input.
        #[arg(long)]
        joints: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render every indexed sequence to a PNG and write an originals manifest.
    Render {
        /// Directory written by `ingest`.
        index_dir: PathBuf,
        /// top-down, front-away, side-left or custom:<azimuth>,<elevation>.
        #[arg(long)]
        view: Option<String>,
        /// Label scheme for the manifest, e.g. 14g, 28g, 21c.
        #[arg(long)]
        scheme: Option<LabelScheme>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expand each original into itself plus seeded augmented copies.
    Augment {
        manifest: PathBuf,
        #[command(flatten)]
        chain: ChainFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// MixUp or CutMix every original with a seeded partner.
    Baseline {
        manifest: PathBuf,
        #[arg(long, value_parser = ["mixup", "cutmix"])]
        method: Option<String>,
        /// "uniform" or a fixed weight in [0, 1]; MixUp only.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dataset summary and parameter distribution report.
    Stats {
        manifest: PathBuf,
        /// Directory for CSV reports.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also read image headers for the size histogram.
        #[arg(long)]
        images: bool,
    },
    /// Check manifest structure, file digests, parameter ranges and replay.
    Verify {
        manifest: PathBuf,
        /// How many augmented entries to regenerate; `one` picks by --seed.
        #[arg(long, value_enum, default_value = "one")]
        rederive: RederiveArg,
    },
    /// Time full augmentation at each worker count and compare outputs.
    Bench {
        manifest: PathBuf,
        #[command(flatten)]
        chain: ChainFlags,
        /// Scratch directory for the runs (default: system temp).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn apply_chain_flags(config: &mut RunConfig, flags: &ChainFlags) {
    let a = &mut config.augment;
    if let Some(c) = flags.copies {
        a.copies = c;
    }
    a.crop &= !flags.no_crop;
    a.rotate &= !flags.no_rotate;
    a.zoom &= !flags.no_zoom;
    a.brightness_contrast &= !flags.no_brightness_contrast;
}

fn single_worker_count(workers: &[usize]) -> Result<Option<usize>, CliError> {
    match workers {
        [] => Ok(None),
        [w] => Ok(Some(*w)),
        _ => Err(CliError::config("--workers takes a list only for `bench`")),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if !matches!(cli.command, Command::Bench { .. }) {
        if let Some(w) = single_worker_count(&cli.workers)? {
            config.workers = w;
        }
    }
    match &cli.command {
        Command::Ingest {
            dataset_dir,
            profile,
            joints,
            out,
        } => {
            if let Some(p) = profile {
                config.ingest.profile = p.clone();
            }
            if joints.is_some() {
                config.ingest.joint_count = *joints;
            }
            let source = config.ingest_source()?;
            if joints.is_some() && !matches!(source, IngestSource::Normalized { .. }) {
                return Err(CliError::config(
                    "--joints applies to --profile normalized only",
                ));
            }
            commands::cmd_ingest(dataset_dir, &source, out, config.workers)
        }
        Command::Render {
            index_dir,
            view,
            scheme,
            width,
            height,
            out,
        } => {
            let r = &mut config.render;
            if let Some(v) = view {
                r.view = v.clone();
            }
            if let Some(s) = scheme {
                r.scheme = *s;
            }
            if let Some(w) = width {
                r.width = *w;
            }
            if let Some(h) = height {
                r.height = *h;
            }
            config.validate()?;
            commands::cmd_render(index_dir, &config.render_config()?, out)
        }
        Command::Augment {
            manifest,
            chain,
            out,
        } => {
            apply_chain_flags(&mut config, chain);
            commands::cmd_augment(manifest, &config.augment_config(), out)
        }
        Command::Baseline {
            manifest,
            method,
            lambda,
            out,
        } => {
            if let Some(m) = method {
                config.baseline.method = if m == "cutmix" {
                    MixMethod::Cutmix
                } else {
                    MixMethod::Mixup
                };
            }
            if let Some(l) = lambda {
                parse_lambda(l)?;
                config.baseline.lambda = LambdaSetting::Named(l.clone());
            }
            let mix = MixConfig {
                method: config.baseline.method,
                seed: config.seed,
                lambda: config.lambda()?,
                workers: config.workers,
            };
            commands::cmd_baseline(manifest, &mix, out)
        }
        Command::Stats {
            manifest,
            out,
            images,
        } => commands::cmd_stats(manifest, out.as_deref(), *images),
        Command::Verify { manifest, rederive } => {
            let rederive = match rederive {
                RederiveArg::None => Rederive::None,
                RederiveArg::One => Rederive::One {
                    pick_seed: config.seed,
                },
                RederiveArg::All => Rederive::All,
            };
            commands::cmd_verify(manifest, rederive)
        }
        Command::Bench {
            manifest,
            chain,
            out,
        } => {
            apply_chain_flags(&mut config, chain);
            let counts = if cli.workers.is_empty() {
                config.bench.workers.clone()
            } else {
                cli.workers.clone()
            };
            commands::cmd_bench(manifest, &config.augment_config(), &counts, out.as_deref())
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    if let Some(path) = &cli.config {
        log::debug!("config from --config {}", path.display());
    } else if let Some(path) = RunConfig::locate(None) {
        log::debug!("config from ${CONFIG_ENV} {}", path.display());
    }
    let code = match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            for p in &outcome.problems {
                eprintln!("{p}");
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    process::exit(code.code());
}
