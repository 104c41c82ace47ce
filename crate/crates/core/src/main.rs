use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use octaug::metrics::{EvalOptions, SdKind, Weighting};
use octaug::pipeline::{
    parse_aug_spec, run_augment, run_eval, run_gen_phantom, run_preview, run_validate,
    PhantomDatasetSpec, PipelineConfig,
};
use octaug::{Error, Result};

/// Label-consistent augmentation for layered OCT volumes.
///
/// Set OCTAUG_LOG (error, warn, info, debug, trace) to control log output.
#[derive(Parser)]
#[command(name = "octaug", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded augmentation config over a dataset.
    Augment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Mean absolute boundary distance of predictions against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Axial resolution in micrometres per pixel.
        #[arg(long)]
        resolution: f64,
        /// JSON report path; defaults to mad_report.json in the prediction directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SdArg::Population)]
        sd: SdArg,
        #[arg(long, value_enum, default_value_t = WeightArg::Unweighted)]
        weighting: WeightArg,
    },
    /// Write before/after overlays of one slice.
    Preview {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        slice: usize,
        /// Augmentations joined by `+`, e.g. `fdda:a=0,1,0+prlc`.
        #[arg(long, default_value = "")]
        aug: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Subject id; defaults to the first subject.
        #[arg(long)]
        subject: Option<String>,
    },
    /// Generate a synthetic layered dataset.
    GenPhantom {
        /// TOML spec; built-in defaults when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a dataset directory against its manifest and label invariants.
    Validate { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum SdArg {
    Population,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Unweighted,
    ByColumns,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Augment { config, workers } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let summary = run_augment(&cfg)?;
            println!(
                "wrote {} sample(s) to {}",
                summary.records.len(),
                summary.output.display()
            );
            for kind in &cfg.order {
                println!("  {:<7} applied {}", kind.name(), summary.applied_count(*kind));
            }
        }
        Command::Eval {
            pred,
            gt,
            resolution,
            out,
            sd,
            weighting,
        } => {
            let options = EvalOptions {
                sd: match sd {
                    SdArg::Population => SdKind::Population,
                    SdArg::Sample => SdKind::Sample,
                },
                weighting: match weighting {
                    WeightArg::Unweighted => Weighting::Unweighted,
                    WeightArg::ByColumns => Weighting::ByColumns,
                },
            };
            let (report, path) = run_eval(&pred, &gt, resolution, options, out.as_deref())?;
            print!("{}", report.to_text());
            println!("report: {}", path.display());
        }
        Command::Preview {
            input,
            slice,
            aug,
            seed,
            out,
            subject,
        } => {
            let spec = parse_aug_spec(&aug)?;
            let (_, _, steps) = run_preview(&input, subject.as_deref(), slice, &spec, seed, &out)?;
            for step in &steps {
                println!("{}", serde_json::to_string(step).expect("serializable"));
            }
            println!("wrote {}", out.display());
        }
        Command::GenPhantom { spec, out } => {
            let spec = match spec {
                Some(p) => PhantomDatasetSpec::load(p)?,
                None => PhantomDatasetSpec::default(),
            };
            let ds = run_gen_phantom(&spec, &out)?;
            println!("wrote {} subject(s) to {}", ds.len(), out.display());
        }
        Command::Validate { dir } => {
            let report = run_validate(&dir)?;
            for p in &report.problems {
                println!("{p}");
            }
            if !report.is_ok() {
                return Err(Error::ValidationFailed {
                    path: dir,
                    count: report.problems.len(),
                });
            }
            println!("ok: {} sample(s)", report.samples);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OCTAUG_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}
