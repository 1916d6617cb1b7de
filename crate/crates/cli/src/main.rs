//! `hdc`: runs the library's experiments and writes their CSV output.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use hdc::assoc::MemoryMode;
use hdc::capacity::NoiseTarget;
use hdc::experiments::{self, ExperimentConfig, TimeWindow};
use hdc::scalar::EncoderKind;

#[derive(Parser, Debug)]
#[command(name = "hdc", version, about = "Binary spatter code experiments")]
struct Cli {
    /// TOML config file; flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Master seed; every output is a pure function of seed and config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Hypervector dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Number of intensity levels.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Per-step flip probability of the nonlinear level code.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Bit-flip probabilities for the capacity sweep, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Largest number of bundled components in the capacity sweep.
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Monte-Carlo trials per sweep point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Where capacity noise is injected: component or bundle.
    #[arg(long, global = true)]
    noise_target: Option<NoiseTarget>,
    /// Sensorimotor memory mode: bundled or tabular (default: both).
    #[arg(long, global = true)]
    mode: Option<MemoryMode>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pairwise distances between intensity level codes.
    Heatmap {
        /// linear or nonlinear level code.
        #[arg(long)]
        encoder: Option<EncoderKind>,
    },
    /// Analytic versus simulated bundling noise.
    Capacity {
        /// Sweep every n, not only odd n (even n use random tie-breaks).
        #[arg(long)]
        all_n: bool,
        /// Emit the fractional-bound formula next to the closed form instead.
        #[arg(long)]
        compare_original: bool,
    },
    /// Frame-to-velocity recall from synthetic time-images.
    Sensorimotor {
        /// Comma-separated stored-pair counts to sweep.
        #[arg(long, value_delimiter = ',')]
        stored: Option<Vec<usize>>,
        /// Confidence distance at or above which a prediction is rejected.
        #[arg(long)]
        reject_threshold: Option<f64>,
        /// Also save the memory with the largest stored count (HDAM format).
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
    },
    /// Time-tick sequence memory: store, probe, delete.
    Sequence {
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        codebook: Option<usize>,
    },
    /// False-positive rate of the OR-bundle (Bloom) filter.
    Bloom {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        inserted: Option<usize>,
        #[arg(long)]
        queries: Option<usize>,
    },
    /// Convert an event CSV (x,y,t,polarity) into a time-image frame CSV.
    TimeImage {
        #[arg(long, value_name = "FILE")]
        events: PathBuf,
        #[arg(long, default_value_t = 0)]
        start_us: u64,
        /// Window end; defaults to start plus the configured interval.
        #[arg(long)]
        end_us: Option<u64>,
    },
    /// Print the effective configuration as TOML.
    Config,
}

fn apply(cfg: &mut ExperimentConfig, o: Overrides) {
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = o.$field { cfg.$field = v; } )* };
    }
    set!(seed, dim, levels, lambda, n_max, trials, noise_target);
    if let Some(p) = o.p {
        cfg.p_values = p;
    }
    if o.mode.is_some() {
        cfg.mode = o.mode;
    }
    if o.out.is_some() {
        cfg.out = o.out;
    }
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => experiments::write_output(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    apply(&mut cfg, cli.overrides);

    let text = match cli.command {
        Command::Heatmap { encoder } => {
            if let Some(e) = encoder {
                cfg.encoder = e;
            }
            experiments::run_heatmap(&cfg)?
        }
        Command::Capacity {
            all_n,
            compare_original,
        } => {
            if all_n {
                cfg.odd_only = false;
            }
            if compare_original {
                experiments::run_capacity_comparison(&cfg)?
            } else {
                experiments::run_capacity(&cfg)?
            }
        }
        Command::Sensorimotor {
            stored,
            reject_threshold,
            model,
        } => {
            if let Some(s) = stored {
                cfg.stored_counts = s;
            }
            if let Some(t) = reject_threshold {
                cfg.reject_threshold = t;
            }
            if let Some(path) = model {
                let largest = cfg.stored_counts.iter().copied().max().unwrap_or(0);
                let mode = cfg.mode.unwrap_or(MemoryMode::Tabular);
                let mem = experiments::build_sensorimotor_memory(&cfg, mode, largest)?;
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(file);
                mem.write_to(&mut w)?;
                w.flush().with_context(|| format!("writing {}", path.display()))?;
            }
            experiments::run_sensorimotor(&cfg)?
        }
        Command::Sequence { length, codebook } => {
            if let Some(l) = length {
                cfg.sequence_len = l;
            }
            if let Some(c) = codebook {
                cfg.codebook_size = c;
            }
            experiments::run_sequence(&cfg)?
        }
        Command::Bloom { k, inserted, queries } => {
            if let Some(k) = k {
                cfg.bloom_k = k;
            }
            if let Some(n) = inserted {
                cfg.bloom_inserted = n;
            }
            if let Some(q) = queries {
                cfg.bloom_queries = q;
            }
            experiments::run_bloom(&cfg)?
        }
        Command::TimeImage {
            events,
            start_us,
            end_us,
        } => {
            let file = File::open(&events).with_context(|| format!("opening {}", events.display()))?;
            let stream = experiments::read_events_csv(BufReader::new(file))?;
            let window = TimeWindow {
                start_us,
                end_us: end_us.unwrap_or(start_us + cfg.interval_us),
            };
            experiments::events_to_frame(
                &stream,
                window,
                cfg.grid_width as usize,
                cfg.grid_height as usize,
                cfg.levels,
            )?
            .to_csv()
        }
        Command::Config => cfg.to_toml()?,
    };
    emit(&cfg, &text)
}
