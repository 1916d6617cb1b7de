//! One function per CLI subcommand. Each returns the full CSV text so that
//! callers decide where it goes; every run is a pure function of its config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use super::config::ExperimentConfig;
use super::events::{events_to_frame, generate_synthetic_stream, StreamParams, TimeWindow};
use crate::assoc::{ItemMemory, MemoryMode, SensorimotorMemory};
use crate::bloom::{expected_false_positive_rate, OrBundleFilter, SparseItemEncoder};
use crate::capacity::{capacity_sweep, expected_distance, original_article_form, CapacityQuery, SweepSpec};
use crate::error::{Error, Result};
use crate::hv::Hypervector;
use crate::rng::{derive_seed, seeded, HdRng};
use crate::scalar::{LevelEncoder, Quantizer};
use crate::structures::{encode_frame, Frame, SequenceMemory};

// stream tags for derive_seed
const ENCODER: u64 = 1;
const VELOCITIES: u64 = 2;
const SAMPLES: u64 = 3;
const TIE: u64 = 4;
const CAPACITY: u64 = 5;
const SEQUENCE: u64 = 6;
const BLOOM: u64 = 7;
const CODEBOOK: u64 = 8;

fn stream(cfg: &ExperimentConfig, tags: &[u64]) -> HdRng {
    seeded(derive_seed(cfg.seed, tags))
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(Error::at_path(parent))?;
    }
    std::fs::write(path, contents).map_err(Error::at_path(path))
}

fn intensity_encoder(cfg: &ExperimentConfig) -> Result<LevelEncoder> {
    LevelEncoder::build(cfg.encoder, cfg.dim, cfg.levels, cfg.lambda, &mut stream(cfg, &[ENCODER]))
}

/// Pairwise level distances as a CSV matrix with level indices on both axes.
pub fn run_heatmap(cfg: &ExperimentConfig) -> Result<String> {
    let encoder = intensity_encoder(cfg)?;
    let mut out = String::from("level");
    for j in 0..encoder.levels() {
        write!(out, ",{j}").unwrap();
    }
    out.push('\n');
    for (i, row) in encoder.distance_matrix().iter().enumerate() {
        write!(out, "{i}").unwrap();
        for d in row {
            write!(out, ",{d:.6}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn sweep_spec(cfg: &ExperimentConfig, odd_only: bool) -> SweepSpec {
    SweepSpec {
        n_max: cfg.n_max,
        odd_only,
        p_values: cfg.p_values.clone(),
        dim: cfg.dim,
        trials: cfg.trials,
        noise_target: cfg.noise_target,
    }
}

/// Analytic versus simulated bundle-to-component distance.
pub fn run_capacity(cfg: &ExperimentConfig) -> Result<String> {
    let rows = capacity_sweep(&sweep_spec(cfg, cfg.odd_only), derive_seed(cfg.seed, &[CAPACITY]))?;
    let mut out = String::from("n,p,analytic,empirical_mean,empirical_stderr,noise_target\n");
    for r in rows {
        let analytic = r.analytic.map(|a| format!("{a:.8}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{:.8},{:.8},{}",
            r.n,
            r.p,
            analytic,
            r.empirical.mean,
            r.empirical.stderr,
            r.noise_target.as_str()
        )
        .unwrap();
    }
    Ok(out)
}

/// The fractional-bound sum next to the closed form and a simulation, for
/// every `n` up to `n_max`.
pub fn run_capacity_comparison(cfg: &ExperimentConfig) -> Result<String> {
    let rows = capacity_sweep(&sweep_spec(cfg, false), derive_seed(cfg.seed, &[CAPACITY]))?;
    let mut out = String::from("n,p,original_form,closed_form,empirical_mean\n");
    for r in rows {
        let original = original_article_form(r.n as u32, r.p)?;
        let closed = match r.n % 2 {
            1 => format!("{:.8}", expected_distance(CapacityQuery::new(r.n as u32, r.p)?)),
            _ => String::new(),
        };
        writeln!(out, "{},{},{original:.8},{closed},{:.8}", r.n, r.p, r.empirical.mean).unwrap();
    }
    Ok(out)
}

/// Synthetic time-image pipeline: velocity -> event stream -> frame -> hypervector.
pub struct FramePipeline {
    encoder: LevelEncoder,
    quantizer: Quantizer,
    width: u16,
    height: u16,
    interval_us: u64,
    rate: f64,
    levels: usize,
}

/// One labelled observation produced by [`FramePipeline::sample`].
pub struct Observation {
    pub velocity: f64,
    pub bin: usize,
    pub frame: Frame,
    pub hv: Hypervector,
}

impl FramePipeline {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        if cfg.grid_width as usize * cfg.grid_height as usize >= cfg.dim {
            return Err(Error::invalid("grid has at least as many pixels as the dimension"));
        }
        Ok(FramePipeline {
            encoder: intensity_encoder(cfg)?,
            quantizer: Quantizer::new(cfg.velocity_min, cfg.velocity_max, cfg.velocity_bins)?,
            width: cfg.grid_width,
            height: cfg.grid_height,
            interval_us: cfg.interval_us,
            rate: cfg.event_rate,
            levels: cfg.levels,
        })
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }

    pub fn encoder(&self) -> &LevelEncoder {
        &self.encoder
    }

    /// Draws a velocity uniformly over the configured range and renders it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Observation> {
        let bin = rng.random_range(0..self.quantizer.bins());
        let bin_width = self.quantizer.center(1) - self.quantizer.center(0);
        // stay clear of bin edges so the label is unambiguous
        let velocity = self.quantizer.center(bin) + rng.random_range(-0.45..0.45) * bin_width;
        let params = StreamParams {
            velocity,
            duration_us: self.interval_us,
            width: self.width,
            height: self.height,
            rate: self.rate,
            start_x: rng.random_range(0.0..self.width as f64),
        };
        let events = generate_synthetic_stream(&params, rng)?;
        let window = TimeWindow {
            start_us: 0,
            end_us: self.interval_us,
        };
        let frame = events_to_frame(&events, window, self.width as usize, self.height as usize, self.levels)?;
        let hv = encode_frame(&frame, &self.encoder)?;
        Ok(Observation {
            velocity,
            bin: self.quantizer.bin(velocity),
            frame,
            hv,
        })
    }
}

/// Velocity codebook of independent random vectors labelled by bin index.
pub fn velocity_codebook(cfg: &ExperimentConfig) -> Result<ItemMemory<String>> {
    let mut rng = stream(cfg, &[VELOCITIES]);
    let mut book = ItemMemory::new(cfg.dim)?;
    for bin in 0..cfg.velocity_bins {
        book.insert(bin.to_string(), Hypervector::random(cfg.dim, &mut rng)?)?;
    }
    Ok(book)
}

fn training_samples(cfg: &ExperimentConfig, pipeline: &FramePipeline, stored: usize) -> Result<Vec<Observation>> {
    let mut rng = stream(cfg, &[SAMPLES, stored as u64]);
    (0..stored).map(|_| pipeline.sample(&mut rng)).collect()
}

fn fill_memory(
    cfg: &ExperimentConfig,
    mode: MemoryMode,
    velocities: &ItemMemory<String>,
    samples: &[Observation],
) -> Result<SensorimotorMemory> {
    let tie = Hypervector::random(cfg.dim, &mut stream(cfg, &[TIE, samples.len() as u64]))?;
    let mut mem = SensorimotorMemory::new(mode, velocities.clone(), tie)?;
    for s in samples {
        mem.store(&s.hv, &s.bin.to_string())?;
    }
    Ok(mem)
}

/// The memory `run_sensorimotor` builds for `(mode, stored)`.
pub fn build_sensorimotor_memory(
    cfg: &ExperimentConfig,
    mode: MemoryMode,
    stored: usize,
) -> Result<SensorimotorMemory> {
    let pipeline = FramePipeline::new(cfg)?;
    let samples = training_samples(cfg, &pipeline, stored)?;
    fill_memory(cfg, mode, &velocity_codebook(cfg)?, &samples)
}

/// Per-bin recall of stored (frame, velocity) pairs for each memory mode and
/// stored-pair count. The `all` row per group aggregates every bin.
pub fn run_sensorimotor(cfg: &ExperimentConfig) -> Result<String> {
    let pipeline = FramePipeline::new(cfg)?;
    let velocities = velocity_codebook(cfg)?;
    let modes = match cfg.mode {
        Some(m) => vec![m],
        None => vec![MemoryMode::Tabular, MemoryMode::Bundled],
    };
    let mut out = String::from("mode,stored_pairs,velocity_bin,queries,correct,accuracy\n");
    for &stored in &cfg.stored_counts {
        let samples = training_samples(cfg, &pipeline, stored)?;
        for &mode in &modes {
            let mem = fill_memory(cfg, mode, &velocities, &samples)?;
            let mut per_bin: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            for s in &samples {
                let p = mem.predict(&s.hv)?;
                let hit = p.label == s.bin.to_string() && p.is_accepted(cfg.reject_threshold);
                let slot = per_bin.entry(s.bin).or_default();
                slot.0 += 1;
                slot.1 += hit as usize;
            }
            let (mut total_q, mut total_c) = (0, 0);
            for (bin, (q, c)) in per_bin {
                writeln!(out, "{},{stored},{bin},{q},{c},{:.6}", mode.as_str(), c as f64 / q as f64).unwrap();
                total_q += q;
                total_c += c;
            }
            if total_q > 0 {
                writeln!(
                    out,
                    "{},{stored},all,{total_q},{total_c},{:.6}",
                    mode.as_str(),
                    total_c as f64 / total_q as f64
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

/// Stores `sequence_len` time-image vectors at ticks `0..len`, probes and
/// cleans up each, then deletes the middle tick and probes it again.
pub fn run_sequence(cfg: &ExperimentConfig) -> Result<String> {
    if cfg.sequence_len == 0 || cfg.sequence_len > cfg.codebook_size {
        return Err(Error::invalid("sequence length must be in 1..=codebook size"));
    }
    let pipeline = FramePipeline::new(cfg)?;
    let mut rng = stream(cfg, &[CODEBOOK]);
    let mut book = ItemMemory::new(cfg.dim)?;
    for i in 0..cfg.codebook_size {
        book.insert(i, pipeline.sample(&mut rng)?.hv)?;
    }
    let frame = |i: usize| book.get(&i).expect("codebook entry").clone();

    let mut mem = SequenceMemory::new(cfg.dim, derive_seed(cfg.seed, &[SEQUENCE]))?;
    let len = cfg.sequence_len;
    for t in 0..len {
        mem.insert(t as u64, &frame(t))?;
    }
    let analytic = match len % 2 {
        1 => format!("{:.6}", expected_distance(CapacityQuery::new(len as u32, 0.0)?)),
        _ => String::new(),
    };

    let mut out = String::from("phase,stored,tick,expected,recovered,distance,analytic\n");
    for t in 0..len {
        let (label, d) = book.cleanup(&mem.probe(t as u64)?)?;
        writeln!(out, "stored,{len},{t},{t},{label},{d:.6},{analytic}").unwrap();
    }
    let gone = len / 2;
    mem.remove(gone as u64, &frame(gone))?;
    if mem.stored_count() > 0 {
        let (label, d) = book.cleanup(&mem.probe(gone as u64)?)?;
        writeln!(out, "removed,{},{gone},{gone},{label},{d:.6},", mem.stored_count()).unwrap();
    }
    Ok(out)
}

/// False-positive rate of the OR-bundle filter at increasing load.
pub fn run_bloom(cfg: &ExperimentConfig) -> Result<String> {
    let encoder = SparseItemEncoder::new(cfg.dim, cfg.bloom_k, derive_seed(cfg.seed, &[BLOOM]))?;
    let steps = 8;
    let mut out = String::from("inserted,k,dim,queries,false_negatives,false_positives,fp_rate,analytic_fp_rate\n");
    for step in 1..=steps {
        let inserted = cfg.bloom_inserted * step / steps;
        let mut filter = OrBundleFilter::new(encoder);
        for i in 0..inserted {
            filter.insert(format!("member-{i}").as_bytes());
        }
        let false_negatives = (0..inserted)
            .filter(|i| !filter.contains(format!("member-{i}").as_bytes()))
            .count();
        let false_positives = (0..cfg.bloom_queries)
            .filter(|i| filter.contains(format!("stranger-{i}").as_bytes()))
            .count();
        let rate = false_positives as f64 / cfg.bloom_queries.max(1) as f64;
        writeln!(
            out,
            "{inserted},{},{},{},{false_negatives},{false_positives},{rate:.6},{:.6}",
            cfg.bloom_k,
            cfg.dim,
            cfg.bloom_queries,
            expected_false_positive_rate(inserted, cfg.bloom_k, cfg.dim)
        )
        .unwrap();
    }
    Ok(out)
}
