//! Similarity-preserving codes for bounded discrete scalars.
//!
//! A [`LevelEncoder`] holds one hypervector per level `0..m`. Two
//! constructions are provided:
//!
//! * **linear**: each step to the next level flips a fresh, disjoint block of
//!   positions, so distance grows in exact proportion to the level difference.
//! * **nonlinear**: each step flips every bit independently with probability
//!   `lambda`, so the expected distance at level offset `d` is
//!   `(1 - (1 - 2 lambda)^d) / 2`. Nearby levels separate quickly and the
//!   curve saturates toward 0.5.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::Hypervector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Linear,
    Nonlinear,
}

impl std::str::FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(EncoderKind::Linear),
            "nonlinear" => Ok(EncoderKind::Nonlinear),
            other => Err(Error::invalid(format!("unknown encoder kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevelMode {
    /// Bits flipped per level step.
    Linear { block: usize },
    /// Per-bit flip probability per level step.
    Nonlinear { lambda: f64 },
}

/// Codebook mapping levels `0..m` to hypervectors.
#[derive(Clone, Debug)]
pub struct LevelEncoder {
    mode: LevelMode,
    codebook: Vec<Hypervector>,
}

impl LevelEncoder {
    /// Linear code whose first and last level sit at distance close to 0.5.
    pub fn linear<R: Rng + ?Sized>(dim: usize, levels: usize, rng: &mut R) -> Result<Self> {
        check_levels(levels)?;
        Self::linear_with_block(dim, levels, dim / (2 * (levels - 1)), rng)
    }

    /// Linear code whose first and last level sit at distance close to `span`.
    pub fn linear_spanning<R: Rng + ?Sized>(
        dim: usize,
        levels: usize,
        span: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_levels(levels)?;
        if !(span > 0.0 && span <= 1.0) {
            return Err(Error::invalid(format!("endpoint distance {span} outside (0, 1]")));
        }
        let flips = (span * dim as f64).round() as usize;
        Self::linear_with_block(dim, levels, flips / (levels - 1), rng)
    }

    fn linear_with_block<R: Rng + ?Sized>(
        dim: usize,
        levels: usize,
        block: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let mut current = Hypervector::random(dim, rng)?;
        if block == 0 {
            return Err(Error::invalid(format!(
                "dimension {dim} is too small to separate {levels} levels"
            )));
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(rng);
        let mut codebook = Vec::with_capacity(levels);
        codebook.push(current.clone());
        for step in order.chunks_exact(block).take(levels - 1) {
            for &i in step {
                current.flip(i);
            }
            codebook.push(current.clone());
        }
        Ok(LevelEncoder {
            mode: LevelMode::Linear { block },
            codebook,
        })
    }

    /// Chain code: level `i + 1` is level `i` with each bit flipped with
    /// probability `lambda`.
    pub fn nonlinear<R: Rng + ?Sized>(
        dim: usize,
        levels: usize,
        lambda: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_levels(levels)?;
        if !(lambda > 0.0 && lambda <= 0.5) {
            return Err(Error::invalid(format!("proximity {lambda} outside (0, 0.5]")));
        }
        let mut codebook = Vec::with_capacity(levels);
        codebook.push(Hypervector::random(dim, rng)?);
        for i in 1..levels {
            let next = codebook[i - 1].flip_noise(lambda, rng)?;
            codebook.push(next);
        }
        Ok(LevelEncoder {
            mode: LevelMode::Nonlinear { lambda },
            codebook,
        })
    }

    pub fn build<R: Rng + ?Sized>(
        kind: EncoderKind,
        dim: usize,
        levels: usize,
        lambda: f64,
        rng: &mut R,
    ) -> Result<Self> {
        match kind {
            EncoderKind::Linear => Self::linear(dim, levels, rng),
            EncoderKind::Nonlinear => Self::nonlinear(dim, levels, lambda, rng),
        }
    }

    pub fn mode(&self) -> LevelMode {
        self.mode
    }

    pub fn levels(&self) -> usize {
        self.codebook.len()
    }

    pub fn dim(&self) -> usize {
        self.codebook[0].dim()
    }

    pub fn encode(&self, level: usize) -> Result<&Hypervector> {
        self.codebook.get(level).ok_or_else(|| {
            Error::invalid(format!("level {level} outside 0..{}", self.codebook.len()))
        })
    }

    pub fn codebook(&self) -> &[Hypervector] {
        &self.codebook
    }

    /// Pairwise normalized distances between all levels.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        self.codebook
            .iter()
            .map(|a| {
                self.codebook
                    .iter()
                    .map(|b| a.hamming(b).expect("codebook shares one dimension"))
                    .collect()
            })
            .collect()
    }

    /// Expected distance between levels `d` apart, from the construction.
    pub fn expected_distance(&self, offset: usize) -> f64 {
        match self.mode {
            LevelMode::Linear { block } => (offset * block) as f64 / self.dim() as f64,
            LevelMode::Nonlinear { lambda } => 0.5 * (1.0 - (1.0 - 2.0 * lambda).powi(offset as i32)),
        }
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(Error::invalid(format!("need at least 2 levels, got {levels}")));
    }
    Ok(())
}

/// Uniform binning of a real interval into `bins` levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantizer {
    min: f64,
    max: f64,
    bins: usize,
}

impl Quantizer {
    pub fn new(min: f64, max: f64, bins: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(Error::invalid(format!("empty range [{min}, {max}]")));
        }
        if bins == 0 {
            return Err(Error::invalid("need at least one bin"));
        }
        Ok(Quantizer { min, max, bins })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Bin index of `value`; values outside the range clamp to the end bins.
    pub fn bin(&self, value: f64) -> usize {
        let t = (value - self.min) / (self.max - self.min);
        ((t * self.bins as f64).floor().max(0.0) as usize).min(self.bins - 1)
    }

    pub fn center(&self, bin: usize) -> f64 {
        let width = (self.max - self.min) / self.bins as f64;
        self.min + (bin as f64 + 0.5) * width
    }
}
