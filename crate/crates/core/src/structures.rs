//! Composite representations: frames, time-tick sequence memories,
//! permutation-coded sequences and bind-chain sets.

use std::io::BufRead;

use crate::assoc::ItemMemory;
use crate::error::{check_dims, Error, Result};
use crate::hv::{BundleAccumulator, Hypervector};
use crate::rng::{derive_seed, seeded};
use crate::scalar::LevelEncoder;

/// A single-channel image of integer intensity levels, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<u16>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("frame sides must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "{} pixels do not fill a {width}x{height} frame",
                pixels.len()
            )));
        }
        Ok(Frame {
            width,
            height,
            pixels,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.pixels[y * self.width + x] = v;
    }

    /// Parses rows of comma-separated integers; every row must have the same
    /// length. Blank lines are skipped.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut width = None;
        let mut pixels = Vec::new();
        let mut height = 0;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| s.trim().parse::<u16>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::format("frame CSV", format!("line {}: {e}", lineno + 1)))?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::format(
                        "frame CSV",
                        format!("line {} has {} values, expected {w}", lineno + 1, row.len()),
                    ))
                }
                _ => {}
            }
            pixels.extend(row);
            height += 1;
        }
        let width = width.ok_or_else(|| Error::format("frame CSV", "no rows"))?;
        Self::new(width, height, pixels)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.pixels.chunks(self.width) {
            let cells: Vec<String> = row.iter().map(u16::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Bind-chain of position-rotated intensity codes:
/// `XOR over pixels of permute(code(intensity), y * width + x)`.
///
/// The pixel count must be below the dimension so every position gets a
/// distinct rotation.
pub fn encode_frame(frame: &Frame, encoder: &LevelEncoder) -> Result<Hypervector> {
    let dim = encoder.dim();
    if frame.pixels.len() >= dim {
        return Err(Error::invalid(format!(
            "{} pixels need a dimension above {}, got {dim}",
            frame.pixels.len(),
            frame.pixels.len()
        )));
    }
    let mut acc = Hypervector::zeros(dim)?;
    for (idx, &v) in frame.pixels.iter().enumerate() {
        let code = encoder.encode(v as usize)?;
        acc.bind_assign(&code.permute(idx as i64))?;
    }
    Ok(acc)
}

const TIE_TAG: u64 = 0x7469_6562;
const TICK_TAG: u64 = 0x7469_636b;

/// Bundle of `frame XOR tick` records with exact deletion.
///
/// Tick vectors are independent random vectors derived from the memory's
/// seed and the tick number, cached in an item memory on first insert.
#[derive(Clone, Debug)]
pub struct SequenceMemory {
    acc: BundleAccumulator,
    ticks: ItemMemory<u64>,
    tie_break: Hypervector,
    seed: u64,
}

impl SequenceMemory {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        let tie_break = Hypervector::random(dim, &mut seeded(derive_seed(seed, &[TIE_TAG])))?;
        Ok(SequenceMemory {
            acc: BundleAccumulator::new(dim)?,
            ticks: ItemMemory::new(dim)?,
            tie_break,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.acc.dim()
    }

    pub fn stored_count(&self) -> u32 {
        self.acc.total()
    }

    pub fn accumulator(&self) -> &BundleAccumulator {
        &self.acc
    }

    pub fn ticks(&self) -> &ItemMemory<u64> {
        &self.ticks
    }

    pub fn tick_vector(&self, tick: u64) -> Result<Hypervector> {
        match self.ticks.get(&tick) {
            Some(hv) => Ok(hv.clone()),
            None => Hypervector::random(self.dim(), &mut seeded(derive_seed(self.seed, &[TICK_TAG, tick]))),
        }
    }

    pub fn insert(&mut self, tick: u64, frame: &Hypervector) -> Result<()> {
        check_dims(self.dim(), frame.dim())?;
        let tick_hv = self.tick_vector(tick)?;
        if self.ticks.get(&tick).is_none() {
            self.ticks.insert(tick, tick_hv.clone())?;
        }
        self.acc.add(&frame.bind(&tick_hv)?)
    }

    /// Removes a previously inserted `(tick, frame)` pair exactly.
    pub fn remove(&mut self, tick: u64, frame: &Hypervector) -> Result<()> {
        check_dims(self.dim(), frame.dim())?;
        let tick_hv = self.tick_vector(tick)?;
        self.acc.remove(&frame.bind(&tick_hv)?)
    }

    /// Noisy frame vector stored at `tick`, to be cleaned up by an item memory.
    pub fn probe(&self, tick: u64) -> Result<Hypervector> {
        if self.acc.is_empty() {
            return Err(Error::Empty("sequence memory"));
        }
        self.acc.threshold(&self.tie_break)?.bind(&self.tick_vector(tick)?)
    }
}

/// Pre-threshold sum of `permute(item_i, start + i)`.
pub fn perm_sequence_accumulator(items: &[Hypervector], start: i64) -> Result<BundleAccumulator> {
    let first = items.first().ok_or(Error::Empty("sequence"))?;
    let mut acc = BundleAccumulator::new(first.dim())?;
    for (i, item) in items.iter().enumerate() {
        acc.add(&item.permute(start + i as i64))?;
    }
    Ok(acc)
}

/// Ordered sequence as the majority of `permute(item_i, i)`.
///
/// Rotating the result by one gives the encoding of the same sequence placed
/// one position later, up to tie-broken positions (none for odd lengths).
pub fn encode_perm_sequence(items: &[Hypervector], tie_break: &Hypervector) -> Result<Hypervector> {
    encode_perm_sequence_at(items, 0, tie_break)
}

/// [`encode_perm_sequence`] with the first item at position `start`.
pub fn encode_perm_sequence_at(
    items: &[Hypervector],
    start: i64,
    tie_break: &Hypervector,
) -> Result<Hypervector> {
    perm_sequence_accumulator(items, start)?.threshold(tie_break)
}

/// Unordered set as the XOR of its members.
///
/// Members that are similar to each other largely cancel: a repeated member
/// vanishes entirely.
pub fn encode_set_bindchain(items: &[Hypervector]) -> Result<Hypervector> {
    let first = items.first().ok_or(Error::Empty("set"))?;
    let mut acc = first.clone();
    for item in &items[1..] {
        acc.bind_assign(item)?;
    }
    Ok(acc)
}
