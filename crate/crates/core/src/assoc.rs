//! Item memory (nearest-neighbour cleanup) and the sensorimotor
//! heteroassociative memory.
//!
//! [`SensorimotorMemory`] stores `frame XOR velocity` records. Unbinding a
//! frame from a record gives back the velocity vector, exactly for a tabular
//! record and with bundling noise for the single bundled memory; the result is
//! then cleaned up against the velocity codebook.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::hv::{BundleAccumulator, Hypervector};

/// Distances at or above this are treated as "unknown frame".
pub const DEFAULT_REJECT_THRESHOLD: f64 = 0.47;

/// Labelled codebook with exhaustive nearest-neighbour lookup.
#[derive(Clone, Debug)]
pub struct ItemMemory<L> {
    dim: usize,
    labels: Vec<L>,
    vectors: Vec<Hypervector>,
}

impl<L: PartialEq + Clone> ItemMemory<L> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(ItemMemory {
            dim,
            labels: Vec::new(),
            vectors: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Appends an entry. Labels must be unique.
    pub fn insert(&mut self, label: L, hv: Hypervector) -> Result<()> {
        check_dims(self.dim, hv.dim())?;
        if self.labels.contains(&label) {
            return Err(Error::invalid("duplicate item memory label"));
        }
        self.labels.push(label);
        self.vectors.push(hv);
        Ok(())
    }

    pub fn get(&self, label: &L) -> Option<&Hypervector> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| &self.vectors[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &Hypervector)> {
        self.labels.iter().zip(&self.vectors)
    }

    /// Index and Hamming count of the closest entry; the earliest wins ties.
    pub fn nearest(&self, query: &Hypervector) -> Result<(usize, usize)> {
        check_dims(self.dim, query.dim())?;
        let mut best: Option<(usize, usize)> = None;
        for (i, hv) in self.vectors.iter().enumerate() {
            let d = hv.hamming_count(query)?;
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.ok_or(Error::Empty("item memory"))
    }

    /// Label and normalized distance of the closest entry.
    pub fn cleanup(&self, query: &Hypervector) -> Result<(&L, f64)> {
        let (i, d) = self.nearest(query)?;
        Ok((&self.labels[i], d as f64 / self.dim as f64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryMode {
    /// One majority bundle of all records.
    Bundled,
    /// Every record kept separately.
    Tabular,
}

impl MemoryMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MemoryMode::Bundled => "bundled",
            MemoryMode::Tabular => "tabular",
        }
    }
}

impl std::str::FromStr for MemoryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bundled" => Ok(MemoryMode::Bundled),
            "tabular" => Ok(MemoryMode::Tabular),
            other => Err(Error::invalid(format!("unknown memory mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Records {
    Bundled {
        acc: BundleAccumulator,
        tie_break: Hypervector,
    },
    Tabular(Vec<Hypervector>),
}

/// Outcome of [`SensorimotorMemory::predict`].
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub distance: f64,
}

impl Prediction {
    pub fn is_accepted(&self, threshold: f64) -> bool {
        self.distance < threshold
    }
}

/// Heteroassociative memory from frame vectors to velocity labels.
#[derive(Clone, Debug)]
pub struct SensorimotorMemory {
    velocities: ItemMemory<String>,
    records: Records,
}

impl SensorimotorMemory {
    /// `tie_break` resolves even-count majorities in bundled mode and is
    /// ignored in tabular mode.
    pub fn new(mode: MemoryMode, velocities: ItemMemory<String>, tie_break: Hypervector) -> Result<Self> {
        check_dims(velocities.dim(), tie_break.dim())?;
        let records = match mode {
            MemoryMode::Bundled => Records::Bundled {
                acc: BundleAccumulator::new(velocities.dim())?,
                tie_break,
            },
            MemoryMode::Tabular => Records::Tabular(Vec::new()),
        };
        Ok(SensorimotorMemory { velocities, records })
    }

    pub fn mode(&self) -> MemoryMode {
        match self.records {
            Records::Bundled { .. } => MemoryMode::Bundled,
            Records::Tabular(_) => MemoryMode::Tabular,
        }
    }

    pub fn velocities(&self) -> &ItemMemory<String> {
        &self.velocities
    }

    pub fn dim(&self) -> usize {
        self.velocities.dim()
    }

    /// Number of stored pairs.
    pub fn len(&self) -> usize {
        match &self.records {
            Records::Bundled { acc, .. } => acc.total() as usize,
            Records::Tabular(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn store(&mut self, frame: &Hypervector, velocity: &str) -> Result<()> {
        let v = self
            .velocities
            .get(&velocity.to_string())
            .ok_or_else(|| Error::invalid(format!("unknown velocity label {velocity:?}")))?;
        let record = frame.bind(v)?;
        match &mut self.records {
            Records::Bundled { acc, .. } => acc.add(&record),
            Records::Tabular(r) => {
                r.push(record);
                Ok(())
            }
        }
    }

    /// Bundled mode only: the noisy velocity vector recovered for `frame`.
    pub fn unbind(&self, frame: &Hypervector) -> Result<Hypervector> {
        match &self.records {
            Records::Bundled { acc, tie_break } => {
                if acc.is_empty() {
                    return Err(Error::Empty("sensorimotor memory"));
                }
                acc.threshold(tie_break)?.bind(frame)
            }
            Records::Tabular(_) => Err(Error::invalid("unbind needs a bundled memory")),
        }
    }

    pub fn predict(&self, frame: &Hypervector) -> Result<Prediction> {
        check_dims(self.dim(), frame.dim())?;
        let (index, count) = match &self.records {
            Records::Bundled { .. } => self.velocities.nearest(&self.unbind(frame)?)?,
            Records::Tabular(records) => {
                let mut best: Option<(usize, usize)> = None;
                for r in records {
                    let found = self.velocities.nearest(&r.bind(frame)?)?;
                    if best.is_none_or(|(_, d)| found.1 < d) {
                        best = Some(found);
                    }
                }
                best.ok_or(Error::Empty("sensorimotor memory"))?
            }
        };
        Ok(Prediction {
            label: self.velocities.labels[index].clone(),
            distance: count as f64 / self.dim() as f64,
        })
    }

    /// Writes the `HDAM` container.
    ///
    /// Layout, all integers little-endian: `"HDAM"`, version `u8`, mode `u8`
    /// (0 bundled, 1 tabular), dimension `u32`, velocity count `u32`, then per
    /// velocity a `u32` byte length, the UTF-8 label and the packed vector.
    /// Bundled mode follows with the packed tie-break vector, the record total
    /// `u32` and one `i32` counter per dimension; tabular mode with a `u32`
    /// record count and the packed records.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(HDAM_MAGIC)?;
        w.write_all(&[HDAM_VERSION])?;
        let mode = match self.mode() {
            MemoryMode::Bundled => 0u8,
            MemoryMode::Tabular => 1u8,
        };
        w.write_all(&[mode])?;
        write_u32(w, self.dim())?;
        write_u32(w, self.velocities.len())?;
        for (label, hv) in self.velocities.iter() {
            write_u32(w, label.len())?;
            w.write_all(label.as_bytes())?;
            w.write_all(&hv.to_packed_bytes())?;
        }
        match &self.records {
            Records::Bundled { acc, tie_break } => {
                w.write_all(&tie_break.to_packed_bytes())?;
                write_u32(w, acc.total() as usize)?;
                for c in acc.counts() {
                    w.write_all(&c.to_le_bytes())?;
                }
            }
            Records::Tabular(records) => {
                write_u32(w, records.len())?;
                for r in records {
                    w.write_all(&r.to_packed_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != HDAM_MAGIC {
            return Err(Error::format("HDAM", "bad magic"));
        }
        let version = read_u8(r)?;
        if version != HDAM_VERSION {
            return Err(Error::format("HDAM", format!("unsupported version {version}")));
        }
        let mode = read_u8(r)?;
        let dim = read_u32(r)? as usize;
        if dim == 0 {
            return Err(Error::format("HDAM", "zero dimension"));
        }
        let count = read_u32(r)? as usize;
        let mut velocities = ItemMemory::new(dim)?;
        for _ in 0..count {
            let len = read_u32(r)? as usize;
            // grow with the data rather than trusting the length up front
            let mut buf = Vec::new();
            r.by_ref().take(len as u64).read_to_end(&mut buf)?;
            if buf.len() != len {
                return Err(Error::format("HDAM", "truncated label"));
            }
            let label = String::from_utf8(buf).map_err(|_| Error::format("HDAM", "label is not UTF-8"))?;
            let hv = Hypervector::read_packed(r, dim)?;
            velocities
                .insert(label, hv)
                .map_err(|e| Error::format("HDAM", e.to_string()))?;
        }
        let records = match mode {
            0 => {
                let tie_break = Hypervector::read_packed(r, dim)?;
                let total = read_u32(r)?;
                let mut counts = Vec::new();
                for _ in 0..dim {
                    let mut b = [0u8; 4];
                    r.read_exact(&mut b)?;
                    counts.push(i32::from_le_bytes(b));
                }
                let acc = BundleAccumulator::from_parts(counts, total)
                    .map_err(|e| Error::format("HDAM", e.to_string()))?;
                Records::Bundled { acc, tie_break }
            }
            1 => {
                let n = read_u32(r)? as usize;
                let records = (0..n)
                    .map(|_| Hypervector::read_packed(r, dim))
                    .collect::<Result<Vec<_>>>()?;
                Records::Tabular(records)
            }
            other => return Err(Error::format("HDAM", format!("unknown mode byte {other}"))),
        };
        Ok(SensorimotorMemory { velocities, records })
    }
}

impl PartialEq for SensorimotorMemory {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records
            && self.velocities.labels == other.velocities.labels
            && self.velocities.vectors == other.velocities.vectors
    }
}

pub const HDAM_MAGIC: &[u8; 4] = b"HDAM";
pub const HDAM_VERSION: u8 = 1;

fn write_u32<W: Write>(w: &mut W, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::invalid(format!("{v} does not fit in 32 bits")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, HdRng};
    use proptest::prelude::*;

    fn codebook(dim: usize, n: usize, rng: &mut HdRng) -> ItemMemory<String> {
        let mut m = ItemMemory::new(dim).unwrap();
        for i in 0..n {
            m.insert(format!("v{i}"), Hypervector::random(dim, rng).unwrap()).unwrap();
        }
        m
    }

    #[test]
    fn cleanup_exact_and_noisy() {
        let mut rng = seeded(1);
        let mem = codebook(8192, 100, &mut rng);
        let (label, d) = mem.cleanup(mem.get(&"v42".into()).unwrap()).unwrap();
        assert_eq!((label.as_str(), d), ("v42", 0.0));
        let noisy = mem.get(&"v7".into()).unwrap().flip_noise(0.1, &mut rng).unwrap();
        let (label, d) = mem.cleanup(&noisy).unwrap();
        assert_eq!(label, "v7");
        assert!((d - 0.1).abs() < 0.02);
    }

    #[test]
    fn cleanup_errors_and_ties() {
        let mut mem: ItemMemory<u32> = ItemMemory::new(16).unwrap();
        let z = Hypervector::zeros(16).unwrap();
        assert!(matches!(mem.cleanup(&z), Err(Error::Empty(_))));
        mem.insert(3, z.clone()).unwrap();
        mem.insert(1, z.clone()).unwrap();
        assert!(mem.insert(3, z.clone()).is_err());
        assert_eq!(mem.cleanup(&z).unwrap(), (&3, 0.0));
        assert!(mem.cleanup(&Hypervector::zeros(17).unwrap()).is_err());
    }

    #[test]
    fn single_pair_round_trip_both_modes() {
        for mode in [MemoryMode::Bundled, MemoryMode::Tabular] {
            let mut rng = seeded(2);
            let vel = codebook(2048, 21, &mut rng);
            let tie = Hypervector::random(2048, &mut rng).unwrap();
            let mut mem = SensorimotorMemory::new(mode, vel, tie).unwrap();
            assert!(mem.predict(&Hypervector::zeros(2048).unwrap()).is_err());
            let frame = Hypervector::random(2048, &mut rng).unwrap();
            mem.store(&frame, "v5").unwrap();
            let pred = mem.predict(&frame).unwrap();
            assert_eq!(pred, Prediction { label: "v5".into(), distance: 0.0 });
            assert!(mem.store(&frame, "nope").is_err());
            assert_eq!(mem.len(), 1);
        }
    }

    #[test]
    fn bundled_recall_of_eleven_pairs() {
        let mut rng = seeded(3);
        let vel = codebook(8192, 21, &mut rng);
        let tie = Hypervector::random(8192, &mut rng).unwrap();
        let mut mem = SensorimotorMemory::new(MemoryMode::Bundled, vel, tie).unwrap();
        let pairs: Vec<_> = (0..11)
            .map(|i| (Hypervector::random(8192, &mut rng).unwrap(), format!("v{}", (i * 5) % 21)))
            .collect();
        for (f, v) in &pairs {
            mem.store(f, v).unwrap();
        }
        let expected = 0.5 - 252.0 / 2048.0;
        for (f, v) in &pairs {
            let p = mem.predict(f).unwrap();
            assert_eq!(&p.label, v);
            assert!((p.distance - expected).abs() < 0.02, "{}", p.distance);
            assert!(p.is_accepted(DEFAULT_REJECT_THRESHOLD));
        }
        let stranger = Hypervector::random(8192, &mut rng).unwrap();
        let p = mem.predict(&stranger).unwrap();
        assert!((p.distance - 0.5).abs() < 0.02);
        assert!(!p.is_accepted(DEFAULT_REJECT_THRESHOLD));
    }

    #[test]
    fn unbind_requires_bundled_mode() {
        let mut rng = seeded(4);
        let vel = codebook(64, 2, &mut rng);
        let mem = SensorimotorMemory::new(MemoryMode::Tabular, vel, Hypervector::zeros(64).unwrap()).unwrap();
        assert!(mem.unbind(&Hypervector::zeros(64).unwrap()).is_err());
    }

    #[test]
    fn corrupt_container_is_rejected() {
        assert!(SensorimotorMemory::read_from(&mut &b"HDAX"[..]).is_err());
        assert!(SensorimotorMemory::read_from(&mut &b"HDAM\x01\x07\x08\0\0\0\0\0\0\0"[..]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn container_round_trip(seed: u64, tabular: bool, stored in 0usize..6, dim in 1usize..300) {
            let mut rng = seeded(seed);
            let vel = codebook(dim, 3, &mut rng);
            let mode = if tabular { MemoryMode::Tabular } else { MemoryMode::Bundled };
            let tie = Hypervector::random(dim, &mut rng).unwrap();
            let mut mem = SensorimotorMemory::new(mode, vel, tie).unwrap();
            for i in 0..stored {
                let f = Hypervector::random(dim, &mut rng).unwrap();
                mem.store(&f, &format!("v{}", i % 3)).unwrap();
            }
            let mut buf = Vec::new();
            mem.write_to(&mut buf).unwrap();
            let back = SensorimotorMemory::read_from(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(back.mode(), mode);
            prop_assert_eq!(back.len(), stored);
            prop_assert!(back == mem);
        }
    }
}
