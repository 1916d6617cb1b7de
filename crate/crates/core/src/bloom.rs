//! Bloom filter read as a sparse VSA: items are sparse hypervectors with at
//! most `k` set bits and bundling is elementwise OR.

use std::io::{Read, Write};

use crate::error::{check_dims, Error, Result};
use crate::hv::{read_hdhv, write_hdhv, Hypervector};

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps keys to sparse hypervectors through `k` double-hashed positions
/// `h1 + i * h2 (mod dim)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparseItemEncoder {
    dim: usize,
    k: usize,
    seed: u64,
}

impl SparseItemEncoder {
    pub fn new(dim: usize, k: usize, seed: u64) -> Result<Self> {
        if dim == 0 || k == 0 {
            return Err(Error::invalid("dimension and k must be positive"));
        }
        if u32::try_from(dim).is_err() {
            return Err(Error::invalid("dimension does not fit in 32 bits"));
        }
        Ok(SparseItemEncoder { dim, k, seed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `k` hashed positions of `key`, possibly with repeats.
    pub fn positions(&self, key: &[u8]) -> impl Iterator<Item = usize> {
        let base = fnv1a(key);
        let n = self.dim as u64;
        let h1 = mix(base ^ self.seed) % n;
        let h2 = match mix(base.rotate_left(32) ^ self.seed ^ 0x5bd1_e995) % n {
            0 => 1,
            h => h,
        };
        (0..self.k as u64).map(move |i| ((h1 + i * h2) % n) as usize)
    }

    pub fn encode(&self, key: &[u8]) -> Hypervector {
        let mut hv = Hypervector::zeros(self.dim).expect("dimension checked at construction");
        for p in self.positions(key) {
            hv.set(p, true);
        }
        hv
    }
}

/// OR-bundle of sparse item vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrBundleFilter {
    encoder: SparseItemEncoder,
    bits: Hypervector,
    inserted: u64,
}

impl OrBundleFilter {
    pub fn new(encoder: SparseItemEncoder) -> Self {
        OrBundleFilter {
            bits: Hypervector::zeros(encoder.dim).expect("dimension checked at construction"),
            encoder,
            inserted: 0,
        }
    }

    pub fn encoder(&self) -> &SparseItemEncoder {
        &self.encoder
    }

    pub fn bits(&self) -> &Hypervector {
        &self.bits
    }

    pub fn inserted_count(&self) -> u64 {
        self.inserted
    }

    pub fn insert(&mut self, key: &[u8]) {
        for p in self.encoder.positions(key) {
            self.bits.set(p, true);
        }
        self.inserted += 1;
    }

    /// True when every hashed position is set. Never false for inserted keys.
    pub fn contains(&self, key: &[u8]) -> bool {
        self.encoder.positions(key).all(|p| self.bits.get(p))
    }

    /// `"HDBF"`, version `u8`, `k` as `u32`, hash seed `u64`, inserted count
    /// `u64` (all little-endian), then the bit vector as an `HDHV` record.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(HDBF_MAGIC)?;
        w.write_all(&[HDBF_VERSION])?;
        let k = u32::try_from(self.encoder.k).map_err(|_| Error::invalid("k does not fit in 32 bits"))?;
        w.write_all(&k.to_le_bytes())?;
        w.write_all(&self.encoder.seed.to_le_bytes())?;
        w.write_all(&self.inserted.to_le_bytes())?;
        write_hdhv(w, &self.bits)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut header = [0u8; 25];
        r.read_exact(&mut header)?;
        if &header[..4] != HDBF_MAGIC {
            return Err(Error::format("HDBF", "bad magic"));
        }
        if header[4] != HDBF_VERSION {
            return Err(Error::format("HDBF", format!("unsupported version {}", header[4])));
        }
        let k = u32::from_le_bytes(header[5..9].try_into().unwrap()) as usize;
        let seed = u64::from_le_bytes(header[9..17].try_into().unwrap());
        let inserted = u64::from_le_bytes(header[17..25].try_into().unwrap());
        let bits = read_hdhv(r)?;
        let encoder = SparseItemEncoder::new(bits.dim(), k, seed)
            .map_err(|e| Error::format("HDBF", e.to_string()))?;
        Ok(OrBundleFilter {
            encoder,
            bits,
            inserted,
        })
    }
}

pub const HDBF_MAGIC: &[u8; 4] = b"HDBF";
pub const HDBF_VERSION: u8 = 1;

/// Elementwise OR of sparse vectors.
pub fn or_bundle(vectors: &[Hypervector]) -> Result<Hypervector> {
    let first = vectors.first().ok_or(Error::Empty("OR bundle input"))?;
    let mut words = first.words().to_vec();
    for v in &vectors[1..] {
        check_dims(first.dim(), v.dim())?;
        for (a, b) in words.iter_mut().zip(v.words()) {
            *a |= b;
        }
    }
    Hypervector::from_words(first.dim(), words)
}

/// Classic estimate `(1 - e^(-k n / N))^k`.
pub fn expected_false_positive_rate(inserted: usize, k: usize, dim: usize) -> f64 {
    let fill = 1.0 - (-(k as f64) * inserted as f64 / dim as f64).exp();
    fill.powi(k as i32)
}
