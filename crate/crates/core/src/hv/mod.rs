//! Dense binary hypervectors and the three VSA operations.
//!
//! A [`Hypervector`] stores `dim` bits packed into `u64` words, element `j`
//! living in word `j / 64` at bit `j % 64`. Read as little-endian bytes this is
//! exactly "element `j` in byte `j / 8` at bit `j % 8`, least significant
//! first", which is also the on-disk payload layout. Bits past `dim` in the
//! last word are always zero, so popcount-based kernels never need to mask.

mod accumulator;
mod bundle;
mod io;
mod noise;

use std::fmt;

use rand::Rng;

use crate::error::{check_dims, Error, Result};

pub use accumulator::BundleAccumulator;
pub use bundle::{bundle, bundle_with_rng};
pub use io::{read_hdhv, write_hdhv, HDHV_MAGIC, HDHV_VERSION};
pub(crate) use noise::bernoulli_word;

const WORD_BITS: usize = 64;

pub(crate) fn word_count(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

/// Mask of valid bits in the last word of a `dim`-bit vector.
pub(crate) fn tail_mask(dim: usize) -> u64 {
    match dim % WORD_BITS {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

/// A fixed-dimension dense binary vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypervector {
    dim: usize,
    words: Vec<u64>,
}

impl Hypervector {
    /// The all-zero vector; the identity element of [`bind`](Self::bind).
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(Hypervector {
            dim,
            words: vec![0; word_count(dim)],
        })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Ok(Self::zeros(dim)?.complement())
    }

    /// Draws a vector whose bits are independent fair coin flips.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let mut hv = Self::zeros(dim)?;
        for w in &mut hv.words {
            *w = rng.random();
        }
        hv.clear_tail();
        Ok(hv)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut hv = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            hv.set(i, b);
        }
        Ok(hv)
    }

    /// Builds a vector from packed words. Bits beyond `dim` must be zero.
    pub fn from_words(dim: usize, words: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if words.len() != word_count(dim) {
            return Err(Error::invalid(format!(
                "{} words cannot hold exactly {dim} bits",
                words.len()
            )));
        }
        if words[words.len() - 1] & !tail_mask(dim) != 0 {
            return Err(Error::invalid("bits set beyond the vector dimension"));
        }
        Ok(Hypervector { dim, words })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "bit index {i} out of range for dimension {}", self.dim);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.dim, "bit index {i} out of range for dimension {}", self.dim);
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.dim).map(move |i| self.get(i))
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// Binding: elementwise XOR.
    pub fn bind(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.bind_assign(other)?;
        Ok(out)
    }

    pub fn bind_assign(&mut self, other: &Self) -> Result<()> {
        check_dims(self.dim, other.dim)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Cyclic rotation: element `i` moves to `(i + shift) mod dim`.
    ///
    /// Negative shifts rotate the other way, so `permute(k)` is undone by
    /// `permute(-k)`.
    pub fn permute(&self, shift: i64) -> Self {
        let s = shift.rem_euclid(self.dim as i64) as usize;
        if s == 0 {
            return self.clone();
        }
        let mut words = vec![0u64; self.words.len()];
        shift_up_into(&mut words, &self.words, s);
        shift_down_into(&mut words, &self.words, self.dim - s);
        let mut out = Hypervector {
            dim: self.dim,
            words,
        };
        out.clear_tail();
        out
    }

    /// Number of differing positions.
    pub fn hamming_count(&self, other: &Self) -> Result<usize> {
        check_dims(self.dim, other.dim)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Normalized Hamming distance, in `[0, 1]`.
    pub fn hamming(&self, other: &Self) -> Result<f64> {
        Ok(self.hamming_count(other)? as f64 / self.dim as f64)
    }

    /// Flips every bit independently with probability `p`.
    pub fn flip_noise<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("flip probability {p} outside [0, 1]")));
        }
        let mut out = self.clone();
        if p > 0.0 {
            for w in &mut out.words {
                *w ^= bernoulli_word(rng, p);
            }
            out.clear_tail();
        }
        Ok(out)
    }

    fn clear_tail(&mut self) {
        let mask = tail_mask(self.dim);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

impl fmt::Debug for Hypervector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 64;
        let prefix: String = self
            .iter()
            .take(SHOWN)
            .map(|b| if b { '1' } else { '0' })
            .collect();
        let ellipsis = if self.dim > SHOWN { "..." } else { "" };
        write!(f, "Hypervector({}; {prefix}{ellipsis})", self.dim)
    }
}

/// `dst |= src` moved toward higher bit indices by `s` bits; overflow dropped.
fn shift_up_into(dst: &mut [u64], src: &[u64], s: usize) {
    let (ws, bs) = (s / WORD_BITS, s % WORD_BITS);
    for i in ws..dst.len() {
        let mut v = src[i - ws] << bs;
        if bs > 0 && i > ws {
            v |= src[i - ws - 1] >> (WORD_BITS - bs);
        }
        dst[i] |= v;
    }
}

/// `dst |= src` moved toward lower bit indices by `s` bits.
fn shift_down_into(dst: &mut [u64], src: &[u64], s: usize) {
    let (ws, bs) = (s / WORD_BITS, s % WORD_BITS);
    for (i, d) in dst.iter_mut().enumerate() {
        let j = i + ws;
        if j >= src.len() {
            break;
        }
        let mut v = src[j] >> bs;
        if bs > 0 && j + 1 < src.len() {
            v |= src[j + 1] << (WORD_BITS - bs);
        }
        *d |= v;
    }
}

/// Draws a random hypervector; see [`Hypervector::random`].
pub fn random_hv<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Hypervector> {
    Hypervector::random(dim, rng)
}
