use super::{Hypervector, WORD_BITS};
use crate::error::{check_dims, Error, Result};

/// Exact running sum behind majority bundling.
///
/// Each counter holds `(#ones - #zeros)` at its position over the vectors
/// currently added, so a vector can be removed again without loss and the
/// majority can be read out at any time with [`threshold`](Self::threshold).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleAccumulator {
    counts: Vec<i32>,
    total: u32,
}

impl BundleAccumulator {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(BundleAccumulator {
            counts: vec![0; dim],
            total: 0,
        })
    }

    /// Rebuilds an accumulator from stored counters, checking that they are
    /// reachable by `total` additions.
    pub fn from_parts(counts: Vec<i32>, total: u32) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        for (i, &c) in counts.iter().enumerate() {
            if c.unsigned_abs() > total || (c.unsigned_abs() ^ total) & 1 == 1 {
                return Err(Error::invalid(format!(
                    "counter {i} = {c} is not reachable with {total} vectors"
                )));
            }
        }
        Ok(BundleAccumulator { counts, total })
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Added minus removed vectors.
    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn counts(&self) -> &[i32] {
        &self.counts
    }

    pub fn add(&mut self, hv: &Hypervector) -> Result<()> {
        check_dims(self.dim(), hv.dim())?;
        self.apply(hv, 1);
        self.total += 1;
        Ok(())
    }

    /// Undoes an earlier [`add`](Self::add) of the same vector.
    ///
    /// Removing a vector that was never added cannot be detected in general
    /// and leaves the counters describing a different multiset; only removal
    /// from an empty accumulator is rejected.
    pub fn remove(&mut self, hv: &Hypervector) -> Result<()> {
        check_dims(self.dim(), hv.dim())?;
        if self.total == 0 {
            return Err(Error::Precondition(
                "cannot remove a vector from an empty accumulator".into(),
            ));
        }
        self.apply(hv, -1);
        self.total -= 1;
        Ok(())
    }

    fn apply(&mut self, hv: &Hypervector, sign: i32) {
        for (chunk, &word) in self.counts.chunks_mut(WORD_BITS).zip(hv.words()) {
            for (b, c) in chunk.iter_mut().enumerate() {
                // +sign for a one, -sign for a zero
                *c += sign * ((((word >> b) & 1) as i32) * 2 - 1);
            }
        }
    }

    /// Majority readout: 1 where the counter is positive, 0 where negative and
    /// the `tie_break` bit where it is zero.
    pub fn threshold(&self, tie_break: &Hypervector) -> Result<Hypervector> {
        check_dims(self.dim(), tie_break.dim())?;
        if self.total == 0 {
            return Err(Error::Empty("bundle accumulator"));
        }
        let mut out = tie_break.clone();
        for (i, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                out.set(i, c > 0);
            }
        }
        Ok(out)
    }

    /// Rotates the counters the same way [`Hypervector::permute`] rotates bits.
    pub fn permute(&self, shift: i64) -> Self {
        let mut counts = self.counts.clone();
        let s = shift.rem_euclid(self.dim() as i64) as usize;
        counts.rotate_right(s);
        BundleAccumulator {
            counts,
            total: self.total,
        }
    }
}
