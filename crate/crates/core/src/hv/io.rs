use std::io::{Read, Write};

use super::{word_count, Hypervector};
use crate::error::{Error, Result};

pub const HDHV_MAGIC: &[u8; 4] = b"HDHV";
pub const HDHV_VERSION: u8 = 1;

impl Hypervector {
    /// Packed payload: element `j` in byte `j / 8`, bit `j % 8` (LSB first).
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.words().iter().flat_map(|w| w.to_le_bytes()).collect();
        bytes.truncate(self.dim().div_ceil(8));
        bytes
    }

    pub fn from_packed_bytes(dim: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != dim.div_ceil(8) {
            return Err(Error::format(
                "packed vector",
                format!("expected {} bytes for {dim} bits, got {}", dim.div_ceil(8), bytes.len()),
            ));
        }
        let mut words = vec![0u64; word_count(dim)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        Hypervector::from_words(dim, words)
            .map_err(|e| Error::format("packed vector", e.to_string()))
    }

    /// Reads exactly one packed payload of `dim` bits.
    pub(crate) fn read_packed<R: Read>(reader: &mut R, dim: usize) -> Result<Self> {
        let mut bytes = vec![0u8; dim.div_ceil(8)];
        reader.read_exact(&mut bytes)?;
        Self::from_packed_bytes(dim, &bytes)
    }
}

/// Writes `"HDHV"`, the version byte, the dimension as `u32` LE, then the
/// packed payload.
pub fn write_hdhv<W: Write>(writer: &mut W, hv: &Hypervector) -> Result<()> {
    let dim = u32::try_from(hv.dim())
        .map_err(|_| Error::invalid("dimension does not fit in 32 bits"))?;
    writer.write_all(HDHV_MAGIC)?;
    writer.write_all(&[HDHV_VERSION])?;
    writer.write_all(&dim.to_le_bytes())?;
    writer.write_all(&hv.to_packed_bytes())?;
    Ok(())
}

pub fn read_hdhv<R: Read>(reader: &mut R) -> Result<Hypervector> {
    let mut header = [0u8; 9];
    reader.read_exact(&mut header)?;
    if &header[..4] != HDHV_MAGIC {
        return Err(Error::format("HDHV", "bad magic"));
    }
    if header[4] != HDHV_VERSION {
        return Err(Error::format("HDHV", format!("unsupported version {}", header[4])));
    }
    let dim = u32::from_le_bytes(header[5..9].try_into().unwrap()) as usize;
    if dim == 0 {
        return Err(Error::format("HDHV", "zero dimension"));
    }
    Hypervector::read_packed(reader, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    #[test]
    fn layout_is_lsb_first_bytes() {
        let hv = Hypervector::from_bits(&[true, false, false, false, false, false, false, false, false, true])
            .unwrap();
        let mut buf = Vec::new();
        write_hdhv(&mut buf, &hv).unwrap();
        assert_eq!(buf, [b'H', b'D', b'H', b'V', 1, 10, 0, 0, 0, 0b0000_0001, 0b0000_0010]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_hdhv(&mut &b"HDHX\x01\x08\0\0\0\xff"[..]).is_err());
        assert!(read_hdhv(&mut &b"HDHV\x02\x08\0\0\0\xff"[..]).is_err());
        // bit 4 set in a 4-bit vector
        assert!(read_hdhv(&mut &b"HDHV\x01\x04\0\0\0\x10"[..]).is_err());
        // truncated payload
        assert!(read_hdhv(&mut &b"HDHV\x01\x10\0\0\0\x10"[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(dim in 1usize..2000, seed: u64) {
            let hv = Hypervector::random(dim, &mut seeded(seed)).unwrap();
            let mut buf = Vec::new();
            write_hdhv(&mut buf, &hv).unwrap();
            prop_assert_eq!(buf.len(), 9 + dim.div_ceil(8));
            prop_assert_eq!(read_hdhv(&mut buf.as_slice()).unwrap(), hv);
        }
    }
}
