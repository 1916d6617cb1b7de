use rand::Rng;

use super::Hypervector;
use crate::error::{check_dims, Error, Result};

/// Majority-rule bundling.
///
/// Bit `i` of the result is 1 when more than half of the inputs have a 1
/// there. With an even number of inputs an exact tie takes bit `i` of
/// `tie_break`.
///
/// Counting is bit-sliced: per 64-bit word, a ripple-carry counter kept as
/// `ceil(log2(n + 1))` bit planes absorbs each input with a few word ops, and
/// the final comparison against `n / 2` is done plane by plane.
pub fn bundle(vectors: &[Hypervector], tie_break: &Hypervector) -> Result<Hypervector> {
    let first = vectors.first().ok_or(Error::Empty("bundle input"))?;
    let dim = first.dim();
    for v in vectors {
        check_dims(dim, v.dim())?;
    }
    check_dims(dim, tie_break.dim())?;

    let n = vectors.len();
    let half = n / 2;
    let planes_needed = (usize::BITS - n.leading_zeros()) as usize;
    let even = n.is_multiple_of(2);

    let mut words = vec![0u64; first.words().len()];
    let mut planes = vec![0u64; planes_needed];
    for (w, out) in words.iter_mut().enumerate() {
        planes.iter_mut().for_each(|p| *p = 0);
        for v in vectors {
            let mut carry = v.words()[w];
            let mut j = 0;
            while carry != 0 {
                let next = planes[j] & carry;
                planes[j] ^= carry;
                carry = next;
                j += 1;
            }
        }
        let mut greater = 0u64;
        let mut equal = !0u64;
        for j in (0..planes_needed).rev() {
            let plane = planes[j];
            if half >> j & 1 == 1 {
                equal &= plane;
            } else {
                greater |= equal & plane;
                equal &= !plane;
            }
        }
        *out = if even {
            greater | (equal & tie_break.words()[w])
        } else {
            greater
        };
    }
    let last = words.len() - 1;
    words[last] &= super::tail_mask(dim);
    Hypervector::from_words(dim, words)
}

/// [`bundle`] with a fresh random tie-break vector drawn from `rng`.
///
/// The tie-break vector is drawn even for odd-sized inputs so the generator
/// advances the same way regardless of parity.
pub fn bundle_with_rng<R: Rng + ?Sized>(vectors: &[Hypervector], rng: &mut R) -> Result<Hypervector> {
    let first = vectors.first().ok_or(Error::Empty("bundle input"))?;
    let tie = Hypervector::random(first.dim(), rng)?;
    bundle(vectors, &tie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn empty_input_is_rejected() {
        let tie = Hypervector::zeros(8).unwrap();
        assert!(matches!(bundle(&[], &tie), Err(Error::Empty(_))));
    }

    #[test]
    fn single_input_is_returned() {
        let mut rng = seeded(1);
        let a = Hypervector::random(200, &mut rng).unwrap();
        let tie = Hypervector::random(200, &mut rng).unwrap();
        assert_eq!(bundle(std::slice::from_ref(&a), &tie).unwrap(), a);
    }

    #[test]
    fn two_of_three() {
        let mut rng = seeded(2);
        let a = Hypervector::random(500, &mut rng).unwrap();
        let b = Hypervector::random(500, &mut rng).unwrap();
        let tie = Hypervector::random(500, &mut rng).unwrap();
        assert_eq!(bundle(&[a.clone(), a.clone(), b], &tie).unwrap(), a);
    }

    #[test]
    fn even_ties_follow_tie_break() {
        let mut rng = seeded(3);
        let a = Hypervector::random(100, &mut rng).unwrap();
        let b = a.complement();
        let tie = Hypervector::random(100, &mut rng).unwrap();
        assert_eq!(bundle(&[a, b], &tie).unwrap(), tie);
    }

    #[test]
    fn three_random_components_sit_at_one_quarter() {
        let mut rng = seeded(4);
        let vs: Vec<_> = (0..3).map(|_| Hypervector::random(8192, &mut rng).unwrap()).collect();
        let b = bundle_with_rng(&vs, &mut rng).unwrap();
        for v in &vs {
            let d = b.hamming(v).unwrap();
            assert!((d - 0.25).abs() < 0.02, "{d}");
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = Hypervector::zeros(10).unwrap();
        let b = Hypervector::zeros(11).unwrap();
        assert!(bundle(&[a.clone(), b], &a).is_err());
        assert!(bundle(std::slice::from_ref(&a), &Hypervector::zeros(12).unwrap()).is_err());
    }
}
