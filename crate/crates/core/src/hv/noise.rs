use rand::Rng;

/// 64 independent Bernoulli(`p`) bits in one word.
///
/// Each lane compares a lazily drawn uniform binary fraction against the
/// binary expansion of `p`, one random word per digit, until every lane has
/// been decided. The draw is exact for any `f64` probability and consumes
/// about `log2(64) + 2` words on average instead of 64 float samples.
pub(crate) fn bernoulli_word<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return !0;
    }
    let mut frac = p;
    let mut hit = 0u64;
    let mut undecided = !0u64;
    while undecided != 0 && frac != 0.0 {
        let r: u64 = rng.random();
        frac *= 2.0;
        if frac >= 1.0 {
            frac -= 1.0;
            // digit 1: lanes drawing 0 fall strictly below p
            hit |= undecided & !r;
            undecided &= r;
        } else {
            // digit 0: lanes drawing 1 land above p
            undecided &= !r;
        }
    }
    hit
}
