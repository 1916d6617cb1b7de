//! Expected distance between a majority bundle and its components.
//!
//! Bundling `n` random vectors (odd `n`) and comparing the result to one of
//! them, a bit disagrees exactly when the other `n - 1` inputs outvote it.
//! With an extra independent flip probability `p`, on either the compared
//! component or the bundle itself, the expected normalized Hamming distance is
//!
//! ```text
//! 1/2 - (1 - 2p) / 2^n * C(n - 1, (n - 1) / 2)
//! ```
//!
//! [`expected_distance`] evaluates this closed form. [`expected_distance_sum_form`]
//! evaluates the double binomial sum it is derived from, term by term, so the two
//! can be checked against each other. [`original_article_form`] keeps the
//! earlier published sum with fractional index bounds (rounded up) for
//! comparison, and [`simulate_distance`] measures the same quantity by Monte-Carlo.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hv::{bundle, Hypervector};
use crate::rng::{derive_seed, seeded};

/// A validated `(n, p)` pair: `n` odd and positive, `p` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityQuery {
    n: u32,
    p: f64,
}

impl CapacityQuery {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "the closed form needs an odd number of components, got {n}"
            )));
        }
        check_probability(p)?;
        Ok(CapacityQuery { n, p })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("bit-flip probability {p} outside [0, 1]")))
    }
}

/// Largest `m` for which binomials are taken from exact integers.
const EXACT_LIMIT: u32 = 62;

fn exact_binomial(m: u32, k: u32) -> u64 {
    let k = k.min(m - k) as u128;
    let m = m as u128;
    // each partial product C(m - k + i, i) is an integer
    (1..=k).fold(1u128, |acc, i| acc * (m - k + i) / i) as u64
}

fn ln_binomial(m: u32, k: u32) -> f64 {
    let k = k.min(m - k);
    (1..=k)
        .map(|i| ((m - k + i) as f64 / i as f64).ln())
        .sum()
}

/// `C(m, k) / 2^m`: exact integers for `m <= 62`, log domain beyond.
pub fn binomial_mass(m: u32, k: u32) -> f64 {
    if k > m {
        return 0.0;
    }
    if m <= EXACT_LIMIT {
        exact_binomial(m, k) as f64 / 2f64.powi(m as i32)
    } else {
        (ln_binomial(m, k) - m as f64 * std::f64::consts::LN_2).exp()
    }
}

/// Closed form of the expected bundle-to-component distance.
pub fn expected_distance(q: CapacityQuery) -> f64 {
    let m = q.n - 1;
    0.5 - (1.0 - 2.0 * q.p) * 0.5 * binomial_mass(m, m / 2)
}

/// The same quantity from the corrected double sum:
/// `(1-p) Σ_{k=(n-1)/2+1}^{n-1} C(n-1,k)/2^(n-1) + p Σ_{k=(n-1)/2}^{n-1} C(n-1,k)/2^(n-1)`.
pub fn expected_distance_sum_form(q: CapacityQuery) -> f64 {
    let m = q.n - 1;
    let half = m / 2;
    let tail = |from: u32| -> f64 { (from..=m).map(|k| binomial_mass(m, k)).sum() };
    (1.0 - q.p) * tail(half + 1) + q.p * tail(half)
}

/// The earlier published sum with lower bounds `n/2` and `n/2 - 1`, read as
/// `ceil(n/2)` and `ceil(n/2) - 1`.
///
/// For odd `n` this coincides with [`expected_distance_sum_form`]; for even
/// `n` it ignores random tie-breaking and overestimates the distance.
pub fn original_article_form(n: u32, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("at least one component is required"));
    }
    check_probability(p)?;
    let m = n - 1;
    let first = n.div_ceil(2);
    let tail = |from: u32| -> f64 { (from..=m).map(|k| binomial_mass(m, k)).sum() };
    Ok((1.0 - p) * tail(first) + p * tail(first - 1))
}

/// Where the simulated bit-flip noise is injected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseTarget {
    /// Each component is perturbed after bundling, before comparison.
    Component,
    /// The bundle itself is perturbed; components stay clean.
    Bundle,
}

impl NoiseTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseTarget::Component => "component",
            NoiseTarget::Bundle => "bundle",
        }
    }
}

impl std::str::FromStr for NoiseTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "component" => Ok(NoiseTarget::Component),
            "bundle" => Ok(NoiseTarget::Bundle),
            other => Err(Error::invalid(format!("unknown noise target {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationParams {
    /// Bundled components; even values are allowed and use random tie-breaks.
    pub n: usize,
    pub p: f64,
    pub dim: usize,
    pub trials: usize,
    pub noise_target: NoiseTarget,
}

/// Mean of the per-trial average distances and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationStats {
    pub mean: f64,
    /// Zero when only one trial was run.
    pub stderr: f64,
}

/// Monte-Carlo estimate of the bundle-to-component distance.
///
/// Trial `t` draws everything from a stream keyed by `(seed, t)`, so results
/// are independent of thread scheduling.
pub fn simulate_distance(params: SimulationParams, seed: u64) -> Result<SimulationStats> {
    let SimulationParams {
        n,
        p,
        dim,
        trials,
        noise_target,
    } = params;
    if n == 0 || dim == 0 || trials == 0 {
        return Err(Error::invalid("n, dimension and trials must all be positive"));
    }
    check_probability(p)?;

    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = seeded(derive_seed(seed, &[t as u64]));
            let components = (0..n)
                .map(|_| Hypervector::random(dim, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let tie = Hypervector::random(dim, &mut rng)?;
            let bundled = bundle(&components, &tie)?;
            let mut sum = 0usize;
            match noise_target {
                NoiseTarget::Component => {
                    for c in &components {
                        sum += bundled.hamming_count(&c.flip_noise(p, &mut rng)?)?;
                    }
                }
                NoiseTarget::Bundle => {
                    let noisy = bundled.flip_noise(p, &mut rng)?;
                    for c in &components {
                        sum += noisy.hamming_count(c)?;
                    }
                }
            }
            Ok(sum as f64 / (n * dim) as f64)
        })
        .collect::<Result<_>>()?;

    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let stderr = if trials > 1 {
        let var = per_trial.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(SimulationStats { mean, stderr })
}

/// Parameters of an analytic-versus-empirical sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub n_max: usize,
    /// Only odd `n` when set; every `n` in `1..=n_max` otherwise.
    pub odd_only: bool,
    pub p_values: Vec<f64>,
    pub dim: usize,
    pub trials: usize,
    pub noise_target: NoiseTarget,
}

impl SweepSpec {
    pub fn n_values(&self) -> Vec<usize> {
        let step = if self.odd_only { 2 } else { 1 };
        (1..=self.n_max).step_by(step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityRow {
    pub n: usize,
    pub p: f64,
    /// Absent for even `n`, where the closed form does not apply.
    pub analytic: Option<f64>,
    pub empirical: SimulationStats,
    pub noise_target: NoiseTarget,
}

/// Runs [`simulate_distance`] over the grid `p_values x n_values`, rows ordered
/// by `p` then `n`.
pub fn capacity_sweep(spec: &SweepSpec, seed: u64) -> Result<Vec<CapacityRow>> {
    let points: Vec<(f64, usize)> = spec
        .p_values
        .iter()
        .flat_map(|&p| spec.n_values().into_iter().map(move |n| (p, n)))
        .collect();
    points
        .into_par_iter()
        .map(|(p, n)| {
            let params = SimulationParams {
                n,
                p,
                dim: spec.dim,
                trials: spec.trials,
                noise_target: spec.noise_target,
            };
            let point_seed = derive_seed(seed, &[n as u64, p.to_bits(), spec.noise_target as u64]);
            let empirical = simulate_distance(params, point_seed)?;
            let analytic = match n % 2 {
                1 => Some(expected_distance(CapacityQuery::new(n as u32, p)?)),
                _ => None,
            };
            Ok(CapacityRow {
                n,
                p,
                analytic,
                empirical,
                noise_target: spec.noise_target,
            })
        })
        .collect()
}
