//! Hyperdimensional computing with dense binary spatter codes.
//!
//! The building block is [`Hypervector`], a bit-packed binary vector of a few
//! thousand elements. Three operations combine hypervectors:
//!
//! * **binding** ([`Hypervector::bind`]): elementwise XOR, self-inverse;
//! * **bundling** ([`bundle`]): elementwise majority, similar to every input;
//! * **permutation** ([`Hypervector::permute`]): cyclic rotation.
//!
//! Similarity is the normalized Hamming distance ([`Hypervector::hamming`]);
//! independent random vectors sit near 0.5.
//!
//! ```
//! use hdc::{bundle_with_rng, rng::seeded, Hypervector};
//!
//! let mut rng = seeded(7);
//! let a = Hypervector::random(8192, &mut rng)?;
//! let b = Hypervector::random(8192, &mut rng)?;
//! let c = Hypervector::random(8192, &mut rng)?;
//!
//! // unbinding recovers the partner exactly
//! assert_eq!(a.bind(&b)?.bind(&b)?, a);
//!
//! // a three-way majority stays at distance ~1/4 from each input
//! let s = bundle_with_rng(&[a.clone(), b, c], &mut rng)?;
//! assert!((s.hamming(&a)? - 0.25).abs() < 0.02);
//! # Ok::<(), hdc::Error>(())
//! ```
//!
//! Higher layers: [`scalar`] (similarity-preserving level codes), [`structures`]
//! (frames, sequences, sets), [`assoc`] (item and heteroassociative memories),
//! [`capacity`] (expected bundling noise, analytic and simulated), [`bloom`]
//! (the Bloom filter as a sparse OR-bundling VSA) and [`experiments`].

pub mod assoc;
pub mod bloom;
pub mod capacity;
mod error;
pub mod experiments;
pub mod hv;
pub mod rng;
pub mod scalar;
pub mod structures;

pub use error::{Error, Result};
pub use hv::{bundle, bundle_with_rng, random_hv, BundleAccumulator, Hypervector};
