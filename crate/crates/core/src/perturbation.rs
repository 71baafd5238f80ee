//! Seeded Gaussian perturbation.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), whose
//! output stream is stable across platforms and crate releases. Uniforms are
//! formed from the top 53 bits of each `u64` and mapped to `(0, 1]`; standard
//! normals come in pairs from the Box–Muller transform
//! `sqrt(-2 ln u1) * (cos 2πu2, sin 2πu2)`. Changing any of this changes every
//! reproduced run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The Gaussian vector drawn once at the start of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    gamma: Vec<f64>,
    seed: u64,
}

impl Perturbation {
    /// Wraps an explicit vector (tests, replay). Entries must be finite.
    pub fn from_vec(gamma: Vec<f64>, seed: u64) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidCatalog(
                "perturbation over an empty catalog".into(),
            ));
        }
        if let Some(bad) = gamma.iter().find(|g| !g.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite perturbation entry {bad}"
            )));
        }
        Ok(Perturbation { gamma, seed })
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
}

/// Uniform in `(0, 1]` with 53 bits of resolution.
pub(crate) fn unit_open_closed(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `n` i.i.d. standard normals, deterministic in `(n, seed)`.
pub fn sample_perturbation(n: usize, seed: u64) -> Result<Perturbation> {
    if n == 0 {
        return Err(Error::InvalidCatalog(
            "perturbation over an empty catalog".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma = Vec::with_capacity(n + 1);
    while gamma.len() < n {
        let u1 = unit_open_closed(&mut rng);
        let u2 = unit_open_closed(&mut rng);
        let radius = (-2.0 * u1.ln()).sqrt();
        let (sin, cos) = (std::f64::consts::TAU * u2).sin_cos();
        gamma.push(radius * cos);
        gamma.push(radius * sin);
    }
    gamma.truncate(n);
    Ok(Perturbation { gamma, seed })
}
