//! Randomness sources behind one trait, so the search core never branches on
//! where its numbers come from: a seeded uniform generator, a Levy-flight
//! generator, and the chaotic maps.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;

use crate::chaos::{ChaoticGenerator, MapKind};

/// One run's supply of random numbers. `unit` feeds initialization and
/// redraw amendment, `signed` feeds the pace rules.
pub trait RandStream: Send {
    /// Draw in (0,1).
    fn unit(&mut self) -> f64;
    /// Draw in [-1,1].
    fn signed(&mut self) -> f64;
}

/// Plain seeded uniform source.
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Decorrelated sibling generator under the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        UniformStream { rng }
    }
}

impl RandStream for UniformStream {
    fn unit(&mut self) -> f64 {
        open_unit(&mut self.rng)
    }

    fn signed(&mut self) -> f64 {
        2.0 * self.rng.gen::<f64>() - 1.0
    }
}

fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Uniform for `unit`, clamped Levy-flight steps for `signed`; both sides
/// consume one underlying generator in program order.
pub struct LevyStream {
    rng: ChaCha8Rng,
    beta: f64,
    sigma: f64,
}

impl LevyStream {
    pub fn new(seed: u64, beta: f64) -> Self {
        Self::with_stream(seed, 0, beta)
    }

    pub fn with_stream(seed: u64, stream: u64, beta: f64) -> Self {
        let sigma = mantegna_sigma(beta);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        LevyStream { rng, beta, sigma }
    }
}

impl RandStream for LevyStream {
    fn unit(&mut self) -> f64 {
        open_unit(&mut self.rng)
    }

    fn signed(&mut self) -> f64 {
        let u: f64 = self.rng.sample::<f64, _>(StandardNormal) * self.sigma;
        let v: f64 = self.rng.sample(StandardNormal);
        levy_from_draws(u, v, self.beta).clamp(-1.0, 1.0)
    }
}

/// Scale of the Gaussian numerator in the two-Gaussian heavy-tail
/// construction.
pub fn mantegna_sigma(beta: f64) -> f64 {
    assert!(
        beta > 0.0 && beta <= 2.0,
        "beta must lie in (0, 2], got {beta}"
    );
    let num = gamma(1.0 + beta) * (PI * beta / 2.0).sin();
    let den = gamma((1.0 + beta) / 2.0) * beta * 2.0_f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

fn levy_from_draws(u: f64, v: f64, beta: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    u / v.abs().powf(1.0 / beta)
}

/// One heavy-tailed step in [-1,1] (clamped).
pub fn levy<R: Rng>(beta: f64, rng: &mut R) -> f64 {
    let sigma = mantegna_sigma(beta);
    let u: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    let v: f64 = rng.sample(StandardNormal);
    levy_from_draws(u, v, beta).clamp(-1.0, 1.0)
}

/// Chaotic-map source; `warmup` next() calls offset the orbit so different
/// run seeds take different trajectories from the shared initial value.
pub struct ChaoticStream {
    gen: ChaoticGenerator,
}

impl ChaoticStream {
    pub fn new(kind: MapKind, warmup: usize) -> Self {
        let mut gen = ChaoticGenerator::new(kind);
        gen.advance(warmup);
        ChaoticStream { gen }
    }
}

impl RandStream for ChaoticStream {
    fn unit(&mut self) -> f64 {
        self.gen.unit()
    }

    fn signed(&mut self) -> f64 {
        self.gen.signed()
    }
}
