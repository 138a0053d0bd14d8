//! Deterministic chaotic-map generators used as drop-in randomness sources.
//!
//! Each generator iterates one of ten fixed recurrences from a seed value
//! (0.7 by default) and exposes the sequence both in the map's native range
//! and through affine adapters for the unit interval (0,1) and the signed
//! interval [-1,1].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Default initial value for every map.
pub const DEFAULT_SEED: f64 = 0.7;

/// Escape offset for degenerate states (endpoints, NaN, fixed points).
const EPSILON: f64 = 1e-6;

/// The ten supported map recurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Chebyshev,
    Circle,
    GaussMouse,
    Iterative,
    Logistic,
    Piecewise,
    Sine,
    Singer,
    Sinusoidal,
    Tent,
}

impl MapKind {
    pub const ALL: [MapKind; 10] = [
        MapKind::Chebyshev,
        MapKind::Circle,
        MapKind::GaussMouse,
        MapKind::Iterative,
        MapKind::Logistic,
        MapKind::Piecewise,
        MapKind::Sine,
        MapKind::Singer,
        MapKind::Sinusoidal,
        MapKind::Tent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Chebyshev => "chebyshev",
            MapKind::Circle => "circle",
            MapKind::GaussMouse => "gauss-mouse",
            MapKind::Iterative => "iterative",
            MapKind::Logistic => "logistic",
            MapKind::Piecewise => "piecewise",
            MapKind::Sine => "sine",
            MapKind::Singer => "singer",
            MapKind::Sinusoidal => "sinusoidal",
            MapKind::Tent => "tent",
        }
    }

    /// Native output interval (lo, hi), exclusive at both ends once the
    /// perturbation rule has been applied.
    pub fn native_range(self) -> (f64, f64) {
        match self {
            MapKind::Chebyshev | MapKind::Iterative => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// One application of the raw recurrence. `step` is consumed only by
    /// Chebyshev, whose multiplier is the iteration index.
    fn apply(self, x: f64, step: u64) -> f64 {
        use std::f64::consts::PI;
        match self {
            MapKind::Chebyshev => (step as f64 * x.acos()).cos(),
            MapKind::Circle => {
                (x + 0.2 - (0.5 / (2.0 * PI)) * (2.0 * PI * x).sin()).rem_euclid(1.0)
            }
            // The reciprocal is reduced mod 1; the x=0 branch returns 1 and
            // is immediately rescued by the perturbation rule.
            MapKind::GaussMouse => {
                if x == 0.0 {
                    1.0
                } else {
                    (1.0 / x).fract()
                }
            }
            MapKind::Iterative => (0.7 * PI / x).sin(),
            MapKind::Logistic => 4.0 * x * (1.0 - x),
            MapKind::Piecewise => {
                const P: f64 = 0.4;
                if x < P {
                    x / P
                } else if x < 0.5 {
                    (x - P) / (0.5 - P)
                } else if x < 1.0 - P {
                    (1.0 - P - x) / (0.5 - P)
                } else {
                    (1.0 - x) / P
                }
            }
            MapKind::Sine => (PI * x).sin(),
            MapKind::Singer => {
                1.07 * (7.86 * x - 23.31 * x * x + 28.75 * x.powi(3) - 13.302875 * x.powi(4))
            }
            MapKind::Sinusoidal => 2.3 * x * x * (PI * x).sin(),
            // The first branch covers x < 0.7, the second x >= 0.7, so the
            // default seed lands on (10/3)(1-x).
            MapKind::Tent => {
                if x < 0.7 {
                    x / 0.7
                } else {
                    (10.0 / 3.0) * (1.0 - x)
                }
            }
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown map {name:?}; valid maps: {}", valid_map_names())]
pub struct UnknownMapError {
    pub name: String,
}

/// Comma-separated list of all map names, for error messages and help text.
pub fn valid_map_names() -> String {
    MapKind::ALL
        .iter()
        .map(|k| k.name())
        .collect::<Vec<_>>()
        .join(", ")
}

impl FromStr for MapKind {
    type Err = UnknownMapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        MapKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == norm)
            .ok_or_else(|| UnknownMapError { name: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("seed {seed} outside the open native range ({lo}, {hi}) of map {kind}")]
pub struct SeedRangeError {
    pub kind: MapKind,
    pub seed: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Stateful iterator over one map's orbit.
#[derive(Debug, Clone)]
pub struct ChaoticGenerator {
    kind: MapKind,
    x: f64,
    step_index: u64,
    epsilon: f64,
}

impl ChaoticGenerator {
    /// Generator seeded at 0.7 with the step counter at 1.
    pub fn new(kind: MapKind) -> Self {
        ChaoticGenerator {
            kind,
            x: DEFAULT_SEED,
            step_index: 1,
            epsilon: EPSILON,
        }
    }

    /// Generator seeded at an arbitrary point of the open native range.
    pub fn with_initial(kind: MapKind, seed: f64) -> Result<Self, SeedRangeError> {
        let (lo, hi) = kind.native_range();
        if !seed.is_finite() || seed <= lo || seed >= hi {
            return Err(SeedRangeError { kind, seed, lo, hi });
        }
        Ok(ChaoticGenerator {
            kind,
            x: seed,
            step_index: 1,
            epsilon: EPSILON,
        })
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn current(&self) -> f64 {
        self.x
    }

    /// Advances the orbit and returns the new value in the native range.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> f64 {
        let (lo, hi) = self.kind.native_range();
        let raw = self.kind.apply(self.x, self.step_index);
        self.step_index += 1;
        self.x = if degenerate(raw, self.x, lo, hi, self.epsilon) {
            rescue(self.x, lo, hi, self.epsilon)
        } else {
            raw
        };
        self.x
    }

    /// Next value mapped into (0,1): signed-native outputs v become (v+1)/2.
    pub fn unit(&mut self) -> f64 {
        let v = self.next();
        let (lo, _) = self.kind.native_range();
        if lo < 0.0 {
            (v + 1.0) / 2.0
        } else {
            v
        }
    }

    /// Next value mapped into [-1,1]: unit-native outputs u become 2u-1.
    pub fn signed(&mut self) -> f64 {
        let v = self.next();
        let (lo, _) = self.kind.native_range();
        if lo < 0.0 {
            v
        } else {
            2.0 * v - 1.0
        }
    }

    /// Discards `n` values; used to offset orbits between runs.
    pub fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.next();
        }
    }
}

/// A raw output is degenerate when it cannot safely continue the orbit:
/// non-finite, within epsilon of an interval endpoint or of zero (the
/// undefined point of the reciprocal maps), or an exact repeat of the input.
/// Values closer to an endpoint than epsilon are indistinguishable from the
/// endpoint at the resolution the escape rule itself operates on, and letting
/// them through collapses reciprocal orbits onto short cycles.
fn degenerate(raw: f64, prev: f64, lo: f64, hi: f64, eps: f64) -> bool {
    !raw.is_finite() || raw <= lo + eps || raw >= hi - eps || raw.abs() <= eps || raw == prev
}

/// Replacement state: previous value plus epsilon, wrapped into the native
/// range and nudged until it is non-degenerate.
fn rescue(prev: f64, lo: f64, hi: f64, eps: f64) -> f64 {
    let mut y = prev;
    loop {
        y += eps;
        let wrapped = lo + (y - lo).rem_euclid(hi - lo);
        if !degenerate(wrapped, prev, lo, hi, eps) {
            return wrapped;
        }
    }
}
