//! Raw benchmark functions, written so canonical optima hit their floors
//! exactly in floating point (difference forms instead of textbook constants
//! where that matters).

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    ChebyshevFit,
    InverseHilbert,
    LennardJones,
    Rastrigin,
    Griewank,
    Weierstrass,
    ModifiedSchwefel,
    ExpandedSchafferF6,
    HappyCat,
    Ackley,
    Sphere,
    Rosenbrock,
}

impl FunctionKind {
    /// Function value before bias and transform.
    pub fn raw(self, z: &[f64]) -> f64 {
        match self {
            FunctionKind::ChebyshevFit => chebyshev_fit(z),
            FunctionKind::InverseHilbert => inverse_hilbert(z),
            FunctionKind::LennardJones => lennard_jones(z),
            FunctionKind::Rastrigin => rastrigin(z),
            FunctionKind::Griewank => griewank(z),
            FunctionKind::Weierstrass => weierstrass(z),
            FunctionKind::ModifiedSchwefel => modified_schwefel(z),
            FunctionKind::ExpandedSchafferF6 => expanded_schaffer_f6(z),
            FunctionKind::HappyCat => happy_cat(z),
            FunctionKind::Ackley => ackley(z),
            FunctionKind::Sphere => sphere(z),
            FunctionKind::Rosenbrock => rosenbrock(z),
        }
    }
}

/// Fit penalty for approximating a degree-(n-1) Chebyshev polynomial:
/// overshoot of |p(y)| beyond 1 on a 32n+1 grid over [-1,1], plus shortfall
/// of p(±1.2) below the target T_{n-1}(1.2).
fn chebyshev_fit(z: &[f64]) -> f64 {
    let d = z.len();
    let horner = |t: f64| z[1..].iter().fold(z[0], |px, &c| t * px + c);
    // T_{d-1}(1.2) by the three-term recurrence
    let (mut a, mut b) = (1.0_f64, 1.2_f64);
    for _ in 0..d.saturating_sub(2) {
        (a, b) = (b, 2.4 * b - a);
    }
    let target = b;
    let sample = 32 * d;
    let dy = 2.0 / sample as f64;
    let mut sum = 0.0;
    let mut y = -1.0;
    for _ in 0..=sample {
        let px = horner(y);
        if px.abs() > 1.0 {
            let t = 1.0 - px.abs();
            sum += t * t;
        }
        y += dy;
    }
    for s in [-1.2, 1.2] {
        let px = horner(s);
        if px < target {
            let t = px - target;
            sum += t * t;
        }
    }
    sum
}

/// Deviation of H*Z from the identity, Z read row-major from z, H the
/// Hilbert matrix of order sqrt(len).
fn inverse_hilbert(z: &[f64]) -> f64 {
    let b = (z.len() as f64).sqrt() as usize;
    let mut sum = 0.0;
    for j in 0..b {
        for k in 0..b {
            let mut y = 0.0;
            for i in 0..b {
                y += z[k + b * i] / (j + i + 1) as f64;
            }
            sum += if j == k { (y - 1.0).abs() } else { y.abs() };
        }
    }
    sum
}

/// Offset that sets the 6-atom cluster floor of the pairwise energy to the
/// conventional positive value used in reported results.
const LENNARD_JONES_OFFSET: f64 = 24.4144622568;

/// Pairwise 12-6 potential over len/3 atoms, near-coincident pairs clamped.
fn lennard_jones(z: &[f64]) -> f64 {
    let atoms = z.len() / 3;
    let mut e = 0.0;
    for i in 0..atoms.saturating_sub(1) {
        for j in i + 1..atoms {
            let (a, b) = (3 * i, 3 * j);
            let dx = z[a] - z[b];
            let dy = z[a + 1] - z[b + 1];
            let dz = z[a + 2] - z[b + 2];
            let ed = dx * dx + dy * dy + dz * dz;
            let ud = ed * ed * ed;
            e += if ud > 1.0e-10 { (1.0 / ud - 2.0) / ud } else { 1.0e20 };
        }
    }
    e + LENNARD_JONES_OFFSET
}

fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| {
            let t = w[1] - w[0] * w[0];
            100.0 * t * t + (1.0 - w[0]) * (1.0 - w[0])
        })
        .sum()
}

fn rastrigin(z: &[f64]) -> f64 {
    z.iter()
        .map(|&v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

fn griewank(z: &[f64]) -> f64 {
    let s: f64 = z.iter().map(|v| v * v).sum();
    let p: f64 = z
        .iter()
        .enumerate()
        .map(|(i, &v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    s / 4000.0 - p + 1.0
}

/// Truncated at k_max terms; evaluated as a per-coordinate difference from
/// the value at 0 so the origin is an exact zero.
fn weierstrass(z: &[f64]) -> f64 {
    const K_MAX: i32 = 20;
    const A: f64 = 0.5;
    const B: f64 = 3.0;
    let series = |t: f64| -> f64 {
        (0..=K_MAX)
            .map(|k| A.powi(k) * (2.0 * PI * B.powi(k) * (t + 0.5)).cos())
            .sum()
    };
    let at_zero = series(0.0);
    z.iter().map(|&v| series(v) - at_zero).sum()
}

fn modified_schwefel(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let g = |zi: f64| -> f64 {
        let w = zi + 420.9687462275036;
        if w.abs() <= 500.0 {
            w * w.abs().sqrt().sin()
        } else if w > 500.0 {
            let t = 500.0 - w % 500.0;
            t * t.abs().sqrt().sin() - (w - 500.0) * (w - 500.0) / (10000.0 * d)
        } else {
            let t = w.abs() % 500.0 - 500.0;
            t * t.abs().sqrt().sin() - (w + 500.0) * (w + 500.0) / (10000.0 * d)
        }
    };
    418.9829 * d - z.iter().map(|&v| g(v)).sum::<f64>()
}

fn expanded_schaffer_f6(z: &[f64]) -> f64 {
    let sf = |x: f64, y: f64| -> f64 {
        let s = x * x + y * y;
        let num = s.sqrt().sin().powi(2) - 0.5;
        let den = 1.0 + 0.001 * s;
        0.5 + num / (den * den)
    };
    let n = z.len();
    let mut sum = sf(z[n - 1], z[0]);
    for w in z.windows(2) {
        sum += sf(w[0], w[1]);
    }
    sum
}

fn happy_cat(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let s: f64 = z.iter().map(|v| v * v).sum();
    let lin: f64 = z.iter().sum();
    (s - d).abs().powf(0.25) + (0.5 * s + lin) / d + 0.5
}

/// Difference form: both brackets vanish exactly at the origin.
fn ackley(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let rms = (z.iter().map(|v| v * v).sum::<f64>() / d).sqrt();
    let mean_cos = z.iter().map(|&v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    (20.0 - 20.0 * (-0.2 * rms).exp()) + ((1.0_f64).exp() - mean_cos.exp())
}
