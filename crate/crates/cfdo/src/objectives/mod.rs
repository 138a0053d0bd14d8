//! Box-bounded benchmark objectives: a named registry, optional
//! shift/rotate transforms loaded from plain-text files, and the trait the
//! search core consumes.

use std::fs;
use std::path::Path;

use thiserror::Error;

mod functions;
pub use functions::FunctionKind;

/// Rectangular search box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("lower has {lower} entries but upper has {upper}")]
    LengthMismatch { lower: usize, upper: usize },
    #[error("domain must have at least one dimension")]
    Empty,
    #[error("coordinate {d}: lower bound {lo} is not below upper bound {hi}")]
    BadBounds { d: usize, lo: f64, hi: f64 },
}

impl BoundedDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DomainError> {
        if lower.len() != upper.len() {
            return Err(DomainError::LengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(DomainError::Empty);
        }
        for (d, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(DomainError::BadBounds { d, lo, hi });
            }
        }
        Ok(BoundedDomain { lower, upper })
    }

    /// [-half_width, half_width] in every coordinate.
    pub fn symmetric(dim: usize, half_width: f64) -> Self {
        assert!(dim > 0 && half_width > 0.0 && half_width.is_finite());
        BoundedDomain {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }
}

/// What the optimizer minimizes. Implementations must be pure: the engine
/// may evaluate from several runs concurrently.
pub trait Objective: Sync {
    fn label(&self) -> &str;
    fn domain(&self) -> &BoundedDomain;
    fn known_best(&self) -> Option<f64> {
        None
    }
    /// Fitness at `x`; `x.len()` always equals `domain().dim()` when called
    /// by the engine.
    fn value(&self, x: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dimension mismatch: expected {expected}, got {got}")]
pub struct DimensionError {
    pub expected: usize,
    pub got: usize,
}

/// Shift + rotation applied before the raw function: z = R (x - shift).
#[derive(Debug, Clone, PartialEq)]
pub struct TransformData {
    shift: Vec<f64>,
    rotation: Vec<Vec<f64>>,
}

impl TransformData {
    pub fn new(shift: Vec<f64>, rotation: Vec<Vec<f64>>) -> Result<Self, DimensionError> {
        let d = shift.len();
        if rotation.len() != d {
            return Err(DimensionError {
                expected: d,
                got: rotation.len(),
            });
        }
        for row in &rotation {
            if row.len() != d {
                return Err(DimensionError {
                    expected: d,
                    got: row.len(),
                });
            }
        }
        Ok(TransformData { shift, rotation })
    }

    pub fn identity(dim: usize) -> Self {
        let mut rotation = vec![vec![0.0; dim]; dim];
        for (r, row) in rotation.iter_mut().enumerate() {
            row[r] = 1.0;
        }
        TransformData {
            shift: vec![0.0; dim],
            rotation,
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = x.iter().zip(&self.shift).map(|(a, s)| a - s).collect();
        self.rotation
            .iter()
            .map(|row| row.iter().zip(&shifted).map(|(m, v)| m * v).sum())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum TransformLoadError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Reads a transform file: first line the shift vector, then `dimension`
/// rotation rows, all whitespace-separated decimals.
pub fn load_transform(path: &Path, dimension: usize) -> Result<TransformData, TransformLoadError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| TransformLoadError::Io {
        path: display.clone(),
        source,
    })?;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut vals = Vec::new();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| TransformLoadError::Parse {
                path: display.clone(),
                line: idx + 1,
                msg: format!("invalid number {tok:?}"),
            })?;
            vals.push(v);
        }
        rows.push((idx + 1, vals));
    }
    if rows.len() != dimension + 1 {
        return Err(TransformLoadError::Parse {
            path: display,
            line: rows.last().map_or(1, |(l, _)| *l),
            msg: format!(
                "expected a shift line plus {dimension} rotation rows, found {} data lines",
                rows.len()
            ),
        });
    }
    for (_, vals) in &rows {
        if vals.len() != dimension {
            return Err(DimensionError {
                expected: dimension,
                got: vals.len(),
            }
            .into());
        }
    }
    let mut it = rows.into_iter().map(|(_, v)| v);
    let shift = it.next().unwrap();
    Ok(TransformData::new(shift, it.collect())?)
}

/// A registered benchmark function with its search box, additive bias, and
/// optional transform.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    name: String,
    kind: FunctionKind,
    domain: BoundedDomain,
    bias: f64,
    transform: Option<TransformData>,
    known_best: Option<f64>,
    scalable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("objective {name} has a fixed dimension of {dim}")]
pub struct FixedDimensionError {
    pub name: String,
    pub dim: usize,
}

impl ObjectiveSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, DimensionError> {
        if x.len() != self.dim() {
            return Err(DimensionError {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let v = match &self.transform {
            Some(t) => self.kind.raw(&t.apply(x)),
            None => self.kind.raw(x),
        };
        Ok(self.bias + v)
    }

    pub fn with_transform(mut self, t: TransformData) -> Result<Self, DimensionError> {
        if t.dim() != self.dim() {
            return Err(DimensionError {
                expected: self.dim(),
                got: t.dim(),
            });
        }
        self.transform = Some(t);
        Ok(self)
    }

    /// Rebuilds a scalable function at another dimension, keeping its
    /// half-width. The fixed-dimension CEC-style entries refuse.
    pub fn with_dimension(mut self, dim: usize) -> Result<Self, FixedDimensionError> {
        if !self.scalable {
            return Err(FixedDimensionError {
                name: self.name.clone(),
                dim: self.dim(),
            });
        }
        assert!(dim > 0);
        let half = self.domain.upper()[0];
        self.domain = BoundedDomain::symmetric(dim, half);
        self.transform = None;
        Ok(self)
    }
}

impl Objective for ObjectiveSpec {
    fn label(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> &BoundedDomain {
        &self.domain
    }

    fn known_best(&self) -> Option<f64> {
        self.known_best
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x).expect("dimension checked at setup")
    }
}

pub const REGISTRY_NAMES: [&str; 19] = [
    "F1",
    "F2",
    "F3",
    "F4",
    "F5",
    "F6",
    "F7",
    "F8",
    "F9",
    "F10",
    "sphere",
    "rosenbrock",
    "rastrigin",
    "griewank",
    "ackley",
    "weierstrass",
    "modified_schwefel",
    "expanded_schaffer_f6",
    "happy_cat",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown objective {name:?}; valid names: {}", REGISTRY_NAMES.join(", "))]
pub struct UnknownObjectiveError {
    pub name: String,
}

fn spec(
    name: &str,
    kind: FunctionKind,
    dim: usize,
    half_width: f64,
    bias: f64,
    known_best: Option<f64>,
    scalable: bool,
) -> ObjectiveSpec {
    ObjectiveSpec {
        name: name.to_string(),
        kind,
        domain: BoundedDomain::symmetric(dim, half_width),
        bias,
        transform: None,
        known_best,
        scalable,
    }
}

/// Looks up a benchmark function by name (case-insensitive; hyphens and
/// underscores interchangeable).
pub fn registry_lookup(name: &str) -> Result<ObjectiveSpec, UnknownObjectiveError> {
    use FunctionKind::*;
    let norm = name.trim().to_ascii_lowercase().replace('-', "_");
    Ok(match norm.as_str() {
        "f1" => spec("F1", ChebyshevFit, 9, 8192.0, 1.0, Some(1.0), false),
        "f2" => spec("F2", InverseHilbert, 16, 16384.0, 1.0, Some(1.0), false),
        "f3" => spec("F3", LennardJones, 18, 4.0, 1.0, Some(12.7024), false),
        "f4" => spec("F4", Rastrigin, 10, 100.0, 1.0, Some(1.0), false),
        "f5" => spec("F5", Griewank, 10, 100.0, 1.0, Some(1.0), false),
        "f6" => spec("F6", Weierstrass, 10, 100.0, 1.0, Some(1.0), false),
        "f7" => spec("F7", ModifiedSchwefel, 10, 100.0, 1.0, Some(1.0), false),
        "f8" => spec("F8", ExpandedSchafferF6, 10, 100.0, 1.0, Some(1.0), false),
        "f9" => spec("F9", HappyCat, 10, 100.0, 1.0, Some(1.0), false),
        "f10" => spec("F10", Ackley, 10, 100.0, 1.0, Some(1.0), false),
        "sphere" => spec("sphere", Sphere, 10, 100.0, 0.0, Some(0.0), true),
        "rosenbrock" => spec("rosenbrock", Rosenbrock, 10, 30.0, 0.0, Some(0.0), true),
        "rastrigin" => spec("rastrigin", Rastrigin, 10, 5.12, 0.0, Some(0.0), true),
        "griewank" => spec("griewank", Griewank, 10, 600.0, 0.0, Some(0.0), true),
        "ackley" => spec("ackley", Ackley, 10, 32.768, 0.0, Some(0.0), true),
        "weierstrass" => spec("weierstrass", Weierstrass, 10, 0.5, 0.0, Some(0.0), true),
        "modified_schwefel" => spec("modified_schwefel", ModifiedSchwefel, 10, 100.0, 0.0, None, true),
        "expanded_schaffer_f6" => spec(
            "expanded_schaffer_f6",
            ExpandedSchafferF6,
            10,
            100.0,
            0.0,
            Some(0.0),
            true,
        ),
        "happy_cat" => spec("happy_cat", HappyCat, 10, 2.0, 0.0, Some(0.0), true),
        _ => {
            return Err(UnknownObjectiveError {
                name: name.to_string(),
            })
        }
    })
}
