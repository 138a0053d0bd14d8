//! Cylindrical pressure-vessel design: minimize material cost over shell
//! thickness, head thickness, radius, and length, under four inequality
//! constraints handled by a static quadratic penalty.

use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::fdo::{optimize, FdoConfig};
use crate::objectives::{BoundedDomain, Objective};

/// Design vector [Ts, Th, R, L].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureVesselSolution {
    pub shell_thickness: f64,
    pub head_thickness: f64,
    pub radius: f64,
    pub length: f64,
}

impl PressureVesselSolution {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        PressureVesselSolution {
            shell_thickness: x1,
            head_thickness: x2,
            radius: x3,
            length: x4,
        }
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [
            self.shell_thickness,
            self.head_thickness,
            self.radius,
            self.length,
        ]
    }
}

/// Material, forming, and welding cost of the design.
pub fn vessel_cost(s: &PressureVesselSolution) -> f64 {
    let [x1, x2, x3, x4] = s.as_array();
    0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3 * x3 + 3.1661 * x1 * x1 * x4 + 19.84 * x1 * x1 * x3
}

/// g1..g4, feasible when every entry is <= 0: minimum shell and head
/// thickness for the radius, minimum enclosed volume, maximum length.
pub fn vessel_constraints(s: &PressureVesselSolution) -> [f64; 4] {
    use std::f64::consts::PI;
    let [x1, x2, x3, x4] = s.as_array();
    [
        -x1 + 0.0193 * x3,
        -x2 + 0.00954 * x3,
        -PI * x3 * x3 * x4 - (4.0 / 3.0) * PI * x3 * x3 * x3 + 1_296_000.0,
        x4 - 240.0,
    ]
}

/// The g2/g4 forms exactly as circulated in some formulations: g2 loses the
/// head-thickness variable (vacuous for any positive radius) and g4's sign
/// makes every admissible length infeasible. Kept for comparison only; the
/// optimizer always uses [`vessel_constraints`].
pub fn vessel_constraints_printed(s: &PressureVesselSolution) -> [f64; 4] {
    use std::f64::consts::PI;
    let [x1, _x2, x3, x4] = s.as_array();
    [
        -x1 + 0.0193 * x3,
        -x3 + 0.00954 * x3,
        -PI * x3 * x3 * x4 - (4.0 / 3.0) * PI * x3 * x3 * x3 + 1_296_000.0,
        x4 + 240.0,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltyConfig {
    pub lambda: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig { lambda: 1e6 }
    }
}

/// Cost plus lambda times the squared constraint violations.
pub fn vessel_penalized(s: &PressureVesselSolution, penalty: &PenaltyConfig) -> f64 {
    let violation: f64 = vessel_constraints(s)
        .iter()
        .map(|&g| g.max(0.0) * g.max(0.0))
        .sum();
    vessel_cost(s) + penalty.lambda * violation
}

/// Variable box: thicknesses in [0,99], radius and length in [10,200].
pub fn vessel_domain() -> BoundedDomain {
    BoundedDomain::new(vec![0.0, 0.0, 10.0, 10.0], vec![99.0, 99.0, 200.0, 200.0])
        .expect("static bounds")
}

/// The penalized problem as the optimizer sees it.
pub struct PressureVesselProblem {
    domain: BoundedDomain,
    penalty: PenaltyConfig,
}

impl PressureVesselProblem {
    pub fn new(penalty: PenaltyConfig) -> Self {
        PressureVesselProblem {
            domain: vessel_domain(),
            penalty,
        }
    }
}

impl Objective for PressureVesselProblem {
    fn label(&self) -> &str {
        "vessel"
    }

    fn domain(&self) -> &BoundedDomain {
        &self.domain
    }

    fn value(&self, x: &[f64]) -> f64 {
        vessel_penalized(&PressureVesselSolution::from_slice(x), &self.penalty)
    }
}

/// Best strictly feasible design seen by one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleBest {
    pub cost: f64,
    pub solution: PressureVesselSolution,
    pub constraints: [f64; 4],
}

/// Penalized problem that also remembers the cheapest design whose
/// constraints all hold, because the penalized argmin may sit a hair outside
/// the feasible set.
pub struct TrackedVessel {
    inner: PressureVesselProblem,
    best: Mutex<Option<FeasibleBest>>,
}

impl TrackedVessel {
    pub fn new(penalty: PenaltyConfig) -> Self {
        TrackedVessel {
            inner: PressureVesselProblem::new(penalty),
            best: Mutex::new(None),
        }
    }

    pub fn feasible_best(&self) -> Option<FeasibleBest> {
        *self.best.lock().unwrap()
    }
}

impl Objective for TrackedVessel {
    fn label(&self) -> &str {
        "vessel"
    }

    fn domain(&self) -> &BoundedDomain {
        self.inner.domain()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s = PressureVesselSolution::from_slice(x);
        let g = vessel_constraints(&s);
        if g.iter().all(|&v| v <= 0.0) {
            let cost = vessel_cost(&s);
            let mut best = self.best.lock().unwrap();
            if best.is_none_or(|b| cost < b.cost) {
                *best = Some(FeasibleBest {
                    cost,
                    solution: s,
                    constraints: g,
                });
            }
        }
        self.inner.value(x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VesselRunOutcome {
    pub seed: u64,
    pub penalized_best: f64,
    pub evaluations: usize,
    pub feasible: Option<FeasibleBest>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VesselCampaignReport {
    pub outcomes: Vec<VesselRunOutcome>,
    /// Cheapest feasible design over all runs.
    pub best: Option<FeasibleBest>,
}

/// Seeded multi-run campaign; run k uses base.seed + k and reports its best
/// feasible design.
pub fn vessel_campaign(base: &FdoConfig, runs: usize, lambda: f64) -> VesselCampaignReport {
    let outcomes: Vec<VesselRunOutcome> = (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let config = FdoConfig {
                seed: base.seed + k,
                ..base.clone()
            };
            let tracked = TrackedVessel::new(PenaltyConfig { lambda });
            let record = optimize(&config, &tracked);
            VesselRunOutcome {
                seed: config.seed,
                penalized_best: record.final_best_fitness,
                evaluations: record.evaluations,
                feasible: tracked.feasible_best(),
            }
        })
        .collect();
    let best = outcomes
        .iter()
        .filter_map(|o| o.feasible)
        .min_by(|a, b| a.cost.total_cmp(&b.cost));
    VesselCampaignReport { outcomes, best }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_examples() {
        let v = vessel_cost(&PressureVesselSolution::new(1.0, 1.0, 10.0, 10.0));
        assert!((v - 470.111).abs() < 1e-9, "{v}");
        assert_eq!(vessel_cost(&PressureVesselSolution::new(0.0, 0.0, 10.0, 10.0)), 0.0);
        // regression pin for the published solution tuple
        let v = vessel_cost(&PressureVesselSolution::new(1.54, 6.10, 30.58, 73.29));
        assert!((v - 14280.242981791596).abs() < 1e-6, "{v}");
    }

    #[test]
    fn constraint_examples() {
        let g = vessel_constraints(&PressureVesselSolution::new(1.54, 6.10, 30.58, 73.29));
        assert!((g[0] - -0.949806).abs() < 1e-6);
        // the published tuple violates the volume constraint by a wide margin
        assert!(g[2] > 9e5, "{}", g[2]);

        let g = vessel_constraints(&PressureVesselSolution::new(1.0, 1.0, 100.0, 241.0));
        assert_eq!(g[3], 1.0);

        let g = vessel_constraints(&PressureVesselSolution::new(3.0, 3.0, 100.0, 200.0));
        assert!(g[2] < -9e6);
    }

    #[test]
    fn printed_forms_are_degenerate() {
        for x3 in [10.0, 100.0, 200.0] {
            let s = PressureVesselSolution::new(1.0, 0.0, x3, 50.0);
            let printed = vessel_constraints_printed(&s);
            assert!(printed[1] < 0.0, "printed g2 never binds");
            assert!(printed[3] > 0.0, "printed g4 always infeasible");
        }
        // the corrected g2 binds when the head is too thin
        let g = vessel_constraints(&PressureVesselSolution::new(1.0, 0.1, 30.0, 50.0));
        assert!(g[1] > 0.0);
    }

    #[test]
    fn penalty_structure() {
        let penalty = PenaltyConfig { lambda: 1e6 };
        let feasible = PressureVesselSolution::new(3.0, 3.0, 100.0, 200.0);
        assert!(vessel_constraints(&feasible).iter().all(|&g| g <= 0.0));
        assert_eq!(vessel_penalized(&feasible, &penalty), vessel_cost(&feasible));

        let long = PressureVesselSolution::new(3.0, 3.0, 100.0, 241.0);
        assert_eq!(
            vessel_penalized(&long, &penalty),
            vessel_cost(&long) + 1e6
        );
        assert!(vessel_penalized(&long, &penalty) >= vessel_cost(&long));
    }

    #[test]
    fn tracker_records_only_feasible_designs() {
        let t = TrackedVessel::new(PenaltyConfig::default());
        t.value(&[3.0, 3.0, 100.0, 241.0]); // infeasible
        assert!(t.feasible_best().is_none());
        t.value(&[3.0, 3.0, 100.0, 200.0]);
        let b = t.feasible_best().unwrap();
        assert!(b.constraints.iter().all(|&g| g <= 0.0));
        // a worse feasible point does not displace the record
        t.value(&[9.0, 9.0, 100.0, 200.0]);
        assert_eq!(t.feasible_best().unwrap().cost, b.cost);
    }

    #[test]
    fn campaign_smoke() {
        use crate::chaos::MapKind;
        let base = FdoConfig::cfdo(MapKind::Singer, 10, 50, 7);
        let report = vessel_campaign(&base, 3, 1e6);
        assert_eq!(report.outcomes.len(), 3);
        assert_eq!(report.outcomes[0].seed, 7);
        for o in &report.outcomes {
            if let Some(f) = &o.feasible {
                assert!(f.constraints.iter().all(|&g| g <= 0.0));
                assert!(f.cost > 0.0);
            }
        }
    }
}
