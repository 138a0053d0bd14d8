//! The search core: scout-bee population, fitness-weight pace rules,
//! boundary amendment, and the accept/retry step loop. The chaotic variant
//! differs from the baseline only in which streams feed it.

use serde::Serialize;
use thiserror::Error;

use crate::chaos::MapKind;
use crate::objectives::{BoundedDomain, Objective};
use crate::stream::{ChaoticStream, LevyStream, RandStream, UniformStream};

pub const DEFAULT_LEVY_BETA: f64 = 1.5;

/// Where the pace randomness r comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandSource {
    Levy { beta: f64 },
    Chaotic(MapKind),
}

/// Where the population-initialization draws come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitSource {
    Uniform,
    Chaotic(MapKind),
}

/// Repair rule for candidates that leave the search box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    #[default]
    Redraw,
    Clamp,
}

impl std::fmt::Display for BoundaryPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryPolicy::Redraw => "redraw",
            BoundaryPolicy::Clamp => "clamp",
        })
    }
}

impl std::str::FromStr for BoundaryPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "redraw" => Ok(BoundaryPolicy::Redraw),
            "clamp" => Ok(BoundaryPolicy::Clamp),
            other => Err(format!("unknown boundary policy {other:?}; use redraw or clamp")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdoConfig {
    pub population: usize,
    pub iterations: usize,
    /// Weight factor subtracted inside the fitness weight, in [0,1].
    pub wf: f64,
    pub random_source: RandSource,
    pub init_source: InitSource,
    pub boundary_policy: BoundaryPolicy,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvalidConfigError {
    #[error("population must be at least 1")]
    ZeroPopulation,
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("wf must lie in [0,1], got {0}")]
    WfOutOfRange(f64),
    #[error("levy beta must lie in (0,2], got {0}")]
    BadBeta(f64),
}

impl FdoConfig {
    /// Baseline configuration: uniform init, Levy-flight r.
    pub fn fdo(population: usize, iterations: usize, seed: u64) -> Self {
        FdoConfig {
            population,
            iterations,
            wf: 0.0,
            random_source: RandSource::Levy { beta: DEFAULT_LEVY_BETA },
            init_source: InitSource::Uniform,
            boundary_policy: BoundaryPolicy::Redraw,
            seed,
        }
    }

    /// Chaotic variant: one map drives both init and r.
    pub fn cfdo(map: MapKind, population: usize, iterations: usize, seed: u64) -> Self {
        FdoConfig {
            random_source: RandSource::Chaotic(map),
            init_source: InitSource::Chaotic(map),
            ..Self::fdo(population, iterations, seed)
        }
    }

    pub fn validate(&self) -> Result<(), InvalidConfigError> {
        if self.population == 0 {
            return Err(InvalidConfigError::ZeroPopulation);
        }
        if self.iterations == 0 {
            return Err(InvalidConfigError::ZeroIterations);
        }
        if !(0.0..=1.0).contains(&self.wf) {
            return Err(InvalidConfigError::WfOutOfRange(self.wf));
        }
        if let RandSource::Levy { beta } = self.random_source {
            if !(beta > 0.0 && beta <= 2.0) {
                return Err(InvalidConfigError::BadBeta(beta));
            }
        }
        Ok(())
    }
}

/// The per-run randomness supply. When init and pace share one source (the
/// baseline's single RNG, or the chaotic variant's single map) they consume
/// one generator in program order; otherwise each side has its own.
pub enum RunStreams {
    Shared(Box<dyn RandStream>),
    Split {
        unit: Box<dyn RandStream>,
        signed: Box<dyn RandStream>,
    },
}

impl RunStreams {
    pub fn from_config(config: &FdoConfig) -> Self {
        // offsets chaotic orbits per seed; bounded so startup stays cheap
        let warm = (config.seed % 2048) as usize;
        match (config.init_source, config.random_source) {
            (InitSource::Uniform, RandSource::Levy { beta }) => {
                RunStreams::Shared(Box::new(LevyStream::new(config.seed, beta)))
            }
            (InitSource::Chaotic(a), RandSource::Chaotic(b)) if a == b => {
                RunStreams::Shared(Box::new(ChaoticStream::new(a, warm)))
            }
            (init, rand) => RunStreams::Split {
                unit: match init {
                    InitSource::Uniform => Box::new(UniformStream::with_stream(config.seed, 0)),
                    InitSource::Chaotic(m) => Box::new(ChaoticStream::new(m, warm)),
                },
                signed: match rand {
                    RandSource::Levy { beta } => {
                        Box::new(LevyStream::with_stream(config.seed, 1, beta))
                    }
                    RandSource::Chaotic(m) => Box::new(ChaoticStream::new(m, warm)),
                },
            },
        }
    }
}

impl RandStream for RunStreams {
    fn unit(&mut self) -> f64 {
        match self {
            RunStreams::Shared(s) => s.unit(),
            RunStreams::Split { unit, .. } => unit.unit(),
        }
    }

    fn signed(&mut self) -> f64 {
        match self {
            RunStreams::Shared(s) => s.signed(),
            RunStreams::Split { signed, .. } => signed.signed(),
        }
    }
}

/// One search agent: where it is, how good that is, and the last movement it
/// accepted (zero before any acceptance).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoutBee {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub pace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SwarmState {
    pub bees: Vec<ScoutBee>,
    pub global_best_position: Vec<f64>,
    pub global_best_fitness: f64,
    pub iteration: usize,
    pub evaluations: usize,
}

/// Outcome of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    /// Global best after each iteration; non-increasing.
    pub trace: Vec<f64>,
    pub final_best_position: Vec<f64>,
    pub final_best_fitness: f64,
    pub evaluations: usize,
    pub seed: u64,
}

/// |best| / |current| - wf. Callers route current_fitness == 0 to the
/// full-random rule before consulting this.
pub fn fitness_weight(best_fitness: f64, current_fitness: f64, wf: f64) -> f64 {
    best_fitness.abs() / current_fitness.abs() - wf
}

/// Which movement rule a bee takes this step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PaceRoute {
    /// Every coordinate scaled by its own signed draw.
    FullRandom,
    /// Toward the global best, scaled by a negative draw.
    TowardBest { r: f64 },
    /// Toward the global best, scaled by the fitness weight.
    TowardBestByWeight,
}

/// Total router: a fitness weight strictly inside (0,1) with nonzero fitness
/// draws one scalar whose sign picks between the two directed rules;
/// everything else (0, 1, out-of-range, non-finite, zero fitness) takes the
/// full-random rule.
pub fn select_route(fw: f64, current_fitness: f64, rand: &mut dyn RandStream) -> PaceRoute {
    if fw > 0.0 && fw < 1.0 && current_fitness != 0.0 {
        let r = rand.signed();
        if r < 0.0 {
            PaceRoute::TowardBest { r }
        } else {
            PaceRoute::TowardBestByWeight
        }
    } else {
        PaceRoute::FullRandom
    }
}

pub fn compute_pace(
    bee: &ScoutBee,
    best_position: &[f64],
    fw: f64,
    rand: &mut dyn RandStream,
) -> Vec<f64> {
    match select_route(fw, bee.fitness, rand) {
        PaceRoute::FullRandom => bee.position.iter().map(|p| p * rand.signed()).collect(),
        PaceRoute::TowardBest { r } => best_position
            .iter()
            .zip(&bee.position)
            .map(|(b, p)| (b - p) * r)
            .collect(),
        PaceRoute::TowardBestByWeight => best_position
            .iter()
            .zip(&bee.position)
            .map(|(b, p)| (b - p) * fw)
            .collect(),
    }
}

/// Repairs out-of-box coordinates in place; in-bounds coordinates are
/// untouched. Redraw consumes one unit draw per violated coordinate.
pub fn amend(
    position: &mut [f64],
    domain: &BoundedDomain,
    rand: &mut dyn RandStream,
    policy: BoundaryPolicy,
) {
    let (lo, hi) = (domain.lower(), domain.upper());
    for (d, x) in position.iter_mut().enumerate() {
        if *x < lo[d] || *x > hi[d] {
            *x = match policy {
                BoundaryPolicy::Redraw => lo[d] + rand.unit() * (hi[d] - lo[d]),
                BoundaryPolicy::Clamp => x.clamp(lo[d], hi[d]),
            };
        }
    }
}

/// Spreads the population over the box with the configured unit stream,
/// evaluates everyone, and seeds the global best.
pub fn init_population(
    config: &FdoConfig,
    domain: &BoundedDomain,
    objective: &dyn Objective,
    streams: &mut dyn RandStream,
) -> SwarmState {
    let dim = domain.dim();
    let (lo, hi) = (domain.lower(), domain.upper());
    let mut bees = Vec::with_capacity(config.population);
    let mut best_fitness = f64::INFINITY;
    let mut best_position = vec![0.0; dim];
    for _ in 0..config.population {
        let position: Vec<f64> = (0..dim)
            .map(|d| lo[d] + streams.unit() * (hi[d] - lo[d]))
            .collect();
        let fitness = objective.value(&position);
        if fitness < best_fitness {
            best_fitness = fitness;
            best_position = position.clone();
        }
        bees.push(ScoutBee {
            position,
            fitness,
            pace: vec![0.0; dim],
        });
    }
    SwarmState {
        bees,
        global_best_position: best_position,
        global_best_fitness: best_fitness,
        iteration: 0,
        evaluations: config.population,
    }
}

fn accept(bee: &mut ScoutBee, position: Vec<f64>, fitness: f64) {
    bee.pace = position
        .iter()
        .zip(&bee.position)
        .map(|(new, old)| new - old)
        .collect();
    bee.position = position;
    bee.fitness = fitness;
}

/// One pass over the swarm: each bee proposes position + pace, falls back to
/// replaying its last accepted pace, and otherwise stays put. The global
/// best refreshes inside the loop, so later bees see earlier improvements.
pub fn step(
    state: &mut SwarmState,
    config: &FdoConfig,
    domain: &BoundedDomain,
    objective: &dyn Objective,
    streams: &mut dyn RandStream,
) {
    for i in 0..state.bees.len() {
        let fw = if state.bees[i].fitness == 0.0 {
            0.0
        } else {
            fitness_weight(state.global_best_fitness, state.bees[i].fitness, config.wf)
        };
        let pace = compute_pace(&state.bees[i], &state.global_best_position, fw, streams);
        let mut candidate: Vec<f64> = state.bees[i]
            .position
            .iter()
            .zip(&pace)
            .map(|(p, q)| p + q)
            .collect();
        amend(&mut candidate, domain, streams, config.boundary_policy);
        let candidate_fitness = objective.value(&candidate);
        state.evaluations += 1;

        let mut accepted = false;
        if candidate_fitness < state.bees[i].fitness {
            accept(&mut state.bees[i], candidate, candidate_fitness);
            accepted = true;
        } else {
            let mut retry: Vec<f64> = state.bees[i]
                .position
                .iter()
                .zip(&state.bees[i].pace)
                .map(|(p, q)| p + q)
                .collect();
            amend(&mut retry, domain, streams, config.boundary_policy);
            let retry_fitness = objective.value(&retry);
            state.evaluations += 1;
            if retry_fitness < state.bees[i].fitness {
                accept(&mut state.bees[i], retry, retry_fitness);
                accepted = true;
            }
        }

        if accepted && state.bees[i].fitness < state.global_best_fitness {
            state.global_best_fitness = state.bees[i].fitness;
            state.global_best_position = state.bees[i].position.clone();
        }
    }
    state.iteration += 1;
}

/// Full run: init, `iterations` steps, best-so-far trace. A pure function of
/// (config, objective).
pub fn optimize(config: &FdoConfig, objective: &dyn Objective) -> RunRecord {
    if let Err(e) = config.validate() {
        panic!("invalid optimizer config: {e}");
    }
    let domain = objective.domain().clone();
    let mut streams = RunStreams::from_config(config);
    let mut state = init_population(config, &domain, objective, &mut streams);
    let mut trace = Vec::with_capacity(config.iterations);
    for _ in 0..config.iterations {
        step(&mut state, config, &domain, objective, &mut streams);
        trace.push(state.global_best_fitness);
    }
    RunRecord {
        trace,
        final_best_position: state.global_best_position,
        final_best_fitness: state.global_best_fitness,
        evaluations: state.evaluations,
        seed: config.seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::registry_lookup;

    /// Replays a fixed script of draws for both unit and signed requests.
    struct Scripted {
        vals: Vec<f64>,
        i: usize,
    }

    impl Scripted {
        fn new(vals: &[f64]) -> Self {
            Scripted {
                vals: vals.to_vec(),
                i: 0,
            }
        }
    }

    impl RandStream for Scripted {
        fn unit(&mut self) -> f64 {
            self.signed()
        }

        fn signed(&mut self) -> f64 {
            let v = self.vals[self.i % self.vals.len()];
            self.i += 1;
            v
        }
    }

    fn bee(position: &[f64], fitness: f64) -> ScoutBee {
        ScoutBee {
            position: position.to_vec(),
            fitness,
            pace: vec![0.0; position.len()],
        }
    }

    #[test]
    fn fitness_weight_examples() {
        assert_eq!(fitness_weight(2.0, 4.0, 0.0), 0.5);
        assert_eq!(fitness_weight(3.0, 3.0, 0.0), 1.0);
        assert_eq!(fitness_weight(2.0, 4.0, 1.0), -0.5);
        assert_eq!(fitness_weight(-2.0, 4.0, 0.0), 0.5);
    }

    #[test]
    fn route_selection_is_total() {
        let cases: &[(f64, f64, bool)] = &[
            // (fw, fitness, expect full-random)
            (0.0, 5.0, true),
            (1.0, 5.0, true),
            (0.5, 0.0, true),
            (-0.3, 5.0, true),
            (1.7, 5.0, true),
            (f64::INFINITY, 5.0, true),
            (f64::NAN, 5.0, true),
            (0.5, 5.0, false),
            (1e-12, 5.0, false),
        ];
        for &(fw, fit, full) in cases {
            let mut s = Scripted::new(&[0.4]);
            let route = select_route(fw, fit, &mut s);
            assert_eq!(
                matches!(route, PaceRoute::FullRandom),
                full,
                "fw={fw} fitness={fit}"
            );
        }
    }

    #[test]
    fn identity_fitness_ratio_routes_to_full_random() {
        let fw = fitness_weight(3.7, 3.7, 0.0);
        assert_eq!(fw, 1.0);
        let mut s = Scripted::new(&[-0.9]);
        assert_eq!(select_route(fw, 3.7, &mut s), PaceRoute::FullRandom);
        // the scalar draw was never consumed
        assert_eq!(s.i, 0);
    }

    #[test]
    fn full_random_pace_scales_each_coordinate() {
        let b = bee(&[1.0, 2.0], 3.0);
        let mut s = Scripted::new(&[0.5, 0.5]);
        assert_eq!(compute_pace(&b, &[9.0, 9.0], 1.0, &mut s), vec![0.5, 1.0]);
    }

    #[test]
    fn weighted_pace_follows_the_distance() {
        let b = bee(&[1.0, 2.0], 3.0);
        // positive draw keeps the weighted rule
        let mut s = Scripted::new(&[0.3]);
        assert_eq!(
            compute_pace(&b, &[3.0, 3.0], 0.25, &mut s),
            vec![0.5, 0.25]
        );
    }

    #[test]
    fn negative_draw_takes_the_scaled_distance() {
        let b = bee(&[1.0, 2.0], 3.0);
        let mut s = Scripted::new(&[-0.5]);
        assert_eq!(
            compute_pace(&b, &[3.0, 3.0], 0.25, &mut s),
            vec![-1.0, -0.5]
        );
    }

    #[test]
    fn amend_examples() {
        let domain = BoundedDomain::symmetric(2, 100.0);
        let mut clamped = [150.0, 50.0];
        amend(&mut clamped, &domain, &mut Scripted::new(&[0.9]), BoundaryPolicy::Clamp);
        assert_eq!(clamped, [100.0, 50.0]);

        let mut redrawn = [150.0, 50.0];
        amend(&mut redrawn, &domain, &mut Scripted::new(&[0.25]), BoundaryPolicy::Redraw);
        assert_eq!(redrawn, [-50.0, 50.0]);

        let mut inside = [1.0, -2.0];
        amend(&mut inside, &domain, &mut Scripted::new(&[0.25]), BoundaryPolicy::Clamp);
        assert_eq!(inside, [1.0, -2.0]);
    }

    #[test]
    fn chaotic_init_positions_follow_the_map() {
        let sphere = registry_lookup("sphere").unwrap().with_dimension(1).unwrap();
        let config = FdoConfig::cfdo(MapKind::Logistic, 2, 1, 0);
        let mut streams = RunStreams::from_config(&config);
        let state = init_population(&config, sphere.domain(), &sphere, &mut streams);
        assert!((state.bees[0].position[0] - 68.0).abs() < 1e-9);
        assert!((state.bees[1].position[0] - 7.52).abs() < 1e-9);
        assert_eq!(state.evaluations, 2);
        let min = state.bees.iter().map(|b| b.fitness).fold(f64::INFINITY, f64::min);
        assert_eq!(state.global_best_fitness, min);
        assert!(state.bees.iter().all(|b| b.pace == vec![0.0]));
    }

    #[test]
    fn bee_at_exact_optimum_never_moves() {
        let sphere = registry_lookup("sphere").unwrap().with_dimension(2).unwrap();
        let config = FdoConfig::fdo(1, 1, 7);
        let mut state = SwarmState {
            bees: vec![bee(&[0.0, 0.0], 0.0)],
            global_best_position: vec![0.0, 0.0],
            global_best_fitness: 0.0,
            iteration: 0,
            evaluations: 1,
        };
        let mut streams = RunStreams::from_config(&config);
        for _ in 0..5 {
            step(&mut state, &config, sphere.domain(), &sphere, &mut streams);
        }
        assert_eq!(state.bees[0].position, vec![0.0, 0.0]);
        assert_eq!(state.global_best_fitness, 0.0);
        // rejected candidate plus rejected retry, every step
        assert_eq!(state.evaluations, 1 + 5 * 2);
    }

    #[test]
    fn single_bee_step_costs_at_most_two_evaluations() {
        let sphere = registry_lookup("sphere").unwrap().with_dimension(3).unwrap();
        let config = FdoConfig::fdo(1, 1, 3);
        let mut streams = RunStreams::from_config(&config);
        let mut state = init_population(&config, sphere.domain(), &sphere, &mut streams);
        for _ in 0..20 {
            let before = state.evaluations;
            step(&mut state, &config, sphere.domain(), &sphere, &mut streams);
            let spent = state.evaluations - before;
            assert!(spent == 1 || spent == 2, "spent {spent}");
        }
    }

    #[test]
    fn optimize_is_deterministic_and_monotone() {
        let sphere = registry_lookup("sphere").unwrap();
        for config in [
            FdoConfig::fdo(10, 40, 42),
            FdoConfig::cfdo(MapKind::Singer, 10, 40, 42),
        ] {
            let a = optimize(&config, &sphere);
            let b = optimize(&config, &sphere);
            assert_eq!(a, b);
            assert_eq!(a.trace.len(), 40);
            assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(a.final_best_fitness, *a.trace.last().unwrap());
            assert!(sphere.domain().contains(&a.final_best_position));
        }
    }

    #[test]
    fn seeds_change_chaotic_runs() {
        let sphere = registry_lookup("sphere").unwrap();
        let a = optimize(&FdoConfig::cfdo(MapKind::Singer, 8, 20, 100), &sphere);
        let b = optimize(&FdoConfig::cfdo(MapKind::Singer, 8, 20, 101), &sphere);
        assert!(a.trace != b.trace);
    }

    #[test]
    fn positions_respect_bounds_under_both_policies() {
        let rastrigin = registry_lookup("rastrigin").unwrap();
        for policy in [BoundaryPolicy::Redraw, BoundaryPolicy::Clamp] {
            let config = FdoConfig {
                boundary_policy: policy,
                ..FdoConfig::cfdo(MapKind::Tent, 12, 1, 5)
            };
            let mut streams = RunStreams::from_config(&config);
            let mut state =
                init_population(&config, rastrigin.domain(), &rastrigin, &mut streams);
            for _ in 0..30 {
                step(&mut state, &config, rastrigin.domain(), &rastrigin, &mut streams);
                for b in &state.bees {
                    assert!(rastrigin.domain().contains(&b.position), "{policy:?}");
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(FdoConfig::fdo(30, 50, 0).validate().is_ok());
        assert_eq!(
            FdoConfig::fdo(0, 50, 0).validate(),
            Err(InvalidConfigError::ZeroPopulation)
        );
        assert_eq!(
            FdoConfig::fdo(30, 0, 0).validate(),
            Err(InvalidConfigError::ZeroIterations)
        );
        let mut c = FdoConfig::fdo(30, 50, 0);
        c.wf = 1.5;
        assert_eq!(c.validate(), Err(InvalidConfigError::WfOutOfRange(1.5)));
        let mut c = FdoConfig::fdo(30, 50, 0);
        c.random_source = RandSource::Levy { beta: 2.5 };
        assert_eq!(c.validate(), Err(InvalidConfigError::BadBeta(2.5)));
    }

    #[test]
    fn evaluation_accounting_matches_the_counter() {
        let sphere = registry_lookup("sphere").unwrap();
        let config = FdoConfig::fdo(7, 13, 2);
        let record = optimize(&config, &sphere);
        let lo = 7 + 13 * 7; // every step accepted first try
        let hi = 7 + 13 * 7 * 2; // every step retried
        assert!(record.evaluations >= lo && record.evaluations <= hi);
    }
}
