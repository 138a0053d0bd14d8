//! Task assignment: n tasks to n employees, one each, minimizing total
//! execution cost. The continuous optimizer drives it through random-key
//! decoding; a brute-force enumerator provides the exact answer for small n.

use std::fs;
use std::path::Path;

use itertools::Itertools;
use thiserror::Error;

use crate::objectives::{BoundedDomain, Objective};

pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Square cost matrix: costs[task][employee].
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentInstance {
    costs: Vec<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("cost matrix must be square and nonempty: {msg}")]
    Shape { msg: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl AssignmentInstance {
    pub fn new(costs: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        let n = costs.len();
        if n == 0 {
            return Err(InstanceError::Shape {
                msg: "no rows".into(),
            });
        }
        for (i, row) in costs.iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::Shape {
                    msg: format!("row {} has {} entries, expected {n}", i + 1, row.len()),
                });
            }
        }
        Ok(AssignmentInstance { costs })
    }

    /// Parses "first line n, then n rows of n costs".
    pub fn parse(text: &str, source: &str) -> Result<Self, InstanceError> {
        let parse_err = |line: usize, msg: String| InstanceError::Parse {
            path: source.to_string(),
            line,
            msg,
        };
        let mut rows: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        if rows.is_empty() {
            return Err(parse_err(1, "empty file".into()));
        }
        let (head_line, head) = rows.remove(0);
        let n: usize = head
            .trim()
            .parse()
            .map_err(|_| parse_err(head_line, format!("expected the size n, got {head:?}")))?;
        if n == 0 {
            return Err(parse_err(head_line, "n must be positive".into()));
        }
        if rows.len() != n {
            return Err(parse_err(
                rows.last().map_or(head_line, |(l, _)| *l),
                format!("expected {n} cost rows, found {}", rows.len()),
            ));
        }
        let mut costs = Vec::with_capacity(n);
        for (line_no, line) in rows {
            let mut row = Vec::with_capacity(n);
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("invalid cost {tok:?}")))?;
                row.push(v);
            }
            if row.len() != n {
                return Err(parse_err(
                    line_no,
                    format!("expected {n} costs, found {}", row.len()),
                ));
            }
            costs.push(row);
        }
        Self::new(costs)
    }

    pub fn from_file(path: &Path) -> Result<Self, InstanceError> {
        let display = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: display.clone(),
            source,
        })?;
        Self::parse(&text, &display)
    }

    /// The five-task instance bundled with the crate. Its exact optimum is
    /// 111 with assignment [3,2,5,4,1] (brute force over all 120
    /// permutations); a circulating figure of 50 for this fixture lies below
    /// that optimum and is not achievable under these costs.
    pub fn bundled() -> Self {
        Self::parse(include_str!("../../fixtures/assignment5.txt"), "bundled")
            .expect("bundled fixture is well-formed")
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    /// Cost of giving `task` (1-based) to `employee` (1-based).
    pub fn cost(&self, task: usize, employee: usize) -> f64 {
        self.costs[task - 1][employee - 1]
    }
}

/// Random-key decoding: the k-th smallest key gets rank k+1, ties broken by
/// lower task index. Always a bijection on 1..=n.
pub fn decode_assignment(position: &[f64]) -> Vec<usize> {
    let n = position.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| position[a].total_cmp(&position[b]));
    let mut perm = vec![0usize; n];
    for (rank, &task) in order.iter().enumerate() {
        perm[task] = rank + 1;
    }
    perm
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a bijection on 1..={n}: {msg}")]
pub struct EncodingError {
    pub n: usize,
    pub msg: String,
}

/// Total cost of a 1-based permutation (task i -> employee perm[i-1]).
pub fn assignment_cost(perm: &[usize], instance: &AssignmentInstance) -> Result<f64, EncodingError> {
    let n = instance.n();
    if perm.len() != n {
        return Err(EncodingError {
            n,
            msg: format!("length {} != {n}", perm.len()),
        });
    }
    let mut seen = vec![false; n];
    for &e in perm {
        if e == 0 || e > n || seen[e - 1] {
            return Err(EncodingError {
                n,
                msg: format!("employee {e} repeated or out of range"),
            });
        }
        seen[e - 1] = true;
    }
    Ok(perm
        .iter()
        .enumerate()
        .map(|(task, &e)| instance.costs[task][e - 1])
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instance size {n} exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")]
pub struct SizeError {
    pub n: usize,
}

/// Exact minimizer by enumerating all n! permutations in lexicographic
/// order; ties keep the lexicographically smallest permutation.
pub fn brute_force_assignment(
    instance: &AssignmentInstance,
) -> Result<(Vec<usize>, f64), SizeError> {
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SizeError { n });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for perm in (1..=n).permutations(n) {
        let cost: f64 = perm
            .iter()
            .enumerate()
            .map(|(task, &e)| instance.costs[task][e - 1])
            .sum();
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((perm, cost));
        }
    }
    Ok(best.expect("n >= 1"))
}

/// The assignment instance as a continuous problem over [0,1]^n keys.
pub struct AssignmentProblem {
    instance: AssignmentInstance,
    domain: BoundedDomain,
}

impl AssignmentProblem {
    pub fn new(instance: AssignmentInstance) -> Self {
        let n = instance.n();
        let domain = BoundedDomain::new(vec![0.0; n], vec![1.0; n]).expect("n >= 1");
        AssignmentProblem { instance, domain }
    }

    pub fn instance(&self) -> &AssignmentInstance {
        &self.instance
    }
}

impl Objective for AssignmentProblem {
    fn label(&self) -> &str {
        "assignment"
    }

    fn domain(&self) -> &BoundedDomain {
        &self.domain
    }

    fn value(&self, x: &[f64]) -> f64 {
        let perm = decode_assignment(x);
        assignment_cost(&perm, &self.instance).expect("decoded keys form a bijection")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bundled_instance_matches_the_fixture_file() {
        let inst = AssignmentInstance::bundled();
        assert_eq!(inst.n(), 5);
        assert_eq!(inst.cost(1, 1), 45.0);
        assert_eq!(inst.cost(5, 5), 99.0);
        let path =
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/assignment5.txt");
        assert_eq!(AssignmentInstance::from_file(&path).unwrap(), inst);
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_assignment(&[0.9, 0.1, 0.5]), vec![3, 1, 2]);
        assert_eq!(decode_assignment(&[0.1, 0.5, 0.9]), vec![1, 2, 3]);
        assert_eq!(decode_assignment(&[0.4, 0.4, 0.4]), vec![1, 2, 3]);
    }

    #[test]
    fn cost_examples() {
        let inst = AssignmentInstance::bundled();
        assert_eq!(assignment_cost(&[3, 2, 5, 4, 1], &inst).unwrap(), 111.0);
        assert_eq!(assignment_cost(&[1, 2, 3, 4, 5], &inst).unwrap(), 263.0);
        let single = AssignmentInstance::new(vec![vec![7.0]]).unwrap();
        assert_eq!(assignment_cost(&[1], &single).unwrap(), 7.0);
    }

    #[test]
    fn cost_rejects_non_bijections() {
        let inst = AssignmentInstance::bundled();
        assert!(assignment_cost(&[1, 1, 2, 3, 4], &inst).is_err());
        assert!(assignment_cost(&[1, 2, 3, 4, 6], &inst).is_err());
        assert!(assignment_cost(&[1, 2, 3], &inst).is_err());
        assert!(assignment_cost(&[0, 1, 2, 3, 4], &inst).is_err());
    }

    #[test]
    fn brute_force_finds_the_known_optimum() {
        let inst = AssignmentInstance::bundled();
        let (perm, cost) = brute_force_assignment(&inst).unwrap();
        assert_eq!(cost, 111.0);
        assert_eq!(perm, vec![3, 2, 5, 4, 1]);
    }

    #[test]
    fn brute_force_small_cases() {
        let two = AssignmentInstance::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(brute_force_assignment(&two).unwrap(), (vec![1, 2], 2.0));
        // all-equal costs keep the lexicographically smallest permutation
        let flat = AssignmentInstance::new(vec![vec![4.0; 3]; 3]).unwrap();
        assert_eq!(brute_force_assignment(&flat).unwrap(), (vec![1, 2, 3], 12.0));
    }

    #[test]
    fn brute_force_size_limit() {
        let big = AssignmentInstance::new(vec![vec![1.0; 11]; 11]).unwrap();
        assert_eq!(brute_force_assignment(&big).unwrap_err(), SizeError { n: 11 });
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match AssignmentInstance::parse("2\n1 2\n3 x\n", "test") {
            Err(InstanceError::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains('x'));
            }
            other => panic!("{other:?}"),
        }
        assert!(AssignmentInstance::parse("2\n1 2\n", "test").is_err());
        assert!(AssignmentInstance::parse("", "test").is_err());
        assert!(AssignmentInstance::new(vec![vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn problem_evaluates_decoded_cost() {
        let p = AssignmentProblem::new(AssignmentInstance::bundled());
        assert_eq!(p.domain().dim(), 5);
        // keys sorted ascending decode to the identity
        assert_eq!(p.value(&[0.1, 0.2, 0.3, 0.4, 0.5]), 263.0);
    }

    proptest! {
        #[test]
        fn decode_is_always_a_bijection(keys in proptest::collection::vec(-1e6f64..1e6, 1..12)) {
            let perm = decode_assignment(&keys);
            let mut seen = vec![false; keys.len()];
            for e in perm {
                prop_assert!(e >= 1 && e <= keys.len());
                prop_assert!(!seen[e - 1]);
                seen[e - 1] = true;
            }
        }

        #[test]
        fn optimizer_costs_never_beat_brute_force(keys in proptest::collection::vec(0.0f64..1.0, 5)) {
            let inst = AssignmentInstance::bundled();
            let decoded = assignment_cost(&decode_assignment(&keys), &inst).unwrap();
            prop_assert!(decoded >= 111.0);
        }
    }
}
