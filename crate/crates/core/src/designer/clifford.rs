//! The single-qubit Clifford group generated by H and S.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{phase_aligned_distance, Unitary2};
use crate::metrics::gate_fidelity;

use super::schedule::PulseSchedule;
use super::st::{build_st_gate, StDesign, StGate};
use super::compose;

const SAME: f64 = 1e-9;
/// Exponent of the projective Clifford group (isomorphic to S₄).
pub const GROUP_EXPONENT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    H,
    S,
}

impl Generator {
    pub fn unitary(self) -> Unitary2 {
        match self {
            Generator::H => Unitary2::hadamard(),
            Generator::S => Unitary2::s_gate(),
        }
    }
}

pub fn word_string(word: &[Generator]) -> String {
    if word.is_empty() {
        return "I".into();
    }
    word.iter()
        .map(|g| match g {
            Generator::H => "H",
            Generator::S => "S",
        })
        .collect()
}

/// Unitary of a word applied left to right in time.
pub fn word_unitary(word: &[Generator]) -> Unitary2 {
    compose(&word.iter().map(|g| g.unitary()).collect::<Vec<_>>())
}

pub fn same_up_to_phase(a: &Unitary2, b: &Unitary2) -> bool {
    phase_aligned_distance(a.matrix(), b.matrix()) < SAME
}

fn position(set: &[Unitary2], u: &Unitary2) -> Option<usize> {
    set.iter().position(|v| same_up_to_phase(v, u))
}

/// Breadth-first enumeration of shortest {H, S} words, one per projective
/// class.
pub fn clifford_group() -> Vec<(Vec<Generator>, Unitary2)> {
    let mut found: Vec<(Vec<Generator>, Unitary2)> = vec![(Vec::new(), Unitary2::identity())];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in [Generator::H, Generator::S] {
            let u = g.unitary() * found[i].1;
            if !found.iter().any(|(_, v)| same_up_to_phase(v, &u)) {
                let mut word = found[i].0.clone();
                word.push(g);
                found.push((word, u));
                queue.push_back(found.len() - 1);
            }
        }
    }
    found
}

/// Number of ordered pairs whose product falls outside `set`.
pub fn closure_failures(set: &[Unitary2]) -> usize {
    let mut failures = 0;
    for a in set {
        for b in set {
            if position(set, &(*a * *b)).is_none() {
                failures += 1;
            }
        }
    }
    failures
}

/// Smallest k ≥ 1 with u^k ∝ I, up to `limit`.
pub fn projective_order(u: &Unitary2, limit: usize) -> Option<usize> {
    let mut power = *u;
    for k in 1..=limit {
        if same_up_to_phase(&power, &Unitary2::identity()) {
            return Some(k);
        }
        power = *u * power;
    }
    None
}

#[derive(Debug, Clone)]
pub struct CliffordEntry {
    pub word: Vec<Generator>,
    pub target: Unitary2,
    pub schedules: Vec<PulseSchedule>,
    pub achieved_numeric: Unitary2,
    pub fidelity_numeric: f64,
}

#[derive(Debug, Clone)]
pub struct CliffordTable {
    pub h: f64,
    pub entries: Vec<CliffordEntry>,
    pub hadamard: StDesign,
    pub phase: StDesign,
    /// Largest |J| at any schedule endpoint.
    pub max_endpoint: f64,
    /// Largest jump of J across consecutive schedules of any entry.
    pub max_seam_jump: f64,
}

impl CliffordTable {
    pub fn min_fidelity(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.fidelity_numeric)
            .fold(1.0, f64::min)
    }

    pub fn targets(&self) -> Vec<Unitary2> {
        self.entries.iter().map(|e| e.target).collect()
    }
}

fn seam_jump(schedules: &[PulseSchedule]) -> f64 {
    schedules
        .windows(2)
        .map(|w| (w[0].boundary_residuals().1 - w[1].boundary_residuals().0).abs())
        .fold(0.0, f64::max)
}

/// All 24 Clifford classes with schedule sequences built from the
/// calibrated H and S designs. Numeric unitaries compose the cached oracle
/// propagators of the two generators.
pub fn clifford_table(h: f64, steps: usize) -> Result<CliffordTable> {
    let (hadamard, phase) = rayon::join(
        || build_st_gate(StGate::Hadamard, h, steps),
        || build_st_gate(StGate::S, h, steps),
    );
    let (hadamard, phase) = (hadamard?, phase?);
    let numeric = |g: Generator| match g {
        Generator::H => hadamard.report.achieved_numeric,
        Generator::S => phase.report.achieved_numeric,
    };
    let mut entries = Vec::new();
    let mut max_endpoint: f64 = 0.0;
    let mut max_seam_jump: f64 = 0.0;
    for (word, target) in clifford_group() {
        let mut schedules = Vec::new();
        for g in &word {
            let design = match g {
                Generator::H => &hadamard,
                Generator::S => &phase,
            };
            schedules.extend(design.schedules.iter().cloned());
        }
        let achieved = compose(&word.iter().map(|&g| numeric(g)).collect::<Vec<_>>());
        for s in &schedules {
            let (a, b) = s.boundary_residuals();
            max_endpoint = max_endpoint.max(a.abs()).max(b.abs());
        }
        max_seam_jump = max_seam_jump.max(seam_jump(&schedules));
        entries.push(CliffordEntry {
            fidelity_numeric: gate_fidelity(target.matrix(), achieved.matrix())?.value,
            word,
            target,
            schedules,
            achieved_numeric: achieved,
        });
    }
    Ok(CliffordTable {
        h,
        entries,
        hadamard,
        phase,
        max_endpoint,
        max_seam_jump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_four_classes_closed() {
        let group = clifford_group();
        assert_eq!(group.len(), 24);
        let set: Vec<_> = group.iter().map(|g| g.1).collect();
        assert_eq!(closure_failures(&set), 0);
        for u in &set {
            let k = projective_order(u, 24).unwrap();
            assert_eq!(GROUP_EXPONENT % k, 0);
        }
    }

    #[test]
    fn small_relations() {
        let hh = word_unitary(&[Generator::H, Generator::H]);
        assert!(same_up_to_phase(&hh, &Unitary2::identity()));
        let s4 = word_unitary(&[Generator::S; 4]);
        assert!(same_up_to_phase(&s4, &Unitary2::identity()));
        assert!(!same_up_to_phase(&word_unitary(&[Generator::S; 2]), &Unitary2::identity()));
    }

    #[test]
    fn words_reproduce_targets() {
        for (word, u) in clifford_group() {
            assert!(same_up_to_phase(&word_unitary(&word), &u), "{}", word_string(&word));
        }
    }
}
