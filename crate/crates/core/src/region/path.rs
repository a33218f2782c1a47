use thiserror::Error;

use super::Region;
use crate::model::{Guard, TimedAutomaton};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionState {
    pub location: usize,
    pub region: Region,
}

impl RegionState {
    pub fn new(location: usize, region: Region) -> Self {
        RegionState { location, region }
    }
}

/// One move of a region path: elapse time into a successor region, or take
/// an automaton edge (by index).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Delay(Region),
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("move {0} should be a delay")]
    ExpectedDelay(usize),
    #[error("move {0} should be an edge")]
    ExpectedEdge(usize),
    #[error("path ends with a delay")]
    TrailingDelay,
    #[error("move {0}: target is not a time-successor")]
    NotTimeSuccessor(usize),
    #[error("move {0}: no edge with index {1}")]
    UnknownEdge(usize, usize),
    #[error("move {0}: edge leaves from another location")]
    WrongSource(usize),
    #[error("move {0}: region does not satisfy the guard")]
    GuardFails(usize),
    #[error("step {0} does not start where step {} ends", .0 - 1)]
    Discontinuous(usize),
}

/// `(ℓ, r) →delay (ℓ, r′) →edge (ℓ′, r′[R := 0])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomicStep {
    pub source: RegionState,
    pub delay: Region,
    pub edge: usize,
    pub guard: Guard,
    pub resets: Vec<usize>,
    pub target: RegionState,
}

impl AtomicStep {
    pub fn new(a: &TimedAutomaton, source: RegionState, delay: Region, edge: usize) -> Result<Self, PathError> {
        Self::checked(a, source, delay, edge, 0)
    }

    fn checked(a: &TimedAutomaton, source: RegionState, delay: Region, edge: usize, at: usize) -> Result<Self, PathError> {
        if source.region.successor_distance(&delay, a.bound()).is_none() {
            return Err(PathError::NotTimeSuccessor(at));
        }
        let e = a.edges().get(edge).ok_or(PathError::UnknownEdge(at + 1, edge))?;
        if e.source != source.location {
            return Err(PathError::WrongSource(at + 1));
        }
        if !delay.satisfies(&e.guard) {
            return Err(PathError::GuardFails(at + 1));
        }
        let target = RegionState::new(e.target, delay.reset(&e.resets));
        Ok(AtomicStep { source, delay, edge, guard: e.guard.clone(), resets: e.resets.clone(), target })
    }

    /// A non-punctual guard is only taken from a non-punctual region.
    pub fn is_robust(&self) -> bool {
        self.guard.is_punctual() || !self.delay.is_punctual()
    }
}

/// A start state and alternating delay/edge moves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegionPath {
    pub start: RegionState,
    pub moves: Vec<Move>,
}

impl RegionPath {
    pub fn from_steps(start: RegionState, steps: &[AtomicStep]) -> RegionPath {
        let mut moves = Vec::with_capacity(2 * steps.len());
        for s in steps {
            moves.push(Move::Delay(s.delay.clone()));
            moves.push(Move::Edge(s.edge));
        }
        RegionPath { start, moves }
    }

    /// Checks well-formedness against `a` and splits into atomic steps.
    pub fn atomic_steps(&self, a: &TimedAutomaton) -> Result<Vec<AtomicStep>, PathError> {
        let mut out = Vec::new();
        let mut state = self.start.clone();
        let mut i = 0;
        while i < self.moves.len() {
            let Move::Delay(r) = &self.moves[i] else {
                return Err(PathError::ExpectedDelay(i));
            };
            let Some(next) = self.moves.get(i + 1) else {
                return Err(PathError::TrailingDelay);
            };
            let Move::Edge(e) = next else {
                return Err(PathError::ExpectedEdge(i + 1));
            };
            let step = AtomicStep::checked(a, state, r.clone(), *e, i)?;
            state = step.target.clone();
            out.push(step);
            i += 2;
        }
        Ok(out)
    }

    pub fn is_well_formed(&self, a: &TimedAutomaton) -> bool {
        self.atomic_steps(a).is_ok()
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &RegionPath, a: &TimedAutomaton) -> Result<RegionPath, PathError> {
        let steps = self.atomic_steps(a)?;
        let end = steps.last().map_or(&self.start, |s| &s.target);
        if *end != other.start {
            return Err(PathError::Discontinuous(steps.len()));
        }
        let mut moves = self.moves.clone();
        moves.extend(other.moves.iter().cloned());
        Ok(RegionPath { start: self.start.clone(), moves })
    }
}

/// Checks that consecutive steps chain up.
pub fn check_chain(steps: &[AtomicStep]) -> Result<(), PathError> {
    for (i, w) in steps.windows(2).enumerate() {
        if w[0].target != w[1].source {
            return Err(PathError::Discontinuous(i + 1));
        }
    }
    Ok(())
}

/// Every atomic step out of `state`; with `robust_only`, non-punctual guards
/// are only taken from non-punctual delay regions.
pub fn atomic_steps_from(a: &TimedAutomaton, state: &RegionState, robust_only: bool) -> Vec<AtomicStep> {
    let mut out = Vec::new();
    for r in state.region.time_successors(a.bound()) {
        for (idx, e) in a.edges_from(state.location) {
            if !r.satisfies(&e.guard) {
                continue;
            }
            let step = AtomicStep {
                source: state.clone(),
                delay: r.clone(),
                edge: idx,
                guard: e.guard.clone(),
                resets: e.resets.clone(),
                target: RegionState::new(e.target, r.reset(&e.resets)),
            };
            if !robust_only || step.is_robust() {
                out.push(step);
            }
        }
    }
    out
}
