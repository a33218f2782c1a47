use std::collections::{HashMap, VecDeque};

use super::{Region, RegionState};
use crate::model::TimedAutomaton;

/// Reachable part of the region automaton.
#[derive(Clone, Debug)]
pub struct RegionGraph {
    pub states: Vec<RegionState>,
    pub initial: Vec<usize>,
    /// `(from, to)` for every time-successor, the trivial one included.
    pub delays: Vec<(usize, usize)>,
    /// `(from, edge index, to)`.
    pub edges: Vec<(usize, usize, usize)>,
    index: HashMap<RegionState, usize>,
}

impl RegionGraph {
    pub fn index_of(&self, s: &RegionState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Initial region states: `(ℓ₀, 𝟘)`, or every region of `ℓ₀` inside the
/// initial constraint when one is given.
pub fn initial_states(a: &TimedAutomaton) -> Vec<RegionState> {
    match a.initial_constraint() {
        None => vec![RegionState::new(a.initial(), Region::origin(a.clock_count()))],
        Some(g) => Region::all(a.clock_count(), a.bound())
            .into_iter()
            .filter(|r| r.satisfies(g))
            .map(|r| RegionState::new(a.initial(), r))
            .collect(),
    }
}

pub fn build_region_automaton(a: &TimedAutomaton) -> RegionGraph {
    let mut g = RegionGraph {
        states: Vec::new(),
        initial: Vec::new(),
        delays: Vec::new(),
        edges: Vec::new(),
        index: HashMap::new(),
    };
    let mut queue = VecDeque::new();
    let intern = |g: &mut RegionGraph, s: RegionState, queue: &mut VecDeque<usize>| -> usize {
        if let Some(&i) = g.index.get(&s) {
            return i;
        }
        let i = g.states.len();
        g.index.insert(s.clone(), i);
        g.states.push(s);
        queue.push_back(i);
        i
    };
    for s in initial_states(a) {
        let i = intern(&mut g, s, &mut queue);
        g.initial.push(i);
    }
    while let Some(i) = queue.pop_front() {
        let s = g.states[i].clone();
        for r in s.region.time_successors(a.bound()) {
            let j = intern(&mut g, RegionState::new(s.location, r), &mut queue);
            g.delays.push((i, j));
        }
        for (e, edge) in a.edges_from(s.location) {
            if s.region.satisfies(&edge.guard) {
                let t = RegionState::new(edge.target, s.region.reset(&edge.resets));
                let j = intern(&mut g, t, &mut queue);
                g.edges.push((i, e, j));
            }
        }
    }
    g
}
