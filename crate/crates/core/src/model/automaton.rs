use std::fmt;

use thiserror::Error;

use super::{ClockSet, Guard, Punctuality};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub guard: Guard,
    /// Sorted, without duplicates.
    pub resets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("bound must be positive, got {0}")]
    BadBound(i64),
    #[error("no locations")]
    NoLocations,
    #[error("location `{0}` declared twice")]
    DuplicateLocation(String),
    #[error("location index {0} out of range")]
    UnknownLocation(usize),
    #[error("clock index {0} out of range")]
    UnknownClock(usize),
}

/// A bounded timed automaton with a Büchi condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    clocks: ClockSet,
    bound: i64,
    locations: Vec<String>,
    edges: Vec<Edge>,
    initial: usize,
    initial_constraint: Option<Guard>,
    buchi: Vec<bool>,
}

impl TimedAutomaton {
    pub fn new(
        clocks: ClockSet,
        bound: i64,
        locations: Vec<String>,
        mut edges: Vec<Edge>,
        initial: usize,
        initial_constraint: Option<Guard>,
        buchi: &[usize],
    ) -> Result<Self, AutomatonError> {
        if bound <= 0 {
            return Err(AutomatonError::BadBound(bound));
        }
        if locations.is_empty() {
            return Err(AutomatonError::NoLocations);
        }
        for (i, l) in locations.iter().enumerate() {
            if locations[..i].contains(l) {
                return Err(AutomatonError::DuplicateLocation(l.clone()));
            }
        }
        let n = locations.len();
        let check_loc = |l: usize| if l < n { Ok(()) } else { Err(AutomatonError::UnknownLocation(l)) };
        let check_guard = |g: &Guard| match g.atoms().iter().map(|a| a.max_clock()).max() {
            Some(c) if c >= clocks.len() => Err(AutomatonError::UnknownClock(c)),
            _ => Ok(()),
        };
        check_loc(initial)?;
        for e in &mut edges {
            check_loc(e.source)?;
            check_loc(e.target)?;
            check_guard(&e.guard)?;
            e.resets.sort_unstable();
            e.resets.dedup();
            if let Some(&c) = e.resets.iter().find(|&&c| c >= clocks.len()) {
                return Err(AutomatonError::UnknownClock(c));
            }
        }
        if let Some(g) = &initial_constraint {
            check_guard(g)?;
        }
        let mut flags = vec![false; n];
        for &b in buchi {
            check_loc(b)?;
            flags[b] = true;
        }
        Ok(TimedAutomaton { clocks, bound, locations, edges, initial, initial_constraint, buchi: flags })
    }

    pub fn clocks(&self) -> &ClockSet {
        &self.clocks
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn location_name(&self, l: usize) -> &str {
        &self.locations[l]
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_from(&self, l: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.source == l)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn initial_constraint(&self) -> Option<&Guard> {
        self.initial_constraint.as_ref()
    }

    pub fn is_buchi(&self, l: usize) -> bool {
        self.buchi[l]
    }

    pub fn buchi(&self) -> Vec<usize> {
        (0..self.locations.len()).filter(|&l| self.buchi[l]).collect()
    }

    /// Same automaton with a different accepting set.
    pub fn with_buchi(&self, buchi: &[usize]) -> Result<Self, AutomatonError> {
        let mut out = self.clone();
        out.buchi = vec![false; self.locations.len()];
        for &b in buchi {
            if b >= self.locations.len() {
                return Err(AutomatonError::UnknownLocation(b));
            }
            out.buchi[b] = true;
        }
        Ok(out)
    }

    pub fn punctual_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.guard.punctuality() == Punctuality::Punctual).count()
    }
}

/// Prints the automaton in the input format; parsing the output gives back
/// an identical automaton.
impl fmt::Display for TimedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "clocks {}", self.clocks.names().join(" "))?;
        writeln!(f, "bound {}", self.bound)?;
        writeln!(f, "locations {}", self.locations.join(" "))?;
        write!(f, "init {}", self.locations[self.initial])?;
        if let Some(g) = &self.initial_constraint {
            write!(f, " \"{}\"", g.display(&self.clocks))?;
        }
        writeln!(f)?;
        let acc: Vec<&str> = self.buchi().into_iter().map(|l| self.locations[l].as_str()).collect();
        if !acc.is_empty() {
            writeln!(f, "buchi {}", acc.join(" "))?;
        }
        for e in &self.edges {
            write!(
                f,
                "edge {} {} \"{}\"",
                self.locations[e.source],
                self.locations[e.target],
                e.guard.display(&self.clocks)
            )?;
            if !e.resets.is_empty() {
                let r: Vec<&str> = e.resets.iter().map(|&c| self.clocks.name(c)).collect();
                write!(f, " reset {}", r.join(" "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
