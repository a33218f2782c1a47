use std::collections::HashMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{legal_delays, legal_into, ContMove, PlayState};
use crate::dbm::{Dbm, Interval};
use crate::model::{fmt_rational, Rational, TimedAutomaton};
use crate::region::AtomicStep;
use crate::robust::cpre_path;
use crate::slice::{slice_of, slice_zone_in};
use crate::synthesis::{inner_zone, validate, LassoWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("no legal move towards {0}")]
    NoMove(String),
    #[error("state is outside the strategy's winning set")]
    OutsideWinningSet,
    #[error("δ = {0} exceeds the certified δ₀ = {1}")]
    DeltaTooLarge(String, String),
    #[error("δ must be positive")]
    NonPositiveDelta,
    #[error("witness does not validate: {0}")]
    Invalid(String),
}

pub trait Controller {
    fn propose(&mut self, a: &TimedAutomaton, delta: &Rational, state: &PlayState) -> Result<ContMove, StrategyError>;

    fn name(&self) -> String;
}

/// Where a scripted controller puts its delay inside the legal interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scripted {
    Early,
    Mid,
    Late,
    Random(u64),
}

/// Follows a fixed cycle of locations, always taking the first edge to
/// the next one that admits a legal delay.
#[derive(Clone, Debug)]
pub struct ScriptedController {
    cycle: Vec<usize>,
    mode: Scripted,
    pos: usize,
    rng: ChaCha8Rng,
}

impl ScriptedController {
    pub fn new(cycle: Vec<usize>, mode: Scripted) -> Self {
        assert!(!cycle.is_empty());
        let seed = if let Scripted::Random(s) = mode { s } else { 0 };
        ScriptedController { cycle, mode, pos: 0, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick(&mut self, w: &Interval) -> Rational {
        if w.lo == w.hi {
            return w.lo.clone();
        }
        let len = &w.hi - &w.lo;
        let at = |num: i64, den: i64| &w.lo + &len * Rational::new(num.into(), den.into());
        match self.mode {
            Scripted::Early if !w.lo_strict => w.lo.clone(),
            Scripted::Early => at(1, 10),
            Scripted::Mid => w.midpoint(),
            Scripted::Late if !w.hi_strict => w.hi.clone(),
            Scripted::Late => at(9, 10),
            Scripted::Random(_) => at(self.rng.gen_range(1..1000), 1000),
        }
    }
}

impl Controller for ScriptedController {
    fn propose(&mut self, a: &TimedAutomaton, delta: &Rational, state: &PlayState) -> Result<ContMove, StrategyError> {
        if let Some(i) = self.cycle.iter().position(|&l| l == state.location) {
            if self.cycle[self.pos] != state.location {
                self.pos = i;
            }
        } else {
            return Err(StrategyError::OutsideWinningSet);
        }
        let next = self.cycle[(self.pos + 1) % self.cycle.len()];
        for (idx, e) in a.edges_from(state.location) {
            if e.target != next {
                continue;
            }
            if let Some(w) = legal_delays(a, delta, state, idx) {
                self.pos = (self.pos + 1) % self.cycle.len();
                return Ok(ContMove { delay: self.pick(&w), edge: idx });
            }
        }
        Err(StrategyError::NoMove(a.location_name(next).to_string()))
    }

    fn name(&self) -> String {
        match self.mode {
            Scripted::Early => "early".into(),
            Scripted::Mid => "mid".into(),
            Scripted::Late => "late".into(),
            Scripted::Random(s) => format!("random({s})"),
        }
    }
}

/// Stays inside `N ∩ slice` at the anchor: each move aims at the middle of
/// the delays that keep the play in the controllable predecessor of the
/// rest of the lap.
#[derive(Clone, Debug)]
pub struct WitnessController {
    prefix: Vec<AtomicStep>,
    lap: Vec<AtomicStep>,
    inner: Dbm,
    bound: i64,
    delta: Rational,
    partition: crate::slice::CornerPartition,
    /// Predecessor chains per slice, `chain[j] = CPre` of steps `j..` of the lap.
    chains: HashMap<Vec<Rational>, Vec<Dbm>>,
    prefix_chain: Vec<Dbm>,
    phase: Phase,
}

#[derive(Clone, Debug)]
enum Phase {
    Prefix(usize),
    Lap(Vec<Rational>, usize),
}

impl WitnessController {
    pub fn new(a: &TimedAutomaton, w: &LassoWitness, delta: &Rational) -> Result<Self, StrategyError> {
        if *delta <= Rational::zero() {
            return Err(StrategyError::NonPositiveDelta);
        }
        let cert = validate(w, a).map_err(|e| StrategyError::Invalid(e.join("; ")))?;
        if *delta > cert.delta0 {
            return Err(StrategyError::DeltaTooLarge(fmt_rational(delta), fmt_rational(&cert.delta0)));
        }
        let bound = a.bound();
        let lap = w.iterated_cycle();
        let prefix_chain = (0..=w.prefix.len()).map(|j| cpre_path(&w.prefix[j..], &cert.zone, delta)).collect();
        let mut c = WitnessController {
            prefix: w.prefix.clone(),
            lap,
            inner: inner_zone(&w.anchor().region, bound),
            bound,
            delta: delta.clone(),
            partition: w.partition.clone(),
            chains: HashMap::new(),
            prefix_chain,
            phase: Phase::Prefix(0),
        };
        c.chains.insert(cert.weights.clone(), c.chain_for(&cert.zone));
        if w.prefix.is_empty() {
            c.phase = Phase::Lap(cert.weights, 0);
        }
        Ok(c)
    }

    fn chain_for(&self, target: &Dbm) -> Vec<Dbm> {
        (0..=self.lap.len()).map(|j| cpre_path(&self.lap[j..], target, &self.delta)).collect()
    }

    /// Valuations from which the strategy can start: `cpre` of the prefix,
    /// or `N ∩ slice` when there is none.
    pub fn winning_start(&self) -> &Dbm {
        &self.prefix_chain[0]
    }

    fn enter_lap(&mut self, state: &PlayState) -> Result<(), StrategyError> {
        let w = slice_of(&state.valuation, &self.partition).map_err(|_| StrategyError::OutsideWinningSet)?;
        if !self.chains.contains_key(&w) {
            let slice = slice_zone_in(&self.partition, &w, self.bound).map_err(|_| StrategyError::OutsideWinningSet)?;
            let chain = self.chain_for(&self.inner.intersect(&slice));
            self.chains.insert(w.clone(), chain);
        }
        self.phase = Phase::Lap(w, 0);
        Ok(())
    }

    fn aim(step: &AtomicStep, delta: &Rational, target: &Dbm, state: &PlayState) -> Result<ContMove, StrategyError> {
        if step.source.location != state.location || !step.source.region.contains(&state.valuation) {
            return Err(StrategyError::OutsideWinningSet);
        }
        let landing =
            target.unreset(&step.resets).intersect_guard(&step.guard).intersect(&step.delay.to_dbm(target.bound()));
        let w = legal_into(&landing, step.guard.is_punctual(), delta, &state.valuation)
            .ok_or(StrategyError::OutsideWinningSet)?;
        Ok(ContMove { delay: w.midpoint(), edge: step.edge })
    }
}

impl Controller for WitnessController {
    fn propose(&mut self, _a: &TimedAutomaton, delta: &Rational, state: &PlayState) -> Result<ContMove, StrategyError> {
        if *delta != self.delta {
            return Err(StrategyError::DeltaTooLarge(fmt_rational(delta), fmt_rational(&self.delta)));
        }
        if let Phase::Prefix(j) = self.phase {
            if j == self.prefix.len() {
                self.enter_lap(state)?;
            } else {
                if !self.prefix_chain[j].contains(&state.valuation) {
                    return Err(StrategyError::OutsideWinningSet);
                }
                let mv = Self::aim(&self.prefix[j], delta, &self.prefix_chain[j + 1], state)?;
                self.phase = Phase::Prefix(j + 1);
                return Ok(mv);
            }
        }
        let Phase::Lap(w, j) = &self.phase else { unreachable!() };
        let j = if *j == self.lap.len() { 0 } else { *j };
        let chain = &self.chains[w];
        if !chain[j].contains(&state.valuation) {
            return Err(StrategyError::OutsideWinningSet);
        }
        let mv = Self::aim(&self.lap[j], delta, &chain[j + 1], state)?;
        let w = w.clone();
        self.phase = Phase::Lap(w, j + 1);
        Ok(mv)
    }

    fn name(&self) -> String {
        "witness".to_string()
    }
}
