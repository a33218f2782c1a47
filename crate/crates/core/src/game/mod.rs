//! The perturbation game: Controller proposes a delay and an edge,
//! Perturbator shifts non-punctual delays by at most `δ`.

mod perturbator;
mod strategy;
mod trace;

use num_traits::Zero;
use thiserror::Error;

use crate::dbm::{Dbm, Interval};
use crate::model::{fmt_rational, int, Rational, TimedAutomaton, Valuation};
use crate::orbit::{fog_of_cycle, FoldedOrbitGraph};
use crate::region::{AtomicStep, Region, RegionState};
use crate::slice::{slice_of, CornerPartition};

pub use perturbator::{epsilon, Perturbator, RandomPerturbator, SigmaP};
pub use strategy::{Controller, Scripted, ScriptedController, StrategyError, WitnessController};
pub use trace::{LyapunovTracker, PlayTrace, TraceEnd, TraceStep, Visit};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlayState {
    pub location: usize,
    pub valuation: Valuation,
}

impl PlayState {
    pub fn new(location: usize, valuation: Valuation) -> Self {
        PlayState { location, valuation }
    }

    pub fn region(&self) -> Region {
        Region::of(&self.valuation)
    }
}

/// Controller's proposal: wait `delay`, then take edge `edge`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContMove {
    pub delay: Rational,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllegalMove {
    #[error("edge {0} does not exist")]
    UnknownEdge(usize),
    #[error("edge {0} does not leave the current location")]
    WrongLocation(usize),
    #[error("delay {0} is negative")]
    NegativeDelay(String),
    #[error("punctual guard not satisfied after delay {0}")]
    PunctualMiss(String),
    #[error("delay {0} is shorter than δ")]
    TooShort(String),
    #[error("guard does not hold on the whole window around delay {0}")]
    NotWide(String),
    #[error("perturbed delay {0} is outside [d − δ, d + δ]")]
    BadPerturbation(String),
    #[error("clock bound exceeded")]
    OutOfBounds,
}

fn guard_zone(a: &TimedAutomaton, edge: usize) -> Dbm {
    Dbm::from_guard(a.clock_count(), a.bound(), &a.edges()[edge].guard)
}

/// Delays Controller may legally propose for `edge` from `state`; a
/// single point for punctual guards.
pub fn legal_delays(a: &TimedAutomaton, delta: &Rational, state: &PlayState, edge: usize) -> Option<Interval> {
    let e = a.edges().get(edge)?;
    if e.source != state.location {
        return None;
    }
    legal_into(&guard_zone(a, edge), e.guard.is_punctual(), delta, &state.valuation)
}

/// Delays `d` with `ν + d` in `z` (punctual) or `ν + [d − δ, d + δ] ⊆ z`
/// and `d ≥ δ`.
pub(crate) fn legal_into(z: &Dbm, punctual: bool, delta: &Rational, v: &Valuation) -> Option<Interval> {
    let w = z.delay_window(v)?;
    let w = if punctual {
        w.intersect(&Interval { lo: Rational::zero(), lo_strict: false, hi: w.hi.clone(), hi_strict: w.hi_strict })
    } else {
        let shrunk = Interval { lo: &w.lo + delta, lo_strict: w.lo_strict, hi: &w.hi - delta, hi_strict: w.hi_strict };
        shrunk.intersect(&Interval { lo: delta.clone(), lo_strict: false, hi: shrunk.hi.clone(), hi_strict: shrunk.hi_strict })
    };
    (!w.is_empty()).then_some(w)
}

pub fn check_move(a: &TimedAutomaton, delta: &Rational, state: &PlayState, mv: &ContMove) -> Result<(), IllegalMove> {
    let e = a.edges().get(mv.edge).ok_or(IllegalMove::UnknownEdge(mv.edge))?;
    if e.source != state.location {
        return Err(IllegalMove::WrongLocation(mv.edge));
    }
    let d = fmt_rational(&mv.delay);
    if mv.delay < Rational::zero() {
        return Err(IllegalMove::NegativeDelay(d));
    }
    let z = guard_zone(a, mv.edge);
    if e.guard.is_punctual() {
        if !z.contains(&state.valuation.shift(&mv.delay)) {
            return Err(IllegalMove::PunctualMiss(d));
        }
        return Ok(());
    }
    if mv.delay < *delta {
        return Err(IllegalMove::TooShort(d));
    }
    let window = z.delay_window(&state.valuation).ok_or_else(|| IllegalMove::NotWide(d.clone()))?;
    if !window.contains(&(&mv.delay - delta)) || !window.contains(&(&mv.delay + delta)) {
        return Err(IllegalMove::NotWide(d));
    }
    Ok(())
}

/// One round: Controller's move, then (for non-punctual edges)
/// Perturbator's choice `actual ∈ [d − δ, d + δ]`.
pub fn step(
    a: &TimedAutomaton,
    delta: &Rational,
    state: &PlayState,
    mv: &ContMove,
    actual: &Rational,
) -> Result<PlayState, IllegalMove> {
    check_move(a, delta, state, mv)?;
    let e = &a.edges()[mv.edge];
    let taken = if e.guard.is_punctual() {
        &mv.delay
    } else {
        if *actual < &mv.delay - delta || *actual > &mv.delay + delta {
            return Err(IllegalMove::BadPerturbation(fmt_rational(actual)));
        }
        actual
    };
    let v = state.valuation.delay(taken, a.bound()).map_err(|_| IllegalMove::OutOfBounds)?;
    Ok(PlayState::new(e.target, v.reset(&e.resets)))
}

#[derive(Clone, Debug)]
pub struct GameConfig {
    pub delta: Rational,
    /// Controller moves before the play is cut off.
    pub max_steps: usize,
}

/// What gets recorded at every visit of the anchor region state.
#[derive(Clone, Debug)]
pub struct Observer {
    pub anchor: RegionState,
    pub partition: Option<CornerPartition>,
    pub lyapunov: Option<LyapunovTracker>,
}

/// Plays `cont` against `pert` from `start`.
pub fn simulate(
    a: &TimedAutomaton,
    cfg: &GameConfig,
    start: PlayState,
    cont: &mut dyn Controller,
    pert: &mut dyn Perturbator,
    observer: Option<&Observer>,
) -> PlayTrace {
    let mut trace = PlayTrace::new(start.clone(), cfg.delta.clone());
    let mut state = start;
    let mut since_visit: Vec<AtomicStep> = Vec::new();
    let mut lap_start: Option<usize> = None;
    if let Some(obs) = observer {
        if record_visit(&mut trace, obs, &state, None) {
            lap_start = Some(0);
        }
    }
    for _ in 0..cfg.max_steps {
        let mv = match cont.propose(a, &cfg.delta, &state) {
            Ok(mv) => mv,
            Err(e) => {
                trace.end = TraceEnd::Blocked(e.to_string());
                return trace;
            }
        };
        let punctual = a.edges().get(mv.edge).is_some_and(|e| e.guard.is_punctual());
        let actual = if punctual { mv.delay.clone() } else { pert.perturb(a, &cfg.delta, &state, &mv) };
        let next = match step(a, &cfg.delta, &state, &mv, &actual) {
            Ok(s) => s,
            Err(e) => {
                trace.end = TraceEnd::Illegal(e.to_string());
                return trace;
            }
        };
        if observer.is_some() {
            let src = RegionState::new(state.location, state.region());
            let delay = Region::of(&state.valuation.shift(&actual));
            match AtomicStep::new(a, src, delay, mv.edge) {
                Ok(s) => since_visit.push(s),
                Err(_) => since_visit.clear(),
            }
        }
        trace.push(TraceStep { state: next.clone(), proposed: mv, actual, punctual });
        state = next;
        if let Some(obs) = observer {
            let at_anchor = state.location == obs.anchor.location && state.region() == obs.anchor.region;
            let lap = if at_anchor && lap_start.is_some() { fog_of_cycle(&since_visit, a.bound()).ok() } else { None };
            if record_visit(&mut trace, obs, &state, lap) {
                lap_start = Some(trace.steps.len());
                since_visit.clear();
            }
        }
    }
    trace.end = TraceEnd::Budget;
    trace
}

fn record_visit(trace: &mut PlayTrace, obs: &Observer, s: &PlayState, lap: Option<FoldedOrbitGraph>) -> bool {
    if s.location != obs.anchor.location || s.region() != obs.anchor.region {
        return false;
    }
    let lambda = obs.anchor.region.corner_weights(&s.valuation).expect("inside the anchor region");
    let weights = obs.partition.as_ref().map(|p| slice_of(&s.valuation, p).expect("inside the anchor region"));
    let lyapunov = obs.lyapunov.as_ref().map(|t| t.value(&lambda));
    let qualifying = match (&lap, &obs.lyapunov) {
        (Some(f), Some(t)) => f.draining_scc().is_some_and(|i| i == t.drain),
        _ => false,
    };
    trace.visits.push(Visit { step: trace.steps.len(), valuation: s.valuation.clone(), lambda, weights, lyapunov, lap, qualifying });
    true
}

/// Laps a draining cycle can last against [`SigmaP`]: `⌈2/ε²⌉`.
pub fn lap_bound(eps: &Rational) -> usize {
    use num_traits::ToPrimitive;
    let b = (int(2) / (eps * eps)).ceil();
    b.to_integer().to_usize().expect("bound fits")
}
