use std::fmt::Write as _;

use serde_json::json;

use super::{ContMove, PlayState};
use crate::model::{fmt_rational, Rational, TimedAutomaton, Valuation};
use crate::orbit::{FoldedOrbitGraph, IterationClass};
use crate::synthesis::class_name;

/// `L_I(ν) = Σ_{c_i ∈ I} λ_i`, the weight `ν` puts on the draining corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LyapunovTracker {
    pub drain: Vec<usize>,
}

impl LyapunovTracker {
    pub fn new(drain: Vec<usize>) -> Self {
        LyapunovTracker { drain }
    }

    pub fn value(&self, lambda: &[Rational]) -> Rational {
        self.drain.iter().map(|&i| lambda[i].clone()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub state: PlayState,
    pub proposed: ContMove,
    pub actual: Rational,
    pub punctual: bool,
}

/// A visit of the anchor region state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Visit {
    /// Number of moves played before the visit.
    pub step: usize,
    pub valuation: Valuation,
    /// Corner weights in the anchor region.
    pub lambda: Vec<Rational>,
    pub weights: Option<Vec<Rational>>,
    pub lyapunov: Option<Rational>,
    /// Folded orbit graph of the region cycle just completed.
    pub lap: Option<FoldedOrbitGraph>,
    /// The completed lap drains the tracked corners.
    pub qualifying: bool,
}

impl Visit {
    pub fn lap_class(&self) -> Option<IterationClass> {
        self.lap.as_ref().and_then(|f| f.iterate_classify().ok())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEnd {
    Budget,
    Blocked(String),
    Illegal(String),
}

#[derive(Clone, Debug)]
pub struct PlayTrace {
    pub delta: Rational,
    pub start: PlayState,
    pub steps: Vec<TraceStep>,
    pub visits: Vec<Visit>,
    pub end: TraceEnd,
}

impl PlayTrace {
    pub fn new(start: PlayState, delta: Rational) -> Self {
        PlayTrace { delta, start, steps: Vec::new(), visits: Vec::new(), end: TraceEnd::Budget }
    }

    pub fn push(&mut self, s: TraceStep) {
        self.steps.push(s);
    }

    pub fn last_state(&self) -> &PlayState {
        self.steps.last().map_or(&self.start, |s| &s.state)
    }

    /// Completed laps between consecutive anchor visits.
    pub fn laps(&self) -> usize {
        self.visits.len().saturating_sub(1)
    }

    pub fn survived(&self) -> bool {
        self.end == TraceEnd::Budget
    }

    /// Replays every recorded move through [`super::step`].
    pub fn revalidate(&self, a: &TimedAutomaton) -> Result<(), String> {
        let mut state = self.start.clone();
        for (i, s) in self.steps.iter().enumerate() {
            let next = super::step(a, &self.delta, &state, &s.proposed, &s.actual).map_err(|e| format!("move {i}: {e}"))?;
            if next != s.state {
                return Err(format!("move {i}: recorded state differs from the replay"));
            }
            state = next;
        }
        Ok(())
    }

    /// Recomputes `L_I` and the qualifying flags for another corner set.
    pub fn track(&mut self, t: &LyapunovTracker) {
        for v in &mut self.visits {
            v.lyapunov = Some(t.value(&v.lambda));
            v.qualifying = v.lap.as_ref().is_some_and(|f| f.draining_scc().is_some_and(|i| i == t.drain));
        }
    }

    /// Draining corners of the first completed lap that has any.
    pub fn first_drain(&self) -> Option<Vec<usize>> {
        self.visits.iter().find_map(|v| v.lap.as_ref().and_then(FoldedOrbitGraph::draining_scc))
    }

    /// Slice weights are the same at every anchor visit.
    pub fn constant_weights(&self) -> bool {
        let ws: Vec<_> = self.visits.iter().filter_map(|v| v.weights.as_ref()).collect();
        ws.windows(2).all(|w| w[0] == w[1])
    }

    /// Smallest drop of `L_I` over qualifying laps and whether `L_I` never
    /// increases.
    pub fn lyapunov_profile(&self) -> (Option<Rational>, bool) {
        let mut min_drop: Option<Rational> = None;
        let mut monotone = true;
        for w in self.visits.windows(2) {
            let (Some(a), Some(b)) = (&w[0].lyapunov, &w[1].lyapunov) else { continue };
            if b > a {
                monotone = false;
            }
            if w[1].qualifying {
                let d = a - b;
                min_drop = Some(match min_drop {
                    Some(m) if m <= d => m,
                    _ => d,
                });
            }
        }
        (min_drop, monotone)
    }

    /// One JSON object per state, the start included.
    pub fn to_jsonl(&self, a: &TimedAutomaton) -> String {
        let val = |v: &Valuation| v.0.iter().map(fmt_rational).collect::<Vec<_>>();
        let mut out = String::new();
        let head = json!({
            "step": 0,
            "location": a.location_name(self.start.location),
            "valuation": val(&self.start.valuation),
        });
        writeln!(out, "{head}").unwrap();
        for (i, s) in self.steps.iter().enumerate() {
            let line = json!({
                "step": i + 1,
                "edge": s.proposed.edge,
                "proposed": fmt_rational(&s.proposed.delay),
                "actual": fmt_rational(&s.actual),
                "punctual": s.punctual,
                "location": a.location_name(s.state.location),
                "valuation": val(&s.state.valuation),
            });
            writeln!(out, "{line}").unwrap();
        }
        let end = match &self.end {
            TraceEnd::Budget => json!({ "end": "budget" }),
            TraceEnd::Blocked(m) => json!({ "end": "blocked", "reason": m }),
            TraceEnd::Illegal(m) => json!({ "end": "illegal", "reason": m }),
        };
        writeln!(out, "{end}").unwrap();
        out
    }

    /// `visit,step,w0,…,lyapunov,lap_class,qualifying`.
    pub fn visits_csv(&self) -> String {
        let k = self.visits.iter().find_map(|v| v.weights.as_ref().map(Vec::len)).unwrap_or(0);
        let mut out = String::from("visit,step");
        for j in 0..k {
            write!(out, ",w{j}").unwrap();
        }
        out.push_str(",lyapunov,lap_class,qualifying\n");
        for (i, v) in self.visits.iter().enumerate() {
            write!(out, "{i},{}", v.step).unwrap();
            if let Some(ws) = &v.weights {
                for w in ws {
                    write!(out, ",{}", fmt_rational(w)).unwrap();
                }
            }
            let l = v.lyapunov.as_ref().map(fmt_rational).unwrap_or_default();
            let c = v.lap_class().as_ref().map(class_name).unwrap_or_default();
            writeln!(out, ",{l},{c},{}", v.qualifying).unwrap();
        }
        out
    }
}
