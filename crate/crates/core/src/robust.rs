//! Robust region paths and the controllable predecessor `CPre`.

use num_traits::Zero;

use crate::dbm::{Bound, Dbm, ShrunkDbm};
use crate::model::{int, Rational, TimedAutomaton, Valuation};
use crate::region::{check_chain, PathError, Region, RegionPath};

pub use crate::region::AtomicStep;

/// Whether every non-punctual edge of `path` is taken from a non-punctual
/// region.
pub fn is_robust(path: &RegionPath, a: &TimedAutomaton) -> Result<bool, PathError> {
    Ok(path.atomic_steps(a)?.iter().all(AtomicStep::is_robust))
}

/// Index of the first atomic step that breaks robustness.
pub fn first_fragile_step(steps: &[AtomicStep]) -> Option<usize> {
    steps.iter().position(|s| !s.is_robust())
}

/// Valuations of the source region from which Controller can cross `step`
/// into `s` whatever the perturbation of size `δ`.
pub fn cpre_atomic(step: &AtomicStep, s: &Dbm, delta: &Rational) -> Dbm {
    let bound = s.bound();
    let landing = s.unreset(&step.resets).intersect_guard(&step.guard).intersect(&step.delay.to_dbm(bound));
    let pre = if step.guard.is_punctual() {
        landing.pretime_geq(&Rational::zero())
    } else {
        landing.shrink(delta).pretime_geq(delta)
    };
    pre.intersect(&step.source.region.to_dbm(bound))
}

/// Right-to-left fold of [`cpre_atomic`].
pub fn cpre_path(steps: &[AtomicStep], s: &Dbm, delta: &Rational) -> Dbm {
    steps.iter().rev().fold(s.clone(), |acc, step| cpre_atomic(step, &acc, delta))
}

pub fn shrunk_cpre_atomic(step: &AtomicStep, s: &ShrunkDbm) -> ShrunkDbm {
    let bound = s.bound();
    let landing = s.unreset(&step.resets).intersect_guard(&step.guard).intersect(&step.delay.to_dbm(bound));
    let pre = if step.guard.is_punctual() { landing.pretime() } else { landing.shrink().pretime_geq() };
    pre.intersect(&step.source.region.to_dbm(bound))
}

/// Parametric [`cpre_path`], exact for every `δ` below the result's limit.
pub fn shrunk_cpre_path(steps: &[AtomicStep], s: &ShrunkDbm) -> ShrunkDbm {
    steps.iter().rev().fold(s.clone(), |acc, step| shrunk_cpre_atomic(step, &acc))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Robustness {
    /// `CPre` of the final region is non-empty for every `0 < δ ≤ delta0`.
    Robust { delta0: Rational },
    /// `CPre` vanishes for every `δ > 0`; it first does so when crossing
    /// atomic step `step`.
    NotRobust { step: usize },
}

/// Decides non-emptiness of `CPre_π^δ(last region)` for small `δ`.
pub fn robust_nonempty(steps: &[AtomicStep], bound: i64) -> Result<Robustness, PathError> {
    check_chain(steps)?;
    let Some(last) = steps.last() else {
        return Ok(Robustness::Robust { delta0: Rational::from_integer(1.into()) });
    };
    let mut acc = ShrunkDbm::from_dbm(&last.target.region.to_dbm(bound));
    for (i, step) in steps.iter().enumerate().rev() {
        acc = shrunk_cpre_atomic(step, &acc);
        if acc.is_empty() {
            return Ok(Robustness::NotRobust { step: i });
        }
    }
    Ok(Robustness::Robust { delta0: acc.delta0().expect("non-empty") })
}

/// A point `ν` of `z` and `ε > 0` with `Ball(ν, ε) ∩ r ⊆ z`, where `z ⊆ r`.
pub fn interior_ball(z: &Dbm, r: &Region) -> Option<(Valuation, Rational)> {
    let nu = z.interior_point()?;
    let rz = r.to_dbm(z.bound());
    let dim = z.dim();
    let val = |i: usize| if i == 0 { Rational::zero() } else { nu.get(i - 1).clone() };
    let mut eps: Option<Rational> = None;
    for i in 0..dim {
        for j in 0..dim {
            let b = z.get(i, j);
            if i == j || b == rz.get(i, j) {
                continue;
            }
            let Bound::Fin(c, _) = b else { continue };
            let slack = c - (val(i) - val(j));
            if slack <= Rational::zero() {
                return None;
            }
            let e = slack / int(4);
            eps = Some(match eps {
                Some(cur) if cur <= e => cur,
                _ => e,
            });
        }
    }
    Some((nu, eps.unwrap_or_else(|| Rational::from_integer(1.into()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_automaton, rat, ClockSet};
    use crate::region::RegionState;
    use crate::samples;

    fn xy() -> ClockSet {
        ClockSet::new(["x", "y"]).unwrap()
    }

    fn region(s: &str, m: i64) -> Region {
        Region::parse(s, &xy(), m).unwrap().unwrap()
    }

    fn fig3_cycle() -> Vec<AtomicStep> {
        let a = samples::fig3();
        let s0 = RegionState::new(0, region("0<x && x-y<0 && y<1", 2));
        let e1 = AtomicStep::new(&a, s0, region("y==1 && 0<x<1", 2), 0).unwrap();
        let e2 = AtomicStep::new(&a, e1.target.clone(), region("x==1 && 0<y<1", 2), 1).unwrap();
        let e3 = AtomicStep::new(&a, e2.target.clone(), region("0<x && x-y<0 && y<1", 2), 2).unwrap();
        vec![e1, e2, e3]
    }

    #[test]
    fn fig3_cycle_is_robust() {
        let steps = fig3_cycle();
        assert!(steps.iter().all(AtomicStep::is_robust));
        let path = RegionPath::from_steps(steps[0].source.clone(), &steps);
        assert_eq!(is_robust(&path, &samples::fig3()), Ok(true));
        let Ok(Robustness::Robust { delta0 }) = robust_nonempty(&steps, 2) else { panic!() };
        assert!(delta0 > rat(0, 1));
        let first = &steps[0].source.region;
        let back = cpre_path(&steps, &first.to_dbm(2), &(delta0 / int(2)));
        assert!(!back.is_empty());
    }

    #[test]
    fn baseline_at_zero_is_the_first_region() {
        let steps = fig3_cycle();
        let z = cpre_path(&steps, &steps[2].target.region.to_dbm(2), &rat(0, 1));
        assert_eq!(z, steps[0].source.region.to_dbm(2));
    }

    #[test]
    fn non_punctual_edge_from_punctual_region() {
        let a = samples::fig1();
        let l1 = a.location_index("l1").unwrap();
        // x<2 taken right when y hits 1
        let s0 = RegionState::new(l1, region("y==0 && 0<x<1", 3));
        let step = AtomicStep::new(&a, s0, region("y==1 && 1<x<2", 3), 1).unwrap();
        assert!(!step.is_robust());
        assert_eq!(robust_nonempty(std::slice::from_ref(&step), 3), Ok(Robustness::NotRobust { step: 0 }));
        let z = cpre_atomic(&step, &step.target.region.to_dbm(3), &rat(1, 8));
        assert!(z.is_empty());
        let path = RegionPath::from_steps(step.source.clone(), std::slice::from_ref(&step));
        assert_eq!(is_robust(&path, &a), Ok(false));
    }

    #[test]
    fn punctual_steps_ignore_delta() {
        let a = samples::fig1();
        let l2 = a.location_index("l2").unwrap();
        let s0 = RegionState::new(l2, region("x==0 && 1<y<2", 3));
        let step = AtomicStep::new(&a, s0, region("y==2 && 0<x<1", 3), 2).unwrap();
        let target = step.target.region.to_dbm(3);
        let at0 = cpre_atomic(&step, &target, &rat(0, 1));
        for d in [rat(1, 8), rat(1, 3), rat(1, 1)] {
            assert_eq!(cpre_atomic(&step, &target, &d), at0);
        }
        assert!(matches!(robust_nonempty(&[step], 3), Ok(Robustness::Robust { .. })));
    }

    #[test]
    fn malformed_paths_are_reported() {
        let a = parse_automaton("clocks x\nbound 1\ninit a\nedge a a \"x<1\"\n").unwrap();
        let c = ClockSet::new(["x"]).unwrap();
        let r = Region::parse("0<x<1", &c, 1).unwrap().unwrap();
        let path = RegionPath { start: RegionState::new(0, r.clone()), moves: vec![crate::region::Move::Edge(0)] };
        assert_eq!(is_robust(&path, &a), Err(PathError::ExpectedDelay(0)));
        let path = RegionPath { start: RegionState::new(0, r.clone()), moves: vec![crate::region::Move::Delay(r)] };
        assert_eq!(is_robust(&path, &a), Err(PathError::TrailingDelay));
    }

    #[test]
    fn ball_inside_a_slice_of_the_region() {
        let r = region("0<x && x-y<0 && y<1", 2);
        let (nu, eps) = interior_ball(&r.to_dbm(2), &r).unwrap();
        assert!(r.contains(&nu) && eps > rat(0, 1));
        let thin = r.to_dbm(2).intersect_guard(&crate::model::parse_guard("y-x<=1 && 1<=y-x", &xy(), 2).unwrap());
        assert!(thin.is_empty() || interior_ball(&thin, &r).is_none());
        let band = r.to_dbm(2).intersect_guard(&crate::model::parse_guard("x-y<=-1 && 0<=x", &xy(), 2).unwrap());
        assert!(band.is_empty());
    }
}
