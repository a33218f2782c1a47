//! Controllable predecessors along the controllable lap, concrete and
//! parametric in δ.

use robust_tba::dbm::ShrunkDbm;
use robust_tba::model::rat;
use robust_tba::region::{atomic_steps_from, AtomicStep, Region, RegionState};
use robust_tba::robust::{cpre_path, first_fragile_step, robust_nonempty, shrunk_cpre_path, Robustness};

fn main() {
    let a = robust_tba::samples::fig3();
    let start = Region::parse("0<x && x-y<0 && y<1", a.clocks(), a.bound()).unwrap().unwrap();
    let mut state = RegionState::new(0, start);
    let mut lap: Vec<AtomicStep> = Vec::new();
    for _ in 0..3 {
        let s = atomic_steps_from(&a, &state, true).into_iter().next().unwrap();
        state = s.target.clone();
        lap.push(s);
    }
    let target = lap[2].target.region.to_dbm(a.bound());
    println!("fragile step: {:?}", first_fragile_step(&lap));
    match robust_nonempty(&lap, a.bound()).unwrap() {
        Robustness::Robust { delta0 } => println!("robust, non-empty for every δ up to {delta0}"),
        Robustness::NotRobust { step } => println!("empties at step {step}"),
    }
    let shrunk = shrunk_cpre_path(&lap, &ShrunkDbm::from_dbm(&target));
    println!("parametric result exact below δ = {:?}", shrunk.limit().map(ToString::to_string));
    for d in [rat(0, 1), rat(1, 10), rat(1, 5)] {
        let z = cpre_path(&lap, &target, &d);
        println!("δ = {d}: {}", z.display(a.clocks()));
        assert_eq!(z, shrunk.instantiate(&d));
    }
}
