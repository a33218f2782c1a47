//! Both sides of the perturbation game: the synthesized strategy keeps its
//! slice forever, while a naive controller on the doomed variant is driven
//! out within a few laps.

use robust_tba::game::{
    epsilon, lap_bound, simulate, GameConfig, LyapunovTracker, Observer, PlayState, RandomPerturbator, Scripted,
    ScriptedController, SigmaP, WitnessController,
};
use robust_tba::model::{int, rat};
use robust_tba::region::initial_states;
use robust_tba::samples;
use robust_tba::synthesis::decide;

fn main() {
    let a = samples::fig3();
    let w = decide(&a).unwrap().witness.unwrap();
    let delta = &w.delta0 / int(2);
    let obs = Observer { anchor: w.anchor().clone(), partition: Some(w.partition.clone()), lyapunov: None };
    let start = PlayState::new(w.anchor().location, w.anchor().region.representative());
    let mut cont = WitnessController::new(&a, &w, &delta).unwrap();
    let cfg = GameConfig { delta: delta.clone(), max_steps: 300 };
    let t = simulate(&a, &cfg, start, &mut cont, &mut RandomPerturbator::new(1), Some(&obs));
    println!("controllable model, δ = {delta}: {} laps, survived {}, constant weights {}", t.laps(), t.survived(), t.constant_weights());

    let a = samples::fig4();
    let delta = rat(1, 10);
    let init = initial_states(&a).remove(0);
    let cycle = ["l0", "l1", "l2"].map(|l| a.location_index(l).unwrap()).to_vec();
    let obs = Observer { anchor: init.clone(), partition: None, lyapunov: None };
    for mode in [Scripted::Early, Scripted::Mid, Scripted::Late] {
        let mut cont = ScriptedController::new(cycle.clone(), mode);
        let cfg = GameConfig { delta: delta.clone(), max_steps: 1000 };
        let start = PlayState::new(init.location, init.region.representative());
        let mut t = simulate(&a, &cfg, start, &mut cont, &mut SigmaP, Some(&obs));
        if let Some(d) = t.first_drain() {
            t.track(&LyapunovTracker::new(d));
        }
        println!("doomed model, {mode:?}: {:?} after {} laps (bound {})", t.end, t.laps(), lap_bound(&epsilon(&delta, 2)));
        print!("{}", t.visits_csv());
    }
}
