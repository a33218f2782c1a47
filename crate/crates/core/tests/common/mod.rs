//! Helpers shared by the integration tests: hand-built cycles of the bundled
//! models and a seeded corpus of random region paths.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_tba::model::{parse_automaton, TimedAutomaton};
use robust_tba::region::{atomic_steps_from, initial_states, AtomicStep, Region, RegionState};

pub fn region(a: &TimedAutomaton, text: &str) -> Region {
    Region::parse(text, a.clocks(), a.bound()).unwrap().expect("a region")
}

/// Atomic steps from `(loc, start)` through the given delay regions and edges.
pub fn path(a: &TimedAutomaton, loc: &str, start: &str, moves: &[(&str, usize)]) -> Vec<AtomicStep> {
    let mut state = RegionState::new(a.location_index(loc).unwrap(), region(a, start));
    let mut out = Vec::new();
    for &(delay, edge) in moves {
        let s = AtomicStep::new(a, state, region(a, delay), edge).unwrap();
        state = s.target.clone();
        out.push(s);
    }
    out
}

pub fn two_step_cycle(a: &TimedAutomaton) -> Vec<AtomicStep> {
    path(a, "l1", "y==0 && 0<x<1", &[("1<y && y-x<0 && x<2", 1), ("y==2 && 0<x<1", 2)])
}

/// The lap `l0 l1 l2 l0` through the triangle `0<x<y<1`, shared by the
/// controllable and the doomed model.
pub fn triangle_cycle(a: &TimedAutomaton) -> Vec<AtomicStep> {
    let y1 = if a.edges()[0].guard.is_punctual() { "y==1 && 0<x<1" } else { "0<x && x-y<0 && y<1" };
    path(
        a,
        "l0",
        "0<x && x-y<0 && y<1",
        &[(y1, 0), ("x==1 && 0<y<1", 1), ("0<x && x-y<0 && y<1", 2)],
    )
}

const CLOCKS: [&str; 3] = ["x", "y", "z"];

fn random_atom(rng: &mut ChaCha8Rng, n: usize, m: i64) -> String {
    let x = CLOCKS[rng.gen_range(0..n)];
    let c = rng.gen_range(0..=m);
    match rng.gen_range(0..6) {
        0 | 1 => format!("{x}=={c}"),
        2 if c < m => format!("{c}<{x}<{}", c + 1),
        3 if c > 0 => format!("{x}<{c}"),
        4 if n > 1 => {
            let y = CLOCKS[(CLOCKS.iter().position(|&k| k == x).unwrap() + 1) % n];
            format!("{x}-{y}<{}", rng.gen_range(-m..=m))
        }
        _ => format!("{c}<={x}"),
    }
}

/// A random automaton with at most 3 clocks, bound at most 3 and a mix of
/// punctual and non-punctual guards.
pub fn random_automaton(rng: &mut ChaCha8Rng) -> TimedAutomaton {
    random_automaton_within(rng, 3, 3)
}

pub fn random_automaton_within(rng: &mut ChaCha8Rng, clocks: usize, bound: i64) -> TimedAutomaton {
    let n = rng.gen_range(1..=clocks);
    let m = rng.gen_range(1..=bound);
    let mut text = format!("clocks {}\nbound {m}\nlocations l0 l1 l2\ninit l0\nbuchi l2\n", CLOCKS[..n].join(" "));
    for _ in 0..rng.gen_range(3..=6) {
        let (s, t) = (rng.gen_range(0..3), rng.gen_range(0..3));
        let atoms: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| random_atom(rng, n, m)).collect();
        let guard = if atoms.is_empty() { "true".to_string() } else { atoms.join(" && ") };
        let resets: Vec<&str> = CLOCKS[..n].iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        text.push_str(&format!("edge l{s} l{t} \"{guard}\""));
        if !resets.is_empty() {
            text.push_str(&format!(" reset {}", resets.join(" ")));
        }
        text.push('\n');
    }
    parse_automaton(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// `count` well-formed region paths of length 1 to 6 drawn by random walks
/// in random automata.
pub fn path_corpus(seed: u64, count: usize) -> Vec<(TimedAutomaton, Vec<AtomicStep>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let a = random_automaton(&mut rng);
        let Some(mut state) = initial_states(&a).choose(&mut rng).cloned() else { continue };
        let len = rng.gen_range(1..=6);
        let mut steps = Vec::new();
        while steps.len() < len {
            let next = atomic_steps_from(&a, &state, false);
            let Some(s) = next.choose(&mut rng) else { break };
            state = s.target.clone();
            steps.push(s.clone());
        }
        if !steps.is_empty() {
            out.push((a, steps));
        }
    }
    out
}
