//! Fold the three bundled cycles and classify their iterates.

use robust_tba::model::TimedAutomaton;
use robust_tba::orbit::fog_of_cycle;
use robust_tba::region::{AtomicStep, Region, RegionState};
use robust_tba::samples;
use robust_tba::synthesis::class_name;

fn cycle(a: &TimedAutomaton, loc: &str, start: &str, moves: &[(&str, usize)]) -> Vec<AtomicStep> {
    let region = |s: &str| Region::parse(s, a.clocks(), a.bound()).unwrap().unwrap();
    let mut state = RegionState::new(a.location_index(loc).unwrap(), region(start));
    moves
        .iter()
        .map(|&(delay, edge)| {
            let s = AtomicStep::new(a, state.clone(), region(delay), edge).unwrap();
            state = s.target.clone();
            s
        })
        .collect()
}

fn main() {
    let tri = "0<x && x-y<0 && y<1";
    let cases = [
        ("fig1, l1 l2", samples::fig1(), "l1", "y==0 && 0<x<1", vec![("1<y && y-x<0 && x<2", 1), ("y==2 && 0<x<1", 2)]),
        ("fig3, l0 l1 l2", samples::fig3(), "l0", tri, vec![("y==1 && 0<x<1", 0), ("x==1 && 0<y<1", 1), (tri, 2)]),
        ("fig4, l0 l1 l2", samples::fig4(), "l0", tri, vec![(tri, 0), ("x==1 && 0<y<1", 1), (tri, 2)]),
    ];
    for (name, a, loc, start, moves) in cases {
        let f = fog_of_cycle(&cycle(&a, loc, start, &moves), a.bound()).unwrap();
        let edges: Vec<String> = f.rel.edges().iter().map(|(i, j)| format!("c{i}->c{j}")).collect();
        let class = f.iterate_classify().map(|c| class_name(&c)).unwrap();
        println!("{name}: {{{}}} {class}, sccs {:?}", edges.join(", "), f.sccs());
    }
}
