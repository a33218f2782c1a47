//! Print the reachable region automaton of the two-lap example as DOT.
//!
//!     cargo run --example region_automaton_dot | dot -Tsvg > regions.svg

use robust_tba::dot;
use robust_tba::region::build_region_automaton;

fn main() {
    let a = robust_tba::samples::fig1();
    let g = build_region_automaton(&a);
    eprintln!("{} region states, {} edges", g.len(), g.edges.len());
    print!("{}", dot::region_automaton(&a, &g));
}
