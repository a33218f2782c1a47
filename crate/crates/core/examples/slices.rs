//! Slices of the triangle `0<x<y<1` under the controllable lap's corner
//! partition `{c0, c2}, {c1}`.

use robust_tba::model::{rat, ClockSet, Valuation};
use robust_tba::orbit::{FoldedOrbitGraph, Relation};
use robust_tba::region::Region;
use robust_tba::slice::{cluster_corner_partition, flow_reachable, slice_of, slice_to_zone, splitting_positions};

fn main() {
    let clocks = ClockSet::new(["x", "y"]).unwrap();
    let r = Region::parse("0<x && x-y<0 && y<1", &clocks, 2).unwrap().unwrap();
    let f = FoldedOrbitGraph::new(r.clone(), Relation::from_edges(3, 3, &[(0, 0), (0, 2), (2, 0), (2, 2), (1, 1)]));
    let p = cluster_corner_partition(&f).unwrap();
    println!("colors {:?}, splitting positions {:?}", p.colors(), splitting_positions(&p).unwrap());
    let v = Valuation(vec![rat(1, 4), rat(3, 4)]);
    let w = slice_of(&v, &p).unwrap();
    println!("{} has weights {:?}", v.display(&clocks), w.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("its slice: {}", slice_to_zone(&p, &w).unwrap().display(&clocks));
    for u in [Valuation(vec![rat(1, 8), rat(5, 8)]), Valuation(vec![rat(1, 8), rat(3, 4)])] {
        println!("{} reachable from it in one lap: {}", u.display(&clocks), flow_reachable(&v, &u, &f));
    }
}
