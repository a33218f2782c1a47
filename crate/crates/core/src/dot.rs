//! Graphviz output.

use std::fmt::Write as _;

use crate::model::TimedAutomaton;
use crate::orbit::{FoldedOrbitGraph, OrbitGraph};
use crate::region::{Region, RegionGraph};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

fn corner(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

/// Edges are solid and labelled with their guard and resets, delays dashed.
/// The trivial delay of every state is left out.
pub fn region_automaton(a: &TimedAutomaton, g: &RegionGraph) -> String {
    let mut out = String::from("digraph regions {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, s) in g.states.iter().enumerate() {
        let label = format!("{}\\n{}", a.location_name(s.location), esc(&s.region.display(a.clocks()).to_string()));
        let mut attrs = format!("label=\"{label}\"");
        if g.initial.contains(&i) {
            attrs.push_str(", style=bold");
        }
        if a.is_buchi(s.location) {
            attrs.push_str(", peripheries=2");
        }
        writeln!(out, "  s{i} [{attrs}];").unwrap();
    }
    for &(i, j) in &g.delays {
        if i != j {
            writeln!(out, "  s{i} -> s{j} [style=dashed];").unwrap();
        }
    }
    for &(i, e, j) in &g.edges {
        let edge = &a.edges()[e];
        let mut label = esc(&edge.guard.display(a.clocks()).to_string());
        if !edge.resets.is_empty() {
            let names: Vec<&str> = edge.resets.iter().map(|&c| a.clocks().name(c)).collect();
            write!(label, " / {}:=0", names.join(",")).unwrap();
        }
        writeln!(out, "  s{i} -> s{j} [label=\"{label}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}

/// One column of corners per region of the path.
pub fn orbit_graph(a: &TimedAutomaton, g: &OrbitGraph) -> String {
    let mut out = String::from("digraph orbit {\n  rankdir=LR;\n  node [shape=circle, fontname=\"monospace\"];\n");
    for (k, r) in g.layers.iter().enumerate() {
        writeln!(out, "  subgraph cluster_{k} {{\n    label=\"{}\";", esc(&r.display(a.clocks()).to_string())).unwrap();
        for (i, c) in r.corners().iter().enumerate() {
            writeln!(out, "    n{k}_{i} [label=\"{}\"];", corner(c)).unwrap();
        }
        out.push_str("  }\n");
    }
    for (k, rel) in g.steps.iter().enumerate() {
        for (i, j) in rel.edges() {
            writeln!(out, "  n{k}_{i} -> n{}_{j};", k + 1).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// The folded graph on the corners `c_i` of its region; `title` goes into
/// the graph label.
pub fn fog(a: &TimedAutomaton, f: &FoldedOrbitGraph, title: &str) -> String {
    let region: &Region = &f.region;
    let mut out = format!(
        "digraph fog {{\n  label=\"{}\\n{}\";\n  node [shape=circle, fontname=\"monospace\"];\n",
        esc(&region.display(a.clocks()).to_string()),
        esc(title)
    );
    for (k, scc) in f.sccs().iter().enumerate() {
        writeln!(out, "  subgraph cluster_scc{k} {{\n    style=dotted;").unwrap();
        for &i in scc {
            writeln!(out, "    c{i} [label=\"c{i}\\n{}\"];", corner(&region.corners()[i])).unwrap();
        }
        out.push_str("  }\n");
    }
    for (i, j) in f.rel.edges() {
        writeln!(out, "  c{i} -> c{j};").unwrap();
    }
    out.push_str("}\n");
    out
}
