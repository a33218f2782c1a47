//! The bundled example automata.

use crate::model::{parse_automaton, TimedAutomaton};

pub const FIG1: &str = include_str!("../models/fig1.ta");
pub const FIG3: &str = include_str!("../models/fig3.ta");
pub const FIG4: &str = include_str!("../models/fig4.ta");

pub fn fig1() -> TimedAutomaton {
    parse_automaton(FIG1).expect("bundled model parses")
}

pub fn fig3() -> TimedAutomaton {
    parse_automaton(FIG3).expect("bundled model parses")
}

pub fn fig4() -> TimedAutomaton {
    parse_automaton(FIG4).expect("bundled model parses")
}
