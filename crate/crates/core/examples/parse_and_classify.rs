//! Parse an automaton and report which guards are punctual.
//!
//!     cargo run --example parse_and_classify [file.ta]

use robust_tba::model::{parse_automaton, Punctuality};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(p) => std::fs::read_to_string(p).expect("readable model"),
        None => robust_tba::samples::FIG1.to_string(),
    };
    let a = match parse_automaton(&text) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    };
    println!("{} clocks, bound {}, {} locations", a.clock_count(), a.bound(), a.locations().len());
    for (i, e) in a.edges().iter().enumerate() {
        let kind = match e.guard.punctuality() {
            Punctuality::Punctual => "punctual",
            Punctuality::NonPunctual => "non-punctual",
            Punctuality::Empty => "empty",
        };
        println!(
            "edge {i}: {} -> {} on {} is {kind}",
            a.location_name(e.source),
            a.location_name(e.target),
            e.guard.display(a.clocks())
        );
    }
}
