//! Decide robust controllability and print the verdict as JSON.
//!
//!     cargo run --example synthesize [file.ta]

use robust_tba::model::parse_automaton;
use robust_tba::synthesis::{decide_with, validate, SearchConfig};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(p) => std::fs::read_to_string(p).expect("readable model"),
        None => robust_tba::samples::FIG3.to_string(),
    };
    let a = parse_automaton(&text).expect("model parses");
    let cfg = SearchConfig { threads: 2, ..SearchConfig::default() };
    let v = decide_with(&a, &cfg).expect("within budget");
    println!("{}", serde_json::to_string_pretty(&v.to_json(&a, false)).unwrap());
    if let Some(w) = &v.witness {
        let cert = validate(w, &a).expect("witness validates");
        eprintln!("certified for every δ up to {}", cert.delta0);
    }
}
