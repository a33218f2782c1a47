//! The `robust-tba` command line.
//!
//! Exit codes: 0 controllable (or success), 1 not controllable (or invalid
//! witness), 2 search budget exceeded, 3 bad input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dot;
use crate::game::{
    simulate, Controller, GameConfig, LyapunovTracker, Observer, Perturbator, PlayState, RandomPerturbator, Scripted,
    ScriptedController, SigmaP, WitnessController,
};
use crate::model::{fmt_rational, int, parse_automaton, parse_rational, TimedAutomaton};
use crate::orbit::{fog_of_cycle, orbit_of_path};
use crate::region::{atomic_steps_from, build_region_automaton, initial_states, AtomicStep, Region, RegionState};
use crate::slice::{slice_of, slice_representative};
use crate::synthesis::{class_name, decide_with, validate, AnchorPolicy, Budget, LassoWitness, SearchConfig, SynthesisError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "robust-tba", version, about = "Robust controller synthesis for timed Büchi automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide robust controllability and print the verdict as JSON
    Check {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Include wall time in the statistics
        #[arg(long)]
        timing: bool,
    },
    /// Print the reachable region automaton as DOT
    Regions { file: PathBuf },
    /// Fold the region cycles that follow a location sequence from an anchor
    Fog {
        file: PathBuf,
        /// Anchor region state, written `location: constraint`
        #[arg(long)]
        anchor: String,
        /// Locations of the cycle, comma separated, starting at the anchor
        #[arg(long, value_delimiter = ',')]
        cycle: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Play a strategy against a perturbator and print the trace
    Simulate {
        file: PathBuf,
        /// Perturbation bound; defaults to half the certified bound
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = ControllerKind::Witness)]
        controller: ControllerKind,
        #[arg(long, value_enum, default_value_t = PerturbatorKind::Sigma)]
        perturbator: PerturbatorKind,
        /// Location cycle for the scripted controllers
        #[arg(long, value_delimiter = ',')]
        cycle: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Re-check a witness, given as a verdict or as a bare witness object
    Validate { file: PathBuf, witness: PathBuf },
}

#[derive(clap::Args, Debug)]
struct SearchArgs {
    /// Caps on region states and orbit-graph triples, as `states,fogs`
    #[arg(long)]
    budget: Option<String>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Anchors::Any)]
    anchors: Anchors,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Anchors {
    Any,
    Buchi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ControllerKind {
    Witness,
    Early,
    Mid,
    Late,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PerturbatorKind {
    Sigma,
    Random,
}

struct Failure(i32, String);

fn input(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INPUT, msg.into())
}

/// Runs the command line `argv` (program name first).
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = String::new();
    let code = match dispatch(cli.command, &mut buf) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    };
    let _ = out.write_all(buf.as_bytes());
    code
}

fn load(path: &PathBuf) -> Result<TimedAutomaton, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_automaton(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn search_config(s: &SearchArgs) -> Result<SearchConfig, Failure> {
    let mut budget = Budget::default();
    if let Some(b) = &s.budget {
        let parts: Vec<&str> = b.split(',').map(str::trim).collect();
        let parse = |p: &str| p.parse::<usize>().map_err(|_| input(format!("bad budget {b:?}")));
        match parts.as_slice() {
            [st] => budget.states = parse(st)?,
            [st, f] => {
                budget.states = parse(st)?;
                budget.fogs = parse(f)?;
            }
            _ => return Err(input(format!("bad budget {b:?}, expected states,fogs"))),
        }
    }
    let policy = match s.anchors {
        Anchors::Any => AnchorPolicy::AnyOnCycle,
        Anchors::Buchi => AnchorPolicy::BuchiOnly,
    };
    Ok(SearchConfig { budget, threads: s.threads, policy, shuffle: None })
}

fn synthesis_failure(e: SynthesisError) -> Failure {
    match e {
        SynthesisError::Budget { .. } => Failure(EXIT_BUDGET, e.to_string()),
        SynthesisError::Unsound(_) => Failure(EXIT_INPUT, e.to_string()),
    }
}

fn to_json(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn locations(a: &TimedAutomaton, names: &[String]) -> Result<Vec<usize>, Failure> {
    names.iter().map(|n| a.location_index(n).ok_or_else(|| input(format!("unknown location {n:?}")))).collect()
}

fn parse_anchor(a: &TimedAutomaton, text: &str) -> Result<RegionState, Failure> {
    let (loc, guard) = text.split_once(':').ok_or_else(|| input("anchor must look like `location: constraint`"))?;
    let l = a.location_index(loc.trim()).ok_or_else(|| input(format!("unknown location {:?}", loc.trim())))?;
    let r = Region::parse(guard.trim(), a.clocks(), a.bound())
        .map_err(|e| input(format!("anchor: {e}")))?
        .ok_or_else(|| input(format!("{:?} is not a single region", guard.trim())))?;
    Ok(RegionState::new(l, r))
}

/// Every region cycle from `anchor` whose edges visit `locs` in order and
/// come back to the anchor.
pub fn cycles_along(a: &TimedAutomaton, anchor: &RegionState, locs: &[usize]) -> Vec<Vec<AtomicStep>> {
    let mut out = Vec::new();
    let mut stack: Vec<(RegionState, Vec<AtomicStep>)> = vec![(anchor.clone(), Vec::new())];
    while let Some((s, path)) = stack.pop() {
        let i = path.len();
        let next = locs[(i + 1) % locs.len()];
        for step in atomic_steps_from(a, &s, false) {
            if step.target.location != next {
                continue;
            }
            let mut p = path.clone();
            p.push(step.clone());
            if p.len() == locs.len() {
                if step.target == *anchor {
                    out.push(p);
                }
            } else {
                stack.push((step.target, p));
            }
        }
    }
    out.sort_by_key(|p| p.iter().map(|s| (s.delay.clone(), s.edge)).collect::<Vec<_>>());
    out
}

fn dispatch(cmd: Command, out: &mut String) -> Result<i32, Failure> {
    match cmd {
        Command::Check { file, search, timing } => {
            let a = load(&file)?;
            let v = decide_with(&a, &search_config(&search)?).map_err(synthesis_failure)?;
            let mut j = v.to_json(&a, timing);
            if let Some(g) = a.initial_constraint() {
                // not part of the plain automaton format: runs start at 0 otherwise
                j["extensions"] = json!({ "initial_constraint": g.display(a.clocks()).to_string() });
            }
            out.push_str(&to_json(&j));
            Ok(if v.controllable { EXIT_OK } else { EXIT_NO })
        }
        Command::Regions { file } => {
            let a = load(&file)?;
            out.push_str(&dot::region_automaton(&a, &build_region_automaton(&a)));
            Ok(EXIT_OK)
        }
        Command::Fog { file, anchor, cycle, format } => {
            let a = load(&file)?;
            let anchor = parse_anchor(&a, &anchor)?;
            let locs = locations(&a, &cycle)?;
            if locs.first() != Some(&anchor.location) {
                return Err(input("the cycle must start at the anchor's location"));
            }
            let cycles = cycles_along(&a, &anchor, &locs);
            if cycles.is_empty() {
                return Err(input("no region cycle follows these locations from the anchor"));
            }
            let mut listed = Vec::new();
            for steps in &cycles {
                let f = fog_of_cycle(steps, a.bound()).expect("cycles fold");
                let class = f.iterate_classify().map(|c| class_name(&c)).unwrap_or_else(|e| e.to_string());
                let robust = steps.iter().all(AtomicStep::is_robust);
                match format {
                    Format::Dot => {
                        let path: Vec<String> =
                            steps.iter().map(|s| format!("{}", s.delay.display(a.clocks()))).collect();
                        let title = format!("{class}, robust: {robust}\ndelays: {}", path.join(" | "));
                        out.push_str(&dot::fog(&a, &f, &title));
                        if cycles.len() == 1 {
                            out.push_str(&dot::orbit_graph(&a, &orbit_of_path(steps, a.bound()).expect("cycles unfold")));
                        }
                    }
                    _ => listed.push(json!({
                        "delays": steps.iter().map(|s| s.delay.display(a.clocks()).to_string()).collect::<Vec<_>>(),
                        "edges": steps.iter().map(|s| s.edge).collect::<Vec<_>>(),
                        "fog": f.rel.edges(),
                        "class": class,
                        "robust": robust,
                    })),
                }
            }
            if format != Format::Dot {
                out.push_str(&to_json(&json!({ "cycles": listed })));
            }
            Ok(EXIT_OK)
        }
        Command::Simulate { file, delta, seed, max_steps, controller, perturbator, cycle, format, search } => {
            let a = load(&file)?;
            let delta = match &delta {
                Some(d) => Some(parse_rational(d).filter(|q| *q > int(0)).ok_or_else(|| input(format!("bad delta {d:?}")))?),
                None => None,
            };
            let mut pert: Box<dyn Perturbator> = match perturbator {
                PerturbatorKind::Sigma => Box::new(SigmaP),
                PerturbatorKind::Random => Box::new(RandomPerturbator::new(seed)),
            };
            let trace = match controller {
                ControllerKind::Witness => {
                    let v = decide_with(&a, &search_config(&search)?).map_err(synthesis_failure)?;
                    let Some(w) = v.witness else {
                        return Err(Failure(EXIT_NO, "not controllable: no witness strategy to play".into()));
                    };
                    let delta = delta.unwrap_or_else(|| &w.delta0 / int(2));
                    let mut cont = WitnessController::new(&a, &w, &delta).map_err(|e| input(e.to_string()))?;
                    let start = if w.prefix.is_empty() {
                        let weights = slice_of(&w.anchor().region.representative(), &w.partition).expect("barycentre");
                        PlayState::new(w.anchor().location, slice_representative(&w.partition, &weights).expect("cluster"))
                    } else {
                        let v = cont.winning_start().interior_point().expect("non-empty start set");
                        PlayState::new(w.start.location, v)
                    };
                    let obs = Observer { anchor: w.anchor().clone(), partition: Some(w.partition.clone()), lyapunov: None };
                    simulate(&a, &GameConfig { delta, max_steps }, start, &mut cont, pert.as_mut(), Some(&obs))
                }
                kind => {
                    let locs = locations(&a, &cycle)?;
                    if locs.is_empty() {
                        return Err(input("scripted controllers need --cycle"));
                    }
                    let delta = delta.ok_or_else(|| input("scripted controllers need --delta"))?;
                    let mode = match kind {
                        ControllerKind::Early => Scripted::Early,
                        ControllerKind::Mid => Scripted::Mid,
                        ControllerKind::Late => Scripted::Late,
                        _ => Scripted::Random(seed),
                    };
                    let mut cont: Box<dyn Controller> = Box::new(ScriptedController::new(locs, mode));
                    let init = initial_states(&a).into_iter().next().expect("some initial region");
                    let start = PlayState::new(init.location, init.region.representative());
                    let obs = Observer { anchor: init, partition: None, lyapunov: None };
                    let mut t = simulate(&a, &GameConfig { delta, max_steps }, start, cont.as_mut(), pert.as_mut(), Some(&obs));
                    if let Some(drain) = t.first_drain() {
                        t.track(&LyapunovTracker::new(drain));
                    }
                    t
                }
            };
            match format {
                Format::Csv => out.push_str(&trace.visits_csv()),
                _ => out.push_str(&trace.to_jsonl(&a)),
            }
            Ok(EXIT_OK)
        }
        Command::Validate { file, witness } => {
            let a = load(&file)?;
            let text = std::fs::read_to_string(&witness).map_err(|e| input(format!("{}: {e}", witness.display())))?;
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", witness.display())))?;
            let w = v.get("witness").unwrap_or(&v);
            let w = LassoWitness::from_json(&a, w).map_err(|e| input(e.to_string()))?;
            match validate(&w, &a) {
                Ok(cert) => {
                    out.push_str(&to_json(&json!({
                        "valid": true,
                        "delta0": fmt_rational(&cert.delta0),
                        "weights": cert.weights.iter().map(fmt_rational).collect::<Vec<_>>(),
                    })));
                    Ok(EXIT_OK)
                }
                Err(failures) => {
                    out.push_str(&to_json(&json!({ "valid": false, "failures": failures })));
                    Ok(EXIT_NO)
                }
            }
        }
    }
}
