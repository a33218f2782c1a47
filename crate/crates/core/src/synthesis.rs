//! Lasso search: a robust prefix into a region state and a robust cycle
//! around it, through a Büchi location, whose folded orbit graph has a
//! cluster iterate.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dbm::{Bound, Dbm, ShrunkDbm};
use crate::model::{fmt_rational, int, Rational, TimedAutomaton};
use crate::orbit::{fog_of_cycle, step_relation, FoldedOrbitGraph, IterationClass, Relation};
use crate::region::{atomic_steps_from, check_chain, initial_states, AtomicStep, PathError, Region, RegionState};
use crate::robust::{cpre_path, shrunk_cpre_path};
use crate::slice::{cluster_corner_partition, slice_of, slice_zone_in, CornerPartition};

/// Which robustly reachable states may anchor a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AnchorPolicy {
    /// Any state; the cycle must pass through a Büchi location somewhere.
    #[default]
    AnyOnCycle,
    /// Only states at Büchi locations.
    BuchiOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Robustly reachable region states.
    pub states: usize,
    /// (state, corner relation, Büchi flag) triples over all anchors.
    pub fogs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { states: 100_000, fogs: 2_000_000 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    pub budget: Budget,
    /// Worker threads for the per-anchor searches; 0 and 1 both mean serial.
    pub threads: usize,
    pub policy: AnchorPolicy,
    /// Shuffles anchors and successor lists; the verdict must not change.
    pub shuffle: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("search budget exceeded: more than {limit} {what}")]
    Budget { what: &'static str, limit: usize },
    #[error("candidate witness failed validation: {}", .0.join("; "))]
    Unsound(Vec<String>),
}

/// `π₀ π^ω`: a robust prefix from an initial region state and a robust
/// cycle whose `k`-th power folds to a cluster graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoWitness {
    pub start: RegionState,
    pub prefix: Vec<AtomicStep>,
    pub cycle: Vec<AtomicStep>,
    pub k: usize,
    pub partition: CornerPartition,
    pub delta0: Rational,
}

impl LassoWitness {
    pub fn anchor(&self) -> &RegionState {
        &self.cycle[0].source
    }

    /// `π^k`.
    pub fn iterated_cycle(&self) -> Vec<AtomicStep> {
        self.cycle.iter().cloned().cycle().take(self.k * self.cycle.len()).collect()
    }

    pub fn to_json(&self, a: &TimedAutomaton) -> Value {
        let fog = fog_of_cycle(&self.cycle, a.bound()).map(|f| format!("{:?}", f.rel)).unwrap_or_default();
        let file = WitnessFile {
            start: StateDto::of(a, &self.start),
            prefix: self.prefix.iter().map(|s| StepDto::of(a, s)).collect(),
            anchor: StateDto::of(a, self.anchor()),
            cycle: self.cycle.iter().map(|s| StepDto::of(a, s)).collect(),
            k: self.k,
            fog,
            partition: self.partition.classes(),
            delta0: self.delta0.clone(),
        };
        serde_json::to_value(file).expect("witness serializes")
    }

    pub fn from_json(a: &TimedAutomaton, v: &Value) -> Result<Self, WitnessError> {
        let file: WitnessFile = serde_json::from_value(v.clone()).map_err(|e| WitnessError::Json(e.to_string()))?;
        let start = file.start.resolve(a)?;
        let prefix = replay(a, start.clone(), &file.prefix)?;
        let anchor = file.anchor.resolve(a)?;
        if file.cycle.is_empty() {
            return Err(WitnessError::EmptyCycle);
        }
        let cycle = replay(a, anchor.clone(), &file.cycle)?;
        let region = &anchor.region;
        let n = region.corner_count();
        if file.partition.iter().flatten().any(|&i| i >= n) || file.partition.iter().map(Vec::len).sum::<usize>() != n {
            return Err(WitnessError::Partition);
        }
        Ok(LassoWitness {
            start,
            prefix,
            cycle,
            k: file.k,
            partition: CornerPartition::from_classes(region, &file.partition),
            delta0: file.delta0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("malformed witness: {0}")]
    Json(String),
    #[error("unknown location {0:?}")]
    Location(String),
    #[error("{0:?} does not describe a single region")]
    Region(String),
    #[error("cycle has no steps")]
    EmptyCycle,
    #[error("partition does not cover the anchor's corners")]
    Partition,
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Serialize, Deserialize)]
struct WitnessFile {
    start: StateDto,
    prefix: Vec<StepDto>,
    anchor: StateDto,
    cycle: Vec<StepDto>,
    k: usize,
    #[serde(default, skip_deserializing)]
    fog: String,
    partition: Vec<Vec<usize>>,
    #[serde(with = "crate::model::serde_rational")]
    delta0: Rational,
}

#[derive(Serialize, Deserialize)]
struct StateDto {
    location: String,
    region: String,
}

impl StateDto {
    fn of(a: &TimedAutomaton, s: &RegionState) -> Self {
        StateDto { location: a.location_name(s.location).to_string(), region: s.region.display(a.clocks()).to_string() }
    }

    fn resolve(&self, a: &TimedAutomaton) -> Result<RegionState, WitnessError> {
        let l = a.location_index(&self.location).ok_or_else(|| WitnessError::Location(self.location.clone()))?;
        Ok(RegionState::new(l, parse_region(a, &self.region)?))
    }
}

#[derive(Serialize, Deserialize)]
struct StepDto {
    delay: String,
    edge: usize,
    #[serde(default, skip_deserializing)]
    to: String,
}

impl StepDto {
    fn of(a: &TimedAutomaton, s: &AtomicStep) -> Self {
        StepDto {
            delay: s.delay.display(a.clocks()).to_string(),
            edge: s.edge,
            to: a.location_name(s.target.location).to_string(),
        }
    }
}

fn parse_region(a: &TimedAutomaton, text: &str) -> Result<Region, WitnessError> {
    match Region::parse(text, a.clocks(), a.bound()) {
        Ok(Some(r)) => Ok(r),
        _ => Err(WitnessError::Region(text.to_string())),
    }
}

fn replay(a: &TimedAutomaton, mut state: RegionState, steps: &[StepDto]) -> Result<Vec<AtomicStep>, WitnessError> {
    let mut out = Vec::new();
    for s in steps {
        let step = AtomicStep::new(a, state, parse_region(a, &s.delay)?, s.edge)?;
        state = step.target.clone();
        out.push(step);
    }
    Ok(out)
}

/// How the cycles around one anchor were classified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorSummary {
    pub anchor: RegionState,
    /// Distinct corner relations of cycles through a Büchi location.
    pub cycles: usize,
    pub classes: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub regions: usize,
    pub fogs: usize,
    pub millis: u128,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub controllable: bool,
    pub witness: Option<LassoWitness>,
    pub refutation: Vec<AnchorSummary>,
    pub stats: Stats,
}

impl Verdict {
    /// Wall time is only included on request so that output stays
    /// reproducible byte for byte.
    pub fn to_json(&self, a: &TimedAutomaton, timing: bool) -> Value {
        let mut stats = json!({ "regions": self.stats.regions, "fogs": self.stats.fogs });
        if timing {
            stats["time_ms"] = json!(self.stats.millis);
        }
        let mut out = json!({ "controllable": self.controllable });
        match &self.witness {
            Some(w) => out["witness"] = w.to_json(a),
            None => {
                out["refutation"] = self
                    .refutation
                    .iter()
                    .map(|s| {
                        json!({
                            "anchor": StateDto::of(a, &s.anchor),
                            "cycles": s.cycles,
                            "classes": s.classes,
                        })
                    })
                    .collect();
            }
        }
        out["stats"] = stats;
        out
    }
}

pub fn class_name(c: &IterationClass) -> String {
    match c {
        IterationClass::ClusterAt(k) => format!("cluster({k})"),
        IterationClass::Doomed(k) => format!("doomed({k})"),
    }
}

/// Region states reachable by robust atomic steps, with BFS parents.
struct Reach {
    states: Vec<RegionState>,
    parent: Vec<Option<(usize, usize)>>,
    succ: Vec<Vec<(usize, AtomicStep, Relation)>>,
}

impl Reach {
    fn explore(a: &TimedAutomaton, cfg: &SearchConfig) -> Result<Reach, SynthesisError> {
        let mut rng = cfg.shuffle.map(ChaCha8Rng::seed_from_u64);
        let mut states = Vec::new();
        let mut parent = Vec::new();
        let mut succ = Vec::new();
        let mut index = HashMap::new();
        let mut queue = VecDeque::new();
        for s in initial_states(a) {
            if !index.contains_key(&s) {
                index.insert(s.clone(), states.len());
                queue.push_back(states.len());
                states.push(s);
                parent.push(None);
            }
        }
        while let Some(i) = queue.pop_front() {
            let mut out = Vec::new();
            for step in atomic_steps_from(a, &states[i], true) {
                let j = match index.get(&step.target) {
                    Some(&j) => j,
                    None => {
                        if states.len() >= cfg.budget.states {
                            return Err(SynthesisError::Budget { what: "region states", limit: cfg.budget.states });
                        }
                        let j = states.len();
                        index.insert(step.target.clone(), j);
                        states.push(step.target.clone());
                        parent.push(Some((i, out.len())));
                        queue.push_back(j);
                        j
                    }
                };
                let rel = step_relation(&step, a.bound());
                out.push((j, step, rel));
            }
            if let Some(rng) = rng.as_mut() {
                // parents point into `out`, so shuffle a copy of the order only
                let mut order: Vec<usize> = (0..out.len()).collect();
                order.shuffle(rng);
                let moved: Vec<_> = order.iter().map(|&k| out[k].clone()).collect();
                for (p, q) in parent.iter_mut().flatten() {
                    if *p == i {
                        *q = order.iter().position(|&k| k == *q).unwrap();
                    }
                }
                out = moved;
            }
            succ.push(out);
        }
        Ok(Reach { states, parent, succ })
    }

    fn prefix(&self, mut i: usize) -> (RegionState, Vec<AtomicStep>) {
        let mut steps = Vec::new();
        while let Some((p, k)) = self.parent[i] {
            steps.push(self.succ[p][k].1.clone());
            i = p;
        }
        steps.reverse();
        (self.states[i].clone(), steps)
    }
}

struct Candidate {
    anchor: usize,
    cycle: Vec<AtomicStep>,
    k: usize,
    fog: FoldedOrbitGraph,
}

/// Saturates `(state, corner relation, Büchi flag)` triples from `anchor`
/// in BFS order and stops at the first cycle whose relation has a cluster
/// iterate, which is then a shortest one.
fn search_anchor(
    a: &TimedAutomaton,
    reach: &Reach,
    anchor: usize,
    counter: &AtomicUsize,
    budget: usize,
) -> Result<(Option<Candidate>, AnchorSummary), SynthesisError> {
    let region = &reach.states[anchor].region;
    let n = region.corner_count();
    let start = (anchor, Relation::identity(n), a.is_buchi(reach.states[anchor].location));
    let mut seen: HashMap<(usize, Relation, bool), usize> = HashMap::new();
    let mut nodes: Vec<((usize, Relation, bool), Option<(usize, usize)>)> = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone(), 0);
    nodes.push((start, None));
    queue.push_back(0);
    let mut classified: HashMap<Relation, Option<IterationClass>> = HashMap::new();
    let mut summary = AnchorSummary { anchor: reach.states[anchor].clone(), cycles: 0, classes: BTreeMap::new() };
    let path_to = |nodes: &[((usize, Relation, bool), Option<(usize, usize)>)], mut id: usize| {
        let mut steps = Vec::new();
        while let Some((p, k)) = nodes[id].1 {
            steps.push(reach.succ[nodes[p].0 .0][k].1.clone());
            id = p;
        }
        steps.reverse();
        steps
    };
    while let Some(id) = queue.pop_front() {
        let (state, rel, flag) = nodes[id].0.clone();
        for (k, (t, step, srel)) in reach.succ[state].iter().enumerate() {
            let rel2 = rel.then(srel);
            let flag2 = flag || a.is_buchi(reach.states[*t].location);
            if *t == anchor && flag2 && !classified.contains_key(&rel2) {
                let fog = FoldedOrbitGraph::new(region.clone(), rel2.clone());
                let class = fog.iterate_classify().ok();
                let name = class.as_ref().map_or_else(|| "not-total".to_string(), class_name);
                summary.cycles += 1;
                *summary.classes.entry(name).or_default() += 1;
                classified.insert(rel2.clone(), class);
                if let Some(IterationClass::ClusterAt(kk)) = class {
                    let mut cycle = path_to(&nodes, id);
                    cycle.push(step.clone());
                    return Ok((Some(Candidate { anchor, cycle, k: kk, fog }), summary));
                }
            }
            let key = (*t, rel2, flag2);
            if !seen.contains_key(&key) {
                if counter.fetch_add(1, Ordering::Relaxed) >= budget {
                    return Err(SynthesisError::Budget { what: "orbit-graph triples", limit: budget });
                }
                seen.insert(key.clone(), nodes.len());
                queue.push_back(nodes.len());
                nodes.push((key, Some((id, k))));
            }
        }
    }
    Ok((None, summary))
}

pub fn decide(a: &TimedAutomaton) -> Result<Verdict, SynthesisError> {
    decide_with(a, &SearchConfig::default())
}

pub fn decide_with(a: &TimedAutomaton, cfg: &SearchConfig) -> Result<Verdict, SynthesisError> {
    let clock = Instant::now();
    let reach = Reach::explore(a, cfg)?;
    let mut anchors: Vec<usize> = (0..reach.states.len())
        .filter(|&i| cfg.policy == AnchorPolicy::AnyOnCycle || a.is_buchi(reach.states[i].location))
        .collect();
    if let Some(seed) = cfg.shuffle {
        anchors.shuffle(&mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(1)));
    }
    let counter = AtomicUsize::new(0);
    let threads = cfg.threads.max(1).min(anchors.len().max(1));
    let results: Vec<Result<(Option<Candidate>, AnchorSummary), SynthesisError>> = if threads == 1 {
        anchors.iter().map(|&i| search_anchor(a, &reach, i, &counter, cfg.budget.fogs)).collect()
    } else {
        let chunk = anchors.len().div_ceil(threads);
        std::thread::scope(|sc| {
            let handles: Vec<_> = anchors
                .chunks(chunk)
                .map(|part| {
                    let (reach, counter) = (&reach, &counter);
                    sc.spawn(move || {
                        part.iter().map(|&i| search_anchor(a, reach, i, counter, cfg.budget.fogs)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("search thread panicked")).collect()
        })
    };
    let mut candidates = Vec::new();
    let mut refutation = Vec::new();
    for r in results {
        let (cand, summary) = r?;
        refutation.push(summary);
        candidates.extend(cand);
    }
    refutation.sort_by_key(|s| reach.states.iter().position(|x| *x == s.anchor));
    // shortest cycle, then shortest prefix, then discovery order of the anchor
    candidates.sort_by_key(|c| (c.cycle.len(), reach.prefix(c.anchor).1.len(), c.anchor));
    let stats = |millis| Stats { regions: reach.states.len(), fogs: counter.load(Ordering::Relaxed), millis };
    let mut failures = Vec::new();
    for c in candidates {
        let (start, prefix) = reach.prefix(c.anchor);
        let partition = cluster_corner_partition(&c.fog.power(c.k)).expect("cluster iterate");
        let mut w = LassoWitness { start, prefix, cycle: c.cycle, k: c.k, partition, delta0: Rational::zero() };
        match certify(&w, a) {
            Ok(cert) => {
                w.delta0 = cert.delta0;
                return Ok(Verdict {
                    controllable: true,
                    witness: Some(w),
                    refutation: Vec::new(),
                    stats: stats(clock.elapsed().as_millis()),
                });
            }
            Err(f) => failures.extend(f),
        }
    }
    if !failures.is_empty() {
        return Err(SynthesisError::Unsound(failures));
    }
    Ok(Verdict { controllable: false, witness: None, refutation, stats: stats(clock.elapsed().as_millis()) })
}

/// What [`validate`] derives: the zone the strategy keeps the play in at
/// the anchor and the largest safe perturbation it found.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub delta0: Rational,
    pub fog: FoldedOrbitGraph,
    /// Colour weights of the slice through the anchor's barycentre.
    pub weights: Vec<Rational>,
    /// `N ∩ slice`, invariant under the `k`-fold cycle.
    pub zone: Dbm,
}

/// Strict region constraints pulled inwards by `η = 1/(4(n+1))`: every
/// shrinking of the region eventually contains it.
pub fn inner_zone(r: &Region, bound: i64) -> Dbm {
    let eta = Rational::new(1.into(), (4 * (r.clocks() + 1) as i64).into());
    let z = r.to_dbm(bound);
    let entries = z
        .entries()
        .iter()
        .map(|b| match b {
            Bound::Fin(c, true) => Bound::Fin(c - &eta, false),
            b => b.clone(),
        })
        .collect();
    Dbm::from_entries(z.clocks(), bound, entries)
}

/// Checks every structural invariant of `w` and derives a perturbation
/// bound for which the slice zone at the anchor is self-reachable.
fn certify(w: &LassoWitness, a: &TimedAutomaton) -> Result<Certificate, Vec<String>> {
    let bound = a.bound();
    let mut fail = Vec::new();
    if !initial_states(a).contains(&w.start) {
        fail.push("prefix does not start in an initial region state".to_string());
    }
    match w.prefix.first() {
        Some(s) if s.source != w.start => fail.push("prefix does not start at its start state".to_string()),
        None if w.start != *w.anchor() => fail.push("empty prefix but start is not the anchor".to_string()),
        _ => {}
    }
    if let Some(last) = w.prefix.last() {
        if last.target != *w.anchor() {
            fail.push("prefix does not end at the anchor".to_string());
        }
    }
    if let Err(e) = check_chain(&w.prefix) {
        fail.push(format!("prefix: {e}"));
    }
    if let Err(e) = check_chain(&w.cycle) {
        fail.push(format!("cycle: {e}"));
    }
    if w.cycle.last().map(|s| &s.target) != Some(w.anchor()) {
        fail.push("cycle does not return to the anchor".to_string());
    }
    if !w.cycle.iter().any(|s| a.is_buchi(s.source.location)) {
        fail.push("cycle visits no Büchi location".to_string());
    }
    if let Some(i) = w.prefix.iter().position(|s| !s.is_robust()) {
        fail.push(format!("prefix step {i} is not robust"));
    }
    if let Some(i) = w.cycle.iter().position(|s| !s.is_robust()) {
        fail.push(format!("cycle step {i} is not robust"));
    }
    if !fail.is_empty() {
        return Err(fail);
    }
    let fog = match fog_of_cycle(&w.cycle, bound) {
        Ok(f) => f,
        Err(e) => return Err(vec![format!("folded orbit graph: {e}")]),
    };
    match fog.iterate_classify() {
        Ok(IterationClass::ClusterAt(k)) if k == w.k => {}
        Ok(c) => fail.push(format!("iterate_classify gives {} but the witness claims cluster({})", class_name(&c), w.k)),
        Err(e) => fail.push(format!("iterate_classify: {e}")),
    }
    let power = fog.power(w.k);
    if !power.is_cluster() {
        fail.push(format!("is_cluster fails for the {}-th power of the cycle", w.k));
    } else if cluster_corner_partition(&power).ok().as_ref() != Some(&w.partition) {
        fail.push("partition differs from the SCCs of the iterated cycle".to_string());
    }
    if !fail.is_empty() {
        return Err(fail);
    }

    let region = &w.anchor().region;
    let weights = slice_of(&region.representative(), &w.partition).expect("barycentre lies in its region");
    let slice = slice_zone_in(&w.partition, &weights, bound).expect("cluster partitions have interval structure");
    let zone = inner_zone(region, bound).intersect(&slice);
    let iterated = w.iterated_cycle();
    let around = shrunk_cpre_path(&iterated, &ShrunkDbm::from_dbm(&zone));
    let into = shrunk_cpre_path(&w.prefix, &ShrunkDbm::from_dbm(&zone));
    if around.is_empty() || into.is_empty() {
        return Err(vec!["controllable predecessor is empty for every δ > 0".to_string()]);
    }
    // the smallest of the exactness limits and the inclusion supremum
    let mut sup = Rational::one();
    for l in [around.limit(), into.limit()].into_iter().flatten() {
        sup = sup.min(l.clone());
    }
    match around.inclusion_sup(&zone) {
        None => return Err(vec!["slice zone is not included in its controllable predecessor for any δ > 0".to_string()]),
        Some((Some(s), _)) => sup = sup.min(s),
        Some((None, _)) => {}
    }
    // CPre only shrinks as δ grows, so one concrete check at the supremum
    // settles whether it is attained
    let holds = |d: &Rational| {
        cpre_path(&iterated, &zone, d).includes(&zone) && !cpre_path(&w.prefix, &zone, d).is_empty()
    };
    let delta0 = if holds(&sup) { sup } else { sup / int(2) };
    if !holds(&delta0) {
        return Err(vec![format!("inclusion N ∩ slice ⊆ CPre fails at δ = {}", fmt_rational(&delta0))]);
    }
    Ok(Certificate { delta0, fog, weights, zone })
}

/// Independent re-check of a witness, including the concrete inclusion
/// `N ∩ slice ⊆ CPre^δ₀_{π^k}(N ∩ slice)` at the recorded `δ₀`.
pub fn validate(w: &LassoWitness, a: &TimedAutomaton) -> Result<Certificate, Vec<String>> {
    let cert = certify(w, a)?;
    let mut fail = Vec::new();
    if w.delta0 <= Rational::zero() {
        fail.push("recorded δ₀ is not positive".to_string());
        return Err(fail);
    }
    let d = &w.delta0;
    if *d > cert.delta0 {
        fail.push(format!("recorded δ₀ = {} exceeds the certified {}", fmt_rational(d), fmt_rational(&cert.delta0)));
    }
    let around = cpre_path(&w.iterated_cycle(), &cert.zone, d);
    if !around.includes(&cert.zone) {
        fail.push(format!("inclusion N ∩ slice ⊆ CPre fails at δ = {}", fmt_rational(d)));
    }
    let shrunk = shrunk_cpre_path(&w.iterated_cycle(), &ShrunkDbm::from_dbm(&cert.zone));
    if shrunk.limit().is_some_and(|l| d < l) && shrunk.instantiate(d) != around {
        fail.push("parametric and concrete predecessors disagree".to_string());
    }
    if cpre_path(&w.prefix, &cert.zone, d).is_empty() {
        fail.push(format!("prefix cannot reach the slice zone at δ = {}", fmt_rational(d)));
    }
    if fail.is_empty() {
        Ok(Certificate { delta0: d.clone(), ..cert })
    } else {
        Err(fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_automaton, rat};
    use crate::samples;

    fn witness_of(a: &TimedAutomaton) -> LassoWitness {
        let v = decide(a).unwrap();
        assert!(v.controllable);
        v.witness.unwrap()
    }

    #[test]
    fn fig3_is_controllable() {
        let a = samples::fig3();
        let w = witness_of(&a);
        let names: Vec<&str> = w.cycle.iter().map(|s| a.location_name(s.source.location)).collect();
        assert_eq!(names, ["l0", "l1", "l2"]);
        assert!(w.prefix.is_empty());
        assert_eq!(w.k, 1);
        assert_eq!(w.partition.classes(), vec![vec![0, 2], vec![1]]);
        assert!(validate(&w, &a).is_ok());
        assert!(w.delta0 > Rational::zero());
    }

    #[test]
    fn fig4_is_not_controllable() {
        let a = samples::fig4();
        let v = decide(&a).unwrap();
        assert!(!v.controllable);
        assert!(v.refutation.iter().any(|s| s.classes.keys().any(|k| k.starts_with("doomed"))));
    }

    #[test]
    fn fig1_verdict() {
        let a = samples::fig1();
        let v = decide(&a).unwrap();
        assert!(!v.controllable);
        // every anchor only sees cycles whose relation is doomed at once
        for s in &v.refutation {
            assert!(s.classes.keys().all(|k| k == "doomed(1)"), "{s:?}");
        }
    }

    #[test]
    fn witness_round_trips_through_json() {
        let a = samples::fig3();
        let w = witness_of(&a);
        let back = LassoWitness::from_json(&a, &w.to_json(&a)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn forged_cluster_claim_is_rejected() {
        let a = samples::fig4();
        let f3 = witness_of(&samples::fig3());
        // same shape of cycle, but Fig. 4's first edge is non-punctual
        let mut v = f3.to_json(&samples::fig3());
        v["cycle"][0]["delay"] = json!("0<x && x-y<0 && y<1");
        let w = LassoWitness::from_json(&a, &v).unwrap();
        let errs = validate(&w, &a).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("is_cluster") || e.contains("iterate_classify")), "{errs:?}");
    }

    #[test]
    fn doubled_delta_breaks_the_inclusion() {
        let a = samples::fig3();
        let mut w = witness_of(&a);
        w.delta0 = &w.delta0 * int(2);
        let errs = validate(&w, &a).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("inclusion")), "{errs:?}");
    }

    #[test]
    fn threads_and_shuffles_agree() {
        for a in [samples::fig1(), samples::fig3(), samples::fig4()] {
            let base = decide(&a).unwrap();
            for cfg in [
                SearchConfig { threads: 3, ..Default::default() },
                SearchConfig { shuffle: Some(7), ..Default::default() },
                SearchConfig { shuffle: Some(8), threads: 2, ..Default::default() },
            ] {
                let v = decide_with(&a, &cfg).unwrap();
                assert_eq!(v.controllable, base.controllable);
                assert_eq!(v.stats.regions, base.stats.regions);
                if let (Some(x), Some(y)) = (&v.witness, &base.witness) {
                    assert_eq!(x.cycle.len(), y.cycle.len());
                    assert!(validate(x, &a).is_ok());
                }
            }
        }
    }

    #[test]
    fn policies_agree_on_the_figures() {
        for a in [samples::fig1(), samples::fig3(), samples::fig4()] {
            let any = decide(&a).unwrap().controllable;
            let buchi = decide_with(&a, &SearchConfig { policy: AnchorPolicy::BuchiOnly, ..Default::default() }).unwrap();
            assert_eq!(any, buchi.controllable);
        }
    }

    #[test]
    fn monotonicity() {
        let a = samples::fig3();
        let extra = format!("{}\nedge lx l0 \"x<1\"\n", samples::FIG3.replace("locations l0 l1 l2", "locations l0 l1 l2 lx"));
        let b = parse_automaton(&extra).unwrap();
        assert_eq!(decide(&b).unwrap().controllable, decide(&a).unwrap().controllable);
        let no_buchi = a.with_buchi(&[]).unwrap();
        assert!(!decide(&no_buchi).unwrap().controllable);
    }

    #[test]
    fn budget_is_reported() {
        let a = samples::fig3();
        let cfg = SearchConfig { budget: Budget { states: 1, fogs: 10 }, ..Default::default() };
        assert!(matches!(decide_with(&a, &cfg), Err(SynthesisError::Budget { .. })));
        let cfg = SearchConfig { budget: Budget { states: 1000, fogs: 1 }, ..Default::default() };
        assert!(matches!(decide_with(&a, &cfg), Err(SynthesisError::Budget { .. })));
    }

    #[test]
    fn inner_zone_is_inside_every_small_shrinking() {
        let a = samples::fig3();
        let r = &witness_of(&a).anchor().region.clone();
        let n = inner_zone(r, a.bound());
        assert!(r.to_dbm(a.bound()).includes(&n));
        assert!(n.contains(&r.representative()));
        assert!(r.to_dbm(a.bound()).shrink(&rat(1, 100)).includes(&n));
    }
}
