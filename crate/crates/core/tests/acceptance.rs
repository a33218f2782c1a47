//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_tba::dbm::{Dbm, ShrunkDbm};
use robust_tba::game::{
    epsilon, lap_bound, simulate, GameConfig, LyapunovTracker, Observer, PlayState, RandomPerturbator, Scripted,
    ScriptedController, SigmaP, TraceEnd, WitnessController,
};
use robust_tba::model::{int, rat, Rational, Valuation};
use robust_tba::orbit::{fog_of_cycle, iteration_bounds, FoldedOrbitGraph, IterationClass, Relation};
use robust_tba::region::{AtomicStep, Region, RegionPath};
use robust_tba::robust::{cpre_path, is_robust, robust_nonempty, shrunk_cpre_path, Robustness};
use robust_tba::samples;
use robust_tba::slice::{cluster_corner_partition, flow_reachable, slice_of, slice_to_zone, SliceError};
use robust_tba::synthesis::{decide, validate};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, format!("{what} took {e:?}, limit {limit:?}"))
}

fn rel(n: usize, edges: &[(usize, usize)]) -> Relation {
    Relation::from_edges(n, n, edges)
}

fn figure_fogs() -> Outcome {
    let fig1 = samples::fig1();
    let cases = [
        ("fig1 lap", fog_of_cycle(&common::two_step_cycle(&fig1), fig1.bound()), rel(2, &[(0, 0), (0, 1), (1, 1)])),
        (
            "fig3",
            {
                let a = samples::fig3();
                fog_of_cycle(&common::triangle_cycle(&a), a.bound())
            },
            rel(3, &[(0, 0), (0, 2), (2, 0), (2, 2), (1, 1)]),
        ),
        (
            "fig4",
            {
                let a = samples::fig4();
                fog_of_cycle(&common::triangle_cycle(&a), a.bound())
            },
            rel(3, &[(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (2, 0)]),
        ),
    ];
    for (name, got, want) in cases {
        let got = got.map_err(|e| format!("{name}: {e}"))?;
        ensure(got.rel == want, format!("{name}: got {:?}", got.rel.edges()))?;
    }
    // timed separately so that building the models does not count
    for (a, steps) in [
        (samples::fig1(), common::two_step_cycle(&samples::fig1())),
        (samples::fig3(), common::triangle_cycle(&samples::fig3())),
        (samples::fig4(), common::triangle_cycle(&samples::fig4())),
    ] {
        let t = Instant::now();
        fog_of_cycle(&steps, a.bound()).unwrap();
        within(t, Duration::from_secs(1), "folding")?;
    }
    Ok("three folded graphs equal the expected relations".into())
}

fn verdicts() -> Outcome {
    let t = Instant::now();
    let a = samples::fig3();
    let v = decide(&a).map_err(|e| e.to_string())?;
    ensure(v.controllable, "fig3 not controllable")?;
    let w = v.witness.ok_or("no witness")?;
    let cert = validate(&w, &a).map_err(|e| e.join("; "))?;
    within(t, Duration::from_secs(5), "fig3")?;
    let t = Instant::now();
    let v4 = decide(&samples::fig4()).map_err(|e| e.to_string())?;
    ensure(!v4.controllable, "fig4 controllable")?;
    within(t, Duration::from_secs(5), "fig4")?;
    Ok(format!("fig3 controllable (δ0 = {}), fig4 not", cert.delta0))
}

const CORPUS: usize = 300;

fn robust_equivalence() -> Outcome {
    let t = Instant::now();
    let (mut yes, mut no) = (0, 0);
    for (i, (a, steps)) in common::path_corpus(1, CORPUS).iter().enumerate() {
        let path = RegionPath::from_steps(steps[0].source.clone(), steps);
        let syntactic = is_robust(&path, a).map_err(|e| format!("path {i}: {e}"))?;
        let semantic = matches!(robust_nonempty(steps, a.bound()).map_err(|e| e.to_string())?, Robustness::Robust { .. });
        ensure(syntactic == semantic, format!("path {i}: is_robust {syntactic}, robust_nonempty {semantic}"))?;
        if syntactic {
            yes += 1;
        } else {
            no += 1;
        }
    }
    ensure(yes > 0 && no > 0, format!("corpus not mixed: {yes} robust, {no} fragile"))?;
    within(t, Duration::from_secs(60), "corpus")?;
    Ok(format!("{CORPUS} paths agree ({yes} robust, {no} fragile)"))
}

fn cpre_baseline() -> Outcome {
    for (i, (a, steps)) in common::path_corpus(1, CORPUS).iter().enumerate() {
        let last = steps.last().unwrap().target.region.to_dbm(a.bound());
        let z = cpre_path(steps, &last, &Rational::zero());
        ensure(z == steps[0].source.region.to_dbm(a.bound()), format!("path {i}: CPre⁰ differs from the first region"))?;
    }
    Ok(format!("CPre at δ = 0 is the first region on {CORPUS} paths"))
}

fn same(x: &Dbm, y: &Dbm) -> bool {
    (x.is_empty() && y.is_empty()) || x == y
}

fn shrunk_soundness() -> Outcome {
    let mut checks = 0;
    for (i, (a, steps)) in common::path_corpus(1, CORPUS).iter().enumerate() {
        let last = steps.last().unwrap().target.region.to_dbm(a.bound());
        let s = shrunk_cpre_path(steps, &ShrunkDbm::from_dbm(&last));
        let d0 = s.delta0().unwrap_or_else(|| rat(1, 2));
        for k in [1, 2, 3] {
            let d = &d0 / int(k);
            let concrete = cpre_path(steps, &last, &d);
            ensure(same(&s.instantiate(&d), &concrete), format!("path {i}: mismatch at δ = {d}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} instantiations equal the concrete CPre"))
}

fn grid(bound: i64) -> Vec<Rational> {
    let mut v: Vec<Rational> = (1..=8).flat_map(|d| (0..=bound * d).map(move |k| rat(k, d))).collect();
    v.sort();
    v.dedup();
    v
}

/// Every partition of `0..n` into classes.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let top = p.iter().max().map_or(0, |m| m + 1);
                (0..=top).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

fn slice_trinity() -> Outcome {
    let t = Instant::now();
    let (mut pairs, mut graphs, mut skipped) = (0usize, 0usize, 0usize);
    for n in 1..=2usize {
        let g = grid(1);
        let mut points: Vec<Valuation> = vec![Valuation(vec![])];
        for _ in 0..n {
            points = points.into_iter().flat_map(|p| g.iter().map(move |q| {
                let mut v = p.0.clone();
                v.push(q.clone());
                Valuation(v)
            })).collect();
        }
        for r in Region::all(n, 1) {
            let inside: Vec<&Valuation> = points.iter().filter(|v| r.contains(v)).collect();
            for colors in set_partitions(r.corner_count()) {
                let m = r.corner_count();
                let edges: Vec<(usize, usize)> =
                    (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| colors[i] == colors[j]).collect();
                let f = FoldedOrbitGraph::new(r.clone(), rel(m, &edges));
                let p = match cluster_corner_partition(&f) {
                    Ok(p) => p,
                    Err(SliceError::NotIntervals(_)) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e.to_string()),
                };
                graphs += 1;
                let weights: Vec<Vec<Rational>> = inside.iter().map(|v| slice_of(v, &p).unwrap()).collect();
                let zones: Vec<Dbm> = weights.iter().map(|w| slice_to_zone(&p, w).unwrap()).collect();
                for (a, v) in inside.iter().enumerate() {
                    for (b, v2) in inside.iter().enumerate() {
                        let eq = weights[a] == weights[b];
                        let zone = zones[a].contains(v2);
                        let flow = flow_reachable(v, v2, &f);
                        ensure(eq == zone && zone == flow, format!("{v:?} vs {v2:?}: equal {eq}, zone {zone}, flow {flow}"))?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    within(t, Duration::from_secs(120), "grid")?;
    Ok(format!("{pairs} pairs under {graphs} cluster graphs agree ({skipped} non-interval partitions skipped)"))
}

/// Sub-paths of the corpus that come back to their first region.
fn corpus_cycles() -> Vec<(i64, Vec<AtomicStep>)> {
    let mut out = Vec::new();
    for (a, steps) in common::path_corpus(1, CORPUS).into_iter().chain(common::path_corpus(2, 2000)) {
        for i in 0..steps.len() {
            for j in i..steps.len() {
                if steps[j].target.region == steps[i].source.region {
                    out.push((a.bound(), steps[i..=j].to_vec()));
                }
            }
        }
    }
    out
}

fn rob_cycle_bounds() -> Outcome {
    let mut seen = std::collections::HashSet::new();
    let (mut cluster, mut doomed) = (0, 0);
    for (bound, steps) in corpus_cycles() {
        let f = fog_of_cycle(&steps, bound).map_err(|e| e.to_string())?;
        if !seen.insert(f.clone()) {
            continue;
        }
        let class = f.iterate_classify().map_err(|e| e.to_string())?;
        let (doom_max, cluster_max) = iteration_bounds(f.region.dim());
        let k = match class {
            IterationClass::ClusterAt(k) => {
                ensure(k <= cluster_max, format!("cluster at {k} > {cluster_max}"))?;
                cluster += 1;
                k
            }
            IterationClass::Doomed(k) => {
                ensure(k <= doom_max, format!("doomed at {k} > {doom_max}"))?;
                doomed += 1;
                k
            }
        };
        for j in 1..=k {
            let p = f.power(j);
            let (c, o) = (p.is_cluster(), p.has_open_component());
            ensure(!(c && o), format!("power {j} is both cluster and open"))?;
            ensure(j == k || !(c || o), format!("power {j} < {k} already decided"))?;
        }
    }
    ensure(cluster > 0 && doomed > 0, format!("only {cluster} cluster and {doomed} doomed graphs"))?;
    Ok(format!("{} distinct graphs within bounds ({cluster} cluster, {doomed} doomed)", cluster + doomed))
}

const LAPS: usize = 1000;

fn witness_game() -> Outcome {
    let t = Instant::now();
    let a = samples::fig3();
    let w = decide(&a).map_err(|e| e.to_string())?.witness.ok_or("no witness")?;
    let delta = &w.delta0 / int(2);
    let obs = Observer { anchor: w.anchor().clone(), partition: Some(w.partition.clone()), lyapunov: None };
    let lap = w.iterated_cycle().len();
    let cfg = GameConfig { delta: delta.clone(), max_steps: LAPS * lap + w.prefix.len() };
    let start = PlayState::new(w.anchor().location, w.anchor().region.representative());
    for (name, pert) in [
        ("sigma-p", Box::new(SigmaP) as Box<dyn robust_tba::game::Perturbator>),
        ("random", Box::new(RandomPerturbator::new(17))),
    ] {
        let mut pert = pert;
        let mut cont = WitnessController::new(&a, &w, &delta).map_err(|e| e.to_string())?;
        let tr = simulate(&a, &cfg, start.clone(), &mut cont, pert.as_mut(), Some(&obs));
        ensure(tr.survived(), format!("{name}: {:?}", tr.end))?;
        ensure(tr.laps() >= LAPS, format!("{name}: only {} laps", tr.laps()))?;
        ensure(tr.constant_weights(), format!("{name}: slice weights moved"))?;
        tr.revalidate(&a)?;
    }
    within(t, Duration::from_secs(60), "game")?;
    Ok(format!("witness survives {LAPS} laps at δ = {delta} against sigma-p and random"))
}

fn fig4_observer() -> Observer {
    let a = samples::fig4();
    let steps = common::triangle_cycle(&a);
    let f = fog_of_cycle(&steps, a.bound()).unwrap();
    let drain = f.draining_scc().expect("doomed lap drains");
    Observer { anchor: steps[0].source.clone(), partition: None, lyapunov: Some(LyapunovTracker::new(drain)) }
}

fn doomed_game() -> Outcome {
    let t = Instant::now();
    let a = samples::fig4();
    let obs = fig4_observer();
    let delta = rat(1, 10);
    let eps = epsilon(&delta, a.clock_count());
    let bound = lap_bound(&eps);
    ensure(eps == rat(1, 60) && bound == 7200, format!("ε = {eps}, bound {bound}"))?;
    let cycle: Vec<usize> = ["l0", "l1", "l2"].iter().map(|l| a.location_index(l).unwrap()).collect();
    let starts = [obs.anchor.region.representative(), Valuation(vec![rat(1, 10), rat(11, 100)]), Valuation(vec![rat(1, 2), rat(99, 100)])];
    let (mut worst, mut runs, mut drains) = (0, 0, 0);
    for mode in [Scripted::Early, Scripted::Mid, Scripted::Late, Scripted::Random(1), Scripted::Random(2)] {
        for v in &starts {
            let mut cont = ScriptedController::new(cycle.clone(), mode);
            let cfg = GameConfig { delta: delta.clone(), max_steps: 3 * bound + 3 };
            let tr = simulate(&a, &cfg, PlayState::new(obs.anchor.location, v.clone()), &mut cont, &mut SigmaP, Some(&obs));
            ensure(matches!(tr.end, TraceEnd::Blocked(_)), format!("{mode:?}: {:?}", tr.end))?;
            ensure(tr.laps() <= bound, format!("{mode:?}: {} laps", tr.laps()))?;
            let (drop, monotone) = tr.lyapunov_profile();
            ensure(monotone, format!("{mode:?}: L_I increased"))?;
            if let Some(d) = drop {
                ensure(d >= &eps * &eps / int(2), format!("{mode:?}: drop {d} below ε²/2"))?;
                drains += 1;
            }
            tr.revalidate(&a)?;
            worst = worst.max(tr.laps());
            runs += 1;
        }
    }
    ensure(drains > 0, "no run completed a draining lap")?;
    within(t, Duration::from_secs(120), "game")?;
    Ok(format!("{runs} scripted runs blocked, at most {worst} laps of {bound}, {drains} with draining laps"))
}

/// A valuation of `r` with random fractional parts of denominator up to 10⁴.
fn sample_in(r: &Region, rng: &mut ChaCha8Rng) -> Valuation {
    let m = r.blocks().len();
    let den = rng.gen_range((m as i64 + 2)..=10_000);
    let mut fr: Vec<i64> = Vec::new();
    while fr.len() < m {
        let k = rng.gen_range(1..den);
        if !fr.contains(&k) {
            fr.push(k);
        }
    }
    fr.sort();
    let mut v: Vec<Rational> = r.iota().iter().map(|&i| int(i)).collect();
    for (b, k) in r.blocks().iter().zip(&fr) {
        for &c in b {
            v[c] += rat(*k, den);
        }
    }
    Valuation(v)
}

fn corner_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut shapes = 0;
    for n in 0..=3 {
        for r in Region::all(n, 1) {
            shapes += 1;
            for _ in 0..1000 {
                let v = sample_in(&r, &mut rng);
                ensure(r.contains(&v), format!("sampler left the region at {v:?}"))?;
                let l = r.corner_weights(&v).ok_or("no weights")?;
                ensure(l.iter().all(|x| *x > Rational::zero()), "weights not positive")?;
                ensure(l.iter().sum::<Rational>() == Rational::one(), "weights do not sum to 1")?;
                ensure(r.combine(&l) == v, format!("round trip lost {v:?}"))?;
            }
        }
    }
    Ok(format!("1000 valuations on each of {shapes} regions of dimension 0 to 3"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("figure FOGs", figure_fogs),
        ("verdicts", verdicts),
        ("robust path equivalence", robust_equivalence),
        ("CPre baseline", cpre_baseline),
        ("shrunk DBM soundness", shrunk_soundness),
        ("slice trinity", slice_trinity),
        ("iteration bounds", rob_cycle_bounds),
        ("witness game", witness_game),
        ("doomed game", doomed_game),
        ("corner weights", corner_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let ms = t.elapsed().as_millis();
        match r {
            Ok(m) => println!("PASS {:>2} {name}: {m} [{ms} ms]", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m} [{ms} ms]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
