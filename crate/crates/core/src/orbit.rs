//! Orbit graphs: how corner neighbourhoods travel along a region path.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::model::Guard;
use crate::region::{AtomicStep, Corner, Region};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("target region is not a time-successor of the source")]
    NotTimeSuccessor,
    #[error("region does not satisfy the guard")]
    GuardFails,
    #[error("regions do not match at the junction")]
    RegionMismatch,
    #[error("path does not end where it starts")]
    NotACycle,
    #[error("relation is not left- and right-total")]
    NotTotal,
    #[error("empty path")]
    EmptyPath,
}

/// Boolean matrix over corner indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Relation { rows, cols, bits: vec![false; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n, n);
        for i in 0..n {
            r.set(i, i);
        }
        r
    }

    pub fn from_edges(rows: usize, cols: usize, edges: &[(usize, usize)]) -> Self {
        let mut r = Relation::empty(rows, cols);
        for &(i, j) in edges {
            r.set(i, j);
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.cols + j] = true;
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.rows).flat_map(|i| (0..self.cols).map(move |j| (i, j))).filter(|&(i, j)| self.get(i, j)).collect()
    }

    /// Relational composition: first `self`, then `other`.
    pub fn then(&self, other: &Relation) -> Relation {
        assert_eq!(self.cols, other.rows, "relation shapes do not chain");
        let mut out = Relation::empty(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    for j in 0..other.cols {
                        if other.get(k, j) {
                            out.set(i, j);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_left_total(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).any(|j| self.get(i, j)))
    }

    pub fn is_right_total(&self) -> bool {
        (0..self.cols).all(|j| (0..self.rows).any(|i| self.get(i, j)))
    }

    /// Reflexive-transitive closure of a square relation.
    fn closure(&self) -> Relation {
        let n = self.rows;
        let mut r = self.clone();
        for i in 0..n {
            r.set(i, i);
        }
        for k in 0..n {
            for i in 0..n {
                if r.get(i, k) {
                    for j in 0..n {
                        if r.get(k, j) {
                            r.set(i, j);
                        }
                    }
                }
            }
        }
        r
    }

    fn symmetric(&self) -> Relation {
        let mut r = self.clone();
        for (i, j) in self.edges() {
            r.set(j, i);
        }
        r
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.edges().iter().map(|(i, j)| format!("c{i}->c{j}")).collect();
        write!(f, "{{{}}}", e.join(", "))
    }
}

fn corner_index(corners: &[Corner], c: &Corner) -> Option<usize> {
    corners.iter().position(|x| x == c)
}

/// Layered corner graph of a region path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitGraph {
    pub layers: Vec<Region>,
    pub steps: Vec<Relation>,
}

/// Every corner `c` of `r` is linked to the corners `c + d·𝟙` (`d ≥ 0`) of
/// the time-successor `r′`, including `r′ = r`.
pub fn orbit_of_delay(r: &Region, r2: &Region, bound: i64) -> Result<OrbitGraph, OrbitError> {
    if r.successor_distance(r2, bound).is_none() {
        return Err(OrbitError::NotTimeSuccessor);
    }
    let from = r.corners();
    let to = r2.corners();
    let mut rel = Relation::empty(from.len(), to.len());
    for (i, c) in from.iter().enumerate() {
        for (j, c2) in to.iter().enumerate() {
            let d = c2[0] - c[0];
            if d >= 0 && c.iter().zip(c2).all(|(a, b)| b - a == d) {
                rel.set(i, j);
            }
        }
    }
    Ok(OrbitGraph { layers: vec![r.clone(), r2.clone()], steps: vec![rel] })
}

/// `c → c[R := 0]`.
pub fn orbit_of_edge(r: &Region, guard: &Guard, resets: &[usize]) -> Result<OrbitGraph, OrbitError> {
    if !r.satisfies(guard) {
        return Err(OrbitError::GuardFails);
    }
    let target = r.reset(resets);
    let to = target.corners();
    let from = r.corners();
    let mut rel = Relation::empty(from.len(), to.len());
    for (i, c) in from.iter().enumerate() {
        let mut c2 = c.clone();
        for &x in resets {
            c2[x] = 0;
        }
        let j = corner_index(&to, &c2).expect("reset corners are corners of the reset region");
        rel.set(i, j);
    }
    Ok(OrbitGraph { layers: vec![r.clone(), target], steps: vec![rel] })
}

pub fn orbit_of_step(step: &AtomicStep, bound: i64) -> Result<OrbitGraph, OrbitError> {
    let d = orbit_of_delay(&step.source.region, &step.delay, bound)?;
    let e = orbit_of_edge(&step.delay, &step.guard, &step.resets)?;
    concat(&d, &e)
}

pub fn orbit_of_path(steps: &[AtomicStep], bound: i64) -> Result<OrbitGraph, OrbitError> {
    let (first, rest) = steps.split_first().ok_or(OrbitError::EmptyPath)?;
    let mut g = orbit_of_step(first, bound)?;
    for s in rest {
        g = concat(&g, &orbit_of_step(s, bound)?)?;
    }
    Ok(g)
}

/// Only the composed corner relation of one atomic step.
pub fn step_relation(step: &AtomicStep, bound: i64) -> Relation {
    let g = orbit_of_step(step, bound).expect("atomic steps are well-formed");
    g.steps[0].then(&g.steps[1])
}

pub fn concat(a: &OrbitGraph, b: &OrbitGraph) -> Result<OrbitGraph, OrbitError> {
    if a.layers.last() != b.layers.first() {
        return Err(OrbitError::RegionMismatch);
    }
    let mut layers = a.layers.clone();
    layers.extend(b.layers[1..].iter().cloned());
    let mut steps = a.steps.clone();
    steps.extend(b.steps.iter().cloned());
    Ok(OrbitGraph { layers, steps })
}

impl OrbitGraph {
    /// Start-to-end reachability.
    pub fn reachability(&self) -> Relation {
        let n = self.layers[0].corner_count();
        self.steps.iter().fold(Relation::identity(n), |acc, s| acc.then(s))
    }
}

pub fn fold(g: &OrbitGraph) -> Result<FoldedOrbitGraph, OrbitError> {
    if g.layers.first() != g.layers.last() {
        return Err(OrbitError::NotACycle);
    }
    Ok(FoldedOrbitGraph { region: g.layers[0].clone(), rel: g.reachability() })
}

/// The folded orbit graph of a region cycle.
pub fn fog_of_cycle(steps: &[AtomicStep], bound: i64) -> Result<FoldedOrbitGraph, OrbitError> {
    fold(&orbit_of_path(steps, bound)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IterationClass {
    /// `f^k` is a cluster graph.
    ClusterAt(usize),
    /// `f^k` has a weakly connected component that is not strongly connected.
    Doomed(usize),
}

/// Corner relation of a region cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FoldedOrbitGraph {
    pub region: Region,
    pub rel: Relation,
}

impl FoldedOrbitGraph {
    pub fn new(region: Region, rel: Relation) -> Self {
        assert_eq!(rel.rows(), region.corner_count());
        assert_eq!(rel.cols(), region.corner_count());
        FoldedOrbitGraph { region, rel }
    }

    pub fn identity(region: &Region) -> Self {
        FoldedOrbitGraph { region: region.clone(), rel: Relation::identity(region.corner_count()) }
    }

    pub fn size(&self) -> usize {
        self.rel.rows()
    }

    pub fn compose(&self, other: &FoldedOrbitGraph) -> Result<FoldedOrbitGraph, OrbitError> {
        if self.region != other.region {
            return Err(OrbitError::RegionMismatch);
        }
        Ok(FoldedOrbitGraph { region: self.region.clone(), rel: self.rel.then(&other.rel) })
    }

    pub fn power(&self, k: usize) -> FoldedOrbitGraph {
        let mut out = FoldedOrbitGraph::identity(&self.region);
        for _ in 0..k {
            out.rel = out.rel.then(&self.rel);
        }
        out
    }

    pub fn is_total(&self) -> bool {
        self.rel.is_left_total() && self.rel.is_right_total()
    }

    fn components(rel: &Relation) -> Vec<Vec<usize>> {
        let n = rel.rows();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let comp: Vec<usize> = (i..n).filter(|&j| rel.get(i, j) && rel.get(j, i)).collect();
            for &j in &comp {
                assigned[j] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Strongly connected components, ordered by least corner.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        Self::components(&self.rel.closure())
    }

    /// Weakly connected components, ordered by least corner.
    pub fn wccs(&self) -> Vec<Vec<usize>> {
        Self::components(&self.rel.symmetric().closure())
    }

    /// Disjoint union of complete graphs, self-loops included.
    pub fn is_cluster(&self) -> bool {
        self.wccs().iter().all(|c| c.iter().all(|&i| c.iter().all(|&j| self.rel.get(i, j))))
    }

    /// Some weakly connected component is not strongly connected.
    pub fn has_open_component(&self) -> bool {
        self.wccs().len() != self.sccs().len()
    }

    /// Least `k` at which `f^k` is a cluster graph or has an open component.
    pub fn iterate_classify(&self) -> Result<IterationClass, OrbitError> {
        if !self.is_total() {
            return Err(OrbitError::NotTotal);
        }
        let mut seen: HashMap<Relation, usize> = HashMap::new();
        let mut p = self.clone();
        let mut k = 1;
        loop {
            if p.is_cluster() {
                return Ok(IterationClass::ClusterAt(k));
            }
            if p.has_open_component() {
                return Ok(IterationClass::Doomed(k));
            }
            if seen.insert(p.rel.clone(), k).is_some() {
                unreachable!("powers of a total relation always end up cluster or open");
            }
            p = p.compose(self).expect("same region");
            k += 1;
        }
    }

    /// Source SCC `I` of an open weak component: nothing outside enters
    /// it, and it reaches another SCC.
    pub fn draining_scc(&self) -> Option<Vec<usize>> {
        let reach = self.rel.closure();
        let sccs = self.sccs();
        sccs.iter()
            .find(|c| {
                let inside = |j: usize| c.contains(&j);
                let entered = (0..self.size()).any(|i| !inside(i) && c.iter().any(|&j| self.rel.get(i, j)));
                let leaves = c.iter().any(|&i| (0..self.size()).any(|j| !inside(j) && reach.get(i, j)));
                !entered && leaves
            })
            .cloned()
    }
}

/// `max(1, m·(m+1)!)` and `max(1, (m+1)!)`: the largest `k` either
/// outcome of [`FoldedOrbitGraph::iterate_classify`] can take in dimension `m`.
pub fn iteration_bounds(m: usize) -> (usize, usize) {
    let fact: usize = (1..=m + 1).product();
    ((m * fact).max(1), fact.max(1))
}
