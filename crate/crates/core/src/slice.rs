//! Corner partitions, slices of a region and the corner-weight transport
//! oracle.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::dbm::{Bound, Dbm};
use crate::model::{int, Rational, Valuation};
use crate::orbit::FoldedOrbitGraph;
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("folded orbit graph is not a cluster graph")]
    NotCluster,
    #[error("colour {0} is split over several runs of corners")]
    NotIntervals(usize),
    #[error("valuation lies outside the region")]
    OutsideRegion,
    #[error("expected {expected} colour weights, got {got}")]
    WeightCount { expected: usize, got: usize },
}

/// A colouring of the corners `c₀ … c_m` of a region; `c₀` has colour 0
/// and the others are numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CornerPartition {
    region: Region,
    colors: Vec<usize>,
    count: usize,
}

impl CornerPartition {
    /// Builds a partition from corner classes, renumbering colours.
    pub fn from_classes(region: &Region, classes: &[Vec<usize>]) -> Self {
        let n = region.corner_count();
        let mut raw = vec![usize::MAX; n];
        for (k, cl) in classes.iter().enumerate() {
            for &i in cl {
                raw[i] = k;
            }
        }
        assert!(raw.iter().all(|&c| c != usize::MAX), "classes must cover every corner");
        Self::from_colors(region, &raw)
    }

    pub fn from_colors(region: &Region, raw: &[usize]) -> Self {
        assert_eq!(raw.len(), region.corner_count());
        let mut map: Vec<(usize, usize)> = Vec::new();
        let colors = raw
            .iter()
            .map(|&c| match map.iter().find(|(r, _)| *r == c) {
                Some(&(_, n)) => n,
                None => {
                    map.push((c, map.len()));
                    map.len() - 1
                }
            })
            .collect();
        CornerPartition { region: region.clone(), colors, count: map.len() }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.count
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        (0..self.count).map(|k| (0..self.colors.len()).filter(|&i| self.colors[i] == k).collect()).collect()
    }
}

/// Colours are the SCCs of a cluster graph.
pub fn cluster_corner_partition(f: &FoldedOrbitGraph) -> Result<CornerPartition, SliceError> {
    if !f.is_cluster() {
        return Err(SliceError::NotCluster);
    }
    Ok(CornerPartition::from_classes(&f.region, &f.sccs()))
}

/// `P = {p₀ < … < p_k}` with `C₀ = [0, p₀] ∪ (p_k, m]` and
/// `C_j = (p_{j−1}, p_j]`.
pub fn splitting_positions(p: &CornerPartition) -> Result<Vec<usize>, SliceError> {
    let mut runs: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &c) in p.colors.iter().enumerate() {
        match runs.last_mut() {
            Some(r) if r.0 == c => r.2 = i,
            _ => runs.push((c, i, i)),
        }
    }
    let wraps = runs.len() > 1 && runs.last().unwrap().0 == 0;
    let kept = if wraps { &runs[..runs.len() - 1] } else { &runs[..] };
    for (j, r) in kept.iter().enumerate() {
        if r.0 != j {
            return Err(SliceError::NotIntervals(r.0));
        }
    }
    Ok(kept.iter().map(|r| r.2).collect())
}

/// Per-colour sums of the corner weights of `v`.
pub fn slice_of(v: &Valuation, p: &CornerPartition) -> Result<Vec<Rational>, SliceError> {
    let lambda = p.region.corner_weights(v).ok_or(SliceError::OutsideRegion)?;
    let mut w = vec![Rational::zero(); p.count];
    for (l, &c) in lambda.iter().zip(&p.colors) {
        w[c] += l;
    }
    Ok(w)
}

/// Lexicographically least clock of block `t`; `None` is the reference
/// clock (block 0 stands for the constant 0).
fn block_clock(r: &Region, t: usize) -> Option<usize> {
    (t > 0).then(|| r.blocks()[t - 1][0])
}

/// The equalities `x_a − x_b = c` cutting the slice out of its region, on
/// DBM indices (0 is the reference clock).
pub fn slice_equalities(p: &CornerPartition, w: &[Rational]) -> Result<Vec<(usize, usize, Rational)>, SliceError> {
    if w.len() != p.count {
        return Err(SliceError::WeightCount { expected: p.count, got: w.len() });
    }
    let pos = splitting_positions(p)?;
    let r = &p.region;
    let m = r.dim();
    let iota = |x: Option<usize>| x.map_or(0, |c| r.iota()[c]);
    let idx = |x: Option<usize>| x.map_or(0, |c| c + 1);
    let mut eqs = Vec::new();
    let (p0, pk) = (pos[0], *pos.last().unwrap());
    if p0 < m {
        let a = block_clock(r, m - p0);
        let b = block_clock(r, m - pk);
        eqs.push((idx(a), idx(b), int(1 + iota(a) - iota(b)) - &w[0]));
    }
    for j in 1..pos.len() {
        let a = block_clock(r, m - pos[j - 1]);
        let b = block_clock(r, m - pos[j]);
        eqs.push((idx(a), idx(b), int(iota(a) - iota(b)) + &w[j]));
    }
    Ok(eqs)
}

/// The slice `{ν ∈ r | slice_of(ν) = w}` as a zone.
pub fn slice_to_zone(p: &CornerPartition, w: &[Rational]) -> Result<Dbm, SliceError> {
    let eqs = slice_equalities(p, w)?;
    let r = &p.region;
    let bound = r.iota().iter().copied().max().unwrap_or(0) + 1;
    let mut z = r.to_dbm(bound);
    for (a, b, c) in eqs {
        z = z.constrain(a, b, Bound::le(c.clone())).constrain(b, a, Bound::le(-c));
    }
    Ok(z)
}

/// Same zone as [`slice_to_zone`], placed in `[0, bound]^X`.
pub fn slice_zone_in(p: &CornerPartition, w: &[Rational], bound: i64) -> Result<Dbm, SliceError> {
    let z = slice_to_zone(p, w)?;
    Ok(Dbm::universe(z.clocks(), bound).intersect(&rebound(&z, bound)))
}

fn rebound(z: &Dbm, bound: i64) -> Dbm {
    if z.is_empty() {
        return Dbm::empty(z.clocks(), bound);
    }
    Dbm::from_entries(z.clocks(), bound, z.entries().to_vec())
}

/// The valuation giving each corner of colour `j` the weight `w_j / |C_j|`.
pub fn slice_representative(p: &CornerPartition, w: &[Rational]) -> Result<Valuation, SliceError> {
    if w.len() != p.count {
        return Err(SliceError::WeightCount { expected: p.count, got: w.len() });
    }
    let sizes: Vec<usize> = p.classes().iter().map(Vec::len).collect();
    let lambda: Vec<Rational> = p.colors.iter().map(|&c| &w[c] / int(sizes[c] as i64)).collect();
    Ok(p.region.combine(&lambda))
}

/// A colour weight vector together with its zone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub partition: CornerPartition,
    pub weights: Vec<Rational>,
    pub zone: Dbm,
}

impl Slice {
    pub fn new(partition: CornerPartition, weights: Vec<Rational>, bound: i64) -> Result<Self, SliceError> {
        let zone = slice_zone_in(&partition, &weights, bound)?;
        Ok(Slice { partition, weights, zone })
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        slice_of(v, &self.partition).is_ok_and(|w| w == self.weights)
    }
}

/// Whether the corner weights of `v` can be carried onto those of `v2`
/// along the edges of `f`: an exact max-flow of value 1.
pub fn flow_reachable(v: &Valuation, v2: &Valuation, f: &FoldedOrbitGraph) -> bool {
    let (Some(a), Some(b)) = (f.region.corner_weights(v), f.region.corner_weights(v2)) else {
        return false;
    };
    let n = f.size();
    // nodes: 0 source, 1..=n left, n+1..=2n right, 2n+1 sink
    let sink = 2 * n + 1;
    let size = sink + 1;
    let mut cap = vec![vec![Rational::zero(); size]; size];
    let big = Rational::one() + Rational::one();
    for i in 0..n {
        cap[0][1 + i] = a[i].clone();
        cap[1 + n + i][sink] = b[i].clone();
        for j in 0..n {
            if f.rel.get(i, j) {
                cap[1 + i][1 + n + j] = big.clone();
            }
        }
    }
    max_flow(&mut cap, 0, sink) == Rational::one()
}

/// Edmonds–Karp on a dense residual matrix.
fn max_flow(cap: &mut [Vec<Rational>], s: usize, t: usize) -> Rational {
    let n = cap.len();
    let mut total = Rational::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > Rational::zero() {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut push = None::<Rational>;
        let mut v = t;
        while v != s {
            let u = prev[v];
            push = Some(match push {
                Some(p) if p <= cap[u][v] => p,
                _ => cap[u][v].clone(),
            });
            v = u;
        }
        let push = push.unwrap();
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= &push;
            cap[v][u] += &push;
            v = u;
        }
        total += push;
    }
}
