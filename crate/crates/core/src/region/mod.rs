//! Regions `(ι, β)`, their corners and corner weights, time successors,
//! resets, and the region automaton.

mod graph;
mod path;

pub use graph::{build_region_automaton, initial_states, RegionGraph};
pub use path::{atomic_steps_from, check_chain, AtomicStep, Move, PathError, RegionPath, RegionState};

use std::fmt;

use num_traits::{One, Zero};

use crate::dbm::Dbm;
use crate::model::{floor_i64, frac, int, parse_guard, Atom, ClockSet, Guard, ParseError, Rational, Relop, Term, Valuation};

/// Integer parts `ι` and the ordered partition `β₀ ⊎ β₁ ⊎ … ⊎ β_m`.
///
/// Clocks of `β₀` sit exactly on `ι`; clocks of `β_j` have fractional part
/// `f_j` with `0 < f_1 < … < f_m < 1`. `ι(x) = M` only for `x ∈ β₀`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    iota: Vec<i64>,
    beta0: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

/// Integer corner of a region.
pub type Corner = Vec<i64>;

impl Region {
    /// Validates and normalizes the parts (each block sorted).
    pub fn new(iota: Vec<i64>, mut beta0: Vec<usize>, mut blocks: Vec<Vec<usize>>, bound: i64) -> Option<Region> {
        let n = iota.len();
        beta0.sort_unstable();
        for b in &mut blocks {
            b.sort_unstable();
        }
        let mut seen = vec![false; n];
        for &c in beta0.iter().chain(blocks.iter().flatten()) {
            if c >= n || seen[c] {
                return None;
            }
            seen[c] = true;
        }
        if seen.contains(&false) || blocks.iter().any(|b| b.is_empty()) {
            return None;
        }
        let ok_int = beta0.iter().all(|&c| (0..=bound).contains(&iota[c]));
        let ok_frac = blocks.iter().flatten().all(|&c| (0..bound).contains(&iota[c]));
        (ok_int && ok_frac).then_some(Region { iota, beta0, blocks })
    }

    /// The region containing `v`.
    pub fn of(v: &Valuation) -> Region {
        let n = v.len();
        let iota: Vec<i64> = v.0.iter().map(floor_i64).collect();
        let fr: Vec<Rational> = v.0.iter().map(frac).collect();
        let beta0: Vec<usize> = (0..n).filter(|&c| fr[c].is_zero()).collect();
        let mut rest: Vec<usize> = (0..n).filter(|&c| !fr[c].is_zero()).collect();
        rest.sort_by(|&a, &b| fr[a].cmp(&fr[b]).then(a.cmp(&b)));
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for c in rest {
            match blocks.last_mut() {
                Some(b) if fr[b[0]] == fr[c] => b.push(c),
                _ => blocks.push(vec![c]),
            }
        }
        Region { iota, beta0, blocks }
    }

    /// The point region `𝟘`.
    pub fn origin(n: usize) -> Region {
        Region { iota: vec![0; n], beta0: (0..n).collect(), blocks: Vec::new() }
    }

    pub fn clocks(&self) -> usize {
        self.iota.len()
    }

    pub fn iota(&self) -> &[i64] {
        &self.iota
    }

    pub fn beta0(&self) -> &[usize] {
        &self.beta0
    }

    /// `β₁ … β_m`.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    /// Some clock sits on an integer, so no two points of the region are
    /// time-successors of each other.
    pub fn is_punctual(&self) -> bool {
        !self.beta0.is_empty()
    }

    /// `c₀ … c_m`: `c_i` rounds up the top `i` blocks.
    pub fn corners(&self) -> Vec<Corner> {
        let m = self.dim();
        (0..=m)
            .map(|i| {
                let mut c = self.iota.clone();
                for b in &self.blocks[m - i..] {
                    for &x in b {
                        c[x] += 1;
                    }
                }
                c
            })
            .collect()
    }

    pub fn corner_count(&self) -> usize {
        self.dim() + 1
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        v.len() == self.clocks() && Region::of(v) == *self
    }

    /// Fractional part of each block, `f_1 … f_m`, of a member valuation.
    fn block_fracs(&self, v: &Valuation) -> Vec<Rational> {
        self.blocks.iter().map(|b| frac(v.get(b[0]))).collect()
    }

    /// `λ_i = f_{m−i+1} − f_{m−i}` with `f_0 = 0`, `f_{m+1} = 1`; `None`
    /// when `v` lies outside the region.
    pub fn corner_weights(&self, v: &Valuation) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        let m = self.dim();
        let mut f = vec![Rational::zero()];
        f.extend(self.block_fracs(v));
        f.push(Rational::one());
        Some((0..=m).map(|i| &f[m - i + 1] - &f[m - i]).collect())
    }

    /// `Σ λ_i c_i`.
    pub fn combine(&self, lambda: &[Rational]) -> Valuation {
        let corners = self.corners();
        assert_eq!(lambda.len(), corners.len());
        let mut out = vec![Rational::zero(); self.clocks()];
        for (l, c) in lambda.iter().zip(&corners) {
            for (o, &ci) in out.iter_mut().zip(c) {
                *o += l * int(ci);
            }
        }
        Valuation(out)
    }

    /// Barycenter of the corners.
    pub fn representative(&self) -> Valuation {
        let m = self.dim() as i64;
        let mut v: Vec<Rational> = self.iota.iter().map(|&i| int(i)).collect();
        for (j, b) in self.blocks.iter().enumerate() {
            for &x in b {
                v[x] += Rational::new((j as i64 + 1).into(), (m + 1).into());
            }
        }
        Valuation(v)
    }

    /// The next region met when letting time elapse, if the bound allows.
    pub fn immediate_time_successor(&self, bound: i64) -> Option<Region> {
        if !self.beta0.is_empty() {
            if self.beta0.iter().any(|&x| self.iota[x] >= bound) {
                return None;
            }
            let mut blocks = Vec::with_capacity(self.blocks.len() + 1);
            blocks.push(self.beta0.clone());
            blocks.extend(self.blocks.iter().cloned());
            return Some(Region { iota: self.iota.clone(), beta0: Vec::new(), blocks });
        }
        let mut blocks = self.blocks.clone();
        let top = blocks.pop()?;
        let mut iota = self.iota.clone();
        for &x in &top {
            iota[x] += 1;
        }
        Some(Region { iota, beta0: top, blocks })
    }

    /// All time-successors in order of elapsing time, `self` first.
    pub fn time_successors(&self, bound: i64) -> Vec<Region> {
        let mut out = vec![self.clone()];
        while let Some(next) = out.last().unwrap().immediate_time_successor(bound) {
            out.push(next);
        }
        out
    }

    /// Position of `other` in [`Region::time_successors`].
    pub fn successor_distance(&self, other: &Region, bound: i64) -> Option<usize> {
        self.time_successors(bound).iter().position(|r| r == other)
    }

    /// `r[R := 0]`.
    pub fn reset(&self, resets: &[usize]) -> Region {
        if resets.is_empty() {
            return self.clone();
        }
        let mut iota = self.iota.clone();
        let mut beta0 = self.beta0.clone();
        for &x in resets {
            iota[x] = 0;
            if !beta0.contains(&x) {
                beta0.push(x);
            }
        }
        beta0.sort_unstable();
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().copied().filter(|x| !resets.contains(x)).collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect();
        Region { iota, beta0, blocks }
    }

    /// `r ⊨ g`; guards are unions of regions, so one member decides.
    pub fn satisfies(&self, g: &Guard) -> bool {
        g.satisfies(&self.representative())
    }

    /// The exact constraints describing the region.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut atoms = Vec::new();
        let mut ordered: Vec<usize> = self.beta0.clone();
        ordered.extend(self.blocks.iter().flatten());
        ordered.sort_unstable();
        for x in ordered {
            let i = self.iota[x];
            if self.beta0.contains(&x) {
                atoms.push(Atom::equals(Term::Clock(x), i));
            } else {
                atoms.push(Atom::between(Term::Clock(x), i, Relop::Lt, i + 1, Relop::Lt));
            }
        }
        for b in &self.blocks {
            for &y in &b[1..] {
                atoms.push(Atom::equals(Term::Diff(b[0], y), self.iota[b[0]] - self.iota[y]));
            }
        }
        for w in self.blocks.windows(2) {
            let (a, b) = (w[0][0], w[1][0]);
            atoms.push(Atom::upper(Term::Diff(a, b), self.iota[a] - self.iota[b], Relop::Lt));
        }
        atoms
    }

    pub fn to_guard(&self, bound: i64) -> Guard {
        Guard::new(self.atoms(), self.clocks(), bound)
    }

    pub fn to_dbm(&self, bound: i64) -> Dbm {
        Dbm::from_atoms(self.clocks(), bound, &self.atoms())
    }

    /// The region described exactly by `g`, if `g` describes a single one.
    pub fn from_guard(g: &Guard, clocks: usize, bound: i64) -> Option<Region> {
        let z = Dbm::from_guard(clocks, bound, g);
        let r = Region::of(&z.interior_point()?);
        (r.to_dbm(bound) == z).then_some(r)
    }

    /// Parses the textual form produced by [`Region::display`].
    pub fn parse(text: &str, clocks: &ClockSet, bound: i64) -> Result<Option<Region>, ParseError> {
        let g = parse_guard(text, clocks, bound)?;
        Ok(Region::from_guard(&g, clocks.len(), bound))
    }

    pub fn display<'a>(&'a self, clocks: &'a ClockSet) -> impl fmt::Display + 'a {
        RegionDisplay { r: self, clocks }
    }

    /// Every region of `[0, M]^X`.
    pub fn all(clocks: usize, bound: i64) -> Vec<Region> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << clocks) {
            let beta0: Vec<usize> = (0..clocks).filter(|c| mask & (1 << c) != 0).collect();
            let rest: Vec<usize> = (0..clocks).filter(|c| mask & (1 << c) == 0).collect();
            for blocks in ordered_partitions(&rest) {
                let mut iotas = vec![Vec::new()];
                for c in 0..clocks {
                    let top = if beta0.contains(&c) { bound } else { bound - 1 };
                    iotas = iotas
                        .into_iter()
                        .flat_map(|p: Vec<i64>| {
                            (0..=top).map(move |i| {
                                let mut q = p.clone();
                                q.push(i);
                                q
                            })
                        })
                        .collect();
                }
                for iota in iotas {
                    out.push(Region { iota, beta0: beta0.clone(), blocks: blocks.clone() });
                }
            }
        }
        out.sort();
        out
    }
}

fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in ordered_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first);
            q[i].sort_unstable();
            out.push(q);
        }
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, vec![first]);
            out.push(q);
        }
    }
    out
}

struct RegionDisplay<'a> {
    r: &'a Region,
    clocks: &'a ClockSet,
}

impl fmt::Display for RegionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // the bound only affects classification, not the printed text
        let g = self.r.to_guard(i64::MAX / 4);
        let text = g.display(self.clocks).to_string();
        f.write_str(&text)
    }
}
