//! Parametric zones `M − δP`: every entry is `(⪯, m − δ·p)` with `p ∈ ℕ`.
//!
//! Comparisons are resolved for arbitrarily small `δ > 0`; whenever a
//! resolution would flip at some positive `δ`, that value is recorded as an
//! exclusive limit. Below the limit the parametric result coincides with the
//! concrete computation at every `δ`.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::{free_clocks, Bound, Dbm};
use crate::model::{int, Atom, Guard, Rational, Relop, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Entry {
    b: Bound,
    p: u32,
}

impl Entry {
    fn fixed(b: Bound) -> Self {
        Entry { b, p: 0 }
    }

    fn add(&self, o: &Entry) -> Entry {
        match self.b.add(&o.b) {
            Bound::Inf => Entry { b: Bound::Inf, p: 0 },
            b => Entry { b, p: self.p + o.p },
        }
    }

    fn bump(&self) -> Entry {
        match self.b {
            Bound::Inf => self.clone(),
            _ => Entry { b: self.b.clone(), p: self.p + 1 },
        }
    }

    fn at(&self, delta: &Rational) -> Bound {
        match &self.b {
            Bound::Fin(m, s) => Bound::Fin(m - delta * int(self.p as i64), *s),
            Bound::Inf => Bound::Inf,
        }
    }
}

/// Order for all sufficiently small `δ > 0`.
fn cmp_small(a: &Entry, b: &Entry) -> Ordering {
    match (&a.b, &b.b) {
        (Bound::Fin(m1, s1), Bound::Fin(m2, s2)) => m1.cmp(m2).then_with(|| b.p.cmp(&a.p)).then_with(|| s2.cmp(s1)),
        _ => a.b.cmp(&b.b),
    }
}

/// The `δ` at which `loser` would catch up with `winner`, if any.
fn crossing(winner: &Entry, loser: &Entry) -> Option<Rational> {
    match (&winner.b, &loser.b) {
        (Bound::Fin(mw, _), Bound::Fin(ml, _)) if loser.p > winner.p => {
            Some((ml - mw) / int((loser.p - winner.p) as i64))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShrunkDbm {
    clocks: usize,
    bound: i64,
    e: Vec<Entry>,
    limit: Option<Rational>,
    empty: bool,
}

impl ShrunkDbm {
    /// `z` with the zero shrinking matrix.
    pub fn from_dbm(z: &Dbm) -> Self {
        ShrunkDbm {
            clocks: z.clocks(),
            bound: z.bound(),
            e: z.entries().iter().cloned().map(Entry::fixed).collect(),
            limit: None,
            empty: z.is_empty(),
        }
    }

    fn dim(&self) -> usize {
        self.clocks + 1
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Empty for every `δ > 0`.
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Exclusive supremum of the `δ` for which the parametric form is exact.
    pub fn limit(&self) -> Option<&Rational> {
        self.limit.as_ref()
    }

    /// A concrete validity threshold: half the limit, capped at 1. `None`
    /// when the zone is empty for all `δ > 0`.
    pub fn delta0(&self) -> Option<Rational> {
        if self.empty {
            return None;
        }
        let one = Rational::one();
        Some(match &self.limit {
            Some(l) => {
                let h = l / int(2);
                if h < one {
                    h
                } else {
                    one
                }
            }
            None => one,
        })
    }

    /// The bound part `M` of `M − δP`.
    pub fn base(&self) -> Dbm {
        Dbm::raw(self.clocks, self.bound, self.e.iter().map(|x| x.b.clone()).collect())
    }

    /// `P[i][j]`.
    pub fn shrinking(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.dim() + j].p
    }

    /// Entrywise `M − δP`, canonicalized.
    pub fn instantiate(&self, delta: &Rational) -> Dbm {
        if self.empty {
            return Dbm::empty(self.clocks, self.bound);
        }
        Dbm::from_entries(self.clocks, self.bound, self.e.iter().map(|x| x.at(delta)).collect())
    }

    /// Entrywise `M − δP` as is, for checking that it already is canonical.
    pub fn instantiate_raw(&self, delta: &Rational) -> Dbm {
        if self.empty {
            return Dbm::empty(self.clocks, self.bound);
        }
        Dbm::raw(self.clocks, self.bound, self.e.iter().map(|x| x.at(delta)).collect())
    }

    fn note_limit(&mut self, l: Rational) {
        if self.limit.as_ref().map_or(true, |cur| l < *cur) {
            self.limit = Some(l);
        }
    }

    fn min_into(&mut self, k: usize, cand: Entry) {
        let cur = &self.e[k];
        match cmp_small(&cand, cur) {
            Ordering::Less => {
                if let Some(l) = crossing(&cand, cur) {
                    self.note_limit(l);
                }
                self.e[k] = cand;
            }
            _ => {
                if let Some(l) = crossing(cur, &cand) {
                    self.note_limit(l);
                }
            }
        }
    }

    fn canonicalize(&mut self) {
        if self.empty {
            return;
        }
        let dim = self.dim();
        for k in 0..dim {
            for i in 0..dim {
                let ik = self.e[i * dim + k].clone();
                if ik.b == Bound::Inf {
                    continue;
                }
                for j in 0..dim {
                    let via = ik.add(&self.e[k * dim + j]);
                    self.min_into(i * dim + j, via);
                }
            }
        }
        let zero = Entry::fixed(Bound::zero());
        if (0..dim).any(|i| cmp_small(&self.e[i * dim + i], &zero) == Ordering::Less) {
            self.empty = true;
        }
    }

    fn finish(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn intersect(&self, z: &Dbm) -> ShrunkDbm {
        if z.is_empty() {
            let mut out = self.clone();
            out.empty = true;
            return out;
        }
        self.intersect_shrunk(&ShrunkDbm::from_dbm(z))
    }

    pub fn intersect_shrunk(&self, other: &ShrunkDbm) -> ShrunkDbm {
        let mut out = self.clone();
        out.empty |= other.empty;
        if let Some(l) = &other.limit {
            out.note_limit(l.clone());
        }
        if out.empty {
            return out;
        }
        for (k, e) in other.e.iter().enumerate() {
            out.min_into(k, e.clone());
        }
        out.finish()
    }

    pub fn intersect_guard(&self, g: &Guard) -> ShrunkDbm {
        let mut out = self.clone();
        if out.empty {
            return out;
        }
        let dim = self.dim();
        for a in g.atoms() {
            let (i, j) = match a.term {
                Term::Clock(x) => (x + 1, 0),
                Term::Diff(x, y) => (x + 1, y + 1),
            };
            let Atom { upper, lower, .. } = a;
            if let Some((l, op)) = upper {
                out.min_into(i * dim + j, Entry::fixed(Bound::Fin(int(*l), *op == Relop::Lt)));
            }
            if let Some((k, op)) = lower {
                out.min_into(j * dim + i, Entry::fixed(Bound::Fin(int(-k), *op == Relop::Lt)));
            }
        }
        out.finish()
    }

    /// Parametric `PreTime_{≥δ}`.
    pub fn pretime_geq(&self) -> ShrunkDbm {
        let mut out = self.clone();
        if out.empty {
            return out;
        }
        let dim = self.dim();
        for j in 1..dim {
            out.e[j] = Entry::fixed(Bound::zero());
            out.e[j * dim] = out.e[j * dim].bump();
        }
        out.finish()
    }

    /// Parametric `PreTime_{≥0}`: lower bounds dropped, nothing shrunk.
    pub fn pretime(&self) -> ShrunkDbm {
        let mut out = self.clone();
        if out.empty {
            return out;
        }
        for j in 1..self.dim() {
            out.e[j] = Entry::fixed(Bound::zero());
        }
        out.finish()
    }

    /// Parametric `Shrink_δ`.
    pub fn shrink(&self) -> ShrunkDbm {
        let mut out = self.clone();
        if out.empty {
            return out;
        }
        let dim = self.dim();
        for j in 1..dim {
            out.e[j] = out.e[j].bump();
            out.e[j * dim] = out.e[j * dim].bump();
        }
        out.finish()
    }

    pub fn unreset(&self, resets: &[usize]) -> ShrunkDbm {
        let mut out = self.clone();
        if out.empty || resets.is_empty() {
            return out;
        }
        let dim = self.dim();
        for &c in resets {
            out.min_into((c + 1) * dim, Entry::fixed(Bound::zero()));
            out.min_into(c + 1, Entry::fixed(Bound::zero()));
        }
        out.canonicalize();
        if out.empty {
            return out;
        }
        out.e = free_clocks(&out.e, dim, self.bound, resets, |b| Entry::fixed(b.clone()), Entry::fixed(Bound::Inf));
        out.finish()
    }

    pub fn is_zero_shrink(&self) -> bool {
        self.e.iter().all(|x| x.p == 0)
    }

    /// Largest `δ` (with its exclusivity) such that `inner ⊆ instantiate(δ)`.
    /// `Some((sup, exclusive))` or `None` when inclusion fails for every
    /// `δ > 0`; `sup = None` means no constraint from this inclusion.
    pub fn inclusion_sup(&self, inner: &Dbm) -> Option<(Option<Rational>, bool)> {
        if inner.is_empty() {
            return Some((None, false));
        }
        if self.empty {
            return None;
        }
        let mut best: Option<(Rational, bool)> = None;
        for (k, e) in self.e.iter().enumerate() {
            let t = &inner.entries()[k];
            let (Bound::Fin(m, s), p) = (&e.b, e.p) else { continue };
            let Bound::Fin(tv, ts) = t else { return None };
            // need (tv, ts) ≤ (m − δp, s)
            if p == 0 {
                if *t > Bound::Fin(m.clone(), *s) {
                    return None;
                }
                continue;
            }
            let gap = m - tv;
            let exclusive = *s && !*ts;
            if gap < Rational::zero() || (gap.is_zero() && exclusive) {
                return None;
            }
            if gap.is_zero() {
                // only δ = 0 works
                return None;
            }
            let cand = gap / int(p as i64);
            best = Some(match best {
                Some((b, bx)) if b < cand || (b == cand && bx) => (b, bx),
                _ => (cand, exclusive),
            });
        }
        Some(match best {
            Some((b, x)) => (Some(b), x),
            None => (None, false),
        })
    }
}
