//! Difference bound matrices over exact rationals.
//!
//! Index 0 is the constant-zero reference clock; clock `c` lives at index
//! `c + 1`. Entry `(i, j)` bounds `x_i - x_j`. Every zone is kept inside
//! `[0, M]^X`.

mod shrunk;

pub use shrunk::ShrunkDbm;

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::model::{fmt_rational, int, Atom, ClockSet, Guard, Rational, Relop, Term, Valuation};

/// `(⪯, m)` or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Fin(Rational, bool),
    Inf,
}

impl Bound {
    pub fn le(q: Rational) -> Self {
        Bound::Fin(q, false)
    }

    pub fn lt(q: Rational) -> Self {
        Bound::Fin(q, true)
    }

    pub fn zero() -> Self {
        Bound::le(Rational::zero())
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Bound::Fin(q, _) => Some(q),
            Bound::Inf => None,
        }
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Bound::Fin(_, true))
    }

    pub fn add(&self, other: &Bound) -> Bound {
        match (self, other) {
            (Bound::Fin(a, s), Bound::Fin(b, t)) => Bound::Fin(a + b, *s || *t),
            _ => Bound::Inf,
        }
    }

    /// Whether `q ⪯ m`.
    pub fn admits(&self, q: &Rational) -> bool {
        match self {
            Bound::Inf => true,
            Bound::Fin(m, true) => q < m,
            Bound::Fin(m, false) => q <= m,
        }
    }

    pub(crate) fn shifted(&self, d: &Rational) -> Bound {
        match self {
            Bound::Fin(m, s) => Bound::Fin(m + d, *s),
            Bound::Inf => Bound::Inf,
        }
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Inf, Bound::Inf) => Ordering::Equal,
            (Bound::Inf, _) => Ordering::Greater,
            (_, Bound::Inf) => Ordering::Less,
            (Bound::Fin(a, s), Bound::Fin(b, t)) => a.cmp(b).then_with(|| t.cmp(s)),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Closed or half-open interval of delays `t` with `ν + t` in a zone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub lo_strict: bool,
    pub hi: Rational,
    pub hi_strict: bool,
}

impl Interval {
    pub fn contains(&self, t: &Rational) -> bool {
        let lo_ok = if self.lo_strict { *t > self.lo } else { *t >= self.lo };
        let hi_ok = if self.hi_strict { *t < self.hi } else { *t <= self.hi };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_strict || self.hi_strict))
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_strict) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_strict),
            Ordering::Less => (other.lo.clone(), other.lo_strict),
            Ordering::Equal => (self.lo.clone(), self.lo_strict || other.lo_strict),
        };
        let (hi, hi_strict) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_strict),
            Ordering::Greater => (other.hi.clone(), other.hi_strict),
            Ordering::Equal => (self.hi.clone(), self.hi_strict || other.hi_strict),
        };
        Interval { lo, lo_strict, hi, hi_strict }
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

/// A canonical zone, or the canonical empty zone.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dbm {
    clocks: usize,
    bound: i64,
    m: Vec<Bound>,
}

impl Dbm {
    /// `[0, M]^X`.
    pub fn universe(clocks: usize, bound: i64) -> Self {
        let dim = clocks + 1;
        let mb = Bound::le(int(bound));
        let mut m = vec![mb; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::zero();
            m[i] = Bound::zero();
        }
        Dbm { clocks, bound, m }
    }

    pub fn from_atoms(clocks: usize, bound: i64, atoms: &[Atom]) -> Self {
        let mut z = Dbm::universe(clocks, bound);
        for a in atoms {
            z.tighten_atom(a);
        }
        z.canonicalize();
        z
    }

    pub fn from_guard(clocks: usize, bound: i64, g: &Guard) -> Self {
        Dbm::from_atoms(clocks, bound, g.atoms())
    }

    /// Builds a zone from raw entries and canonicalizes it.
    pub fn from_entries(clocks: usize, bound: i64, m: Vec<Bound>) -> Self {
        assert_eq!(m.len(), (clocks + 1) * (clocks + 1));
        let mut z = Dbm { clocks, bound, m };
        z.canonicalize();
        z
    }

    pub(crate) fn raw(clocks: usize, bound: i64, m: Vec<Bound>) -> Self {
        Dbm { clocks, bound, m }
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.clocks + 1
    }

    pub fn get(&self, i: usize, j: usize) -> &Bound {
        &self.m[i * self.dim() + j]
    }

    pub fn entries(&self) -> &[Bound] {
        &self.m
    }

    pub(crate) fn tighten(&mut self, i: usize, j: usize, b: Bound) {
        let k = i * self.dim() + j;
        if b < self.m[k] {
            self.m[k] = b;
        }
    }

    fn tighten_atom(&mut self, a: &Atom) {
        let (i, j) = match a.term {
            Term::Clock(x) => (x + 1, 0),
            Term::Diff(x, y) => (x + 1, y + 1),
        };
        if let Some((l, op)) = a.upper {
            self.tighten(i, j, Bound::Fin(int(l), op == Relop::Lt));
        }
        if let Some((k, op)) = a.lower {
            self.tighten(j, i, Bound::Fin(int(-k), op == Relop::Lt));
        }
    }

    /// Floyd–Warshall closure. Returns `false` and turns `self` into the
    /// canonical empty zone when no valuation satisfies the constraints.
    pub fn canonicalize(&mut self) -> bool {
        let dim = self.dim();
        for k in 0..dim {
            for i in 0..dim {
                let ik = self.m[i * dim + k].clone();
                if ik == Bound::Inf {
                    continue;
                }
                for j in 0..dim {
                    let via = ik.add(&self.m[k * dim + j]);
                    if via < self.m[i * dim + j] {
                        self.m[i * dim + j] = via;
                    }
                }
            }
        }
        if (0..dim).any(|i| self.m[i * dim + i] < Bound::zero()) {
            self.make_empty();
            return false;
        }
        true
    }

    fn make_empty(&mut self) {
        for b in &mut self.m {
            *b = Bound::lt(Rational::zero());
        }
    }

    pub fn empty(clocks: usize, bound: i64) -> Self {
        let mut z = Dbm::universe(clocks, bound);
        z.make_empty();
        z
    }

    pub fn is_empty(&self) -> bool {
        self.m[0] != Bound::zero()
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        if self.is_empty() {
            return false;
        }
        let val = |i: usize| if i == 0 { Rational::zero() } else { v.get(i - 1).clone() };
        let dim = self.dim();
        (0..dim).all(|i| (0..dim).all(|j| i == j || self.get(i, j).admits(&(val(i) - val(j)))))
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Dbm) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        self.m.iter().zip(&other.m).all(|(a, b)| b <= a)
    }

    pub fn intersect(&self, other: &Dbm) -> Dbm {
        assert_eq!(self.clocks, other.clocks);
        if self.is_empty() || other.is_empty() {
            return Dbm::empty(self.clocks, self.bound);
        }
        let m = self.m.iter().zip(&other.m).map(|(a, b)| a.min(b).clone()).collect();
        Dbm::from_entries(self.clocks, self.bound, m)
    }

    /// `self ∩ {x_i − x_j ⪯ b}` on raw indices.
    pub fn constrain(&self, i: usize, j: usize, b: Bound) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut z = self.clone();
        z.tighten(i, j, b);
        z.canonicalize();
        z
    }

    pub fn intersect_guard(&self, g: &Guard) -> Dbm {
        self.intersect_atoms(g.atoms())
    }

    pub fn intersect_atoms(&self, atoms: &[Atom]) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut z = self.clone();
        for a in atoms {
            z.tighten_atom(a);
        }
        z.canonicalize();
        z
    }

    /// `{ν | ∃d ≥ δ, ν + d ∈ z}`.
    pub fn pretime_geq(&self, delta: &Rational) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let dim = self.dim();
        let mut m = self.m.clone();
        for j in 1..dim {
            m[j] = Bound::zero();
            m[j * dim] = m[j * dim].shifted(&-delta);
        }
        Dbm::from_entries(self.clocks, self.bound, m)
    }

    /// `{ν | ∀ε ∈ [-δ, δ], ν + ε ∈ z}`.
    pub fn shrink(&self, delta: &Rational) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let dim = self.dim();
        let mut m = self.m.clone();
        for j in 1..dim {
            m[j] = m[j].shifted(&-delta);
            m[j * dim] = m[j * dim].shifted(&-delta);
        }
        Dbm::from_entries(self.clocks, self.bound, m)
    }

    /// `{ν ∈ [0, M]^X | ν[R := 0] ∈ z}`.
    pub fn unreset(&self, resets: &[usize]) -> Dbm {
        if self.is_empty() || resets.is_empty() {
            return self.clone();
        }
        let mut z = self.clone();
        for &c in resets {
            z.tighten(c + 1, 0, Bound::zero());
            z.tighten(0, c + 1, Bound::zero());
        }
        if !z.canonicalize() {
            return z;
        }
        let m = free_clocks(&z.m, self.dim(), self.bound, resets, |b| b.clone(), Bound::Inf);
        Dbm::from_entries(self.clocks, self.bound, m)
    }

    /// Some clock takes a single value across the whole zone.
    pub fn has_fixed_clock(&self) -> bool {
        !self.is_empty()
            && (1..self.dim()).any(|i| match (self.get(i, 0), self.get(0, i)) {
                (Bound::Fin(u, false), Bound::Fin(l, false)) => (u + l).is_zero(),
                _ => false,
            })
    }

    pub fn upper_bound(&self, clock: usize) -> Option<Rational> {
        self.get(clock + 1, 0).value().cloned()
    }

    pub fn lower_bound(&self, clock: usize) -> Option<Rational> {
        self.get(0, clock + 1).value().map(|q| -q)
    }

    /// A point of the relative interior, found by fixing clocks one after
    /// another at the middle of their remaining range.
    pub fn interior_point(&self) -> Option<Valuation> {
        if self.is_empty() {
            return None;
        }
        let mut z = self.clone();
        let mut out = Vec::with_capacity(self.clocks);
        for c in 0..self.clocks {
            let lo = z.lower_bound(c).expect("lower bounds are finite");
            let hi = z.upper_bound(c).expect("upper bounds are finite");
            let x = (&lo + &hi) / int(2);
            z.tighten(c + 1, 0, Bound::le(x.clone()));
            z.tighten(0, c + 1, Bound::le(-x.clone()));
            let ok = z.canonicalize();
            debug_assert!(ok, "midpoint left the zone");
            out.push(x);
        }
        Some(Valuation(out))
    }

    /// Delays `t` (of either sign) with `ν + t ∈ z`.
    pub fn delay_window(&self, v: &Valuation) -> Option<Interval> {
        if self.is_empty() {
            return None;
        }
        let dim = self.dim();
        for i in 1..dim {
            for j in 1..dim {
                if i != j && !self.get(i, j).admits(&(v.get(i - 1) - v.get(j - 1))) {
                    return None;
                }
            }
        }
        let mut w = Interval { lo: -int(self.bound), lo_strict: false, hi: int(self.bound), hi_strict: false };
        for c in 0..self.clocks {
            if let Bound::Fin(u, s) = self.get(c + 1, 0) {
                let hi = Interval { lo: w.lo.clone(), lo_strict: w.lo_strict, hi: u - v.get(c), hi_strict: *s };
                w = w.intersect(&hi);
            }
            if let Bound::Fin(l, s) = self.get(0, c + 1) {
                let lo = Interval { lo: -l - v.get(c), lo_strict: *s, hi: w.hi.clone(), hi_strict: w.hi_strict };
                w = w.intersect(&lo);
            }
        }
        (!w.is_empty()).then_some(w)
    }

    pub fn display<'a>(&'a self, clocks: &'a ClockSet) -> impl fmt::Display + 'a {
        DbmDisplay { z: self, clocks }
    }
}

/// Shared by the concrete and shrunk unreset: drops every constraint that
/// mentions a reset clock except `0 ≤ x ≤ M`.
pub(crate) fn free_clocks<T: Clone>(
    m: &[T],
    dim: usize,
    bound: i64,
    resets: &[usize],
    lift: impl Fn(&Bound) -> T,
    inf: T,
) -> Vec<T> {
    let mut out = m.to_vec();
    for &c in resets {
        let r = c + 1;
        for j in 0..dim {
            if j != r {
                out[r * dim + j] = inf.clone();
                out[j * dim + r] = inf.clone();
            }
        }
        out[r * dim] = lift(&Bound::le(int(bound)));
        out[r] = lift(&Bound::zero());
    }
    out
}

struct DbmDisplay<'a> {
    z: &'a Dbm,
    clocks: &'a ClockSet,
}

impl fmt::Display for DbmDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.z.is_empty() {
            return write!(f, "false");
        }
        let name = |i: usize| if i == 0 { "0".to_string() } else { self.clocks.name(i - 1).to_string() };
        let mut first = true;
        for i in 0..self.z.dim() {
            for j in 0..self.z.dim() {
                let Bound::Fin(q, s) = self.z.get(i, j) else { continue };
                if i == j {
                    continue;
                }
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                let op = if *s { "<" } else { "<=" };
                match (i, j) {
                    (_, 0) => write!(f, "{} {op} {}", name(i), fmt_rational(q))?,
                    (0, _) => write!(f, "-{} {op} {}", name(j), fmt_rational(q))?,
                    _ => write!(f, "{} - {} {op} {}", name(i), name(j), fmt_rational(q))?,
                }
            }
        }
        Ok(())
    }
}
