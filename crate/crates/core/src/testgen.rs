//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::model::{rat, Atom, Guard, Rational, Relop, Term, Valuation};

pub fn relop() -> impl Strategy<Value = Relop> {
    prop_oneof![Just(Relop::Lt), Just(Relop::Le)]
}

pub fn term(n: usize) -> impl Strategy<Value = Term> {
    (0..n, 0..n, any::<bool>()).prop_map(move |(x, off, diag)| {
        let y = (x + off) % n;
        if diag && x != y {
            Term::Diff(x, y)
        } else {
            Term::Clock(x)
        }
    })
}

pub fn atom(n: usize, m: i64) -> impl Strategy<Value = Atom> {
    (term(n), -m..=m, relop(), 0..4u8).prop_map(move |(t, c, op, kind)| match kind {
        0 => Atom::upper(t, c, op),
        1 => Atom::lower(t, c, op),
        2 => Atom::equals(t, c),
        _ => Atom::between(t, c, op, (c + 1).min(m + 1), op),
    })
}

pub fn atoms(n: usize, m: i64) -> impl Strategy<Value = Vec<Atom>> {
    prop::collection::vec(atom(n, m), 0..4)
}

pub fn guard(n: usize, m: i64) -> impl Strategy<Value = Guard> {
    atoms(n, m).prop_map(move |a| Guard::new(a, n, m))
}

/// Rationals in `[0, m]` with denominator dividing `den`.
pub fn coord(m: i64, den: i64) -> impl Strategy<Value = Rational> {
    (0..=m * den).prop_map(move |k| rat(k, den))
}

pub fn valuation(n: usize, m: i64) -> impl Strategy<Value = Valuation> {
    prop::collection::vec(coord(m, 24), n).prop_map(Valuation)
}

pub fn small_delta() -> impl Strategy<Value = Rational> {
    (1..=12i64).prop_map(|k| rat(k, 24))
}

/// Clock count, bound, and a zone's atoms.
pub fn shape() -> impl Strategy<Value = (usize, i64)> {
    (1usize..=3, 1i64..=3)
}
