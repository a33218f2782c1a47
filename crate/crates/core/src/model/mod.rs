//! Clocks, valuations, guards and timed automata, plus the text format.

mod automaton;
mod guard;
mod parser;
mod valuation;

pub use automaton::{AutomatonError, Edge, TimedAutomaton};
pub use guard::{classify_guard, non_punctual_witness, Atom, Guard, Punctuality, Relop, Term};
pub use parser::{parse_automaton, parse_guard, ParseError};
pub use valuation::{ClockSet, Valuation, ValuationError};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rationals used for every valuation, delay and bound.
pub type Rational = BigRational;

/// `n / d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `3`, `-1/4` or `0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" { BigInt::zero() } else { whole.parse().ok()? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f: BigInt = frac.parse().ok()?;
        let mag = w.abs() * &scale + f;
        let n = if neg { -mag } else { mag };
        return Some(Rational::new(n, scale));
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Prints integers plainly and everything else as `n/d`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

pub(crate) fn floor_i64(q: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    q.floor().to_integer().to_i64().expect("clock value out of i64 range")
}

pub mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}
