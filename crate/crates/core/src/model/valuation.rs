use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{fmt_rational, int, Rational};

/// Ordered clock names. Clock `i` is DBM index `i + 1` and position `i` in
/// every valuation and corner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockSet {
    names: Vec<String>,
}

impl ClockSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, ValuationError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ValuationError::NoClocks);
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ValuationError::DuplicateClock(n.clone()));
            }
        }
        Ok(ClockSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("a clock set needs at least one clock")]
    NoClocks,
    #[error("clock `{0}` declared twice")]
    DuplicateClock(String),
    #[error("delay {delay} pushes clock {clock} past the bound {bound}")]
    BoundExceeded { clock: usize, delay: String, bound: i64 },
    #[error("negative delay {0}")]
    NegativeDelay(String),
}

/// A point of `[0, M]^X`, indexed like its [`ClockSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(pub Vec<Rational>);

impl Valuation {
    pub fn zero(n: usize) -> Self {
        Valuation(vec![Rational::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Valuation(v.iter().map(|&c| int(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, clock: usize) -> &Rational {
        &self.0[clock]
    }

    /// `ν + d`, refusing to leave `[0, bound]`.
    pub fn delay(&self, d: &Rational, bound: i64) -> Result<Valuation, ValuationError> {
        if d.is_negative() {
            return Err(ValuationError::NegativeDelay(fmt_rational(d)));
        }
        let m = int(bound);
        let out = self.shift(d);
        if let Some(clock) = out.0.iter().position(|x| *x > m) {
            return Err(ValuationError::BoundExceeded { clock, delay: fmt_rational(d), bound });
        }
        Ok(out)
    }

    /// `ν + d` without any bound check; `d` may be negative.
    pub fn shift(&self, d: &Rational) -> Valuation {
        Valuation(self.0.iter().map(|x| x + d).collect())
    }

    /// `ν[R := 0]`.
    pub fn reset(&self, clocks: &[usize]) -> Valuation {
        let mut out = self.clone();
        for &c in clocks {
            out.0[c] = Rational::zero();
        }
        out
    }

    pub fn l1_norm(&self) -> Rational {
        self.0.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| a + b)
    }

    /// Sup-norm distance.
    pub fn dist_inf(&self, other: &Valuation) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn in_bounds(&self, bound: i64) -> bool {
        let m = int(bound);
        self.0.iter().all(|x| !x.is_negative() && *x <= m)
    }

    pub fn display<'a>(&'a self, clocks: &'a ClockSet) -> impl fmt::Display + 'a {
        DisplayValuation { v: self, clocks }
    }
}

struct DisplayValuation<'a> {
    v: &'a Valuation,
    clocks: &'a ClockSet,
}

impl fmt::Display for DisplayValuation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.v.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", self.clocks.name(i), fmt_rational(x))?;
        }
        Ok(())
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rational(x))?;
        }
        write!(f, ")")
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(fmt_rational))
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| super::parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect::<Result<_, _>>()
            .map(Valuation)
    }
}
