use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{int, ClockSet, Rational, Valuation};
use crate::dbm::Dbm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relop {
    Lt,
    Le,
}

impl Relop {
    pub fn strict(self) -> bool {
        self == Relop::Lt
    }

    pub fn from_strict(strict: bool) -> Self {
        if strict {
            Relop::Lt
        } else {
            Relop::Le
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relop::Lt => "<",
            Relop::Le => "<=",
        }
    }
}

/// The quantity an atom constrains: `x` or `x - y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Clock(usize),
    Diff(usize, usize),
}

impl Term {
    pub fn eval(&self, v: &Valuation) -> Rational {
        match *self {
            Term::Clock(x) => v.get(x).clone(),
            Term::Diff(x, y) => v.get(x) - v.get(y),
        }
    }

    fn clocks(&self) -> (usize, Option<usize>) {
        match *self {
            Term::Clock(x) => (x, None),
            Term::Diff(x, y) => (x, Some(y)),
        }
    }
}

/// `k ⪯ term ⪯ l`, either side optional.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub term: Term,
    pub lower: Option<(i64, Relop)>,
    pub upper: Option<(i64, Relop)>,
}

impl Atom {
    pub fn upper(term: Term, l: i64, op: Relop) -> Self {
        Atom { term, lower: None, upper: Some((l, op)) }
    }

    pub fn lower(term: Term, k: i64, op: Relop) -> Self {
        Atom { term, lower: Some((k, op)), upper: None }
    }

    pub fn between(term: Term, k: i64, lop: Relop, l: i64, uop: Relop) -> Self {
        Atom { term, lower: Some((k, lop)), upper: Some((l, uop)) }
    }

    pub fn equals(term: Term, c: i64) -> Self {
        Atom::between(term, c, Relop::Le, c, Relop::Le)
    }

    pub fn holds(&self, v: &Valuation) -> bool {
        let t = self.term.eval(v);
        let lo_ok = match self.lower {
            None => true,
            Some((k, Relop::Lt)) => int(k) < t,
            Some((k, Relop::Le)) => int(k) <= t,
        };
        let hi_ok = match self.upper {
            None => true,
            Some((l, Relop::Lt)) => t < int(l),
            Some((l, Relop::Le)) => t <= int(l),
        };
        lo_ok && hi_ok
    }

    pub fn max_clock(&self) -> usize {
        let (x, y) = self.term.clocks();
        y.map_or(x, |y| x.max(y))
    }

    fn write(&self, clocks: &ClockSet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = match self.term {
            Term::Clock(x) => clocks.name(x).to_string(),
            Term::Diff(x, y) => format!("{}-{}", clocks.name(x), clocks.name(y)),
        };
        match (self.lower, self.upper) {
            (Some((k, Relop::Le)), Some((l, Relop::Le))) if k == l => write!(f, "{term}=={k}"),
            (Some((k, lo)), Some((l, hi))) => write!(f, "{k}{}{term}{}{l}", lo.symbol(), hi.symbol()),
            (Some((k, lo)), None) => write!(f, "{k}{}{term}", lo.symbol()),
            (None, Some((l, hi))) => write!(f, "{term}{}{l}", hi.symbol()),
            (None, None) => write!(f, "true"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Punctuality {
    Empty,
    Punctual,
    NonPunctual,
}

/// A conjunction of atoms, implicitly intersected with `[0, M]^X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Guard {
    atoms: Vec<Atom>,
    punctuality: Punctuality,
}

impl Guard {
    /// Builds a guard over `clocks` clocks and classifies it against `bound`.
    pub fn new(atoms: Vec<Atom>, clocks: usize, bound: i64) -> Self {
        let punctuality = classify_atoms(&atoms, clocks, bound);
        Guard { atoms, punctuality }
    }

    pub fn truth(clocks: usize, bound: i64) -> Self {
        Guard::new(Vec::new(), clocks, bound)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn punctuality(&self) -> Punctuality {
        self.punctuality
    }

    pub fn is_punctual(&self) -> bool {
        self.punctuality == Punctuality::Punctual
    }

    /// Direct substitution of `v` into every atom.
    pub fn satisfies(&self, v: &Valuation) -> bool {
        self.atoms.iter().all(|a| a.holds(v))
    }

    pub fn display<'a>(&'a self, clocks: &'a ClockSet) -> impl fmt::Display + 'a {
        GuardDisplay { g: self, clocks }
    }
}

struct GuardDisplay<'a> {
    g: &'a Guard,
    clocks: &'a ClockSet,
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.g.atoms.is_empty() {
            return write!(f, "true");
        }
        for (i, a) in self.g.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " && ")?;
            }
            a.write(self.clocks, f)?;
        }
        Ok(())
    }
}

fn classify_atoms(atoms: &[Atom], clocks: usize, bound: i64) -> Punctuality {
    let z = Dbm::from_atoms(clocks, bound, atoms);
    if z.is_empty() {
        Punctuality::Empty
    } else if z.has_fixed_clock() {
        Punctuality::Punctual
    } else {
        Punctuality::NonPunctual
    }
}

/// Decides whether `g` admits no point, only isolated points along time
/// lines, or some `ν` with `ν + d` both inside for a `d > 0`.
pub fn classify_guard(g: &Guard, clocks: usize, bound: i64) -> Punctuality {
    classify_atoms(&g.atoms, clocks, bound)
}

/// A pair `(ν, d)` with `d > 0`, `ν ⊨ g` and `ν + d ⊨ g`, when one exists.
pub fn non_punctual_witness(g: &Guard, clocks: usize, bound: i64) -> Option<(Valuation, Rational)> {
    let z = Dbm::from_atoms(clocks, bound, &g.atoms);
    if z.is_empty() || z.has_fixed_clock() {
        return None;
    }
    let nu = z.interior_point()?;
    let mut d: Option<Rational> = None;
    for x in 0..clocks {
        let hi = z.upper_bound(x).expect("clocks are bounded by M");
        let slack = hi - nu.get(x);
        if slack.is_zero() {
            return None;
        }
        d = Some(match d {
            Some(cur) if cur <= slack => cur,
            _ => slack,
        });
    }
    Some((nu, d? / int(2)))
}
