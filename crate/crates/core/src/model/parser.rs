//! Line-oriented automaton format.
//!
//! ```text
//! clocks x y
//! bound 3
//! init l0
//! buchi l2
//! edge l0 l1 "x<1" reset y
//! ```
//!
//! Guards are `&&`-conjunctions of `x<c`, `c<=x`, `x-y<c`, `x==c` and chains
//! such as `0<x<1`. `=` is accepted for `==`, and `true` is the empty guard.
//! An optional `locations` line fixes the location order; otherwise locations
//! are numbered by first appearance.

use std::fmt;

use thiserror::Error;

use super::{Atom, AutomatonError, ClockSet, Edge, Guard, Relop, Term, TimedAutomaton};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownClock(String),
    UnknownLocation(String),
    Duplicate(String),
    NonIntegerConstant(String),
    DiagonalAtom(String),
    Missing(&'static str),
    Invalid(AutomatonError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownClock(c) => write!(f, "unknown clock `{c}`"),
            ParseErrorKind::UnknownLocation(l) => write!(f, "unknown location `{l}`"),
            ParseErrorKind::Duplicate(what) => write!(f, "duplicate declaration of {what}"),
            ParseErrorKind::NonIntegerConstant(c) => write!(f, "guard constant `{c}` is not an integer"),
            ParseErrorKind::DiagonalAtom(a) => {
                write!(f, "`{a}` compares two clocks; diagonal atoms must be written x-y<0")
            }
            ParseErrorKind::Missing(d) => write!(f, "missing `{d}` directive"),
            ParseErrorKind::Invalid(e) => write!(f, "{e}"),
        }
    }
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

#[derive(Clone, Debug)]
struct Word {
    text: String,
    column: usize,
    quoted: bool,
}

fn split_line(line: &str, lineno: usize) -> Result<Vec<Word>, ParseError> {
    let mut words = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == '"' {
            i += 1;
            let body = i;
            while i < chars.len() && chars[i] != '"' {
                i += 1;
            }
            if i == chars.len() {
                return Err(err(lineno, start + 1, ParseErrorKind::Syntax("unterminated string".into())));
            }
            words.push(Word { text: chars[body..i].iter().collect(), column: body + 1, quoted: true });
            i += 1;
        } else {
            while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '#' && chars[i] != '"' {
                i += 1;
            }
            words.push(Word { text: chars[start..i].iter().collect(), column: start + 1, quoted: false });
        }
    }
    Ok(words)
}

fn is_ident(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_alphabetic() || c == '_')
        && it.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Parses an automaton document.
pub fn parse_automaton(text: &str) -> Result<TimedAutomaton, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let words = split_line(raw, i + 1)?;
        if !words.is_empty() {
            lines.push((i + 1, words));
        }
    }

    let mut clocks: Option<ClockSet> = None;
    let mut bound: Option<i64> = None;
    let mut declared: Option<Vec<String>> = None;
    for (ln, words) in &lines {
        let head = &words[0];
        let args = &words[1..];
        match head.text.as_str() {
            "clocks" => {
                if clocks.is_some() {
                    return Err(err(*ln, head.column, ParseErrorKind::Duplicate("clocks".into())));
                }
                let names = plain_idents(*ln, head, args, "clock")?;
                clocks = Some(ClockSet::new(names).expect("checked non-empty and distinct"));
            }
            "bound" => {
                if bound.is_some() {
                    return Err(err(*ln, head.column, ParseErrorKind::Duplicate("bound".into())));
                }
                let [w] = args else {
                    return Err(err(*ln, head.column, ParseErrorKind::Syntax("`bound` takes one integer".into())));
                };
                let m: i64 = w.text.parse().map_err(|_| {
                    err(*ln, w.column, ParseErrorKind::Syntax(format!("bad bound `{}`", w.text)))
                })?;
                if m <= 0 {
                    return Err(err(*ln, w.column, ParseErrorKind::Invalid(AutomatonError::BadBound(m))));
                }
                bound = Some(m);
            }
            "locations" => {
                if declared.is_some() {
                    return Err(err(*ln, head.column, ParseErrorKind::Duplicate("locations".into())));
                }
                declared = Some(plain_idents(*ln, head, args, "location")?);
            }
            "init" | "buchi" | "edge" => {}
            other => {
                return Err(err(*ln, head.column, ParseErrorKind::Syntax(format!("unknown directive `{other}`"))))
            }
        }
    }
    let clocks = clocks.ok_or_else(|| err(1, 1, ParseErrorKind::Missing("clocks")))?;
    let bound = bound.ok_or_else(|| err(1, 1, ParseErrorKind::Missing("bound")))?;
    let fixed = declared.is_some();
    let mut locations = declared.unwrap_or_default();
    let location = |ln: usize, name: &Word, locations: &mut Vec<String>| -> Result<usize, ParseError> {
        if name.quoted || !is_ident(&name.text) {
            return Err(err(ln, name.column, ParseErrorKind::Syntax(format!("bad location `{}`", name.text))));
        }
        if let Some(i) = locations.iter().position(|l| *l == name.text) {
            return Ok(i);
        }
        if fixed {
            return Err(err(ln, name.column, ParseErrorKind::UnknownLocation(name.text.clone())));
        }
        locations.push(name.text.clone());
        Ok(locations.len() - 1)
    };

    let mut initial = None;
    let mut init_guard = None;
    let mut buchi = Vec::new();
    let mut seen_buchi = false;
    let mut edges = Vec::new();
    for (ln, words) in &lines {
        let ln = *ln;
        let head = &words[0];
        let args = &words[1..];
        match head.text.as_str() {
            "init" => {
                if initial.is_some() {
                    return Err(err(ln, head.column, ParseErrorKind::Duplicate("init".into())));
                }
                match args {
                    [l] => initial = Some(location(ln, l, &mut locations)?),
                    [l, g] if g.quoted => {
                        initial = Some(location(ln, l, &mut locations)?);
                        init_guard = Some(parse_guard_at(&g.text, &clocks, bound, ln, g.column)?);
                    }
                    _ => {
                        return Err(err(ln, head.column, ParseErrorKind::Syntax("expected `init <loc> [\"guard\"]`".into())))
                    }
                }
            }
            "buchi" => {
                if seen_buchi {
                    return Err(err(ln, head.column, ParseErrorKind::Duplicate("buchi".into())));
                }
                seen_buchi = true;
                for l in args {
                    let i = location(ln, l, &mut locations)?;
                    if buchi.contains(&i) {
                        return Err(err(ln, l.column, ParseErrorKind::Duplicate(format!("Büchi location `{}`", l.text))));
                    }
                    buchi.push(i);
                }
            }
            "edge" => {
                if args.len() < 3 || !args[2].quoted || args[0].quoted || args[1].quoted {
                    return Err(err(
                        ln,
                        head.column,
                        ParseErrorKind::Syntax("expected `edge <loc> <loc> \"<guard>\" [reset <clock>+]`".into()),
                    ));
                }
                let source = location(ln, &args[0], &mut locations)?;
                let target = location(ln, &args[1], &mut locations)?;
                let guard = parse_guard_at(&args[2].text, &clocks, bound, ln, args[2].column)?;
                let mut resets = Vec::new();
                match &args[3..] {
                    [] => {}
                    [kw, rest @ ..] if kw.text == "reset" && !kw.quoted && !rest.is_empty() => {
                        for c in rest {
                            let i = clocks
                                .index_of(&c.text)
                                .ok_or_else(|| err(ln, c.column, ParseErrorKind::UnknownClock(c.text.clone())))?;
                            if resets.contains(&i) {
                                return Err(err(ln, c.column, ParseErrorKind::Duplicate(format!("reset of `{}`", c.text))));
                            }
                            resets.push(i);
                        }
                    }
                    [w, ..] => {
                        return Err(err(ln, w.column, ParseErrorKind::Syntax(format!("unexpected `{}`", w.text))))
                    }
                }
                edges.push(Edge { source, target, guard, resets });
            }
            _ => {}
        }
    }
    let initial = initial.ok_or_else(|| err(1, 1, ParseErrorKind::Missing("init")))?;
    TimedAutomaton::new(clocks, bound, locations, edges, initial, init_guard, &buchi)
        .map_err(|e| err(1, 1, ParseErrorKind::Invalid(e)))
}

fn plain_idents(ln: usize, head: &Word, args: &[Word], what: &str) -> Result<Vec<String>, ParseError> {
    if args.is_empty() {
        return Err(err(ln, head.column, ParseErrorKind::Syntax(format!("`{}` needs at least one {what}", head.text))));
    }
    let mut out: Vec<String> = Vec::new();
    for w in args {
        if w.quoted || !is_ident(&w.text) {
            return Err(err(ln, w.column, ParseErrorKind::Syntax(format!("bad {what} name `{}`", w.text))));
        }
        if out.contains(&w.text) {
            return Err(err(ln, w.column, ParseErrorKind::Duplicate(format!("{what} `{}`", w.text))));
        }
        out.push(w.text.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Rel(Relop),
    Eq,
    Minus,
    And,
}

/// Parses a guard in isolation (line 1, column 1).
pub fn parse_guard(text: &str, clocks: &ClockSet, bound: i64) -> Result<Guard, ParseError> {
    parse_guard_at(text, clocks, bound, 1, 1)
}

fn lex_guard(text: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c == '&' {
            if chars.get(i + 1) != Some(&'&') {
                return Err(err(line, col, ParseErrorKind::Syntax("expected `&&`".into())));
            }
            out.push((Tok::And, col));
            i += 2;
        } else if c == '<' {
            if chars.get(i + 1) == Some(&'=') {
                out.push((Tok::Rel(Relop::Le), col));
                i += 2;
            } else {
                out.push((Tok::Rel(Relop::Lt), col));
                i += 1;
            }
        } else if c == '=' {
            i += if chars.get(i + 1) == Some(&'=') { 2 } else { 1 };
            out.push((Tok::Eq, col));
        } else if c == '>' {
            return Err(err(line, col, ParseErrorKind::Syntax("use `<` or `<=` with the operands swapped".into())));
        } else if c == '-' && !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            out.push((Tok::Minus, col));
            i += 1;
        } else if c.is_ascii_digit() || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            if lit.contains('.') || lit.contains('/') {
                return Err(err(line, col, ParseErrorKind::NonIntegerConstant(lit)));
            }
            let v = lit
                .parse()
                .map_err(|_| err(line, col, ParseErrorKind::Syntax(format!("bad integer `{lit}`"))))?;
            out.push((Tok::Int(v), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(err(line, col, ParseErrorKind::Syntax(format!("unexpected `{c}`"))));
        }
    }
    Ok(out)
}

fn parse_guard_at(text: &str, clocks: &ClockSet, bound: i64, line: usize, col0: usize) -> Result<Guard, ParseError> {
    let toks = lex_guard(text, line, col0)?;
    if toks.is_empty() || (toks.len() == 1 && toks[0].0 == Tok::Ident("true".into())) {
        return Ok(Guard::truth(clocks.len(), bound));
    }
    let end_col = col0 + text.chars().count();
    let mut atoms = Vec::new();
    for chunk in toks.split(|(t, _)| *t == Tok::And) {
        let col = chunk.first().map_or(end_col, |(_, c)| *c);
        if chunk.is_empty() {
            return Err(err(line, col, ParseErrorKind::Syntax("empty conjunct".into())));
        }
        atoms.push(parse_atom(chunk, clocks, line, end_col)?);
    }
    Ok(Guard::new(atoms, clocks.len(), bound))
}

fn parse_atom(toks: &[(Tok, usize)], clocks: &ClockSet, line: usize, end_col: usize) -> Result<Atom, ParseError> {
    let mut pos = 0;
    let col_at = |p: usize| toks.get(p).map_or(end_col, |(_, c)| *c);
    let syntax = |p: usize, m: &str| err(line, col_at(p), ParseErrorKind::Syntax(m.to_string()));
    let clock = |p: usize| -> Result<usize, ParseError> {
        match &toks.get(p) {
            Some((Tok::Ident(n), c)) => clocks.index_of(n).ok_or_else(|| err(line, *c, ParseErrorKind::UnknownClock(n.clone()))),
            _ => Err(syntax(p, "expected a clock")),
        }
    };
    let source = || {
        toks.iter()
            .map(|(t, _)| match t {
                Tok::Ident(s) => s.clone(),
                Tok::Int(v) => v.to_string(),
                Tok::Rel(Relop::Lt) => "<".into(),
                Tok::Rel(Relop::Le) => "<=".into(),
                Tok::Eq => "==".into(),
                Tok::Minus => "-".into(),
                Tok::And => "&&".into(),
            })
            .collect::<String>()
    };

    let mut lower = None;
    if let Some((Tok::Int(k), _)) = toks.first() {
        match toks.get(1) {
            Some((Tok::Rel(op), _)) => lower = Some((*k, *op)),
            Some((Tok::Eq, _)) => {
                let term = parse_term(toks, 2, &clock)?;
                if term.1 != toks.len() {
                    return Err(syntax(term.1, "trailing input after equality"));
                }
                return Ok(Atom::equals(term.0, *k));
            }
            _ => return Err(syntax(1, "expected `<`, `<=` or `==`")),
        }
        pos = 2;
    }
    if matches!(toks.get(pos), Some((Tok::Ident(_), _))) && !matches!(toks.get(pos + 1), Some((Tok::Minus, _))) {
        // `x < y` without a difference is the common mistake worth naming
        if let (Some((Tok::Rel(_), _)), Some((Tok::Ident(_), _))) = (toks.get(pos + 1), toks.get(pos + 2)) {
            return Err(err(line, col_at(0), ParseErrorKind::DiagonalAtom(source())));
        }
    }
    let (term, next) = parse_term(toks, pos, &clock)?;
    pos = next;
    let mut upper = None;
    match toks.get(pos) {
        None => {}
        Some((Tok::Rel(op), _)) => match toks.get(pos + 1) {
            Some((Tok::Int(l), _)) => {
                upper = Some((*l, *op));
                pos += 2;
            }
            Some((Tok::Ident(_), c)) => return Err(err(line, *c, ParseErrorKind::DiagonalAtom(source()))),
            _ => return Err(syntax(pos + 1, "expected an integer")),
        },
        Some((Tok::Eq, _)) if lower.is_none() => match toks.get(pos + 1) {
            Some((Tok::Int(c), _)) if pos + 2 == toks.len() => return Ok(Atom::equals(term, *c)),
            Some((Tok::Ident(_), c)) => return Err(err(line, *c, ParseErrorKind::DiagonalAtom(source()))),
            _ => return Err(syntax(pos + 1, "expected an integer")),
        },
        Some(_) => return Err(syntax(pos, "expected `<`, `<=` or `==`")),
    }
    if pos != toks.len() {
        return Err(syntax(pos, "trailing input in atom"));
    }
    if lower.is_none() && upper.is_none() {
        return Err(syntax(0, "a bare clock is not a constraint"));
    }
    Ok(Atom { term, lower, upper })
}

fn parse_term(
    toks: &[(Tok, usize)],
    pos: usize,
    clock: &dyn Fn(usize) -> Result<usize, ParseError>,
) -> Result<(Term, usize), ParseError> {
    let x = clock(pos)?;
    if let Some((Tok::Minus, _)) = toks.get(pos + 1) {
        let y = clock(pos + 2)?;
        return Ok((Term::Diff(x, y), pos + 3));
    }
    Ok((Term::Clock(x), pos + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
# x and y both start at zero
clocks x y
bound 3
init l0
buchi l2
edge l0 l1 \"x<1\" reset y
edge l1 l2 \"x<2\" reset x
edge l2 l1 \"y==2\" reset y
";

    #[test]
    fn fig1_parses() {
        let a = parse_automaton(FIG1).unwrap();
        // numbered by first appearance, and `buchi` comes before the edges
        assert_eq!(a.locations(), ["l0", "l2", "l1"]);
        assert_eq!(a.edges().len(), 3);
        assert!(a.edges()[2].guard.is_punctual());
        assert!(!a.edges()[0].guard.is_punctual());
        assert_eq!(a.buchi(), vec![a.location_index("l2").unwrap()]);
        assert_eq!(a.edges()[0].resets, vec![1]);
    }

    #[test]
    fn degenerate_automaton() {
        let a = parse_automaton("clocks x\nbound 1\ninit only\n").unwrap();
        assert!(a.edges().is_empty());
        assert_eq!(a.locations().len(), 1);
    }

    #[test]
    fn diagonal_without_difference_is_rejected() {
        let e = parse_automaton("clocks x y\nbound 2\ninit a\nedge a a \"x<y\"\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DiagonalAtom(_)), "{e}");
        assert_eq!(e.line, 4);
        assert!(e.to_string().contains("x-y<0"));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_automaton("clocks x\nbound 2\ninit a\nedge a a \"x<1.5\"\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonIntegerConstant("1.5".into()));
        assert_eq!((e.line, e.column), (4, 13));
        let e = parse_automaton("clocks x\nbound 2\ninit a\nedge a a \"z<1\"\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownClock("z".into()));
        let e = parse_automaton("clocks x\nclocks y\nbound 2\ninit a\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Duplicate(_)));
        assert_eq!(e.line, 2);
        let e = parse_automaton("clocks x\nbound 2\nlocations a\ninit a\nedge a b \"true\"\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownLocation("b".into()));
        assert_eq!((e.line, e.column), (5, 8));
        let e = parse_automaton("clocks x\nbound 2\ninit a\nedge a a \"x<1\" reset q\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownClock("q".into()));
        assert!(parse_automaton("clocks x\nbound 2\n").is_err());
    }

    #[test]
    fn guard_forms() {
        let c = ClockSet::new(["x", "y"]).unwrap();
        let g = parse_guard("y=0 && 0<x<1", &c, 3).unwrap();
        assert_eq!(g.atoms().len(), 2);
        assert_eq!(g.atoms()[0], Atom::equals(Term::Clock(1), 0));
        assert_eq!(g.atoms()[1], Atom::between(Term::Clock(0), 0, Relop::Lt, 1, Relop::Lt));
        let g = parse_guard("x-y<=-1 && 1<=y", &c, 3).unwrap();
        assert_eq!(g.atoms()[0], Atom::upper(Term::Diff(0, 1), -1, Relop::Le));
        assert_eq!(g.atoms()[1], Atom::lower(Term::Clock(1), 1, Relop::Le));
        assert!(parse_guard("x", &c, 3).is_err());
        assert!(parse_guard("x<1 &&", &c, 3).is_err());
        assert!(parse_guard("x>1", &c, 3).is_err());
        assert_eq!(parse_guard("true", &c, 3).unwrap(), Guard::truth(2, 3));
    }

    #[test]
    fn round_trip() {
        let src = "clocks x y\nbound 2\ninit l0 \"0<x && x-y<0 && y<1\"\nbuchi l2\n\
                   edge l0 l1 \"0<y<1\" reset y\nedge l1 l2 \"x==1\" reset x\n\
                   edge l2 l0 \"-1<x-y<=0 && y<1\"\n";
        let a = parse_automaton(src).unwrap();
        let b = parse_automaton(&a.to_string()).unwrap();
        assert_eq!(a, b);
    }
}
