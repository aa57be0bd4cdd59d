//! Database files (`.tid`): one fact per line, `<pred> <arg1> [<arg2>] <prob>`.
//!
//! Predicates are `R` and `T` (one argument) and `S1`, `S2`, … (two
//! arguments). Probabilities are `p/q` rationals or finite decimals. `k` is
//! the largest `S` index, or 1 when there is none.

use eulerdd_core::pdb::{Atom, TidDatabase};
use eulerdd_core::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{content_lines, FormatError};

/// `p/q`, an integer, or a finite decimal, converted exactly.
pub fn parse_probability(s: &str) -> Result<Rational, String> {
    let bad = || format!("invalid probability `{s}`");
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if let Some((p, q)) = s.split_once('/') {
        if !digits(p) || !digits(q) {
            return Err(bad());
        }
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(p.parse().map_err(|_| bad())?, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !(digits(int) || (int.is_empty() && digits(frac))) || !(frac.is_empty() || digits(frac)) {
        return Err(bad());
    }
    let numer: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Ok(Rational::new(numer, denom))
}

/// Always `p/q`, including integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn valid_constant(name: &str) -> bool {
    !name.is_empty() && !name.contains(['(', ')', ','])
}

pub fn parse_database(text: &str) -> Result<TidDatabase, FormatError> {
    struct Line<'a> {
        n: usize,
        pred: Option<usize>,
        args: Vec<&'a str>,
        prob: Rational,
    }

    let mut parsed = Vec::new();
    let mut k = 1;
    for (n, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let (pred_tok, rest) = toks.split_first().expect("content lines are nonempty");
        let pred = match *pred_tok {
            "R" | "T" => None,
            p => match p.strip_prefix('S').and_then(|i| i.parse::<usize>().ok()) {
                Some(i) if i >= 1 => Some(i),
                _ => return Err(FormatError::new(n, format!("unknown predicate `{p}`"))),
            },
        };
        let arity = if pred.is_some() { 2 } else { 1 };
        if rest.len() != arity + 1 {
            return Err(FormatError::new(n, format!("`{pred_tok}` takes {arity} argument(s) and a probability")));
        }
        let args = rest[..arity].to_vec();
        if let Some(bad) = args.iter().find(|a| !valid_constant(a)) {
            return Err(FormatError::new(n, format!("invalid constant `{bad}`")));
        }
        let prob = parse_probability(rest[arity]).map_err(|m| FormatError::new(n, m))?;
        if prob > Rational::one() {
            return Err(FormatError::new(n, format!("probability {prob} is greater than 1")));
        }
        if let Some(i) = pred {
            k = k.max(i);
        }
        parsed.push(Line { n, pred: if *pred_tok == "T" { Some(0) } else { pred }, args, prob });
    }

    let mut db = TidDatabase::new(k).map_err(|e| FormatError::new(0, e.to_string()))?;
    for line in parsed {
        let a = db.constant(line.args[0]);
        let atom = match line.pred {
            None => Atom::R(a),
            Some(0) => Atom::T(a),
            Some(i) => Atom::S(i, a, db.constant(line.args[1])),
        };
        db.add_fact(atom, line.prob).map_err(|e| FormatError::new(line.n, e.to_string()))?;
    }
    Ok(db)
}

pub fn write_database(db: &TidDatabase) -> String {
    let mut out = String::new();
    for fact in db.facts() {
        let c = |i: usize| db.domain()[i].as_str();
        let head = match fact.atom {
            Atom::R(a) => format!("R {}", c(a)),
            Atom::S(i, a, b) => format!("S{i} {} {}", c(a), c(b)),
            Atom::T(b) => format!("T {}", c(b)),
        };
        out.push_str(&format!("{head} {}\n", format_rational(&fact.prob)));
    }
    out
}
