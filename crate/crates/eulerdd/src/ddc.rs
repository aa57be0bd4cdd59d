//! Circuit files (`.ddc`).
//!
//! ```text
//! ddc v1
//! facts 3
//! 0 v R(a)
//! 1 v T(a)
//! 2 a 2 0 1
//! root 2
//! ```
//!
//! Gate kinds are `v <label>`, `t`, `f`, `n <child>`, `a <n> <children…>`
//! and `o <n> <children…>`. Ids are dense from 0 and children precede their
//! parents. OR certificates are not stored.

use std::collections::BTreeMap;

use eulerdd_core::circuit::{Circuit, Gate};
use eulerdd_core::pdb::TidDatabase;

use crate::error::FormatError;

pub fn export(c: &Circuit, db: &TidDatabase) -> Result<String, FormatError> {
    if c.num_facts() != db.len() {
        return Err(FormatError::new(
            0,
            format!("circuit has {} facts but the database has {}", c.num_facts(), db.len()),
        ));
    }
    let mut out = format!("ddc v1\nfacts {}\n", c.num_facts());
    let list = |cs: &[usize]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    for (id, gate) in c.gates().iter().enumerate() {
        let line = match gate {
            Gate::Var(f) => format!("{id} v {}", db.label(*f)),
            Gate::Const(true) => format!("{id} t"),
            Gate::Const(false) => format!("{id} f"),
            Gate::Not(g) => format!("{id} n {g}"),
            Gate::And(cs) => format!("{id} a {} {}", cs.len(), list(cs)),
            Gate::Or(cs) => format!("{id} o {} {}", cs.len(), list(cs)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!("root {}\n", c.root()));
    Ok(out)
}

fn expect<'a>(got: Option<(usize, &'a str)>, what: &str) -> Result<(usize, &'a str), FormatError> {
    got.ok_or_else(|| FormatError::new(0, format!("missing {what}")))
}

pub fn import(text: &str, db: &TidDatabase) -> Result<Circuit, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (n, header) = expect(lines.next(), "`ddc v1` header")?;
    if header != "ddc v1" {
        return Err(FormatError::new(n, format!("expected `ddc v1`, found `{header}`")));
    }
    let (n, facts_line) = expect(lines.next(), "`facts <count>` line")?;
    let num_facts: usize = facts_line
        .strip_prefix("facts ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| FormatError::new(n, "expected `facts <count>`"))?;
    if num_facts != db.len() {
        return Err(FormatError::new(
            n,
            format!("circuit declares {num_facts} facts but the database has {}", db.len()),
        ));
    }
    let labels: BTreeMap<String, usize> = (0..db.len()).map(|f| (db.label(f), f)).collect();

    let mut gates = Vec::new();
    let mut root = None;
    for (n, line) in lines {
        if root.is_some() {
            return Err(FormatError::new(n, "content after the root line"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "root" {
            let id = toks
                .get(1)
                .filter(|_| toks.len() == 2)
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| FormatError::new(n, "expected `root <id>`"))?;
            if id >= gates.len() {
                return Err(FormatError::new(n, format!("root {id} is out of range ({} gates)", gates.len())));
            }
            root = Some(id);
            continue;
        }
        let id: usize = toks[0].parse().map_err(|_| FormatError::new(n, format!("invalid gate id `{}`", toks[0])))?;
        if id != gates.len() {
            return Err(FormatError::new(n, format!("gate id {id} is out of sequence, expected {}", gates.len())));
        }
        let child = |t: &str| -> Result<usize, FormatError> {
            let c: usize = t.parse().map_err(|_| FormatError::new(n, format!("invalid child `{t}`")))?;
            if c >= id {
                return Err(FormatError::new(n, format!("gate {id} refers to gate {c}, which does not precede it")));
            }
            Ok(c)
        };
        let arity = |want: usize| {
            if toks.len() == want {
                Ok(())
            } else {
                Err(FormatError::new(n, format!("wrong number of fields for gate {id}")))
            }
        };
        let gate = match toks.get(1).copied() {
            Some("v") => {
                arity(3)?;
                let f =
                    labels.get(toks[2]).ok_or_else(|| FormatError::new(n, format!("unknown fact `{}`", toks[2])))?;
                Gate::Var(*f)
            }
            Some("t") => {
                arity(2)?;
                Gate::Const(true)
            }
            Some("f") => {
                arity(2)?;
                Gate::Const(false)
            }
            Some("n") => {
                arity(3)?;
                Gate::Not(child(toks[2])?)
            }
            Some(kind @ ("a" | "o")) => {
                let count: usize = toks
                    .get(2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| FormatError::new(n, "missing child count"))?;
                arity(3 + count)?;
                let cs = toks[3..].iter().map(|t| child(t)).collect::<Result<Vec<_>, _>>()?;
                if kind == "a" {
                    Gate::And(cs)
                } else {
                    Gate::Or(cs)
                }
            }
            Some(other) => return Err(FormatError::new(n, format!("unknown gate kind `{other}`"))),
            None => return Err(FormatError::new(n, "missing gate kind")),
        };
        gates.push(gate);
    }
    let root = root.ok_or_else(|| FormatError::new(0, "missing `root <id>` line"))?;
    Circuit::from_parts(gates, root, num_facts).map_err(|e| FormatError::new(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tid::parse_database;
    use eulerdd_core::boolfun::phi9;
    use eulerdd_core::circuit::compile_query;
    use eulerdd_core::Rational;

    fn db() -> TidDatabase {
        parse_database("R a 1/2\nS1 a a 1/2\nT a 1/2\n").unwrap()
    }

    #[test]
    fn round_trip_of_compiled_circuit() {
        let db = TidDatabase::full(3, 2, &Rational::new(1.into(), 3.into())).unwrap();
        let c = compile_query(&phi9(), &db).unwrap();
        let text = export(&c, &db).unwrap();
        let back = import(&text, &db).unwrap();
        assert_eq!(back, c);
        assert_eq!(export(&back, &db).unwrap(), text);
    }

    #[test]
    fn hand_written() {
        let text = "ddc v1\nfacts 3\n0 v R(a)\n1 v T(a)\n2 n 1\n3 a 2 0 2\n4 t\n5 o 1 3\nroot 5\n";
        let c = import(text, &db()).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.gates()[3], Gate::And(vec![0, 2]));
    }

    #[test]
    fn errors() {
        let err = |body: &str| import(&format!("ddc v1\nfacts 3\n{body}"), &db()).unwrap_err();
        assert!(err("0 v R(a)\n1 a 2 0 2\nroot 1\n").message.contains("does not precede"));
        assert!(err("0 v R(a)\nroot 1\n").message.contains("out of range"));
        assert!(err("0 x\nroot 0\n").message.contains("unknown gate kind"));
        assert!(err("0 v R(b)\nroot 0\n").message.contains("unknown fact"));
        assert!(err("1 t\nroot 0\n").message.contains("out of sequence"));
        assert!(err("0 a 2 0\nroot 0\n").message.contains("wrong number"));
        assert!(err("0 t\n").message.contains("missing `root"));
        assert!(import("ddc v2\n", &db()).is_err());
        assert!(import("ddc v1\nfacts 2\n0 t\nroot 0\n", &db()).is_err());
    }
}
