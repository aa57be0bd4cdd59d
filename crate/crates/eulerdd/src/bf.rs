//! Function files (`.bf`).
//!
//! ```text
//! k 3
//! formula (2 | 3) & (0 | 3) & (1 | 3) & (0 | 1 | 2)
//! ```
//!
//! or a `sat` header followed by one satisfying valuation per line, as
//! ascending variable indices, with `.` for the empty valuation.

use eulerdd_core::boolfun::{BoolFun, Valuation};

use crate::error::{content_lines, FormatError};

pub fn parse_function(text: &str) -> Result<BoolFun, FormatError> {
    let mut lines = content_lines(text);
    let (n, first) = lines.next().ok_or_else(|| FormatError::new(0, "empty function file"))?;
    let k = parse_k_header(n, first)?;

    let (n, body) =
        lines.next().ok_or_else(|| FormatError::new(n, "expected `formula <expr>` or `sat` after the k line"))?;
    if let Some(expr) = body.strip_prefix("formula") {
        if let Some((extra, _)) = lines.next() {
            return Err(FormatError::new(extra, "unexpected content after the formula"));
        }
        return parse_formula(k, expr).map_err(|m| FormatError::new(n, m));
    }
    if body != "sat" {
        return Err(FormatError::new(n, format!("expected `formula` or `sat`, found `{body}`")));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (n, line) in lines {
        let nu = parse_valuation(line, k).map_err(|m| FormatError::new(n, m))?;
        if !seen.insert(nu) {
            return Err(FormatError::new(n, format!("duplicate valuation {nu}")));
        }
    }
    let phi = BoolFun::from_sat(k, seen).map_err(|e| FormatError::new(0, e.to_string()))?;
    Ok(phi)
}

pub(crate) fn parse_k_header(n: usize, line: &str) -> Result<usize, FormatError> {
    let rest = line
        .strip_prefix('k')
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| FormatError::new(n, "expected `k <int>`"))?;
    let k: usize = rest.trim().parse().map_err(|_| FormatError::new(n, format!("invalid k `{}`", rest.trim())))?;
    BoolFun::bot(k).map_err(|e| FormatError::new(n, e.to_string()))?;
    Ok(k)
}

/// Space-separated ascending indices, or `.`.
pub fn parse_valuation(s: &str, k: usize) -> Result<Valuation, String> {
    let s = s.trim();
    if s == "." {
        return Ok(Valuation::EMPTY);
    }
    let mut prev: Option<usize> = None;
    let mut vars = Vec::new();
    for tok in s.split_whitespace() {
        let v: usize = tok.parse().map_err(|_| format!("invalid variable `{tok}`"))?;
        if v > k {
            return Err(format!("variable {v} is out of range for k = {k}"));
        }
        if prev.is_some_and(|p| p >= v) {
            return Err(format!("indices must be strictly ascending: `{s}`"));
        }
        prev = Some(v);
        vars.push(v);
    }
    if vars.is_empty() {
        return Err("empty valuation; use `.`".into());
    }
    Ok(Valuation::from_vars(vars))
}

pub fn format_valuation(nu: Valuation) -> String {
    if nu.is_empty() {
        return ".".into();
    }
    nu.vars().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// One valuation per line, in increasing index order.
pub fn write_sat_block(phi: &BoolFun) -> String {
    phi.sat().map(|nu| format_valuation(nu) + "\n").collect()
}

/// The canonical `sat` form.
pub fn write_function(phi: &BoolFun) -> String {
    format!("k {}\nsat\n{}", phi.k(), write_sat_block(phi))
}

/// Parses `!` > `&` > `|` over decimal variable indices.
pub fn parse_formula(k: usize, expr: &str) -> Result<BoolFun, String> {
    let mut p = FormulaParser { k, src: expr.as_bytes(), pos: 0 };
    let f = p.or_expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("unexpected `{}` at column {}", p.src[p.pos] as char, p.pos + 1));
    }
    Ok(f)
}

struct FormulaParser<'a> {
    k: usize,
    src: &'a [u8],
    pos: usize,
}

impl FormulaParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or_expr(&mut self) -> Result<BoolFun, String> {
        let mut acc = self.and_expr()?;
        while self.eat(b'|') {
            acc = acc.or(&self.and_expr()?).map_err(|e| e.to_string())?;
        }
        Ok(acc)
    }

    fn and_expr(&mut self) -> Result<BoolFun, String> {
        let mut acc = self.unary()?;
        while self.eat(b'&') {
            acc = acc.and(&self.unary()?).map_err(|e| e.to_string())?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<BoolFun, String> {
        if self.eat(b'!') {
            return Ok(self.unary()?.not());
        }
        if self.eat(b'(') {
            let inner = self.or_expr()?;
            if !self.eat(b')') {
                return Err(format!("missing `)` at column {}", self.pos + 1));
            }
            return Ok(inner);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.src.get(self.pos) {
                Some(&c) => format!("unexpected `{}` at column {}", c as char, self.pos + 1),
                None => "unexpected end of formula".into(),
            });
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ASCII digits");
        let var: usize = text.parse().map_err(|_| format!("invalid variable `{text}`"))?;
        if var > self.k {
            return Err(format!("variable {var} is out of range for k = {}", self.k));
        }
        BoolFun::from_fn(self.k, |nu| nu.contains(var)).map_err(|e| e.to_string())
    }
}
