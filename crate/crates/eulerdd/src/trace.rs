//! Trace files (`.trace`): `k <int>`, then one step per line as
//! `<+|-> <l> : <ν>` with `ν` written as in function files.

use eulerdd_core::boolfun::BoolFun;
use eulerdd_core::transform::{RewriteStep, RewriteTrace, Sign};

use crate::bf::{format_valuation, parse_k_header, parse_valuation};
use crate::error::{content_lines, FormatError};

pub fn write_trace(trace: &RewriteTrace) -> String {
    let mut out = format!("k {}\n", trace.start().k());
    for s in trace.steps() {
        out.push_str(&format!("{} {} : {}\n", s.sign.symbol(), s.var, format_valuation(s.nu)));
    }
    out
}

/// The declared `k` and the steps.
pub fn parse_steps(text: &str) -> Result<(usize, Vec<RewriteStep>), FormatError> {
    let mut lines = content_lines(text);
    let (n, first) = lines.next().ok_or_else(|| FormatError::new(0, "empty trace file"))?;
    let k = parse_k_header(n, first)?;
    let mut steps = Vec::new();
    for (n, line) in lines {
        let (head, nu) =
            line.split_once(':').ok_or_else(|| FormatError::new(n, "expected `<+|-> <l> : <valuation>`"))?;
        let mut toks = head.split_whitespace();
        let sign = match toks.next() {
            Some("+") => Sign::Plus,
            Some("-") => Sign::Minus,
            other => return Err(FormatError::new(n, format!("expected `+` or `-`, found `{}`", other.unwrap_or("")))),
        };
        let var: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .filter(|_| toks.next().is_none())
            .ok_or_else(|| FormatError::new(n, "expected a single variable index before `:`"))?;
        if var > k {
            return Err(FormatError::new(n, format!("variable {var} is out of range for k = {k}")));
        }
        let nu = parse_valuation(nu, k).map_err(|m| FormatError::new(n, m))?;
        steps.push(RewriteStep { sign, nu, var });
    }
    Ok((k, steps))
}

/// Attaches the steps of a trace file to its start function.
pub fn parse_trace(text: &str, start: &BoolFun) -> Result<RewriteTrace, FormatError> {
    let (k, steps) = parse_steps(text)?;
    if k != start.k() {
        return Err(FormatError::new(1, format!("trace has k = {k} but the start function has k = {}", start.k())));
    }
    Ok(RewriteTrace::from_steps(start.clone(), steps))
}
