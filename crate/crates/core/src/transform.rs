//! The `±(ν,l)` rewrite system on Boolean functions.
//!
//! A `+(ν,l)` step adds the adjacent pair `{ν, ν^(l)}` to the satisfying set
//! of a function where neither is satisfying; `-(ν,l)` removes such a pair
//! when both are. Steps never change the Euler characteristic. This module
//! builds explicit step sequences (traces) that reduce functions to `⊥`, to
//! even support and to canonical form, and that connect any two functions
//! with the same Euler characteristic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::boolfun::{BoolFun, Valuation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `±(ν,l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RewriteStep {
    pub sign: Sign,
    pub nu: Valuation,
    pub var: usize,
}

impl RewriteStep {
    pub fn plus(nu: Valuation, var: usize) -> Self {
        RewriteStep { sign: Sign::Plus, nu, var }
    }

    pub fn minus(nu: Valuation, var: usize) -> Self {
        RewriteStep { sign: Sign::Minus, nu, var }
    }

    /// The step between two adjacent valuations, anchored at `from`.
    fn between(sign: Sign, from: Valuation, to: Valuation) -> Self {
        let var = from.differing_var(to).expect("path nodes are validated to be adjacent");
        RewriteStep { sign, nu: from, var }
    }

    /// The other endpoint `ν^(l)`.
    pub fn partner(&self) -> Valuation {
        self.nu.toggled(self.var)
    }

    pub fn flipped(self) -> Self {
        RewriteStep { sign: self.sign.flipped(), ..self }
    }
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.sign.symbol(), self.nu, self.var)
    }
}

/// A start function and the steps applied to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteTrace {
    start: BoolFun,
    steps: Vec<RewriteStep>,
}

impl RewriteTrace {
    pub fn new(start: BoolFun) -> Self {
        RewriteTrace { start, steps: Vec::new() }
    }

    pub fn from_steps(start: BoolFun, steps: Vec<RewriteStep>) -> Self {
        RewriteTrace { start, steps }
    }

    pub fn start(&self) -> &BoolFun {
        &self.start
    }

    pub fn steps(&self) -> &[RewriteStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Replays every step and returns the function reached.
    pub fn end(&self) -> Result<BoolFun> {
        let mut cur = self.start.clone();
        for (index, step) in self.steps.iter().enumerate() {
            apply_step_mut(&mut cur, *step, index)?;
        }
        Ok(cur)
    }

    /// The trace from the end back to the start: steps in reverse order
    /// with PLUS and MINUS swapped.
    pub fn reversed(&self) -> Result<RewriteTrace> {
        Ok(RewriteTrace { start: self.end()?, steps: self.steps.iter().rev().map(|s| s.flipped()).collect() })
    }

    /// The same walk on the negated functions. A PLUS step on `φ` is a
    /// MINUS step on `¬φ` and vice versa.
    pub fn negated(&self) -> RewriteTrace {
        RewriteTrace { start: self.start.not(), steps: self.steps.iter().map(|s| s.flipped()).collect() }
    }

    /// Number of PLUS steps.
    pub fn plus_count(&self) -> usize {
        self.steps.iter().filter(|s| s.sign == Sign::Plus).count()
    }
}

/// Applies one step, enforcing its precondition.
pub fn apply_step(phi: &BoolFun, step: RewriteStep) -> Result<BoolFun> {
    let mut out = phi.clone();
    apply_step_mut(&mut out, step, 0)?;
    Ok(out)
}

/// In-place [`apply_step`]; `index` is reported in errors.
pub fn apply_step_mut(phi: &mut BoolFun, step: RewriteStep, index: usize) -> Result<()> {
    let k = phi.k();
    if step.var > k {
        return Err(Error::VariableOutOfRange { var: step.var, k });
    }
    if !step.nu.is_subset(Valuation::full(k)) {
        return Err(Error::InvalidStep { index, nu: step.nu, reason: "valuation mentions variables outside V" });
    }
    let (want, reason) = match step.sign {
        Sign::Plus => (false, "PLUS requires both valuations unsatisfying"),
        Sign::Minus => (true, "MINUS requires both valuations satisfying"),
    };
    for nu in [step.nu, step.partner()] {
        if phi.eval(nu) != want {
            return Err(Error::InvalidStep { index, nu, reason });
        }
    }
    phi.set(step.nu, !want);
    phi.set(step.partner(), !want);
    Ok(())
}

/// Replays `trace` and compares the result with `expected_end`.
///
/// An invalid step is reported as [`Error::InvalidStep`] carrying its index;
/// a wrong final function as [`Error::InvalidTrace`] with index `len`.
pub fn verify_trace(trace: &RewriteTrace, expected_end: &BoolFun) -> Result<()> {
    let end = trace.end()?;
    if end != *expected_end {
        return Err(Error::InvalidTrace { index: trace.len() });
    }
    Ok(())
}

pub fn is_valid_trace(trace: &RewriteTrace, expected_end: &BoolFun) -> bool {
    verify_trace(trace, expected_end).is_ok()
}

/// The hypercube `G_V` with the satisfying valuations of `φ` colored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    colored: BoolFun,
}

impl ColoredGraph {
    pub fn new(phi: &BoolFun) -> Self {
        ColoredGraph { colored: phi.clone() }
    }

    pub fn k(&self) -> usize {
        self.colored.k()
    }

    pub fn is_colored(&self, nu: Valuation) -> bool {
        self.colored.eval(nu)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Valuation> {
        self.colored.valuations()
    }

    pub fn neighbors(&self, nu: Valuation) -> impl Iterator<Item = Valuation> {
        (0..=self.k()).map(move |v| nu.toggled(v))
    }

    /// Nodes of one color side, split by parity as `(even, odd)`.
    pub fn parity_classes(&self, colored: bool) -> (Vec<Valuation>, Vec<Valuation>) {
        self.nodes().filter(|&nu| self.is_colored(nu) == colored).partition(|nu| nu.is_even())
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {name} {{");
        for nu in self.nodes() {
            let style = if self.is_colored(nu) { ", style=filled, fillcolor=lightblue" } else { "" };
            let _ = writeln!(out, "  \"{nu}\" [label=\"{nu}\"{style}];");
        }
        for nu in self.nodes() {
            for w in self.neighbors(nu).filter(|w| nu < *w) {
                let _ = writeln!(out, "  \"{nu}\" -- \"{w}\";");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A shortest hypercube path from `from` to `to`, always moving to the
/// numerically smallest neighbour that gets one step closer.
pub fn hypercube_path(from: Valuation, to: Valuation) -> Vec<Valuation> {
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        let diff = cur.bits() ^ to.bits();
        let removable = cur.bits() & diff;
        let var = if removable != 0 { 31 - removable.leading_zeros() as usize } else { diff.trailing_zeros() as usize };
        cur = cur.toggled(var);
        path.push(cur);
    }
    path
}

/// A path between two valuations of equal size `s` that alternates between
/// size `s` (even positions) and size `s+1` (odd positions).
pub fn alternating_path(from: Valuation, to: Valuation) -> Vec<Valuation> {
    debug_assert_eq!(from.size(), to.size());
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        let add = to.difference(cur).bits().trailing_zeros() as usize;
        cur = cur.toggled(add);
        path.push(cur);
        let removable = cur.difference(to).bits();
        cur = cur.toggled(31 - removable.leading_zeros() as usize);
        path.push(cur);
    }
    path
}

fn check_path(phi: &BoolFun, path: &[Valuation]) -> Result<()> {
    if path.len() < 2 {
        return Err(Error::InvalidChain("a path needs at least two nodes"));
    }
    let full = Valuation::full(phi.k());
    if path.iter().any(|nu| !nu.is_subset(full)) {
        return Err(Error::InvalidChain("path leaves the hypercube"));
    }
    if path.windows(2).any(|w| w[0].differing_var(w[1]).is_none()) {
        return Err(Error::InvalidChain("consecutive nodes are not adjacent"));
    }
    for (i, a) in path.iter().enumerate() {
        if path[i + 1..].contains(a) {
            return Err(Error::InvalidChain("path is not simple"));
        }
    }
    if path[1..path.len() - 1].iter().any(|&nu| phi.eval(nu)) {
        return Err(Error::InvalidChain("an interior node is satisfying"));
    }
    if !phi.eval(path[0]) {
        return Err(Error::InvalidChain("the first node is not satisfying"));
    }
    Ok(())
}

/// Steps uncoloring both endpoints of `path`, which must have opposite
/// parity (an even number of interior nodes), both be satisfying, and have
/// only unsatisfying interior nodes.
pub fn chainkill(phi: &BoolFun, path: &[Valuation]) -> Result<Vec<RewriteStep>> {
    check_path(phi, path)?;
    if !path.len().is_multiple_of(2) {
        return Err(Error::InvalidChain("chainkill endpoints must have opposite parity"));
    }
    if !phi.eval(path[path.len() - 1]) {
        return Err(Error::InvalidChain("the last node is not satisfying"));
    }
    let half = (path.len() - 2) / 2;
    let mut steps = Vec::with_capacity(path.len() - 1);
    for j in 0..half {
        steps.push(RewriteStep::between(Sign::Plus, path[2 * j + 1], path[2 * j + 2]));
        steps.push(RewriteStep::between(Sign::Minus, path[2 * j], path[2 * j + 1]));
    }
    steps.push(RewriteStep::between(Sign::Minus, path[2 * half], path[2 * half + 1]));
    Ok(steps)
}

/// Steps moving the color from the first node of `path` to the last, which
/// must have the same parity and be unsatisfying.
pub fn chainswap(phi: &BoolFun, path: &[Valuation]) -> Result<Vec<RewriteStep>> {
    check_path(phi, path)?;
    if path.len() % 2 != 1 {
        return Err(Error::InvalidChain("chainswap endpoints must have equal parity"));
    }
    if phi.eval(path[path.len() - 1]) {
        return Err(Error::InvalidChain("the last node is already satisfying"));
    }
    let half = (path.len() - 1) / 2;
    let mut steps = Vec::with_capacity(path.len() - 1);
    for j in 0..half {
        steps.push(RewriteStep::between(Sign::Plus, path[2 * j + 1], path[2 * j + 2]));
        steps.push(RewriteStep::between(Sign::Minus, path[2 * j], path[2 * j + 1]));
    }
    Ok(steps)
}

/// Two satisfying valuations of opposite parity joined by a path whose
/// interior avoids `sat(φ)`.
///
/// Starts from the first even and first odd satisfying valuation and trims
/// the shortest path between them to its last even-position satisfying node
/// and the next odd-position satisfying node after it.
pub fn fetch_pair(phi: &BoolFun) -> Result<(Valuation, Valuation, Vec<Valuation>)> {
    let count = phi.sat_count();
    let euler = phi.euler();
    if count as i64 == euler.abs() {
        return Err(Error::NothingToFetch { count, euler_abs: euler.abs() });
    }
    let even = phi.sat().find(|nu| nu.is_even()).expect("both parities are present");
    let odd = phi.sat().find(|nu| !nu.is_even()).expect("both parities are present");
    let path = hypercube_path(even, odd);
    let i = (0..path.len()).step_by(2).rfind(|&j| phi.eval(path[j])).expect("the first node is satisfying");
    let i2 = (i + 1..path.len()).step_by(2).find(|&j| phi.eval(path[j])).expect("the last node is satisfying");
    let seg = path[i..=i2].to_vec();
    Ok((seg[0], seg[seg.len() - 1], seg))
}

fn run(cur: &mut BoolFun, trace: &mut RewriteTrace, steps: Vec<RewriteStep>) -> Result<()> {
    for step in steps {
        apply_step_mut(cur, step, trace.steps.len())?;
        trace.steps.push(step);
    }
    Ok(())
}

/// A trace from `φ` to `⊥`, by repeated fetch and chainkill.
pub fn reduce_to_bot(phi: &BoolFun) -> Result<RewriteTrace> {
    let euler = phi.euler();
    if euler != 0 {
        return Err(Error::NotReducible { euler });
    }
    let mut trace = RewriteTrace::new(phi.clone());
    let mut cur = phi.clone();
    while !cur.is_bot() {
        let (_, _, path) = fetch_pair(&cur)?;
        let steps = chainkill(&cur, &path)?;
        run(&mut cur, &mut trace, steps)?;
    }
    Ok(trace)
}

/// A trace to a function whose satisfying valuations all have even size.
/// Requires `eul(φ) ≥ 0`; negate first otherwise.
pub fn to_even_support(phi: &BoolFun) -> Result<RewriteTrace> {
    let euler = phi.euler();
    if euler < 0 {
        return Err(Error::WrongSign { euler });
    }
    let mut trace = RewriteTrace::new(phi.clone());
    let mut cur = phi.clone();
    while cur.sat().any(|nu| !nu.is_even()) {
        let (_, _, path) = fetch_pair(&cur)?;
        let steps = chainkill(&cur, &path)?;
        run(&mut cur, &mut trace, steps)?;
    }
    Ok(trace)
}

/// True when the support is even and no even valuation is missing below a
/// satisfying one.
pub fn is_canonical(phi: &BoolFun) -> bool {
    phi.sat().all(|nu| nu.is_even()) && find_bad_pair(phi).is_none()
}

fn smallest_unsat_even_size(phi: &BoolFun) -> Option<u32> {
    phi.valuations().filter(|nu| nu.is_even() && !phi.eval(*nu)).map(Valuation::size).min()
}

/// Picks `(ν, ν')` with `ν` satisfying of maximal size and `ν'` an
/// unsatisfying even valuation of smaller size, preferring `ν' ⊆ ν`.
fn find_bad_pair(phi: &BoolFun) -> Option<(Valuation, Valuation)> {
    let floor = smallest_unsat_even_size(phi)?;
    let nu = phi
        .sat()
        .filter(|nu| nu.size() > floor)
        .max_by(|a, b| a.size().cmp(&b.size()).then(b.bits().cmp(&a.bits())))?;
    let below = |w: &Valuation| w.is_even() && w.size() < nu.size() && !phi.eval(*w);
    let subset = subsets(nu).filter(below).min_by(Valuation::size_order);
    let target = subset.or_else(|| phi.valuations().filter(below).min_by(Valuation::size_order))?;
    Some((nu, target))
}

fn subsets(nu: Valuation) -> impl Iterator<Item = Valuation> {
    let bits = nu.bits();
    let mut sub = Some(bits);
    core::iter::from_fn(move || {
        let cur = sub?;
        sub = (cur != 0).then(|| (cur - 1) & bits);
        Some(Valuation::from_bits(cur))
    })
}

/// Chainswaps the last satisfying node on the descending path from `nu`
/// down to `target`.
fn descend(cur: &mut BoolFun, trace: &mut RewriteTrace, nu: Valuation, target: Valuation) -> Result<()> {
    let path = hypercube_path(nu, target);
    let i = (0..path.len() - 1).rev().find(|&j| cur.eval(path[j])).expect("the top of the path is satisfying");
    let steps = chainswap(cur, &path[i..])?;
    run(cur, trace, steps)
}

/// A trace to a function in canonical form. Requires even support.
pub fn canonicalize(phi: &BoolFun) -> Result<RewriteTrace> {
    if let Some(nu) = phi.sat().find(|nu| !nu.is_even()) {
        return Err(Error::OddSupport { nu });
    }
    let mut trace = RewriteTrace::new(phi.clone());
    let mut cur = phi.clone();
    while let Some((nu, target)) = find_bad_pair(&cur) {
        if target.is_subset(nu) {
            descend(&mut cur, &mut trace, nu, target)?;
            continue;
        }
        let lateral = subsets(nu).filter(|w| w.size() == target.size()).min().expect("ν is larger than the target");
        if cur.eval(lateral) {
            // Shift colors one slot along the alternating path so that
            // `lateral` becomes free, one three-node chainswap at a time.
            let path = alternating_path(lateral, target);
            let j = (0..path.len()).step_by(2).find(|&p| !cur.eval(path[p])).expect("the target is unsatisfying");
            for p in (2..=j).rev().step_by(2) {
                let steps = chainswap(&cur, &path[p - 2..=p])?;
                run(&mut cur, &mut trace, steps)?;
            }
        }
        descend(&mut cur, &mut trace, nu, lateral)?;
    }
    Ok(trace)
}

/// Turns canonical `cur` into canonical `target` with the same number of
/// satisfying valuations.
fn equalize(cur: &mut BoolFun, trace: &mut RewriteTrace, target: &BoolFun) -> Result<()> {
    loop {
        let extra = cur.and_not(target)?.sat().next();
        let missing = target.and_not(cur)?.sat().next();
        let (nu, nu_p) = match (extra, missing) {
            (None, None) => return Ok(()),
            (Some(a), Some(b)) if a.size() == b.size() => (a, b),
            _ => return Err(Error::InvalidChain("canonical forms differ in shape")),
        };
        let path = alternating_path(nu, nu_p);
        let last = path.len() - 1;
        let colored: Vec<usize> = (0..last).step_by(2).filter(|&p| cur.eval(path[p])).collect();
        let m = colored.len() - 1;
        let steps = chainswap(cur, &path[colored[m]..])?;
        run(cur, trace, steps)?;
        for p in (0..m).rev() {
            let steps = chainswap(cur, &path[colored[p]..=colored[p + 1]])?;
            run(cur, trace, steps)?;
        }
    }
}

/// A trace from `φ` to `ψ`; exists exactly when the Euler characteristics
/// agree.
pub fn equivalence_witness(phi: &BoolFun, psi: &BoolFun) -> Result<RewriteTrace> {
    if phi.k() != psi.k() {
        return Err(Error::ArityMismatch { left: phi.k(), right: psi.k() });
    }
    let (left, right) = (phi.euler(), psi.euler());
    if left != right {
        return Err(Error::NoWitness { left, right });
    }
    if left < 0 {
        return Ok(equivalence_witness(&phi.not(), &psi.not())?.negated());
    }

    let normalize = |f: &BoolFun| -> Result<RewriteTrace> {
        let mut trace = to_even_support(f)?;
        let canon = canonicalize(&trace.end()?)?;
        trace.steps.extend_from_slice(canon.steps());
        Ok(trace)
    };
    let mut trace = normalize(phi)?;
    let psi_side = normalize(psi)?;

    let mut cur = trace.end()?;
    equalize(&mut cur, &mut trace, &psi_side.end()?)?;
    trace.steps.extend(psi_side.steps.iter().rev().map(|s| s.flipped()));
    Ok(trace)
}

/// Whether `φ` reaches `⊥` using MINUS steps only, by exhaustive memoized
/// search over satisfying sets. Limited to `k ≤ 4`.
pub fn minus_only_reducible(phi: &BoolFun) -> Result<bool> {
    let k = phi.k();
    let word = match phi.as_word() {
        Some(w) if k <= 4 => w,
        _ => return Err(Error::TooLarge { what: "k for MINUS-only search", limit: 4 }),
    };
    let mut memo = BTreeMap::new();
    Ok(minus_search(word, k, &mut memo))
}

fn minus_search(state: u64, k: usize, memo: &mut BTreeMap<u64, bool>) -> bool {
    if state == 0 {
        return true;
    }
    if let Some(&known) = memo.get(&state) {
        return known;
    }
    // The lowest satisfying valuation is removed together with one of its
    // satisfying neighbours at some point of any successful run.
    let low = state.trailing_zeros() as usize;
    let found = (0..=k).any(|v| {
        let partner = low ^ (1 << v);
        state >> partner & 1 == 1 && minus_search(state & !(1u64 << low) & !(1u64 << partner), k, memo)
    });
    memo.insert(state, found);
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{phi9, phi_max_euler, phi_no_pm};
    use proptest::prelude::*;

    fn v(vars: &[usize]) -> Valuation {
        Valuation::from_vars(vars.iter().copied())
    }

    fn f(k: usize, sat: &[&[usize]]) -> BoolFun {
        BoolFun::from_sat(k, sat.iter().map(|s| v(s))).unwrap()
    }

    #[test]
    fn single_steps() {
        let bot = BoolFun::bot(1).unwrap();
        let pair = apply_step(&bot, RewriteStep::plus(v(&[]), 0)).unwrap();
        assert_eq!(pair, f(1, &[&[], &[0]]));
        assert_eq!(apply_step(&pair, RewriteStep::minus(v(&[]), 0)).unwrap(), bot);
        assert!(matches!(
            apply_step(&pair, RewriteStep::plus(v(&[0]), 1)),
            Err(Error::InvalidStep { nu, .. }) if nu == v(&[0])
        ));
        assert!(matches!(apply_step(&bot, RewriteStep::plus(v(&[]), 2)), Err(Error::VariableOutOfRange { .. })));
    }

    #[test]
    fn trace_verification() {
        let phi = phi9();
        assert!(is_valid_trace(&RewriteTrace::new(phi.clone()), &phi));
        let bad = RewriteTrace::from_steps(phi.clone(), vec![RewriteStep::plus(v(&[0, 3]), 1)]);
        assert_eq!(
            verify_trace(&bad, &phi).unwrap_err(),
            Error::InvalidStep { index: 0, nu: v(&[0, 3]), reason: "PLUS requires both valuations unsatisfying" }
        );
        let wrong_end = RewriteTrace::new(phi.clone());
        assert_eq!(verify_trace(&wrong_end, &BoolFun::bot(3).unwrap()), Err(Error::InvalidTrace { index: 0 }));
    }

    #[test]
    fn chainkill_examples() {
        let phi = f(1, &[&[], &[0]]);
        assert_eq!(chainkill(&phi, &[v(&[]), v(&[0])]).unwrap(), vec![RewriteStep::minus(v(&[]), 0)]);

        let phi = f(1, &[&[], &[1]]);
        let path = [v(&[]), v(&[0]), v(&[0, 1]), v(&[1])];
        let steps = chainkill(&phi, &path).unwrap();
        assert_eq!(steps.len(), 3);
        let trace = RewriteTrace::from_steps(phi, steps);
        assert!(is_valid_trace(&trace, &BoolFun::bot(1).unwrap()));

        let phi = f(1, &[&[], &[0, 1]]);
        assert!(matches!(chainkill(&phi, &[v(&[]), v(&[0]), v(&[0, 1])]), Err(Error::InvalidChain(_))));
    }

    #[test]
    fn chainswap_examples() {
        let phi = f(1, &[&[]]);
        let steps = chainswap(&phi, &[v(&[]), v(&[0]), v(&[0, 1])]).unwrap();
        assert_eq!(steps.len(), 2);
        let end = RewriteTrace::from_steps(phi, steps).end().unwrap();
        assert_eq!(end, f(1, &[&[0, 1]]));

        // A five-node path moves the color four edges away in four steps.
        let path = [v(&[]), v(&[0]), v(&[0, 1]), v(&[0, 1, 2]), v(&[0, 1, 2, 3])];
        let phi = f(3, &[&[]]);
        let steps = chainswap(&phi, &path).unwrap();
        assert_eq!(steps.len(), 4);
        let mut cur = phi.clone();
        let mut colored = Vec::new();
        for (i, s) in steps.iter().enumerate() {
            apply_step_mut(&mut cur, *s, i).unwrap();
            colored.push(path.iter().filter(|&&n| cur.eval(n)).count());
        }
        assert_eq!(colored, vec![3, 1, 3, 1]);
        assert_eq!(cur, f(3, &[&[0, 1, 2, 3]]));

        assert!(matches!(chainswap(&f(1, &[&[0]]), &[v(&[0]), v(&[0, 1]), v(&[0])]), Err(Error::InvalidChain(_))));
    }

    #[test]
    fn fetch_examples() {
        let (a, b, path) = fetch_pair(&f(1, &[&[], &[0]])).unwrap();
        assert_eq!((a, b, path), (v(&[]), v(&[0]), vec![v(&[]), v(&[0])]));

        let (_, _, path) = fetch_pair(&phi9()).unwrap();
        assert!(chainkill(&phi9(), &path).is_ok());

        assert_eq!(fetch_pair(&phi_max_euler(3).unwrap()), Err(Error::NothingToFetch { count: 8, euler_abs: 8 }));
    }

    #[test]
    fn reductions() {
        let bot = BoolFun::bot(3).unwrap();
        assert!(reduce_to_bot(&bot).unwrap().is_empty());
        let trace = reduce_to_bot(&phi9()).unwrap();
        assert!(is_valid_trace(&trace, &bot));
        assert!(trace.len() >= 4);
        assert_eq!(reduce_to_bot(&f(1, &[&[0, 1]])), Err(Error::NotReducible { euler: 1 }));
    }

    #[test]
    fn even_support() {
        assert!(to_even_support(&BoolFun::bot(1).unwrap()).unwrap().is_empty());
        assert_eq!(to_even_support(&f(1, &[&[0]])), Err(Error::WrongSign { euler: -1 }));
        let t = to_even_support(&f(1, &[&[], &[0]])).unwrap();
        assert!(is_valid_trace(&t, &BoolFun::bot(1).unwrap()));
    }

    #[test]
    fn canonical_forms() {
        assert!(canonicalize(&BoolFun::bot(2).unwrap()).unwrap().is_empty());
        let t = canonicalize(&f(1, &[&[0, 1]])).unwrap();
        assert_eq!(t.end().unwrap(), f(1, &[&[]]));
        assert_eq!(canonicalize(&f(1, &[&[0]])), Err(Error::OddSupport { nu: v(&[0]) }));
        // Every even subset of {0,1,2,3} is satisfying, so the free slot
        // {0,4} is only reachable sideways.
        let phi = f(5, &[&[], &[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3], &[0, 1, 2, 3]]);
        let t = canonicalize(&phi).unwrap();
        let end = t.end().unwrap();
        assert!(is_canonical(&end));
        assert_eq!(end.sat_count(), phi.sat_count());
    }

    #[test]
    fn alternating_path_shape() {
        let path = alternating_path(v(&[2, 3]), v(&[4, 5]));
        assert_eq!(path, vec![v(&[2, 3]), v(&[2, 3, 4]), v(&[2, 4]), v(&[2, 4, 5]), v(&[4, 5])]);
    }

    #[test]
    fn witnesses() {
        let bot = BoolFun::bot(1).unwrap();
        assert!(equivalence_witness(&bot, &bot).unwrap().is_empty());
        let a = f(1, &[&[], &[0]]);
        let b = f(1, &[&[1], &[0, 1]]);
        let t = equivalence_witness(&a, &b).unwrap();
        assert!(is_valid_trace(&t, &b));
        assert_eq!(equivalence_witness(&a, &f(1, &[&[0]])), Err(Error::NoWitness { left: 0, right: -1 }));
    }

    #[test]
    fn reversal_and_negation() {
        let t = reduce_to_bot(&phi9()).unwrap();
        let back = t.reversed().unwrap();
        assert_eq!(back.start(), &BoolFun::bot(3).unwrap());
        assert!(is_valid_trace(&back, &phi9()));
        let neg = t.negated();
        assert!(is_valid_trace(&neg, &BoolFun::top(3).unwrap()));
    }

    #[test]
    fn minus_only_search() {
        assert!(minus_only_reducible(&f(1, &[&[], &[0]])).unwrap());
        assert!(!minus_only_reducible(&f(1, &[&[], &[0, 1]])).unwrap());
        assert!(!minus_only_reducible(&phi_no_pm()).unwrap());
        assert!(!minus_only_reducible(&phi_no_pm().not()).unwrap());
        assert!(minus_only_reducible(&BoolFun::bot(5).unwrap()).is_err());
    }

    #[test]
    fn colored_graph_is_bipartite_by_parity() {
        let g = ColoredGraph::new(&phi9());
        for nu in g.nodes() {
            assert!(g.neighbors(nu).all(|w| w.is_even() != nu.is_even()));
        }
        let (even, odd) = g.parity_classes(true);
        assert_eq!((even.len(), odd.len()), (4, 4));
        assert!(g.to_dot("g").contains("--"));
    }

    fn arb_fun(k: usize) -> impl Strategy<Value = BoolFun> {
        any::<u64>().prop_map(move |w| BoolFun::from_word(k, w).unwrap())
    }

    proptest! {
        #[test]
        fn steps_preserve_euler(phi in arb_fun(3), bits in 0u32..16, var in 0usize..4) {
            let nu = Valuation::from_bits(bits);
            for step in [RewriteStep::plus(nu, var), RewriteStep::minus(nu, var)] {
                if let Ok(next) = apply_step(&phi, step) {
                    prop_assert_eq!(next.euler(), phi.euler());
                    prop_assert_eq!(next.sat_count().abs_diff(phi.sat_count()), 2);
                }
            }
        }

        #[test]
        fn reduction_length_is_bounded(phi in arb_fun(3)) {
            if phi.euler() == 0 {
                let t = reduce_to_bot(&phi).unwrap();
                prop_assert!(is_valid_trace(&t, &BoolFun::bot(3).unwrap()));
                prop_assert!(t.len() <= 4 * 8 * phi.sat_count());
            }
        }

        #[test]
        fn canonicalization_reaches_canonical_form(phi in arb_fun(3)) {
            let phi = BoolFun::from_fn(3, |nu| nu.is_even() && phi.eval(nu)).unwrap();
            let t = canonicalize(&phi).unwrap();
            prop_assert!(is_canonical(&t.end().unwrap()));
        }

        #[test]
        fn witnesses_replay(a in arb_fun(2), b in arb_fun(2)) {
            match equivalence_witness(&a, &b) {
                Ok(t) => {
                    prop_assert_eq!(a.euler(), b.euler());
                    prop_assert!(is_valid_trace(&t, &b));
                    prop_assert!(is_valid_trace(&t.reversed().unwrap(), &a));
                }
                Err(e) => {
                    prop_assert_ne!(a.euler(), b.euler());
                    prop_assert_eq!(e, Error::NoWitness { left: a.euler(), right: b.euler() });
                }
            }
        }
    }
}
