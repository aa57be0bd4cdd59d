//! Hardness classification, monotone Euler extrema, induced perfect
//! matchings and counting utilities.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::boolfun::{BoolFun, Valuation, MAX_K};
use crate::{Error, Result};

/// Largest `k` for which monotone functions are enumerated.
pub const MONOTONE_MAX_K: usize = 5;

/// Largest `k` for which all Boolean functions are enumerated.
pub const ENUMERATION_MAX_K: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    TractableDd,
    SharpPHard,
    /// Conjectured #P-hard, not proven.
    UnknownConjecturedHard,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::TractableDd => "TRACTABLE_DD",
            VerdictKind::SharpPHard => "SHARP_P_HARD",
            VerdictKind::UnknownConjecturedHard => "UNKNOWN_CONJECTURED_HARD",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    EulerZero,
    Monotone,
    /// The characteristic is reached by some monotone function.
    MonotoneWindow {
        min: i64,
        max: i64,
    },
    OutsideMonotoneWindow {
        min: i64,
        max: i64,
    },
}

impl Reason {
    pub fn tag(&self) -> &'static str {
        match self {
            Reason::EulerZero => "euler-zero",
            Reason::Monotone => "monotone",
            Reason::MonotoneWindow { .. } => "monotone-window",
            Reason::OutsideMonotoneWindow { .. } => "outside-monotone-window",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HardnessVerdict {
    pub kind: VerdictKind,
    pub euler: i64,
    pub reason: Reason,
}

impl fmt::Display for HardnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (eul = {}", self.kind, self.euler)?;
        match self.reason {
            Reason::EulerZero => f.write_str(")"),
            Reason::Monotone => f.write_str(", monotone)"),
            Reason::MonotoneWindow { min, max } => {
                write!(f, ", within the monotone range {min}..={max})")
            }
            Reason::OutsideMonotoneWindow { min, max } => {
                write!(f, ", outside the monotone range {min}..={max}; conjectured #P-hard)")
            }
        }
    }
}

/// Zero characteristic is tractable. Otherwise monotone functions are hard,
/// and so is any function whose characteristic some monotone function on the
/// same variables also has.
pub fn classify(phi: &BoolFun) -> HardnessVerdict {
    let euler = phi.euler();
    let (kind, reason) = if euler == 0 {
        (VerdictKind::TractableDd, Reason::EulerZero)
    } else if phi.is_monotone() {
        (VerdictKind::SharpPHard, Reason::Monotone)
    } else {
        let (min, max) = monotone_window(phi.k());
        if (min..=max).contains(&euler) {
            (VerdictKind::SharpPHard, Reason::MonotoneWindow { min, max })
        } else {
            (VerdictKind::UnknownConjecturedHard, Reason::OutsideMonotoneWindow { min, max })
        }
    };
    HardnessVerdict { kind, euler, reason }
}

fn binomial(n: u64, r: u64) -> i64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// The monotone function satisfied by valuations of size at least `t`.
pub fn threshold_function(k: usize, t: u32) -> Result<BoolFun> {
    BoolFun::from_fn(k, |nu| nu.size() >= t)
}

/// `eul` of [`threshold_function`], in closed form.
pub fn threshold_euler(k: usize, t: u32) -> i64 {
    let n = k as u64 + 1;
    (u64::from(t)..=n).map(|j| if j % 2 == 0 { 1 } else { -1 } * binomial(n, j)).sum()
}

/// The range of characteristics reached by threshold functions on
/// `{0,…,k}`.
///
/// Every value in it is reached by a monotone function, so it is a sound
/// window for hardness. It coincides with the brute-force extrema wherever
/// those were computed.
pub fn monotone_window(k: usize) -> (i64, i64) {
    (0..=k as u32 + 2).map(|t| threshold_euler(k, t)).fold((0, 0), |(lo, hi), e| (lo.min(e), hi.max(e)))
}

/// Truth tables of all monotone functions on `vars` variables, packed in one
/// word each. `vars ≤ 5`.
pub fn monotone_words(vars: usize) -> Result<Vec<u64>> {
    if vars > MONOTONE_MAX_K {
        return Err(Error::TooLarge { what: "variable count for monotone enumeration", limit: MONOTONE_MAX_K });
    }
    let mut level = vec![0u64, 1];
    for m in 0..vars {
        let shift = 1u32 << m;
        let mut next = Vec::new();
        for &lo in &level {
            for &hi in &level {
                if lo & !hi == 0 {
                    next.push(lo | hi << shift);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Calls `f` on the truth table of every monotone function on `{0,…,k}`.
pub fn for_each_monotone_word(k: usize, mut f: impl FnMut(u64)) -> Result<()> {
    if !(1..=MONOTONE_MAX_K).contains(&k) {
        return Err(Error::TooLarge { what: "k for monotone enumeration", limit: MONOTONE_MAX_K });
    }
    let halves = monotone_words(k)?;
    let shift = 1u32 << k;
    for &lo in &halves {
        for &hi in &halves {
            if lo & !hi == 0 {
                f(lo | hi << shift);
            }
        }
    }
    Ok(())
}

/// All monotone functions on `{0,…,k}`.
pub fn monotone_functions(k: usize) -> Result<Vec<BoolFun>> {
    let mut out = Vec::new();
    for_each_monotone_word(k, |w| out.push(BoolFun::from_word(k, w).expect("k is in range")))?;
    Ok(out)
}

fn parity_masks(k: usize) -> (u64, u64) {
    let n = 1u32 << (k + 1);
    let mut even = 0u64;
    for i in 0..n {
        if i.count_ones() % 2 == 0 {
            even |= 1 << i;
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (even, all & !even)
}

/// `eul` of a packed truth table on `{0,…,k}`.
pub fn word_euler(k: usize, word: u64) -> i64 {
    let (even, odd) = parity_masks(k);
    i64::from((word & even).count_ones()) - i64::from((word & odd).count_ones())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub threshold: u32,
    pub euler: i64,
    /// `|euler|` equals the largest absolute value over monotone functions.
    pub attains: bool,
    /// One of the thresholds `k/2 + 1` (even `k`) or `(k−1)/2 + 1`,
    /// `(k+1)/2 + 2` (odd `k`), read with `n = k`.
    pub stated: bool,
}

#[derive(Debug, Clone)]
pub struct ExtremaReport {
    pub k: usize,
    pub min: i64,
    pub max: i64,
    pub argmin: BoolFun,
    pub argmax: BoolFun,
    pub monotone_count: u64,
    pub symmetric: bool,
    pub candidates: Vec<Candidate>,
    /// The threshold window equals `(min, max)`.
    pub window_agrees: bool,
}

fn stated_thresholds(k: usize) -> Vec<u32> {
    let k = k as u32;
    if k.is_multiple_of(2) {
        vec![k / 2 + 1]
    } else {
        vec![(k - 1) / 2 + 1, k.div_ceil(2) + 2]
    }
}

/// Brute-force extrema of `eul` over all monotone functions on `{0,…,k}`,
/// with the threshold candidates evaluated against them.
pub fn monotone_euler_extrema(k: usize) -> Result<ExtremaReport> {
    let (mut min, mut max) = (i64::MAX, i64::MIN);
    let (mut argmin, mut argmax) = (0, 0);
    let mut count = 0u64;
    for_each_monotone_word(k, |w| {
        count += 1;
        let e = word_euler(k, w);
        if e < min {
            min = e;
            argmin = w;
        }
        if e > max {
            max = e;
            argmax = w;
        }
    })?;
    let best = min.abs().max(max.abs());
    let stated = stated_thresholds(k);
    let candidates = (0..=k as u32 + 2)
        .map(|t| {
            let euler = threshold_euler(k, t);
            Candidate { threshold: t, euler, attains: euler.abs() == best, stated: stated.contains(&t) }
        })
        .collect();
    Ok(ExtremaReport {
        k,
        min,
        max,
        argmin: BoolFun::from_word(k, argmin)?,
        argmax: BoolFun::from_word(k, argmax)?,
        monotone_count: count,
        symmetric: min == -max,
        candidates,
        window_agrees: monotone_window(k) == (min, max),
    })
}

/// A monotone function with characteristic `c`.
///
/// Starts from the threshold function with the most extreme characteristic
/// of the sign of `c` and removes satisfying valuations of minimal size one
/// at a time. Each removal keeps the function monotone and moves `eul` by
/// one towards zero.
pub fn monotone_with_euler(c: i64, k: usize) -> Result<BoolFun> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::UnsupportedK { k, min: 1, max: MAX_K });
    }
    let (min, max) = monotone_window(k);
    if !(min..=max).contains(&c) {
        return Err(Error::Unreachable { target: c, min, max });
    }
    if c == 0 {
        return BoolFun::bot(k);
    }
    let t = (0..=k as u32 + 2).max_by_key(|&t| threshold_euler(k, t) * c.signum()).expect("nonempty range");
    let mut phi = threshold_function(k, t)?;
    let mut order: Vec<Valuation> = phi.sat().collect();
    order.sort_by(|a, b| a.size_order(b));
    let mut euler = phi.euler();
    for nu in order {
        if euler == c {
            break;
        }
        phi.set(nu, false);
        euler -= nu.sign();
    }
    debug_assert!(phi.is_monotone() && phi.euler() == c);
    Ok(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Colored,
    Uncolored,
}

/// Edges `(even, odd)` of a perfect matching, sorted by the even endpoint.
pub type Matching = Vec<(Valuation, Valuation)>;

/// A perfect matching of the hypercube subgraph induced by the satisfying
/// (`Colored`) or non-satisfying (`Uncolored`) valuations of `φ`.
///
/// The subgraph is bipartite by parity; augmenting paths give a maximum
/// matching, which is returned only if it covers every node.
pub fn induced_perfect_matching(phi: &BoolFun, side: Side) -> Option<Matching> {
    let k = phi.k();
    let on_side = |nu: Valuation| phi.eval(nu) == (side == Side::Colored);
    let nodes: Vec<Valuation> = phi.valuations().filter(|&nu| on_side(nu)).collect();
    let left: Vec<Valuation> = nodes.iter().copied().filter(|nu| nu.is_even()).collect();
    if 2 * left.len() != nodes.len() {
        return None;
    }

    const NONE: usize = usize::MAX;
    let mut owner = vec![NONE; phi.num_valuations()];
    let mut mate = vec![Valuation::EMPTY; left.len()];
    let mut stamp = vec![0u32; phi.num_valuations()];

    for (start, round) in (0..left.len()).zip(1u32..) {
        let mut frames: Vec<(usize, usize)> = vec![(start, 0)];
        let mut via: Vec<Valuation> = Vec::new();
        let mut found = false;
        while let Some(top) = frames.last_mut() {
            let (l, var) = *top;
            if var > k {
                frames.pop();
                via.pop();
                continue;
            }
            top.1 += 1;
            let r = left[l].toggled(var);
            if !on_side(r) || stamp[r.index()] == round {
                continue;
            }
            stamp[r.index()] = round;
            match owner[r.index()] {
                NONE => {
                    via.push(r);
                    for (&(l, _), &r) in frames.iter().zip(&via) {
                        owner[r.index()] = l;
                        mate[l] = r;
                    }
                    found = true;
                    break;
                }
                next => {
                    via.push(r);
                    frames.push((next, 0));
                }
            }
        }
        if !found {
            return None;
        }
    }
    Some(left.into_iter().zip(mate).collect())
}

/// Whether `m` is a perfect matching of the chosen side of `φ`.
pub fn is_perfect_matching(phi: &BoolFun, side: Side, m: &[(Valuation, Valuation)]) -> bool {
    let on_side = |nu: Valuation| phi.eval(nu) == (side == Side::Colored);
    let mut covered = vec![false; phi.num_valuations()];
    for &(a, b) in m {
        if !on_side(a) || !on_side(b) || a.differing_var(b).is_none() {
            return false;
        }
        for nu in [a, b] {
            if core::mem::replace(&mut covered[nu.index()], true) {
                return false;
            }
        }
    }
    phi.valuations().all(|nu| !on_side(nu) || covered[nu.index()])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureEntry {
    pub phi: BoolFun,
    pub colored: bool,
    pub uncolored: bool,
}

#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub k: usize,
    /// Monotone functions with `eul = 0`.
    pub entries: Vec<ConjectureEntry>,
}

impl ConjectureReport {
    pub fn counterexamples(&self) -> impl Iterator<Item = &ConjectureEntry> {
        self.entries.iter().filter(|e| !e.colored && !e.uncolored)
    }

    /// Functions where exactly one side has a perfect matching.
    pub fn one_sided(&self) -> impl Iterator<Item = &ConjectureEntry> {
        self.entries.iter().filter(|e| e.colored != e.uncolored)
    }

    pub fn both_sides(&self) -> usize {
        self.entries.iter().filter(|e| e.colored && e.uncolored).count()
    }
}

pub fn matching_sides(phi: &BoolFun) -> ConjectureEntry {
    ConjectureEntry {
        phi: phi.clone(),
        colored: induced_perfect_matching(phi, Side::Colored).is_some(),
        uncolored: induced_perfect_matching(phi, Side::Uncolored).is_some(),
    }
}

/// Checks every monotone `φ` on `{0,…,k}` with `eul(φ) = 0` for a perfect
/// matching on the colored or the uncolored side. `k ≤ 4`.
pub fn conjecture_check(k: usize) -> Result<ConjectureReport> {
    if k > 4 {
        return Err(Error::TooLarge { what: "k for the matching scan", limit: 4 });
    }
    let mut entries = Vec::new();
    for_each_monotone_word(k, |w| {
        if word_euler(k, w) == 0 {
            entries.push(matching_sides(&BoolFun::from_word(k, w).expect("k is in range")));
        }
    })?;
    Ok(ConjectureReport { k, entries })
}

fn sieve(n: usize) -> Vec<u64> {
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn product(factors: &[BigUint]) -> BigUint {
    match factors.len() {
        0 => BigUint::from(1u32),
        1 => factors[0].clone(),
        n => product(&factors[..n / 2]) * product(&factors[n / 2..]),
    }
}

/// `C(n, r)` from its prime factorization.
pub fn binomial_big(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let legendre = |m: u64, p: u64| {
        let mut e = 0;
        let mut q = m;
        while q > 0 {
            q /= p;
            e += q;
        }
        e
    };
    let factors: Vec<BigUint> = sieve(n as usize)
        .into_iter()
        .filter_map(|p| {
            let e = legendre(n, p) - legendre(r, p) - legendre(n - r, p);
            (e > 0).then(|| BigUint::from(p).pow(e as u32))
        })
        .collect();
    product(&factors)
}

/// Number of Boolean functions on `{0,…,k}` with `eul = 0`, which is
/// `C(2^(k+1), 2^k)`.
pub fn count_euler_zero(k: usize) -> Result<BigUint> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::UnsupportedK { k, min: 1, max: MAX_K });
    }
    Ok(binomial_big(1 << (k + 1), 1 << k))
}

/// The same count by enumerating every function. `k ≤ 3`.
pub fn count_euler_zero_enumerated(k: usize) -> Result<u64> {
    if !(1..=ENUMERATION_MAX_K).contains(&k) {
        return Err(Error::TooLarge { what: "k for exhaustive enumeration", limit: ENUMERATION_MAX_K });
    }
    let n = 1u32 << (k + 1);
    Ok((0..1u64 << n).filter(|&w| word_euler(k, w) == 0).count() as u64)
}
