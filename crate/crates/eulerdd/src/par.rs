//! Parallel oracle evaluation and exhaustive sweeps. Results are collected
//! in a fixed order so output does not depend on the worker count.

use eulerdd_core::analysis::{for_each_monotone_word, matching_sides, word_euler, ConjectureReport, ENUMERATION_MAX_K};
use eulerdd_core::boolfun::BoolFun;
use eulerdd_core::pdb::{Distribution, Oracle, TidDatabase};
use eulerdd_core::{Error, Rational, Result};
use rayon::prelude::*;

/// Runs `f` on a pool with `jobs` workers, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(f),
        None => f(),
    }
}

/// The h-valuation distribution, with worlds split on a prefix of facts.
pub fn distribution(db: &TidDatabase, max_facts: usize) -> Result<Distribution> {
    let oracle = Oracle::new(db, max_facts)?;
    let fixed = oracle.num_facts().min(8);
    let parts: Vec<_> = (0..1u64 << fixed).into_par_iter().map(|p| oracle.partial(fixed, p)).collect();
    Ok(oracle.combine(parts))
}

pub fn oracle_pqe(phi: &BoolFun, db: &TidDatabase, max_facts: usize) -> Result<Rational> {
    if phi.k() != db.k() {
        return Err(Error::ArityMismatch { left: phi.k(), right: db.k() });
    }
    Ok(distribution(db, max_facts)?.probability(phi))
}

/// `f` over every Boolean function on `{0,…,k}`, in truth-table order.
pub fn sweep_functions<T: Send>(k: usize, f: impl Fn(BoolFun) -> Option<T> + Sync) -> Result<Vec<T>> {
    if !(1..=ENUMERATION_MAX_K).contains(&k) {
        return Err(Error::TooLarge { what: "k for exhaustive enumeration", limit: ENUMERATION_MAX_K });
    }
    let count = 1u64 << (1u32 << (k + 1));
    Ok((0..count).into_par_iter().filter_map(|w| f(BoolFun::from_word(k, w).expect("k is in range"))).collect())
}

/// Parallel version of the matching scan over monotone `eul = 0` functions.
pub fn conjecture_check(k: usize) -> Result<ConjectureReport> {
    if k > 4 {
        return Err(Error::TooLarge { what: "k for the matching scan", limit: 4 });
    }
    let mut words = Vec::new();
    for_each_monotone_word(k, |w| {
        if word_euler(k, w) == 0 {
            words.push(w);
        }
    })?;
    let entries =
        words.into_par_iter().map(|w| matching_sides(&BoolFun::from_word(k, w).expect("k is in range"))).collect();
    Ok(ConjectureReport { k, entries })
}
