//! Tuple-independent databases over the schema `R, S1, …, Sk, T` and the
//! possible-worlds semantics of H-queries.
//!
//! Fact indices are the variables shared by worlds, OBDDs and circuits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::boolfun::{BoolFun, Valuation, MAX_K};
use crate::{Error, Rational, Result};

/// Enumeration guard of [`oracle_pqe`].
pub const ORACLE_MAX_FACTS: usize = 30;
/// Enumeration guard of [`lineage_table`].
pub const LINEAGE_MAX_FACTS: usize = 20;

/// A ground atom; constants are indices into the database domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    R(usize),
    /// `S_i(a, b)` with `1 ≤ i ≤ k`.
    S(usize, usize, usize),
    T(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub atom: Atom,
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TidDatabase {
    k: usize,
    domain: Vec<String>,
    facts: Vec<Fact>,
    index: BTreeMap<Atom, usize>,
}

impl TidDatabase {
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=MAX_K).contains(&k) {
            return Err(Error::UnsupportedK { k, min: 1, max: MAX_K });
        }
        Ok(TidDatabase { k, domain: Vec::new(), facts: Vec::new(), index: BTreeMap::new() })
    }

    /// The instance containing every fact over `n` constants named `c0, c1, …`,
    /// all with probability `prob`.
    pub fn full(k: usize, n: usize, prob: &Rational) -> Result<Self> {
        let mut db = Self::new(k)?;
        for i in 0..n {
            db.constant(&format!("c{i}"));
        }
        for atom in all_atoms(k, n) {
            db.add_fact(atom, prob.clone())?;
        }
        Ok(db)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Index of the constant `name`, adding it to the domain if new.
    pub fn constant(&mut self, name: &str) -> usize {
        match self.domain.iter().position(|c| c == name) {
            Some(i) => i,
            None => {
                self.domain.push(name.to_string());
                self.domain.len() - 1
            }
        }
    }

    pub fn find_constant(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|c| c == name)
    }

    pub fn add_fact(&mut self, atom: Atom, prob: Rational) -> Result<usize> {
        let n = self.domain.len();
        let in_domain = match atom {
            Atom::R(a) | Atom::T(a) => a < n,
            Atom::S(i, a, b) => {
                if !(1..=self.k).contains(&i) {
                    return Err(Error::InvalidDatabase(format!("predicate S{i} is outside S1..S{}", self.k)));
                }
                a < n && b < n
            }
        };
        if !in_domain {
            return Err(Error::InvalidDatabase("constant outside the domain".into()));
        }
        if prob < Rational::zero() || prob > Rational::one() {
            return Err(Error::InvalidDatabase(format!(
                "probability {prob} of {} is outside [0, 1]",
                self.atom_label(&atom)
            )));
        }
        if self.index.contains_key(&atom) {
            return Err(Error::InvalidDatabase(format!("duplicate fact {}", self.atom_label(&atom))));
        }
        self.facts.push(Fact { atom, prob });
        self.index.insert(atom, self.facts.len() - 1);
        Ok(self.facts.len() - 1)
    }

    /// The same facts read over the schema of a larger `k`.
    pub fn lift(&self, k: usize) -> Result<Self> {
        if k < self.k {
            return Err(Error::ArityMismatch { left: k, right: self.k });
        }
        let mut out = self.clone();
        out.k = k;
        Ok(out)
    }

    pub fn fact_index(&self, atom: &Atom) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn atom_label(&self, atom: &Atom) -> String {
        let c = |i: usize| self.domain.get(i).map_or("?", String::as_str);
        match *atom {
            Atom::R(a) => format!("R({})", c(a)),
            Atom::S(i, a, b) => format!("S{i}({},{})", c(a), c(b)),
            Atom::T(b) => format!("T({})", c(b)),
        }
    }

    pub fn label(&self, fact: usize) -> String {
        self.atom_label(&self.facts[fact].atom)
    }

    /// Fact index per slot of the chain `R(a), S1(a,b), …, Sk(a,b), T(b)`
    /// for each pair `(a, b)`; `h_{k,i}` holds on the pair iff slots `i` and
    /// `i+1` are present.
    fn chains(&self) -> Vec<Vec<Option<usize>>> {
        let n = self.domain.len();
        let mut chains = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut chain = Vec::with_capacity(self.k + 2);
                chain.push(self.fact_index(&Atom::R(a)));
                for i in 1..=self.k {
                    chain.push(self.fact_index(&Atom::S(i, a, b)));
                }
                chain.push(self.fact_index(&Atom::T(b)));
                chains.push(chain);
            }
        }
        chains
    }
}

/// Every atom over `n` constants in the canonical fact order.
pub fn all_atoms(k: usize, n: usize) -> Vec<Atom> {
    let mut atoms: Vec<Atom> = (0..n).map(Atom::R).collect();
    for i in 1..=k {
        for a in 0..n {
            for b in 0..n {
                atoms.push(Atom::S(i, a, b));
            }
        }
    }
    atoms.extend((0..n).map(Atom::T));
    atoms
}

/// A sub-database, as a bitset over fact indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct World {
    bits: Vec<u64>,
    len: usize,
}

impl World {
    pub fn empty(len: usize) -> Self {
        World { bits: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut w = Self::empty(len);
        for i in 0..len {
            w.insert(i);
        }
        w
    }

    /// The world whose fact `i` is present iff bit `i` of `index` is set.
    pub fn from_index(len: usize, index: u64) -> Self {
        let mut w = Self::empty(len);
        for i in (0..len.min(64)).filter(|i| index >> i & 1 == 1) {
            w.insert(i);
        }
        w
    }

    pub fn from_facts<I: IntoIterator<Item = usize>>(len: usize, facts: I) -> Self {
        let mut w = Self::empty(len);
        for i in facts {
            w.insert(i);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, fact: usize) {
        assert!(fact < self.len, "fact {fact} outside a world of {} facts", self.len);
        self.bits[fact / 64] |= 1 << (fact % 64);
    }

    #[inline]
    pub fn contains(&self, fact: usize) -> bool {
        fact < self.len && self.bits[fact / 64] >> (fact % 64) & 1 == 1
    }

    pub fn present(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.present()).finish()
    }
}

fn chain_valuation(chains: &[Vec<Option<usize>>], k: usize, present: impl Fn(usize) -> bool) -> Valuation {
    let full = Valuation::full(k).bits();
    let mut acc = 0u32;
    for chain in chains {
        let mut mask = 0u32;
        for (slot, fact) in chain.iter().enumerate() {
            if fact.is_some_and(&present) {
                mask |= 1 << slot;
            }
        }
        acc |= mask & (mask >> 1);
        if acc == full {
            break;
        }
    }
    Valuation::from_bits(acc & full)
}

/// The valuation `{i | w ⊨ h_{k,i}}`.
pub fn h_valuation(w: &World, db: &TidDatabase) -> Valuation {
    chain_valuation(&db.chains(), db.k, |f| w.contains(f))
}

pub fn h_satisfied(i: usize, w: &World, db: &TidDatabase) -> Result<bool> {
    if i > db.k {
        return Err(Error::VariableOutOfRange { var: i, k: db.k });
    }
    Ok(h_valuation(w, db).contains(i))
}

fn same_k(phi: &BoolFun, db: &TidDatabase) -> Result<()> {
    if phi.k() != db.k {
        return Err(Error::ArityMismatch { left: phi.k(), right: db.k });
    }
    Ok(())
}

pub fn query_holds(phi: &BoolFun, w: &World, db: &TidDatabase) -> Result<bool> {
    same_k(phi, db)?;
    Ok(phi.eval(h_valuation(w, db)))
}

pub fn world_probability(db: &TidDatabase, w: &World) -> Rational {
    db.facts.iter().enumerate().fold(Rational::one(), |acc, (i, fact)| {
        if w.contains(i) {
            acc * &fact.prob
        } else {
            acc * (Rational::one() - &fact.prob)
        }
    })
}

/// Exhaustive enumeration of the worlds of a database, aggregated by the
/// valuation of `(h_{k,0}, …, h_{k,k})` they induce.
///
/// Every world picks one factor per fact, so its weight is an integer
/// numerator over the common denominator `∏ denom(π(t))` and the hot loop
/// only multiplies integers.
#[derive(Debug, Clone)]
pub struct Oracle {
    k: usize,
    chains: Vec<Vec<Option<usize>>>,
    present: Vec<BigInt>,
    absent: Vec<BigInt>,
    denominator: BigInt,
}

impl Oracle {
    pub fn new(db: &TidDatabase, max_facts: usize) -> Result<Self> {
        if db.len() > max_facts {
            return Err(Error::TooLarge { what: "number of facts for the oracle", limit: max_facts });
        }
        if db.len() > 63 {
            return Err(Error::TooLarge { what: "number of facts for the oracle", limit: 63 });
        }
        let mut denominator = BigInt::one();
        let mut present = Vec::with_capacity(db.len());
        let mut absent = Vec::with_capacity(db.len());
        for fact in &db.facts {
            denominator *= fact.prob.denom();
            present.push(fact.prob.numer().clone());
            absent.push(fact.prob.denom() - fact.prob.numer());
        }
        Ok(Oracle { k: db.k, chains: db.chains(), present, absent, denominator })
    }

    pub fn num_facts(&self) -> usize {
        self.present.len()
    }

    /// Numerators per h-valuation over the worlds whose first `fixed` facts
    /// follow the bits of `prefix`.
    pub fn partial(&self, fixed: usize, prefix: u64) -> Vec<BigInt> {
        let n = self.num_facts();
        let fixed = fixed.min(n);
        let mut weight = BigInt::one();
        for i in 0..fixed {
            weight *= if prefix >> i & 1 == 1 { &self.present[i] } else { &self.absent[i] };
        }
        let mut buckets = vec![BigInt::zero(); 1 << (self.k + 1)];
        self.descend(fixed, prefix & ((1u64 << fixed) - 1), weight, &mut buckets);
        buckets
    }

    fn descend(&self, i: usize, bits: u64, weight: BigInt, buckets: &mut [BigInt]) {
        if weight.is_zero() {
            return;
        }
        if i == self.num_facts() {
            let nu = chain_valuation(&self.chains, self.k, |f| bits >> f & 1 == 1);
            buckets[nu.index()] += weight;
            return;
        }
        self.descend(i + 1, bits | 1 << i, &weight * &self.present[i], buckets);
        self.descend(i + 1, bits, weight * &self.absent[i], buckets);
    }

    /// Sums partial numerators into the exact distribution.
    pub fn combine<I: IntoIterator<Item = Vec<BigInt>>>(&self, parts: I) -> Distribution {
        let mut total = vec![BigInt::zero(); 1 << (self.k + 1)];
        for part in parts {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        Distribution { weights: total.into_iter().map(|num| Rational::new(num, self.denominator.clone())).collect() }
    }

    pub fn distribution(&self) -> Distribution {
        self.combine([self.partial(0, 0)])
    }
}

/// `Pr(valuation of (h_{k,0},…,h_{k,k}) = ν)` for every `ν`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    weights: Vec<Rational>,
}

impl Distribution {
    pub fn weight(&self, nu: Valuation) -> &Rational {
        &self.weights[nu.index()]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn probability(&self, phi: &BoolFun) -> Rational {
        phi.sat().fold(Rational::zero(), |acc, nu| acc + self.weight(nu))
    }
}

/// `Pr(Q_φ, (D, π))` by enumerating all sub-databases.
pub fn oracle_pqe(phi: &BoolFun, db: &TidDatabase) -> Result<Rational> {
    oracle_pqe_with_limit(phi, db, ORACLE_MAX_FACTS)
}

pub fn oracle_pqe_with_limit(phi: &BoolFun, db: &TidDatabase, max_facts: usize) -> Result<Rational> {
    same_k(phi, db)?;
    Ok(Oracle::new(db, max_facts)?.distribution().probability(phi))
}

/// The lineage of `Q_φ` on `D` as an explicit truth table over worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lineage {
    facts: usize,
    table: Vec<u64>,
}

impl Lineage {
    pub fn num_facts(&self) -> usize {
        self.facts
    }

    /// Value on the world given by the bits of `index`.
    pub fn eval(&self, index: u64) -> bool {
        let i = index as usize;
        self.table[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_false(&self) -> bool {
        self.table.iter().all(|&w| w == 0)
    }

    /// `Σ_{w ⊨ lin} Pr(w)`.
    pub fn weighted_count(&self, db: &TidDatabase) -> Rational {
        (0..1u64 << self.facts)
            .filter(|&i| self.eval(i))
            .map(|i| world_probability(db, &World::from_index(self.facts, i)))
            .fold(Rational::zero(), |acc, p| acc + p)
    }
}

pub fn lineage_table(phi: &BoolFun, db: &TidDatabase) -> Result<Lineage> {
    lineage_table_with_limit(phi, db, LINEAGE_MAX_FACTS)
}

pub fn lineage_table_with_limit(phi: &BoolFun, db: &TidDatabase, max_facts: usize) -> Result<Lineage> {
    same_k(phi, db)?;
    let n = db.len();
    if n > max_facts.min(30) {
        return Err(Error::TooLarge { what: "number of facts for a lineage table", limit: max_facts });
    }
    let chains = db.chains();
    let worlds = 1usize << n;
    let mut table = vec![0u64; worlds.div_ceil(64)];
    for i in 0..worlds {
        if phi.eval(chain_valuation(&chains, db.k, |f| i >> f & 1 == 1)) {
            table[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(Lineage { facts: n, table })
}
