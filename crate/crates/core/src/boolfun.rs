//! Boolean functions on the variable set `V = {0,…,k}` stored as truth tables.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest supported `k`; the truth table then holds `2^21` bits.
pub const MAX_K: usize = 20;

/// A valuation of `V`, i.e. the subset of variables set to true.
///
/// The same type doubles as a plain variable set (clauses, dependency sets,
/// lattice elements).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(u32);

impl Valuation {
    pub const EMPTY: Valuation = Valuation(0);

    #[inline]
    pub const fn from_bits(bits: u32) -> Self {
        Valuation(bits)
    }

    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        Valuation(vars.into_iter().fold(0, |acc, v| acc | (1 << v)))
    }

    /// The full variable set `{0,…,k}`.
    #[inline]
    pub const fn full(k: usize) -> Self {
        Valuation(((1u64 << (k + 1)) - 1) as u32)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn contains(self, var: usize) -> bool {
        self.0 >> var & 1 == 1
    }

    #[inline]
    pub const fn size(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub const fn is_even(self) -> bool {
        self.0.count_ones().is_multiple_of(2)
    }

    /// `(-1)^|ν|`.
    #[inline]
    pub const fn sign(self) -> i64 {
        if self.is_even() {
            1
        } else {
            -1
        }
    }

    /// `ν^(l)` without a range check.
    #[inline]
    pub const fn toggled(self, var: usize) -> Self {
        Valuation(self.0 ^ (1 << var))
    }

    #[inline]
    pub const fn union(self, other: Self) -> Self {
        Valuation(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: Self) -> Self {
        Valuation(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: Self) -> Self {
        Valuation(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Variables in ascending order.
    pub fn vars(self) -> impl Iterator<Item = usize> + Clone {
        let bits = self.0;
        (0..32).filter(move |v| bits >> v & 1 == 1)
    }

    /// The single variable on which two adjacent valuations differ.
    pub fn differing_var(self, other: Self) -> Option<usize> {
        let diff = self.0 ^ other.0;
        (diff.count_ones() == 1).then(|| diff.trailing_zeros() as usize)
    }

    /// Ordering used for every printed clause list: by size, then numerically.
    pub fn size_order(&self, other: &Self) -> core::cmp::Ordering {
        (self.size(), self.0).cmp(&(other.size(), other.0))
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vars().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// `ν^(l)`: the valuation `ν` with the membership of `l` flipped.
pub fn flip(nu: Valuation, var: usize, k: usize) -> Result<Valuation> {
    if var > k {
        return Err(Error::VariableOutOfRange { var, k });
    }
    Ok(nu.toggled(var))
}

/// Pointwise connectives accepted by [`combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Not,
    And,
    Or,
}

/// A Boolean function on `{0,…,k}`; bit `ν` of the table is set iff `ν ⊨ φ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolFun {
    k: usize,
    table: Vec<u64>,
}

fn check_k(k: usize) -> Result<()> {
    if (1..=MAX_K).contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedK { k, min: 1, max: MAX_K })
    }
}

impl BoolFun {
    /// The constant-false function `⊥`.
    pub fn bot(k: usize) -> Result<Self> {
        check_k(k)?;
        let words = (1usize << (k + 1)).div_ceil(64);
        Ok(BoolFun { k, table: vec![0; words] })
    }

    /// The constant-true function `⊤`.
    pub fn top(k: usize) -> Result<Self> {
        Ok(Self::bot(k)?.not())
    }

    pub fn from_sat<I: IntoIterator<Item = Valuation>>(k: usize, sat: I) -> Result<Self> {
        let mut f = Self::bot(k)?;
        let full = Valuation::full(k);
        for nu in sat {
            if !nu.is_subset(full) {
                let var = nu.difference(full).vars().next().unwrap_or(0);
                return Err(Error::VariableOutOfRange { var, k });
            }
            f.set(nu, true);
        }
        Ok(f)
    }

    pub fn from_fn(k: usize, mut pred: impl FnMut(Valuation) -> bool) -> Result<Self> {
        let mut f = Self::bot(k)?;
        for bits in 0..f.num_valuations() as u32 {
            let nu = Valuation(bits);
            if pred(nu) {
                f.set(nu, true);
            }
        }
        Ok(f)
    }

    /// Builds a function for `k ≤ 5` from a truth table packed in one word.
    pub fn from_word(k: usize, word: u64) -> Result<Self> {
        let mut f = Self::bot(k)?;
        if k > 5 {
            return Err(Error::UnsupportedK { k, min: 1, max: 5 });
        }
        f.table[0] = word & f.last_word_mask();
        Ok(f)
    }

    /// The truth table packed in one word, for `k ≤ 5`.
    pub fn as_word(&self) -> Option<u64> {
        (self.k <= 5).then(|| self.table[0])
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.k + 1
    }

    #[inline]
    pub fn num_valuations(&self) -> usize {
        1 << (self.k + 1)
    }

    pub fn words(&self) -> &[u64] {
        &self.table
    }

    fn last_word_mask(&self) -> u64 {
        let n = self.num_valuations();
        if n.is_multiple_of(64) {
            u64::MAX
        } else {
            (1u64 << (n % 64)) - 1
        }
    }

    #[inline]
    pub fn eval(&self, nu: Valuation) -> bool {
        let i = nu.index();
        self.table[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, nu: Valuation, value: bool) {
        let i = nu.index();
        if value {
            self.table[i / 64] |= 1 << (i % 64);
        } else {
            self.table[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Satisfying valuations in increasing numeric order.
    pub fn sat(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.table.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(Valuation((w * 64) as u32 + bit))
            })
        })
    }

    /// All valuations of `V` in increasing numeric order.
    pub fn valuations(&self) -> impl Iterator<Item = Valuation> {
        (0..self.num_valuations() as u32).map(Valuation)
    }

    /// `#φ`.
    pub fn sat_count(&self) -> usize {
        self.table.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_bot(&self) -> bool {
        self.table.iter().all(|&w| w == 0)
    }

    pub fn is_top(&self) -> bool {
        self.sat_count() == self.num_valuations()
    }

    /// `eul(φ) = Σ_{ν ⊨ φ} (-1)^|ν|`.
    pub fn euler(&self) -> i64 {
        self.sat().map(Valuation::sign).sum()
    }

    /// `dep(φ)`: the variables `l` for which some `ν` has `φ(ν) ≠ φ(ν^(l))`.
    pub fn dependencies(&self) -> Valuation {
        let mut dep = 0u32;
        for var in 0..self.num_vars() {
            let depends =
                self.valuations().filter(|nu| !nu.contains(var)).any(|nu| self.eval(nu) != self.eval(nu.toggled(var)));
            if depends {
                dep |= 1 << var;
            }
        }
        Valuation(dep)
    }

    pub fn is_degenerate(&self) -> bool {
        self.dependencies() != Valuation::full(self.k)
    }

    /// Smallest variable the function does not depend on.
    pub fn free_var(&self) -> Option<usize> {
        let dep = self.dependencies();
        (0..self.num_vars()).find(|&v| !dep.contains(v))
    }

    /// Checks every covering pair `(ν, ν ∪ {l})`.
    pub fn is_monotone(&self) -> bool {
        self.sat().all(|nu| (0..self.num_vars()).filter(|&v| !nu.contains(v)).all(|v| self.eval(nu.toggled(v))))
    }

    /// The inclusion-minimal satisfying valuations, each read as a
    /// conjunctive clause, ordered by size then numerically.
    pub fn minimized_dnf(&self) -> Result<Vec<Valuation>> {
        if !self.is_monotone() {
            return Err(Error::NotMonotone);
        }
        if self.is_bot() {
            return Err(Error::EmptyFunction);
        }
        let mut clauses: Vec<Valuation> =
            self.sat().filter(|nu| nu.vars().all(|v| !self.eval(nu.toggled(v)))).collect();
        clauses.sort_by(Valuation::size_order);
        Ok(clauses)
    }

    /// The unique irredundant CNF, computed as the minimal transversals of
    /// the minimized DNF and re-checked against the truth table.
    pub fn minimized_cnf(&self) -> Result<Vec<Valuation>> {
        if !self.is_monotone() {
            return Err(Error::NotMonotone);
        }
        if self.is_top() {
            return Err(Error::ConstantTrue);
        }
        let clauses = if self.is_bot() { vec![Valuation::EMPTY] } else { minimal_transversals(&self.minimized_dnf()?) };
        let reevaluated = Self::from_fn(self.k, |nu| clauses.iter().all(|c| !c.intersection(nu).is_empty()))?;
        assert!(reevaluated == *self, "transversal CNF does not reproduce the truth table");
        Ok(clauses)
    }

    pub fn not(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.table {
            *w = !*w;
        }
        let last = out.table.len() - 1;
        out.table[last] &= self.last_word_mask();
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::ArityMismatch { left: self.k, right: other.k });
        }
        let table = self.table.iter().zip(&other.table).map(|(&a, &b)| f(a, b)).collect();
        Ok(BoolFun { k: self.k, table })
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a | b)
    }

    /// `sat(self) \ sat(other)`.
    pub fn and_not(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a & !b)
    }

    /// True when `φ ∧ ψ = ⊥`.
    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.and(other)?.is_bot())
    }
}

/// Pointwise truth-table combination; `Not` ignores `rhs`, `And`/`Or`
/// require it.
pub fn combine(op: Op, lhs: &BoolFun, rhs: Option<&BoolFun>) -> Result<BoolFun> {
    match (op, rhs) {
        (Op::Not, _) => Ok(lhs.not()),
        (Op::And, Some(r)) => lhs.and(r),
        (Op::Or, Some(r)) => lhs.or(r),
        (_, None) => Err(Error::ArityMismatch { left: lhs.k(), right: 0 }),
    }
}

fn minimal_transversals(edges: &[Valuation]) -> Vec<Valuation> {
    let mut current = vec![Valuation::EMPTY];
    for &edge in edges {
        let mut next = Vec::new();
        for &t in &current {
            if !t.intersection(edge).is_empty() {
                next.push(t);
            } else {
                next.extend(edge.vars().map(|v| t.union(Valuation::from_vars([v]))));
            }
        }
        next.sort_by(Valuation::size_order);
        next.dedup();
        let mut minimal: Vec<Valuation> = Vec::with_capacity(next.len());
        for t in next {
            if !minimal.iter().any(|m| m.is_subset(t)) {
                minimal.push(t);
            }
        }
        current = minimal;
    }
    current
}

impl fmt::Debug for BoolFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFun(k={}, sat=[", self.k)?;
        for (i, nu) in self.sat().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{nu}")?;
        }
        f.write_str("])")
    }
}

/// `φ₉ = (2 ∨ 3) ∧ (0 ∨ 3) ∧ (1 ∨ 3) ∧ (0 ∨ 1 ∨ 2)` on `k = 3`.
pub fn phi9() -> BoolFun {
    let clauses = [
        Valuation::from_vars([2, 3]),
        Valuation::from_vars([0, 3]),
        Valuation::from_vars([1, 3]),
        Valuation::from_vars([0, 1, 2]),
    ];
    BoolFun::from_fn(3, |nu| clauses.iter().all(|c| !c.intersection(nu).is_empty())).expect("k = 3 is supported")
}

/// The non-monotone function on `k = 4` whose colored and uncolored nodes
/// both lack a perfect matching, despite a zero Euler characteristic.
pub fn phi_no_pm() -> BoolFun {
    let sat: [&[usize]; 10] = [
        &[0, 3],
        &[0, 4],
        &[3, 4],
        &[0, 1, 2],
        &[0, 1, 3],
        &[0, 1, 4],
        &[0, 2, 4],
        &[1, 2, 4],
        &[0, 1, 3, 4],
        &[0, 2, 3, 4],
    ];
    BoolFun::from_sat(4, sat.iter().map(|s| Valuation::from_vars(s.iter().copied()))).expect("k = 4 is supported")
}

/// All valuations of even size; `eul = 2^k`.
pub fn phi_max_euler(k: usize) -> Result<BoolFun> {
    BoolFun::from_fn(k, Valuation::is_even)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(vars: &[usize]) -> Valuation {
        Valuation::from_vars(vars.iter().copied())
    }

    #[test]
    fn flip_toggles_membership() {
        assert_eq!(flip(v(&[]), 0, 1).unwrap(), v(&[0]));
        assert_eq!(flip(v(&[0]), 0, 1).unwrap(), v(&[]));
        assert_eq!(flip(v(&[0, 3]), 1, 3).unwrap(), v(&[0, 1, 3]));
        assert_eq!(flip(v(&[0]), 2, 1), Err(Error::VariableOutOfRange { var: 2, k: 1 }));
    }

    #[test]
    fn phi9_satisfying_set() {
        let sat: Vec<_> = phi9().sat().collect();
        let mut expected = vec![
            v(&[0, 3]),
            v(&[1, 3]),
            v(&[2, 3]),
            v(&[0, 1, 2]),
            v(&[0, 1, 3]),
            v(&[0, 2, 3]),
            v(&[1, 2, 3]),
            v(&[0, 1, 2, 3]),
        ];
        expected.sort();
        assert_eq!(sat, expected);
    }

    #[test]
    fn euler_values() {
        assert_eq!(BoolFun::bot(2).unwrap().euler(), 0);
        assert_eq!(phi9().euler(), 0);
        assert_eq!(phi_max_euler(3).unwrap().euler(), 8);
        assert_eq!(phi_no_pm().euler(), 0);
    }

    #[test]
    fn dependencies_and_degeneracy() {
        assert_eq!(BoolFun::top(2).unwrap().dependencies(), Valuation::EMPTY);
        let x0 = BoolFun::from_fn(1, |nu| nu.contains(0)).unwrap();
        assert_eq!(x0.dependencies(), v(&[0]));
        assert_eq!(phi9().dependencies(), v(&[0, 1, 2, 3]));
        assert!(BoolFun::bot(1).unwrap().is_degenerate());
        assert!(!phi9().is_degenerate());
        let f = BoolFun::from_sat(1, [v(&[]), v(&[0])]).unwrap();
        assert!(f.is_degenerate());
        assert_eq!(f.free_var(), Some(0));
    }

    #[test]
    fn monotonicity() {
        assert!(BoolFun::top(1).unwrap().is_monotone());
        assert!(phi9().is_monotone());
        assert!(!BoolFun::from_sat(1, [v(&[])]).unwrap().is_monotone());
        assert!(!phi_no_pm().is_monotone());
    }

    #[test]
    fn normal_forms() {
        let conj = BoolFun::from_sat(1, [v(&[0, 1])]).unwrap();
        assert_eq!(conj.minimized_dnf().unwrap(), vec![v(&[0, 1])]);
        assert_eq!(conj.minimized_cnf().unwrap(), vec![v(&[0]), v(&[1])]);

        assert_eq!(phi9().minimized_dnf().unwrap(), vec![v(&[0, 3]), v(&[1, 3]), v(&[2, 3]), v(&[0, 1, 2])]);
        let mut cnf = phi9().minimized_cnf().unwrap();
        cnf.sort();
        let mut expected = vec![v(&[2, 3]), v(&[0, 3]), v(&[1, 3]), v(&[0, 1, 2])];
        expected.sort();
        assert_eq!(cnf, expected);

        assert_eq!(BoolFun::top(2).unwrap().minimized_dnf().unwrap(), vec![v(&[])]);
        assert_eq!(BoolFun::bot(2).unwrap().minimized_cnf().unwrap(), vec![v(&[])]);
        assert_eq!(BoolFun::bot(2).unwrap().minimized_dnf(), Err(Error::EmptyFunction));
        assert_eq!(BoolFun::top(2).unwrap().minimized_cnf(), Err(Error::ConstantTrue));
        assert_eq!(phi_no_pm().minimized_dnf(), Err(Error::NotMonotone));
    }

    #[test]
    fn combination_and_disjointness() {
        assert_eq!(combine(Op::Not, &BoolFun::bot(2).unwrap(), None).unwrap(), BoolFun::top(2).unwrap());
        let lit = |pos: &[usize], neg: &[usize]| {
            BoolFun::from_fn(3, |nu| pos.iter().all(|&p| nu.contains(p)) && neg.iter().all(|&n| !nu.contains(n)))
                .unwrap()
        };
        let parts = [lit(&[0, 3], &[2]), lit(&[2, 3], &[1]), lit(&[1, 3], &[0]), lit(&[0, 1, 2], &[])];
        assert!(parts[0].is_disjoint(&parts[1]).unwrap());
        let mut union = BoolFun::bot(3).unwrap();
        for p in &parts {
            union = combine(Op::Or, &union, Some(p)).unwrap();
        }
        assert_eq!(union, phi9());
        assert!(matches!(BoolFun::bot(1).unwrap().and(&BoolFun::bot(2).unwrap()), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn unsupported_k_rejected() {
        assert!(BoolFun::bot(0).is_err());
        assert!(BoolFun::bot(MAX_K + 1).is_err());
        assert!(BoolFun::bot(MAX_K).is_ok());
    }

    #[test]
    fn large_k_tables() {
        let f = BoolFun::from_fn(7, |nu| nu.size() >= 5).unwrap();
        assert_eq!(f.not().not(), f);
        assert_eq!(f.sat_count() + f.not().sat_count(), 256);
        assert!(f.is_monotone());
        assert_eq!(f.minimized_dnf().unwrap().len(), 56);
    }

    fn arb_fun(k: usize) -> impl Strategy<Value = BoolFun> {
        proptest::collection::vec(any::<bool>(), 1 << (k + 1))
            .prop_map(move |bits| BoolFun::from_fn(k, |nu| bits[nu.index()]).unwrap())
    }

    proptest! {
        #[test]
        fn euler_of_negation_cancels(f in (1usize..=6).prop_flat_map(arb_fun)) {
            prop_assert_eq!(f.euler() + f.not().euler(), 0);
        }

        #[test]
        fn euler_adds_over_disjoint_union(f in arb_fun(3), g in arb_fun(3)) {
            let g = g.and_not(&f).unwrap();
            prop_assert_eq!(f.or(&g).unwrap().euler(), f.euler() + g.euler());
        }

        #[test]
        fn degenerate_implies_zero_euler(f in (1usize..=4).prop_flat_map(arb_fun)) {
            if f.is_degenerate() {
                prop_assert_eq!(f.euler(), 0);
            }
        }

        #[test]
        fn normal_forms_reproduce_monotone_functions(f in arb_fun(3)) {
            // Close under supersets to get a monotone function.
            let m = BoolFun::from_fn(3, |nu| f.sat().any(|s| s.is_subset(nu))).unwrap();
            prop_assert!(m.is_monotone());
            if !m.is_bot() {
                let dnf = m.minimized_dnf().unwrap();
                let back = BoolFun::from_fn(3, |nu| dnf.iter().any(|c| c.is_subset(nu))).unwrap();
                prop_assert_eq!(&back, &m);
                for (i, a) in dnf.iter().enumerate() {
                    for b in &dnf[i + 1..] {
                        prop_assert!(!a.is_subset(*b) && !b.is_subset(*a));
                    }
                }
            }
            if !m.is_top() {
                let cnf = m.minimized_cnf().unwrap();
                let back = BoolFun::from_fn(3, |nu| cnf.iter().all(|c| !c.intersection(nu).is_empty())).unwrap();
                prop_assert_eq!(&back, &m);
            }
        }
    }
}
