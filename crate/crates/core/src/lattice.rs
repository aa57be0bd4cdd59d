//! CNF/DNF lattices of monotone functions, their Möbius function, and the
//! identities tying the Möbius value to the Euler characteristic.
//!
//! A lattice element is a union of clauses. Elements are ordered by
//! *reversed* inclusion: `x ≤ y` iff `x ⊇ y`, so the top `1̂` is `∅` and the
//! bottom `0̂` is the union of all clauses.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Zero};

use crate::boolfun::{BoolFun, Valuation};
use crate::poly::Poly;
use crate::{Error, Rational, Result};

/// Hard cap on the number of distinct clause unions.
pub const MAX_ELEMENTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusLattice {
    /// Sorted by size then numerically, so `elements[0] = ∅ = 1̂`.
    elements: Vec<Valuation>,
    /// `μ(x, 1̂)`, aligned with `elements`.
    mobius_to_top: Vec<i64>,
}

impl MobiusLattice {
    /// Builds the lattice of all unions of subsets of `clauses` by closing
    /// `{∅}` under union with each clause.
    pub fn from_clauses(clauses: &[Valuation]) -> Result<Self> {
        let mut seen: BTreeSet<Valuation> = BTreeSet::new();
        seen.insert(Valuation::EMPTY);
        let mut frontier = vec![Valuation::EMPTY];
        while let Some(x) = frontier.pop() {
            for &c in clauses {
                let y = x.union(c);
                if seen.insert(y) {
                    if seen.len() > MAX_ELEMENTS {
                        return Err(Error::TooLarge { what: "lattice size", limit: MAX_ELEMENTS });
                    }
                    frontier.push(y);
                }
            }
        }
        let mut elements: Vec<Valuation> = seen.into_iter().collect();
        elements.sort_by(Valuation::size_order);

        let mut mobius_to_top: Vec<i64> = Vec::with_capacity(elements.len());
        for (i, &x) in elements.iter().enumerate() {
            let value = if i == 0 {
                1
            } else {
                -elements[..i]
                    .iter()
                    .zip(&mobius_to_top)
                    .filter(|(w, _)| w.is_subset(x) && **w != x)
                    .map(|(_, m)| m)
                    .sum::<i64>()
            };
            mobius_to_top.push(value);
        }
        Ok(MobiusLattice { elements, mobius_to_top })
    }

    pub fn elements(&self) -> &[Valuation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `1̂ = ∅`.
    pub fn top(&self) -> Valuation {
        self.elements[0]
    }

    /// `0̂`, the union of every clause.
    pub fn bottom(&self) -> Valuation {
        self.elements.iter().fold(Valuation::EMPTY, |acc, &x| acc.union(x))
    }

    /// `x ≤ y` in reversed inclusion.
    pub fn leq(x: Valuation, y: Valuation) -> bool {
        y.is_subset(x)
    }

    pub fn position(&self, x: Valuation) -> Option<usize> {
        self.elements.iter().position(|&e| e == x)
    }

    /// `μ(x, 1̂)`.
    pub fn mobius_to_top(&self, x: Valuation) -> Option<i64> {
        self.position(x).map(|i| self.mobius_to_top[i])
    }

    /// `(element, μ(element, 1̂))` pairs in lattice order (top first).
    pub fn mobius_values(&self) -> impl Iterator<Item = (Valuation, i64)> + '_ {
        self.elements.iter().copied().zip(self.mobius_to_top.iter().copied())
    }

    /// `μ(0̂, 1̂)`.
    pub fn mobius_hat(&self) -> i64 {
        self.mobius_to_top(self.bottom()).expect("the union of all clauses is an element")
    }

    /// `μ(u, x)` for arbitrary elements, `None` unless `u ≤ x`.
    pub fn mobius(&self, u: Valuation, x: Valuation) -> Option<i64> {
        if !Self::leq(u, x) {
            return None;
        }
        self.mobius_column(x).into_iter().find(|(w, _)| *w == u).map(|(_, m)| m)
    }

    /// `μ(w, x)` for every `w ≤ x`, by increasing size of `w`.
    fn mobius_column(&self, x: Valuation) -> Vec<(Valuation, i64)> {
        let mut column: Vec<(Valuation, i64)> = Vec::new();
        for &w in self.elements.iter().filter(|w| x.is_subset(**w)) {
            let value = if w == x {
                1
            } else {
                -column.iter().filter(|(v, _)| v.is_subset(w) && *v != w).map(|(_, m)| m).sum::<i64>()
            };
            column.push((w, value));
        }
        column
    }

    /// Covering pairs `(lower, upper)`: `lower < upper` with nothing strictly
    /// between them.
    pub fn hasse_edges(&self) -> Vec<(Valuation, Valuation)> {
        let mut edges = Vec::new();
        for &lower in &self.elements {
            for &upper in &self.elements {
                if upper == lower || !upper.is_subset(lower) {
                    continue;
                }
                let between =
                    self.elements.iter().any(|&w| w != lower && w != upper && w.is_subset(lower) && upper.is_subset(w));
                if !between {
                    edges.push((lower, upper));
                }
            }
        }
        edges
    }

    /// Hasse diagram in Graphviz syntax, each node labelled with `μ(x, 1̂)`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {name} {{");
        let _ = writeln!(out, "  rankdir=BT;");
        for (x, m) in self.mobius_values() {
            let _ = writeln!(out, "  \"{x}\" [label=\"{x}\\nμ={m}\"];");
        }
        for (lower, upper) in self.hasse_edges() {
            let _ = writeln!(out, "  \"{lower}\" -> \"{upper}\";");
        }
        out.push_str("}\n");
        out
    }
}

/// The lattice of unions of the minimized CNF clauses.
pub fn cnf_lattice(phi: &BoolFun) -> Result<MobiusLattice> {
    MobiusLattice::from_clauses(&phi.minimized_cnf()?)
}

/// The lattice of unions of the minimized DNF clauses.
pub fn dnf_lattice(phi: &BoolFun) -> Result<MobiusLattice> {
    MobiusLattice::from_clauses(&phi.minimized_dnf()?)
}

/// Tractability of `PQE(Q_φ)` for a monotone `φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Safety {
    Ptime,
    SharpPHard,
}

impl core::fmt::Display for Safety {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Safety::Ptime => "PTIME",
            Safety::SharpPHard => "SHARP_P_HARD",
        })
    }
}

/// Decides safety of a UCQ `Q_φ` from the Möbius value of the CNF lattice.
pub fn safety_by_mobius(phi: &BoolFun) -> Result<Safety> {
    if !phi.is_monotone() {
        return Err(Error::NotMonotone);
    }
    if phi.is_degenerate() {
        return Ok(Safety::Ptime);
    }
    Ok(if cnf_lattice(phi)?.mobius_hat() == 0 { Safety::Ptime } else { Safety::SharpPHard })
}

fn require_monotone_nondegenerate(phi: &BoolFun) -> Result<()> {
    if !phi.is_monotone() {
        return Err(Error::NotMonotone);
    }
    if let Some(var) = phi.free_var() {
        return Err(Error::Degenerate { var });
    }
    Ok(())
}

/// The three independently computed quantities `eul(φ)`, `μ_CNF(0̂,1̂)` and
/// `μ_DNF(0̂,1̂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigCoeff {
    pub euler: i64,
    pub mu_cnf: i64,
    pub mu_dnf: i64,
    /// `euler = mu_cnf = (-1)^k · mu_dnf`.
    pub ok: bool,
}

pub fn verify_big_coeff(phi: &BoolFun) -> Result<BigCoeff> {
    require_monotone_nondegenerate(phi)?;
    let euler = phi.euler();
    let mu_cnf = cnf_lattice(phi)?.mobius_hat();
    let mu_dnf = dnf_lattice(phi)?.mobius_hat();
    let sign = if phi.k().is_multiple_of(2) { 1 } else { -1 };
    Ok(BigCoeff { euler, mu_cnf, mu_dnf, ok: euler == mu_cnf && mu_cnf == sign * mu_dnf })
}

/// `P^φ(t) = Pr(φ, π_t)` and its two Möbius-inversion expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPolys {
    pub direct: Poly,
    pub cnf: Poly,
    pub dnf: Poly,
}

impl CharPolys {
    pub fn all_equal(&self) -> bool {
        self.direct == self.cnf && self.cnf == self.dnf
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn characteristic_polynomials(phi: &BoolFun) -> Result<CharPolys> {
    require_monotone_nondegenerate(phi)?;
    let n = phi.num_vars() as u32;

    let mut by_size = vec![0i64; n as usize + 1];
    for nu in phi.sat() {
        by_size[nu.size() as usize] += 1;
    }
    let mut direct = Poly::zero();
    for (j, &count) in by_size.iter().enumerate() {
        if count != 0 {
            let term = &Poly::t().pow(j as u32) * &Poly::one_minus_t().pow(n - j as u32);
            direct = &direct + &term.scale(&int(count));
        }
    }

    let mut cnf = Poly::zero();
    for (x, m) in cnf_lattice(phi)?.mobius_values() {
        cnf = &cnf + &Poly::one_minus_t().pow(x.size()).scale(&int(m));
    }

    let mut dnf = Poly::constant(Rational::one());
    for (x, m) in dnf_lattice(phi)?.mobius_values() {
        dnf = &dnf - &Poly::t().pow(x.size()).scale(&int(m));
    }

    Ok(CharPolys { direct, cnf, dnf })
}

/// Builds `g(x) = Σ_{u ≤ x} f(u)`, inverts it with `μ`, and checks that `f`
/// comes back exactly. `f` is aligned with [`MobiusLattice::elements`].
pub fn mobius_inversion_check(lattice: &MobiusLattice, f: &[Rational]) -> bool {
    if f.len() != lattice.len() {
        return false;
    }
    let elements = lattice.elements();
    let g: Vec<Rational> = elements
        .iter()
        .map(|&x| {
            elements
                .iter()
                .zip(f)
                .filter(|(u, _)| MobiusLattice::leq(**u, x))
                .fold(Rational::zero(), |acc, (_, fu)| acc + fu)
        })
        .collect();
    elements.iter().zip(f).all(|(&x, fx)| {
        let recovered = lattice.mobius_column(x).into_iter().fold(Rational::zero(), |acc, (u, m)| {
            let gu = &g[lattice.position(u).expect("column entries are elements")];
            acc + gu * int(m)
        });
        recovered == *fx
    })
}

/// Multi-line report used by the `analyze` front-end.
pub fn describe(lattice: &MobiusLattice) -> String {
    let mut out = String::new();
    for (x, m) in lattice.mobius_values() {
        out.push_str(&format!("{x} {m}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::phi9;

    fn v(vars: &[usize]) -> Valuation {
        Valuation::from_vars(vars.iter().copied())
    }

    #[test]
    fn phi9_lattice_matches_hasse_diagram() {
        let l = cnf_lattice(&phi9()).unwrap();
        assert_eq!(l.len(), 9);
        let expected: [(&[usize], i64); 9] = [
            (&[], 1),
            (&[0, 3], -1),
            (&[1, 3], -1),
            (&[2, 3], -1),
            (&[0, 1, 2], -1),
            (&[0, 1, 3], 1),
            (&[0, 2, 3], 1),
            (&[1, 2, 3], 1),
            (&[0, 1, 2, 3], 0),
        ];
        for (vars, mu) in expected {
            assert_eq!(l.mobius_to_top(v(vars)), Some(mu), "node {}", v(vars));
        }
        assert_eq!(l.mobius_hat(), 0);
        assert_eq!(l.top(), Valuation::EMPTY);
        assert_eq!(l.bottom(), v(&[0, 1, 2, 3]));
        assert_eq!(l.hasse_edges().len(), 14);
    }

    #[test]
    fn chain_and_diamond() {
        let chain = MobiusLattice::from_clauses(&[v(&[0])]).unwrap();
        assert_eq!(chain.elements(), &[v(&[]), v(&[0])]);
        assert_eq!(chain.mobius_hat(), -1);

        // μ(0̂) = -(1 - 1 - 1) = 1 on the four-element diamond.
        let diamond = MobiusLattice::from_clauses(&[v(&[0]), v(&[1])]).unwrap();
        assert_eq!(diamond.len(), 4);
        assert_eq!(diamond.mobius_hat(), 1);
    }

    #[test]
    fn two_argument_mobius_agrees_with_column_to_top() {
        let l = cnf_lattice(&phi9()).unwrap();
        for (x, m) in l.mobius_values() {
            assert_eq!(l.mobius(x, Valuation::EMPTY), Some(m));
        }
        assert_eq!(l.mobius(v(&[0, 3]), v(&[0, 1, 3])), None);
        assert_eq!(l.mobius(v(&[0, 1, 3]), v(&[0, 3])), Some(-1));
    }

    #[test]
    fn safety_verdicts() {
        assert_eq!(safety_by_mobius(&phi9()).unwrap(), Safety::Ptime);
        let conj = BoolFun::from_sat(1, [v(&[0, 1])]).unwrap();
        assert_eq!(safety_by_mobius(&conj).unwrap(), Safety::SharpPHard);
        assert_eq!(safety_by_mobius(&BoolFun::bot(2).unwrap()).unwrap(), Safety::Ptime);
        assert_eq!(safety_by_mobius(&crate::boolfun::phi_no_pm()), Err(Error::NotMonotone));
    }

    #[test]
    fn big_coefficient_examples() {
        assert_eq!(verify_big_coeff(&phi9()).unwrap(), BigCoeff { euler: 0, mu_cnf: 0, mu_dnf: 0, ok: true });
        let conj = BoolFun::from_sat(1, [v(&[0, 1])]).unwrap();
        assert_eq!(verify_big_coeff(&conj).unwrap(), BigCoeff { euler: 1, mu_cnf: 1, mu_dnf: -1, ok: true });
        assert!(matches!(verify_big_coeff(&BoolFun::bot(1).unwrap()), Err(Error::Degenerate { var: 0 })));
    }

    #[test]
    fn negated_mobius_values_break_the_identity() {
        let l = cnf_lattice(&BoolFun::from_sat(1, [v(&[0, 1])]).unwrap()).unwrap();
        let flipped =
            MobiusLattice { elements: l.elements.clone(), mobius_to_top: l.mobius_to_top.iter().map(|m| -m).collect() };
        assert_ne!(flipped.mobius_hat(), 1);
    }

    #[test]
    fn characteristic_polynomials_of_conjunction() {
        let conj = BoolFun::from_sat(1, [v(&[0, 1])]).unwrap();
        let polys = characteristic_polynomials(&conj).unwrap();
        let t2 = Poly::from_ints(&[0, 0, 1]);
        assert_eq!(polys.direct, t2);
        assert_eq!(polys.cnf, t2);
        assert_eq!(polys.dnf, t2);
    }

    #[test]
    fn characteristic_polynomials_of_phi9() {
        let polys = characteristic_polynomials(&phi9()).unwrap();
        assert!(polys.all_equal());
        // eul(φ₉) = 0 so the t^4 coefficient vanishes; ∅ ⊭ φ₉ so the constant does too.
        assert_eq!(polys.direct.coeff(4), Rational::zero());
        assert_eq!(polys.direct.coeff(0), Rational::zero());
    }

    #[test]
    fn inversion_round_trips() {
        let l = cnf_lattice(&phi9()).unwrap();
        let zeros = vec![Rational::zero(); l.len()];
        assert!(mobius_inversion_check(&l, &zeros));
        let f: Vec<Rational> = (0..l.len() as i64).map(|i| int(i * i - 3 * i + 7)).collect();
        assert!(mobius_inversion_check(&l, &f));

        let chain = MobiusLattice::from_clauses(&[v(&[0])]).unwrap();
        let bottom_indicator = vec![Rational::zero(), Rational::one()];
        assert!(mobius_inversion_check(&chain, &bottom_indicator));
        assert!(!mobius_inversion_check(&chain, &[Rational::one()]));
    }

    #[test]
    fn closure_is_capped() {
        // 13 pairwise-incomparable clauses over 20 variables generate > 4096 unions.
        let clauses: Vec<Valuation> = (0..13).map(|i| v(&[i, 19 - i.min(6)])).collect();
        let l = MobiusLattice::from_clauses(&clauses);
        assert!(matches!(l, Err(Error::TooLarge { .. })));
    }
}
