//! Reduced ordered BDDs for the lineages of the `h_{k,i}`, and the
//! construction of d-Ds for degenerate H-queries.
//!
//! For `φ` independent of variable `l`, `Q_φ` is a disjoint union over the
//! pairs `{ν, ν^(l)} ⊆ sat(φ)` of conjunctions that split into a left part
//! (the `h_{k,i}` with `i < l`, over `R, S1, …, Sl`) and a right part
//! (`i > l`, over `S(l+1), …, Sk, T`). Each part is an OBDD under an order
//! that keeps every chain `S_j(a,b), S_(j+1)(a,b)` together.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;

use crate::boolfun::BoolFun;
use crate::circuit::{Circuit, CircuitBuilder, GateId, OrCertificate};
use crate::pdb::{Atom, TidDatabase, World};
use crate::{Error, Result};

/// A sequence of distinct fact indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarOrder {
    seq: Vec<usize>,
    pos: BTreeMap<usize, usize>,
}

impl VarOrder {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        let mut pos = BTreeMap::new();
        for (i, &f) in seq.iter().enumerate() {
            if pos.insert(f, i).is_some() {
                return Err(Error::MalformedCircuit(alloc::format!("fact {f} appears twice in a variable order")));
            }
        }
        Ok(VarOrder { seq, pos })
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn position(&self, fact: usize) -> Option<usize> {
        self.pos.get(&fact).copied()
    }
}

/// Per constant `a`: `R(a)`, then for each `b`: `S1(a,b), …, Sl(a,b)`.
/// Facts absent from the database are skipped.
pub fn left_order(l: usize, db: &TidDatabase) -> VarOrder {
    let n = db.domain().len();
    let mut seq = Vec::new();
    for a in 0..n {
        seq.extend(db.fact_index(&Atom::R(a)));
        for b in 0..n {
            seq.extend((1..=l.min(db.k())).filter_map(|i| db.fact_index(&Atom::S(i, a, b))));
        }
    }
    VarOrder::new(seq).expect("facts are distinct")
}

/// Per constant `b`: for each `a`: `S(l+1)(a,b), …, Sk(a,b)`, then `T(b)`.
pub fn right_order(l: usize, db: &TidDatabase) -> VarOrder {
    let n = db.domain().len();
    let mut seq = Vec::new();
    for b in 0..n {
        for a in 0..n {
            seq.extend((l + 1..=db.k()).filter_map(|i| db.fact_index(&Atom::S(i, a, b))));
        }
        seq.extend(db.fact_index(&Atom::T(b)));
    }
    VarOrder::new(seq).expect("facts are distinct")
}

const FALSE: u32 = 0;
const TRUE: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Node {
    level: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
}

/// Nodes `0` and `1` are the terminals.
#[derive(Debug, Clone)]
pub struct Obdd {
    order: Rc<VarOrder>,
    nodes: Vec<Node>,
    unique: BTreeMap<Node, u32>,
    root: u32,
}

impl Obdd {
    fn empty(order: Rc<VarOrder>) -> Self {
        let terminal = Node { level: u32::MAX, lo: 0, hi: 0 };
        Obdd { order, nodes: vec![terminal, terminal], unique: BTreeMap::new(), root: FALSE }
    }

    pub fn constant(order: Rc<VarOrder>, value: bool) -> Self {
        let mut o = Self::empty(order);
        o.root = if value { TRUE } else { FALSE };
        o
    }

    pub fn var(order: Rc<VarOrder>, fact: usize) -> Result<Self> {
        let level = order.position(fact).ok_or(Error::IncompleteOrder { fact })? as u32;
        let mut o = Self::empty(order);
        o.root = o.mk(level, FALSE, TRUE);
        Ok(o)
    }

    fn mk(&mut self, level: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let node = Node { level, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        self.nodes.push(node);
        let id = self.nodes.len() as u32 - 1;
        self.unique.insert(node, id);
        id
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    /// Number of decision nodes reachable from the root.
    pub fn node_count(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        let mut count = 0;
        while let Some(n) = stack.pop() {
            if n <= TRUE || seen[n as usize] {
                continue;
            }
            seen[n as usize] = true;
            count += 1;
            let node = self.nodes[n as usize];
            stack.push(node.lo);
            stack.push(node.hi);
        }
        count
    }

    pub fn is_const(&self) -> Option<bool> {
        match self.root {
            FALSE => Some(false),
            TRUE => Some(true),
            _ => None,
        }
    }

    pub fn eval(&self, present: impl Fn(usize) -> bool) -> bool {
        let mut n = self.root;
        while n > TRUE {
            let node = self.nodes[n as usize];
            n = if present(self.order.seq[node.level as usize]) { node.hi } else { node.lo };
        }
        n == TRUE
    }

    pub fn eval_world(&self, w: &World) -> bool {
        self.eval(|f| w.contains(f))
    }

    /// No redundant test, no duplicate node, and levels strictly increase
    /// along every edge.
    pub fn is_reduced_and_ordered(&self) -> bool {
        let mut triples = BTreeMap::new();
        self.nodes.iter().enumerate().skip(2).all(|(id, node)| {
            let child_level = |c: u32| if c <= TRUE { u32::MAX } else { self.nodes[c as usize].level };
            node.lo != node.hi
                && child_level(node.lo) > node.level
                && child_level(node.hi) > node.level
                && triples.insert(*node, id).is_none()
        })
    }

    pub fn negate(&self) -> Obdd {
        let swap = |c: u32| match c {
            FALSE => TRUE,
            TRUE => FALSE,
            c => c,
        };
        let mut out = self.clone();
        for node in out.nodes.iter_mut().skip(2) {
            node.lo = swap(node.lo);
            node.hi = swap(node.hi);
        }
        out.unique = out.nodes.iter().enumerate().skip(2).map(|(i, n)| (*n, i as u32)).collect();
        out.root = swap(self.root);
        out
    }

    /// The decision structure as circuit gates: a node testing `v` becomes
    /// `(v ∧ hi) ∨ (¬v ∧ lo)`, with terminal children folded away.
    pub fn unfold(&self, b: &mut CircuitBuilder) -> GateId {
        let mut memo: Vec<Option<GateId>> = vec![None; self.nodes.len()];
        self.unfold_node(self.root, b, &mut memo)
    }

    fn unfold_node(&self, n: u32, b: &mut CircuitBuilder, memo: &mut [Option<GateId>]) -> GateId {
        if n == FALSE {
            return b.constant(false);
        }
        if n == TRUE {
            return b.constant(true);
        }
        if let Some(g) = memo[n as usize] {
            return g;
        }
        let node = self.nodes[n as usize];
        let fact = self.order.seq[node.level as usize];
        let v = b.var(fact);
        let pos = match node.hi {
            FALSE => None,
            TRUE => Some(v),
            hi => {
                let h = self.unfold_node(hi, b, memo);
                Some(b.and(vec![v, h]))
            }
        };
        let neg = match node.lo {
            FALSE => None,
            TRUE => Some(b.not(v)),
            lo => {
                let l = self.unfold_node(lo, b, memo);
                let nv = b.not(v);
                Some(b.and(vec![nv, l]))
            }
        };
        let g = match (pos, neg) {
            (Some(p), Some(q)) => b.or(vec![p, q], Some(OrCertificate::Decision { var: fact })),
            (Some(p), None) => p,
            (None, Some(q)) => q,
            (None, None) => unreachable!("reduced nodes have distinct children"),
        };
        memo[n as usize] = Some(g);
        g
    }

    /// A standalone circuit for this OBDD over `num_facts` facts.
    pub fn to_circuit(&self, num_facts: usize) -> Circuit {
        let mut b = CircuitBuilder::new(num_facts);
        let root = self.unfold(&mut b);
        b.finish(root)
    }
}

/// Pointwise combination by the memoized product construction.
pub fn apply(op: BinOp, a: &Obdd, b: &Obdd) -> Result<Obdd> {
    if !Rc::ptr_eq(&a.order, &b.order) && a.order != b.order {
        return Err(Error::OrderMismatch);
    }
    let mut out = Obdd::empty(a.order.clone());
    let mut memo = BTreeMap::new();
    out.root = apply_rec(op, a, b, a.root, b.root, &mut out, &mut memo);
    Ok(out)
}

fn apply_rec(
    op: BinOp,
    a: &Obdd,
    b: &Obdd,
    x: u32,
    y: u32,
    out: &mut Obdd,
    memo: &mut BTreeMap<(u32, u32), u32>,
) -> u32 {
    match (op, x, y) {
        (BinOp::And, FALSE, _) | (BinOp::And, _, FALSE) => return FALSE,
        (BinOp::Or, TRUE, _) | (BinOp::Or, _, TRUE) => return TRUE,
        (BinOp::And, TRUE, TRUE) | (BinOp::Or, FALSE, FALSE) => return x,
        _ => {}
    }
    if let Some(&r) = memo.get(&(x, y)) {
        return r;
    }
    let level = |o: &Obdd, n: u32| if n <= TRUE { u32::MAX } else { o.nodes[n as usize].level };
    let (lx, ly) = (level(a, x), level(b, y));
    let top = lx.min(ly);
    let (x0, x1) = if lx == top { (a.nodes[x as usize].lo, a.nodes[x as usize].hi) } else { (x, x) };
    let (y0, y1) = if ly == top { (b.nodes[y as usize].lo, b.nodes[y as usize].hi) } else { (y, y) };
    let lo = apply_rec(op, a, b, x0, y0, out, memo);
    let hi = apply_rec(op, a, b, x1, y1, out, memo);
    let r = out.mk(top, lo, hi);
    memo.insert((x, y), r);
    r
}

pub fn negate(a: &Obdd) -> Obdd {
    a.negate()
}

/// The fact in slot `s` of the chain `R(a), S1(a,b), …, Sk(a,b), T(b)`.
fn chain_fact(db: &TidDatabase, s: usize, a: usize, b: usize) -> Option<usize> {
    let atom = if s == 0 {
        Atom::R(a)
    } else if s == db.k() + 1 {
        Atom::T(b)
    } else {
        Atom::S(s, a, b)
    };
    db.fact_index(&atom)
}

/// The lineage of `h_{k,i}` on `D` as an OBDD under `order`.
pub fn obdd_for_h(i: usize, order: Rc<VarOrder>, db: &TidDatabase) -> Result<Obdd> {
    if i > db.k() {
        return Err(Error::VariableOutOfRange { var: i, k: db.k() });
    }
    let n = db.domain().len();
    let mut acc = Obdd::constant(order.clone(), false);
    for a in 0..n {
        for b in 0..n {
            if let (Some(x), Some(y)) = (chain_fact(db, i, a, b), chain_fact(db, i + 1, a, b)) {
                let conj = apply(BinOp::And, &Obdd::var(order.clone(), x)?, &Obdd::var(order.clone(), y)?)?;
                acc = apply(BinOp::Or, &acc, &conj)?;
            }
        }
    }
    Ok(acc)
}

/// A d-D for `Q_φ` when `φ` does not depend on some variable.
///
/// `l` is the smallest such variable. The root is a disjunction over the
/// satisfying `ν` with `l ∉ ν`, in increasing order, each child being the
/// decomposable conjunction of the left and right OBDDs.
pub fn degenerate_compile(phi: &BoolFun, db: &TidDatabase) -> Result<Circuit> {
    if phi.k() != db.k() {
        return Err(Error::ArityMismatch { left: phi.k(), right: db.k() });
    }
    let l = phi.free_var().ok_or(Error::Nondegenerate)?;
    let k = phi.k();
    let mut b = CircuitBuilder::new(db.len());

    let left = Rc::new(left_order(l, db));
    let right = Rc::new(right_order(l, db));
    let mut lits: Vec<Option<(Obdd, Obdd)>> = Vec::with_capacity(k + 1);
    for i in 0..=k {
        lits.push(
            match i.cmp(&l) {
                core::cmp::Ordering::Less => Some(obdd_for_h(i, left.clone(), db)?),
                core::cmp::Ordering::Greater => Some(obdd_for_h(i, right.clone(), db)?),
                core::cmp::Ordering::Equal => None,
            }
            .map(|o| {
                let neg = o.negate();
                (o, neg)
            }),
        );
    }

    let mut children = Vec::new();
    let mut functions = Vec::new();
    for nu in phi.sat().filter(|nu| !nu.contains(l)) {
        let mut sides = [Obdd::constant(left.clone(), true), Obdd::constant(right.clone(), true)];
        for (i, lit) in lits.iter().enumerate() {
            if let Some((pos, neg)) = lit {
                let side = usize::from(i > l);
                let factor = if nu.contains(i) { pos } else { neg };
                sides[side] = apply(BinOp::And, &sides[side], factor)?;
            }
        }
        if sides.iter().any(|s| s.is_const() == Some(false)) {
            continue;
        }
        let parts: Vec<GateId> =
            sides.iter().filter(|s| s.is_const() != Some(true)).map(|s| s.unfold(&mut b)).collect();
        children.push(b.and(parts));
        functions.push(BoolFun::from_sat(k, [nu, nu.toggled(l)])?);
    }
    let root = b.or(children, Some(OrCertificate::Lineage { children: functions }));
    Ok(b.finish(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::DeterminismMode;
    use crate::pdb::{h_satisfied, oracle_pqe};
    use crate::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn db_k1() -> TidDatabase {
        let mut db = TidDatabase::new(1).unwrap();
        let a = db.constant("a");
        db.add_fact(Atom::R(a), q(1, 2)).unwrap();
        db.add_fact(Atom::S(1, a, a), q(1, 2)).unwrap();
        db.add_fact(Atom::T(a), q(1, 2)).unwrap();
        db
    }

    #[test]
    fn orders() {
        let db = TidDatabase::full(2, 1, &q(1, 2)).unwrap();
        // Facts: R(c0)=0, S1=1, S2=2, T=3.
        assert_eq!(left_order(2, &db).seq(), &[0, 1, 2]);
        assert_eq!(right_order(1, &db).seq(), &[2, 3]);
        let empty = TidDatabase::new(2).unwrap();
        assert!(left_order(1, &empty).is_empty());
        assert!(VarOrder::new(vec![1, 1]).is_err());
    }

    #[test]
    fn h_obdd_examples() {
        let mut db = TidDatabase::new(1).unwrap();
        let a = db.constant("a");
        db.add_fact(Atom::R(a), q(1, 2)).unwrap();
        db.add_fact(Atom::S(1, a, a), q(1, 2)).unwrap();
        let o = obdd_for_h(0, Rc::new(left_order(1, &db)), &db).unwrap();
        assert_eq!(o.node_count(), 2);
        assert!(o.is_reduced_and_ordered());

        let empty = TidDatabase::new(1).unwrap();
        let o = obdd_for_h(0, Rc::new(left_order(1, &empty)), &empty).unwrap();
        assert_eq!(o.is_const(), Some(false));

        let bad = obdd_for_h(0, Rc::new(VarOrder::new(vec![0]).unwrap()), &db);
        assert_eq!(bad.unwrap_err(), Error::IncompleteOrder { fact: 1 });
    }

    #[test]
    fn h_obdds_match_semantics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let db = TidDatabase::full(2, 2, &q(1, 3)).unwrap();
        assert_eq!(db.len(), 12);
        for l in 1..=2 {
            let left = Rc::new(left_order(l, &db));
            let right = Rc::new(right_order(l, &db));
            for i in 0..=2 {
                let order = if i < l { left.clone() } else { right.clone() };
                if i == l {
                    continue;
                }
                let o = obdd_for_h(i, order, &db).unwrap();
                assert!(o.is_reduced_and_ordered());
                for _ in 0..300 {
                    let w = World::from_index(db.len(), rng.random_range(0..1u64 << 12));
                    assert_eq!(o.eval_world(&w), h_satisfied(i, &w, &db).unwrap());
                }
            }
        }
    }

    #[test]
    fn apply_identities() {
        let db = TidDatabase::full(2, 2, &q(1, 2)).unwrap();
        let order = Rc::new(left_order(2, &db));
        let a = obdd_for_h(1, order.clone(), &db).unwrap();
        let one = Obdd::constant(order.clone(), true);
        let and1 = apply(BinOp::And, &a, &one).unwrap();
        let nn = a.negate().negate();
        for i in 0..1u64 << db.len() {
            let w = World::from_index(db.len(), i);
            assert_eq!(and1.eval_world(&w), a.eval_world(&w));
            assert_eq!(nn.eval_world(&w), a.eval_world(&w));
        }
        let other = Obdd::constant(Rc::new(right_order(0, &db)), true);
        assert!(matches!(apply(BinOp::Or, &a, &other), Err(Error::OrderMismatch)));
    }

    #[test]
    fn unfolded_obdds_are_dds() {
        let db = TidDatabase::full(3, 2, &q(1, 2)).unwrap();
        let order = Rc::new(left_order(3, &db));
        let h0 = obdd_for_h(0, order.clone(), &db).unwrap();
        let h1 = obdd_for_h(1, order.clone(), &db).unwrap();
        let both = apply(BinOp::And, &h0, &h1.negate()).unwrap();
        let c = both.to_circuit(db.len());
        assert!(c.check_decomposable());
        assert!(c.check_deterministic(DeterminismMode::Certified).unwrap());
        assert!(c.check_deterministic(DeterminismMode::Semantic).unwrap());
        for i in (0..1u64 << db.len()).step_by(31) {
            let w = World::from_index(db.len(), i);
            assert_eq!(c.evaluate(&w).unwrap(), both.eval_world(&w));
        }
    }

    #[test]
    fn degenerate_examples() {
        let db = db_k1();
        let bot = degenerate_compile(&BoolFun::bot(1).unwrap(), &db).unwrap();
        assert_eq!(bot.probability(&db).unwrap(), q(0, 1));

        let h0 = BoolFun::from_fn(1, |nu| nu.contains(0)).unwrap();
        let c = degenerate_compile(&h0, &db).unwrap();
        assert_eq!(c.probability(&db).unwrap(), q(1, 4));
        assert_eq!(oracle_pqe(&h0, &db).unwrap(), q(1, 4));

        let conj = BoolFun::from_sat(1, [crate::boolfun::Valuation::from_vars([0, 1])]).unwrap();
        assert_eq!(degenerate_compile(&conj, &db).unwrap_err(), Error::Nondegenerate);
    }

    #[test]
    fn degenerate_circuits_stay_small() {
        let phi = BoolFun::from_fn(3, |nu| nu.contains(0) != nu.contains(2)).unwrap();
        for n in 1..=4 {
            let db = TidDatabase::full(3, n, &q(1, 2)).unwrap();
            let c = degenerate_compile(&phi, &db).unwrap();
            assert!(c.len() <= 8 * 16 * n * n * 8, "{} gates for n = {n}", c.len());
        }
    }
}
