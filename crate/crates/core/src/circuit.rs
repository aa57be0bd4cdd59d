//! Boolean circuits over database facts, d-D validity checks, exact
//! probability evaluation and the end-to-end compiler for `eul(φ) = 0`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::analysis::classify;
use crate::boolfun::BoolFun;
use crate::fragment::{self, Fragmentation, TemplateNode};
use crate::obdd::degenerate_compile;
use crate::pdb::{TidDatabase, World};
use crate::{Error, Rational, Result};

/// Largest number of distinct variables for [`DeterminismMode::Semantic`].
pub const SEMANTIC_MAX_VARS: usize = 20;

pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    Var(usize),
    Const(bool),
    Not(GateId),
    And(Vec<GateId>),
    Or(Vec<GateId>),
}

impl Gate {
    pub fn children(&self) -> &[GateId] {
        match self {
            Gate::Var(_) | Gate::Const(_) => &[],
            Gate::Not(c) => core::slice::from_ref(c),
            Gate::And(cs) | Gate::Or(cs) => cs,
        }
    }
}

/// Why an OR gate is deterministic, recorded when it is built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrCertificate {
    /// Two children, one implying the variable and the other its negation.
    Decision { var: usize },
    /// Each child computes the lineage of `Q_f` for the matching function;
    /// the functions are pairwise disjoint.
    Lineage { children: Vec<BoolFun> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeterminismMode {
    /// Exhaustive co-satisfiability search over all worlds.
    Semantic,
    /// Checks the construction certificates only.
    Certified,
}

/// A set of fact indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactSet(Vec<u64>);

impl FactSet {
    pub fn empty(num_facts: usize) -> Self {
        FactSet(vec![0; num_facts.div_ceil(64)])
    }

    fn insert(&mut self, f: usize) {
        self.0[f / 64] |= 1 << (f % 64);
    }

    fn union_with(&mut self, other: &FactSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    pub fn contains(&self, f: usize) -> bool {
        self.0.get(f / 64).is_some_and(|w| w >> (f % 64) & 1 == 1)
    }

    pub fn is_disjoint(&self, other: &FactSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&f| self.contains(f))
    }
}

/// Gates are stored children first; `vars[g]` is `VARS(g)`.
#[derive(Debug, Clone)]
pub struct Circuit {
    gates: Vec<Gate>,
    root: GateId,
    num_facts: usize,
    vars: Vec<FactSet>,
    certificates: BTreeMap<GateId, OrCertificate>,
}

impl PartialEq for Circuit {
    /// Gate-for-gate identity; certificates are not compared.
    fn eq(&self, other: &Self) -> bool {
        self.gates == other.gates && self.root == other.root && self.num_facts == other.num_facts
    }
}

impl Eq for Circuit {}

impl Circuit {
    /// Validates a raw gate list.
    pub fn from_parts(gates: Vec<Gate>, root: GateId, num_facts: usize) -> Result<Self> {
        let mut b = CircuitBuilder::new(num_facts);
        for (id, gate) in gates.iter().enumerate() {
            if let Some(&c) = gate.children().iter().find(|&&c| c >= id) {
                return Err(Error::MalformedCircuit(format!(
                    "gate {id} refers to gate {c}, which does not precede it"
                )));
            }
            if let Gate::Var(f) = gate {
                if *f >= num_facts {
                    return Err(Error::FactOutOfRange { index: *f, count: num_facts });
                }
            }
            if matches!(gate, Gate::And(cs) | Gate::Or(cs) if cs.is_empty()) {
                return Err(Error::MalformedCircuit(format!("gate {id} has no children")));
            }
            b.push_raw(gate.clone());
        }
        if root >= gates.len() {
            return Err(Error::MalformedCircuit(format!("root {root} is out of range ({} gates)", gates.len())));
        }
        Ok(b.finish(root))
    }

    pub fn constant(value: bool, num_facts: usize) -> Self {
        let mut b = CircuitBuilder::new(num_facts);
        let g = b.constant(value);
        b.finish(g)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn root(&self) -> GateId {
        self.root
    }

    pub fn num_facts(&self) -> usize {
        self.num_facts
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn vars(&self, g: GateId) -> &FactSet {
        &self.vars[g]
    }

    pub fn certificate(&self, g: GateId) -> Option<&OrCertificate> {
        self.certificates.get(&g)
    }

    /// The same circuit with a negation placed above the root.
    pub fn negated(&self) -> Circuit {
        let mut b = CircuitBuilder::new(self.num_facts);
        let root = b.import(self);
        let g = b.not(root);
        b.finish(g)
    }

    pub fn evaluate(&self, w: &World) -> Result<bool> {
        if w.len() < self.num_facts {
            return Err(Error::FactOutOfRange { index: self.num_facts - 1, count: w.len() });
        }
        let mut values: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match gate {
                Gate::Var(f) => w.contains(*f),
                Gate::Const(b) => *b,
                Gate::Not(c) => !values[*c],
                Gate::And(cs) => cs.iter().all(|&c| values[c]),
                Gate::Or(cs) => cs.iter().any(|&c| values[c]),
            };
            values.push(v);
        }
        Ok(values[self.root])
    }

    /// Every AND gate has children over pairwise disjoint variables.
    pub fn check_decomposable(&self) -> bool {
        self.gates.iter().all(|gate| match gate {
            Gate::And(cs) => {
                let mut seen = FactSet::empty(self.num_facts);
                cs.iter().all(|&c| {
                    let ok = seen.is_disjoint(&self.vars[c]);
                    seen.union_with(&self.vars[c]);
                    ok
                })
            }
            _ => true,
        })
    }

    /// Every OR gate has pairwise disjoint children.
    pub fn check_deterministic(&self, mode: DeterminismMode) -> Result<bool> {
        match mode {
            DeterminismMode::Certified => Ok(self.check_certificates()),
            DeterminismMode::Semantic => self.check_semantic(),
        }
    }

    fn check_certificates(&self) -> bool {
        self.gates.iter().enumerate().all(|(id, gate)| {
            let Gate::Or(cs) = gate else { return true };
            match self.certificates.get(&id) {
                Some(OrCertificate::Decision { var }) => {
                    cs.len() == 2
                        && ((self.implies(cs[0], *var, true) && self.implies(cs[1], *var, false))
                            || (self.implies(cs[0], *var, false) && self.implies(cs[1], *var, true)))
                }
                Some(OrCertificate::Lineage { children }) => {
                    children.len() == cs.len()
                        && children
                            .iter()
                            .enumerate()
                            .all(|(i, a)| children[i + 1..].iter().all(|b| a.is_disjoint(b).unwrap_or(false)))
                }
                None => cs.len() == 1,
            }
        })
    }

    /// Structural test that gate `g` is the literal `var`/`¬var` or a
    /// conjunction with that literal as a child.
    fn implies(&self, g: GateId, var: usize, positive: bool) -> bool {
        let is_literal = |g: GateId| match (&self.gates[g], positive) {
            (Gate::Var(v), true) => *v == var,
            (Gate::Not(c), false) => self.gates[*c] == Gate::Var(var),
            _ => false,
        };
        is_literal(g) || matches!(&self.gates[g], Gate::And(cs) if cs.iter().any(|&c| is_literal(c)))
    }

    fn check_semantic(&self) -> Result<bool> {
        let mut used = FactSet::empty(self.num_facts);
        for gate in &self.gates {
            if let Gate::Var(f) = gate {
                used.insert(*f);
            }
        }
        let m = used.len();
        if m > SEMANTIC_MAX_VARS {
            return Err(Error::SemanticGuard { vars: m, limit: SEMANTIC_MAX_VARS });
        }
        let mut local = vec![usize::MAX; self.num_facts];
        for (j, f) in used.iter().enumerate() {
            local[f] = j;
        }

        const CHUNK: usize = 64;
        const PATTERNS: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        let worlds = 1usize << m;
        let total_words = worlds.div_ceil(64);
        let mask = if worlds >= 64 { u64::MAX } else { (1u64 << worlds) - 1 };
        let mut values = vec![0u64; self.gates.len() * CHUNK];

        for start in (0..total_words).step_by(CHUNK) {
            let nw = CHUNK.min(total_words - start);
            for (id, gate) in self.gates.iter().enumerate() {
                for w in 0..nw {
                    let base = (start + w) * 64;
                    let v = match gate {
                        Gate::Var(f) => {
                            let j = local[*f];
                            if j < 6 {
                                PATTERNS[j]
                            } else if base >> j & 1 == 1 {
                                u64::MAX
                            } else {
                                0
                            }
                        }
                        Gate::Const(b) => {
                            if *b {
                                u64::MAX
                            } else {
                                0
                            }
                        }
                        Gate::Not(c) => !values[c * CHUNK + w],
                        Gate::And(cs) => cs.iter().fold(u64::MAX, |acc, &c| acc & values[c * CHUNK + w]),
                        Gate::Or(cs) => cs.iter().fold(0, |acc, &c| acc | values[c * CHUNK + w]),
                    };
                    values[id * CHUNK + w] = v;
                }
                if let Gate::Or(cs) = gate {
                    for (i, &a) in cs.iter().enumerate() {
                        for &b in &cs[i + 1..] {
                            let overlap = (0..nw).any(|w| values[a * CHUNK + w] & values[b * CHUNK + w] & mask != 0);
                            if overlap {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Decomposable and deterministic, trying certificates before the
    /// semantic check.
    pub fn is_verified_dd(&self) -> Result<bool> {
        if !self.check_decomposable() {
            return Ok(false);
        }
        if self.check_certificates() {
            return Ok(true);
        }
        self.check_semantic()
    }

    /// Exact probability, refusing circuits that are not verified d-Ds.
    pub fn probability(&self, db: &TidDatabase) -> Result<Rational> {
        if !self.check_decomposable() {
            return Err(Error::Unverified("an AND gate is not decomposable"));
        }
        if !self.check_certificates() {
            match self.check_semantic() {
                Ok(true) => {}
                Ok(false) => return Err(Error::Unverified("an OR gate is not deterministic")),
                Err(e) => return Err(e),
            }
        }
        self.probability_unchecked(db)
    }

    /// Bottom-up evaluation with `×`, `+` and `1 - x`, without any check.
    pub fn probability_unchecked(&self, db: &TidDatabase) -> Result<Rational> {
        let mut values: Vec<Rational> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match gate {
                Gate::Var(f) => match db.facts().get(*f) {
                    Some(fact) => fact.prob.clone(),
                    None => return Err(Error::FactOutOfRange { index: *f, count: db.len() }),
                },
                Gate::Const(true) => Rational::one(),
                Gate::Const(false) => Rational::zero(),
                Gate::Not(c) => Rational::one() - &values[*c],
                Gate::And(cs) => cs.iter().fold(Rational::one(), |acc, &c| acc * &values[c]),
                Gate::Or(cs) => cs.iter().fold(Rational::zero(), |acc, &c| acc + &values[c]),
            };
            values.push(v);
        }
        Ok(values.swap_remove(self.root))
    }
}

/// Hash-consing circuit builder.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    vars: Vec<FactSet>,
    num_facts: usize,
    unique: BTreeMap<Gate, GateId>,
    certificates: BTreeMap<GateId, OrCertificate>,
}

impl CircuitBuilder {
    pub fn new(num_facts: usize) -> Self {
        CircuitBuilder {
            gates: Vec::new(),
            vars: Vec::new(),
            num_facts,
            unique: BTreeMap::new(),
            certificates: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn push_raw(&mut self, gate: Gate) -> GateId {
        let mut vars = FactSet::empty(self.num_facts);
        match &gate {
            Gate::Var(f) => vars.insert(*f),
            g => {
                for &c in g.children() {
                    vars.union_with(&self.vars[c]);
                }
            }
        }
        self.gates.push(gate.clone());
        self.vars.push(vars);
        let id = self.gates.len() - 1;
        self.unique.entry(gate).or_insert(id);
        id
    }

    fn intern(&mut self, gate: Gate) -> GateId {
        match self.unique.get(&gate) {
            Some(&id) => id,
            None => self.push_raw(gate),
        }
    }

    pub fn var(&mut self, fact: usize) -> GateId {
        assert!(fact < self.num_facts, "fact {fact} out of range");
        self.intern(Gate::Var(fact))
    }

    pub fn constant(&mut self, value: bool) -> GateId {
        self.intern(Gate::Const(value))
    }

    pub fn not(&mut self, g: GateId) -> GateId {
        self.intern(Gate::Not(g))
    }

    /// Conjunction; a single child is returned as is.
    pub fn and(&mut self, children: Vec<GateId>) -> GateId {
        match children.len() {
            0 => self.constant(true),
            1 => children[0],
            _ => self.intern(Gate::And(children)),
        }
    }

    /// Disjunction with an optional determinism certificate.
    pub fn or(&mut self, children: Vec<GateId>, certificate: Option<OrCertificate>) -> GateId {
        match children.len() {
            0 => self.constant(false),
            1 => children[0],
            _ => {
                let id = self.intern(Gate::Or(children));
                if let Some(c) = certificate {
                    self.certificates.entry(id).or_insert(c);
                }
                id
            }
        }
    }

    /// Copies a circuit over the same facts, returning its root here.
    pub fn import(&mut self, c: &Circuit) -> GateId {
        let mut map: Vec<GateId> = Vec::with_capacity(c.gates.len());
        for (id, gate) in c.gates.iter().enumerate() {
            let remap = |cs: &[GateId]| cs.iter().map(|&x| map[x]).collect::<Vec<_>>();
            let new = match gate {
                Gate::Var(f) => self.var(*f),
                Gate::Const(b) => self.constant(*b),
                Gate::Not(ch) => self.not(map[*ch]),
                Gate::And(cs) => {
                    let cs = remap(cs);
                    self.intern(Gate::And(cs))
                }
                Gate::Or(cs) => {
                    let cs = remap(cs);
                    let cert = c.certificates.get(&id).cloned();
                    let new = self.intern(Gate::Or(cs));
                    if let Some(cert) = cert {
                        self.certificates.entry(new).or_insert(cert);
                    }
                    new
                }
            };
            map.push(new);
        }
        map[c.root]
    }

    pub fn finish(self, root: GateId) -> Circuit {
        Circuit { gates: self.gates, root, num_facts: self.num_facts, vars: self.vars, certificates: self.certificates }
    }
}

/// Plugs the leaf circuits into the holes of the fragmentation's template.
/// Template disjunctions carry the leaf-level functions as certificates.
pub fn compose_template(frag: &Fragmentation, leaf_circuits: &[Circuit]) -> Result<Circuit> {
    let template = &frag.template;
    if leaf_circuits.len() != template.hole_count() {
        return Err(Error::TemplateArity { expected: template.hole_count(), got: leaf_circuits.len() });
    }
    if let [TemplateNode::Hole(0)] = template.nodes() {
        return Ok(leaf_circuits[0].clone());
    }
    let num_facts = leaf_circuits.first().map_or(0, Circuit::num_facts);
    if leaf_circuits.iter().any(|c| c.num_facts() != num_facts) {
        return Err(Error::MalformedCircuit("leaf circuits range over different facts".into()));
    }
    let functions = fragment::node_functions(template, &frag.leaves)?;
    let mut b = CircuitBuilder::new(num_facts);
    let roots: Vec<GateId> = leaf_circuits.iter().map(|c| b.import(c)).collect();
    let mut ids: Vec<GateId> = Vec::with_capacity(template.nodes().len());
    for node in template.nodes() {
        let id = match node {
            TemplateNode::Hole(h) => roots[*h],
            TemplateNode::Not(c) => b.not(ids[*c]),
            TemplateNode::Or(cs) => {
                let cert = OrCertificate::Lineage { children: cs.iter().map(|&c| functions[c].clone()).collect() };
                let children = cs.iter().map(|&c| ids[c]).collect();
                b.or(children, Some(cert))
            }
        };
        ids.push(id);
    }
    Ok(b.finish(ids[template.root()]))
}

/// A d-D for the lineage of `Q_φ` on `D`; requires `eul(φ) = 0`.
pub fn compile_query(phi: &BoolFun, db: &TidDatabase) -> Result<Circuit> {
    if phi.euler() != 0 {
        return Err(Error::NotCompilable { verdict: classify(phi) });
    }
    if phi.k() != db.k() {
        return Err(Error::ArityMismatch { left: phi.k(), right: db.k() });
    }
    let frag = fragment::fragment(phi)?;
    let leaves = frag.leaves.iter().map(|leaf| degenerate_compile(leaf, db)).collect::<Result<Vec<_>>>()?;
    compose_template(&frag, &leaves)
}
