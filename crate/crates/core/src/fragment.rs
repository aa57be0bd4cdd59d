//! `¬`-`∨`-templates and fragmentations.
//!
//! A template is a circuit over holes whose internal gates are negations
//! and disjunctions. A fragmentation of `φ` fills the holes with degenerate
//! functions so that every disjunction is deterministic and the result is
//! `φ`. Fragmentations exist exactly when `eul(φ) = 0`; one is read off a
//! rewrite trace from `⊥` to `φ`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::boolfun::{BoolFun, Valuation};
use crate::transform::{reduce_to_bot, RewriteTrace, Sign};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateNode {
    Hole(usize),
    Not(usize),
    Or(Vec<usize>),
}

/// Nodes are stored children first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    nodes: Vec<TemplateNode>,
    root: usize,
    hole_count: usize,
}

impl Template {
    /// The template made of a single hole.
    pub fn hole() -> Self {
        Template { nodes: vec![TemplateNode::Hole(0)], root: 0, hole_count: 1 }
    }

    /// `H0 ∨ … ∨ H(n-1)`.
    pub fn or_of_holes(n: usize) -> Result<Self> {
        let mut nodes: Vec<TemplateNode> = (0..n).map(TemplateNode::Hole).collect();
        nodes.push(TemplateNode::Or((0..n).collect()));
        Template::new(nodes, n)
    }

    pub fn new(nodes: Vec<TemplateNode>, root: usize) -> Result<Self> {
        if root >= nodes.len() {
            return Err(Error::MalformedTemplate("root is out of range"));
        }
        let mut max_hole = None;
        for (i, node) in nodes.iter().enumerate() {
            match node {
                TemplateNode::Hole(h) => max_hole = max_hole.max(Some(*h)),
                TemplateNode::Not(c) if *c >= i => {
                    return Err(Error::MalformedTemplate("child does not precede its parent"))
                }
                TemplateNode::Or(cs) if cs.is_empty() => return Err(Error::MalformedTemplate("empty disjunction")),
                TemplateNode::Or(cs) if cs.iter().any(|c| *c >= i) => {
                    return Err(Error::MalformedTemplate("child does not precede its parent"))
                }
                _ => {}
            }
        }
        let hole_count = max_hole.map_or(0, |h| h + 1);
        let mut seen = vec![false; hole_count];
        for node in &nodes {
            if let TemplateNode::Hole(h) = node {
                seen[*h] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedTemplate("hole indices are not contiguous"));
        }
        Ok(Template { nodes, root, hole_count })
    }

    pub fn nodes(&self) -> &[TemplateNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn hole_count(&self) -> usize {
        self.hole_count
    }

    pub fn count_not(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TemplateNode::Not(_))).count()
    }

    fn fmt_node(&self, id: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.nodes[id] {
            TemplateNode::Hole(h) => write!(f, "H{h}"),
            TemplateNode::Not(c) => {
                f.write_str("!")?;
                self.fmt_node(*c, f)
            }
            TemplateNode::Or(cs) => {
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    self.fmt_node(*c, f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_node(self.root, f)
    }
}

/// The function computed at every template node.
pub(crate) fn node_functions(t: &Template, leaves: &[BoolFun]) -> Result<Vec<BoolFun>> {
    if leaves.len() != t.hole_count {
        return Err(Error::TemplateArity { expected: t.hole_count, got: leaves.len() });
    }
    let k = leaves.first().map(BoolFun::k);
    if let Some(bad) = leaves.iter().find(|l| Some(l.k()) != k) {
        return Err(Error::ArityMismatch { left: k.unwrap_or(0), right: bad.k() });
    }
    let mut values: Vec<BoolFun> = Vec::with_capacity(t.nodes.len());
    for node in &t.nodes {
        let value = match node {
            TemplateNode::Hole(h) => leaves[*h].clone(),
            TemplateNode::Not(c) => values[*c].not(),
            TemplateNode::Or(cs) => {
                let mut acc = values[cs[0]].clone();
                for c in &cs[1..] {
                    acc = acc.or(&values[*c])?;
                }
                acc
            }
        };
        values.push(value);
    }
    Ok(values)
}

/// `T[φ₀,…,φ_n]` evaluated on every valuation.
pub fn instantiate(t: &Template, leaves: &[BoolFun]) -> Result<BoolFun> {
    let mut values = node_functions(t, leaves)?;
    Ok(values.swap_remove(t.root))
}

/// True when the children of every OR node are pairwise disjoint under the
/// instantiation.
pub fn check_instantiation_determinism(t: &Template, leaves: &[BoolFun]) -> Result<bool> {
    let values = node_functions(t, leaves)?;
    for node in &t.nodes {
        if let TemplateNode::Or(cs) = node {
            for (i, a) in cs.iter().enumerate() {
                for b in &cs[i + 1..] {
                    if !values[*a].is_disjoint(&values[*b])? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragmentation {
    pub template: Template,
    pub leaves: Vec<BoolFun>,
}

impl Fragmentation {
    pub fn instantiate(&self) -> Result<BoolFun> {
        instantiate(&self.template, &self.leaves)
    }

    pub fn is_deterministic(&self) -> Result<bool> {
        check_instantiation_determinism(&self.template, &self.leaves)
    }

    pub fn leaves_degenerate(&self) -> bool {
        self.leaves.iter().all(BoolFun::is_degenerate)
    }

    /// Checks instantiation equality, leaf degeneracy and determinism.
    pub fn is_valid_for(&self, phi: &BoolFun) -> Result<bool> {
        Ok(self.instantiate()? == *phi && self.leaves_degenerate() && self.is_deterministic()?)
    }

    /// The Euler characteristic propagated through the template: leaves
    /// give their own value, negation flips the sign and deterministic
    /// disjunction adds.
    pub fn structural_euler(&self) -> i64 {
        let mut values: Vec<i64> = Vec::with_capacity(self.template.nodes.len());
        for node in &self.template.nodes {
            let value = match node {
                TemplateNode::Hole(h) => self.leaves[*h].euler(),
                TemplateNode::Not(c) => -values[*c],
                TemplateNode::Or(cs) => cs.iter().map(|c| values[*c]).sum(),
            };
            values.push(value);
        }
        values[self.template.root]
    }
}

/// Builds a fragmentation from a trace starting at `⊥`.
///
/// Hole 0 is the `⊥` leaf. Step `i` introduces hole `i` with leaf
/// `{ν_i, ν_i^(l_i)}`; a PLUS step disjoins it with the template so far and
/// a MINUS step produces `¬(¬T ∨ H_i)`.
pub fn fragment_from_trace(trace: &RewriteTrace) -> Result<Fragmentation> {
    if !trace.start().is_bot() {
        return Err(Error::InvalidTrace { index: 0 });
    }
    trace.end()?;
    let k = trace.start().k();
    let mut nodes = vec![TemplateNode::Hole(0)];
    let mut leaves = vec![trace.start().clone()];
    for step in trace.steps() {
        let hole = leaves.len();
        leaves.push(BoolFun::from_sat(k, [step.nu, step.partner()])?);
        let root = nodes.len() - 1;
        match step.sign {
            Sign::Plus => {
                let mut children = match &nodes[root] {
                    TemplateNode::Or(cs) => {
                        let cs = cs.clone();
                        nodes.pop();
                        cs
                    }
                    _ => vec![root],
                };
                nodes.push(TemplateNode::Hole(hole));
                children.push(nodes.len() - 1);
                nodes.push(TemplateNode::Or(children));
            }
            Sign::Minus => {
                nodes.push(TemplateNode::Not(root));
                nodes.push(TemplateNode::Hole(hole));
                nodes.push(TemplateNode::Or(vec![root + 1, root + 2]));
                nodes.push(TemplateNode::Not(root + 3));
            }
        }
    }
    let root = nodes.len() - 1;
    Ok(Fragmentation { template: Template::new(nodes, root)?, leaves })
}

/// A fragmentation of `φ`, which exists exactly when `eul(φ) = 0`.
pub fn fragment(phi: &BoolFun) -> Result<Fragmentation> {
    let euler = phi.euler();
    if euler != 0 {
        return Err(Error::NotFragmentable { euler });
    }
    fragment_from_trace(&reduce_to_bot(phi)?.reversed()?)
}

/// The hand-made four-leaf fragmentation of `φ₉`:
/// `(0∧¬2∧3) ∨ (¬1∧2∧3) ∨ (¬0∧1∧3) ∨ (0∧1∧2)`.
pub fn phi9_fragmentation() -> Fragmentation {
    let lit = |pos: &[usize], neg: &[usize]| {
        let pos = Valuation::from_vars(pos.iter().copied());
        let neg = Valuation::from_vars(neg.iter().copied());
        BoolFun::from_fn(3, |nu| pos.is_subset(nu) && nu.intersection(neg).is_empty()).expect("k = 3 is supported")
    };
    Fragmentation {
        template: Template::or_of_holes(4).expect("well-formed"),
        leaves: vec![lit(&[0, 3], &[2]), lit(&[2, 3], &[1]), lit(&[1, 3], &[0]), lit(&[0, 1, 2], &[])],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfun::{phi9, phi_no_pm};
    use crate::transform::RewriteStep;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn v(vars: &[usize]) -> Valuation {
        Valuation::from_vars(vars.iter().copied())
    }

    #[test]
    fn single_hole_is_identity() {
        let psi = phi9();
        assert_eq!(instantiate(&Template::hole(), core::slice::from_ref(&psi)).unwrap(), psi);
        assert!(matches!(instantiate(&Template::hole(), &[]), Err(Error::TemplateArity { expected: 1, got: 0 })));
    }

    #[test]
    fn hand_fragmentation_of_phi9() {
        let frag = phi9_fragmentation();
        assert_eq!(frag.instantiate().unwrap(), phi9());
        assert!(frag.is_deterministic().unwrap());
        assert!(frag.leaves_degenerate());
        assert_eq!(frag.template.to_string(), "(H0 | H1 | H2 | H3)");
    }

    #[test]
    fn determinism_depends_on_leaves() {
        let x = BoolFun::from_fn(1, |nu| nu.contains(0)).unwrap();
        let t = Template::or_of_holes(2).unwrap();
        let leaves = [x.clone(), x.not()];
        assert_eq!(instantiate(&t, &leaves).unwrap(), BoolFun::top(1).unwrap());
        assert!(check_instantiation_determinism(&t, &leaves).unwrap());

        let same = Template::new(vec![TemplateNode::Hole(0), TemplateNode::Or(vec![0, 0])], 1).unwrap();
        assert!(!check_instantiation_determinism(&same, &[BoolFun::top(1).unwrap()]).unwrap());
    }

    #[test]
    fn malformed_templates() {
        assert!(Template::new(vec![TemplateNode::Not(0)], 0).is_err());
        assert!(Template::new(vec![TemplateNode::Hole(1)], 0).is_err());
        assert!(Template::new(vec![TemplateNode::Hole(0), TemplateNode::Or(vec![])], 1).is_err());
    }

    #[test]
    fn empty_trace_gives_bot_leaf() {
        let bot = BoolFun::bot(2).unwrap();
        let frag = fragment_from_trace(&RewriteTrace::new(bot.clone())).unwrap();
        assert_eq!(frag.template, Template::hole());
        assert_eq!(frag.instantiate().unwrap(), bot);
    }

    #[test]
    fn plus_only_trace_is_flat() {
        let bot = BoolFun::bot(2).unwrap();
        let steps =
            vec![RewriteStep::plus(v(&[]), 0), RewriteStep::plus(v(&[1]), 2), RewriteStep::plus(v(&[0, 1, 2]), 1)];
        let frag = fragment_from_trace(&RewriteTrace::from_steps(bot, steps)).unwrap();
        assert_eq!(frag.template.to_string(), "(H0 | H1 | H2 | H3)");
        assert_eq!(frag.leaves.len(), 4);
    }

    #[test]
    fn minus_step_shape() {
        let bot = BoolFun::bot(1).unwrap();
        let steps = vec![RewriteStep::plus(v(&[]), 0), RewriteStep::minus(v(&[0]), 0)];
        let frag = fragment_from_trace(&RewriteTrace::from_steps(bot.clone(), steps)).unwrap();
        assert_eq!(frag.template.to_string(), "!(!(H0 | H1) | H2)");
        assert_eq!(frag.instantiate().unwrap(), bot);
        assert!(frag.is_deterministic().unwrap());
    }

    #[test]
    fn fragment_examples() {
        let frag = fragment(&phi9()).unwrap();
        assert!(frag.is_valid_for(&phi9()).unwrap());
        assert_eq!(frag.structural_euler(), 0);

        let conj = BoolFun::from_sat(1, [v(&[0, 1])]).unwrap();
        assert_eq!(fragment(&conj), Err(Error::NotFragmentable { euler: 1 }));

        let frag = fragment(&phi_no_pm()).unwrap();
        assert!(frag.is_valid_for(&phi_no_pm()).unwrap());
        assert!(frag.template.count_not() > 0);
    }

    proptest! {
        #[test]
        fn fragmentations_are_valid(word in any::<u64>()) {
            let phi = BoolFun::from_word(3, word).unwrap();
            match fragment(&phi) {
                Ok(frag) => {
                    prop_assert!(frag.is_valid_for(&phi).unwrap());
                    prop_assert_eq!(frag.structural_euler(), 0);
                }
                Err(e) => prop_assert_eq!(e, Error::NotFragmentable { euler: phi.euler() }),
            }
        }
    }
}
