//! Reduced ordered BDDs with a fixed, statically chosen variable order,
//! and compilation of a BDD into a weakly decomposable NNF circuit.
//!
//! The second synthesis pipeline routes the specification through this
//! module: the compiled circuit is decomposable at every AND node because a
//! BDD variable is tested at most once on any path, so Phase 1 on the
//! compiled form is exact. Construction is capped; blowing the cap is a
//! first-class outcome, not an abort.

use std::collections::{BTreeMap, HashMap};

use crate::circuit::{Dag, Node, NodeRef, VarId};
use crate::error::BddError;

const ZERO: u32 = 0;
const ONE: u32 = 1;

pub const DEFAULT_NODE_CAP: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct BddNode {
    level: u32,
    lo: u32,
    hi: u32,
}

/// A shared BDD manager. Nodes are unique by (level, lo, hi) and no node
/// has equal branches, so equal functions get equal node indices.
#[derive(Debug)]
pub struct Bdd {
    nodes: Vec<BddNode>,
    unique: HashMap<BddNode, u32>,
    /// Variable order, outermost level first.
    order: Vec<VarId>,
    level_of: BTreeMap<VarId, u32>,
    cap: usize,
    apply_cache: HashMap<(u8, u32, u32), u32>,
}

impl Bdd {
    pub fn new(order: Vec<VarId>, cap: usize) -> Self {
        let level_of = order
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i as u32))
            .collect();
        Bdd {
            // Slots 0 and 1 are the terminals; their level is a sentinel.
            nodes: vec![
                BddNode {
                    level: u32::MAX,
                    lo: 0,
                    hi: 0,
                },
                BddNode {
                    level: u32::MAX,
                    lo: 1,
                    hi: 1,
                },
            ],
            unique: HashMap::new(),
            order,
            level_of,
            cap,
            apply_cache: HashMap::new(),
        }
    }

    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    /// Internal (non-terminal) node count of the whole manager table,
    /// including nodes left behind by intermediate apply steps.
    pub fn num_internal_nodes(&self) -> usize {
        self.nodes.len() - 2
    }

    /// Internal nodes reachable from `root`.
    pub fn num_reachable_nodes(&self, root: u32) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(f) = stack.pop() {
            if Self::is_terminal(f) || !seen.insert(f) {
                continue;
            }
            count += 1;
            stack.push(self.nodes[f as usize].lo);
            stack.push(self.nodes[f as usize].hi);
        }
        count
    }

    pub fn terminal(&self, value: bool) -> u32 {
        if value {
            ONE
        } else {
            ZERO
        }
    }

    fn is_terminal(f: u32) -> bool {
        f <= ONE
    }

    fn level(&self, f: u32) -> u32 {
        self.nodes[f as usize].level
    }

    fn mk(&mut self, level: u32, lo: u32, hi: u32) -> Result<u32, BddError> {
        if lo == hi {
            return Ok(lo);
        }
        let node = BddNode { level, lo, hi };
        if let Some(&idx) = self.unique.get(&node) {
            return Ok(idx);
        }
        if self.num_internal_nodes() >= self.cap {
            return Err(BddError::SizeCapExceeded(self.cap));
        }
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, idx);
        Ok(idx)
    }

    pub fn literal(&mut self, var: VarId, negated: bool) -> Result<u32, BddError> {
        let level = self.level_of[&var];
        if negated {
            self.mk(level, ONE, ZERO)
        } else {
            self.mk(level, ZERO, ONE)
        }
    }

    fn apply(&mut self, op: u8, a: u32, b: u32) -> Result<u32, BddError> {
        let conj = op == 0;
        match (conj, a, b) {
            (true, ZERO, _) | (true, _, ZERO) => return Ok(ZERO),
            (true, ONE, g) | (true, g, ONE) => return Ok(g),
            (false, ONE, _) | (false, _, ONE) => return Ok(ONE),
            (false, ZERO, g) | (false, g, ZERO) => return Ok(g),
            _ => {}
        }
        if a == b {
            return Ok(a);
        }
        // Commutative ops: canonicalize the cache key.
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }
        let (la, lb) = (self.level(a), self.level(b));
        let top = la.min(lb);
        let (a_lo, a_hi) = if la == top {
            (self.nodes[a as usize].lo, self.nodes[a as usize].hi)
        } else {
            (a, a)
        };
        let (b_lo, b_hi) = if lb == top {
            (self.nodes[b as usize].lo, self.nodes[b as usize].hi)
        } else {
            (b, b)
        };
        let lo = self.apply(op, a_lo, b_lo)?;
        let hi = self.apply(op, a_hi, b_hi)?;
        let r = self.mk(top, lo, hi)?;
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    pub fn and(&mut self, a: u32, b: u32) -> Result<u32, BddError> {
        self.apply(0, a, b)
    }

    pub fn or(&mut self, a: u32, b: u32) -> Result<u32, BddError> {
        self.apply(1, a, b)
    }

    /// Import a circuit; equal functions return equal roots within one
    /// manager.
    pub fn add_circuit(&mut self, dag: &Dag, root: NodeRef) -> Result<u32, BddError> {
        let order = dag.topo_reachable(root);
        let mut map: HashMap<NodeRef, u32> = HashMap::with_capacity(order.len());
        for r in order {
            let f = match dag.node(r) {
                Node::Const(b) => self.terminal(*b),
                Node::Var { var, negated } => self.literal(*var, *negated)?,
                Node::And(ch) => {
                    let mut acc = ONE;
                    for c in ch.iter() {
                        acc = self.and(acc, map[c])?;
                    }
                    acc
                }
                Node::Or(ch) => {
                    let mut acc = ZERO;
                    for c in ch.iter() {
                        acc = self.or(acc, map[c])?;
                    }
                    acc
                }
            };
            map.insert(r, f);
        }
        Ok(map[&root])
    }

    /// Compile the function at `root` back into a circuit. Every internal
    /// node (v, lo, hi) becomes (!v and compile(lo)) or (v and compile(hi)),
    /// memoized over shared nodes, so the result is linear in the BDD size
    /// and weakly decomposable.
    pub fn to_circuit(&self, dag: &mut Dag, root: u32) -> NodeRef {
        let mut memo: HashMap<u32, NodeRef> = HashMap::new();
        memo.insert(ZERO, dag.constant(false));
        memo.insert(ONE, dag.constant(true));
        // Children always have strictly deeper levels, but node indices are
        // not ordered; collect reachable nodes and process deepest first.
        let mut reach: Vec<u32> = Vec::new();
        let mut stack = vec![root];
        let mut seen = std::collections::BTreeSet::new();
        while let Some(f) = stack.pop() {
            if Self::is_terminal(f) || !seen.insert(f) {
                continue;
            }
            reach.push(f);
            stack.push(self.nodes[f as usize].lo);
            stack.push(self.nodes[f as usize].hi);
        }
        reach.sort_by_key(|f| std::cmp::Reverse((self.level(*f), *f)));
        for f in reach {
            let node = self.nodes[f as usize];
            let var = self.order[node.level as usize];
            let pos = dag.var(var);
            let neg = dag.neg_var(var);
            let lo_c = memo[&node.lo];
            let hi_c = memo[&node.hi];
            let a = dag.and([neg, lo_c]);
            let b = dag.and([pos, hi_c]);
            let compiled = dag.or([a, b]);
            memo.insert(f, compiled);
        }
        memo[&root]
    }

    /// Graphviz dump for debugging.
    pub fn to_dot(&self, dag: &Dag, root: u32) -> String {
        let mut out = String::from("digraph bdd {\n");
        out.push_str("  node0 [label=\"0\", shape=box];\n");
        out.push_str("  node1 [label=\"1\", shape=box];\n");
        let mut stack = vec![root];
        let mut seen = std::collections::BTreeSet::new();
        while let Some(f) = stack.pop() {
            if Self::is_terminal(f) || !seen.insert(f) {
                continue;
            }
            let node = self.nodes[f as usize];
            let var = self.order[node.level as usize];
            out.push_str(&format!(
                "  node{f} [label=\"{}\"];\n",
                dag.var_name(var)
            ));
            out.push_str(&format!("  node{f} -> node{} [style=dashed];\n", node.lo));
            out.push_str(&format!("  node{f} -> node{} [style=solid];\n", node.hi));
            stack.push(node.lo);
            stack.push(node.hi);
        }
        out.push_str("}\n");
        out
    }
}

/// Static variable order: the circuit's support sorted ascending by
/// transitive-fanin score, ties by variable id, mixing outputs and inputs.
pub fn static_order(dag: &Dag, root: NodeRef) -> Vec<VarId> {
    let support: Vec<VarId> = dag.support(root).into_iter().collect();
    let scores = dag.transitive_fanin_counts(root, &support);
    let mut order = support;
    order.sort_by_key(|v| (scores[v], *v));
    order
}

/// Build a reduced ordered BDD of the circuit under the given order.
pub fn build_bdd(
    dag: &Dag,
    root: NodeRef,
    order: Vec<VarId>,
    cap: usize,
) -> Result<(Bdd, u32), BddError> {
    let mut bdd = Bdd::new(order, cap);
    let f = bdd.add_circuit(dag, root)?;
    Ok((bdd, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Assignment;
    use crate::nnf;

    #[test]
    fn xor_has_three_internal_nodes() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let a = dag.var(x1);
        let b = dag.var(y1);
        let root = dag.xor(a, b);
        let (bdd, f) = build_bdd(&dag, root, vec![x1, y1], DEFAULT_NODE_CAP).unwrap();
        assert_eq!(bdd.num_reachable_nodes(f), 3);
        assert!(f > 1);
    }

    #[test]
    fn and_has_two_internal_nodes() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let a = dag.var(x1);
        let b = dag.var(y1);
        let root = dag.and([a, b]);
        let (bdd, f) = build_bdd(&dag, root, vec![x1, y1], DEFAULT_NODE_CAP).unwrap();
        assert_eq!(bdd.num_reachable_nodes(f), 2);
    }

    #[test]
    fn constant_is_terminal_only() {
        let mut dag = Dag::new();
        let root = dag.constant(true);
        let (bdd, f) = build_bdd(&dag, root, vec![], DEFAULT_NODE_CAP).unwrap();
        assert_eq!(bdd.num_internal_nodes(), 0);
        assert_eq!(f, 1);
    }

    #[test]
    fn canonical_roots_for_equal_functions() {
        // Two structurally different builds of the same function share a
        // root within one manager.
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let a = dag.var(x1);
        let b = dag.var(y1);
        let na = dag.neg_var(x1);
        let nb = dag.neg_var(y1);
        let direct = dag.or([a, b]);
        let l = dag.and([na, nb]);
        let via_demorgan = dag.not(l);
        let mut bdd = Bdd::new(vec![x1, y1], DEFAULT_NODE_CAP);
        let f1 = bdd.add_circuit(&dag, direct).unwrap();
        let f2 = bdd.add_circuit(&dag, via_demorgan).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn size_cap_is_reported() {
        let mut dag = Dag::new();
        let mut conjuncts = Vec::new();
        let mut vars = Vec::new();
        for i in 0..6 {
            let a = dag.var_by_name(&format!("a{i}"));
            let b = dag.var_by_name(&format!("b{i}"));
            vars.push(a);
            vars.push(b);
            let va = dag.var(a);
            let vb = dag.var(b);
            conjuncts.push(dag.xor(va, vb));
        }
        let root = dag.and(conjuncts);
        let err = build_bdd(&dag, root, vars, 4).unwrap_err();
        assert_eq!(err, BddError::SizeCapExceeded(4));
    }

    #[test]
    fn bdd_of_literal_compiles_to_literal() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let root = dag.var(x1);
        let (bdd, f) = build_bdd(&dag, root, vec![x1], DEFAULT_NODE_CAP).unwrap();
        let compiled = bdd.to_circuit(&mut dag, f);
        assert_eq!(compiled, root);
    }

    #[test]
    fn xor_compiles_to_wdnnf() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let a = dag.var(x1);
        let b = dag.var(y1);
        let root = dag.xor(a, b);
        let (bdd, f) = build_bdd(&dag, root, vec![x1, y1], DEFAULT_NODE_CAP).unwrap();
        let compiled = bdd.to_circuit(&mut dag, f);
        // (!x1 & y1) | (x1 & !y1), up to child order.
        for bits in 0..4u32 {
            let asg =
                Assignment::from_pairs([(x1, bits & 1 != 0), (y1, bits & 2 != 0)]);
            assert_eq!(
                dag.evaluate(compiled, &asg).unwrap(),
                dag.evaluate(root, &asg).unwrap()
            );
        }
        let hat = nnf::hat_transform(&mut dag, compiled, &[x1]);
        assert!(nnf::check_wdnnf(&dag, hat.root, &hat.origin_of).is_pass());
    }

    #[test]
    fn compile_roundtrip_semantics() {
        // A denser circuit: majority of three variables plus a shared xor.
        let mut dag = Dag::new();
        let vs: Vec<VarId> = (0..4)
            .map(|i| dag.var_by_name(&format!("v{i}")))
            .collect();
        let a = dag.var(vs[0]);
        let b = dag.var(vs[1]);
        let c = dag.var(vs[2]);
        let d = dag.var(vs[3]);
        let ab = dag.and([a, b]);
        let bc = dag.and([b, c]);
        let ca = dag.and([c, a]);
        let maj = dag.or([ab, bc, ca]);
        let x = dag.xor(maj, d);
        let order = static_order(&dag, x);
        let (bdd, f) = build_bdd(&dag, x, order, DEFAULT_NODE_CAP).unwrap();
        let compiled = bdd.to_circuit(&mut dag, f);
        for bits in 0..16u32 {
            let asg = Assignment::from_pairs(
                vs.iter().enumerate().map(|(i, v)| (*v, bits >> i & 1 != 0)),
            );
            assert_eq!(
                dag.evaluate(compiled, &asg).unwrap(),
                dag.evaluate(x, &asg).unwrap()
            );
        }
        let dot = bdd.to_dot(&dag, f);
        assert!(dot.starts_with("digraph"));
    }
}
