//! Immutable Boolean circuit DAGs.
//!
//! Circuits are stored in an append-only arena ([`Dag`]). Nodes are hashed
//! structurally, so no two distinct node indices carry the same kind and
//! children, and a node's children always have smaller indices than the node
//! itself (ascending index order is a topological order). Negation exists
//! only at leaves: internal nodes are n-ary AND/OR, so every stored circuit
//! is in negation normal form by construction. Constant propagation runs on
//! every construction: an AND with a false child collapses to false, an OR
//! with a true child to true, neutral constants are dropped, duplicate
//! children are merged, and a node whose children contain a literal together
//! with its complement collapses to the absorbing constant.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::CircuitError;

/// Identifier of a named Boolean variable in a [`Dag`]'s variable table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Handle to a node in a [`Dag`]. Only meaningful together with the arena
/// that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef(pub u32);

impl NodeRef {
    fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A single circuit node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    /// Literal leaf: a variable or its complement.
    Var { var: VarId, negated: bool },
    /// Constant leaf.
    Const(bool),
    /// n-ary conjunction, children sorted by index, length >= 2.
    And(Box<[NodeRef]>),
    /// n-ary disjunction, children sorted by index, length >= 2.
    Or(Box<[NodeRef]>),
}

impl Node {
    pub fn children(&self) -> &[NodeRef] {
        match self {
            Node::Var { .. } | Node::Const(_) => &[],
            Node::And(ch) | Node::Or(ch) => ch,
        }
    }
}

/// Total assignment over a declared set of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<VarId, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, bool)>) -> Self {
        Assignment(pairs.into_iter().collect())
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: VarId) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.0.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Projection onto a variable sequence; variables absent from the
    /// assignment are skipped.
    pub fn project(&self, vars: &[VarId]) -> Assignment {
        Assignment(
            vars.iter()
                .filter_map(|v| self.0.get(v).map(|b| (*v, *b)))
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.0.iter().map(|(v, b)| (*v, *b))
    }

    /// Merge `other` into `self`, overwriting on collision.
    pub fn extend(&mut self, other: &Assignment) {
        for (v, b) in other.iter() {
            self.0.insert(v, b);
        }
    }
}

/// Append-only arena of structurally hashed circuit nodes plus the variable
/// table. All circuits of one synthesis run live in a single arena so that
/// subcircuits are shared.
#[derive(Debug, Clone, Default)]
pub struct Dag {
    nodes: Vec<Node>,
    dedup: HashMap<Node, NodeRef>,
    neg_cache: HashMap<NodeRef, NodeRef>,
    var_names: Vec<String>,
    names: HashMap<String, VarId>,
}

impl Dag {
    pub fn new() -> Self {
        Dag::default()
    }

    /// Number of nodes in the arena (not of any particular circuit).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, r: NodeRef) -> &Node {
        &self.nodes[r.idx()]
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.var_names[v.0 as usize]
    }

    pub fn lookup_var(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    /// Declare a variable with the given name, or return the existing id.
    pub fn var_by_name(&mut self, name: &str) -> VarId {
        if let Some(v) = self.names.get(name) {
            return *v;
        }
        let v = VarId(self.var_names.len() as u32);
        self.var_names.push(name.to_string());
        self.names.insert(name.to_string(), v);
        v
    }

    /// Declare a fresh variable whose name starts from `hint`, suffixed
    /// until unique.
    pub fn fresh_var(&mut self, hint: &str) -> VarId {
        if !self.names.contains_key(hint) {
            return self.var_by_name(hint);
        }
        let mut k = 1usize;
        loop {
            let candidate = format!("{hint}_{k}");
            if !self.names.contains_key(&candidate) {
                return self.var_by_name(&candidate);
            }
            k += 1;
        }
    }

    fn intern(&mut self, node: Node) -> NodeRef {
        if let Some(r) = self.dedup.get(&node) {
            return *r;
        }
        let r = NodeRef(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.dedup.insert(node, r);
        r
    }

    pub fn constant(&mut self, value: bool) -> NodeRef {
        self.intern(Node::Const(value))
    }

    pub fn literal(&mut self, var: VarId, negated: bool) -> NodeRef {
        self.intern(Node::Var { var, negated })
    }

    pub fn var(&mut self, var: VarId) -> NodeRef {
        self.literal(var, false)
    }

    pub fn neg_var(&mut self, var: VarId) -> NodeRef {
        self.literal(var, true)
    }

    /// n-ary AND with constant propagation, one-level flattening of AND
    /// children, duplicate removal and complementary-literal collapse.
    pub fn and(&mut self, children: impl IntoIterator<Item = NodeRef>) -> NodeRef {
        self.gate(children, true)
    }

    /// n-ary OR, dual rules of [`Dag::and`].
    pub fn or(&mut self, children: impl IntoIterator<Item = NodeRef>) -> NodeRef {
        self.gate(children, false)
    }

    fn gate(&mut self, children: impl IntoIterator<Item = NodeRef>, is_and: bool) -> NodeRef {
        // For AND: `absorbing` = false, `neutral` = true. Dual for OR.
        let mut flat: Vec<NodeRef> = Vec::new();
        for c in children {
            match self.node(c) {
                Node::Const(b) => {
                    if *b == is_and {
                        continue; // neutral
                    }
                    return self.constant(!is_and); // absorbing
                }
                Node::And(inner) if is_and => flat.extend(inner.iter().copied()),
                Node::Or(inner) if !is_and => flat.extend(inner.iter().copied()),
                _ => flat.push(c),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        // x AND !x = 0, x OR !x = 1
        let mut polarity: HashMap<VarId, bool> = HashMap::new();
        for &c in &flat {
            if let Node::Var { var, negated } = self.node(c) {
                if let Some(prev) = polarity.insert(*var, *negated) {
                    if prev != *negated {
                        return self.constant(!is_and);
                    }
                }
            }
        }
        match flat.len() {
            0 => self.constant(is_and),
            1 => flat[0],
            _ => {
                let node = if is_and {
                    Node::And(flat.into_boxed_slice())
                } else {
                    Node::Or(flat.into_boxed_slice())
                };
                self.intern(node)
            }
        }
    }

    /// Complement of a circuit, pushed to the leaves via De Morgan. The
    /// result is memoized so repeated negation is free and `not(not(c))`
    /// returns `c`.
    pub fn not(&mut self, root: NodeRef) -> NodeRef {
        if let Some(r) = self.neg_cache.get(&root) {
            return *r;
        }
        let order = self.topo_reachable(root);
        let mut map: HashMap<NodeRef, NodeRef> = HashMap::new();
        for r in order {
            if let Some(cached) = self.neg_cache.get(&r) {
                map.insert(r, *cached);
                continue;
            }
            let negated = match self.node(r).clone() {
                Node::Const(b) => self.constant(!b),
                Node::Var { var, negated } => self.literal(var, !negated),
                Node::And(ch) => {
                    let mapped: Vec<NodeRef> = ch.iter().map(|c| map[c]).collect();
                    self.or(mapped)
                }
                Node::Or(ch) => {
                    let mapped: Vec<NodeRef> = ch.iter().map(|c| map[c]).collect();
                    self.and(mapped)
                }
            };
            self.neg_cache.insert(r, negated);
            self.neg_cache.insert(negated, r);
            map.insert(r, negated);
        }
        map[&root]
    }

    pub fn implies(&mut self, a: NodeRef, b: NodeRef) -> NodeRef {
        let na = self.not(a);
        self.or([na, b])
    }

    pub fn xor(&mut self, a: NodeRef, b: NodeRef) -> NodeRef {
        let na = self.not(a);
        let nb = self.not(b);
        let l = self.and([a, nb]);
        let r = self.and([na, b]);
        self.or([l, r])
    }

    pub fn iff(&mut self, a: NodeRef, b: NodeRef) -> NodeRef {
        let na = self.not(a);
        let nb = self.not(b);
        let l = self.and([a, b]);
        let r = self.and([na, nb]);
        self.or([l, r])
    }

    /// Nodes reachable from `root` in ascending index order. Since children
    /// always precede parents, this is a topological order.
    pub fn topo_reachable(&self, root: NodeRef) -> Vec<NodeRef> {
        let mut seen: BTreeSet<NodeRef> = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(r) = stack.pop() {
            if seen.insert(r) {
                stack.extend(self.node(r).children().iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// DAG node count of the circuit rooted at `root`; shared nodes count
    /// once.
    pub fn count_nodes(&self, root: NodeRef) -> usize {
        self.topo_reachable(root).len()
    }

    /// Set of variables labeling reachable leaves.
    pub fn support(&self, root: NodeRef) -> BTreeSet<VarId> {
        let mut vars = BTreeSet::new();
        for r in self.topo_reachable(root) {
            if let Node::Var { var, .. } = self.node(r) {
                vars.insert(*var);
            }
        }
        vars
    }

    /// Evaluate the circuit under a total assignment on its support.
    pub fn evaluate(&self, root: NodeRef, a: &Assignment) -> Result<bool, CircuitError> {
        let order = self.topo_reachable(root);
        let mut values: HashMap<NodeRef, bool> = HashMap::with_capacity(order.len());
        for r in order {
            let v = match self.node(r) {
                Node::Const(b) => *b,
                Node::Var { var, negated } => {
                    let b = a.get(*var).ok_or_else(|| {
                        CircuitError::MissingVariable(self.var_name(*var).to_string())
                    })?;
                    b ^ negated
                }
                Node::And(ch) => ch.iter().all(|c| values[c]),
                Node::Or(ch) => ch.iter().any(|c| values[c]),
            };
            values.insert(r, v);
        }
        Ok(values[&root])
    }

    /// Cofactor: the circuit with `var` fixed to `value`, constants
    /// propagated. Returns `root` unchanged if `var` does not occur.
    pub fn cofactor(&mut self, root: NodeRef, var: VarId, value: bool) -> NodeRef {
        let constant = self.constant(value);
        let mut map = BTreeMap::new();
        map.insert(var, constant);
        self.substitute(root, &map)
    }

    /// Simultaneous substitution of circuits for variables. Replacement
    /// circuits are spliced in as-is and never re-traversed, so bindings
    /// never see each other.
    pub fn substitute(&mut self, root: NodeRef, bindings: &BTreeMap<VarId, NodeRef>) -> NodeRef {
        if bindings.is_empty() {
            return root;
        }
        let order = self.topo_reachable(root);
        let mut map: HashMap<NodeRef, NodeRef> = HashMap::with_capacity(order.len());
        for r in order {
            let new = match self.node(r).clone() {
                Node::Const(_) => r,
                Node::Var { var, negated } => match bindings.get(&var) {
                    Some(&target) => {
                        if negated {
                            self.not(target)
                        } else {
                            target
                        }
                    }
                    None => r,
                },
                Node::And(ch) => {
                    let mapped: Vec<NodeRef> = ch.iter().map(|c| map[c]).collect();
                    self.and(mapped)
                }
                Node::Or(ch) => {
                    let mapped: Vec<NodeRef> = ch.iter().map(|c| map[c]).collect();
                    self.or(mapped)
                }
            };
            map.insert(r, new);
        }
        map[&root]
    }

    /// For each queried variable, the number of DAG nodes (in the circuit
    /// rooted at `root`) whose transitive fan-in contains that variable;
    /// a leaf counts itself.
    pub fn transitive_fanin_counts(
        &self,
        root: NodeRef,
        vars: &[VarId],
    ) -> BTreeMap<VarId, usize> {
        let order = self.topo_reachable(root);
        let var_slot: HashMap<VarId, usize> =
            vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let words = vars.len().div_ceil(64);
        // One bitset row per reachable node, in topo order.
        let mut rows: HashMap<NodeRef, Vec<u64>> = HashMap::with_capacity(order.len());
        let mut counts = vec![0usize; vars.len()];
        for r in &order {
            let mut row = vec![0u64; words];
            match self.node(*r) {
                Node::Const(_) => {}
                Node::Var { var, .. } => {
                    if let Some(&slot) = var_slot.get(var) {
                        row[slot / 64] |= 1u64 << (slot % 64);
                    }
                }
                Node::And(ch) | Node::Or(ch) => {
                    for c in ch.iter() {
                        for (w, src) in row.iter_mut().zip(&rows[c]) {
                            *w |= *src;
                        }
                    }
                }
            }
            for (slot, count) in counts.iter_mut().enumerate() {
                if row[slot / 64] >> (slot % 64) & 1 == 1 {
                    *count += 1;
                }
            }
            rows.insert(*r, row);
        }
        vars.iter()
            .enumerate()
            .map(|(i, v)| (*v, counts[i]))
            .collect()
    }

    /// Render as a nested formula string, for diagnostics only.
    pub fn display(&self, root: NodeRef) -> String {
        let mut out = String::new();
        self.fmt_node(root, &mut out);
        out
    }

    fn fmt_node(&self, r: NodeRef, out: &mut String) {
        match self.node(r) {
            Node::Const(b) => out.push_str(if *b { "1" } else { "0" }),
            Node::Var { var, negated } => {
                if *negated {
                    out.push('!');
                }
                out.push_str(self.var_name(*var));
            }
            Node::And(ch) => {
                out.push('(');
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" & ");
                    }
                    self.fmt_node(*c, out);
                }
                out.push(')');
            }
            Node::Or(ch) => {
                out.push('(');
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    self.fmt_node(*c, out);
                }
                out.push(')');
            }
        }
    }
}

/// A relational specification: a circuit F over outputs X and inputs Y.
#[derive(Debug, Clone)]
pub struct Spec {
    pub dag: Dag,
    pub root: NodeRef,
    /// Output variables x_1..x_n, in declaration order.
    pub outputs: Vec<VarId>,
    /// Input variables y_1..y_m, in declaration order.
    pub inputs: Vec<VarId>,
}

impl Spec {
    /// X and Y must be disjoint and jointly cover the circuit support.
    pub fn new(dag: Dag, root: NodeRef, outputs: Vec<VarId>, inputs: Vec<VarId>) -> Self {
        let xs: BTreeSet<VarId> = outputs.iter().copied().collect();
        let ys: BTreeSet<VarId> = inputs.iter().copied().collect();
        assert!(xs.is_disjoint(&ys), "outputs and inputs must be disjoint");
        let support = dag.support(root);
        assert!(
            support.iter().all(|v| xs.contains(v) || ys.contains(v)),
            "circuit support must be covered by the declared X and Y"
        );
        Spec {
            dag,
            root,
            outputs,
            inputs,
        }
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }
}
