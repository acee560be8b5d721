//! NNF utilities: the output-renaming transform, literal-set computation,
//! pure-literal classification and the weak-decomposability check.
//!
//! Circuits built through [`Dag`] keep negation at the leaves, so every
//! stored circuit is already in NNF; [`to_nnf`] exists as the explicit
//! normalization point of the pipeline. The renaming transform replaces
//! every negative occurrence of an output variable x_i with a fresh
//! positive variable, making the result positive unate in both the
//! originals and their replacements.

use std::collections::{BTreeMap, HashMap};

use crate::circuit::{Dag, Node, NodeRef, VarId};

/// An NNF circuit in renamed ("hat") form: no leaf carries a negated
/// output variable; each such leaf was replaced by a fresh bar variable.
#[derive(Debug, Clone)]
pub struct HatCircuit {
    /// The renamed circuit over (X, X-bar, Y).
    pub root: NodeRef,
    /// The plain NNF circuit over (X, Y) the transform started from.
    pub plain: NodeRef,
    /// x_i -> fresh bar variable standing for the negation of x_i.
    pub bar_of: BTreeMap<VarId, VarId>,
    /// Inverse of `bar_of`.
    pub origin_of: BTreeMap<VarId, VarId>,
}

impl HatCircuit {
    /// Substitution map sending every bar variable back to the negation of
    /// its original, i.e. the circuit F-hat(X, not X, Y).
    pub fn unbar_bindings(&self, dag: &mut Dag) -> BTreeMap<VarId, NodeRef> {
        self.bar_of
            .iter()
            .map(|(x, bar)| (*bar, dag.neg_var(*x)))
            .collect()
    }
}

/// Normalize a circuit to NNF. Construction through [`Dag`] already pushes
/// negation to the leaves, so this is the identity; it marks the spot where
/// a representation with free-standing negation would be rewritten.
pub fn to_nnf(_dag: &Dag, root: NodeRef) -> NodeRef {
    root
}

/// Replace every occurrence of a negated output leaf `!x_i` with a fresh
/// positive variable. Bar variables are allocated for all outputs, used or
/// not, so downstream substitutions can bind them uniformly.
pub fn hat_transform(dag: &mut Dag, root: NodeRef, outputs: &[VarId]) -> HatCircuit {
    let mut bar_of = BTreeMap::new();
    let mut origin_of = BTreeMap::new();
    for &x in outputs {
        let hint = format!("{}_bar", dag.var_name(x));
        let bar = dag.fresh_var(&hint);
        bar_of.insert(x, bar);
        origin_of.insert(bar, x);
    }
    let order = dag.topo_reachable(root);
    let mut map: HashMap<NodeRef, NodeRef> = HashMap::with_capacity(order.len());
    for r in order {
        let new = match dag.node(r).clone() {
            Node::Var { var, negated: true } if bar_of.contains_key(&var) => {
                dag.var(bar_of[&var])
            }
            Node::Var { .. } | Node::Const(_) => r,
            Node::And(ch) => {
                let mapped: Vec<NodeRef> = ch.iter().map(|c| map[c]).collect();
                dag.and(mapped)
            }
            Node::Or(ch) => {
                let mapped: Vec<NodeRef> = ch.iter().map(|c| map[c]).collect();
                dag.or(mapped)
            }
        };
        map.insert(r, new);
    }
    HatCircuit {
        root: map[&root],
        plain: root,
        bar_of,
        origin_of,
    }
}

/// Polarity profile of a variable among the leaves of an NNF circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purity {
    PosPure,
    NegPure,
    Mixed,
    Absent,
}

/// Classify each queried variable by scanning reachable leaves. Bar leaves
/// listed in `bar_origin` count as negative occurrences of their original.
pub fn occurrences(
    dag: &Dag,
    root: NodeRef,
    vars: &[VarId],
    bar_origin: &BTreeMap<VarId, VarId>,
) -> BTreeMap<VarId, Purity> {
    let mut pos: BTreeMap<VarId, bool> = BTreeMap::new();
    let mut neg: BTreeMap<VarId, bool> = BTreeMap::new();
    for r in dag.topo_reachable(root) {
        if let Node::Var { var, negated } = dag.node(r) {
            let (v, n) = match bar_origin.get(var) {
                Some(orig) => (*orig, !negated),
                None => (*var, *negated),
            };
            if n {
                neg.insert(v, true);
            } else {
                pos.insert(v, true);
            }
        }
    }
    vars.iter()
        .map(|v| {
            let p = pos.contains_key(v);
            let n = neg.contains_key(v);
            let purity = match (p, n) {
                (true, true) => Purity::Mixed,
                (true, false) => Purity::PosPure,
                (false, true) => Purity::NegPure,
                (false, false) => Purity::Absent,
            };
            (*v, purity)
        })
        .collect()
}

/// Pure-literal classification on a plain NNF circuit.
pub fn pure_literals(dag: &Dag, root: NodeRef, vars: &[VarId]) -> BTreeMap<VarId, Purity> {
    occurrences(dag, root, vars, &BTreeMap::new())
}

/// A violation of weak decomposability: at the given AND node, the literal
/// occurs under child `child_pos` and its complement under child `child_neg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WdnnfWitness {
    pub and_node: NodeRef,
    pub var: VarId,
    /// Polarity of the literal found under `child_pos` (false = positive).
    pub negated: bool,
    pub child_pos: usize,
    pub child_neg: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WdnnfVerdict {
    Pass,
    Fail(WdnnfWitness),
}

impl WdnnfVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, WdnnfVerdict::Pass)
    }
}

/// Check weak decomposability: no AND node may reach a literal under one
/// child and its complement under another. Bar variables from `bar_origin`
/// are read as the negation of their original, so the check applies to
/// F-hat(X, not X, Y). Constant circuits pass vacuously.
pub fn check_wdnnf(
    dag: &Dag,
    root: NodeRef,
    bar_origin: &BTreeMap<VarId, VarId>,
) -> WdnnfVerdict {
    let order = dag.topo_reachable(root);
    // Canonical variable slots: bar variables share the slot of their origin.
    let mut slot_of: BTreeMap<VarId, usize> = BTreeMap::new();
    let mut slot_vars: Vec<VarId> = Vec::new();
    for &r in &order {
        if let Node::Var { var, .. } = dag.node(r) {
            let v = bar_origin.get(var).copied().unwrap_or(*var);
            slot_of.entry(v).or_insert_with(|| {
                slot_vars.push(v);
                slot_vars.len() - 1
            });
        }
    }
    let words = slot_vars.len().div_ceil(64);
    // Per node: bitset of positive literals, bitset of negative literals.
    let mut rows: HashMap<NodeRef, (Vec<u64>, Vec<u64>)> = HashMap::with_capacity(order.len());
    for &r in &order {
        let mut pos = vec![0u64; words];
        let mut neg = vec![0u64; words];
        match dag.node(r) {
            Node::Const(_) => {}
            Node::Var { var, negated } => {
                let (v, n) = match bar_origin.get(var) {
                    Some(orig) => (*orig, !negated),
                    None => (*var, *negated),
                };
                let slot = slot_of[&v];
                let bits = if n { &mut neg } else { &mut pos };
                bits[slot / 64] |= 1u64 << (slot % 64);
            }
            Node::And(ch) | Node::Or(ch) => {
                let is_and = matches!(dag.node(r), Node::And(_));
                let mut acc_pos = vec![0u64; words];
                let mut acc_neg = vec![0u64; words];
                for (j, c) in ch.iter().enumerate() {
                    let (cp, cn) = &rows[c];
                    if is_and {
                        // literal positive under an earlier child, negative here?
                        if let Some(slot) = first_common_bit(&acc_pos, cn) {
                            let i = find_child_with(dag, ch, &rows, slot, false, j);
                            return WdnnfVerdict::Fail(WdnnfWitness {
                                and_node: r,
                                var: slot_vars[slot],
                                negated: false,
                                child_pos: i,
                                child_neg: j,
                            });
                        }
                        if let Some(slot) = first_common_bit(&acc_neg, cp) {
                            let i = find_child_with(dag, ch, &rows, slot, true, j);
                            return WdnnfVerdict::Fail(WdnnfWitness {
                                and_node: r,
                                var: slot_vars[slot],
                                negated: true,
                                child_pos: i,
                                child_neg: j,
                            });
                        }
                    }
                    for (a, b) in acc_pos.iter_mut().zip(cp) {
                        *a |= *b;
                    }
                    for (a, b) in acc_neg.iter_mut().zip(cn) {
                        *a |= *b;
                    }
                }
                pos = acc_pos;
                neg = acc_neg;
            }
        }
        rows.insert(r, (pos, neg));
    }
    WdnnfVerdict::Pass
}

fn first_common_bit(a: &[u64], b: &[u64]) -> Option<usize> {
    for (w, (x, y)) in a.iter().zip(b).enumerate() {
        let common = x & y;
        if common != 0 {
            return Some(w * 64 + common.trailing_zeros() as usize);
        }
    }
    None
}

/// Index of the first child before `before` whose literal set contains the
/// literal at `slot` with polarity `negated`.
fn find_child_with(
    _dag: &Dag,
    children: &[NodeRef],
    rows: &HashMap<NodeRef, (Vec<u64>, Vec<u64>)>,
    slot: usize,
    negated: bool,
    before: usize,
) -> usize {
    for (i, c) in children.iter().enumerate().take(before) {
        let (pos, neg) = &rows[c];
        let bits = if negated { neg } else { pos };
        if bits[slot / 64] >> (slot % 64) & 1 == 1 {
            return i;
        }
    }
    unreachable!("accumulated literal set must come from an earlier child")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Assignment;

    #[test]
    fn not_of_and_is_demorgan_nnf() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let a = dag.var(x1);
        let b = dag.var(y1);
        let and = dag.and([a, b]);
        let neg = dag.not(and);
        let nx = dag.neg_var(x1);
        let ny = dag.neg_var(y1);
        let expected = dag.or([nx, ny]);
        assert_eq!(to_nnf(&dag, neg), expected);
    }

    #[test]
    fn double_negation_cancels() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let leaf = dag.var(x1);
        let nn = dag.not(leaf);
        assert_eq!(dag.not(nn), leaf);
    }

    /// Worked transform: (x1 | !(x2 | y1)) | !(x2 | !(y2 & !y1)).
    fn worked_example(dag: &mut Dag) -> (NodeRef, Vec<VarId>) {
        let x1 = dag.var_by_name("x1");
        let x2 = dag.var_by_name("x2");
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let vx1 = dag.var(x1);
        let vx2 = dag.var(x2);
        let vy1 = dag.var(y1);
        let vy2 = dag.var(y2);
        let ny1 = dag.not(vy1);
        let inner = dag.and([vy2, ny1]);
        let not_inner = dag.not(inner);
        let right_arg = dag.or([vx2, not_inner]);
        let right = dag.not(right_arg);
        let left_arg = dag.or([vx2, vy1]);
        let not_left_arg = dag.not(left_arg);
        let left = dag.or([vx1, not_left_arg]);
        let root = dag.or([left, right]);
        (root, vec![x1, x2])
    }

    #[test]
    fn worked_example_nnf_semantics() {
        let mut dag = Dag::new();
        let (root, _) = worked_example(&mut dag);
        // Expected NNF: (x1 | (!x2 & !y1)) | (!x2 & y2 & !y1)
        let x1 = dag.lookup_var("x1").unwrap();
        let x2 = dag.lookup_var("x2").unwrap();
        let y1 = dag.lookup_var("y1").unwrap();
        let y2 = dag.lookup_var("y2").unwrap();
        let vx1 = dag.var(x1);
        let nx2 = dag.neg_var(x2);
        let ny1 = dag.neg_var(y1);
        let vy2 = dag.var(y2);
        let l = dag.and([nx2, ny1]);
        let lhs = dag.or([vx1, l]);
        let r = dag.and([nx2, vy2, ny1]);
        let expected = dag.or([lhs, r]);
        for bits in 0..16u32 {
            let asg = Assignment::from_pairs([
                (x1, bits & 1 != 0),
                (x2, bits & 2 != 0),
                (y1, bits & 4 != 0),
                (y2, bits & 8 != 0),
            ]);
            assert_eq!(
                dag.evaluate(root, &asg).unwrap(),
                dag.evaluate(expected, &asg).unwrap()
            );
        }
    }

    #[test]
    fn hat_transform_renames_negative_outputs() {
        let mut dag = Dag::new();
        let (root, outputs) = worked_example(&mut dag);
        let hat = hat_transform(&mut dag, root, &outputs);
        // No leaf of the hat circuit may be a negated output.
        for r in dag.topo_reachable(hat.root) {
            if let Node::Var { var, negated } = dag.node(r) {
                if outputs.contains(var) {
                    assert!(!negated, "negated output leaf survived the transform");
                }
            }
        }
        // The renamed form is (x1 | (x2_bar & !y1)) | (x2_bar & y2 & !y1):
        // same truth table over (x1, x2_bar, y1, y2), x1's bar unused.
        {
            let x1 = dag.lookup_var("x1").unwrap();
            let x2b = hat.bar_of[&dag.lookup_var("x2").unwrap()];
            let y1 = dag.lookup_var("y1").unwrap();
            let y2 = dag.lookup_var("y2").unwrap();
            let vx1 = dag.var(x1);
            let vx2b = dag.var(x2b);
            let ny1 = dag.neg_var(y1);
            let vy2 = dag.var(y2);
            let l = dag.and([vx2b, ny1]);
            let lhs = dag.or([vx1, l]);
            let r = dag.and([vx2b, vy2, ny1]);
            let expected = dag.or([lhs, r]);
            let vars = [x1, x2b, y1, y2];
            for bits in 0..16u32 {
                let asg = Assignment::from_pairs(
                    vars.iter()
                        .enumerate()
                        .map(|(i, v)| (*v, bits >> i & 1 != 0)),
                );
                assert_eq!(
                    dag.evaluate(hat.root, &asg).unwrap(),
                    dag.evaluate(expected, &asg).unwrap()
                );
            }
        }
        // Substituting !x_i back for each bar yields the original function.
        let bind = hat.unbar_bindings(&mut dag);
        let back = dag.substitute(hat.root, &bind);
        let y1 = dag.lookup_var("y1").unwrap();
        let y2 = dag.lookup_var("y2").unwrap();
        let vars = [outputs[0], outputs[1], y1, y2];
        for bits in 0..16u32 {
            let asg = Assignment::from_pairs(
                vars.iter()
                    .enumerate()
                    .map(|(i, v)| (*v, bits >> i & 1 != 0)),
            );
            assert_eq!(
                dag.evaluate(back, &asg).unwrap(),
                dag.evaluate(root, &asg).unwrap()
            );
        }
    }

    #[test]
    fn hat_transform_no_negations_is_identity() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let leaf = dag.var(x1);
        let hat = hat_transform(&mut dag, leaf, &[x1]);
        assert_eq!(hat.root, leaf);
        let bar = hat.bar_of[&x1];
        let occ = occurrences(&dag, hat.root, &[x1], &hat.origin_of);
        assert_eq!(occ[&x1], Purity::PosPure);
        assert!(dag.support(hat.root).iter().all(|v| *v != bar));
    }

    #[test]
    fn purity_classification() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let vx = dag.var(x1);
        let vy = dag.var(y1);
        let root = dag.or([vx, vy]);
        assert_eq!(pure_literals(&dag, root, &[x1])[&x1], Purity::PosPure);

        let nx = dag.neg_var(x1);
        let vy2 = dag.var(y2);
        let c1 = dag.or([vx, vy]);
        let c2 = dag.or([nx, vy2]);
        let root = dag.and([c1, c2]);
        assert_eq!(pure_literals(&dag, root, &[x1])[&x1], Purity::Mixed);

        let root = dag.and([vy, vy2]);
        assert_eq!(pure_literals(&dag, root, &[x1])[&x1], Purity::Absent);
    }

    #[test]
    fn wdnnf_pass_and_fail() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let x1b = dag.var_by_name("x1_bar");
        let y1 = dag.var_by_name("y1");
        let bar_origin: BTreeMap<VarId, VarId> = [(x1b, x1)].into();

        let vx = dag.var(x1);
        let vxb = dag.var(x1b);
        let vy = dag.var(y1);
        let ny = dag.neg_var(y1);

        // (x1 & y1) | (x1_bar & !y1): each AND has polarity-disjoint children.
        let a = dag.and([vx, vy]);
        let b = dag.and([vxb, ny]);
        let pass = dag.or([a, b]);
        assert!(check_wdnnf(&dag, pass, &bar_origin).is_pass());

        // (x1 | y1) & (x1_bar | !y1): the root AND sees y1 and !y1 (and x1
        // against its bar).
        let c = dag.or([vx, vy]);
        let d = dag.or([vxb, ny]);
        let fail = dag.and([c, d]);
        match check_wdnnf(&dag, fail, &bar_origin) {
            WdnnfVerdict::Fail(w) => {
                assert_eq!(w.and_node, fail);
                assert!(w.var == x1 || w.var == y1);
                assert_ne!(w.child_pos, w.child_neg);
            }
            WdnnfVerdict::Pass => panic!("expected a wDNNF violation"),
        }
    }

    #[test]
    fn wdnnf_constant_passes_vacuously() {
        let mut dag = Dag::new();
        let root = dag.constant(false);
        assert!(check_wdnnf(&dag, root, &BTreeMap::new()).is_pass());
    }

    #[test]
    fn wdnnf_witness_is_sound() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let vx = dag.var(x1);
        let nx = dag.neg_var(x1);
        let vy = dag.var(y1);
        let vy2 = dag.var(y2);
        let left = dag.or([vx, vy]);
        let right = dag.or([nx, vy2]);
        let root = dag.and([left, right]);
        match check_wdnnf(&dag, root, &BTreeMap::new()) {
            WdnnfVerdict::Fail(w) => {
                // Recompute leaf sets of the named children and confirm the
                // reported literal really occurs with both polarities.
                let children = dag.node(w.and_node).children().to_vec();
                let under = |r: NodeRef, neg: bool| -> bool {
                    dag.topo_reachable(r).iter().any(|n| {
                        matches!(dag.node(*n), Node::Var { var, negated }
                            if *var == w.var && *negated == neg)
                    })
                };
                assert!(under(children[w.child_pos], w.negated));
                assert!(under(children[w.child_neg], !w.negated));
            }
            WdnnfVerdict::Pass => panic!("expected a violation"),
        }
    }
}
