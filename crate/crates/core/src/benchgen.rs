//! Benchmark generators with known ground truth: the clique-reduction
//! family (the specification holds exactly when the encoded graph has a
//! clique of the encoded size) and the equality family X = Y.

use std::fmt::Write as _;

use crate::circuit::{Dag, NodeRef, Spec, VarId};

/// The clique specification together with its variable blocks.
#[derive(Debug)]
pub struct CliqueSpec {
    pub spec: Spec,
    pub n: usize,
    /// (i, j, var) for 1 <= i < j <= n, in lexicographic order.
    pub edge_vars: Vec<(usize, usize, VarId)>,
    /// Binary encoding of k, least significant bit first.
    pub z_vars: Vec<VarId>,
    pub vertex_vars: Vec<VarId>,
    /// Sub-circuit roots, for size measurements.
    pub edges_ok: NodeRef,
    pub size_ok: NodeRef,
}

fn bits_for(n: usize) -> usize {
    // Width of the vertex counter: enough to represent n.
    (usize::BITS - n.leading_zeros()) as usize
}

/// Ripple-carry sum of two little-endian bit vectors.
fn add_bits(dag: &mut Dag, a: &[NodeRef], b: &[NodeRef]) -> Vec<NodeRef> {
    let zero = dag.constant(false);
    let width = a.len().max(b.len()) + 1;
    let mut out = Vec::with_capacity(width);
    let mut carry = zero;
    for i in 0..width {
        let x = a.get(i).copied().unwrap_or(zero);
        let y = b.get(i).copied().unwrap_or(zero);
        let xy = dag.xor(x, y);
        let sum = dag.xor(xy, carry);
        let and_xy = dag.and([x, y]);
        let and_c = dag.and([carry, xy]);
        carry = dag.or([and_xy, and_c]);
        out.push(sum);
    }
    out
}

/// Tree of binary adders summing unit bits; total size linear in the count.
fn sum_units(dag: &mut Dag, units: &[NodeRef]) -> Vec<NodeRef> {
    match units.len() {
        0 => vec![dag.constant(false)],
        1 => vec![units[0]],
        _ => {
            let mid = units.len() / 2;
            let left = sum_units(dag, &units[..mid]);
            let right = sum_units(dag, &units[mid..]);
            add_bits(dag, &left, &right)
        }
    }
}

/// Build the clique-reduction specification for `n` vertices. Inputs are
/// the edge indicators and the bits of k; outputs select the clique
/// vertices. A value of k larger than n simply makes the size check
/// unsatisfiable.
pub fn gen_clique_spec(n: usize) -> CliqueSpec {
    assert!(n >= 2, "clique reduction needs at least two vertices");
    let mut dag = Dag::new();
    let mut vertex_vars = Vec::with_capacity(n);
    for v in 1..=n {
        vertex_vars.push(dag.var_by_name(&format!("x{v}")));
    }
    let mut edge_vars = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let var = dag.var_by_name(&format!("e_{i}_{j}"));
            edge_vars.push((i, j, var));
        }
    }
    let m = bits_for(n);
    let mut z_vars = Vec::with_capacity(m);
    for b in 0..m {
        z_vars.push(dag.var_by_name(&format!("z{b}")));
    }

    // Edge block: selected endpoints must be connected.
    let mut edge_checks = Vec::with_capacity(edge_vars.len());
    for (i, j, e) in &edge_vars {
        let ni = dag.neg_var(vertex_vars[*i - 1]);
        let nj = dag.neg_var(vertex_vars[*j - 1]);
        let ve = dag.var(*e);
        edge_checks.push(dag.or([ni, nj, ve]));
    }
    let edges_ok = dag.and(edge_checks);

    // Size block: the vertex count must equal k.
    let units: Vec<NodeRef> = vertex_vars.iter().map(|v| dag.var(*v)).collect();
    let sum = sum_units(&mut dag, &units);
    let zero = dag.constant(false);
    let width = sum.len().max(m);
    let mut eq_bits = Vec::with_capacity(width);
    for b in 0..width {
        let s = sum.get(b).copied().unwrap_or(zero);
        let z = z_vars
            .get(b)
            .map(|v| dag.var(*v))
            .unwrap_or(zero);
        eq_bits.push(dag.iff(s, z));
    }
    let size_ok = dag.and(eq_bits);

    let root = dag.and([edges_ok, size_ok]);
    let inputs: Vec<VarId> = edge_vars
        .iter()
        .map(|(_, _, v)| *v)
        .chain(z_vars.iter().copied())
        .collect();
    let spec = Spec::new(dag, root, vertex_vars.clone(), inputs);
    CliqueSpec {
        spec,
        n,
        edge_vars,
        z_vars,
        vertex_vars,
        edges_ok,
        size_ok,
    }
}

/// The equality family: F = AND_i ((x_i and y_i) or (!x_i and !y_i)).
/// `n = 0` yields the constant-true specification with no outputs.
pub fn gen_equality_spec(n: usize) -> Spec {
    let mut dag = Dag::new();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut conjuncts = Vec::with_capacity(n);
    for i in 1..=n {
        let x = dag.var_by_name(&format!("x{i}"));
        let y = dag.var_by_name(&format!("y{i}"));
        xs.push(x);
        ys.push(y);
        let vx = dag.var(x);
        let vy = dag.var(y);
        let nx = dag.neg_var(x);
        let ny = dag.neg_var(y);
        let pos = dag.and([vx, vy]);
        let neg = dag.and([nx, ny]);
        conjuncts.push(dag.or([pos, neg]));
    }
    let root = dag.and(conjuncts);
    Spec::new(dag, root, xs, ys)
}

/// Combinatorial clique check, independent of any circuit machinery:
/// does the graph on vertices 1..=n given by the edge flags (lexicographic
/// pair order) contain a clique of size k? The empty set is a 0-clique.
pub fn has_clique(n: usize, edge_present: &[bool], k: u64) -> bool {
    if k == 0 {
        return true;
    }
    if k as usize > n {
        return false;
    }
    let pair_index = |i: usize, j: usize| -> usize {
        // i < j, both 1-based, pairs in lexicographic order.
        (i - 1) * n - (i - 1) * i / 2 + (j - i - 1)
    };
    (0u32..1 << n).any(|mask| {
        if u64::from(mask.count_ones()) != k {
            return false;
        }
        let verts: Vec<usize> = (1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect();
        verts.iter().enumerate().all(|(a, &i)| {
            verts[a + 1..]
                .iter()
                .all(|&j| edge_present[pair_index(i, j)])
        })
    })
}

/// One ground-truth row: an input assignment and whether a clique of the
/// encoded size exists, computed combinatorially.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthRow {
    pub edge_bits: Vec<bool>,
    pub k: u64,
    pub clique_exists: bool,
}

/// Ground truth over all input assignments (edge patterns times k values),
/// capped at `max_rows`.
pub fn clique_ground_truth(inst: &CliqueSpec, max_rows: usize) -> Vec<GroundTruthRow> {
    let e = inst.edge_vars.len();
    let m = inst.z_vars.len();
    let mut rows = Vec::new();
    'outer: for edges in 0u64..1 << e {
        let edge_bits: Vec<bool> = (0..e).map(|i| edges >> i & 1 == 1).collect();
        for k in 0u64..1 << m {
            if rows.len() >= max_rows {
                break 'outer;
            }
            rows.push(GroundTruthRow {
                clique_exists: has_clique(inst.n, &edge_bits, k),
                edge_bits: edge_bits.clone(),
                k,
            });
        }
    }
    rows
}

/// Sidecar serialization: one `edges=... k=... clique=...` line per row.
pub fn ground_truth_text(rows: &[GroundTruthRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let bits: String = row
            .edge_bits
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect();
        let _ = writeln!(
            out,
            "edges={} k={} clique={}",
            bits,
            row.k,
            row.clique_exists as u8
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Assignment;

    fn exists_x(spec: &Spec, y: &Assignment) -> bool {
        let n = spec.outputs.len();
        (0u64..1 << n).any(|bits| {
            let mut asg = y.clone();
            for (i, x) in spec.outputs.iter().enumerate() {
                asg.set(*x, bits >> i & 1 == 1);
            }
            spec.dag.evaluate(spec.root, &asg).unwrap()
        })
    }

    fn clique_inputs(inst: &CliqueSpec, edges: u64, k: u64) -> Assignment {
        let mut asg = Assignment::new();
        for (i, (_, _, v)) in inst.edge_vars.iter().enumerate() {
            asg.set(*v, edges >> i & 1 == 1);
        }
        for (b, z) in inst.z_vars.iter().enumerate() {
            asg.set(*z, k >> b & 1 == 1);
        }
        asg
    }

    #[test]
    fn triangle_with_k3_has_witness() {
        let inst = gen_clique_spec(3);
        // All three edges present, k = 3.
        let y = clique_inputs(&inst, 0b111, 3);
        assert!(exists_x(&inst.spec, &y));
        // The all-ones vertex selection is the witness.
        let mut asg = y.clone();
        for x in &inst.vertex_vars {
            asg.set(*x, true);
        }
        assert!(inst.spec.dag.evaluate(inst.spec.root, &asg).unwrap());
    }

    #[test]
    fn path_graph_has_no_triangle() {
        let inst = gen_clique_spec(3);
        // Edges 1-2 and 2-3 only (pair order: (1,2), (1,3), (2,3)).
        let y = clique_inputs(&inst, 0b101, 3);
        assert!(!exists_x(&inst.spec, &y));
    }

    #[test]
    fn single_vertex_clique_always_exists() {
        let inst = gen_clique_spec(3);
        for edges in 0u64..8 {
            let y = clique_inputs(&inst, edges, 1);
            assert!(exists_x(&inst.spec, &y));
        }
    }

    #[test]
    fn oversized_k_is_unsatisfiable() {
        let inst = gen_clique_spec(2);
        // k = 3 > n = 2; z has 2 bits so 3 is representable.
        let y = clique_inputs(&inst, 0b1, 3);
        assert!(!exists_x(&inst.spec, &y));
    }

    #[test]
    fn ground_truth_matches_brute_force() {
        let inst = gen_clique_spec(3);
        let rows = clique_ground_truth(&inst, usize::MAX);
        assert_eq!(rows.len(), 1 << (inst.edge_vars.len() + inst.z_vars.len()));
        for row in &rows {
            let edges = row
                .edge_bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, b)| acc | ((*b as u64) << i));
            let y = clique_inputs(&inst, edges, row.k);
            assert_eq!(exists_x(&inst.spec, &y), row.clique_exists);
        }
    }

    #[test]
    fn sidecar_format() {
        let inst = gen_clique_spec(2);
        let rows = clique_ground_truth(&inst, 3);
        let text = ground_truth_text(&rows);
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("edges="));
        assert!(text.contains(" k="));
        assert!(text.contains(" clique="));
    }

    #[test]
    fn block_sizes_scale_as_stated() {
        // Edge block quadratic, size block linear (generous constants).
        for n in [2usize, 4, 6, 8] {
            let inst = gen_clique_spec(n);
            let edge_nodes = inst.spec.dag.count_nodes(inst.edges_ok);
            let size_nodes = inst.spec.dag.count_nodes(inst.size_ok);
            assert!(
                edge_nodes <= 4 * n * n + 8,
                "edge block {edge_nodes} nodes at n={n}"
            );
            assert!(
                size_nodes <= 60 * n + 40,
                "size block {size_nodes} nodes at n={n}"
            );
        }
    }

    #[test]
    fn equality_spec_shape() {
        let spec = gen_equality_spec(1);
        // (x1 & y1) | (!x1 & !y1)
        let x1 = spec.outputs[0];
        let y1 = spec.inputs[0];
        for bits in 0..4u32 {
            let asg = Assignment::from_pairs([(x1, bits & 1 != 0), (y1, bits & 2 != 0)]);
            let want = (bits & 1 != 0) == (bits & 2 != 0);
            assert_eq!(spec.dag.evaluate(spec.root, &asg).unwrap(), want);
        }

        let empty = gen_equality_spec(0);
        assert!(empty.outputs.is_empty());
        assert!(empty
            .dag
            .evaluate(empty.root, &Assignment::new())
            .unwrap());
    }

    #[test]
    fn equality_point_checks() {
        // n = 2 at x = (1, 0), y = (1, 0): both conjuncts hold.
        let spec = gen_equality_spec(2);
        let asg = Assignment::from_pairs([
            (spec.outputs[0], true),
            (spec.outputs[1], false),
            (spec.inputs[0], true),
            (spec.inputs[1], false),
        ]);
        assert!(spec.dag.evaluate(spec.root, &asg).unwrap());

        // Cofactor at x1 = 0 of the n = 1 circuit simplifies to !y1.
        let mut spec = gen_equality_spec(1);
        let root = spec.root;
        let cof = spec.dag.cofactor(root, spec.outputs[0], false);
        let ny = spec.dag.neg_var(spec.inputs[0]);
        assert_eq!(cof, ny);
    }

    #[test]
    fn has_clique_basics() {
        // Triangle on 3 vertices.
        assert!(has_clique(3, &[true, true, true], 3));
        assert!(!has_clique(3, &[true, false, true], 3));
        assert!(has_clique(3, &[false, false, false], 1));
        assert!(has_clique(3, &[false, false, false], 0));
        assert!(!has_clique(3, &[true, true, true], 4));
    }
}
