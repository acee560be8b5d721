//! Exhaustive reference oracles for the synthesis engine's test suites:
//! truth tables with quantification, a brute-force Skolem verifier, and
//! seeded random specification generators. Everything here enumerates;
//! nothing routes through the SAT oracle or the candidate machinery it is
//! used to check.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bfsynth_core::circuit::{Assignment, Dag, Node, NodeRef, Spec, VarId};

/// Dense truth table over an ordered variable list; `vars[0]` is the least
/// significant bit of the row index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub vars: Vec<VarId>,
    pub values: Vec<bool>,
}

const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Evaluate 64 assignments at a time with bitwise node operations.
pub fn truth_table(dag: &Dag, root: NodeRef, vars: &[VarId]) -> TruthTable {
    let v = vars.len();
    assert!(v <= 24, "truth tables are for desk-scale enumeration");
    let rows = 1usize << v;
    let blocks = rows.div_ceil(64);
    let order = dag.topo_reachable(root);
    let slot: BTreeMap<NodeRef, usize> =
        order.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let var_pos: BTreeMap<VarId, usize> =
        vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut rows_of: Vec<Vec<u64>> = vec![Vec::new(); order.len()];
    for (i, r) in order.iter().enumerate() {
        let row: Vec<u64> = match dag.node(*r) {
            Node::Const(b) => vec![if *b { u64::MAX } else { 0 }; blocks],
            Node::Var { var, negated } => {
                let pos = *var_pos
                    .get(var)
                    .expect("truth table variable list must cover the support");
                (0..blocks)
                    .map(|b| {
                        let base = if pos < 6 {
                            LOW_PATTERNS[pos]
                        } else if b >> (pos - 6) & 1 == 1 {
                            u64::MAX
                        } else {
                            0
                        };
                        if *negated {
                            !base
                        } else {
                            base
                        }
                    })
                    .collect()
            }
            Node::And(ch) => {
                let mut acc = vec![u64::MAX; blocks];
                for c in ch.iter() {
                    for (a, b) in acc.iter_mut().zip(&rows_of[slot[c]]) {
                        *a &= *b;
                    }
                }
                acc
            }
            Node::Or(ch) => {
                let mut acc = vec![0u64; blocks];
                for c in ch.iter() {
                    for (a, b) in acc.iter_mut().zip(&rows_of[slot[c]]) {
                        *a |= *b;
                    }
                }
                acc
            }
        };
        rows_of[i] = row;
    }
    let root_row = &rows_of[slot[&root]];
    let values = (0..rows)
        .map(|i| root_row[i / 64] >> (i % 64) & 1 == 1)
        .collect();
    TruthTable {
        vars: vars.to_vec(),
        values,
    }
}

impl TruthTable {
    pub fn num_rows(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize) -> bool {
        self.values[row]
    }

    pub fn is_constant(&self, value: bool) -> bool {
        self.values.iter().all(|b| *b == value)
    }

    fn var_pos(&self, var: VarId) -> usize {
        self.vars
            .iter()
            .position(|v| *v == var)
            .expect("variable not in table")
    }

    /// Restrict one variable to a constant, dropping it from the table.
    pub fn cofactor(&self, var: VarId, value: bool) -> TruthTable {
        let pos = self.var_pos(var);
        let mut vars = self.vars.clone();
        vars.remove(pos);
        let low_mask = (1usize << pos) - 1;
        let values = (0..self.values.len() / 2)
            .map(|i| {
                let src =
                    (i & low_mask) | ((value as usize) << pos) | ((i & !low_mask) << 1);
                self.values[src]
            })
            .collect();
        TruthTable { vars, values }
    }

    /// Existentially quantify a set of variables.
    pub fn exists(&self, vars: &[VarId]) -> TruthTable {
        let mut t = self.clone();
        for v in vars {
            let a = t.cofactor(*v, false);
            let b = t.cofactor(*v, true);
            t = TruthTable {
                vars: a.vars.clone(),
                values: a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| *x || *y)
                    .collect(),
            };
        }
        t
    }

    pub fn negate(&self) -> TruthTable {
        TruthTable {
            vars: self.vars.clone(),
            values: self.values.iter().map(|b| !*b).collect(),
        }
    }

    /// Does `self` imply `other` on every row? Tables must share var order.
    pub fn implies(&self, other: &TruthTable) -> bool {
        assert_eq!(self.vars, other.vars);
        self.values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| !*a || *b)
    }

    pub fn equal(&self, other: &TruthTable) -> bool {
        assert_eq!(self.vars, other.vars);
        self.values == other.values
    }
}

/// Assignment from packed bits over an ordered variable list.
pub fn assignment_from_bits(vars: &[VarId], bits: u64) -> Assignment {
    Assignment::from_pairs(
        vars.iter()
            .enumerate()
            .map(|(i, v)| (*v, bits >> i & 1 == 1)),
    )
}

/// Brute-force satisfiability over the circuit's support.
pub fn brute_sat(dag: &Dag, root: NodeRef) -> bool {
    let support: Vec<VarId> = dag.support(root).into_iter().collect();
    let tt = truth_table(dag, root, &support);
    tt.values.iter().any(|b| *b)
}

/// Brute-force count of the distinct projections onto `proj` of the models
/// of the circuit. Projection variables outside the support contribute
/// freely.
pub fn brute_projected_count(dag: &Dag, root: NodeRef, proj: &[VarId]) -> u64 {
    let mut vars: Vec<VarId> = dag.support(root).into_iter().collect();
    for p in proj {
        if !vars.contains(p) {
            vars.push(*p);
        }
    }
    let tt = truth_table(dag, root, &vars);
    let proj_pos: Vec<usize> = proj
        .iter()
        .map(|p| vars.iter().position(|v| v == p).unwrap())
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    for row in 0..tt.num_rows() {
        if tt.get(row) {
            let key: u64 = proj_pos
                .iter()
                .enumerate()
                .map(|(i, pos)| ((row >> pos & 1) as u64) << i)
                .sum();
            seen.insert(key);
        }
    }
    seen.len() as u64
}

/// The defining property of a Skolem vector, checked by enumeration:
/// for every input assignment where some output assignment satisfies the
/// specification, the candidate functions must satisfy it too.
pub fn brute_verify(
    dag: &Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    inputs: &[VarId],
    psi: &BTreeMap<VarId, NodeRef>,
) -> bool {
    let all: Vec<VarId> = outputs.iter().chain(inputs.iter()).copied().collect();
    let f = truth_table(dag, spec_root, &all);
    let psi_tables: Vec<TruthTable> = outputs
        .iter()
        .map(|x| truth_table(dag, psi[x], inputs))
        .collect();
    let n = outputs.len();
    for y in 0..1usize << inputs.len() {
        let exists = (0..1usize << n).any(|x| f.get(x | y << n));
        if !exists {
            continue;
        }
        let x_bits: usize = psi_tables
            .iter()
            .enumerate()
            .map(|(i, t)| (t.get(y) as usize) << i)
            .sum();
        if !f.get(x_bits | y << n) {
            return false;
        }
    }
    true
}

/// Exact quantified bound for the output at `pos` of the synthesis order:
/// delta = not exists(earlier outputs). F[x_pos = 0], and gamma the same
/// with the target at 1, both as functions of the later outputs and
/// inputs.
pub fn exact_delta_gamma(
    dag: &Dag,
    spec_root: NodeRef,
    order: &[VarId],
    pos: usize,
    inputs: &[VarId],
) -> (TruthTable, TruthTable) {
    let all: Vec<VarId> = order.iter().chain(inputs.iter()).copied().collect();
    let f = truth_table(dag, spec_root, &all);
    let target = order[pos];
    let earlier = &order[..pos];
    let delta = f
        .cofactor(target, false)
        .exists(earlier)
        .negate();
    let gamma = f
        .cofactor(target, true)
        .exists(earlier)
        .negate();
    (delta, gamma)
}

/// Configuration for the random specification generator.
#[derive(Debug, Clone)]
pub struct RandomSpecConfig {
    pub outputs: RangeInclusive<usize>,
    pub inputs: RangeInclusive<usize>,
    pub gates: RangeInclusive<usize>,
    /// Probability that a fresh leaf pick is negated.
    pub negation_bias: f64,
}

impl Default for RandomSpecConfig {
    fn default() -> Self {
        RandomSpecConfig {
            outputs: 1..=4,
            inputs: 1..=4,
            gates: 2..=12,
            negation_bias: 0.4,
        }
    }
}

/// Seeded random NNF specification. The circuit mixes AND/OR gates over
/// literal leaves and earlier gates; constants can appear only through
/// simplification.
pub fn random_spec(seed: u64, cfg: &RandomSpecConfig) -> Spec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dag = Dag::new();
    let n = rng.gen_range(cfg.outputs.clone());
    let m = rng.gen_range(cfg.inputs.clone());
    let outputs: Vec<VarId> = (1..=n).map(|i| dag.var_by_name(&format!("x{i}"))).collect();
    let inputs: Vec<VarId> = (1..=m).map(|i| dag.var_by_name(&format!("y{i}"))).collect();
    let mut pool: Vec<NodeRef> = Vec::new();
    for v in outputs.iter().chain(inputs.iter()) {
        pool.push(dag.var(*v));
    }
    let gates = rng.gen_range(cfg.gates.clone());
    for _ in 0..gates {
        let arity = rng.gen_range(2..=3usize);
        let mut children = Vec::with_capacity(arity);
        for _ in 0..arity {
            let pick = pool[rng.gen_range(0..pool.len())];
            let node = if rng.gen_bool(cfg.negation_bias) {
                dag.not(pick)
            } else {
                pick
            };
            children.push(node);
        }
        let gate = if rng.gen_bool(0.5) {
            dag.and(children)
        } else {
            dag.or(children)
        };
        pool.push(gate);
    }
    let root = *pool.last().unwrap();
    Spec::new(dag, root, outputs, inputs)
}

/// Random conjunction of xor-flavored constraints over outputs and inputs.
/// Solution windows are tight, so the polynomial candidates are often
/// inexact: the family that exercises the refinement loop.
pub fn random_constraint_spec(seed: u64) -> Spec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dag = Dag::new();
    let n = rng.gen_range(2..=4usize);
    let m = rng.gen_range(2..=4usize);
    let outputs: Vec<VarId> = (1..=n).map(|i| dag.var_by_name(&format!("x{i}"))).collect();
    let inputs: Vec<VarId> = (1..=m).map(|i| dag.var_by_name(&format!("y{i}"))).collect();
    let mut leaves: Vec<NodeRef> = Vec::new();
    for v in outputs.iter().chain(inputs.iter()) {
        leaves.push(dag.var(*v));
    }
    let mut constraints = Vec::new();
    for _ in 0..rng.gen_range(2..=3usize) {
        let a = leaves[rng.gen_range(0..leaves.len())];
        let b = leaves[rng.gen_range(0..leaves.len())];
        let c = leaves[rng.gen_range(0..leaves.len())];
        let ab = dag.xor(a, b);
        let g = match rng.gen_range(0..4) {
            0 => dag.xor(ab, c),
            1 => dag.iff(ab, c),
            2 => dag.or([ab, c]),
            _ => dag.iff(a, c),
        };
        constraints.push(g);
    }
    let root = dag.and(constraints);
    Spec::new(dag, root, outputs, inputs)
}

/// Random input-only functions for each output, as candidate vectors.
pub fn random_psi(seed: u64, spec: &mut Spec) -> BTreeMap<VarId, NodeRef> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = spec.inputs.clone();
    let outputs = spec.outputs.clone();
    let mut map = BTreeMap::new();
    for x in outputs {
        let f = if inputs.is_empty() || rng.gen_bool(0.2) {
            spec.dag.constant(rng.gen_bool(0.5))
        } else {
            let mut children = Vec::new();
            for _ in 0..rng.gen_range(1..=2usize) {
                let y = inputs[rng.gen_range(0..inputs.len())];
                children.push(spec.dag.literal(y, rng.gen_bool(0.5)));
            }
            if rng.gen_bool(0.5) {
                spec.dag.and(children)
            } else {
                spec.dag.or(children)
            }
        };
        map.insert(x, f);
    }
    map
}
