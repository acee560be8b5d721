//! Phase 1 of the synthesis pipeline: output ordering, polynomial-size
//! candidate construction by constant substitution into the renamed NNF
//! circuit, candidate selection by DAG size, reverse substitution to
//! input-only functions, and the error-formula correctness gate.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::circuit::{Dag, NodeRef, Spec, VarId};
use crate::error::EngineError;
use crate::nnf::{self, HatCircuit};
use crate::sat::{self, OracleBudget};
use crate::unate::{self, UnateResult};

/// How the order of candidate construction is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderStrategy {
    /// Ascending transitive-fanin score, ties by declaration index.
    #[default]
    FaninScore,
    /// Plain declaration order.
    Index,
}

/// A total order over the outputs that survived unate elimination.
#[derive(Debug, Clone)]
pub struct OutputOrder {
    /// Remaining outputs, first-to-synthesize first.
    pub vars: Vec<VarId>,
    pub scores: BTreeMap<VarId, usize>,
}

/// Where a synthesized function came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    UnateConst,
    DeltaBar,
    NotGammaBar,
    Refined,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::UnateConst => "unate-const",
            Provenance::DeltaBar => "delta-bar",
            Provenance::NotGammaBar => "not-gamma-bar",
            Provenance::Refined => "refined",
        }
    }
}

/// One synthesized output function.
#[derive(Debug, Clone)]
pub struct SkolemEntry {
    pub var: VarId,
    /// Stage form: may mention outputs ordered after `var`.
    pub stage: NodeRef,
    /// Final form over the inputs only.
    pub final_fn: NodeRef,
    pub provenance: Provenance,
}

/// Ordered vector of Skolem functions, one entry per specification output,
/// in declaration order.
#[derive(Debug, Clone, Default)]
pub struct SkolemVector {
    pub entries: Vec<SkolemEntry>,
}

impl SkolemVector {
    pub fn entry(&self, var: VarId) -> Option<&SkolemEntry> {
        self.entries.iter().find(|e| e.var == var)
    }

    pub fn final_bindings(&self) -> BTreeMap<VarId, NodeRef> {
        self.entries.iter().map(|e| (e.var, e.final_fn)).collect()
    }
}

/// The error formula eps(X', X, Y) together with its fresh-variable block.
#[derive(Debug, Clone)]
pub struct ErrorFormula {
    pub root: NodeRef,
    /// x_i -> fresh primed copy x_i'.
    pub prime_of: BTreeMap<VarId, VarId>,
}

/// Candidate pair for one output: both are built by constant substitution
/// into the renamed circuit and mention only later outputs and inputs.
#[derive(Debug, Clone, Copy)]
pub struct CandidatePair {
    pub delta_bar: NodeRef,
    pub gamma_bar: NodeRef,
}

/// Score the remaining outputs on the plain reduced circuit and order them
/// ascending by the number of DAG nodes containing each output in their
/// transitive fan-in; ties break by declaration index.
pub fn choose_order(
    dag: &Dag,
    plain_root: NodeRef,
    remaining: &[VarId],
    strategy: OrderStrategy,
) -> OutputOrder {
    let scores = dag.transitive_fanin_counts(plain_root, remaining);
    let mut vars = remaining.to_vec();
    if strategy == OrderStrategy::FaninScore {
        let index_of: BTreeMap<VarId, usize> =
            remaining.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        vars.sort_by_key(|v| (scores[v], index_of[v]));
    }
    OutputOrder { vars, scores }
}

/// Build the two under-approximation candidates for the output at position
/// `pos` of the order: earlier outputs and their bars are set to 1, the
/// target is set to (0, 1) for the delta side and (1, 0) for the gamma
/// side, and every later bar variable is replaced by the negation of its
/// original so the result ranges over later outputs and inputs only.
pub fn build_candidates(
    dag: &mut Dag,
    hat: &HatCircuit,
    order: &OutputOrder,
    pos: usize,
) -> CandidatePair {
    let one = dag.constant(true);
    let zero = dag.constant(false);
    let mut common: BTreeMap<VarId, NodeRef> = BTreeMap::new();
    for (j, &x) in order.vars.iter().enumerate() {
        let bar = hat.bar_of[&x];
        match j.cmp(&pos) {
            std::cmp::Ordering::Less => {
                common.insert(x, one);
                common.insert(bar, one);
            }
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Greater => {
                let neg = dag.neg_var(x);
                common.insert(bar, neg);
            }
        }
    }
    let target = order.vars[pos];
    let target_bar = hat.bar_of[&target];

    let mut delta_bind = common.clone();
    delta_bind.insert(target, zero);
    delta_bind.insert(target_bar, one);
    let delta_sub = dag.substitute(hat.root, &delta_bind);
    let delta_bar = dag.not(delta_sub);

    let mut gamma_bind = common;
    gamma_bind.insert(target, one);
    gamma_bind.insert(target_bar, zero);
    let gamma_sub = dag.substitute(hat.root, &gamma_bind);
    let gamma_bar = dag.not(gamma_sub);

    CandidatePair {
        delta_bar,
        gamma_bar,
    }
}

/// Pick the smaller of the delta candidate and the negated gamma candidate
/// after simplification; ties go to the delta side.
pub fn select_candidate(dag: &mut Dag, pair: &CandidatePair) -> (NodeRef, Provenance) {
    let not_gamma = dag.not(pair.gamma_bar);
    let delta_size = dag.count_nodes(pair.delta_bar);
    let gamma_size = dag.count_nodes(not_gamma);
    if delta_size <= gamma_size {
        (pair.delta_bar, Provenance::DeltaBar)
    } else {
        (not_gamma, Provenance::NotGammaBar)
    }
}

/// Eliminate later outputs from each stage function by substituting the
/// already-finalized functions, processed from the last position backwards.
/// Returns the final functions keyed by output, all over inputs only.
pub fn reverse_substitute(
    dag: &mut Dag,
    order: &OutputOrder,
    stages: &BTreeMap<VarId, NodeRef>,
) -> BTreeMap<VarId, NodeRef> {
    let mut finals: BTreeMap<VarId, NodeRef> = BTreeMap::new();
    let mut later: BTreeMap<VarId, NodeRef> = BTreeMap::new();
    for &x in order.vars.iter().rev() {
        let final_fn = dag.substitute(stages[&x], &later);
        finals.insert(x, final_fn);
        later.insert(x, final_fn);
    }
    finals
}

/// Build eps(X', X, Y) = F(X', Y) and (x_i <-> psi_i for all i) and not
/// F(X, Y), with a fresh primed copy of every output.
pub fn build_error_formula(
    dag: &mut Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    psi: &BTreeMap<VarId, NodeRef>,
) -> ErrorFormula {
    let mut prime_of = BTreeMap::new();
    let mut prime_bind = BTreeMap::new();
    for &x in outputs {
        let hint = format!("{}_prime", dag.var_name(x));
        let xp = dag.fresh_var(&hint);
        prime_of.insert(x, xp);
        let leaf = dag.var(xp);
        prime_bind.insert(x, leaf);
    }
    let f_prime = dag.substitute(spec_root, &prime_bind);
    let mut conjuncts = vec![f_prime];
    for &x in outputs {
        let leaf = dag.var(x);
        let link = dag.iff(leaf, psi[&x]);
        conjuncts.push(link);
    }
    let not_f = dag.not(spec_root);
    conjuncts.push(not_f);
    let root = dag.and(conjuncts);
    ErrorFormula { root, prime_of }
}

/// Result of the Phase-1 gate.
#[derive(Debug)]
pub enum Phase1Outcome {
    /// The error formula is unsatisfiable: the vector is correct.
    Done(SkolemVector),
    /// Candidates need refinement; the error formula is satisfiable.
    NeedPhase2(SkolemVector, ErrorFormula),
}

/// Phase-1 run metrics for the report and the acceptance suite.
#[derive(Debug, Clone, Default)]
pub struct Phase1Stats {
    pub oracle_calls: u64,
    pub unate_oracle_calls: u64,
    pub pos_unate: usize,
    pub neg_unate: usize,
    pub wdnnf_pass: bool,
    pub candidate_nodes: usize,
    /// Synthesis order chosen for the non-constant outputs.
    pub order: Vec<VarId>,
    pub time_ms: u128,
}

/// Synthesis options shared by both pipelines.
#[derive(Debug, Clone, Copy, Default)]
pub struct Phase1Config {
    pub budget: OracleBudget,
    pub order: OrderStrategy,
}

/// Run Algorithm-style Phase 1: unate elimination, ordering, candidate
/// construction and selection, reverse substitution, and the error-formula
/// check.
pub fn phase1_synthesize(
    dag: &mut Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    cfg: &Phase1Config,
) -> Result<(Phase1Outcome, Phase1Stats), EngineError> {
    let started = Instant::now();
    let mut stats = Phase1Stats::default();
    if outputs.is_empty() {
        stats.wdnnf_pass = true;
        stats.time_ms = started.elapsed().as_millis();
        return Ok((Phase1Outcome::Done(SkolemVector::default()), stats));
    }

    let nnf_root = nnf::to_nnf(dag, spec_root);
    let UnateResult {
        u0,
        u1,
        reduced,
        remaining,
        oracle_calls,
    } = unate::unate_fixpoint(dag, nnf_root, outputs, &cfg.budget)?;
    stats.unate_oracle_calls = oracle_calls;
    stats.oracle_calls += oracle_calls;
    stats.pos_unate = u1.len();
    stats.neg_unate = u0.len();
    stats.wdnnf_pass = nnf::check_wdnnf(dag, reduced.root, &reduced.origin_of).is_pass();

    let order = choose_order(dag, reduced.plain, &remaining, cfg.order);
    stats.order = order.vars.clone();
    let mut stages: BTreeMap<VarId, NodeRef> = BTreeMap::new();
    let mut provenance: BTreeMap<VarId, Provenance> = BTreeMap::new();
    for pos in 0..order.vars.len() {
        let pair = build_candidates(dag, &reduced, &order, pos);
        let (stage, prov) = select_candidate(dag, &pair);
        stats.candidate_nodes += dag.count_nodes(stage);
        stages.insert(order.vars[pos], stage);
        provenance.insert(order.vars[pos], prov);
    }
    let finals = reverse_substitute(dag, &order, &stages);

    let zero = dag.constant(false);
    let one = dag.constant(true);
    let mut entries = Vec::with_capacity(outputs.len());
    let mut stage_map: BTreeMap<VarId, NodeRef> = BTreeMap::new();
    for &x in outputs {
        let (stage, final_fn, prov) = if u1.contains(&x) {
            (one, one, Provenance::UnateConst)
        } else if u0.contains(&x) {
            (zero, zero, Provenance::UnateConst)
        } else {
            (stages[&x], finals[&x], provenance[&x])
        };
        stage_map.insert(x, stage);
        entries.push(SkolemEntry {
            var: x,
            stage,
            final_fn,
            provenance: prov,
        });
    }
    let vector = SkolemVector { entries };

    // Correctness gate on the stage forms.
    let eps = build_error_formula(dag, spec_root, outputs, &stage_map);
    stats.oracle_calls += 1;
    let outcome = sat::solve(&sat::encode(dag, eps.root), &[], &cfg.budget)?;
    stats.time_ms = started.elapsed().as_millis();
    if outcome.is_sat() {
        Ok((Phase1Outcome::NeedPhase2(vector, eps), stats))
    } else {
        Ok((Phase1Outcome::Done(vector), stats))
    }
}

/// Convenience wrapper for specs.
pub fn phase1_synthesize_spec(
    spec: &mut Spec,
    cfg: &Phase1Config,
) -> Result<(Phase1Outcome, Phase1Stats), EngineError> {
    let root = spec.root;
    let outputs = spec.outputs.clone();
    phase1_synthesize(&mut spec.dag, root, &outputs, cfg)
}

/// The sufficient exactness condition checkable with one oracle query per
/// output: for every position j, the renamed circuit with the first j
/// outputs and bars at 1 implies one of the two mixed-constant variants.
/// Purely diagnostic; the synthesis path never consults it.
pub fn exactness_condition_diagnostic(
    dag: &mut Dag,
    hat: &HatCircuit,
    order: &OutputOrder,
    budget: &OracleBudget,
) -> Result<bool, EngineError> {
    let one = dag.constant(true);
    let zero = dag.constant(false);
    for j in 0..order.vars.len() {
        let mut base: BTreeMap<VarId, NodeRef> = BTreeMap::new();
        for (idx, &x) in order.vars.iter().enumerate() {
            let bar = hat.bar_of[&x];
            if idx < j {
                base.insert(x, one);
                base.insert(bar, one);
            } else if idx > j {
                let neg = dag.neg_var(x);
                base.insert(bar, neg);
            }
        }
        let target = order.vars[j];
        let target_bar = hat.bar_of[&target];
        let build = |dag: &mut Dag, xv: NodeRef, bv: NodeRef| {
            let mut bind = base.clone();
            bind.insert(target, xv);
            bind.insert(target_bar, bv);
            dag.substitute(hat.root, &bind)
        };
        let both_one = build(dag, one, one);
        let x_zero = build(dag, zero, one);
        let x_one = build(dag, one, zero);
        let rhs = dag.or([x_zero, x_one]);
        let not_rhs = dag.not(rhs);
        let violation = dag.and([both_one, not_rhs]);
        if sat::solve(&sat::encode(dag, violation), &[], budget)?.is_sat() {
            return Ok(false);
        }
    }
    Ok(true)
}
