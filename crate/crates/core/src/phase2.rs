//! Phase 2: counterexample-guided refinement of the Phase-1 candidates.
//!
//! Each satisfying assignment of the error formula names an input point
//! where the candidates fail together with a witness output vector that
//! works there. Every disagreeing output is patched to its witness value on
//! a cube around the failing input; the cube starts as the full input
//! minterm and literals are greedily dropped while an oracle query
//! certifies the patched vector correct on the whole widened cube. Rounds
//! sample several diverse counterexamples before the error formula is
//! rebuilt from the patched functions.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Assignment, Dag, NodeRef, VarId};
use crate::error::{EngineError, OracleError};
use crate::goodness::{self, Goodness};
use crate::phase1::{build_error_formula, ErrorFormula, Provenance, SkolemVector};
use crate::sat::{self, OracleBudget};

/// A failing input point: the candidates produce `x_current` at `y_star`,
/// which falsifies the specification, while `x_witness` satisfies it.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub y_star: Assignment,
    pub x_witness: Assignment,
    pub x_current: Assignment,
}

/// Forces one output to a constant on a cube over the inputs.
#[derive(Debug, Clone)]
pub struct RefinementPatch {
    pub target: VarId,
    /// Conjunction of input literals; always contains the triggering
    /// counterexample's input point.
    pub cube: Vec<(VarId, bool)>,
    pub value: bool,
}

/// Build the cube circuit (constant true for the empty cube).
pub fn cube_circuit(dag: &mut Dag, cube: &[(VarId, bool)]) -> NodeRef {
    let lits: Vec<NodeRef> = cube
        .iter()
        .map(|(v, b)| dag.literal(*v, !*b))
        .collect();
    dag.and(lits)
}

fn ite_patch(dag: &mut Dag, cube: &[(VarId, bool)], value: bool, old: NodeRef) -> NodeRef {
    let c = cube_circuit(dag, cube);
    if value {
        dag.or([c, old])
    } else {
        let nc = dag.not(c);
        dag.and([nc, old])
    }
}

/// Replace the target's function by `ite(cube, value, old)` and mark it
/// refined.
pub fn apply_patch(dag: &mut Dag, psi: &mut SkolemVector, patch: &RefinementPatch) {
    let entry = psi
        .entries
        .iter_mut()
        .find(|e| e.var == patch.target)
        .expect("patch target must be a specification output");
    let new_fn = ite_patch(dag, &patch.cube, patch.value, entry.final_fn);
    entry.final_fn = new_fn;
    entry.stage = new_fn;
    entry.provenance = Provenance::Refined;
}

fn fill_projection(model: &Assignment, vars: &[VarId]) -> Assignment {
    Assignment::from_pairs(vars.iter().map(|v| (*v, model.get(*v).unwrap_or(false))))
}

/// Project a model of the error formula into a counterexample and check the
/// defining invariants; a violation means the model does not actually
/// satisfy the formula that was claimed.
pub fn extract_counterexample(
    dag: &Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    inputs: &[VarId],
    eps: &ErrorFormula,
    psi_of_eps: &BTreeMap<VarId, NodeRef>,
    model: &Assignment,
) -> Result<Counterexample, EngineError> {
    let y_star = fill_projection(model, inputs);
    let x_current = fill_projection(model, outputs);
    let x_witness = Assignment::from_pairs(outputs.iter().map(|x| {
        let xp = eps.prime_of[x];
        (*x, model.get(xp).unwrap_or(false))
    }));

    let mut wit_point = y_star.clone();
    wit_point.extend(&x_witness);
    if !dag.evaluate(spec_root, &wit_point)? {
        return Err(EngineError::MalformedModel(
            "witness block does not satisfy the specification".into(),
        ));
    }
    let mut cur_point = y_star.clone();
    cur_point.extend(&x_current);
    if dag.evaluate(spec_root, &cur_point)? {
        return Err(EngineError::MalformedModel(
            "current block satisfies the specification".into(),
        ));
    }
    for x in outputs {
        let expected = dag.evaluate(psi_of_eps[x], &cur_point)?;
        if x_current.get(*x) != Some(expected) {
            return Err(EngineError::MalformedModel(format!(
                "output {} disagrees with its candidate function",
                dag.var_name(*x)
            )));
        }
    }
    Ok(Counterexample {
        y_star,
        x_witness,
        x_current,
    })
}

/// Certification query: within `cube`, some input admits a satisfying
/// output vector while the patched candidates fail. UNSAT certifies the
/// patched vector correct on the whole cube.
fn certify_query(
    dag: &mut Dag,
    spec_root: NodeRef,
    fresh_block: &BTreeMap<VarId, NodeRef>,
    psi: &BTreeMap<VarId, NodeRef>,
    cube: &[(VarId, bool)],
) -> NodeRef {
    let cube_c = cube_circuit(dag, cube);
    let f_fresh = dag.substitute(spec_root, fresh_block);
    let f_psi = dag.substitute(spec_root, psi);
    let not_f_psi = dag.not(f_psi);
    dag.and([cube_c, f_fresh, not_f_psi])
}

/// Per-counterexample refinement: for every output whose current value
/// disagrees with the witness (processed back-to-front in synthesis
/// order), grow a certified cube and patch the working function map.
/// A resource-limited certification falls back to the ungeneralized
/// minterm for that output.
#[allow(clippy::too_many_arguments)]
pub fn generalize_cube(
    dag: &mut Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    inputs: &[VarId],
    process_order: &[VarId],
    psi_map: &mut BTreeMap<VarId, NodeRef>,
    cex: &Counterexample,
    budget: &OracleBudget,
    oracle_calls: &mut u64,
) -> Result<Vec<RefinementPatch>, EngineError> {
    let minterm: Vec<(VarId, bool)> = inputs
        .iter()
        .map(|y| (*y, cex.y_star.get(*y).unwrap_or(false)))
        .collect();
    let mut fresh_block = BTreeMap::new();
    for x in outputs {
        let hint = format!("{}_w", dag.var_name(*x));
        let v = dag.fresh_var(&hint);
        let leaf = dag.var(v);
        fresh_block.insert(*x, leaf);
    }
    let mut patches = Vec::new();
    for &target in process_order.iter().rev() {
        let (cur, wit) = (cex.x_current.get(target), cex.x_witness.get(target));
        if cur == wit {
            continue;
        }
        let value = wit.unwrap_or(false);
        let mut cube = minterm.clone();
        let mut limited = false;
        for drop_idx in (0..inputs.len()).rev() {
            let y = inputs[drop_idx];
            let Some(pos) = cube.iter().position(|(v, _)| *v == y) else {
                continue;
            };
            let mut candidate = cube.clone();
            candidate.remove(pos);
            let mut trial = psi_map.clone();
            let patched = ite_patch(dag, &candidate, value, psi_map[&target]);
            trial.insert(target, patched);
            let query = certify_query(dag, spec_root, &fresh_block, &trial, &candidate);
            *oracle_calls += 1;
            match sat::solve(&sat::encode(dag, query), &[], budget) {
                Ok(out) if !out.is_sat() => cube = candidate,
                Ok(_) => {}
                Err(OracleError::ResourceLimit(_)) => {
                    limited = true;
                    break;
                }
            }
        }
        if limited {
            cube = minterm.clone();
        }
        let patch = RefinementPatch {
            target,
            cube,
            value,
        };
        let new_fn = ite_patch(dag, &patch.cube, patch.value, psi_map[&target]);
        psi_map.insert(target, new_fn);
        patches.push(patch);
    }
    Ok(patches)
}

#[derive(Debug, Clone)]
pub struct IterationLog {
    pub iteration: u64,
    pub patches: usize,
    pub cube_widths: Vec<usize>,
    /// Input-projected counterexample count after this iteration.
    pub goodness_numerator: u64,
    pub goodness_exact: bool,
}

#[derive(Debug)]
pub enum CegarOutcome {
    Done(SkolemVector),
    Timeout(SkolemVector, Goodness),
}

#[derive(Debug)]
pub struct CegarRun {
    pub outcome: CegarOutcome,
    pub iterations: Vec<IterationLog>,
    pub oracle_calls: u64,
}

#[derive(Debug, Clone)]
pub struct CegarConfig {
    pub budget: OracleBudget,
    pub seed: u64,
    /// Counterexamples sampled per error-formula rebuild.
    pub samples_per_round: usize,
    pub max_iterations: Option<u64>,
    /// Enumeration cap for the per-iteration goodness numerator.
    pub goodness_cap: Option<u64>,
    /// Synthesis order of the non-constant outputs; patches within one
    /// counterexample run back-to-front over it.
    pub process_order: Vec<VarId>,
}

impl Default for CegarConfig {
    fn default() -> Self {
        CegarConfig {
            budget: OracleBudget::default(),
            seed: 0,
            samples_per_round: 8,
            max_iterations: None,
            goodness_cap: None,
            process_order: Vec::new(),
        }
    }
}

/// Refine until the error formula becomes unsatisfiable or a budget is
/// exhausted. Every iteration eliminates at least the sampled failing
/// inputs it processed, and certified patches cannot introduce new failing
/// inputs, so the projected counterexample count strictly decreases and the
/// loop terminates within 2^|Y| iterations.
pub fn cegar_loop(
    dag: &mut Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    inputs: &[VarId],
    psi0: SkolemVector,
    eps0: ErrorFormula,
    cfg: &CegarConfig,
) -> Result<CegarRun, EngineError> {
    let mut psi = psi0;
    let mut oracle_calls = 0u64;
    let mut iterations = Vec::new();

    // Normalize in-place against resource exhaustion: any limit signal
    // converts the current state into a timeout outcome.
    let result = cegar_inner(
        dag,
        spec_root,
        outputs,
        inputs,
        &mut psi,
        eps0,
        cfg,
        &mut oracle_calls,
        &mut iterations,
    );
    match result {
        Ok(done) => Ok(CegarRun {
            outcome: if done {
                CegarOutcome::Done(psi)
            } else {
                let g = timeout_goodness(dag, spec_root, outputs, inputs, &psi, cfg)?;
                CegarOutcome::Timeout(psi, g)
            },
            iterations,
            oracle_calls,
        }),
        Err(EngineError::Oracle(OracleError::ResourceLimit(_))) => {
            let g = timeout_goodness(dag, spec_root, outputs, inputs, &psi, cfg)?;
            Ok(CegarRun {
                outcome: CegarOutcome::Timeout(psi, g),
                iterations,
                oracle_calls,
            })
        }
        Err(e) => Err(e),
    }
}

fn timeout_goodness(
    dag: &mut Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    inputs: &[VarId],
    psi: &SkolemVector,
    cfg: &CegarConfig,
) -> Result<Goodness, EngineError> {
    let final_map = psi.final_bindings();
    let eps = build_error_formula(dag, spec_root, outputs, &final_map);
    // Bounded enumeration without the expired deadline.
    let cap = Some(cfg.goodness_cap.unwrap_or(4096));
    let g = goodness::goodness_ratio(
        dag,
        eps.root,
        inputs,
        cap,
        &OracleBudget::default(),
    )?;
    Ok(g)
}

#[allow(clippy::too_many_arguments)]
fn cegar_inner(
    dag: &mut Dag,
    spec_root: NodeRef,
    outputs: &[VarId],
    inputs: &[VarId],
    psi: &mut SkolemVector,
    eps0: ErrorFormula,
    cfg: &CegarConfig,
    oracle_calls: &mut u64,
    iterations: &mut Vec<IterationLog>,
) -> Result<bool, EngineError> {
    let mut seed_stream = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eps = eps0;
    let hard_bound = if inputs.len() < 62 {
        1u64 << inputs.len()
    } else {
        u64::MAX
    };
    let max_iterations = cfg.max_iterations.unwrap_or(u64::MAX).min(hard_bound.max(1));
    let process_order: Vec<VarId> = if cfg.process_order.is_empty() {
        outputs.to_vec()
    } else {
        cfg.process_order.clone()
    };

    let mut iter = 0u64;
    loop {
        iter += 1;
        if iter > max_iterations {
            return Ok(false);
        }
        if let Some(deadline) = cfg.budget.deadline {
            if Instant::now() >= deadline {
                return Ok(false);
            }
        }
        let inst = sat::encode(dag, eps.root);
        *oracle_calls += 1;
        let models = sat::sample_diverse(
            &inst,
            cfg.samples_per_round.max(1),
            seed_stream.next_u64(),
            &cfg.budget,
        )?;
        if models.is_empty() {
            // The formula entering this round was already unsatisfiable.
            return Ok(true);
        }
        let mut patches = 0usize;
        let mut cube_widths = Vec::new();
        for model in &models {
            let y_star = fill_projection(model, inputs);
            let mut psi_map = psi.final_bindings();
            // Current output values under the (possibly already patched)
            // functions; skip counterexamples fixed earlier in the round.
            let mut point = y_star.clone();
            let mut x_current = Assignment::new();
            for &x in outputs {
                let v = dag.evaluate(psi_map[&x], &y_star)?;
                x_current.set(x, v);
                point.set(x, v);
            }
            if dag.evaluate(spec_root, &point)? {
                continue;
            }
            let mut x_witness = Assignment::from_pairs(outputs.iter().map(|x| {
                let xp = eps.prime_of[x];
                (*x, model.get(xp).unwrap_or(false))
            }));
            // Outputs fixed by unateness keep their proven constants; the
            // witness can always be bent to agree with them.
            for entry in &psi.entries {
                if entry.provenance == Provenance::UnateConst {
                    let c = dag.evaluate(entry.final_fn, &y_star)?;
                    x_witness.set(entry.var, c);
                }
            }
            let mut wit_point = y_star.clone();
            wit_point.extend(&x_witness);
            if !dag.evaluate(spec_root, &wit_point)? {
                return Err(EngineError::MalformedModel(
                    "witness block does not satisfy the specification".into(),
                ));
            }
            let cex = Counterexample {
                y_star,
                x_witness,
                x_current,
            };
            let new_patches = generalize_cube(
                dag,
                spec_root,
                outputs,
                inputs,
                &process_order,
                &mut psi_map,
                &cex,
                &cfg.budget,
                oracle_calls,
            )?;
            for p in &new_patches {
                cube_widths.push(p.cube.len());
                apply_patch(dag, psi, p);
            }
            patches += new_patches.len();
        }
        let final_map = psi.final_bindings();
        eps = build_error_formula(dag, spec_root, outputs, &final_map);
        let inst = sat::encode(dag, eps.root);
        *oracle_calls += 1;
        let verdict = sat::solve(&inst, &[], &cfg.budget)?;
        *oracle_calls += 1;
        let (num, exhausted) = sat::enumerate_projected(
            &inst,
            inputs,
            cfg.goodness_cap,
            &cfg.budget,
        )?;
        iterations.push(IterationLog {
            iteration: iter,
            patches,
            cube_widths,
            goodness_numerator: num,
            goodness_exact: exhausted,
        });
        if !verdict.is_sat() {
            return Ok(true);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase1::{self, Phase1Config, Phase1Outcome, SkolemEntry};

    fn equality_spec(dag: &mut Dag, n: usize) -> (NodeRef, Vec<VarId>, Vec<VarId>) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut conjuncts = Vec::new();
        for i in 1..=n {
            let x = dag.var_by_name(&format!("x{i}"));
            let y = dag.var_by_name(&format!("y{i}"));
            xs.push(x);
            ys.push(y);
            let vx = dag.var(x);
            let vy = dag.var(y);
            let c = dag.iff(vx, vy);
            conjuncts.push(c);
        }
        let root = dag.and(conjuncts);
        (root, xs, ys)
    }

    /// Seed the n=1 equality spec with the deliberately wrong psi = !y.
    fn wrong_seed(dag: &mut Dag) -> (NodeRef, Vec<VarId>, Vec<VarId>, SkolemVector, ErrorFormula) {
        let (root, xs, ys) = equality_spec(dag, 1);
        let wrong = dag.neg_var(ys[0]);
        let psi = SkolemVector {
            entries: vec![SkolemEntry {
                var: xs[0],
                stage: wrong,
                final_fn: wrong,
                provenance: Provenance::DeltaBar,
            }],
        };
        let map: BTreeMap<VarId, NodeRef> = [(xs[0], wrong)].into();
        let eps = build_error_formula(dag, root, &xs, &map);
        (root, xs, ys, psi, eps)
    }

    #[test]
    fn extract_counterexample_fields() {
        let mut dag = Dag::new();
        let (root, xs, ys, _psi, eps) = wrong_seed(&mut dag);
        let inst = sat::encode(&dag, eps.root);
        let out = sat::solve(&inst, &[], &OracleBudget::default()).unwrap();
        let model = out.model.unwrap();
        let wrong = dag.neg_var(ys[0]);
        let map: BTreeMap<VarId, NodeRef> = [(xs[0], wrong)].into();
        let cex =
            extract_counterexample(&dag, root, &xs, &ys, &eps, &map, &model).unwrap();
        let y = cex.y_star.get(ys[0]).unwrap();
        assert_eq!(cex.x_witness.get(xs[0]), Some(y));
        assert_eq!(cex.x_current.get(xs[0]), Some(!y));
    }

    #[test]
    fn extract_rejects_forged_model() {
        let mut dag = Dag::new();
        let (root, xs, ys, _psi, eps) = wrong_seed(&mut dag);
        let wrong = dag.neg_var(ys[0]);
        let map: BTreeMap<VarId, NodeRef> = [(xs[0], wrong)].into();
        // A model with a witness block that does not satisfy F.
        let mut forged = Assignment::new();
        forged.set(ys[0], true);
        forged.set(xs[0], false);
        forged.set(eps.prime_of[&xs[0]], false);
        let err = extract_counterexample(&dag, root, &xs, &ys, &eps, &map, &forged);
        assert!(matches!(err, Err(EngineError::MalformedModel(_))));
    }

    #[test]
    fn apply_patch_shapes() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let zero = dag.constant(false);
        let mut psi = SkolemVector {
            entries: vec![SkolemEntry {
                var: x1,
                stage: zero,
                final_fn: zero,
                provenance: Provenance::DeltaBar,
            }],
        };
        // Empty cube, force 1: function becomes constant 1.
        apply_patch(
            &mut dag,
            &mut psi,
            &RefinementPatch {
                target: x1,
                cube: vec![],
                value: true,
            },
        );
        let one = dag.constant(true);
        assert_eq!(psi.entries[0].final_fn, one);
        assert_eq!(psi.entries[0].provenance, Provenance::Refined);

        // Minterm cube on psi = 0 becomes the minterm itself.
        psi.entries[0].final_fn = zero;
        apply_patch(
            &mut dag,
            &mut psi,
            &RefinementPatch {
                target: x1,
                cube: vec![(y1, true)],
                value: true,
            },
        );
        let y_leaf = dag.var(y1);
        assert_eq!(psi.entries[0].final_fn, y_leaf);
    }

    #[test]
    fn cegar_fixes_wrong_seed_in_one_round() {
        let mut dag = Dag::new();
        let (root, xs, ys, psi, eps) = wrong_seed(&mut dag);
        let cfg = CegarConfig {
            process_order: xs.clone(),
            ..CegarConfig::default()
        };
        let run = cegar_loop(&mut dag, root, &xs, &ys, psi, eps, &cfg).unwrap();
        match run.outcome {
            CegarOutcome::Done(psi) => {
                // psi must now equal y (the only correct function).
                for y in [false, true] {
                    let asg = Assignment::from_pairs([(ys[0], y)]);
                    assert_eq!(
                        dag.evaluate(psi.entries[0].final_fn, &asg).unwrap(),
                        y
                    );
                }
            }
            CegarOutcome::Timeout(..) => panic!("one patch suffices"),
        }
        assert_eq!(run.iterations.len(), 1);
    }

    #[test]
    fn uncertified_drops_keep_the_minterm() {
        // Wrong psi on X = Y (n=1): forcing a constant on a widened cube is
        // incorrect here, so no drop certifies and every patch stays a full
        // minterm. One counterexample per round takes two rounds.
        let mut dag = Dag::new();
        let (root, xs, ys, psi, eps) = wrong_seed(&mut dag);
        let cfg = CegarConfig {
            process_order: xs.clone(),
            samples_per_round: 1,
            ..CegarConfig::default()
        };
        let run = cegar_loop(&mut dag, root, &xs, &ys, psi, eps, &cfg).unwrap();
        let CegarOutcome::Done(psi) = run.outcome else {
            panic!("expected completion");
        };
        assert_eq!(run.iterations.len(), 2);
        for log in &run.iterations {
            assert_eq!(log.cube_widths, vec![1]);
        }
        for y in [false, true] {
            let asg = Assignment::from_pairs([(ys[0], y)]);
            assert_eq!(dag.evaluate(psi.entries[0].final_fn, &asg).unwrap(), y);
        }
        // Projected counterexample count fell from 2 to 1 to 0.
        assert_eq!(run.iterations[0].goodness_numerator, 1);
        assert_eq!(run.iterations[1].goodness_numerator, 0);
    }

    #[test]
    fn extract_counterexample_two_outputs() {
        // F = (x1 <-> y1) & (x2 <-> (y1 ^ y2)); seed both functions wrong.
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let x2 = dag.var_by_name("x2");
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let vx1 = dag.var(x1);
        let vx2 = dag.var(x2);
        let vy1 = dag.var(y1);
        let vy2 = dag.var(y2);
        let c1 = dag.iff(vx1, vy1);
        let xorr = dag.xor(vy1, vy2);
        let c2 = dag.iff(vx2, xorr);
        let root = dag.and([c1, c2]);
        let w1 = dag.neg_var(y1);
        let w2 = dag.iff(vy1, vy2);
        let map: BTreeMap<VarId, NodeRef> = [(x1, w1), (x2, w2)].into();
        let eps = build_error_formula(&mut dag, root, &[x1, x2], &map);
        let inst = sat::encode(&dag, eps.root);
        let out = sat::solve(&inst, &[], &OracleBudget::default()).unwrap();
        let model = out.model.unwrap();
        let cex = extract_counterexample(
            &dag,
            root,
            &[x1, x2],
            &[y1, y2],
            &eps,
            &map,
            &model,
        )
        .unwrap();
        // Projections agree with direct evaluation of the two functions.
        let y = cex.y_star.clone();
        assert_eq!(cex.x_current.get(x1), Some(dag.evaluate(w1, &y).unwrap()));
        assert_eq!(cex.x_current.get(x2), Some(dag.evaluate(w2, &y).unwrap()));
        // The witness block satisfies F, the current block does not.
        let mut wit = y.clone();
        wit.extend(&cex.x_witness);
        assert!(dag.evaluate(root, &wit).unwrap());
        let mut cur = y.clone();
        cur.extend(&cex.x_current);
        assert!(!dag.evaluate(root, &cur).unwrap());
    }

    #[test]
    fn sampling_round_bounds_total_patches() {
        // F = x1 <-> parity(y1, y2, y3), seeded with the complemented
        // parity: all 8 input points fail. With 4 samples per round the
        // loop still needs at most 8 patches in total.
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let ys: Vec<VarId> = (1..=3).map(|i| dag.var_by_name(&format!("y{i}"))).collect();
        let v0 = dag.var(ys[0]);
        let v1 = dag.var(ys[1]);
        let v2 = dag.var(ys[2]);
        let p01 = dag.xor(v0, v1);
        let parity = dag.xor(p01, v2);
        let vx = dag.var(x1);
        let root = dag.iff(vx, parity);
        let wrong = dag.not(parity);
        let psi = SkolemVector {
            entries: vec![SkolemEntry {
                var: x1,
                stage: wrong,
                final_fn: wrong,
                provenance: Provenance::DeltaBar,
            }],
        };
        let map: BTreeMap<VarId, NodeRef> = [(x1, wrong)].into();
        let eps = build_error_formula(&mut dag, root, &[x1], &map);
        // All 8 projections fail initially.
        let inst = sat::encode(&dag, eps.root);
        let (count, _) =
            sat::enumerate_projected(&inst, &ys, None, &OracleBudget::default()).unwrap();
        assert_eq!(count, 8);
        let cfg = CegarConfig {
            samples_per_round: 4,
            process_order: vec![x1],
            ..CegarConfig::default()
        };
        let run = cegar_loop(&mut dag, root, &[x1], &ys, psi, eps, &cfg).unwrap();
        let CegarOutcome::Done(_) = run.outcome else {
            panic!("expected completion");
        };
        let total_patches: usize = run.iterations.iter().map(|l| l.patches).sum();
        assert!(total_patches <= 8, "{total_patches} patches for 8 failures");
    }

    #[test]
    fn wdnnf_inputs_never_enter_the_loop() {
        let mut dag = Dag::new();
        let (root, xs, _ys) = equality_spec(&mut dag, 3);
        let (outcome, _) =
            phase1::phase1_synthesize(&mut dag, root, &xs, &Phase1Config::default()).unwrap();
        assert!(matches!(outcome, Phase1Outcome::Done(_)));
    }

    #[test]
    fn retained_literal_when_drop_breaks_correctness() {
        // F = (x1 <-> (y1 & y2)). Seed psi = y1 (wrong at y1=1,y2=0).
        // Generalizing the patch for the counterexample cannot drop both
        // input literals, because forcing x1 on all of Y is incorrect.
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let vx = dag.var(x1);
        let vy1 = dag.var(y1);
        let vy2 = dag.var(y2);
        let conj = dag.and([vy1, vy2]);
        let root = dag.iff(vx, conj);
        let seed_fn = vy1;
        let psi = SkolemVector {
            entries: vec![SkolemEntry {
                var: x1,
                stage: seed_fn,
                final_fn: seed_fn,
                provenance: Provenance::DeltaBar,
            }],
        };
        let map: BTreeMap<VarId, NodeRef> = [(x1, seed_fn)].into();
        let eps = build_error_formula(&mut dag, root, &[x1], &map);
        let cfg = CegarConfig {
            process_order: vec![x1],
            ..CegarConfig::default()
        };
        let run =
            cegar_loop(&mut dag, root, &[x1], &[y1, y2], psi, eps, &cfg).unwrap();
        let CegarOutcome::Done(psi) = run.outcome else {
            panic!("small spec must complete");
        };
        // Result must be the exact function y1 & y2.
        for bits in 0..4u32 {
            let asg = Assignment::from_pairs([(y1, bits & 1 != 0), (y2, bits & 2 != 0)]);
            let want = (bits & 1 != 0) && (bits & 2 != 0);
            assert_eq!(dag.evaluate(psi.entries[0].final_fn, &asg).unwrap(), want);
        }
        // At least one patch kept at least one literal.
        assert!(run
            .iterations
            .iter()
            .flat_map(|l| l.cube_widths.iter())
            .any(|w| *w >= 1));
    }
}
