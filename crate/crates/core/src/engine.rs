//! End-to-end synthesis runs: the direct NNF pipeline, the BDD-compiled
//! pipeline, the two-pipeline ensemble, and result verification.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::BigUint;

use crate::bdd;
use crate::circuit::{Assignment, NodeRef, Spec, VarId};
use crate::error::{BddError, EngineError, OracleError};
use crate::goodness::Goodness;
use crate::phase1::{
    self, build_error_formula, OrderStrategy, Phase1Config, Phase1Outcome, SkolemVector,
};
use crate::phase2::{self, CegarConfig, CegarOutcome};
use crate::report::RunReport;
use crate::sat::{self, OracleBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pipeline {
    #[default]
    Nnf,
    Bdd,
    Both,
}

impl Pipeline {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pipeline::Nnf => "nnf",
            Pipeline::Bdd => "bdd",
            Pipeline::Both => "both",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub pipeline: Pipeline,
    pub order: OrderStrategy,
    pub seed: u64,
    pub timeout: Option<Duration>,
    pub samples_per_round: usize,
    pub goodness_cap: Option<u64>,
    pub bdd_node_cap: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            pipeline: Pipeline::Nnf,
            order: OrderStrategy::FaninScore,
            seed: 0,
            timeout: None,
            samples_per_round: 8,
            goodness_cap: None,
            bdd_node_cap: bdd::DEFAULT_NODE_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthStatus {
    DonePhase1,
    DonePhase2,
    Timeout,
    BddCapExceeded,
}

impl SynthStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SynthStatus::DonePhase1 => "done-phase1",
            SynthStatus::DonePhase2 => "done-phase2",
            SynthStatus::Timeout => "timeout",
            SynthStatus::BddCapExceeded => "bdd-cap-exceeded",
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, SynthStatus::DonePhase1 | SynthStatus::DonePhase2)
    }
}

#[derive(Debug)]
pub struct SynthResult {
    pub status: SynthStatus,
    pub psi: Option<SkolemVector>,
    pub goodness: Option<Goodness>,
    pub report: RunReport,
    pub elapsed_ms: u128,
}

fn den_string(m: usize) -> String {
    (BigUint::from(1u8) << m).to_string()
}

/// Run one pipeline over the specification.
fn run_pipeline(
    spec: &mut Spec,
    which: Pipeline,
    opts: &SynthOptions,
) -> Result<SynthResult, EngineError> {
    let started = Instant::now();
    let deadline = opts.timeout.map(|t| started + t);
    let budget = OracleBudget {
        max_conflicts: None,
        deadline,
    };
    let mut report = RunReport::new();

    let root = match which {
        Pipeline::Nnf => spec.root,
        Pipeline::Bdd => {
            let order = bdd::static_order(&spec.dag, spec.root);
            match bdd::build_bdd(&spec.dag, spec.root, order, opts.bdd_node_cap) {
                Ok((b, f)) => {
                    report.push("bdd.nodes", b.num_reachable_nodes(f));
                    b.to_circuit(&mut spec.dag, f)
                }
                Err(BddError::SizeCapExceeded(cap)) => {
                    report.push("bdd.node_cap", cap);
                    report.push("result", SynthStatus::BddCapExceeded.as_str());
                    return Ok(SynthResult {
                        status: SynthStatus::BddCapExceeded,
                        psi: None,
                        goodness: None,
                        report,
                        elapsed_ms: started.elapsed().as_millis(),
                    });
                }
            }
        }
        Pipeline::Both => unreachable!("ensemble handled by the caller"),
    };

    let cfg = Phase1Config {
        budget,
        order: opts.order,
    };
    let outputs = spec.outputs.clone();
    let inputs = spec.inputs.clone();
    let phase1_run = phase1::phase1_synthesize(&mut spec.dag, root, &outputs, &cfg);
    let (outcome, stats) = match phase1_run {
        Ok(v) => v,
        Err(EngineError::Oracle(OracleError::ResourceLimit(_))) => {
            report.push("result", SynthStatus::Timeout.as_str());
            return Ok(SynthResult {
                status: SynthStatus::Timeout,
                psi: None,
                goodness: None,
                report,
                elapsed_ms: started.elapsed().as_millis(),
            });
        }
        Err(e) => return Err(e),
    };
    report.push("phase1.time_ms", stats.time_ms);
    report.push("phase1.oracle_calls", stats.oracle_calls);
    report.push("phase1.unate_calls", stats.unate_oracle_calls);
    report.push("phase1.unate_pos", stats.pos_unate);
    report.push("phase1.unate_neg", stats.neg_unate);
    report.push("phase1.candidate_nodes", stats.candidate_nodes);
    report.push(
        "phase1.wdnnf",
        if stats.wdnnf_pass { "pass" } else { "fail" },
    );
    let order_names: Vec<&str> = stats
        .order
        .iter()
        .map(|v| spec.dag.var_name(*v))
        .collect();
    report.push("phase1.order", order_names.join(";"));

    let (status, psi, goodness) = match outcome {
        Phase1Outcome::Done(psi) => {
            report.push("phase2.iterations", 0);
            (SynthStatus::DonePhase1, Some(psi), None)
        }
        Phase1Outcome::NeedPhase2(psi, eps) => {
            let cegar_cfg = CegarConfig {
                budget,
                seed: opts.seed,
                samples_per_round: opts.samples_per_round,
                max_iterations: None,
                goodness_cap: opts.goodness_cap,
                process_order: stats.order.clone(),
            };
            let run = phase2::cegar_loop(
                &mut spec.dag,
                root,
                &outputs,
                &inputs,
                psi,
                eps,
                &cegar_cfg,
            )?;
            report.push("phase2.iterations", run.iterations.len());
            report.push(
                "phase2.patches",
                run.iterations.iter().map(|l| l.patches).sum::<usize>(),
            );
            for log in &run.iterations {
                let widths: Vec<String> =
                    log.cube_widths.iter().map(|w| w.to_string()).collect();
                report.push(
                    &format!("phase2.iter{}.patches", log.iteration),
                    log.patches,
                );
                report.push(
                    &format!("phase2.iter{}.cube_widths", log.iteration),
                    widths.join(";"),
                );
                report.push(
                    &format!("phase2.iter{}.goodness_num", log.iteration),
                    log.goodness_numerator,
                );
            }
            match run.outcome {
                CegarOutcome::Done(psi) => (SynthStatus::DonePhase2, Some(psi), None),
                CegarOutcome::Timeout(psi, g) => {
                    (SynthStatus::Timeout, Some(psi), Some(g))
                }
            }
        }
    };

    let goodness = goodness.or_else(|| {
        status.is_done().then_some(Goodness {
            numerator: 0,
            log2_den: inputs.len() as u32,
            exact: true,
        })
    });
    if let Some(psi) = &psi {
        for entry in &psi.entries {
            let name = spec.dag.var_name(entry.var).to_string();
            report.push(
                &format!("psi.{name}.provenance"),
                entry.provenance.as_str(),
            );
            report.push(
                &format!("psi.{name}.nodes"),
                spec.dag.count_nodes(entry.final_fn),
            );
        }
    }
    if let Some(g) = &goodness {
        report.push("goodness.num", g.numerator);
        report.push("goodness.den", den_string(g.log2_den as usize));
        report.push("goodness.exact", g.exact);
    }
    report.push("result", status.as_str());
    Ok(SynthResult {
        status,
        psi,
        goodness,
        report,
        elapsed_ms: started.elapsed().as_millis(),
    })
}

/// Synthesize with the selected pipeline; `Both` runs the direct and the
/// BDD-compiled pipelines and reports the faster successful one.
pub fn synthesize(spec: &mut Spec, opts: &SynthOptions) -> Result<SynthResult, EngineError> {
    match opts.pipeline {
        Pipeline::Nnf | Pipeline::Bdd => {
            let mut res = run_pipeline(spec, opts.pipeline, opts)?;
            let mut report = RunReport::new();
            report.push("pipeline", opts.pipeline.as_str());
            report.push("seed", opts.seed);
            report.extend_from("", &res.report);
            res.report = report;
            Ok(res)
        }
        Pipeline::Both => {
            // Pipelines run on clones so each sees the pristine arena.
            let mut nnf_spec = spec.clone();
            let nnf_res = run_pipeline(&mut nnf_spec, Pipeline::Nnf, opts)?;
            let mut bdd_spec = spec.clone();
            let bdd_res = run_pipeline(&mut bdd_spec, Pipeline::Bdd, opts)?;
            let pick_bdd = match (bdd_res.status.is_done(), nnf_res.status.is_done()) {
                (true, true) => bdd_res.elapsed_ms < nnf_res.elapsed_ms,
                (true, false) => true,
                _ => false,
            };
            let mut report = RunReport::new();
            report.push("pipeline", "both");
            report.push("seed", opts.seed);
            report.push("pipeline.nnf.time_ms", nnf_res.elapsed_ms);
            report.push("pipeline.bdd.time_ms", bdd_res.elapsed_ms);
            report.push("pipeline.chosen", if pick_bdd { "bdd" } else { "nnf" });
            let (chosen, chosen_spec) = if pick_bdd {
                (bdd_res, bdd_spec)
            } else {
                (nnf_res, nnf_spec)
            };
            report.extend_from("", &chosen.report);
            *spec = chosen_spec;
            Ok(SynthResult {
                status: chosen.status,
                psi: chosen.psi,
                goodness: chosen.goodness,
                report,
                elapsed_ms: chosen.elapsed_ms,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub enum VerifyOutcome {
    Correct,
    /// An input assignment on which the candidate vector fails.
    Incorrect(Assignment),
}

/// Verification through the error formula: unsatisfiable
/// exactly when the functions are a correct Skolem vector.
pub fn verify(
    spec: &mut Spec,
    psi: &BTreeMap<VarId, NodeRef>,
    budget: &OracleBudget,
) -> Result<VerifyOutcome, EngineError> {
    let root = spec.root;
    let outputs = spec.outputs.clone();
    let eps = build_error_formula(&mut spec.dag, root, &outputs, psi);
    let outcome = sat::solve(&sat::encode(&spec.dag, eps.root), &[], budget)?;
    match outcome.model {
        Some(model) => {
            let y = Assignment::from_pairs(
                spec.inputs
                    .iter()
                    .map(|v| (*v, model.get(*v).unwrap_or(false))),
            );
            Ok(VerifyOutcome::Incorrect(y))
        }
        None => Ok(VerifyOutcome::Correct),
    }
}
