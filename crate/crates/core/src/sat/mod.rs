//! SAT oracle over circuits: gate encoding to CNF, decision queries with
//! assumptions, projected model enumeration with blocking clauses, and
//! seeded diversified model sampling.

mod dpll;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Assignment, Dag, Node, NodeRef, VarId};
use crate::error::OracleError;
use dpll::{lit, Dpll, Lit, SearchLimits, SolveOutcome};

/// Conflict and wall-clock budgets for oracle queries. The defaults are
/// unbounded; the CLI installs a deadline from its timeout flag.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleBudget {
    pub max_conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

impl OracleBudget {
    fn limits<'a>(&self, rng: Option<&'a mut ChaCha8Rng>) -> SearchLimits<'a> {
        SearchLimits {
            max_conflicts: self.max_conflicts,
            deadline: self.deadline,
            rng,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

/// Oracle verdict with a model on demand.
#[derive(Debug, Clone)]
pub struct SatOutcome {
    pub verdict: Verdict,
    /// Total assignment on the source circuit's support; present iff SAT.
    pub model: Option<Assignment>,
}

impl SatOutcome {
    pub fn is_sat(&self) -> bool {
        self.verdict == Verdict::Sat
    }
}

/// Gate (Tseitin) encoding of a circuit, equisatisfiable with the source.
#[derive(Debug, Clone)]
pub struct CnfInstance {
    /// DIMACS-style clauses: positive n = variable n true, 1-based.
    pub clauses: Vec<Vec<i32>>,
    pub num_vars: u32,
    /// Source circuit variables in ascending id order; their DIMACS codes
    /// are 1..=source_vars.len().
    source_vars: Vec<VarId>,
    dimacs_of: BTreeMap<VarId, i32>,
    /// Display names for the DIMACS comment header.
    var_names: Vec<String>,
}

impl CnfInstance {
    pub fn source_vars(&self) -> &[VarId] {
        &self.source_vars
    }

    fn dimacs_lit(&self, var: VarId, value: bool) -> Option<i32> {
        self.dimacs_of.get(&var).map(|d| if value { *d } else { -d })
    }

    /// Serialize in DIMACS CNF format, with a comment block mapping source
    /// variables to their names, for external cross-checking.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.var_names.iter().enumerate() {
            out.push_str(&format!("c var {} = {}\n", i + 1, name));
        }
        out.push_str(&format!("p cnf {} {}\n", self.num_vars, self.clauses.len()));
        for clause in &self.clauses {
            for l in clause {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Encode a circuit into CNF with one solver variable per source variable
/// (sorted by id, codes 1..=s) followed by one per internal gate in
/// topological order. Clause count is linear in the circuit size.
pub fn encode(dag: &Dag, root: NodeRef) -> CnfInstance {
    let support: Vec<VarId> = dag.support(root).into_iter().collect();
    let mut dimacs_of = BTreeMap::new();
    let mut var_names = Vec::new();
    for (i, v) in support.iter().enumerate() {
        dimacs_of.insert(*v, (i + 1) as i32);
        var_names.push(dag.var_name(*v).to_string());
    }
    let mut next = support.len() as i32;
    let mut clauses: Vec<Vec<i32>> = Vec::new();

    if let Node::Const(b) = dag.node(root) {
        if !b {
            clauses.push(vec![]);
        }
        return CnfInstance {
            clauses,
            num_vars: next as u32,
            source_vars: support,
            dimacs_of,
            var_names,
        };
    }

    let order = dag.topo_reachable(root);
    let mut lit_of: BTreeMap<NodeRef, i32> = BTreeMap::new();
    for r in order {
        let l = match dag.node(r) {
            Node::Const(_) => {
                // Constant children are propagated away at construction;
                // only a constant root is possible, handled above.
                unreachable!("constant node below a non-constant root")
            }
            Node::Var { var, negated } => {
                let d = dimacs_of[var];
                if *negated {
                    -d
                } else {
                    d
                }
            }
            Node::And(ch) => {
                next += 1;
                let g = next;
                let mut long = vec![g];
                for c in ch.iter() {
                    let cl = lit_of[c];
                    clauses.push(vec![-g, cl]);
                    long.push(-cl);
                }
                clauses.push(long);
                g
            }
            Node::Or(ch) => {
                next += 1;
                let g = next;
                let mut long = vec![-g];
                for c in ch.iter() {
                    let cl = lit_of[c];
                    clauses.push(vec![g, -cl]);
                    long.push(cl);
                }
                clauses.push(long);
                g
            }
        };
        lit_of.insert(r, l);
    }
    clauses.push(vec![lit_of[&root]]);
    CnfInstance {
        clauses,
        num_vars: next as u32,
        source_vars: support,
        dimacs_of,
        var_names,
    }
}

fn to_internal(l: i32) -> Lit {
    lit(l.unsigned_abs() - 1, l < 0)
}

fn build_solver(inst: &CnfInstance) -> Dpll {
    let mut s = Dpll::new(inst.num_vars as usize);
    for clause in &inst.clauses {
        s.add_clause(clause.iter().map(|l| to_internal(*l)).collect());
    }
    s
}

fn model_assignment(inst: &CnfInstance, model: &[bool]) -> Assignment {
    Assignment::from_pairs(
        inst.source_vars
            .iter()
            .map(|v| (*v, model[(inst.dimacs_of[v] - 1) as usize])),
    )
}

/// Decide satisfiability under assumption literals on source variables.
pub fn solve(
    inst: &CnfInstance,
    assumptions: &[(VarId, bool)],
    budget: &OracleBudget,
) -> Result<SatOutcome, OracleError> {
    let mut forced_free: Vec<(VarId, bool)> = Vec::new();
    let mut lits: Vec<Lit> = Vec::new();
    for (v, b) in assumptions {
        match inst.dimacs_lit(*v, *b) {
            Some(d) => lits.push(to_internal(d)),
            None => {
                // Variable absent from the CNF: unconstrained, but the
                // assumption must still be consistent and reflected in the
                // model.
                if forced_free.iter().any(|(w, c)| w == v && c != b) {
                    return Ok(SatOutcome {
                        verdict: Verdict::Unsat,
                        model: None,
                    });
                }
                forced_free.push((*v, *b));
            }
        }
    }
    let mut solver = build_solver(inst);
    match solver.solve(&lits, budget.limits(None))? {
        SolveOutcome::Sat(model) => {
            let mut asg = model_assignment(inst, &model);
            for (v, b) in forced_free {
                asg.set(v, b);
            }
            Ok(SatOutcome {
                verdict: Verdict::Sat,
                model: Some(asg),
            })
        }
        SolveOutcome::Unsat => Ok(SatOutcome {
            verdict: Verdict::Unsat,
            model: None,
        }),
    }
}

/// Count distinct projections of models onto `proj`, blocking each found
/// projection. Projection variables absent from the CNF are added as free
/// variables so both of their values are enumerated. Returns the count and
/// whether the space was exhausted (`false` exactly when the cap was hit).
pub fn enumerate_projected(
    inst: &CnfInstance,
    proj: &[VarId],
    cap: Option<u64>,
    budget: &OracleBudget,
) -> Result<(u64, bool), OracleError> {
    if cap == Some(0) {
        return Ok((0, false));
    }
    let mut solver = build_solver(inst);
    let mut proj_lits: Vec<(VarId, u32)> = Vec::new();
    let mut extra = inst.num_vars;
    for v in proj {
        match inst.dimacs_of.get(v) {
            Some(d) => proj_lits.push((*v, (*d - 1) as u32)),
            None => {
                proj_lits.push((*v, extra));
                extra += 1;
            }
        }
    }
    solver.ensure_vars(extra as usize);
    let mut count: u64 = 0;
    loop {
        match solver.solve(&[], budget.limits(None))? {
            SolveOutcome::Unsat => return Ok((count, true)),
            SolveOutcome::Sat(model) => {
                count += 1;
                let blocking: Vec<Lit> = proj_lits
                    .iter()
                    .map(|(_, var)| lit(*var, model[*var as usize]))
                    .collect();
                if blocking.is_empty() {
                    // Empty projection: a single projected model exists.
                    return Ok((count, true));
                }
                solver.add_clause(blocking);
                if let Some(c) = cap {
                    if count >= c {
                        return Ok((count, false));
                    }
                }
            }
        }
    }
}

/// Sample up to `k` models distinct on the source variables, using seeded
/// random decision variables and polarities. Deterministic for a fixed
/// seed; returns fewer than `k` models when the space is smaller.
pub fn sample_diverse(
    inst: &CnfInstance,
    k: usize,
    seed: u64,
    budget: &OracleBudget,
) -> Result<Vec<Assignment>, OracleError> {
    let mut solver = build_solver(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < k {
        match solver.solve(&[], budget.limits(Some(&mut rng)))? {
            SolveOutcome::Unsat => break,
            SolveOutcome::Sat(model) => {
                out.push(model_assignment(inst, &model));
                let blocking: Vec<Lit> = inst
                    .source_vars
                    .iter()
                    .map(|v| {
                        let d = (inst.dimacs_of[v] - 1) as u32;
                        lit(d, model[d as usize])
                    })
                    .collect();
                if blocking.is_empty() {
                    break; // constant-true instance has one (empty) model
                }
                solver.add_clause(blocking);
            }
        }
    }
    Ok(out)
}
