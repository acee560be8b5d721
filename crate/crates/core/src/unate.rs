//! Syntactic and semantic unate detection with fixpoint elimination.
//!
//! An output that is positive (negative) unate in the specification gets the
//! constant 1 (0) as its Skolem function, and the constant is substituted
//! into the circuit before any further analysis. Substitution can make
//! other outputs unate, so detection repeats until a full round finds
//! nothing. Purity of a literal is a syntactic witness of unateness and is
//! always tried before the two semantic oracle queries.

use std::collections::BTreeSet;

use crate::circuit::{Dag, NodeRef, VarId};
use crate::error::OracleError;
use crate::nnf::{self, HatCircuit, Purity};
use crate::sat::{self, OracleBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unateness {
    PosUnate,
    NegUnate,
    Binate,
}

/// Outcome of the fixpoint: detected constants, the reduced circuit, and
/// the semantic-check budget actually spent.
#[derive(Debug)]
pub struct UnateResult {
    /// Negative-unate outputs; their Skolem function is 0.
    pub u0: BTreeSet<VarId>,
    /// Positive-unate outputs (including outputs the circuit does not
    /// depend on); their Skolem function is 1.
    pub u1: BTreeSet<VarId>,
    /// The specification after substituting all detected constants, in
    /// renamed NNF form over the remaining outputs.
    pub reduced: HatCircuit,
    /// Output variables still binate in the reduced circuit, ascending
    /// declaration order.
    pub remaining: Vec<VarId>,
    pub oracle_calls: u64,
}

/// Semantic unateness of `x` in the plain NNF circuit at `root`:
/// positive unate iff F[x=0] and not F[x=1] is unsatisfiable, negative
/// unate iff the mirrored formula is. A variable unate in both polarities
/// reports positive (the positive check runs first).
pub fn semantic_unate_check(
    dag: &mut Dag,
    root: NodeRef,
    x: VarId,
    budget: &OracleBudget,
    oracle_calls: &mut u64,
) -> Result<Unateness, OracleError> {
    let cof0 = dag.cofactor(root, x, false);
    let cof1 = dag.cofactor(root, x, true);
    let not_cof1 = dag.not(cof1);
    let eta_plus = dag.and([cof0, not_cof1]);
    *oracle_calls += 1;
    if !sat::solve(&sat::encode(dag, eta_plus), &[], budget)?.is_sat() {
        return Ok(Unateness::PosUnate);
    }
    let not_cof0 = dag.not(cof0);
    let eta_minus = dag.and([cof1, not_cof0]);
    *oracle_calls += 1;
    if !sat::solve(&sat::encode(dag, eta_minus), &[], budget)?.is_sat() {
        return Ok(Unateness::NegUnate);
    }
    Ok(Unateness::Binate)
}

/// Run the detect-and-substitute loop to a fixpoint over the plain NNF
/// circuit, then rebuild the renamed form of the reduced circuit.
pub fn unate_fixpoint(
    dag: &mut Dag,
    plain_root: NodeRef,
    outputs: &[VarId],
    budget: &OracleBudget,
) -> Result<UnateResult, OracleError> {
    let mut u0 = BTreeSet::new();
    let mut u1 = BTreeSet::new();
    let mut reduced = plain_root;
    let mut oracle_calls = 0u64;
    loop {
        let mut changed = false;
        for &x in outputs {
            if u0.contains(&x) || u1.contains(&x) {
                continue;
            }
            let purity = nnf::pure_literals(dag, reduced, &[x])[&x];
            let detected = match purity {
                // Absent: the circuit no longer depends on x; both constants
                // work, classified positive.
                Purity::PosPure | Purity::Absent => Some(Unateness::PosUnate),
                Purity::NegPure => Some(Unateness::NegUnate),
                Purity::Mixed => {
                    match semantic_unate_check(dag, reduced, x, budget, &mut oracle_calls)? {
                        Unateness::Binate => None,
                        u => Some(u),
                    }
                }
            };
            match detected {
                Some(Unateness::PosUnate) => {
                    reduced = dag.cofactor(reduced, x, true);
                    u1.insert(x);
                    changed = true;
                }
                Some(Unateness::NegUnate) => {
                    reduced = dag.cofactor(reduced, x, false);
                    u0.insert(x);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let remaining: Vec<VarId> = outputs
        .iter()
        .filter(|x| !u0.contains(x) && !u1.contains(x))
        .copied()
        .collect();
    let reduced_hat = nnf::hat_transform(dag, reduced, &remaining);
    Ok(UnateResult {
        u0,
        u1,
        reduced: reduced_hat,
        remaining,
        oracle_calls,
    })
}
