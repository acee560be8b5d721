//! Candidate quality as an exact rational: the fraction of input
//! assignments on which the candidate vector fails, computed by capped
//! projected enumeration of the error formula over the inputs.

use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, BigUint, FromPrimitive, One, Zero};

use crate::circuit::{Dag, NodeRef, VarId};
use crate::error::OracleError;
use crate::sat::{self, OracleBudget};

/// Ratio of failing input assignments to 2^m, kept exact. When the
/// enumeration cap was hit, `exact` is false and the ratio is a lower
/// bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goodness {
    pub numerator: u64,
    /// log2 of the denominator, i.e. the number of inputs m.
    pub log2_den: u32,
    pub exact: bool,
}

impl Goodness {
    pub fn is_zero(&self) -> bool {
        self.numerator == 0 && self.exact
    }

    pub fn as_rational(&self) -> BigRational {
        let num = num::BigInt::from_u64(self.numerator).unwrap();
        let den = num::BigInt::from(BigUint::one() << self.log2_den);
        BigRational::new(num, den)
    }

    /// Exact comparison against the fraction p/q.
    pub fn cmp_fraction(&self, p: u64, q: u64) -> Ordering {
        assert!(q > 0);
        // numerator / 2^m  <=>  p / q
        let lhs = BigUint::from(self.numerator) * BigUint::from(q);
        let rhs = (BigUint::one() << self.log2_den) * BigUint::from(p);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Goodness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.as_rational();
        if r.is_zero() {
            write!(f, "0")?;
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())?;
        }
        if !self.exact {
            write!(f, " (lower bound)")?;
        }
        Ok(())
    }
}

/// Count the input projections of the error formula's models. `inputs`
/// must be the specification's input block; `cap` bounds the enumeration.
pub fn goodness_ratio(
    dag: &Dag,
    eps_root: NodeRef,
    inputs: &[VarId],
    cap: Option<u64>,
    budget: &OracleBudget,
) -> Result<Goodness, OracleError> {
    let inst = sat::encode(dag, eps_root);
    let (numerator, exhausted) = sat::enumerate_projected(&inst, inputs, cap, budget)?;
    Ok(Goodness {
        numerator,
        log2_den: inputs.len() as u32,
        exact: exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase1::build_error_formula;
    use std::collections::BTreeMap;

    #[test]
    fn wrong_single_output_fails_everywhere() {
        // X = Y (n = 1) with psi = !y: both input values fail, ratio 1.
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let vx = dag.var(x1);
        let vy = dag.var(y1);
        let root = dag.iff(vx, vy);
        let wrong = dag.neg_var(y1);
        let psi: BTreeMap<VarId, NodeRef> = [(x1, wrong)].into();
        let eps = build_error_formula(&mut dag, root, &[x1], &psi);
        let g = goodness_ratio(&dag, eps.root, &[y1], None, &OracleBudget::default())
            .unwrap();
        assert_eq!(g.numerator, 2);
        assert_eq!(g.log2_den, 1);
        assert!(g.exact);
        assert_eq!(g.cmp_fraction(1, 1), Ordering::Equal);
    }

    #[test]
    fn quarter_ratio_case() {
        // F = x1 <-> (y1 & y2), psi = 0: fails only at y1 = y2 = 1.
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let vx = dag.var(x1);
        let vy1 = dag.var(y1);
        let vy2 = dag.var(y2);
        let conj = dag.and([vy1, vy2]);
        let root = dag.iff(vx, conj);
        let zero = dag.constant(false);
        let psi: BTreeMap<VarId, NodeRef> = [(x1, zero)].into();
        let eps = build_error_formula(&mut dag, root, &[x1], &psi);
        let g = goodness_ratio(&dag, eps.root, &[y1, y2], None, &OracleBudget::default())
            .unwrap();
        assert_eq!(g.numerator, 1);
        assert_eq!(g.log2_den, 2);
        assert_eq!(g.cmp_fraction(1, 4), Ordering::Equal);
        assert_eq!(g.cmp_fraction(1, 500), Ordering::Greater);
        assert_eq!(g.cmp_fraction(9, 10), Ordering::Less);
    }

    #[test]
    fn correct_vector_scores_zero() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let vx = dag.var(x1);
        let vy = dag.var(y1);
        let root = dag.iff(vx, vy);
        let psi: BTreeMap<VarId, NodeRef> = [(x1, vy)].into();
        let eps = build_error_formula(&mut dag, root, &[x1], &psi);
        let g = goodness_ratio(&dag, eps.root, &[y1], None, &OracleBudget::default())
            .unwrap();
        assert!(g.is_zero());
        assert_eq!(format!("{g}"), "0");
    }

    #[test]
    fn capped_count_is_lower_bound() {
        let mut dag = Dag::new();
        let x1 = dag.var_by_name("x1");
        let y1 = dag.var_by_name("y1");
        let vx = dag.var(x1);
        let vy = dag.var(y1);
        let root = dag.iff(vx, vy);
        let wrong = dag.neg_var(y1);
        let psi: BTreeMap<VarId, NodeRef> = [(x1, wrong)].into();
        let eps = build_error_formula(&mut dag, root, &[x1], &psi);
        let g = goodness_ratio(&dag, eps.root, &[y1], Some(1), &OracleBudget::default())
            .unwrap();
        assert_eq!(g.numerator, 1);
        assert!(!g.exact);
        assert!(format!("{g}").contains("lower bound"));
    }
}
