//! QDIMACS reading for 2QBF specifications: a universal block (the inputs
//! Y), then an existential block (the outputs X), then a CNF matrix. The
//! matrix becomes an AND-of-ORs circuit, which is already in NNF.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{Dag, Spec, VarId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum QdimacsError {
    #[error("malformed line {0}: {1}")]
    MalformedLine(usize, String),
    #[error("expected exactly two quantifier blocks, universal then existential")]
    WrongQuantifierShape,
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
}

/// Parse QDIMACS text into a specification. Existential variables become
/// the outputs X, universal variables the inputs Y.
pub fn parse_qdimacs(text: &str) -> Result<Spec, QdimacsError> {
    let mut num_vars: Option<u64> = None;
    let mut num_clauses: Option<usize> = None;
    // Quantifier blocks in order of appearance; consecutive lines of the
    // same quantifier merge into one block.
    let mut blocks: Vec<(char, Vec<u64>)> = Vec::new();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut in_matrix = false;

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if num_vars.is_some() {
                return Err(QdimacsError::MalformedLine(no, "duplicate p line".into()));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                return Err(QdimacsError::MalformedLine(
                    no,
                    format!("expected 'p cnf V C', got '{line}'"),
                ));
            }
            num_vars = Some(toks[2].parse::<u64>().map_err(|_| {
                QdimacsError::MalformedLine(no, "bad variable count".into())
            })?);
            num_clauses = Some(toks[3].parse::<usize>().map_err(|_| {
                QdimacsError::MalformedLine(no, "bad clause count".into())
            })?);
            continue;
        }
        if line.starts_with('a') || line.starts_with('e') {
            if in_matrix {
                return Err(QdimacsError::MalformedLine(
                    no,
                    "quantifier line after matrix start".into(),
                ));
            }
            let q = line.chars().next().unwrap();
            let mut vars = Vec::new();
            for tok in line[1..].split_whitespace() {
                let v = tok.parse::<i64>().map_err(|_| {
                    QdimacsError::MalformedLine(no, format!("bad variable '{tok}'"))
                })?;
                if v == 0 {
                    break;
                }
                if v < 0 {
                    return Err(QdimacsError::MalformedLine(
                        no,
                        "negative variable in prefix".into(),
                    ));
                }
                vars.push(v as u64);
            }
            match blocks.last_mut() {
                Some((last_q, last_vars)) if *last_q == q => last_vars.extend(vars),
                _ => blocks.push((q, vars)),
            }
            continue;
        }
        // Matrix line(s): integers, clauses terminated by 0.
        in_matrix = true;
        for tok in line.split_whitespace() {
            let v = tok.parse::<i64>().map_err(|_| {
                QdimacsError::MalformedLine(no, format!("bad literal '{tok}'"))
            })?;
            if v == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(v);
            }
        }
    }
    if !current.is_empty() {
        return Err(QdimacsError::ArityMismatch(
            "last clause is not zero-terminated".into(),
        ));
    }
    let num_vars =
        num_vars.ok_or_else(|| QdimacsError::ArityMismatch("missing p line".into()))?;
    if let Some(c) = num_clauses {
        if clauses.len() != c {
            return Err(QdimacsError::ArityMismatch(format!(
                "p line declares {c} clauses, found {}",
                clauses.len()
            )));
        }
    }
    if blocks.len() != 2 || blocks[0].0 != 'a' || blocks[1].0 != 'e' {
        return Err(QdimacsError::WrongQuantifierShape);
    }

    let mut dag = Dag::new();
    let mut var_of: BTreeMap<u64, VarId> = BTreeMap::new();
    let mut declare = |dag: &mut Dag, nums: &[u64]| -> Result<Vec<VarId>, QdimacsError> {
        let mut out = Vec::with_capacity(nums.len());
        for v in nums {
            if *v == 0 || *v > num_vars {
                return Err(QdimacsError::ArityMismatch(format!(
                    "variable {v} out of range 1..={num_vars}"
                )));
            }
            if var_of.contains_key(v) {
                return Err(QdimacsError::ArityMismatch(format!(
                    "variable {v} declared twice"
                )));
            }
            let id = dag.var_by_name(&v.to_string());
            var_of.insert(*v, id);
            out.push(id);
        }
        Ok(out)
    };
    let ys = declare(&mut dag, &blocks[0].1)?;
    let xs = declare(&mut dag, &blocks[1].1)?;

    let mut clause_nodes = Vec::with_capacity(clauses.len());
    for clause in &clauses {
        let mut lits = Vec::with_capacity(clause.len());
        for l in clause {
            let v = l.unsigned_abs();
            let id = var_of.get(&v).ok_or_else(|| {
                QdimacsError::ArityMismatch(format!("literal {l} uses an undeclared variable"))
            })?;
            lits.push(dag.literal(*id, *l < 0));
        }
        clause_nodes.push(dag.or(lits));
    }
    let root = dag.and(clause_nodes);
    Ok(Spec::new(dag, root, xs, ys))
}
