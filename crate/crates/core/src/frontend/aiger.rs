//! AIGER ASCII ("aag") reading and writing.
//!
//! Literals follow the AIGER convention: variable v has literals 2v
//! (positive) and 2v+1 (complemented); literals 0 and 1 are the constants.
//! Ingestion normalizes the two-input AND/complement structure into the
//! n-ary AND/OR leaf-polarity form by building both phases of every gate,
//! so the result is negation normal and at most twice the AIG size.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::circuit::{Dag, Node, NodeRef, Spec, VarId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AigerError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed line {0}: {1}")]
    MalformedLine(usize, String),
    #[error("dangling literal {0}: not a constant, input or defined gate")]
    DanglingLiteral(u64),
    #[error("cyclic gate definition at variable {0}")]
    CyclicDefinition(u64),
    #[error("latches are not supported (sequential circuit)")]
    LatchPresent,
    #[error("specification must have exactly one output, found {0}")]
    WrongOutputCount(usize),
    #[error("input {0} has no symbol; cannot partition inputs from outputs")]
    NoSymbolForPartition(usize),
    #[error("symbol {0}: {1}")]
    BadSymbol(String, String),
}

/// Parsed AIGER ASCII file, structurally validated.
#[derive(Debug, Clone, Default)]
pub struct AigerFile {
    pub max_var: u64,
    /// Input literals in declaration order (always even).
    pub inputs: Vec<u64>,
    pub num_latches: usize,
    pub outputs: Vec<u64>,
    /// (lhs, rhs0, rhs1) gate triples; lhs is even.
    pub ands: Vec<(u64, u64, u64)>,
    /// Input/output symbol tables, by position.
    pub input_symbols: BTreeMap<usize, String>,
    pub output_symbols: BTreeMap<usize, String>,
}

fn parse_u64(token: &str, line_no: usize) -> Result<u64, AigerError> {
    token
        .parse::<u64>()
        .map_err(|_| AigerError::MalformedLine(line_no, format!("bad number '{token}'")))
}

/// Parse AIGER ASCII text into its raw structure.
pub fn parse_aiger(text: &str) -> Result<AigerFile, AigerError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| AigerError::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "aag" {
        return Err(AigerError::MalformedHeader(format!(
            "expected 'aag M I L O A', got '{header}'"
        )));
    }
    let nums: Vec<u64> = fields[1..]
        .iter()
        .map(|t| parse_u64(t, 1))
        .collect::<Result<_, _>>()?;
    let (max_var, num_inputs, num_latches, num_outputs, num_ands) =
        (nums[0], nums[1] as usize, nums[2] as usize, nums[3] as usize, nums[4]);
    if nums[1] + nums[2] + nums[4] > max_var {
        return Err(AigerError::MalformedHeader(format!(
            "M = {max_var} is smaller than I + L + A"
        )));
    }

    let mut file = AigerFile {
        max_var,
        num_latches,
        ..AigerFile::default()
    };
    let expect = |lines: &mut std::iter::Enumerate<std::str::Lines>,
                      what: &str|
     -> Result<(usize, String), AigerError> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l.to_string())),
            None => Err(AigerError::MalformedHeader(format!(
                "file ends before {what} section is complete"
            ))),
        }
    };
    for _ in 0..num_inputs {
        let (no, line) = expect(&mut lines, "input")?;
        let l = parse_u64(line.trim(), no)?;
        if l < 2 || l % 2 != 0 || l / 2 > max_var {
            return Err(AigerError::MalformedLine(no, format!("bad input literal {l}")));
        }
        file.inputs.push(l);
    }
    for _ in 0..num_latches {
        // Consumed but rejected later; a latch line is "lit next [init]".
        let (_, _line) = expect(&mut lines, "latch")?;
    }
    for _ in 0..num_outputs {
        let (no, line) = expect(&mut lines, "output")?;
        let l = parse_u64(line.trim(), no)?;
        if l / 2 > max_var {
            return Err(AigerError::MalformedLine(no, format!("bad output literal {l}")));
        }
        file.outputs.push(l);
    }
    for _ in 0..num_ands {
        let (no, line) = expect(&mut lines, "and-gate")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(AigerError::MalformedLine(no, "expected 'lhs rhs0 rhs1'".into()));
        }
        let lhs = parse_u64(toks[0], no)?;
        let rhs0 = parse_u64(toks[1], no)?;
        let rhs1 = parse_u64(toks[2], no)?;
        if lhs < 2 || lhs % 2 != 0 || lhs / 2 > max_var {
            return Err(AigerError::MalformedLine(no, format!("bad gate literal {lhs}")));
        }
        if rhs0 / 2 > max_var || rhs1 / 2 > max_var {
            return Err(AigerError::MalformedLine(no, "gate operand out of range".into()));
        }
        file.ands.push((lhs, rhs0, rhs1));
    }
    // Symbol table and comments.
    for (i, line) in lines {
        let no = i + 1;
        if line == "c" {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        let kind = &line[..line.chars().next().map_or(0, char::len_utf8)];
        let rest = &line[kind.len()..];
        let mut parts = rest.splitn(2, ' ');
        let idx_tok = parts.next().unwrap_or("");
        let name = parts.next().unwrap_or("").to_string();
        let idx = idx_tok
            .parse::<usize>()
            .map_err(|_| AigerError::MalformedLine(no, format!("bad symbol line '{line}'")))?;
        match kind {
            "i" if idx < file.inputs.len() => {
                file.input_symbols.insert(idx, name);
            }
            "o" if idx < file.outputs.len() => {
                file.output_symbols.insert(idx, name);
            }
            "l" => {}
            _ => {
                return Err(AigerError::MalformedLine(no, format!("bad symbol line '{line}'")))
            }
        }
    }
    Ok(file)
}

/// Build both phases of the AIG into the arena. `leaf_of` maps each input
/// position to its variable. Returns one node per output literal.
fn build_phases(
    dag: &mut Dag,
    file: &AigerFile,
    leaf_of: &BTreeMap<u64, VarId>,
) -> Result<Vec<NodeRef>, AigerError> {
    let gate_of: HashMap<u64, (u64, u64)> = file
        .ands
        .iter()
        .map(|(lhs, r0, r1)| (lhs / 2, (*r0, *r1)))
        .collect();
    // node_of literal -> NodeRef, both phases built on demand, iteratively.
    let mut node_of: HashMap<u64, NodeRef> = HashMap::new();
    node_of.insert(0, dag.constant(false));
    node_of.insert(1, dag.constant(true));
    for (lit, var) in leaf_of {
        node_of.insert(*lit, dag.var(*var));
        node_of.insert(*lit + 1, dag.neg_var(*var));
    }
    let mut resolve = |dag: &mut Dag, root_lit: u64| -> Result<NodeRef, AigerError> {
        // Iterative post-order with a cycle guard.
        let mut in_progress: HashMap<u64, bool> = HashMap::new();
        let mut stack = vec![root_lit];
        while let Some(&l) = stack.last() {
            if node_of.contains_key(&l) {
                stack.pop();
                continue;
            }
            let var = l / 2;
            let Some(&(r0, r1)) = gate_of.get(&var) else {
                return Err(AigerError::DanglingLiteral(l));
            };
            match in_progress.get(&var) {
                None => {
                    in_progress.insert(var, true);
                    // Both phases need both operand phases.
                    stack.extend([r0, r1, r0 ^ 1, r1 ^ 1]);
                }
                Some(true) => {
                    let ready = [r0, r1, r0 ^ 1, r1 ^ 1]
                        .iter()
                        .all(|d| node_of.contains_key(d));
                    if !ready {
                        return Err(AigerError::CyclicDefinition(var));
                    }
                    let pos = dag.and([node_of[&r0], node_of[&r1]]);
                    let neg = dag.or([node_of[&(r0 ^ 1)], node_of[&(r1 ^ 1)]]);
                    node_of.insert(var * 2, pos);
                    node_of.insert(var * 2 + 1, neg);
                    in_progress.insert(var, false);
                    stack.pop();
                }
                Some(false) => {
                    stack.pop();
                }
            }
        }
        Ok(node_of[&root_lit])
    };
    file.outputs
        .iter()
        .map(|l| resolve(dag, *l))
        .collect()
}

/// Convert a parsed single-output AIGER file into a specification. Inputs
/// whose symbol starts with `x_prefix` become outputs X, the rest inputs Y.
pub fn spec_from_aiger(file: &AigerFile, x_prefix: &str) -> Result<Spec, AigerError> {
    if file.num_latches > 0 {
        return Err(AigerError::LatchPresent);
    }
    if file.outputs.len() != 1 {
        return Err(AigerError::WrongOutputCount(file.outputs.len()));
    }
    let mut dag = Dag::new();
    let mut leaf_of = BTreeMap::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (pos, lit) in file.inputs.iter().enumerate() {
        let name = file
            .input_symbols
            .get(&pos)
            .ok_or(AigerError::NoSymbolForPartition(pos))?;
        let var = dag.var_by_name(name);
        leaf_of.insert(*lit, var);
        if name.starts_with(x_prefix) {
            xs.push(var);
        } else {
            ys.push(var);
        }
    }
    let roots = build_phases(&mut dag, file, &leaf_of)?;
    Ok(Spec::new(dag, roots[0], xs, ys))
}

/// Read a Skolem-function file (multi-output AIGER over the spec's inputs)
/// against a specification: input symbols must name spec inputs, output
/// symbols must name each spec output exactly once. Returns the function
/// for every spec output, built into the spec's arena.
pub fn skolem_from_aiger(
    spec: &mut Spec,
    text: &str,
) -> Result<BTreeMap<VarId, NodeRef>, AigerError> {
    let file = parse_aiger(text)?;
    if file.num_latches > 0 {
        return Err(AigerError::LatchPresent);
    }
    let mut leaf_of = BTreeMap::new();
    for (pos, lit) in file.inputs.iter().enumerate() {
        let name = file
            .input_symbols
            .get(&pos)
            .ok_or(AigerError::NoSymbolForPartition(pos))?;
        let var = spec.dag.lookup_var(name).ok_or_else(|| {
            AigerError::BadSymbol(name.clone(), "not a specification variable".into())
        })?;
        if !spec.inputs.contains(&var) {
            return Err(AigerError::BadSymbol(
                name.clone(),
                "Skolem file inputs must be specification inputs".into(),
            ));
        }
        leaf_of.insert(*lit, var);
    }
    if file.outputs.len() != spec.outputs.len() {
        return Err(AigerError::WrongOutputCount(file.outputs.len()));
    }
    let roots = build_phases(&mut spec.dag, &file, &leaf_of)?;
    let mut map = BTreeMap::new();
    for (pos, root) in roots.iter().enumerate() {
        let name = file.output_symbols.get(&pos).ok_or_else(|| {
            AigerError::BadSymbol(format!("o{pos}"), "output symbol required".into())
        })?;
        let var = spec.dag.lookup_var(name).ok_or_else(|| {
            AigerError::BadSymbol(name.clone(), "not a specification variable".into())
        })?;
        if !spec.outputs.contains(&var) || map.contains_key(&var) {
            return Err(AigerError::BadSymbol(
                name.clone(),
                "each specification output must appear exactly once".into(),
            ));
        }
        map.insert(var, *root);
    }
    Ok(map)
}

/// Serialize Skolem functions as a multi-output AIGER ASCII file over the
/// given inputs; output symbols carry the output variable names.
pub fn write_skolem_aiger(dag: &Dag, inputs: &[VarId], psi: &[(VarId, NodeRef)]) -> String {
    let outputs: Vec<(String, NodeRef)> = psi
        .iter()
        .map(|(v, root)| (dag.var_name(*v).to_string(), *root))
        .collect();
    write_circuit_aiger(dag, inputs, &outputs)
}

/// Serialize arbitrary circuits as AIGER ASCII over the given inputs.
/// Each circuit is converted to two-input AND gates with complemented
/// edges; OR nodes go through De Morgan.
pub fn write_circuit_aiger(
    dag: &Dag,
    inputs: &[VarId],
    named_outputs: &[(String, NodeRef)],
) -> String {
    let num_inputs = inputs.len() as u64;
    let input_lit: BTreeMap<VarId, u64> = inputs
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, 2 * (i as u64 + 1)))
        .collect();
    let mut gates: Vec<(u64, u64, u64)> = Vec::new();
    let mut next_var = num_inputs;
    let mut memo: HashMap<NodeRef, u64> = HashMap::new();

    let mut emit =
        |dag: &Dag, root: NodeRef, gates: &mut Vec<(u64, u64, u64)>, next_var: &mut u64| -> u64 {
            let chain = |a: u64, b: u64, gates: &mut Vec<(u64, u64, u64)>, next_var: &mut u64| {
                match (a, b) {
                    (0, _) | (_, 0) => 0,
                    (1, l) | (l, 1) => l,
                    _ => {
                        *next_var += 1;
                        let lhs = *next_var * 2;
                        gates.push((lhs, a.max(b), a.min(b)));
                        lhs
                    }
                }
            };
            for r in dag.topo_reachable(root) {
                if memo.contains_key(&r) {
                    continue;
                }
                let lit = match dag.node(r) {
                    Node::Const(b) => *b as u64,
                    Node::Var { var, negated } => input_lit[var] ^ *negated as u64,
                    Node::And(ch) => {
                        let mut acc = 1;
                        for c in ch.iter() {
                            acc = chain(acc, memo[c], gates, next_var);
                        }
                        acc
                    }
                    Node::Or(ch) => {
                        let mut acc = 1;
                        for c in ch.iter() {
                            acc = chain(acc, memo[c] ^ 1, gates, next_var);
                        }
                        acc ^ 1
                    }
                };
                memo.insert(r, lit);
            }
            memo[&root]
        };

    let outputs: Vec<u64> = named_outputs
        .iter()
        .map(|(_, root)| emit(dag, *root, &mut gates, &mut next_var))
        .collect();

    let mut out = String::new();
    out.push_str(&format!(
        "aag {} {} 0 {} {}\n",
        next_var,
        num_inputs,
        outputs.len(),
        gates.len()
    ));
    for i in 0..inputs.len() {
        out.push_str(&format!("{}\n", 2 * (i + 1)));
    }
    for o in &outputs {
        out.push_str(&format!("{o}\n"));
    }
    for (lhs, a, b) in &gates {
        out.push_str(&format!("{lhs} {a} {b}\n"));
    }
    for (i, v) in inputs.iter().enumerate() {
        out.push_str(&format!("i{i} {}\n", dag.var_name(*v)));
    }
    for (i, (name, _)) in named_outputs.iter().enumerate() {
        out.push_str(&format!("o{i} {name}\n"));
    }
    out
}
