//! Structural Verilog emission for synthesized functions: one module with
//! the specification inputs as ports, one output per Skolem function, and
//! assign statements restricted to `&`, `|`, `~`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::circuit::{Dag, Node, NodeRef, VarId};

fn sanitize(name: &str, taken: &mut HashSet<String>) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() || s.chars().next().unwrap().is_ascii_digit() {
        s.insert(0, 'v');
    }
    let mut candidate = s.clone();
    let mut k = 1;
    while !taken.insert(candidate.clone()) {
        k += 1;
        candidate = format!("{s}_{k}");
    }
    candidate
}

/// Emit a `skolem` module. Shared internal nodes become shared wires.
pub fn write_skolem_verilog(dag: &Dag, inputs: &[VarId], psi: &[(VarId, NodeRef)]) -> String {
    let mut taken = HashSet::new();
    let mut port_of: BTreeMap<VarId, String> = BTreeMap::new();
    for v in inputs.iter().chain(psi.iter().map(|(v, _)| v)) {
        let name = sanitize(dag.var_name(*v), &mut taken);
        port_of.insert(*v, name);
    }

    // Collect reachable internal nodes over all functions, in topo order.
    let mut wire_of: HashMap<NodeRef, String> = HashMap::new();
    let mut order: Vec<NodeRef> = Vec::new();
    let mut seen = HashSet::new();
    for (_, root) in psi {
        for r in dag.topo_reachable(*root) {
            if seen.insert(r) && matches!(dag.node(r), Node::And(_) | Node::Or(_)) {
                order.push(r);
            }
        }
    }
    order.sort_unstable();
    for r in &order {
        wire_of.insert(*r, format!("w{}", r.0));
    }

    let operand = |r: NodeRef| -> String {
        match dag.node(r) {
            Node::Const(b) => if *b { "1'b1" } else { "1'b0" }.to_string(),
            Node::Var { var, negated } => {
                let p = &port_of[var];
                if *negated {
                    format!("~{p}")
                } else {
                    p.clone()
                }
            }
            Node::And(_) | Node::Or(_) => wire_of[&r].clone(),
        }
    };

    let mut out = String::new();
    let ports: Vec<String> = inputs
        .iter()
        .chain(psi.iter().map(|(v, _)| v))
        .map(|v| port_of[v].clone())
        .collect();
    let _ = writeln!(out, "module skolem({});", ports.join(", "));
    for v in inputs {
        let _ = writeln!(out, "  input {};", port_of[v]);
    }
    for (v, _) in psi {
        let _ = writeln!(out, "  output {};", port_of[v]);
    }
    for r in &order {
        let _ = writeln!(out, "  wire {};", wire_of[r]);
    }
    for r in &order {
        let (op, children) = match dag.node(*r) {
            Node::And(ch) => (" & ", ch),
            Node::Or(ch) => (" | ", ch),
            _ => unreachable!(),
        };
        let expr: Vec<String> = children.iter().map(|c| operand(*c)).collect();
        let _ = writeln!(out, "  assign {} = {};", wire_of[r], expr.join(op));
    }
    for (v, root) in psi {
        let _ = writeln!(out, "  assign {} = {};", port_of[v], operand(*root));
    }
    out.push_str("endmodule\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_module_shape() {
        let mut dag = Dag::new();
        let y1 = dag.var_by_name("y1");
        let y2 = dag.var_by_name("y2");
        let x1 = dag.var_by_name("x1");
        let a = dag.var(y1);
        let nb = dag.neg_var(y2);
        let f = dag.and([a, nb]);
        let text = write_skolem_verilog(&dag, &[y1, y2], &[(x1, f)]);
        assert!(text.starts_with("module skolem(y1, y2, x1);"));
        assert!(text.contains("input y1;"));
        assert!(text.contains("output x1;"));
        assert!(text.contains("= y1 & ~y2;"));
        assert!(text.ends_with("endmodule\n"));
        // Only the permitted operators appear.
        assert!(!text.contains('^') && !text.contains('+'));
    }

    #[test]
    fn constant_and_leaf_outputs() {
        let mut dag = Dag::new();
        let y1 = dag.var_by_name("y1");
        let x1 = dag.var_by_name("x1");
        let x2 = dag.var_by_name("x2");
        let one = dag.constant(true);
        let leaf = dag.var(y1);
        let text = write_skolem_verilog(&dag, &[y1], &[(x1, one), (x2, leaf)]);
        assert!(text.contains("assign x1 = 1'b1;"));
        assert!(text.contains("assign x2 = y1;"));
    }

    #[test]
    fn hostile_names_are_sanitized() {
        let mut dag = Dag::new();
        let y1 = dag.var_by_name("3bad name");
        let x1 = dag.var_by_name("3bad-name");
        let leaf = dag.var(y1);
        let text = write_skolem_verilog(&dag, &[y1], &[(x1, leaf)]);
        assert!(text.contains("module skolem(v3bad_name, v3bad_name_2);"));
    }
}
