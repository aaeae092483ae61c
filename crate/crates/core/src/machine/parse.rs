//! Line-oriented machine DSL.
//!
//! ```text
//! machine sq                       # comments run to end of line
//! input 1 -> c
//! node c compute x1 := x1*x1 goto o
//! node o output [1]
//! ```
//!
//! Other node forms: `node ID branch <poly> ? ID1 : ID0` (ID1 when the
//! polynomial is >= 0) and `node ID shift left|right goto ID`.

use std::collections::{BTreeMap, BTreeSet};

use super::expr::parse_expr;
use super::{Diagnostic, Direction, Machine, MachineError, Node, NodeKind, RationalMap, INPUT_NODE};

pub fn parse_machine(text: &str) -> Result<Machine, MachineError> {
    let mut diags = Vec::new();
    let mut name: Option<String> = None;
    let mut nodes: Vec<(usize, Node)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut err = |message: String| diags.push(Diagnostic { line: line_no, message });
        let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match head {
            "machine" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    err("expected `machine NAME`".into());
                } else if name.is_some() {
                    err("machine name declared twice".into());
                } else {
                    name = Some(rest.to_string());
                }
            }
            "input" => match parse_input(rest) {
                Ok(kind) => nodes.push((line_no, Node { id: INPUT_NODE.to_string(), kind })),
                Err(m) => err(m),
            },
            "node" => match parse_node(rest) {
                Ok(node) => nodes.push((line_no, node)),
                Err(m) => err(m),
            },
            other => err(format!("unknown directive `{other}`")),
        }
    }

    if name.is_none() {
        diags.push(Diagnostic { line: 0, message: "missing `machine NAME` line".into() });
    }
    let inputs: Vec<usize> = nodes
        .iter()
        .filter(|(_, n)| matches!(n.kind, NodeKind::Input { .. }))
        .map(|(l, _)| *l)
        .collect();
    if inputs.is_empty() {
        diags.push(Diagnostic { line: 0, message: "missing `input ARITY -> NODE` line".into() });
    }
    for &l in inputs.iter().skip(1) {
        diags.push(Diagnostic { line: l, message: "a machine has a unique input node".into() });
    }

    let mut declared: BTreeMap<&str, usize> = BTreeMap::new();
    for (line, n) in &nodes {
        if matches!(n.kind, NodeKind::Input { .. }) && inputs.len() > 1 {
            continue;
        }
        if let Some(first) = declared.insert(n.id.as_str(), *line) {
            diags.push(Diagnostic {
                line: *line,
                message: format!("duplicate node id `{}` (first declared on line {first})", n.id),
            });
        }
    }
    for (line, n) in &nodes {
        for s in n.successors() {
            if !declared.contains_key(s) {
                diags.push(Diagnostic { line: *line, message: format!("unknown node `{s}`") });
            } else if s == INPUT_NODE {
                diags.push(Diagnostic {
                    line: *line,
                    message: "the input node has no incoming edges".into(),
                });
            }
        }
    }
    if !diags.is_empty() {
        return Err(MachineError::Invalid(diags));
    }
    let mut seen = BTreeSet::new();
    let unique: Vec<Node> = nodes.into_iter().map(|(_, n)| n).filter(|n| seen.insert(n.id.clone())).collect();
    Machine::new(name.unwrap_or_default(), unique, INPUT_NODE)
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn parse_input(rest: &str) -> Result<NodeKind, String> {
    let (arity, next) = rest.split_once("->").ok_or("input node has exactly one outgoing edge: expected `input ARITY -> NODE`")?;
    let arity: usize = arity.trim().parse().map_err(|_| format!("bad arity `{}`", arity.trim()))?;
    let next = next.trim();
    if !is_ident(next) {
        return Err(format!("bad node id `{next}`"));
    }
    Ok(NodeKind::Input { arity, next: next.to_string() })
}

fn parse_node(rest: &str) -> Result<Node, String> {
    let (id, rest) = rest.split_once(char::is_whitespace).ok_or("expected `node ID KIND ...`")?;
    if !is_ident(id) {
        return Err(format!("bad node id `{id}`"));
    }
    let rest = rest.trim();
    let (kind, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let body = body.trim();
    let kind = match kind {
        "compute" => parse_compute(body)?,
        "branch" => parse_branch(body)?,
        "shift" => parse_shift(body)?,
        "output" => parse_output(body)?,
        other => return Err(format!("unknown node kind `{other}`")),
    };
    Ok(Node { id: id.to_string(), kind })
}

fn split_goto(body: &str, what: &str) -> Result<(String, String), String> {
    match body.rsplit_once("goto") {
        Some((lhs, target)) if is_ident(target.trim()) => Ok((lhs.trim().to_string(), target.trim().to_string())),
        Some((_, target)) => Err(format!("bad node id `{}`", target.trim())),
        None => Err(format!("{what} node has exactly one output edge: missing `goto ID`")),
    }
}

fn parse_compute(body: &str) -> Result<NodeKind, String> {
    let (assigns, next) = split_goto(body, "computation")?;
    let mut map = BTreeMap::new();
    for a in assigns.split(',') {
        let (lhs, rhs) = a.split_once(":=").ok_or_else(|| format!("expected `x<i> := expr`, got `{}`", a.trim()))?;
        let lhs = lhs.trim();
        let idx = parse_coord(lhs).ok_or_else(|| format!("bad coordinate `{lhs}`"))?;
        let r = parse_expr(rhs)?.to_ratfn().ok_or("division by the zero polynomial")?;
        if map.insert(idx, (r.num, r.den)).is_some() {
            return Err(format!("coordinate `{lhs}` assigned twice"));
        }
    }
    let map = RationalMap::new(map).ok_or("division by the zero polynomial")?;
    Ok(NodeKind::Computation { map, next })
}

fn parse_coord(s: &str) -> Option<i64> {
    let s = s.strip_prefix('x')?;
    if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        return inner.trim().parse().ok();
    }
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_branch(body: &str) -> Result<NodeKind, String> {
    const RULE: &str = "branch node has exactly two output edges";
    let (test, edges) = body.split_once('?').ok_or_else(|| format!("{RULE}: expected `<poly> ? ID1 : ID0`"))?;
    let (one, zero) = edges.split_once(':').ok_or_else(|| format!("{RULE}: missing `: ID0`"))?;
    let (one, zero) = (one.trim(), zero.trim());
    if one.is_empty() || zero.is_empty() {
        return Err(format!("{RULE}: missing edge target"));
    }
    if !is_ident(one) || !is_ident(zero) {
        return Err(format!("bad node id in `{}`", edges.trim()));
    }
    let test = parse_expr(test)?
        .to_poly()
        .ok_or("branch tests must be polynomials")?;
    Ok(NodeKind::Branch { test, if_nonneg: one.to_string(), if_neg: zero.to_string() })
}

fn parse_shift(body: &str) -> Result<NodeKind, String> {
    let (dir, next) = split_goto(body, "shift")?;
    let direction = match dir.as_str() {
        "left" => Direction::Left,
        "right" => Direction::Right,
        other => return Err(format!("shift direction must be `left` or `right`, got `{other}`")),
    };
    Ok(NodeKind::Shift { direction, next })
}

fn parse_output(body: &str) -> Result<NodeKind, String> {
    if body.contains("goto") {
        return Err("output node has no output edges".into());
    }
    let inner = body
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or("expected `output [i, j, ...]`")?;
    let coords = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|_| format!("bad coordinate `{}`", c.trim())))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(NodeKind::Output { coords })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squaring_machine_has_three_nodes() {
        let m = parse_machine("machine sq\ninput 1 -> c\nnode c compute x1 := x1*x1 goto o\nnode o output [1]\n")
            .unwrap();
        assert_eq!(m.nodes().len(), 3);
        assert_eq!(m.arity(), 1);
    }

    #[test]
    fn unknown_reference_is_named() {
        let e = parse_machine("machine m\ninput 1 -> foo\nnode o output [1]\n").unwrap_err();
        let d = &e.diagnostics()[0];
        assert_eq!(d.line, 2);
        assert!(d.message.contains("`foo`"), "{}", d.message);
    }

    #[test]
    fn branch_with_missing_edge() {
        let e = parse_machine("machine m\ninput 1 -> b\nnode b branch x1 ? o\nnode o output [1]\n").unwrap_err();
        let d = &e.diagnostics()[0];
        assert_eq!(d.line, 3);
        assert!(d.message.contains("exactly two output edges"), "{}", d.message);
    }

    #[test]
    fn reports_every_problem() {
        let src = "machine m\ninput 1 -> a\nnode a compute x1 := x1 goto z\nnode a output [1]\nnode b compute x1 := x1\nnode c output [1] goto a\n";
        let e = parse_machine(src).unwrap_err();
        let lines: Vec<usize> = e.diagnostics().iter().map(|d| d.line).collect();
        assert!(lines.contains(&4), "duplicate id: {e}");
        assert!(lines.contains(&5), "missing goto: {e}");
        assert!(lines.contains(&6), "output with edge: {e}");
        assert!(lines.contains(&3), "unknown target: {e}");
    }

    #[test]
    fn rejects_non_rational_literals_and_nonpolynomial_tests() {
        assert!(parse_machine("machine m\ninput 1 -> c\nnode c compute x1 := 1e3 goto o\nnode o output [1]\n").is_err());
        assert!(parse_machine("machine m\ninput 1 -> b\nnode b branch 1/x1 ? o : o\nnode o output [1]\n").is_err());
    }

    #[test]
    fn disconnected_graph_rejected() {
        let e = parse_machine("machine m\ninput 1 -> o\nnode o output [1]\nnode p output [1]\n").unwrap_err();
        assert!(e.to_string().contains("not connected"));
    }

    #[test]
    fn negative_coordinates_and_comments() {
        let m = parse_machine(
            "machine m # header\ninput 2 -> c\nnode c compute x[-1] := x1 - x2, x1 := 0.5 goto o\nnode o output [-1, 1]\n",
        )
        .unwrap();
        let out = crate::machine::run(&m, &vec![crate::scalar::Scalar::from_int(3), crate::scalar::Scalar::from_int(1)], 10);
        assert_eq!(
            out,
            crate::machine::RunResult::Output(vec![crate::scalar::Scalar::from_int(2), crate::scalar::Scalar::new(1, 2)])
        );
    }
}
