//! Rendering formulae in the text syntax accepted by the parser.

use super::arena::{Formula2, FormulaQ, Node2, NodeId, NodeQ};

enum Task {
    Node(NodeId),
    Text(String),
}

/// Prints the unfolded tree; size is the formula's tree size.
pub fn print_formula2(phi: &Formula2) -> String {
    let mut out = String::new();
    let mut stack = vec![Task::Node(phi.root)];
    while let Some(t) = stack.pop() {
        match t {
            Task::Text(s) => out.push_str(&s),
            Task::Node(id) => match phi.node(id) {
                Node2::Top => out.push_str("tt"),
                Node2::Bot => out.push_str("ff"),
                Node2::And(l, r) | Node2::Or(l, r) => {
                    let op = if matches!(phi.node(id), Node2::And(..)) { " & " } else { " | " };
                    out.push('(');
                    stack.push(Task::Text(")".into()));
                    stack.push(Task::Node(*r));
                    stack.push(Task::Text(op.into()));
                    stack.push(Task::Node(*l));
                }
                Node2::Mod(m, q, c) => {
                    out.push_str(&format!("[{m}>={q}] "));
                    stack.push(Task::Node(*c));
                }
            },
        }
    }
    out
}

pub fn print_formula_q(phi: &FormulaQ) -> String {
    let mut out = String::new();
    let mut stack = vec![Task::Node(phi.root)];
    while let Some(t) = stack.pop() {
        match t {
            Task::Text(s) => out.push_str(&s),
            Task::Node(id) => match phi.node(id) {
                NodeQ::Top => out.push_str("tt"),
                NodeQ::Bot => out.push_str("ff"),
                NodeQ::And(l, r) | NodeQ::Or(l, r) => {
                    let op = if matches!(phi.node(id), NodeQ::And(..)) { " & " } else { " | " };
                    out.push('(');
                    stack.push(Task::Text(")".into()));
                    stack.push(Task::Node(*r));
                    stack.push(Task::Text(op.into()));
                    stack.push(Task::Node(*l));
                }
                NodeQ::ShiftUp(c, q) => {
                    stack.push(Task::Text(format!(" (+) {q}")));
                    stack.push(Task::Node(*c));
                }
                NodeQ::ShiftDown(c, q) => {
                    stack.push(Task::Text(format!(" (-) {q}")));
                    stack.push(Task::Node(*c));
                }
                NodeQ::Sugeno(m, c) => {
                    out.push_str(&format!("<{m}> "));
                    // Shifts are postfix and bind loosest, so they need
                    // grouping under a modality.
                    if matches!(phi.node(*c), NodeQ::ShiftUp(..) | NodeQ::ShiftDown(..)) {
                        out.push('(');
                        stack.push(Task::Text(")".into()));
                    }
                    stack.push(Task::Node(*c));
                }
            },
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_formula2, parse_formula_q};

    #[test]
    fn print_parse_roundtrip() {
        for s in ["[P>=1] tt", "([P>=1/2] ff | [~P>=0] (tt & ff))", "[P[a]>=3/7] [dia[b]>=1] tt"] {
            let f = parse_formula2(s).unwrap();
            assert_eq!(print_formula2(&f), s);
        }
        for s in [
            "<P> tt",
            "<P> tt (-) 1/2",
            "<P> (<P> tt (+) 1/3)",
            "(<fdia> tt (-) 1/4 & ff (+) 1) (-) 1/8",
            "<~mdia[a]> (tt | <cdia> ff)",
        ] {
            let f = parse_formula_q(s).unwrap();
            let printed = print_formula_q(&f);
            assert_eq!(printed, s);
            assert!(parse_formula_q(&printed).unwrap().same_tree(&f));
        }
    }
}
