//! Evaluation of both logics over a system, bottom-up over the dag.

use std::collections::HashMap;

use crate::modalities::{evaluate, sugeno_evaluate, ModalityError};
use crate::systems::{LabelMetric, StateSet, System};
use crate::values::{join, meet, truncated_add, truncated_sub, Value};

use super::arena::{Arena, Formula2, FormulaQ, Node2, NodeId, NodeQ};

/// `⟦φ⟧_ε = { x | x ⊨_ε φ }`.
pub fn eval2(phi: &Formula2, sys: &System, eps: &Value) -> Result<StateSet, ModalityError> {
    eval2_with(phi, sys, &sys.label_metric(), eps)
}

pub fn eval2_with(phi: &Formula2, sys: &System, metric: &LabelMetric, eps: &Value) -> Result<StateSet, ModalityError> {
    let n = sys.len();
    let seen = phi.arena.reachable(phi.root);
    let mut memo: Vec<Option<StateSet>> = vec![None; seen.len()];
    for id in 0..=phi.root {
        if !seen[id as usize] {
            continue;
        }
        let get = |c: &NodeId| memo[*c as usize].as_ref().expect("children first");
        let set = match phi.arena.get(id) {
            Node2::Top => StateSet::full(n),
            Node2::Bot => StateSet::empty(n),
            Node2::And(l, r) => get(l).intersection(get(r)),
            Node2::Or(l, r) => get(l).union(get(r)),
            Node2::Mod(m, q, c) => {
                let inner = get(c);
                let bound = truncated_sub(q, eps);
                let mut out = StateSet::empty(n);
                for x in 0..n {
                    if evaluate(m, inner, sys.payload(x), metric)? >= bound {
                        out.insert(x);
                    }
                }
                out
            }
        };
        memo[id as usize] = Some(set);
    }
    Ok(memo[phi.root as usize].take().expect("root evaluated"))
}

/// `⟦φ⟧: X → [0,1]`.
pub fn eval_q(phi: &FormulaQ, sys: &System) -> Result<Vec<Value>, ModalityError> {
    eval_q_with(phi, sys, &sys.label_metric())
}

pub fn eval_q_with(phi: &FormulaQ, sys: &System, metric: &LabelMetric) -> Result<Vec<Value>, ModalityError> {
    let n = sys.len();
    let seen = phi.arena.reachable(phi.root);
    let mut memo: Vec<Option<Vec<Value>>> = vec![None; seen.len()];
    for id in 0..=phi.root {
        if !seen[id as usize] {
            continue;
        }
        let get = |c: &NodeId| memo[*c as usize].as_ref().expect("children first");
        let vals = match phi.arena.get(id) {
            NodeQ::Top => vec![Value::one(); n],
            NodeQ::Bot => vec![Value::zero(); n],
            NodeQ::And(l, r) => get(l).iter().zip(get(r)).map(|(a, b)| meet(a, b)).collect(),
            NodeQ::Or(l, r) => get(l).iter().zip(get(r)).map(|(a, b)| join(a, b)).collect(),
            NodeQ::ShiftUp(c, q) => get(c).iter().map(|a| truncated_add(a, q)).collect(),
            NodeQ::ShiftDown(c, q) => get(c).iter().map(|a| truncated_sub(a, q)).collect(),
            NodeQ::Sugeno(m, c) => {
                let f = get(c);
                (0..n)
                    .map(|x| sugeno_evaluate(m, f, sys.payload(x), metric))
                    .collect::<Result<_, _>>()?
            }
        };
        memo[id as usize] = Some(vals);
    }
    Ok(memo[phi.root as usize].take().expect("root evaluated"))
}

/// Memoized evaluation of single `(node, state)` pairs of a growing arena,
/// touching only what the requested values depend on.
pub struct LazyEvalQ<'s> {
    sys: &'s System,
    metric: LabelMetric,
    memo: HashMap<(NodeId, usize), Value>,
}

impl<'s> LazyEvalQ<'s> {
    pub fn new(sys: &'s System, metric: LabelMetric) -> Self {
        LazyEvalQ {
            sys,
            metric,
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, arena: &Arena<NodeQ>, id: NodeId, x: usize) -> Result<Value, ModalityError> {
        let n = self.sys.len();
        let mut stack = vec![(id, x)];
        while let Some(&(node, s)) = stack.last() {
            if self.memo.contains_key(&(node, s)) {
                stack.pop();
                continue;
            }
            let mut missing = Vec::new();
            let deps: Vec<(NodeId, usize)> = match arena.get(node) {
                NodeQ::Top | NodeQ::Bot => Vec::new(),
                NodeQ::And(l, r) | NodeQ::Or(l, r) => vec![(*l, s), (*r, s)],
                NodeQ::ShiftUp(c, _) | NodeQ::ShiftDown(c, _) => vec![(*c, s)],
                NodeQ::Sugeno(_, c) => self.sys.payload(s).support(n).iter().map(|t| (*c, t)).collect(),
            };
            for d in deps {
                if !self.memo.contains_key(&d) {
                    missing.push(d);
                }
            }
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let v = match arena.get(node) {
                NodeQ::Top => Value::one(),
                NodeQ::Bot => Value::zero(),
                NodeQ::And(l, r) => meet(&self.memo[&(*l, s)], &self.memo[&(*r, s)]),
                NodeQ::Or(l, r) => join(&self.memo[&(*l, s)], &self.memo[&(*r, s)]),
                NodeQ::ShiftUp(c, q) => truncated_add(&self.memo[&(*c, s)], q),
                NodeQ::ShiftDown(c, q) => truncated_sub(&self.memo[&(*c, s)], q),
                NodeQ::Sugeno(m, c) => {
                    // Values off the support do not affect the modality.
                    let payload = self.sys.payload(s);
                    let mut f = vec![Value::zero(); n];
                    for t in payload.support(n).iter() {
                        f[t] = self.memo[&(*c, t)].clone();
                    }
                    sugeno_evaluate(m, &f, payload, &self.metric)?
                }
            };
            self.memo.insert((node, s), v);
            stack.pop();
        }
        Ok(self.memo[&(id, x)].clone())
    }
}

/// Memoized single-state satisfaction `x ⊨_ε φ` for a growing arena.
pub struct LazyEval2<'s> {
    sys: &'s System,
    metric: LabelMetric,
    eps: Value,
    memo: HashMap<(NodeId, usize), bool>,
}

impl<'s> LazyEval2<'s> {
    pub fn new(sys: &'s System, metric: LabelMetric, eps: Value) -> Self {
        LazyEval2 {
            sys,
            metric,
            eps,
            memo: HashMap::new(),
        }
    }

    pub fn holds(&mut self, arena: &Arena<Node2>, id: NodeId, x: usize) -> Result<bool, ModalityError> {
        let n = self.sys.len();
        let mut stack = vec![(id, x)];
        while let Some(&(node, s)) = stack.last() {
            if self.memo.contains_key(&(node, s)) {
                stack.pop();
                continue;
            }
            let deps: Vec<(NodeId, usize)> = match arena.get(node) {
                Node2::Top | Node2::Bot => Vec::new(),
                Node2::And(l, r) | Node2::Or(l, r) => vec![(*l, s), (*r, s)],
                Node2::Mod(_, _, c) => self.sys.payload(s).support(n).iter().map(|t| (*c, t)).collect(),
            };
            let missing: Vec<_> = deps.into_iter().filter(|d| !self.memo.contains_key(d)).collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            let b = match arena.get(node) {
                Node2::Top => true,
                Node2::Bot => false,
                Node2::And(l, r) => self.memo[&(*l, s)] && self.memo[&(*r, s)],
                Node2::Or(l, r) => self.memo[&(*l, s)] || self.memo[&(*r, s)],
                Node2::Mod(m, q, c) => {
                    let payload = self.sys.payload(s);
                    let inner = StateSet::from_states(n, payload.support(n).iter().filter(|t| self.memo[&(*c, *t)]));
                    evaluate(m, &inner, payload, &self.metric)? >= truncated_sub(q, &self.eps)
                }
            };
            self.memo.insert((node, s), b);
            stack.pop();
        }
        Ok(self.memo[&(id, x)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::arena::{Arena, Formula};
    use crate::modalities::ModalityId;
    use crate::systems::load_system;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn pair() -> System {
        load_system(r#"{"type":"markov_chain","states":["x","y"],"transitions":{"x":{"x":"1"},"y":{"y":"9/10"}}}"#)
            .unwrap()
    }

    #[test]
    fn two_valued_examples() {
        let s = pair();
        let mut a = Arena::<Node2>::new();
        let t = a.top();
        let b = a.bot();
        let m = a.modal(ModalityId::prob(), Value::one(), t);
        let arena = std::sync::Arc::new(a);
        let f = |root| Formula { arena: arena.clone(), root };
        assert_eq!(eval2(&f(t), &s, &Value::zero()).unwrap(), StateSet::full(2));
        assert!(eval2(&f(b), &s, &Value::zero()).unwrap().is_empty());
        let at0 = eval2(&f(m), &s, &Value::zero()).unwrap();
        assert!(at0.contains(0) && !at0.contains(1));
        assert!(!eval2(&f(m), &s, &v("1/20")).unwrap().contains(1));
        assert!(eval2(&f(m), &s, &v("1/10")).unwrap().contains(1));
    }

    #[test]
    fn quantitative_examples() {
        let s = pair();
        let mut a = Arena::<NodeQ>::new();
        let t = a.top();
        let g = a.sugeno(ModalityId::prob(), t);
        let d = a.shift_down(g, v("1/2"));
        let arena = std::sync::Arc::new(a);
        let f = |root| Formula { arena: arena.clone(), root };
        assert_eq!(eval_q(&f(g), &s).unwrap(), vec![Value::one(), v("9/10")]);
        assert_eq!(eval_q(&f(d), &s).unwrap()[1], v("2/5"));
        let neg = crate::logic::negate_q(&f(g), None).unwrap();
        assert_eq!(eval_q(&neg, &s).unwrap()[1], v("1/10"));

        let mut lazy = LazyEvalQ::new(&s, s.label_metric());
        assert_eq!(lazy.value(&arena, d, 1).unwrap(), v("2/5"));
        assert_eq!(lazy.value(&arena, g, 0).unwrap(), Value::one());
    }
}
