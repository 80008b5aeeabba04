//! JSON form of formula dags: a topologically sorted node list in which
//! children always precede their parents.
//!
//! ```json
//! {"nodes": [{"id": 0, "op": "tt"},
//!            {"id": 1, "op": "mod", "modality": "P", "threshold": "1", "child": 0}],
//!  "root": 1}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modalities::ModalityId;
use crate::values::Value;

use super::arena::{Arena, Formula, Formula2, FormulaQ, Node2, NodeId, NodeQ};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DagNode {
    pub id: NodeId,
    pub op: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub children: Option<Vec<NodeId>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub child: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modality: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub amount: Option<Value>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    pub nodes: Vec<DagNode>,
    pub root: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("formula dag node {node}: {message}")]
pub struct DagError {
    pub node: usize,
    pub message: String,
}

fn blank(id: NodeId, op: &str) -> DagNode {
    DagNode {
        id,
        op: op.to_string(),
        children: None,
        child: None,
        modality: None,
        threshold: None,
        amount: None,
    }
}

pub fn dag_of_formula2(phi: &Formula2) -> Dag {
    let c = phi.compact();
    let nodes = (0..c.arena.len() as NodeId)
        .map(|id| match c.node(id) {
            Node2::Top => blank(id, "tt"),
            Node2::Bot => blank(id, "ff"),
            Node2::And(l, r) => DagNode {
                children: Some(vec![*l, *r]),
                ..blank(id, "and")
            },
            Node2::Or(l, r) => DagNode {
                children: Some(vec![*l, *r]),
                ..blank(id, "or")
            },
            Node2::Mod(m, q, ch) => DagNode {
                modality: Some(m.to_string()),
                threshold: Some(q.clone()),
                child: Some(*ch),
                ..blank(id, "mod")
            },
        })
        .collect();
    Dag { nodes, root: c.root }
}

pub fn dag_of_formula_q(phi: &FormulaQ) -> Dag {
    let c = phi.compact();
    let nodes = (0..c.arena.len() as NodeId)
        .map(|id| match c.node(id) {
            NodeQ::Top => blank(id, "tt"),
            NodeQ::Bot => blank(id, "ff"),
            NodeQ::And(l, r) => DagNode {
                children: Some(vec![*l, *r]),
                ..blank(id, "and")
            },
            NodeQ::Or(l, r) => DagNode {
                children: Some(vec![*l, *r]),
                ..blank(id, "or")
            },
            NodeQ::ShiftUp(ch, q) => DagNode {
                amount: Some(q.clone()),
                child: Some(*ch),
                ..blank(id, "shift_up")
            },
            NodeQ::ShiftDown(ch, q) => DagNode {
                amount: Some(q.clone()),
                child: Some(*ch),
                ..blank(id, "shift_down")
            },
            NodeQ::Sugeno(m, ch) => DagNode {
                modality: Some(m.to_string()),
                child: Some(*ch),
                ..blank(id, "sugeno")
            },
        })
        .collect();
    Dag { nodes, root: c.root }
}

fn fail<T>(node: usize, message: impl Into<String>) -> Result<T, DagError> {
    Err(DagError {
        node,
        message: message.into(),
    })
}

struct Checked<'d> {
    n: &'d DagNode,
    i: usize,
}

impl Checked<'_> {
    fn earlier(&self, c: NodeId) -> Result<NodeId, DagError> {
        if (c as usize) < self.i {
            Ok(c)
        } else {
            fail(self.i, format!("child {c} does not precede its parent"))
        }
    }

    fn pair(&self) -> Result<(NodeId, NodeId), DagError> {
        match self.n.children.as_deref() {
            Some([l, r]) => Ok((self.earlier(*l)?, self.earlier(*r)?)),
            _ => fail(self.i, "expected exactly two children"),
        }
    }

    fn single(&self) -> Result<NodeId, DagError> {
        match self.n.child {
            Some(c) => self.earlier(c),
            None => fail(self.i, "missing child"),
        }
    }

    fn modality(&self) -> Result<ModalityId, DagError> {
        match &self.n.modality {
            Some(m) => m.parse().or_else(|e: crate::modalities::ModalityError| fail(self.i, e.to_string())),
            None => fail(self.i, "missing modality"),
        }
    }

    fn value(&self, v: &Option<Value>, what: &str) -> Result<Value, DagError> {
        v.clone().map_or_else(|| fail(self.i, format!("missing {what}")), Ok)
    }
}

fn check_ids(dag: &Dag) -> Result<(), DagError> {
    for (i, n) in dag.nodes.iter().enumerate() {
        if n.id as usize != i {
            return fail(i, format!("id {} out of sequence", n.id));
        }
    }
    if dag.root as usize >= dag.nodes.len() {
        return fail(dag.root as usize, "root does not exist");
    }
    Ok(())
}

/// Rebuilds a two-valued formula; structurally equal nodes are merged.
pub fn formula2_of_dag(dag: &Dag) -> Result<Formula2, DagError> {
    check_ids(dag)?;
    let mut arena = Arena::new();
    let mut map = Vec::with_capacity(dag.nodes.len());
    for (i, n) in dag.nodes.iter().enumerate() {
        let c = Checked { n, i };
        let m = |id: NodeId| map[id as usize];
        let node = match n.op.as_str() {
            "tt" => Node2::Top,
            "ff" => Node2::Bot,
            "and" => {
                let (l, r) = c.pair()?;
                Node2::And(m(l), m(r))
            }
            "or" => {
                let (l, r) = c.pair()?;
                Node2::Or(m(l), m(r))
            }
            "mod" => Node2::Mod(c.modality()?, c.value(&n.threshold, "threshold")?, m(c.single()?)),
            other => return fail(i, format!("unknown two-valued op `{other}`")),
        };
        map.push(arena.intern(node));
    }
    Ok(Formula::new(arena, map[dag.root as usize]))
}

pub fn formula_q_of_dag(dag: &Dag) -> Result<FormulaQ, DagError> {
    check_ids(dag)?;
    let mut arena = Arena::new();
    let mut map = Vec::with_capacity(dag.nodes.len());
    for (i, n) in dag.nodes.iter().enumerate() {
        let c = Checked { n, i };
        let m = |id: NodeId| map[id as usize];
        let node = match n.op.as_str() {
            "tt" => NodeQ::Top,
            "ff" => NodeQ::Bot,
            "and" => {
                let (l, r) = c.pair()?;
                NodeQ::And(m(l), m(r))
            }
            "or" => {
                let (l, r) = c.pair()?;
                NodeQ::Or(m(l), m(r))
            }
            "shift_up" => NodeQ::ShiftUp(m(c.single()?), c.value(&n.amount, "amount")?),
            "shift_down" => NodeQ::ShiftDown(m(c.single()?), c.value(&n.amount, "amount")?),
            "sugeno" => NodeQ::Sugeno(c.modality()?, m(c.single()?)),
            other => return fail(i, format!("unknown quantitative op `{other}`")),
        };
        map.push(arena.intern(node));
    }
    Ok(Formula::new(arena, map[dag.root as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::{parse_formula2, parse_formula_q};

    #[test]
    fn dag_roundtrip() {
        let f = parse_formula2("([P>=1] tt & [P>=1] tt)").unwrap();
        let d = dag_of_formula2(&f);
        assert_eq!(d.nodes.len(), 3);
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains(r#"{"id":1,"op":"mod","child":0,"modality":"P","threshold":"1"}"#), "{json}");
        let back: Dag = serde_json::from_str(&json).unwrap();
        assert!(formula2_of_dag(&back).unwrap().same_tree(&f));

        let g = parse_formula_q("<~P> (<P> tt (-) 1/3 | ff (+) 1/2)").unwrap();
        let d = dag_of_formula_q(&g);
        assert!(formula_q_of_dag(&d).unwrap().same_tree(&g));
    }

    #[test]
    fn rejects_forward_children() {
        let d = Dag {
            nodes: vec![DagNode {
                child: Some(0),
                modality: Some("P".into()),
                threshold: Some(Value::one()),
                ..blank(0, "mod")
            }],
            root: 0,
        };
        assert!(formula2_of_dag(&d).is_err());
    }
}
