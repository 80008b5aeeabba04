//! Hash-consed formula dags.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use crate::modalities::ModalityId;
use crate::values::Value;

pub type NodeId = u32;

/// Two-valued formulae: `⊥ | ⊤ | φ∧ψ | φ∨ψ | λ_q φ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node2 {
    Top,
    Bot,
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    /// `λ_q φ`: satisfied up to `ε` when `λ(⟦φ⟧_ε)(ξ(x)) ≥ q ⊖ ε`.
    Mod(ModalityId, Value, NodeId),
}

/// Quantitative formulae: `⊥ | ⊤ | φ∧ψ | φ∨ψ | φ⊕q | φ⊖q | ⟨λ⟩φ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NodeQ {
    Top,
    Bot,
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    ShiftUp(NodeId, Value),
    ShiftDown(NodeId, Value),
    Sugeno(ModalityId, NodeId),
}

pub trait Node: Clone + Eq + Hash {
    fn children(&self) -> impl Iterator<Item = NodeId>;
    fn is_modal(&self) -> bool;
}

impl Node for Node2 {
    fn children(&self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match self {
            Node2::Top | Node2::Bot => (None, None),
            Node2::And(l, r) | Node2::Or(l, r) => (Some(*l), Some(*r)),
            Node2::Mod(_, _, c) => (Some(*c), None),
        };
        a.into_iter().chain(b)
    }

    fn is_modal(&self) -> bool {
        matches!(self, Node2::Mod(..))
    }
}

impl Node for NodeQ {
    fn children(&self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match self {
            NodeQ::Top | NodeQ::Bot => (None, None),
            NodeQ::And(l, r) | NodeQ::Or(l, r) => (Some(*l), Some(*r)),
            NodeQ::ShiftUp(c, _) | NodeQ::ShiftDown(c, _) | NodeQ::Sugeno(_, c) => (Some(*c), None),
        };
        a.into_iter().chain(b)
    }

    fn is_modal(&self) -> bool {
        matches!(self, NodeQ::Sugeno(..))
    }
}

/// Node storage where structurally equal nodes get the same id. Children
/// always have smaller ids than their parents.
#[derive(Clone, Debug)]
pub struct Arena<N> {
    nodes: Vec<N>,
    index: HashMap<N, NodeId>,
}

impl<N: Node> Default for Arena<N> {
    fn default() -> Self {
        Arena {
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }
}

impl<N: Node> Arena<N> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, node: N) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId::try_from(self.nodes.len()).expect("arena exceeds u32 nodes");
        debug_assert!(node.children().all(|c| c < id));
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn get(&self, id: NodeId) -> &N {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Marks the nodes reachable from `root`.
    pub fn reachable(&self, root: NodeId) -> Vec<bool> {
        let mut seen = vec![false; root as usize + 1];
        seen[root as usize] = true;
        for id in (0..=root).rev() {
            if seen[id as usize] {
                for c in self.get(id).children() {
                    seen[c as usize] = true;
                }
            }
        }
        seen
    }
}

impl Arena<Node2> {
    pub fn top(&mut self) -> NodeId {
        self.intern(Node2::Top)
    }

    pub fn bot(&mut self) -> NodeId {
        self.intern(Node2::Bot)
    }

    pub fn and(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.intern(Node2::And(l, r))
    }

    pub fn or(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.intern(Node2::Or(l, r))
    }

    pub fn modal(&mut self, m: ModalityId, q: Value, c: NodeId) -> NodeId {
        self.intern(Node2::Mod(m, q, c))
    }

    /// Balanced conjunction of the distinct ids; empty is `⊤`.
    pub fn big_and(&mut self, ids: &[NodeId]) -> NodeId {
        balanced(self, ids, Node2::Top, Node2::And)
    }

    /// Balanced disjunction; empty is `⊥`.
    pub fn big_or(&mut self, ids: &[NodeId]) -> NodeId {
        balanced(self, ids, Node2::Bot, Node2::Or)
    }
}

impl Arena<NodeQ> {
    pub fn top(&mut self) -> NodeId {
        self.intern(NodeQ::Top)
    }

    pub fn bot(&mut self) -> NodeId {
        self.intern(NodeQ::Bot)
    }

    pub fn and(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.intern(NodeQ::And(l, r))
    }

    pub fn or(&mut self, l: NodeId, r: NodeId) -> NodeId {
        self.intern(NodeQ::Or(l, r))
    }

    pub fn shift_up(&mut self, c: NodeId, q: Value) -> NodeId {
        self.intern(NodeQ::ShiftUp(c, q))
    }

    pub fn shift_down(&mut self, c: NodeId, q: Value) -> NodeId {
        self.intern(NodeQ::ShiftDown(c, q))
    }

    pub fn sugeno(&mut self, m: ModalityId, c: NodeId) -> NodeId {
        self.intern(NodeQ::Sugeno(m, c))
    }

    pub fn big_and(&mut self, ids: &[NodeId]) -> NodeId {
        balanced(self, ids, NodeQ::Top, NodeQ::And)
    }

    pub fn big_or(&mut self, ids: &[NodeId]) -> NodeId {
        balanced(self, ids, NodeQ::Bot, NodeQ::Or)
    }
}

fn balanced<N: Node>(arena: &mut Arena<N>, ids: &[NodeId], unit: N, join: fn(NodeId, NodeId) -> N) -> NodeId {
    let mut seen = std::collections::HashSet::with_capacity(ids.len());
    let distinct: Vec<NodeId> = ids.iter().copied().filter(|id| seen.insert(*id)).collect();
    balanced_distinct(arena, &distinct, unit, join)
}

fn balanced_distinct<N: Node>(arena: &mut Arena<N>, ids: &[NodeId], unit: N, join: fn(NodeId, NodeId) -> N) -> NodeId {
    match ids {
        [] => arena.intern(unit),
        [one] => *one,
        _ => {
            let mid = ids.len() / 2;
            let l = balanced_distinct(arena, &ids[..mid], unit.clone(), join);
            let r = balanced_distinct(arena, &ids[mid..], unit, join);
            arena.intern(join(l, r))
        }
    }
}

/// A root inside a shared, frozen arena.
#[derive(Clone, Debug)]
pub struct Formula<N> {
    pub arena: Arc<Arena<N>>,
    pub root: NodeId,
}

pub type Formula2 = Formula<Node2>;
pub type FormulaQ = Formula<NodeQ>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metrics {
    /// Distinct nodes reachable from the root.
    pub dag_size: usize,
    /// Nodes of the unfolded tree, saturating.
    pub tree_size: u128,
    /// Maximal nesting depth of modalities.
    pub modal_rank: usize,
}

impl<N: Node> Formula<N> {
    pub fn new(arena: Arena<N>, root: NodeId) -> Self {
        Formula {
            arena: Arc::new(arena),
            root,
        }
    }

    pub fn node(&self, id: NodeId) -> &N {
        self.arena.get(id)
    }

    pub fn root_node(&self) -> &N {
        self.arena.get(self.root)
    }

    pub fn metrics(&self) -> Metrics {
        let seen = self.arena.reachable(self.root);
        let mut tree = vec![0u128; seen.len()];
        let mut rank = vec![0usize; seen.len()];
        let mut dag = 0;
        for id in 0..=self.root {
            if !seen[id as usize] {
                continue;
            }
            dag += 1;
            let n = self.arena.get(id);
            let mut t: u128 = 1;
            let mut r = 0;
            for c in n.children() {
                t = t.saturating_add(tree[c as usize]);
                r = r.max(rank[c as usize]);
            }
            tree[id as usize] = t;
            rank[id as usize] = r + usize::from(n.is_modal());
        }
        Metrics {
            dag_size: dag,
            tree_size: tree[self.root as usize],
            modal_rank: rank[self.root as usize],
        }
    }

    /// Copies the reachable part into a fresh arena, numbering nodes in
    /// depth-first post-order so that equal trees yield equal arenas.
    pub fn compact(&self) -> Formula<N>
    where
        N: Remap,
    {
        const UNSET: NodeId = NodeId::MAX;
        let mut map = vec![UNSET; self.root as usize + 1];
        let mut out = Arena::new();
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if map[id as usize] != UNSET {
                continue;
            }
            let n = self.arena.get(id);
            if expanded {
                map[id as usize] = out.intern(n.remap(&map));
            } else {
                stack.push((id, true));
                let kids: Vec<NodeId> = n.children().collect();
                for c in kids.into_iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        Formula::new(out, map[self.root as usize])
    }

    /// Structural equality of the unfolded trees, computed on the dags.
    pub fn same_tree(&self, other: &Formula<N>) -> bool
    where
        N: Remap,
    {
        let a = self.compact();
        let b = other.compact();
        a.arena.len() == b.arena.len()
            && a.root == b.root
            && (0..a.arena.len() as NodeId).all(|i| a.arena.get(i) == b.arena.get(i))
    }
}

/// Rewrites child ids through a map.
pub trait Remap: Node {
    fn remap(&self, map: &[NodeId]) -> Self;
}

impl Remap for Node2 {
    fn remap(&self, m: &[NodeId]) -> Self {
        match self {
            Node2::Top => Node2::Top,
            Node2::Bot => Node2::Bot,
            Node2::And(l, r) => Node2::And(m[*l as usize], m[*r as usize]),
            Node2::Or(l, r) => Node2::Or(m[*l as usize], m[*r as usize]),
            Node2::Mod(md, q, c) => Node2::Mod(md.clone(), q.clone(), m[*c as usize]),
        }
    }
}

impl Remap for NodeQ {
    fn remap(&self, m: &[NodeId]) -> Self {
        match self {
            NodeQ::Top => NodeQ::Top,
            NodeQ::Bot => NodeQ::Bot,
            NodeQ::And(l, r) => NodeQ::And(m[*l as usize], m[*r as usize]),
            NodeQ::Or(l, r) => NodeQ::Or(m[*l as usize], m[*r as usize]),
            NodeQ::ShiftUp(c, q) => NodeQ::ShiftUp(m[*c as usize], q.clone()),
            NodeQ::ShiftDown(c, q) => NodeQ::ShiftDown(m[*c as usize], q.clone()),
            NodeQ::Sugeno(md, c) => NodeQ::Sugeno(md.clone(), m[*c as usize]),
        }
    }
}

/// `r_δ`: lowers every modal threshold by `δ` (truncated at 0).
pub fn relax(phi: &Formula2, delta: &Value) -> Formula2 {
    if delta.is_zero() {
        return phi.clone();
    }
    let seen = phi.arena.reachable(phi.root);
    let mut map = vec![0 as NodeId; seen.len()];
    let mut out = Arena::new();
    for id in 0..=phi.root {
        if !seen[id as usize] {
            continue;
        }
        let n = match phi.arena.get(id).remap(&map) {
            Node2::Mod(m, q, c) => Node2::Mod(m, crate::values::truncated_sub(&q, delta), c),
            other => other,
        };
        map[id as usize] = out.intern(n);
    }
    Formula::new(out, map[phi.root as usize])
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("the dual of `{0}` is not among the available modalities")]
pub struct MissingDual(pub String);

/// `¬φ` with `¬⟨λ⟩φ = ⟨λ̄⟩¬φ`, De Morgan, and `¬(φ⊕q) = ¬φ⊖q`,
/// `¬(φ⊖q) = ¬φ⊕q`. With `available`, every dual used must be listed.
pub fn negate_q(
    phi: &FormulaQ,
    available: Option<&crate::modalities::ModalitySet>,
) -> Result<FormulaQ, MissingDual> {
    let seen = phi.arena.reachable(phi.root);
    let mut map = vec![0 as NodeId; seen.len()];
    let mut out = Arena::new();
    for id in 0..=phi.root {
        if !seen[id as usize] {
            continue;
        }
        let n = match phi.arena.get(id).remap(&map) {
            NodeQ::Top => NodeQ::Bot,
            NodeQ::Bot => NodeQ::Top,
            NodeQ::And(l, r) => NodeQ::Or(l, r),
            NodeQ::Or(l, r) => NodeQ::And(l, r),
            NodeQ::ShiftUp(c, q) => NodeQ::ShiftDown(c, q),
            NodeQ::ShiftDown(c, q) => NodeQ::ShiftUp(c, q),
            NodeQ::Sugeno(m, c) => {
                let d = m.dual();
                if let Some(av) = available {
                    if !av.contains(&d) {
                        return Err(MissingDual(m.to_string()));
                    }
                }
                NodeQ::Sugeno(d, c)
            }
        };
        map[id as usize] = out.intern(n);
    }
    Ok(Formula::new(out, map[phi.root as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        let mut a = Arena::<Node2>::new();
        let t = a.top();
        assert_eq!(
            Formula::new(a.clone(), t).metrics(),
            Metrics { dag_size: 1, tree_size: 1, modal_rank: 0 }
        );
        let m = a.modal(ModalityId::prob(), Value::one(), t);
        assert_eq!(
            Formula::new(a.clone(), m).metrics(),
            Metrics { dag_size: 2, tree_size: 2, modal_rank: 1 }
        );
        let tt = a.and(t, t);
        let f = Formula::new(a, tt).metrics();
        assert_eq!((f.dag_size, f.tree_size), (2, 3));
    }

    #[test]
    fn hash_consing_shares() {
        let mut a = Arena::<NodeQ>::new();
        let t = a.top();
        let s1 = a.sugeno(ModalityId::prob(), t);
        let s2 = a.sugeno(ModalityId::prob(), t);
        assert_eq!(s1, s2);
        assert_eq!(a.len(), 2);
        assert_eq!(a.big_and(&[]), t);
        assert_eq!(a.big_and(&[s1, s2, s1]), s1);
        let b = a.bot();
        assert_eq!(a.big_or(&[]), b);
    }

    #[test]
    fn relax_lowers_thresholds() {
        let mut a = Arena::<Node2>::new();
        let t = a.top();
        let m = a.modal(ModalityId::prob(), Value::one(), t);
        let phi = Formula::new(a, m);
        let r = relax(&phi, &Value::new(1, 10).unwrap());
        match r.root_node() {
            Node2::Mod(_, q, _) => assert_eq!(*q, Value::new(9, 10).unwrap()),
            other => panic!("{other:?}"),
        }
        let same = relax(&phi, &Value::zero());
        assert!(Arc::ptr_eq(&same.arena, &phi.arena) && same.root == phi.root);
    }

    #[test]
    fn negation_swaps_constructors() {
        let mut a = Arena::<NodeQ>::new();
        let t = a.top();
        let phi = Formula::new(a.clone(), t);
        assert_eq!(negate_q(&phi, None).unwrap().root_node(), &NodeQ::Bot);
        let s = a.sugeno(ModalityId::prob(), t);
        let phi = Formula::new(a, s);
        let n = negate_q(&phi, None).unwrap();
        assert_eq!(n.root_node(), &NodeQ::Sugeno(ModalityId::prob().dual(), 0));
        let only_p = crate::modalities::ModalitySet::new([ModalityId::prob()]).unwrap();
        assert!(negate_q(&phi, Some(&only_p)).is_err());
        assert!(negate_q(&negate_q(&phi, None).unwrap(), None).unwrap().same_tree(&phi));
    }
}
