//! Exact max-flow / min-cut on the bipartite networks used by the
//! probability-modality solver.
//!
//! The network `N(μ, ν, R)` has a source `⊥`, a sink `⊤`, one node per state
//! of `X` and `Y`, edges `⊥ → x` of capacity `μ(x)`, `x → y` of capacity 1
//! for `(x,y) ∈ R`, and `y → ⊤` of capacity `ν(y)`. Capacities are scaled to
//! integers by a common denominator before running shortest augmenting paths.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::systems::{Rel2, StateSet, Weights};
use crate::values::Value;

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    source: Vec<Value>,
    sink: Vec<Value>,
    middle: Rel2,
}

impl FlowNetwork {
    pub fn left_len(&self) -> usize {
        self.source.len()
    }

    pub fn right_len(&self) -> usize {
        self.sink.len()
    }

    pub fn source_capacity(&self, x: usize) -> &Value {
        &self.source[x]
    }

    pub fn sink_capacity(&self, y: usize) -> &Value {
        &self.sink[y]
    }

    pub fn has_middle_edge(&self, x: usize, y: usize) -> bool {
        self.middle.contains(x, y)
    }

    /// `μ(X)`.
    pub fn source_total(&self) -> BigRational {
        crate::values::exact_sum(&self.source)
    }
}

/// Builds `N(μ, ν, R)`; `R` fixes the sizes of both sides.
pub fn build_network(mu: &Weights, nu: &Weights, r: &Rel2) -> FlowNetwork {
    let source = (0..r.rows()).map(|x| mu.get(x)).collect();
    let sink = (0..r.cols()).map(|y| nu.get(y)).collect();
    FlowNetwork {
        source,
        sink,
        middle: r.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: Value,
    /// `U ∩ X`, where `U` is the residual-reachable set from the source.
    pub reach_left: StateSet,
    /// `U ∩ Y`.
    pub reach_right: StateSet,
}

struct Edge<T> {
    to: usize,
    cap: T,
    rev: usize,
}

struct Graph<T> {
    adj: Vec<Vec<Edge<T>>>,
}

impl<T> Graph<T>
where
    T: Clone + Ord + Zero + for<'a> std::ops::AddAssign<&'a T> + for<'a> std::ops::SubAssign<&'a T>,
{
    fn new(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|_| Vec::new()).collect(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: T) {
        let rf = self.adj[to].len();
        let rt = self.adj[from].len();
        self.adj[from].push(Edge { to, cap, rev: rf });
        self.adj[to].push(Edge {
            to: from,
            cap: T::zero(),
            rev: rt,
        });
    }

    /// Shortest augmenting paths; returns the flow value.
    fn max_flow(&mut self, s: usize, t: usize) -> T {
        let n = self.adj.len();
        let mut total = T::zero();
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for (i, e) in self.adj[u].iter().enumerate() {
                    if !seen[e.to] && e.cap > T::zero() {
                        seen[e.to] = true;
                        prev[e.to] = Some((u, i));
                        queue.push_back(e.to);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck: Option<T> = None;
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                let c = &self.adj[u][i].cap;
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("path has at least one edge");
            let mut v = t;
            while let Some((u, i)) = prev[v] {
                self.adj[u][i].cap -= &b;
                let (to, rev) = (self.adj[u][i].to, self.adj[u][i].rev);
                self.adj[to][rev].cap += &b;
                v = u;
            }
            total += &b;
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for e in &self.adj[u] {
                if !seen[e.to] && e.cap > T::zero() {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }
}

fn run<T>(net: &FlowNetwork, scale: &BigInt, conv: impl Fn(BigInt) -> T) -> (T, Vec<bool>)
where
    T: Clone + Ord + Zero + for<'a> std::ops::AddAssign<&'a T> + for<'a> std::ops::SubAssign<&'a T>,
{
    let (nx, ny) = (net.left_len(), net.right_len());
    let (src, dst) = (0, 1);
    let mut g = Graph::new(2 + nx + ny);
    let scaled = |v: &Value| conv(v.numer() * (scale / v.denom()));
    for x in 0..nx {
        if !net.source[x].is_zero() {
            g.add_edge(src, 2 + x, scaled(&net.source[x]));
        }
    }
    let unit = conv(scale.clone());
    for (x, y) in net.middle.pairs() {
        if !net.source[x].is_zero() {
            g.add_edge(2 + x, 2 + nx + y, unit.clone());
        }
    }
    for y in 0..ny {
        if !net.sink[y].is_zero() {
            g.add_edge(2 + nx + y, dst, scaled(&net.sink[y]));
        }
    }
    let f = g.max_flow(src, dst);
    (f, g.reachable(src))
}

/// Exact maximum flow and the source side of the canonical minimum cut.
///
/// Middle edges leaving states with `μ(x) = 0` are omitted: no flow can
/// enter such a state, so they change neither the flow nor the cut.
pub fn max_flow_min_cut(net: &FlowNetwork) -> FlowResult {
    let scale = net
        .source
        .iter()
        .chain(&net.sink)
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nx = net.left_len();
    let ny = net.right_len();
    // Total flow is at most (nx + ny + nx*ny) * scale; keep well inside i128.
    let small = scale.bits() < 80 && (nx + 1) * (ny + 1) < (1 << 20);
    let (value, reach) = if small {
        let (f, r) = run(net, &scale, |b| b.to_i128().expect("fits by the size check"));
        (BigInt::from(f), r)
    } else {
        run(net, &scale, |b| b)
    };
    let value = Value::from_ratio(BigRational::new(value, scale)).expect("flow is bounded by μ(X) ≤ 1");
    FlowResult {
        value,
        reach_left: StateSet::from_states(nx, (0..nx).filter(|&x| reach[2 + x])),
        reach_right: StateSet::from_states(ny, (0..ny).filter(|&y| reach[2 + nx + y])),
    }
}

/// Reads `A = U ∩ X` and `B = U ∩ Y` off the cut. Meaningful only when the
/// flow is below `μ(X) - ε`, in which case `ν(B) < μ(A) - ε` and no
/// `R`-edge leaves `A` outside `B`.
pub fn extract_witness(_net: &FlowNetwork, cut: &FlowResult) -> (StateSet, StateSet) {
    (cut.reach_left.clone(), cut.reach_right.clone())
}
