//! Seeded random instances on rational grids, for tests, benchmarks and the
//! acceptance suite.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::logic::{Arena, Formula2, FormulaQ, Node2, NodeId, NodeQ};
use crate::modalities::{ModalityId, ModalitySet};
use crate::solvers::WitnessQuery;
use crate::systems::{Label, LabelMetric, Payload, Rel2, StateSet, System, SystemKind, VRel, Weights};
use crate::values::Value;

/// `k/grid` for uniform `k ∈ 0..=grid`.
pub fn grid_value<R: Rng>(rng: &mut R, grid: u32) -> Value {
    Value::new(rng.gen_range(0..=grid) as i64, grid as i64).expect("grid point")
}

fn positive_grid_value<R: Rng>(rng: &mut R, grid: u32) -> Value {
    Value::new(rng.gen_range(1..=grid) as i64, grid as i64).expect("grid point")
}

fn random_subset<R: Rng>(rng: &mut R, n: usize, min: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let k = rng.gen_range(min.min(n)..=n);
    all.truncate(k);
    all.sort_unstable();
    all
}

/// Spreads `units` grid units over `states` at random.
fn spread<R: Rng>(rng: &mut R, states: &[usize], units: u32, grid: u32) -> Weights {
    let mut counts = vec![0i64; states.len()];
    if !states.is_empty() {
        for _ in 0..units {
            counts[rng.gen_range(0..states.len())] += 1;
        }
    }
    Weights::new(
        states
            .iter()
            .zip(counts)
            .map(|(x, c)| (*x, Value::new(c, grid as i64).expect("within the grid"))),
    )
    .expect("distinct states")
}

/// A subdistribution over `0..n`; total mass exactly 1 when `full`.
pub fn subdist<R: Rng>(rng: &mut R, n: usize, grid: u32, full: bool) -> Weights {
    let states = random_subset(rng, n, 1);
    let units = if full { grid } else { rng.gen_range(0..=grid) };
    spread(rng, &states, units, grid)
}

/// A payload of the given kind over `0..n`.
pub fn payload<R: Rng>(rng: &mut R, kind: SystemKind, n: usize, labels: &[Label], grid: u32) -> Payload {
    match kind {
        SystemKind::MarkovChain => {
            let full = rng.gen_bool(0.5);
            Payload::SubDist(subdist(rng, n, grid, full))
        }
        SystemKind::LabelledMarkovChain => {
            let mut slices = BTreeMap::new();
            for l in labels {
                if rng.gen_bool(0.75) {
                    let full = rng.gen_bool(0.5);
                    slices.insert(l.clone(), subdist(rng, n, grid, full));
                }
            }
            Payload::LabelledSubDist(slices)
        }
        SystemKind::Gpts => {
            // One distribution over label × state pairs.
            let slots: Vec<usize> = (0..labels.len() * n).collect();
            let chosen = random_subset(rng, slots.len(), 1);
            let joint = spread(rng, &chosen, grid, grid);
            let mut out: BTreeMap<Label, Vec<(usize, Value)>> = BTreeMap::new();
            for (slot, w) in joint.entries() {
                out.entry(labels[slot / n].clone()).or_default().push((slot % n, w.clone()));
            }
            Payload::LabelDist(
                out.into_iter()
                    .map(|(l, es)| (l, Weights::new(es).expect("distinct")))
                    .filter(|(_, w)| !w.is_empty())
                    .collect(),
            )
        }
        SystemKind::FuzzyTs => {
            let states = random_subset(rng, n, 0);
            Payload::FuzzySet(
                Weights::new(states.into_iter().map(|x| (x, positive_grid_value(rng, grid)))).expect("distinct"),
            )
        }
        SystemKind::MetricTs => {
            let mut edges: Vec<(Label, usize)> = Vec::new();
            for l in labels {
                for x in 0..n {
                    if rng.gen_bool(0.3) {
                        edges.push((l.clone(), x));
                    }
                }
            }
            edges.sort();
            Payload::LabelledEdgeSet(edges)
        }
        SystemKind::ConvexMc => {
            let k = rng.gen_range(1..=2);
            Payload::ConvexSet((0..k).map(|_| subdist(rng, n, grid, true)).collect())
        }
    }
}

/// Labels used for a kind: none for unlabelled kinds, one or two otherwise.
pub fn labels_for<R: Rng>(rng: &mut R, kind: SystemKind) -> Vec<Label> {
    match kind {
        SystemKind::LabelledMarkovChain | SystemKind::Gpts | SystemKind::MetricTs => {
            let k = rng.gen_range(1..=2);
            ["a", "b"][..k].iter().map(|s| s.to_string()).collect()
        }
        _ => Vec::new(),
    }
}

/// A label metric induced by distinct grid positions on a line.
pub fn line_metric<R: Rng>(rng: &mut R, labels: &[Label], grid: u32) -> LabelMetric {
    let mut slots: Vec<u32> = (0..=grid).collect();
    slots.shuffle(rng);
    let pos: Vec<i64> = slots.into_iter().take(labels.len()).map(i64::from).collect();
    let mut table = BTreeMap::new();
    for (i, a) in labels.iter().enumerate() {
        for (j, b) in labels.iter().enumerate() {
            let d = Value::new((pos[i] - pos[j]).abs(), grid as i64).expect("on the grid");
            table.insert((a.clone(), b.clone()), d);
        }
    }
    LabelMetric::table(labels.to_vec(), &table).expect("line distances form a metric")
}

/// A random system with `n` states named `s0, s1, …`.
pub fn system<R: Rng>(
    rng: &mut R,
    kind: SystemKind,
    n: usize,
    labels: &[Label],
    metric: Option<LabelMetric>,
    grid: u32,
) -> System {
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let payloads = (0..n).map(|_| payload(rng, kind, n, labels, grid)).collect();
    System::new(kind, names, payloads, metric).expect("generated systems are well formed")
}

/// Two systems of one kind sharing labels and label metric, with the labels.
pub fn system_pair<R: Rng>(
    rng: &mut R,
    kind: SystemKind,
    nx: usize,
    ny: usize,
    grid: u32,
) -> (System, System, Vec<Label>) {
    let labels = labels_for(rng, kind);
    let metric = (kind == SystemKind::MetricTs && rng.gen_bool(0.5)).then(|| line_metric(rng, &labels, grid));
    let left = system(rng, kind, nx, &labels, metric.clone(), grid);
    let right = system(rng, kind, ny, &labels, metric, grid);
    (left, right, labels)
}

/// The primal modalities for a kind over the given labels.
pub fn primal_modalities(kind: SystemKind, labels: &[Label]) -> Vec<ModalityId> {
    match kind {
        SystemKind::MarkovChain => vec![ModalityId::prob()],
        SystemKind::LabelledMarkovChain => labels.iter().map(|l| ModalityId::prob_label(l)).collect(),
        SystemKind::Gpts => labels.iter().map(|l| ModalityId::dia(l)).collect(),
        SystemKind::FuzzyTs => vec![ModalityId::fuzzy_dia()],
        SystemKind::MetricTs => labels.iter().map(|l| ModalityId::metric_dia(l)).collect(),
        SystemKind::ConvexMc => vec![ModalityId::convex_dia()],
    }
}

/// A nonempty random selection of primal and dual modalities for a kind.
pub fn modality_set<R: Rng>(rng: &mut R, kind: SystemKind, labels: &[Label]) -> ModalitySet {
    let mut all = Vec::new();
    for m in primal_modalities(kind, labels) {
        all.push(m.dual());
        all.push(m);
    }
    let pick = random_subset(rng, all.len(), 1);
    ModalitySet::new(pick.into_iter().map(|i| all[i].clone())).expect("nonempty")
}

pub fn relation<R: Rng>(rng: &mut R, rows: usize, cols: usize, density: f64) -> Rel2 {
    let mut r = Rel2::empty(rows, cols);
    for x in 0..rows {
        for y in 0..cols {
            if rng.gen_bool(density) {
                r.insert(x, y);
            }
        }
    }
    r
}

pub fn vrel<R: Rng>(rng: &mut R, rows: usize, cols: usize, grid: u32) -> VRel {
    VRel::from_fn(rows, cols, |_, _| grid_value(rng, grid))
}

/// The modality families exercised by the witness solvers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QueryFamily {
    Prob,
    ProbDual,
    Labelled,
    LabelledDia,
    Fuzzy,
    Metric,
}

impl QueryFamily {
    pub const ALL: [QueryFamily; 6] = [
        QueryFamily::Prob,
        QueryFamily::ProbDual,
        QueryFamily::Labelled,
        QueryFamily::LabelledDia,
        QueryFamily::Fuzzy,
        QueryFamily::Metric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryFamily::Prob => "P",
            QueryFamily::ProbDual => "~P",
            QueryFamily::Labelled => "P[a]",
            QueryFamily::LabelledDia => "dia[a]",
            QueryFamily::Fuzzy => "fdia",
            QueryFamily::Metric => "mdia[a]",
        }
    }

    pub fn kind(self) -> SystemKind {
        match self {
            QueryFamily::Prob | QueryFamily::ProbDual => SystemKind::MarkovChain,
            QueryFamily::Labelled => SystemKind::LabelledMarkovChain,
            QueryFamily::LabelledDia => SystemKind::Gpts,
            QueryFamily::Fuzzy => SystemKind::FuzzyTs,
            QueryFamily::Metric => SystemKind::MetricTs,
        }
    }
}

/// An owned witness problem.
#[derive(Clone, Debug)]
pub struct QueryCase {
    pub a: Payload,
    pub b: Payload,
    pub s: Rel2,
    pub eps: Value,
    pub modalities: ModalitySet,
    pub metric: LabelMetric,
}

impl QueryCase {
    pub fn query(&self) -> WitnessQuery<'_> {
        WitnessQuery {
            a: &self.a,
            b: &self.b,
            s: &self.s,
            eps: &self.eps,
            modalities: &self.modalities,
            metric: &self.metric,
        }
    }
}

/// A witness problem over `nx × ny` states for one family.
pub fn query_case<R: Rng>(rng: &mut R, family: QueryFamily, nx: usize, ny: usize, grid: u32) -> QueryCase {
    let kind = family.kind();
    let labels = labels_for(rng, kind);
    let metric = if kind == SystemKind::MetricTs && rng.gen_bool(0.5) {
        line_metric(rng, &labels, grid)
    } else {
        LabelMetric::Discrete
    };
    let mut ms: Vec<ModalityId> = primal_modalities(kind, &labels);
    if family == QueryFamily::ProbDual {
        ms = ms.into_iter().map(|m| m.dual()).collect();
    }
    ms.shuffle(rng);
    ms.truncate(1);
    let density = rng.gen_range(0.0..=1.0);
    QueryCase {
        a: payload(rng, kind, nx, &labels, grid),
        b: payload(rng, kind, ny, &labels, grid),
        s: relation(rng, nx, ny, density),
        eps: Value::new(rng.gen_range(0..grid as i64 / 2 + 1), grid as i64).expect("grid point"),
        modalities: ModalitySet::new(ms).expect("one modality"),
        metric,
    }
}

/// A random two-valued formula of modal depth at most `depth`.
pub fn formula2<R: Rng>(rng: &mut R, modalities: &[ModalityId], depth: u32, grid: u32) -> Formula2 {
    let mut arena = Arena::<Node2>::new();
    let root = node2(rng, &mut arena, modalities, depth, grid);
    Formula2::new(arena, root)
}

fn node2<R: Rng>(rng: &mut R, arena: &mut Arena<Node2>, ms: &[ModalityId], depth: u32, grid: u32) -> NodeId {
    let choice = if depth == 0 { rng.gen_range(0..4) } else { rng.gen_range(0..7) };
    match choice {
        0 | 1 => arena.top(),
        2 => arena.bot(),
        3 if depth == 0 => arena.top(),
        3 | 4 => {
            let l = node2(rng, arena, ms, depth - 1, grid);
            let r = node2(rng, arena, ms, depth - 1, grid);
            if choice == 3 {
                arena.and(l, r)
            } else {
                arena.or(l, r)
            }
        }
        _ => {
            let m = ms.choose(rng).expect("modalities").clone();
            let q = grid_value(rng, grid);
            let c = node2(rng, arena, ms, depth - 1, grid);
            arena.modal(m, q, c)
        }
    }
}

/// A random quantitative formula of modal depth at most `depth`.
pub fn formula_q<R: Rng>(rng: &mut R, modalities: &[ModalityId], depth: u32, grid: u32) -> FormulaQ {
    let mut arena = Arena::<NodeQ>::new();
    let root = node_q(rng, &mut arena, modalities, depth, grid);
    FormulaQ::new(arena, root)
}

fn node_q<R: Rng>(rng: &mut R, arena: &mut Arena<NodeQ>, ms: &[ModalityId], depth: u32, grid: u32) -> NodeId {
    let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..8) };
    match choice {
        0 => arena.top(),
        1 => arena.bot(),
        2 => {
            let c = if depth == 0 { arena.top() } else { node_q(rng, arena, ms, depth - 1, grid) };
            let q = grid_value(rng, grid);
            if rng.gen_bool(0.5) {
                arena.shift_up(c, q)
            } else {
                arena.shift_down(c, q)
            }
        }
        3 | 4 => {
            let l = node_q(rng, arena, ms, depth - 1, grid);
            let r = node_q(rng, arena, ms, depth - 1, grid);
            if choice == 3 {
                arena.and(l, r)
            } else {
                arena.or(l, r)
            }
        }
        _ => {
            let m = ms.choose(rng).expect("modalities").clone();
            let c = node_q(rng, arena, ms, depth - 1, grid);
            arena.sugeno(m, c)
        }
    }
}

/// A random `[0,1]`-valued map on `0..n`.
pub fn valuation<R: Rng>(rng: &mut R, n: usize, grid: u32) -> Vec<Value> {
    (0..n).map(|_| grid_value(rng, grid)).collect()
}

/// A random subset of `0..n`.
pub fn state_set<R: Rng>(rng: &mut R, n: usize) -> StateSet {
    StateSet::from_states(n, random_subset(rng, n, 0))
}

