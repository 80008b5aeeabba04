//! Finite coalgebras: state spaces, per-state transition payloads, crisp and
//! `[0,1]`-valued relations, and the JSON system format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::values::{exact_sum, truncated_add, Value, ValueError};

/// A subset of a finite state space `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(universe);
        b.insert_range(..);
        StateSet(b)
    }

    pub fn from_states(universe: usize, states: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for x in states {
            s.insert(x);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(x)
    }

    pub fn insert(&mut self, x: usize) {
        self.0.insert(x);
    }

    pub fn remove(&mut self, x: usize) {
        self.0.set(x, false);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn complement(&self) -> StateSet {
        let mut b = self.0.clone();
        b.toggle_range(..);
        StateSet(b)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut b = self.0.clone();
        b.intersect_with(&other.0);
        StateSet(b)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut b = self.0.clone();
        b.union_with(&other.0);
        StateSet(b)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A crisp relation `X ⇸ Y` stored as a row-major bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rel2 {
    rows: usize,
    cols: usize,
    bits: FixedBitSet,
}

impl Rel2 {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Rel2 {
            rows,
            cols,
            bits: FixedBitSet::with_capacity(rows * cols),
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let mut r = Self::empty(rows, cols);
        r.bits.insert_range(..);
        r
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n, n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(rows: usize, cols: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(rows, cols);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits.contains(x * self.cols + y)
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.bits.insert(x * self.cols + y);
    }

    pub fn remove(&mut self, x: usize, y: usize) {
        self.bits.set(x * self.cols + y, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.bits.ones().map(move |i| (i / cols, i % cols))
    }

    /// `R[A] = { y | ∃x ∈ A. x R y }`.
    pub fn image(&self, a: &StateSet) -> StateSet {
        let mut out = StateSet::empty(self.cols);
        for x in a.iter() {
            for y in 0..self.cols {
                if self.contains(x, y) {
                    out.insert(y);
                }
            }
        }
        out
    }

    pub fn converse(&self) -> Rel2 {
        Rel2::from_pairs(self.cols, self.rows, self.pairs().map(|(x, y)| (y, x)))
    }

    pub fn complement(&self) -> Rel2 {
        let mut r = self.clone();
        r.bits.toggle_range(..);
        r
    }

    pub fn is_subset(&self, other: &Rel2) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for Rel2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// `R[A]`.
pub fn relational_image(r: &Rel2, a: &StateSet) -> StateSet {
    r.image(a)
}

/// A `[0,1]`-valued relation `X × Y → V`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VRel {
    rows: usize,
    cols: usize,
    data: Vec<Value>,
}

impl VRel {
    pub fn constant(rows: usize, cols: usize, v: Value) -> Self {
        VRel {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Value) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                data.push(f(x, y));
            }
        }
        VRel { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> &Value {
        &self.data[x * self.cols + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: Value) {
        self.data[x * self.cols + y] = v;
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.data.iter()
    }

    pub fn converse(&self) -> VRel {
        VRel::from_fn(self.cols, self.rows, |y, x| self.get(x, y).clone())
    }

    /// `r_ε = { (x,y) | r(x,y) ≤ ε }`.
    pub fn cut(&self, eps: &Value) -> Rel2 {
        let mut out = Rel2::empty(self.rows, self.cols);
        for x in 0..self.rows {
            for y in 0..self.cols {
                if self.get(x, y) <= eps {
                    out.insert(x, y);
                }
            }
        }
        out
    }
}

pub fn cut_relation(r: &VRel, eps: &Value) -> Rel2 {
    r.cut(eps)
}

/// A finitely supported map from states to positive values, sorted by state.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Weights(Vec<(usize, Value)>);

impl Weights {
    /// Builds from arbitrary entries; zero entries are dropped, duplicates
    /// rejected.
    pub fn new(entries: impl IntoIterator<Item = (usize, Value)>) -> Result<Self, usize> {
        let mut v: Vec<(usize, Value)> = entries.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        v.sort_by_key(|(x, _)| *x);
        for w in v.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(w[0].0);
            }
        }
        Ok(Weights(v))
    }

    pub fn dirac(x: usize) -> Self {
        Weights(vec![(x, Value::one())])
    }

    pub fn entries(&self) -> &[(usize, Value)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, x: usize) -> Value {
        match self.0.binary_search_by_key(&x, |(s, _)| *s) {
            Ok(i) => self.0[i].1.clone(),
            Err(_) => Value::zero(),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|(x, _)| *x)
    }

    /// Sum of all weights, unbounded.
    pub fn total(&self) -> BigRational {
        exact_sum(self.0.iter().map(|(_, w)| w))
    }

    /// `μ(A)` for a subdistribution.
    pub fn measure(&self, a: &StateSet) -> Value {
        let s = exact_sum(self.0.iter().filter(|(x, _)| a.contains(*x)).map(|(_, w)| w));
        Value::clamp_ratio(s)
    }

    /// `⋁_{x∈A} g(x)` for a fuzzy set.
    pub fn sup_over(&self, a: &StateSet) -> Value {
        self.0
            .iter()
            .filter(|(x, _)| a.contains(*x))
            .map(|(_, w)| w)
            .max()
            .cloned()
            .unwrap_or_else(Value::zero)
    }

    pub fn max_state(&self) -> Option<usize> {
        self.0.last().map(|(x, _)| *x)
    }
}

pub type Label = String;

/// The transition structure attached to one state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Payload {
    SubDist(Weights),
    LabelledSubDist(BTreeMap<Label, Weights>),
    LabelDist(BTreeMap<Label, Weights>),
    FuzzySet(Weights),
    LabelledEdgeSet(Vec<(Label, usize)>),
    ConvexSet(Vec<Weights>),
}

impl Payload {
    pub fn kind(&self) -> SystemKind {
        match self {
            Payload::SubDist(_) => SystemKind::MarkovChain,
            Payload::LabelledSubDist(_) => SystemKind::LabelledMarkovChain,
            Payload::LabelDist(_) => SystemKind::Gpts,
            Payload::FuzzySet(_) => SystemKind::FuzzyTs,
            Payload::LabelledEdgeSet(_) => SystemKind::MetricTs,
            Payload::ConvexSet(_) => SystemKind::ConvexMc,
        }
    }

    /// States that carry positive weight or appear as successors.
    pub fn support(&self, universe: usize) -> StateSet {
        let mut s = StateSet::empty(universe);
        match self {
            Payload::SubDist(w) | Payload::FuzzySet(w) => w.support().for_each(|x| s.insert(x)),
            Payload::LabelledSubDist(m) | Payload::LabelDist(m) => {
                m.values().flat_map(|w| w.support()).for_each(|x| s.insert(x))
            }
            Payload::LabelledEdgeSet(e) => e.iter().for_each(|(_, x)| s.insert(*x)),
            Payload::ConvexSet(vs) => vs.iter().flat_map(|w| w.support()).for_each(|x| s.insert(x)),
        }
        s
    }

    /// Labels occurring in the payload (empty for unlabelled variants).
    pub fn labels(&self) -> Vec<&str> {
        match self {
            Payload::LabelledSubDist(m) | Payload::LabelDist(m) => m.keys().map(|l| l.as_str()).collect(),
            Payload::LabelledEdgeSet(e) => {
                let mut ls: Vec<&str> = e.iter().map(|(l, _)| l.as_str()).collect();
                ls.dedup();
                ls
            }
            _ => Vec::new(),
        }
    }

    fn empty_of(kind: SystemKind) -> Option<Payload> {
        match kind {
            SystemKind::MarkovChain => Some(Payload::SubDist(Weights::default())),
            SystemKind::LabelledMarkovChain => Some(Payload::LabelledSubDist(BTreeMap::new())),
            SystemKind::FuzzyTs => Some(Payload::FuzzySet(Weights::default())),
            SystemKind::MetricTs => Some(Payload::LabelledEdgeSet(Vec::new())),
            SystemKind::Gpts | SystemKind::ConvexMc => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum SystemKind {
    MarkovChain,
    LabelledMarkovChain,
    Gpts,
    FuzzyTs,
    MetricTs,
    ConvexMc,
}

impl SystemKind {
    pub const ALL: [SystemKind; 6] = [
        SystemKind::MarkovChain,
        SystemKind::LabelledMarkovChain,
        SystemKind::Gpts,
        SystemKind::FuzzyTs,
        SystemKind::MetricTs,
        SystemKind::ConvexMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::MarkovChain => "markov_chain",
            SystemKind::LabelledMarkovChain => "labelled_markov_chain",
            SystemKind::Gpts => "gpts",
            SystemKind::FuzzyTs => "fuzzy_ts",
            SystemKind::MetricTs => "metric_ts",
            SystemKind::ConvexMc => "convex_mc",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Distances between action labels. Without an explicit table, distinct
/// labels are at distance 1.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub enum LabelMetric {
    #[default]
    Discrete,
    Table {
        labels: Vec<Label>,
        index: BTreeMap<Label, usize>,
        dist: Vec<Vec<Value>>,
    },
}

impl LabelMetric {
    /// Validates the metric axioms. `entries` maps unordered label pairs to
    /// their distance; every off-diagonal pair must be present.
    pub fn table(labels: Vec<Label>, entries: &BTreeMap<(Label, Label), Value>) -> Result<Self, String> {
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(format!("duplicate label `{l}`"));
            }
        }
        let n = labels.len();
        let mut dist: Vec<Vec<Option<Value>>> = vec![vec![None; n]; n];
        for (i, row) in dist.iter_mut().enumerate() {
            row[i] = Some(Value::zero());
        }
        for ((a, b), v) in entries {
            let (i, j) = match (index.get(a), index.get(b)) {
                (Some(&i), Some(&j)) => (i, j),
                _ => return Err(format!("distance entry `{a},{b}` names an unknown label")),
            };
            if i == j {
                if !v.is_zero() {
                    return Err(format!("d({a},{a}) must be 0"));
                }
                continue;
            }
            for (p, q) in [(i, j), (j, i)] {
                match &dist[p][q] {
                    Some(old) if old != v => {
                        return Err(format!("d({a},{b}) is not symmetric"));
                    }
                    _ => dist[p][q] = Some(v.clone()),
                }
            }
        }
        let mut full = Vec::with_capacity(n);
        for (i, row) in dist.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (j, v) in row.into_iter().enumerate() {
                match v {
                    Some(v) => out.push(v),
                    None => return Err(format!("missing distance for `{},{}`", labels[i], labels[j])),
                }
            }
            full.push(out);
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if full[i][k] > truncated_add(&full[i][j], &full[j][k]) {
                        return Err(format!(
                            "triangle inequality fails for `{}`, `{}`, `{}`",
                            labels[i], labels[j], labels[k]
                        ));
                    }
                }
            }
        }
        Ok(LabelMetric::Table {
            labels,
            index,
            dist: full,
        })
    }

    pub fn knows(&self, label: &str) -> bool {
        match self {
            LabelMetric::Discrete => true,
            LabelMetric::Table { index, .. } => index.contains_key(label),
        }
    }

    /// `d(a,b)`; `None` if either label is outside the table.
    pub fn distance(&self, a: &str, b: &str) -> Option<Value> {
        match self {
            LabelMetric::Discrete => Some(if a == b { Value::zero() } else { Value::one() }),
            LabelMetric::Table { index, dist, .. } => {
                let i = *index.get(a)?;
                let j = *index.get(b)?;
                Some(dist[i][j].clone())
            }
        }
    }

    pub fn labels(&self) -> Option<&[Label]> {
        match self {
            LabelMetric::Discrete => None,
            LabelMetric::Table { labels, .. } => Some(labels),
        }
    }
}

/// A finite coalgebra `(X, ξ)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct System {
    kind: SystemKind,
    names: Vec<String>,
    index: HashMap<String, usize>,
    payloads: Vec<Payload>,
    label_metric: Option<LabelMetric>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadErrorKind {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Mass(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("label metric: {0}")]
    Metric(String),
    #[error(transparent)]
    Value(#[from] ValueError),
}

/// A validation failure with a JSON-pointer-style path into the document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {kind}")]
pub struct LoadError {
    pub path: String,
    pub kind: LoadErrorKind,
}

fn err(path: impl Into<String>, kind: LoadErrorKind) -> LoadError {
    LoadError {
        path: path.into(),
        kind,
    }
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> LoadError {
    err(path, LoadErrorKind::Schema(msg.into()))
}

fn check_mass(path: &str, w: &Weights, exact_one: bool) -> Result<(), LoadError> {
    let total = w.total();
    if exact_one && total != BigRational::one() {
        return Err(err(path, LoadErrorKind::Mass(format!("total mass ≠ 1 (got {total})"))));
    }
    if total > BigRational::one() {
        return Err(err(path, LoadErrorKind::Mass(format!("total mass exceeds 1 (got {total})"))));
    }
    Ok(())
}

impl System {
    /// Builds and validates a system. Payloads are indexed by state.
    pub fn new(
        kind: SystemKind,
        names: Vec<String>,
        mut payloads: Vec<Payload>,
        label_metric: Option<LabelMetric>,
    ) -> Result<Self, LoadError> {
        let n = names.len();
        // An empty labelled slice carries no transitions.
        for p in &mut payloads {
            if let Payload::LabelledSubDist(m) | Payload::LabelDist(m) = p {
                m.retain(|_, w| !w.is_empty());
            }
        }
        if payloads.len() != n {
            return Err(schema("/transitions", "one payload per state required"));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(schema(format!("/states/{i}"), format!("duplicate state `{name}`")));
            }
        }
        for (i, p) in payloads.iter().enumerate() {
            let path = format!("/transitions/{}", names[i]);
            if p.kind() != kind {
                return Err(schema(path, format!("payload is not a {kind} payload")));
            }
            let bad_state = |x: usize| x >= n;
            match p {
                Payload::SubDist(w) => {
                    if w.max_state().is_some_and(bad_state) {
                        return Err(err(path, LoadErrorKind::UnknownState(format!("#{}", w.max_state().unwrap()))));
                    }
                    check_mass(&path, w, false)?;
                }
                Payload::FuzzySet(w) => {
                    if w.max_state().is_some_and(bad_state) {
                        return Err(err(path, LoadErrorKind::UnknownState(format!("#{}", w.max_state().unwrap()))));
                    }
                }
                Payload::LabelledSubDist(m) => {
                    for (l, w) in m {
                        if w.max_state().is_some_and(bad_state) {
                            return Err(err(format!("{path}/{l}"), LoadErrorKind::UnknownState(format!("#{}", w.max_state().unwrap()))));
                        }
                        check_mass(&format!("{path}/{l}"), w, false)?;
                    }
                }
                Payload::LabelDist(m) => {
                    let mut total = BigRational::zero();
                    for (l, w) in m {
                        if w.max_state().is_some_and(bad_state) {
                            return Err(err(format!("{path}/{l}"), LoadErrorKind::UnknownState(format!("#{}", w.max_state().unwrap()))));
                        }
                        total += w.total();
                    }
                    if total != BigRational::one() {
                        return Err(err(path, LoadErrorKind::Mass(format!("total mass ≠ 1 (got {total})"))));
                    }
                }
                Payload::LabelledEdgeSet(e) => {
                    for (l, x) in e {
                        if *x >= n {
                            return Err(err(path, LoadErrorKind::UnknownState(format!("#{x}"))));
                        }
                        if let Some(m) = &label_metric {
                            if !m.knows(l) {
                                return Err(err(path, LoadErrorKind::Metric(format!("label `{l}` missing from the metric"))));
                            }
                        }
                    }
                    if e.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(schema(path, "edges must be sorted and distinct"));
                    }
                }
                Payload::ConvexSet(vs) => {
                    if vs.is_empty() {
                        return Err(schema(path, "convex set needs at least one vertex"));
                    }
                    for (k, w) in vs.iter().enumerate() {
                        if w.max_state().is_some_and(bad_state) {
                            return Err(err(format!("{path}/{k}"), LoadErrorKind::UnknownState(format!("#{}", w.max_state().unwrap()))));
                        }
                        check_mass(&format!("{path}/{k}"), w, true)?;
                    }
                }
            }
        }
        Ok(System {
            kind,
            names,
            index,
            payloads,
            label_metric,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn payload(&self, x: usize) -> &Payload {
        &self.payloads[x]
    }

    pub fn payloads(&self) -> &[Payload] {
        &self.payloads
    }

    /// Explicit label metric, if the document declared one.
    pub fn declared_label_metric(&self) -> Option<&LabelMetric> {
        self.label_metric.as_ref()
    }

    /// The label metric used by metric modalities (discrete if undeclared).
    pub fn label_metric(&self) -> LabelMetric {
        self.label_metric.clone().unwrap_or_default()
    }

    /// All labels occurring anywhere in the system, sorted.
    pub fn labels(&self) -> Vec<Label> {
        let mut ls: Vec<Label> = self
            .payloads
            .iter()
            .flat_map(|p| p.labels().into_iter().map(str::to_string))
            .collect();
        ls.sort();
        ls.dedup();
        ls
    }

    /// Parses and validates a system document.
    pub fn from_json_str(text: &str) -> Result<Self, LoadError> {
        let doc: Json = serde_json::from_str(text).map_err(|e| err("", LoadErrorKind::Json(e.to_string())))?;
        Self::from_json(&doc)
    }

    pub fn from_json(doc: &Json) -> Result<Self, LoadError> {
        let obj = doc.as_object().ok_or_else(|| schema("", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "type" | "states" | "transitions" | "label_metric") {
                return Err(schema(format!("/{key}"), "unexpected key"));
            }
        }
        let kind_name = obj
            .get("type")
            .and_then(Json::as_str)
            .ok_or_else(|| schema("/type", "missing or non-string system type"))?;
        let kind = SystemKind::from_name(kind_name)
            .ok_or_else(|| schema("/type", format!("unknown system type `{kind_name}`")))?;

        let states = obj
            .get("states")
            .and_then(Json::as_array)
            .ok_or_else(|| schema("/states", "expected a list of state names"))?;
        let mut names = Vec::with_capacity(states.len());
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            let name = s
                .as_str()
                .ok_or_else(|| schema(format!("/states/{i}"), "state name must be a string"))?;
            if index.insert(name.to_string(), i).is_some() {
                return Err(schema(format!("/states/{i}"), format!("duplicate state `{name}`")));
            }
            names.push(name.to_string());
        }

        let label_metric = match obj.get("label_metric") {
            None | Some(Json::Null) => None,
            Some(m) => Some(parse_metric(m)?),
        };

        let empty = Map::new();
        let transitions = match obj.get("transitions") {
            None => &empty,
            Some(t) => t
                .as_object()
                .ok_or_else(|| schema("/transitions", "expected an object keyed by state"))?,
        };
        for key in transitions.keys() {
            if !index.contains_key(key) {
                return Err(err(format!("/transitions/{key}"), LoadErrorKind::UnknownState(key.clone())));
            }
        }
        let mut payloads = Vec::with_capacity(names.len());
        for name in &names {
            let path = format!("/transitions/{name}");
            let p = match transitions.get(name) {
                None => Payload::empty_of(kind).ok_or_else(|| {
                    schema(&path, format!("every state of a {kind} needs a transition entry"))
                })?,
                Some(body) => parse_payload(kind, body, &index, &path)?,
            };
            payloads.push(p);
        }
        System::new(kind, names, payloads, label_metric)
    }

    /// Serializes back to the document format accepted by [`System::from_json`].
    pub fn to_json(&self) -> Json {
        let weights = |w: &Weights| -> Json {
            let m: Map<String, Json> = w
                .entries()
                .iter()
                .map(|(x, v)| (self.names[*x].clone(), Json::String(v.to_string())))
                .collect();
            Json::Object(m)
        };
        let mut transitions = Map::new();
        for (x, p) in self.payloads.iter().enumerate() {
            let body = match p {
                Payload::SubDist(w) | Payload::FuzzySet(w) => weights(w),
                Payload::LabelledSubDist(m) | Payload::LabelDist(m) => {
                    Json::Object(m.iter().map(|(l, w)| (l.clone(), weights(w))).collect())
                }
                Payload::LabelledEdgeSet(e) => Json::Array(
                    e.iter()
                        .map(|(l, y)| json!([l, self.names[*y]]))
                        .collect(),
                ),
                Payload::ConvexSet(vs) => Json::Array(vs.iter().map(weights).collect()),
            };
            transitions.insert(self.names[x].clone(), body);
        }
        let mut doc = Map::new();
        doc.insert("type".into(), Json::String(self.kind.name().into()));
        doc.insert("states".into(), json!(self.names));
        doc.insert("transitions".into(), Json::Object(transitions));
        if let Some(LabelMetric::Table { labels, dist, .. }) = &self.label_metric {
            let mut d = Map::new();
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    d.insert(format!("{},{}", labels[i], labels[j]), Json::String(dist[i][j].to_string()));
                }
            }
            doc.insert("label_metric".into(), json!({"labels": labels, "dist": d}));
        }
        Json::Object(doc)
    }
}

fn parse_value(v: &Json, path: &str) -> Result<Value, LoadError> {
    let s = v
        .as_str()
        .ok_or_else(|| schema(path, "values are written as strings such as \"1/2\""))?;
    s.parse().map_err(|e| err(path, LoadErrorKind::Value(e)))
}

fn parse_weights(body: &Json, index: &HashMap<String, usize>, path: &str) -> Result<Weights, LoadError> {
    let obj = body
        .as_object()
        .ok_or_else(|| schema(path, "expected an object mapping successor states to values"))?;
    let mut entries = Vec::with_capacity(obj.len());
    for (succ, v) in obj {
        let p = format!("{path}/{succ}");
        let x = *index
            .get(succ)
            .ok_or_else(|| err(&p, LoadErrorKind::UnknownState(succ.clone())))?;
        entries.push((x, parse_value(v, &p)?));
    }
    // JSON object keys are unique, so duplicates cannot arise here.
    Ok(Weights::new(entries).expect("distinct keys"))
}

fn parse_payload(
    kind: SystemKind,
    body: &Json,
    index: &HashMap<String, usize>,
    path: &str,
) -> Result<Payload, LoadError> {
    Ok(match kind {
        SystemKind::MarkovChain => Payload::SubDist(parse_weights(body, index, path)?),
        SystemKind::FuzzyTs => Payload::FuzzySet(parse_weights(body, index, path)?),
        SystemKind::LabelledMarkovChain | SystemKind::Gpts => {
            let obj = body
                .as_object()
                .ok_or_else(|| schema(path, "expected an object keyed by label"))?;
            let mut m = BTreeMap::new();
            for (l, inner) in obj {
                m.insert(l.clone(), parse_weights(inner, index, &format!("{path}/{l}"))?);
            }
            if kind == SystemKind::Gpts {
                Payload::LabelDist(m)
            } else {
                Payload::LabelledSubDist(m)
            }
        }
        SystemKind::MetricTs => {
            let arr = body
                .as_array()
                .ok_or_else(|| schema(path, "expected a list of [label, successor] pairs"))?;
            let mut edges = Vec::with_capacity(arr.len());
            for (k, e) in arr.iter().enumerate() {
                let p = format!("{path}/{k}");
                let pair = e.as_array().filter(|a| a.len() == 2);
                let (l, s) = match pair.map(|a| (a[0].as_str(), a[1].as_str())) {
                    Some((Some(l), Some(s))) => (l, s),
                    _ => return Err(schema(p, "expected [label, successor]")),
                };
                let x = *index
                    .get(s)
                    .ok_or_else(|| err(&p, LoadErrorKind::UnknownState(s.to_string())))?;
                edges.push((l.to_string(), x));
            }
            edges.sort();
            edges.dedup();
            Payload::LabelledEdgeSet(edges)
        }
        SystemKind::ConvexMc => {
            let arr = body
                .as_array()
                .ok_or_else(|| schema(path, "expected a list of distributions"))?;
            let mut vs = Vec::with_capacity(arr.len());
            for (k, v) in arr.iter().enumerate() {
                vs.push(parse_weights(v, index, &format!("{path}/{k}"))?);
            }
            Payload::ConvexSet(vs)
        }
    })
}

fn parse_metric(m: &Json) -> Result<LabelMetric, LoadError> {
    let obj = m
        .as_object()
        .ok_or_else(|| schema("/label_metric", "expected {\"labels\": [...], \"dist\": {...}}"))?;
    let labels = obj
        .get("labels")
        .and_then(Json::as_array)
        .ok_or_else(|| schema("/label_metric/labels", "expected a list of labels"))?;
    let mut ls = Vec::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        ls.push(
            l.as_str()
                .ok_or_else(|| schema(format!("/label_metric/labels/{i}"), "label must be a string"))?
                .to_string(),
        );
    }
    let empty = Map::new();
    let dist = match obj.get("dist") {
        None => &empty,
        Some(d) => d
            .as_object()
            .ok_or_else(|| schema("/label_metric/dist", "expected an object keyed by \"a,b\""))?,
    };
    let mut entries = BTreeMap::new();
    for (key, v) in dist {
        let path = format!("/label_metric/dist/{key}");
        let (a, b) = key
            .split_once(',')
            .ok_or_else(|| schema(&path, "key must have the form \"a,b\""))?;
        let val = parse_value(v, &path)?;
        let (a, b) = (a.trim().to_string(), b.trim().to_string());
        let k = if a <= b { (a, b) } else { (b, a) };
        if let Some(old) = entries.insert(k, val.clone()) {
            if old != val {
                return Err(err(path, LoadErrorKind::Metric("d(a,b) ≠ d(b,a)".into())));
            }
        }
    }
    LabelMetric::table(ls, &entries).map_err(|m| err("/label_metric", LoadErrorKind::Metric(m)))
}

pub fn load_system(text: &str) -> Result<System, LoadError> {
    System::from_json_str(text)
}
