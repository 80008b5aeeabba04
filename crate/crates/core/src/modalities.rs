//! Monotone predicate liftings from crisp predicates to `[0,1]`-valued ones,
//! their duals, and the induced Sugeno modalities.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::systems::{LabelMetric, Payload, StateSet, System, SystemKind, Weights};
use crate::values::{join, meet, Value};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Family {
    /// `P(A)(μ) = μ(A)` on subdistributions.
    Prob,
    /// `P[a](A)(f) = f(a)(A)` on label-indexed subdistributions.
    ProbLabel,
    /// `dia[a](A)(μ) = μ({a} × A)` on distributions over labels and states.
    DiaLabel,
    /// `fdia(A)(g) = ⋁_{x∈A} g(x)` on fuzzy sets.
    FuzzyDia,
    /// `mdia[a](A)(S) = ⋁ { 1 - d(a,b) | (b,x) ∈ S, x ∈ A }`.
    MetricDia,
    /// `cdia(A)(U) = max_{μ∈U} μ(A)` on convex sets of distributions.
    ConvexDia,
}

impl Family {
    pub fn is_labelled(self) -> bool {
        matches!(self, Family::ProbLabel | Family::DiaLabel | Family::MetricDia)
    }

    pub fn kind(self) -> SystemKind {
        match self {
            Family::Prob => SystemKind::MarkovChain,
            Family::ProbLabel => SystemKind::LabelledMarkovChain,
            Family::DiaLabel => SystemKind::Gpts,
            Family::FuzzyDia => SystemKind::FuzzyTs,
            Family::MetricDia => SystemKind::MetricTs,
            Family::ConvexDia => SystemKind::ConvexMc,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Family::Prob | Family::ProbLabel => "P",
            Family::DiaLabel => "dia",
            Family::FuzzyDia => "fdia",
            Family::MetricDia => "mdia",
            Family::ConvexDia => "cdia",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ModalityId {
    pub family: Family,
    pub label: Option<String>,
    pub dual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModalityError {
    #[error("modality `{modality}` does not apply to {kind} payloads")]
    VariantMismatch { modality: String, kind: SystemKind },
    #[error("label `{0}` is not in the label metric")]
    UnknownLabel(String),
    #[error("unknown modality `{0}`")]
    UnknownModality(String),
    #[error("empty modality set")]
    Empty,
}

impl ModalityId {
    pub fn new(family: Family, label: Option<&str>) -> Self {
        assert_eq!(family.is_labelled(), label.is_some(), "label present iff family is labelled");
        ModalityId {
            family,
            label: label.map(str::to_string),
            dual: false,
        }
    }

    pub fn prob() -> Self {
        Self::new(Family::Prob, None)
    }

    pub fn prob_label(a: &str) -> Self {
        Self::new(Family::ProbLabel, Some(a))
    }

    pub fn dia(a: &str) -> Self {
        Self::new(Family::DiaLabel, Some(a))
    }

    pub fn fuzzy_dia() -> Self {
        Self::new(Family::FuzzyDia, None)
    }

    pub fn metric_dia(a: &str) -> Self {
        Self::new(Family::MetricDia, Some(a))
    }

    pub fn convex_dia() -> Self {
        Self::new(Family::ConvexDia, None)
    }

    pub fn dual(&self) -> Self {
        ModalityId {
            dual: !self.dual,
            ..self.clone()
        }
    }

    pub fn primal(&self) -> Self {
        ModalityId {
            dual: false,
            ..self.clone()
        }
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn applies_to(&self, kind: SystemKind) -> bool {
        self.family.kind() == kind
    }
}

impl fmt::Display for ModalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            f.write_str("~")?;
        }
        f.write_str(self.family.keyword())?;
        if let Some(l) = &self.label {
            write!(f, "[{l}]")?;
        }
        Ok(())
    }
}

impl FromStr for ModalityId {
    type Err = ModalityError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let unknown = || ModalityError::UnknownModality(text.to_string());
        let s = text.trim();
        let (dual, s) = match s.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (head, label) = match s.find('[') {
            Some(i) => {
                let l = s[i + 1..].strip_suffix(']').ok_or_else(unknown)?;
                if l.is_empty() {
                    return Err(unknown());
                }
                (&s[..i], Some(l))
            }
            None => (s, None),
        };
        let family = match (head, label.is_some()) {
            ("P", false) => Family::Prob,
            ("P", true) => Family::ProbLabel,
            ("dia", true) => Family::DiaLabel,
            ("fdia", false) => Family::FuzzyDia,
            ("mdia", true) => Family::MetricDia,
            ("cdia", false) => Family::ConvexDia,
            _ => return Err(unknown()),
        };
        Ok(ModalityId {
            family,
            label: label.map(str::to_string),
            dual,
        })
    }
}

/// A nonempty, duplicate-free, ordered set of modalities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModalitySet(Vec<ModalityId>);

impl ModalitySet {
    pub fn new(ms: impl IntoIterator<Item = ModalityId>) -> Result<Self, ModalityError> {
        let mut out: Vec<ModalityId> = Vec::new();
        for m in ms {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(ModalityError::Empty);
        }
        Ok(ModalitySet(out))
    }

    /// Parses a comma-separated list such as `P,~P`.
    pub fn parse_list(text: &str) -> Result<Self, ModalityError> {
        let ms = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ms)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ModalityId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: &ModalityId) -> bool {
        self.0.contains(m)
    }

    /// `Λ ∪ { λ̄ | λ ∈ Λ }`, keeping the original order followed by new duals.
    pub fn close_under_duals(&self) -> ModalitySet {
        let mut out = self.0.clone();
        for m in &self.0 {
            let d = m.dual();
            if !out.contains(&d) {
                out.push(d);
            }
        }
        ModalitySet(out)
    }

    pub fn is_dual_closed(&self) -> bool {
        self.0.iter().all(|m| self.0.contains(&m.dual()))
    }

    /// The default modalities for comparing two systems of the same kind:
    /// one per label for labelled kinds.
    pub fn default_for(left: &System, right: &System) -> Result<Self, ModalityError> {
        let kind = left.kind();
        let mut labels = left.labels();
        labels.extend(right.labels());
        for sys in [left, right] {
            if let Some(ls) = sys.declared_label_metric().and_then(LabelMetric::labels) {
                if kind == SystemKind::MetricTs {
                    labels.extend(ls.iter().cloned());
                }
            }
        }
        labels.sort();
        labels.dedup();
        let ms: Vec<ModalityId> = match kind {
            SystemKind::MarkovChain => vec![ModalityId::prob()],
            SystemKind::FuzzyTs => vec![ModalityId::fuzzy_dia()],
            SystemKind::ConvexMc => vec![ModalityId::convex_dia()],
            SystemKind::LabelledMarkovChain => labels.iter().map(|l| ModalityId::prob_label(l)).collect(),
            SystemKind::Gpts => labels.iter().map(|l| ModalityId::dia(l)).collect(),
            SystemKind::MetricTs => labels.iter().map(|l| ModalityId::metric_dia(l)).collect(),
        };
        Self::new(ms)
    }
}

impl fmt::Display for ModalitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn slice<'a>(m: &'a std::collections::BTreeMap<String, Weights>, label: &str) -> Option<&'a Weights> {
    m.get(label)
}

/// Evaluates the primal lifting (ignoring the dual flag).
fn evaluate_primal(
    m: &ModalityId,
    a: &StateSet,
    payload: &Payload,
    metric: &LabelMetric,
) -> Result<Value, ModalityError> {
    let label = m.label.as_deref().unwrap_or("");
    match (m.family, payload) {
        (Family::Prob, Payload::SubDist(w)) => Ok(w.measure(a)),
        (Family::ProbLabel, Payload::LabelledSubDist(s)) | (Family::DiaLabel, Payload::LabelDist(s)) => {
            Ok(slice(s, label).map(|w| w.measure(a)).unwrap_or_else(Value::zero))
        }
        (Family::FuzzyDia, Payload::FuzzySet(w)) => Ok(w.sup_over(a)),
        (Family::MetricDia, Payload::LabelledEdgeSet(edges)) => {
            let mut best = Value::zero();
            for (b, x) in edges {
                if a.contains(*x) {
                    let d = metric
                        .distance(label, b)
                        .ok_or_else(|| ModalityError::UnknownLabel(label.to_string()))?;
                    best = join(&best, &d.complement());
                }
            }
            Ok(best)
        }
        (Family::ConvexDia, Payload::ConvexSet(vs)) => Ok(vs
            .iter()
            .map(|w| w.measure(a))
            .max()
            .unwrap_or_else(Value::zero)),
        _ => Err(ModalityError::VariantMismatch {
            modality: m.to_string(),
            kind: payload.kind(),
        }),
    }
}

/// `λ(A)(a)`; duals evaluate as `1 - λ(X∖A)(a)`.
pub fn evaluate(
    m: &ModalityId,
    a: &StateSet,
    payload: &Payload,
    metric: &LabelMetric,
) -> Result<Value, ModalityError> {
    if m.dual {
        Ok(evaluate_primal(m, &a.complement(), payload, metric)?.complement())
    } else {
        evaluate_primal(m, a, payload, metric)
    }
}

/// `⟨λ⟩(f)(a) = ⋁_ε ε ∧ λ(f_ε)(a)` with `f_ε = { x | f(x) ≥ ε }`.
///
/// Both `ε ↦ λ(f_ε)(a)` and the cut `f_ε ∩ supp(a)` are constant between
/// consecutive values of `f` on the support, so the supremum is attained at
/// one of those values or at 1 (the latter matters when `λ(∅)(a) > 0`, as
/// for duals of subprobability modalities).
pub fn sugeno_evaluate(
    m: &ModalityId,
    f: &[Value],
    payload: &Payload,
    metric: &LabelMetric,
) -> Result<Value, ModalityError> {
    let n = f.len();
    let mut candidates: Vec<&Value> = payload.support(n).iter().map(|x| &f[x]).collect();
    let one = Value::one();
    candidates.push(&one);
    candidates.sort();
    candidates.dedup();
    let mut best = Value::zero();
    // Scanning from the top lets us stop once ε drops below the best value.
    for eps in candidates.into_iter().rev() {
        if *eps <= best {
            break;
        }
        let cut = StateSet::from_states(n, (0..n).filter(|&x| f[x] >= *eps));
        let v = meet(eps, &evaluate(m, &cut, payload, metric)?);
        best = join(&best, &v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn w(entries: &[(usize, &str)]) -> Weights {
        Weights::new(entries.iter().map(|(x, s)| (*x, v(s)))).unwrap()
    }

    #[test]
    fn prob_examples() {
        let mu = Payload::SubDist(w(&[(0, "1/2"), (1, "1/4")]));
        let d = LabelMetric::Discrete;
        assert_eq!(evaluate(&ModalityId::prob(), &StateSet::from_states(2, [0]), &mu, &d).unwrap(), v("1/2"));
        // dual of P on a subdistribution: 1 - μ({y}) = 3/4
        assert_eq!(
            evaluate(&ModalityId::prob().dual(), &StateSet::from_states(2, [0]), &mu, &d).unwrap(),
            v("3/4")
        );
        let full = Payload::SubDist(w(&[(0, "1/2"), (1, "1/2")]));
        for a in [vec![], vec![0], vec![1], vec![0, 1]] {
            let s = StateSet::from_states(2, a);
            assert_eq!(
                evaluate(&ModalityId::prob(), &s, &full, &d).unwrap(),
                evaluate(&ModalityId::prob().dual(), &s, &full, &d).unwrap()
            );
        }
    }

    #[test]
    fn fuzzy_and_metric_examples() {
        let g = Payload::FuzzySet(w(&[(0, "1/3")]));
        assert_eq!(
            evaluate(&ModalityId::fuzzy_dia(), &StateSet::empty(2), &g, &LabelMetric::Discrete).unwrap(),
            Value::zero()
        );
        let mut e = BTreeMap::new();
        e.insert(("a".to_string(), "b".to_string()), v("3/10"));
        let metric = LabelMetric::table(vec!["a".into(), "b".into()], &e).unwrap();
        let s = Payload::LabelledEdgeSet(vec![("b".into(), 0)]);
        assert_eq!(
            evaluate(&ModalityId::metric_dia("a"), &StateSet::from_states(1, [0]), &s, &metric).unwrap(),
            v("7/10")
        );
        assert!(matches!(
            evaluate(&ModalityId::metric_dia("z"), &StateSet::from_states(1, [0]), &s, &metric),
            Err(ModalityError::UnknownLabel(_))
        ));
    }

    #[test]
    fn mismatch_is_reported() {
        let g = Payload::FuzzySet(Weights::default());
        assert!(matches!(
            evaluate(&ModalityId::prob(), &StateSet::empty(1), &g, &LabelMetric::Discrete),
            Err(ModalityError::VariantMismatch { .. })
        ));
    }

    #[test]
    fn names_roundtrip() {
        for s in ["P", "~P", "P[a]", "dia[go]", "fdia", "~mdia[b]", "cdia"] {
            let m: ModalityId = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        for s in ["Q", "P[]", "fdia[a]", "dia", "mdia[a"] {
            assert!(s.parse::<ModalityId>().is_err(), "{s}");
        }
    }

    #[test]
    fn dual_closure() {
        let s = ModalitySet::new([ModalityId::prob()]).unwrap();
        let c = s.close_under_duals();
        assert_eq!(c.to_string(), "P,~P");
        assert_eq!(c.close_under_duals(), c);
        let f = ModalitySet::new([ModalityId::fuzzy_dia()]).unwrap().close_under_duals();
        assert_eq!(f.to_string(), "fdia,~fdia");
        assert!(ModalitySet::new([]).is_err());
    }

    #[test]
    fn sugeno_examples() {
        let d = LabelMetric::Discrete;
        let mu = Payload::SubDist(w(&[(0, "1/2"), (1, "1/2")]));
        let ones = vec![Value::one(), Value::one()];
        assert_eq!(sugeno_evaluate(&ModalityId::prob(), &ones, &mu, &d).unwrap(), Value::one());
        let f = vec![v("3/5"), v("1/5")];
        assert_eq!(sugeno_evaluate(&ModalityId::prob(), &f, &mu, &d).unwrap(), v("1/2"));
        // dual on a subdistribution with missing mass needs the candidate 1
        let sub = Payload::SubDist(w(&[(0, "1/2")]));
        let zero = vec![Value::zero()];
        assert_eq!(
            sugeno_evaluate(&ModalityId::prob().dual(), &zero, &sub, &d).unwrap(),
            v("1/2")
        );
    }
}
