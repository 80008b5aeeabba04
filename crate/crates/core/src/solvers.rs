//! Spoiler's move problem: given functor elements `a ∈ FX`, `b ∈ FY`, a
//! target relation `S` and `ε`, find a modality `λ` and predicates `A, B`
//! with `λ(B)(b) < λ(A)(a) - ε` and `A × (Y∖B) ⊆ S`.
//!
//! Throughout, `R = (X×Y)∖S` and `B` is chosen as `R[A]`, the smallest
//! predicate compatible with `A`.

use itertools::Itertools;
use thiserror::Error;

use crate::flow::{build_network, extract_witness, max_flow_min_cut};
use crate::modalities::{evaluate, Family, ModalityError, ModalityId, ModalitySet};
use crate::systems::{LabelMetric, Payload, Rel2, StateSet, Weights};
use crate::values::{below_by_more_than, Value};

/// Default bound on `|supp(a)| + |supp(b)|` for exhaustive search.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct WitnessQuery<'a> {
    pub a: &'a Payload,
    pub b: &'a Payload,
    /// Positions already known to be won by Spoiler; `X × Y` shaped.
    pub s: &'a Rel2,
    pub eps: &'a Value,
    pub modalities: &'a ModalitySet,
    pub metric: &'a LabelMetric,
}

impl WitnessQuery<'_> {
    pub fn left_len(&self) -> usize {
        self.s.rows()
    }

    pub fn right_len(&self) -> usize {
        self.s.cols()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub modality: ModalityId,
    pub a: StateSet,
    pub b: StateSet,
    /// `λ(A)(a)`.
    pub left_value: Value,
    /// `λ(B)(b)`.
    pub right_value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no polynomial solver for `{0}`; use brute force")]
    Unsupported(ModalityId),
    #[error("brute force over {size} support states exceeds the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("{0} does not satisfy the move condition")]
    InvalidWitness(String),
    #[error(transparent)]
    Modality(#[from] ModalityError),
}

impl Witness {
    /// Checks both defining conditions before accepting `(λ, A, B)`.
    pub fn new(q: &WitnessQuery<'_>, modality: ModalityId, a: StateSet, b: StateSet) -> Result<Self, SolveError> {
        let left_value = evaluate(&modality, &a, q.a, q.metric)?;
        let right_value = evaluate(&modality, &b, q.b, q.metric)?;
        let describe = || format!("({modality}, {a:?}, {b:?})");
        if !below_by_more_than(&right_value, &left_value, q.eps) {
            return Err(SolveError::InvalidWitness(describe()));
        }
        for x in a.iter() {
            for y in 0..q.right_len() {
                if !b.contains(y) && !q.s.contains(x, y) {
                    return Err(SolveError::InvalidWitness(describe()));
                }
            }
        }
        Ok(Witness {
            modality,
            a,
            b,
            left_value,
            right_value,
        })
    }
}

fn distribution_slice<'p>(m: &ModalityId, p: &'p Payload) -> Option<&'p Weights> {
    match (m.family, p) {
        (Family::Prob, Payload::SubDist(w)) => Some(w),
        (Family::ProbLabel, Payload::LabelledSubDist(s)) | (Family::DiaLabel, Payload::LabelDist(s)) => {
            s.get(m.label.as_deref().unwrap_or(""))
        }
        _ => None,
    }
}

/// Solves the primal problem for `m` (its dual flag is ignored) on
/// `(a, b, R)`, returning `A` only; the caller derives `B`.
fn solve_primal(
    m: &ModalityId,
    a: &Payload,
    b: &Payload,
    r: &Rel2,
    eps: &Value,
    metric: &LabelMetric,
) -> Result<Option<StateSet>, SolveError> {
    let nx = r.rows();
    let primal = m.primal();
    match m.family {
        Family::Prob | Family::ProbLabel | Family::DiaLabel => {
            check_variant(&primal, a)?;
            check_variant(&primal, b)?;
            let empty = Weights::default();
            let mu = distribution_slice(m, a).unwrap_or(&empty);
            let nu = distribution_slice(m, b).unwrap_or(&empty);
            if mu.is_empty() {
                // λ(A)(a) = 0 for every A.
                return Ok(None);
            }
            let net = build_network(mu, nu, r);
            let cut = max_flow_min_cut(&net);
            let total = Value::clamp_ratio(net.source_total());
            if below_by_more_than(&cut.value, &total, eps) {
                let (wa, _) = extract_witness(&net, &cut);
                Ok(Some(wa))
            } else {
                Ok(None)
            }
        }
        Family::FuzzyDia | Family::MetricDia => {
            check_variant(&primal, a)?;
            check_variant(&primal, b)?;
            // Both liftings are suprema over the elements of A, so some
            // singleton attains λ(A)(a) while its image only shrinks.
            for x in a.support(nx).iter() {
                let sa = StateSet::from_states(nx, [x]);
                let lv = evaluate(&primal, &sa, a, metric)?;
                let rv = evaluate(&primal, &r.image(&sa), b, metric)?;
                if below_by_more_than(&rv, &lv, eps) {
                    return Ok(Some(sa));
                }
            }
            Ok(None)
        }
        Family::ConvexDia => Err(SolveError::Unsupported(m.clone())),
    }
}

fn check_variant(m: &ModalityId, p: &Payload) -> Result<(), SolveError> {
    if m.applies_to(p.kind()) {
        Ok(())
    } else {
        Err(ModalityError::VariantMismatch {
            modality: m.to_string(),
            kind: p.kind(),
        }
        .into())
    }
}

/// Solves for one modality. Duals are handled by mirroring:
/// `λ̄(B)(b) < λ̄(A)(a) - ε` iff `λ(X∖A)(a) < λ(Y∖B)(b) - ε`, which is the
/// primal problem on `(b, a, R°)` with `A' = Y∖B`, `B' ⊇ R°[A']`.
pub fn solve_modality(q: &WitnessQuery<'_>, m: &ModalityId) -> Result<Option<Witness>, SolveError> {
    let r = q.s.complement();
    let found = if m.dual {
        let rc = r.converse();
        solve_primal(m, q.b, q.a, &rc, q.eps, q.metric)?.map(|am| rc.image(&am).complement())
    } else {
        solve_primal(m, q.a, q.b, &r, q.eps, q.metric)?
    };
    let Some(a) = found else { return Ok(None) };
    let a = a.intersection(&q.a.support(q.left_len()));
    let b = r.image(&a);
    Witness::new(q, m.clone(), a, b).map(Some)
}

/// First witness over the modalities in order, or `None`.
pub fn solve(q: &WitnessQuery<'_>) -> Result<Option<Witness>, SolveError> {
    for m in q.modalities.iter() {
        if let Some(w) = solve_modality(q, m)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Exhaustive search over `A ⊆ supp(a)` by increasing size, then
/// lexicographically, with `B = R[A]`.
pub fn brute_force_solve(q: &WitnessQuery<'_>, cap: usize) -> Result<Option<Witness>, SolveError> {
    let supp_a = q.a.support(q.left_len());
    let size = supp_a.len() + q.b.support(q.right_len()).len();
    if size > cap {
        return Err(SolveError::CapExceeded { size, cap });
    }
    let r = q.s.complement();
    let states: Vec<usize> = supp_a.iter().collect();
    for m in q.modalities.iter() {
        check_variant(m, q.a)?;
        check_variant(m, q.b)?;
        for k in 0..=states.len() {
            for combo in states.iter().copied().combinations(k) {
                let a = StateSet::from_states(q.left_len(), combo);
                let b = r.image(&a);
                let lv = evaluate(m, &a, q.a, q.metric)?;
                let rv = evaluate(m, &b, q.b, q.metric)?;
                if below_by_more_than(&rv, &lv, q.eps) {
                    return Witness::new(q, m.clone(), a, b).map(Some);
                }
            }
        }
    }
    Ok(None)
}

/// Polynomial solver where available, exhaustive search otherwise.
pub fn solve_with_fallback(q: &WitnessQuery<'_>, cap: usize) -> Result<Option<Witness>, SolveError> {
    for m in q.modalities.iter() {
        let found = match solve_modality(q, m) {
            Err(SolveError::Unsupported(_)) => {
                let single = ModalitySet::new([m.clone()]).expect("nonempty");
                brute_force_solve(
                    &WitnessQuery {
                        modalities: &single,
                        ..*q
                    },
                    cap,
                )?
            }
            other => other?,
        };
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}
