//! Exponential-time reference computations for small systems: greatest
//! `ε`-simulations, exact lax-extension values, exact distances and the
//! Kantorovich lifting.
//!
//! Every entry point enforces an [`OracleCap`] before enumerating subsets.
//! Subsets are only enumerated inside payload supports, since modality
//! values depend only on `A ∩ supp(a)`.

use rand::Rng;
use thiserror::Error;

use crate::game::compatible_metric;
use crate::modalities::{evaluate, sugeno_evaluate, ModalityError, ModalitySet};
use crate::systems::{LabelMetric, Payload, Rel2, StateSet, System, VRel};
use crate::values::{below_by_more_than, join, truncated_sub, Value};

/// Bound on the combined number of states the oracle will look at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCap {
    pub max_states: usize,
}

impl Default for OracleCap {
    fn default() -> Self {
        OracleCap { max_states: 12 }
    }
}

impl OracleCap {
    fn check(&self, size: usize) -> Result<(), OracleError> {
        if size > self.max_states {
            Err(OracleError::CapExceeded {
                size,
                cap: self.max_states,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{size} states exceed the oracle cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("fixpoint iteration did not stabilise within {0} rounds")]
    NonTermination(usize),
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Modality(#[from] ModalityError),
}

/// All subsets of `within`, as sets over `universe`.
pub fn subsets(universe: usize, within: &StateSet) -> impl Iterator<Item = StateSet> {
    let elems: Vec<usize> = within.iter().collect();
    let count = 1u64 << elems.len();
    (0..count).map(move |mask| {
        StateSet::from_states(
            universe,
            elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| *x),
        )
    })
}

fn compatible(left: &System, right: &System, modalities: &ModalitySet) -> Result<LabelMetric, OracleError> {
    compatible_metric(left, right, modalities).map_err(|e| OracleError::Incompatible(e.to_string()))
}

/// `⪯_{ε,Λ}`: starting from the full relation, pairs violating
/// `λ(R[A])(ζ(y)) ≥ λ(A)(ξ(x)) - ε` are deleted until nothing changes.
pub fn greatest_simulation(
    left: &System,
    right: &System,
    modalities: &ModalitySet,
    eps: &Value,
    cap: &OracleCap,
) -> Result<Rel2, OracleError> {
    cap.check(left.len() + right.len())?;
    let metric = compatible(left, right, modalities)?;
    let (nx, ny) = (left.len(), right.len());
    let mut r = Rel2::full(nx, ny);
    loop {
        let mut doomed = Vec::new();
        for (x, y) in r.pairs() {
            if violates(&r, left.payload(x), right.payload(y), modalities, &metric, eps)? {
                doomed.push((x, y));
            }
        }
        if doomed.is_empty() {
            return Ok(r);
        }
        for (x, y) in doomed {
            r.remove(x, y);
        }
    }
}

fn violates(
    r: &Rel2,
    a: &Payload,
    b: &Payload,
    modalities: &ModalitySet,
    metric: &LabelMetric,
    eps: &Value,
) -> Result<bool, OracleError> {
    let supp = a.support(r.rows());
    for m in modalities.iter() {
        for set in subsets(r.rows(), &supp) {
            let va = evaluate(m, &set, a, metric)?;
            let vb = evaluate(m, &r.image(&set), b, metric)?;
            if below_by_more_than(&vb, &va, eps) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `max_{λ,A} λ(A)(a) ⊖ λ(R[A])(b)`: the least `ε` the relator accepts for
/// a fixed relation `R`.
fn relator_gap(r: &Rel2, a: &Payload, b: &Payload, modalities: &ModalitySet, metric: &LabelMetric) -> Result<Value, OracleError> {
    let supp = a.support(r.rows());
    let mut best = Value::zero();
    for m in modalities.iter() {
        for set in subsets(r.rows(), &supp) {
            let va = evaluate(m, &set, a, metric)?;
            if va <= best {
                continue;
            }
            let vb = evaluate(m, &r.image(&set), b, metric)?;
            best = join(&best, &truncated_sub(&va, &vb));
        }
    }
    Ok(best)
}

/// `L_Λ r(a,b) = ⋀ { ε | a L_{ε,Λ} r_ε b }`.
///
/// The cut `r_ε` is constant on each interval `[v_i, v_{i+1})` between
/// consecutive values of `r` (with `v_0 = 0`), and there the condition
/// reads `ε ≥ m_i`. Interval `i` contributes `max(v_i, m_i)` when that lies
/// below `v_{i+1}`; the last interval always contributes. Since `m_i` falls
/// as `i` grows, contributing intervals form a suffix and the first one
/// gives the infimum. Only entries on `supp(a) × supp(b)` matter.
pub fn exact_lax(
    r: &VRel,
    a: &Payload,
    b: &Payload,
    modalities: &ModalitySet,
    metric: &LabelMetric,
    cap: &OracleCap,
) -> Result<Value, OracleError> {
    cap.check(r.rows() + r.cols())?;
    let sa = a.support(r.rows());
    let sb = b.support(r.cols());
    let mut cuts: Vec<Value> = vec![Value::zero()];
    for x in sa.iter() {
        for y in sb.iter() {
            cuts.push(r.get(x, y).clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    let candidate = |i: usize| -> Result<Value, OracleError> {
        let gap = relator_gap(&r.cut(&cuts[i]), a, b, modalities, metric)?;
        Ok(join(&cuts[i], &gap))
    };
    // Binary search for the first contributing interval.
    let (mut lo, mut hi) = (0, cuts.len() - 1);
    let mut found = candidate(hi)?;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let c = candidate(mid)?;
        if c < cuts[mid + 1] {
            hi = mid;
            found = c;
        } else {
            lo = mid + 1;
        }
    }
    Ok(found)
}

/// The threshold-based distance `d_Λ` as the least fixpoint of
/// `r ↦ L_Λ r (ξ(-), ζ(-))`, by Kleene iteration from the zero relation.
pub fn exact_distance(
    left: &System,
    right: &System,
    modalities: &ModalitySet,
    cap: &OracleCap,
) -> Result<VRel, OracleError> {
    cap.check(left.len() + right.len())?;
    let metric = compatible(left, right, modalities)?;
    let (nx, ny) = (left.len(), right.len());
    // Iterates only take values max(cut, gap) among finitely many modality
    // gaps, and each round raises at least one entry.
    let gaps_per_pair = modalities.len().saturating_mul(1usize << nx.min(40)).saturating_mul(1usize << ny.min(40));
    let guard = (nx * ny).max(1).saturating_mul(gaps_per_pair.saturating_add(2));
    // Updating in place keeps every iterate below the least fixpoint, so a
    // sweep without changes has reached it.
    let mut r = VRel::constant(nx, ny, Value::zero());
    for _ in 0..guard {
        let mut changed = false;
        for x in 0..nx {
            for y in 0..ny {
                let v = exact_lax(&r, left.payload(x), right.payload(y), modalities, &metric, cap)?;
                if v != *r.get(x, y) {
                    r.set(x, y, v);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(r);
        }
    }
    Err(OracleError::NonTermination(guard))
}

/// Both sides of the Kantorovich comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kantorovich {
    /// Maximum over the witness family `f = ε_A·1_A`, `g(y) = ⋁_x f(x) ⊖ r(x,y)`.
    pub witness_max: Value,
    /// Maximum over randomly sampled `r`-preserved pairs.
    pub sampled_max: Value,
}

/// `⋁_λ ⟨λ⟩f(a) ⊖ ⟨λ⟩g(b)`.
fn sugeno_gap(
    f: &[Value],
    g: &[Value],
    a: &Payload,
    b: &Payload,
    modalities: &ModalitySet,
    metric: &LabelMetric,
) -> Result<Value, OracleError> {
    let mut best = Value::zero();
    for m in modalities.iter() {
        let fa = sugeno_evaluate(m, f, a, metric)?;
        let gb = sugeno_evaluate(m, g, b, metric)?;
        best = join(&best, &truncated_sub(&fa, &gb));
    }
    Ok(best)
}

/// The least `g` making `(f, g)` `r`-preserved.
fn tightest_g(r: &VRel, f: &[Value]) -> Vec<Value> {
    (0..r.cols())
        .map(|y| {
            (0..r.rows())
                .map(|x| truncated_sub(&f[x], r.get(x, y)))
                .max()
                .unwrap_or_else(Value::zero)
        })
        .collect()
}

/// `K_⟨Λ⟩ r(a,b)` from below in two ways: the witness family used to prove
/// `K_⟨Λ⟩ r ≥ L_Λ r`, and `samples` random `r`-preserved pairs with values
/// on the grid `{0, 1/grid, …, 1}`.
#[allow(clippy::too_many_arguments)]
pub fn kantorovich<R: Rng>(
    r: &VRel,
    a: &Payload,
    b: &Payload,
    modalities: &ModalitySet,
    metric: &LabelMetric,
    cap: &OracleCap,
    samples: usize,
    grid: u32,
    rng: &mut R,
) -> Result<Kantorovich, OracleError> {
    cap.check(r.rows() + r.cols())?;
    let (nx, ny) = (r.rows(), r.cols());
    let supp = a.support(nx);
    let mut witness_max = Value::zero();
    for m in modalities.iter() {
        let single = ModalitySet::new([m.clone()])?;
        for set in subsets(nx, &supp) {
            let level = evaluate(m, &set, a, metric)?;
            let f: Vec<Value> = (0..nx)
                .map(|x| if set.contains(x) { level.clone() } else { Value::zero() })
                .collect();
            let g = tightest_g(r, &f);
            witness_max = join(&witness_max, &sugeno_gap(&f, &g, a, b, &single, metric)?);
        }
    }

    let grid = grid.max(1);
    let point = |rng: &mut R| Value::new(rng.gen_range(0..=grid) as i64, grid as i64).expect("grid point");
    let mut sampled_max = Value::zero();
    for _ in 0..samples {
        let f: Vec<Value> = (0..nx).map(|_| point(rng)).collect();
        let g: Vec<Value> = tightest_g(r, &f)
            .into_iter()
            .map(|low| if rng.gen_bool(0.5) { low } else { join(&low, &point(rng)) })
            .collect();
        debug_assert_eq!(g.len(), ny);
        sampled_max = join(&sampled_max, &sugeno_gap(&f, &g, a, b, modalities, metric)?);
    }
    Ok(Kantorovich {
        witness_max,
        sampled_max,
    })
}
