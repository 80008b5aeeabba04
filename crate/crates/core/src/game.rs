//! The codensity game up to `ε`.
//!
//! At position `(x,y)` Spoiler plays `(λ, A, B)` with
//! `λ(B)(ζ(y)) < λ(A)(ξ(x)) - ε`; Duplicator must answer with some
//! `(x', y') ∈ A × (Y∖B)`. Spoiler's winning region is the least fixpoint of
//! "positions with a move into the current region", computed by Kleene
//! iteration from the empty relation.

use thiserror::Error;

use crate::modalities::{ModalityError, ModalitySet};
use crate::oracle::{self, OracleCap, OracleError};
use crate::solvers::{solve_with_fallback, SolveError, Witness, WitnessQuery, DEFAULT_BRUTE_FORCE_CAP};
use crate::systems::{LabelMetric, Rel2, StateSet, System};
use crate::values::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("incompatible inputs: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl From<ModalityError> for GameError {
    fn from(e: ModalityError) -> Self {
        GameError::Solve(e.into())
    }
}

/// Two systems of the same kind, a modality set and `ε`.
#[derive(Clone, Debug)]
pub struct GameConfig<'a> {
    pub left: &'a System,
    pub right: &'a System,
    pub modalities: ModalitySet,
    pub eps: Value,
    metric: LabelMetric,
    /// Bound for exhaustive search when a modality has no polynomial solver.
    pub brute_force_cap: usize,
}

/// Checks that two systems and a modality set fit together and returns the
/// shared label metric.
pub fn compatible_metric(left: &System, right: &System, modalities: &ModalitySet) -> Result<LabelMetric, GameError> {
    if left.kind() != right.kind() {
        return Err(GameError::Incompatible(format!(
            "left system is a {} but right system is a {}",
            left.kind(),
            right.kind()
        )));
    }
    for m in modalities.iter() {
        if !m.applies_to(left.kind()) {
            return Err(GameError::Incompatible(format!(
                "modality `{m}` does not apply to {}",
                left.kind()
            )));
        }
    }
    let metric = left.label_metric();
    if metric != right.label_metric() {
        return Err(GameError::Incompatible("the systems declare different label metrics".into()));
    }
    for m in modalities.iter() {
        if let Some(l) = m.label() {
            if !metric.knows(l) {
                return Err(GameError::Incompatible(format!("label `{l}` is not in the label metric")));
            }
        }
    }
    Ok(metric)
}

impl<'a> GameConfig<'a> {
    pub fn new(left: &'a System, right: &'a System, modalities: ModalitySet, eps: Value) -> Result<Self, GameError> {
        let metric = compatible_metric(left, right, &modalities)?;
        Ok(GameConfig {
            left,
            right,
            modalities,
            eps,
            metric,
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
        })
    }

    pub fn with_eps(&self, eps: Value) -> Self {
        GameConfig { eps, ..self.clone() }
    }

    pub fn metric(&self) -> &LabelMetric {
        &self.metric
    }
}

/// Spoiler's winning region with a history-free strategy.
#[derive(Clone, Debug)]
pub struct GameSolution {
    pub spoiler_wins: Rel2,
    strategy: Vec<Option<Witness>>,
    stage: Vec<u32>,
    /// Won positions in the order they were added (stage by stage).
    order: Vec<(usize, usize)>,
    /// Kleene rounds run, including the final one that added nothing.
    pub rounds: usize,
}

impl GameSolution {
    fn idx(&self, x: usize, y: usize) -> usize {
        x * self.spoiler_wins.cols() + y
    }

    pub fn spoiler_wins_at(&self, x: usize, y: usize) -> bool {
        self.spoiler_wins.contains(x, y)
    }

    pub fn strategy(&self, x: usize, y: usize) -> Option<&Witness> {
        self.strategy[self.idx(x, y)].as_ref()
    }

    /// The round in which `(x,y)` entered the winning region.
    pub fn stage(&self, x: usize, y: usize) -> Option<u32> {
        match self.stage[self.idx(x, y)] {
            0 => None,
            s => Some(s),
        }
    }

    pub fn won_in_order(&self) -> &[(usize, usize)] {
        &self.order
    }
}

fn predecessors(sys: &System) -> Vec<Vec<usize>> {
    let n = sys.len();
    let mut pre = vec![Vec::new(); n];
    for x in 0..n {
        for s in sys.payload(x).support(n).iter() {
            pre[s].push(x);
        }
    }
    pre
}

/// Positions reachable from `roots` by pairing successors.
fn reachable_positions(cfg: &GameConfig<'_>, roots: &[(usize, usize)]) -> Rel2 {
    let (nx, ny) = (cfg.left.len(), cfg.right.len());
    let mut seen = Rel2::empty(nx, ny);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for &(x, y) in roots {
        if !seen.contains(x, y) {
            seen.insert(x, y);
            stack.push((x, y));
        }
    }
    while let Some((x, y)) = stack.pop() {
        let sx = cfg.left.payload(x).support(nx);
        let sy = cfg.right.payload(y).support(ny);
        for x2 in sx.iter() {
            for y2 in sy.iter() {
                if !seen.contains(x2, y2) {
                    seen.insert(x2, y2);
                    stack.push((x2, y2));
                }
            }
        }
    }
    seen
}

fn solve_on(cfg: &GameConfig<'_>, board: &Rel2) -> Result<GameSolution, GameError> {
    let (nx, ny) = (cfg.left.len(), cfg.right.len());
    let mut won = Rel2::empty(nx, ny);
    let mut strategy: Vec<Option<Witness>> = vec![None; nx * ny];
    let mut stage = vec![0u32; nx * ny];
    let mut order = Vec::new();
    let pre_x = predecessors(cfg.left);
    let pre_y = predecessors(cfg.right);

    let mut dirty: Vec<(usize, usize)> = board.pairs().collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut fresh: Vec<((usize, usize), Witness)> = Vec::new();
        for &(x, y) in &dirty {
            let q = WitnessQuery {
                a: cfg.left.payload(x),
                b: cfg.right.payload(y),
                s: &won,
                eps: &cfg.eps,
                modalities: &cfg.modalities,
                metric: &cfg.metric,
            };
            if let Some(w) = solve_with_fallback(&q, cfg.brute_force_cap)? {
                fresh.push(((x, y), w));
            }
        }
        if fresh.is_empty() {
            break;
        }
        let mut next = Rel2::empty(nx, ny);
        for ((x, y), w) in fresh {
            won.insert(x, y);
            stage[x * ny + y] = rounds as u32;
            strategy[x * ny + y] = Some(w);
            order.push((x, y));
            for &px in &pre_x[x] {
                for &py in &pre_y[y] {
                    next.insert(px, py);
                }
            }
        }
        dirty = next.pairs().filter(|&(x, y)| board.contains(x, y) && !won.contains(x, y)).collect();
    }
    Ok(GameSolution {
        spoiler_wins: won,
        strategy,
        stage,
        order,
        rounds,
    })
}

/// Solves the game on the whole board `X × Y`.
pub fn solve_game(cfg: &GameConfig<'_>) -> Result<GameSolution, GameError> {
    solve_on(cfg, &Rel2::full(cfg.left.len(), cfg.right.len()))
}

/// Solves the game restricted to positions reachable from `roots`; the
/// outcome at those positions equals the full game's.
pub fn solve_game_from(cfg: &GameConfig<'_>, roots: &[(usize, usize)]) -> Result<GameSolution, GameError> {
    solve_on(cfg, &reachable_positions(cfg, roots))
}

/// `x ⪯_ε y`: Duplicator wins from `(x,y)`.
pub fn check_similar(cfg: &GameConfig<'_>, x: usize, y: usize) -> Result<bool, GameError> {
    Ok(!solve_game_from(cfg, &[(x, y)])?.spoiler_wins_at(x, y))
}

/// Checks both directions with dual-closed modalities.
pub fn check_bisimilar(cfg: &GameConfig<'_>, x: usize, y: usize) -> Result<bool, GameError> {
    let closed = GameConfig {
        modalities: cfg.modalities.close_under_duals(),
        ..cfg.clone()
    };
    check_similar(&closed, x, y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    Bisect(Value),
    Exact(OracleCap),
}

impl DistanceMode {
    /// Bisection down to `2^-20`.
    pub fn default_bisect() -> Self {
        DistanceMode::Bisect(Value::new(1, 1 << 20).expect("in range"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distance {
    Exact(Value),
    /// Spoiler wins at `lo`, Duplicator at `hi`.
    Interval { lo: Value, hi: Value },
}

/// `d_Λ(x,y) = ⋀ { ε | x ⪯_ε y }`.
pub fn distance(
    left: &System,
    right: &System,
    x: usize,
    y: usize,
    modalities: &ModalitySet,
    mode: &DistanceMode,
) -> Result<Distance, GameError> {
    let base = GameConfig::new(left, right, modalities.clone(), Value::zero())?;
    match mode {
        DistanceMode::Bisect(tol) => {
            if check_similar(&base, x, y)? {
                return Ok(Distance::Exact(Value::zero()));
            }
            let (mut lo, mut hi) = (Value::zero(), Value::one());
            while crate::values::below_by_more_than(&lo, &hi, tol) {
                let mid = lo.midpoint(&hi);
                if check_similar(&base.with_eps(mid.clone()), x, y)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(Distance::Interval { lo, hi })
        }
        DistanceMode::Exact(cap) => {
            let d = oracle::exact_distance(left, right, modalities, cap)?;
            let v = d.get(x, y).clone();
            if !check_similar(&base.with_eps(v.clone()), x, y)? {
                return Err(GameError::Inconsistent(format!(
                    "game rejects similarity at the computed distance {v}"
                )));
            }
            if !v.is_zero() {
                let shrink = num_rational::BigRational::new(65535.into(), 65536.into());
                let below = Value::clamp_ratio(v.ratio() * shrink);
                if check_similar(&base.with_eps(below.clone()), x, y)? {
                    return Err(GameError::Inconsistent(format!(
                        "game accepts similarity at {below}, below the computed distance {v}"
                    )));
                }
            }
            Ok(Distance::Exact(v))
        }
    }
}

/// Replays the recorded strategy: every Duplicator answer to a move made at
/// stage `i` lies at a position won at a stage `< i`, so plays from `(x,y)`
/// end within `stage(x,y)` Spoiler moves. Returns the longest play length.
pub fn replay_strategy(sol: &GameSolution, x: usize, y: usize) -> Option<u32> {
    let w = sol.strategy(x, y)?;
    let st = sol.stage(x, y)?;
    let ny = sol.spoiler_wins.cols();
    let mut longest = 1;
    for x2 in w.a.iter() {
        for y2 in StateSet::full(ny).iter().filter(|&y2| !w.b.contains(y2)) {
            let s2 = sol.stage(x2, y2)?;
            if s2 >= st {
                return None;
            }
            longest = longest.max(1 + replay_strategy(sol, x2, y2)?);
        }
    }
    Some(longest)
}
