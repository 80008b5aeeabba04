//! Distinguishing formulae read off Spoiler's winning strategy.
//!
//! Positions are processed in the order they entered the winning region.
//! For a position `(x₀,y₀)` with move `(λ, A, B)` and `q = λ(A)(ξ(x₀))`,
//! the formula is built from the already extracted `φ_{xy}` for Duplicator's
//! answers `(x,y) ∈ A × (Y∖B)`:
//!
//! * two-valued: `λ_q (⋁_{x∈A} ⋀_{y∈Y∖B} φ_{xy})`
//! * quantitative: `⟨λ⟩ (⋁_{x∈A} ⋀_{y∈Y∖B} φ'_{xy})`, where `φ'_{xy}` is
//!   `φ_{xy}` shifted so that `⟦φ'_{xy}⟧(x) = q`.
//!
//! All formulae of one run live in a single hash-consed arena.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameConfig, GameSolution};
use crate::logic::{
    dag_of_formula2, dag_of_formula_q, eval2_with, eval_q_with, formula2_of_dag, formula_q_of_dag, print_formula2,
    print_formula_q, AnyFormula, Arena, Dag, DagError, Formula, LazyEval2, LazyEvalQ, LogicKind, Node2, NodeId,
    NodeQ,
};
use crate::modalities::{evaluate, ModalityError};
use crate::systems::{LabelMetric, System};
use crate::values::{below_by_more_than, truncated_sub, Value};

/// Formulae larger than this (as trees) are not rendered as text.
pub const TEXT_TREE_LIMIT: u128 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("position ({0}, {1}) is not in Spoiler's winning region")]
    NotWon(String, String),
    #[error("answer ({0}, {1}) has no formula yet; the strategy is not stage-ordered")]
    MissingChild(usize, usize),
    #[error(transparent)]
    Modality(#[from] ModalityError),
}

/// Formulae for every won position of one game, sharing one arena.
pub struct Extraction<N> {
    pub arena: Arc<Arena<N>>,
    roots: Vec<Option<NodeId>>,
    cols: usize,
    pub eps: Value,
}

impl<N> Extraction<N> {
    pub fn root(&self, x: usize, y: usize) -> Option<NodeId> {
        self.roots[x * self.cols + y]
    }

    pub fn formula(&self, x: usize, y: usize) -> Option<Formula<N>> {
        self.root(x, y).map(|root| Formula {
            arena: self.arena.clone(),
            root,
        })
    }

    /// Positions with a formula, in extraction order of their ids.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.roots
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_some())
            .map(move |(i, _)| (i / cols, i % cols))
    }
}

/// Left successor `x` with the formulae for each unanswered `y`.
type ChildRow = (usize, Vec<(usize, NodeId)>);

fn children_of(
    sol: &GameSolution,
    roots: &[Option<NodeId>],
    ny: usize,
    x0: usize,
    y0: usize,
) -> Result<(crate::solvers::Witness, Vec<ChildRow>), ExtractError> {
    let w = sol.strategy(x0, y0).expect("won positions carry a move").clone();
    let mut groups = Vec::new();
    for x in w.a.iter() {
        let mut row = Vec::new();
        for y in (0..ny).filter(|y| !w.b.contains(*y)) {
            let id = roots[x * ny + y].ok_or(ExtractError::MissingChild(x, y))?;
            row.push((y, id));
        }
        groups.push((x, row));
    }
    Ok((w, groups))
}

/// Two-valued formulae with `x ⊨₀ φ_{xy}` and `y ⊭_ε φ_{xy}`.
pub fn extract_two_valued(sol: &GameSolution, cfg: &GameConfig<'_>) -> Result<Extraction<Node2>, ExtractError> {
    let (nx, ny) = (cfg.left.len(), cfg.right.len());
    let mut arena = Arena::<Node2>::new();
    let mut roots: Vec<Option<NodeId>> = vec![None; nx * ny];
    for &(x0, y0) in sol.won_in_order() {
        let (w, groups) = children_of(sol, &roots, ny, x0, y0)?;
        let q = evaluate(&w.modality, &w.a, cfg.left.payload(x0), cfg.metric())?;
        let mut disjuncts = Vec::with_capacity(groups.len());
        for (_, row) in groups {
            let ids: Vec<NodeId> = row.into_iter().map(|(_, id)| id).collect();
            disjuncts.push(arena.big_and(&ids));
        }
        let body = arena.big_or(&disjuncts);
        roots[x0 * ny + y0] = Some(arena.modal(w.modality, q, body));
    }
    Ok(Extraction {
        arena: Arc::new(arena),
        roots,
        cols: ny,
        eps: cfg.eps.clone(),
    })
}

/// Quantitative formulae with `⟦φ_{xy}⟧(y) < ⟦φ_{xy}⟧(x) - ε`.
pub fn extract_quantitative(sol: &GameSolution, cfg: &GameConfig<'_>) -> Result<Extraction<NodeQ>, ExtractError> {
    let (nx, ny) = (cfg.left.len(), cfg.right.len());
    let mut arena = Arena::<NodeQ>::new();
    let mut roots: Vec<Option<NodeId>> = vec![None; nx * ny];
    let mut left_eval = LazyEvalQ::new(cfg.left, cfg.metric().clone());
    for &(x0, y0) in sol.won_in_order() {
        let (w, groups) = children_of(sol, &roots, ny, x0, y0)?;
        let q = evaluate(&w.modality, &w.a, cfg.left.payload(x0), cfg.metric())?;
        let mut disjuncts = Vec::with_capacity(groups.len());
        for (x, row) in groups {
            let mut ids = Vec::with_capacity(row.len());
            for (_, id) in row {
                let v = left_eval.value(&arena, id, x)?;
                // Both shifts land exactly on q: v ⊖ (v - q) = q for v > q,
                // and v ⊕ (q - v) = q ≤ 1 for v < q, so no truncation occurs.
                let normalized = if v > q {
                    arena.shift_down(id, truncated_sub(&v, &q))
                } else if v < q {
                    arena.shift_up(id, truncated_sub(&q, &v))
                } else {
                    id
                };
                ids.push(normalized);
            }
            disjuncts.push(arena.big_and(&ids));
        }
        let body = arena.big_or(&disjuncts);
        roots[x0 * ny + y0] = Some(arena.sugeno(w.modality, body));
    }
    Ok(Extraction {
        arena: Arc::new(arena),
        roots,
        cols: ny,
        eps: cfg.eps.clone(),
    })
}

/// The recorded evaluation of a certificate at its two states.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum Evaluation {
    /// `x ⊨₀ φ` and `y ⊨_ε φ`.
    TwoValued { left: bool, right: bool },
    /// `⟦φ⟧(x)` and `⟦φ⟧(y)`.
    Quantitative { left: Value, right: Value },
}

/// A distinguishing formula for one pair, with its evaluation.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub left_state: String,
    pub right_state: String,
    pub epsilon: Value,
    pub formula: AnyFormula,
    pub evaluation: Evaluation,
}

impl Certificate {
    pub fn logic(&self) -> LogicKind {
        match self.formula {
            AnyFormula::TwoValued(_) => LogicKind::TwoValued,
            AnyFormula::Quantitative(_) => LogicKind::Quantitative,
        }
    }

    pub fn metrics(&self) -> crate::logic::Metrics {
        match &self.formula {
            AnyFormula::TwoValued(f) => f.metrics(),
            AnyFormula::Quantitative(f) => f.metrics(),
        }
    }

    /// Text rendering, if the unfolded tree is small enough.
    pub fn formula_text(&self) -> Option<String> {
        if self.metrics().tree_size > TEXT_TREE_LIMIT {
            return None;
        }
        Some(match &self.formula {
            AnyFormula::TwoValued(f) => print_formula2(f),
            AnyFormula::Quantitative(f) => print_formula_q(f),
        })
    }

    pub fn to_file(&self) -> CertificateFile {
        let m = self.metrics();
        CertificateFile {
            left_state: self.left_state.clone(),
            right_state: self.right_state.clone(),
            epsilon: self.epsilon.clone(),
            logic: self.logic().to_string(),
            formula: match &self.formula {
                AnyFormula::TwoValued(f) => dag_of_formula2(f),
                AnyFormula::Quantitative(f) => dag_of_formula_q(f),
            },
            formula_text: self.formula_text(),
            dag_size: m.dag_size,
            modal_rank: m.modal_rank,
            evaluation: self.evaluation.clone(),
        }
    }

    pub fn from_file(file: &CertificateFile) -> Result<Self, CertificateError> {
        let formula = match file.logic.as_str() {
            "two-valued" => AnyFormula::TwoValued(formula2_of_dag(&file.formula)?),
            "quantitative" => AnyFormula::Quantitative(formula_q_of_dag(&file.formula)?),
            other => return Err(CertificateError::Logic(other.to_string())),
        };
        let consistent = matches!(
            (&formula, &file.evaluation),
            (AnyFormula::TwoValued(_), Evaluation::TwoValued { .. })
                | (AnyFormula::Quantitative(_), Evaluation::Quantitative { .. })
        );
        if !consistent {
            return Err(CertificateError::Logic(format!("evaluation does not match logic `{}`", file.logic)));
        }
        Ok(Certificate {
            left_state: file.left_state.clone(),
            right_state: file.right_state.clone(),
            epsilon: file.epsilon.clone(),
            formula,
            evaluation: file.evaluation.clone(),
        })
    }
}

/// On-disk certificate layout.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CertificateFile {
    pub left_state: String,
    pub right_state: String,
    pub epsilon: Value,
    pub logic: String,
    pub formula: Dag,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula_text: Option<String>,
    pub dag_size: usize,
    pub modal_rank: usize,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("unknown logic `{0}`")]
    Logic(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// Certificates for every won position, evaluated at both states.
pub fn certificates_two_valued(ext: &Extraction<Node2>, cfg: &GameConfig<'_>) -> Result<Vec<Certificate>, ExtractError> {
    let mut left = LazyEval2::new(cfg.left, cfg.metric().clone(), Value::zero());
    let mut right = LazyEval2::new(cfg.right, cfg.metric().clone(), cfg.eps.clone());
    let mut out = Vec::new();
    for (x, y) in ext.positions() {
        let root = ext.root(x, y).expect("listed");
        out.push(Certificate {
            left_state: cfg.left.name(x).to_string(),
            right_state: cfg.right.name(y).to_string(),
            epsilon: cfg.eps.clone(),
            formula: AnyFormula::TwoValued(Formula {
                arena: ext.arena.clone(),
                root,
            }),
            evaluation: Evaluation::TwoValued {
                left: left.holds(&ext.arena, root, x)?,
                right: right.holds(&ext.arena, root, y)?,
            },
        });
    }
    Ok(out)
}

pub fn certificates_quantitative(
    ext: &Extraction<NodeQ>,
    cfg: &GameConfig<'_>,
) -> Result<Vec<Certificate>, ExtractError> {
    let mut left = LazyEvalQ::new(cfg.left, cfg.metric().clone());
    let mut right = LazyEvalQ::new(cfg.right, cfg.metric().clone());
    let mut out = Vec::new();
    for (x, y) in ext.positions() {
        let root = ext.root(x, y).expect("listed");
        out.push(Certificate {
            left_state: cfg.left.name(x).to_string(),
            right_state: cfg.right.name(y).to_string(),
            epsilon: cfg.eps.clone(),
            formula: AnyFormula::Quantitative(Formula {
                arena: ext.arena.clone(),
                root,
            }),
            evaluation: Evaluation::Quantitative {
                left: left.value(&ext.arena, root, x)?,
                right: right.value(&ext.arena, root, y)?,
            },
        });
    }
    Ok(out)
}

/// A single certificate for `(x,y)`, extracting along the way.
pub fn certificate_for(
    sol: &GameSolution,
    cfg: &GameConfig<'_>,
    logic: LogicKind,
    x: usize,
    y: usize,
) -> Result<Certificate, ExtractError> {
    if !sol.spoiler_wins_at(x, y) {
        return Err(ExtractError::NotWon(
            cfg.left.name(x).to_string(),
            cfg.right.name(y).to_string(),
        ));
    }
    let formula = match logic {
        LogicKind::TwoValued => AnyFormula::TwoValued(extract_two_valued(sol, cfg)?.formula(x, y).expect("won")),
        LogicKind::Quantitative => {
            AnyFormula::Quantitative(extract_quantitative(sol, cfg)?.formula(x, y).expect("won"))
        }
    };
    let evaluation = evaluate_at(&formula, cfg.left, cfg.right, cfg.metric(), x, y, &cfg.eps)?;
    Ok(Certificate {
        left_state: cfg.left.name(x).to_string(),
        right_state: cfg.right.name(y).to_string(),
        epsilon: cfg.eps.clone(),
        formula,
        evaluation,
    })
}

fn evaluate_at(
    formula: &AnyFormula,
    left: &System,
    right: &System,
    metric: &LabelMetric,
    x: usize,
    y: usize,
    eps: &Value,
) -> Result<Evaluation, ModalityError> {
    Ok(match formula {
        AnyFormula::TwoValued(f) => {
            let f = f.compact();
            Evaluation::TwoValued {
                left: eval2_with(&f, left, metric, &Value::zero())?.contains(x),
                right: eval2_with(&f, right, metric, eps)?.contains(y),
            }
        }
        AnyFormula::Quantitative(f) => {
            let f = f.compact();
            Evaluation::Quantitative {
                left: eval_q_with(&f, left, metric)?[x].clone(),
                right: eval_q_with(&f, right, metric)?[y].clone(),
            }
        }
    })
}

/// Outcome of an independent re-evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recheck {
    pub valid: bool,
    pub reason: Option<String>,
    pub evaluation: Option<Evaluation>,
}

impl Recheck {
    fn invalid(reason: impl Into<String>) -> Self {
        Recheck {
            valid: false,
            reason: Some(reason.into()),
            evaluation: None,
        }
    }
}

/// Re-evaluates the formula from scratch on both systems. Valid iff the
/// distinguishing condition holds and the recorded evaluation matches.
pub fn recheck_detailed(cert: &Certificate, left: &System, right: &System) -> Recheck {
    let (Some(x), Some(y)) = (left.state(&cert.left_state), right.state(&cert.right_state)) else {
        return Recheck::invalid("certificate names a state missing from the systems");
    };
    if left.kind() != right.kind() {
        return Recheck::invalid("systems are of different kinds");
    }
    let metric = left.label_metric();
    if metric != right.label_metric() {
        return Recheck::invalid("systems declare different label metrics");
    }
    let eval = match evaluate_at(&cert.formula, left, right, &metric, x, y, &cert.epsilon) {
        Ok(e) => e,
        Err(e) => return Recheck::invalid(e.to_string()),
    };
    let distinguishes = match &eval {
        Evaluation::TwoValued { left, right } => *left && !*right,
        Evaluation::Quantitative { left, right } => below_by_more_than(right, left, &cert.epsilon),
    };
    let reason = if !distinguishes {
        Some("the formula does not separate the states by more than epsilon".to_string())
    } else if eval != cert.evaluation {
        Some("recorded evaluation differs from the recomputed one".to_string())
    } else {
        None
    };
    Recheck {
        valid: reason.is_none(),
        reason,
        evaluation: Some(eval),
    }
}

pub fn recheck(cert: &Certificate, left: &System, right: &System) -> bool {
    recheck_detailed(cert, left, right).valid
}
