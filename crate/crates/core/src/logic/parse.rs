//! Formula text syntax.
//!
//! ```text
//! two-valued:   tt | ff | (φ & ψ) | (φ | ψ) | [M>=q] φ
//! quantitative: tt | ff | (φ & ψ) | (φ | ψ) | φ (+) q | φ (-) q | <M> φ
//! ```
//!
//! Shifts are postfix and bind loosest; `(φ)` may be used for grouping.

use std::fmt;

use thiserror::Error;

use crate::modalities::ModalityId;
use crate::values::{Value, ValueError};

use super::arena::{Arena, Formula, Formula2, FormulaQ, Node2, NodeId, NodeQ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

/// A formula of either logic.
#[derive(Clone, Debug)]
pub enum AnyFormula {
    TwoValued(Formula2),
    Quantitative(FormulaQ),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LogicKind {
    TwoValued,
    Quantitative,
}

impl fmt::Display for LogicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicKind::TwoValued => "two-valued",
            LogicKind::Quantitative => "quantitative",
        })
    }
}

enum Ast {
    Top,
    Bot,
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
    Mod(ModalityId, Value, Box<Ast>),
    Sugeno(ModalityId, Box<Ast>),
    ShiftUp(Box<Ast>, Value),
    ShiftDown(Box<Ast>, Value),
}

struct Parser<'t> {
    text: &'t str,
    pos: usize,
}

impl<'t> Parser<'t> {
    fn err<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'t str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let r = self.rest();
        if r.starts_with(kw) && !r[kw.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_') {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || c == '/' || c == '.' || c == '-'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return self.err(start, "expected a value");
        }
        let lit = &self.rest()[..len];
        self.pos += len;
        match lit.parse::<Value>() {
            Ok(v) => Ok(v),
            Err(ValueError::OutOfRange(_)) => self.err(start, "threshold outside [0,1]"),
            Err(e) => self.err(start, e.to_string()),
        }
    }

    fn modality(&mut self, end: &str) -> Result<ModalityId, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(len) = self.rest().find(end) else {
            return self.err(start, format!("expected `{end}`"));
        };
        let name = self.rest()[..len].trim();
        self.pos += len + end.len();
        name.parse::<ModalityId>()
            .or_else(|_| self.err(start, format!("unknown modality `{name}`")))
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut e = self.unary()?;
        loop {
            if self.eat("(+)") {
                e = Ast::ShiftUp(Box::new(e), self.value()?);
            } else if self.eat("(-)") {
                e = Ast::ShiftDown(Box::new(e), self.value()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.keyword("tt") {
            return Ok(Ast::Top);
        }
        if self.keyword("ff") {
            return Ok(Ast::Bot);
        }
        if self.eat("[") {
            let m = self.modality(">=")?;
            let q = self.value()?;
            if !self.eat("]") {
                return self.err(self.pos, "expected `]`");
            }
            return Ok(Ast::Mod(m, q, Box::new(self.unary()?)));
        }
        if self.eat("<") {
            let m = self.modality(">")?;
            return Ok(Ast::Sugeno(m, Box::new(self.unary()?)));
        }
        if self.rest().starts_with("(+)") || self.rest().starts_with("(-)") {
            return self.err(start, "shift without an operand");
        }
        if self.eat("(") {
            let l = self.expr()?;
            let e = if self.eat("&") {
                Ast::And(Box::new(l), Box::new(self.expr()?))
            } else if self.eat("|") {
                Ast::Or(Box::new(l), Box::new(self.expr()?))
            } else {
                l
            };
            if !self.eat(")") {
                return self.err(self.pos, "expected `)`");
            }
            return Ok(e);
        }
        if self.pos >= self.text.len() {
            self.err(start, "unexpected end of input")
        } else {
            self.err(start, "expected a formula")
        }
    }
}

fn parse_ast(text: &str) -> Result<Ast, ParseError> {
    let mut p = Parser { text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err(p.pos, "trailing input");
    }
    Ok(e)
}

fn logic_of(ast: &Ast, found: &mut Option<LogicKind>) -> Result<(), String> {
    let mut mark = |k: LogicKind| match found {
        Some(prev) if *prev != k => Err("formula mixes two-valued and quantitative constructs".to_string()),
        _ => {
            *found = Some(k);
            Ok(())
        }
    };
    match ast {
        Ast::Top | Ast::Bot => Ok(()),
        Ast::And(l, r) | Ast::Or(l, r) => {
            logic_of(l, found)?;
            logic_of(r, found)
        }
        Ast::Mod(_, _, c) => {
            mark(LogicKind::TwoValued)?;
            logic_of(c, found)
        }
        Ast::Sugeno(_, c) | Ast::ShiftUp(c, _) | Ast::ShiftDown(c, _) => {
            mark(LogicKind::Quantitative)?;
            logic_of(c, found)
        }
    }
}

fn build2(ast: &Ast, a: &mut Arena<Node2>) -> NodeId {
    match ast {
        Ast::Top => a.top(),
        Ast::Bot => a.bot(),
        Ast::And(l, r) => {
            let (l, r) = (build2(l, a), build2(r, a));
            a.and(l, r)
        }
        Ast::Or(l, r) => {
            let (l, r) = (build2(l, a), build2(r, a));
            a.or(l, r)
        }
        Ast::Mod(m, q, c) => {
            let c = build2(c, a);
            a.modal(m.clone(), q.clone(), c)
        }
        _ => unreachable!("checked by logic_of"),
    }
}

fn build_q(ast: &Ast, a: &mut Arena<NodeQ>) -> NodeId {
    match ast {
        Ast::Top => a.top(),
        Ast::Bot => a.bot(),
        Ast::And(l, r) => {
            let (l, r) = (build_q(l, a), build_q(r, a));
            a.and(l, r)
        }
        Ast::Or(l, r) => {
            let (l, r) = (build_q(l, a), build_q(r, a));
            a.or(l, r)
        }
        Ast::Sugeno(m, c) => {
            let c = build_q(c, a);
            a.sugeno(m.clone(), c)
        }
        Ast::ShiftUp(c, q) => {
            let c = build_q(c, a);
            a.shift_up(c, q.clone())
        }
        Ast::ShiftDown(c, q) => {
            let c = build_q(c, a);
            a.shift_down(c, q.clone())
        }
        Ast::Mod(..) => unreachable!("checked by logic_of"),
    }
}

/// Parses a formula of the requested logic, or auto-detects it
/// (formulae without modalities or shifts default to two-valued).
pub fn parse_formula(text: &str, want: Option<LogicKind>) -> Result<AnyFormula, ParseError> {
    let ast = parse_ast(text)?;
    let mut found = None;
    logic_of(&ast, &mut found).map_err(|m| ParseError { pos: 0, message: m })?;
    let kind = match (want, found) {
        (Some(w), Some(f)) if w != f => {
            return Err(ParseError {
                pos: 0,
                message: format!("expected a {w} formula, found a {f} one"),
            })
        }
        (Some(w), _) => w,
        (None, Some(f)) => f,
        (None, None) => LogicKind::TwoValued,
    };
    Ok(match kind {
        LogicKind::TwoValued => {
            let mut a = Arena::new();
            let root = build2(&ast, &mut a);
            AnyFormula::TwoValued(Formula::new(a, root))
        }
        LogicKind::Quantitative => {
            let mut a = Arena::new();
            let root = build_q(&ast, &mut a);
            AnyFormula::Quantitative(Formula::new(a, root))
        }
    })
}

pub fn parse_formula2(text: &str) -> Result<Formula2, ParseError> {
    match parse_formula(text, Some(LogicKind::TwoValued))? {
        AnyFormula::TwoValued(f) => Ok(f),
        AnyFormula::Quantitative(_) => unreachable!(),
    }
}

pub fn parse_formula_q(text: &str) -> Result<FormulaQ, ParseError> {
    match parse_formula(text, Some(LogicKind::Quantitative))? {
        AnyFormula::Quantitative(f) => Ok(f),
        AnyFormula::TwoValued(_) => unreachable!(),
    }
}
