//! Command-line front end. Structured output is JSON on stdout; `--human`
//! switches to short prose.
//!
//! Exit codes: 0 success, 1 negative answer (`check`, `validate`), 2 pair
//! not distinguishable (`distinguish`), 64 usage, file or parse errors, 65
//! contract violations, 66 oracle cap exceeded, 70 internal inconsistency.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::extract::{certificate_for, recheck_detailed, Certificate, CertificateFile, Evaluation, ExtractError};
use crate::game::{check_similar, distance, solve_game_from, Distance, DistanceMode, GameConfig, GameError};
use crate::logic::{
    eval2, eval_q, formula2_of_dag, formula_q_of_dag, parse_formula, print_formula2, print_formula_q, AnyFormula,
    Dag, LogicKind,
};
use crate::modalities::ModalitySet;
use crate::oracle::{exact_distance, greatest_simulation, OracleCap, OracleError};
use crate::solvers::SolveError;
use crate::systems::System;
use crate::values::Value;

pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_NOT_DISTINGUISHABLE: i32 = 2;
pub const EXIT_INPUT: i32 = 64;
pub const EXIT_CONTRACT: i32 = 65;
pub const EXIT_ORACLE_CAP: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "tbdist", version, about = "Threshold-based behavioural distances and distinguishing formulae")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the left state is ε-similar to the right state.
    Check(CheckArgs),
    /// Compute the behavioural distance between two states.
    Distance(DistanceArgs),
    /// Extract a distinguishing formula for a pair that is not ε-similar.
    Distinguish(DistinguishArgs),
    /// Evaluate a formula on every state of a system.
    Eval(EvalArgs),
    /// Re-evaluate a certificate independently.
    Validate(ValidateArgs),
    /// Exhaustive reference computations (exponential time, capped).
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Left system document (JSON).
    #[arg(long)]
    left: PathBuf,
    /// Right system document (JSON).
    #[arg(long)]
    right: PathBuf,
    /// State of the left system.
    #[arg(long)]
    lx: String,
    /// State of the right system.
    #[arg(long)]
    ry: String,
    /// Comma-separated modalities, e.g. `P,~P`; defaults to the system type's set.
    #[arg(long)]
    modalities: Option<String>,
    /// Close the modality set under duals.
    #[arg(long)]
    bisim: bool,
    /// Print a one-line summary instead of JSON.
    #[arg(long)]
    human: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Threshold in [0,1], e.g. `1/10` or `0.1`.
    #[arg(long)]
    eps: Value,
    #[command(flatten)]
    pair: PairArgs,
}

#[derive(Args, Debug)]
struct DistanceArgs {
    /// `bisect`, `bisect:TOL` or `exact`.
    #[arg(long, default_value = "bisect")]
    mode: String,
    /// Oracle cap on |X| + |Y| for `--mode exact`.
    #[arg(long, default_value_t = OracleCap::default().max_states)]
    max_states: usize,
    #[command(flatten)]
    pair: PairArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LogicArg {
    TwoValued,
    Quantitative,
}

impl From<LogicArg> for LogicKind {
    fn from(l: LogicArg) -> Self {
        match l {
            LogicArg::TwoValued => LogicKind::TwoValued,
            LogicArg::Quantitative => LogicKind::Quantitative,
        }
    }
}

#[derive(Args, Debug)]
struct DistinguishArgs {
    /// Threshold in [0,1].
    #[arg(long)]
    eps: Value,
    #[arg(long, value_enum)]
    logic: LogicArg,
    /// Where to write the certificate; it is printed to stdout as well.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    pair: PairArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Formula text, a formula dag in JSON, or a certificate.
    #[arg(long)]
    formula_file: PathBuf,
    /// System document (JSON).
    #[arg(long)]
    system: PathBuf,
    /// Satisfaction up to ε (two-valued logic); without it the formula is quantitative.
    #[arg(long)]
    eps: Option<Value>,
    /// Print a one-line summary instead of JSON.
    #[arg(long)]
    human: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Certificate written by `distinguish`.
    #[arg(long)]
    cert: PathBuf,
    /// Left system document (JSON).
    #[arg(long)]
    left: PathBuf,
    /// Right system document (JSON).
    #[arg(long)]
    right: PathBuf,
    /// Print a one-line summary instead of JSON.
    #[arg(long)]
    human: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Left system document (JSON).
    #[arg(long)]
    left: PathBuf,
    /// Right system document (JSON).
    #[arg(long)]
    right: PathBuf,
    /// Comma-separated modalities; defaults to the system type's set.
    #[arg(long)]
    modalities: Option<String>,
    /// Close the modality set under duals.
    #[arg(long)]
    bisim: bool,
    /// Compute the greatest ε-simulation instead of distances.
    #[arg(long)]
    eps: Option<Value>,
    /// Cap on |X| + |Y|.
    #[arg(long, default_value_t = OracleCap::default().max_states)]
    max_states: usize,
    /// Print a one-line summary instead of JSON.
    #[arg(long)]
    human: bool,
}

/// A failed invocation: exit code and message.
struct Failure(i32, String);

type Outcome = Result<(i32, String), Failure>;

fn input(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, msg.to_string())
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        match &e {
            GameError::Oracle(o) => o.clone().into(),
            GameError::Inconsistent(_) | GameError::Solve(SolveError::InvalidWitness(_)) => {
                Failure(EXIT_INTERNAL, e.to_string())
            }
            _ => Failure(EXIT_CONTRACT, e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::CapExceeded { .. } => Failure(EXIT_ORACLE_CAP, e.to_string()),
            OracleError::NonTermination(_) => Failure(EXIT_INTERNAL, e.to_string()),
            _ => Failure(EXIT_CONTRACT, e.to_string()),
        }
    }
}

impl From<ExtractError> for Failure {
    fn from(e: ExtractError) -> Self {
        match e {
            ExtractError::MissingChild(..) => Failure(EXIT_INTERNAL, e.to_string()),
            _ => Failure(EXIT_CONTRACT, e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<System, Failure> {
    System::from_json_str(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn state(sys: &System, name: &str, side: &str) -> Result<usize, Failure> {
    sys.state(name)
        .ok_or_else(|| input(format!("{side} system has no state `{name}`")))
}

fn modality_set(list: Option<&str>, bisim: bool, left: &System, right: &System) -> Result<ModalitySet, Failure> {
    let set = match list {
        Some(text) => ModalitySet::parse_list(text).map_err(input)?,
        None => ModalitySet::default_for(left, right).map_err(|e| Failure(EXIT_CONTRACT, e.to_string()))?,
    };
    Ok(if bisim { set.close_under_duals() } else { set })
}

struct Pair {
    left: System,
    right: System,
    x: usize,
    y: usize,
    modalities: ModalitySet,
}

fn load_pair(p: &PairArgs) -> Result<Pair, Failure> {
    let left = load(&p.left)?;
    let right = load(&p.right)?;
    let x = state(&left, &p.lx, "left")?;
    let y = state(&right, &p.ry, "right")?;
    let modalities = modality_set(p.modalities.as_deref(), p.bisim, &left, &right)?;
    Ok(Pair {
        left,
        right,
        x,
        y,
        modalities,
    })
}

fn render(doc: Json) -> String {
    serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n"
}

fn check(a: &CheckArgs) -> Outcome {
    let p = load_pair(&a.pair)?;
    let cfg = GameConfig::new(&p.left, &p.right, p.modalities.clone(), a.eps.clone())?;
    let similar = check_similar(&cfg, p.x, p.y)?;
    let verdict = if similar { "similar" } else { "not-similar" };
    let text = if a.pair.human {
        format!(
            "{verdict}: {} vs {} at eps {} under {}\n",
            a.pair.lx, a.pair.ry, a.eps, p.modalities
        )
    } else {
        render(json!({
            "result": verdict,
            "left_state": a.pair.lx,
            "right_state": a.pair.ry,
            "epsilon": a.eps.to_string(),
            "modalities": p.modalities.to_string(),
        }))
    };
    Ok((if similar { 0 } else { EXIT_NEGATIVE }, text))
}

fn parse_mode(mode: &str, max_states: usize) -> Result<DistanceMode, Failure> {
    match mode {
        "exact" => Ok(DistanceMode::Exact(OracleCap { max_states })),
        "bisect" => Ok(DistanceMode::default_bisect()),
        _ => match mode.strip_prefix("bisect:") {
            Some(tol) => {
                let tol: Value = tol.parse().map_err(|e| input(format!("bad tolerance `{tol}`: {e}")))?;
                if tol.is_zero() {
                    return Err(input("bisection tolerance must be positive"));
                }
                Ok(DistanceMode::Bisect(tol))
            }
            None => Err(input(format!("unknown mode `{mode}`; expected bisect, bisect:TOL or exact"))),
        },
    }
}

fn distance_cmd(a: &DistanceArgs) -> Outcome {
    let p = load_pair(&a.pair)?;
    let mode = parse_mode(&a.mode, a.max_states)?;
    let d = distance(&p.left, &p.right, p.x, p.y, &p.modalities, &mode)?;
    let text = match (&d, a.pair.human) {
        (Distance::Exact(v), true) => format!("distance {v}\n"),
        (Distance::Interval { lo, hi }, true) => format!("distance in ({lo}, {hi}]\n"),
        (Distance::Exact(v), false) => render(json!({
            "left_state": a.pair.lx,
            "right_state": a.pair.ry,
            "modalities": p.modalities.to_string(),
            "distance": v.to_string(),
        })),
        (Distance::Interval { lo, hi }, false) => render(json!({
            "left_state": a.pair.lx,
            "right_state": a.pair.ry,
            "modalities": p.modalities.to_string(),
            "lower": lo.to_string(),
            "upper": hi.to_string(),
        })),
    };
    Ok((0, text))
}

fn distinguish(a: &DistinguishArgs) -> Outcome {
    let p = load_pair(&a.pair)?;
    let cfg = GameConfig::new(&p.left, &p.right, p.modalities.clone(), a.eps.clone())?;
    let sol = solve_game_from(&cfg, &[(p.x, p.y)])?;
    if !sol.spoiler_wins_at(p.x, p.y) {
        let text = if a.pair.human {
            format!("not distinguishable: {} vs {} at eps {}\n", a.pair.lx, a.pair.ry, a.eps)
        } else {
            render(json!({
                "result": "not-distinguishable",
                "left_state": a.pair.lx,
                "right_state": a.pair.ry,
                "epsilon": a.eps.to_string(),
            }))
        };
        return Ok((EXIT_NOT_DISTINGUISHABLE, text));
    }
    let cert = certificate_for(&sol, &cfg, a.logic.into(), p.x, p.y)?;
    let file = render(serde_json::to_value(cert.to_file()).expect("certificates serialize"));
    if let Some(out) = &a.out {
        std::fs::write(out, &file).map_err(|e| input(format!("{}: {e}", out.display())))?;
    }
    let text = if a.pair.human {
        let m = cert.metrics();
        format!(
            "{}\ndag size {}, modal rank {}\n",
            cert.formula_text().unwrap_or_else(|| "(formula too large to print)".into()),
            m.dag_size,
            m.modal_rank
        )
    } else {
        file
    };
    Ok((0, text))
}

/// Reads a formula from text, a bare dag, or a certificate file.
fn read_formula(text: &str, logic: LogicKind) -> Result<AnyFormula, Failure> {
    let trimmed = text.trim_start();
    if !trimmed.starts_with('{') {
        return parse_formula(text, Some(logic)).map_err(input);
    }
    let doc: Json = serde_json::from_str(text).map_err(|e| input(format!("formula file: {e}")))?;
    let dag: Dag = if doc.get("formula").is_some() {
        let file: CertificateFile = serde_json::from_value(doc).map_err(|e| input(format!("certificate: {e}")))?;
        file.formula
    } else {
        serde_json::from_value(doc).map_err(|e| input(format!("formula dag: {e}")))?
    };
    Ok(match logic {
        LogicKind::TwoValued => AnyFormula::TwoValued(formula2_of_dag(&dag).map_err(input)?),
        LogicKind::Quantitative => AnyFormula::Quantitative(formula_q_of_dag(&dag).map_err(input)?),
    })
}

fn eval_cmd(a: &EvalArgs) -> Outcome {
    let sys = load(&a.system)?;
    let logic = if a.eps.is_some() {
        LogicKind::TwoValued
    } else {
        LogicKind::Quantitative
    };
    let formula = read_formula(&read(&a.formula_file)?, logic)?;
    let contract = |e: crate::modalities::ModalityError| Failure(EXIT_CONTRACT, e.to_string());
    let text = match (&formula, &a.eps) {
        (AnyFormula::TwoValued(f), Some(eps)) => {
            let sat = eval2(f, &sys, eps).map_err(contract)?;
            let names: Vec<&str> = sat.iter().map(|x| sys.name(x)).collect();
            if a.human {
                format!("{} satisfied up to {eps} by {{{}}}\n", print_formula2(f), names.join(", "))
            } else {
                render(json!({ "logic": "two-valued", "epsilon": eps.to_string(), "satisfied": names }))
            }
        }
        (AnyFormula::Quantitative(f), None) => {
            let vals = eval_q(f, &sys).map_err(contract)?;
            if a.human {
                let mut out = format!("{}\n", print_formula_q(f));
                for (x, v) in vals.iter().enumerate() {
                    out.push_str(&format!("{}\t{v}\n", sys.name(x)));
                }
                out
            } else {
                let rows: Vec<Json> = vals
                    .iter()
                    .enumerate()
                    .map(|(x, v)| json!({ "state": sys.name(x), "value": v.to_string() }))
                    .collect();
                render(json!({ "logic": "quantitative", "values": rows }))
            }
        }
        _ => unreachable!("the logic follows --eps"),
    };
    Ok((0, text))
}

fn validate(a: &ValidateArgs) -> Outcome {
    let left = load(&a.left)?;
    let right = load(&a.right)?;
    let file: CertificateFile =
        serde_json::from_str(&read(&a.cert)?).map_err(|e| input(format!("{}: {e}", a.cert.display())))?;
    let cert = Certificate::from_file(&file).map_err(|e| input(format!("{}: {e}", a.cert.display())))?;
    let r = recheck_detailed(&cert, &left, &right);
    let text = if a.human {
        match &r.reason {
            None => "valid\n".to_string(),
            Some(why) => format!("invalid: {why}\n"),
        }
    } else {
        let evaluation = r.evaluation.as_ref().map(|e| match e {
            Evaluation::TwoValued { left, right } => json!({ "left": left, "right": right }),
            Evaluation::Quantitative { left, right } => json!({ "left": left.to_string(), "right": right.to_string() }),
        });
        render(json!({ "valid": r.valid, "reason": r.reason, "evaluation": evaluation }))
    };
    Ok((if r.valid { 0 } else { EXIT_NEGATIVE }, text))
}

fn oracle_cmd(a: &OracleArgs) -> Outcome {
    let left = load(&a.left)?;
    let right = load(&a.right)?;
    let modalities = modality_set(a.modalities.as_deref(), a.bisim, &left, &right)?;
    let cap = OracleCap {
        max_states: a.max_states,
    };
    let text = match &a.eps {
        Some(eps) => {
            let sim = greatest_simulation(&left, &right, &modalities, eps, &cap)?;
            let pairs: Vec<[&str; 2]> = sim.pairs().map(|(x, y)| [left.name(x), right.name(y)]).collect();
            if a.human {
                pairs.iter().map(|[x, y]| format!("{x}\t{y}\n")).collect()
            } else {
                render(json!({ "epsilon": eps.to_string(), "modalities": modalities.to_string(), "simulation": pairs }))
            }
        }
        None => {
            let d = exact_distance(&left, &right, &modalities, &cap)?;
            let mut rows = Vec::new();
            let mut human = String::new();
            for x in 0..left.len() {
                for y in 0..right.len() {
                    let v = d.get(x, y);
                    human.push_str(&format!("{}\t{}\t{v}\n", left.name(x), right.name(y)));
                    rows.push(json!({ "left": left.name(x), "right": right.name(y), "distance": v.to_string() }));
                }
            }
            if a.human {
                human
            } else {
                render(json!({ "modalities": modalities.to_string(), "distances": rows }))
            }
        }
    };
    Ok((0, text))
}

/// Runs one invocation, writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Check(a) => check(a),
        Command::Distance(a) => distance_cmd(a),
        Command::Distinguish(a) => distinguish(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Validate(a) => validate(a),
        Command::Oracle(a) => oracle_cmd(a),
    };
    match outcome {
        Ok((code, text)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

/// Runs one invocation against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
