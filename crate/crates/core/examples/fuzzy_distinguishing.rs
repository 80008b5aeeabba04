//! Fuzzy transition systems: every losing pair gets a two-valued
//! distinguishing formula, and the formulae share structure in one DAG.

use tbdist::extract::{certificates_two_valued, extract_two_valued};
use tbdist::{solve_game, GameConfig, ModalitySet, System};

const LEFT: &str = r#"{
  "type": "fuzzy_ts",
  "states": ["a", "b", "c"],
  "transitions": {"a": {"b": "0.8", "c": "0.3"}, "b": {"c": "1"}, "c": {}}
}"#;

const RIGHT: &str = r#"{
  "type": "fuzzy_ts",
  "states": ["p", "q", "r"],
  "transitions": {"p": {"q": "0.6"}, "q": {"r": "0.9"}, "r": {}}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let left = System::from_json_str(LEFT)?;
    let right = System::from_json_str(RIGHT)?;
    let lambda = ModalitySet::default_for(&left, &right)?;
    let cfg = GameConfig::new(&left, &right, lambda, "1/10".parse()?)?;
    let sol = solve_game(&cfg)?;
    let ext = extract_two_valued(&sol, &cfg)?;
    println!("shared arena: {} nodes", ext.arena.len());
    for cert in certificates_two_valued(&ext, &cfg)? {
        let m = cert.metrics();
        println!(
            "{} vs {}: {}  (dag {}, rank {})",
            cert.left_state,
            cert.right_state,
            cert.formula_text().unwrap_or_default(),
            m.dag_size,
            m.modal_rank
        );
    }
    Ok(())
}
