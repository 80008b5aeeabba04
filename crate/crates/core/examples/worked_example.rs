//! Two one-state Markov chains: `x` loops with probability 1, `y` with 9/10.
//! Their distance is 1/10, and below that the game hands out a formula
//! telling them apart.

use tbdist::extract::certificate_for;
use tbdist::logic::LogicKind;
use tbdist::{check_similar, distance, solve_game, DistanceMode, GameConfig, ModalitySet, System, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let left = System::from_json_str(r#"{"type": "markov_chain", "states": ["x"], "transitions": {"x": {"x": "1"}}}"#)?;
    let right =
        System::from_json_str(r#"{"type": "markov_chain", "states": ["y"], "transitions": {"y": {"y": "9/10"}}}"#)?;
    let lambda = ModalitySet::default_for(&left, &right)?;

    let d = distance(&left, &right, 0, 0, &lambda, &DistanceMode::Exact(Default::default()))?;
    println!("distance: {d:?}");

    for eps in ["1/10", "1/20"] {
        let cfg = GameConfig::new(&left, &right, lambda.clone(), eps.parse::<Value>()?)?;
        println!("x ⪯_{eps} y: {}", check_similar(&cfg, 0, 0)?);
    }

    let cfg = GameConfig::new(&left, &right, lambda, "1/20".parse()?)?;
    let sol = solve_game(&cfg)?;
    for logic in [LogicKind::TwoValued, LogicKind::Quantitative] {
        let cert = certificate_for(&sol, &cfg, logic, 0, 0)?;
        println!("{logic}: {} -> {:?}", cert.formula_text().unwrap_or_default(), cert.evaluation);
    }
    Ok(())
}
