//! Metric transition systems with a label metric: moves may be matched by
//! nearby labels at a cost.

use tbdist::extract::certificate_for;
use tbdist::logic::LogicKind;
use tbdist::{distance, solve_game, Distance, DistanceMode, GameConfig, ModalitySet, System};

const DOC: &str = r#"{
  "type": "metric_ts",
  "states": ["s", "t", "u", "v"],
  "label_metric": {"labels": ["slow", "medium", "fast"], "dist": {"slow,medium": "1/4", "medium,fast": "1/4", "slow,fast": "1/2"}},
  "transitions": {
    "s": [["slow", "t"], ["fast", "u"]],
    "t": [["medium", "t"]],
    "u": [],
    "v": [["medium", "t"], ["medium", "u"]]
  }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = System::from_json_str(DOC)?;
    let lambda = ModalitySet::default_for(&sys, &sys)?;
    println!("modalities: {lambda}");
    let (s, v) = (sys.state("s").unwrap(), sys.state("v").unwrap());
    let d = distance(&sys, &sys, s, v, &lambda, &DistanceMode::Exact(Default::default()))?;
    println!("d(s, v) = {d:?}");

    if let Distance::Exact(d) = d {
        if !d.is_zero() {
            let below = d.midpoint(&tbdist::Value::zero());
            let cfg = GameConfig::new(&sys, &sys, lambda, below.clone())?;
            let sol = solve_game(&cfg)?;
            let cert = certificate_for(&sol, &cfg, LogicKind::Quantitative, s, v)?;
            println!("at {below}: {} -> {:?}", cert.formula_text().unwrap_or_default(), cert.evaluation);
        }
    }
    Ok(())
}
