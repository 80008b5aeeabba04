//! Distances on labelled Markov chains and generative systems, by bisection
//! and exactly.

use tbdist::{distance, DistanceMode, ModalitySet, System, Value};

const LMC_LEFT: &str = r#"{
  "type": "labelled_markov_chain",
  "states": ["s", "t", "u"],
  "transitions": {
    "s": {"a": {"t": "1/2", "u": "1/2"}},
    "t": {"b": {"t": "1"}},
    "u": {}
  }
}"#;

const LMC_RIGHT: &str = r#"{
  "type": "labelled_markov_chain",
  "states": ["p", "q"],
  "transitions": {
    "p": {"a": {"q": "2/3"}},
    "q": {"b": {"q": "4/5"}}
  }
}"#;

const GPTS: &str = r#"{
  "type": "gpts",
  "states": ["s", "t"],
  "transitions": {
    "s": {"a": {"s": "1/4"}, "b": {"t": "3/4"}},
    "t": {"a": {"t": "1/2"}, "b": {"s": "1/2"}}
  }
}"#;

fn report(left: &System, right: &System) -> Result<(), Box<dyn std::error::Error>> {
    let lambda = ModalitySet::default_for(left, right)?;
    println!("{} with {lambda}", left.kind());
    let tol = Value::new(1, 1024)?;
    for x in 0..left.len() {
        for y in 0..right.len() {
            let exact = distance(left, right, x, y, &lambda, &DistanceMode::Exact(Default::default()))?;
            let approx = distance(left, right, x, y, &lambda, &DistanceMode::Bisect(tol.clone()))?;
            println!("  d({}, {}) = {exact:?}, bisection {approx:?}", left.name(x), right.name(y));
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    report(&System::from_json_str(LMC_LEFT)?, &System::from_json_str(LMC_RIGHT)?)?;
    let g = System::from_json_str(GPTS)?;
    report(&g, &g)
}
