//! Convex Markov chains: each state offers a convex set of distributions,
//! given by its vertices. Every vertex has full mass, so the fixpoint
//! distance sees nothing and is 0 everywhere. A ground distance on states
//! can still be lifted one step to compare the choice sets.

use tbdist::game::compatible_metric;
use tbdist::oracle::{exact_distance, exact_lax, OracleCap};
use tbdist::systems::VRel;
use tbdist::{ModalitySet, System, Value};

const DOC: &str = r#"{
  "type": "convex_mc",
  "states": ["s", "t", "safe", "fail"],
  "transitions": {
    "s": [{"safe": "1/2", "fail": "1/2"}, {"t": "1"}],
    "t": [{"safe": "2/3", "fail": "1/3"}],
    "safe": [{"safe": "1"}],
    "fail": [{"fail": "1"}]
  }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = System::from_json_str(DOC)?;
    let lambda = ModalitySet::default_for(&sys, &sys)?;
    let cap = OracleCap::default();
    let d = exact_distance(&sys, &sys, &lambda, &cap)?;
    println!("largest fixpoint distance: {}", d.values().max().unwrap());

    // `fail` is far from everything else.
    let fail = sys.state("fail").unwrap();
    let n = sys.len();
    let r = VRel::from_fn(n, n, |x, y| if (x == fail) != (y == fail) { Value::one() } else { Value::zero() });
    let metric = compatible_metric(&sys, &sys, &lambda)?;
    for x in 0..n {
        let row: Vec<String> = (0..n)
            .map(|y| exact_lax(&r, sys.payload(x), sys.payload(y), &lambda, &metric, &cap).map(|v| format!("{:>4}", v.to_string())))
            .collect::<Result<_, _>>()?;
        println!("{:>5}: {}", sys.name(x), row.join(" "));
    }
    Ok(())
}
