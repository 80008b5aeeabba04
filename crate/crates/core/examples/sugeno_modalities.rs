//! Quantitative formulae with Sugeno modalities, evaluated state by state,
//! and the matching two-valued threshold formulae.

use tbdist::logic::{eval2, eval_q, parse_formula2, parse_formula_q};
use tbdist::{System, Value};

const DOC: &str = r#"{
  "type": "labelled_markov_chain",
  "states": ["s", "t", "u"],
  "transitions": {
    "s": {"a": {"t": "1/2", "u": "1/4"}},
    "t": {"a": {"t": "3/4"}, "b": {"u": "1"}},
    "u": {}
  }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = System::from_json_str(DOC)?;
    for text in ["<P[a]> tt", "<~P[a]> ff", "<P[a]> <P[b]> tt", "<P[a]> (<P[a]> tt (-) 1/4)", "((<P[a]> tt (+) 1/8) & <P[b]> tt)"] {
        let psi = parse_formula_q(text)?;
        let vals: Vec<String> = eval_q(&psi, &sys)?.iter().map(Value::to_string).collect();
        println!("{text:36} {}", vals.join("  "));
    }
    let eps = Value::new(1, 10)?;
    for text in ["[P[a]>=1/2] tt", "[P[a]>=1/2] [P[b]>=1] tt"] {
        let phi = parse_formula2(text)?;
        let sat: Vec<&str> = eval2(&phi, &sys, &eps)?.iter().map(|x| sys.name(x)).collect();
        println!("{text:36} holds at {sat:?} with slack {eps}");
    }
    Ok(())
}
