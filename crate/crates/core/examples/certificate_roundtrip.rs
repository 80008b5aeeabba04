//! Certificates are plain JSON: write one, read it back, recheck it against
//! the systems, then tamper with it and watch the recheck fail.

use tbdist::extract::{certificate_for, recheck_detailed, Certificate, CertificateFile};
use tbdist::logic::LogicKind;
use tbdist::{solve_game, GameConfig, ModalitySet, System};

const LEFT: &str = r#"{"type": "markov_chain", "states": ["x", "z"], "transitions": {"x": {"x": "1/2", "z": "1/2"}, "z": {"z": "1"}}}"#;
const RIGHT: &str = r#"{"type": "markov_chain", "states": ["y", "w"], "transitions": {"y": {"y": "1/2", "w": "1/4"}, "w": {"w": "1"}}}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let left = System::from_json_str(LEFT)?;
    let right = System::from_json_str(RIGHT)?;
    let lambda = ModalitySet::default_for(&left, &right)?;
    let cfg = GameConfig::new(&left, &right, lambda, "1/8".parse()?)?;
    let sol = solve_game(&cfg)?;
    let cert = certificate_for(&sol, &cfg, LogicKind::Quantitative, 0, 0)?;

    let json = serde_json::to_string_pretty(&cert.to_file())?;
    println!("{json}");
    let back = Certificate::from_file(&serde_json::from_str::<CertificateFile>(&json)?)?;
    println!("recheck: {:?}", recheck_detailed(&back, &left, &right));

    let mut forged = back.clone();
    forged.epsilon = "1/2".parse()?;
    println!("with a larger epsilon: {:?}", recheck_detailed(&forged, &left, &right));
    println!("against swapped systems: {:?}", recheck_detailed(&back, &right, &left));
    Ok(())
}
