//! The game's winning region against a brute-force greatest simulation,
//! on random systems of every kind.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbdist::gen;
use tbdist::oracle::{greatest_simulation, OracleCap};
use tbdist::{solve_game, GameConfig, SystemKind, Value};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in SystemKind::ALL {
        let mut disagreements = 0;
        for k in 0..=10 {
            let (left, right, labels) = gen::system_pair(&mut rng, kind, 4, 4, 10);
            let lambda = gen::modality_set(&mut rng, kind, &labels);
            let eps = Value::new(k, 10)?;
            let sim = greatest_simulation(&left, &right, &lambda, &eps, &OracleCap::default())?;
            let cfg = GameConfig::new(&left, &right, lambda, eps)?;
            let sol = solve_game(&cfg)?;
            for x in 0..left.len() {
                for y in 0..right.len() {
                    disagreements += usize::from(sim.contains(x, y) == sol.spoiler_wins_at(x, y));
                }
            }
        }
        println!("{:22} {disagreements} disagreements over 11 thresholds", kind.to_string());
    }
    Ok(())
}
