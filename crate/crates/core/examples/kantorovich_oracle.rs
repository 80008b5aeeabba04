//! The threshold-based lifting next to its Kantorovich counterpart on a
//! random pair: the lifting never exceeds the Kantorovich value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tbdist::gen;
use tbdist::oracle::{exact_lax, kantorovich, OracleCap};
use tbdist::SystemKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cap = OracleCap::default();
    for kind in SystemKind::ALL {
        let (left, right, labels) = gen::system_pair(&mut rng, kind, 3, 3, 10);
        let lambda = gen::modality_set(&mut rng, kind, &labels);
        let metric = tbdist::game::compatible_metric(&left, &right, &lambda)?;
        let r = gen::vrel(&mut rng, 3, 3, 10);
        let lax = exact_lax(&r, left.payload(0), right.payload(0), &lambda, &metric, &cap)?;
        let k = kantorovich(&r, left.payload(0), right.payload(0), &lambda, &metric, &cap, 200, 10, &mut rng)?;
        println!(
            "{:22} lifting {:>6}  kantorovich >= {:>6} (witnesses), {:>6} (samples)",
            kind.to_string(),
            lax.to_string(),
            k.witness_max.to_string(),
            k.sampled_max.to_string()
        );
    }
    Ok(())
}
