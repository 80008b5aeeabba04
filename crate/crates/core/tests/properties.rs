use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tbdist::extract::{certificates_quantitative, extract_quantitative, recheck, Certificate, CertificateFile};
use tbdist::game::{distance, replay_strategy, solve_game, Distance, DistanceMode, GameConfig};
use tbdist::gen;
use tbdist::logic::{
    dag_of_formula2, dag_of_formula_q, eval2, eval_q, formula2_of_dag, formula_q_of_dag, negate_q, parse_formula2,
    parse_formula_q, print_formula2, print_formula_q,
};
use tbdist::oracle::{exact_distance, greatest_simulation, OracleCap};
use tbdist::systems::{System, SystemKind};
use tbdist::values::Value;

const GRID: u32 = 10;

fn kind_strategy() -> impl Strategy<Value = SystemKind> {
    prop::sample::select(SystemKind::ALL.to_vec())
}

fn eps_strategy() -> impl Strategy<Value = Value> {
    (0i64..=20).prop_map(|k| Value::new(k, 20).unwrap())
}

fn pair(seed: u64, kind: SystemKind, nx: usize, ny: usize) -> (System, System, tbdist::ModalitySet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l, r, labels) = gen::system_pair(&mut rng, kind, nx, ny, GRID);
    let lambda = gen::modality_set(&mut rng, kind, &labels);
    (l, r, lambda)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_formulae_parse_back(seed: u64, kind in kind_strategy(), depth in 0u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = gen::labels_for(&mut rng, kind);
        let ms: Vec<_> = gen::modality_set(&mut rng, kind, &labels).iter().cloned().collect();
        let phi = gen::formula2(&mut rng, &ms, depth, GRID);
        prop_assert!(parse_formula2(&print_formula2(&phi)).unwrap().same_tree(&phi));
        prop_assert!(formula2_of_dag(&dag_of_formula2(&phi)).unwrap().same_tree(&phi));
        let psi = gen::formula_q(&mut rng, &ms, depth, GRID);
        prop_assert!(parse_formula_q(&print_formula_q(&psi)).unwrap().same_tree(&psi));
        prop_assert!(formula_q_of_dag(&dag_of_formula_q(&psi)).unwrap().same_tree(&psi));
    }

    #[test]
    fn negation_complements_values(seed: u64, kind in kind_strategy(), n in 1usize..5) {
        let (s, _, lambda) = pair(seed, kind, n, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let ms: Vec<_> = lambda.iter().cloned().collect();
        let psi = gen::formula_q(&mut rng, &ms, 3, GRID);
        let neg = negate_q(&psi, None).unwrap();
        let (a, b) = (eval_q(&psi, &s).unwrap(), eval_q(&neg, &s).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.complement(), y.clone());
        }
    }

    #[test]
    fn simulations_grow_with_eps(seed: u64, kind in kind_strategy(), nx in 1usize..5, ny in 1usize..5,
                                 e1 in eps_strategy(), e2 in eps_strategy()) {
        let (l, r, lambda) = pair(seed, kind, nx, ny);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let cap = OracleCap::default();
        let a = greatest_simulation(&l, &r, &lambda, &lo, &cap).unwrap();
        let b = greatest_simulation(&l, &r, &lambda, &hi, &cap).unwrap();
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn strategies_terminate_within_stage(seed: u64, kind in kind_strategy(), nx in 1usize..6, ny in 1usize..6,
                                         eps in eps_strategy()) {
        let (l, r, lambda) = pair(seed, kind, nx, ny);
        let cfg = GameConfig::new(&l, &r, lambda, eps).unwrap();
        let sol = solve_game(&cfg).unwrap();
        for &(x, y) in sol.won_in_order() {
            let stage = sol.stage(x, y).unwrap();
            let longest = replay_strategy(&sol, x, y).unwrap();
            prop_assert!(longest as u32 <= stage);
            prop_assert!(stage as usize <= nx * ny);
        }
    }

    #[test]
    fn bisection_brackets_exact_distance(seed: u64, kind in kind_strategy(), nx in 1usize..4, ny in 1usize..4) {
        let (l, r, lambda) = pair(seed, kind, nx, ny);
        let d = exact_distance(&l, &r, &lambda, &OracleCap::default()).unwrap();
        let tol = Value::new(1, 64).unwrap();
        match distance(&l, &r, 0, 0, &lambda, &DistanceMode::Bisect(tol)).unwrap() {
            Distance::Exact(v) => prop_assert_eq!(&v, d.get(0, 0)),
            Distance::Interval { lo, hi } => {
                prop_assert!(&lo < d.get(0, 0) && d.get(0, 0) <= &hi, "{} not in ({lo}, {hi}]", d.get(0, 0));
            }
        }
    }

    #[test]
    fn certificates_survive_serialization(seed: u64, kind in kind_strategy(), nx in 1usize..5, ny in 1usize..5,
                                          eps in eps_strategy()) {
        let (l, r, lambda) = pair(seed, kind, nx, ny);
        let cfg = GameConfig::new(&l, &r, lambda, eps).unwrap();
        let sol = solve_game(&cfg).unwrap();
        let certs = certificates_quantitative(&extract_quantitative(&sol, &cfg).unwrap(), &cfg).unwrap();
        for c in certs {
            let json = serde_json::to_string(&c.to_file()).unwrap();
            let back: CertificateFile = serde_json::from_str(&json).unwrap();
            let c2 = Certificate::from_file(&back).unwrap();
            prop_assert!(recheck(&c2, &l, &r));
        }
    }

    #[test]
    fn systems_survive_serialization(seed: u64, kind in kind_strategy(), n in 1usize..6) {
        let (s, _, _) = pair(seed, kind, n, 1);
        let back = System::from_json_str(&s.to_json().to_string()).unwrap();
        prop_assert_eq!(back.payloads(), s.payloads());
        prop_assert_eq!(back.names(), s.names());
    }

    #[test]
    fn satisfaction_at_zero_matches_values(seed: u64, kind in kind_strategy(), n in 1usize..5) {
        // `[λ>=q] tt` holds exactly where `<λ> tt` reaches q.
        let (s, _, lambda) = pair(seed, kind, n, 1);
        for m in lambda.iter() {
            let vals = eval_q(&parse_formula_q(&format!("<{m}> tt")).unwrap(), &s).unwrap();
            for (x, v) in vals.iter().enumerate() {
                let phi = parse_formula2(&format!("[{m}>={v}] tt")).unwrap();
                prop_assert!(eval2(&phi, &s, &Value::zero()).unwrap().contains(x));
            }
        }
    }
}
