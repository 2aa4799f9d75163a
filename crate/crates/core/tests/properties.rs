use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ratinglab::builtin;
use ratinglab::curves::p_close;
use ratinglab::sim::output::fmt_f64;
use ratinglab::sim::{
    run_experiment, sample_outcome, AttackerSpec, DriftModel, ExperimentConfig,
    InitialDistribution, Strategy as Play,
};
use ratinglab::verifier::{build_skill_chain, chain_bound, ChainOptions, Grid};
use ratinglab::{GainQuery, RatingSystem};

fn system() -> impl Strategy<Value = (&'static str, RatingSystem)> {
    (0..builtin::NAMES.len()).prop_map(|i| {
        let name = builtin::NAMES[i];
        (name, builtin::by_name(name).unwrap())
    })
}

fn rating() -> impl Strategy<Value = f64> {
    0.0..3000.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn curves_are_draw_free_and_bounded((_, sys) in system(), x in rating(), y in rating()) {
        let s = sys.sigma(x, y).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert!((s + sys.sigma(y, x).unwrap() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn curves_are_monotone((_, sys) in system(), x in rating(), y in rating(), d in 0.0..500.0f64) {
        prop_assert!(sys.sigma(x + d, y).unwrap() >= sys.sigma(x, y).unwrap() - 1e-15);
    }

    #[test]
    fn correctly_rated_players_expect_nothing((_, sys) in system(), x in rating(), y in rating()) {
        let q = GainQuery::new(x, x, y, y);
        prop_assert!(sys.expected_gain(&q).unwrap().abs() <= 1e-12);
        prop_assert!(sys.expected_gain_definitional(&q).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn gain_forms_agree((_, sys) in system(), x in rating(), xs in rating(), y in rating(), ys in rating()) {
        let q = GainQuery::new(x, xs, y, ys);
        let (a, b) = (sys.expected_gain(&q).unwrap(), sys.expected_gain_definitional(&q).unwrap());
        prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn stakes_split_into_k((_, sys) in system(), x in rating(), y in rating()) {
        let total = sys.adjustment(x, y).unwrap() + sys.adjustment(y, x).unwrap();
        prop_assert!((total - sys.k(x, y)).abs() <= 1e-12 * sys.k(x, y));
        prop_assert_eq!(sys.k(x, y), sys.k(y, x));
        prop_assert!(sys.k(x, y) > 0.0);
    }

    #[test]
    fn matches_are_zero_sum((_, sys) in system(), w in rating(), l in rating()) {
        let (w2, l2) = sys.apply_match(w, l).unwrap();
        prop_assert!(((w2 + l2) - (w + l)).abs() <= 1e-9);
        prop_assert!(((w2 - w) - sys.adjustment(w, l).unwrap()).abs() <= 1e-12 * w.abs().max(1.0));
        prop_assert!(w2 >= w && l2 <= l);
    }

    #[test]
    fn sonas_in_band_gain_ignores_the_opponent(
        x in 1000.0..2000.0f64, dx in -150.0..150.0f64, y1 in -150.0..150.0f64, y2 in -150.0..150.0f64, shift in -50.0..50.0f64,
    ) {
        // Every pair among these ratings is within 400 of each other, inside the curve's linear part.
        let sys = builtin::by_name("sonas").unwrap();
        let g = |y: f64| sys.expected_gain(&GainQuery::new(x, x + dx, x + y, x + y + shift)).unwrap();
        prop_assert!((g(y1) - g(y2)).abs() <= 1e-9);
        prop_assert!((g(y1) - 32.0 * 0.001 * (dx - shift)).abs() <= 1e-9);
    }

    #[test]
    fn p_close_is_symmetric((_, sys) in system(), x in rating(), y in rating(), p in 0.01..0.5f64) {
        prop_assert_eq!(p_close(sys.curve(), x, y, p).unwrap(), p_close(sys.curve(), y, x, p).unwrap());
    }

    #[test]
    fn chains_respect_the_bound(p in 0.55..0.99f64) {
        let curve = builtin::ramp_curve();
        let chain = build_skill_chain(&curve, p, 1250.0, &ChainOptions::new(100, 2000.0)).unwrap();
        prop_assert!(chain.len() <= chain_bound(p));
        for (w, s) in chain.ratings.windows(2).zip(&chain.achieved) {
            prop_assert!(w[1] > w[0]);
            prop_assert!(*s >= p - 1e-9);
        }
    }

    #[test]
    fn decimal_output_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn grids_cover_their_interval(lo in -1000.0..1000.0f64, len in 1.0..2000.0f64, step in 1.0..100.0f64) {
        let g = Grid::new(lo, lo + len, step).unwrap();
        let pts = g.points();
        prop_assert_eq!(pts.len(), g.len());
        prop_assert_eq!(pts[0], lo);
        prop_assert_eq!(*pts.last().unwrap(), lo + len);
        prop_assert!(pts.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= step * (1.0 + 1e-12)));
    }

    #[test]
    fn outcomes_replay_from_the_seed((_, sys) in system(), seed in any::<u64>(), x in rating(), y in rating()) {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..8).map(|_| sample_outcome(&mut rng, &sys, x, y).unwrap()).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(), draw());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn experiments_conserve_and_replay(
        (_, sys) in system(), seed in any::<u64>(), pool in 2usize..9, greedy in any::<bool>(), sigma_d in 0.0..30.0f64,
    ) {
        let cfg = ExperimentConfig {
            system: sys,
            pool_size: pool,
            initial: InitialDistribution::Uniform { lo: 1200.0, hi: 1800.0 },
            attacker: AttackerSpec {
                strategy: if greedy { Play::GreedyGain } else { Play::RandomOpponent },
                estimate_noise: 0.0,
            },
            rounds: 200,
            drift: DriftModel::GaussianWalk { sigma_d },
            seed,
            band: None,
            record_matches: true,
        };
        let a = run_experiment(&cfg).unwrap();
        prop_assert!(a.summary.max_conservation_error <= 1e-9);
        let before: f64 = a.initial_ratings.iter().sum();
        let after: f64 = a.final_ratings.iter().sum();
        prop_assert!((before - after).abs() <= 1e-9);
        for m in a.matches.as_ref().unwrap() {
            let loser = if m.winner == m.player_a { m.player_b } else { m.player_a };
            prop_assert!(m.transfer >= 0.0);
            prop_assert!(m.winner != loser);
        }
        let b = run_experiment(&cfg).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
