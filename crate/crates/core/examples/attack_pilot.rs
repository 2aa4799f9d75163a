//! Runs the strategic-advantage experiment for an unrestricted Elo pool and a
//! banded Sonas pool and prints the results as JSON.
//!
//! `cargo run --release --example attack_pilot -- [sigma_d] [pool] [band]`

use ratinglab::builtin;
use ratinglab::sim::{
    run_replicates, strategic_advantage, AttackerSpec, DriftModel, ExperimentConfig,
    InitialDistribution, Strategy,
};

fn arm(system: &str, band: Option<f64>, sigma_d: f64, pool: usize) -> serde_json::Value {
    let cfg = ExperimentConfig {
        system: builtin::by_name(system).unwrap(),
        pool_size: pool,
        initial: InitialDistribution::Normal {
            mean: 1500.0,
            sd: 200.0,
        },
        attacker: AttackerSpec {
            strategy: Strategy::GreedyGain,
            estimate_noise: 0.0,
        },
        rounds: 10_000,
        drift: DriftModel::GaussianWalk { sigma_d },
        seed: 0,
        band,
        record_matches: false,
    };
    let seeds: Vec<u64> = (1..=20).collect();
    let greedy = run_replicates(&cfg, &seeds).unwrap();
    let random = run_replicates(&cfg.with_strategy(Strategy::RandomOpponent), &seeds).unwrap();
    let adv = strategic_advantage(&greedy, &random).unwrap();
    serde_json::json!({ "config": cfg, "advantage": adv })
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sigma_d = args.first().map_or(20.0, |s| s.parse().unwrap());
    let pool = args.get(1).map_or(50, |s| s.parse().unwrap());
    let band = args.get(2).map_or(0.3, |s| s.parse().unwrap());
    let t = std::time::Instant::now();
    let out = serde_json::json!({
        "elo": arm("logistic-unclamped", None, sigma_d, pool),
        "sonas_banded": arm("sonas", Some(band), sigma_d, pool),
    });
    eprintln!("elapsed {:?}", t.elapsed());
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
}
