//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! are always shown; exits non-zero if any criterion fails or overruns.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use ratinglab::builtin;
use ratinglab::sim::{
    live_calibration, run_experiment, run_replicates, strategic_advantage, Advantage, AttackerSpec,
    DriftModel, ExperimentConfig, InitialDistribution, Strategy,
};
use ratinglab::verifier::{
    build_skill_chain, check_bisector_linear, check_p_opponent_indifference, check_p_separable,
    cross_check_characterization, find_max_gain_opponent, verify_chain_identity, ChainOptions,
    ChainTermination, CheckOptions, Grid, Property, Verdict,
};
use ratinglab::{GainQuery, Result};

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn verifier_grid() -> Grid {
    Grid::new(1000.0, 2000.0, 50.0).unwrap()
}

fn fairness() -> Outcome {
    let pts = linspace(1000.0, 2000.0, 50);
    let mut worst: f64 = 0.0;
    for (_, sys) in builtin::all() {
        for &x in &pts {
            for &y in &pts {
                let q = GainQuery::new(x, x, y, y);
                worst = worst
                    .max(sys.expected_gain(&q)?.abs())
                    .max(sys.expected_gain_definitional(&q)?.abs());
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("max |gain(x,x|y,y)| = {worst:.3e} over 10 systems x 50x50"),
    ))
}

fn gain_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst: f64 = 0.0;
    for (_, sys) in builtin::all() {
        for _ in 0..10_000 {
            let mut r = || rng.random_range(1000.0..2000.0);
            let q = GainQuery::new(r(), r(), r(), r());
            worst = worst.max((sys.expected_gain(&q)? - sys.expected_gain_definitional(&q)?).abs());
        }
    }
    Ok((
        worst <= 1e-12,
        format!("max |K-form - definitional| = {worst:.3e} over 10^4 queries x 10 systems"),
    ))
}

fn chain_bound() -> Outcome {
    let curve = builtin::ramp_curve();
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, bound) in [(0.6, 6), (0.75, 3), (0.9, 2)] {
        let chain = build_skill_chain(&curve, p, 1250.0, &ChainOptions::new(50, 2000.0))?;
        let identity = verify_chain_identity(&curve, &chain, 1e-9)?;
        ok &= chain.len() <= bound && chain.bound == bound && identity.verdict == Verdict::Holds;
        parts.push(format!(
            "p={p}: len {} <= {bound}, identity residual {:.1e}",
            chain.len(),
            identity.max_residual
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn full_scale() -> Outcome {
    let sys = builtin::by_name("sonas")?;
    let opts = CheckOptions::tol(1e-9);
    let p = 0.4 - 1e-6;
    let oi = check_p_opponent_indifference(&sys, p, &verifier_grid(), &opts)?;
    let chain = build_skill_chain(
        sys.curve(),
        0.9,
        1000.0,
        &ChainOptions::new(50, 1000.0 + 1e6),
    )?;
    let ok = oi.holds()
        && chain.len() == 50
        && chain.terminated_reason == ChainTermination::BudgetExhausted;
    Ok((
        ok,
        format!(
            "P OI at P={p}: {} (residual {:.1e}); chain p=0.9 length {} ({:?})",
            oi.verdict,
            oi.max_residual,
            chain.len(),
            chain.terminated_reason
        ),
    ))
}

fn characterization() -> Outcome {
    // Predicted [P OI, P separable and P-constant K, strong P OI, linear bisector and P-constant K].
    let predictions: [(&str, [bool; 4]); 8] = [
        ("sonas", [true, true, true, true]),
        ("sonas-rating-sum", [false, false, false, false]),
        ("logistic", [false, false, false, false]),
        ("logistic-rating-sum", [false, false, false, false]),
        ("logistic-unclamped", [false, false, false, false]),
        (
            "logistic-unclamped-rating-sum",
            [false, false, false, false],
        ),
        ("tanh", [true, true, false, false]),
        ("tanh-rating-sum", [false, false, false, false]),
    ];
    let family = builtin::characterization_family();
    let grid = verifier_grid();
    let mut agree = 0;
    let mut misses = Vec::new();
    for ((name, sys), (pname, want)) in family.iter().zip(predictions) {
        assert_eq!(*name, pname);
        let c = cross_check_characterization(sys, 0.3, &grid, &CheckOptions::tol(1e-9))?;
        let h = |p: Property| c.component(p).is_some_and(|r| r.holds());
        let got = [
            h(Property::POi),
            h(Property::PSeparable) && h(Property::PConstantK),
            h(Property::StrongPOi),
            h(Property::PSeparable) && h(Property::BisectorLinear) && h(Property::PConstantK),
        ];
        let cells = got.iter().zip(&want).filter(|(g, w)| g == w).count();
        agree += cells;
        if cells < 4 || !c.report.holds() {
            misses.push(format!(
                "{name}: got {got:?}, want {want:?}, cross-check {}",
                c.report.verdict
            ));
        }
    }
    let detail = format!("{agree}/32 cells agree at P=0.3 on {}", grid.describe());
    Ok((
        misses.is_empty(),
        if misses.is_empty() {
            detail
        } else {
            format!("{detail}; {}", misses.join("; "))
        },
    ))
}

fn midpoint() -> Outcome {
    let sys = builtin::by_name("logistic-unclamped")?;
    let best = find_max_gain_opponent(&sys, 1500.0, 1700.0, (1000.0, 2200.0), 1.0, 1e-9)?;
    let r = best.rating().unwrap_or(f64::NAN);
    Ok((
        (r - 1600.0).abs() <= 1.0,
        format!("argmax at {r:.6} (expected 1600 +/- 1)"),
    ))
}

fn calibration() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut matches = 0;
    for (name, sys) in builtin::all() {
        let cfg = ExperimentConfig {
            system: sys,
            pool_size: 20,
            initial: InitialDistribution::Normal {
                mean: 1500.0,
                sd: 200.0,
            },
            attacker: AttackerSpec {
                strategy: Strategy::RandomOpponent,
                estimate_noise: 0.0,
            },
            rounds: 10_000,
            drift: DriftModel::None,
            seed: 77,
            band: None,
            record_matches: true,
        };
        let result = run_experiment(&cfg)?;
        let report = live_calibration(&result)?;
        matches = report.matches;
        ok &= report.matches >= 100_000 && report.within(3.0);
        worst = worst.max(report.max_abs_z());
        if !report.within(3.0) {
            eprintln!("  calibration outside 3 sd for {name}");
        }
    }
    Ok((
        ok,
        format!(
            "{matches} matches per system, max |total change| / sd = {worst:.3} over 10 systems"
        ),
    ))
}

#[derive(Deserialize)]
struct Arm {
    config: ExperimentConfig,
    advantage: Advantage,
}

#[derive(Deserialize)]
struct Baseline {
    elo: Arm,
    sonas_banded: Arm,
}

fn advantage_of(arm: &Arm) -> Result<Advantage> {
    let seeds: Vec<u64> = arm.advantage.per_seed.iter().map(|s| s.0).collect();
    let greedy = run_replicates(&arm.config, &seeds)?;
    let random = run_replicates(&arm.config.with_strategy(Strategy::RandomOpponent), &seeds)?;
    strategic_advantage(&greedy, &random)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn attack_differential() -> Outcome {
    let text = include_str!("fixtures/attack_baseline.json");
    let base: Baseline = serde_json::from_str(text)?;
    let elo = advantage_of(&base.elo)?;
    let sonas = advantage_of(&base.sonas_banded)?;
    let sign = elo.ci_strictly_positive() && sonas.ci_contains_zero();
    let same = [
        (&elo, &base.elo.advantage),
        (&sonas, &base.sonas_banded.advantage),
    ]
    .iter()
    .all(|(a, b)| {
        close(a.delta, b.delta) && close(a.ci_low, b.ci_low) && close(a.ci_high, b.ci_high)
    });
    Ok((
        sign && same,
        format!(
            "elo {:.2} [{:.2}, {:.2}], sonas banded {:.2} [{:.2}, {:.2}], {} seeds; matches baseline: {same}",
            elo.delta,
            elo.ci_low,
            elo.ci_high,
            sonas.delta,
            sonas.ci_low,
            sonas.ci_high,
            elo.per_seed.len()
        ),
    ))
}

fn linearity() -> Outcome {
    let grid = verifier_grid();
    let opts = CheckOptions::tol(1e-9);
    let tanh = check_bisector_linear(&builtin::tanh_bisector(), &grid, &opts)?;
    let (_, sonas_bisector) = check_p_separable(&builtin::sonas_curve(), 0.3, &grid, &opts)?;
    let sonas_bisector =
        sonas_bisector.ok_or_else(|| ratinglab::Error::InvalidArgument("no bisector".into()))?;
    let sonas = check_bisector_linear(&sonas_bisector, &grid, &opts)?;
    let tanh_add = tanh.metrics["additivity_residual"];
    let slope = sonas.metrics["slope"];
    let ok = tanh.verdict == Verdict::Refuted
        && tanh_add > 1e-3
        && sonas.holds()
        && (slope - 0.001).abs() <= 1e-9;
    Ok((
        ok,
        format!(
            "tanh additivity residual {tanh_add:.3e} ({}); sonas {} with slope {slope:.12}",
            tanh.verdict, sonas.verdict
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("fairness axiom", fairness, Duration::from_secs(1)),
        ("gain forms agree", gain_forms, Duration::from_secs(1)),
        (
            "chain bound and identity",
            chain_bound,
            Duration::from_secs(1),
        ),
        ("full scale under P OI", full_scale, Duration::from_secs(5)),
        (
            "characterization truth table",
            characterization,
            Duration::from_secs(30),
        ),
        ("Elo midpoint", midpoint, Duration::from_secs(1)),
        (
            "simulation calibration",
            calibration,
            Duration::from_secs(10),
        ),
        (
            "attack differential",
            attack_differential,
            Duration::from_secs(120),
        ),
        ("bisector linearity", linearity, Duration::from_secs(1)),
    ];
    let mut failures = 0;
    for (i, (name, f, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= limit, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name}: {detail} ({:.3} s, limit {} s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
