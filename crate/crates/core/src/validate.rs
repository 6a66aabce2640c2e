//! Self-checks that compare the fast code paths against independent
//! brute-force computations on small random instances.
//!
//! Each check returns a [`CheckResult`]; `beamalign validate` prints one line
//! per check.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ArrayConfig, PathProfile};
use crate::codebook::{build_codebook, Codebook};
use crate::error::Result;
use crate::evaluation::{draw_views, select_pair};
use crate::gain::{fejer_gain, gain_matrix, monte_carlo_gain_with_error, GainMatrix};
use crate::geometry::{Point2, PositionMatrix};
use crate::scenario::Scenario;
use crate::strategies::{
    best_gain_over, exhaustive_best_subsets, select_idealized, Strategy, StrategyConfig,
};
use crate::uncertainty::ErrorModel;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult { name: name.to_string(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// A small random link: geometry, path powers and both codebooks.
#[derive(Debug, Clone)]
pub struct ToyInstance {
    pub positions: PositionMatrix,
    pub profile: PathProfile,
    pub cb_tx: Codebook,
    pub cb_rx: Codebook,
}

/// TX at the origin, RX and `num_paths − 1` reflectors uniform in a box.
pub fn random_positions<R: Rng + ?Sized>(num_paths: usize, rng: &mut R) -> PositionMatrix {
    loop {
        let mut pt = || Point2::new(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0));
        let rx = pt();
        let reflectors = (1..num_paths).map(|_| pt()).collect();
        let ok = PositionMatrix::new(Point2::ORIGIN, reflectors, rx)
            .ok()
            .filter(|p| p.columns().skip(1).all(|c| c.norm() > 1.0));
        if let Some(p) = ok {
            return p;
        }
    }
}

/// Path powers drawn uniformly and normalized to sum to 1.
pub fn random_profile<R: Rng + ?Sized>(num_paths: usize, rng: &mut R) -> PathProfile {
    let raw: Vec<f64> = (0..num_paths).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut powers: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // Pin the sum to 1 exactly enough for the profile check.
    let head: f64 = powers[..num_paths - 1].iter().sum();
    powers[num_paths - 1] = 1.0 - head;
    PathProfile::new(powers).expect("normalized")
}

pub fn random_toy_instance<R: Rng + ?Sized>(
    antenna_choices: &[usize],
    m: usize,
    max_paths: usize,
    rng: &mut R,
) -> ToyInstance {
    let n = *antenna_choices.choose(rng).expect("non-empty choices");
    let num_paths = rng.random_range(1..=max_paths);
    let cb = build_codebook(m, n).expect("valid toy codebook");
    ToyInstance {
        positions: random_positions(num_paths, rng),
        profile: random_profile(num_paths, rng),
        cb_tx: cb.clone(),
        cb_rx: cb,
    }
}

/// Exact values at the removable singularities and continuity next to them.
pub fn check_fejer_singularities() -> CheckResult {
    let mut worst = 0.0f64;
    let mut exact = true;
    for n in [1usize, 2, 4, 8, 16, 32, 64, 128] {
        for d in [0.0, 2.0, -2.0] {
            exact &= fejer_gain(n, d) == n as f64;
        }
        for d in [1e-8, -1e-8, 2.0 + 1e-8, -2.0 - 1e-8] {
            worst = worst.max((fejer_gain(n, d) - n as f64).abs() / n as f64);
        }
    }
    let passed = exact && worst < 1e-6;
    CheckResult::new(
        "fejer-singularities",
        passed,
        format!("exact at 0 and ±2: {exact}; worst relative gap at 1e-8: {worst:.2e}"),
    )
}

/// Outcome of comparing the closed-form gain matrix with a Monte-Carlo
/// average over explicit channel draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainComparison {
    /// Largest `|closed − mc| / std_error` over all entries.
    pub worst_z: f64,
    /// Entries outside 3 standard errors.
    pub outside_3se: usize,
    /// Largest relative gap over entries above 1% of the peak.
    pub worst_rel: f64,
    pub entries: usize,
}

pub fn compare_gain_with_monte_carlo<R: Rng + ?Sized>(
    inst: &ToyInstance,
    n_samples: usize,
    rng: &mut R,
) -> Result<GainComparison> {
    let closed = gain_matrix(&inst.positions, &inst.profile, &inst.cb_tx, &inst.cb_rx)?;
    let mc = monte_carlo_gain_with_error(&inst.positions, &inst.profile, &inst.cb_tx, &inst.cb_rx, n_samples, rng)?;
    let peak = closed.max_entry().0;
    let mut out = GainComparison { worst_z: 0.0, outside_3se: 0, worst_rel: 0.0, entries: 0 };
    for ((&c, &m), &se) in closed.entries().iter().zip(mc.mean.entries()).zip(mc.std_error.entries()) {
        out.entries += 1;
        let gap = (c - m).abs();
        // A zero standard error only happens for identically-zero entries.
        let z = if se > 0.0 { gap / se } else if gap <= 1e-12 * peak { 0.0 } else { f64::INFINITY };
        out.worst_z = out.worst_z.max(z);
        if z > 3.0 {
            out.outside_3se += 1;
        }
        if c > 0.01 * peak {
            out.worst_rel = out.worst_rel.max(gap / c);
        }
    }
    Ok(out)
}

/// Closed form vs Monte Carlo on `n_instances` toy links.
pub fn check_gain_vs_monte_carlo(n_instances: usize, n_samples: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_z = 0.0f64;
    let mut worst_rel = 0.0f64;
    let mut outside = 0;
    let mut entries = 0;
    for _ in 0..n_instances {
        let inst = random_toy_instance(&[4, 8], 8, 3, &mut rng);
        let c = compare_gain_with_monte_carlo(&inst, n_samples, &mut rng)?;
        worst_z = worst_z.max(c.worst_z);
        worst_rel = worst_rel.max(c.worst_rel);
        outside += c.outside_3se;
        entries += c.entries;
    }
    let passed = outside == 0 && worst_rel < 0.05;
    Ok(CheckResult::new(
        "gain-closed-form-vs-monte-carlo",
        passed,
        format!(
            "{n_instances} instances, {n_samples} draws: {outside}/{entries} entries beyond 3 SE \
             (worst {worst_z:.2} SE), worst relative gap {:.3}%",
            100.0 * worst_rel
        ),
    ))
}

/// Idealized greedy selection reaches the exhaustive-search optimum.
pub fn check_greedy_vs_exhaustive(n_instances: usize, m: usize, d: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    for _ in 0..n_instances {
        let inst = random_toy_instance(&[4, 8, 16], m, 3, &mut rng);
        let (greedy, exhaustive) = greedy_and_exhaustive(&inst, d)?;
        if greedy != exhaustive {
            mismatches += 1;
        }
    }
    Ok(CheckResult::new(
        "greedy-vs-exhaustive",
        mismatches == 0,
        format!("{n_instances} instances (M={m}, D={d}): {mismatches} objective mismatches"),
    ))
}

/// Best reachable gain of the greedy idealized selection and of the best
/// subsets found by exhaustive search.
pub fn greedy_and_exhaustive(inst: &ToyInstance, d: usize) -> Result<(f64, f64)> {
    let g: GainMatrix = gain_matrix(&inst.positions, &inst.profile, &inst.cb_tx, &inst.cb_rx)?;
    let cfg = StrategyConfig::new(d, d);
    let (tx, rx) = select_idealized(&inst.positions, &inst.profile, &inst.cb_tx, &inst.cb_rx, &cfg)?;
    let greedy = best_gain_over(&g, &tx.zero_based(), &rx.zero_based());
    let (exhaustive, _, _) = exhaustive_best_subsets(&g, d, d);
    Ok((greedy, exhaustive))
}

/// A random scenario with perfect position information.
pub fn random_noiseless_scenario<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    let num_paths = rng.random_range(1..=3);
    let positions = random_positions(num_paths, rng);
    let n = *[8usize, 16, 32].choose(rng).expect("non-empty");
    let m = *[8usize, 16, 32].choose(rng).expect("non-empty");
    let d = rng.random_range(1..=4);
    Scenario {
        errors: ErrorModel::zeros(positions.num_columns()),
        profile: random_profile(num_paths, rng),
        positions,
        arrays: ArrayConfig { n_tx: n, n_rx: n },
        m_tx: m,
        m_rx: m,
        strategy: StrategyConfig::new(d, d).with_mc_iterations(4, 3),
        ..Scenario::default()
    }
}

/// Per-scenario outcome of running every strategy without position noise.
#[derive(Debug, Clone)]
pub struct CollapseOutcome {
    /// Strategies whose selections differ from the idealized ones.
    pub differing: Vec<Strategy>,
}

pub fn zero_noise_outcome(scenario: &Scenario, seed: u64) -> Result<CollapseOutcome> {
    let (cb_tx, cb_rx) = scenario.codebooks()?;
    let (view_tx, view_rx) = draw_views(scenario, seed, 0)?;
    let select = |s| {
        select_pair(
            s,
            &scenario.positions,
            (&view_tx, &view_rx),
            &scenario.errors,
            &scenario.profile,
            &cb_tx,
            &cb_rx,
            &scenario.strategy,
            seed,
            0,
        )
    };
    let reference = select(Strategy::Idealized)?;
    let mut differing = Vec::new();
    for s in [Strategy::Naive, Strategy::OneStep, Strategy::TwoStep] {
        if select(s)? != reference {
            differing.push(s);
        }
    }
    Ok(CollapseOutcome { differing })
}

/// With every radius zero all strategies should pick the same beams.
pub fn check_zero_noise_collapse(n_scenarios: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0usize; 4];
    for i in 0..n_scenarios {
        let s = random_noiseless_scenario(&mut rng);
        for d in zero_noise_outcome(&s, seed.wrapping_add(i as u64))?.differing {
            counts[d as usize] += 1;
        }
    }
    let detail = [Strategy::Naive, Strategy::OneStep, Strategy::TwoStep]
        .iter()
        .map(|&s| format!("{s} differs in {}", counts[s as usize]))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(CheckResult::new(
        "zero-noise-collapse",
        counts.iter().all(|&c| c == 0),
        format!("{n_scenarios} scenarios: {detail}"),
    ))
}

/// Sizes of the built-in suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub gain_instances: usize,
    pub gain_samples: usize,
    pub greedy_instances: usize,
    pub collapse_scenarios: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            gain_instances: 20,
            gain_samples: 20_000,
            greedy_instances: 50,
            collapse_scenarios: 100,
            seed: 0,
        }
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_fejer_singularities(),
        check_gain_vs_monte_carlo(cfg.gain_instances, cfg.gain_samples, cfg.seed)?,
        check_greedy_vs_exhaustive(cfg.greedy_instances, 8, 2, cfg.seed)?,
        check_zero_noise_collapse(cfg.collapse_scenarios, cfg.seed)?,
    ])
}
