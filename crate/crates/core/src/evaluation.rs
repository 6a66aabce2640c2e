//! Rate scoring and the Monte-Carlo experiment engine.
//!
//! The scenario geometry is fixed; each trial draws fresh position
//! estimates for both sides, lets every requested strategy pre-select on
//! both sides from those same estimates (paired trials), and scores the
//! resulting beam sets on the true average gain matrix.
//!
//! Random streams are derived from `(seed, trial, purpose)` so a strategy's
//! draws do not depend on which other strategies run alongside it, nor on
//! execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::channel::PathProfile;
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::gain::{GainMatrix, GainModel};
use crate::geometry::PositionMatrix;
use crate::scenario::Scenario;
use crate::strategies::{
    select_idealized, select_naive, select_one_step, select_two_step, BeamSelection, Strategy,
    StrategyConfig,
};
use crate::uncertainty::{make_noisy_view, ErrorModel, NoisyView, Side};

/// One-sided 95% normal quantile.
const Z_95_ONE_SIDED: f64 = 1.6448536269514722;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSample {
    /// Spectral efficiency in bits/s/Hz.
    pub rate: f64,
    /// `(tx, rx)` 1-based beam indices attaining it.
    pub best_pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub strategy: Strategy,
    pub sweep_value: f64,
    pub mean_rate: f64,
    pub std_error: f64,
    pub n_trials: usize,
}

/// Noise power for an SNR in dB, with the gain matrix kept power-normalized.
pub fn noise_power(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Best pair within the selected index sets; ties resolve to the lowest
/// `(q, p)`.
pub fn rate_on_gain(g: &GainMatrix, sel_tx: &BeamSelection, sel_rx: &BeamSelection, n0: f64) -> RateSample {
    let mut tx = sel_tx.zero_based();
    let mut rx = sel_rx.zero_based();
    tx.sort_unstable();
    rx.sort_unstable();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for &q in &rx {
        for &p in &tx {
            let v = g.get(q, p);
            if v > best.0 {
                best = (v, q, p);
            }
        }
    }
    RateSample {
        rate: (1.0 + best.0 / n0).log2(),
        best_pair: (best.2 + 1, best.1 + 1),
    }
}

/// `max_{p ∈ D_TX, q ∈ D_RX} log2(1 + G[q][p](P) / N0)` on the true positions.
pub fn achieved_rate(
    sel_tx: &BeamSelection,
    sel_rx: &BeamSelection,
    true_pos: &PositionMatrix,
    profile: &PathProfile,
    cb_tx: &Codebook,
    cb_rx: &Codebook,
    n0: f64,
) -> Result<RateSample> {
    if n0.is_nan() || n0 <= 0.0 {
        return Err(Error::param("n0", format!("noise power must be positive, got {n0}")));
    }
    if sel_tx.side() != Side::Tx || sel_rx.side() != Side::Rx {
        return Err(Error::param("selection", "expected a TX selection and an RX selection"));
    }
    let g = GainModel::new(profile, cb_tx, cb_rx).evaluate(true_pos)?;
    for (sel, m) in [(sel_tx, g.m_tx()), (sel_rx, g.m_rx())] {
        if let Some(&i) = sel.indices().iter().find(|&&i| i > m) {
            return Err(Error::BeamIndexOutOfRange { index: i, max: m });
        }
    }
    Ok(rate_on_gain(&g, sel_tx, sel_rx, n0))
}

/// What an experiment varies.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// SNR in dB from `lo` to `hi` inclusive.
    Snr { lo: f64, hi: f64, step: f64 },
    /// Beam budget `D_TX = D_RX = D` from `lo` to `hi` inclusive.
    Budget { lo: usize, hi: usize },
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Sweep::Snr { lo, hi, step } => {
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| lo + step * i as f64).collect()
            }
            Sweep::Budget { lo, hi } => (lo..=hi).map(|d| d as f64).collect(),
        }
    }

    pub fn axis(&self) -> &'static str {
        match self {
            Sweep::Snr { .. } => "snr",
            Sweep::Budget { .. } => "d",
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sweep::Snr { lo, hi, step } => write!(f, "snr:{lo}:{hi}:{step}"),
            Sweep::Budget { lo, hi } => write!(f, "d:{lo}:{hi}"),
        }
    }
}

impl FromStr for Sweep {
    type Err = Error;

    /// `snr:<lo>:<hi>:<step>` or `d:<lo>:<hi>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidSweep {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["snr", lo, hi, step] => {
                let num = |t: &str| t.parse::<f64>().map_err(|_| bad("SNR bounds and step must be numbers"));
                let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
                if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
                    return Err(bad("values must be finite"));
                }
                if step <= 0.0 {
                    return Err(bad("step must be positive"));
                }
                if hi < lo {
                    return Err(bad("upper bound below lower bound"));
                }
                Ok(Sweep::Snr { lo, hi, step })
            }
            ["d", lo, hi] => {
                let num = |t: &str| t.parse::<usize>().map_err(|_| bad("beam budgets must be positive integers"));
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo == 0 {
                    return Err(bad("beam budget must be at least 1"));
                }
                if hi < lo {
                    return Err(bad("upper bound below lower bound"));
                }
                Ok(Sweep::Budget { lo, hi })
            }
            _ => Err(bad("expected snr:<lo>:<hi>:<step> or d:<lo>:<hi>")),
        }
    }
}

fn strategy_slot(s: Strategy) -> u64 {
    match s {
        Strategy::Idealized => 0,
        Strategy::Naive => 1,
        Strategy::OneStep => 2,
        Strategy::TwoStep => 3,
    }
}

/// Independent stream for `(seed, trial, purpose)`.
pub fn trial_rng(seed: u64, trial: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 8) | purpose);
    rng
}

fn view_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    trial_rng(seed, trial, 0)
}

fn strategy_rng(seed: u64, trial: u64, s: Strategy, side: Side) -> ChaCha8Rng {
    let side_bit = match side {
        Side::Tx => 0,
        Side::Rx => 1,
    };
    trial_rng(seed, trial, 1 + 2 * strategy_slot(s) + side_bit)
}

/// Both estimates for one trial.
pub fn draw_views(scenario: &Scenario, seed: u64, trial: u64) -> Result<(NoisyView, NoisyView)> {
    let mut rng = view_rng(seed, trial);
    let tx = make_noisy_view(&scenario.positions, &scenario.errors, Side::Tx, &mut rng)?;
    let rx = make_noisy_view(&scenario.positions, &scenario.errors, Side::Rx, &mut rng)?;
    Ok((tx, rx))
}

/// Runs `strategy` on both sides of one trial.
#[allow(clippy::too_many_arguments)]
pub fn select_pair(
    strategy: Strategy,
    true_pos: &PositionMatrix,
    views: (&NoisyView, &NoisyView),
    errors: &ErrorModel,
    profile: &PathProfile,
    cb_tx: &Codebook,
    cb_rx: &Codebook,
    cfg: &StrategyConfig,
    seed: u64,
    trial: u64,
) -> Result<(BeamSelection, BeamSelection)> {
    let (view_tx, view_rx) = views;
    match strategy {
        Strategy::Idealized => select_idealized(true_pos, profile, cb_tx, cb_rx, cfg),
        Strategy::Naive => Ok((
            select_naive(view_tx, profile, cb_tx, cb_rx, cfg)?,
            select_naive(view_rx, profile, cb_tx, cb_rx, cfg)?,
        )),
        Strategy::OneStep => {
            let mut a = strategy_rng(seed, trial, strategy, Side::Tx);
            let mut b = strategy_rng(seed, trial, strategy, Side::Rx);
            Ok((
                select_one_step(view_tx, errors, profile, cb_tx, cb_rx, cfg, &mut a)?,
                select_one_step(view_rx, errors, profile, cb_tx, cb_rx, cfg, &mut b)?,
            ))
        }
        Strategy::TwoStep => {
            let mut a = strategy_rng(seed, trial, strategy, Side::Tx);
            let mut b = strategy_rng(seed, trial, strategy, Side::Rx);
            Ok((
                select_two_step(view_tx, errors, profile, cb_tx, cb_rx, cfg, &mut a)?,
                select_two_step(view_rx, errors, profile, cb_tx, cb_rx, cfg, &mut b)?,
            ))
        }
    }
}

/// Per-trial rates of several strategies over one sweep, all paired.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub strategies: Vec<Strategy>,
    pub sweep_values: Vec<f64>,
    /// `rates[strategy][point][trial]`.
    pub rates: Vec<Vec<Vec<f64>>>,
    pub seed: u64,
}

/// Mean of paired differences `a − b` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedDifference {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl PairedDifference {
    /// Lower end of the one-sided 95% confidence interval.
    pub fn lower_95(&self) -> f64 {
        self.mean - Z_95_ONE_SIDED * self.std_error
    }

    /// Upper end of the one-sided 95% confidence interval.
    pub fn upper_95(&self) -> f64 {
        self.mean + Z_95_ONE_SIDED * self.std_error
    }
}

/// Sample mean and standard error of the mean, summed in index order.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 || xs.iter().all(|&x| x == xs[0]) {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

impl ExperimentRun {
    pub fn n_trials(&self) -> usize {
        self.rates.first().and_then(|s| s.first()).map_or(0, Vec::len)
    }

    fn slot(&self, s: Strategy) -> Option<usize> {
        self.strategies.iter().position(|&x| x == s)
    }

    pub fn trial_rates(&self, s: Strategy, point: usize) -> Option<&[f64]> {
        self.slot(s).map(|i| self.rates[i][point].as_slice())
    }

    pub fn summary(&self) -> Vec<ExperimentResult> {
        let mut out = Vec::new();
        for (si, &strategy) in self.strategies.iter().enumerate() {
            for (pi, &sweep_value) in self.sweep_values.iter().enumerate() {
                let (mean_rate, std_error) = mean_and_std_error(&self.rates[si][pi]);
                out.push(ExperimentResult {
                    strategy,
                    sweep_value,
                    mean_rate,
                    std_error,
                    n_trials: self.rates[si][pi].len(),
                });
            }
        }
        out
    }

    pub fn mean_rate(&self, s: Strategy, point: usize) -> Option<f64> {
        self.trial_rates(s, point).map(|r| mean_and_std_error(r).0)
    }

    /// Paired comparison of `a − b` at one sweep point.
    pub fn paired(&self, a: Strategy, b: Strategy, point: usize) -> Option<PairedDifference> {
        let ra = self.trial_rates(a, point)?;
        let rb = self.trial_rates(b, point)?;
        let diffs: Vec<f64> = ra.iter().zip(rb).map(|(x, y)| x - y).collect();
        let (mean, std_error) = mean_and_std_error(&diffs);
        Some(PairedDifference { mean, std_error, n: diffs.len() })
    }
}

/// Runs every strategy in `strategies` over `n_trials` paired trials.
pub fn run_experiments(
    scenario: &Scenario,
    strategies: &[Strategy],
    sweep: &Sweep,
    n_trials: usize,
    seed: u64,
) -> Result<ExperimentRun> {
    if strategies.is_empty() {
        return Err(Error::param("strategies", "at least one strategy is required"));
    }
    if n_trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let (cb_tx, cb_rx) = scenario.codebooks()?;
    let points = sweep.points();
    if let Sweep::Budget { hi, .. } = *sweep {
        if hi > cb_tx.len() || hi > cb_rx.len() {
            return Err(Error::InvalidSweep {
                spec: sweep.to_string(),
                reason: format!("beam budget {hi} exceeds the codebook size"),
            });
        }
    }
    let true_gain = GainModel::new(&scenario.profile, &cb_tx, &cb_rx).evaluate(&scenario.positions)?;
    let mut rates = vec![vec![Vec::with_capacity(n_trials); points.len()]; strategies.len()];

    for trial in 0..n_trials as u64 {
        let (view_tx, view_rx) = draw_views(scenario, seed, trial)?;
        let views = (&view_tx, &view_rx);
        for (si, &strategy) in strategies.iter().enumerate() {
            match sweep {
                Sweep::Snr { .. } => {
                    let (sel_tx, sel_rx) = select_pair(
                        strategy,
                        &scenario.positions,
                        views,
                        &scenario.errors,
                        &scenario.profile,
                        &cb_tx,
                        &cb_rx,
                        &scenario.strategy,
                        seed,
                        trial,
                    )?;
                    for (pi, &snr) in points.iter().enumerate() {
                        let r = rate_on_gain(&true_gain, &sel_tx, &sel_rx, noise_power(snr));
                        rates[si][pi].push(r.rate);
                    }
                }
                Sweep::Budget { .. } => {
                    let n0 = noise_power(scenario.snr_db);
                    for (pi, &d) in points.iter().enumerate() {
                        let cfg = StrategyConfig {
                            d_tx: d as usize,
                            d_rx: d as usize,
                            ..scenario.strategy.clone()
                        };
                        let (sel_tx, sel_rx) = select_pair(
                            strategy,
                            &scenario.positions,
                            views,
                            &scenario.errors,
                            &scenario.profile,
                            &cb_tx,
                            &cb_rx,
                            &cfg,
                            seed,
                            trial,
                        )?;
                        rates[si][pi].push(rate_on_gain(&true_gain, &sel_tx, &sel_rx, n0).rate);
                    }
                }
            }
        }
    }
    Ok(ExperimentRun {
        strategies: strategies.to_vec(),
        sweep_values: points,
        rates,
        seed,
    })
}

/// Mean rate and standard error of one strategy at every sweep point.
pub fn run_experiment(
    scenario: &Scenario,
    strategy: Strategy,
    sweep: &Sweep,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<ExperimentResult>> {
    Ok(run_experiments(scenario, &[strategy], sweep, n_trials, seed)?.summary())
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectedBeam {
    pub index: usize,
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategySnapshot {
    pub strategy: Strategy,
    pub tx: Vec<SelectedBeam>,
    pub rx: Vec<SelectedBeam>,
    pub rate: RateSample,
}

/// One realization of every requested strategy, with the geometry needed to
/// redraw it.
#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub seed: u64,
    pub snr_db: f64,
    pub true_positions: PositionMatrix,
    pub view_tx: PositionMatrix,
    pub view_rx: PositionMatrix,
    pub selections: Vec<StrategySnapshot>,
}

pub fn snapshot_beams(scenario: &Scenario, strategies: &[Strategy], seed: u64) -> Result<Snapshot> {
    if strategies.is_empty() {
        return Err(Error::param("strategies", "at least one strategy is required"));
    }
    let (cb_tx, cb_rx) = scenario.codebooks()?;
    let true_gain = GainModel::new(&scenario.profile, &cb_tx, &cb_rx).evaluate(&scenario.positions)?;
    let (view_tx, view_rx) = draw_views(scenario, seed, 0)?;
    let n0 = noise_power(scenario.snr_db);
    let describe = |sel: &BeamSelection, cb: &Codebook| -> Result<Vec<SelectedBeam>> {
        sel.indices()
            .iter()
            .map(|&index| Ok(SelectedBeam { index, angle: cb.angle(index)? }))
            .collect()
    };
    let mut selections = Vec::with_capacity(strategies.len());
    for &strategy in strategies {
        let (sel_tx, sel_rx) = select_pair(
            strategy,
            &scenario.positions,
            (&view_tx, &view_rx),
            &scenario.errors,
            &scenario.profile,
            &cb_tx,
            &cb_rx,
            &scenario.strategy,
            seed,
            0,
        )?;
        selections.push(StrategySnapshot {
            strategy,
            tx: describe(&sel_tx, &cb_tx)?,
            rx: describe(&sel_rx, &cb_rx)?,
            rate: rate_on_gain(&true_gain, &sel_tx, &sel_rx, n0),
        });
    }
    Ok(Snapshot {
        seed,
        snr_db: scenario.snr_db,
        true_positions: scenario.positions.clone(),
        view_tx: view_tx.positions,
        view_rx: view_rx.positions,
        selections,
    })
}
