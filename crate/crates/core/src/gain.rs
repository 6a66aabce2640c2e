//! Average beam-gain matrices.
//!
//! `G[q][p]` is the mean received power `E_α |w_qᴴ H g_p|²` for RX beam `q`
//! and TX beam `p`. Averaging over independent path gains removes all
//! cross-path terms, leaving a closed form in which every path contributes
//! its power times a Fejér kernel on each side:
//!
//! ```text
//! G[q][p] = Σℓ σ²ℓ · F(N_RX, cos θℓ − cos θ̄_q) · F(N_TX, cos φ̄_p − cos φℓ)
//! F(n, Δ) = sin²(nπΔ/2) / (n · sin²(πΔ/2))
//! ```
//!
//! [`monte_carlo_gain`] estimates the same matrix by brute force through
//! explicit channel draws and serves as the oracle for the closed form.

use rand::Rng;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::channel::{sample_path_gains, synthesize_channel, ArrayConfig, PathProfile};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::geometry::{path_angles, PathAngles, PositionMatrix};

/// Below this `|sin(πΔ/2)|` the kernel is replaced by its limit `n`.
const SINGULARITY_EPS: f64 = 1e-9;

/// Squared-magnitude array factor of an `n`-element ULA steered `delta`
/// away (in cosine space) from the arrival direction.
///
/// Even in `delta`, periodic with period 2, bounded by `n`, which it attains
/// exactly at every even integer.
pub fn fejer_gain(n: usize, delta: f64) -> f64 {
    let n_f = n as f64;
    let reduced = delta - 2.0 * (delta / 2.0).round();
    let x = FRAC_PI_2 * reduced;
    let s = x.sin();
    if s.abs() < SINGULARITY_EPS {
        return n_f;
    }
    let num = (n_f * x).sin();
    (num * num) / (n_f * s * s)
}

/// `M_RX × M_TX` matrix of non-negative gains, row-major (rows are RX
/// beams). Indices are 0-based here; selections carry 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainMatrix {
    m_rx: usize,
    m_tx: usize,
    entries: Vec<f64>,
}

impl GainMatrix {
    pub fn zeros(m_rx: usize, m_tx: usize) -> Self {
        GainMatrix {
            m_rx,
            m_tx,
            entries: vec![0.0; m_rx * m_tx],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m_rx = rows.len();
        let m_tx = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m_tx) {
            return Err(Error::DimensionMismatch {
                context: "gain matrix rows",
                expected: m_tx,
                actual: bad.len(),
            });
        }
        Ok(GainMatrix {
            m_rx,
            m_tx,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn m_rx(&self) -> usize {
        self.m_rx
    }

    pub fn m_tx(&self) -> usize {
        self.m_tx
    }

    #[inline]
    pub fn get(&self, q: usize, p: usize) -> f64 {
        self.entries[q * self.m_tx + p]
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.entries[q * self.m_tx..(q + 1) * self.m_tx]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Largest entry and its `(q, p)`, lowest lexicographic position on ties.
    pub fn max_entry(&self) -> (f64, usize, usize) {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        for q in 0..self.m_rx {
            for (p, &v) in self.row(q).iter().enumerate() {
                if v > best.0 {
                    best = (v, q, p);
                }
            }
        }
        best
    }

    /// Best achievable gain for each TX beam (max down each column).
    pub fn column_max(&self) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; self.m_tx];
        for q in 0..self.m_rx {
            for (o, &v) in out.iter_mut().zip(self.row(q)) {
                if v > *o {
                    *o = v;
                }
            }
        }
        out
    }

    /// Best achievable gain for each RX beam (max along each row).
    pub fn row_max(&self) -> Vec<f64> {
        (0..self.m_rx)
            .map(|q| self.row(q).iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// Column maxima over the listed rows only (0-based).
    pub fn column_max_over_rows(&self, rows: &[usize]) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; self.m_tx];
        for &q in rows {
            for (o, &v) in out.iter_mut().zip(self.row(q)) {
                if v > *o {
                    *o = v;
                }
            }
        }
        out
    }

    /// Row maxima over the listed columns only (0-based).
    pub fn row_max_over_columns(&self, cols: &[usize]) -> Vec<f64> {
        (0..self.m_rx)
            .map(|q| {
                let row = self.row(q);
                cols.iter().map(|&p| row[p]).fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

/// Precomputed pieces of the closed form for one codebook pair and path
/// profile, so repeated evaluations only pay for the kernels and the
/// rank-`L` outer-product sum.
#[derive(Debug, Clone)]
pub struct GainModel {
    n_tx: usize,
    n_rx: usize,
    tx_cosines: Vec<f64>,
    rx_cosines: Vec<f64>,
    powers: Vec<f64>,
}

impl GainModel {
    pub fn new(profile: &PathProfile, cb_tx: &Codebook, cb_rx: &Codebook) -> Self {
        GainModel {
            n_tx: cb_tx.antennas(),
            n_rx: cb_rx.antennas(),
            tx_cosines: cb_tx.grid_cosines().to_vec(),
            rx_cosines: cb_rx.grid_cosines().to_vec(),
            powers: profile.powers().to_vec(),
        }
    }

    pub fn m_tx(&self) -> usize {
        self.tx_cosines.len()
    }

    pub fn m_rx(&self) -> usize {
        self.rx_cosines.len()
    }

    pub fn num_paths(&self) -> usize {
        self.powers.len()
    }

    pub fn empty_matrix(&self) -> GainMatrix {
        GainMatrix::zeros(self.m_rx(), self.m_tx())
    }

    /// Overwrites `out` with the gain matrix for the given path angles.
    pub fn fill(&self, angles: &PathAngles, out: &mut GainMatrix) -> Result<()> {
        if angles.aods.len() != self.powers.len() || angles.aoas.len() != self.powers.len() {
            return Err(Error::DimensionMismatch {
                context: "path angles vs path profile",
                expected: self.powers.len(),
                actual: angles.aods.len(),
            });
        }
        if out.m_rx != self.m_rx() || out.m_tx != self.m_tx() {
            *out = self.empty_matrix();
        } else {
            out.entries.fill(0.0);
        }
        let m_tx = self.m_tx();
        let mut tx_kernel = vec![0.0; m_tx];
        let mut rx_kernel = vec![0.0; self.m_rx()];
        for ((&power, &aod), &aoa) in self.powers.iter().zip(&angles.aods).zip(&angles.aoas) {
            if power == 0.0 {
                continue;
            }
            let cos_aod = aod.cos();
            let cos_aoa = aoa.cos();
            for (k, &c) in tx_kernel.iter_mut().zip(&self.tx_cosines) {
                *k = power * fejer_gain(self.n_tx, c - cos_aod);
            }
            for (k, &c) in rx_kernel.iter_mut().zip(&self.rx_cosines) {
                *k = fejer_gain(self.n_rx, cos_aoa - c);
            }
            for (q, &r) in rx_kernel.iter().enumerate() {
                let row = &mut out.entries[q * m_tx..(q + 1) * m_tx];
                for (g, &t) in row.iter_mut().zip(&tx_kernel) {
                    *g += r * t;
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, pos: &PositionMatrix) -> Result<GainMatrix> {
        let mut out = self.empty_matrix();
        self.fill_from_positions(pos, &mut out)?;
        Ok(out)
    }

    pub fn fill_from_positions(&self, pos: &PositionMatrix, out: &mut GainMatrix) -> Result<()> {
        if pos.num_paths() != self.powers.len() {
            return Err(Error::DimensionMismatch {
                context: "position matrix paths vs path profile",
                expected: self.powers.len(),
                actual: pos.num_paths(),
            });
        }
        self.fill(&path_angles(pos)?, out)
    }
}

/// Closed-form average gain matrix for the nodes at `pos`.
pub fn gain_matrix(
    pos: &PositionMatrix,
    profile: &PathProfile,
    cb_tx: &Codebook,
    cb_rx: &Codebook,
) -> Result<GainMatrix> {
    GainModel::new(profile, cb_tx, cb_rx).evaluate(pos)
}

/// Sample mean of `|w_qᴴ H g_p|²` and its standard error, per entry.
#[derive(Debug, Clone)]
pub struct MonteCarloGain {
    pub mean: GainMatrix,
    pub std_error: GainMatrix,
    pub n_samples: usize,
}

/// Brute-force estimate of the average gain matrix from `n_samples`
/// independent channel realizations.
pub fn monte_carlo_gain<R: Rng + ?Sized>(
    pos: &PositionMatrix,
    profile: &PathProfile,
    cb_tx: &Codebook,
    cb_rx: &Codebook,
    n_samples: usize,
    rng: &mut R,
) -> Result<GainMatrix> {
    Ok(monte_carlo_gain_with_error(pos, profile, cb_tx, cb_rx, n_samples, rng)?.mean)
}

pub fn monte_carlo_gain_with_error<R: Rng + ?Sized>(
    pos: &PositionMatrix,
    profile: &PathProfile,
    cb_tx: &Codebook,
    cb_rx: &Codebook,
    n_samples: usize,
    rng: &mut R,
) -> Result<MonteCarloGain> {
    if n_samples == 0 {
        return Err(Error::param("n_samples", "must be at least 1"));
    }
    if pos.num_paths() != profile.num_paths() {
        return Err(Error::DimensionMismatch {
            context: "position matrix paths vs path profile",
            expected: profile.num_paths(),
            actual: pos.num_paths(),
        });
    }
    let angles = path_angles(pos)?;
    let cfg = ArrayConfig::new(cb_tx.antennas(), cb_rx.antennas())?;
    let tx_beams = cb_tx.beams();
    let rx_beams = cb_rx.beams();
    let (m_rx, m_tx) = (rx_beams.len(), tx_beams.len());
    let mut sum = vec![0.0; m_rx * m_tx];
    let mut sum_sq = vec![0.0; m_rx * m_tx];

    for _ in 0..n_samples {
        let gains = sample_path_gains(profile, rng);
        let h = synthesize_channel(cfg, &angles, &gains)?;
        for (p, g) in tx_beams.iter().enumerate() {
            let hg = h.apply(g);
            for (q, w) in rx_beams.iter().enumerate() {
                let y: num_complex::Complex64 = w.iter().zip(&hg).map(|(wi, hi)| wi.conj() * hi).sum();
                let v = y.norm_sqr();
                sum[q * m_tx + p] += v;
                sum_sq[q * m_tx + p] += v * v;
            }
        }
    }

    let n = n_samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std_error: Vec<f64> = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| {
            if n_samples < 2 {
                return 0.0;
            }
            let var = ((sq - n * m * m) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        })
        .collect();
    Ok(MonteCarloGain {
        mean: GainMatrix { m_rx, m_tx, entries: mean },
        std_error: GainMatrix { m_rx, m_tx, entries: std_error },
        n_samples,
    })
}
