//! Narrowband geometric multipath channel between two critically-spaced ULAs.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::PathAngles;

/// Tolerance on `Σ σ²ℓ = 1`.
pub const POWER_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_tx: usize,
    pub n_rx: usize,
}

impl ArrayConfig {
    pub fn new(n_tx: usize, n_rx: usize) -> Result<Self> {
        if n_tx == 0 {
            return Err(Error::param("arrays.n_tx", "must be at least 1"));
        }
        if n_rx == 0 {
            return Err(Error::param("arrays.n_rx", "must be at least 1"));
        }
        Ok(ArrayConfig { n_tx, n_rx })
    }
}

/// Average power `σ²ℓ` of each path, LoS first. Powers sum to one; a zero
/// LoS entry models blockage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PathProfile {
    powers: Vec<f64>,
}

impl PathProfile {
    pub fn new(powers: Vec<f64>) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::param("profile", "needs at least one path"));
        }
        for (i, p) in powers.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::param(
                    format!("profile[{i}]"),
                    format!("power must be finite and non-negative, got {p}"),
                ));
            }
        }
        let total: f64 = powers.iter().sum();
        if (total - 1.0).abs() > POWER_SUM_TOLERANCE {
            return Err(Error::param(
                "profile",
                format!("powers must sum to 1, got {total}"),
            ));
        }
        Ok(PathProfile { powers })
    }

    /// Skips the unit-sum check. Used for all-zero profiles and for scaled
    /// profiles in rank-invariance checks.
    pub fn unnormalized(powers: Vec<f64>) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::param("profile", "needs at least one path"));
        }
        if let Some(p) = powers.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::param("profile", format!("bad power {p}")));
        }
        Ok(PathProfile { powers })
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn num_paths(&self) -> usize {
        self.powers.len()
    }

    pub fn total_power(&self) -> f64 {
        self.powers.iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PathProfile::unnormalized(self.powers.iter().map(|p| p * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for PathProfile {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PathProfile::new(v)
    }
}

impl From<PathProfile> for Vec<f64> {
    fn from(p: PathProfile) -> Self {
        p.powers
    }
}

/// Instantaneous complex gain `αℓ` of each path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGains {
    pub alphas: Vec<Complex64>,
}

/// `N_RX × N_TX` channel matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_rx: usize,
    n_tx: usize,
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn zeros(n_rx: usize, n_tx: usize) -> Self {
        ChannelMatrix {
            n_rx,
            n_tx,
            entries: vec![Complex64::new(0.0, 0.0); n_rx * n_tx],
        }
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.n_tx + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.n_tx..(row + 1) * self.n_tx]
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `w^H H g`.
    pub fn bilinear(&self, w: &[Complex64], g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, wr) in w.iter().enumerate() {
            let hg: Complex64 = self.row(r).iter().zip(g).map(|(h, gi)| h * gi).sum();
            acc += wr.conj() * hg;
        }
        acc
    }

    /// `H g`.
    pub fn apply(&self, g: &[Complex64]) -> Vec<Complex64> {
        (0..self.n_rx)
            .map(|r| self.row(r).iter().zip(g).map(|(h, gi)| h * gi).sum())
            .collect()
    }
}

/// ULA response `(1/√n)·exp(−iπk·cos(angle))`, `k = 0..n`.
pub fn steering_vector(n: usize, angle: f64) -> Vec<Complex64> {
    steering_vector_from_cos(n, angle.cos())
}

pub(crate) fn steering_vector_from_cos(n: usize, cos_angle: f64) -> Vec<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| Complex64::from_polar(scale, -PI * k as f64 * cos_angle))
        .collect()
}

/// Draws `αℓ ~ CN(0, σ²ℓ)`: real and imaginary parts each `N(0, σ²ℓ/2)`.
/// Two normals are consumed per path even when `σ²ℓ = 0`, so the stream
/// position does not depend on the profile.
pub fn sample_path_gains<R: Rng + ?Sized>(profile: &PathProfile, rng: &mut R) -> PathGains {
    let alphas = profile
        .powers()
        .iter()
        .map(|&var| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if var == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let s = (var / 2.0).sqrt();
                Complex64::new(re * s, im * s)
            }
        })
        .collect();
    PathGains { alphas }
}

/// `H = √(N_TX·N_RX) · Σℓ αℓ · a_RX(θℓ) · a_TX(φℓ)^H`.
pub fn synthesize_channel(
    cfg: ArrayConfig,
    angles: &PathAngles,
    gains: &PathGains,
) -> Result<ChannelMatrix> {
    let l = gains.alphas.len();
    if angles.aods.len() != l || angles.aoas.len() != l {
        return Err(Error::DimensionMismatch {
            context: "path angles vs path gains",
            expected: l,
            actual: angles.aods.len().min(angles.aoas.len()),
        });
    }
    let mut h = ChannelMatrix::zeros(cfg.n_rx, cfg.n_tx);
    let norm = ((cfg.n_tx * cfg.n_rx) as f64).sqrt();
    for ((alpha, &aod), &aoa) in gains.alphas.iter().zip(&angles.aods).zip(&angles.aoas) {
        let a_rx = steering_vector(cfg.n_rx, aoa);
        let a_tx = steering_vector(cfg.n_tx, aod);
        let c = alpha * norm;
        for (r, ar) in a_rx.iter().enumerate() {
            let row = &mut h.entries[r * cfg.n_tx..(r + 1) * cfg.n_tx];
            let cr = c * ar;
            for (slot, at) in row.iter_mut().zip(&a_tx) {
                *slot += cr * at.conj();
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn broadside_steering_is_flat() {
        let v = steering_vector(4, FRAC_PI_2);
        for z in &v {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn endfire_steering_alternates() {
        let v = steering_vector(2, 0.0);
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(v[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].re, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sixty_four_element_steering_matches_formula() {
        let v = steering_vector(64, FRAC_PI_3);
        assert_abs_diff_eq!(norm(&v), 1.0, epsilon = 1e-12);
        for (k, z) in v.iter().enumerate() {
            // cos(π/3) = 1/2 so the phase advances by −π/2 per element.
            let phase = -PI * k as f64 / 2.0;
            assert_abs_diff_eq!(z.re, phase.cos() / 8.0, epsilon = 1e-13);
            assert_abs_diff_eq!(z.im, phase.sin() / 8.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_variance_path_has_zero_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = PathProfile::new(vec![0.0, 1.0]).unwrap();
        for _ in 0..100 {
            let g = sample_path_gains(&p, &mut rng);
            assert_eq!(g.alphas[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn unit_path_power_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = PathProfile::new(vec![1.0]).unwrap();
        let n = 100_000;
        let m: f64 = (0..n)
            .map(|_| sample_path_gains(&p, &mut rng).alphas[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((m - 1.0).abs() < 0.02, "E|α|² = {m}");
    }

    #[test]
    fn per_path_variances_match_profile() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let powers = vec![0.4, 0.3, 0.3];
        let p = PathProfile::new(powers.clone()).unwrap();
        let n = 100_000;
        let mut sum = [0.0; 3];
        let mut sum_sq = [0.0; 3];
        for _ in 0..n {
            let g = sample_path_gains(&p, &mut rng);
            for (l, a) in g.alphas.iter().enumerate() {
                let e = a.norm_sqr();
                sum[l] += e;
                sum_sq[l] += e * e;
            }
        }
        for l in 0..3 {
            let mean = sum[l] / n as f64;
            let var = sum_sq[l] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!((mean - powers[l]).abs() < 3.0 * se, "path {l}: {mean} vs {}", powers[l]);
        }
    }

    #[test]
    fn profile_validation() {
        assert!(PathProfile::new(vec![0.5, 0.4]).is_err());
        assert!(PathProfile::new(vec![1.2, -0.2]).is_err());
        assert!(PathProfile::new(vec![]).is_err());
        assert!(PathProfile::new(vec![0.0, 0.5, 0.5]).is_ok());
    }

    #[test]
    fn single_unit_path_frobenius_norm() {
        let cfg = ArrayConfig::new(8, 4).unwrap();
        let angles = PathAngles { aods: vec![0.7], aoas: vec![2.1] };
        let gains = PathGains { alphas: vec![Complex64::new(1.0, 0.0)] };
        let h = synthesize_channel(cfg, &angles, &gains).unwrap();
        assert_abs_diff_eq!(h.frobenius_norm_sqr(), 32.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_gains_give_zero_matrix() {
        let cfg = ArrayConfig::new(4, 4).unwrap();
        let angles = PathAngles { aods: vec![0.3, 1.0], aoas: vec![2.0, 0.5] };
        let gains = PathGains { alphas: vec![Complex64::new(0.0, 0.0); 2] };
        let h = synthesize_channel(cfg, &angles, &gains).unwrap();
        assert_eq!(h.frobenius_norm_sqr(), 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let cfg = ArrayConfig::new(4, 4).unwrap();
        let angles = PathAngles { aods: vec![0.3], aoas: vec![2.0] };
        let gains = PathGains { alphas: vec![Complex64::new(1.0, 0.0); 2] };
        assert!(synthesize_channel(cfg, &angles, &gains).is_err());
    }

    #[test]
    fn three_paths_match_naive_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = ArrayConfig::new(6, 5).unwrap();
        let angles = PathAngles {
            aods: vec![1.1, 0.4, 2.7],
            aoas: vec![1.9, 2.2, 0.2],
        };
        let gains = sample_path_gains(&PathProfile::new(vec![0.4, 0.3, 0.3]).unwrap(), &mut rng);
        let h = synthesize_channel(cfg, &angles, &gains).unwrap();
        let scale = (30.0f64).sqrt();
        for r in 0..5 {
            for c in 0..6 {
                let mut want = Complex64::new(0.0, 0.0);
                for l in 0..3 {
                    let ar = Complex64::from_polar(1.0 / 5f64.sqrt(), -PI * r as f64 * angles.aoas[l].cos());
                    let at = Complex64::from_polar(1.0 / 6f64.sqrt(), -PI * c as f64 * angles.aods[l].cos());
                    want += gains.alphas[l] * ar * at.conj();
                }
                want *= scale;
                assert_abs_diff_eq!(h.get(r, c).re, want.re, epsilon = 1e-12);
                assert_abs_diff_eq!(h.get(r, c).im, want.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn average_channel_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = ArrayConfig::new(4, 4).unwrap();
        let angles = PathAngles { aods: vec![1.1, 0.4, 2.7], aoas: vec![1.9, 2.2, 0.2] };
        let p = PathProfile::new(vec![0.4, 0.3, 0.3]).unwrap();
        let n = 20_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                let g = sample_path_gains(&p, &mut rng);
                synthesize_channel(cfg, &angles, &g).unwrap().frobenius_norm_sqr()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - 16.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    proptest::proptest! {
        #[test]
        fn steering_vectors_have_unit_norm(n in 1usize..128, angle in 0.0..PI) {
            proptest::prop_assert!((norm(&steering_vector(n, angle)) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn channel_is_linear_in_gains(
            a in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 3),
            b in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 3),
        ) {
            let cfg = ArrayConfig::new(5, 3).unwrap();
            let angles = PathAngles { aods: vec![0.2, 1.5, 2.9], aoas: vec![1.0, 0.1, 2.2] };
            let ga = PathGains { alphas: a.iter().map(|&(r, i)| Complex64::new(r, i)).collect() };
            let gb = PathGains { alphas: b.iter().map(|&(r, i)| Complex64::new(r, i)).collect() };
            let gs = PathGains { alphas: ga.alphas.iter().zip(&gb.alphas).map(|(x, y)| x + y).collect() };
            let ha = synthesize_channel(cfg, &angles, &ga).unwrap();
            let hb = synthesize_channel(cfg, &angles, &gb).unwrap();
            let hs = synthesize_channel(cfg, &angles, &gs).unwrap();
            for r in 0..3 {
                for c in 0..5 {
                    proptest::prop_assert!((hs.get(r, c) - ha.get(r, c) - hb.get(r, c)).norm() < 1e-12);
                }
            }
        }
    }
}
