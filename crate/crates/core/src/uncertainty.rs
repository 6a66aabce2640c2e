//! Decentralized noisy position information.
//!
//! TX and RX each hold their own estimate of every node position. Each
//! side's error on node `u` is uniform over a disk of radius `r_u` (a
//! different radius per side), independent across nodes. The TX position is
//! known exactly by both.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{Point2, PositionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Tx,
    Rx,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Tx => Side::Rx,
            Side::Rx => Side::Tx,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Tx => "tx",
            Side::Rx => "rx",
        }
    }
}

/// A position-error distribution known to both sides.
///
/// `sample_errors` returns one additive error per position-matrix column,
/// as estimated by `side`.
pub trait PositionErrorModel {
    fn num_columns(&self) -> usize;

    fn sample_errors<R: Rng + ?Sized>(&self, side: Side, rng: &mut R) -> Vec<Point2>;
}

/// Uniform-disk error radii, one per column `[TX, R_1, …, R_{L-1}, RX]`,
/// for each side's view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    radii_tx: Vec<f64>,
    radii_rx: Vec<f64>,
}

impl ErrorModel {
    pub fn new(radii_tx: Vec<f64>, radii_rx: Vec<f64>) -> Result<Self> {
        if radii_tx.len() != radii_rx.len() {
            return Err(Error::DimensionMismatch {
                context: "errors.radii_rx vs errors.radii_tx",
                expected: radii_tx.len(),
                actual: radii_rx.len(),
            });
        }
        if radii_tx.len() < 2 {
            return Err(Error::param(
                "errors.radii_tx",
                "need one radius per node column (at least TX and RX)",
            ));
        }
        for (name, radii) in [("radii_tx", &radii_tx), ("radii_rx", &radii_rx)] {
            for (i, r) in radii.iter().enumerate() {
                if !r.is_finite() || *r < 0.0 {
                    return Err(Error::param(
                        format!("errors.{name}[{i}]"),
                        format!("radius must be finite and non-negative, got {r}"),
                    ));
                }
            }
            if radii[0] != 0.0 {
                return Err(Error::param(
                    format!("errors.{name}[0]"),
                    "the TX position is known exactly; its radius must be 0",
                ));
            }
        }
        Ok(ErrorModel { radii_tx, radii_rx })
    }

    /// Perfect information everywhere.
    pub fn zeros(num_columns: usize) -> Self {
        ErrorModel {
            radii_tx: vec![0.0; num_columns],
            radii_rx: vec![0.0; num_columns],
        }
    }

    /// Radii (TX view, RX view) listed for RX, then each reflector, in
    /// that order; the TX entry is implied to be zero.
    pub fn from_node_list(rx: (f64, f64), reflectors: &[(f64, f64)]) -> Result<Self> {
        let mut radii_tx = vec![0.0];
        let mut radii_rx = vec![0.0];
        for &(t, r) in reflectors {
            radii_tx.push(t);
            radii_rx.push(r);
        }
        radii_tx.push(rx.0);
        radii_rx.push(rx.1);
        ErrorModel::new(radii_tx, radii_rx)
    }

    pub fn radii(&self, side: Side) -> &[f64] {
        match side {
            Side::Tx => &self.radii_tx,
            Side::Rx => &self.radii_rx,
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.radii_tx.iter().chain(&self.radii_rx).all(|&r| r == 0.0)
    }
}

impl PositionErrorModel for ErrorModel {
    fn num_columns(&self) -> usize {
        self.radii_tx.len()
    }

    fn sample_errors<R: Rng + ?Sized>(&self, side: Side, rng: &mut R) -> Vec<Point2> {
        self.radii(side).iter().map(|&r| sample_disk(r, rng)).collect()
    }
}

/// Uniform point in the closed disk of `radius` around the origin, by
/// inverse CDF in polar coordinates. Always consumes exactly two uniforms.
pub fn sample_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point2 {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    if radius == 0.0 {
        return Point2::ORIGIN;
    }
    let rho = radius * u.sqrt();
    let (s, c) = (TAU * v).sin_cos();
    Point2::new(rho * c, rho * s)
}

/// One side's estimate of the position matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisyView {
    pub positions: PositionMatrix,
    pub side: Side,
}

fn check_shape<E: PositionErrorModel + ?Sized>(pos: &PositionMatrix, model: &E) -> Result<()> {
    if model.num_columns() != pos.num_columns() {
        return Err(Error::DimensionMismatch {
            context: "error model columns vs position matrix",
            expected: pos.num_columns(),
            actual: model.num_columns(),
        });
    }
    Ok(())
}

/// `P̂ = P + E` with `E` drawn from `side`'s error distribution.
pub fn make_noisy_view<E, R>(
    true_pos: &PositionMatrix,
    model: &E,
    side: Side,
    rng: &mut R,
) -> Result<NoisyView>
where
    E: PositionErrorModel + ?Sized,
    R: Rng + ?Sized,
{
    check_shape(true_pos, model)?;
    let errors = model.sample_errors(side, rng);
    Ok(NoisyView {
        positions: true_pos.offset_by(&errors)?,
        side,
    })
}

/// A plausible true position matrix given `view`: the view minus a fresh
/// error from the viewing side's own distribution.
pub fn sample_conditional_truth<E, R>(view: &NoisyView, model: &E, rng: &mut R) -> Result<PositionMatrix>
where
    E: PositionErrorModel + ?Sized,
    R: Rng + ?Sized,
{
    check_shape(&view.positions, model)?;
    let errors: Vec<Point2> = model
        .sample_errors(view.side, rng)
        .into_iter()
        .map(|e| Point2::ORIGIN - e)
        .collect();
    view.positions.offset_by(&errors)
}

/// What `other_side` might see if `hypothetical_truth` were the truth.
pub fn sample_other_side_view<E, R>(
    hypothetical_truth: &PositionMatrix,
    other_side: Side,
    model: &E,
    rng: &mut R,
) -> Result<NoisyView>
where
    E: PositionErrorModel + ?Sized,
    R: Rng + ?Sized,
{
    make_noisy_view(hypothetical_truth, model, other_side, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn truth() -> PositionMatrix {
        PositionMatrix::new(
            Point2::ORIGIN,
            vec![Point2::new(50.0, 40.0), Point2::new(45.0, -30.0)],
            Point2::new(100.0, 0.0),
        )
        .unwrap()
    }

    fn params_a() -> ErrorModel {
        ErrorModel::from_node_list((13.0, 7.0), &[(11.0, 18.0), (15.0, 17.0)]).unwrap()
    }

    #[test]
    fn zero_radius_disk_is_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sample_disk(0.0, &mut rng), Point2::ORIGIN);
        }
    }

    #[test]
    fn disk_mean_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let mean = (0..n).map(|_| sample_disk(1.0, &mut rng).norm()).sum::<f64>() / n as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn disk_samples_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            assert!(sample_disk(13.0, &mut rng).norm() <= 13.0);
        }
    }

    #[test]
    fn inner_half_radius_holds_a_quarter_of_the_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let inside = (0..n).filter(|_| sample_disk(2.0, &mut rng).norm() <= 1.0).count();
        let frac = inside as f64 / n as f64;
        let se = (0.25 * 0.75 / n as f64).sqrt();
        assert!((frac - 0.25).abs() < 3.0 * se, "{frac}");
    }

    #[test]
    fn zero_radii_view_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = ErrorModel::zeros(4);
        for side in [Side::Tx, Side::Rx] {
            let v = make_noisy_view(&truth(), &m, side, &mut rng).unwrap();
            assert_eq!(v.positions, truth());
            assert_eq!(sample_conditional_truth(&v, &m, &mut rng).unwrap(), truth());
            assert_eq!(
                sample_other_side_view(&truth(), side.other(), &m, &mut rng).unwrap().positions,
                truth()
            );
        }
    }

    #[test]
    fn views_stay_within_radii_and_keep_tx() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = params_a();
        for _ in 0..2_000 {
            for side in [Side::Tx, Side::Rx] {
                let v = make_noisy_view(&truth(), &m, side, &mut rng).unwrap();
                assert_eq!(v.positions.tx(), truth().tx());
                for ((est, real), r) in v.positions.columns().zip(truth().columns()).zip(m.radii(side)) {
                    assert!(est.distance(&real) <= r + 1e-9);
                }
            }
        }
    }

    #[test]
    fn conditional_truth_stays_near_view() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = params_a();
        let view = make_noisy_view(&truth(), &m, Side::Rx, &mut rng).unwrap();
        for _ in 0..1_000 {
            let t = sample_conditional_truth(&view, &m, &mut rng).unwrap();
            for ((a, b), r) in t.columns().zip(view.positions.columns()).zip(m.radii(Side::Rx)) {
                assert!(a.distance(&b) <= r + 1e-9);
            }
            let other = sample_other_side_view(&t, Side::Tx, &m, &mut rng).unwrap();
            assert_eq!(other.side, Side::Tx);
            for ((a, b), r) in other.positions.columns().zip(t.columns()).zip(m.radii(Side::Tx)) {
                assert!(a.distance(&b) <= r + 1e-9);
            }
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let m = params_a();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let v = make_noisy_view(&truth(), &m, Side::Tx, &mut rng).unwrap();
            let t = sample_conditional_truth(&v, &m, &mut rng).unwrap();
            let o = sample_other_side_view(&t, Side::Rx, &m, &mut rng).unwrap();
            (v, t, o)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(ErrorModel::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(ErrorModel::new(vec![0.0, -1.0], vec![0.0, 1.0]).is_err());
        assert!(ErrorModel::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        let err = ErrorModel::new(vec![0.0, 2.0], vec![0.0, f64::NAN]).unwrap_err();
        assert!(err.to_string().contains("errors.radii_rx[1]"), "{err}");
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(make_noisy_view(&truth(), &ErrorModel::zeros(3), Side::Tx, &mut rng).is_err());
    }

    #[test]
    fn conditional_error_matches_forward_error_distribution() {
        // For zero-mean symmetric disk noise, view − conditional truth has the
        // same distribution as the forward error: compare second moments and
        // the mass inside half the radius.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = ErrorModel::from_node_list((10.0, 4.0), &[]).unwrap();
        let pos = PositionMatrix::new(Point2::ORIGIN, vec![], Point2::new(100.0, 0.0)).unwrap();
        let view = NoisyView { positions: pos.clone(), side: Side::Tx };
        let n = 50_000;
        let mut mx = 0.0;
        let mut inner = 0usize;
        for _ in 0..n {
            let t = sample_conditional_truth(&view, &m, &mut rng).unwrap();
            let d = pos.rx() - t.rx();
            mx += d.x;
            if d.norm() <= 5.0 {
                inner += 1;
            }
        }
        assert!((mx / n as f64).abs() < 3.0 * (25.0f64 / n as f64).sqrt());
        let frac = inner as f64 / n as f64;
        assert!((frac - 0.25).abs() < 3.0 * (0.1875f64 / n as f64).sqrt(), "{frac}");
    }
}
