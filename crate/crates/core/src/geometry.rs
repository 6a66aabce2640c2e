//! Node positions and the angles of departure/arrival they imply.
//!
//! Both arrays are uniform linear arrays laid out along the vertical (`y`)
//! axis. Every angle is measured from north (`+y`) toward south (`-y`), so
//! it lives in `[0, π]`: `0` points straight up the array axis (endfire),
//! `π/2` is broadside. A ULA cannot distinguish a direction from its mirror
//! image about its own axis, which is why the sign of the horizontal offset
//! is discarded. In the default layout the link runs east–west, so the
//! line-of-sight path sits near broadside where beams are narrowest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (*self - *other).norm()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2 { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Positions of every node that defines a propagation path.
///
/// Column order is `[TX, R_1, …, R_{L-1}, RX]`: path 0 is the direct
/// (line-of-sight) link, path `i ≥ 1` bounces off reflector `R_i`, which is
/// treated as a point scatterer defining both its departure and arrival
/// angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPositions", into = "RawPositions")]
pub struct PositionMatrix {
    tx: Point2,
    reflectors: Vec<Point2>,
    rx: Point2,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPositions {
    tx: Point2,
    #[serde(default)]
    reflectors: Vec<Point2>,
    rx: Point2,
}

impl TryFrom<RawPositions> for PositionMatrix {
    type Error = Error;
    fn try_from(raw: RawPositions) -> Result<Self> {
        PositionMatrix::new(raw.tx, raw.reflectors, raw.rx)
    }
}

impl From<PositionMatrix> for RawPositions {
    fn from(p: PositionMatrix) -> Self {
        RawPositions {
            tx: p.tx,
            reflectors: p.reflectors,
            rx: p.rx,
        }
    }
}

impl PositionMatrix {
    pub fn new(tx: Point2, reflectors: Vec<Point2>, rx: Point2) -> Result<Self> {
        let pos = PositionMatrix { tx, reflectors, rx };
        pos.validate()?;
        Ok(pos)
    }

    /// Builds from columns in `[TX, R_1, …, RX]` order.
    pub fn from_columns(columns: &[Point2]) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::InvalidPositions(format!(
                "need at least TX and RX columns, got {}",
                columns.len()
            )));
        }
        let n = columns.len();
        PositionMatrix::new(columns[0], columns[1..n - 1].to_vec(), columns[n - 1])
    }

    fn validate(&self) -> Result<()> {
        for (i, c) in self.columns().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidPositions(format!(
                    "column {i} is not finite: ({}, {})",
                    c.x, c.y
                )));
            }
        }
        if self.tx == self.rx {
            return Err(Error::InvalidPositions("TX and RX coincide".into()));
        }
        for (i, r) in self.reflectors.iter().enumerate() {
            if *r == self.tx || *r == self.rx {
                return Err(Error::InvalidPositions(format!(
                    "reflector R_{} coincides with an endpoint",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn tx(&self) -> Point2 {
        self.tx
    }

    pub fn rx(&self) -> Point2 {
        self.rx
    }

    pub fn reflectors(&self) -> &[Point2] {
        &self.reflectors
    }

    /// Number of propagation paths `L` (one more than the reflector count).
    pub fn num_paths(&self) -> usize {
        self.reflectors.len() + 1
    }

    /// Number of columns `L + 1`.
    pub fn num_columns(&self) -> usize {
        self.reflectors.len() + 2
    }

    pub fn columns(&self) -> impl Iterator<Item = Point2> + '_ {
        std::iter::once(self.tx)
            .chain(self.reflectors.iter().copied())
            .chain(std::iter::once(self.rx))
    }

    /// Adds one offset per column. Fails only if the result is degenerate.
    pub fn offset_by(&self, offsets: &[Point2]) -> Result<Self> {
        if offsets.len() != self.num_columns() {
            return Err(Error::DimensionMismatch {
                context: "position offsets",
                expected: self.num_columns(),
                actual: offsets.len(),
            });
        }
        let cols: Vec<Point2> = self
            .columns()
            .zip(offsets)
            .map(|(c, o)| c + *o)
            .collect();
        PositionMatrix::from_columns(&cols)
    }

    pub fn translated(&self, by: Point2) -> Result<Self> {
        self.offset_by(&vec![by; self.num_columns()])
    }
}

/// Departure and arrival angle of every path, LoS first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathAngles {
    pub aods: Vec<f64>,
    pub aoas: Vec<f64>,
}

impl PathAngles {
    pub fn num_paths(&self) -> usize {
        self.aods.len()
    }
}

/// Angle in `[0, π]` between the segment `q → p` and the northward
/// vertical through `q`.
pub fn angle_to_vertical(p: Point2, q: Point2) -> Result<f64> {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::CoincidentPoints { x: p.x, y: p.y });
    }
    Ok(dx.atan2(dy).abs())
}

/// AoDs are seen from the TX toward RX and each reflector; AoAs from the RX
/// toward TX and each reflector.
pub fn path_angles(pos: &PositionMatrix) -> Result<PathAngles> {
    let mut aods = Vec::with_capacity(pos.num_paths());
    let mut aoas = Vec::with_capacity(pos.num_paths());
    aods.push(angle_to_vertical(pos.rx, pos.tx)?);
    aoas.push(angle_to_vertical(pos.tx, pos.rx)?);
    for r in &pos.reflectors {
        aods.push(angle_to_vertical(*r, pos.tx)?);
        aoas.push(angle_to_vertical(*r, pos.rx)?);
    }
    Ok(PathAngles { aods, aoas })
}
