//! Steering-vector codebooks on an inverse-cosine angle grid.
//!
//! Beam `p` (1-based) points at `arccos(1 − 2(p−1)/(M−1))`, so the grid is
//! uniform in `cos(angle)`: sparse toward endfire where ULA beams are wide,
//! dense around broadside where they are narrow.

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::steering_vector_from_cos;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook {
    grid_angles: Vec<f64>,
    #[serde(skip)]
    grid_cosines: Vec<f64>,
    n: usize,
}

/// Grid of `m ≥ 2` beams for an `n`-element array. Endpoints are exactly
/// `0` and `π`.
pub fn build_codebook(m: usize, n: usize) -> Result<Codebook> {
    if m < 2 {
        return Err(Error::param("codebook size", format!("need at least 2 beams, got {m}")));
    }
    if n == 0 {
        return Err(Error::param("antenna count", "must be at least 1"));
    }
    let step = 2.0 / (m - 1) as f64;
    let grid_cosines: Vec<f64> = (0..m)
        .map(|i| match i {
            0 => 1.0,
            _ if i == m - 1 => -1.0,
            _ => 1.0 - step * i as f64,
        })
        .collect();
    let grid_angles = grid_cosines.iter().map(|c| c.acos()).collect();
    Ok(Codebook {
        grid_angles,
        grid_cosines,
        n,
    })
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.grid_angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid_angles.is_empty()
    }

    pub fn antennas(&self) -> usize {
        self.n
    }

    pub fn grid_angles(&self) -> &[f64] {
        &self.grid_angles
    }

    /// `cos` of each grid angle, taken straight from the grid formula.
    pub fn grid_cosines(&self) -> &[f64] {
        &self.grid_cosines
    }

    /// Grid angle of 1-based beam `index`.
    pub fn angle(&self, index: usize) -> Result<f64> {
        self.check(index)?;
        Ok(self.grid_angles[index - 1])
    }

    /// Steering vector of 1-based beam `index`.
    pub fn beam_vector(&self, index: usize) -> Result<Vec<Complex64>> {
        self.check(index)?;
        Ok(steering_vector_from_cos(self.n, self.grid_cosines[index - 1]))
    }

    /// All beams, in index order.
    pub fn beams(&self) -> Vec<Vec<Complex64>> {
        self.grid_cosines
            .iter()
            .map(|&c| steering_vector_from_cos(self.n, c))
            .collect()
    }

    fn check(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.len() {
            return Err(Error::BeamIndexOutOfRange {
                index,
                max: self.len(),
            });
        }
        Ok(())
    }
}
