//! Scenario files.
//!
//! A scenario is one JSON object. Every field is optional; missing fields
//! fall back to the built-in parameter set named by `parameter_set`
//! (`params-A` when absent) and to the defaults below.
//!
//! ```json
//! {
//!   "parameter_set": "params-A",
//!   "positions": { "tx": [0, 0], "reflectors": [[50, 40], [45, -30]], "rx": [100, 0] },
//!   "profile": [0.4, 0.3, 0.3],
//!   "arrays": { "n_tx": 64, "n_rx": 64 },
//!   "codebook": { "m_tx": 64, "m_rx": 64 },
//!   "errors": { "radii_tx": [0, 11, 15, 13], "radii_rx": [0, 18, 17, 7] },
//!   "strategy": { "d_tx": 4, "d_rx": 4, "mc_iterations": 1000, "seed": 0 },
//!   "snr_db": 10,
//!   "sweep": "snr:-10:30:5"
//! }
//! ```
//!
//! Radii are listed per position-matrix column, `[TX, R_1, …, RX]`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::channel::{ArrayConfig, PathProfile};
use crate::codebook::{build_codebook, Codebook};
use crate::error::{Error, Result};
use crate::evaluation::Sweep;
use crate::geometry::{Point2, PositionMatrix};
use crate::strategies::StrategyConfig;
use crate::uncertainty::ErrorModel;

pub const DEFAULT_ANTENNAS: usize = 64;
pub const DEFAULT_BEAMS: usize = 64;
pub const DEFAULT_BUDGET: usize = 4;
pub const DEFAULT_SNR_DB: f64 = 10.0;
pub const DEFAULT_SWEEP: &str = "snr:-10:30:5";

/// TX at the origin, RX 100 m east, one reflector above and one below the
/// line of sight. The reflector coordinates are this crate's choice.
pub fn default_positions() -> PositionMatrix {
    PositionMatrix::new(
        Point2::ORIGIN,
        vec![Point2::new(50.0, 40.0), Point2::new(45.0, -30.0)],
        Point2::new(100.0, 0.0),
    )
    .expect("default geometry is valid")
}

/// A named bundle of error radii and path powers for the default geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedParameterSet {
    pub name: &'static str,
    pub errors: ErrorModel,
    pub profile: PathProfile,
}

impl NamedParameterSet {
    /// Strong line of sight; the TX knows the RX worse than the RX knows
    /// itself, but knows the reflectors better.
    pub fn params_a() -> Self {
        NamedParameterSet {
            name: "params-A",
            errors: ErrorModel::from_node_list((13.0, 7.0), &[(11.0, 18.0), (15.0, 17.0)])
                .expect("valid radii"),
            profile: PathProfile::new(vec![0.4, 0.3, 0.3]).expect("valid profile"),
        }
    }

    /// Blocked line of sight, two equal-power reflections, tighter radii.
    pub fn params_b() -> Self {
        NamedParameterSet {
            name: "params-B",
            errors: ErrorModel::from_node_list((7.0, 3.0), &[(8.0, 11.0), (18.0, 8.0)])
                .expect("valid radii"),
            profile: PathProfile::new(vec![0.0, 0.5, 0.5]).expect("valid profile"),
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "params-a" | "a" => Some(Self::params_a()),
            "params-b" | "b" => Some(Self::params_b()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub positions: PositionMatrix,
    pub profile: PathProfile,
    pub arrays: ArrayConfig,
    pub m_tx: usize,
    pub m_rx: usize,
    pub errors: ErrorModel,
    pub strategy: StrategyConfig,
    pub snr_db: f64,
    pub sweep: Sweep,
}

impl Default for Scenario {
    /// The `params-A` setting on the default geometry.
    fn default() -> Self {
        Scenario::from_parameter_set(NamedParameterSet::params_a())
    }
}

impl Scenario {
    pub fn from_parameter_set(set: NamedParameterSet) -> Self {
        Scenario {
            positions: default_positions(),
            profile: set.profile,
            arrays: ArrayConfig { n_tx: DEFAULT_ANTENNAS, n_rx: DEFAULT_ANTENNAS },
            m_tx: DEFAULT_BEAMS,
            m_rx: DEFAULT_BEAMS,
            errors: set.errors,
            strategy: StrategyConfig::new(DEFAULT_BUDGET, DEFAULT_BUDGET),
            snr_db: DEFAULT_SNR_DB,
            sweep: DEFAULT_SWEEP.parse().expect("default sweep parses"),
        }
    }

    pub fn codebooks(&self) -> Result<(Codebook, Codebook)> {
        let tx = build_codebook(self.m_tx, self.arrays.n_tx)
            .map_err(|e| Error::param("codebook.m_tx", e.to_string()))?;
        let rx = build_codebook(self.m_rx, self.arrays.n_rx)
            .map_err(|e| Error::param("codebook.m_rx", e.to_string()))?;
        Ok((tx, rx))
    }

    /// Checks every cross-field invariant.
    pub fn validate(&self) -> Result<()> {
        ArrayConfig::new(self.arrays.n_tx, self.arrays.n_rx)?;
        self.codebooks()?;
        if self.profile.num_paths() != self.positions.num_paths() {
            return Err(Error::param(
                "profile",
                format!(
                    "{} path powers given for {} paths (1 + number of reflectors)",
                    self.profile.num_paths(),
                    self.positions.num_paths()
                ),
            ));
        }
        if self.errors.radii(crate::uncertainty::Side::Tx).len() != self.positions.num_columns() {
            return Err(Error::param(
                "errors",
                format!(
                    "need {} radii per side (TX, reflectors, RX), got {}",
                    self.positions.num_columns(),
                    self.errors.radii(crate::uncertainty::Side::Tx).len()
                ),
            ));
        }
        self.strategy.validate(self.m_tx, self.m_rx)?;
        if !self.snr_db.is_finite() {
            return Err(Error::param("snr_db", "must be finite"));
        }
        Ok(())
    }

    /// Fully explicit JSON: loading it back yields an equal scenario.
    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            parameter_set: None,
            positions: Some(PositionsFile {
                tx: self.positions.tx().into(),
                reflectors: self.positions.reflectors().iter().map(|&p| p.into()).collect(),
                rx: self.positions.rx().into(),
            }),
            profile: Some(self.profile.powers().to_vec()),
            arrays: Some(self.arrays),
            codebook: Some(CodebookFile { m_tx: self.m_tx, m_rx: self.m_rx }),
            errors: Some(self.errors.clone()),
            strategy: Some(self.strategy.clone()),
            snr_db: Some(self.snr_db),
            sweep: Some(self.sweep.to_string()),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    /// First 16 hex digits of the SHA-256 of [`Scenario::to_json`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        hex::encode(&digest[..8])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PositionsFile {
    tx: [f64; 2],
    #[serde(default)]
    reflectors: Vec<[f64; 2]>,
    rx: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookFile {
    m_tx: usize,
    m_rx: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ErrorsFile {
    radii_tx: Vec<f64>,
    radii_rx: Vec<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parameter_set: Option<String>,
    #[serde(default)]
    positions: Option<PositionsFile>,
    #[serde(default)]
    profile: Option<Vec<f64>>,
    #[serde(default)]
    arrays: Option<ArrayConfig>,
    #[serde(default)]
    codebook: Option<CodebookFile>,
    #[serde(default, with = "errors_field")]
    errors: Option<ErrorModel>,
    #[serde(default)]
    strategy: Option<StrategyConfig>,
    #[serde(default)]
    snr_db: Option<f64>,
    #[serde(default)]
    sweep: Option<String>,
}

/// Radii go through [`ErrorModel::new`] so violations name their field.
mod errors_field {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<ErrorModel>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|m| ErrorsFile {
                radii_tx: m.radii(crate::uncertainty::Side::Tx).to_vec(),
                radii_rx: m.radii(crate::uncertainty::Side::Rx).to_vec(),
            })
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<ErrorModel>, D::Error> {
        let raw: Option<ErrorsFile> = Option::deserialize(d)?;
        raw.map(|f| ErrorModel::new(f.radii_tx, f.radii_rx).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario> {
        let set = match &self.parameter_set {
            None => NamedParameterSet::params_a(),
            Some(name) => NamedParameterSet::builtin(name).ok_or_else(|| {
                Error::param(
                    "parameter_set",
                    format!("unknown parameter set `{name}` (expected params-A or params-B)"),
                )
            })?,
        };
        let mut s = Scenario::from_parameter_set(set);

        if let Some(p) = self.positions {
            let reflectors = p.reflectors.into_iter().map(Point2::from).collect();
            s.positions = PositionMatrix::new(p.tx.into(), reflectors, p.rx.into())
                .map_err(|e| Error::param("positions", e.to_string()))?;
        }
        if let Some(powers) = self.profile {
            s.profile = PathProfile::new(powers)?;
        }
        if let Some(a) = self.arrays {
            s.arrays = ArrayConfig::new(a.n_tx, a.n_rx)?;
        }
        if let Some(c) = self.codebook {
            s.m_tx = c.m_tx;
            s.m_rx = c.m_rx;
        }
        if let Some(e) = self.errors {
            s.errors = e;
        }
        if let Some(cfg) = self.strategy {
            s.strategy = cfg;
        }
        if let Some(snr) = self.snr_db {
            s.snr_db = snr;
        }
        if let Some(sweep) = self.sweep {
            s.sweep = sweep
                .parse()
                .map_err(|e: Error| Error::param("sweep", e.to_string()))?;
        }
        s.validate()?;
        Ok(s)
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json(&text)
}

pub fn write_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scenario.to_json()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
