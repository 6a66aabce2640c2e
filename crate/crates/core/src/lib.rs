//! Location-aided beam pre-selection for mmWave links when the two ends hold
//! different, noisy views of the propagation geometry.
//!
//! The pipeline runs positions → angles → gain matrix → beam selection →
//! achievable rate. [`evaluation`] drives Monte-Carlo experiments over it and
//! [`cli`] exposes them on the command line.

pub mod channel;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod evaluation;
pub mod gain;
pub mod geometry;
pub mod scenario;
pub mod strategies;
pub mod uncertainty;
pub mod validate;

pub use channel::{ArrayConfig, ChannelMatrix, PathGains, PathProfile};
pub use codebook::{build_codebook, Codebook};
pub use error::{Error, Result};
pub use evaluation::{
    achieved_rate, run_experiment, run_experiments, snapshot_beams, ExperimentResult,
    ExperimentRun, Snapshot, Sweep,
};
pub use gain::{fejer_gain, gain_matrix, monte_carlo_gain, GainMatrix, GainModel};
pub use geometry::{angle_to_vertical, path_angles, PathAngles, Point2, PositionMatrix};
pub use scenario::{load_scenario, write_scenario, NamedParameterSet, Scenario};
pub use strategies::{BeamSelection, Strategy, StrategyConfig};
pub use uncertainty::{ErrorModel, NoisyView, PositionErrorModel, Side};
