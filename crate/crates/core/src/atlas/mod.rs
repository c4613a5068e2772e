//! Parameter sweeps, feature classification, drive-series expansion and
//! verification suites: the engine behind the `blockade` command line.

mod config;
mod output;
mod sweep;
mod verify;

pub use config::{
    Axis, Cut, EngineConfig, EngineKind, FieldKind, Frequencies, Homodyne, ObservableSpec, Scale,
    SweepConfig, MAX_AXES, MAX_ORDER,
};
pub use output::{sweep_columns, write_expansion, write_features, write_sweep, Written, VERSION};
pub use sweep::{
    analytic_value, classify_features, evaluate_cell, from_moments, grid, laser_amplitude,
    recursive_moments, run_sweep, threads_from_env, wavefunction_moments, AxisGrid, Cell,
    CellStatus, SweepResult, REFERENCE_DRIVE, THREADS_ENV, TOP_LEVEL_LIMIT,
};
pub use verify::{
    dst_g2, grid_minimum, polariton_limit_grid, random_ao, random_jc, random_pol, verify, CheckResult, Suite,
    VerifyReport, IDENTITY_TOL, LIOUVILLIAN_DRAWS, LIOUVILLIAN_DRIVE, ORACLE_DRAWS, ORACLE_TOL,
};

use crate::analytic::FeatureCondition;
use crate::error::{Error, Result};
use crate::steady::{series_expand, SeriesFit};

/// Feature curves for the `[window]` of a config.
pub fn run_features(config: &SweepConfig) -> Result<Vec<FeatureCondition>> {
    let window = config
        .window
        .as_ref()
        .ok_or_else(|| Error::Config("features need a [window] table".into()))?;
    if !config.system.has_cavity() {
        return Err(Error::Config(format!(
            "feature classification needs a cavity model, got {}",
            config.system.name()
        )));
    }
    Ok(classify_features(&config.system, window))
}

/// Drive-series fit for the `[expand]` table of a config.
pub fn run_expand(config: &SweepConfig) -> Result<SeriesFit> {
    let request = config
        .expand
        .as_ref()
        .ok_or_else(|| Error::Config("expand needs an [expand] table".into()))?;
    series_expand(&config.system, request)
}
