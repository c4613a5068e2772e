//! CSV and JSON sidecar writers.
//!
//! Every writer is a pure function of its input: no timestamps or host
//! details are recorded, so identical inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::SweepConfig;
use super::sweep::SweepResult;
use crate::analytic::{FeatureCondition, FeatureWindow, Locus};
use crate::error::{Error, Result};
use crate::fockspace::SystemParams;
use crate::steady::{SeriesFit, SeriesRequest};

/// Crate version recorded in every sidecar.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Paths of a written CSV and its sidecar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Written {
    pub csv: PathBuf,
    pub meta: PathBuf,
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn paths(dir: &Path, stem: &str) -> Result<Written> {
    fs::create_dir_all(dir).map_err(io)?;
    Ok(Written { csv: dir.join(format!("{stem}.csv")), meta: dir.join(format!("{stem}.meta.json")) })
}

fn write_meta(path: &Path, meta: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(meta).map_err(io)?;
    text.push('\n');
    fs::write(path, text).map_err(io)
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[derive(Serialize)]
struct AxisMeta<'a> {
    param: &'a str,
    scale: super::config::Scale,
    values: &'a [f64],
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    name: &'a str,
    kind: &'static str,
    version: &'static str,
    engine: &'static str,
    system: &'a SystemParams,
    mode: crate::fockspace::ModeSelector,
    columns: Vec<String>,
    axes: Vec<AxisMeta<'a>>,
    shape: &'a [usize],
    status_counts: std::collections::BTreeMap<&'static str, usize>,
    features: &'a [FeatureCondition],
    config: &'a SweepConfig,
}

/// CSV columns of a sweep: axis parameters, observables, status, detail.
pub fn sweep_columns(config: &SweepConfig) -> Vec<String> {
    config
        .axes
        .iter()
        .map(|a| a.param.clone())
        .chain(config.observables.iter().map(|o| o.to_string()))
        .chain(["status".to_string(), "detail".to_string()])
        .collect()
}

/// Writes `<name>.csv` and `<name>.meta.json` into `dir`.
pub fn write_sweep(result: &SweepResult, dir: &Path) -> Result<Written> {
    let cfg = &result.config;
    let out = paths(dir, &cfg.stem(None))?;
    let columns = sweep_columns(cfg);
    let mut w = csv::Writer::from_path(&out.csv).map_err(io)?;
    w.write_record(&columns).map_err(io)?;
    for cell in &result.cells {
        let row = cell
            .coords
            .iter()
            .chain(&cell.values)
            .map(|v| num(*v))
            .chain([cell.status.name().to_string(), cell.detail.clone()]);
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(io)?;
    let meta = SweepMeta {
        name: &cfg.name,
        kind: "sweep",
        version: VERSION,
        engine: cfg.engine.kind.name(),
        system: &cfg.system,
        mode: cfg.selector(),
        columns,
        axes: cfg
            .axes
            .iter()
            .zip(&result.axes)
            .map(|(a, g)| AxisMeta { param: &a.param, scale: a.scale, values: &g.values })
            .collect(),
        shape: &result.shape,
        status_counts: result.status_counts(),
        features: &result.features,
        config: cfg,
    };
    write_meta(&out.meta, &meta)?;
    Ok(out)
}

#[derive(Serialize)]
struct FeaturesMeta<'a> {
    name: &'a str,
    kind: &'static str,
    version: &'static str,
    system: &'a SystemParams,
    window: &'a FeatureWindow,
    features: &'a [FeatureCondition],
}

/// Writes `<name>.features.csv` (one row per polyline vertex or point) and
/// its sidecar.
pub fn write_features(
    config: &SweepConfig,
    window: &FeatureWindow,
    features: &[FeatureCondition],
    dir: &Path,
) -> Result<Written> {
    let out = paths(dir, &config.stem(Some("features")))?;
    let mut w = csv::Writer::from_path(&out.csv).map_err(io)?;
    w.write_record(["curve", "kind", "label", "exact", "omega_a", "omega_l"]).map_err(io)?;
    for (k, f) in features.iter().enumerate() {
        let points = match &f.locus {
            Locus::Curve { samples } => samples.clone(),
            Locus::Point { delta_a, delta_matter } => vec![window.point(*delta_a, *delta_matter)],
        };
        for p in points {
            w.write_record([
                k.to_string(),
                f.kind.label().to_string(),
                f.label.clone(),
                f.exact.to_string(),
                num(p[0]),
                num(p[1]),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    let meta = FeaturesMeta {
        name: &config.name,
        kind: "features",
        version: VERSION,
        system: &config.system,
        window,
        features,
    };
    write_meta(&out.meta, &meta)?;
    Ok(out)
}

#[derive(Serialize)]
struct ExpandMeta<'a> {
    name: &'a str,
    kind: &'static str,
    version: &'static str,
    system: &'a SystemParams,
    request: &'a SeriesRequest,
    fit: &'a SeriesFit,
}

/// Writes `<name>.expand.csv` (power, coefficient) and its sidecar with the
/// samples and fit diagnostics.
pub fn write_expansion(
    config: &SweepConfig,
    request: &SeriesRequest,
    fit: &SeriesFit,
    dir: &Path,
) -> Result<Written> {
    let out = paths(dir, &config.stem(Some("expand")))?;
    let mut w = csv::Writer::from_path(&out.csv).map_err(io)?;
    w.write_record(["power", "coefficient"]).map_err(io)?;
    for (p, c) in fit.powers.iter().zip(&fit.coefficients) {
        w.write_record([p.to_string(), num(*c)]).map_err(io)?;
    }
    w.flush().map_err(io)?;
    let meta = ExpandMeta {
        name: &config.name,
        kind: "expand",
        version: VERSION,
        system: &config.system,
        request,
        fit,
    };
    write_meta(&out.meta, &meta)?;
    Ok(out)
}
