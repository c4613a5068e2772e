//! Grid evaluation of observables with one of four engines.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EngineKind, FieldKind, Homodyne, ObservableSpec, SweepConfig};
use crate::analytic::{
    ao_decompose, ao_gn, ao_homodyne, ao_observables, jc_feature_conditions, jc_g2,
    jc_g2_decomposition, jc_populations, pol_feature_conditions, pol_g2, pol_g2_decomposition,
    rf_decompose, rf_gn_fluct, rf_homodyne_gn, rf_steady, FeatureCondition, FeatureWindow,
};
use crate::error::{Error, Result};
use crate::fockspace::{
    build_liouvillian, model_space, top_level_population, ModeSelector, SystemParams, C64,
};
use crate::mixer::{decompose_g2, decompose_g3, n_norm, shifted_moments, DecompositionG2};
use crate::steady::{
    low_drive_correlators, moment, steady_state, wavefunction_coefficients, FieldMoments,
};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "BLOCKADE_THREADS";

/// Population of the highest kept Fock level above which a Liouvillian cell
/// is flagged.
pub const TOP_LEVEL_LIMIT: f64 = 1e-6;

/// Drive, relative to the smallest decay rate, substituted for a zero
/// template drive by the vanishing-drive engines.
pub const REFERENCE_DRIVE: f64 = 1e-4;

/// Outcome of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    /// Every value is defined but the truncation may be too small.
    TruncationWarning,
    /// A normalizing moment vanished; the value is NaN.
    Undefined,
    /// The engine failed; values are NaN.
    Failed,
}

impl CellStatus {
    /// Kebab-case name used in the CSV.
    pub fn name(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::TruncationWarning => "truncation-warning",
            CellStatus::Undefined => "undefined",
            CellStatus::Failed => "failed",
        }
    }
}

/// Values of one cell in observable order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Axis values in axis order.
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    pub status: CellStatus,
    /// Raw moment of an undefined cell, error of a failed one, top-level
    /// population of a flagged one; empty otherwise.
    pub detail: String,
}

/// Sampled values of one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub param: String,
    pub values: Vec<f64>,
}

/// A completed sweep. Cells are in row-major order, the first axis outermost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub axes: Vec<AxisGrid>,
    pub shape: Vec<usize>,
    pub cells: Vec<Cell>,
    pub features: Vec<FeatureCondition>,
}

impl SweepResult {
    /// Number of cells with each status.
    pub fn status_counts(&self) -> std::collections::BTreeMap<&'static str, usize> {
        let mut m = std::collections::BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.status.name()).or_insert(0) += 1;
        }
        m
    }
}

/// Thread count from [`THREADS_ENV`], `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Cartesian product of the axis samples in row-major order.
pub fn grid(config: &SweepConfig) -> (Vec<AxisGrid>, Vec<Vec<f64>>) {
    let axes: Vec<AxisGrid> = config
        .axes
        .iter()
        .map(|a| AxisGrid { param: a.param.clone(), values: a.values() })
        .collect();
    let mut coords = vec![Vec::new()];
    for axis in &axes {
        coords = coords
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut next = c.clone();
                    next.push(*v);
                    next
                })
            })
            .collect();
    }
    (axes, coords)
}

/// Evaluates every cell of the grid in parallel.
///
/// A failing cell is flagged and the sweep continues. The thread count is
/// read from [`THREADS_ENV`].
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    if config.observables.is_empty() {
        return Err(Error::Config("a sweep needs at least one observable".into()));
    }
    if config.engine.kind == EngineKind::Analytic {
        check_analytic_support(config)?;
    }
    let (axes, coords) = grid(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads_from_env()?.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let cells = pool.install(|| coords.par_iter().map(|c| evaluate_cell(config, c)).collect());
    let features = match &config.window {
        Some(w) => classify_features(&config.system, w),
        None => Vec::new(),
    };
    Ok(SweepResult {
        config: config.clone(),
        shape: axes.iter().map(|a| a.values.len()).collect(),
        axes,
        cells,
        features,
    })
}

/// Conventional and unconventional features of a cavity model in a window
/// of the `(ω_a, ω_L)` plane. Single-mode models have none.
pub fn classify_features(system: &SystemParams, window: &FeatureWindow) -> Vec<FeatureCondition> {
    match system {
        SystemParams::Jc(p) => jc_feature_conditions(p, window),
        SystemParams::Pol(p) => pol_feature_conditions(p, window),
        SystemParams::Rf(_) | SystemParams::Ao(_) => Vec::new(),
    }
}

/// Evaluates one cell from its axis values.
pub fn evaluate_cell(config: &SweepConfig, coords: &[f64]) -> Cell {
    let n_obs = config.observables.len();
    let failed = |e: Error| Cell {
        coords: coords.to_vec(),
        values: vec![f64::NAN; n_obs],
        status: CellStatus::Failed,
        detail: e.to_string(),
    };
    let (system, homodyne) = match config.cell_params(coords) {
        Ok(x) => x,
        Err(e) => return failed(e),
    };
    let system = effective_drive(config, &system);
    let (results, top): (Vec<Result<f64>>, Option<f64>) = match config.engine.kind {
        EngineKind::Analytic => (
            config
                .observables
                .iter()
                .map(|o| analytic_value(&system, config.selector(), config.field, homodyne, *o))
                .collect(),
            None,
        ),
        kind => match numeric_moments(config, kind, &system, homodyne) {
            Ok((m, top)) => (config.observables.iter().map(|o| from_moments(*o, &m)).collect(), top),
            Err(e) => return failed(e),
        },
    };
    let mut cell = Cell { coords: coords.to_vec(), values: Vec::with_capacity(n_obs), status: CellStatus::Ok, detail: String::new() };
    for (obs, r) in config.observables.iter().zip(results) {
        match r {
            Ok(v) => cell.values.push(v),
            Err(e) => {
                cell.values.push(f64::NAN);
                let (status, detail) = match e {
                    Error::UndefinedCorrelation { moment } => {
                        (CellStatus::Undefined, format!("{obs}: normalizing moment {}", fmt_c64(moment)))
                    }
                    e => (CellStatus::Failed, format!("{obs}: {e}")),
                };
                if status > cell.status {
                    cell.status = status;
                    cell.detail = detail;
                }
            }
        }
    }
    if let Some(top) = top {
        if top > TOP_LEVEL_LIMIT && cell.status < CellStatus::TruncationWarning {
            cell.status = CellStatus::TruncationWarning;
            cell.detail = format!("top-level population {top:e}");
        }
    }
    cell
}

fn fmt_c64(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:e}", z.re)
    } else {
        format!("{:e}{:+e}i", z.re, z.im)
    }
}

fn effective_drive(config: &SweepConfig, system: &SystemParams) -> SystemParams {
    match config.engine.kind {
        EngineKind::Liouvillian => system.with_drive(config.engine.drive.unwrap_or(0.0)),
        _ if system.drive() > 0.0 => *system,
        _ => system.with_drive(REFERENCE_DRIVE * system.min_gamma()),
    }
}

/// Decay rate of the detected mode.
fn mode_gamma(system: &SystemParams, which: ModeSelector) -> f64 {
    match (*system, which) {
        (SystemParams::Rf(p), _) => p.gamma_s,
        (SystemParams::Ao(p), _) => p.gamma_b,
        (SystemParams::Jc(p), ModeSelector::Cavity) => p.gamma_a,
        (SystemParams::Jc(p), ModeSelector::Matter) => p.gamma_s,
        (SystemParams::Pol(p), ModeSelector::Cavity) => p.gamma_a,
        (SystemParams::Pol(p), ModeSelector::Matter) => p.gamma_b,
    }
}

/// Amplitude `β = −iFe^{iφ} Ω/γ` of the mixed-in laser.
pub fn laser_amplitude(system: &SystemParams, which: ModeSelector, h: &Homodyne) -> C64 {
    -C64::i() * C64::from_polar(h.f, h.phi) * (system.drive() / mode_gamma(system, which))
}

fn numeric_moments(
    config: &SweepConfig,
    kind: EngineKind,
    system: &SystemParams,
    homodyne: Option<Homodyne>,
) -> Result<(FieldMoments, Option<f64>)> {
    let which = config.selector();
    let order = config.max_order();
    let (mut m, top) = match kind {
        EngineKind::Recursive => (recursive_moments(system, which, order)?, None),
        EngineKind::Wavefunction => (wavefunction_moments(system, which, order)?, None),
        EngineKind::Liouvillian => {
            let trunc = config.engine.truncation();
            let space = model_space(system, trunc)?;
            let rho = steady_state(&build_liouvillian(system, trunc)?)?;
            let mode = space.mode(which)?;
            let mut m = FieldMoments::default();
            for p in 0..=order {
                for q in 0..=order {
                    m.insert(p, q, moment(&rho, mode, p as usize, q as usize));
                }
            }
            (m, Some(top_level_population(&rho, &space, system)))
        }
        EngineKind::Analytic => unreachable!("closed forms bypass moments"),
    };
    if let Some(h) = homodyne {
        m = shifted_moments(&m, -laser_amplitude(system, which, &h), order)?;
        m = scaled(&m, h.t);
    }
    if config.field == FieldKind::Fluctuation {
        let mean = m.require(0, 1)?;
        m = shifted_moments(&m, mean, order)?;
    }
    Ok((m, top))
}

fn scaled(m: &FieldMoments, t: f64) -> FieldMoments {
    let mut out = FieldMoments::default();
    for ((p, q), v) in m.iter() {
        out.insert(p, q, v * t.powi((p + q) as i32));
    }
    out
}

/// Leading-order moments `⟨d†^p d^q⟩`, `p, q ≤ order`, from the hierarchy.
pub fn recursive_moments(system: &SystemParams, which: ModeSelector, order: u32) -> Result<FieldMoments> {
    if which == ModeSelector::Cavity && !system.has_cavity() {
        return Err(Error::InvalidParameter { name: "mode", reason: "model has no cavity".into() });
    }
    let table = low_drive_correlators(system, (2 * order).max(2))?;
    let two_level = which == ModeSelector::Matter && system.matter_is_two_level();
    let mut m = FieldMoments::default();
    for p in 0..=order {
        for q in 0..=order {
            let v = if two_level && (p > 1 || q > 1) {
                C64::new(0.0, 0.0)
            } else {
                let key = match which {
                    ModeSelector::Matter => [p, q, 0, 0],
                    ModeSelector::Cavity => [0, 0, p, q],
                };
                table.require(key)?
            };
            m.insert(p, q, v);
        }
    }
    Ok(m)
}

/// Moments `⟨d†^p d^q⟩`, `p, q ≤ order ≤ 2`, of the two-excitation state.
pub fn wavefunction_moments(system: &SystemParams, which: ModeSelector, order: u32) -> Result<FieldMoments> {
    if order > 2 {
        return Err(Error::Domain("the wavefunction holds at most two excitations".into()));
    }
    if which == ModeSelector::Cavity && !system.has_cavity() {
        return Err(Error::InvalidParameter { name: "mode", reason: "model has no cavity".into() });
    }
    let w = wavefunction_coefficients(system)?;
    let two_level = which == ModeSelector::Matter && system.matter_is_two_level();
    // amplitude of |n⟩ in the detected mode with the other mode in state k
    let amp = |n: u32, k: u32| match which {
        ModeSelector::Cavity => w.c(n, k),
        ModeSelector::Matter => w.c(k, n),
    };
    // ⟨n−j| d^j |n⟩ for the detected mode
    let lower = |n: u32, j: u32| -> f64 {
        if j > n {
            0.0
        } else if two_level {
            if n <= 1 { 1.0 } else { 0.0 }
        } else {
            ((n - j + 1)..=n).map(f64::from).product::<f64>().sqrt()
        }
    };
    let norm: f64 = w.amplitudes.values().map(|c| c.norm_sqr()).sum();
    let mut m = FieldMoments::default();
    for p in 0..=order {
        for q in 0..=order {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=2 {
                for base in 0..=2u32 {
                    acc += amp(base + p, k).conj() * amp(base + q, k) * lower(base + p, p) * lower(base + q, q);
                }
            }
            m.insert(p, q, acc / norm);
        }
    }
    Ok(m)
}

fn undefined(n: f64) -> Error {
    Error::UndefinedCorrelation { moment: C64::new(n, 0.0) }
}

fn gn_of(m: &FieldMoments, k: u32) -> Result<f64> {
    let n = m.require(1, 1)?.re;
    if !(n > 0.0) {
        return Err(undefined(n));
    }
    Ok(m.require(k, k)?.re / n.powi(k as i32))
}

/// Observable of a field from its moments.
pub fn from_moments(obs: ObservableSpec, m: &FieldMoments) -> Result<f64> {
    match obs {
        ObservableSpec::Population => Ok(m.require(1, 1)?.re),
        ObservableSpec::Gn(k) => gn_of(m, k),
        ObservableSpec::I(k) => {
            gn_of(m, 1)?;
            Ok(pick_i(&decompose_g2(m.require(0, 1)?, m)?, k))
        }
        ObservableSpec::J(k) => {
            gn_of(m, 1)?;
            Ok(decompose_g3(m.require(0, 1)?, m)?.j[k as usize])
        }
        ObservableSpec::NNorm(k) => {
            let g = (2..=k + 1).map(|j| gn_of(m, j)).collect::<Result<Vec<_>>>()?;
            n_norm(&g, k as usize)
        }
    }
}

fn pick_i(d: &DecompositionG2, k: u32) -> f64 {
    match k {
        0 => d.i0,
        1 => d.i1,
        _ => d.i2,
    }
}

fn check_analytic_support(config: &SweepConfig) -> Result<()> {
    let probe: Vec<f64> = config.axes.iter().map(|a| a.min).collect();
    let (system, homodyne) = config.cell_params(&probe)?;
    let system = effective_drive(config, &system);
    for o in &config.observables {
        if let Err(e @ Error::Config(_)) =
            analytic_value(&system, config.selector(), config.field, homodyne, *o)
        {
            return Err(e);
        }
    }
    Ok(())
}

/// Closed-form value of one observable; [`Error::Config`] when no closed
/// form covers the combination.
pub fn analytic_value(
    system: &SystemParams,
    which: ModeSelector,
    field: FieldKind,
    homodyne: Option<Homodyne>,
    obs: ObservableSpec,
) -> Result<f64> {
    use ObservableSpec::*;
    let unsupported = || {
        Err(Error::Config(format!(
            "no closed form for `{obs}` of the {} {which:?} {field:?} field{}",
            system.name(),
            if homodyne.is_some() { " with homodyne mixing" } else { "" }
        )))
    };
    let norm_of = |g: &dyn Fn(u32) -> Result<f64>, k: u32| -> Result<f64> {
        let v = (2..=k + 1).map(g).collect::<Result<Vec<_>>>()?;
        n_norm(&v, k as usize)
    };
    match (*system, field, homodyne) {
        (SystemParams::Rf(p), FieldKind::Mode, None) => {
            let s = rf_steady(p.omega_s, p.gamma_s, p.delta_s);
            let zero = |_: u32| if s.n_sigma > 0.0 { Ok(0.0) } else { Err(undefined(s.n_sigma)) };
            match obs {
                Population => Ok(s.n_sigma),
                Gn(k) => zero(k),
                I(k) => Ok(pick_i(&rf_decompose(p.omega_s, p.gamma_s, p.delta_s)?, k)),
                NNorm(k) => norm_of(&zero, k),
                J(_) => unsupported(),
            }
        }
        (SystemParams::Rf(p), FieldKind::Fluctuation, None) => {
            let g = |k: u32| rf_gn_fluct(k, p.omega_s, p.gamma_s, p.delta_s);
            match obs {
                Population => Ok(rf_steady(p.omega_s, p.gamma_s, p.delta_s).n_eps),
                Gn(k) => g(k),
                NNorm(k) => norm_of(&g, k),
                _ => unsupported(),
            }
        }
        (SystemParams::Rf(p), FieldKind::Mode, Some(h)) => {
            let g = |k: u32| Ok(rf_homodyne_gn(k, h.f, h.phi, p.omega_s, p.gamma_s, p.delta_s, h.t)?.g);
            match obs {
                Population => Ok(rf_homodyne_gn(1, h.f, h.phi, p.omega_s, p.gamma_s, p.delta_s, h.t)?.n_s),
                Gn(k) => g(k),
                NNorm(k) => norm_of(&g, k),
                _ => unsupported(),
            }
        }
        (SystemParams::Ao(p), FieldKind::Mode, None) => {
            let o = ao_observables(&p);
            let g = |k: u32| if o.n > 0.0 { Ok(ao_gn(&p, k)) } else { Err(undefined(o.n)) };
            match obs {
                Population => Ok(o.n),
                Gn(k) => g(k),
                I(k) => Ok(pick_i(&ao_decompose(p.u, p.gamma_b, p.delta_b), k)),
                NNorm(k) => norm_of(&g, k),
                J(_) => unsupported(),
            }
        }
        (SystemParams::Ao(p), FieldKind::Mode, Some(h)) => match obs {
            Population => Ok(ao_homodyne(&p, h.f, h.phi, h.t)?.n_s),
            Gn(2) => Ok(ao_homodyne(&p, h.f, h.phi, h.t)?.g2),
            _ => unsupported(),
        },
        (SystemParams::Jc(p), FieldKind::Mode, None) => {
            let pops = jc_populations(&p);
            match (which, obs) {
                (ModeSelector::Cavity, Population) => Ok(pops.n_a),
                (ModeSelector::Cavity, Gn(2)) => jc_g2(&p),
                (ModeSelector::Cavity, I(k)) => Ok(pick_i(&jc_g2_decomposition(&p)?, k)),
                (ModeSelector::Matter, Population) => Ok(pops.n_sigma),
                (ModeSelector::Matter, Gn(_)) if pops.n_sigma > 0.0 => Ok(0.0),
                (ModeSelector::Matter, Gn(_)) => Err(undefined(pops.n_sigma)),
                _ => unsupported(),
            }
        }
        (SystemParams::Pol(p), FieldKind::Mode, None) => match (which, obs) {
            (_, Gn(2)) => pol_g2(&p, which),
            (ModeSelector::Cavity, I(k)) => Ok(pick_i(&pol_g2_decomposition(&p)?, k)),
            _ => unsupported(),
        },
        _ => unsupported(),
    }
}
