//! TOML run configuration shared by the `sweep`, `features` and `expand`
//! subcommands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::FeatureWindow;
use crate::error::{Error, Result};
use crate::fockspace::{ModeSelector, SystemParams, Truncation, DEFAULT_N_MAX};
use crate::steady::SeriesRequest;

/// Most axes a sweep may have.
pub const MAX_AXES: usize = 2;

/// Highest correlation order an observable may request.
pub const MAX_ORDER: u32 = 6;

/// How cell moments are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    /// Closed forms of the `analytic` module.
    #[default]
    Analytic,
    /// Leading-order correlator hierarchy.
    Recursive,
    /// Full master-equation steady state at a finite drive.
    Liouvillian,
    /// Two-excitation wavefunction amplitudes.
    Wavefunction,
}

impl EngineKind {
    /// Lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Analytic => "analytic",
            EngineKind::Recursive => "recursive",
            EngineKind::Liouvillian => "liouvillian",
            EngineKind::Wavefunction => "wavefunction",
        }
    }
}

/// Engine selection and the finite-drive settings of the Liouvillian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub kind: EngineKind,
    /// Drive amplitude of the full solve. Required by `liouvillian`,
    /// refused by the vanishing-drive engines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<f64>,
    /// Highest kept Fock number (`liouvillian` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Whether `truncation` caps each mode or the total excitation number.
    #[serde(default)]
    pub cut: Cut,
}

/// How the Fock space of a Liouvillian solve is cut.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cut {
    /// Every bosonic mode keeps levels `0..=truncation`.
    #[default]
    PerMode,
    /// Product states keep at most `truncation` quanta in total.
    Total,
}

impl EngineConfig {
    /// Truncation of the Liouvillian solve.
    pub fn truncation(&self) -> Truncation {
        let n = self.truncation.unwrap_or(DEFAULT_N_MAX);
        match self.cut {
            Cut::PerMode => Truncation::uniform(n),
            Cut::Total => Truncation::excitations(n),
        }
    }
}

/// A column of the sweep output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ObservableSpec {
    /// Population `⟨s†s⟩`, written `n`.
    Population,
    /// `g^(N)`, written `g2` … `g6`.
    Gn(u32),
    /// Term `I_k` of the `g^(2)` split, written `i0` … `i2`.
    I(u32),
    /// Term `J_k` of the `g^(3)` split, written `j0` … `j4`.
    J(u32),
    /// n-norm over `g^(2)` … `g^(n+1)`, written `n_norm2` etc.
    NNorm(u32),
}

impl ObservableSpec {
    /// Highest moment order `⟨s†^k s^k⟩` the observable needs.
    pub fn order(self) -> u32 {
        match self {
            ObservableSpec::Population => 1,
            ObservableSpec::Gn(n) => n,
            ObservableSpec::I(_) => 2,
            ObservableSpec::J(_) => 3,
            ObservableSpec::NNorm(n) => n + 1,
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableSpec::Population => write!(f, "n"),
            ObservableSpec::Gn(n) => write!(f, "g{n}"),
            ObservableSpec::I(k) => write!(f, "i{k}"),
            ObservableSpec::J(k) => write!(f, "j{k}"),
            ObservableSpec::NNorm(n) => write!(f, "n_norm{n}"),
        }
    }
}

impl FromStr for ObservableSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown observable `{s}`"));
        let num = |rest: &str| rest.parse::<u32>().map_err(|_| bad());
        let spec = if s == "n" {
            ObservableSpec::Population
        } else if let Some(rest) = s.strip_prefix("n_norm") {
            ObservableSpec::NNorm(num(rest)?)
        } else if let Some(rest) = s.strip_prefix('g') {
            ObservableSpec::Gn(num(rest)?)
        } else if let Some(rest) = s.strip_prefix('i') {
            ObservableSpec::I(num(rest)?)
        } else if let Some(rest) = s.strip_prefix('j') {
            ObservableSpec::J(num(rest)?)
        } else {
            return Err(bad());
        };
        let ok = match spec {
            ObservableSpec::Population => true,
            ObservableSpec::Gn(n) => (2..=MAX_ORDER).contains(&n),
            ObservableSpec::I(k) => k <= 2,
            ObservableSpec::J(k) => k <= 4,
            ObservableSpec::NNorm(n) => (1..MAX_ORDER).contains(&n),
        };
        if ok {
            Ok(spec)
        } else {
            Err(bad())
        }
    }
}

impl TryFrom<String> for ObservableSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ObservableSpec> for String {
    fn from(o: ObservableSpec) -> Self {
        o.to_string()
    }
}

/// Whether the statistics refer to the mode or to its fluctuations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// The detected field itself.
    #[default]
    Mode,
    /// The field minus its mean, `s − ⟨s⟩`.
    Fluctuation,
}

/// External laser mixed into the detected field, `s = T(d + β)` with
/// `β = −iFe^{iφ} Ω/γ`, where `Ω` is the reference drive and `γ` the decay
/// rate of the detected mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Homodyne {
    #[serde(default = "unit")]
    pub t: f64,
    pub f: f64,
    pub phi: f64,
}

fn unit() -> f64 {
    1.0
}

/// Spacing of axis samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// One swept parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// A field of the system table, `freq.cavity`, `freq.laser`,
    /// `freq.matter`, or `homodyne.t`, `homodyne.f`, `homodyne.phi`.
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    /// Sample values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let s = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * s,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * s).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Config(format!("axis `{}` needs count >= 2", self.param)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!("axis `{}` needs finite bounds", self.param)));
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(Error::Config(format!("log axis `{}` needs positive bounds", self.param)));
        }
        Ok(())
    }
}

/// Absolute frequencies from which the detunings are derived,
/// `Δ_a = ω_a − ω_L` and `Δ_matter = ω_matter − ω_L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frequencies {
    #[serde(default)]
    pub cavity: f64,
    #[serde(default)]
    pub laser: f64,
    #[serde(default)]
    pub matter: f64,
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Stem of the output files.
    pub name: String,
    /// Output directory, relative to the config file. Not echoed in the
    /// sidecars, so the files do not depend on where they were written.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
    /// Parameter template; axes overwrite individual fields.
    pub system: SystemParams,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub observables: Vec<ObservableSpec>,
    /// Detected mode; defaults to the cavity when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeSelector>,
    #[serde(default)]
    pub field: FieldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homodyne: Option<Homodyne>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Frequencies>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    /// Rectangle for feature overlays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<FeatureWindow>,
    /// Drive-series request for `expand`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expand: Option<SeriesRequest>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

impl SweepConfig {
    /// Parses and checks a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and resolves `output_dir` against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if cfg.output_dir.is_relative() {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    /// Detected mode.
    pub fn selector(&self) -> ModeSelector {
        self.mode.unwrap_or(if self.system.has_cavity() {
            ModeSelector::Cavity
        } else {
            ModeSelector::Matter
        })
    }

    /// Highest moment order any observable needs.
    pub fn max_order(&self) -> u32 {
        self.observables.iter().map(|o| o.order()).max().unwrap_or(1)
    }

    /// Output stem with a suffix, e.g. `<name>.features`.
    pub fn stem(&self, suffix: Option<&str>) -> String {
        match suffix {
            Some(s) => format!("{}.{s}", self.name),
            None => self.name.clone(),
        }
    }

    /// Structural checks that do not depend on a subcommand.
    pub fn validate(&self) -> Result<()> {
        let name_ok = !self.name.is_empty()
            && self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
        if !name_ok {
            return Err(Error::Config(format!(
                "name `{}` must be non-empty and use only letters, digits, `-`, `_` or `.`",
                self.name
            )));
        }
        self.system.validate().map_err(|e| Error::Config(format!("system: {e}")))?;
        if self.axes.len() > MAX_AXES {
            return Err(Error::Config(format!("at most {MAX_AXES} axes, got {}", self.axes.len())));
        }
        for (k, axis) in self.axes.iter().enumerate() {
            axis.validate()?;
            if self.axes[..k].iter().any(|a| a.param == axis.param) {
                return Err(Error::Config(format!("axis `{}` appears twice", axis.param)));
            }
        }
        let mut seen = Vec::new();
        for o in &self.observables {
            if seen.contains(o) {
                return Err(Error::Config(format!("observable `{o}` listed twice")));
            }
            seen.push(*o);
        }
        let which = self.selector();
        if which == ModeSelector::Cavity && !self.system.has_cavity() {
            return Err(Error::Config(format!("the {} model has no cavity", self.system.name())));
        }
        if let Some(h) = self.homodyne {
            if !(0.0..=1.0).contains(&h.t) || !(h.f.is_finite() && h.f >= 0.0) || !h.phi.is_finite() {
                return Err(Error::Config("homodyne needs t in [0, 1], f >= 0 and finite phi".into()));
            }
        }
        self.validate_engine()?;
        if self.frequencies.is_some() || self.axes.iter().any(|a| a.param.starts_with("freq.")) {
            if let Some(a) = self.axes.iter().find(|a| a.param.starts_with("delta_")) {
                return Err(Error::Config(format!(
                    "axis `{}` conflicts with detunings derived from frequencies",
                    a.param
                )));
            }
        }
        let probe: Vec<f64> = self.axes.iter().map(|a| a.min).collect();
        self.cell_params(&probe)?;
        if let Some(w) = &self.window {
            if w.samples < 2 || w.omega_a.iter().chain(&w.omega_l).any(|v| !v.is_finite()) {
                return Err(Error::Config("window needs finite ranges and samples >= 2".into()));
            }
        }
        Ok(())
    }

    fn validate_engine(&self) -> Result<()> {
        let e = self.engine;
        match e.kind {
            EngineKind::Liouvillian => {
                if !e.drive.is_some_and(|d| d.is_finite() && d > 0.0) {
                    return Err(Error::Config("the liouvillian engine needs a positive drive".into()));
                }
                if e.truncation.is_some_and(|t| t < 2) {
                    return Err(Error::Config("truncation must be >= 2".into()));
                }
            }
            kind => {
                if e.drive.is_some() || e.truncation.is_some() || e.cut != Cut::PerMode {
                    return Err(Error::Config(format!(
                        "the {} engine is a vanishing-drive limit and takes no drive, truncation or cut",
                        kind.name()
                    )));
                }
            }
        }
        if e.kind == EngineKind::Wavefunction && self.max_order() > 2 {
            return Err(Error::Config("the wavefunction engine provides moments up to second order".into()));
        }
        if matches!(e.kind, EngineKind::Recursive | EngineKind::Wavefunction)
            && self.field == FieldKind::Fluctuation
        {
            return Err(Error::Config(
                "fluctuation statistics vanish at leading order; use the liouvillian engine".into(),
            ));
        }
        Ok(())
    }

    /// System and laser of one grid cell from its axis values.
    pub fn cell_params(&self, coords: &[f64]) -> Result<(SystemParams, Option<Homodyne>)> {
        if coords.len() != self.axes.len() {
            return Err(Error::Config(format!("expected {} axis values", self.axes.len())));
        }
        let mut json = serde_json::to_value(self.system).map_err(|e| Error::Config(e.to_string()))?;
        let mut homodyne = self.homodyne;
        let mut freq = self.frequencies;
        for (axis, &v) in self.axes.iter().zip(coords) {
            let p = axis.param.as_str();
            if let Some(rest) = p.strip_prefix("homodyne.") {
                let h = homodyne.as_mut().ok_or_else(|| {
                    Error::Config(format!("axis `{p}` needs a [homodyne] table"))
                })?;
                match rest {
                    "t" => h.t = v,
                    "f" => h.f = v,
                    "phi" => h.phi = v,
                    _ => return Err(Error::Config(format!("unknown axis parameter `{p}`"))),
                }
            } else if let Some(rest) = p.strip_prefix("freq.") {
                let fr = freq.get_or_insert_with(Frequencies::default);
                match rest {
                    "cavity" => fr.cavity = v,
                    "laser" => fr.laser = v,
                    "matter" => fr.matter = v,
                    _ => return Err(Error::Config(format!("unknown axis parameter `{p}`"))),
                }
            } else {
                let obj = json.as_object_mut().expect("system serializes to a table");
                if p == "system" || !obj.contains_key(p) {
                    return Err(Error::Config(format!(
                        "unknown axis parameter `{p}` for the {} model",
                        self.system.name()
                    )));
                }
                obj.insert(p.to_string(), v.into());
            }
        }
        let mut system: SystemParams =
            serde_json::from_value(json).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(fr) = freq {
            apply_frequencies(&mut system, fr);
        }
        Ok((system, homodyne))
    }
}

fn apply_frequencies(system: &mut SystemParams, fr: Frequencies) {
    let (da, dm) = (fr.cavity - fr.laser, fr.matter - fr.laser);
    match system {
        SystemParams::Rf(p) => p.delta_s = dm,
        SystemParams::Ao(p) => p.delta_b = dm,
        SystemParams::Jc(p) => {
            p.delta_a = da;
            p.delta_s = dm;
        }
        SystemParams::Pol(p) => {
            p.delta_a = da;
            p.delta_b = dm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JC: &str = r#"
name = "jc-map"
observables = ["n", "g2"]

[system]
system = "jc"
delta_a = 0.0
delta_s = 0.0
g = 1.0
omega_a = 1e-4
chi = 0.0
phi = 0.0
gamma_a = 0.1
gamma_s = 0.01

[[axes]]
param = "freq.cavity"
min = -2.0
max = 2.0
count = 5

[[axes]]
param = "freq.laser"
min = -2.0
max = 2.0
count = 3
"#;

    #[test]
    fn parses_and_derives_detunings() {
        let cfg = SweepConfig::from_toml_str(JC).unwrap();
        assert_eq!(cfg.observables, vec![ObservableSpec::Population, ObservableSpec::Gn(2)]);
        assert_eq!(cfg.selector(), ModeSelector::Cavity);
        let (sys, _) = cfg.cell_params(&[1.0, -0.5]).unwrap();
        match sys {
            SystemParams::Jc(p) => {
                assert_eq!(p.delta_a, 1.5);
                assert_eq!(p.delta_s, 0.5);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn observable_names_round_trip() {
        for s in ["n", "g2", "g6", "i0", "i2", "j4", "n_norm1", "n_norm5"] {
            assert_eq!(s.parse::<ObservableSpec>().unwrap().to_string(), s);
        }
        for s in ["g1", "g7", "i3", "j5", "n_norm0", "n_norm6", "x"] {
            assert!(s.parse::<ObservableSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn rejects_bad_axes_and_engines() {
        let bad_count = JC.replace("count = 3", "count = 1");
        assert!(matches!(SweepConfig::from_toml_str(&bad_count), Err(Error::Config(_))));
        let bad_param = JC.replace("freq.laser", "gamma_x");
        assert!(matches!(SweepConfig::from_toml_str(&bad_param), Err(Error::Config(_))));
        let log_neg = JC.replace("count = 3", "count = 3\nscale = \"log\"");
        assert!(matches!(SweepConfig::from_toml_str(&log_neg), Err(Error::Config(_))));
        let drive = format!("{JC}\n[engine]\nkind = \"recursive\"\ndrive = 0.1\n");
        assert!(matches!(SweepConfig::from_toml_str(&drive), Err(Error::Config(_))));
        let liou = format!("{JC}\n[engine]\nkind = \"liouvillian\"\n");
        assert!(matches!(SweepConfig::from_toml_str(&liou), Err(Error::Config(_))));
    }

    #[test]
    fn log_axis_hits_both_ends() {
        let a = Axis { param: "g".into(), min: 1e-2, max: 1e2, count: 5, scale: Scale::Log };
        let v = a.values();
        assert!((v[0] - 1e-2).abs() < 1e-15 && (v[2] - 1.0).abs() < 1e-12 && (v[4] - 1e2).abs() < 1e-10);
    }
}
