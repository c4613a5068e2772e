//! Closed-form vanishing-drive results for the four models, and the
//! conventional and unconventional feature finders.

mod ao;
mod jc;
mod pol;
mod rf;

pub use ao::{
    ao_decompose, ao_extrema, ao_g2_zeros, ao_gn, ao_homodyne, ao_level_energy, ao_observables,
    AoExtrema, AoHomodyne, AoObservables,
};
pub use jc::{
    cooperativity, jc_complex_ua_detuning, jc_critical_coupling, jc_dressed_energies,
    jc_feature_conditions, jc_g2, jc_g2_cavity_drive, jc_g2_decomposition, jc_perfect_ua,
    jc_populations, jc_ua_zeros, JcPopulations,
};
pub use pol::{
    pol_complex_ua_detuning, pol_dressed_energies, pol_dressed_energies_exact,
    pol_feature_conditions, pol_g2, pol_g2_decomposition, pol_ua_zeros,
};
pub use rf::{
    rf_decompose, rf_gn_fluct, rf_homodyne_gn, rf_interference_conditions, rf_steady,
    RfHomodyne, RfSteady,
};

use serde::{Deserialize, Serialize};

use crate::fockspace::C64;

/// Kind of correlation feature in a `g^(2)` landscape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureKind {
    /// Conventional antibunching, laser resonant with the first rung.
    Ca,
    /// Conventional bunching, two-photon resonance with the second rung.
    Cb,
    /// Unconventional antibunching from two-photon interference.
    Ua,
    /// Unconventional bunching from cancellation of the coherent fraction.
    Ub,
}

impl FeatureKind {
    /// Uppercase label.
    pub fn label(self) -> &'static str {
        match self {
            FeatureKind::Ca => "CA",
            FeatureKind::Cb => "CB",
            FeatureKind::Ua => "UA",
            FeatureKind::Ub => "UB",
        }
    }
}

/// Where a feature sits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Locus {
    /// A single parameter point given by its detunings.
    Point { delta_a: f64, delta_matter: f64 },
    /// Samples `(ω_a, ω_L)` of a curve in the laser-cavity plane.
    Curve { samples: Vec<[f64; 2]> },
}

/// A located feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureCondition {
    pub kind: FeatureKind,
    pub locus: Locus,
    /// Laser correction `(F, φ)` attached to the feature, if any.
    pub auxiliary: Option<(f64, f64)>,
    /// Whether `g^(2)` vanishes exactly on the locus.
    pub exact: bool,
    /// Short description such as `"E1-"` or `"Im=0"`.
    pub label: String,
}

/// Rectangle of the `(ω_a, ω_L)` plane with a fixed matter frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureWindow {
    pub omega_a: [f64; 2],
    pub omega_l: [f64; 2],
    pub omega_matter: f64,
    /// Samples per curve.
    pub samples: usize,
}

impl FeatureWindow {
    /// Whether a point lies inside the rectangle.
    pub fn contains(&self, omega_a: f64, omega_l: f64) -> bool {
        let inside = |x: f64, r: [f64; 2]| x >= r[0].min(r[1]) && x <= r[0].max(r[1]);
        inside(omega_a, self.omega_a) && inside(omega_l, self.omega_l)
    }

    /// Detunings `(Δ_a, Δ_matter)` of a point of the plane.
    pub fn detunings(&self, omega_a: f64, omega_l: f64) -> (f64, f64) {
        (omega_a - omega_l, self.omega_matter - omega_l)
    }

    /// Point of the plane with the given detunings.
    pub fn point(&self, delta_a: f64, delta_matter: f64) -> [f64; 2] {
        let omega_l = self.omega_matter - delta_matter;
        [delta_a + omega_l, omega_l]
    }

    fn grid(&self, range: [f64; 2]) -> impl Iterator<Item = f64> {
        let n = self.samples.max(2);
        (0..n).map(move |k| range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64)
    }

    /// Curve `ω_L = f(ω_a)` sampled along the cavity axis and clipped.
    pub(crate) fn curve_over_cavity(&self, f: impl Fn(f64) -> f64) -> Vec<[f64; 2]> {
        self.grid(self.omega_a)
            .map(|wa| [wa, f(wa)])
            .filter(|p| p[1].is_finite() && self.contains(p[0], p[1]))
            .collect()
    }

    /// Curve `ω_a = f(ω_L)` sampled along the laser axis and clipped.
    pub(crate) fn curve_over_laser(&self, f: impl Fn(f64) -> f64) -> Vec<[f64; 2]> {
        self.grid(self.omega_l)
            .map(|wl| [f(wl), wl])
            .filter(|p| p[0].is_finite() && self.contains(p[0], p[1]))
            .collect()
    }
}

/// Complex dressed energies of one rung.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressedLevels {
    /// Excitation number of the rung.
    pub rung: u32,
    /// Energies in increasing real part.
    pub energies: Vec<C64>,
    /// Normal-mode splitting `R`.
    pub splitting: f64,
}

impl DressedLevels {
    /// Laser frequencies `Re E / N` that resonantly drive each level.
    pub fn laser_resonances(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e.re / f64::from(self.rung)).collect()
    }

    pub(crate) fn sorted(rung: u32, mut energies: Vec<C64>, splitting: f64) -> Self {
        energies.sort_by(|a, b| a.re.total_cmp(&b.re));
        Self { rung, energies, splitting }
    }
}


/// Sign-change scan of `f` on `[a, b]` with `n` cells, each bracket polished
/// by Brent's method to `1e-12`.
pub(crate) fn scan_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let step = (b - a) / n as f64;
    let mut x0 = a;
    let mut f0 = f(x0);
    for k in 1..=n {
        let x1 = a + step * k as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0.is_finite() && f1.is_finite() && f0 * f1 < 0.0 {
            let mut conv = roots::SimpleConvergency { eps: 1e-12, max_iter: 200 };
            if let Ok(r) = roots::find_root_brent(x0, x1, &f, &mut conv) {
                out.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Half-width of the detuning range searched for exact antibunching.
pub(crate) fn scan_half_width(g: f64, chi: f64, gammas: f64, u: f64) -> f64 {
    10.0 * (g * (1.0 + chi) + gammas + u.abs())
}
