//! Jaynes-Cummings: a cavity coupled to a two-level emitter.

use serde::{Deserialize, Serialize};

use super::{scan_half_width, scan_roots, DressedLevels, FeatureCondition, FeatureKind, FeatureWindow, Locus};
use crate::error::{Error, Result};
use crate::fockspace::{JcParams, C64};
use crate::mixer::DecompositionG2;

fn width(gamma: f64, delta: f64) -> f64 {
    gamma * gamma + 4.0 * delta * delta
}

/// Cooperativity `4g²/(γ_a γ_σ)`.
pub fn cooperativity(g: f64, gamma_a: f64, gamma_s: f64) -> f64 {
    4.0 * g * g / (gamma_a * gamma_s)
}

/// Vanishing-drive populations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JcPopulations {
    pub n_a: f64,
    pub n_sigma: f64,
}

/// Cavity and emitter populations to lowest order in `Ω_a`, with `Ω_σ = χΩ_a`.
pub fn jc_populations(p: &JcParams) -> JcPopulations {
    let (oa, os) = (p.omega_a, p.chi * p.omega_a);
    let (ga2, gs2) = (width(p.gamma_a, p.delta_a), width(p.gamma_s, p.delta_s));
    let g = p.g;
    let den = 16.0 * g.powi(4) + 8.0 * g * g * (p.gamma_a * p.gamma_s - 4.0 * p.delta_a * p.delta_s)
        + ga2 * gs2;
    let (c, s) = (p.phi.cos(), p.phi.sin());
    let n_a = 4.0
        * (4.0 * g * g * os * os + gs2 * oa * oa
            - 4.0 * g * oa * os * (2.0 * p.delta_s * c + p.gamma_s * s))
        / den;
    let n_sigma = 4.0
        * (4.0 * g * g * oa * oa + ga2 * os * os
            - 4.0 * g * oa * os * (2.0 * p.delta_a * c - p.gamma_a * s))
        / den;
    JcPopulations { n_a, n_sigma }
}

/// Vanishing-drive cavity `g^(2)` for arbitrary drive ratio `χ` and phase `φ`.
pub fn jc_g2(p: &JcParams) -> Result<f64> {
    let JcParams { delta_a: da, delta_s: ds, g, chi, phi, gamma_a: ga, gamma_s: gs, .. } = *p;
    let d11 = da + ds;
    let d12 = da + 2.0 * ds;
    let g11 = ga + gs;
    let w11 = g11 * g11 + 4.0 * d11 * d11;
    let (wa, ws) = (width(ga, da), width(gs, ds));
    let g4 = g.powi(4);
    let (c, s, c2, s2) = (phi.cos(), phi.sin(), (2.0 * phi).cos(), (2.0 * phi).sin());
    let a = 16.0 * g4 + 8.0 * g * g * (ga * gs - 4.0 * da * ds) + wa * ws;
    let b = 16.0 * g4 * (1.0 + chi.powi(4))
        + 8.0 * g * g * (2.0 * chi * chi * w11 + 4.0 * ds * d11 - gs * g11)
        + ws * w11
        - 16.0 * g * chi * (ds * w11 + 4.0 * g * g * d11 * (1.0 + chi * chi)) * c
        + 8.0 * g * g * chi * chi * (4.0 * g * g - gs * g11 + 4.0 * ds * d11) * c2
        - 8.0 * g * chi * (gs * w11 + 4.0 * g * g * g11 * (chi * chi - 1.0)) * s
        + 16.0 * g * g * chi * chi * (ga * ds + gs * d12) * s2;
    let lin = 4.0 * g * g * chi * chi + ws - 4.0 * g * chi * (2.0 * ds * c + gs * s);
    let den = (16.0 * g4 + 8.0 * g * g * (ga * g11 - 4.0 * da * d11) + wa * w11) * lin * lin;
    if !(den.abs() > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(lin, 0.0) });
    }
    Ok(a * b / den)
}

/// Vanishing-drive cavity `g^(2)` with the cavity driven alone.
pub fn jc_g2_cavity_drive(p: &JcParams) -> Result<f64> {
    let JcParams { delta_a: da, delta_s: ds, g, gamma_a: ga, gamma_s: gs, .. } = *p;
    let (gp, dp) = (ga + gs, da + ds);
    let wp = gp * gp + 4.0 * dp * dp;
    let (wa, ws) = (width(ga, da), width(gs, ds));
    let g4 = g.powi(4);
    let num = (16.0 * g4 + 8.0 * g * g * (gs * ga - 4.0 * da * ds) + wa * ws)
        * (16.0 * g4 - 8.0 * g * g * (gs * gp - 4.0 * ds * dp) + ws * wp);
    let den = ws * ws * (16.0 * g4 + 8.0 * g * g * (ga * gp - 4.0 * da * dp) + wa * wp);
    if !(den > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(ws, 0.0) });
    }
    Ok(num / den)
}

/// Self-homodyne split of the cavity `g^(2)` for a cavity drive (`χ = 0`).
pub fn jc_g2_decomposition(p: &JcParams) -> Result<DecompositionG2> {
    if p.chi != 0.0 {
        return Err(Error::Domain("the decomposition closed form needs χ = 0".into()));
    }
    let JcParams { delta_a: da, delta_s: ds, g, gamma_a: ga, gamma_s: gs, .. } = *p;
    let g4 = g.powi(4);
    let f1 = width(gs, ds).powi(2)
        * (16.0 * g4
            + 8.0 * g * g * (ga * (ga + gs) - 4.0 * da * (da + ds))
            + width(ga, da) * ((ga + gs).powi(2) + 4.0 * (da + ds).powi(2)));
    if !(f1 > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(f1, 0.0) });
    }
    let n2 = -gs * gs * (4.0 * g * g + ga * (ga + gs) - 4.0 * da * da)
        + 4.0 * gs * (4.0 * ga + 3.0 * gs) * da * ds
        + 4.0 * ds * ds * (4.0 * g * g + ga * (ga + 3.0 * gs) - 4.0 * da * da)
        - 16.0 * da * ds.powi(3);
    Ok(DecompositionG2 { i0: 256.0 * g4 * g4 / f1, i1: 0.0, i2: 32.0 * g4 * n2 / f1 })
}

/// Coupling `g_P` at which `g^(2)` of the cavity-driven system crosses one.
///
/// Antibunching holds for `g < g_P`; `None` when no crossing exists.
pub fn jc_critical_coupling(gamma_a: f64, gamma_s: f64, delta_a: f64, delta_s: f64) -> Option<f64> {
    let (ga, gs, da, ds) = (gamma_a, gamma_s, delta_a, delta_s);
    let inner = 16.0 * ds.powi(4) + 32.0 * da * ds.powi(3)
        - 8.0 * (ga * ga + 3.0 * ga * gs + gs * gs - 4.0 * da * da) * ds * ds
        - 8.0 * gs * (4.0 * ga + 3.0 * gs) * da * ds
        + gs * gs * (2.0 * ga * ga + 2.0 * ga * gs + gs * gs - 8.0 * da * da);
    if !(inner >= 0.0) {
        return None;
    }
    let outer = inner.sqrt() + gs * gs - 4.0 * ds * ds;
    (outer >= 0.0).then(|| 0.5 * outer.sqrt())
}

/// Complex dressed energies of rung `n` for bare frequencies `ω_a`, `ω_σ`.
pub fn jc_dressed_energies(
    n: u32,
    omega_a: f64,
    omega_s: f64,
    g: f64,
    gamma_a: f64,
    gamma_s: f64,
) -> Result<DressedLevels> {
    if n == 0 {
        return Err(Error::Domain("dressed rungs start at N = 1".into()));
    }
    let nf = f64::from(n);
    let centre = C64::new(
        nf * omega_a + 0.5 * (omega_s - omega_a),
        -0.25 * ((2.0 * nf - 1.0) * gamma_a + gamma_s),
    );
    let det = C64::new(0.5 * (omega_a - omega_s), -0.25 * (gamma_a - gamma_s));
    let root = (det * det + nf * g * g).sqrt();
    Ok(DressedLevels::sorted(n, vec![centre - root, centre + root], root.re.abs()))
}

/// Cavity detuning, possibly complex, that cancels the two-photon amplitude
/// at emitter detuning `delta_s`.
///
/// Its real part traces the antibunching curve; `g^(2)` vanishes exactly
/// where the imaginary part does.
pub fn jc_complex_ua_detuning(delta_s: f64, p: &JcParams) -> C64 {
    let i = C64::i();
    let g11 = p.gamma_a + p.gamma_s;
    let e = C64::from_polar(1.0, -p.phi);
    let (g, chi) = (p.g, p.chi);
    let zs = C64::new(p.gamma_s, 2.0 * delta_s);
    let z11 = C64::new(g11, 2.0 * delta_s);
    let num = i * zs * z11 + 4.0 * e * g * chi * z11 - 4.0 * i * g * g * (1.0 + e * e * chi * chi);
    let den = C64::new(2.0 * p.gamma_s, 4.0 * delta_s) - 8.0 * i * e * g * chi;
    num / den
}

/// Detunings `(Δ_a, Δ_σ)` with the two-level antibunching exact at a
/// cavity drive (`χ = 0`), `Δ_σ = ±(γ_σ/2)√(4g²/(γ_σ(γ_σ+γ_a)) − 1)` and
/// `Δ_a = −(2 + γ_a/γ_σ)Δ_σ`.
///
/// `None` when `4g² < γ_σ(γ_σ + γ_a)`.
pub fn jc_perfect_ua(g: f64, gamma_a: f64, gamma_s: f64) -> Option<[(f64, f64); 2]> {
    let rad = 4.0 * g * g / (gamma_s * (gamma_s + gamma_a)) - 1.0;
    if !(rad >= 0.0) {
        return None;
    }
    let ds = 0.5 * gamma_s * rad.sqrt();
    let da = -(2.0 + gamma_a / gamma_s) * ds;
    Some([(da, ds), (-da, -ds)])
}

/// All `(Δ_a, Δ_σ)` where the cavity `g^(2)` vanishes at vanishing drive.
pub fn jc_ua_zeros(p: &JcParams) -> Vec<(f64, f64)> {
    let half = scan_half_width(p.g, p.chi, p.gamma_a + p.gamma_s, 0.0);
    scan_roots(|ds| jc_complex_ua_detuning(ds, p).im, -half, half, 20_000)
        .into_iter()
        .map(|ds| (jc_complex_ua_detuning(ds, p).re, ds))
        .filter(|&(da, ds)| {
            jc_g2(&JcParams { delta_a: da, delta_s: ds, ..*p }).is_ok_and(|v| v.abs() < 1e-8)
        })
        .collect()
}

/// Conventional and unconventional features of the cavity `g^(2)` in the
/// `(ω_a, ω_L)` plane at fixed emitter frequency.
pub fn jc_feature_conditions(p: &JcParams, window: &FeatureWindow) -> Vec<FeatureCondition> {
    let ws = window.omega_matter;
    let mut out = Vec::new();
    let mut push = |kind, locus, exact, label: &str| {
        out.push(FeatureCondition { kind, locus, auxiliary: None, exact, label: label.to_string() });
    };
    for (rung, kind) in [(1, FeatureKind::Ca), (2, FeatureKind::Cb)] {
        for (branch, label) in [(0, "-"), (1, "+")] {
            let samples = window.curve_over_cavity(|wa| {
                jc_dressed_energies(rung, wa, ws, p.g, p.gamma_a, p.gamma_s)
                    .map(|l| l.laser_resonances()[branch])
                    .unwrap_or(f64::NAN)
            });
            push(kind, Locus::Curve { samples }, false, &format!("E{rung}{label}"));
        }
    }
    let ua = window.curve_over_laser(|wl| wl + jc_complex_ua_detuning(ws - wl, p).re);
    push(FeatureKind::Ua, Locus::Curve { samples: ua }, false, "Re");
    let points: Vec<(f64, f64)> = if p.chi == 0.0 {
        match jc_perfect_ua(p.g, p.gamma_a, p.gamma_s) {
            Some(pts) => pts.to_vec(),
            None => {
                push(FeatureKind::Ua, Locus::Point { delta_a: 0.0, delta_matter: 0.0 }, false, "Im=0");
                Vec::new()
            }
        }
    } else {
        jc_ua_zeros(p)
    };
    for (da, ds) in points {
        let [wa, wl] = window.point(da, ds);
        if window.contains(wa, wl) {
            push(FeatureKind::Ua, Locus::Point { delta_a: da, delta_matter: ds }, true, "Im=0");
        }
    }
    let wl = ws - p.chi * p.g * p.phi.cos();
    let samples = window.curve_over_cavity(|_| wl);
    push(FeatureKind::Ub, Locus::Curve { samples }, false, "n_a min");
    out
}
