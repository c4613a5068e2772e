//! Resonance fluorescence: a coherently driven two-level emitter.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::C64;
use crate::mixer::DecompositionG2;

/// Exact steady state of the driven two-level emitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfSteady {
    /// Excited-state population `⟨σ†σ⟩`.
    pub n_sigma: f64,
    /// Mean field `⟨σ⟩`.
    pub alpha: C64,
    /// Fluctuation population `n_σ − |α|²`.
    pub n_eps: f64,
    /// Effective normalized drive `2Ω/√(γ² + 4Δ²)`.
    pub p: f64,
}

/// `n_σ = 4Ω²/(γ²+4Δ²+8Ω²)` and `⟨σ⟩ = −2Ω(2Δ+iγ)/(γ²+4Δ²+8Ω²)`.
pub fn rf_steady(omega: f64, gamma: f64, delta: f64) -> RfSteady {
    let g2 = gamma * gamma + 4.0 * delta * delta;
    let den = g2 + 8.0 * omega * omega;
    let n_sigma = 4.0 * omega * omega / den;
    let alpha = C64::new(2.0 * delta, gamma) * (-2.0 * omega / den);
    RfSteady { n_sigma, alpha, n_eps: n_sigma - alpha.norm_sqr(), p: 2.0 * omega / g2.sqrt() }
}

/// `g^(N)` of the fluctuations `σ − ⟨σ⟩`, exact at any drive,
/// `(γ²+4Δ²)^{N−1} [(N−1)²(γ²+4Δ²) + 8N²Ω²] / (8^N Ω^{2N})`.
///
/// Since `σ² = 0`, `(σ−α)^N = (−α)^N + N(−α)^{N−1}σ` and the moment reduces to
/// `|α|^{2N−2}(N² n_σ − (2N−1)|α|²)`.
pub fn rf_gn_fluct(n: u32, omega: f64, gamma: f64, delta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("fluctuation g^(N) needs N >= 2".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(0.0, 0.0) });
    }
    let g2 = gamma * gamma + 4.0 * delta * delta;
    let nf = f64::from(n);
    let num = (nf - 1.0).powi(2) * g2 + 8.0 * nf * nf * omega * omega;
    Ok(g2.powi(n as i32 - 1) * num / (8f64.powi(n as i32) * omega.powi(2 * n as i32)))
}

/// Population and `g^(N)` after mixing with an external laser.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfHomodyne {
    pub n_s: f64,
    pub g: f64,
}

fn rf_bracket(n: f64, f: f64, phi: f64, gamma: f64, delta: f64) -> f64 {
    let g2 = gamma * gamma + 4.0 * delta * delta;
    f * f * g2 + 4.0 * n * f * gamma * (gamma * phi.cos() - 2.0 * delta * phi.sin())
        + 4.0 * n * n * gamma * gamma
}

/// Heitler-regime `g^(N)` of `s = Tσ + iRβ` with `|β'| = R|β|/T = FΩ/γ` and phase `φ`.
///
/// `N = 1` returns the population with `g = 1`.
pub fn rf_homodyne_gn(
    n: u32,
    f: f64,
    phi: f64,
    omega: f64,
    gamma: f64,
    delta: f64,
    t: f64,
) -> Result<RfHomodyne> {
    if n < 1 || !(f >= 0.0) || !(gamma > 0.0) || !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain("needs N >= 1, F >= 0, γ > 0 and T in [0, 1]".into()));
    }
    let g2 = gamma * gamma + 4.0 * delta * delta;
    let pref = |k: f64| {
        t.powf(2.0 * k) * f.powf(2.0 * (k - 1.0)) * (omega / gamma).powf(2.0 * k) / g2
    };
    let one = rf_bracket(1.0, f, phi, gamma, delta);
    let n_s = pref(1.0) * one;
    if n == 1 {
        return Ok(RfHomodyne { n_s, g: 1.0 });
    }
    let scale = f * f * g2 + 4.0 * gamma * gamma;
    if !(one > 1e-14 * scale) || !(n_s > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(n_s, 0.0) });
    }
    let nf = f64::from(n);
    let big = pref(nf) * rf_bracket(nf, f, phi, gamma, delta);
    Ok(RfHomodyne { n_s, g: big / n_s.powi(n as i32) })
}

/// Laser correction `(φ_N, F_N)` that zeroes `g^(N)`:
/// `tan φ_N = −2Δ/γ` on the branch with `F_N = −2N cos φ_N > 0`.
pub fn rf_interference_conditions(n: u32, gamma: f64, delta: f64) -> (f64, f64) {
    let phi = (2.0 * delta).atan2(-gamma).rem_euclid(TAU);
    let f = -2.0 * f64::from(n) * phi.cos();
    (phi, f)
}

/// Self-homodyne split of `g^(2)_σ = 0` into coherent, fluctuation and
/// interference terms.
pub fn rf_decompose(omega: f64, gamma: f64, delta: f64) -> Result<DecompositionG2> {
    let s = rf_steady(omega, gamma, delta);
    if !(s.n_sigma > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(0.0, 0.0) });
    }
    let (n, a2) = (s.n_sigma, s.alpha.norm_sqr());
    Ok(DecompositionG2 {
        i0: a2 * (6.0 * n - 4.0 * a2) / (n * n) - 1.0,
        i1: -8.0 * a2 * (n - a2) / (n * n),
        i2: 2.0 * a2 * (n - 2.0 * a2) / (n * n),
    })
}
