//! Anharmonic oscillator: a driven Kerr mode.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{AoParams, C64};
use crate::mixer::DecompositionG2;

/// Vanishing-drive observables of the Kerr mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoObservables {
    /// `n_b = 4Ω_b²/(γ_b²+4Δ_b²)`.
    pub n: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Vanishing-drive `g^(N) = Π_{k=1}^{N−1} (γ²+4Δ²)/(γ²+(kU+2Δ)²)`.
pub fn ao_gn(p: &AoParams, n: u32) -> f64 {
    let w = p.gamma_b * p.gamma_b + 4.0 * p.delta_b * p.delta_b;
    (1..n)
        .map(|k| w / (p.gamma_b.powi(2) + (f64::from(k) * p.u + 2.0 * p.delta_b).powi(2)))
        .product()
}

/// `n_b`, `g^(2)` and `g^(3)` at vanishing drive.
pub fn ao_observables(p: &AoParams) -> AoObservables {
    let w = p.gamma_b * p.gamma_b + 4.0 * p.delta_b * p.delta_b;
    AoObservables { n: 4.0 * p.omega_b * p.omega_b / w, g2: ao_gn(p, 2), g3: ao_gn(p, 3) }
}

/// Energy `NΔ + U N(N−1)/2` of the N-th Fock level in the rotating frame.
pub fn ao_level_energy(n: u32, delta: f64, u: f64) -> f64 {
    let n = f64::from(n);
    n * delta + 0.5 * u * n * (n - 1.0)
}

/// Stationary points of `g^(2)(Δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoExtrema {
    pub delta_min: f64,
    pub g2_min: f64,
    pub delta_max: f64,
    pub g2_max: f64,
}

/// `Δ_± = −(U ± √(U² + 4γ²))/4`, sorted into minimum and maximum.
pub fn ao_extrema(u: f64, gamma: f64) -> Result<AoExtrema> {
    if !(gamma > 0.0) || !u.is_finite() || u == 0.0 {
        return Err(Error::Domain("extrema need γ > 0 and U ≠ 0".into()));
    }
    let root = (u * u + 4.0 * gamma * gamma).sqrt();
    let g2 = |d: f64| {
        ao_gn(&AoParams { delta_b: d, u, omega_b: 0.0, gamma_b: gamma }, 2)
    };
    let (a, b) = (-(u + root) / 4.0, -(u - root) / 4.0);
    let (lo, hi) = if g2(a) <= g2(b) { (a, b) } else { (b, a) };
    Ok(AoExtrema { delta_min: lo, g2_min: g2(lo), delta_max: hi, g2_max: g2(hi) })
}

/// Self-homodyne split of the vanishing-drive `g^(2)`:
/// `I₀ = U²/W`, `I₁ = 0`, `I₂ = −2U(U+2Δ)/W` with `W = γ²+(U+2Δ)²`.
pub fn ao_decompose(u: f64, gamma: f64, delta: f64) -> DecompositionG2 {
    let w = gamma * gamma + (u + 2.0 * delta).powi(2);
    DecompositionG2 { i0: u * u / w, i1: 0.0, i2: -2.0 * u * (u + 2.0 * delta) / w }
}

/// Leading-order population and `g^(2)` of `s = T b + i R β`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoHomodyne {
    pub n_s: f64,
    pub g2: f64,
}

fn ao_xyz(f: f64, phi: f64, u: f64, gamma: f64, delta: f64) -> (C64, C64, C64) {
    let i = C64::i();
    let zc = C64::new(gamma, 2.0 * delta);
    let x = -i * C64::from_polar(f, phi);
    let y = -2.0 * i * gamma / zc;
    let z = 4.0 * i * gamma * gamma / (zc * C64::new(u + 2.0 * delta, -gamma));
    (x, y, z)
}

/// Mixed Kerr emission with a laser of amplitude `FΩ_b/γ_b` and phase `φ`,
/// to leading order in the drive.
///
/// `g²_s = |z + 2xy + x²|²/|x + y|⁴` with `x = −iFe^{iφ}`, `y = −2iγ/(γ+2iΔ)`,
/// `z = 4iγ²/((γ+2iΔ)(U+2Δ−iγ))`.
pub fn ao_homodyne(p: &AoParams, f: f64, phi: f64, t: f64) -> Result<AoHomodyne> {
    if !(f >= 0.0) || !(0.0..=1.0).contains(&t) || !(p.gamma_b > 0.0) {
        return Err(Error::Domain("needs F >= 0, T in [0, 1] and γ > 0".into()));
    }
    let (x, y, z) = ao_xyz(f, phi, p.u, p.gamma_b, p.delta_b);
    let lin = x + y;
    let n_s = t * t * (p.omega_b / p.gamma_b).powi(2) * lin.norm_sqr();
    if !(lin.norm_sqr() > 1e-28) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(n_s, 0.0) });
    }
    Ok(AoHomodyne { n_s, g2: (z + 2.0 * x * y + x * x).norm_sqr() / lin.norm_sqr().powi(2) })
}

/// Laser corrections `(F, φ)` with `g²_s = 0`, from `Fe^{iφ} = i(−y ± √(y² − z))`,
/// sorted by `F`. Coincident roots are merged.
pub fn ao_g2_zeros(u: f64, gamma: f64, delta: f64) -> Result<Vec<(f64, f64)>> {
    if !(gamma > 0.0) || !u.is_finite() || !delta.is_finite() {
        return Err(Error::Domain("needs γ > 0 and finite U, Δ".into()));
    }
    let (_, y, z) = ao_xyz(0.0, 0.0, u, gamma, delta);
    let root = (y * y - z).sqrt();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in [C64::i() * (-y + root), C64::i() * (-y - root)] {
        let cand = (w.norm(), w.arg().rem_euclid(TAU));
        if !out.iter().any(|o| (o.0 - cand.0).abs() < 1e-8 && (o.1 - cand.1).abs() < 1e-8) {
            out.push(cand);
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
