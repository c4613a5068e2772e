//! Homodyne and self-homodyne calculus.
//!
//! A detected field `s = α + d` is the superposition of a coherent amplitude
//! `α` and a field `d` whose normally ordered moments are known. This module
//! mixes moments, splits `g^(2)` and `g^(3)` into interference terms ordered
//! by powers of `|α|`, evaluates displaced squeezed thermal states and their
//! quadratures, and computes the n-norm.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::analytic::rf_steady;
use crate::error::{Error, Result};
use crate::fockspace::C64;
use crate::steady::FieldMoments;

/// Binomial coefficient as a float.
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn double_factorial_odd(n: u32) -> f64 {
    // (n − 1)!! for even n, the number of perfect pairings of n objects
    (1..n).step_by(2).map(f64::from).product()
}

/// `⟨s†^n s^m⟩` for `s = α + d`, `Σ_{p,q} C(n,p) C(m,q) α*^{n−p} α^{m−q} ⟨d†^p d^q⟩`.
pub fn mixed_correlator(d: &FieldMoments, alpha: C64, n: u32, m: u32) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..=n {
        for q in 0..=m {
            let c = binomial(n, p) * binomial(m, q);
            acc += alpha.conj().powu(n - p) * alpha.powu(m - q) * d.require(p, q)? * c;
        }
    }
    Ok(acc)
}

/// Moments of `d = s − α` from the moments of `s`.
pub fn shifted_moments(s: &FieldMoments, alpha: C64, max_order: u32) -> Result<FieldMoments> {
    let mut d = FieldMoments::default();
    for p in 0..=max_order {
        for q in 0..=max_order {
            d.insert(p, q, mixed_correlator(s, -alpha, p, q)?);
        }
    }
    Ok(d)
}

/// Terms `T_k ∝ |α|^k` of `g^(N)_s − 1` for `s = α + d`.
///
/// `⟨s†^N s^N⟩ − ⟨n_s⟩^N` is a polynomial in `|α|` whose two highest powers
/// cancel. Each remaining power, divided by `⟨n_s⟩^N`, is one term; the
/// returned vector holds `T_0 … T_{2N−2}` and `1 + Σ T_k = g^(N)_s`.
pub fn interference_terms(d: &FieldMoments, alpha: C64, order: u32) -> Result<Vec<f64>> {
    if order < 2 {
        return Err(Error::Domain("interference terms need N >= 2".into()));
    }
    let ns = mixed_correlator(d, alpha, 1, 1)?.re;
    if !(ns > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(ns, 0.0) });
    }
    let n = order as usize;
    let mut corr = vec![0.0; 2 * n + 1];
    for p in 0..=order {
        for q in 0..=order {
            let c = binomial(order, p) * binomial(order, q);
            let v = alpha.conj().powu(order - p) * alpha.powu(order - q) * d.require(p, q)? * c;
            corr[2 * n - (p + q) as usize] += v.re;
        }
    }
    // ⟨n_s⟩ = N_d + 2Re(α*⟨d⟩) + |α|², grouped by power of |α|
    let base = [
        d.require(1, 1)?.re,
        2.0 * (alpha.conj() * d.require(0, 1)?).re,
        alpha.norm_sqr(),
    ];
    let mut pow = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; pow.len() + 2];
        for (i, a) in pow.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        pow = next;
    }
    let norm = ns.powi(order as i32);
    Ok((0..=2 * n - 2).map(|k| (corr[k] - pow[k]) / norm).collect())
}

/// `g^(2) = 1 + I₀ + I₁ + I₂` with `I_m ∝ |α|^m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionG2 {
    pub i0: f64,
    pub i1: f64,
    pub i2: f64,
}

impl DecompositionG2 {
    /// `1 + I₀ + I₁ + I₂`.
    pub fn total(&self) -> f64 {
        1.0 + self.i0 + self.i1 + self.i2
    }
}

/// `g^(3) = 1 + Σ_m J_m` with `J_m ∝ |α|^m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionG3 {
    pub j: [f64; 5],
}

impl DecompositionG3 {
    /// `1 + Σ J_m`.
    pub fn total(&self) -> f64 {
        1.0 + self.j.iter().sum::<f64>()
    }
}

/// Splits `g^(2)` of `s` into the coherent part, the fluctuation part and
/// the interference between `mean_field` and `d = s − mean_field`.
///
/// With `mean_field = ⟨s⟩` this is the self-homodyne decomposition.
pub fn decompose_g2(mean_field: C64, s: &FieldMoments) -> Result<DecompositionG2> {
    let d = shifted_moments(s, mean_field, 2)?;
    let t = interference_terms(&d, mean_field, 2)?;
    Ok(DecompositionG2 { i0: t[0], i1: t[1], i2: t[2] })
}

/// Third-order analogue of [`decompose_g2`].
pub fn decompose_g3(mean_field: C64, s: &FieldMoments) -> Result<DecompositionG3> {
    let d = shifted_moments(s, mean_field, 3)?;
    let t = interference_terms(&d, mean_field, 3)?;
    Ok(DecompositionG3 { j: [t[0], t[1], t[2], t[3], t[4]] })
}

/// Displaced squeezed thermal state `D(α) S(ξ) ρ_th S†(ξ) D†(α)` with
/// `S(ξ) = exp[(ξ* a² − ξ a†²)/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub alpha: C64,
    pub xi: C64,
    pub n_th: f64,
}

/// Output arm of a beam splitter fed with a coherent and a squeezed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterOutput {
    pub state: GaussianState,
    /// False when the factorized description is outside its range,
    /// `|T − R| > 0.05` together with `r > 0.2`.
    pub factorization_valid: bool,
}

impl GaussianState {
    /// Validated state.
    pub fn new(alpha: C64, xi: C64, n_th: f64) -> Result<Self> {
        if !(n_th.is_finite() && n_th >= 0.0) {
            return Err(Error::InvalidParameter { name: "n_th", reason: format!("must be >= 0, got {n_th}") });
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite() && xi.re.is_finite() && xi.im.is_finite()) {
            return Err(Error::InvalidParameter { name: "alpha/xi", reason: "must be finite".into() });
        }
        Ok(Self { alpha, xi, n_th })
    }

    /// Pure admixture `s = α + d` of a coherent state and a squeezed vacuum,
    /// ignoring the beam-splitter attenuation and phase shift.
    pub fn admixture(alpha: C64, xi: C64) -> Self {
        Self { alpha, xi, n_th: 0.0 }
    }

    /// Transmitted arm `s = i R d + T a` for a coherent input `a` with
    /// amplitude `alpha` and a squeezed input `d` with parameter `xi`.
    ///
    /// The output carries `α_s = Tα`, `ξ_s = R² r e^{i(θ+π)}` and thermal
    /// population `sinh²(R T r)`. Relative to [`GaussianState::admixture`]
    /// the amplitudes are attenuated by `T` and `R²` and the squeezing phase
    /// is advanced by `π`.
    pub fn from_beam_splitter(alpha: C64, xi: C64, t: f64) -> Result<BeamSplitterOutput> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter { name: "T", reason: format!("must lie in [0, 1], got {t}") });
        }
        let r_bs = (1.0 - t * t).sqrt();
        let r = xi.norm();
        let xi_s = C64::from_polar(r_bs * r_bs * r, xi.arg() + std::f64::consts::PI);
        let n_th = (r_bs * t * r).sinh().powi(2);
        let factorization_valid = !((t - r_bs).abs() > 0.05 && r > 0.2);
        Ok(BeamSplitterOutput {
            state: Self::new(t * alpha, xi_s, n_th)?,
            factorization_valid,
        })
    }

    /// `⟨d†d⟩` of the undisplaced part.
    pub fn fluctuation_population(&self) -> f64 {
        let r = self.xi.norm();
        (2.0 * self.n_th + 1.0) * r.sinh().powi(2) + self.n_th
    }

    /// `⟨d²⟩` of the undisplaced part.
    pub fn fluctuation_coherence(&self) -> C64 {
        let r = self.xi.norm();
        let phase = if r > 0.0 { self.xi / r } else { C64::new(1.0, 0.0) };
        -phase * (2.0 * self.n_th + 1.0) * r.sinh() * r.cosh()
    }

    /// Normally ordered moments of the undisplaced Gaussian part, by Wick
    /// pairing with contractions `⟨d†d⟩` and `⟨d²⟩`.
    pub fn fluctuation_moments(&self, max_order: u32) -> FieldMoments {
        let nd = self.fluctuation_population();
        let m = self.fluctuation_coherence();
        let mut f = FieldMoments::default();
        for p in 0..=max_order {
            for q in 0..=max_order {
                let mut v = C64::new(0.0, 0.0);
                for k in 0..=p.min(q) {
                    let (a, b) = (p - k, q - k);
                    if a % 2 == 1 || b % 2 == 1 {
                        continue;
                    }
                    let pairs = binomial(p, k) * binomial(q, k) * (1..=k).map(f64::from).product::<f64>();
                    v += m.conj().powu(a / 2) * m.powu(b / 2)
                        * (pairs * nd.powi(k as i32) * double_factorial_odd(a) * double_factorial_odd(b));
                }
                f.insert(p, q, v);
            }
        }
        f
    }

    /// Normally ordered moments of the full displaced state.
    pub fn moments(&self, max_order: u32) -> Result<FieldMoments> {
        shifted_moments(&self.fluctuation_moments(max_order), -self.alpha, max_order)
    }
}

/// Population, two-photon coherence and correlations of a Gaussian state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DstObservables {
    pub n: f64,
    pub s2_abs: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Observables of a displaced squeezed thermal state.
pub fn dst_observables(state: &GaussianState) -> Result<DstObservables> {
    let m = state.moments(3)?;
    let n = m.require(1, 1)?.re;
    if !(n > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(n, 0.0) });
    }
    Ok(DstObservables {
        n,
        s2_abs: m.require(0, 2)?.norm(),
        g2: m.require(2, 2)?.re / (n * n),
        g3: m.require(3, 3)?.re / (n * n * n),
    })
}

/// `g^(2)` of `s = α + d` for a squeezed vacuum `d`, written with the
/// interference terms `I₀ = sinh⁴r (1 + coth²r)/n²`, `I₁ = 0`,
/// `I₂ = 2|α|² sinh²r [1 − cos(θ − 2φ) coth r]/n²`, `n = |α|² + sinh²r`.
pub fn dst_g2_terms(alpha: C64, xi: C64) -> Result<DecompositionG2> {
    let r = xi.norm();
    let a2 = alpha.norm_sqr();
    let sh2 = r.sinh().powi(2);
    let n = a2 + sh2;
    if !(n > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(n, 0.0) });
    }
    if r == 0.0 {
        return Ok(DecompositionG2 { i0: 0.0, i1: 0.0, i2: 0.0 });
    }
    let coth = r.cosh() / r.sinh();
    let c = (xi.arg() - 2.0 * alpha.arg()).cos();
    Ok(DecompositionG2 {
        i0: sh2 * sh2 * (1.0 + coth * coth) / (n * n),
        i1: 0.0,
        i2: 2.0 * a2 * sh2 * (1.0 - c * coth) / (n * n),
    })
}

/// Coherent amplitude minimizing `g^(2)` at squeezing `r` with `θ = 2φ`,
/// `e^r √(cosh r sinh r)`.
pub fn optimal_coherent_amplitude(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter { name: "r", reason: format!("must be >= 0, got {r}") });
    }
    Ok(r.exp() * (r.cosh() * r.sinh()).sqrt())
}

/// Minimal `g^(2)` at squeezing `r`, `1 − e^{−2r}/(1 + sinh 2r)`.
pub fn minimal_dst_g2(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter { name: "r", reason: format!("must be >= 0, got {r}") });
    }
    Ok(1.0 - (-2.0 * r).exp() / (1.0 + (2.0 * r).sinh()))
}

/// Distance `(Σ_{k=2}^{n+1} [g^(k)]^n)^{1/n}` from a perfect single-photon source.
pub fn n_norm(g: &[f64], n: usize) -> Result<f64> {
    if n == 0 || g.len() != n {
        return Err(Error::Domain(format!("n-norm needs exactly n = {n} values, got {}", g.len())));
    }
    if let Some(bad) = g.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("correlation values must be >= 0, got {bad}")));
    }
    Ok(g.iter().map(|v| v.powi(n as i32)).sum::<f64>().powf(1.0 / n as f64))
}

/// Beam-splitter admixture of an external laser.
///
/// `t` is the amplitude transmittance, `r = √(1 − t²)`, `f` the laser
/// amplitude as a fraction of `Ω/γ`, and `phi` its phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixRatio {
    pub t: f64,
    pub r: f64,
    pub f: f64,
    pub phi: f64,
}

impl MixRatio {
    /// Validated ratio with `R` fixed by `T² + R² = 1`.
    pub fn new(t: f64, f: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter { name: "T", reason: format!("must lie in [0, 1], got {t}") });
        }
        if !(f.is_finite() && f >= 0.0) {
            return Err(Error::InvalidParameter { name: "F", reason: format!("must be >= 0, got {f}") });
        }
        if !(phi.is_finite() && (0.0..TAU).contains(&phi)) {
            return Err(Error::InvalidParameter { name: "phi", reason: format!("must lie in [0, 2π), got {phi}") });
        }
        Ok(Self { t, r: (1.0 - t * t).sqrt(), f, phi })
    }
}

/// Quadrature statistics of a single mode.
///
/// Variances are normally ordered, so negative values mean squeezing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureStats {
    /// `|⟨s⟩|`, the largest quadrature mean over all angles.
    pub mean: f64,
    pub var_min: f64,
    pub var_max: f64,
    /// `arg(⟨s²⟩ − ⟨s⟩²)`.
    pub theta_sq: f64,
    pub r_eff: f64,
    pub p_th_eff: f64,
    pub g2_eff: f64,
}

impl QuadratureStats {
    /// Whether any quadrature is below the vacuum level.
    pub fn is_squeezed(&self) -> bool {
        self.var_min < 0.0
    }
}

/// Quadrature statistics from the moments of a field.
///
/// The effective squeezing and thermal population invert the Gaussian
/// relations `⟨d†d⟩ = (2n_th+1) sinh²r + n_th`, `|⟨d²⟩| = (2n_th+1) sinh r cosh r`
/// for the fluctuations, and `g2_eff` is the resulting fluctuation `g^(2)`.
pub fn quadrature_stats(s: &FieldMoments) -> Result<QuadratureStats> {
    let mean = s.require(0, 1)?;
    let n = s.require(1, 1)?.re;
    let cov = s.require(0, 2)? - mean * mean;
    let nd = n - mean.norm_sqr();
    let var_max = 0.5 * (cov.norm() + nd);
    let var_min = 0.5 * (-cov.norm() + nd);
    let width = 2.0 * nd + 1.0;
    let two_r = (2.0 * cov.norm() / width).clamp(0.0, 1.0 - f64::EPSILON).atanh();
    let r_eff = 0.5 * two_r;
    let p_th_eff = 0.5 * ((width * width - 4.0 * cov.norm_sqr()).max(1.0).sqrt() - 1.0);
    let g2_eff = gaussian_g2(nd, cov.norm());
    Ok(QuadratureStats {
        mean: mean.norm(),
        var_min,
        var_max,
        theta_sq: cov.arg(),
        r_eff,
        p_th_eff,
        g2_eff,
    })
}

fn gaussian_g2(nd: f64, m_abs: f64) -> f64 {
    if nd > 0.0 {
        2.0 + m_abs * m_abs / (nd * nd)
    } else {
        f64::NAN
    }
}

/// Quadratures of the Heitler emission of a driven two-level emitter.
///
/// Exact variances follow from the steady state; `r_eff = 4Ω²/(γ²+4Δ²)`,
/// `p_th_eff = r_eff²` and `g2_eff = r_eff²/(r_eff² + p_th_eff)²` are the
/// low-drive squeezed-thermal parameters.
pub fn rf_effective_squeezing(omega: f64, gamma: f64, delta: f64) -> Result<QuadratureStats> {
    if !(omega >= 0.0) || !(gamma > 0.0) || !delta.is_finite() {
        return Err(Error::Domain("needs Ω >= 0, γ > 0 and finite Δ".into()));
    }
    let rf = rf_steady(omega, gamma, delta);
    let cov = -rf.alpha * rf.alpha;
    let nd = rf.n_sigma - rf.alpha.norm_sqr();
    let r_eff = 4.0 * omega * omega / (gamma * gamma + 4.0 * delta * delta);
    let p_th_eff = r_eff * r_eff;
    let g2_eff = if r_eff > 0.0 { r_eff * r_eff / (r_eff * r_eff + p_th_eff).powi(2) } else { f64::NAN };
    Ok(QuadratureStats {
        mean: rf.alpha.norm(),
        var_min: 0.5 * (-cov.norm() + nd),
        var_max: 0.5 * (cov.norm() + nd),
        theta_sq: cov.arg(),
        r_eff,
        p_th_eff,
        g2_eff,
    })
}

/// Steady state of a driven, decaying cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DrivenCavity {
    /// `H = Δ a†a + Ω(a† + a)`.
    Coherent { omega: f64, delta: f64, gamma: f64 },
    /// `H = Δ d†d + λ(d†² + d²)`.
    Squeezed { lambda: f64, delta: f64, gamma: f64 },
}

/// Gaussian state reached by a driven cavity.
///
/// The coherent branch gives `α = −2iΩ/(γ + 2iΔ)`, so `|α| = 2Ω/√(γ²+4Δ²)`.
/// The squeezed branch gives `tanh 2r = 4λ/√(γ²+4Δ²)`, `tan θ = γ/(2Δ)` and
/// `n_th = sinh²r`, and is unstable for `4λ ≥ √(γ²+4Δ²)`.
pub fn driven_cavity_state_map(kind: DrivenCavity) -> Result<GaussianState> {
    match kind {
        DrivenCavity::Coherent { omega, delta, gamma } => {
            if !(gamma > 0.0) {
                return Err(Error::InvalidParameter { name: "gamma", reason: "must be > 0".into() });
            }
            let alpha = C64::new(0.0, -2.0 * omega) / C64::new(gamma, 2.0 * delta);
            GaussianState::new(alpha, C64::new(0.0, 0.0), 0.0)
        }
        DrivenCavity::Squeezed { lambda, delta, gamma } => {
            if !(gamma > 0.0) {
                return Err(Error::InvalidParameter { name: "gamma", reason: "must be > 0".into() });
            }
            let z = C64::new(gamma, 2.0 * delta);
            let threshold = 0.25 * z.norm();
            if lambda.abs() >= threshold {
                return Err(Error::Instability { lambda, threshold });
            }
            let r = 0.5 * (4.0 * lambda.abs() / z.norm()).atanh();
            // ⟨d²⟩ ∝ −iλ z*, and ⟨d²⟩ = −e^{iθ}(…) fixes the squeezing phase
            let theta = (C64::new(0.0, lambda) * z.conj()).arg();
            GaussianState::new(C64::new(0.0, 0.0), C64::from_polar(r, theta), r.sinh().powi(2))
        }
    }
}
