//! Drive-power series of observables fitted to full steady-state solves.

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{moment, steady_state, FieldMoments};
use crate::error::{Error, Result};
use crate::fockspace::{build_liouvillian, model_space, ModeSelector, SystemParams, Truncation, C64};
use crate::mixer::mixed_correlator;

/// Largest accepted condition number of the column-normalized design matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Fewest drive samples a fit accepts.
pub const MIN_SAMPLES: usize = 4;

/// Quantity expanded in powers of the drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    /// Population `⟨d†d⟩`.
    #[serde(alias = "n")]
    Population,
    /// `g^(2)`.
    G2,
    /// `g^(3)`.
    G3,
}

impl Observable {
    fn order(self) -> u32 {
        match self {
            Observable::Population => 1,
            Observable::G2 => 2,
            Observable::G3 => 3,
        }
    }
}

/// Field whose statistics are expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "mode")]
pub enum Field {
    /// The full mode operator.
    Mode(ModeSelector),
    /// The fluctuations `d − ⟨d⟩` of the mode.
    Fluctuation(ModeSelector),
}

impl Field {
    fn selector(self) -> ModeSelector {
        match self {
            Field::Mode(s) | Field::Fluctuation(s) => s,
        }
    }
}

/// What to fit and where to sample it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRequest {
    pub observable: Observable,
    pub field: Field,
    /// Exponents of the drive kept in the fit, e.g. `[-4, -2, 0]`.
    pub powers: Vec<i32>,
    /// Drive amplitudes at which the steady state is solved.
    pub drives: Vec<f64>,
    #[serde(default)]
    pub truncation: Truncation,
    /// Largest accepted RMS of the relative fit residual.
    #[serde(default = "default_residual_limit")]
    pub residual_limit: f64,
}

fn default_residual_limit() -> f64 {
    1e-3
}

/// Coefficients of `Σ_k c_k Ω^{p_k}` and fit diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub powers: Vec<i32>,
    pub coefficients: Vec<f64>,
    /// Sampled `(Ω, value)` pairs.
    pub samples: Vec<(f64, f64)>,
    /// RMS of `(fit − value)/value` over the samples.
    pub relative_residual: f64,
    /// Condition number of the column-normalized design matrix.
    pub condition: f64,
}

impl SeriesFit {
    /// Coefficient of a given drive power, if it was fitted.
    pub fn coefficient(&self, power: i32) -> Option<f64> {
        self.powers.iter().position(|p| *p == power).map(|k| self.coefficients[k])
    }

    /// Value of the fitted series at a drive.
    pub fn eval(&self, omega: f64) -> f64 {
        self.powers.iter().zip(&self.coefficients).map(|(p, c)| c * omega.powi(*p)).sum()
    }
}

/// Observable of one field from a full steady-state solve at the model's drive.
pub fn evaluate(
    params: &SystemParams,
    observable: Observable,
    field: Field,
    trunc: Truncation,
) -> Result<f64> {
    let moments = field_moments(params, field.selector(), observable.order(), trunc)?;
    let beta = match field {
        Field::Mode(_) => C64::new(0.0, 0.0),
        Field::Fluctuation(_) => -moments.require(0, 1)?,
    };
    let n = mixed_correlator(&moments, beta, 1, 1)?.re;
    if observable == Observable::Population {
        return Ok(n);
    }
    if !(n > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(n, 0.0) });
    }
    let k = observable.order();
    Ok(mixed_correlator(&moments, beta, k, k)?.re / n.powi(k as i32))
}

/// All moments `⟨d†^p d^q⟩` with `p, q ≤ max_order` from the steady state.
pub fn field_moments(
    params: &SystemParams,
    which: ModeSelector,
    max_order: u32,
    trunc: Truncation,
) -> Result<FieldMoments> {
    let space = model_space(params, trunc)?;
    let mode = space.mode(which)?;
    let rho = steady_state(&build_liouvillian(params, trunc)?)?;
    let mut f = FieldMoments::default();
    for p in 0..=max_order {
        for q in 0..=max_order {
            f.insert(p, q, moment(&rho, mode, p as usize, q as usize));
        }
    }
    Ok(f)
}

/// Least-squares fit of an observable to powers of the drive.
pub fn series_expand(params: &SystemParams, req: &SeriesRequest) -> Result<SeriesFit> {
    if req.drives.len() < MIN_SAMPLES || req.drives.len() < req.powers.len() {
        return Err(Error::Domain(format!(
            "series fit needs at least {} drive samples and one per power",
            MIN_SAMPLES.max(req.powers.len())
        )));
    }
    if req.powers.is_empty() {
        return Err(Error::Domain("series fit needs at least one power".into()));
    }
    if req.drives.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::Domain("drive samples must be positive".into()));
    }
    let samples = req
        .drives
        .iter()
        .map(|&w| Ok((w, evaluate(&params.with_drive(w), req.observable, req.field, req.truncation)?)))
        .collect::<Result<Vec<_>>>()?;
    fit_powers(&samples, &req.powers, req.residual_limit)
}

/// Weighted least squares `value ≈ Σ c_k Ω^{p_k}` with relative weights.
pub fn fit_powers(samples: &[(f64, f64)], powers: &[i32], residual_limit: f64) -> Result<SeriesFit> {
    let (m, k) = (samples.len(), powers.len());
    let weight: Vec<f64> = samples.iter().map(|(_, v)| 1.0 / v.abs().max(f64::MIN_POSITIVE)).collect();
    let raw = Mat::<f64>::from_fn(m, k, |i, j| samples[i].0.powi(powers[j]) * weight[i]);
    let norms: Vec<f64> = (0..k).map(|j| raw.col(j).norm_l2()).collect();
    let a = Mat::<f64>::from_fn(m, k, |i, j| raw[(i, j)] / norms[j]);
    let b = Mat::<f64>::from_fn(m, 1, |i, _| samples[i].1 * weight[i]);

    let sv = a.singular_values().map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let condition = sv[0] / sv[k - 1].max(f64::MIN_POSITIVE);

    let qr = a.qr();
    let q = qr.compute_thin_Q();
    let r = qr.thin_R();
    let qtb = q.transpose() * &b;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[(i, j)] * y[j]).sum();
        y[i] = (qtb[(i, 0)] - s) / r[(i, i)];
    }
    let coefficients: Vec<f64> = y.iter().zip(&norms).map(|(c, n)| c / n).collect();
    let fit = SeriesFit {
        powers: powers.to_vec(),
        coefficients,
        samples: samples.to_vec(),
        relative_residual: 0.0,
        condition,
    };
    let rms = (samples
        .iter()
        .map(|(w, v)| ((fit.eval(*w) - v) / v.abs().max(f64::MIN_POSITIVE)).powi(2))
        .sum::<f64>()
        / m as f64)
        .sqrt();
    if !(condition <= CONDITION_LIMIT) || !(rms <= residual_limit) {
        return Err(Error::WindowTooWide { residual: rms, condition });
    }
    Ok(SeriesFit { relative_residual: rms, ..fit })
}

/// Value at vanishing drive from three samples, exact for `c₀ + c₁Ω² + c₂Ω⁴`.
pub fn extrapolate_limit(samples: &[(f64, f64); 3]) -> Result<f64> {
    let x: Vec<f64> = samples.iter().map(|(w, _)| w * w).collect();
    if x[0] == x[1] || x[1] == x[2] || x[0] == x[2] {
        return Err(Error::Domain("extrapolation needs three distinct drives".into()));
    }
    let mut out = 0.0;
    for i in 0..3 {
        let mut l = 1.0;
        for j in 0..3 {
            if i != j {
                l *= x[j] / (x[j] - x[i]);
            }
        }
        out += l * samples[i].1;
    }
    Ok(out)
}
