//! Steady states and correlators by three independent routes: a full
//! Liouvillian solve, the recursive vanishing-drive hierarchy, and the
//! two-excitation wavefunction approximation.

mod correlators;
mod hierarchy;
mod series;
mod wavefunction;

pub use correlators::{CorrelatorTable, FieldMoments, Key};
pub use hierarchy::{
    adjoint_lindblad, gn_limit, low_drive_correlators, regression_matrix, Poly, RegressionEntry,
    RegressionMatrix,
};
pub use series::{
    evaluate, extrapolate_limit, field_moments, fit_powers, series_expand, Field, Observable,
    SeriesFit, SeriesRequest,
};
pub use wavefunction::{
    rf_sensor_coefficients, rf_sensor_limit, wavefunction_coefficients, SensorSetup,
    WavefunctionCoeffs,
};

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};
use crate::fockspace::{DensityMatrix, Operator, Superoperator, C64, DENSE_DIM_LIMIT};

/// Relative residual above which a steady-state solve is rejected.
const RESIDUAL_LIMIT: f64 = 1e-6;

/// Steady state `Lρ = 0`, `Tr ρ = 1`.
///
/// The row of the vectorized system belonging to the vacuum element `ρ_00`
/// is replaced by the trace constraint. When the generator
/// carries a [`crate::fockspace::Balance`], unknowns and equations are rescaled
/// by powers of the drive so that high-order moments keep full relative
/// precision. Dense LU is used below [`DENSE_DIM_LIMIT`], sparse LU above.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let d = l.dim();
    let n = d * d;
    let weight = |k: usize| -> f64 {
        l.balance().map_or(1.0, |b| b.weight(k % d, k / d))
    };
    // the vacuum diagonal carries the largest balancing weight, so its
    // equation is the one made redundant by trace preservation
    let trace_row = 0;
    let m = l.matrix().as_ref();
    let mut trip = Vec::with_capacity(m.compute_nnz() + d);
    for col in 0..n {
        let wc = weight(col);
        for (r, v) in m.row_idx_of_col_raw(col).iter().zip(m.val_of_col(col)) {
            if *r != trace_row {
                trip.push(Triplet::new(*r, col, v * (wc / weight(*r))));
            }
        }
    }
    for i in 0..d {
        let k = i + i * d;
        trip.push(Triplet::new(trace_row, k, C64::new(weight(k), 0.0)));
    }
    let mut rhs = Mat::<C64>::zeros(n, 1);
    rhs[(trace_row, 0)] = C64::new(1.0, 0.0);

    let x = if d < DENSE_DIM_LIMIT {
        let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?
            .to_dense();
        let x = a.partial_piv_lu().solve(&rhs);
        if !all_finite(&x) || residual(&a, &x, &rhs) > RESIDUAL_LIMIT {
            return Err(ambiguity(&a));
        }
        x
    } else {
        let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|_| Error::AmbiguousSteadyState { nullity: 2, residual: f64::INFINITY })?;
        let x = lu.solve(&rhs);
        if !all_finite(&x) {
            return Err(Error::AmbiguousSteadyState { nullity: 2, residual: f64::INFINITY });
        }
        x
    };
    let rho = Operator::from_fn(d, |i, j| x[(i + j * d, 0)] * weight(i + j * d));
    let tr = rho.trace();
    Ok(rho.scale(tr.inv()))
}

fn all_finite(x: &Mat<C64>) -> bool {
    (0..x.nrows()).all(|i| x[(i, 0)].re.is_finite() && x[(i, 0)].im.is_finite())
}

fn residual(a: &Mat<C64>, x: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let r = a * x - b;
    r.norm_l2() / b.norm_l2().max(f64::MIN_POSITIVE)
}

/// Counts the numerically vanishing singular values of a dense system.
fn ambiguity(a: &Mat<C64>) -> Error {
    let sv = a.singular_values().unwrap_or_default();
    let top = sv.first().copied().unwrap_or(0.0);
    let nullity = sv.iter().filter(|s| **s <= 1e-12 * top).count().max(1);
    Error::AmbiguousSteadyState { nullity, residual: sv.last().copied().unwrap_or(0.0) }
}

/// Relative residual `‖L(ρ)‖ / ‖L‖·‖ρ‖`-style check of a steady state.
pub fn steady_residual(l: &Superoperator, rho: &DensityMatrix) -> f64 {
    l.apply(rho).norm()
}

/// Normally ordered moment `⟨a†^p a^q⟩` of a mode in a state.
pub fn moment(rho: &DensityMatrix, mode: &Operator, p: usize, q: usize) -> C64 {
    let x = &mode.adjoint().pow(p) * &mode.pow(q);
    x.expect(rho)
}

/// Equal-time correlation `g^(N) = ⟨a†^N a^N⟩ / ⟨a†a⟩^N`.
///
/// `N = 1` returns exactly one. A vanishing population is reported with the
/// raw moment that failed normalization.
pub fn gn(rho: &DensityMatrix, mode: &Operator, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("g^(N) needs N >= 1".into()));
    }
    let pop = moment(rho, mode, 1, 1);
    if !(pop.re > f64::MIN_POSITIVE) {
        return Err(Error::UndefinedCorrelation { moment: pop });
    }
    if n == 1 {
        return Ok(1.0);
    }
    Ok(moment(rho, mode, n, n).re / pop.re.powi(n as i32))
}
