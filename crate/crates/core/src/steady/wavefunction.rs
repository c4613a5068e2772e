//! Pure-state approximation at vanishing drive.
//!
//! The state is expanded as `|ψ⟩ = Σ C_{nm} |n⟩_cavity |m⟩_matter` and evolved
//! with `H_eff = H − (i/2) Σ γ_k j_k† j_k`. Because the undriven part of
//! `H_eff` conserves the excitation number, the steady amplitudes follow
//! manifold by manifold: `C_k = −(H_eff|_k)⁻¹ V_{k,k−1} C_{k−1}` with `C_0 = 1`,
//! where `V` is the drive. Drive couplings from `k` down to `k−1` are higher
//! order and dropped.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{
    build_hamiltonian, jump_operators, model_space, ModeKind, ModelSpace, Operator, RfParams,
    SystemParams, Truncation, C64,
};

/// Largest drive, relative to the smallest decay rate, accepted by the solver.
pub const MAX_RELATIVE_DRIVE: f64 = 1e-2;

/// Steady amplitudes `C_{n_cavity, n_matter}` up to a total excitation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionCoeffs {
    /// Amplitudes keyed by `(n_cavity, n_matter)`; single-mode models use `n_cavity = 0`.
    pub amplitudes: BTreeMap<(u32, u32), C64>,
    /// `|C_00|²` after normalizing the truncated state.
    pub vacuum_weight: f64,
}

impl WavefunctionCoeffs {
    /// Amplitude `C_{nm}` (zero when absent).
    pub fn c(&self, n_cavity: u32, n_matter: u32) -> C64 {
        self.amplitudes.get(&(n_cavity, n_matter)).copied().unwrap_or_default()
    }

    /// Cavity population `|C_10|²`.
    pub fn n_cavity(&self) -> f64 {
        self.c(1, 0).norm_sqr()
    }

    /// Matter population `|C_01|²`.
    pub fn n_matter(&self) -> f64 {
        self.c(0, 1).norm_sqr()
    }

    /// `g^(2)` of the cavity, `2|C_20|²/|C_10|⁴`.
    pub fn g2_cavity(&self) -> Result<f64> {
        ratio(self.c(2, 0), self.c(1, 0))
    }

    /// `g^(2)` of the matter mode, `2|C_02|²/|C_01|⁴` (zero for a two-level emitter).
    pub fn g2_matter(&self) -> Result<f64> {
        ratio(self.c(0, 2), self.c(0, 1))
    }

    /// Whether the vacuum dominates, `|C_00|² > 0.99`.
    pub fn is_valid(&self) -> bool {
        self.vacuum_weight > 0.99
    }
}

fn ratio(c2: C64, c1: C64) -> Result<f64> {
    let n = c1.norm_sqr();
    if !(n > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(n, 0.0) });
    }
    Ok(2.0 * c2.norm_sqr() / (n * n))
}

/// Steady two-excitation amplitudes of a driven model.
pub fn wavefunction_coefficients(params: &SystemParams) -> Result<WavefunctionCoeffs> {
    params.validate()?;
    let limit = MAX_RELATIVE_DRIVE * params.min_gamma();
    if params.max_drive() > limit * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name: "drive",
            reason: format!("wavefunction approximation needs drive <= {limit:e}"),
        });
    }
    let trunc = Truncation::uniform(2);
    let space = model_space(params, trunc)?;
    let h = build_hamiltonian(params, trunc)?;
    let h0 = build_hamiltonian(&params.with_drive(0.0), trunc)?;
    let v = &h - &h0;
    let jumps = jump_operators(params, &space);
    solve_manifolds(&space, &h0, &v, &jumps, 2)
}

fn solve_manifolds(
    space: &ModelSpace,
    h0: &Operator,
    v: &Operator,
    jumps: &[(f64, Operator)],
    kmax: usize,
) -> Result<WavefunctionCoeffs> {
    let mut heff = h0.clone();
    for (rate, j) in jumps {
        let jdj = &j.adjoint() * j;
        heff = &heff - &jdj.scale(C64::new(0.0, rate / 2.0));
    }
    let d = space.dim();
    let mut amp = vec![C64::new(0.0, 0.0); d];
    let vac = (0..d).find(|k| space.excitations[*k] == 0).expect("vacuum state");
    amp[vac] = C64::new(1.0, 0.0);
    for k in 1..=kmax {
        let states: Vec<usize> = (0..d).filter(|s| space.excitations[*s] == k).collect();
        let below: Vec<usize> = (0..d).filter(|s| space.excitations[*s] == k - 1).collect();
        let n = states.len();
        let a = Mat::<C64>::from_fn(n, n, |i, j| heff.get(states[i], states[j]));
        let b = Mat::<C64>::from_fn(n, 1, |i, _| {
            below.iter().map(|s| v.get(states[i], *s) * amp[*s]).sum::<C64>()
        });
        let x = a.partial_piv_lu().solve(&b);
        for (i, s) in states.iter().enumerate() {
            amp[*s] = -x[(i, 0)];
            if !amp[*s].re.is_finite() || !amp[*s].im.is_finite() {
                return Err(Error::DegenerateSpectrum { order: k });
            }
        }
    }
    let norm: f64 = amp.iter().map(|c| c.norm_sqr()).sum();
    let amplitudes = (0..d)
        .filter(|s| space.excitations[*s] <= kmax)
        .map(|s| ((space.levels[s].0 as u32, space.levels[s].1 as u32), amp[s]))
        .collect();
    Ok(WavefunctionCoeffs { amplitudes, vacuum_weight: amp[vac].norm_sqr() / norm })
}

/// A two-level emitter whose emission is collected by a resonant sensor
/// cavity that is also fed by an attenuated coherent laser.
///
/// The sensor couples with `T g`, the laser enters as `i R|β| e^{iφ}` with
/// `R|β| = g T Ω_σ F / γ_σ`, and the sensor decays at rate `Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorSetup {
    pub emitter: RfParams,
    pub g: f64,
    pub t: f64,
    pub f: f64,
    pub phi: f64,
    pub gamma_sensor: f64,
}

/// Sensor amplitudes rescaled as `C'_{ij} = (Γ/(2Tg))^i C_{ij}` so that they
/// stay finite when the sensor linewidth diverges.
pub fn rf_sensor_coefficients(s: &SensorSetup) -> Result<WavefunctionCoeffs> {
    SystemParams::Rf(s.emitter).validate()?;
    if !(s.g > 0.0 && s.t > 0.0 && s.gamma_sensor > 0.0 && s.f >= 0.0) {
        return Err(Error::Domain("sensor needs g, T, Γ > 0 and F >= 0".into()));
    }
    let sigma = crate::fockspace::build_mode(ModeKind::TwoLevel)?;
    let a = crate::fockspace::build_mode(ModeKind::Boson { n_max: 2 })?;
    let am = a.kron(&Operator::identity(2));
    let sm = Operator::identity(3).kron(&sigma);
    let space = ModelSpace {
        cavity: Some(am.clone()),
        matter: sm.clone(),
        levels: (0..6).map(|k| (k / 2, k % 2)).collect(),
        excitations: (0..6).map(|k| k / 2 + k % 2).collect(),
        top: (2, 1),
        total: None,
    };
    let e = s.emitter;
    let coupling = s.t * s.g;
    let laser = C64::from_polar(coupling * e.omega_s * s.f / e.gamma_s, s.phi + FRAC_PI_2);
    let amd = am.adjoint();
    let smd = sm.adjoint();
    let h0 = &(&smd * &sm).scale(C64::new(e.delta_s, 0.0))
        + &(&(&amd * &sm) + &(&smd * &am)).scale(C64::new(coupling, 0.0));
    let v = &(&(&smd + &sm).scale(C64::new(e.omega_s, 0.0)) + &amd.scale(laser))
        + &am.scale(laser.conj());
    let jumps = vec![(e.gamma_s, sm), (s.gamma_sensor, am)];
    let raw = solve_manifolds(&space, &h0, &v, &jumps, 2)?;
    let lift = s.gamma_sensor / (2.0 * coupling);
    let amplitudes = raw
        .amplitudes
        .iter()
        .map(|(&(i, j), c)| ((i, j), c * lift.powi(i as i32)))
        .collect();
    Ok(WavefunctionCoeffs { amplitudes, vacuum_weight: raw.vacuum_weight })
}

/// Closed-form rescaled sensor amplitudes in the limit `Γ → ∞`.
pub fn rf_sensor_limit(emitter: &RfParams, f: f64, phi: f64) -> WavefunctionCoeffs {
    let (o, g, d) = (emitter.omega_s, emitter.gamma_s, emitter.delta_s);
    let i = C64::new(0.0, 1.0);
    let z = C64::new(g, 2.0 * d);
    let e = C64::from_polar(1.0, phi);
    let c01 = -2.0 * i * o / z;
    let c10 = o * (e * f / g - 2.0 / z);
    let c11 = -2.0 * i * e * f * o * o / (g * z);
    let c20 = e * f * o * o / (g * g * z) * (e * f * z - 4.0 * g);
    let mut amplitudes = BTreeMap::new();
    amplitudes.insert((0, 0), C64::new(1.0, 0.0));
    amplitudes.insert((0, 1), c01);
    amplitudes.insert((1, 0), c10);
    amplitudes.insert((1, 1), c11);
    amplitudes.insert((2, 0), c20);
    let norm: f64 = amplitudes.values().map(|c| c.norm_sqr()).sum();
    WavefunctionCoeffs { amplitudes, vacuum_weight: 1.0 / norm }
}
