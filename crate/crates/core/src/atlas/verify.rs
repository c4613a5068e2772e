//! Self-checks run by `blockade verify`: algebraic identities, agreement of
//! independent engines, and published landmark values.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    ao_decompose, ao_extrema, ao_g2_zeros, ao_homodyne, ao_observables, jc_critical_coupling,
    jc_g2, jc_g2_decomposition, jc_perfect_ua, pol_g2, pol_g2_decomposition, rf_decompose,
    rf_homodyne_gn, rf_steady,
};
use crate::error::{Error, Result};
use crate::fockspace::{
    build_liouvillian, model_space, AoParams, JcParams, ModeSelector, PolParams, RfParams,
    SystemParams, Truncation, C64,
};
use crate::mixer::{
    decompose_g2, decompose_g3, dst_g2_terms, dst_observables, minimal_dst_g2,
    optimal_coherent_amplitude, GaussianState,
};
use crate::steady::{
    gn, gn_limit, low_drive_correlators, moment, steady_state, wavefunction_coefficients,
};

/// Default tolerance of the identities suite.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Default tolerance of the oracles suite; ten times larger where `g^(2) < 1e-3`.
pub const ORACLE_TOL: f64 = 1e-3;

/// Random draws per system in the oracles suite.
pub const ORACLE_DRAWS: usize = 50;

/// Draws per system also solved with the full Liouvillian.
pub const LIOUVILLIAN_DRAWS: usize = 4;

/// Drive of the Liouvillian oracle.
pub const LIOUVILLIAN_DRIVE: f64 = 1e-4;

/// A group of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Oracles,
    Landmarks,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Identities => "identities",
            Suite::Oracles => "oracles",
            Suite::Landmarks => "landmarks",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "oracles" => Ok(Suite::Oracles),
            "landmarks" => Ok(Suite::Landmarks),
            _ => Err(Error::Config(format!(
                "unknown suite `{s}`; expected identities, oracles or landmarks"
            ))),
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Engines or formulas compared.
    pub engines: Vec<String>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_s: f64,
    /// Free-text context, e.g. the failing point.
    pub note: String,
}

/// All checks of one suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Check {
    name: &'static str,
    engines: &'static [&'static str],
    tolerance: f64,
    start: Instant,
}

impl Check {
    fn new(name: &'static str, engines: &'static [&'static str], tolerance: f64) -> Self {
        Self { name, engines, tolerance, start: Instant::now() }
    }

    /// Finishes with the largest deviation and a note on where it occurred.
    /// An engine error fails the check with infinite deviation.
    fn finish(self, outcome: Result<(f64, String)>) -> CheckResult {
        let (dev, note) = outcome.unwrap_or_else(|e| (f64::INFINITY, format!("error: {e}")));
        CheckResult {
            name: self.name.to_string(),
            engines: self.engines.iter().map(|s| s.to_string()).collect(),
            max_deviation: dev,
            tolerance: self.tolerance,
            passed: dev <= self.tolerance,
            runtime_s: self.start.elapsed().as_secs_f64(),
            note,
        }
    }
}

/// Tracks the largest deviation and where it happened.
#[derive(Default)]
struct Worst {
    dev: f64,
    note: String,
}

impl Worst {
    fn see(&mut self, dev: f64, note: impl FnOnce() -> String) {
        if !(dev <= self.dev) {
            self.dev = dev;
            self.note = note();
        }
    }

    fn done(self) -> Result<(f64, String)> {
        Ok((self.dev, self.note))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Residual of `1 + Σ terms = total`, relative to the size of the terms.
fn identity_residual(terms: &[f64], total: f64) -> f64 {
    let sum: f64 = 1.0 + terms.iter().sum::<f64>();
    (sum - total).abs() / (1.0 + terms.iter().map(|t| t.abs()).sum::<f64>())
}

/// Runs one suite. `tol` overrides the default tolerance of the identities
/// and oracles suites; landmark tolerances are fixed.
pub fn verify(suite: Suite, seed: u64, tol: Option<f64>) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match suite {
        Suite::Identities => identities(&mut rng, tol.unwrap_or(IDENTITY_TOL)),
        Suite::Oracles => oracles(&mut rng, tol.unwrap_or(ORACLE_TOL)),
        Suite::Landmarks => landmarks(&mut rng),
    };
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport { suite, seed, checks, passed }
}

/// Random JC parameters on the ranges used by every suite.
pub fn random_jc(rng: &mut impl Rng) -> JcParams {
    JcParams {
        delta_a: rng.random_range(-2.0..2.0),
        delta_s: rng.random_range(-2.0..2.0),
        g: rng.random_range(0.1..2.0),
        omega_a: LIOUVILLIAN_DRIVE,
        chi: rng.random_range(0.0..2.0),
        phi: rng.random_range(0.0..2.0 * PI),
        gamma_a: rng.random_range(0.1..1.5),
        gamma_s: rng.random_range(0.1..1.5),
    }
}

/// Random polariton parameters.
pub fn random_pol(rng: &mut impl Rng) -> PolParams {
    PolParams {
        delta_a: rng.random_range(-2.0..2.0),
        delta_b: rng.random_range(-2.0..2.0),
        g: rng.random_range(0.1..2.0),
        u: rng.random_range(0.1..5.0),
        omega_a: LIOUVILLIAN_DRIVE,
        chi: rng.random_range(0.0..2.0),
        phi: rng.random_range(0.0..2.0 * PI),
        gamma_a: rng.random_range(0.1..1.5),
        gamma_b: rng.random_range(0.1..1.5),
    }
}

/// Random Kerr-oscillator parameters.
pub fn random_ao(rng: &mut impl Rng) -> AoParams {
    AoParams {
        delta_b: rng.random_range(-2.0..2.0),
        u: rng.random_range(0.1..5.0),
        omega_b: LIOUVILLIAN_DRIVE,
        gamma_b: rng.random_range(0.1..2.0),
    }
}

fn identities(rng: &mut ChaCha8Rng, tol: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let c = Check::new("jc g2 decomposition sums to g2", &["jc_g2_decomposition", "jc_g2"], tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..ORACLE_DRAWS {
            let p = JcParams { chi: 0.0, phi: 0.0, ..random_jc(rng) };
            let (d, g2) = (jc_g2_decomposition(&p)?, jc_g2(&p)?);
            w.see(identity_residual(&[d.i0, d.i1, d.i2], g2), || format!("{p:?}"));
        }
        w.done()
    })()));

    let c = Check::new("pol g2 decomposition sums to g2", &["pol_g2_decomposition", "pol_g2"], tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..ORACLE_DRAWS {
            let p = PolParams { chi: 0.0, phi: 0.0, ..random_pol(rng) };
            let (d, g2) = (pol_g2_decomposition(&p)?, pol_g2(&p, ModeSelector::Cavity)?);
            w.see(identity_residual(&[d.i0, d.i1, d.i2], g2), || format!("{p:?}"));
        }
        w.done()
    })()));

    let c = Check::new("ao g2 decomposition sums to g2", &["ao_decompose", "ao_observables"], tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..ORACLE_DRAWS {
            let p = random_ao(rng);
            let d = ao_decompose(p.u, p.gamma_b, p.delta_b);
            w.see(identity_residual(&[d.i0, d.i1, d.i2], ao_observables(&p).g2), || format!("{p:?}"));
        }
        w.done()
    })()));

    let c = Check::new("rf g2 decomposition sums to zero", &["rf_decompose"], tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..ORACLE_DRAWS {
            let (omega, gamma, delta) =
                (rng.random_range(0.01..3.0), rng.random_range(0.1..2.0), rng.random_range(-2.0..2.0));
            let d = rf_decompose(omega, gamma, delta)?;
            w.see(identity_residual(&[d.i0, d.i1, d.i2], 0.0), || format!("Ω={omega} γ={gamma} Δ={delta}"));
        }
        w.done()
    })()));

    let c = Check::new("dst g2 terms sum to g2", &["dst_g2_terms", "dst_observables"], tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..ORACLE_DRAWS {
            let alpha = C64::from_polar(rng.random_range(0.05..2.0), rng.random_range(0.0..2.0 * PI));
            let xi = C64::from_polar(rng.random_range(0.01..1.0), rng.random_range(0.0..2.0 * PI));
            let terms = dst_g2_terms(alpha, xi)?;
            let g2 = dst_observables(&GaussianState::admixture(alpha, xi))?.g2;
            w.see(identity_residual(&[terms.i0, terms.i1, terms.i2], g2), || format!("α={alpha} ξ={xi}"));
        }
        w.done()
    })()));

    let c = Check::new(
        "self-homodyne split of hierarchy moments",
        &["decompose_g2", "decompose_g3", "low_drive_correlators"],
        tol,
    );
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..ORACLE_DRAWS {
            let p = random_pol(rng);
            let m = low_drive_correlators(&SystemParams::Pol(p), 6)?.field(ModeSelector::Cavity);
            let n = m.require(1, 1)?.re;
            let alpha = m.require(0, 1)?;
            let g2 = m.require(2, 2)?.re / (n * n);
            let g3 = m.require(3, 3)?.re / (n * n * n);
            let d2 = decompose_g2(alpha, &m)?;
            let d3 = decompose_g3(alpha, &m)?;
            w.see(identity_residual(&[d2.i0, d2.i1, d2.i2], g2), || format!("g2 at {p:?}"));
            w.see(identity_residual(&d3.j, g3), || format!("g3 at {p:?}"));
        }
        w.done()
    })()));

    out
}

fn liouvillian_g2(p: &SystemParams, which: ModeSelector, trunc: usize) -> Result<f64> {
    let trunc = Truncation::uniform(trunc);
    let rho = steady_state(&build_liouvillian(p, trunc)?)?;
    let space = model_space(p, trunc)?;
    gn(&rho, space.mode(which)?, 2)
}

/// Compares a reference `g^(2)` with other engines and records the worst
/// relative deviation scaled by the tolerance that applies.
fn compare(w: &mut Worst, tol: f64, reference: f64, others: &[(&str, f64)], at: &dyn Fn() -> String) {
    let limit = if reference < 1e-3 { 10.0 * tol } else { tol };
    for (name, v) in others {
        // normalized so that the check passes when the scaled deviation is <= tol
        w.see(rel(*v, reference) * tol / limit, || format!("{name} at {}", at()));
    }
}

fn oracles(rng: &mut ChaCha8Rng, tol: f64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let engines: &[&str] = &["analytic", "recursive", "wavefunction", "liouvillian"];

    let c = Check::new("jc cavity g2 across engines", engines, tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for k in 0..ORACLE_DRAWS {
            let p = random_jc(rng);
            let sys = SystemParams::Jc(p);
            let a = jc_g2(&p)?;
            let mut others = vec![
                ("recursive", gn_limit(&sys, ModeSelector::Cavity, 2)?),
                ("wavefunction", wavefunction_coefficients(&sys)?.g2_cavity()?),
            ];
            if k < LIOUVILLIAN_DRAWS {
                others.push(("liouvillian", liouvillian_g2(&sys, ModeSelector::Cavity, 6)?));
            }
            compare(&mut w, tol, a, &others, &|| format!("{p:?}"));
        }
        w.done()
    })()));

    let c = Check::new("pol cavity and exciton g2 across engines", engines, tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for k in 0..ORACLE_DRAWS {
            let p = random_pol(rng);
            let sys = SystemParams::Pol(p);
            let wf = wavefunction_coefficients(&sys)?;
            for which in [ModeSelector::Cavity, ModeSelector::Matter] {
                let a = pol_g2(&p, which)?;
                let wf_g2 = match which {
                    ModeSelector::Cavity => wf.g2_cavity()?,
                    ModeSelector::Matter => wf.g2_matter()?,
                };
                let mut others = vec![("recursive", gn_limit(&sys, which, 2)?), ("wavefunction", wf_g2)];
                if k < LIOUVILLIAN_DRAWS {
                    others.push(("liouvillian", liouvillian_g2(&sys, which, 5)?));
                }
                compare(&mut w, tol, a, &others, &|| format!("{which:?} {p:?}"));
            }
        }
        w.done()
    })()));

    let c = Check::new("ao g2 across engines", engines, tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for k in 0..ORACLE_DRAWS {
            let p = random_ao(rng);
            let sys = SystemParams::Ao(p);
            let a = ao_observables(&p).g2;
            let mut others = vec![
                ("recursive", gn_limit(&sys, ModeSelector::Matter, 2)?),
                ("wavefunction", wavefunction_coefficients(&sys)?.g2_matter()?),
            ];
            if k < LIOUVILLIAN_DRAWS {
                others.push(("liouvillian", liouvillian_g2(&sys, ModeSelector::Matter, 10)?));
            }
            compare(&mut w, tol, a, &others, &|| format!("{p:?}"));
        }
        w.done()
    })()));

    let c = Check::new("rf steady state against liouvillian", &["analytic", "liouvillian"], tol);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for _ in 0..LIOUVILLIAN_DRAWS * 2 {
            let p = RfParams {
                delta_s: rng.random_range(-2.0..2.0),
                omega_s: rng.random_range(0.01..3.0),
                gamma_s: rng.random_range(0.1..2.0),
            };
            let sys = SystemParams::Rf(p);
            let trunc = Truncation::default();
            let rho = steady_state(&build_liouvillian(&sys, trunc)?)?;
            let space = model_space(&sys, trunc)?;
            let s = space.mode(ModeSelector::Matter)?;
            let exact = rf_steady(p.omega_s, p.gamma_s, p.delta_s);
            w.see(rel(moment(&rho, s, 1, 1).re, exact.n_sigma), || format!("n at {p:?}"));
            w.see((moment(&rho, s, 0, 1) - exact.alpha).norm() / exact.alpha.norm(), || {
                format!("⟨σ⟩ at {p:?}")
            });
        }
        w.done()
    })()));

    out
}

/// `g^(2)` of the displaced squeezed vacuum with `θ = 2φ`.
pub fn dst_g2(alpha: f64, r: f64) -> Result<f64> {
    Ok(dst_observables(&GaussianState::admixture(C64::new(alpha, 0.0), C64::new(r, 0.0)))?.g2)
}

/// Minimum `(x, f(x))` over `[a, b]`: the best of `n + 1` grid points,
/// refined by golden-section search between its neighbours to `1e-12`.
pub fn grid_minimum(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, n: usize) -> Result<(f64, f64)> {
    let step = (b - a) / n as f64;
    let mut best = (0, f64::INFINITY);
    for k in 0..=n {
        let v = f(a + step * k as f64)?;
        if v < best.1 {
            best = (k, v);
        }
    }
    let (mut lo, mut hi) = (a + step * best.0.saturating_sub(1) as f64, a + step * (best.0 + 1).min(n) as f64);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-12 {
        if f1 < f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    let v = f(x)?;
    Ok(if v <= best.1 { (x, v) } else { (a + step * best.0 as f64, best.1) })
}

fn landmarks(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let c = Check::new("dst minimum at |α| = 0.3: g2 = 0.26 (±0.01), r = 0.078 (±0.005)", &["dst_observables"], 1.0);
    out.push(c.finish((|| {
        let (r, g2) = grid_minimum(|r| dst_g2(0.3, r), 1e-4, 0.3, 300)?;
        let dev = ((g2 - 0.26).abs() / 0.01).max((r - 0.078).abs() / 0.005);
        Ok((dev, format!("minimum g2 = {g2:.5} at r = {r:.5}; deviation in units of tolerance")))
    })()));

    let c = Check::new("optimal coherent amplitude and minimal g2", &["dst_observables", "closed form"], 1.0);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for r in [0.05, 0.1, 0.2] {
            let (a, g2) = grid_minimum(|a| dst_g2(a, r), 0.0, 2.0, 400)?;
            let da = (a - optimal_coherent_amplitude(r)?).abs() / 1e-3;
            let dg = (g2 - minimal_dst_g2(r)?).abs() / 1e-6;
            w.see(da.max(dg), || format!("r = {r}: |α|* = {a:.5}, g2 = {g2:.8}"));
        }
        w.done()
    })()));

    let c = Check::new("rf homodyne zeros at F = 2N, φ = π", &["rf_homodyne_gn"], 1e-10);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for n in 2..=4 {
            let g = rf_homodyne_gn(n, 2.0 * f64::from(n), PI, 1e-3, 1.0, 0.0, 1.0)?.g;
            w.see(g, || format!("N = {n}"));
        }
        w.done()
    })()));

    let c = Check::new("ao interference roots at U = γ, Δ = Δ₋", &["ao_g2_zeros", "ao_homodyne"], 1.0);
    out.push(c.finish((|| {
        let delta = ao_extrema(1.0, 1.0)?.delta_min;
        let roots = ao_g2_zeros(1.0, 1.0, delta)?;
        let quoted = [(0.615, 0.659), (2.907, 0.860)];
        if roots.len() != 2 {
            return Ok((f64::INFINITY, format!("found {} roots", roots.len())));
        }
        let mut w = Worst::default();
        let p = AoParams { delta_b: delta, u: 1.0, omega_b: 1e-4, gamma_b: 1.0 };
        for ((f, phi), (qf, qphi)) in roots.iter().zip(quoted) {
            let g2 = ao_homodyne(&p, *f, *phi, 1.0)?.g2;
            let dev = ((f - qf).abs() / 1e-2).max((phi / PI - qphi).abs() / 1e-2).max(g2 / 1e-6);
            w.see(dev, || format!("root (F, φ/π) = ({f:.5}, {:.5}) with g2 = {g2:.1e}", phi / PI));
        }
        w.done()
    })()));

    let c = Check::new("jc perfect antibunching and cooperativity one", &["jc_perfect_ua", "jc_g2", "wavefunction"], 1.0);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        let (g, ga, gs) = (1.0, 0.1, 0.01);
        for (da, ds) in jc_perfect_ua(g, ga, gs).unwrap_or_default() {
            let p = JcParams { delta_a: da, delta_s: ds, g, omega_a: 1e-5, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gs };
            let closed = jc_g2(&p)?;
            let wf = wavefunction_coefficients(&SystemParams::Jc(p))?.g2_cavity()?;
            w.see((closed / 1e-10).max(wf / 1e-6), || format!("Δa = {da:.5}, Δσ = {ds:.5}: g2 = {closed:.1e}, {wf:.1e}"));
        }
        // Δσ = 0 where 4g² = γσ(γσ + γa); units γσ = 1 keep every step exact
        let (ga, gs): (f64, f64) = (100.0, 1.0);
        let g_sq = gs * (gs + ga) / 4.0;
        let excess = (4.0 * g_sq - ga * gs) / (ga * gs);
        w.see(excess.abs() / 1e-2, || format!("cooperativity 1 + {excess} where Δσ = 0"));
        w.done()
    })()));

    let c = Check::new("polariton g2 approaches jc at U = 1e4 γa", &["pol_g2", "jc_g2"], 1e-2);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        for (wa, wl) in polariton_limit_grid() {
            let (ga, gb, g) = (0.1, 0.01, 1.0);
            let pol = PolParams { delta_a: wa - wl, delta_b: -wl, g, u: 1e4 * ga, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_b: gb };
            let jc = JcParams { delta_a: wa - wl, delta_s: -wl, g, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gb };
            let (a, b) = (pol_g2(&pol, ModeSelector::Cavity)?, jc_g2(&jc)?);
            w.see(rel(a, b), || format!("ω_a = {wa}, ω_L = {wl}: pol {a:e}, jc {b:e}"));
        }
        w.done()
    })()));

    let c = Check::new("g_P crossing of the cavity g2", &["jc_critical_coupling", "jc_g2"], 1.0);
    out.push(c.finish((|| {
        let mut w = Worst::default();
        let mut found = 0;
        while found < 20 {
            let (ga, gs, da, ds) = (
                rng.random_range(0.1..2.0),
                rng.random_range(0.1..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let Some(gp) = jc_critical_coupling(ga, gs, da, ds).filter(|g| *g > 0.0) else { continue };
            found += 1;
            let at = |g: f64| jc_g2(&JcParams { delta_a: da, delta_s: ds, g, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gs });
            let (lo, mid, hi) = (at(gp * 0.999)?, at(gp)?, at(gp * 1.001)?);
            let straddles = (lo - 1.0) * (hi - 1.0) < 0.0;
            let dev = if straddles { (mid - 1.0).abs() / 1e-6 } else { f64::INFINITY };
            w.see(dev, || format!("g_P = {gp}: g2 = {lo}, {mid}, {hi}"));
        }
        w.done()
    })()));

    out
}

/// The 21×21 `(ω_a, ω_L)` grid, in units of `g` with `ω_b = 0`, of the
/// polariton-to-JC comparison.
pub fn polariton_limit_grid() -> Vec<(f64, f64)> {
    let axis = |lo: f64, hi: f64| (0..21).map(move |k| lo + (hi - lo) * k as f64 / 20.0);
    axis(-10.0, 10.0).flat_map(|wa| axis(-2.0, 2.0).map(move |wl| (wa, wl))).collect()
}
