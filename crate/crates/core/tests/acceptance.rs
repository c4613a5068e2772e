//! Acceptance gate for the reproduced results. Every criterion prints one
//! `PASS` or `FAIL` line with its measured deviation and runtime, and the
//! process exits non-zero if any criterion fails.
//!
//! Tolerances and runtime bounds are pinned here; known failures and their
//! analysis are recorded in the decisions ledger.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blockade::analytic::{
    ao_extrema, ao_g2_zeros, ao_homodyne, ao_observables, jc_critical_coupling,
    jc_dressed_energies, jc_g2, jc_perfect_ua, pol_g2, rf_homodyne_gn,
};
use blockade::atlas::{dst_g2, grid_minimum, polariton_limit_grid, random_ao, random_jc, random_pol};
use blockade::fockspace::{
    build_liouvillian, model_space, top_level_population, AoParams, JcParams, ModeSelector,
    PolParams, RfParams, SystemParams, Truncation, C64,
};
use blockade::mixer::{minimal_dst_g2, mixed_correlator, optimal_coherent_amplitude};
use blockade::steady::{
    field_moments, gn, gn_limit, series_expand, steady_state, wavefunction_coefficients, Field,
    Observable, SeriesRequest,
};
use blockade::Result;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: String) -> Result<Outcome> {
    Ok(Outcome { passed, summary })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn dst_minimum() -> Result<Outcome> {
    let (r, g2) = grid_minimum(|r| dst_g2(0.3, r), 1e-4, 0.3, 300)?;
    let ok = (g2 - 0.26).abs() <= 0.01 && (r - 0.078).abs() <= 0.005;
    outcome(ok, format!("min g2 = {g2:.4} at r = {r:.4}; expected 0.26 ± 0.01 at 0.078 ± 0.005"))
}

fn optimal_amplitude() -> Result<Outcome> {
    let mut worst = (0.0f64, 0.0f64);
    for r in [0.05, 0.1, 0.2] {
        let (a, g2) = grid_minimum(|a| dst_g2(a, r), 0.0, 2.0, 400)?;
        let expected_a = r.exp() * (r.cosh() * r.sinh()).sqrt();
        let expected_g2 = 1.0 - (-2.0 * r).exp() / (1.0 + (2.0 * r).sinh());
        assert!((expected_a - optimal_coherent_amplitude(r)?).abs() < 1e-12);
        assert!((expected_g2 - minimal_dst_g2(r)?).abs() < 1e-12);
        worst.0 = worst.0.max((a - expected_a).abs());
        worst.1 = worst.1.max((g2 - expected_g2).abs());
    }
    let ok = worst.0 <= 1e-3 && worst.1 <= 1e-6;
    outcome(ok, format!("max |Δ|α|*| = {:.1e} (≤ 1e-3), max |Δg2| = {:.1e} (≤ 1e-6)", worst.0, worst.1))
}

/// `g^(N)` of `s = σ + β` from the steady state, with the laser amplitude
/// `β = −iF e^{iφ} Ω/γ` of the interference conditions.
fn rf_mixed_gn(p: &RfParams, f: f64, phi: f64, n: u32) -> Result<f64> {
    let sys = SystemParams::Rf(*p);
    let m = field_moments(&sys, ModeSelector::Matter, n, Truncation::default())?;
    let beta = -C64::i() * C64::from_polar(f, phi) * p.omega_s / p.gamma_s;
    let pop = mixed_correlator(&m, beta, 1, 1)?.re;
    Ok(mixed_correlator(&m, beta, n, n)?.re / pop.powi(n as i32))
}

fn rf_homodyne_zeros() -> Result<Outcome> {
    let omega = 1e-3;
    let (mut closed, mut numeric) = (0.0f64, 0.0f64);
    for n in 2..=4 {
        let f = 2.0 * f64::from(n);
        closed = closed.max(rf_homodyne_gn(n, f, PI, omega, 1.0, 0.0, 1.0)?.g);
        let p = RfParams { delta_s: 0.0, omega_s: omega, gamma_s: 1.0 };
        numeric = numeric.max(rf_mixed_gn(&p, f, PI, n)?);
    }
    let ok = closed < 1e-10 && numeric < 1e-5;
    outcome(ok, format!("closed form max g(N) = {closed:.1e} (< 1e-10), liouvillian max = {numeric:.2e} (< 1e-5)"))
}

fn table_series() -> Result<Outcome> {
    let rf = SystemParams::Rf(RfParams { delta_s: 0.0, omega_s: 0.01, gamma_s: 1.0 });
    let fit = series_expand(
        &rf,
        &SeriesRequest {
            observable: Observable::G2,
            field: Field::Fluctuation(ModeSelector::Matter),
            powers: vec![-4, -2, 0],
            drives: vec![0.01, 0.02, 0.03, 0.05, 0.07],
            truncation: Truncation::default(),
            residual_limit: 1e-3,
        },
    )?;
    let rf_c = fit.coefficient(-4).expect("fitted power");

    let delta = ao_extrema(1.0, 1.0)?.delta_min;
    let ao = SystemParams::Ao(AoParams { delta_b: delta, u: 1.0, omega_b: 1e-3, gamma_b: 1.0 });
    let fit_ao = |observable, powers: Vec<i32>, lead| -> Result<f64> {
        let req = SeriesRequest {
            observable,
            field: Field::Mode(ModeSelector::Matter),
            powers,
            drives: vec![0.002, 0.004, 0.006, 0.008, 0.01, 0.015, 0.02],
            truncation: Truncation::default(),
            residual_limit: 1e-3,
        };
        Ok(series_expand(&ao, &req)?.coefficient(lead).expect("fitted power"))
    };
    let n_c = fit_ao(Observable::Population, vec![2, 4], 2)?;
    let g2_c = fit_ao(Observable::G2, vec![0, 2], 0)?;
    let g3_c = fit_ao(Observable::G3, vec![0, 2], 0)?;
    let ok = rel(rf_c, 1.0 / 64.0) <= 0.05
        && rel(n_c, 2.89) <= 0.02
        && (g2_c - 0.38).abs() <= 0.01
        && (g3_c - 0.06).abs() <= 0.01;
    outcome(ok, format!("rf Ω⁻⁴ {rf_c:.5} (1/64 ± 5%), ao n {n_c:.4} (2.89 ± 2%), g2 {g2_c:.4} (0.38 ± 0.01), g3 {g3_c:.4} (0.06 ± 0.01)"))
}

fn ao_roots() -> Result<Outcome> {
    let delta = ao_extrema(1.0, 1.0)?.delta_min;
    let roots = ao_g2_zeros(1.0, 1.0, delta)?;
    let quoted = [(0.615, 0.659), (2.907, 0.860)];
    if roots.len() != quoted.len() {
        return outcome(false, format!("found {} roots", roots.len()));
    }
    let p = AoParams { delta_b: delta, u: 1.0, omega_b: 1e-4, gamma_b: 1.0 };
    let mut ok = true;
    let mut notes = Vec::new();
    for ((f, phi), (qf, qphi)) in roots.iter().zip(quoted) {
        let closed = ao_homodyne(&p, *f, *phi, 1.0)?.g2;
        let numeric = ao_mixed_g2(&p, *f, *phi)?;
        let close = (f - qf).abs() <= 1e-2 && (phi / PI - qphi).abs() <= 1e-2;
        ok &= close && closed < 1e-6 && numeric < 1e-6;
        notes.push(format!("({f:.4}, {:.4}π) g2 {closed:.0e}/{numeric:.0e}", phi / PI));
    }
    outcome(ok, format!("roots {} vs (0.615, 0.659π), (2.907, 0.860π) ± 1e-2", notes.join(", ")))
}

/// `g^(2)` of the oscillator mixed with `−iF e^{iφ} Ω_b/γ_b` from the
/// steady state.
fn ao_mixed_g2(p: &AoParams, f: f64, phi: f64) -> Result<f64> {
    let sys = SystemParams::Ao(*p);
    let m = field_moments(&sys, ModeSelector::Matter, 2, Truncation::default())?;
    let beta = -C64::i() * C64::from_polar(f, phi) * p.omega_b / p.gamma_b;
    let pop = mixed_correlator(&m, beta, 1, 1)?.re;
    Ok(mixed_correlator(&m, beta, 2, 2)?.re / (pop * pop))
}

fn jc_perfect_antibunching() -> Result<Outcome> {
    let (g, ga, gs) = (1.0, 0.1, 0.01);
    let (mut closed, mut wf) = (0.0f64, 0.0f64);
    for (da, ds) in jc_perfect_ua(g, ga, gs).expect("strong coupling") {
        let p = JcParams { delta_a: da, delta_s: ds, g, omega_a: 1e-5, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gs };
        closed = closed.max(jc_g2(&p)?);
        wf = wf.max(wavefunction_coefficients(&SystemParams::Jc(p))?.g2_cavity()?);
    }
    // Δσ = 0 needs 4g² = γσ(γσ + γa); units γσ = 1 keep every step exact
    let (ga, gs): (f64, f64) = (100.0, 1.0);
    let g = (gs * (gs + ga)).sqrt() / 2.0;
    let (da, ds) = jc_perfect_ua(g, ga, gs).expect("threshold coupling")[0];
    let at_threshold = jc_g2(&JcParams { delta_a: da, delta_s: ds, g, omega_a: 1e-5, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gs })?;
    let excess = (gs * (gs + ga) - ga * gs) / (ga * gs);
    let ok = closed < 1e-10 && wf < 1e-6 && ds == 0.0 && at_threshold < 1e-10 && excess.abs() <= 1e-2;
    outcome(ok, format!("closed g2 {closed:.0e}, wavefunction g2 {wf:.0e}, Δσ = {ds} at 𝒞 = 1 + {excess}"))
}

/// Cavity and matter `g^(2)` (matter only for models without a cavity) and
/// the top-level population of one steady-state solve at truncation 10.
///
/// Two bosonic modes are cut at 10 quanta in total; the per-mode cut adds
/// only states above that shell at 25 times the cost.
fn liouvillian_g2(sys: &SystemParams) -> Result<(Option<f64>, f64, f64)> {
    let trunc = match sys {
        SystemParams::Pol(_) => Truncation::excitations(10),
        _ => Truncation::uniform(10),
    };
    let space = model_space(sys, trunc)?;
    let rho = steady_state(&build_liouvillian(sys, trunc)?)?;
    let cavity = space.cavity.as_ref().map(|a| gn(&rho, a, 2)).transpose()?;
    Ok((cavity, gn(&rho, &space.matter, 2)?, top_level_population(&rho, &space, sys)))
}

fn triple_oracle() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = (0.0f64, String::new());
    let mut top = 0.0f64;
    let mut judge = |reference: f64, others: [f64; 3], label: &str| {
        let limit = if reference < 1e-3 { 1e-2 } else { 1e-3 };
        for v in others {
            let dev = rel(v, reference) / limit;
            if dev > worst.0 {
                worst = (dev, label.to_string());
            }
        }
    };
    for _ in 0..50 {
        let p = random_jc(&mut rng);
        let sys = SystemParams::Jc(p);
        let (l, _, t) = liouvillian_g2(&sys)?;
        top = top.max(t);
        let others = [gn_limit(&sys, ModeSelector::Cavity, 2)?, wavefunction_coefficients(&sys)?.g2_cavity()?, l.expect("cavity")];
        judge(jc_g2(&p)?, others, "jc");
    }
    for _ in 0..50 {
        let p = random_pol(&mut rng);
        let sys = SystemParams::Pol(p);
        let wf = wavefunction_coefficients(&sys)?;
        let (lc, lm, t) = liouvillian_g2(&sys)?;
        top = top.max(t);
        for (which, wf_g2, l) in [(ModeSelector::Cavity, wf.g2_cavity()?, lc.expect("cavity")), (ModeSelector::Matter, wf.g2_matter()?, lm)] {
            judge(pol_g2(&p, which)?, [gn_limit(&sys, which, 2)?, wf_g2, l], "pol");
        }
    }
    for _ in 0..50 {
        let p = random_ao(&mut rng);
        let sys = SystemParams::Ao(p);
        let (_, l, t) = liouvillian_g2(&sys)?;
        top = top.max(t);
        let others = [gn_limit(&sys, ModeSelector::Matter, 2)?, wavefunction_coefficients(&sys)?.g2_matter()?, l];
        judge(ao_observables(&p).g2, others, "ao");
    }
    let ok = worst.0 <= 1.0 && top < 1e-6;
    outcome(ok, format!("worst deviation {:.2e} of tolerance ({}), top-level population {top:.0e}", worst.0, worst.1))
}

fn polariton_limit() -> Result<Outcome> {
    let (ga, gb, g) = (0.1, 0.01, 1.0);
    let mut worst = (0.0f64, 0.0, 0.0);
    for (wa, wl) in polariton_limit_grid() {
        let pol = PolParams { delta_a: wa - wl, delta_b: -wl, g, u: 1e4 * ga, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_b: gb };
        let jc = JcParams { delta_a: wa - wl, delta_s: -wl, g, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gb };
        let dev = rel(pol_g2(&pol, ModeSelector::Cavity)?, jc_g2(&jc)?);
        if dev > worst.0 {
            worst = (dev, wa, wl);
        }
    }
    outcome(worst.0 <= 1e-2, format!("max relative deviation {:.3e} (≤ 1e-2) at ω_a = {}, ω_L = {:.1}", worst.0, worst.1, worst.2))
}

fn critical_coupling() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut found, mut ok, mut worst) = (0, true, 0.0f64);
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
        ok &= (lo - 1.0) * (hi - 1.0) < 0.0;
        worst = worst.max((mid - 1.0).abs());
    }
    outcome(ok && worst <= 1e-6, format!("20 draws straddle 1: {ok}, max |g2(g_P) − 1| = {worst:.1e} (≤ 1e-6)"))
}

/// Local minimum of `f` on `[a, b]` sampled every `step`.
fn scan_minimum(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, step: f64) -> Result<(f64, f64)> {
    let n = ((b - a) / step).round() as usize;
    let mut best = (a, f64::INFINITY);
    for k in 0..=n {
        let x = a + step * k as f64;
        let v = f(x)?;
        if v < best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

fn finite_drive_washout() -> Result<Outcome> {
    let (g, ga, gs) = (1.0, 0.1, 0.01);
    // the cut through the exact antibunching zero with ω_σ = 0
    let (da, ds) = jc_perfect_ua(g, ga, gs).expect("strong coupling")[1];
    let (wa, wl_ua) = (da - ds, -ds);
    let at = |wl: f64, omega: f64| JcParams { delta_a: wa - wl, delta_s: -wl, g, omega_a: omega, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gs };
    let vanishing = |wl: f64| jc_g2(&at(wl, 1e-4));
    let finite = |wl: f64| -> Result<f64> {
        let sys = SystemParams::Jc(at(wl, 0.25 * ga));
        let (v, _, top) = liouvillian_g2(&sys)?;
        assert!(top < 1e-6, "truncation too small at ω_L = {wl}");
        Ok(v.expect("cavity"))
    };
    let step = 2e-3;
    let (_, ua0) = scan_minimum(&vanishing, wl_ua - 0.1, wl_ua + 0.1, step)?;
    let (_, ua1) = scan_minimum(&finite, wl_ua - 0.1, wl_ua + 0.1, step)?;
    let degradation = ua1 / ua0;
    let mut shifts = Vec::new();
    for c in jc_dressed_energies(1, wa, 0.0, g, ga, gs)?.laser_resonances() {
        let (x0, _) = scan_minimum(&vanishing, c - 0.3, c + 0.3, step)?;
        let (x1, _) = scan_minimum(&finite, c - 0.3, c + 0.3, step)?;
        shifts.push((x1 - x0).abs());
    }
    let max_shift = shifts.iter().copied().fold(0.0, f64::max);
    let ok = degradation > 10.0 && shifts.len() == 2 && max_shift < ga;
    outcome(ok, format!("ω_a = {wa:.4}g: UA dip {ua0:.1e} → {ua1:.1e} ({degradation:.0}× > 10), CA shifts ≤ {max_shift:.1e} (< γa)"))
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 10] = [
        (1, "displaced squeezed minimum", secs(1), dst_minimum),
        (2, "optimal coherent amplitude", secs(1), optimal_amplitude),
        (3, "rf homodyne zeros", secs(10), rf_homodyne_zeros),
        (4, "drive-series coefficients", secs(30), table_series),
        (5, "ao interference roots", secs(5), ao_roots),
        (6, "jc perfect antibunching", secs(5), jc_perfect_antibunching),
        (7, "triple-oracle equivalence", secs(120), triple_oracle),
        (8, "polariton to jc limit", secs(30), polariton_limit),
        (9, "critical coupling crossing", secs(10), critical_coupling),
        (10, "finite-drive washout", secs(60), finite_drive_washout),
    ];
    let mut failures = 0;
    for (k, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, summary) = match result {
            Ok(o) => (o.passed && elapsed < budget, o.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!passed);
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {k} ({name}): {summary}; {:.2} s of {} s", elapsed.as_secs_f64(), budget.as_secs());
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
