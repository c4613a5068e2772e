//! The generated correlator hierarchy against the printed matrix-element
//! rules, and the recursive solution against independent routes.

use std::collections::BTreeMap;

use approx::assert_relative_eq;
use blockade::analytic::{jc_populations, rf_steady};
use blockade::fockspace::{JcParams, ModeSelector, PolParams, RfParams, SystemParams, C64};
use blockade::steady::{
    adjoint_lindblad, gn_limit, low_drive_correlators, regression_matrix, wavefunction_coefficients,
    Key,
};

type Row = BTreeMap<Key, C64>;

fn add(row: &mut Row, key: [i64; 4], coef: C64, two_level: bool) {
    let valid = key.iter().all(|k| *k >= 0) && (!two_level || (key[0] <= 1 && key[1] <= 1));
    if valid && coef != C64::new(0.0, 0.0) {
        let key = key.map(|k| k as u32);
        *row.entry(key).or_insert(C64::new(0.0, 0.0)) += coef;
    }
}

/// Printed rules for a two-level emitter coupled to a cavity, with the
/// emitter drive `Ω_σ` and the cavity drive `Ω_a` in phase.
fn printed_two_level(p: &JcParams, omega_s: f64, key: Key) -> Row {
    let i = C64::i();
    let [m, n, mu, nu] = key.map(i64::from);
    let (mf, nf, muf, nuf) = (m as f64, n as f64, mu as f64, nu as f64);
    let (g, oa) = (p.g, p.omega_a);
    let mut row = Row::new();
    let diag = C64::new(
        -0.5 * p.gamma_a * (muf + nuf) - 0.5 * p.gamma_s * (mf + nf),
        (muf - nuf) * p.delta_a + (mf - nf) * p.delta_s,
    );
    add(&mut row, [m, n, mu, nu], diag, true);
    add(&mut row, [1 - m, n, mu, nu], i * omega_s * (mf + 2.0 * nf * (1.0 - mf)), true);
    add(&mut row, [m, 1 - n, mu, nu], -i * omega_s * (nf + 2.0 * mf * (1.0 - nf)), true);
    add(&mut row, [m, n, mu - 1, nu], i * oa * muf, true);
    add(&mut row, [m, n, mu, nu - 1], -i * oa * nuf, true);
    add(&mut row, [m, 1 - n, mu, nu - 1], -i * g * (1.0 - nf) * nuf, true);
    add(&mut row, [1 - m, n, mu - 1, nu], i * g * (1.0 - mf) * muf, true);
    add(&mut row, [m, 1 - n, mu, nu + 1], -i * g * nf, true);
    add(&mut row, [1 - m, n, mu + 1, nu], i * g * mf, true);
    add(&mut row, [1 - m, n, mu, nu + 1], 2.0 * i * nf * g * (1.0 - mf), true);
    // printed as −2i n g(1−m); the conjugate of the rule above is −2i m g(1−n)
    add(&mut row, [m, 1 - n, mu + 1, nu], -2.0 * i * mf * g * (1.0 - nf), true);
    row
}

/// Printed rules for a Kerr exciton coupled to a cavity driven at `Ω_a`.
fn printed_polariton(p: &PolParams, key: Key) -> Row {
    let i = C64::i();
    let [m, n, mu, nu] = key.map(i64::from);
    let (mf, nf, muf, nuf) = (m as f64, n as f64, mu as f64, nu as f64);
    let (g, oa, u) = (p.g, p.omega_a, p.u);
    let mut row = Row::new();
    let diag = C64::new(
        -0.5 * p.gamma_a * (muf + nuf) - 0.5 * p.gamma_b * (mf + nf),
        (muf - nuf) * p.delta_a + (mf - nf) * p.delta_b + 0.5 * u * (mf * (mf - 1.0) - nf * (nf - 1.0)),
    );
    add(&mut row, [m, n, mu, nu], diag, false);
    add(&mut row, [m, n, mu - 1, nu], i * oa * muf, false);
    add(&mut row, [m, n, mu, nu - 1], -i * oa * nuf, false);
    add(&mut row, [m + 1, n, mu - 1, nu], i * g * muf, false);
    add(&mut row, [m, n + 1, mu, nu - 1], -i * g * nuf, false);
    add(&mut row, [m - 1, n, mu + 1, nu], i * g * mf, false);
    add(&mut row, [m, n - 1, mu, nu + 1], -i * g * nf, false);
    add(&mut row, [m + 1, n + 1, mu, nu], i * u * (mf - nf), false);
    row
}

fn generated(params: &SystemParams, key: Key) -> Row {
    let mut row = Row::new();
    for (col, _, coef) in adjoint_lindblad(params, key).iter() {
        *row.entry(col).or_insert(C64::new(0.0, 0.0)) += coef;
    }
    row.retain(|_, c| c.norm() > 1e-14);
    row
}

fn assert_rows_equal(a: &Row, b: &Row, key: Key) {
    let cols: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    for col in cols {
        let (x, y) = (a.get(col).copied().unwrap_or_default(), b.get(col).copied().unwrap_or_default());
        assert!((x - y).norm() < 1e-12, "row {key:?}, column {col:?}: generated {x}, printed {y}");
    }
}

#[test]
fn two_level_rules_match_printed_elements() {
    let p = JcParams {
        delta_a: 0.37,
        delta_s: -0.81,
        g: 1.3,
        omega_a: 0.2,
        chi: 0.7,
        phi: 0.0,
        gamma_a: 0.45,
        gamma_s: 0.12,
    };
    let omega_s = p.chi * p.omega_a;
    for m in 0..=1 {
        for n in 0..=1 {
            for mu in 0..=3 {
                for nu in 0..=3 {
                    let key = [m, n, mu, nu];
                    assert_rows_equal(&generated(&SystemParams::Jc(p), key), &printed_two_level(&p, omega_s, key), key);
                }
            }
        }
    }
}

#[test]
fn resonance_fluorescence_rules_are_the_cavity_free_case() {
    let rf = RfParams { delta_s: 0.4, omega_s: 0.3, gamma_s: 1.1 };
    let jc = JcParams {
        delta_a: 0.0,
        delta_s: rf.delta_s,
        g: 0.0,
        omega_a: 0.0,
        chi: 0.0,
        phi: 0.0,
        gamma_a: 1.0,
        gamma_s: rf.gamma_s,
    };
    for key in [[0, 1, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0]] {
        assert_rows_equal(&generated(&SystemParams::Rf(rf), key), &printed_two_level(&jc, rf.omega_s, key), key);
    }
}

#[test]
fn polariton_rules_match_printed_elements() {
    let p = PolParams {
        delta_a: -0.6,
        delta_b: 0.25,
        g: 0.9,
        u: 1.7,
        omega_a: 0.15,
        chi: 0.0,
        phi: 0.0,
        gamma_a: 0.3,
        gamma_b: 0.08,
    };
    for m in 0..=3 {
        for n in 0..=3 {
            for mu in 0..=3 {
                for nu in 0..=3 {
                    let key = [m, n, mu, nu];
                    assert_rows_equal(&generated(&SystemParams::Pol(p), key), &printed_polariton(&p, key), key);
                }
            }
        }
    }
}

#[test]
fn blocks_hold_every_monomial_of_their_order() {
    let jc = SystemParams::Jc(JcParams {
        delta_a: 0.1,
        delta_s: 0.2,
        g: 1.0,
        omega_a: 1e-3,
        chi: 0.0,
        phi: 0.0,
        gamma_a: 0.5,
        gamma_s: 0.5,
    });
    let reg = regression_matrix(&jc, 4).unwrap();
    for (b, keys) in reg.blocks.iter().enumerate() {
        let total = b as u32 + 1;
        // two-level exponents are 0 or 1, so count (m, n, μ, ν) with m + n + μ + ν = total
        let expected = (0..=1u32)
            .flat_map(|m| (0..=1u32).map(move |n| (m, n)))
            .filter(|(m, n)| m + n <= total)
            .map(|(m, n)| total - m - n + 1)
            .sum::<u32>() as usize;
        assert_eq!(keys.len(), expected, "block {total}");
        assert!(keys.iter().all(|k| k.iter().sum::<u32>() == total));
    }
}

#[test]
fn leading_moments_match_heitler_limit() {
    let (omega, gamma, delta) = (1e-3, 0.8, 0.3);
    let t = low_drive_correlators(&SystemParams::Rf(RfParams { delta_s: delta, omega_s: omega, gamma_s: gamma }), 2).unwrap();
    let exact = rf_steady(omega, gamma, delta);
    assert_relative_eq!(t.require([0, 1, 0, 0]).unwrap().re, exact.alpha.re, max_relative = 1e-5);
    assert_relative_eq!(t.require([0, 1, 0, 0]).unwrap().im, exact.alpha.im, max_relative = 1e-5);
    assert_relative_eq!(t.require([1, 1, 0, 0]).unwrap().re, exact.n_sigma, max_relative = 1e-5);
    assert_eq!(t.drive_order([1, 1, 0, 0]), Some(2));
}

#[test]
fn jc_moments_match_closed_populations_and_wavefunction() {
    let p = JcParams {
        delta_a: 0.4,
        delta_s: -0.2,
        g: 0.8,
        omega_a: 1e-3,
        chi: 0.5,
        phi: 1.1,
        gamma_a: 0.6,
        gamma_s: 0.3,
    };
    let sys = SystemParams::Jc(p);
    let t = low_drive_correlators(&sys, 4).unwrap();
    let pops = jc_populations(&p);
    assert_relative_eq!(t.require([0, 0, 1, 1]).unwrap().re, pops.n_a, max_relative = 1e-10);
    assert_relative_eq!(t.require([1, 1, 0, 0]).unwrap().re, pops.n_sigma, max_relative = 1e-10);
    let wf = wavefunction_coefficients(&sys).unwrap();
    assert_relative_eq!(gn_limit(&sys, ModeSelector::Cavity, 2).unwrap(), wf.g2_cavity().unwrap(), max_relative = 1e-8);
    assert!(t.conjugation_defect() < 1e-12);
}
