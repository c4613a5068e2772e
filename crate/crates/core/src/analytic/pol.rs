//! Microcavity polaritons: a cavity coupled to a Kerr exciton mode.

use faer::Mat;

use super::{
    scan_half_width, scan_roots, DressedLevels, FeatureCondition, FeatureKind, FeatureWindow,
    Locus,
};
use crate::error::{Error, Result};
use crate::fockspace::{ModeSelector, PolParams, C64};
use crate::mixer::DecompositionG2;

fn width(gamma: f64, delta: f64) -> f64 {
    gamma * gamma + 4.0 * delta * delta
}

/// Vanishing-drive `g^(2)` of the cavity or the exciton for arbitrary drive
/// ratio `χ` and phase `φ`.
///
/// The exciton value does not depend on `χ` or `φ`.
pub fn pol_g2(p: &PolParams, which: ModeSelector) -> Result<f64> {
    let PolParams { delta_a: da, delta_b: db, g, u, chi, phi, gamma_a: ga, gamma_b: gb, .. } = *p;
    let (c, s, c2, s2) = (phi.cos(), phi.sin(), (2.0 * phi).cos(), (2.0 * phi).sin());
    let (wa, wb) = (width(ga, da), width(gb, db));
    let g11 = ga + gb;
    let d11 = da + db;
    let w11 = g11 * g11 + 4.0 * d11 * d11;
    let u12 = u + 2.0 * db;
    let d13 = da + 3.0 * db;
    let d12 = da + 2.0 * db;
    let d1m1 = da - db;
    let g12 = ga + 2.0 * gb;
    let (g2, g4) = (g * g, g.powi(4));
    let kerr = gb * gb + u12 * u12;

    let pp = 16.0 * g4 + 8.0 * g2 * (ga * gb - 4.0 * da * db) + wa * wb;
    let dp = wa * w11 * kerr
        + 16.0 * g4 * (g11 * g11 + (u + 2.0 * d11).powi(2))
        + 8.0 * g2
            * (u * u * (ga * g11 - 4.0 * da * d11) + w11 * (ga * gb - 4.0 * da * db)
                - 2.0 * u * (ga * ga * d1m1 - 2.0 * ga * gb * db + 4.0 * da * d11 * d12));
    if !(dp.abs() > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(dp, 0.0) });
    }
    if which == ModeSelector::Matter {
        return Ok(w11 * pp / dp);
    }

    let num = wb * w11 * kerr
        + 8.0 * g2
            * (u * u * (4.0 * db * d11 - gb * g11) + 2.0 * w11 * kerr * chi * chi
                + 8.0 * u * db * db * d11
                - 2.0 * u * gb * gb * d13
                - 4.0 * u * ga * gb * db)
        + 16.0 * g4 * (u * u + (g11 * g11 + (u + 2.0 * d11).powi(2)) * chi.powi(4))
        - 16.0 * g * chi * c
            * (db * w11 * kerr
                + 2.0 * g2
                    * (u * (2.0 * d11 * u12 - gb * g11)
                        + (2.0 * u * u * d11 + 2.0 * db * w11 + u * (ga * g11 + 4.0 * d11 * d12))
                            * chi
                            * chi))
        + 8.0 * g2 * chi * chi * c2
            * (4.0 * g2 * u * (u + 2.0 * d11) - u * u * (gb * g11 - 4.0 * db * d11)
                - (gb * gb - 4.0 * db * db) * w11
                + 2.0 * u * (ga * ga * db + d12 * (4.0 * db * d11 - gb * gb)))
        - 8.0 * g * chi * s
            * (gb * w11 * kerr
                + 4.0 * g2
                    * (gb * w11 * chi * chi
                        + u * (chi * chi - 1.0) * (u * g11 + 2.0 * gb * da + 2.0 * g12 * db)))
        + 8.0 * g2 * chi * chi * s2
            * (-4.0 * g2 * u * g11 + 4.0 * gb * db * w11 + 2.0 * u * u * (ga * db + gb * d12)
                + u * (ga * ga * gb + 4.0 * gb * d12 * d12 + ga * wb));
    let lin = 4.0 * g2 * chi * chi + wb - 4.0 * g * chi * (2.0 * db * c + gb * s);
    if !(lin.abs() > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(lin, 0.0) });
    }
    Ok(pp * num / (dp * lin * lin))
}

/// Self-homodyne split of the cavity `g^(2)` for a cavity drive (`χ = 0`).
pub fn pol_g2_decomposition(p: &PolParams) -> Result<DecompositionG2> {
    if p.chi != 0.0 {
        return Err(Error::Domain("the decomposition closed form needs χ = 0".into()));
    }
    let PolParams { delta_a: da, delta_b: db, g, u, gamma_a: ga, gamma_b: gb, .. } = *p;
    let (g2, g4) = (g * g, g.powi(4));
    let w11 = (ga + gb).powi(2) + 4.0 * (da + db).powi(2);
    let f2 = width(gb, db).powi(2)
        * (width(ga, da) * w11 * (gb * gb + (u + 2.0 * db).powi(2))
            + 16.0 * g4 * ((ga + gb).powi(2) + (u + 2.0 * (da + db)).powi(2))
            + 8.0 * g2
                * (u * u * (ga * (ga + gb) - 4.0 * da * (da + db))
                    + (ga * gb - 4.0 * da * db) * w11
                    - 2.0 * u
                        * (ga * ga * (da - db) - 2.0 * ga * gb * db
                            + 4.0 * da * (da + db) * (da + 2.0 * db))));
    if !(f2 > 0.0) {
        return Err(Error::UndefinedCorrelation { moment: C64::new(f2, 0.0) });
    }
    let n = gb * gb
        * (u * ga * (ga + gb) + 2.0 * gb * da * (2.0 * ga + gb) - 4.0 * u * da * da
            + 4.0 * g2 * (u + 2.0 * da))
        + 2.0 * gb * db
            * (3.0 * ga * ga * gb + 4.0 * g2 * (2.0 * ga + 3.0 * gb)
                - 6.0 * gb * da * (u + 2.0 * da)
                + 4.0 * ga * (gb * gb - 2.0 * u * da))
        - 4.0 * db * db
            * (u * ga * (ga + 3.0 * gb) + 12.0 * gb * da * (ga + gb) - 4.0 * u * da * da
                + 4.0 * g2 * (u + 2.0 * da))
        - 8.0 * db.powi(3) * (4.0 * g2 + ga * ga + 4.0 * ga * gb - 2.0 * da * (u + 2.0 * da))
        + 32.0 * da * db.powi(4);
    Ok(DecompositionG2 {
        i0: 256.0 * u * u * g4 * g4 / f2,
        i1: 0.0,
        i2: -32.0 * g4 * u * n / f2,
    })
}

fn splitting(omega_a: f64, omega_b: f64, g: f64) -> f64 {
    (g * g + 0.25 * (omega_a - omega_b).powi(2)).sqrt()
}

/// Lossless polariton energies of rung 1 or 2, the second rung to first
/// order in `U`.
pub fn pol_dressed_energies(
    rung: u32,
    omega_a: f64,
    omega_b: f64,
    g: f64,
    u: f64,
) -> Result<DressedLevels> {
    let r = splitting(omega_a, omega_b, g);
    let sum = omega_a + omega_b;
    let energies = match rung {
        1 => vec![0.5 * sum - r, 0.5 * sum + r],
        2 => {
            let dw = omega_a - omega_b;
            let shift = |sign: f64| (2.0 * g * g + dw * (dw - sign * 2.0 * r)) * u / (8.0 * r * r);
            vec![
                sum - 2.0 * r + shift(-1.0),
                sum + g * g * u / (2.0 * r * r),
                sum + 2.0 * r + shift(1.0),
            ]
        }
        _ => return Err(Error::Domain("perturbative polariton energies cover rungs 1 and 2".into())),
    };
    if !(r > 0.0) {
        return Err(Error::DegenerateSpectrum { order: rung as usize });
    }
    Ok(DressedLevels::sorted(rung, energies.into_iter().map(|e| C64::new(e, 0.0)).collect(), r))
}

/// Complex energies of rung `rung` from the non-Hermitian Hamiltonian
/// `H − (i/2)(γ_a a†a + γ_b b†b)` restricted to that excitation number.
pub fn pol_dressed_energies_exact(
    rung: u32,
    omega_a: f64,
    omega_b: f64,
    g: f64,
    u: f64,
    gamma_a: f64,
    gamma_b: f64,
) -> Result<DressedLevels> {
    if rung == 0 {
        return Err(Error::Domain("dressed rungs start at N = 1".into()));
    }
    let n = rung as usize;
    let wa = C64::new(omega_a, -0.5 * gamma_a);
    let wb = C64::new(omega_b, -0.5 * gamma_b);
    // basis |N−k, k⟩ with k excitons
    let h = Mat::<C64>::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            let k = i as f64;
            (n as f64 - k) * wa + k * wb + C64::new(0.5 * u * k * (k - 1.0), 0.0)
        } else if i.abs_diff(j) == 1 {
            let k = i.min(j) as f64;
            C64::new(g * ((n as f64 - k) * (k + 1.0)).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let ev = h.eigenvalues().map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    Ok(DressedLevels::sorted(rung, ev, splitting(omega_a, omega_b, g)))
}

/// Cavity detuning, possibly complex, that cancels the two-photon amplitude
/// at exciton detuning `delta_b`.
pub fn pol_complex_ua_detuning(delta_b: f64, p: &PolParams) -> C64 {
    let i = C64::i();
    let g11 = p.gamma_a + p.gamma_b;
    let (e, em) = (C64::from_polar(1.0, p.phi), C64::from_polar(1.0, -p.phi));
    let (g, chi, u, gb) = (p.g, p.chi, p.u, p.gamma_b);
    let zb = C64::new(gb, 2.0 * delta_b);
    let z11 = C64::new(g11, 2.0 * delta_b);
    let kerr = C64::new(u + 2.0 * delta_b, -gb);
    let num = e * (4.0 * g * g * u - zb * z11 * kerr)
        + 4.0 * i * g * chi * kerr * z11
        + 4.0 * em * g * g * chi * chi * C64::new(u + 2.0 * delta_b, -g11);
    let den = 2.0
        * (e * zb * C64::new(gb, u + 2.0 * delta_b) + 4.0 * g * chi * kerr
            - 4.0 * g * g * chi * chi * em);
    num / den
}

/// All `(Δ_a, Δ_b)` where the cavity `g^(2)` vanishes at vanishing drive.
pub fn pol_ua_zeros(p: &PolParams) -> Vec<(f64, f64)> {
    let half = scan_half_width(p.g, p.chi, p.gamma_a + p.gamma_b, p.u);
    scan_roots(|db| pol_complex_ua_detuning(db, p).im, -half, half, 20_000)
        .into_iter()
        .map(|db| (pol_complex_ua_detuning(db, p).re, db))
        .filter(|&(da, db)| {
            pol_g2(&PolParams { delta_a: da, delta_b: db, ..*p }, ModeSelector::Cavity)
                .is_ok_and(|v| v.abs() < 1e-8)
        })
        .collect()
}

/// Conventional and unconventional features of the cavity `g^(2)` in the
/// `(ω_a, ω_L)` plane at fixed exciton frequency.
pub fn pol_feature_conditions(p: &PolParams, window: &FeatureWindow) -> Vec<FeatureCondition> {
    let wb = window.omega_matter;
    let mut out = Vec::new();
    let mut push = |kind, locus, exact, label: String| {
        out.push(FeatureCondition { kind, locus, auxiliary: None, exact, label });
    };
    for (rung, kind, labels) in [
        (1, FeatureKind::Ca, &["E1-", "E1+"][..]),
        (2, FeatureKind::Cb, &["E2-", "E20", "E2+"][..]),
    ] {
        for (branch, label) in labels.iter().enumerate() {
            let samples = window.curve_over_cavity(|wa| {
                pol_dressed_energies_exact(rung, wa, wb, p.g, p.u, p.gamma_a, p.gamma_b)
                    .map(|l| l.laser_resonances()[branch])
                    .unwrap_or(f64::NAN)
            });
            push(kind, Locus::Curve { samples }, false, (*label).to_string());
        }
    }
    let ua = window.curve_over_laser(|wl| wl + pol_complex_ua_detuning(wb - wl, p).re);
    push(FeatureKind::Ua, Locus::Curve { samples: ua }, false, "Re".into());
    for (da, db) in pol_ua_zeros(p) {
        let [wa, wl] = window.point(da, db);
        if window.contains(wa, wl) {
            push(FeatureKind::Ua, Locus::Point { delta_a: da, delta_matter: db }, true, "Im=0".into());
        }
    }
    let wl = wb - p.chi * p.g * p.phi.cos();
    push(FeatureKind::Ub, Locus::Curve { samples: window.curve_over_cavity(|_| wl) }, false, "n_a min".into());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbative_second_rung_follows_exact_at_small_u() {
        let (wa, wb, g, u) = (0.3, -0.1, 1.0, 1e-4);
        let a = pol_dressed_energies(2, wa, wb, g, u).unwrap();
        let b = pol_dressed_energies_exact(2, wa, wb, g, u, 0.0, 0.0).unwrap();
        for (x, y) in a.energies.iter().zip(&b.energies) {
            assert!((x - y).norm() < 1e-7);
        }
    }

    #[test]
    fn resonant_second_rung_shifts() {
        let l = pol_dressed_energies(2, 0.0, 0.0, 1.0, 0.2).unwrap();
        let e: Vec<f64> = l.energies.iter().map(|e| e.re).collect();
        assert!((e[0] + 2.0 - 0.05).abs() < 1e-14);
        assert!((e[1] - 0.1).abs() < 1e-14);
        assert!((e[2] - 2.0 - 0.05).abs() < 1e-14);
    }

    #[test]
    fn decomposition_sums_to_g2() {
        let p = PolParams {
            delta_a: 0.2,
            delta_b: -0.4,
            g: 0.7,
            u: 1.3,
            omega_a: 1e-4,
            chi: 0.0,
            phi: 0.0,
            gamma_a: 0.3,
            gamma_b: 0.2,
        };
        let d = pol_g2_decomposition(&p).unwrap();
        let g2 = pol_g2(&p, ModeSelector::Cavity).unwrap();
        assert!((d.total() / g2 - 1.0).abs() < 1e-12);
    }
}
