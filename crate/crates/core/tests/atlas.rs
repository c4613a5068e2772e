//! Sweeps, output files and config handling of the atlas layer.

use std::f64::consts::PI;
use std::fs;

use approx::assert_relative_eq;
use blockade::analytic::{ao_extrema, ao_g2_zeros, jc_g2, pol_g2, rf_homodyne_gn};
use blockade::atlas::{
    analytic_value, evaluate_cell, grid, polariton_limit_grid, run_sweep, sweep_columns, write_sweep, CellStatus,
    SweepConfig,
};
use blockade::fockspace::{JcParams, ModeSelector, PolParams};
use blockade::Error;

const JC_MAP: &str = r#"
name = "jc-map"
observables = ["n", "g2", "i1"]

[system]
system = "jc"
delta_a = 0.0
delta_s = 0.0
g = 1.0
omega_a = 1e-4
chi = 0.0
phi = 0.0
gamma_a = 0.1
gamma_s = 0.01

[[axes]]
param = "freq.cavity"
min = -2.0
max = 2.0
count = 9

[[axes]]
param = "freq.laser"
min = -1.5
max = 1.5
count = 7
"#;

fn parse(text: &str) -> SweepConfig {
    SweepConfig::from_toml_str(text).unwrap()
}

fn config_error(text: &str) -> String {
    match SweepConfig::from_toml_str(text) {
        Err(Error::Config(msg)) => msg,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn grid_is_row_major_over_the_axes() {
    let cfg = parse(JC_MAP);
    let (axes, coords) = grid(&cfg);
    assert_eq!(axes.len(), 2);
    assert_eq!(coords.len(), 63);
    assert_eq!(coords[0], vec![-2.0, -1.5]);
    assert_eq!(coords[1], vec![-2.0, -1.0]);
    assert_eq!(coords[7], vec![-1.5, -1.5]);
    assert_eq!(coords[62], vec![2.0, 1.5]);
}

#[test]
fn sweep_cells_match_direct_closed_forms() {
    let cfg = parse(JC_MAP);
    let result = run_sweep(&cfg).unwrap();
    assert_eq!(result.shape, vec![9, 7]);
    for cell in &result.cells {
        let (wa, wl) = (cell.coords[0], cell.coords[1]);
        let p = JcParams {
            delta_a: wa - wl,
            delta_s: -wl,
            g: 1.0,
            omega_a: 1e-4,
            chi: 0.0,
            phi: 0.0,
            gamma_a: 0.1,
            gamma_s: 0.01,
        };
        assert_eq!(cell.status, CellStatus::Ok, "{cell:?}");
        assert_relative_eq!(cell.values[1], jc_g2(&p).unwrap(), max_relative = 1e-12);
        let (sys, h) = cfg.cell_params(&cell.coords).unwrap();
        for (k, obs) in cfg.observables.iter().enumerate() {
            let direct = analytic_value(&sys, ModeSelector::Cavity, cfg.field, h, *obs).unwrap();
            assert_eq!(cell.values[k].to_bits(), direct.to_bits());
        }
        assert_eq!(evaluate_cell(&cfg, &cell.coords), *cell);
    }
}

#[test]
fn written_files_are_byte_identical_across_runs() {
    let cfg = parse(JC_MAP);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let wa = write_sweep(&run_sweep(&cfg).unwrap(), a.path()).unwrap();
    let wb = write_sweep(&run_sweep(&cfg).unwrap(), b.path()).unwrap();
    assert_eq!(wa.csv.file_name().unwrap(), "jc-map.csv");
    assert_eq!(wa.meta.file_name().unwrap(), "jc-map.meta.json");
    assert_eq!(fs::read(&wa.csv).unwrap(), fs::read(&wb.csv).unwrap());
    assert_eq!(fs::read(&wa.meta).unwrap(), fs::read(&wb.meta).unwrap());
}

#[test]
fn csv_and_sidecar_describe_the_grid() {
    let cfg = parse(JC_MAP);
    let dir = tempfile::tempdir().unwrap();
    let w = write_sweep(&run_sweep(&cfg).unwrap(), dir.path()).unwrap();
    let mut reader = csv::Reader::from_path(&w.csv).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["freq.cavity", "freq.laser", "n", "g2", "i1", "status", "detail"]);
    assert_eq!(header, sweep_columns(&cfg));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 63);
    assert!(rows.iter().all(|r| &r[5] == "ok" && r[6].is_empty()));

    let meta: serde_json::Value = serde_json::from_slice(&fs::read(&w.meta).unwrap()).unwrap();
    assert_eq!(meta["kind"], "sweep");
    assert_eq!(meta["engine"], "analytic");
    assert_eq!(meta["shape"], serde_json::json!([9, 7]));
    assert_eq!(meta["axes"][1]["values"].as_array().unwrap().len(), 7);
    assert_eq!(meta["status_counts"]["ok"], 63);
    assert_eq!(meta["config"]["system"]["system"], "jc");
}

#[test]
fn rf_homodyne_grid_vanishes_at_f_four_phi_pi() {
    let cfg = parse(
        r#"
name = "rf-homodyne"
observables = ["g2"]

[system]
system = "rf"
delta_s = 0.0
omega_s = 1e-4
gamma_s = 1.0

[homodyne]
f = 0.0
phi = 0.0

[[axes]]
param = "homodyne.f"
min = 0.0
max = 8.0
count = 17

[[axes]]
param = "homodyne.phi"
min = 0.0
max = 6.283185307179586
count = 9
"#,
    );
    let result = run_sweep(&cfg).unwrap();
    // F = 0 is the bare two-level field, antibunched everywhere
    let best = result
        .cells
        .iter()
        .filter(|c| c.coords[0] > 0.0)
        .min_by(|a, b| a.values[0].total_cmp(&b.values[0]))
        .unwrap();
    assert_eq!(best.coords[0], 4.0);
    assert_relative_eq!(best.coords[1], PI, max_relative = 1e-15);
    assert!(best.values[0] < 1e-10, "g2 = {}", best.values[0]);
    for cell in &result.cells {
        match rf_homodyne_gn(2, cell.coords[0], cell.coords[1], 1e-4, 1.0, 0.0, 1.0) {
            Ok(direct) => assert_relative_eq!(cell.values[0], direct.g, max_relative = 1e-12, epsilon = 1e-15),
            Err(e) => {
                assert!(matches!(e, Error::UndefinedCorrelation { .. }), "{e}");
                assert_eq!(cell.status, CellStatus::Undefined);
            }
        }
    }
}

#[test]
fn ao_homodyne_grid_minima_sit_at_the_interference_roots() {
    let delta = ao_extrema(1.0, 1.0).unwrap().delta_min;
    let cfg = parse(&format!(
        r#"
name = "ao-homodyne"
observables = ["g2"]

[system]
system = "ao"
delta_b = {delta}
u = 1.0
omega_b = 1e-4
gamma_b = 1.0

[homodyne]
f = 0.0
phi = 0.0

[[axes]]
param = "homodyne.f"
min = 0.0
max = 4.0
count = 81

[[axes]]
param = "homodyne.phi"
min = 0.0
max = 6.283185307179586
count = 73
"#
    ));
    let result = run_sweep(&cfg).unwrap();
    let (df, dphi) = (0.05, 2.0 * PI / 72.0);
    let roots = ao_g2_zeros(1.0, 1.0, delta).unwrap();
    assert_eq!(roots.len(), 2);
    for (f, phi) in roots {
        let near = result
            .cells
            .iter()
            .filter(|c| (c.coords[0] - f).abs() <= df && (c.coords[1] - phi).abs() <= dphi)
            .map(|c| c.values[0])
            .fold(f64::INFINITY, f64::min);
        let far = result
            .cells
            .iter()
            .filter(|c| (c.coords[0] - f).abs() > 0.5 || (c.coords[1] - phi).abs() > 0.5)
            .filter(|c| roots_far(c.coords[0], c.coords[1], delta))
            .map(|c| c.values[0])
            .fold(f64::INFINITY, f64::min);
        assert!(near < 0.05 && near < far / 10.0, "root ({f}, {phi}): near {near}, far {far}");
    }
}

fn roots_far(f: f64, phi: f64, delta: f64) -> bool {
    ao_g2_zeros(1.0, 1.0, delta)
        .unwrap()
        .iter()
        .all(|(rf, rp)| (f - rf).abs() > 0.5 || (phi - rp).abs() > 0.5)
}

#[test]
fn statuses_flag_truncation_and_undefined_cells() {
    let strong = parse(
        r#"
name = "strong"
observables = ["n", "g2"]

[system]
system = "jc"
delta_a = 0.0
delta_s = 0.0
g = 1.0
omega_a = 0.0
chi = 0.0
phi = 0.0
gamma_a = 0.1
gamma_s = 0.1

[engine]
kind = "liouvillian"
drive = 0.5
truncation = 2

[[axes]]
param = "delta_a"
min = -0.1
max = 0.1
count = 2
"#,
    );
    let result = run_sweep(&strong).unwrap();
    assert!(result.cells.iter().all(|c| c.status == CellStatus::TruncationWarning));
    assert!(result.cells[0].detail.starts_with("top-level population"));

    let dark = parse(
        r#"
name = "dark"
mode = "matter"
observables = ["n", "g2"]

[system]
system = "jc"
delta_a = 0.0
delta_s = 0.0
g = 0.0
omega_a = 1e-3
chi = 0.0
phi = 0.0
gamma_a = 0.1
gamma_s = 0.1

[[axes]]
param = "delta_s"
min = -1.0
max = 1.0
count = 3
"#,
    );
    let result = run_sweep(&dark).unwrap();
    for cell in &result.cells {
        assert_eq!(cell.status, CellStatus::Undefined);
        assert_eq!(cell.values[0], 0.0);
        assert!(cell.values[1].is_nan());
    }
    assert_eq!(result.status_counts().get("undefined"), Some(&3));
    assert!(CellStatus::Ok < CellStatus::TruncationWarning);
    assert!(CellStatus::TruncationWarning < CellStatus::Undefined);
    assert!(CellStatus::Undefined < CellStatus::Failed);
}

#[test]
fn total_cut_agrees_with_per_mode_cut_at_weak_drive() {
    let text = |cut: &str| {
        format!(
            r#"
name = "pol-{cut}"
observables = ["n", "g2"]

[system]
system = "pol"
delta_a = 0.3
delta_b = -0.2
g = 1.0
u = 0.5
omega_a = 0.0
chi = 0.0
phi = 0.0
gamma_a = 0.5
gamma_b = 0.2

[engine]
kind = "liouvillian"
drive = 0.01
truncation = 5
cut = "{cut}"

[[axes]]
param = "delta_b"
min = -0.5
max = 0.5
count = 3
"#
        )
    };
    let total = run_sweep(&parse(&text("total"))).unwrap();
    let per_mode = run_sweep(&parse(&text("per-mode"))).unwrap();
    for (a, b) in total.cells.iter().zip(&per_mode.cells) {
        assert_eq!(a.status, CellStatus::Ok);
        assert_relative_eq!(a.values[0], b.values[0], max_relative = 1e-8);
        assert_relative_eq!(a.values[1], b.values[1], max_relative = 1e-6);
        let p = PolParams {
            delta_a: 0.3,
            delta_b: a.coords[0],
            g: 1.0,
            u: 0.5,
            omega_a: 1e-4,
            chi: 0.0,
            phi: 0.0,
            gamma_a: 0.5,
            gamma_b: 0.2,
        };
        assert_relative_eq!(a.values[1], pol_g2(&p, ModeSelector::Cavity).unwrap(), max_relative = 1e-2);
    }
}

#[test]
fn polariton_reaches_jc_within_one_percent_at_stronger_interaction() {
    let (ga, gb, g) = (0.1, 0.01, 1.0);
    let mut worst: f64 = 0.0;
    for (wa, wl) in polariton_limit_grid() {
        let pol = PolParams {
            delta_a: wa - wl,
            delta_b: -wl,
            g,
            u: 1e5 * ga,
            omega_a: 1e-4,
            chi: 0.0,
            phi: 0.0,
            gamma_a: ga,
            gamma_b: gb,
        };
        let jc = JcParams { delta_a: wa - wl, delta_s: -wl, g, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: ga, gamma_s: gb };
        let (a, b) = (pol_g2(&pol, ModeSelector::Cavity).unwrap(), jc_g2(&jc).unwrap());
        worst = worst.max((a - b).abs() / b.abs());
    }
    assert!(worst <= 1e-2, "worst relative deviation {worst}");
}

#[test]
fn config_errors_are_reported() {
    let base = JC_MAP.replace("count = 7", "count = 3");
    assert!(config_error("name = \"x\"").contains("system"));
    assert!(config_error(&base.replace("\"jc-map\"", "\"bad name\"")).contains("name"));
    assert!(config_error(&base.replace("count = 3", "count = 1")).contains("count >= 2"));
    assert!(config_error(&base.replace("freq.laser", "freq.cavity")).contains("twice"));
    assert!(config_error(&base.replace("freq.laser", "kappa")).contains("unknown axis parameter"));
    assert!(config_error(&base.replace("[\"n\", \"g2\", \"i1\"]", "[\"g2\", \"g2\"]")).contains("twice"));
    assert!(config_error(&base.replace("[\"n\", \"g2\", \"i1\"]", "[\"g9\"]")).len() > 0);
    assert!(config_error(&format!("{base}\n[engine]\nkind = \"liouvillian\"\n")).contains("positive drive"));
    assert!(config_error(&format!("{base}\n[engine]\nkind = \"recursive\"\ncut = \"total\"\n")).contains("cut"));
    assert!(config_error(&format!("{base}\nunknown_key = 1\n")).contains("unknown"));
    let rf = r#"
name = "rf"
mode = "cavity"
[system]
system = "rf"
delta_s = 0.0
omega_s = 1e-3
gamma_s = 1.0
"#;
    assert!(config_error(rf).contains("no cavity"));
}

#[test]
fn analytic_engine_refuses_combinations_without_closed_form() {
    let cfg = parse(&JC_MAP.replace("[\"n\", \"g2\", \"i1\"]", "[\"g3\"]"));
    match run_sweep(&cfg) {
        Err(Error::Config(msg)) => assert!(msg.contains("no closed form"), "{msg}"),
        other => panic!("expected a config error, got {:?}", other.map(|r| r.cells.len())),
    }
    let cfg = parse(&JC_MAP.replace("[\"n\", \"g2\", \"i1\"]", "[]"));
    assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn recursive_engine_matches_closed_forms_on_a_grid() {
    let cfg = parse(&JC_MAP.replace("observables = [\"n\", \"g2\", \"i1\"]", "observables = [\"n\", \"g2\"]\n[engine]\nkind = \"recursive\""));
    let analytic = parse(&JC_MAP.replace("[\"n\", \"g2\", \"i1\"]", "[\"n\", \"g2\"]"));
    let (a, b) = (run_sweep(&cfg).unwrap(), run_sweep(&analytic).unwrap());
    for (x, y) in a.cells.iter().zip(&b.cells) {
        assert_relative_eq!(x.values[0], y.values[0], max_relative = 1e-8);
        assert_relative_eq!(x.values[1], y.values[1], max_relative = 1e-6);
    }
}

#[test]
fn shuffled_evaluation_order_leaves_cells_unchanged() {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let cfg = parse(JC_MAP);
    let result = run_sweep(&cfg).unwrap();
    let mut order: Vec<usize> = (0..result.cells.len()).collect();
    order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
    for k in order {
        assert_eq!(evaluate_cell(&cfg, &result.cells[k].coords), result.cells[k]);
    }
}

#[test]
fn jc_features_place_ub_at_the_emitter_and_ca_on_the_first_rung() {
    use blockade::analytic::{jc_dressed_energies, jc_populations, FeatureKind, FeatureWindow, Locus};
    use blockade::atlas::classify_features;

    let p = JcParams { delta_a: 0.0, delta_s: 0.0, g: 1.0, omega_a: 1e-4, chi: 0.0, phi: 0.0, gamma_a: 0.1, gamma_s: 0.01 };
    let window = FeatureWindow { omega_a: [-2.0, 2.0], omega_l: [-2.0, 2.0], omega_matter: 0.0, samples: 41 };
    let features = classify_features(&blockade::fockspace::SystemParams::Jc(p), &window);
    let curve = |kind: FeatureKind, label: &str| match &features.iter().find(|f| f.kind == kind && f.label == label).unwrap().locus {
        Locus::Curve { samples } => samples.clone(),
        Locus::Point { .. } => panic!("{label} is a point"),
    };
    let ub = curve(FeatureKind::Ub, "n_a min");
    assert_eq!(ub.len(), 41);
    assert!(ub.iter().all(|[_, wl]| *wl == 0.0));
    for (branch, label) in [(0, "E1-"), (1, "E1+")] {
        for [wa, wl] in curve(FeatureKind::Ca, label) {
            let e = jc_dressed_energies(1, wa, 0.0, 1.0, 0.1, 0.01).unwrap();
            assert_relative_eq!(wl, e.energies[branch].re, max_relative = 1e-12, epsilon = 1e-14);
        }
    }
    // away from the polaritons the cavity population dips where the UB line runs
    let wa = 1.8;
    let n_a = |wl: f64| jc_populations(&JcParams { delta_a: wa - wl, delta_s: -wl, ..p }).n_a;
    let dip = (-200..=200)
        .map(|k| f64::from(k) * 1e-4)
        .min_by(|a, b| n_a(*a).total_cmp(&n_a(*b)))
        .unwrap();
    assert!(dip.abs() < 2e-3, "n_a minimum at ω_L = {dip}");
}
