//! Recursive vanishing-drive solver for the correlator hierarchy.
//!
//! Operators are kept as polynomials in normally ordered monomials
//! `c†^m c^n a†^μ a^ν`. The adjoint Lindblad action
//! `L†(X) = i[H, X] + Σ (γ/2)(2 j†X j − j†j X − X j†j)` gives the equation of
//! motion `∂t⟨X⟩ = ⟨L†(X)⟩`. A moment of total order `N` enters at order `Ω^N`,
//! so at leading order each block `v_N` obeys `M_N v_N + X_{N,N−1} v_{N−1} = 0`,
//! where `M_N` collects drive-free couplings inside the block and
//! `X_{N,N−1}` the single-drive couplings to the block below. Couplings to
//! higher orders are dropped.

use std::collections::BTreeMap;

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::correlators::{block_keys, order, CorrelatorTable, Key};
use crate::error::{Error, Result};
use crate::fockspace::{ModeSelector, SystemParams, C64};

/// Polynomial in normally ordered monomials, each term tagged by the power
/// of the drive carried by its coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<(Key, u32), C64>,
}

impl Poly {
    /// Single monomial with coefficient and drive power.
    pub fn monomial(key: Key, coef: C64, drive_power: u32) -> Self {
        let mut p = Self::default();
        p.add_term(key, drive_power, coef);
        p
    }

    fn add_term(&mut self, key: Key, drive_power: u32, coef: C64) {
        if coef == C64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry((key, drive_power)).or_insert(C64::new(0.0, 0.0));
        *e += coef;
    }

    /// Iterates over `(key, drive_power, coefficient)`.
    pub fn iter(&self) -> impl Iterator<Item = (Key, u32, C64)> + '_ {
        self.terms.iter().map(|((k, p), c)| (*k, *p, *c))
    }

    fn accumulate(&mut self, other: &Poly, factor: C64) {
        for (k, p, c) in other.iter() {
            self.add_term(k, p, factor * c);
        }
    }

    fn retain_nonzero(&mut self) {
        self.terms.retain(|_, c| c.norm() > 0.0);
    }
}

/// Operator algebra of the matter mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MatterAlgebra {
    Boson,
    TwoLevel,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * f64::from(i))
}

/// `(b†^m b^n)(b†^p b^q)` in normal order.
fn boson_product(m: u32, n: u32, p: u32, q: u32) -> Vec<((u32, u32), f64)> {
    (0..=n.min(p))
        .map(|k| ((m + p - k, n + q - k), binomial(n, k) * binomial(p, k) * factorial(k)))
        .collect()
}

/// `(σ†^m σ^n)(σ†^p σ^q)` reduced to the basis `{1, σ, σ†, σ†σ}`.
fn two_level_product(m: u32, n: u32, p: u32, q: u32) -> Vec<((u32, u32), f64)> {
    let mat = |m: u32, n: u32| -> [[f64; 2]; 2] {
        match (m, n) {
            (0, 0) => [[1.0, 0.0], [0.0, 1.0]],
            (0, 1) => [[0.0, 1.0], [0.0, 0.0]],
            (1, 0) => [[0.0, 0.0], [1.0, 0.0]],
            (1, 1) => [[0.0, 0.0], [0.0, 1.0]],
            _ => [[0.0, 0.0], [0.0, 0.0]],
        }
    };
    let (a, b) = (mat(m, n), mat(p, q));
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    [((0, 0), c[0][0]), ((0, 1), c[0][1]), ((1, 0), c[1][0]), ((1, 1), c[1][1] - c[0][0])]
        .into_iter()
        .filter(|(_, v)| *v != 0.0)
        .collect()
}

fn product(alg: MatterAlgebra, x: &Poly, y: &Poly) -> Poly {
    let mut out = Poly::default();
    for (kx, px, cx) in x.iter() {
        for (ky, py, cy) in y.iter() {
            let matter = match alg {
                MatterAlgebra::Boson => boson_product(kx[0], kx[1], ky[0], ky[1]),
                MatterAlgebra::TwoLevel => two_level_product(kx[0], kx[1], ky[0], ky[1]),
            };
            let cavity = boson_product(kx[2], kx[3], ky[2], ky[3]);
            for ((m, n), wm) in &matter {
                for ((mu, nu), wc) in &cavity {
                    out.add_term([*m, *n, *mu, *nu], px + py, cx * cy * (wm * wc));
                }
            }
        }
    }
    out.retain_nonzero();
    out
}

struct Model {
    alg: MatterAlgebra,
    has_cavity: bool,
    hamiltonian: Poly,
    jumps: Vec<(f64, Poly)>,
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn model(params: &SystemParams) -> Model {
    let mut h = Poly::default();
    let matter_c = Poly::monomial([0, 1, 0, 0], r(1.0), 0);
    let cavity_a = Poly::monomial([0, 0, 0, 1], r(1.0), 0);
    let mut jumps = Vec::new();
    let matter = |h: &mut Poly, delta: f64, u: f64, omega: f64| {
        h.add_term([1, 1, 0, 0], 0, r(delta));
        h.add_term([2, 2, 0, 0], 0, r(u / 2.0));
        h.add_term([1, 0, 0, 0], 1, r(omega));
        h.add_term([0, 1, 0, 0], 1, r(omega));
    };
    let cavity = |h: &mut Poly, delta: f64, g: f64, omega: f64, phi: f64| {
        let e = C64::from_polar(1.0, phi);
        h.add_term([0, 0, 1, 1], 0, r(delta));
        h.add_term([0, 1, 1, 0], 0, r(g));
        h.add_term([1, 0, 0, 1], 0, r(g));
        h.add_term([0, 0, 1, 0], 1, e * omega);
        h.add_term([0, 0, 0, 1], 1, e.conj() * omega);
    };
    let (alg, has_cavity) = match *params {
        SystemParams::Rf(p) => {
            matter(&mut h, p.delta_s, 0.0, p.omega_s);
            jumps.push((p.gamma_s, matter_c));
            (MatterAlgebra::TwoLevel, false)
        }
        SystemParams::Ao(p) => {
            matter(&mut h, p.delta_b, p.u, p.omega_b);
            jumps.push((p.gamma_b, matter_c));
            (MatterAlgebra::Boson, false)
        }
        SystemParams::Jc(p) => {
            matter(&mut h, p.delta_s, 0.0, p.chi * p.omega_a);
            cavity(&mut h, p.delta_a, p.g, p.omega_a, p.phi);
            jumps.push((p.gamma_s, matter_c));
            jumps.push((p.gamma_a, cavity_a));
            (MatterAlgebra::TwoLevel, true)
        }
        SystemParams::Pol(p) => {
            matter(&mut h, p.delta_b, p.u, p.chi * p.omega_a);
            cavity(&mut h, p.delta_a, p.g, p.omega_a, p.phi);
            jumps.push((p.gamma_b, matter_c));
            jumps.push((p.gamma_a, cavity_a));
            (MatterAlgebra::Boson, true)
        }
    };
    if alg == MatterAlgebra::TwoLevel {
        // σ†²σ² vanishes identically for a two-level emitter.
        h.terms.retain(|(k, _), _| k[0] <= 1 && k[1] <= 1);
    }
    h.retain_nonzero();
    Model { alg, has_cavity, hamiltonian: h, jumps }
}

fn adjoint_poly(p: &Poly) -> Poly {
    let mut out = Poly::default();
    for (k, d, c) in p.iter() {
        out.add_term([k[1], k[0], k[3], k[2]], d, c.conj());
    }
    out
}

fn apply_adjoint_lindblad(m: &Model, x: &Poly) -> Poly {
    let i = C64::new(0.0, 1.0);
    let mut out = Poly::default();
    out.accumulate(&product(m.alg, &m.hamiltonian, x), i);
    out.accumulate(&product(m.alg, x, &m.hamiltonian), -i);
    for (rate, j) in &m.jumps {
        let jd = adjoint_poly(j);
        let jdj = product(m.alg, &jd, j);
        let sandwich = product(m.alg, &product(m.alg, &jd, x), j);
        out.accumulate(&sandwich, r(*rate));
        out.accumulate(&product(m.alg, &jdj, x), r(-rate / 2.0));
        out.accumulate(&product(m.alg, x, &jdj), r(-rate / 2.0));
    }
    out.retain_nonzero();
    out
}

/// Normally ordered `L†(X)` for the monomial `X = c†^m c^n a†^μ a^ν`.
pub fn adjoint_lindblad(params: &SystemParams, key: Key) -> Poly {
    let m = model(params);
    apply_adjoint_lindblad(&m, &Poly::monomial(key, r(1.0), 0))
}

/// A retained coefficient of the hierarchy: `∂t⟨row⟩ ∋ coef · ⟨col⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegressionEntry {
    pub row: Key,
    pub col: Key,
    pub coef: C64,
    /// 0 for couplings inside a block, 1 for drive couplings to the block below.
    pub drive_power: u32,
}

/// Leading-order regression matrix, organized by total-order blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionMatrix {
    /// Index sets `v_1, v_2, …` in canonical order.
    pub blocks: Vec<Vec<Key>>,
    /// Every retained coefficient.
    pub entries: Vec<RegressionEntry>,
}

/// Builds the leading-order hierarchy up to a total operator order.
pub fn regression_matrix(params: &SystemParams, max_total_order: u32) -> Result<RegressionMatrix> {
    params.validate()?;
    let m = model(params);
    let two_level = m.alg == MatterAlgebra::TwoLevel;
    let mut blocks = Vec::new();
    let mut entries = Vec::new();
    for total in 1..=max_total_order {
        let keys = block_keys(total, two_level, m.has_cavity);
        for key in &keys {
            let lx = apply_adjoint_lindblad(&m, &Poly::monomial(*key, r(1.0), 0));
            for (col, dp, coef) in lx.iter() {
                let reached = order(&col) + dp;
                if reached < total {
                    return Err(Error::Domain(format!(
                        "hierarchy inconsistency: <{key:?}> couples to lower-order <{col:?}>"
                    )));
                }
                if reached == total {
                    entries.push(RegressionEntry { row: *key, col, coef, drive_power: dp });
                }
            }
        }
        blocks.push(keys);
    }
    Ok(RegressionMatrix { blocks, entries })
}

/// Leading-order steady-state moments up to a total operator order.
///
/// Values scale exactly as `Ω^N` with the drive stored in `params`; ratios
/// such as `g^(N)` are drive independent.
pub fn low_drive_correlators(params: &SystemParams, max_total_order: u32) -> Result<CorrelatorTable> {
    if max_total_order < 2 {
        return Err(Error::Domain("max_total_order must be >= 2".into()));
    }
    let reg = regression_matrix(params, max_total_order)?;
    let mut table = CorrelatorTable::unit();
    let mut by_row: BTreeMap<Key, Vec<&RegressionEntry>> = BTreeMap::new();
    for e in &reg.entries {
        by_row.entry(e.row).or_default().push(e);
    }
    for (b, keys) in reg.blocks.iter().enumerate() {
        let total = b + 1;
        let index: BTreeMap<Key, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let n = keys.len();
        let mut mat = Mat::<C64>::zeros(n, n);
        let mut rhs = Mat::<C64>::zeros(n, 1);
        for (i, key) in keys.iter().enumerate() {
            for e in by_row.get(key).map(Vec::as_slice).unwrap_or(&[]) {
                if e.drive_power == 0 {
                    let j = index[&e.col];
                    mat[(i, j)] += e.coef;
                } else {
                    let v = table.get(e.col).unwrap_or(C64::new(0.0, 0.0));
                    rhs[(i, 0)] -= e.coef * v;
                }
            }
        }
        let x = solve_block(&mat, &rhs, total)?;
        for (i, key) in keys.iter().enumerate() {
            table.insert(*key, x[(i, 0)], total as u32);
        }
    }
    Ok(table)
}

fn solve_block(mat: &Mat<C64>, rhs: &Mat<C64>, order: usize) -> Result<Mat<C64>> {
    let sv = mat.singular_values().map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let top = sv.first().copied().unwrap_or(0.0);
    let bottom = sv.last().copied().unwrap_or(0.0);
    if !(top > 0.0) || bottom <= 1e-13 * top {
        return Err(Error::DegenerateSpectrum { order });
    }
    Ok(mat.partial_piv_lu().solve(rhs))
}

/// Vanishing-drive `g^(N)` of a mode from leading-order moment ratios.
pub fn gn_limit(params: &SystemParams, which: ModeSelector, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("g^(N) limit needs N >= 2".into()));
    }
    if which == ModeSelector::Cavity && !params.has_cavity() {
        return Err(Error::InvalidParameter { name: "mode", reason: "model has no cavity".into() });
    }
    let unit = if params.drive() > 0.0 { *params } else { params.with_drive(1.0) };
    let two_level = unit.matter_is_two_level();
    if which == ModeSelector::Matter && two_level {
        let t = low_drive_correlators(&unit, 2)?;
        let pop = t.require([1, 1, 0, 0])?;
        if !(pop.re > 0.0) {
            return Err(Error::UndefinedCorrelation { moment: pop });
        }
        return Ok(0.0);
    }
    let t = low_drive_correlators(&unit, 2 * n)?;
    let (k1, kn) = match which {
        ModeSelector::Matter => ([1, 1, 0, 0], [n, n, 0, 0]),
        ModeSelector::Cavity => ([0, 0, 1, 1], [0, 0, n, n]),
    };
    let pop = t.require(k1)?;
    if !(pop.re > 0.0) || !pop.re.is_finite() {
        return Err(Error::UndefinedCorrelation { moment: pop });
    }
    Ok(t.require(kn)?.re / pop.re.powi(n as i32))
}
