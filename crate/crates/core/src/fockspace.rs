//! Truncated operator algebra for the four driven-dissipative models.
//!
//! Every model is written in the rotating frame of the laser, so only
//! detunings `Δ = ω_c − ω_L` appear. The cavity drive carries the phase
//! `e^{iφ}` while the matter drive is real. Two-mode models order the
//! product basis as `|n_cavity⟩ ⊗ |n_matter⟩`.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Sub};

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Default highest Fock number kept for each bosonic mode.
pub const DEFAULT_N_MAX: usize = 10;

/// Hilbert dimension below which dense linear algebra is used.
pub const DENSE_DIM_LIMIT: usize = 64;

/// Dense square operator on a truncated Hilbert space.
#[derive(Clone, Debug)]
pub struct Operator {
    mat: Mat<C64>,
}

/// Density matrices are plain operators with unit trace.
pub type DensityMatrix = Operator;

impl Operator {
    /// Zero operator of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        Self { mat: Mat::zeros(dim, dim) }
    }

    /// Identity of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    /// Builds an operator entry by entry.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { mat: Mat::from_fn(dim, dim, f) }
    }

    /// Wraps an existing square matrix.
    pub fn from_mat(mat: Mat<C64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operators are square");
        Self { mat }
    }

    /// Projector `|k⟩⟨k|` onto a basis state.
    pub fn basis_projector(dim: usize, k: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == k && j == k { ONE } else { ZERO })
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Matrix element `⟨i|A|j⟩`.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Underlying dense matrix.
    pub fn matrix(&self) -> &Mat<C64> {
        &self.mat
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim(), |i, j| self.mat[(j, i)].conj())
    }

    /// Multiplication by a complex scalar.
    pub fn scale(&self, c: C64) -> Self {
        Self::from_fn(self.dim(), |i, j| c * self.mat[(i, j)])
    }

    /// Integer power `A^k` (identity for `k = 0`).
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Self {
        let (da, db) = (self.dim(), other.dim());
        Self::from_fn(da * db, |i, j| {
            self.mat[(i / db, j / db)] * other.mat[(i % db, j % db)]
        })
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// Expectation value `Tr(ρ A)`.
    pub fn expect(&self, rho: &DensityMatrix) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += rho.mat[(i, k)] * self.mat[(k, i)];
            }
        }
        acc
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// Frobenius norm of `A − A†`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).norm()
    }

    /// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let h = (self + &self.adjoint()).scale(C64::new(0.5, 0.0));
        h.mat
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))
    }

    /// Nonzero entries as `(row, col, value)` triples.
    pub(crate) fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for j in 0..d {
            for i in 0..d {
                let v = self.mat[(i, j)];
                if v != ZERO {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|i| (0..self.dim()).all(|j| self.mat[(i, j)] == other.mat[(i, j)]))
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat * &rhs.mat }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat - &rhs.mat }
    }
}

/// Kind of elementary mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    /// Harmonic mode keeping Fock states `0..=n_max`.
    Boson { n_max: usize },
    /// Two-level emitter with pseudospin algebra.
    TwoLevel,
}

impl ModeKind {
    /// Hilbert dimension of the mode.
    pub fn dim(&self) -> usize {
        match self {
            ModeKind::Boson { n_max } => n_max + 1,
            ModeKind::TwoLevel => 2,
        }
    }
}

/// Annihilation operator of a single mode.
///
/// Bosons satisfy `⟨n−1|a|n⟩ = √n`; the two-level operator is `σ = |0⟩⟨1|`.
pub fn build_mode(kind: ModeKind) -> Result<Operator> {
    match kind {
        ModeKind::Boson { n_max } if n_max < 2 => Err(Error::InvalidTruncation(n_max)),
        ModeKind::Boson { n_max } => Ok(Operator::from_fn(n_max + 1, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        })),
        ModeKind::TwoLevel => Ok(Operator::from_fn(2, |i, j| if i == 0 && j == 1 { ONE } else { ZERO })),
    }
}

/// Resonance fluorescence of a two-level emitter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub delta_s: f64,
    pub omega_s: f64,
    pub gamma_s: f64,
}

/// Driven Kerr (anharmonic) oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoParams {
    pub delta_b: f64,
    pub u: f64,
    pub omega_b: f64,
    pub gamma_b: f64,
}

/// Jaynes–Cummings cavity coupled to a two-level emitter.
///
/// The emitter drive is `Ω_σ = χ Ω_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JcParams {
    pub delta_a: f64,
    pub delta_s: f64,
    pub g: f64,
    pub omega_a: f64,
    pub chi: f64,
    pub phi: f64,
    pub gamma_a: f64,
    pub gamma_s: f64,
}

/// Cavity coupled to a Kerr exciton (polariton model).
///
/// The exciton drive is `Ω_b = χ Ω_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolParams {
    pub delta_a: f64,
    pub delta_b: f64,
    pub g: f64,
    pub u: f64,
    pub omega_a: f64,
    pub chi: f64,
    pub phi: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

/// The four physical models. Frequencies and rates share one unit, ħ = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase")]
pub enum SystemParams {
    Rf(RfParams),
    Ao(AoParams),
    Jc(JcParams),
    Pol(PolParams),
}

/// Detuning `Δ_c = ω_c − ω_L` from a mode and a laser frequency.
pub fn detuning(omega_mode: f64, omega_laser: f64) -> f64 {
    omega_mode - omega_laser
}

/// `γ² + 4Δ²`, the squared complex linewidth of a mode.
pub fn gamma_tilde_sq(gamma: f64, delta: f64) -> f64 {
    gamma * gamma + 4.0 * delta * delta
}

/// Compact drive-ratio coordinate `(2/π) atan χ ∈ [0, 1)`.
pub fn chi_tilde(chi: f64) -> f64 {
    2.0 / std::f64::consts::PI * chi.atan()
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be > 0, got {v}") })
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be >= 0, got {v}") })
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be finite, got {v}") })
    }
}

fn phase(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..TAU).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must lie in [0, 2π), got {v}") })
    }
}

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl SystemParams {
    /// Checks the domain invariants of every field.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SystemParams::Rf(p) => {
                finite("delta_s", p.delta_s)?;
                non_negative("omega_s", p.omega_s)?;
                positive("gamma_s", p.gamma_s)
            }
            SystemParams::Ao(p) => {
                finite("delta_b", p.delta_b)?;
                non_negative("u", p.u)?;
                non_negative("omega_b", p.omega_b)?;
                positive("gamma_b", p.gamma_b)
            }
            SystemParams::Jc(p) => {
                finite("delta_a", p.delta_a)?;
                finite("delta_s", p.delta_s)?;
                non_negative("g", p.g)?;
                non_negative("omega_a", p.omega_a)?;
                non_negative("chi", p.chi)?;
                phase("phi", p.phi)?;
                positive("gamma_a", p.gamma_a)?;
                positive("gamma_s", p.gamma_s)
            }
            SystemParams::Pol(p) => {
                finite("delta_a", p.delta_a)?;
                finite("delta_b", p.delta_b)?;
                non_negative("g", p.g)?;
                non_negative("u", p.u)?;
                non_negative("omega_a", p.omega_a)?;
                non_negative("chi", p.chi)?;
                phase("phi", p.phi)?;
                positive("gamma_a", p.gamma_a)?;
                positive("gamma_b", p.gamma_b)
            }
        }
    }

    /// Short lowercase name of the model.
    pub fn name(&self) -> &'static str {
        match self {
            SystemParams::Rf(_) => "rf",
            SystemParams::Ao(_) => "ao",
            SystemParams::Jc(_) => "jc",
            SystemParams::Pol(_) => "pol",
        }
    }

    /// Whether the model has a cavity mode next to the matter mode.
    pub fn has_cavity(&self) -> bool {
        matches!(self, SystemParams::Jc(_) | SystemParams::Pol(_))
    }

    /// Whether the matter mode is a two-level emitter.
    pub fn matter_is_two_level(&self) -> bool {
        matches!(self, SystemParams::Rf(_) | SystemParams::Jc(_))
    }

    /// The reference drive amplitude (`Ω_σ`, `Ω_b` or `Ω_a`).
    pub fn drive(&self) -> f64 {
        match *self {
            SystemParams::Rf(p) => p.omega_s,
            SystemParams::Ao(p) => p.omega_b,
            SystemParams::Jc(p) => p.omega_a,
            SystemParams::Pol(p) => p.omega_a,
        }
    }

    /// Copy with the reference drive replaced (ratios such as χ are kept).
    pub fn with_drive(&self, omega: f64) -> Self {
        let mut out = *self;
        match &mut out {
            SystemParams::Rf(p) => p.omega_s = omega,
            SystemParams::Ao(p) => p.omega_b = omega,
            SystemParams::Jc(p) => p.omega_a = omega,
            SystemParams::Pol(p) => p.omega_a = omega,
        }
        out
    }

    /// Smallest decay rate of the model.
    pub fn min_gamma(&self) -> f64 {
        match *self {
            SystemParams::Rf(p) => p.gamma_s,
            SystemParams::Ao(p) => p.gamma_b,
            SystemParams::Jc(p) => p.gamma_a.min(p.gamma_s),
            SystemParams::Pol(p) => p.gamma_a.min(p.gamma_b),
        }
    }

    /// Largest drive amplitude acting on any mode.
    pub fn max_drive(&self) -> f64 {
        match *self {
            SystemParams::Rf(p) => p.omega_s,
            SystemParams::Ao(p) => p.omega_b,
            SystemParams::Jc(p) => p.omega_a * p.chi.max(1.0),
            SystemParams::Pol(p) => p.omega_a * p.chi.max(1.0),
        }
    }
}

/// Highest Fock number kept per bosonic mode, and optionally a cap on the
/// total excitation number of the cavity models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub cavity: usize,
    pub matter: usize,
    /// Keep only product states with `n_cavity + n_matter <= total`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<usize>,
}

impl Default for Truncation {
    fn default() -> Self {
        Self::uniform(DEFAULT_N_MAX)
    }
}

impl Truncation {
    /// Same `n_max` for every bosonic mode.
    pub fn uniform(n_max: usize) -> Self {
        Self { cavity: n_max, matter: n_max, total: None }
    }

    /// All product states with at most `n` quanta in total. For two bosonic
    /// modes this keeps `(n+1)(n+2)/2` states instead of `(n+1)²`.
    pub fn excitations(n: usize) -> Self {
        Self { cavity: n, matter: n, total: Some(n) }
    }
}

/// Which field an observable refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelector {
    /// The cavity photon `a` (JC and POL only).
    Cavity,
    /// The emitter: `σ` for RF/JC, `b` for AO/POL.
    Matter,
}

/// Mode operators of a model embedded in its full product space.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    /// Embedded cavity annihilation operator, if the model has a cavity.
    pub cavity: Option<Operator>,
    /// Embedded matter annihilation operator.
    pub matter: Operator,
    /// Total excitation number of every basis state.
    pub excitations: Vec<usize>,
    /// Fock level of every mode for each basis state, `(cavity, matter)`.
    pub levels: Vec<(usize, usize)>,
    /// Highest level of each mode, `(cavity, matter)`.
    pub top: (usize, usize),
    /// Cap on the total excitation number, if the space is cut by one.
    pub total: Option<usize>,
}

impl ModelSpace {
    /// Full Hilbert dimension.
    pub fn dim(&self) -> usize {
        self.matter.dim()
    }

    /// Embedded annihilation operator of the selected mode.
    pub fn mode(&self, which: ModeSelector) -> Result<&Operator> {
        match which {
            ModeSelector::Matter => Ok(&self.matter),
            ModeSelector::Cavity => self.cavity.as_ref().ok_or_else(|| Error::InvalidParameter {
                name: "mode",
                reason: "this model has no cavity mode".into(),
            }),
        }
    }
}

fn matter_kind(params: &SystemParams, trunc: Truncation) -> ModeKind {
    if params.matter_is_two_level() {
        ModeKind::TwoLevel
    } else {
        ModeKind::Boson { n_max: trunc.matter }
    }
}

/// Mode operators and basis bookkeeping for a model.
pub fn model_space(params: &SystemParams, trunc: Truncation) -> Result<ModelSpace> {
    let mk = matter_kind(params, trunc);
    let m = build_mode(mk)?;
    let dm = mk.dim();
    if params.has_cavity() {
        let ck = ModeKind::Boson { n_max: trunc.cavity };
        let a = build_mode(ck)?;
        let dc = ck.dim();
        let total = trunc.total;
        let kept: Vec<usize> = (0..dc * dm)
            .filter(|k| total.is_none_or(|n| k / dm + k % dm <= n))
            .collect();
        let restrict = |op: Operator| {
            if kept.len() == dc * dm {
                op
            } else {
                Operator::from_fn(kept.len(), |r, c| op.get(kept[r], kept[c]))
            }
        };
        let levels: Vec<(usize, usize)> = kept.iter().map(|k| (k / dm, k % dm)).collect();
        Ok(ModelSpace {
            cavity: Some(restrict(a.kron(&Operator::identity(dm)))),
            matter: restrict(Operator::identity(dc).kron(&m)),
            excitations: levels.iter().map(|(i, j)| i + j).collect(),
            levels,
            top: (dc - 1, dm - 1),
            total,
        })
    } else {
        Ok(ModelSpace {
            cavity: None,
            matter: m,
            excitations: (0..dm).collect(),
            levels: (0..dm).map(|k| (0, k)).collect(),
            top: (0, dm - 1),
            total: None,
        })
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Rotating-frame Hamiltonian of a model.
pub fn build_hamiltonian(params: &SystemParams, trunc: Truncation) -> Result<Operator> {
    params.validate()?;
    let space = model_space(params, trunc)?;
    Ok(hamiltonian_in(params, &space))
}

fn hamiltonian_in(params: &SystemParams, space: &ModelSpace) -> Operator {
    let m = &space.matter;
    let md = m.adjoint();
    let nm = &md * m;
    let matter_drive = &md + m;
    let kerr = |u: f64| (&(&md * &md) * &(m * m)).scale(real(u / 2.0));
    match *params {
        SystemParams::Rf(p) => &nm.scale(real(p.delta_s)) + &matter_drive.scale(real(p.omega_s)),
        SystemParams::Ao(p) => {
            let h = &nm.scale(real(p.delta_b)) + &kerr(p.u);
            &h + &matter_drive.scale(real(p.omega_b))
        }
        SystemParams::Jc(p) => {
            let a = space.cavity.as_ref().expect("JC has a cavity");
            cavity_part(a, m, p.delta_a, p.g, p.omega_a, p.phi)
                .add_ref(&nm.scale(real(p.delta_s)))
                .add_ref(&matter_drive.scale(real(p.chi * p.omega_a)))
        }
        SystemParams::Pol(p) => {
            let a = space.cavity.as_ref().expect("POL has a cavity");
            cavity_part(a, m, p.delta_a, p.g, p.omega_a, p.phi)
                .add_ref(&nm.scale(real(p.delta_b)))
                .add_ref(&kerr(p.u))
                .add_ref(&matter_drive.scale(real(p.chi * p.omega_a)))
        }
    }
}

fn cavity_part(a: &Operator, m: &Operator, delta: f64, g: f64, omega: f64, phi: f64) -> Operator {
    let ad = a.adjoint();
    let md = m.adjoint();
    let e = C64::from_polar(1.0, phi);
    let h = (&ad * a).scale(real(delta));
    let coupling = &(&ad * m) + &(&md * a);
    let drive = &ad.scale(e * omega) + &a.scale(e.conj() * omega);
    h.add_ref(&coupling.scale(real(g))).add_ref(&drive)
}

impl Operator {
    fn add_ref(self, other: &Operator) -> Operator {
        &self + other
    }
}

/// Decay channels `(rate, jump operator)` of a model.
pub fn jump_operators(params: &SystemParams, space: &ModelSpace) -> Vec<(f64, Operator)> {
    let m = space.matter.clone();
    match *params {
        SystemParams::Rf(p) => vec![(p.gamma_s, m)],
        SystemParams::Ao(p) => vec![(p.gamma_b, m)],
        SystemParams::Jc(p) => vec![
            (p.gamma_a, space.cavity.clone().expect("JC has a cavity")),
            (p.gamma_s, m),
        ],
        SystemParams::Pol(p) => vec![
            (p.gamma_a, space.cavity.clone().expect("POL has a cavity")),
            (p.gamma_b, m),
        ],
    }
}

/// Diagonal similarity scaling that keeps weakly driven steady states well
/// conditioned: the density-matrix element `ρ_ij` is solved for in units of
/// `scale^(K_i + K_j)`, `K` being the excitation number.
#[derive(Clone, Debug, PartialEq)]
pub struct Balance {
    pub excitations: Vec<usize>,
    pub scale: f64,
}

/// Smallest factor a balancing weight may reach.
const BALANCE_FLOOR: f64 = 1e-280;

impl Balance {
    /// Weight `scale^(K_i + K_j)` of the vectorized index `i + j·dim`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let k = (self.excitations[i] + self.excitations[j]) as i32;
        self.scale.powi(k).max(BALANCE_FLOOR)
    }
}

/// Linear generator of the master equation acting on `vec(ρ)`.
///
/// Vectorization is column-major: `vec(ρ)[i + j·dim] = ρ_ij`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    matrix: SparseColMat<usize, C64>,
    balance: Option<Balance>,
}

impl Superoperator {
    /// Lindblad generator `−i[H,·] + Σ (γ/2)(2cρc† − c†cρ − ρc†c)`.
    pub fn lindblad(h: &Operator, jumps: &[(f64, Operator)]) -> Result<Self> {
        let d = h.dim();
        let mut trip: Vec<Triplet<usize, usize, C64>> = Vec::new();
        let minus_i = C64::new(0.0, -1.0);
        // −i H ρ  →  (I ⊗ H): row i + j d, col k + j d, value −i H_ik
        // +i ρ H  →  (Hᵀ ⊗ I): row i + j d, col i + l d, value +i H_lj
        let mut eff = h.scale(ONE);
        let mut recycled = Vec::with_capacity(jumps.len());
        for (rate, c) in jumps {
            let cdc = (&c.adjoint() * c).scale(real(*rate / 2.0));
            eff = &eff - &cdc.scale(C64::new(0.0, 1.0));
            recycled.push(c.scale(real(rate.sqrt())));
        }
        // With K = H − i Σ γ/2 c†c the unitary and anticommutator parts are
        // −i K ρ + i ρ K†.
        let k_nz = eff.nonzeros();
        for j in 0..d {
            for &(i, k, v) in &k_nz {
                trip.push(Triplet::new(i + j * d, k + j * d, minus_i * v));
            }
        }
        let kd_nz = eff.adjoint().nonzeros();
        for i in 0..d {
            for &(l, j, v) in &kd_nz {
                trip.push(Triplet::new(i + j * d, i + l * d, -minus_i * v));
            }
        }
        // γ c ρ c†  →  (c̄ ⊗ c): row i + j d, col k + l d, value γ c_ik conj(c_jl)
        for c in &recycled {
            let nz = c.nonzeros();
            for &(i, k, ck) in &nz {
                for &(j, l, cl) in &nz {
                    trip.push(Triplet::new(i + j * d, k + l * d, ck * cl.conj()));
                }
            }
        }
        let matrix = SparseColMat::try_new_from_triplets(d * d, d * d, &trip)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        Ok(Self { dim: d, matrix, balance: None })
    }

    /// Attaches the excitation-number balancing used by the steady-state solver.
    pub fn with_balance(mut self, balance: Balance) -> Self {
        assert_eq!(balance.excitations.len(), self.dim);
        self.balance = Some(balance);
        self
    }

    /// Hilbert dimension (the superoperator acts on `dim²` vectors).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sparse `dim² × dim²` matrix.
    pub fn matrix(&self) -> &SparseColMat<usize, C64> {
        &self.matrix
    }

    /// Balancing information, if any.
    pub fn balance(&self) -> Option<&Balance> {
        self.balance.as_ref()
    }

    /// Applies the generator to an operator: returns `L(ρ)`.
    pub fn apply(&self, rho: &Operator) -> Operator {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        let m = self.matrix.as_ref();
        for col in 0..d * d {
            let x = rho.get(col % d, col / d);
            if x == ZERO {
                continue;
            }
            let rows = m.row_idx_of_col_raw(col);
            let vals = m.val_of_col(col);
            for (r, v) in rows.iter().zip(vals) {
                out[*r] += v * x;
            }
        }
        Operator::from_fn(d, |i, j| out[i + j * d])
    }

    /// `‖L†·vec(1)‖`, which vanishes for trace-preserving generators.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim;
        let m = self.matrix.as_ref();
        let mut acc = 0.0;
        for col in 0..d * d {
            let rows = m.row_idx_of_col_raw(col);
            let vals = m.val_of_col(col);
            let s: C64 = rows
                .iter()
                .zip(vals)
                .filter(|(r, _)| *r % d == *r / d)
                .map(|(_, v)| *v)
                .sum();
            acc += s.norm_sqr();
        }
        acc.sqrt()
    }

    /// Dense copy of the generator.
    pub fn to_dense(&self) -> Mat<C64> {
        self.matrix.to_dense()
    }
}

/// Lindblad generator of a model, carrying the balancing suited to its drive.
pub fn build_liouvillian(params: &SystemParams, trunc: Truncation) -> Result<Superoperator> {
    params.validate()?;
    let space = model_space(params, trunc)?;
    let h = hamiltonian_in(params, &space);
    let jumps = jump_operators(params, &space);
    let scale = balance_scale(params);
    Ok(Superoperator::lindblad(&h, &jumps)?
        .with_balance(Balance { excitations: space.excitations.clone(), scale }))
}

fn balance_scale(params: &SystemParams) -> f64 {
    let ratio = params.max_drive() / params.min_gamma();
    if ratio > 0.0 {
        ratio.min(1.0)
    } else {
        1.0
    }
}

/// Largest population of the highest kept Fock level over the bosonic modes,
/// or of the highest kept excitation shell when the space is cut by one.
pub fn top_level_population(rho: &DensityMatrix, space: &ModelSpace, params: &SystemParams) -> f64 {
    if let Some(n) = space.total {
        return (0..space.dim()).filter(|k| space.excitations[*k] == n).map(|k| rho.get(k, k).re).sum();
    }
    let (mut cavity, mut matter) = (0.0, 0.0);
    for (k, &(c, m)) in space.levels.iter().enumerate() {
        let p = rho.get(k, k).re;
        if c == space.top.0 {
            cavity += p;
        }
        if m == space.top.1 {
            matter += p;
        }
    }
    let cavity = if params.has_cavity() { cavity } else { 0.0 };
    let matter = if params.matter_is_two_level() { 0.0 } else { matter };
    f64::max(cavity, matter)
}
