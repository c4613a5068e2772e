//! Tables of normally ordered steady-state moments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{DensityMatrix, ModeSelector, ModelSpace, C64};

/// Exponent tuple `(m, n, μ, ν)` of `⟨c†^m c^n a†^μ a^ν⟩`, where `c` is the
/// matter mode (σ or b) and `a` the cavity.
pub type Key = [u32; 4];

/// Total operator order of a key.
pub fn order(k: &Key) -> u32 {
    k.iter().sum()
}

/// Moments `⟨c†^m c^n a†^μ a^ν⟩` with the drive power at which each enters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorTable {
    entries: BTreeMap<Key, (C64, u32)>,
}

impl CorrelatorTable {
    /// Table holding only the normalization `⟨1⟩ = 1`.
    pub fn unit() -> Self {
        let mut t = Self::default();
        t.insert([0, 0, 0, 0], C64::new(1.0, 0.0), 0);
        t
    }

    /// Stores an entry and its leading drive order.
    pub fn insert(&mut self, key: Key, value: C64, drive_order: u32) {
        self.entries.insert(key, (value, drive_order));
    }

    /// Value of an entry, if present.
    pub fn get(&self, key: Key) -> Option<C64> {
        self.entries.get(&key).map(|e| e.0)
    }

    /// Value of an entry or an incomplete-table error.
    pub fn require(&self, key: Key) -> Result<C64> {
        self.get(key).ok_or(Error::IncompleteTable(key))
    }

    /// Leading drive order of an entry.
    pub fn drive_order(&self, key: Key) -> Option<u32> {
        self.entries.get(&key).map(|e| e.1)
    }

    /// Iterates over `(key, value, drive_order)`.
    pub fn iter(&self) -> impl Iterator<Item = (Key, C64, u32)> + '_ {
        self.entries.iter().map(|(k, (v, o))| (*k, *v, *o))
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the table is empty.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest deviation from `entry(m,n,μ,ν) = conj(entry(n,m,ν,μ))`, relative
    /// to the entry magnitude.
    pub fn conjugation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v, _) in self.iter() {
            if let Some(w) = self.get([k[1], k[0], k[3], k[2]]) {
                let scale = v.norm().max(w.norm());
                if scale > 0.0 {
                    worst = worst.max((v - w.conj()).norm() / scale);
                }
            }
        }
        worst
    }

    /// Moments computed from a density matrix for all keys up to a total order.
    pub fn from_density(
        rho: &DensityMatrix,
        space: &ModelSpace,
        two_level_matter: bool,
        max_order: u32,
    ) -> Self {
        let c = &space.matter;
        let cd = c.adjoint();
        let cavity = space.cavity.as_ref();
        let mut t = Self::default();
        for key in all_keys(max_order, two_level_matter, cavity.is_some()) {
            let mut op = &cd.pow(key[0] as usize) * &c.pow(key[1] as usize);
            if let Some(a) = cavity {
                let ad = a.adjoint();
                op = &op * &(&ad.pow(key[2] as usize) * &a.pow(key[3] as usize));
            }
            t.insert(key, op.expect(rho), order(&key));
        }
        t
    }

    /// Single-field moments of the selected mode.
    pub fn field(&self, which: ModeSelector) -> FieldMoments {
        let mut f = FieldMoments::default();
        for (k, v, _) in self.iter() {
            match which {
                ModeSelector::Matter if k[2] == 0 && k[3] == 0 => f.insert(k[0], k[1], v),
                ModeSelector::Cavity if k[0] == 0 && k[1] == 0 => f.insert(k[2], k[3], v),
                _ => {}
            }
        }
        f
    }
}

/// Every key up to a total order for the given mode structure, sorted by
/// total order, then by `(m+n, μ+ν)`, then lexicographically.
pub(crate) fn all_keys(max_order: u32, two_level_matter: bool, has_cavity: bool) -> Vec<Key> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        out.extend(block_keys(total, two_level_matter, has_cavity));
    }
    out
}

/// Keys of a single total order in canonical block ordering.
pub(crate) fn block_keys(total: u32, two_level_matter: bool, has_cavity: bool) -> Vec<Key> {
    let mmax = if two_level_matter { 1 } else { total };
    let cmax = if has_cavity { total } else { 0 };
    let mut out = Vec::new();
    for m in 0..=mmax {
        for n in 0..=mmax {
            for mu in 0..=cmax {
                if m + n + mu > total {
                    continue;
                }
                let nu = total - m - n - mu;
                if nu <= cmax {
                    out.push([m, n, mu, nu]);
                }
            }
        }
    }
    out.sort_by_key(|k| (k[0] + k[1], k[2] + k[3], *k));
    out
}

/// Normally ordered moments `⟨d†^p d^q⟩` of one field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldMoments {
    entries: BTreeMap<(u32, u32), C64>,
}

impl FieldMoments {
    /// Vacuum moments: only `⟨1⟩ = 1` is nonzero.
    pub fn vacuum(max_order: u32) -> Self {
        let mut f = Self::default();
        for p in 0..=max_order {
            for q in 0..=max_order {
                let v = if p == 0 && q == 0 { 1.0 } else { 0.0 };
                f.insert(p, q, C64::new(v, 0.0));
            }
        }
        f
    }

    /// Stores `⟨d†^p d^q⟩`.
    pub fn insert(&mut self, p: u32, q: u32, v: C64) {
        self.entries.insert((p, q), v);
    }

    /// Reads `⟨d†^p d^q⟩`.
    pub fn get(&self, p: u32, q: u32) -> Option<C64> {
        self.entries.get(&(p, q)).copied()
    }

    /// Reads `⟨d†^p d^q⟩` or reports the missing tuple.
    pub fn require(&self, p: u32, q: u32) -> Result<C64> {
        self.get(p, q).ok_or(Error::IncompleteTable([p, q, 0, 0]))
    }

    /// Iterates over `((p, q), value)`.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), C64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}
