//! Lattice bookkeeping, the linear symbol and the spectral constants derived
//! from it.
//!
//! Coefficient arrays are stored in FFT order, row-major in `(i1, i2)`: axis
//! index `i` on an `N`-point axis carries the integer wavenumber `i` when
//! `i <= N/2` and `i - N` otherwise, which covers `-N/2 < k <= N/2`.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{KsError, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Norm of the integer index used by the gap constant and the Wiener weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexNorm {
    #[default]
    Euclidean,
    L1,
}

impl IndexNorm {
    pub fn eval(self, k1: i64, k2: i64) -> f64 {
        match self {
            IndexNorm::Euclidean => ((k1 * k1 + k2 * k2) as f64).sqrt(),
            IndexNorm::L1 => (k1.abs() + k2.abs()) as f64,
        }
    }
}

/// Periods and resolution of the torus `[0, L1] x [0, L2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTorus", into = "RawTorus")]
pub struct TorusSpec {
    l1: f64,
    l2: f64,
    n1: usize,
    n2: usize,
    index_norm: IndexNorm,
}

#[derive(Serialize, Deserialize)]
struct RawTorus {
    #[serde(rename = "L1")]
    l1: f64,
    #[serde(rename = "L2")]
    l2: f64,
    #[serde(rename = "N1")]
    n1: usize,
    #[serde(rename = "N2")]
    n2: usize,
    #[serde(default)]
    index_norm: IndexNorm,
}

impl TryFrom<RawTorus> for TorusSpec {
    type Error = KsError;

    fn try_from(raw: RawTorus) -> Result<Self> {
        TorusSpec::new(raw.l1, raw.l2, raw.n1, raw.n2).map(|s| s.with_index_norm(raw.index_norm))
    }
}

impl From<TorusSpec> for RawTorus {
    fn from(s: TorusSpec) -> Self {
        RawTorus {
            l1: s.l1,
            l2: s.l2,
            n1: s.n1,
            n2: s.n2,
            index_norm: s.index_norm,
        }
    }
}

impl TorusSpec {
    pub fn new(l1: f64, l2: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(l1.is_finite() && l1 > 0.0 && l2.is_finite() && l2 > 0.0) {
            return Err(KsError::InvalidTorus(format!(
                "periods must be positive, got L1 = {l1}, L2 = {l2}"
            )));
        }
        for n in [n1, n2] {
            if n < 4 || n % 2 != 0 {
                return Err(KsError::InvalidTorus(format!(
                    "grid sizes must be even and >= 4, got {n}"
                )));
            }
        }
        Ok(Self {
            l1,
            l2,
            n1,
            n2,
            index_norm: IndexNorm::Euclidean,
        })
    }

    /// Square torus with `n` points per axis.
    pub fn square(l: f64, n: usize) -> Result<Self> {
        Self::new(l, l, n, n)
    }

    pub fn with_index_norm(mut self, norm: IndexNorm) -> Self {
        self.index_norm = norm;
        self
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn index_norm(&self) -> IndexNorm {
        self.index_norm
    }

    /// Number of lattice modes, `N1 * N2`.
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same lattice and periods (the index norm is a reporting convention).
    pub fn same_lattice(&self, other: &TorusSpec) -> bool {
        self.l1 == other.l1 && self.l2 == other.l2 && self.n1 == other.n1 && self.n2 == other.n2
    }

    /// Integer lattice index stored at flat position `idx`.
    pub fn lattice(&self, idx: usize) -> (i64, i64) {
        let i1 = idx / self.n2;
        let i2 = idx % self.n2;
        (axis_wavenumber(i1, self.n1), axis_wavenumber(i2, self.n2))
    }

    /// Flat position of lattice index `k`, if it is resolved.
    pub fn position(&self, k1: i64, k2: i64) -> Option<usize> {
        let i1 = axis_position(k1, self.n1)?;
        let i2 = axis_position(k2, self.n2)?;
        Some(i1 * self.n2 + i2)
    }

    /// Flat position of `-k`. Nyquist rows and columns map onto themselves.
    pub fn conj_position(&self, idx: usize) -> usize {
        let i1 = idx / self.n2;
        let i2 = idx % self.n2;
        ((self.n1 - i1) % self.n1) * self.n2 + (self.n2 - i2) % self.n2
    }

    /// True on the `k1 = N1/2` or `k2 = N2/2` lines, which have no resolved
    /// partner at `-k` and are kept at zero.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let (k1, k2) = self.lattice(idx);
        k1 == (self.n1 / 2) as i64 || k2 == (self.n2 / 2) as i64
    }

    /// Physical wavenumber `k̃ = 2π (k1/L1, k2/L2)`.
    pub fn ktilde(&self, k1: i64, k2: i64) -> [f64; 2] {
        [TWO_PI * k1 as f64 / self.l1, TWO_PI * k2 as f64 / self.l2]
    }

    pub fn ktilde_at(&self, idx: usize) -> [f64; 2] {
        let (k1, k2) = self.lattice(idx);
        self.ktilde(k1, k2)
    }

    /// `|k|` of the integer index under the configured convention.
    pub fn index_norm_at(&self, idx: usize) -> f64 {
        let (k1, k2) = self.lattice(idx);
        self.index_norm.eval(k1, k2)
    }

    /// Smallest nonzero `|k̃|` on the lattice (the discrete Poincaré constant).
    pub fn min_ktilde(&self) -> f64 {
        (TWO_PI / self.l1).min(TWO_PI / self.l2)
    }
}

fn axis_wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn axis_position(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k <= -half || k > half {
        return None;
    }
    Some(k.rem_euclid(n as i64) as usize)
}

/// Physical wavenumber of every lattice mode, in storage order.
pub fn wavenumbers(spec: &TorusSpec) -> Vec<[f64; 2]> {
    (0..spec.len()).map(|idx| spec.ktilde_at(idx)).collect()
}

/// `σ(k̃) = |k̃|⁴ - |k̃|²`, the multiplier of `Δ² + Δ`.
pub fn sigma_eval(kt: [f64; 2]) -> f64 {
    let q2 = kt[0] * kt[0] + kt[1] * kt[1];
    q2 * q2 - q2
}

/// `σ` at every lattice mode, storage order.
pub fn symbol_values(spec: &TorusSpec) -> Vec<f64> {
    (0..spec.len()).map(|idx| sigma_eval(spec.ktilde_at(idx))).collect()
}

/// Precomputed symbol and the constants derived from it.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub spec: TorusSpec,
    /// `σ` per lattice mode, storage order.
    pub sigma: Vec<f64>,
    /// Modes with `σ < 0`, ordered by `|k̃|` then lexicographically.
    pub growing: Vec<(i64, i64)>,
    /// Most unstable mode: `|k̃|²` closest to `1/2`.
    pub k0: (i64, i64),
    /// `max(0, min_{k≠0} σ(k)/|k|)`.
    pub gap: f64,
    /// The raw minimum of `σ(k)/|k|` and where it is attained.
    pub min_ratio: f64,
    pub min_ratio_at: (i64, i64),
}

impl SymbolTable {
    /// `A > 0`, i.e. neither growing nor neutral nonzero modes.
    pub fn has_gap(&self) -> bool {
        self.gap > 0.0
    }

    pub fn min_sigma(&self) -> f64 {
        self.sigma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_sigma(&self) -> f64 {
        self.sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sigma_of(&self, k1: i64, k2: i64) -> Option<f64> {
        self.spec.position(k1, k2).map(|idx| self.sigma[idx])
    }

    /// CSV dump with columns `k1,k2,ktilde1,ktilde2,sigma`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k1,k2,ktilde1,ktilde2,sigma")?;
        for (idx, s) in self.sigma.iter().enumerate() {
            let (k1, k2) = self.spec.lattice(idx);
            let kt = self.spec.ktilde(k1, k2);
            writeln!(out, "{k1},{k2},{:.17e},{:.17e},{:.17e}", kt[0], kt[1], s)?;
        }
        Ok(())
    }
}

/// Builds the symbol table. Fails if the gap minimiser is not well inside the
/// resolved lattice (`|k| < min(N1, N2)/4`).
pub fn build_symbol_table(spec: &TorusSpec) -> Result<SymbolTable> {
    let sigma = symbol_values(spec);

    let mut growing = Vec::new();
    let mut k0 = None::<((i64, i64), f64, f64)>;
    let mut min_ratio = f64::INFINITY;
    let mut min_ratio_at = (0, 0);
    for (idx, &s) in sigma.iter().enumerate() {
        let (k1, k2) = spec.lattice(idx);
        if (k1, k2) == (0, 0) {
            continue;
        }
        let kt = spec.ktilde(k1, k2);
        let q2 = kt[0] * kt[0] + kt[1] * kt[1];
        if s < 0.0 {
            growing.push((k1, k2));
        }
        let dist = (q2 - 0.5).abs();
        let better = match k0 {
            None => true,
            Some((best, bd, bq)) => {
                dist < bd || (dist == bd && (q2 < bq || (q2 == bq && (k1, k2) < best)))
            }
        };
        if better {
            k0 = Some(((k1, k2), dist, q2));
        }
        let ratio = s / spec.index_norm().eval(k1, k2);
        if ratio < min_ratio || (ratio == min_ratio && (k1, k2) < min_ratio_at) {
            min_ratio = ratio;
            min_ratio_at = (k1, k2);
        }
    }

    let limit = (spec.n1().min(spec.n2()) / 4) as f64;
    let (m1, m2) = min_ratio_at;
    if IndexNorm::Euclidean.eval(m1, m2) >= limit {
        return Err(KsError::UnderResolvedGap { k1: m1, k2: m2 });
    }

    growing.sort_by(|a, b| {
        let qa = spec.ktilde(a.0, a.1);
        let qb = spec.ktilde(b.0, b.1);
        let na = qa[0] * qa[0] + qa[1] * qa[1];
        let nb = qb[0] * qb[0] + qb[1] * qb[1];
        na.total_cmp(&nb).then(a.cmp(b))
    });

    Ok(SymbolTable {
        spec: *spec,
        sigma,
        growing,
        k0: k0.map(|(k, _, _)| k).unwrap_or((0, 0)),
        gap: min_ratio.max(0.0),
        min_ratio,
        min_ratio_at,
    })
}

/// Length of the growing-mode list.
pub fn count_growing_modes(spec: &TorusSpec) -> Result<usize> {
    build_symbol_table(spec).map(|t| t.growing.len())
}
