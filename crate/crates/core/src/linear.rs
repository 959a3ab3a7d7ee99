//! The semigroup `e^{-tℒ}`, the Duhamel operators `I₁`, `I₂` and checks of
//! the semigroup smoothing estimates.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::spacetime_alpha_norm;
use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::spectral::{SymbolTable, TorusSpec};
use crate::C64;

/// Relative tolerance for "uniform" time grids.
pub const UNIFORM_TOL: f64 = 1e-12;

/// Time grid plus the stored fields.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: TorusSpec,
    pub times: Vec<f64>,
    pub fields: Vec<SpectralField>,
    /// Set when the producer stopped early on a blow-up diagnosis.
    pub blowup_at: Option<f64>,
}

impl Trajectory {
    pub fn new(spec: &TorusSpec, times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(KsError::InvalidArgument(
                "trajectory needs one field per time and at least one time".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(KsError::InvalidArgument("trajectory must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(KsError::InvalidArgument("times must be strictly increasing".into()));
        }
        if fields.iter().any(|f| !f.spec.same_lattice(spec)) {
            return Err(KsError::LatticeMismatch);
        }
        Ok(Self {
            spec: *spec,
            times,
            fields,
            blowup_at: None,
        })
    }

    /// A one-sample trajectory holding `f` at `t = 0`.
    pub fn constant_start(f: SpectralField) -> Self {
        Self {
            spec: f.spec,
            times: vec![0.0],
            fields: vec![f],
            blowup_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn last(&self) -> &SpectralField {
        self.fields.last().expect("trajectory is never empty")
    }

    /// The common spacing, or an error if the grid is not uniform. A single
    /// sample has spacing zero.
    pub fn uniform_step(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Ok(0.0);
        }
        let dt = self.final_time() / (self.times.len() - 1) as f64;
        let mut deviation: f64 = 0.0;
        for (n, &t) in self.times.iter().enumerate() {
            deviation = deviation.max((t - n as f64 * dt).abs() / dt);
        }
        if deviation > UNIFORM_TOL * self.times.len() as f64 {
            return Err(KsError::NonUniformGrid { deviation });
        }
        Ok(dt)
    }

    /// `sup_t ‖f(t)‖_{L²}`.
    pub fn sup_l2(&self) -> f64 {
        self.fields.iter().map(|f| f.l2_norm()).fold(0.0, f64::max)
    }

    /// `sup_t ‖self(t) - other(t)‖_{L²}` on a shared grid.
    pub fn sup_l2_distance(&self, other: &Trajectory) -> Result<f64> {
        if self.times.len() != other.times.len()
            || self
                .times
                .iter()
                .zip(&other.times)
                .any(|(a, b)| (a - b).abs() > UNIFORM_TOL * a.abs().max(1.0))
        {
            return Err(KsError::InvalidArgument("trajectories use different grids".into()));
        }
        Ok(self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.l2_distance(b))
            .fold(0.0, f64::max))
    }
}

/// `e^{-tℒ} f`: every coefficient multiplied by `e^{-tσ(k̃)}`.
pub fn semigroup_apply(table: &SymbolTable, t: f64, f: &SpectralField) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(KsError::InvalidArgument(format!("semigroup time must be >= 0, got {t}")));
    }
    if !table.spec.same_lattice(&f.spec) {
        return Err(KsError::LatticeMismatch);
    }
    let mut out = f.clone();
    for (idx, &s) in table.sigma.iter().enumerate() {
        let m = (-t * s).exp();
        out.uhat[idx] *= m;
        out.vhat[idx] *= m;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// `(φ₁(z), ψ(z))` with `φ₁ = (1 - e^{-z})/z` and
/// `ψ = (1 - e^{-z} - z e^{-z})/z²`, via Taylor series near zero.
pub fn phi_psi(z: f64) -> (f64, f64) {
    if z.abs() < 0.5 {
        let mut phi = 0.0;
        let mut psi = 0.0;
        // term = (-z)^n / n!
        let mut term = 1.0;
        for n in 0..24 {
            let nf = n as f64;
            phi += term / (nf + 1.0);
            psi += term / (nf + 2.0);
            term *= -z / (nf + 1.0);
        }
        (phi, psi)
    } else {
        let e = (-z).exp();
        ((1.0 - e) / z, (1.0 - e - z * e) / (z * z))
    }
}

/// One-step weights of the exponential trapezoid rule for
/// `J(t) = ∫₀ᵗ e^{-σ(t-s)} g(s) ds` with `g` linear on each step:
/// `J_{n+1} = e^{-σΔ} J_n + w_old g_n + w_new g_{n+1}`.
#[derive(Debug, Clone)]
pub struct ExpTrapezoid {
    pub decay: Vec<f64>,
    pub w_old: Vec<f64>,
    pub w_new: Vec<f64>,
}

impl ExpTrapezoid {
    pub fn new(sigma: &[f64], dt: f64) -> Self {
        let mut decay = Vec::with_capacity(sigma.len());
        let mut w_old = Vec::with_capacity(sigma.len());
        let mut w_new = Vec::with_capacity(sigma.len());
        for &s in sigma {
            let z = s * dt;
            let (phi, psi) = phi_psi(z);
            decay.push((-z).exp());
            w_old.push(dt * psi);
            w_new.push(dt * (phi - psi));
        }
        Self {
            decay,
            w_old,
            w_new,
        }
    }

    pub fn advance(&self, j: &mut [C64], g_old: &[C64], g_new: &[C64]) {
        for (idx, jj) in j.iter_mut().enumerate() {
            *jj = *jj * self.decay[idx] + g_old[idx] * self.w_old[idx] + g_new[idx] * self.w_new[idx];
        }
    }
}

/// `2πi k_a / L_a` per lattice mode.
pub fn axis_multiplier(spec: &TorusSpec, axis: Axis) -> Vec<C64> {
    (0..spec.len())
        .map(|idx| {
            let kt = spec.ktilde_at(idx);
            let k = match axis {
                Axis::X => kt[0],
                Axis::Y => kt[1],
            };
            C64::new(0.0, k)
        })
        .collect()
}

/// `I_a h` at every stored time, applied componentwise to `(u, v)`.
pub fn i_apply(table: &SymbolTable, axis: Axis, h: &Trajectory) -> Result<Trajectory> {
    if !table.spec.same_lattice(&h.spec) {
        return Err(KsError::LatticeMismatch);
    }
    let dt = h.uniform_step()?;
    let weights = ExpTrapezoid::new(&table.sigma, dt);
    let mult = axis_multiplier(&h.spec, axis);
    let n = h.spec.len();
    let mut ju = vec![C64::new(0.0, 0.0); n];
    let mut jv = vec![C64::new(0.0, 0.0); n];
    let mut fields = Vec::with_capacity(h.len());
    fields.push(SpectralField::zeros(&h.spec));
    for w in h.fields.windows(2) {
        weights.advance(&mut ju, &w[0].uhat, &w[1].uhat);
        weights.advance(&mut jv, &w[0].vhat, &w[1].vhat);
        let uhat = ju.iter().zip(&mult).map(|(j, m)| j * m).collect();
        let vhat = jv.iter().zip(&mult).map(|(j, m)| j * m).collect();
        fields.push(SpectralField::from_parts(&h.spec, uhat, vhat)?);
    }
    Trajectory::new(&h.spec, h.times.clone(), fields)
}

/// Analytic and measured operator norms of `I₁`, `I₂` on `ℬ_α` or `ℬ_{α,T}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormReport {
    pub alpha: f64,
    pub horizon: Option<f64>,
    pub gap: f64,
    pub bound_i1: f64,
    pub bound_i2: f64,
    pub empirical_i1: Option<f64>,
    pub empirical_i2: Option<f64>,
    /// Size of the finite set `{k ≠ 0 : σ(k) ≤ α|k|}` (finite horizon only).
    pub omega1_size: Option<usize>,
}

/// Analytic bounds. Infinite horizon: `(2π/L_a)/(A - α)`, requiring
/// `0 ≤ α < A`. Finite horizon: the larger of the exact `Ω₁` supremum and the
/// `Ω₂` supremum of `(2π|k_a|/L_a)/(σ - α|k|)`.
pub fn i_norm_bound(
    table: &SymbolTable,
    alpha: f64,
    horizon: Option<f64>,
) -> Result<OperatorNormReport> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(KsError::InvalidArgument(format!("alpha must be >= 0, got {alpha}")));
    }
    let spec = &table.spec;
    let mut report = OperatorNormReport {
        alpha,
        horizon,
        gap: table.gap,
        bound_i1: 0.0,
        bound_i2: 0.0,
        empirical_i1: None,
        empirical_i2: None,
        omega1_size: None,
    };
    match horizon {
        None => {
            if !(table.has_gap() && alpha < table.gap) {
                return Err(KsError::NoGap {
                    alpha,
                    gap: table.gap,
                });
            }
            report.bound_i1 = 2.0 * PI / spec.l1() / (table.gap - alpha);
            report.bound_i2 = 2.0 * PI / spec.l2() / (table.gap - alpha);
        }
        Some(t_max) => {
            if !(t_max > 0.0) {
                return Err(KsError::InvalidArgument(format!("horizon must be > 0, got {t_max}")));
            }
            let mut omega1 = 0;
            for (idx, &s) in table.sigma.iter().enumerate() {
                let (k1, k2) = spec.lattice(idx);
                if (k1, k2) == (0, 0) {
                    continue;
                }
                let lambda = s - alpha * spec.index_norm_at(idx);
                let profile = if lambda <= 0.0 {
                    omega1 += 1;
                    finite_horizon_sup(lambda, t_max)
                } else {
                    1.0 / lambda
                };
                let kt = spec.ktilde(k1, k2);
                report.bound_i1 = report.bound_i1.max(kt[0].abs() * profile);
                report.bound_i2 = report.bound_i2.max(kt[1].abs() * profile);
            }
            report.omega1_size = Some(omega1);
        }
    }
    Ok(report)
}

/// `sup_{t ≤ T} (1 - e^{-λt})/λ` for `λ ≤ 0`, attained at `t = T`.
fn finite_horizon_sup(lambda: f64, t_max: f64) -> f64 {
    if lambda == 0.0 {
        t_max
    } else {
        (t_max * -lambda).exp_m1() / -lambda
    }
}

/// A single-mode probe `ĥ(±k, s) = c e^{-βs}` (conjugate at `-k`), carried by
/// the `u` component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub k: (i64, i64),
    pub c: C64,
    pub beta: f64,
}

impl Probe {
    pub fn trajectory(&self, spec: &TorusSpec, dt: f64, steps: usize) -> Result<Trajectory> {
        let pos = spec
            .position(self.k.0, self.k.1)
            .ok_or_else(|| KsError::InvalidArgument(format!("probe mode {:?} not resolved", self.k)))?;
        let neg = spec.conj_position(pos);
        let mut times = Vec::with_capacity(steps + 1);
        let mut fields = Vec::with_capacity(steps + 1);
        for n in 0..=steps {
            let t = n as f64 * dt;
            let mut f = SpectralField::zeros(spec);
            let c = self.c * (-self.beta * t).exp();
            f.uhat[pos] = c;
            f.uhat[neg] = c.conj();
            times.push(t);
            fields.push(f);
        }
        Trajectory::new(spec, times, fields)
    }
}

/// Random probes on nonzero, non-Nyquist modes with `|k| ≤ kmax`. Decay rates
/// are drawn from `[0, α|k|]`; `β = α|k|` makes the weighted profile flat,
/// which is the extremal case for the bound.
pub fn random_probes(spec: &TorusSpec, alpha: f64, kmax: i64, count: usize, seed: u64) -> Vec<Probe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(i64, i64)> = (0..spec.len())
        .filter(|&idx| !spec.is_nyquist(idx))
        .map(|idx| spec.lattice(idx))
        .filter(|&(k1, k2)| (k1, k2) != (0, 0) && k1.abs() <= kmax && k2.abs() <= kmax)
        .collect();
    (0..count)
        .map(|i| {
            let k = modes[rng.gen_range(0..modes.len())];
            let weight = alpha * spec.index_norm().eval(k.0, k.1);
            // Every other probe is the extremal flat profile.
            let beta = if i % 2 == 0 { weight } else { rng.gen_range(0.0..=weight) };
            let c = C64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..2.0 * PI));
            Probe { k, c, beta }
        })
        .collect()
}

/// Fills `empirical_i1/i2` with the largest ratio
/// `‖I_a h‖_{α(,T)} / ‖h‖_{α(,T)}` over the probes, each sampled on
/// `[0, steps·dt]`.
pub fn measure_operator_norms(
    table: &SymbolTable,
    report: &mut OperatorNormReport,
    probes: &[Probe],
    dt: f64,
    steps: usize,
) -> Result<()> {
    let (alpha, horizon) = (report.alpha, report.horizon);
    let ratios = probes
        .par_iter()
        .map(|probe| -> Result<[f64; 2]> {
            let h = probe.trajectory(&table.spec, dt, steps)?;
            let denom = spacetime_alpha_norm(&h, alpha, horizon);
            let mut out = [0.0; 2];
            for (slot, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
                let ih = i_apply(table, axis, &h)?;
                out[slot] = spacetime_alpha_norm(&ih, alpha, horizon) / denom;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = ratios
        .iter()
        .fold([0.0f64; 2], |acc, r| [acc[0].max(r[0]), acc[1].max(r[1])]);
    report.empirical_i1 = Some(best[0]);
    report.empirical_i2 = Some(best[1]);
    Ok(())
}

/// Measured multiplier supremum against the shape `e^{t/2} max(1, t^{(r-s)/4})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingCheck {
    pub t: f64,
    pub s: f64,
    pub r: f64,
    pub measured_sup: f64,
    pub constant: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `e^{t/2} max(1, t^{-m/4})`.
pub fn smoothing_shape(t: f64, m: f64) -> f64 {
    (t / 2.0).exp() * 1f64.max(t.powf(-m / 4.0))
}

/// `sup_{q>0} q^m e^{-t(q⁴ - q²)}` in closed form: the maximiser solves
/// `4t q⁴ - 2t q² - m = 0`. For `m = 0` the supremum is `e^{t/4}`.
pub fn continuum_multiplier_sup(t: f64, m: f64) -> f64 {
    let q2 = (1.0 + (1.0 + 4.0 * m / t).sqrt()) / 4.0;
    (0.5 * m * q2.ln() - t * (q2 * q2 - q2)).exp()
}

/// Log-spaced calibration grid `[1e-4, 10]`.
pub fn calibration_times() -> Vec<f64> {
    let n = 401;
    let (lo, hi) = (1e-4f64.ln(), 10f64.ln());
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Smoothing constant for the pair `(s, r)`: the largest ratio of the
/// continuum multiplier supremum to the shape over the calibration grid.
pub fn smoothing_constant(s: f64, r: f64) -> f64 {
    let m = s - r;
    calibration_times()
        .into_iter()
        .map(|t| continuum_multiplier_sup(t, m) / smoothing_shape(t, m))
        .fold(0.0, f64::max)
}

/// `max_{k≠0} |k̃|^{s-r} e^{-tσ}` on the lattice against the calibrated bound.
pub fn smoothing_check(spec: &TorusSpec, t: f64, s: f64, r: f64) -> Result<SmoothingCheck> {
    if !(t > 0.0) {
        return Err(KsError::InvalidArgument(format!("smoothing time must be > 0, got {t}")));
    }
    if r > s {
        return Err(KsError::InvalidArgument(format!("need r <= s, got s = {s}, r = {r}")));
    }
    let m = s - r;
    let measured_sup = (0..spec.len())
        .filter(|&idx| spec.lattice(idx) != (0, 0))
        .map(|idx| {
            let kt = spec.ktilde_at(idx);
            let q2 = kt[0] * kt[0] + kt[1] * kt[1];
            q2.powf(m / 2.0) * (-t * (q2 * q2 - q2)).exp()
        })
        .fold(0.0, f64::max);
    let constant = smoothing_constant(s, r);
    let bound = constant * smoothing_shape(t, m);
    Ok(SmoothingCheck {
        t,
        s,
        r,
        measured_sup,
        constant,
        bound,
        ratio: measured_sup / bound,
    })
}

/// `‖e^{-tσ}‖_{ℓ²}` over the whole lattice, the multiplier side of the
/// `L¹ → L²` estimate.
pub fn multiplier_l2(sigma: &[f64], t: f64) -> f64 {
    sigma
        .iter()
        .map(|&s| (-2.0 * t * s).exp())
        .sum::<f64>()
        .sqrt()
}

/// Largest `‖e^{-tσ}‖_{ℓ²} / (e^{t/2} max(1, t^{-1/4}))` over the calibration grid.
pub fn multiplier_l2_constant(sigma: &[f64]) -> f64 {
    calibration_times()
        .into_iter()
        .map(|t| multiplier_l2(sigma, t) / smoothing_shape(t, 1.0))
        .fold(0.0, f64::max)
}
