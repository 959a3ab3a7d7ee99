//! Norms, smallness thresholds, analyticity-radius estimation and the
//! continuation monitor.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::linear::{i_norm_bound, multiplier_l2_constant, smoothing_constant, Trajectory};
use crate::spectral::{symbol_values, SymbolTable, TorusSpec};

/// Relative noise floor below which shell maxima are ignored by the radius fit.
pub const NOISE_FLOOR: f64 = 1e-14;
/// Fewest shells the radius fit accepts.
pub const MIN_SHELLS: usize = 6;
/// Fits with `R²` below this are flagged.
pub const LOW_QUALITY_R2: f64 = 0.9;

/// `|f|_ρ = Σ_k e^{ρ|k|} (|û(k)| + |v̂(k)|)`.
pub fn wiener_norm(f: &SpectralField, rho: f64) -> f64 {
    (0..f.spec.len())
        .map(|idx| (rho * f.spec.index_norm_at(idx)).exp() * (f.uhat[idx].norm() + f.vhat[idx].norm()))
        .sum()
}

/// `Σ_k sup_{t_n ≤ horizon} e^{α t_n |k|} |f̂(k, t_n)|`, each component
/// separately, summed.
pub fn spacetime_alpha_norm(traj: &Trajectory, alpha: f64, horizon: Option<f64>) -> f64 {
    let spec = &traj.spec;
    let cut = horizon.unwrap_or(f64::INFINITY);
    let mut sup_u = vec![0.0f64; spec.len()];
    let mut sup_v = vec![0.0f64; spec.len()];
    for (&t, f) in traj.times.iter().zip(&traj.fields) {
        if t > cut {
            break;
        }
        for idx in 0..spec.len() {
            let w = (alpha * t * spec.index_norm_at(idx)).exp();
            sup_u[idx] = sup_u[idx].max(w * f.uhat[idx].norm());
            sup_v[idx] = sup_v[idx].max(w * f.vhat[idx].norm());
        }
    }
    sup_u.iter().sum::<f64>() + sup_v.iter().sum::<f64>()
}

/// `(Σ w_k (|û|² + |v̂|²))^{1/2}` with `w_k = |k̃|^{2s}` over `k ≠ 0`
/// (homogeneous) or `(1 + |k̃|²)^s` over all `k`.
pub fn sobolev_norm(f: &SpectralField, s: f64, homogeneous: bool) -> f64 {
    (0..f.spec.len())
        .filter(|&idx| !(homogeneous && idx == 0))
        .map(|idx| {
            let kt = f.spec.ktilde_at(idx);
            let q2 = kt[0] * kt[0] + kt[1] * kt[1];
            let w = if homogeneous { q2.powf(s) } else { (1.0 + q2).powf(s) };
            w * (f.uhat[idx].norm_sqr() + f.vhat[idx].norm_sqr())
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub rho: f64,
    pub r_squared: f64,
    pub shells_used: usize,
    pub low_quality: bool,
}

/// Exponential decay rate of the shell maxima of `|û| + |v̂|`.
///
/// Shells have width `Δ = min(2π/L1, 2π/L2)` in `|k̃|`. Each shell
/// contributes the point `(|k̃*|, log M)` where `k̃*` attains the shell maximum
/// `M`; shells with `M ≤ 1e-14 × peak` are dropped. The estimate is minus the
/// least-squares slope.
pub fn analyticity_radius_estimate(f: &SpectralField) -> Result<RadiusEstimate> {
    let spec = &f.spec;
    let width = spec.min_ktilde();
    let mut shells: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for idx in 1..spec.len() {
        let kt = spec.ktilde_at(idx);
        let q = (kt[0] * kt[0] + kt[1] * kt[1]).sqrt();
        let amp = f.uhat[idx].norm() + f.vhat[idx].norm();
        let entry = shells.entry((q / width).round() as i64).or_insert((0.0, q));
        if amp > entry.0 || (amp == entry.0 && q < entry.1) {
            *entry = (amp, q);
        }
    }
    let peak = shells.values().map(|s| s.0).fold(0.0, f64::max);
    let points: Vec<(f64, f64)> = shells
        .values()
        .filter(|s| s.0 > NOISE_FLOOR * peak && s.0 > 0.0)
        .map(|&(m, q)| (q, m.ln()))
        .collect();
    if points.len() < MIN_SHELLS {
        return Err(KsError::InsufficientDecayRange {
            usable: points.len(),
            required: MIN_SHELLS,
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(RadiusEstimate {
        rho: -slope,
        r_squared,
        shells_used: points.len(),
        low_quality: r_squared < LOW_QUALITY_R2,
    })
}

/// Norm time series aligned with a trajectory. Unmeasurable radii are NaN.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    pub h1dot: Vec<f64>,
    pub wiener0: Vec<f64>,
    pub rho_est: Vec<f64>,
}

impl NormSeries {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let mut s = NormSeries::default();
        for (&t, f) in traj.times.iter().zip(&traj.fields) {
            s.times.push(t);
            s.l2.push(f.l2_norm());
            s.h1dot.push(sobolev_norm(f, 1.0, true));
            s.wiener0.push(wiener_norm(f, 0.0));
            s.rho_est
                .push(analyticity_radius_estimate(f).map(|r| r.rho).unwrap_or(f64::NAN));
        }
        s
    }

    /// CSV with header `t,l2,h1dot,wiener0,rho_est`; non-finite values print
    /// as `nan`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,l2,h1dot,wiener0,rho_est")?;
        for i in 0..self.times.len() {
            let row = [self.times[i], self.l2[i], self.h1dot[i], self.wiener0[i], self.rho_est[i]];
            let cells: Vec<String> = row.iter().map(|&x| csv_number(x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "nan".to_string()
    }
}

/// The measured constant `C` used by the thresholds, with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c: f64,
    /// Continuum smoothing constants for `(s, r) = (1,0), (2,0), (1,1)`.
    pub smoothing_1_0: f64,
    pub smoothing_2_0: f64,
    pub smoothing_1_1: f64,
    /// Lattice `ℓ²` multiplier constant of the `L¹ → L²` estimate.
    pub multiplier_l2: f64,
}

pub fn calibrate_constant(spec: &TorusSpec) -> Calibration {
    let smoothing_1_0 = smoothing_constant(1.0, 0.0);
    let smoothing_2_0 = smoothing_constant(2.0, 0.0);
    let smoothing_1_1 = smoothing_constant(1.0, 1.0);
    let multiplier_l2 = multiplier_l2_constant(&symbol_values(spec));
    Calibration {
        c: smoothing_1_0.max(smoothing_2_0).max(smoothing_1_1).max(multiplier_l2),
        smoothing_1_0,
        smoothing_2_0,
        smoothing_1_1,
        multiplier_l2,
    }
}

/// `e^{-t} min(1, t^{1/4}) / (2C)`.
pub fn strip_halfwidth(t: f64, c: f64) -> f64 {
    (-t).exp() * 1f64.min(t.powf(0.25)) / (2.0 * c)
}

/// `e^T max(T, T^{1/2})`.
pub fn g_tilde(t: f64) -> f64 {
    t.exp() * t.max(t.sqrt())
}

/// `e^{2T} T^{1 + s/4}` for `T ≥ 1`, `e^{2T} T^{(5 - 3s)/4}` below.
pub fn g_lip(t: f64, s: f64) -> f64 {
    let p = if t >= 1.0 { 1.0 + s / 4.0 } else { (5.0 - 3.0 * s) / 4.0 };
    (2.0 * t).exp() * t.powf(p)
}

/// Largest `T` with `g̃(T) ≤ target`, by bisection.
pub fn short_time_horizon(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while g_tilde(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g_tilde(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    #[serde(rename = "A")]
    pub gap: f64,
    pub alpha: f64,
    pub horizon: Option<f64>,
    pub i1_bound: f64,
    pub i2_bound: f64,
    pub r1: f64,
    pub r: f64,
    pub calibration: Calibration,
    /// `‖u₀‖_{L²}` when supplied.
    pub m: Option<f64>,
    /// Largest `T` with `e^T max(T, T^{1/2}) ≤ 1/(2CM)`.
    pub t_star: Option<f64>,
    /// `1/(2C g(T*))` with `s = 1`: the admissible `|𝜶|`.
    pub alpha_vec_max: Option<f64>,
    /// `(t, e^{-t} min(1, t^{1/4})/(2C))` on `(0, max(T*, 1)]`.
    pub strip_halfwidth: Vec<(f64, f64)>,
}

pub fn thresholds(
    table: &SymbolTable,
    alpha: f64,
    horizon: Option<f64>,
    m: Option<f64>,
) -> Result<ThresholdReport> {
    let bounds = i_norm_bound(table, alpha, horizon)?;
    let calibration = calibrate_constant(&table.spec);
    let c = calibration.c;
    let r1 = 1.0 / (3.0 * (bounds.bound_i1 + bounds.bound_i2) + 1.0);
    let t_star = match m {
        Some(m) if m > 0.0 => Some(short_time_horizon(1.0 / (2.0 * c * m))),
        Some(m) if m < 0.0 => {
            return Err(KsError::InvalidArgument(format!("M must be >= 0, got {m}")));
        }
        _ => None,
    };
    let alpha_vec_max = t_star.map(|t| 1.0 / (2.0 * c * g_lip(t, 1.0)));
    let t_end = t_star.unwrap_or(1.0).max(1.0);
    let strip = (1..=200)
        .map(|i| {
            let t = t_end * i as f64 / 200.0;
            (t, strip_halfwidth(t, c))
        })
        .collect();
    Ok(ThresholdReport {
        gap: table.gap,
        alpha,
        horizon,
        i1_bound: bounds.bound_i1,
        i2_bound: bounds.bound_i2,
        r1,
        r: 2.0 * r1,
        calibration,
        m,
        t_star,
        alpha_vec_max,
        strip_halfwidth: strip,
    })
}

/// Outcome of the continuation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// `sup_t ‖u‖_{L²} = M ≤ M_cap`; restart horizon `t₀ = 0.9 (1/(2CM))²`.
    Continue {
        sup_l2: f64,
        m_cap: f64,
        c: f64,
        t0: f64,
        /// `t₀ < 1`, the regime in which the short-time condition is derived.
        t0_in_short_time_regime: bool,
    },
    /// The run finished but its `L²` norm exceeded the cap.
    CapExceeded { sup_l2: f64, m_cap: f64 },
    /// The blow-up detector stopped the run.
    Suspect { last_valid_time: f64 },
}

/// Continuation verdict with the constant calibrated on the trajectory's
/// lattice.
pub fn continuation_monitor(traj: &Trajectory, m_cap: f64) -> Verdict {
    continuation_monitor_with(traj, m_cap, calibrate_constant(&traj.spec).c)
}

pub fn continuation_monitor_with(traj: &Trajectory, m_cap: f64, c: f64) -> Verdict {
    if let Some(last_valid_time) = traj.blowup_at {
        return Verdict::Suspect { last_valid_time };
    }
    let sup_l2 = traj.sup_l2();
    if !(sup_l2 <= m_cap) {
        return Verdict::CapExceeded { sup_l2, m_cap };
    }
    let t0 = 0.9 * (1.0 / (2.0 * c * sup_l2)).powi(2);
    Verdict::Continue {
        sup_l2,
        m_cap,
        c,
        t0,
        t0_in_short_time_regime: t0 < 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::semigroup_apply;
    use crate::spectral::build_symbol_table;
    use crate::C64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_scalar(spec: &TorusSpec, seed: u64, kmax: i64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(spec);
        for idx in 0..spec.len() {
            let (k1, k2) = spec.lattice(idx);
            if k1.abs() <= kmax && k2.abs() <= kmax {
                f.uhat[idx] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        f.enforce_reality();
        f
    }

    fn gradient_data(spec: &TorusSpec, seed: u64, kmax: i64) -> SpectralField {
        let s = random_scalar(spec, seed, kmax);
        let mut phi = s.uhat.clone();
        phi[0] = C64::new(0.0, 0.0);
        SpectralField::gradient_of(spec, &phi).unwrap()
    }

    // Exact convolution of two scalar fields (carried in `uhat`) on a lattice
    // large enough to hold every product mode.
    fn convolve(f: &SpectralField, g: &SpectralField, big: &TorusSpec) -> SpectralField {
        let mut out = SpectralField::zeros(big);
        for i in 0..f.spec.len() {
            for j in 0..g.spec.len() {
                let (a1, a2) = f.spec.lattice(i);
                let (b1, b2) = g.spec.lattice(j);
                let p = big.position(a1 + b1, a2 + b2).expect("doubled lattice holds the product");
                out.uhat[p] += f.uhat[i] * g.uhat[j];
            }
        }
        out
    }

    #[test]
    fn wiener_examples() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        assert_eq!(wiener_norm(&SpectralField::zeros(&spec), 0.3), 0.0);
        let mut f = SpectralField::zeros(&spec);
        let p = spec.position(1, 0).unwrap();
        f.uhat[p] = C64::new(0.3, 0.4);
        f.uhat[spec.conj_position(p)] = C64::new(0.3, -0.4);
        assert!((wiener_norm(&f, 0.0) - 1.0).abs() < 1e-15);
        assert!((wiener_norm(&f, 0.5) - 0.5f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn sobolev_examples() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        let mut f = SpectralField::zeros(&spec);
        f.uhat[spec.position(1, 0).unwrap()] = C64::new(1.0, 0.0);
        assert!((sobolev_norm(&f, 1.0, true) - 2.0).abs() < 1e-14);
        assert!((sobolev_norm(&f, 0.0, true) - f.l2_norm()).abs() < 1e-15);
        assert!((sobolev_norm(&f, 1.0, false) - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn poincare_constant_is_smallest_wavenumber() {
        for (l1, l2) in [(PI, PI), (4.0 * PI, 2.0), (3.0, 7.0)] {
            let spec = TorusSpec::new(l1, l2, 16, 16).unwrap();
            let mut brute = f64::INFINITY;
            for idx in 1..spec.len() {
                let kt = spec.ktilde_at(idx);
                brute = brute.min((kt[0] * kt[0] + kt[1] * kt[1]).sqrt());
            }
            assert!((spec.min_ktilde() - brute).abs() < 1e-15);
            for seed in 0..5 {
                let mut f = random_scalar(&spec, seed, 7);
                f.uhat[0] = C64::new(0.0, 0.0);
                assert!(sobolev_norm(&f, 1.0, true) >= brute * f.l2_norm() * (1.0 - 1e-14));
            }
        }
    }

    #[test]
    fn radius_is_exact_on_pure_exponentials() {
        for rho0 in [0.1, 0.5, 2.0] {
            let spec = TorusSpec::square(PI, 64).unwrap();
            let mut f = SpectralField::zeros(&spec);
            for idx in 1..spec.len() {
                if spec.is_nyquist(idx) {
                    continue;
                }
                let kt = spec.ktilde_at(idx);
                f.uhat[idx] = C64::new((-rho0 * (kt[0] * kt[0] + kt[1] * kt[1]).sqrt()).exp(), 0.0);
            }
            let est = analyticity_radius_estimate(&f).unwrap();
            assert!((est.rho - rho0).abs() < 1e-3, "rho0 = {rho0}: {est:?}");
            assert!(!est.low_quality);
        }
    }

    #[test]
    fn white_spectrum_has_flat_low_quality_fit() {
        let spec = TorusSpec::square(PI, 32).unwrap();
        let f = random_scalar(&spec, 11, 15);
        let est = analyticity_radius_estimate(&f).unwrap();
        assert!(est.rho.abs() < 0.05, "{est:?}");
        assert!(est.low_quality);
    }

    #[test]
    fn too_few_shells_is_an_error() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        let mut f = SpectralField::zeros(&spec);
        f.uhat[spec.position(1, 0).unwrap()] = C64::new(1.0, 0.0);
        assert!(matches!(
            analyticity_radius_estimate(&f),
            Err(KsError::InsufficientDecayRange { usable: 1, .. })
        ));
    }

    #[test]
    fn radius_grows_along_semigroup_orbit() {
        let table = build_symbol_table(&TorusSpec::square(6.0, 64).unwrap()).unwrap();
        let mut phi = vec![C64::new(0.0, 0.0); table.spec.len()];
        for (idx, p) in phi.iter_mut().enumerate() {
            let kt = table.spec.ktilde_at(idx);
            let q = (kt[0] * kt[0] + kt[1] * kt[1]).sqrt();
            if q > 0.0 {
                *p = C64::new(q.powi(-4), 0.0);
            }
        }
        let f = SpectralField::gradient_of(&table.spec, &phi).unwrap();
        let r1 = analyticity_radius_estimate(&semigroup_apply(&table, 0.002, &f).unwrap()).unwrap();
        let r2 = analyticity_radius_estimate(&semigroup_apply(&table, 0.01, &f).unwrap()).unwrap();
        assert!(r2.rho > r1.rho, "{r1:?} {r2:?}");
    }

    #[test]
    fn spacetime_norm_of_orbit_peaks_at_start() {
        let table = build_symbol_table(&TorusSpec::square(PI, 16).unwrap()).unwrap();
        let mut f = SpectralField::zeros(&table.spec);
        let p = table.spec.position(1, 1).unwrap();
        f.uhat[p] = C64::new(0.5, 0.0);
        f.uhat[table.spec.conj_position(p)] = C64::new(0.5, 0.0);
        let times: Vec<f64> = (0..=100).map(|n| n as f64 * 0.01).collect();
        let fields = times.iter().map(|&t| semigroup_apply(&table, t, &f).unwrap()).collect();
        let traj = Trajectory::new(&table.spec, times, fields).unwrap();
        // σ/|k| = 56/√2 ≫ α.
        assert!((spacetime_alpha_norm(&traj, 1.0, None) - wiener_norm(&f, 0.0)).abs() < 1e-15);
        let zero = Trajectory::new(&table.spec, vec![0.0, 1.0], vec![SpectralField::zeros(&table.spec); 2]).unwrap();
        assert_eq!(spacetime_alpha_norm(&zero, 1.0, None), 0.0);
    }

    #[test]
    fn threshold_examples() {
        let table = build_symbol_table(&TorusSpec::square(PI, 32).unwrap()).unwrap();
        let rep = thresholds(&table, 1.0, None, None).unwrap();
        assert!((rep.r1 - 11.0 / 23.0).abs() < 1e-14);
        assert!((rep.r - 2.0 * rep.r1).abs() < 1e-15);
        let four = build_symbol_table(&TorusSpec::square(4.0 * PI, 32).unwrap()).unwrap();
        assert!(matches!(thresholds(&four, 0.5, None, None), Err(KsError::NoGap { .. })));
    }

    #[test]
    fn strip_halfwidth_peaks_at_a_quarter() {
        let c = 2.0;
        let ts: Vec<f64> = (1..=4000).map(|i| i as f64 * 5e-4).collect();
        let hw: Vec<f64> = ts.iter().map(|&t| strip_halfwidth(t, c)).collect();
        let imax = (0..hw.len()).max_by(|&a, &b| hw[a].total_cmp(&hw[b])).unwrap();
        assert!((ts[imax] - 0.25).abs() < 1e-3);
        assert!(hw[..=imax].windows(2).all(|w| w[1] >= w[0]));
        assert!(hw[imax..].windows(2).all(|w| w[1] <= w[0]));
        let t = 1e-6;
        assert!((strip_halfwidth(t, c) / (t.powf(0.25) / (2.0 * c)) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn short_time_horizon_inverts_g_tilde() {
        for target in [0.01, 0.5, 3.0, 100.0] {
            let t = short_time_horizon(target);
            assert!((g_tilde(t) - target).abs() < 1e-12 * target.max(1.0));
        }
    }

    #[test]
    fn continuation_verdicts() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        let mut f = SpectralField::zeros(&spec);
        f.uhat[1] = C64::new(0.1, 0.0);
        let traj = Trajectory::constant_start(f.clone());
        let Verdict::Continue { t0, .. } = continuation_monitor_with(&traj, 1.0, 2.0) else {
            panic!("expected CONTINUE");
        };
        let Verdict::Continue { t0: t0_double, .. } =
            continuation_monitor_with(&Trajectory::constant_start(f.scaled(2.0)), 1.0, 2.0)
        else {
            panic!("expected CONTINUE");
        };
        assert!((t0 / t0_double - 4.0).abs() < 1e-12);
        assert!(matches!(
            continuation_monitor_with(&traj, 0.01, 2.0),
            Verdict::CapExceeded { .. }
        ));
        let mut stopped = traj.clone();
        stopped.blowup_at = Some(0.3);
        assert_eq!(
            continuation_monitor_with(&stopped, 1.0, 2.0),
            Verdict::Suspect { last_valid_time: 0.3 }
        );
    }

    #[test]
    fn norm_series_csv_layout() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        let traj = Trajectory::constant_start(SpectralField::zeros(&spec));
        let mut buf = Vec::new();
        NormSeries::from_trajectory(&traj).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "t,l2,h1dot,wiener0,rho_est\n0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,nan\n"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn wiener_algebra_inequality(seed in 0u64..100_000, rho in prop::sample::select(vec![0.0, 0.3])) {
            let small = TorusSpec::square(2.0, 8).unwrap();
            let big = TorusSpec::square(2.0, 16).unwrap();
            let f = random_scalar(&small, seed, 3);
            let g = random_scalar(&small, seed ^ 0x9e37, 3);
            let fg = convolve(&f, &g, &big);
            prop_assert!(wiener_norm(&fg, rho) <= wiener_norm(&f, rho) * wiener_norm(&g, rho) * (1.0 + 1e-12));
        }

        #[test]
        fn alpha_zero_norm_is_summandwise_sup(seed in 0u64..10_000) {
            let spec = TorusSpec::square(PI, 8).unwrap();
            let fields: Vec<_> = (0..4).map(|i| gradient_data(&spec, seed * 7 + i, 3)).collect();
            let times = vec![0.0, 0.1, 0.2, 0.3];
            let traj = Trajectory::new(&spec, times, fields.clone()).unwrap();
            let mut expect = 0.0;
            for idx in 0..spec.len() {
                expect += fields.iter().map(|f| f.uhat[idx].norm()).fold(0.0, f64::max);
                expect += fields.iter().map(|f| f.vhat[idx].norm()).fold(0.0, f64::max);
            }
            prop_assert!((spacetime_alpha_norm(&traj, 0.0, None) - expect).abs() <= 1e-13 * expect);
        }

        #[test]
        fn semigroup_orbit_bounded_by_data(seed in 0u64..10_000, alpha in 0.1f64..11.9) {
            let table = build_symbol_table(&TorusSpec::square(PI, 16).unwrap()).unwrap();
            let f = gradient_data(&table.spec, seed, 7);
            let times: Vec<f64> = (0..=40).map(|n| n as f64 * 0.005).collect();
            let fields = times.iter().map(|&t| semigroup_apply(&table, t, &f).unwrap()).collect();
            let traj = Trajectory::new(&table.spec, times, fields).unwrap();
            prop_assert!(spacetime_alpha_norm(&traj, alpha, None) <= wiener_norm(&f, 0.0) * (1.0 + 1e-14));
        }
    }
}
