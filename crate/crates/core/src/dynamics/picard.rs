use serde::{Deserialize, Serialize};

use super::nonlinear::{Dealias, PseudoSpectral};
use crate::analysis::wiener_norm;
use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::linear::{i_norm_bound, ExpTrapezoid, OperatorNormReport, Trajectory};
use crate::spectral::SymbolTable;
use crate::C64;

/// Consecutive expanding iterations after which the iteration is abandoned.
const DIVERGENCE_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub alpha: f64,
    /// `None` selects the infinite-horizon space `ℬ_α` (gap required); the
    /// iteration itself always runs on `[0, t_final]`.
    pub horizon: Option<f64>,
    pub t_final: f64,
    pub dt: f64,
    pub max_iters: usize,
    /// Stop once the residual falls to this value.
    pub tol: f64,
    #[serde(default)]
    pub dealias: Dealias,
}

impl PicardConfig {
    pub fn new(alpha: f64, t_final: f64, dt: f64) -> Self {
        Self {
            alpha,
            horizon: None,
            t_final,
            dt,
            max_iters: 60,
            tol: 1e-14,
            dealias: Dealias::TwoThirds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterates: usize,
    /// `‖w^{m+1} - w^m‖` in the discretised `ℬ_α` (or `ℬ_{α,T}`) norm.
    pub residuals: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    pub threshold_r1: f64,
    pub r: f64,
    pub data_norm: f64,
    /// `(‖I₁‖ + ‖I₂‖)(r + r₁)`, the a priori contraction factor on `X_r`.
    pub ratio_bound: f64,
    pub bounds: OperatorNormReport,
}

/// Discrete `Σ_k sup_n e^{α t_n |k|} |·|`, accumulated one time level at a time.
struct AlphaNormAccumulator {
    weights: Vec<f64>,
    sup_u: Vec<f64>,
    sup_v: Vec<f64>,
}

impl AlphaNormAccumulator {
    fn new(table: &SymbolTable) -> Self {
        let n = table.spec.len();
        Self {
            weights: (0..n).map(|i| table.spec.index_norm_at(i)).collect(),
            sup_u: vec![0.0; n],
            sup_v: vec![0.0; n],
        }
    }

    fn add(&mut self, alpha: f64, t: f64, du: impl Iterator<Item = f64>, dv: impl Iterator<Item = f64>) {
        for (i, (a, b)) in du.zip(dv).enumerate() {
            let w = (alpha * t * self.weights[i]).exp();
            self.sup_u[i] = self.sup_u[i].max(w * a);
            self.sup_v[i] = self.sup_v[i].max(w * b);
        }
    }

    fn total(&self) -> f64 {
        self.sup_u.iter().sum::<f64>() + self.sup_v.iter().sum::<f64>()
    }
}

/// Picard iteration `w^{m+1} = 𝒯(w^m)` for the Duhamel form
/// `u = e^{-tℒ}u₀ - I₁(|u|²/2)`, `v = e^{-tℒ}v₀ - I₂(|u|²/2)`, started from
/// the trend `e^{-tℒ}u₀` on the grid `t_n = n·dt`.
pub fn picard_mild_solve(
    table: &SymbolTable,
    u0: &SpectralField,
    cfg: &PicardConfig,
) -> Result<(Trajectory, PicardReport)> {
    if !table.spec.same_lattice(&u0.spec) {
        return Err(KsError::LatticeMismatch);
    }
    let bounds = i_norm_bound(table, cfg.alpha, cfg.horizon)?;
    let steps = super::stepper::StepperConfig::new(cfg.dt, cfg.t_final).steps()?;
    let spec = table.spec;
    let kernel = PseudoSpectral::new(&spec, cfg.dealias);
    let quad = ExpTrapezoid::new(&table.sigma, cfg.dt);
    let times: Vec<f64> = (0..=steps).map(|n| n as f64 * cfg.dt).collect();
    let norm_cut = cfg.horizon.unwrap_or(f64::INFINITY);

    let trend: Vec<SpectralField> = times
        .iter()
        .map(|&t| crate::linear::semigroup_apply(table, t, u0))
        .collect::<Result<_>>()?;

    let b = bounds.bound_i1 + bounds.bound_i2;
    let r1 = 1.0 / (3.0 * b + 1.0);
    let mut report = PicardReport {
        iterates: 0,
        residuals: Vec::new(),
        contraction_ratios: Vec::new(),
        converged: false,
        diverged: false,
        threshold_r1: r1,
        r: 2.0 * r1,
        data_norm: wiener_norm(u0, 0.0),
        ratio_bound: b * 3.0 * r1,
        bounds,
    };

    let mut current = trend.clone();
    let mut expanding = 0;
    while report.iterates < cfg.max_iters {
        let mut next = Vec::with_capacity(current.len());
        let mut acc = AlphaNormAccumulator::new(table);
        let mut j = vec![C64::new(0.0, 0.0); spec.len()];
        let mut g_old = kernel.half_square(&current[0]);
        for (n, &t) in times.iter().enumerate() {
            if n > 0 {
                let g_new = kernel.half_square(&current[n]);
                quad.advance(&mut j, &g_old, &g_new);
                g_old = g_new;
            }
            let (iu, iv) = kernel.gradient(&j);
            let mut f = trend[n].clone();
            for i in 0..spec.len() {
                f.uhat[i] -= iu[i];
                f.vhat[i] -= iv[i];
            }
            if t <= norm_cut {
                acc.add(
                    cfg.alpha,
                    t,
                    f.uhat.iter().zip(&current[n].uhat).map(|(a, b)| (a - b).norm()),
                    f.vhat.iter().zip(&current[n].vhat).map(|(a, b)| (a - b).norm()),
                );
            }
            next.push(f);
        }
        current = next;
        report.iterates += 1;
        let residual = acc.total();
        if let Some(&prev) = report.residuals.last() {
            let ratio = if prev > 0.0 { residual / prev } else { 0.0 };
            report.contraction_ratios.push(ratio);
            expanding = if ratio > 1.0 { expanding + 1 } else { 0 };
        }
        report.residuals.push(residual);
        if !residual.is_finite() || expanding >= DIVERGENCE_RUN {
            report.diverged = true;
            break;
        }
        if residual <= cfg.tol {
            report.converged = true;
            break;
        }
    }
    let traj = Trajectory::new(&spec, times, current)?;
    Ok((traj, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::stepper::{integrate, StepperConfig};
    use crate::spectral::{build_symbol_table, TorusSpec};
    use std::f64::consts::PI;

    fn small_data(spec: &TorusSpec, amp: f64) -> SpectralField {
        let mut phi = vec![C64::new(0.0, 0.0); spec.len()];
        for (k, c) in [((1, 0), C64::new(0.3, 0.1)), ((1, 1), C64::new(-0.2, 0.4)), ((0, 2), C64::new(0.1, 0.0))] {
            let p = spec.position(k.0, k.1).unwrap();
            phi[p] = c * amp;
            phi[spec.conj_position(p)] = (c * amp).conj();
        }
        SpectralField::gradient_of(spec, &phi).unwrap()
    }

    #[test]
    fn zero_data_converges_in_one_iteration() {
        let table = build_symbol_table(&TorusSpec::square(PI, 8).unwrap()).unwrap();
        let (traj, rep) =
            picard_mild_solve(&table, &SpectralField::zeros(&table.spec), &PicardConfig::new(1.0, 0.1, 0.01))
                .unwrap();
        assert_eq!(rep.iterates, 1);
        assert!(rep.converged);
        assert!(traj.fields.iter().all(|f| f.is_zero()));
    }

    #[test]
    fn thresholds_follow_the_operator_bounds() {
        let table = build_symbol_table(&TorusSpec::square(PI, 8).unwrap()).unwrap();
        let (_, rep) =
            picard_mild_solve(&table, &SpectralField::zeros(&table.spec), &PicardConfig::new(1.0, 0.1, 0.01))
                .unwrap();
        assert!((rep.threshold_r1 - 11.0 / 23.0).abs() < 1e-14);
        assert!((rep.r - 22.0 / 23.0).abs() < 1e-14);
        assert!((rep.ratio_bound - 4.0 / 11.0 * 33.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn requires_gap_in_infinite_horizon_mode() {
        let table = build_symbol_table(&TorusSpec::square(4.0 * PI, 8).unwrap()).unwrap();
        let u0 = SpectralField::zeros(&table.spec);
        assert!(matches!(
            picard_mild_solve(&table, &u0, &PicardConfig::new(0.5, 0.1, 0.01)),
            Err(KsError::NoGap { .. })
        ));
        let mut cfg = PicardConfig::new(0.5, 0.1, 0.01);
        cfg.horizon = Some(0.1);
        assert!(picard_mild_solve(&table, &u0, &cfg).is_ok());
    }

    #[test]
    fn fixed_point_agrees_with_stepper() {
        let table = build_symbol_table(&TorusSpec::square(PI, 16).unwrap()).unwrap();
        let u0 = small_data(&table.spec, 0.05);
        let (traj, rep) = picard_mild_solve(&table, &u0, &PicardConfig::new(1.0, 0.2, 1e-3)).unwrap();
        assert!(rep.converged, "{rep:?}");
        assert!(rep.contraction_ratios.iter().all(|&r| r < 1.0));
        let reference = integrate(&u0, &StepperConfig::new(1e-3, 0.2)).unwrap();
        let err = traj.sup_l2_distance(&reference).unwrap();
        assert!(err < 1e-7 * u0.l2_norm().max(1.0), "err = {err}");
    }
}
