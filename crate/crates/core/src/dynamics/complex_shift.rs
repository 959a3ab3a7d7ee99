//! The complexified Picard hierarchy along the slice `y = 𝜶t`.
//!
//! With `w = u + iv` the analytic extension of a level-`n` iterate and
//! `U(x, t) = u(x, 𝜶t, t)`, `V(x, t) = v(x, 𝜶t, t)`, the Cauchy–Riemann
//! equations give
//!
//! ```text
//! U_t + ℒU = -(𝜶·∇)V - ∇((|U'|² - |V'|²)/2)
//! V_t + ℒV =  (𝜶·∇)U - ∇(U'·V')
//! ```
//!
//! where primes denote level `n - 1`, `U(0) = u₀`, `V(0) = 0` and level zero
//! vanishes identically. All levels are marched together in one
//! integrating-factor RK4 system, so no level needs a stored trajectory.

use serde::{Deserialize, Serialize};

use super::nonlinear::PseudoSpectral;
use super::stepper::{ifrk4_step, state_norm, IfFactors, State, StepperConfig, BLOWUP_GROWTH};
use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::spectral::symbol_values;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `(U, V)` at one time: real and imaginary parts on the shifted slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub t: f64,
    pub u: SpectralField,
    pub v: SpectralField,
    pub alpha_vec: [f64; 2],
}

impl ComplexPair {
    /// `‖U‖_{L²} + ‖V‖_{L²}`.
    pub fn l2_sum(&self) -> f64 {
        self.u.l2_norm() + self.v.l2_norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexShiftConfig {
    pub alpha_vec: [f64; 2],
    pub levels: usize,
    pub stepper: StepperConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    /// `sup_t (‖U⁽ⁿ⁾‖_{L²} + ‖V⁽ⁿ⁾‖_{L²})` over every step, not only saved ones.
    pub sup_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexShiftResult {
    pub alpha_vec: [f64; 2],
    pub table: Vec<LevelSummary>,
    /// Saved pairs per level, `trajectories[n - 1]` for level `n`.
    pub trajectories: Vec<Vec<ComplexPair>>,
}

/// Solves levels `1..=levels` of the hierarchy on `[0, T]`.
pub fn complex_shift_solve(u0: &SpectralField, cfg: &ComplexShiftConfig) -> Result<ComplexShiftResult> {
    if cfg.levels == 0 {
        return Err(KsError::InvalidArgument("need at least one level".into()));
    }
    let spec = u0.spec;
    let steps = cfg.stepper.steps()?;
    let kernel = PseudoSpectral::new(&spec, cfg.stepper.dealias);
    let factors = IfFactors::new(&symbol_values(&spec), cfg.stepper.dt);
    let [a1, a2] = cfg.alpha_vec;
    // i(𝜶·k̃), zero on Nyquist lines like the other derivatives.
    let shift: Vec<C64> = kernel.dx.iter().zip(&kernel.dy).map(|(x, y)| x * a1 + y * a2).collect();
    let levels = cfg.levels;

    // Layout: level n (1-based) owns components 4(n-1)..4n as [Uu, Uv, Vu, Vv].
    let mut y: State = Vec::with_capacity(4 * levels);
    for _ in 0..levels {
        y.push(u0.uhat.clone());
        y.push(u0.vhat.clone());
        y.push(vec![ZERO; spec.len()]);
        y.push(vec![ZERO; spec.len()]);
    }

    let rhs = |s: &[Vec<C64>]| -> State {
        let mut out: State = Vec::with_capacity(s.len());
        for n in 0..levels {
            let base = 4 * n;
            let (mut fu, mut fv, mut gu, mut gv) = if n == 0 {
                (vec![ZERO; spec.len()], vec![ZERO; spec.len()], vec![ZERO; spec.len()], vec![ZERO; spec.len()])
            } else {
                let p = base - 4;
                let uu = kernel.physical(&s[p]);
                let uv = kernel.physical(&s[p + 1]);
                let vu = kernel.physical(&s[p + 2]);
                let vv = kernel.physical(&s[p + 3]);
                let mut half_diff = Vec::with_capacity(uu.len());
                let mut dot = Vec::with_capacity(uu.len());
                for i in 0..uu.len() {
                    half_diff.push(0.5 * (uu[i] * uu[i] + uv[i] * uv[i] - vu[i] * vu[i] - vv[i] * vv[i]));
                    dot.push(uu[i] * vu[i] + uv[i] * vv[i]);
                }
                let (fu, fv) = kernel.gradient(&kernel.spectral(&half_diff));
                let (gu, gv) = kernel.gradient(&kernel.spectral(&dot));
                (fu, fv, gu, gv)
            };
            for i in 0..spec.len() {
                let m = shift[i];
                fu[i] = -fu[i] - m * s[base + 2][i];
                fv[i] = -fv[i] - m * s[base + 3][i];
                gu[i] = -gu[i] + m * s[base][i];
                gv[i] = -gv[i] + m * s[base + 1][i];
            }
            out.extend([fu, fv, gu, gv]);
        }
        out
    };

    let level_sum = |s: &State, n: usize| -> f64 {
        let b = 4 * n;
        state_norm(&s[b..b + 2]) + state_norm(&s[b + 2..b + 4])
    };
    let snapshot = |s: &State, n: usize, t: f64| ComplexPair {
        t,
        u: SpectralField {
            spec,
            uhat: s[4 * n].clone(),
            vhat: s[4 * n + 1].clone(),
        },
        v: SpectralField {
            spec,
            uhat: s[4 * n + 2].clone(),
            vhat: s[4 * n + 3].clone(),
        },
        alpha_vec: cfg.alpha_vec,
    };

    let mut sups: Vec<f64> = (0..levels).map(|n| level_sum(&y, n)).collect();
    let mut trajectories: Vec<Vec<ComplexPair>> = (0..levels).map(|n| vec![snapshot(&y, n, 0.0)]).collect();
    for step in 1..=steps {
        let before: Vec<f64> = (0..levels).map(|n| level_sum(&y, n)).collect();
        ifrk4_step(&mut y, &factors, rhs);
        let t = step as f64 * cfg.stepper.dt;
        for n in 0..levels {
            let now = level_sum(&y, n);
            if !now.is_finite() || (before[n] > 0.0 && now > BLOWUP_GROWTH * before[n]) {
                return Err(KsError::LevelBlowUp {
                    level: n + 1,
                    last_valid_time: t - cfg.stepper.dt,
                });
            }
            sups[n] = sups[n].max(now);
        }
        if step % cfg.stepper.save_every == 0 {
            for (n, tr) in trajectories.iter_mut().enumerate() {
                tr.push(snapshot(&y, n, t));
            }
        }
    }

    Ok(ComplexShiftResult {
        alpha_vec: cfg.alpha_vec,
        table: sups
            .into_iter()
            .enumerate()
            .map(|(n, sup_norm)| LevelSummary { level: n + 1, sup_norm })
            .collect(),
        trajectories,
    })
}
