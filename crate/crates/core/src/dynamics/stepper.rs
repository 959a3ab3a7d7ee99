use serde::{Deserialize, Serialize};

use super::nonlinear::{Dealias, PseudoSpectral};
use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::linear::Trajectory;
use crate::spectral::{symbol_values, TorusSpec};
use crate::C64;

/// One-step L² growth factor that the blow-up detector rejects.
pub const BLOWUP_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Ifrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default)]
    pub dealias: Dealias,
    #[serde(default)]
    pub scheme: Scheme,
    /// Store every `save_every`-th step; must divide the step count.
    #[serde(default = "one")]
    pub save_every: usize,
}

fn one() -> usize {
    1
}

impl StepperConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            dealias: Dealias::TwoThirds,
            scheme: Scheme::Ifrk4,
            save_every: 1,
        }
    }

    pub fn saving_every(mut self, n: usize) -> Self {
        self.save_every = n;
        self
    }

    pub fn with_dealias(mut self, d: Dealias) -> Self {
        self.dealias = d;
        self
    }

    /// Number of steps; `T` must be an integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(KsError::InvalidArgument(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) {
            return Err(KsError::InvalidArgument(format!(
                "need dt <= T, got dt = {}, T = {}",
                self.dt, self.t_final
            )));
        }
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() > 1e-9 * self.t_final {
            return Err(KsError::InvalidArgument(format!(
                "T = {} is not a multiple of dt = {}",
                self.t_final, self.dt
            )));
        }
        let n = n as usize;
        if self.save_every == 0 || !n.is_multiple_of(self.save_every) {
            return Err(KsError::InvalidArgument(format!(
                "save_every = {} must divide the step count {n}",
                self.save_every
            )));
        }
        Ok(n)
    }
}

/// A state made of several coefficient arrays sharing one linear factor.
pub(crate) type State = Vec<Vec<C64>>;

/// `e^{-σh}` and `e^{-σh/2}` per mode.
#[derive(Debug, Clone)]
pub(crate) struct IfFactors {
    h: f64,
    e: Vec<f64>,
    e2: Vec<f64>,
}

impl IfFactors {
    pub(crate) fn new(sigma: &[f64], h: f64) -> Self {
        Self {
            h,
            e: sigma.iter().map(|s| (-s * h).exp()).collect(),
            e2: sigma.iter().map(|s| (-s * h / 2.0).exp()).collect(),
        }
    }
}

fn combine(y: &[Vec<C64>], f: impl Fn(usize, usize, C64) -> C64) -> State {
    y.iter()
        .enumerate()
        .map(|(c, comp)| comp.iter().enumerate().map(|(i, &x)| f(c, i, x)).collect())
        .collect()
}

/// One integrating-factor RK4 step for `y' = -σy + N(y)`:
///
/// ```text
/// a = hN(y)            b = hN(E₂(y + a/2))
/// c = hN(E₂y + b/2)    d = hN(Ey + E₂c)
/// y ← Ey + (Ea + 2E₂(b + c) + d)/6
/// ```
pub(crate) fn ifrk4_step<F>(y: &mut State, f: &IfFactors, mut rhs: F)
where
    F: FnMut(&[Vec<C64>]) -> State,
{
    let h = f.h;
    let (e, e2) = (&f.e, &f.e2);
    let a = combine(&rhs(y), |_, _, x| x * h);
    let b = combine(&rhs(&combine(y, |c, i, x| (x + a[c][i] * 0.5) * e2[i])), |_, _, x| x * h);
    let cc = combine(&rhs(&combine(y, |c, i, x| x * e2[i] + b[c][i] * 0.5)), |_, _, x| x * h);
    let d = combine(&rhs(&combine(y, |c, i, x| x * e[i] + cc[c][i] * e2[i])), |_, _, x| x * h);
    for (c, comp) in y.iter_mut().enumerate() {
        for (i, x) in comp.iter_mut().enumerate() {
            *x = *x * e[i]
                + (a[c][i] * e[i] + (b[c][i] + cc[c][i]) * (2.0 * e2[i]) + d[c][i]) / 6.0;
        }
    }
}

pub(crate) fn state_norm(y: &[Vec<C64>]) -> f64 {
    y.iter()
        .flat_map(|c| c.iter())
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Reusable integrator for one lattice and configuration.
#[derive(Debug)]
pub struct Integrator {
    pub spec: TorusSpec,
    pub cfg: StepperConfig,
    kernel: PseudoSpectral,
    factors: IfFactors,
    steps: usize,
}

impl Integrator {
    pub fn new(spec: &TorusSpec, cfg: StepperConfig) -> Result<Self> {
        let steps = cfg.steps()?;
        Ok(Self {
            spec: *spec,
            cfg,
            kernel: PseudoSpectral::new(spec, cfg.dealias),
            factors: IfFactors::new(&symbol_values(spec), cfg.dt),
            steps,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Runs from `u0`. On a detector hit the error carries the trajectory
    /// saved so far, with `blowup_at` set to the last accepted time.
    pub fn run(&self, u0: &SpectralField) -> Result<Trajectory> {
        if !u0.spec.same_lattice(&self.spec) {
            return Err(KsError::LatticeMismatch);
        }
        let mut y: State = vec![u0.uhat.clone(), u0.vhat.clone()];
        let mut times = vec![0.0];
        let mut fields = vec![u0.clone()];
        let mut norm = state_norm(&y);
        for n in 1..=self.steps {
            ifrk4_step(&mut y, &self.factors, |s| {
                let f = SpectralField {
                    spec: self.spec,
                    uhat: s[0].clone(),
                    vhat: s[1].clone(),
                };
                let out = self.kernel.nonlinearity(&f);
                vec![out.uhat, out.vhat]
            });
            let next = state_norm(&y);
            if !next.is_finite() || (norm > 0.0 && next > BLOWUP_GROWTH * norm) {
                let last_valid_time = (n - 1) as f64 * self.cfg.dt;
                let mut partial = Trajectory::new(&self.spec, times, fields)?;
                partial.blowup_at = Some(last_valid_time);
                return Err(KsError::BlowUp {
                    last_valid_time,
                    partial: Box::new(partial),
                });
            }
            norm = next;
            if n % self.cfg.save_every == 0 {
                times.push(n as f64 * self.cfg.dt);
                fields.push(SpectralField {
                    spec: self.spec,
                    uhat: y[0].clone(),
                    vhat: y[1].clone(),
                });
            }
        }
        Trajectory::new(&self.spec, times, fields)
    }
}

/// Integrates 2DKS from `u0` with the configured stepper.
pub fn integrate(u0: &SpectralField, cfg: &StepperConfig) -> Result<Trajectory> {
    Integrator::new(&u0.spec, *cfg)?.run(u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mode_pair(spec: &TorusSpec, k: (i64, i64), amp: f64) -> SpectralField {
        let kt = spec.ktilde(k.0, k.1);
        let q = (kt[0] * kt[0] + kt[1] * kt[1]).sqrt();
        let mut f = SpectralField::zeros(spec);
        let p = spec.position(k.0, k.1).unwrap();
        for idx in [p, spec.conj_position(p)] {
            f.uhat[idx] = C64::new(0.5 * amp * kt[0] / q, 0.0);
            f.vhat[idx] = C64::new(0.5 * amp * kt[1] / q, 0.0);
        }
        f
    }

    #[test]
    fn zero_data_stays_zero() {
        let spec = TorusSpec::square(PI, 16).unwrap();
        let traj = integrate(&SpectralField::zeros(&spec), &StepperConfig::new(0.01, 0.1)).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.fields.iter().all(|f| f.is_zero()));
    }

    #[test]
    fn tiny_mode_follows_linear_decay() {
        let spec = TorusSpec::square(PI, 16).unwrap();
        let u0 = mode_pair(&spec, (1, 0), 1e-8);
        let traj = integrate(&u0, &StepperConfig::new(1e-3, 1.0).saving_every(100)).unwrap();
        let p = spec.position(1, 0).unwrap();
        for (t, f) in traj.times.iter().zip(&traj.fields) {
            let expect = u0.uhat[p].re * (-12.0 * t).exp();
            assert!((f.uhat[p].re - expect).abs() <= 1e-3 * expect.abs(), "t = {t}");
        }
    }

    #[test]
    fn grid_is_uniform_and_rejects_bad_configs() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        let traj = integrate(&SpectralField::zeros(&spec), &StepperConfig::new(0.1, 1.0).saving_every(5))
            .unwrap();
        assert_eq!(traj.len(), 3);
        assert!((traj.uniform_step().unwrap() - 0.5).abs() < 1e-15);
        assert!(StepperConfig::new(0.3, 1.0).steps().is_err());
        assert!(StepperConfig::new(2.0, 1.0).steps().is_err());
        assert!(StepperConfig::new(0.1, 1.0).saving_every(3).steps().is_err());
    }

    #[test]
    fn invariants_hold_on_a_chaotic_domain() {
        let spec = TorusSpec::square(8.0 * PI, 32).unwrap();
        let mut u0 = mode_pair(&spec, (2, 1), 0.5);
        u0 = u0.combine(1.0, &mode_pair(&spec, (1, 3), 0.3), 1.0);
        let traj = integrate(&u0, &StepperConfig::new(0.01, 2.0).saving_every(20)).unwrap();
        for f in &traj.fields {
            assert!(f.uhat[0].norm() < 1e-13 && f.vhat[0].norm() < 1e-13);
            assert!(f.curl_defect() < 1e-10);
            assert!(f.reality_defect() < 1e-10);
        }
    }

    #[test]
    fn detector_reports_blowup_with_partial_trajectory() {
        // Without dealiasing and with a huge time step, a large amplitude
        // explodes within a few steps.
        let spec = TorusSpec::square(16.0 * PI, 16).unwrap();
        let u0 = mode_pair(&spec, (3, 2), 1e3);
        let cfg = StepperConfig::new(0.5, 50.0).with_dealias(Dealias::None);
        match integrate(&u0, &cfg) {
            Err(KsError::BlowUp {
                last_valid_time,
                partial,
            }) => {
                assert_eq!(partial.blowup_at, Some(last_valid_time));
                assert!(partial.final_time() <= last_valid_time);
            }
            other => panic!("expected blow-up, got {:?}", other.map(|t| t.final_time())),
        }
    }
}
