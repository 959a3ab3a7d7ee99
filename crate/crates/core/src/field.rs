//! Fourier coefficients of the pair `(u, v)` on the resolved lattice.

use serde::{Deserialize, Serialize};

use crate::error::{KsError, Result};
use crate::spectral::TorusSpec;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub spec: TorusSpec,
    pub uhat: Vec<C64>,
    pub vhat: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(spec: &TorusSpec) -> Self {
        Self {
            spec: *spec,
            uhat: vec![ZERO; spec.len()],
            vhat: vec![ZERO; spec.len()],
        }
    }

    pub fn from_parts(spec: &TorusSpec, uhat: Vec<C64>, vhat: Vec<C64>) -> Result<Self> {
        if uhat.len() != spec.len() || vhat.len() != spec.len() {
            return Err(KsError::InvalidArgument(format!(
                "coefficient arrays must have {} entries",
                spec.len()
            )));
        }
        Ok(Self {
            spec: *spec,
            uhat,
            vhat,
        })
    }

    /// `(u, v) = ∇φ` from the coefficients of a scalar potential. Nyquist
    /// lines are dropped, so the result is exactly curl-free.
    pub fn gradient_of(spec: &TorusSpec, phi: &[C64]) -> Result<Self> {
        if phi.len() != spec.len() {
            return Err(KsError::InvalidArgument(format!(
                "potential must have {} entries",
                spec.len()
            )));
        }
        let mut f = Self::zeros(spec);
        for (idx, &p) in phi.iter().enumerate() {
            if spec.is_nyquist(idx) {
                continue;
            }
            let kt = spec.ktilde_at(idx);
            f.uhat[idx] = C64::new(0.0, kt[0]) * p;
            f.vhat[idx] = C64::new(0.0, kt[1]) * p;
        }
        Ok(f)
    }

    pub fn ensure_same_lattice(&self, other: &SpectralField) -> Result<()> {
        if self.spec.same_lattice(&other.spec) {
            Ok(())
        } else {
            Err(KsError::LatticeMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.uhat.iter().chain(&self.vhat).all(|c| *c == ZERO)
    }

    /// Largest `|û| + |v̂|` over the lattice.
    pub fn max_amplitude(&self) -> f64 {
        self.uhat
            .iter()
            .zip(&self.vhat)
            .map(|(a, b)| a.norm() + b.norm())
            .fold(0.0, f64::max)
    }

    /// `‖(u, v)‖_{L²}` in the normalised-measure convention `Σ |û|² + |v̂|²`.
    pub fn l2_norm(&self) -> f64 {
        self.uhat
            .iter()
            .chain(&self.vhat)
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_distance(&self, other: &SpectralField) -> f64 {
        self.uhat
            .iter()
            .zip(&other.uhat)
            .chain(self.vhat.iter().zip(&other.vhat))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Zero-mode coefficients `(û(0), v̂(0))`.
    pub fn mean(&self) -> (C64, C64) {
        (self.uhat[0], self.vhat[0])
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.uhat.iter_mut().chain(out.vhat.iter_mut()).for_each(|c| *c *= a);
        out
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SpectralField, b: f64) -> Self {
        let mut out = self.clone();
        for (x, y) in out.uhat.iter_mut().zip(&other.uhat) {
            *x = *x * a + y * b;
        }
        for (x, y) in out.vhat.iter_mut().zip(&other.vhat) {
            *x = *x * a + y * b;
        }
        out
    }

    /// Largest violation of `c(-k) = conj c(k)`, relative to the largest
    /// coefficient. Nyquist lines are expected to be zero and count as
    /// violations otherwise.
    pub fn reality_defect(&self) -> f64 {
        let scale = self.max_amplitude();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for comp in [&self.uhat, &self.vhat] {
            for idx in 0..self.spec.len() {
                let d = if self.spec.is_nyquist(idx) {
                    comp[idx].norm()
                } else {
                    (comp[self.spec.conj_position(idx)] - comp[idx].conj()).norm()
                };
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// `max_k |k̃₂û - k̃₁v̂| / max_k (|û| + |v̂|)`.
    pub fn curl_defect(&self) -> f64 {
        let scale = self.max_amplitude();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..self.spec.len() {
            let kt = self.spec.ktilde_at(idx);
            worst = worst.max((self.uhat[idx] * kt[1] - self.vhat[idx] * kt[0]).norm());
        }
        worst / scale
    }

    /// Projects onto real fields: averages `c(k)` with `conj c(-k)` and clears
    /// Nyquist lines.
    pub fn enforce_reality(&mut self) {
        let spec = self.spec;
        for comp in [&mut self.uhat, &mut self.vhat] {
            for idx in 0..spec.len() {
                if spec.is_nyquist(idx) {
                    comp[idx] = ZERO;
                    continue;
                }
                let j = spec.conj_position(idx);
                if j < idx {
                    continue;
                }
                let avg = (comp[idx] + comp[j].conj()) * 0.5;
                comp[idx] = avg;
                comp[j] = avg.conj();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> TorusSpec {
        TorusSpec::new(PI, 2.0 * PI, 8, 8).unwrap()
    }

    #[test]
    fn gradient_of_real_potential_is_real_and_curl_free() {
        let s = spec();
        let mut phi = vec![ZERO; s.len()];
        let a = s.position(1, 2).unwrap();
        let b = s.position(-1, -2).unwrap();
        phi[a] = C64::new(0.3, -0.7);
        phi[b] = phi[a].conj();
        let f = SpectralField::gradient_of(&s, &phi).unwrap();
        assert_eq!(f.reality_defect(), 0.0);
        assert!(f.curl_defect() < 1e-15);
        assert_eq!(f.mean(), (ZERO, ZERO));
        // û = i k̃₁ φ̂ with k̃₁ = 2.
        assert!((f.uhat[a] - C64::new(0.0, 2.0) * phi[a]).norm() < 1e-15);
    }

    #[test]
    fn enforce_reality_projects() {
        let s = spec();
        let mut f = SpectralField::zeros(&s);
        f.uhat[s.position(1, 0).unwrap()] = C64::new(1.0, 1.0);
        f.vhat[s.position(4, 1).unwrap()] = C64::new(1.0, 0.0);
        assert!(f.reality_defect() > 0.0);
        f.enforce_reality();
        assert_eq!(f.reality_defect(), 0.0);
        assert_eq!(f.uhat[s.position(-1, 0).unwrap()], C64::new(0.5, -0.5));
        assert_eq!(f.vhat[s.position(4, 1).unwrap()], ZERO);
    }

    #[test]
    fn norms_and_combinations() {
        let s = spec();
        let mut f = SpectralField::zeros(&s);
        f.uhat[1] = C64::new(3.0, 0.0);
        f.vhat[2] = C64::new(0.0, 4.0);
        assert_eq!(f.l2_norm(), 5.0);
        let g = f.scaled(2.0);
        assert_eq!(g.l2_distance(&f), 5.0);
        assert_eq!(g.combine(1.0, &f, -2.0), SpectralField::zeros(&s));
        assert!(SpectralField::from_parts(&s, vec![ZERO; 3], vec![ZERO; 3]).is_err());
    }
}
