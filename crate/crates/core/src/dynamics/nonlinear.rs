use serde::{Deserialize, Serialize};

use crate::field::SpectralField;
use crate::spectral::TorusSpec;
use crate::transform::Fft2;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Keep `|k_i| ≤ (N_i - 1)/3` on inputs and outputs of every product.
    #[default]
    TwoThirds,
    /// Only the Nyquist lines are removed.
    None,
}

/// FFT plans, dealiasing mask and derivative multipliers for one lattice.
#[derive(Debug)]
pub struct PseudoSpectral {
    pub spec: TorusSpec,
    fft: Fft2,
    keep: Vec<bool>,
    /// `i k̃₁`, `i k̃₂`, zero on Nyquist lines.
    pub dx: Vec<C64>,
    pub dy: Vec<C64>,
}

impl PseudoSpectral {
    pub fn new(spec: &TorusSpec, dealias: Dealias) -> Self {
        let (c1, c2) = ((spec.n1() as i64 - 1) / 3, (spec.n2() as i64 - 1) / 3);
        let mut keep = Vec::with_capacity(spec.len());
        let mut dx = Vec::with_capacity(spec.len());
        let mut dy = Vec::with_capacity(spec.len());
        for idx in 0..spec.len() {
            let (k1, k2) = spec.lattice(idx);
            let nyquist = spec.is_nyquist(idx);
            keep.push(match dealias {
                Dealias::TwoThirds => k1.abs() <= c1 && k2.abs() <= c2,
                Dealias::None => !nyquist,
            });
            let kt = spec.ktilde(k1, k2);
            if nyquist {
                dx.push(ZERO);
                dy.push(ZERO);
            } else {
                dx.push(C64::new(0.0, kt[0]));
                dy.push(C64::new(0.0, kt[1]));
            }
        }
        Self {
            spec: *spec,
            fft: Fft2::new(spec),
            keep,
            dx,
            dy,
        }
    }

    pub fn apply_mask(&self, c: &mut [C64]) {
        for (x, &k) in c.iter_mut().zip(&self.keep) {
            if !k {
                *x = ZERO;
            }
        }
    }

    /// Grid values of the masked coefficients.
    pub fn physical(&self, c: &[C64]) -> Vec<f64> {
        let mut m = c.to_vec();
        self.apply_mask(&mut m);
        self.fft.to_physical(&m)
    }

    /// Masked coefficients of a grid function.
    pub fn spectral(&self, values: &[f64]) -> Vec<C64> {
        let mut c = self.fft.to_spectral(values);
        self.apply_mask(&mut c);
        c
    }

    /// Dealiased coefficients of `(u² + v²)/2`.
    pub fn half_square(&self, f: &SpectralField) -> Vec<C64> {
        let u = self.physical(&f.uhat);
        let v = self.physical(&f.vhat);
        let g: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a * a + b * b)).collect();
        self.spectral(&g)
    }

    /// `(i k̃₁ g, i k̃₂ g)`.
    pub fn gradient(&self, g: &[C64]) -> (Vec<C64>, Vec<C64>) {
        (
            g.iter().zip(&self.dx).map(|(a, m)| a * m).collect(),
            g.iter().zip(&self.dy).map(|(a, m)| a * m).collect(),
        )
    }

    /// `-∇(|u|²/2)`, i.e. `-(u u_x + v v_x, u u_y + v v_y)` for gradient data.
    pub fn nonlinearity(&self, f: &SpectralField) -> SpectralField {
        let g = self.half_square(f);
        let (mut nu, mut nv) = self.gradient(&g);
        nu.iter_mut().chain(nv.iter_mut()).for_each(|c| *c = -*c);
        SpectralField {
            spec: f.spec,
            uhat: nu,
            vhat: nv,
        }
    }
}

/// One-shot `-∇(|u|²/2)` with the 2/3 rule.
pub fn nonlinearity(f: &SpectralField) -> SpectralField {
    PseudoSpectral::new(&f.spec, Dealias::TwoThirds).nonlinearity(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_gradient(spec: &TorusSpec, seed: u64, kmax: i64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phi = vec![ZERO; spec.len()];
        for (idx, p) in phi.iter_mut().enumerate() {
            let (k1, k2) = spec.lattice(idx);
            if k1.abs() <= kmax && k2.abs() <= kmax {
                *p = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let mut f = SpectralField::gradient_of(spec, &phi).unwrap();
        f.enforce_reality();
        f
    }

    #[test]
    fn constant_field_has_no_nonlinearity() {
        let spec = TorusSpec::square(PI, 8).unwrap();
        let mut f = SpectralField::zeros(&spec);
        f.uhat[0] = C64::new(0.7, 0.0);
        f.vhat[0] = C64::new(-0.2, 0.0);
        assert!(nonlinearity(&f).max_amplitude() < 1e-16);
    }

    #[test]
    fn single_mode_output_lives_on_doubled_shell() {
        // u = a k̂ cos(k̃·x) gives |u|²/2 = a²/4 (1 + cos(2k̃·x)).
        let spec = TorusSpec::new(2.0 * PI, 3.0 * PI, 16, 16).unwrap();
        let k = (1, 2);
        let kt = spec.ktilde(k.0, k.1);
        let q = (kt[0] * kt[0] + kt[1] * kt[1]).sqrt();
        let a = 0.8;
        let mut f = SpectralField::zeros(&spec);
        let p = spec.position(k.0, k.1).unwrap();
        let m = spec.conj_position(p);
        for (idx, s) in [(p, 1.0), (m, 1.0)] {
            f.uhat[idx] = C64::new(0.5 * a * s * kt[0] / q, 0.0);
            f.vhat[idx] = C64::new(0.5 * a * s * kt[1] / q, 0.0);
        }
        let n = nonlinearity(&f);
        assert_eq!(n.mean(), (ZERO, ZERO));
        let p2 = spec.position(2 * k.0, 2 * k.1).unwrap();
        for idx in 0..spec.len() {
            let amp = n.uhat[idx].norm() + n.vhat[idx].norm();
            if idx == p2 || idx == spec.conj_position(p2) {
                // -i 2k̃ (a²/8)
                let expect = C64::new(0.0, -2.0 * kt[0] * a * a / 8.0);
                let got = if idx == p2 { n.uhat[idx] } else { n.uhat[idx].conj() };
                assert!((got - expect).norm() < 1e-14);
            } else {
                assert!(amp < 1e-15, "stray mode {:?}", spec.lattice(idx));
            }
        }
    }

    #[test]
    fn output_is_mean_free_gradient() {
        let spec = TorusSpec::square(4.0 * PI, 32).unwrap();
        for seed in 0..10 {
            let f = random_gradient(&spec, seed, 12);
            let n = nonlinearity(&f);
            assert!(n.uhat[0].norm() < 1e-15 && n.vhat[0].norm() < 1e-15);
            assert!(n.curl_defect() < 1e-14);
            assert!(n.reality_defect() < 1e-13);
        }
    }

    #[test]
    fn dealiased_product_matches_direct_convolution() {
        // Inputs inside the 2/3 band: the masked product equals the exact
        // convolution truncated to the band.
        let spec = TorusSpec::square(PI, 12).unwrap();
        let ps = PseudoSpectral::new(&spec, Dealias::TwoThirds);
        let f = random_gradient(&spec, 3, 2);
        let g = ps.half_square(&f);
        let mut direct = vec![ZERO; spec.len()];
        for i in 0..spec.len() {
            for j in 0..spec.len() {
                let (a1, a2) = spec.lattice(i);
                let (b1, b2) = spec.lattice(j);
                if let Some(p) = spec.position(a1 + b1, a2 + b2) {
                    direct[p] += 0.5 * (f.uhat[i] * f.uhat[j] + f.vhat[i] * f.vhat[j]);
                }
            }
        }
        ps.apply_mask(&mut direct);
        for (a, b) in g.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
