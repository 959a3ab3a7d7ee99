use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::config::{DataKind, InitialData, ScaleTo};
use crate::analysis::wiener_norm;
use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::io::read_spectra_file;
use crate::spectral::TorusSpec;
use crate::C64;

/// Builds initial data on `spec`.
///
/// `random_envelope` with `gradient` draws a potential
/// `φ̂(k) = amplitude·|k̃|^{-p-1} e^{iθ(k)}` with conjugate-symmetric phases and
/// returns `∇φ`, so that `|(û, v̂)(k)| = amplitude·|k̃|^{-p}`. Without
/// `gradient` the two components get independent phases and the same
/// envelope. Nyquist lines are always zero; a nonzero mean is only added when
/// `zero_mean` is off (`û(0) = amplitude`).
pub fn make_initial_data(spec: &TorusSpec, data: &InitialData) -> Result<SpectralField> {
    let mut f = match data.kind {
        DataKind::Zero => SpectralField::zeros(spec),
        DataKind::SingleMode => single_mode(spec, data)?,
        DataKind::RandomEnvelope => random_envelope(spec, data),
        DataKind::File => {
            let path = data
                .path
                .as_ref()
                .ok_or_else(|| KsError::Config("file data needs a path".into()))?;
            let (f, _) = read_spectra_file(path)?;
            if !f.spec.same_lattice(spec) {
                return Err(KsError::LatticeMismatch);
            }
            SpectralField { spec: *spec, ..f }
        }
    };
    if data.zero_mean {
        f.uhat[0] = C64::new(0.0, 0.0);
        f.vhat[0] = C64::new(0.0, 0.0);
    } else if data.kind != DataKind::File {
        f.uhat[0] = C64::new(data.amplitude, 0.0);
    }
    if let Some(target) = data.scale_to {
        let (current, goal) = match target {
            ScaleTo::Wiener0(x) => (wiener_norm(&f, 0.0), x),
            ScaleTo::L2(x) => (f.l2_norm(), x),
        };
        if current > 0.0 {
            f = f.scaled(goal / current);
        }
    }
    Ok(f)
}

/// `u = amplitude·(k̃/|k̃|) cos(k̃·x)`.
fn single_mode(spec: &TorusSpec, data: &InitialData) -> Result<SpectralField> {
    let [k1, k2] = data.mode;
    let p = spec
        .position(k1, k2)
        .filter(|&p| p != 0 && !spec.is_nyquist(p))
        .ok_or_else(|| KsError::Config(format!("mode {:?} is not a resolved nonzero mode", data.mode)))?;
    let kt = spec.ktilde(k1, k2);
    let q = (kt[0] * kt[0] + kt[1] * kt[1]).sqrt();
    let mut f = SpectralField::zeros(spec);
    for idx in [p, spec.conj_position(p)] {
        f.uhat[idx] = C64::new(0.5 * data.amplitude * kt[0] / q, 0.0);
        f.vhat[idx] = C64::new(0.5 * data.amplitude * kt[1] / q, 0.0);
    }
    Ok(f)
}

fn random_envelope(spec: &TorusSpec, data: &InitialData) -> SpectralField {
    let mut rng = ChaCha20Rng::seed_from_u64(data.seed);
    let mut f = SpectralField::zeros(spec);
    let mut phi = vec![C64::new(0.0, 0.0); spec.len()];
    for idx in 1..spec.len() {
        let j = spec.conj_position(idx);
        if spec.is_nyquist(idx) || j < idx {
            continue;
        }
        let kt = spec.ktilde_at(idx);
        let q = (kt[0] * kt[0] + kt[1] * kt[1]).sqrt();
        let envelope = data.amplitude * q.powf(-data.spectral_exponent);
        if data.gradient {
            let c = C64::from_polar(envelope / q, rng.gen_range(0.0..2.0 * PI));
            phi[idx] = c;
            phi[j] = c.conj();
        } else {
            let cu = C64::from_polar(envelope / 2f64.sqrt(), rng.gen_range(0.0..2.0 * PI));
            let cv = C64::from_polar(envelope / 2f64.sqrt(), rng.gen_range(0.0..2.0 * PI));
            f.uhat[idx] = cu;
            f.uhat[j] = cu.conj();
            f.vhat[idx] = cv;
            f.vhat[j] = cv.conj();
        }
    }
    if data.gradient {
        f = SpectralField::gradient_of(spec, &phi).expect("potential has lattice length");
    }
    f
}
