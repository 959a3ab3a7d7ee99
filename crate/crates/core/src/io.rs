//! Binary spectra snapshots.
//!
//! Layout, all little-endian:
//!
//! ```text
//! N1: u64, N2: u64, L1: f64, L2: f64, t: f64
//! then per mode in storage order: u.re, u.im, v.re, v.im (f64)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{KsError, Result};
use crate::field::SpectralField;
use crate::spectral::TorusSpec;
use crate::C64;

pub const HEADER_BYTES: usize = 40;

pub fn spectra_file_size(spec: &TorusSpec) -> usize {
    HEADER_BYTES + 32 * spec.len()
}

pub fn write_spectra<W: Write>(mut out: W, f: &SpectralField, t: f64) -> Result<()> {
    out.write_all(&(f.spec.n1() as u64).to_le_bytes())?;
    out.write_all(&(f.spec.n2() as u64).to_le_bytes())?;
    for x in [f.spec.l1(), f.spec.l2(), t] {
        out.write_all(&x.to_le_bytes())?;
    }
    for (u, v) in f.uhat.iter().zip(&f.vhat) {
        for x in [u.re, u.im, v.re, v.im] {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_spectra<R: Read>(mut inp: R) -> Result<(SpectralField, f64)> {
    let mut word = [0u8; 8];
    let mut next = |inp: &mut R| -> Result<[u8; 8]> {
        inp.read_exact(&mut word)
            .map_err(|e| KsError::Format(format!("truncated input: {e}")))?;
        Ok(word)
    };
    let n1 = u64::from_le_bytes(next(&mut inp)?) as usize;
    let n2 = u64::from_le_bytes(next(&mut inp)?) as usize;
    let l1 = f64::from_le_bytes(next(&mut inp)?);
    let l2 = f64::from_le_bytes(next(&mut inp)?);
    let t = f64::from_le_bytes(next(&mut inp)?);
    let spec = TorusSpec::new(l1, l2, n1, n2).map_err(|e| KsError::Format(e.to_string()))?;
    let mut uhat = Vec::with_capacity(spec.len());
    let mut vhat = Vec::with_capacity(spec.len());
    for _ in 0..spec.len() {
        let mut vals = [0.0; 4];
        for v in &mut vals {
            *v = f64::from_le_bytes(next(&mut inp)?);
        }
        uhat.push(C64::new(vals[0], vals[1]));
        vhat.push(C64::new(vals[2], vals[3]));
    }
    let mut rest = [0u8; 1];
    if inp.read(&mut rest)? != 0 {
        return Err(KsError::Format("trailing bytes after the last mode".into()));
    }
    Ok((SpectralField::from_parts(&spec, uhat, vhat)?, t))
}

pub fn write_spectra_file(path: &Path, f: &SpectralField, t: f64) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_spectra(&mut out, f, t)?;
    out.flush()?;
    Ok(())
}

pub fn read_spectra_file(path: &Path) -> Result<(SpectralField, f64)> {
    read_spectra(BufReader::new(File::open(path)?))
}
