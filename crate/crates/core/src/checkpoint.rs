//! Checkpoint format: a JSON header (grid, params, switches, time, monitor
//! state) followed by the two coefficient arrays as flat little-endian f64
//! pairs. Byte-for-byte deterministic for a given state and build.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::DissipationAccum;
use crate::dynamics::{PhysParams, Runner, RunSpec, SimState, Switches, TRACKED_MODES};
use crate::error::{Error, Result};
use crate::field::{Frame, SpectralField};
use crate::grid::Grid;

const MAGIC: &[u8; 8] = b"PKSCKPT1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub nx: usize,
    pub ny: usize,
    pub ly: f64,
    pub params: PhysParams,
    pub switches: Switches,
    pub t: f64,
    pub initial_mass: f64,
    pub initial_sup: f64,
    pub peak_sup: f64,
    pub out_index: u64,
    pub accum: DissipationAccum,
    pub mode_history: Vec<(f64, [f64; TRACKED_MODES])>,
    pub positivity_violated: bool,
    pub clamp_flagged: bool,
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub n_coeffs: Vec<Complex64>,
    pub omega_coeffs: Vec<Complex64>,
}

impl Checkpoint {
    /// Capture the full resumable state of a runner.
    pub fn capture(runner: &Runner) -> Checkpoint {
        let (
            state,
            accum,
            initial_mass,
            initial_sup,
            peak_sup,
            out_index,
            mode_history,
            positivity_violated,
            clamp_flagged,
        ) = runner.snapshot_for_checkpoint();
        let grid = state.grid();
        Checkpoint {
            header: CheckpointHeader {
                format_version: 1,
                nx: grid.nx(),
                ny: grid.ny(),
                ly: grid.ly(),
                params: runner.spec().params,
                switches: runner.spec().switches,
                t: state.t,
                initial_mass,
                initial_sup,
                peak_sup,
                out_index,
                accum: accum.clone(),
                mode_history: mode_history.to_vec(),
                positivity_violated,
                clamp_flagged,
            },
            n_coeffs: state.n.coeffs().to_vec(),
            omega_coeffs: state.omega.coeffs().to_vec(),
        }
    }

    /// Rebuild a runner continuing exactly where the checkpoint left off.
    /// The run spec must match the checkpointed grid and parameters.
    pub fn into_runner(self, spec: RunSpec) -> Result<Runner> {
        let h = &self.header;
        if h.format_version != 1 {
            return Err(Error::CheckpointFormat(format!(
                "unsupported format version {}",
                h.format_version
            )));
        }
        if (h.params.kappa, h.params.nu) != (spec.params.kappa, spec.params.nu) {
            return Err(Error::CheckpointFormat(
                "checkpoint parameters disagree with the run spec".into(),
            ));
        }
        let grid = Grid::new(h.nx, h.ny, h.ly)?;
        let n = SpectralField::from_coeffs(grid.clone(), self.n_coeffs, Frame::Sheared, h.t);
        let omega = SpectralField::from_coeffs(grid, self.omega_coeffs, Frame::Sheared, h.t);
        let state = SimState { n, omega, t: h.t };
        Runner::restore(
            spec,
            state,
            self.header.accum.clone(),
            h.initial_mass,
            h.initial_sup,
            h.peak_sup,
            h.out_index,
            self.header.mode_history.clone(),
            h.positivity_violated,
            h.clamp_flagged,
        )
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.header.nx, self.header.ny, self.header.ly)
    }
}

pub fn write_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    let header = serde_json::to_vec(&ckpt.header)?;
    w.write_all(&(header.len() as u64).to_le_bytes())?;
    w.write_all(&header)?;
    for arr in [&ckpt.n_coeffs, &ckpt.omega_coeffs] {
        for c in arr.iter() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CheckpointFormat("bad magic".into()));
    }
    let mut len_bytes = [0u8; 8];
    r.read_exact(&mut len_bytes)?;
    let len = u64::from_le_bytes(len_bytes) as usize;
    if len > 1 << 30 {
        return Err(Error::CheckpointFormat("unreasonable header size".into()));
    }
    let mut header_bytes = vec![0u8; len];
    r.read_exact(&mut header_bytes)?;
    let header: CheckpointHeader = serde_json::from_slice(&header_bytes)?;
    let n_modes = header.nx * header.ny;
    let mut read_array = |n: usize| -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(n);
        let mut buf = [0u8; 16];
        for _ in 0..n {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
            out.push(Complex64::new(re, im));
        }
        Ok(out)
    };
    let n_coeffs = read_array(n_modes)?;
    let omega_coeffs = read_array(n_modes)?;
    Ok(Checkpoint { header, n_coeffs, omega_coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_bytes() {
        let dir = std::env::temp_dir().join("pks_ckpt_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("a.ckpt");
        let header = CheckpointHeader {
            format_version: 1,
            nx: 16,
            ny: 16,
            ly: 16.0 * std::f64::consts::PI,
            params: PhysParams::new(0.01, 1.0, crate::multiplier::DELTA_MAX, 5).unwrap(),
            switches: Switches::default(),
            t: 1.25,
            initial_mass: 10.0,
            initial_sup: 3.0,
            peak_sup: 3.5,
            out_index: 5,
            accum: DissipationAccum::init(1.25, [0.1, 0.2, 0.3, 0.4, 0.5]),
            mode_history: vec![(0.0, [1.0, 0.5, 0.25])],
            positivity_violated: false,
            clamp_flagged: false,
        };
        let ckpt = Checkpoint {
            header,
            n_coeffs: (0..256).map(|i| Complex64::new(i as f64, -(i as f64) / 3.0)).collect(),
            omega_coeffs: (0..256).map(|i| Complex64::new(0.5 * i as f64, 0.0)).collect(),
        };
        write_checkpoint(&path, &ckpt).unwrap();
        let back = read_checkpoint(&path).unwrap();
        assert_eq!(back.header.t, 1.25);
        assert_eq!(back.header.out_index, 5);
        assert_eq!(back.n_coeffs, ckpt.n_coeffs);
        assert_eq!(back.omega_coeffs, ckpt.omega_coeffs);
        // determinism: writing again gives identical bytes
        let path2 = dir.join("b.ckpt");
        write_checkpoint(&path2, &ckpt).unwrap();
        let a = std::fs::read(&path).unwrap();
        let b = std::fs::read(&path2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_corrupt_magic() {
        let dir = std::env::temp_dir().join("pks_ckpt_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.ckpt");
        std::fs::write(&path, b"NOTACKPTxxxx").unwrap();
        assert!(read_checkpoint(&path).is_err());
    }
}
