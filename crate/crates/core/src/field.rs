//! Spectral fields: complex coefficient arrays tagged with their coordinate
//! frame and the simulation time the sheared symbols refer to.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Coordinate frame a field lives in. All dynamics run in the sheared frame
/// z = x - t*y; the lab tag exists so that accidental mixing is caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    Sheared,
    Lab,
}

/// Fourier coefficients of a real scalar field on a [`Grid`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
    frame: Frame,
    time: f64,
}

impl SpectralField {
    pub fn zeros(grid: Arc<Grid>, frame: Frame, time: f64) -> Self {
        let coeffs = vec![Complex64::default(); grid.len()];
        SpectralField { grid, coeffs, frame, time }
    }

    pub fn from_coeffs(grid: Arc<Grid>, coeffs: Vec<Complex64>, frame: Frame, time: f64) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs, frame, time }
    }

    /// Transform physical samples (row-major (nx, ny)) into a field.
    pub fn from_physical(grid: Arc<Grid>, phys: &[f64], frame: Frame, time: f64) -> Self {
        let coeffs = grid.forward(phys);
        SpectralField { grid, coeffs, frame, time }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn require_frame(&self, frame: Frame) -> Result<()> {
        if self.frame != frame {
            return Err(Error::FrameMismatch { expected: frame, got: self.frame });
        }
        Ok(())
    }

    pub fn require_matches(&self, other: &SpectralField) -> Result<()> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        if self.frame != other.frame {
            return Err(Error::FrameMismatch { expected: self.frame, got: other.frame });
        }
        if self.time != other.time {
            return Err(Error::TimeMismatch(self.time, other.time));
        }
        Ok(())
    }

    /// Inverse transform to physical samples.
    pub fn to_physical(&self) -> Vec<f64> {
        self.grid.inverse(&self.coeffs)
    }

    /// Coefficient at integer mode (k, m), m the integer y-mode index.
    pub fn mode(&self, k: i64, m: i64) -> Complex64 {
        let nx = self.grid.nx() as i64;
        let ny = self.grid.ny() as i64;
        let i = k.rem_euclid(nx) as usize;
        let j = m.rem_euclid(ny) as usize;
        self.coeffs[self.grid.idx(i, j)]
    }

    pub fn set_mode(&mut self, k: i64, m: i64, v: Complex64) {
        let nx = self.grid.nx() as i64;
        let ny = self.grid.ny() as i64;
        let i = k.rem_euclid(nx) as usize;
        let j = m.rem_euclid(ny) as usize;
        let idx = self.grid.idx(i, j);
        self.coeffs[idx] = v;
    }

    /// Apply the 2/3-rule: zero every mode with |k| > nx/3 or |m| > ny/3,
    /// which also removes the unpaired Nyquist modes.
    pub fn dealias(&mut self) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let kc = nx as i64 / 3;
        let mc = ny as i64 / 3;
        let modes_x = fft_index_modes(nx);
        let modes_y = fft_index_modes(ny);
        for i in 0..nx {
            let keep_x = modes_x[i].abs() <= kc;
            let row = &mut self.coeffs[i * ny..(i + 1) * ny];
            if !keep_x {
                row.fill(Complex64::default());
                continue;
            }
            for (j, c) in row.iter_mut().enumerate() {
                if modes_y[j].abs() > mc {
                    *c = Complex64::default();
                }
            }
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    /// Split into the z-average (k = 0 column, as coefficients over eta) and
    /// the mean-free remainder. The sum of the parts reproduces the field
    /// exactly.
    pub fn zero_mode_split(&self) -> (Vec<Complex64>, SpectralField) {
        let ny = self.grid.ny();
        let profile = self.coeffs[0..ny].to_vec();
        let mut rest = self.clone();
        rest.coeffs[0..ny].fill(Complex64::default());
        (profile, rest)
    }

    /// Sheared gradient (d_z f, (d_y - t d_z) f) via symbols (ik, i(eta - k t)).
    ///
    /// The unpaired Nyquist modes are zeroed: an odd symbol has no Hermitian
    /// partner there. Dealiased fields are unaffected.
    pub fn gradient_l(&self, t: f64) -> Result<(SpectralField, SpectralField)> {
        self.require_frame(Frame::Sheared)?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut dz = self.clone();
        let mut dy = self.clone();
        for (idx, k, eta) in self.grid.modes() {
            let (i, j) = (idx / ny, idx % ny);
            if i == nx / 2 || j == ny / 2 {
                dz.coeffs[idx] = Complex64::default();
                dy.coeffs[idx] = Complex64::default();
                continue;
            }
            let c = self.coeffs[idx];
            dz.coeffs[idx] = Complex64::new(0.0, k) * c;
            dy.coeffs[idx] = Complex64::new(0.0, eta - k * t) * c;
        }
        Ok((dz, dy))
    }

    /// Multiply coefficientwise by a real symbol evaluated at (k, eta).
    pub fn apply_symbol<F: Fn(f64, f64) -> f64>(&mut self, sym: F) {
        for (idx, k, eta) in self.grid.modes() {
            self.coeffs[idx] *= sym(k, eta);
        }
    }

    /// L2 norm over the physical domain, computed spectrally:
    /// ||f||^2 = area * sum |f_hat|^2 (Parseval under the 1/(nx*ny) forward
    /// normalization).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.area() * s).sqrt()
    }

    /// Weighted squared L2 norm: area * sum w(k, eta)^2 |f_hat|^2.
    pub fn weighted_l2_sq<F: Fn(f64, f64) -> f64>(&self, weight: F) -> f64 {
        let mut s = 0.0;
        for (idx, k, eta) in self.grid.modes() {
            let w = weight(k, eta);
            s += w * w * self.coeffs[idx].norm_sqr();
        }
        self.grid.area() * s
    }

    /// Same as [`weighted_l2_sq`](Self::weighted_l2_sq) restricted to k != 0.
    pub fn weighted_l2_sq_nonzero<F: Fn(f64, f64) -> f64>(&self, weight: F) -> f64 {
        let mut s = 0.0;
        for (idx, k, eta) in self.grid.modes() {
            if k == 0.0 {
                continue;
            }
            let w = weight(k, eta);
            s += w * w * self.coeffs[idx].norm_sqr();
        }
        self.grid.area() * s
    }

    /// Amplitude ||f_hat(k, .)||_{l^2_eta} of a single z-wavenumber band,
    /// scaled like an L2 norm over the strip.
    pub fn mode_band_l2(&self, k: i64) -> f64 {
        let nx = self.grid.nx() as i64;
        let i = k.rem_euclid(nx) as usize;
        let ny = self.grid.ny();
        let s: f64 = self.coeffs[i * ny..(i + 1) * ny]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        (self.grid.area() * s).sqrt()
    }

    /// Fraction of spectral energy carried by the top third of the retained
    /// (dealiased) shell in either direction.
    pub fn tail_energy_fraction(&self) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let kc = nx as i64 / 3;
        let mc = ny as i64 / 3;
        let modes_x = fft_index_modes(nx);
        let modes_y = fft_index_modes(ny);
        let mut total = 0.0;
        let mut tail = 0.0;
        for i in 0..nx {
            let ka = modes_x[i].abs();
            if ka > kc {
                continue;
            }
            for j in 0..ny {
                let ma = modes_y[j].abs();
                if ma > mc {
                    continue;
                }
                let e = self.coeffs[self.grid.idx(i, j)].norm_sqr();
                total += e;
                if 3 * ka > 2 * kc || 3 * ma > 2 * mc {
                    tail += e;
                }
            }
        }
        if total > 0.0 {
            tail / total
        } else {
            0.0
        }
    }

    /// Largest |k| whose band carries coefficients above `rel_tol` times the
    /// peak coefficient magnitude. Used for the secular resolution bound.
    pub fn max_active_kz(&self, rel_tol: f64) -> i64 {
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0;
        }
        let ny = self.grid.ny();
        let modes_x = fft_index_modes(self.grid.nx());
        let mut kmax = 0i64;
        for (i, &k) in modes_x.iter().enumerate() {
            let band_peak = self.coeffs[i * ny..(i + 1) * ny]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if band_peak > rel_tol * peak {
                kmax = kmax.max(k.abs());
            }
        }
        kmax
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Max deviation from Hermitian symmetry, relative to the peak magnitude.
    pub fn hermitian_defect(&self) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..nx {
            let i_conj = (nx - i) % nx;
            for j in 0..ny {
                let j_conj = (ny - j) % ny;
                let a = self.coeffs[self.grid.idx(i, j)];
                let b = self.coeffs[self.grid.idx(i_conj, j_conj)].conj();
                worst = worst.max((a - b).norm());
            }
        }
        worst / peak
    }
}

/// FFT-ordered integer mode numbers for a transform of length n.
pub fn fft_index_modes(n: usize) -> Vec<i64> {
    let h = (n / 2) as i64;
    (0..n as i64).map(|i| if i < h { i } else { i - n as i64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn demo_grid() -> Arc<Grid> {
        Grid::new(32, 32, 16.0 * PI).unwrap()
    }

    fn random_real_field(grid: &Arc<Grid>, seed: u64) -> SpectralField {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let phys: Vec<f64> = (0..grid.len()).map(|_| next()).collect();
        SpectralField::from_physical(grid.clone(), &phys, Frame::Sheared, 0.0)
    }

    #[test]
    fn parseval() {
        let g = demo_grid();
        let f = random_real_field(&g, 7);
        let phys = f.to_physical();
        let quad: f64 = phys.iter().map(|v| v * v).sum::<f64>() * g.cell_area();
        let spec = f.l2_norm().powi(2);
        assert!((quad - spec).abs() <= 1e-12 * quad.max(1.0));
    }

    #[test]
    fn zero_mode_split_reconstructs() {
        let g = demo_grid();
        let f = random_real_field(&g, 3);
        let (profile, rest) = f.zero_mode_split();
        for j in 0..g.ny() {
            let total = profile[j] + rest.coeffs()[j];
            assert!((total - f.coeffs()[j]).norm() < 1e-15);
        }
        for idx in g.ny()..g.len() {
            assert_eq!(rest.coeffs()[idx], f.coeffs()[idx]);
        }
    }

    #[test]
    fn z_independent_field_is_pure_zero_mode() {
        let g = demo_grid();
        let phys: Vec<f64> = (0..g.len())
            .map(|idx| {
                let j = idx % g.ny();
                (g.y_at(j) / 4.0).cos()
            })
            .collect();
        let f = SpectralField::from_physical(g.clone(), &phys, Frame::Sheared, 0.0);
        let (_, rest) = f.zero_mode_split();
        let leak = rest.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(leak < 1e-14);
    }

    #[test]
    fn sin_z_has_no_zero_mode() {
        let g = demo_grid();
        let phys: Vec<f64> = (0..g.len())
            .map(|idx| {
                let i = idx / g.ny();
                g.z_at(i).sin()
            })
            .collect();
        let f = SpectralField::from_physical(g.clone(), &phys, Frame::Sheared, 0.0);
        let (profile, rest) = f.zero_mode_split();
        assert!(profile.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-14);
        let back = rest.to_physical();
        for (a, b) in back.iter().zip(&phys) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_symbols() {
        let g = demo_grid();
        // single mode k=1, m=0 at t=2: d_y^t symbol is i(0 - 2) = -2i
        let mut f = SpectralField::zeros(g.clone(), Frame::Sheared, 0.0);
        f.set_mode(1, 0, Complex64::new(0.5, 0.0));
        f.set_mode(-1, 0, Complex64::new(0.5, 0.0));
        let (dz, dy) = f.gradient_l(2.0).unwrap();
        assert!((dz.mode(1, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((dy.mode(1, 0) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        // constants map to zero
        let mut c = SpectralField::zeros(g.clone(), Frame::Sheared, 0.0);
        c.set_mode(0, 0, Complex64::new(3.0, 0.0));
        let (dz, dy) = c.gradient_l(5.0).unwrap();
        assert!(dz.l2_norm() < 1e-15 && dy.l2_norm() < 1e-15);
    }

    #[test]
    fn gradient_rejects_lab_frame() {
        let g = demo_grid();
        let f = SpectralField::zeros(g, Frame::Lab, 0.0);
        assert!(f.gradient_l(0.0).is_err());
    }

    #[test]
    fn divergence_of_perp_gradient_vanishes() {
        // div_L of the perp gradient of a random scalar is identically zero.
        let g = demo_grid();
        let f = random_real_field(&g, 11);
        let t = 1.7;
        let (dz, dy) = f.gradient_l(t).unwrap();
        // perp gradient: (-d_y^t f, d_z f); divergence: d_z(-dy) + d_y^t(dz)
        let (dzx, _) = dy.gradient_l(t).unwrap();
        let (_, dyy) = dz.gradient_l(t).unwrap();
        let mut worst = 0.0f64;
        for idx in 0..g.len() {
            worst = worst.max((-dzx.coeffs()[idx] + dyy.coeffs()[idx]).norm());
        }
        let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn dealias_zeroes_outside_shell() {
        let g = demo_grid();
        let mut f = SpectralField::zeros(g.clone(), Frame::Sheared, 0.0);
        f.set_mode(5, 5, Complex64::new(1.0, 0.0));
        f.set_mode(-5, -5, Complex64::new(1.0, 0.0));
        f.set_mode(15, 0, Complex64::new(1.0, 0.0));
        f.set_mode(-15, 0, Complex64::new(1.0, 0.0));
        f.dealias();
        assert_eq!(f.mode(5, 5), Complex64::new(1.0, 0.0));
        assert_eq!(f.mode(15, 0), Complex64::default());
    }

    #[test]
    fn hermitian_preserved_by_ops() {
        let g = demo_grid();
        let f = random_real_field(&g, 23).dealiased();
        assert!(f.hermitian_defect() < 1e-13);
        let (dz, dy) = f.gradient_l(2.3).unwrap();
        assert!(dz.hermitian_defect() < 1e-12);
        assert!(dy.hermitian_defect() < 1e-12);
        let mut d = f.clone();
        d.dealias();
        assert!(d.hermitian_defect() < 1e-13);
        let (_, rest) = f.zero_mode_split();
        assert!(rest.hermitian_defect() < 1e-13);
    }

    #[test]
    fn zero_mode_projection_contracts_lp() {
        let g = demo_grid();
        for seed in [1u64, 2, 3, 4, 5] {
            let f = random_real_field(&g, seed);
            let phys = f.to_physical();
            let (nx, ny) = (g.nx(), g.ny());
            let mut prof = vec![0.0; ny];
            for j in 0..ny {
                let mut s = 0.0;
                for i in 0..nx {
                    s += phys[i * ny + j];
                }
                prof[j] = s / nx as f64;
            }
            let dy = g.ly() / ny as f64;
            let dv = g.cell_area();
            // L2
            let lhs2: f64 = prof.iter().map(|v| v * v).sum::<f64>() * dy;
            let rhs2: f64 = phys.iter().map(|v| v * v).sum::<f64>() * dv;
            assert!(lhs2.sqrt() <= rhs2.sqrt() * (1.0 + 1e-12));
            // L1
            let lhs1: f64 = prof.iter().map(|v| v.abs()).sum::<f64>() * dy;
            let rhs1: f64 = phys.iter().map(|v| v.abs()).sum::<f64>() * dv;
            assert!(lhs1 <= rhs1 * (1.0 + 1e-12));
            // Linf
            let lhsi = prof.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let rhsi = phys.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(lhsi <= rhsi * (1.0 + 1e-12));
        }
    }
}
