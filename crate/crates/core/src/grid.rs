//! Spectral grid on the periodic strip: z-period fixed to 2*pi, y-period `ly`.
//!
//! Coefficients are stored row-major with shape `(nx, ny)`: index `i` runs
//! over integer z-wavenumbers k in FFT order {0, 1, ..., nx/2-1, -nx/2, ..., -1},
//! index `j` over scaled y-wavenumbers eta = (2*pi/ly)*m with m in the same
//! FFT order. The forward transform carries the 1/(nx*ny) normalization, so
//! the (0,0) coefficient is the grid mean and the total mass of a density
//! field equals `coeffs[0] * 2*pi*ly`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Truncated spectral grid with cached FFT plans.
pub struct Grid {
    nx: usize,
    ny: usize,
    ly: f64,
    kz: Vec<f64>,
    ky: Vec<f64>,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("ly", &self.ly)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.ly == other.ly
    }
}

/// FFT-ordered integer offsets {0, 1, ..., n/2-1, -n/2, ..., -1}.
fn fft_modes(n: usize) -> Vec<i64> {
    let h = (n / 2) as i64;
    (0..n as i64).map(|i| if i < h { i } else { i - n as i64 }).collect()
}

impl Grid {
    /// Build a grid with `nx` z-modes, `ny` y-modes, y-period `ly`.
    pub fn new(nx: usize, ny: usize, ly: f64) -> Result<Arc<Grid>> {
        if nx < 16 || ny < 16 {
            return Err(Error::InvalidGrid(format!(
                "mode counts must be >= 16, got nx={nx}, ny={ny}"
            )));
        }
        if nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "mode counts must be even, got nx={nx}, ny={ny}"
            )));
        }
        if !(ly >= 4.0 * PI) {
            return Err(Error::InvalidGrid(format!(
                "y period must be >= 4*pi, got ly={ly}"
            )));
        }
        let kz = fft_modes(nx).into_iter().map(|m| m as f64).collect();
        let ky = fft_modes(ny)
            .into_iter()
            .map(|m| 2.0 * PI / ly * m as f64)
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            nx,
            ny,
            ly,
            kz,
            ky,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// y-period of the truncated strip.
    pub fn ly(&self) -> f64 {
        self.ly
    }

    /// z-period, always 2*pi.
    pub fn lx(&self) -> f64 {
        2.0 * PI
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain area 2*pi*ly.
    pub fn area(&self) -> f64 {
        self.lx() * self.ly
    }

    /// Physical cell area dz*dy.
    pub fn cell_area(&self) -> f64 {
        self.area() / self.len() as f64
    }

    /// Integer z-wavenumbers in FFT order.
    pub fn kz(&self) -> &[f64] {
        &self.kz
    }

    /// Scaled y-wavenumbers (2*pi/ly)*m in FFT order.
    pub fn ky(&self) -> &[f64] {
        &self.ky
    }

    /// Largest scaled y-wavenumber magnitude, (2*pi/ly)*(ny/2).
    pub fn eta_max(&self) -> f64 {
        2.0 * PI / self.ly * (self.ny / 2) as f64
    }

    /// Physical z coordinate of column `i`, in [0, 2*pi).
    pub fn z_at(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.nx as f64
    }

    /// Physical y coordinate of row `j`, in [-ly/2, ly/2).
    pub fn y_at(&self, j: usize) -> f64 {
        -0.5 * self.ly + self.ly * j as f64 / self.ny as f64
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Iterate (flat index, k, eta) over all modes.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.nx).flat_map(move |i| {
            (0..self.ny).map(move |j| (self.idx(i, j), self.kz[i], self.ky[j]))
        })
    }

    /// Forward transform: physical samples -> normalized Fourier coefficients.
    pub fn forward(&self, phys: &[f64]) -> Vec<Complex64> {
        assert_eq!(phys.len(), self.len());
        let mut buf: Vec<Complex64> = phys.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, true);
        let norm = 1.0 / self.len() as f64;
        buf.iter_mut().for_each(|c| *c *= norm);
        buf
    }

    /// Inverse transform: coefficients -> physical samples (real parts).
    ///
    /// The imaginary residue of a Hermitian-symmetric input is round-off and
    /// is discarded.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.len());
        let mut buf = coeffs.to_vec();
        self.fft2(&mut buf, false);
        buf.iter().map(|c| c.re).collect()
    }

    /// Inverse transform keeping complex values (for symmetry checks).
    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.fft2(&mut buf, false);
        buf
    }

    /// Unnormalized 2-D FFT over the row-major (nx, ny) buffer.
    fn fft2(&self, buf: &mut [Complex64], forward: bool) {
        let (px, py) = if forward {
            (&self.fwd_x, &self.fwd_y)
        } else {
            (&self.inv_x, &self.inv_y)
        };
        // y direction: rows are contiguous.
        buf.par_chunks_mut(self.ny).for_each(|row| py.process(row));
        // z direction: transpose, batch transform, transpose back.
        let mut t = vec![Complex64::default(); self.len()];
        transpose(buf, &mut t, self.nx, self.ny);
        t.par_chunks_mut(self.nx).for_each(|col| px.process(col));
        transpose(&t, buf, self.ny, self.nx);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Symbol of the sheared Laplacian: -(k^2 + (eta - k t)^2), always <= 0.
#[inline]
pub fn laplacian_l_symbol(k: f64, eta: f64, t: f64) -> f64 {
    let shifted = eta - k * t;
    -(k * k + shifted * shifted)
}

/// Exact integral of k^2 + (eta - k tau)^2 over tau in [t0, t1].
///
/// This is the exponent of the diffusive integrating factor; for k = 0 it
/// reduces to (k^2 + eta^2)(t1 - t0).
#[inline]
pub fn laplacian_l_time_integral(k: f64, eta: f64, t0: f64, t1: f64) -> f64 {
    let dt = t1 - t0;
    if k == 0.0 {
        return (k * k + eta * eta) * dt;
    }
    let u0 = eta - k * t0;
    let u1 = eta - k * t1;
    k * k * dt + (u0 * u0 * u0 - u1 * u1 * u1) / (3.0 * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(15, 16, 16.0 * PI).is_err());
        assert!(Grid::new(16, 15, 16.0 * PI).is_err());
        assert!(Grid::new(8, 16, 16.0 * PI).is_err());
        assert!(Grid::new(16, 16, PI).is_err());
        assert!(Grid::new(16, 16, 16.0 * PI).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(16, 16, 16.0 * PI).unwrap();
        assert_eq!(g.kz()[0], 0.0);
        assert_eq!(g.kz()[7], 7.0);
        assert_eq!(g.kz()[8], -8.0);
        assert_eq!(g.kz()[15], -1.0);
        // eta spacing 2*pi/(16*pi) = 1/8
        assert!((g.ky()[1] - 0.125).abs() < 1e-15);
        assert!((g.ky()[8] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_symbol_examples() {
        assert_eq!(laplacian_l_symbol(0.0, 0.0, 3.7), 0.0);
        assert_eq!(laplacian_l_symbol(1.0, 0.0, 0.0), -1.0);
        // eta - k t = 0 leaves -k^2
        assert_eq!(laplacian_l_symbol(1.0, 3.0, 3.0), -1.0);
    }

    #[test]
    fn propagator_integral_matches_quadrature() {
        // Simpson-rule oracle, independent of the closed form.
        let quad = |k: f64, eta: f64, t0: f64, t1: f64| {
            let n = 20_000;
            let h = (t1 - t0) / n as f64;
            let f = |tau: f64| -laplacian_l_symbol(k, eta, tau);
            let mut s = f(t0) + f(t1);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(t0 + i as f64 * h);
            }
            s * h / 3.0
        };
        for &(k, eta, t0, t1) in &[
            (1.0, 0.0, 0.0, 10.0),
            (3.0, -2.5, 1.0, 4.0),
            (0.0, 2.0, 0.0, 1.0),
            (-2.0, 0.7, 0.5, 2.5),
        ] {
            let exact = laplacian_l_time_integral(k, eta, t0, t1);
            let approx = quad(k, eta, t0, t1);
            assert!(
                (exact - approx).abs() <= 1e-9 * approx.abs().max(1.0),
                "k={k} eta={eta}: {exact} vs {approx}"
            );
        }
        // Frozen value for the k=1, eta=0, [0, 10] example: 10 + 1000/3.
        let i = laplacian_l_time_integral(1.0, 0.0, 0.0, 10.0);
        assert!((i - (10.0 + 1000.0 / 3.0)).abs() < 1e-12);
        assert!(((-0.01 * i).exp() - 0.032_279_164_031).abs() < 1e-9);
    }

    #[test]
    fn transform_round_trip() {
        let g = Grid::new(32, 16, 16.0 * PI).unwrap();
        let phys: Vec<f64> = (0..g.len())
            .map(|i| ((i * 2654435761) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let coeffs = g.forward(&phys);
        let back = g.inverse(&coeffs);
        for (a, b) in phys.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
