//! Initial data: periodized Gaussian blobs, low-mode ridges, and vorticity
//! seeds scaled against the regime threshold.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::dynamics::PhysParams;
use crate::error::{Error, Result};
use crate::field::{Frame, SpectralField};
use crate::grid::Grid;
use crate::multiplier::bracket;

/// Periodized 2-D Gaussian: mass M spread as M/(2 pi sigma^2) exp(-d^2/(2 sigma^2)),
/// summed over periodic images; integrates to M.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlobSpec {
    pub mass: f64,
    #[serde(default)]
    pub center: (f64, f64),
    pub sigma: f64,
}

/// y-Gaussian ridge modulated by (1 + cos(kz (z - z0))) in z; integrates to
/// `mass` and keeps the z-spectrum on |k| <= kz.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RidgeSpec {
    pub mass: f64,
    #[serde(default)]
    pub center_y: f64,
    #[serde(default)]
    pub center_z: f64,
    pub sigma: f64,
    #[serde(default = "default_ridge_kz")]
    pub kz: i64,
}

fn default_ridge_kz() -> i64 {
    1
}

/// Vorticity seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaInit {
    /// No initial vorticity.
    Zero,
    /// Single cosine mode with prescribed amplitude.
    Mode { k: i64, m: i64, amplitude: f64 },
    /// Single cosine mode scaled so that its H^s norm equals eps nu^{1/2},
    /// the boundary of the admissible set.
    MatchThreshold { k: i64, m: i64 },
}

impl Default for OmegaInit {
    fn default() -> Self {
        OmegaInit::Zero
    }
}

const SQRT_TAU: f64 = 2.5066282746310002; // sqrt(2 pi)

/// Assemble the initial cell density from blob and ridge components.
pub fn build_density(
    grid: &Arc<Grid>,
    blobs: &[BlobSpec],
    ridges: &[RidgeSpec],
) -> Result<SpectralField> {
    if blobs.is_empty() && ridges.is_empty() {
        return Err(Error::InvalidParams("initial density is empty".into()));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let (lx, ly) = (grid.lx(), grid.ly());
    let mut phys = vec![0.0f64; grid.len()];
    for b in blobs {
        if b.mass < 0.0 || b.sigma <= 0.0 {
            return Err(Error::InvalidParams(format!("bad blob: {b:?}")));
        }
        let peak = b.mass / (2.0 * std::f64::consts::PI * b.sigma * b.sigma);
        for i in 0..nx {
            let z = grid.z_at(i);
            for j in 0..ny {
                let y = grid.y_at(j);
                let mut v = 0.0;
                for iz in -2i32..=2 {
                    for iy in -2i32..=2 {
                        let dz = z - b.center.0 + iz as f64 * lx;
                        let dy = y - b.center.1 + iy as f64 * ly;
                        v += (-(dz * dz + dy * dy) / (2.0 * b.sigma * b.sigma)).exp();
                    }
                }
                phys[i * ny + j] += peak * v;
            }
        }
    }
    for r in ridges {
        if r.mass < 0.0 || r.sigma <= 0.0 || r.kz < 0 {
            return Err(Error::InvalidParams(format!("bad ridge: {r:?}")));
        }
        let peak = r.mass / (2.0 * std::f64::consts::PI * r.sigma * SQRT_TAU);
        for i in 0..nx {
            let z = grid.z_at(i);
            let modulation = 1.0 + ((r.kz as f64) * (z - r.center_z)).cos();
            for j in 0..ny {
                let y = grid.y_at(j);
                let mut v = 0.0;
                for iy in -2i32..=2 {
                    let dy = y - r.center_y + iy as f64 * ly;
                    v += (-dy * dy / (2.0 * r.sigma * r.sigma)).exp();
                }
                phys[i * ny + j] += peak * modulation * v;
            }
        }
    }
    let mut f = SpectralField::from_physical(grid.clone(), &phys, Frame::Sheared, 0.0);
    f.dealias();
    Ok(f)
}

/// Assemble the initial vorticity.
pub fn build_omega(
    grid: &Arc<Grid>,
    init: &OmegaInit,
    params: &PhysParams,
) -> Result<SpectralField> {
    let mut f = SpectralField::zeros(grid.clone(), Frame::Sheared, 0.0);
    let place = |f: &mut SpectralField, k: i64, m: i64, amplitude: f64| -> Result<()> {
        if k.unsigned_abs() as usize >= grid.nx() / 3 || m.unsigned_abs() as usize >= grid.ny() / 3
        {
            return Err(Error::InvalidParams(format!(
                "omega mode ({k},{m}) outside the dealiased shell"
            )));
        }
        let half = Complex64::new(0.5 * amplitude, 0.0);
        f.set_mode(k, m, half);
        f.set_mode(-k, -m, half);
        Ok(())
    };
    match init {
        OmegaInit::Zero => {}
        OmegaInit::Mode { k, m, amplitude } => place(&mut f, *k, *m, *amplitude)?,
        OmegaInit::MatchThreshold { k, m } => {
            let eta = 2.0 * std::f64::consts::PI / grid.ly() * *m as f64;
            let br = bracket(*k as f64, eta).powi(params.s as i32);
            // ||amp cos(kz + eta y)||_{H^s}^2 = area * amp^2 <k,eta>^{2s} / 2
            let target = params.epsilon() * params.nu.sqrt();
            let amplitude = target / (grid.area() / 2.0).sqrt() / br;
            place(&mut f, *k, *m, amplitude)?;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics;
    use std::f64::consts::PI;

    fn params() -> PhysParams {
        PhysParams::new(0.01, 1.0, crate::multiplier::DELTA_MAX, 5).unwrap()
    }

    #[test]
    fn blob_mass_is_quadrature_exact() {
        let g = Grid::new(64, 128, 16.0 * PI).unwrap();
        let n = build_density(
            &g,
            &[BlobSpec { mass: 10.0, center: (0.0, 0.0), sigma: 0.5 }],
            &[],
        )
        .unwrap();
        assert!((diagnostics::mass(&n) - 10.0).abs() < 1e-10);
        // physical values nonnegative up to dealiasing ripple
        let sup = n.to_physical().iter().fold(0.0f64, |a, &v| a.max(v));
        let min = n.to_physical().iter().fold(f64::INFINITY, |a, &v| a.min(v));
        assert!(min > -1e-6 * sup);
    }

    #[test]
    fn ridge_mass_and_band_limit() {
        let g = Grid::new(64, 128, 4.0 * PI).unwrap();
        let n = build_density(
            &g,
            &[],
            &[RidgeSpec { mass: 25.0, center_y: 0.0, center_z: 0.0, sigma: 0.5, kz: 1 }],
        )
        .unwrap();
        assert!((diagnostics::mass(&n) - 25.0).abs() < 1e-9);
        assert_eq!(n.max_active_kz(1e-12), 1);
    }

    #[test]
    fn omega_threshold_norm() {
        let g = Grid::new(32, 64, 16.0 * PI).unwrap();
        let p = params();
        let om = build_omega(&g, &OmegaInit::MatchThreshold { k: 1, m: 2 }, &p).unwrap();
        let target = p.epsilon() * p.nu.sqrt();
        let eta = g.ky()[2];
        let hs = om
            .weighted_l2_sq(|k, e| bracket(k, e).powi(p.s as i32))
            .sqrt();
        assert!((hs - target).abs() < 1e-12 * target, "{hs} vs {target}");
        let _ = eta;
    }

    #[test]
    fn omega_mode_outside_shell_rejected() {
        let g = Grid::new(32, 64, 16.0 * PI).unwrap();
        let p = params();
        assert!(build_omega(&g, &OmegaInit::Mode { k: 15, m: 0, amplitude: 1.0 }, &p).is_err());
    }
}
