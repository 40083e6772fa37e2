//! The two elliptic solves of the system: the screened Poisson relation
//! C = (1 - Delta_L)^{-1} N for the chemoattractant, and the Biot-Savart
//! recovery U = grad_L^perp Delta_L^{-1} Omega of the velocity from the
//! vorticity, with the zero-mode null structure U_0^(2) = 0.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{Frame, SpectralField};

/// Divergence-free perturbation velocity in the sheared frame.
#[derive(Debug, Clone)]
pub struct VelocityField {
    /// z component.
    pub u1: SpectralField,
    /// y component.
    pub u2: SpectralField,
}

impl VelocityField {
    pub fn time(&self) -> f64 {
        self.u1.time()
    }

    /// Max pointwise |U| over the physical grid (for CFL control).
    pub fn max_speed(&self) -> f64 {
        let p1 = self.u1.to_physical();
        let p2 = self.u2.to_physical();
        p1.iter()
            .zip(&p2)
            .map(|(a, b)| (a * a + b * b).sqrt())
            .fold(0.0, f64::max)
    }

    /// Kinetic energy (1/2) int |U|^2 dV, computed spectrally.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * (self.u1.l2_norm().powi(2) + self.u2.l2_norm().powi(2))
    }

    /// Max coefficientwise |div_L U|, which should be round-off.
    pub fn divergence_linf(&self, t: f64) -> f64 {
        let mut worst = 0.0f64;
        let grid = self.u1.grid();
        for (idx, k, eta) in grid.modes() {
            let d = Complex64::new(0.0, k) * self.u1.coeffs()[idx]
                + Complex64::new(0.0, eta - k * t) * self.u2.coeffs()[idx];
            worst = worst.max(d.norm());
        }
        worst
    }
}

/// Solve (1 - Delta_L) C = N: C_hat = N_hat / (1 + k^2 + (eta - kt)^2).
///
/// The denominator is >= 1, so this is an unconditional contraction.
pub fn solve_chemical(n: &SpectralField, t: f64) -> Result<SpectralField> {
    n.require_frame(Frame::Sheared)?;
    let mut c = n.clone();
    c.apply_symbol(|k, eta| {
        let shifted = eta - k * t;
        1.0 / (1.0 + k * k + shifted * shifted)
    });
    Ok(c)
}

/// Biot-Savart: U = grad_L^perp psi with psi = Delta_L^{-1} Omega and the
/// (0,0) mode of psi gauged to zero.
///
/// With grad_L^perp = (-d_y^t, d_z) this satisfies grad_L^perp . U = Omega on
/// every mode except (0,0) and div_L U = 0 identically; for the z-average
/// column the vertical component vanishes: U_0^(2) = 0.
pub fn biot_savart(omega: &SpectralField, t: f64) -> Result<VelocityField> {
    omega.require_frame(Frame::Sheared)?;
    let mut u1 = omega.clone();
    let mut u2 = omega.clone();
    let grid = omega.grid().clone();
    for (idx, k, eta) in grid.modes() {
        let shifted = eta - k * t;
        let lap = k * k + shifted * shifted;
        if lap == 0.0 {
            u1.coeffs_mut()[idx] = Complex64::default();
            u2.coeffs_mut()[idx] = Complex64::default();
            continue;
        }
        let psi = -omega.coeffs()[idx] / lap;
        u1.coeffs_mut()[idx] = Complex64::new(0.0, -shifted) * psi;
        u2.coeffs_mut()[idx] = Complex64::new(0.0, k) * psi;
    }
    Ok(VelocityField { u1, u2 })
}

/// Dealiased pseudo-spectral products (N d_z C, N d_y^t C).
///
/// Callers assemble the divergence or the curl of the pair.
pub fn chemotaxis_flux(
    n: &SpectralField,
    c: &SpectralField,
    t: f64,
) -> Result<(SpectralField, SpectralField)> {
    n.require_frame(Frame::Sheared)?;
    n.require_matches(c)?;
    let (dz_c, dy_c) = c.gradient_l(t)?;
    let n_phys = n.to_physical();
    Ok((
        product_field(&n_phys, &dz_c),
        product_field(&n_phys, &dy_c),
    ))
}

/// Dealiased physical-space product of a real sample array with a field.
pub(crate) fn product_field(a_phys: &[f64], b: &SpectralField) -> SpectralField {
    let b_phys = b.to_physical();
    let prod: Vec<f64> = a_phys.iter().zip(&b_phys).map(|(x, y)| x * y).collect();
    let mut out = SpectralField::from_physical(b.grid().clone(), &prod, b.frame(), b.time());
    out.dealias();
    out
}
