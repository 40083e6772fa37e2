//! Monitored quantities: mass, free energies, moments, weighted norms of the
//! zero/non-zero modes, the dissipation time-integrals of the stability
//! functionals, and the enhanced-dissipation rate fit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PhysParams, SimState, Switches, TRACKED_MODES};
use crate::elliptic;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::multiplier::{a_iota, bracket, dt_m_iota, m_iota, Iota, MultiplierSpec};

/// Total cell population: (2 pi ly) * Re coeffs(0,0).
pub fn mass(n: &SpectralField) -> f64 {
    n.grid().area() * n.coeffs()[0].re
}

/// Second moment int N y^2 dV over the truncated strip.
pub fn second_moment(n: &SpectralField) -> f64 {
    second_moment_phys(&n.to_physical(), n.grid())
}

pub(crate) fn second_moment_phys(phys: &[f64], grid: &crate::grid::Grid) -> f64 {
    let ny = grid.ny();
    let dv = grid.cell_area();
    let mut s = 0.0;
    for (idx, v) in phys.iter().enumerate() {
        let y = grid.y_at(idx % ny);
        s += v * y * y;
    }
    s * dv
}

/// Free-energy pair: E = int n log n - (1/2) n c dV and F = E + kinetic
/// energy of the perturbation velocity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FreeEnergies {
    pub f: f64,
    pub e: f64,
    /// Mass fraction affected by clamping negative undershoots in the
    /// n log n quadrature.
    pub clamped_mass_fraction: f64,
}

/// Midpoint-rule quadrature of both functionals. Negative undershoots of n
/// are clamped to zero for the log term (0 log 0 = 0) and reported.
pub fn free_energy(
    n_phys: &[f64],
    c_phys: &[f64],
    kinetic: f64,
    grid: &crate::grid::Grid,
    total_mass: f64,
) -> FreeEnergies {
    let dv = grid.cell_area();
    let mut e = 0.0;
    let mut clamped = 0.0;
    for (n, c) in n_phys.iter().zip(c_phys) {
        let n_pos = n.max(0.0);
        if *n < 0.0 {
            clamped += -n;
        }
        let nlogn = if n_pos > 0.0 { n_pos * n_pos.ln() } else { 0.0 };
        e += nlogn - 0.5 * n * c;
    }
    e *= dv;
    clamped *= dv;
    FreeEnergies {
        f: e + kinetic,
        e,
        clamped_mass_fraction: if total_mass > 0.0 { clamped / total_mass } else { 0.0 },
    }
}

/// Static weighted norms and dissipation integrands at one instant.
#[derive(Debug, Clone, Copy)]
pub struct BootstrapSnapshot {
    pub norm_a_kappa_n_neq: f64,
    pub norm_a_nu_omega_neq: f64,
    pub norm_n0_hs: f64,
    pub norm_omega0_hs: f64,
    /// ||sqrt(-dt M_k / M_k) A_k N_neq||_2^2
    pub integrand_n_mult: f64,
    /// kappa ||A_k sqrt(-Delta_L) N_neq||_2^2
    pub integrand_n_lap: f64,
    pub integrand_omega_mult: f64,
    pub integrand_omega_lap: f64,
    /// nu ||d_y Omega_0||_{H^s}^2
    pub integrand_omega0: f64,
}

impl BootstrapSnapshot {
    pub fn integrands(&self) -> [f64; 5] {
        [
            self.integrand_n_mult,
            self.integrand_n_lap,
            self.integrand_omega_mult,
            self.integrand_omega_lap,
            self.integrand_omega0,
        ]
    }
}

/// Evaluate all weighted norms at symbol time ts.
pub fn bootstrap_snapshot(
    n: &SpectralField,
    omega: &SpectralField,
    params: &PhysParams,
    ts: f64,
) -> BootstrapSnapshot {
    let spec_k = MultiplierSpec {
        iota: Iota::Kappa,
        kappa: params.kappa,
        nu: params.nu,
        delta: params.delta,
        s: params.s,
    };
    let spec_n = MultiplierSpec { iota: Iota::Nu, ..spec_k };

    let weighted = |f: &SpectralField, spec: &MultiplierSpec, extra: &dyn Fn(f64, f64) -> f64| {
        let iota = spec.iota_value();
        let mut s = 0.0;
        for (idx, k, eta) in f.grid().modes() {
            if k == 0.0 {
                continue;
            }
            let a = a_iota(ts, k, eta, spec);
            let m = m_iota(ts, k, eta, iota);
            let _ = m;
            let w = a * extra(k, eta);
            s += w * w * f.coeffs()[idx].norm_sqr();
        }
        f.grid().area() * s
    };

    let one = |_k: f64, _eta: f64| 1.0;
    let norm_a_kappa_n_neq = weighted(n, &spec_k, &one).sqrt();
    let norm_a_nu_omega_neq = weighted(omega, &spec_n, &one).sqrt();

    let mult_k = |k: f64, eta: f64| {
        (-dt_m_iota(ts, k, eta, spec_k.iota_value()) / m_iota(ts, k, eta, spec_k.iota_value()))
            .max(0.0)
            .sqrt()
    };
    let mult_n = |k: f64, eta: f64| {
        (-dt_m_iota(ts, k, eta, spec_n.iota_value()) / m_iota(ts, k, eta, spec_n.iota_value()))
            .max(0.0)
            .sqrt()
    };
    let sqrt_lap = |k: f64, eta: f64| {
        let sh = eta - k * ts;
        (k * k + sh * sh).sqrt()
    };

    let integrand_n_mult = weighted(n, &spec_k, &mult_k);
    let integrand_n_lap = params.kappa * weighted(n, &spec_k, &sqrt_lap);
    let integrand_omega_mult = weighted(omega, &spec_n, &mult_n);
    let integrand_omega_lap = params.nu * weighted(omega, &spec_n, &sqrt_lap);

    // Zero-mode Sobolev norms over the line: ly * sum <eta>^{2s} |f0|^2.
    let ly = n.grid().ly();
    let ny = n.grid().ny();
    let ky = n.grid().ky();
    let mut n0_hs = 0.0;
    let mut om0_hs = 0.0;
    let mut om0_dy_hs = 0.0;
    for j in 0..ny {
        let br = bracket(0.0, ky[j]).powi(params.s as i32);
        let n0 = n.coeffs()[j].norm_sqr();
        let o0 = omega.coeffs()[j].norm_sqr();
        n0_hs += br * br * n0;
        om0_hs += br * br * o0;
        om0_dy_hs += br * br * ky[j] * ky[j] * o0;
    }
    BootstrapSnapshot {
        norm_a_kappa_n_neq,
        norm_a_nu_omega_neq,
        norm_n0_hs: (ly * n0_hs).sqrt(),
        norm_omega0_hs: (ly * om0_hs).sqrt(),
        integrand_n_mult,
        integrand_n_lap,
        integrand_omega_mult,
        integrand_omega_lap,
        integrand_omega0: params.nu * ly * om0_dy_hs,
    }
}

/// Trapezoid-rule accumulator for the five dissipation integrals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DissipationAccum {
    pub t_last: f64,
    pub last: [f64; 5],
    pub integrals: [f64; 5],
}

impl DissipationAccum {
    pub fn init(t0: f64, integrands: [f64; 5]) -> Self {
        DissipationAccum { t_last: t0, last: integrands, integrals: [0.0; 5] }
    }

    pub fn step_to(&mut self, t: f64, integrands: [f64; 5]) {
        let dt = t - self.t_last;
        for i in 0..5 {
            self.integrals[i] += 0.5 * dt * (self.last[i] + integrands[i]);
            self.last[i] = integrands[i];
        }
        self.t_last = t;
    }
}

/// One output row of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub free_energy_f: f64,
    pub energy_e: f64,
    pub second_moment: f64,
    pub min_n: f64,
    pub sup_n: f64,
    pub norm_a_kappa_n_neq: f64,
    pub norm_a_nu_omega_neq: f64,
    pub norm_n0_hs: f64,
    pub norm_omega0_hs: f64,
    /// Accumulated dissipation integrals:
    /// [N mult, kappa N lap, Omega mult, nu Omega lap, nu d_y Omega_0 H^s].
    pub bs_int_n_mult: f64,
    pub bs_int_n_lap: f64,
    pub bs_int_omega_mult: f64,
    pub bs_int_omega_lap: f64,
    pub bs_int_omega0: f64,
    pub boundary_mass_fraction: f64,
    pub clamped_mass_fraction: f64,
    pub tail_fraction: f64,
    /// ||N_hat(k, .)||_2 for k = 1..TRACKED_MODES.
    pub mode_amp: [f64; TRACKED_MODES],
}

impl DiagnosticsRecord {
    /// The four stability-functional left-hand sides (static norm squared
    /// plus accumulated dissipation integral).
    pub fn hypothesis_lhs(&self) -> [f64; 4] {
        [
            self.norm_a_kappa_n_neq.powi(2) + self.bs_int_n_mult + self.bs_int_n_lap,
            self.norm_n0_hs.powi(2),
            self.norm_a_nu_omega_neq.powi(2) + self.bs_int_omega_mult + self.bs_int_omega_lap,
            self.norm_omega0_hs.powi(2) + self.bs_int_omega0,
        ]
    }
}

/// Assemble a full record at the current state (several transforms).
pub fn record(
    state: &SimState,
    params: &PhysParams,
    switches: &Switches,
    accum: &DissipationAccum,
    _initial_mass: f64,
    boundary_fraction: f64,
) -> Result<DiagnosticsRecord> {
    let grid = state.grid().clone();
    let ts = switches.symbol_time(state.t);
    let n_phys = state.n.to_physical();
    let sup_n = n_phys.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    let min_n = n_phys.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let total_mass = mass(&state.n);

    let c = elliptic::solve_chemical(&state.n, ts)?;
    let c_phys = c.to_physical();
    let kinetic = if state.omega.coeffs().iter().all(|z| z.norm_sqr() == 0.0) {
        0.0
    } else {
        elliptic::biot_savart(&state.omega, ts)?.kinetic_energy()
    };
    let fe = free_energy(&n_phys, &c_phys, kinetic, &grid, total_mass.abs());

    // Mass fraction beyond |y| > boundary_fraction * ly.
    let ny = grid.ny();
    let dv = grid.cell_area();
    let cut = boundary_fraction * grid.ly();
    let mut boundary_mass = 0.0;
    for (idx, v) in n_phys.iter().enumerate() {
        if grid.y_at(idx % ny).abs() > cut {
            boundary_mass += v.abs();
        }
    }
    boundary_mass *= dv;

    let snap = bootstrap_snapshot(&state.n, &state.omega, params, ts);
    let mut mode_amp = [0.0; TRACKED_MODES];
    for (i, amp) in mode_amp.iter_mut().enumerate() {
        *amp = state.n.mode_band_l2((i + 1) as i64);
    }

    Ok(DiagnosticsRecord {
        t: state.t,
        mass: total_mass,
        free_energy_f: fe.f,
        energy_e: fe.e,
        second_moment: second_moment_phys(&n_phys, &grid),
        min_n,
        sup_n,
        norm_a_kappa_n_neq: snap.norm_a_kappa_n_neq,
        norm_a_nu_omega_neq: snap.norm_a_nu_omega_neq,
        norm_n0_hs: snap.norm_n0_hs,
        norm_omega0_hs: snap.norm_omega0_hs,
        bs_int_n_mult: accum.integrals[0],
        bs_int_n_lap: accum.integrals[1],
        bs_int_omega_mult: accum.integrals[2],
        bs_int_omega_lap: accum.integrals[3],
        bs_int_omega0: accum.integrals[4],
        boundary_mass_fraction: if total_mass.abs() > 0.0 {
            boundary_mass / total_mass.abs()
        } else {
            0.0
        },
        clamped_mass_fraction: fe.clamped_mass_fraction,
        tail_fraction: state.n.tail_energy_fraction(),
        mode_amp,
    })
}

/// Result of the least-squares decay-rate fit.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FittedRate {
    pub rate: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fit the decay rate of a mode-amplitude history: least-squares slope of
/// log amplitude over the window starting where the amplitude first drops
/// below half its maximum and ending before the round-off floor
/// (1e-13 x max). Requires the energy (amplitude squared) to span at least
/// three decades inside the window.
pub fn fit_enhanced_dissipation_rate(history: &[(f64, f64)]) -> Result<FittedRate> {
    if history.len() < 5 {
        return Err(Error::WindowTooShort(format!("{} samples", history.len())));
    }
    let max_amp = history.iter().fold(0.0f64, |a, (_, v)| a.max(*v));
    if max_amp <= 0.0 {
        return Err(Error::WindowTooShort("flat zero history".into()));
    }
    let floor = 1e-13 * max_amp;
    let i_max = history
        .iter()
        .position(|(_, v)| *v == max_amp)
        .unwrap_or(0);
    let start = history[i_max..]
        .iter()
        .position(|(_, v)| *v < 0.5 * max_amp)
        .map(|p| p + i_max)
        .ok_or_else(|| Error::WindowTooShort("amplitude never dropped below half max".into()))?;
    let end = history[start..]
        .iter()
        .position(|(_, v)| *v < floor)
        .map(|p| p + start)
        .unwrap_or(history.len());
    let window = &history[start..end];
    if window.len() < 3 {
        return Err(Error::WindowTooShort(format!("{} points in decay window", window.len())));
    }
    let amp_start = window.first().unwrap().1;
    let amp_end = window.last().unwrap().1;
    if amp_end <= 0.0 || (amp_start / amp_end).powi(2) < 1e3 {
        return Err(Error::WindowTooShort(format!(
            "energy span {:.2e} below 3 decades",
            (amp_start / amp_end).powi(2)
        )));
    }
    // least squares on (t, ln amp)
    let n = window.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for (t, v) in window {
        let y = v.ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let slope = (n * sty - st * sy) / (n * stt - st * st);
    Ok(FittedRate {
        rate: -slope,
        window: (window.first().unwrap().0, window.last().unwrap().0),
        points: window.len(),
    })
}

/// Convenience: max |coefficient| difference between two fields, relative to
/// the first field's peak (used by resume and convergence checks).
pub fn max_rel_coeff_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let peak = a.coeffs().iter().map(Complex64::norm).fold(0.0, f64::max);
    if peak == 0.0 {
        return b.coeffs().iter().map(Complex64::norm).fold(0.0, f64::max);
    }
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / peak
}
