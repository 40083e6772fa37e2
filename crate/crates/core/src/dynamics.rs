//! Right-hand-side assembly and time integration in sheared coordinates.
//!
//! The linear diffusion kappa*Delta_L / nu*Delta_L is integrated exactly via
//! the closed-form integrating factor; the nonlinear transport and chemotaxis
//! terms are advanced with a two-stage Heun scheme on the transformed
//! variables. Transport is assembled in divergence form, so the (0,0) mode of
//! the density right-hand side is identically zero and mass is conserved to
//! round-off.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, DiagnosticsRecord, DissipationAccum};
use crate::elliptic::{self, VelocityField};
use crate::error::{Error, Result};
use crate::field::{Frame, SpectralField};
use crate::grid::{laplacian_l_time_integral, Grid};
use crate::multiplier::DELTA_MAX;

/// Physical parameters of a run. epsilon = kappa/nu is derived, so the
/// relation kappa = epsilon*nu holds exactly by construction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysParams {
    pub kappa: f64,
    pub nu: f64,
    pub delta: f64,
    pub s: u32,
    /// Initial total mass (monitored, not prescribed).
    #[serde(default)]
    pub mass: f64,
}

impl PhysParams {
    pub fn new(kappa: f64, nu: f64, delta: f64, s: u32) -> Result<Self> {
        let p = PhysParams { kappa, nu, delta, s, mass: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= self.nu && self.nu <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < kappa <= nu <= 1, got kappa={}, nu={}",
                self.kappa, self.nu
            )));
        }
        if !(self.delta > 0.0 && self.delta <= DELTA_MAX + 1e-15) {
            return Err(Error::InvalidParams(format!(
                "need 0 < delta <= 1/(16 pi^2), got {}",
                self.delta
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.kappa / self.nu
    }
}

/// Run-mode switches isolating parts of the dynamics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Switches {
    /// Couette background on: symbols use the sheared frame at time t.
    pub couette: bool,
    /// Two-way coupling: the chemotactic curl forces the vorticity.
    pub coupling: bool,
    /// Passive scalar: drop the chemotaxis term from the density equation.
    pub passive_scalar: bool,
}

impl Default for Switches {
    fn default() -> Self {
        Switches { couette: true, coupling: true, passive_scalar: false }
    }
}

impl Switches {
    /// Time argument fed to the sheared symbols: t under Couette, 0 without
    /// background shear (the coordinates then never tilt).
    #[inline]
    pub fn symbol_time(&self, t: f64) -> f64 {
        if self.couette {
            t
        } else {
            0.0
        }
    }
}

/// The evolved pair (N, Omega) at a common time.
#[derive(Debug, Clone)]
pub struct SimState {
    pub n: SpectralField,
    pub omega: SpectralField,
    pub t: f64,
}

impl SimState {
    pub fn new(n: SpectralField, omega: SpectralField) -> Result<Self> {
        n.require_frame(Frame::Sheared)?;
        omega.require_frame(Frame::Sheared)?;
        n.require_matches(&omega)?;
        let t = n.time();
        Ok(SimState { n, omega, t })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.n.grid()
    }
}

/// Nonlinear right-hand side (diffusion excluded) plus physical-space stats
/// harvested from the stage evaluation.
pub struct RhsEval {
    pub dn: SpectralField,
    pub domega: SpectralField,
    pub max_speed: f64,
    pub sup_n: f64,
    pub min_n: f64,
}

/// Assemble -div_L(U N) - kappa div_L(N grad_L C) for the density and
/// -div_L(U Omega) + kappa curl_L(N grad_L C) for the vorticity,
/// pseudo-spectrally with 2/3 dealiasing.
pub fn rhs_nonlinear(state: &SimState, params: &PhysParams, switches: &Switches) -> Result<RhsEval> {
    let grid = state.grid().clone();
    let ts = switches.symbol_time(state.t);

    let n_phys = state.n.to_physical();
    let sup_n = n_phys.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    let min_n = n_phys.iter().fold(f64::INFINITY, |a, &v| a.min(v));

    let mut dn = SpectralField::zeros(grid.clone(), Frame::Sheared, state.t);
    let mut domega = SpectralField::zeros(grid.clone(), Frame::Sheared, state.t);

    // Transport by the perturbation velocity, in divergence form.
    let mut max_speed = 0.0;
    if !state.omega.coeffs().iter().all(|c| c.norm_sqr() == 0.0) {
        let u = elliptic::biot_savart(&state.omega, ts)?;
        let u1_phys = u.u1.to_physical();
        let u2_phys = u.u2.to_physical();
        max_speed = u1_phys
            .iter()
            .zip(&u2_phys)
            .map(|(a, b)| (a * a + b * b).sqrt())
            .fold(0.0, f64::max);

        let om_phys = state.omega.to_physical();
        let fz_n = product_spec(&grid, &u1_phys, &n_phys, state.t);
        let fy_n = product_spec(&grid, &u2_phys, &n_phys, state.t);
        let fz_o = product_spec(&grid, &u1_phys, &om_phys, state.t);
        let fy_o = product_spec(&grid, &u2_phys, &om_phys, state.t);
        add_divergence(&mut dn, &fz_n, &fy_n, ts, -1.0);
        add_divergence(&mut domega, &fz_o, &fy_o, ts, -1.0);
    }

    // Chemotaxis: flux components (N d_z C, N d_y^t C).
    if !switches.passive_scalar || switches.coupling {
        let c = elliptic::solve_chemical(&state.n, ts)?;
        let (fz, fy) = elliptic::chemotaxis_flux(&state.n, &c, ts)?;
        if !switches.passive_scalar {
            add_divergence(&mut dn, &fz, &fy, ts, -params.kappa);
        }
        if switches.coupling {
            add_curl(&mut domega, &fz, &fy, ts, params.kappa);
        }
    }

    dn.dealias();
    domega.dealias();
    Ok(RhsEval { dn, domega, max_speed, sup_n, min_n })
}

/// Dealiased spectral product of two physical-space arrays.
fn product_spec(grid: &Arc<Grid>, a: &[f64], b: &[f64], time: f64) -> SpectralField {
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    SpectralField::from_physical(grid.clone(), &prod, Frame::Sheared, time).dealiased()
}

/// out += scale * (d_z fz + d_y^t fy).
fn add_divergence(out: &mut SpectralField, fz: &SpectralField, fy: &SpectralField, ts: f64, scale: f64) {
    let grid = out.grid().clone();
    for (idx, k, eta) in grid.modes() {
        let d = Complex64::new(0.0, k) * fz.coeffs()[idx]
            + Complex64::new(0.0, eta - k * ts) * fy.coeffs()[idx];
        out.coeffs_mut()[idx] += scale * d;
    }
}

/// out += scale * (-d_y^t fz + d_z fy).
fn add_curl(out: &mut SpectralField, fz: &SpectralField, fy: &SpectralField, ts: f64, scale: f64) {
    let grid = out.grid().clone();
    for (idx, k, eta) in grid.modes() {
        let d = Complex64::new(0.0, -(eta - k * ts)) * fz.coeffs()[idx]
            + Complex64::new(0.0, k) * fy.coeffs()[idx];
        out.coeffs_mut()[idx] += scale * d;
    }
}

/// Exact diffusive propagator: multiplies each coefficient by
/// exp(-iota * I(k, eta, t0, t1)) with I the closed-form time integral of the
/// sheared Laplacian symbol (or the static symbol without shear).
pub fn linear_propagator(
    f: &SpectralField,
    iota: f64,
    t0: f64,
    t1: f64,
    shear: bool,
) -> Result<SpectralField> {
    if t1 < t0 {
        return Err(Error::InvalidParams(format!("t1 < t0 in propagator: {t1} < {t0}")));
    }
    let mut out = f.clone();
    out.apply_symbol(|k, eta| {
        let i = if shear {
            laplacian_l_time_integral(k, eta, t0, t1)
        } else {
            (k * k + eta * eta) * (t1 - t0)
        };
        (-iota * i).exp()
    });
    out.set_time(t1);
    Ok(out)
}

/// Physical-space and spectral signals harvested during one step.
#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub dt: f64,
    /// Max |U| over the grid at the step start.
    pub max_speed: f64,
    /// Sup and min of N over the grid at the step start.
    pub sup_n: f64,
    pub min_n: f64,
    /// Tail-shell energy fraction of N after the step.
    pub tail_fraction: f64,
    /// All coefficients finite after the step.
    pub finite: bool,
}

/// One integrating-factor Heun step of fixed size dt.
pub fn step(
    state: &SimState,
    params: &PhysParams,
    switches: &Switches,
    dt: f64,
) -> Result<(SimState, StepStats)> {
    let grid = state.grid().clone();
    let t0 = state.t;
    let t1 = t0 + dt;
    let rhs0 = rhs_nonlinear(state, params, switches)?;

    // Propagator exponents, one pass for both fields.
    let len = grid.len();
    let mut p_n = vec![0.0f64; len];
    let mut p_om = vec![0.0f64; len];
    for (idx, k, eta) in grid.modes() {
        let i = if switches.couette {
            laplacian_l_time_integral(k, eta, t0, t1)
        } else {
            (k * k + eta * eta) * dt
        };
        p_n[idx] = (-params.kappa * i).exp();
        p_om[idx] = (-params.nu * i).exp();
    }

    // Predictor: u_p = P (u0 + dt F0).
    let mut n_p = SpectralField::zeros(grid.clone(), Frame::Sheared, t1);
    let mut om_p = SpectralField::zeros(grid.clone(), Frame::Sheared, t1);
    for idx in 0..len {
        n_p.coeffs_mut()[idx] = p_n[idx] * (state.n.coeffs()[idx] + dt * rhs0.dn.coeffs()[idx]);
        om_p.coeffs_mut()[idx] =
            p_om[idx] * (state.omega.coeffs()[idx] + dt * rhs0.domega.coeffs()[idx]);
    }
    let pred = SimState { n: n_p, omega: om_p, t: t1 };
    let rhs1 = rhs_nonlinear(&pred, params, switches)?;

    // Corrector: u1 = P (u0 + dt/2 F0) + dt/2 F1.
    let half = 0.5 * dt;
    let mut n_new = SpectralField::zeros(grid.clone(), Frame::Sheared, t1);
    let mut om_new = SpectralField::zeros(grid.clone(), Frame::Sheared, t1);
    for idx in 0..len {
        n_new.coeffs_mut()[idx] = p_n[idx]
            * (state.n.coeffs()[idx] + half * rhs0.dn.coeffs()[idx])
            + half * rhs1.dn.coeffs()[idx];
        om_new.coeffs_mut()[idx] = p_om[idx]
            * (state.omega.coeffs()[idx] + half * rhs0.domega.coeffs()[idx])
            + half * rhs1.domega.coeffs()[idx];
    }
    n_new.dealias();
    om_new.dealias();

    let finite = n_new.is_finite() && om_new.is_finite();
    let tail_fraction = n_new.tail_energy_fraction();
    let next = SimState { n: n_new, omega: om_new, t: t1 };
    Ok((
        next,
        StepStats {
            dt,
            max_speed: rhs0.max_speed,
            sup_n: rhs0.sup_n,
            min_n: rhs0.min_n,
            tail_fraction,
            finite,
        },
    ))
}

/// Why a blowup verdict fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupTrigger {
    /// sup N exceeded blowup_factor times its initial value.
    SupGrowth,
    /// The top-third spectral shell captured more than tail_threshold of the
    /// density energy.
    SpectralTail,
    /// Non-finite coefficients appeared.
    NonFinite,
}

/// Terminal classification of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Completed,
    Blowup,
    ResolutionExceeded,
    MassLeak,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupVerdict {
    pub status: VerdictStatus,
    pub t_stop: f64,
    pub peak_sup: f64,
    pub tail_fraction: f64,
    pub trigger: Option<BlowupTrigger>,
}

/// Detector thresholds (tunable, not regime constants).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub blowup_factor: f64,
    pub tail_threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { blowup_factor: 1e4, tail_threshold: 0.1 }
    }
}

/// Evaluate the blowup triggers against the latest step signals.
pub fn detect_blowup(stats: &StepStats, initial_sup: f64, det: &DetectorConfig) -> Option<BlowupTrigger> {
    if !stats.finite {
        return Some(BlowupTrigger::NonFinite);
    }
    if stats.tail_fraction > det.tail_threshold {
        return Some(BlowupTrigger::SpectralTail);
    }
    if initial_sup > 0.0 && stats.sup_n > det.blowup_factor * initial_sup {
        return Some(BlowupTrigger::SupGrowth);
    }
    None
}

/// Full specification of a single run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub params: PhysParams,
    pub switches: Switches,
    pub t_max: f64,
    pub out_interval: f64,
    pub dt_max: f64,
    pub cfl_safety: f64,
    /// Disable adaptivity (convergence studies).
    pub fixed_dt: Option<f64>,
    pub detector: DetectorConfig,
    /// Relative mass allowed beyond |y| > boundary_fraction * ly.
    pub mass_leak_tol: f64,
    pub boundary_fraction: f64,
    /// Relative coefficient threshold defining the active z-band of the
    /// initial data for the secular resolution bound.
    pub active_k_tol: f64,
    /// Testing aid: stop cleanly at this output time, keeping t_max intact.
    pub halt_at: Option<f64>,
}

impl RunSpec {
    pub fn with_defaults(params: PhysParams, switches: Switches, t_max: f64, out_interval: f64) -> Self {
        RunSpec {
            params,
            switches,
            t_max,
            out_interval,
            dt_max: 0.01,
            cfl_safety: 0.4,
            fixed_dt: None,
            detector: DetectorConfig::default(),
            mass_leak_tol: 1e-8,
            boundary_fraction: 0.4,
            active_k_tol: 1e-10,
            halt_at: None,
        }
    }
}

/// Result of a completed (or stopped) run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub k: i64,
    pub rate: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub verdict: BlowupVerdict,
    pub secular_bound: f64,
    pub positivity_violated: bool,
    pub clamp_flagged: bool,
    pub fitted_rates: Vec<RateFit>,
    /// True if the run stopped early at halt_at (testing aid).
    pub halted: bool,
    pub records: Vec<DiagnosticsRecord>,
}

/// Number of z-bands whose amplitude history is tracked for rate fits.
pub const TRACKED_MODES: usize = 3;

/// Resumable run driver: owns the state, accumulators and mode history.
pub struct Runner {
    spec: RunSpec,
    state: SimState,
    accum: DissipationAccum,
    initial_mass: f64,
    initial_sup: f64,
    peak_sup: f64,
    last_tail: f64,
    out_index: u64,
    mode_history: Vec<(f64, [f64; TRACKED_MODES])>,
    positivity_violated: bool,
    clamp_flagged: bool,
    records: Vec<DiagnosticsRecord>,
    secular_bound: f64,
    /// Max |U| from the latest step, feeding the next CFL choice; None right
    /// after construction or restore.
    last_speed: Option<f64>,
}

impl Runner {
    pub fn new(spec: RunSpec, n0: SpectralField, omega0: SpectralField) -> Result<Runner> {
        spec.params.validate()?;
        if spec.out_interval <= 0.0 || spec.t_max <= 0.0 {
            return Err(Error::InvalidParams("t_max and out_interval must be positive".into()));
        }
        let state = SimState::new(n0, omega0)?;
        if state.t != 0.0 {
            return Err(Error::InvalidParams("fresh runs must start at t = 0".into()));
        }
        let initial_mass = diagnostics::mass(&state.n);
        let n_phys = state.n.to_physical();
        let initial_sup = n_phys.iter().fold(0.0f64, |a, &v| a.max(v));
        let ts = spec.switches.symbol_time(state.t);
        let snap = diagnostics::bootstrap_snapshot(&state.n, &state.omega, &spec.params, ts);
        let accum = DissipationAccum::init(state.t, snap.integrands());
        let secular_bound = secular_resolution_bound(&spec, &state);
        let mut runner = Runner {
            spec,
            state,
            accum,
            initial_mass,
            initial_sup,
            peak_sup: initial_sup,
            last_tail: 0.0,
            out_index: 0,
            mode_history: Vec::new(),
            positivity_violated: false,
            clamp_flagged: false,
            records: Vec::new(),
            secular_bound,
            last_speed: None,
        };
        // Record the initial output row.
        let record = runner.make_record()?;
        runner.push_record(record);
        runner.out_index = 1;
        Ok(runner)
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn spec(&self) -> &RunSpec {
        &self.spec
    }

    pub fn secular_bound(&self) -> f64 {
        self.secular_bound
    }

    pub fn initial_mass(&self) -> f64 {
        self.initial_mass
    }

    pub fn records(&self) -> &[DiagnosticsRecord] {
        &self.records
    }

    pub fn mode_history(&self) -> &[(f64, [f64; TRACKED_MODES])] {
        &self.mode_history
    }

    pub(crate) fn restore(
        spec: RunSpec,
        state: SimState,
        accum: DissipationAccum,
        initial_mass: f64,
        initial_sup: f64,
        peak_sup: f64,
        out_index: u64,
        mode_history: Vec<(f64, [f64; TRACKED_MODES])>,
        positivity_violated: bool,
        clamp_flagged: bool,
    ) -> Result<Runner> {
        spec.params.validate()?;
        let secular_bound = secular_resolution_bound(&spec, &state);
        Ok(Runner {
            spec,
            state,
            accum,
            initial_mass,
            initial_sup,
            peak_sup,
            last_tail: 0.0,
            out_index,
            mode_history,
            positivity_violated,
            clamp_flagged,
            records: Vec::new(),
            secular_bound,
            last_speed: None,
        })
    }

    pub(crate) fn snapshot_for_checkpoint(
        &self,
    ) -> (
        &SimState,
        &DissipationAccum,
        f64,
        f64,
        f64,
        u64,
        &[(f64, [f64; TRACKED_MODES])],
        bool,
        bool,
    ) {
        (
            &self.state,
            &self.accum,
            self.initial_mass,
            self.initial_sup,
            self.peak_sup,
            self.out_index,
            &self.mode_history,
            self.positivity_violated,
            self.clamp_flagged,
        )
    }

    fn make_record(&mut self) -> Result<DiagnosticsRecord> {
        let rec = diagnostics::record(
            &self.state,
            &self.spec.params,
            &self.spec.switches,
            &self.accum,
            self.initial_mass,
            self.spec.boundary_fraction,
        )?;
        self.peak_sup = self.peak_sup.max(rec.sup_n);
        if rec.min_n < -1e-6 * rec.sup_n.max(0.0) {
            self.positivity_violated = true;
        }
        if rec.clamped_mass_fraction > 1e-4 {
            self.clamp_flagged = true;
        }
        Ok(rec)
    }

    fn push_record(&mut self, rec: DiagnosticsRecord) {
        self.mode_history.push((rec.t, rec.mode_amp));
        self.records.push(rec);
    }

    /// Advance to the next output time; returns the new record or the verdict
    /// that stopped the run.
    fn advance_one_interval(&mut self) -> Result<std::result::Result<DiagnosticsRecord, BlowupVerdict>> {
        let t_next = self.out_index as f64 * self.spec.out_interval;
        let dx_min = {
            let g = self.state.grid();
            (g.lx() / g.nx() as f64).min(g.ly() / g.ny() as f64)
        };
        while self.state.t < t_next {
            let remaining = t_next - self.state.t;
            let dt = match self.spec.fixed_dt {
                Some(fdt) => fdt.min(remaining),
                None => {
                    let mut dt = self.spec.dt_max;
                    dt = dt.min(0.5 * 0.1 * self.spec.params.kappa.powf(-1.0 / 3.0));
                    let speed = self.last_max_speed();
                    if speed > 0.0 {
                        dt = dt.min(self.spec.cfl_safety * dx_min / speed);
                    }
                    dt.min(remaining)
                }
            };
            let hit_boundary = dt >= remaining - 1e-12 * self.spec.out_interval;
            let (mut next, stats) = step(&self.state, &self.spec.params, &self.spec.switches, dt)?;
            if hit_boundary {
                next.t = t_next;
                next.n.set_time(t_next);
                next.omega.set_time(t_next);
            }
            self.last_speed = Some(stats.max_speed);
            self.peak_sup = self.peak_sup.max(stats.sup_n);
            self.last_tail = stats.tail_fraction;
            if let Some(trigger) = detect_blowup(&stats, self.initial_sup, &self.spec.detector) {
                self.state = next;
                return Ok(Err(BlowupVerdict {
                    status: VerdictStatus::Blowup,
                    t_stop: self.state.t,
                    peak_sup: self.peak_sup,
                    tail_fraction: stats.tail_fraction,
                    trigger: Some(trigger),
                }));
            }
            self.state = next;
            let ts = self.spec.switches.symbol_time(self.state.t);
            let snap =
                diagnostics::bootstrap_snapshot(&self.state.n, &self.state.omega, &self.spec.params, ts);
            self.accum.step_to(self.state.t, snap.integrands());
        }
        let rec = self.make_record()?;
        if rec.boundary_mass_fraction > self.spec.mass_leak_tol {
            self.push_record(rec);
            return Ok(Err(BlowupVerdict {
                status: VerdictStatus::MassLeak,
                t_stop: self.state.t,
                peak_sup: self.peak_sup,
                tail_fraction: self.last_tail,
                trigger: None,
            }));
        }
        self.out_index += 1;
        Ok(Ok(rec))
    }

    fn last_max_speed(&self) -> f64 {
        self.last_speed.unwrap_or(0.0)
    }

    /// Integrate to t_max (or halt_at, or a stopping verdict), invoking
    /// `on_output` after every recorded output time.
    pub fn run<F>(mut self, mut on_output: F) -> Result<RunReport>
    where
        F: FnMut(&Runner, &DiagnosticsRecord) -> Result<()>,
    {
        // Emit rows already recorded (the t = 0 row of a fresh run).
        for rec in self.records.clone() {
            on_output(&self, &rec)?;
        }
        let resolution_limited = self.spec.t_max > self.secular_bound + 1e-12;
        let t_end = self.spec.t_max.min(self.secular_bound);
        let halt = self.spec.halt_at.unwrap_or(f64::INFINITY);
        let mut verdict = None;
        let mut halted = false;
        loop {
            let t_next = self.out_index as f64 * self.spec.out_interval;
            if t_next > t_end + 1e-12 {
                break;
            }
            if t_next > halt + 1e-12 {
                halted = true;
                break;
            }
            match self.advance_one_interval()? {
                Ok(rec) => {
                    self.push_record(rec);
                    let rec = self.records.last().unwrap().clone();
                    on_output(&self, &rec)?;
                }
                Err(v) => {
                    if let Some(rec) = self.records.last() {
                        let rec = rec.clone();
                        on_output(&self, &rec)?;
                    }
                    verdict = Some(v);
                    break;
                }
            }
        }
        let verdict = verdict.unwrap_or_else(|| BlowupVerdict {
            status: if resolution_limited && !halted {
                VerdictStatus::ResolutionExceeded
            } else {
                VerdictStatus::Completed
            },
            t_stop: self.state.t,
            peak_sup: self.peak_sup,
            tail_fraction: self.last_tail,
            trigger: None,
        });
        let fitted_rates = (1..=TRACKED_MODES as i64)
            .map(|k| {
                let hist: Vec<(f64, f64)> = self
                    .mode_history
                    .iter()
                    .map(|(t, amps)| (*t, amps[(k - 1) as usize]))
                    .collect();
                match diagnostics::fit_enhanced_dissipation_rate(&hist) {
                    Ok(fit) => RateFit {
                        k,
                        rate: Some(fit.rate),
                        window: Some(fit.window),
                        note: None,
                    },
                    Err(e) => RateFit { k, rate: None, window: None, note: Some(e.to_string()) },
                }
            })
            .collect();
        Ok(RunReport {
            verdict,
            secular_bound: self.secular_bound,
            positivity_violated: self.positivity_violated,
            clamp_flagged: self.clamp_flagged,
            fitted_rates,
            halted,
            records: self.records,
        })
    }
}

/// t_max bound protecting y-resolution against secular tilting: eta_max /
/// (2 k_active), with k_active the largest z-band carrying initial data.
/// Without Couette there is no tilting and the bound is infinite.
pub fn secular_resolution_bound(spec: &RunSpec, state: &SimState) -> f64 {
    if !spec.switches.couette {
        return f64::INFINITY;
    }
    let k_n = state.n.max_active_kz(spec.active_k_tol);
    let k_om = state.omega.max_active_kz(spec.active_k_tol);
    let k_active = k_n.max(k_om).max(1);
    state.grid().eta_max() / (2.0 * k_active as f64)
}
