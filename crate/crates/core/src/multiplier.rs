//! Arctan-type Fourier weights used to measure enhanced dissipation in the
//! sheared frame, their analytic t- and eta-derivatives, and a randomized
//! verification battery for the explicit-constant inequalities they satisfy.
//!
//! For iota in {kappa, nu}:
//!
//! ```text
//! W_iota(t,k,eta) = pi - arctan(iota^{1/3}|k|^{2/3}(t - eta/k)) * 1_{0 < |k| <= iota^{-1/2}}
//! Wcal(t,k,eta)   = pi - arctan(t - eta/k) * 1_{k != 0}
//! M_iota = W_iota * Wcal
//! A_iota = M_iota * exp(delta kappa^{1/3} |k|^{2/3} t) * (1 + k^2 + eta^2)^{s/2}
//! ```
//!
//! Both A-weights share the same exponential factor built from kappa.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Frame, SpectralField};

/// Largest delta for which the weighted energy estimates close.
pub const DELTA_MAX: f64 = 1.0 / (16.0 * PI * PI);

/// Which diffusivity the weight tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Iota {
    Kappa,
    Nu,
}

/// Parameters selecting one member of the weight family.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub iota: Iota,
    /// Cell diffusivity kappa; also drives the shared exponential factor.
    pub kappa: f64,
    /// Fluid viscosity nu.
    pub nu: f64,
    /// Growth-factor constant, in (0, 1/(16 pi^2)].
    pub delta: f64,
    /// Sobolev regularity level.
    pub s: u32,
}

impl MultiplierSpec {
    pub fn new(iota: Iota, kappa: f64, nu: f64, delta: f64, s: u32) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= nu && nu <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < kappa <= nu <= 1, got kappa={kappa}, nu={nu}"
            )));
        }
        if !(delta > 0.0 && delta <= DELTA_MAX + 1e-15) {
            return Err(Error::InvalidParams(format!(
                "need 0 < delta <= 1/(16 pi^2) = {DELTA_MAX:.6e}, got {delta}"
            )));
        }
        Ok(MultiplierSpec { iota, kappa, nu, delta, s })
    }

    /// The iota value itself (kappa or nu).
    #[inline]
    pub fn iota_value(&self) -> f64 {
        match self.iota {
            Iota::Kappa => self.kappa,
            Iota::Nu => self.nu,
        }
    }
}

/// True when 0 < |k| <= iota^{-1/2}.
#[inline]
fn in_band(k: f64, iota: f64) -> bool {
    k != 0.0 && k.abs() <= iota.powf(-0.5)
}

/// W_iota weight; equals pi when the band indicator is off (including k = 0).
#[inline]
pub fn w_iota(t: f64, k: f64, eta: f64, iota: f64) -> f64 {
    if !in_band(k, iota) {
        return PI;
    }
    let arg = iota.cbrt() * k.abs().powf(2.0 / 3.0) * (t - eta / k);
    PI - arg.atan()
}

/// The iota-free weight; equals pi when k = 0.
#[inline]
pub fn w_cal(t: f64, k: f64, eta: f64) -> f64 {
    if k == 0.0 {
        return PI;
    }
    PI - (t - eta / k).atan()
}

/// M_iota = W_iota * Wcal.
#[inline]
pub fn m_iota(t: f64, k: f64, eta: f64, iota: f64) -> f64 {
    w_iota(t, k, eta, iota) * w_cal(t, k, eta)
}

/// d/dt of Wcal: -k^2/(k^2 + (eta - kt)^2) for k != 0, else 0.
#[inline]
pub fn dt_w_cal(t: f64, k: f64, eta: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let x = t - eta / k;
    -1.0 / (1.0 + x * x)
}

/// d/dt of W_iota: the band-limited Lorentzian.
#[inline]
pub fn dt_w_iota(t: f64, k: f64, eta: f64, iota: f64) -> f64 {
    if !in_band(k, iota) {
        return 0.0;
    }
    let a = iota.cbrt() * k.abs().powf(2.0 / 3.0);
    let x = t - eta / k;
    -a / (1.0 + a * a * x * x)
}

/// Analytic time derivative of M_iota.
#[inline]
pub fn dt_m_iota(t: f64, k: f64, eta: f64, iota: f64) -> f64 {
    w_cal(t, k, eta) * dt_w_iota(t, k, eta, iota) + w_iota(t, k, eta, iota) * dt_w_cal(t, k, eta)
}

/// d/deta of Wcal: (1/k) / (1 + (t - eta/k)^2) for k != 0, else 0.
#[inline]
pub fn deta_w_cal(t: f64, k: f64, eta: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let x = t - eta / k;
    (1.0 / k) / (1.0 + x * x)
}

/// d/deta of W_iota.
#[inline]
pub fn deta_w_iota(t: f64, k: f64, eta: f64, iota: f64) -> f64 {
    if !in_band(k, iota) {
        return 0.0;
    }
    let a = iota.cbrt() * k.abs().powf(2.0 / 3.0);
    let x = t - eta / k;
    a / k / (1.0 + a * a * x * x)
}

/// Analytic eta derivative of M_iota.
#[inline]
pub fn deta_m_iota(t: f64, k: f64, eta: f64, iota: f64) -> f64 {
    w_cal(t, k, eta) * deta_w_iota(t, k, eta, iota)
        + w_iota(t, k, eta, iota) * deta_w_cal(t, k, eta)
}

/// Japanese bracket (1 + k^2 + eta^2)^{1/2}.
#[inline]
pub fn bracket(k: f64, eta: f64) -> f64 {
    (1.0 + k * k + eta * eta).sqrt()
}

/// A_iota weight for the given spec.
#[inline]
pub fn a_iota(t: f64, k: f64, eta: f64, spec: &MultiplierSpec) -> f64 {
    let m = m_iota(t, k, eta, spec.iota_value());
    let growth = (spec.delta * spec.kappa.cbrt() * k.abs().powf(2.0 / 3.0) * t).exp();
    m * growth * bracket(k, eta).powi(spec.s as i32)
}

/// Multiply a sheared-frame field coefficientwise by A_iota(t, k, eta).
pub fn apply_a_weight(f: &SpectralField, spec: &MultiplierSpec, t: f64) -> Result<SpectralField> {
    f.require_frame(Frame::Sheared)?;
    let mut out = f.clone();
    out.apply_symbol(|k, eta| a_iota(t, k, eta, spec));
    Ok(out)
}

/// Sampling ranges for the verification battery.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LemmaRanges {
    pub t_max: f64,
    pub k_max: i64,
    pub eta_max: f64,
}

impl Default for LemmaRanges {
    fn default() -> Self {
        LemmaRanges { t_max: 200.0, k_max: 64, eta_max: 256.0 }
    }
}

/// Relative floating-point slack for the verification battery.
pub const REL_SLACK: f64 = 1e-9;

/// Outcome of checking one inequality over the sample set.
///
/// `worst_margin` is the smallest relative slack seen: for a check
/// LHS <= RHS it is min (RHS - LHS)/scale, and for an equality check it is
/// min (slack - |deviation|)/scale. Negative beyond the slack means violated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality_id: String,
    pub samples: u64,
    pub violations: u64,
    pub worst_margin: f64,
}

impl InequalityReport {
    fn new(id: &str) -> Self {
        InequalityReport {
            inequality_id: id.to_string(),
            samples: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
        }
    }

    fn record(&mut self, margin: f64) {
        self.samples += 1;
        if margin < -REL_SLACK {
            self.violations += 1;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
        }
    }

    fn merge(&mut self, other: &InequalityReport) {
        self.samples += other.samples;
        self.violations += other.violations;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
    }
}

/// Report of the full battery for one iota value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub iota_value: f64,
    pub samples: u64,
    pub ranges: LemmaRanges,
    pub seed: u64,
    pub inequalities: Vec<InequalityReport>,
}

impl LemmaSuiteReport {
    pub fn total_violations(&self) -> u64 {
        self.inequalities.iter().map(|r| r.violations).sum()
    }
}

struct SampleChecks {
    m_1: InequalityReport,
    m_bound: InequalityReport,
    dot_m: InequalityReport,
    pa_eta: InequalityReport,
    m_5: InequalityReport,
    ed: InequalityReport,
}

impl SampleChecks {
    fn new() -> Self {
        SampleChecks {
            m_1: InequalityReport::new("M_constancy_off_band"),
            m_bound: InequalityReport::new("M_bound"),
            dot_m: InequalityReport::new("M_dot_lower"),
            pa_eta: InequalityReport::new("M_deta_upper"),
            m_5: InequalityReport::new("M_dot_ratio"),
            ed: InequalityReport::new("M_enhanced_dissipation"),
        }
    }

    fn merge(mut self, other: SampleChecks) -> SampleChecks {
        self.m_1.merge(&other.m_1);
        self.m_bound.merge(&other.m_bound);
        self.dot_m.merge(&other.dot_m);
        self.pa_eta.merge(&other.pa_eta);
        self.m_5.merge(&other.m_5);
        self.ed.merge(&other.ed);
        self
    }

    fn check_point(&mut self, t: f64, k: f64, eta: f64, xi: f64, iota: f64) {
        let m = m_iota(t, k, eta, iota);

        // Constancy where the indicators are off: the W_iota factor is pi
        // whenever |k| is outside (0, iota^{-1/2}], and M itself is pi^2 at
        // k = 0 where both indicators vanish.
        if !in_band(k, iota) {
            let w = w_iota(t, k, eta, iota);
            let dev = (w - PI).abs() / PI;
            self.m_1.record(REL_SLACK - dev);
            if k == 0.0 {
                let dev_m = (m - PI * PI).abs() / (PI * PI);
                self.m_1.record(REL_SLACK - dev_m);
            }
        }

        // pi^2/4 <= M <= 9 pi^2/4.
        let lo = (m - PI * PI / 4.0) / (PI * PI);
        let hi = (9.0 * PI * PI / 4.0 - m) / (PI * PI);
        self.m_bound.record(lo.min(hi));

        if k != 0.0 {
            let shifted = eta - k * t;
            let lorentz = k * k / (k * k + shifted * shifted);

            // -dt M >= (pi/2) k^2/(k^2 + (eta - kt)^2).
            let lhs = -dt_m_iota(t, k, eta, iota);
            let rhs = 0.5 * PI * lorentz;
            self.dot_m
                .record((lhs - rhs) / rhs.abs().max(lhs.abs()).max(f64::MIN_POSITIVE));

            // |deta M| <= 4 pi / |k|.
            let lhs = deta_m_iota(t, k, eta, iota).abs();
            let rhs = 4.0 * PI / k.abs();
            self.pa_eta.record((rhs - lhs) / rhs);

            // sqrt(-dt M(eta)) / sqrt(-dt M(xi)) <= 2 (1 + |eta-xi|^2)^{1/2},
            // on the band only.
            if in_band(k, iota) {
                let num = (-dt_m_iota(t, k, eta, iota)).max(0.0).sqrt();
                let den = (-dt_m_iota(t, k, xi, iota)).max(0.0).sqrt();
                if den > 0.0 {
                    let lhs = num / den;
                    let d = eta - xi;
                    let rhs = 2.0 * (1.0 + d * d).sqrt();
                    self.m_5.record((rhs - lhs) / rhs.max(lhs));
                }
            }

            // (1/3pi) iota^{1/3} |k|^{2/3} <= -dt M / M + iota (k^2 + (eta-kt)^2).
            let lhs = iota.cbrt() * k.abs().powf(2.0 / 3.0) / (3.0 * PI);
            let rhs = -dt_m_iota(t, k, eta, iota) / m + iota * (k * k + shifted * shifted);
            self.ed.record((rhs - lhs) / rhs.abs().max(lhs.abs()));
        }
    }
}

/// Randomized battery checking every explicit-constant inequality of the
/// weight family at `samples` points. Violations are counted and reported,
/// never thrown.
pub fn verify_lemma_suite(
    samples: u64,
    ranges: LemmaRanges,
    iota_value: f64,
    seed: u64,
) -> LemmaSuiteReport {
    let chunk = 8192u64;
    let n_chunks = samples.div_ceil(chunk);
    let merged = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(c + 1));
            let mut checks = SampleChecks::new();
            let lo = c * chunk;
            let hi = (lo + chunk).min(samples);
            for _ in lo..hi {
                let t = rng.gen_range(0.0..=ranges.t_max);
                // k = 0 occasionally, to exercise the constancy branch.
                let k = if rng.gen_ratio(1, 64) {
                    0.0
                } else {
                    let mag = rng.gen_range(1..=ranges.k_max);
                    if rng.gen_bool(0.5) {
                        mag as f64
                    } else {
                        -(mag as f64)
                    }
                };
                let eta = rng.gen_range(-ranges.eta_max..=ranges.eta_max);
                let xi = rng.gen_range(-ranges.eta_max..=ranges.eta_max);
                checks.check_point(t, k, eta, xi, iota_value);
            }
            checks
        })
        .reduce(SampleChecks::new, SampleChecks::merge);

    LemmaSuiteReport {
        iota_value,
        samples,
        ranges,
        seed,
        inequalities: vec![
            merged.m_1,
            merged.m_bound,
            merged.dot_m,
            merged.pa_eta,
            merged.m_5,
            merged.ed,
        ],
    }
}

/// Empirical estimate of the commutator constant: the max over samples of
///
/// ```text
/// |M(t,k,eta)<k,eta>^s - M(t,k,xi)<k,xi>^s| * |k|
/// -----------------------------------------------
///      |eta - xi| (<eta-xi>^s + <k,xi>^s)
/// ```
///
/// Samples with eta = xi are skipped (0/0). The interesting property is
/// boundedness as the ranges widen, not a particular value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommutatorEstimate {
    pub s: u32,
    pub samples_used: u64,
    pub max_ratio: f64,
}

pub fn commutator_constant(
    samples: u64,
    s: u32,
    ranges: LemmaRanges,
    iota_value: f64,
    seed: u64,
) -> CommutatorEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0u64;
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let t = rng.gen_range(0.0..=ranges.t_max);
        let mag = rng.gen_range(1..=ranges.k_max);
        let k = if rng.gen_bool(0.5) { mag as f64 } else { -(mag as f64) };
        let eta = rng.gen_range(-ranges.eta_max..=ranges.eta_max);
        let xi = rng.gen_range(-ranges.eta_max..=ranges.eta_max);
        if eta == xi {
            continue;
        }
        let num = (m_iota(t, k, eta, iota_value) * bracket(k, eta).powi(s as i32)
            - m_iota(t, k, xi, iota_value) * bracket(k, xi).powi(s as i32))
        .abs()
            * k.abs();
        let d = eta - xi;
        let den = d.abs() * ((1.0 + d * d).powf(s as f64 / 2.0) + bracket(k, xi).powi(s as i32));
        used += 1;
        max_ratio = max_ratio.max(num / den);
    }
    CommutatorEstimate { s, samples_used: used, max_ratio }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IOTAS: [f64; 3] = [1.0, 0.1, 0.01];

    #[test]
    fn w_values_at_reference_points() {
        // resonance t = eta/k gives pi
        for &i in &IOTAS {
            assert!((w_iota(2.0, 1.0, 2.0, i) - PI).abs() < 1e-15);
            assert!((w_cal(2.0, 1.0, 2.0) - PI).abs() < 1e-15);
        }
        // k = 0 gives pi for both factors
        assert_eq!(w_iota(3.0, 0.0, 1.0, 0.5), PI);
        assert_eq!(w_cal(3.0, 0.0, 1.0), PI);
        // t -> +inf with k = 1 approaches pi/2
        assert!((w_iota(1e12, 1.0, 0.0, 1.0) - PI / 2.0).abs() < 1e-10);
        // Wcal stays inside [pi/2, 3pi/2]
        for t in [0.0, 1.0, 57.0] {
            for eta in [-100.0, 0.0, 3.5] {
                for k in [-3.0, 1.0, 8.0] {
                    let w = w_cal(t, k, eta);
                    assert!((PI / 2.0..=1.5 * PI).contains(&w));
                }
            }
        }
    }

    #[test]
    fn band_indicator_is_closed_interval() {
        // |k| = iota^{-1/2} is inside the band, the next integer is not.
        let iota = 0.01; // band edge at |k| = 10
        let t = 5.0;
        assert!((w_iota(t, 10.0, 0.0, iota) - PI).abs() > 1e-3);
        assert_eq!(w_iota(t, 11.0, 0.0, iota), PI);
    }

    #[test]
    fn m_at_zero_mode_and_a_weight() {
        let spec = MultiplierSpec::new(Iota::Nu, 0.01, 0.1, DELTA_MAX, 3).unwrap();
        // A(t, k=0, eta) = pi^2 <eta>^s
        let eta: f64 = 2.0;
        let expect = PI * PI * (1.0 + eta * eta).powf(1.5);
        assert!((a_iota(7.0, 0.0, eta, &spec) - expect).abs() < 1e-12 * expect);
        // s = 0, t = 0 reduces to M
        let spec0 = MultiplierSpec::new(Iota::Kappa, 0.01, 0.1, DELTA_MAX, 0).unwrap();
        let (k, eta) = (3.0, -1.5);
        assert!((a_iota(0.0, k, eta, &spec0) - m_iota(0.0, k, eta, 0.01)).abs() < 1e-14);
    }

    #[test]
    fn a_kappa_a_nu_comparable() {
        let kappa = 0.01;
        let nu = 0.5;
        let sk = MultiplierSpec::new(Iota::Kappa, kappa, nu, DELTA_MAX, 2).unwrap();
        let sn = MultiplierSpec::new(Iota::Nu, kappa, nu, DELTA_MAX, 2).unwrap();
        let bound = 16.0 * PI.powi(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let t = rng.gen_range(0.0..100.0);
            let k = rng.gen_range(-40i64..=40) as f64;
            let eta = rng.gen_range(-100.0..100.0);
            let ratio = a_iota(t, k, eta, &sk) / a_iota(t, k, eta, &sn);
            assert!(ratio >= 1.0 / bound && ratio <= bound, "ratio {ratio}");
        }
    }

    // Central differencing M (size ~pi^2) at step 1e-6 carries a round-off
    // floor of eps*|M|/(2h) ~ 2e-9 absolute; the 2e-8 allowance below is that
    // oracle noise, not implementation slack.
    pub(crate) const FD_STEP: f64 = 1e-6;
    pub(crate) const FD_NOISE: f64 = 2e-8;

    #[test]
    fn dt_m_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let iota = IOTAS[rng.gen_range(0..3)];
            let t = rng.gen_range(FD_STEP..100.0);
            let mag = rng.gen_range(1..=64);
            let k = if rng.gen_bool(0.5) { mag as f64 } else { -(mag as f64) };
            let eta = rng.gen_range(-256.0..256.0);
            let exact = dt_m_iota(t, k, eta, iota);
            let fd = (m_iota(t + FD_STEP, k, eta, iota) - m_iota(t - FD_STEP, k, eta, iota))
                / (2.0 * FD_STEP);
            let tol = 1e-6 * exact.abs().max(fd.abs()) + FD_NOISE;
            assert!(
                (exact - fd).abs() <= tol,
                "t={t} k={k} eta={eta} iota={iota}: {exact} vs {fd}"
            );
        }
    }

    #[test]
    fn deta_m_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let iota = IOTAS[rng.gen_range(0..3)];
            let t = rng.gen_range(0.0..100.0);
            let mag = rng.gen_range(1..=64);
            let k = if rng.gen_bool(0.5) { mag as f64 } else { -(mag as f64) };
            let eta = rng.gen_range(-256.0..256.0);
            let exact = deta_m_iota(t, k, eta, iota);
            let fd = (m_iota(t, k, eta + FD_STEP, iota) - m_iota(t, k, eta - FD_STEP, iota))
                / (2.0 * FD_STEP);
            let tol = 1e-6 * exact.abs().max(fd.abs()) + FD_NOISE;
            assert!(
                (exact - fd).abs() <= tol,
                "t={t} k={k} eta={eta} iota={iota}: {exact} vs {fd}"
            );
        }
    }

    #[test]
    fn dt_m_zero_at_k_zero_and_negative_otherwise() {
        assert_eq!(dt_m_iota(3.0, 0.0, 5.0, 0.1), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let t = rng.gen_range(0.0..50.0);
            let k = rng.gen_range(1..=32) as f64;
            let eta = rng.gen_range(-64.0..64.0);
            assert!(dt_m_iota(t, k, eta, 0.1) < 0.0);
        }
    }

    #[test]
    fn suite_small_run_no_violations() {
        for &iota in &IOTAS {
            let report = verify_lemma_suite(20_000, LemmaRanges::default(), iota, 42);
            assert_eq!(report.total_violations(), 0, "iota={iota}: {report:?}");
        }
    }

    #[test]
    fn ed_constant_at_reference_point() {
        // k=1, eta=0, t=0, iota=1: LHS = 1/(3 pi), RHS = 2/pi + 1.
        let lhs = 1.0 / (3.0 * PI);
        assert!((lhs - 0.106_103_295_394_596_89).abs() < 1e-15);
        let rhs = -dt_m_iota(0.0, 1.0, 0.0, 1.0) / m_iota(0.0, 1.0, 0.0, 1.0) + 1.0;
        assert!((rhs - (2.0 / PI + 1.0)).abs() < 1e-12);
        assert!(lhs <= rhs);
    }

    #[test]
    fn off_band_time_decay_comes_from_w_cal_only() {
        // beyond the band W_iota is constant pi, so dt M = pi * dt Wcal
        let iota = 0.01;
        let (t, k, eta) = (3.0, 20.0, 5.0);
        let expect = PI * dt_w_cal(t, k, eta);
        assert!((dt_m_iota(t, k, eta, iota) - expect).abs() < 1e-14);
    }

    #[test]
    fn commutator_estimate_saturates() {
        for &s in &[2u32, 5] {
            let base = LemmaRanges { t_max: 100.0, k_max: 32, eta_max: 64.0 };
            let double = LemmaRanges { t_max: 100.0, k_max: 32, eta_max: 128.0 };
            let a = commutator_constant(200_000, s, base, 0.1, 7);
            let b = commutator_constant(200_000, s, double, 0.1, 7);
            let ratio = b.max_ratio / a.max_ratio;
            assert!(
                ratio < 2.0 && ratio > 0.5,
                "s={s}: {} -> {} (ratio {ratio})",
                a.max_ratio,
                b.max_ratio
            );
        }
    }

    #[test]
    fn commutator_s0_bounded_by_mean_value() {
        // at s = 0 the numerator reduces to |M(eta) - M(xi)| |k| and the
        // denominator to 2 |eta - xi|; the eta-derivative bound plus the mean
        // value theorem cap the ratio at 4 pi / 2.
        let est = commutator_constant(100_000, 0, LemmaRanges::default(), 0.1, 3);
        assert!(est.max_ratio <= 2.0 * PI * (1.0 + 1e-9), "{}", est.max_ratio);
    }

    #[test]
    fn spec_validation() {
        assert!(MultiplierSpec::new(Iota::Kappa, 0.1, 0.01, DELTA_MAX, 2).is_err());
        assert!(MultiplierSpec::new(Iota::Kappa, 0.0, 0.5, DELTA_MAX, 2).is_err());
        assert!(MultiplierSpec::new(Iota::Kappa, 0.1, 0.5, 0.1, 2).is_err());
        assert!(MultiplierSpec::new(Iota::Kappa, 0.1, 0.5, DELTA_MAX, 2).is_ok());
    }
}
