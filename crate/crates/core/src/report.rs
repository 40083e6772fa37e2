//! Output serialization: the CSV time series (stable column order) and the
//! JSON run summary.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;
use crate::dynamics::{BlowupVerdict, PhysParams, RateFit, RunReport, Switches};
use crate::error::Result;

/// Schema version stamped into CSV headers and JSON summaries.
pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the time series, one row per output time.
pub const CSV_COLUMNS: &[&str] = &[
    "t",
    "mass",
    "free_energy_f",
    "energy_e",
    "second_moment",
    "min_n",
    "sup_n",
    "norm_a_kappa_n_neq",
    "norm_a_nu_omega_neq",
    "norm_n0_hs",
    "norm_omega0_hs",
    "bs_int_n_mult",
    "bs_int_n_lap",
    "bs_int_omega_mult",
    "bs_int_omega_lap",
    "bs_int_omega0",
    "boundary_mass_fraction",
    "clamped_mass_fraction",
    "tail_fraction",
    "mode_amp_k1",
    "mode_amp_k2",
    "mode_amp_k3",
];

pub fn write_csv_header<W: Write>(w: &mut W) -> Result<()> {
    writeln!(w, "# schema_version={SCHEMA_VERSION}")?;
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    Ok(())
}

/// Floats are written in shortest round-trip form, so identical numerical
/// histories produce identical bytes.
pub fn write_csv_row<W: Write>(w: &mut W, r: &DiagnosticsRecord) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.t,
        r.mass,
        r.free_energy_f,
        r.energy_e,
        r.second_moment,
        r.min_n,
        r.sup_n,
        r.norm_a_kappa_n_neq,
        r.norm_a_nu_omega_neq,
        r.norm_n0_hs,
        r.norm_omega0_hs,
        r.bs_int_n_mult,
        r.bs_int_n_lap,
        r.bs_int_omega_mult,
        r.bs_int_omega_lap,
        r.bs_int_omega0,
        r.boundary_mass_fraction,
        r.clamped_mass_fraction,
        r.tail_fraction,
        r.mode_amp[0],
        r.mode_amp[1],
        r.mode_amp[2],
    )?;
    Ok(())
}

/// JSON summary of a finished run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub verdict: BlowupVerdict,
    pub params: PhysParams,
    pub switches: Switches,
    pub secular_bound: f64,
    pub positivity_violated: bool,
    pub clamp_flagged: bool,
    pub halted: bool,
    pub fitted_rates: Vec<RateFit>,
    /// The four stability-functional left-hand sides at the final output.
    pub hypothesis_lhs_final: Option<[f64; 4]>,
    pub mass_initial: Option<f64>,
    pub mass_final: Option<f64>,
    pub outputs: usize,
}

impl RunSummary {
    pub fn from_report(report: &RunReport, params: PhysParams, switches: Switches) -> RunSummary {
        let first = report.records.first();
        let last = report.records.last();
        RunSummary {
            schema_version: SCHEMA_VERSION,
            verdict: report.verdict.clone(),
            params,
            switches,
            secular_bound: report.secular_bound,
            positivity_violated: report.positivity_violated,
            clamp_flagged: report.clamp_flagged,
            halted: report.halted,
            fitted_rates: report.fitted_rates.clone(),
            hypothesis_lhs_final: last.map(|r| r.hypothesis_lhs()),
            mass_initial: first.map(|r| r.mass),
            mass_final: last.map(|r| r.mass),
            outputs: report.records.len(),
        }
    }
}
