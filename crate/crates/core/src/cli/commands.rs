use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::bell_basis::{bell_ket, bell_projector, correlation_probability, BellOutcome};
use crate::expsim::{causal_filter, run_experiment, EventRecord, ExperimentSummary, OutcomeCounts, PolarizedTarget};
use crate::rng;
use crate::scattering::{
    bell_coefficients, build_f_bell, build_f_invariant, conjugate, f_at_90_from_table, AmplitudeTable, ScatterFrame,
};
use crate::spin_core::{measure_projection, rotation, spatial_rotation, UnitVector3};
use crate::teleport::{run_batch, UnknownState};

use super::config::{unit, RunConfig};
use super::output::{ensure_dir, fmt_f64, write_csv, write_json};
use super::{amplitude_file, CliError};

/// Minimum fidelity `cmd_teleport` accepts.
pub const TELEPORT_FIDELITY_FLOOR: f64 = 1.0 - 1e-9;

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    /// One-line human summary.
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub outcome: BellOutcome,
    pub count: u64,
    pub min_fidelity: Option<f64>,
    pub mean_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportReport {
    pub seed: u64,
    pub trials: u64,
    pub input_bloch: [f64; 3],
    pub ancilla: BellOutcome,
    pub filter: Option<BellOutcome>,
    pub completed: u64,
    pub discarded: u64,
    pub histogram: OutcomeCounts,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    pub channels: Vec<ChannelReport>,
    pub fidelity_floor: f64,
    pub passed: bool,
}

/// Runs the protocol batch and writes `teleport.json`.
pub fn cmd_teleport(cfg: &RunConfig, out: &Path) -> Result<(TeleportReport, CommandOutcome), CliError> {
    let t = &cfg.teleport;
    if t.trials == 0 {
        return Err(CliError::Config("teleport.trials must be at least 1".into()));
    }
    let phi = match t.input_bloch {
        Some(v) => UnknownState::from_bloch(&unit(v, "teleport.input_bloch")?),
        None => UnknownState::random(&mut rng::stream(cfg.seed, rng::DOMAIN_TELEPORT, u64::MAX)),
    };
    let filter = t.filter.map(bell_projector);
    let batch = run_batch(&phi, t.ancilla, filter.as_ref(), t.trials, cfg.seed)?;
    let h = batch.histogram;
    let channels = BellOutcome::ALL
        .iter()
        .map(|&o| ChannelReport {
            outcome: o,
            count: h[o.index()],
            min_fidelity: batch.channel_min_fidelity[o.index()],
            mean_fidelity: batch.channel_mean_fidelity[o.index()],
        })
        .collect();
    let passed = batch.completed > 0 && batch.min_fidelity >= TELEPORT_FIDELITY_FLOOR;
    let report = TeleportReport {
        seed: cfg.seed,
        trials: batch.trials,
        input_bloch: phi.bloch_vector(),
        ancilla: t.ancilla,
        filter: t.filter,
        completed: batch.completed,
        discarded: batch.discarded,
        histogram: OutcomeCounts {
            psi_minus: h[BellOutcome::PsiMinus.index()],
            psi_plus: h[BellOutcome::PsiPlus.index()],
            phi_minus: h[BellOutcome::PhiMinus.index()],
            phi_plus: h[BellOutcome::PhiPlus.index()],
        },
        mean_fidelity: batch.mean_fidelity,
        min_fidelity: batch.min_fidelity,
        channels,
        fidelity_floor: TELEPORT_FIDELITY_FLOOR,
        passed,
    };
    ensure_dir(out)?;
    let file = write_json(out, "teleport.json", &report)?;
    let message = format!(
        "teleport: {} trials, {} completed, min fidelity {}",
        report.trials,
        report.completed,
        fmt_f64(report.min_fidelity)
    );
    Ok((report, CommandOutcome { passed, files: vec![file], message }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterCheckReport {
    pub amplitude_file: String,
    pub rows: usize,
    pub identical_nucleons: bool,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Tolerance for the invariant-vs-Bell comparison, per unit amplitude scale.
pub const FORM_TOL: f64 = 1e-12;
/// Tolerance for frame covariance and the identical-nucleon rules.
pub const SYMMETRY_CHECK_TOL: f64 = 1e-9;

fn amplitude_scale(table: &AmplitudeTable) -> f64 {
    table
        .rows()
        .iter()
        .flat_map(|(_, a)| a.as_array())
        .map(|c| c.norm())
        .fold(1.0, f64::max)
}

/// Checks a parsed table; no files are written.
pub fn scatter_check_table(table: &AmplitudeTable, label: &str) -> Result<ScatterCheckReport, CliError> {
    let scale = amplitude_scale(table);
    let mut checks = Vec::new();

    let mut form = 0.0f64;
    for (_, amps) in table.rows() {
        let inv = build_f_invariant(amps, &ScatterFrame::CANONICAL)?;
        form = form.max(inv.max_abs_diff(&build_f_bell(&bell_coefficients(amps))));
    }
    checks.push(CheckResult {
        name: "form_equivalence",
        passed: form < FORM_TOL * scale,
        max_residual: form,
        tolerance: FORM_TOL * scale,
        details: vec![],
    });

    let axis = UnitVector3::normalize(1.0, 2.0, 3.0)?;
    let angle = 0.7;
    let frame = ScatterFrame::CANONICAL.rotated(&spatial_rotation(&axis, angle))?;
    let r = rotation(&axis, angle)?;
    let rr = r.kron(&r);
    let mut cov = 0.0f64;
    for (_, amps) in table.rows() {
        let rotated = build_f_invariant(amps, &frame)?;
        let conj = conjugate(&build_f_invariant(amps, &ScatterFrame::CANONICAL)?, &rr);
        cov = cov.max(rotated.max_abs_diff(&conj));
    }
    checks.push(CheckResult {
        name: "frame_covariance",
        passed: cov < SYMMETRY_CHECK_TOL * scale,
        max_residual: cov,
        tolerance: SYMMETRY_CHECK_TOL * scale,
        details: vec![],
    });

    if table.identical_nucleons() {
        let sym = table.check_identical_nucleons();
        checks.push(CheckResult {
            name: "identical_nucleon_symmetry",
            passed: sym.passed(),
            max_residual: sym.max_residual.max(sym.max_f),
            tolerance: SYMMETRY_CHECK_TOL,
            details: sym.violations.clone(),
        });
        let full = build_f_bell(&bell_coefficients(&table.at(FRAC_PI_2)));
        let (passed, residual, details) = match f_at_90_from_table(table) {
            Ok(reduced) => {
                let d = reduced.max_abs_diff(&full);
                (d < SYMMETRY_CHECK_TOL, d, vec![])
            }
            Err(e) => (false, f64::NAN, vec![e.to_string()]),
        };
        checks.push(CheckResult {
            name: "reduced_form_at_90",
            passed,
            max_residual: residual,
            tolerance: SYMMETRY_CHECK_TOL,
            details,
        });
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(ScatterCheckReport {
        amplitude_file: label.to_string(),
        rows: table.rows().len(),
        identical_nucleons: table.identical_nucleons(),
        checks,
        passed,
    })
}

/// Parses an amplitude file, checks it and writes `scatter_check.json`.
pub fn cmd_scatter_check(amplitude_file: &Path, out: &Path) -> Result<(ScatterCheckReport, CommandOutcome), CliError> {
    let text = std::fs::read_to_string(amplitude_file)
        .map_err(|source| CliError::Io { path: amplitude_file.to_path_buf(), source })?;
    let table = amplitude_file::parse(&text).map_err(|e| CliError::AmplitudeFile {
        path: amplitude_file.to_path_buf(),
        line: e.line,
        message: e.message,
    })?;
    let report = scatter_check_table(&table, &amplitude_file.display().to_string())?;
    ensure_dir(out)?;
    let file = write_json(out, "scatter_check.json", &report)?;
    let mut message = format!("scatter-check: {} rows", report.rows);
    for c in &report.checks {
        message.push_str(&format!(", {} {}", c.name, if c.passed { "ok" } else { "FAILED" }));
    }
    for d in report.checks.iter().flat_map(|c| &c.details) {
        message.push_str(&format!("\n  {d}"));
    }
    Ok((report.clone(), CommandOutcome { passed: report.passed, files: vec![file], message }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellscanRow {
    pub theta: f64,
    pub analytic: f64,
    pub mc_frequency: f64,
    pub mc_sigma: f64,
}

impl BellscanRow {
    pub fn within(&self, k_sigma: f64) -> bool {
        (self.mc_frequency - self.analytic).abs() <= k_sigma * self.mc_sigma
    }
}

/// Closed-form anticorrelation law along a common axis at polar angle θ
/// and azimuth φ, where one is known.
fn closed_form(state: BellOutcome, theta: f64, phi: f64) -> Option<f64> {
    match state {
        BellOutcome::PsiMinus => Some(1.0),
        BellOutcome::PsiPlus if phi == 0.0 => Some(theta.cos().powi(2)),
        _ => None,
    }
}

/// Tolerance between the computed and closed-form analytic column.
pub const BELLSCAN_LAW_TOL: f64 = 1e-12;

/// Computes the scan rows. Row `i` samples from
/// `rng::stream(seed, DOMAIN_BELLSCAN, i)`.
pub fn bellscan_rows(cfg: &RunConfig) -> Result<Vec<BellscanRow>, CliError> {
    let b = &cfg.bellscan;
    if b.grid_points < 2 {
        return Err(CliError::Config("bellscan.grid_points must be at least 2".into()));
    }
    if !(0.0..=PI).contains(&b.theta_max_rad) {
        return Err(CliError::Config("bellscan.theta_max_rad must lie in [0, π]".into()));
    }
    if b.samples_per_point == 0 {
        return Err(CliError::Config("bellscan.samples_per_point must be at least 1".into()));
    }
    let ket = bell_ket(b.state);
    let n = b.grid_points;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let theta = b.theta_max_rad * i as f64 / (n - 1) as f64;
            let axis = UnitVector3::from_polar(theta, b.plane_azimuth_rad);
            let analytic = correlation_probability(&ket, &axis, &axis)?;
            let mut rng = rng::stream(cfg.seed, rng::DOMAIN_BELLSCAN, i as u64);
            let mut anti = 0u64;
            for _ in 0..b.samples_per_point {
                let first = measure_projection(&ket, 0, &axis, &mut rng)?;
                let second = measure_projection(&first.collapsed, 1, &axis, &mut rng)?;
                anti += (first.value != second.value) as u64;
            }
            let samples = b.samples_per_point as f64;
            Ok(BellscanRow {
                theta,
                analytic,
                mc_frequency: anti as f64 / samples,
                mc_sigma: (analytic * (1.0 - analytic) / samples).sqrt(),
            })
        })
        .collect::<crate::Result<Vec<_>>>()
        .map_err(CliError::from)
}

/// Writes `bellscan.csv`. Fails only if the analytic column breaks its
/// closed-form law; Monte Carlo rows outside 4σ are reported in the message.
pub fn cmd_bellscan(cfg: &RunConfig, out: &Path) -> Result<(Vec<BellscanRow>, CommandOutcome), CliError> {
    let rows = bellscan_rows(cfg)?;
    let b = &cfg.bellscan;
    let law_ok = rows.iter().all(|r| match closed_form(b.state, r.theta, b.plane_azimuth_rad) {
        Some(p) => (r.analytic - p).abs() < BELLSCAN_LAW_TOL,
        None => true,
    });
    let outside = rows.iter().filter(|r| !r.within(4.0)).count();
    ensure_dir(out)?;
    let file = write_csv(
        out,
        "bellscan.csv",
        &["theta_radians", "analytic_probability", "mc_frequency", "mc_sigma"],
        rows.iter().map(|r| vec![fmt_f64(r.theta), fmt_f64(r.analytic), fmt_f64(r.mc_frequency), fmt_f64(r.mc_sigma)]),
    )?;
    let message = format!(
        "bellscan: {} rows for {}, {} samples each, {} outside 4 sigma{}",
        rows.len(),
        b.state,
        b.samples_per_point,
        outside,
        if law_ok { "" } else { ", analytic law VIOLATED" }
    );
    Ok((rows, CommandOutcome { passed: law_ok, files: vec![file], message }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub events: u64,
    pub target_bloch: [f64; 3],
    pub filter: BellOutcome,
    #[serde(flatten)]
    pub summary: ExperimentSummary,
    pub warning: Option<String>,
    pub invariant_violations: Vec<String>,
    pub passed: bool,
}

pub const EVENTS_HEADER: [&str; 7] = ["event_id", "t_f1_s", "t_f2_s", "outcome", "side", "causal", "accepted"];

fn event_row(e: &EventRecord) -> Vec<String> {
    let t = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    vec![
        e.event_id.to_string(),
        t(e.t_f1),
        t(e.t_f2),
        e.outcome.map(|o| o.label().to_string()).unwrap_or_default(),
        e.side.map(|s| s.label().to_string()).unwrap_or_default(),
        e.causal_separated.to_string(),
        e.accepted.to_string(),
    ]
}

fn timing_violations(events: &[EventRecord]) -> usize {
    events
        .iter()
        .filter(|e| {
            !(e.t_start >= 0.0 && e.t_ph2 >= e.t_start && e.t_k >= e.t_start)
                || e.t_f1.is_some_and(|t| !t.is_finite())
                || e.t_f2.is_some_and(|t| !t.is_finite())
        })
        .count()
}

/// Runs the event simulation and writes `events.csv` and `summary.json`.
pub fn cmd_experiment(cfg: &RunConfig, out: &Path) -> Result<(ExperimentReport, CommandOutcome), CliError> {
    let x = &cfg.experiment;
    if x.events == 0 {
        return Err(CliError::Config("experiment.events must be at least 1".into()));
    }
    let setup = x.setup()?;
    let target = PolarizedTarget::from_bloch(&unit(x.target_bloch, "experiment.target_bloch")?);
    let run = run_experiment(&setup, &target, &bell_projector(x.filter), x.events, cfg.seed)?;

    let mut violations = Vec::new();
    let causal = causal_filter(&run.events, &setup.geometry).len() as u64;
    if causal != run.summary.causal.causal_events {
        violations.push(format!(
            "causal count {} disagrees with causal_filter ({causal})",
            run.summary.causal.causal_events
        ));
    }
    let bad_timing = timing_violations(&run.events);
    if bad_timing > 0 {
        violations.push(format!("{bad_timing} events with inconsistent leg times"));
    }
    let warning = run.summary.degenerate.then(|| "no events passed the analysis selection".to_string());
    let passed = violations.is_empty();
    let report = ExperimentReport {
        seed: cfg.seed,
        events: x.events,
        target_bloch: target.state.bloch_vector(),
        filter: x.filter,
        summary: run.summary,
        warning,
        invariant_violations: violations,
        passed,
    };
    ensure_dir(out)?;
    let csv = write_csv(out, "events.csv", &EVENTS_HEADER, run.events.iter().map(event_row))?;
    let json = write_json(out, "summary.json", &report)?;
    let c = &report.summary.counts;
    let mut message = format!(
        "experiment: {} events, {} accepted, {} selected",
        c.generated, c.accepted, c.selected
    );
    if let Some(r) = &report.summary.reconstruction {
        let p = r.polarization;
        message.push_str(&format!(", polarization ({:.4}, {:.4}, {:.4})", p[0], p[1], p[2]));
    }
    if let Some(w) = &report.warning {
        message.push_str(&format!(", warning: {w}"));
    }
    Ok((report, CommandOutcome { passed, files: vec![csv, json], message }))
}
