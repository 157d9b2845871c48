//! Monte Carlo model of the two-target proton teleportation experiment.
//!
//! A beam proton hits the liquid-hydrogen target and produces a singlet pair
//! at 90° c.m. One proton (p₃) flies to the polarized target, where it
//! scatters on a target proton (p₁) and is registered in detector F-1; the
//! scattering plus detection acts as a Bell filter on (p₁, p₃). The partner
//! (p₂) flies to the carbon analyzer at point K and its left/right
//! scattering is registered in F-2. The data-processing center pairs F-1
//! and F-2 records by time and keeps the causally separated ones.
//!
//! Kinematics are timing only: straight legs at the single speed implied by
//! the beam kinetic energy.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell_basis::BellOutcome;
use crate::error::{Error, Result};
use crate::rng;
use crate::spin_core::{SpinOperator, SpinState, UnitVector3};
use crate::teleport::{compose_three, make_epr, measure_with_ancilla, UnknownState};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Proton rest energy in MeV.
pub const PROTON_MASS_MEV: f64 = 938.272;

/// Proton speed (m/s) for a kinetic energy in MeV.
pub fn proton_speed(kinetic_mev: f64) -> f64 {
    let ratio = PROTON_MASS_MEV / (PROTON_MASS_MEV + kinetic_mev);
    SPEED_OF_LIGHT * (1.0 - ratio * ratio).sqrt()
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Detector and target positions (m), beam energy and coincidence window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub lh2_target: [f64; 3],
    /// x₀, the polarized target.
    pub ph2_target: [f64; 3],
    /// x₁, the carbon analyzer at point K.
    pub analyzer: [f64; 3],
    pub f1: [f64; 3],
    pub f2: [f64; 3],
    pub beam_energy_mev: f64,
    pub coincidence_window_s: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            lh2_target: [0.0, 0.0, 0.0],
            ph2_target: [-10.0, 0.0, 0.0],
            analyzer: [10.0, 0.0, 0.0],
            f1: [-10.0, 1.0, 0.0],
            f2: [10.0, 1.0, 0.0],
            beam_energy_mev: 35.0,
            coincidence_window_s: 10e-9,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        let points = [
            ("lh2_target", &self.lh2_target),
            ("ph2_target", &self.ph2_target),
            ("analyzer", &self.analyzer),
            ("f1", &self.f1),
            ("f2", &self.f2),
        ];
        for (name, p) in &points {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} has a non-finite coordinate")));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if distance(points[i].1, points[j].1) <= 0.0 {
                    return Err(Error::InvalidConfig(format!("{} and {} coincide", points[i].0, points[j].0)));
                }
            }
        }
        if !(self.beam_energy_mev > 0.0 && self.beam_energy_mev < 1000.0) {
            return Err(Error::InvalidConfig(format!("beam energy {} MeV outside (0, 1000)", self.beam_energy_mev)));
        }
        if !(self.coincidence_window_s > 0.0) {
            return Err(Error::InvalidConfig("coincidence window must be positive".into()));
        }
        Ok(())
    }

    pub fn speed(&self) -> f64 {
        proton_speed(self.beam_energy_mev)
    }

    /// `|x_F1 − x_F2|`.
    pub fn detector_separation(&self) -> f64 {
        distance(&self.f1, &self.f2)
    }
}

/// Detector response knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorModel {
    pub efficiency_f1: f64,
    pub efficiency_f2: f64,
    /// Standard deviation of Gaussian timestamp jitter at F-1 and F-2.
    pub jitter_s: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self { efficiency_f1: 1.0, efficiency_f2: 1.0, jitter_s: 0.0 }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("efficiency_f1", self.efficiency_f1), ("efficiency_f2", self.efficiency_f2)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidConfig(format!("{name} = {e} outside [0, 1]")));
            }
        }
        if !(self.jitter_s >= 0.0 && self.jitter_s.is_finite()) {
            return Err(Error::InvalidConfig("jitter_s must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Carbon polarimeter response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzerModel {
    pub analyzing_power: f64,
}

impl Default for AnalyzerModel {
    fn default() -> Self {
        Self { analyzing_power: 0.5 }
    }
}

impl AnalyzerModel {
    pub fn new(analyzing_power: f64) -> Result<Self> {
        let m = Self { analyzing_power };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.analyzing_power.abs() <= 1.0) {
            return Err(Error::InvalidConfig(format!("analyzing power {} outside [-1, 1]", self.analyzing_power)));
        }
        Ok(())
    }
}

/// The polarized target whose proton state is teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedTarget {
    pub state: UnknownState,
}

impl PolarizedTarget {
    pub fn from_bloch(n: &UnitVector3) -> Self {
        Self { state: UnknownState::from_bloch(n) }
    }
}

/// Everything besides target and filter that defines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSetup {
    pub geometry: GeometryConfig,
    pub detectors: DetectorModel,
    pub analyzer: AnalyzerModel,
    /// Analyzer normals, cycled by event id.
    pub analyzer_normals: Vec<UnitVector3>,
    /// Beam-bunch spacing: event `i` starts at `i * event_spacing_s`.
    pub event_spacing_s: f64,
    /// Fraction of polarized-target scatterings that meet the singlet
    /// condition; no physical value is claimed.
    pub singlet_acceptance: f64,
    /// Bell outcome the summary conditions on.
    pub condition_on: BellOutcome,
    /// Restrict the summary to causally separated events.
    pub require_causal: bool,
}

impl Default for ExperimentSetup {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            detectors: DetectorModel::default(),
            analyzer: AnalyzerModel::default(),
            analyzer_normals: vec![UnitVector3::X, UnitVector3::Y, UnitVector3::Z],
            event_spacing_s: 1e-6,
            singlet_acceptance: 1.0,
            condition_on: BellOutcome::PsiMinus,
            require_causal: false,
        }
    }
}

impl ExperimentSetup {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.detectors.validate()?;
        self.analyzer.validate()?;
        if self.analyzer_normals.is_empty() {
            return Err(Error::InvalidConfig("at least one analyzer normal is required".into()));
        }
        if !(self.event_spacing_s > 0.0 && self.event_spacing_s.is_finite()) {
            return Err(Error::InvalidConfig("event_spacing_s must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.singlet_acceptance) {
            return Err(Error::InvalidConfig("singlet_acceptance outside [0, 1]".into()));
        }
        Ok(())
    }
}

/// Which way the proton scattered in the analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// One simulated beam proton.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub event_id: u64,
    pub t_start: f64,
    /// Arrival of p₃ at the polarized target.
    pub t_ph2: f64,
    /// Arrival of p₂ at the analyzer.
    pub t_k: f64,
    pub t_f1: Option<f64>,
    pub t_f2: Option<f64>,
    /// Bell-filter result; `None` for a no-event at the polarized target.
    pub outcome: Option<BellOutcome>,
    pub side: Option<Side>,
    pub normal_index: usize,
    pub causal_separated: bool,
    /// F-1 and F-2 records of this event were paired with each other.
    pub accepted: bool,
}

/// `Δx > c·|Δt|`, with no tolerance.
pub fn is_causally_separated(dx: f64, dt: f64) -> bool {
    dx > SPEED_OF_LIGHT * dt.abs()
}

fn causal_flag(geometry: &GeometryConfig, t_f1: Option<f64>, t_f2: Option<f64>) -> bool {
    match (t_f1, t_f2) {
        (Some(a), Some(b)) => is_causally_separated(geometry.detector_separation(), a - b),
        _ => false,
    }
}

/// Samples the analyzer side with `P(Left) = (1 + A·p_n)/2`, `p_n = 2⟨S·n⟩`.
pub fn analyzer_scatter<R: RngCore + ?Sized>(
    spin: &SpinState,
    model: &AnalyzerModel,
    normal: &UnitVector3,
    rng: &mut R,
) -> Result<Side> {
    let bloch = spin.bloch_vector()?;
    let p_n: f64 = bloch.iter().zip(normal.to_array()).map(|(a, b)| a * b).sum();
    Ok(side_from(left_probability(model, p_n), rng))
}

/// `(1 + A·p_n)/2`.
pub fn left_probability(model: &AnalyzerModel, p_n: f64) -> f64 {
    ((1.0 + model.analyzing_power * p_n) / 2.0).clamp(0.0, 1.0)
}

fn side_from<R: RngCore + ?Sized>(p_left: f64, rng: &mut R) -> Side {
    if rng::bernoulli(rng, p_left) {
        Side::Left
    } else {
        Side::Right
    }
}

/// Simulates one beam proton through both legs of the experiment.
///
/// Draw order on `rng`: singlet acceptance, Bell outcome, analyzer side,
/// F-1 efficiency, F-2 efficiency, F-1 jitter, F-2 jitter.
pub fn generate_event<R: RngCore + ?Sized>(
    setup: &ExperimentSetup,
    target: &PolarizedTarget,
    filter: &SpinOperator,
    event_id: u64,
    rng: &mut R,
) -> Result<EventRecord> {
    let g = &setup.geometry;
    let v = g.speed();
    let t_start = event_id as f64 * setup.event_spacing_s;
    let t_ph2 = t_start + distance(&g.lh2_target, &g.ph2_target) / v;
    let t_k = t_start + distance(&g.lh2_target, &g.analyzer) / v;
    let f1_raw = t_ph2 + distance(&g.ph2_target, &g.f1) / v;
    let f2_raw = t_k + distance(&g.analyzer, &g.f2) / v;

    let singlet_ok = rng::bernoulli(rng, setup.singlet_acceptance);
    let mut traveler: Option<(BellOutcome, SpinState)> = None;
    if singlet_ok {
        let register = compose_three(&target.state, &make_epr(BellOutcome::PsiMinus))?;
        let applied = filter.embed(&[0, 2], 3)?.apply(&register)?;
        if !applied.is_null() {
            let m = measure_with_ancilla(&applied.into_state()?, BellOutcome::PsiMinus, rng)?;
            traveler = Some((m.message.outcome, m.receiver.state().clone()));
        }
    }
    if traveler.is_none() {
        // keep the draw count fixed
        rng::uniform(rng);
    }

    let normal_index = (event_id % setup.analyzer_normals.len() as u64) as usize;
    let normal = setup.analyzer_normals[normal_index];
    let side = match &traveler {
        Some((_, spin)) => analyzer_scatter(spin, &setup.analyzer, &normal, rng)?,
        // p₂ alone is unpolarized when nothing was selected at the target
        None => side_from(0.5, rng),
    };

    let f1_seen = rng::bernoulli(rng, setup.detectors.efficiency_f1) && traveler.is_some();
    let f2_seen = rng::bernoulli(rng, setup.detectors.efficiency_f2);
    let jitter = setup.detectors.jitter_s;
    let j1 = jitter * rng::standard_normal(rng);
    let j2 = jitter * rng::standard_normal(rng);
    let t_f1 = f1_seen.then_some(f1_raw + j1);
    let t_f2 = f2_seen.then_some(f2_raw + j2);

    Ok(EventRecord {
        event_id,
        t_start,
        t_ph2,
        t_k,
        t_f1,
        t_f2,
        outcome: traveler.map(|(o, _)| o),
        side: f2_seen.then_some(side),
        normal_index,
        causal_separated: causal_flag(g, t_f1, t_f2),
        accepted: false,
    })
}

/// Left/right counting asymmetry with its binomial error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymmetry {
    pub epsilon: f64,
    pub sigma: f64,
}

/// `ε = (N_L − N_R)/(N_L + N_R)`, `σ = sqrt((1 − ε²)/(N_L + N_R))`.
pub fn asymmetry(n_left: u64, n_right: u64) -> Result<Asymmetry> {
    let total = n_left + n_right;
    if total == 0 {
        return Err(Error::ZeroTotal);
    }
    let n = total as f64;
    let epsilon = (n_left as f64 - n_right as f64) / n;
    Ok(Asymmetry { epsilon, sigma: ((1.0 - epsilon * epsilon) / n).sqrt() })
}

/// A detector timestamp tagged with the event that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stamp {
    pub event_id: u64,
    pub time: f64,
}

/// Result of pairing two timestamp streams.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    /// `(index into F-1 stream, index into F-2 stream)`, sorted by F-1 index.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_f1: usize,
    pub unmatched_f2: usize,
}

fn check_sorted(stream: &[Stamp]) -> Result<()> {
    match stream.windows(2).position(|w| w[1].time < w[0].time) {
        Some(i) => Err(Error::Unsorted(i + 1)),
        None => Ok(()),
    }
}

/// Greedy nearest-in-time pairing.
///
/// All candidate pairs with `|t₁ − t₂| ≤ window` are ranked by `|t₁ − t₂|`,
/// ties broken by F-1 index then F-2 index, and accepted in that order when
/// neither record is taken yet.
pub fn coincidence_match(f1: &[Stamp], f2: &[Stamp], window: f64) -> Result<Matching> {
    check_sorted(f1)?;
    check_sorted(f2)?;
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in f1.iter().enumerate() {
        let start = f2.partition_point(|b| b.time < a.time - window);
        for (j, b) in f2.iter().enumerate().skip(start) {
            if b.time > a.time + window {
                break;
            }
            candidates.push(((a.time - b.time).abs(), i, j));
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used1 = vec![false; f1.len()];
    let mut used2 = vec![false; f2.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used1[i] && !used2[j] {
            used1[i] = true;
            used2[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    Ok(Matching {
        unmatched_f1: f1.len() - pairs.len(),
        unmatched_f2: f2.len() - pairs.len(),
        pairs,
    })
}

/// Keeps the events whose detector times satisfy `|x_F1 − x_F2| > c·|Δt|`.
pub fn causal_filter(events: &[EventRecord], geometry: &GeometryConfig) -> Vec<EventRecord> {
    events
        .iter()
        .filter(|e| causal_flag(geometry, e.t_f1, e.t_f2))
        .cloned()
        .collect()
}

/// Per-outcome counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct OutcomeCounts {
    pub psi_minus: u64,
    pub psi_plus: u64,
    pub phi_minus: u64,
    pub phi_plus: u64,
}

impl OutcomeCounts {
    fn add(&mut self, o: BellOutcome) {
        match o {
            BellOutcome::PsiMinus => self.psi_minus += 1,
            BellOutcome::PsiPlus => self.psi_plus += 1,
            BellOutcome::PhiMinus => self.phi_minus += 1,
            BellOutcome::PhiPlus => self.phi_plus += 1,
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            psi_minus: self.psi_minus + o.psi_minus,
            psi_plus: self.psi_plus + o.psi_plus,
            phi_minus: self.phi_minus + o.phi_minus,
            phi_plus: self.phi_plus + o.phi_plus,
        }
    }

    pub fn total(&self) -> u64 {
        self.psi_minus + self.psi_plus + self.phi_minus + self.phi_plus
    }
}

/// Integer tallies over events; merging is associative and commutative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tally {
    pub accepted: u64,
    pub accepted_outcomes: OutcomeCounts,
    pub causal: u64,
    pub causal_accepted: u64,
    pub selected: u64,
    /// `(left, right)` per analyzer normal.
    pub sides: Vec<(u64, u64)>,
}

impl Tally {
    fn new(normals: usize) -> Self {
        Self { sides: vec![(0, 0); normals], ..Default::default() }
    }

    fn record(&mut self, e: &EventRecord, setup: &ExperimentSetup) {
        self.causal += e.causal_separated as u64;
        if !e.accepted {
            return;
        }
        self.accepted += 1;
        self.causal_accepted += e.causal_separated as u64;
        if let Some(o) = e.outcome {
            self.accepted_outcomes.add(o);
        }
        let selected = e.outcome == Some(setup.condition_on) && (!setup.require_causal || e.causal_separated);
        if let (true, Some(side)) = (selected, e.side) {
            self.selected += 1;
            let slot = &mut self.sides[e.normal_index];
            match side {
                Side::Left => slot.0 += 1,
                Side::Right => slot.1 += 1,
            }
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.accepted += other.accepted;
        self.accepted_outcomes = self.accepted_outcomes.merge(other.accepted_outcomes);
        self.causal += other.causal;
        self.causal_accepted += other.causal_accepted;
        self.selected += other.selected;
        for (a, b) in self.sides.iter_mut().zip(other.sides) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self
    }
}

/// Asymmetry measured with one analyzer orientation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationResult {
    pub normal: [f64; 3],
    pub n_left: u64,
    pub n_right: u64,
    pub asymmetry: Option<Asymmetry>,
}

/// Teleported polarization reconstructed from three orthogonal normals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    /// Cartesian Bloch vector estimate.
    pub polarization: [f64; 3],
    pub sigma: [f64; 3],
}

/// Counts at each stage of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageCounts {
    pub generated: u64,
    pub f1_records: u64,
    pub f2_records: u64,
    pub matched_pairs: u64,
    pub accidental_pairs: u64,
    pub unmatched_f1: u64,
    pub unmatched_f2: u64,
    pub accepted: u64,
    pub accepted_outcomes: OutcomeCounts,
    pub selected: u64,
}

/// Causality statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalStats {
    pub detector_separation_m: f64,
    pub causal_events: u64,
    pub causal_accepted: u64,
    pub causal_fraction_of_accepted: Option<f64>,
}

/// Aggregated result of [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub counts: StageCounts,
    pub condition_on: BellOutcome,
    pub analyzing_power: f64,
    pub orientations: Vec<OrientationResult>,
    pub reconstruction: Option<Reconstruction>,
    pub causal: CausalStats,
    pub degenerate: bool,
}

/// Per-event records plus the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub events: Vec<EventRecord>,
    pub summary: ExperimentSummary,
}

fn stamps(events: &[EventRecord], pick: impl Fn(&EventRecord) -> Option<f64>) -> Vec<Stamp> {
    let mut out: Vec<Stamp> = events
        .iter()
        .filter_map(|e| pick(e).map(|time| Stamp { event_id: e.event_id, time }))
        .collect();
    out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.event_id.cmp(&b.event_id)));
    out
}

fn orthonormal(normals: &[UnitVector3]) -> bool {
    normals.len() == 3
        && (0..3).all(|i| (i + 1..3).all(|j| normals[i].dot(&normals[j]).abs() < 1e-9))
}

/// Runs `n_events` beam protons. Event `i` draws from
/// `rng::stream(seed, DOMAIN_EXPERIMENT, i)`.
pub fn run_experiment(
    setup: &ExperimentSetup,
    target: &PolarizedTarget,
    filter: &SpinOperator,
    n_events: u64,
    seed: u64,
) -> Result<ExperimentOutput> {
    setup.validate()?;
    if n_events == 0 {
        return Err(Error::InvalidConfig("n_events must be at least 1".into()));
    }
    if filter.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: filter.dim() });
    }
    let mut events: Vec<EventRecord> = (0..n_events)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::DOMAIN_EXPERIMENT, i);
            generate_event(setup, target, filter, i, &mut rng)
        })
        .collect::<Result<_>>()?;

    let f1 = stamps(&events, |e| e.t_f1);
    let f2 = stamps(&events, |e| e.t_f2);
    let matching = coincidence_match(&f1, &f2, setup.geometry.coincidence_window_s)?;
    let mut accidental = 0u64;
    for &(i, j) in &matching.pairs {
        if f1[i].event_id == f2[j].event_id {
            events[f1[i].event_id as usize].accepted = true;
        } else {
            accidental += 1;
        }
    }

    let normals = setup.analyzer_normals.len();
    let tally = events
        .par_iter()
        .fold(
            || Tally::new(normals),
            |mut t, e| {
                t.record(e, setup);
                t
            },
        )
        .reduce(|| Tally::new(normals), Tally::merge);

    let orientations: Vec<OrientationResult> = setup
        .analyzer_normals
        .iter()
        .zip(&tally.sides)
        .map(|(n, &(l, r))| OrientationResult {
            normal: n.to_array(),
            n_left: l,
            n_right: r,
            asymmetry: asymmetry(l, r).ok(),
        })
        .collect();

    let power = setup.analyzer.analyzing_power;
    let reconstruction = if orthonormal(&setup.analyzer_normals) && power != 0.0 {
        let comps: Option<Vec<Asymmetry>> = orientations.iter().map(|o| o.asymmetry).collect();
        comps.map(|comps| {
            let mut polarization = [0.0; 3];
            let mut var = [0.0; 3];
            for (n, a) in setup.analyzer_normals.iter().zip(&comps) {
                let (p, s) = (a.epsilon / power, a.sigma / power.abs());
                for (k, nk) in n.to_array().iter().enumerate() {
                    polarization[k] += p * nk;
                    var[k] += (s * nk).powi(2);
                }
            }
            Reconstruction { polarization, sigma: var.map(f64::sqrt) }
        })
    } else {
        None
    };

    let summary = ExperimentSummary {
        counts: StageCounts {
            generated: n_events,
            f1_records: f1.len() as u64,
            f2_records: f2.len() as u64,
            matched_pairs: matching.pairs.len() as u64,
            accidental_pairs: accidental,
            unmatched_f1: matching.unmatched_f1 as u64,
            unmatched_f2: matching.unmatched_f2 as u64,
            accepted: tally.accepted,
            accepted_outcomes: tally.accepted_outcomes,
            selected: tally.selected,
        },
        condition_on: setup.condition_on,
        analyzing_power: power,
        orientations,
        reconstruction,
        causal: CausalStats {
            detector_separation_m: setup.geometry.detector_separation(),
            causal_events: tally.causal,
            causal_accepted: tally.causal_accepted,
            causal_fraction_of_accepted: (tally.accepted > 0)
                .then(|| tally.causal_accepted as f64 / tally.accepted as f64),
        },
        degenerate: tally.selected == 0,
    };
    Ok(ExperimentOutput { events, summary })
}
