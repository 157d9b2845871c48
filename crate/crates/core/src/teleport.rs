//! Four-channel teleportation of a spin-½ state.
//!
//! Particles are numbered as in the proton scheme: register index 0 is the
//! target proton carrying the unknown state, index 1 is the traveler that
//! ends up with it, and index 2 is its EPR partner that is sent to the
//! target. The Bell measurement acts on indices 0 and 2.
//!
//! With a singlet ancilla the traveler's conditional state is
//!
//! | outcome | conditional state | correction      |
//! |---------|-------------------|-----------------|
//! | Ψ−      | ` a↑ + b↓`        | `1`             |
//! | Ψ+      | ` a↑ − b↓`        | `Z = diag(1,−1)`|
//! | Φ−      | `−a↓ − b↑`        | `X` (spin flip) |
//! | Φ+      | `−a↓ + b↑`        | `Z·X`           |
//!
//! Corrections are fixed matrices; the residual global phase (−1 for Φ−) is
//! not removed.

use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell_basis::{bell_ket, BellOutcome};
use crate::error::{Error, Result};
use crate::rng;
use crate::scattering::sample_index;
use crate::spin_core::{Amplitude, SpinOperator, SpinState, UnitVector3, ONE, ZERO};

/// The state `a|↑⟩ + b|↓⟩` to be teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnknownState {
    a: Amplitude,
    b: Amplitude,
}

impl UnknownState {
    /// Requires `|a|² + |b|²` within `1e-9` of one; stores the renormalized pair.
    pub fn new(a: Amplitude, b: Amplitude) -> Result<Self> {
        let state = SpinState::qubit(a, b)?;
        let amps = state.amplitudes();
        Ok(Self { a: amps[0], b: amps[1] })
    }

    /// The pure state with the given Bloch direction.
    pub fn from_bloch(n: &UnitVector3) -> Self {
        let s = SpinState::polarized(n);
        let amps = s.amplitudes();
        Self { a: amps[0], b: amps[1] }
    }

    /// Haar-random pure state.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let z = 2.0 * rng::uniform(rng) - 1.0;
        let phi = std::f64::consts::TAU * rng::uniform(rng);
        Self::from_bloch(&UnitVector3::from_polar(z.clamp(-1.0, 1.0).acos(), phi))
    }

    pub fn a(&self) -> Amplitude {
        self.a
    }

    pub fn b(&self) -> Amplitude {
        self.b
    }

    pub fn state(&self) -> SpinState {
        SpinState::qubit(self.a, self.b).expect("normalized on construction")
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        self.state().bloch_vector().expect("single spin")
    }
}

/// The 2-bit result sent over the classical channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalMessage {
    pub outcome: BellOutcome,
    /// Emission time in seconds; zero outside the experiment model.
    pub emission_time: f64,
}

/// Entangled pair for particles 2 and 3.
pub fn make_epr(which: BellOutcome) -> SpinState {
    bell_ket(which)
}

/// `|φ⟩₁ ⊗ |epr⟩₂₃`.
pub fn compose_three(phi: &UnknownState, epr: &SpinState) -> Result<SpinState> {
    if epr.n_particles() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, actual: epr.dim() });
    }
    phi.state().tensor(epr)
}

/// The four-term Bell expansion of `|φ⟩₁|Ψ−⟩₂₃`, assembled term by term.
pub fn bell_expansion(phi: &UnknownState) -> SpinState {
    let (a, b) = (phi.a, phi.b);
    let half = Complex64::new(0.5, 0.0);
    // (Bell state on 1,3; particle-2 amplitudes (↑, ↓))
    let terms = [
        (BellOutcome::PsiMinus, [a, b]),
        (BellOutcome::PsiPlus, [a, -b]),
        (BellOutcome::PhiMinus, [-b, -a]),
        (BellOutcome::PhiPlus, [b, -a]),
    ];
    let mut amps = vec![ZERO; 8];
    for (outcome, two) in terms {
        let ket13 = bell_ket(outcome);
        for (i13, c13) in ket13.amplitudes().iter().enumerate() {
            let (p1, p3) = (i13 >> 1, i13 & 1);
            for (p2, c2) in two.iter().enumerate() {
                amps[(p1 << 2) | (p2 << 1) | p3] += half * c13 * c2;
            }
        }
    }
    SpinState::normalized(3, amps).expect("unit norm expansion")
}

/// Unnormalized particle-2 amplitudes `⟨β|₁₃ ψ⟩`.
fn project_13(state: &SpinState, outcome: BellOutcome) -> [Complex64; 2] {
    let ket = bell_ket(outcome);
    let mut out = [ZERO; 2];
    for (i13, c13) in ket.amplitudes().iter().enumerate() {
        let (p1, p3) = (i13 >> 1, i13 & 1);
        for (p2, slot) in out.iter_mut().enumerate() {
            *slot += c13.conj() * state.amplitudes()[(p1 << 2) | (p2 << 1) | p3];
        }
    }
    out
}

/// Born weights and conditional particle-2 states for every Bell outcome on
/// particles 1 and 3.
pub fn bell_branches(state: &SpinState) -> Result<[(f64, Option<SpinState>); 4]> {
    if state.n_particles() != 3 {
        return Err(Error::DimensionMismatch { expected: 8, actual: state.dim() });
    }
    Ok(BellOutcome::ALL.map(|o| {
        let [u, d] = project_13(state, o);
        let p = u.norm_sqr() + d.norm_sqr();
        (p, SpinState::normalized(1, vec![u, d]).ok())
    }))
}

/// The receiver's side after a Bell measurement: holds particle 2 until the
/// classical message arrives.
#[derive(Debug, Clone, PartialEq)]
pub struct Receiver {
    conditional: SpinState,
    ancilla: BellOutcome,
}

impl Receiver {
    /// Particle-2 state before any correction.
    pub fn state(&self) -> &SpinState {
        &self.conditional
    }

    /// Applies the correction selected by `message`.
    pub fn correct(self, message: &ClassicalMessage) -> Corrected {
        let correction = correction_with_ancilla(message.outcome, self.ancilla);
        let output = correction.apply_normalized(&self.conditional).expect("unitary on a normalized state");
        Corrected { pre_correction: self.conditional, correction: message.outcome, output }
    }
}

/// Particle 2 after correction.
#[derive(Debug, Clone, PartialEq)]
pub struct Corrected {
    pub pre_correction: SpinState,
    /// Identifies the correction unitary by the message that selected it.
    pub correction: BellOutcome,
    pub output: SpinState,
}

/// Result of the Bell measurement on particles 1 and 3.
#[derive(Debug, Clone, PartialEq)]
pub struct BellMeasurement {
    pub message: ClassicalMessage,
    pub probability: f64,
    pub receiver: Receiver,
}

/// Bell measurement on particles 1 and 3 of a singlet-ancilla register.
pub fn bell_measure_13<R: RngCore + ?Sized>(state: &SpinState, rng: &mut R) -> Result<BellMeasurement> {
    measure_with_ancilla(state, BellOutcome::PsiMinus, rng)
}

/// Bell measurement for a register prepared with the given ancilla.
pub fn measure_with_ancilla<R: RngCore + ?Sized>(
    state: &SpinState,
    ancilla: BellOutcome,
    rng: &mut R,
) -> Result<BellMeasurement> {
    let branches = bell_branches(state)?;
    let weights = branches.each_ref().map(|(p, _)| *p);
    let outcome = sample_index(&weights, rng::uniform(rng));
    let (probability, conditional) = branches[outcome.index()].clone();
    let conditional = conditional.ok_or(Error::ZeroNorm)?;
    Ok(BellMeasurement {
        message: ClassicalMessage { outcome, emission_time: 0.0 },
        probability,
        receiver: Receiver { conditional, ancilla },
    })
}

fn pauli_z() -> SpinOperator {
    SpinOperator::from_2x2([[ONE, ZERO], [ZERO, -ONE]])
}

fn pauli_x() -> SpinOperator {
    SpinOperator::from_2x2([[ZERO, ONE], [ONE, ZERO]])
}

/// Correction unitary for a singlet ancilla.
pub fn correction_for(outcome: BellOutcome) -> SpinOperator {
    match outcome {
        BellOutcome::PsiMinus => SpinOperator::identity(2),
        BellOutcome::PsiPlus => pauli_z(),
        BellOutcome::PhiMinus => pauli_x(),
        BellOutcome::PhiPlus => &pauli_z() * &pauli_x(),
    }
}

/// Correction unitary when the ancilla is an arbitrary Bell state.
///
/// Each Bell state equals `(P ⊗ 1)|Ψ−⟩` up to phase with `P` the singlet
/// correction of the same label, so the traveler picks up an extra `P`.
pub fn correction_with_ancilla(outcome: BellOutcome, ancilla: BellOutcome) -> SpinOperator {
    &correction_for(outcome) * &correction_for(ancilla).adjoint()
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &SpinState, b: &SpinState) -> f64 {
    a.inner(b).map(|c| c.norm_sqr()).unwrap_or(0.0)
}

/// One completed protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportRecord {
    pub input: UnknownState,
    pub outcome: BellOutcome,
    pub outcome_probability: f64,
    pub pre_correction: SpinState,
    pub correction: BellOutcome,
    pub output: SpinState,
    pub fidelity: f64,
}

/// A protocol trial either completes or is discarded by the filter.
#[derive(Debug, Clone, PartialEq)]
pub enum Trial {
    Completed(TeleportRecord),
    Discarded,
}

/// Runs the protocol with a singlet ancilla.
///
/// `filter` is a two-spin scattering operator applied to particles 1 and 3
/// before detection; `None` is an ideal Bell measurement.
pub fn run_protocol<R: RngCore + ?Sized>(
    phi: &UnknownState,
    rng: &mut R,
    filter: Option<&SpinOperator>,
) -> Result<Trial> {
    run_protocol_with(phi, BellOutcome::PsiMinus, filter, rng)
}

/// Runs the protocol with any Bell-state ancilla.
pub fn run_protocol_with<R: RngCore + ?Sized>(
    phi: &UnknownState,
    ancilla: BellOutcome,
    filter: Option<&SpinOperator>,
    rng: &mut R,
) -> Result<Trial> {
    let mut register = compose_three(phi, &make_epr(ancilla))?;
    if let Some(f) = filter {
        let applied = f.embed(&[0, 2], 3)?.apply(&register)?;
        if applied.is_null() {
            return Ok(Trial::Discarded);
        }
        register = applied.into_state()?;
    }
    let measurement = measure_with_ancilla(&register, ancilla, rng)?;
    let corrected = measurement.receiver.correct(&measurement.message);
    let input_state = phi.state();
    Ok(Trial::Completed(TeleportRecord {
        input: *phi,
        outcome: measurement.message.outcome,
        outcome_probability: measurement.probability,
        fidelity: fidelity(&input_state, &corrected.output),
        pre_correction: corrected.pre_correction,
        correction: corrected.correction,
        output: corrected.output,
    }))
}

/// Outcome-averaged density matrix of particle 2 before the message arrives.
pub fn pre_message_density(phi: &UnknownState, ancilla: BellOutcome) -> Result<[[Complex64; 2]; 2]> {
    let register = compose_three(phi, &make_epr(ancilla))?;
    let mut rho = [[ZERO; 2]; 2];
    for (p, state) in bell_branches(&register)? {
        let Some(state) = state else { continue };
        let c = state.amplitudes();
        for r in 0..2 {
            for k in 0..2 {
                rho[r][k] += c[r] * c[k].conj() * p;
            }
        }
    }
    Ok(rho)
}

/// Aggregate of a batch of protocol trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub trials: u64,
    pub completed: u64,
    pub discarded: u64,
    /// Outcome counts indexed by Bell code.
    pub histogram: [u64; 4],
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Minimum fidelity per channel; `None` for channels never seen.
    pub channel_min_fidelity: [Option<f64>; 4],
    pub channel_mean_fidelity: [Option<f64>; 4],
}

/// Runs `trials` independent trials; trial `i` draws from
/// `rng::stream(seed, DOMAIN_TELEPORT, i)`, so the result does not depend on
/// the rayon pool size.
pub fn run_batch(
    phi: &UnknownState,
    ancilla: BellOutcome,
    filter: Option<&SpinOperator>,
    trials: u64,
    seed: u64,
) -> Result<BatchSummary> {
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::DOMAIN_TELEPORT, i);
            run_protocol_with(phi, ancilla, filter, &mut rng)
        })
        .collect::<Result<_>>()?;

    let mut histogram = [0u64; 4];
    let mut sums = [0.0f64; 4];
    let mut mins = [f64::INFINITY; 4];
    let mut total = 0.0;
    let mut min_fidelity = f64::INFINITY;
    let mut discarded = 0;
    for trial in &results {
        match trial {
            Trial::Completed(rec) => {
                let k = rec.outcome.index();
                histogram[k] += 1;
                sums[k] += rec.fidelity;
                mins[k] = mins[k].min(rec.fidelity);
                total += rec.fidelity;
                min_fidelity = min_fidelity.min(rec.fidelity);
            }
            Trial::Discarded => discarded += 1,
        }
    }
    let completed = trials - discarded;
    let seen = |k: usize, v: f64| (histogram[k] > 0).then_some(v);
    Ok(BatchSummary {
        trials,
        completed,
        discarded,
        histogram,
        mean_fidelity: if completed > 0 { total / completed as f64 } else { f64::NAN },
        min_fidelity: if completed > 0 { min_fidelity } else { f64::NAN },
        channel_min_fidelity: std::array::from_fn(|k| seen(k, mins[k])),
        channel_mean_fidelity: std::array::from_fn(|k| seen(k, sums[k] / histogram[k].max(1) as f64)),
    })
}
