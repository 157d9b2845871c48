//! Bell states, Bell projectors and the Bell-operator forms of the collective
//! spin operators of a spin-½ pair.
//!
//! ```text
//! Ψ± = (↑↓ ± ↓↑)/√2        Φ± = (↑↑ ± ↓↓)/√2
//!
//! S_x = |Ψ+⟩⟨Φ+| + |Φ+⟩⟨Ψ+|
//! S_y = i(|Ψ+⟩⟨Φ−| − |Φ−⟩⟨Ψ+|)
//! S_z = |Φ−⟩⟨Φ+| + |Φ+⟩⟨Φ−|
//! s_z = |Ψ+⟩⟨Ψ−| + |Ψ−⟩⟨Ψ+|        (s = S₁ − S₂)
//! ```
//!
//! The anticorrelation axis of Ψ+ is ẑ and the second discrimination axis is
//! x̂. Along ẑ the pair Ψ± is anticorrelated and Φ± correlated; along x̂, Ψ−
//! and Φ− are anticorrelated while Ψ+ and Φ+ are correlated.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_core::{
    measure_projection, pauli_dot, rotation, SpinOperator, SpinState, UnitVector3, I, ZERO,
};

/// One of the four Bell states; also the 2-bit classical message of a Bell
/// measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellOutcome {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] =
        [BellOutcome::PsiMinus, BellOutcome::PsiPlus, BellOutcome::PhiMinus, BellOutcome::PhiPlus];

    /// The three triplet states.
    pub const TRIPLET: [BellOutcome; 3] = [BellOutcome::PsiPlus, BellOutcome::PhiMinus, BellOutcome::PhiPlus];

    /// Two-bit classical code: Ψ− = 00, Ψ+ = 01, Φ− = 10, Φ+ = 11.
    pub fn code(self) -> u8 {
        match self {
            BellOutcome::PsiMinus => 0b00,
            BellOutcome::PsiPlus => 0b01,
            BellOutcome::PhiMinus => 0b10,
            BellOutcome::PhiPlus => 0b11,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.code() == code)
    }

    pub fn index(self) -> usize {
        self.code() as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PsiMinus => "psi_minus",
            BellOutcome::PsiPlus => "psi_plus",
            BellOutcome::PhiMinus => "phi_minus",
            BellOutcome::PhiPlus => "phi_plus",
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BellOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown Bell state `{s}`")))
    }
}

/// Normalized two-spin ket of a Bell state.
pub fn bell_ket(outcome: BellOutcome) -> SpinState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amps = match outcome {
        BellOutcome::PsiMinus => vec![ZERO, h, -h, ZERO],
        BellOutcome::PsiPlus => vec![ZERO, h, h, ZERO],
        BellOutcome::PhiMinus => vec![h, ZERO, ZERO, -h],
        BellOutcome::PhiPlus => vec![h, ZERO, ZERO, h],
    };
    SpinState::new(2, amps).expect("Bell kets are normalized")
}

/// Rank-one projector `|β⟩⟨β|`.
pub fn bell_projector(outcome: BellOutcome) -> SpinOperator {
    let ket = bell_ket(outcome);
    SpinOperator::outer(&ket, &ket).expect("same dimension")
}

fn transition(to: BellOutcome, from: BellOutcome) -> SpinOperator {
    SpinOperator::outer(&bell_ket(to), &bell_ket(from)).expect("same dimension")
}

/// Collective two-spin operators available in Bell-operator form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collective {
    /// `S_x = S₁ₓ + S₂ₓ`
    Sx,
    /// `S_y = S₁y + S₂y`
    Sy,
    /// `S_z = S₁z + S₂z`
    Sz,
    /// `s_z = S₁z − S₂z`
    DiffZ,
}

/// Builds a collective spin operator from Bell transition operators.
pub fn collective_operator(which: Collective) -> SpinOperator {
    use BellOutcome::*;
    match which {
        Collective::Sx => &transition(PsiPlus, PhiPlus) + &transition(PhiPlus, PsiPlus),
        Collective::Sy => (&transition(PsiPlus, PhiMinus) - &transition(PhiMinus, PsiPlus)).scale(I),
        Collective::Sz => &transition(PhiMinus, PhiPlus) + &transition(PhiPlus, PhiMinus),
        Collective::DiffZ => &transition(PsiPlus, PsiMinus) + &transition(PsiMinus, PsiPlus),
    }
}

/// `e1 = |1,0⟩`, `e2 = |1,1⟩`, `e3 = |1,−1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletVectorBasis {
    pub e1: SpinState,
    pub e2: SpinState,
    pub e3: SpinState,
}

impl TripletVectorBasis {
    pub fn new() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            e1: SpinState::new(2, vec![ZERO, h, h, ZERO]).expect("normalized"),
            e2: SpinState::basis(2, 0).expect("index in range"),
            e3: SpinState::basis(2, 3).expect("index in range"),
        }
    }
}

impl Default for TripletVectorBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Outcome of checking `Ψ+ = e1` and `Φ± = (e2 ± e3)/√2`.
#[derive(Debug, Clone)]
pub struct TripletReport {
    pub basis: TripletVectorBasis,
    /// `|⟨e1|Ψ+⟩|`
    pub psi_plus_overlap: f64,
    /// `|⟨Φ−|(e2 − e3)/√2⟩|`
    pub phi_minus_overlap: f64,
    /// `|⟨Φ+|(e2 + e3)/√2⟩|`
    pub phi_plus_overlap: f64,
    /// Largest componentwise residual over the three identities.
    pub max_residual: f64,
}

impl TripletReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_residual <= tol
    }
}

/// Verifies the triplet 3-vector relations of the Bell states.
pub fn triplet_relations() -> TripletReport {
    let basis = TripletVectorBasis::new();
    let combine = |sign: f64| {
        let amps = basis
            .e2
            .amplitudes()
            .iter()
            .zip(basis.e3.amplitudes())
            .map(|(a, b)| (a + b * sign) * FRAC_1_SQRT_2)
            .collect();
        SpinState::new(2, amps).expect("orthonormal combination")
    };
    let phi_minus = combine(-1.0);
    let phi_plus = combine(1.0);
    let residuals = [
        basis.e1.max_abs_diff(&bell_ket(BellOutcome::PsiPlus)),
        phi_minus.max_abs_diff(&bell_ket(BellOutcome::PhiMinus)),
        phi_plus.max_abs_diff(&bell_ket(BellOutcome::PhiPlus)),
    ];
    TripletReport {
        psi_plus_overlap: basis.e1.overlap(&bell_ket(BellOutcome::PsiPlus)).unwrap(),
        phi_minus_overlap: bell_ket(BellOutcome::PhiMinus).overlap(&phi_minus).unwrap(),
        phi_plus_overlap: bell_ket(BellOutcome::PhiPlus).overlap(&phi_plus).unwrap(),
        max_residual: residuals.into_iter().fold(0.0, f64::max),
        basis,
    }
}

/// Coordinate axes for the quarter-turn permutations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CartesianAxis {
    X,
    Y,
    Z,
}

impl CartesianAxis {
    pub fn unit(self) -> UnitVector3 {
        match self {
            CartesianAxis::X => UnitVector3::X,
            CartesianAxis::Y => UnitVector3::Y,
            CartesianAxis::Z => UnitVector3::Z,
        }
    }
}

/// How a quarter turn `R ⊗ R` acts on the Bell states.
#[derive(Debug, Clone)]
pub struct PermutationReport {
    pub axis: CartesianAxis,
    /// `(input, image, |⟨image|R⊗R|input⟩|)` for each triplet state.
    pub mapping: Vec<(BellOutcome, BellOutcome, f64)>,
    /// `|⟨Ψ−|R⊗R|Ψ−⟩|`
    pub singlet_overlap: f64,
}

impl PermutationReport {
    pub fn image(&self, input: BellOutcome) -> Option<BellOutcome> {
        if input == BellOutcome::PsiMinus {
            return Some(BellOutcome::PsiMinus);
        }
        self.mapping.iter().find(|(i, _, _)| *i == input).map(|(_, o, _)| *o)
    }
}

const PERMUTATION_TOL: f64 = 1e-9;

/// Applies a π/2 rotation about a coordinate axis to both spins and reports
/// the induced permutation of the triplet Bell states.
pub fn rotation_permutation(axis: CartesianAxis) -> Result<PermutationReport> {
    let r = rotation(&axis.unit(), FRAC_PI_2)?;
    let rr = r.kron(&r);
    let mut mapping = Vec::with_capacity(3);
    let mut used = Vec::with_capacity(3);
    for input in BellOutcome::TRIPLET {
        let rotated = rr.apply_normalized(&bell_ket(input))?;
        let hits: Vec<(BellOutcome, f64)> = BellOutcome::TRIPLET
            .into_iter()
            .map(|o| (o, bell_ket(o).overlap(&rotated).unwrap()))
            .filter(|(_, ov)| (ov - 1.0).abs() <= PERMUTATION_TOL)
            .collect();
        match hits.as_slice() {
            [(image, ov)] if !used.contains(image) => {
                used.push(*image);
                mapping.push((input, *image, *ov));
            }
            _ => {
                return Err(Error::NotAPermutation(format!(
                    "{input} has no unique image under a quarter turn about {axis:?}"
                )))
            }
        }
    }
    let singlet = bell_ket(BellOutcome::PsiMinus);
    let singlet_overlap = singlet.overlap(&rr.apply_normalized(&singlet)?)?;
    if (singlet_overlap - 1.0).abs() > PERMUTATION_TOL {
        return Err(Error::NotAPermutation(format!("singlet not invariant (overlap {singlet_overlap})")));
    }
    Ok(PermutationReport { axis, mapping, singlet_overlap })
}

fn projector_2x2(axis: &UnitVector3, sign: f64) -> SpinOperator {
    let p = pauli_dot(axis);
    let h = Complex64::new(0.5, 0.0);
    let s = Complex64::new(0.5 * sign, 0.0);
    SpinOperator::from_2x2([[h + s * p[0][0], s * p[0][1]], [s * p[1][0], h + s * p[1][1]]])
}

/// Exact probability that projections of particle 0 along `axis1` and of
/// particle 1 along `axis2` sum to zero.
pub fn correlation_probability(state: &SpinState, axis1: &UnitVector3, axis2: &UnitVector3) -> Result<f64> {
    if state.n_particles() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, actual: state.dim() });
    }
    let (a1, a2) = (UnitVector3::new(axis1.x(), axis1.y(), axis1.z())?, UnitVector3::new(axis2.x(), axis2.y(), axis2.z())?);
    let up_down = projector_2x2(&a1, 1.0).kron(&projector_2x2(&a2, -1.0));
    let down_up = projector_2x2(&a1, -1.0).kron(&projector_2x2(&a2, 1.0));
    let p = up_down.apply(state)?.norm.powi(2) + down_up.apply(state)?.norm.powi(2);
    Ok(p.clamp(0.0, 1.0))
}

/// Result of statistical Bell-state identification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrimination {
    pub estimate: BellOutcome,
    /// `1 − 2^−(1 + min(z_rounds, x_rounds))`.
    pub confidence: f64,
    pub z_rounds: usize,
    pub x_rounds: usize,
}

/// Measures both spins of one copy along `axis`; true if anticorrelated.
fn anticorrelated<R: RngCore + ?Sized>(state: &SpinState, axis: &UnitVector3, rng: &mut R) -> Result<bool> {
    let first = measure_projection(state, 0, axis, rng)?;
    let second = measure_projection(&first.collapsed, 1, axis, rng)?;
    Ok(first.value != second.value)
}

/// Identifies which Bell state a source emits by spending `copies` copies.
///
/// Copies alternate between a ẑ round and an x̂ round, starting with ẑ. The ẑ
/// majority vote separates {Ψ−, Ψ+} from {Φ−, Φ+}; the x̂ majority vote picks
/// the anticorrelated (minus) or correlated (plus) member. With no x̂ round
/// the minus member is reported. Ties count as anticorrelated.
pub fn discriminate_bell<I, R>(source: I, copies: usize, rng: &mut R) -> Result<Discrimination>
where
    I: IntoIterator<Item = SpinState>,
    R: RngCore + ?Sized,
{
    let (mut z_rounds, mut x_rounds) = (0usize, 0usize);
    let (mut z_anti, mut x_anti) = (0usize, 0usize);
    for (k, state) in source.into_iter().take(copies).enumerate() {
        if state.n_particles() != 2 {
            return Err(Error::DimensionMismatch { expected: 4, actual: state.dim() });
        }
        if k % 2 == 0 {
            z_rounds += 1;
            z_anti += anticorrelated(&state, &UnitVector3::Z, rng)? as usize;
        } else {
            x_rounds += 1;
            x_anti += anticorrelated(&state, &UnitVector3::X, rng)? as usize;
        }
    }
    if z_rounds == 0 {
        return Err(Error::EmptyStream);
    }
    let psi_family = 2 * z_anti >= z_rounds;
    let minus = x_rounds == 0 || 2 * x_anti >= x_rounds;
    let estimate = match (psi_family, minus) {
        (true, true) => BellOutcome::PsiMinus,
        (true, false) => BellOutcome::PsiPlus,
        (false, true) => BellOutcome::PhiMinus,
        (false, false) => BellOutcome::PhiPlus,
    };
    let k = 1 + z_rounds.min(x_rounds) as i32;
    Ok(Discrimination { estimate, confidence: 1.0 - 2f64.powi(-k), z_rounds, x_rounds })
}

/// Expansion coefficients `⟨β|ψ⟩` of a two-spin state in the Bell basis,
/// indexed by [`BellOutcome::index`].
pub fn bell_components(state: &SpinState) -> Result<[Complex64; 4]> {
    let mut out = [ZERO; 4];
    for o in BellOutcome::ALL {
        out[o.index()] = bell_ket(o).inner(state)?;
    }
    Ok(out)
}

/// The identity assembled from the four Bell projectors.
pub fn projector_sum() -> SpinOperator {
    BellOutcome::ALL
        .into_iter()
        .fold(SpinOperator::zeros(4), |acc, o| &acc + &bell_projector(o))
}
