//! Pure-state algebra for registers of one to three spin-½ particles.
//!
//! Basis kets are indexed by bit pattern with particle 0 in the most
//! significant bit; a 0 bit is spin up along ẑ and a 1 bit is spin down.
//! For two particles the order is `↑↑, ↑↓, ↓↑, ↓↓`.
//!
//! Spin operators use ħ = 1, so every single-particle projection `S·n` has
//! eigenvalues ±½.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng;

/// A complex probability amplitude.
pub type Amplitude = Complex64;

/// Tolerance for exact-algebra checks.
pub const EXACT_TOL: f64 = 1e-12;

/// Norm below which an operator result is treated as annihilated.
pub const NULL_NORM: f64 = 1e-12;

/// Accepted deviation of a user-supplied axis from unit length.
pub const AXIS_TOL: f64 = 1e-9;

/// Largest supported register.
pub const MAX_PARTICLES: usize = 3;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// A direction in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub const X: UnitVector3 = UnitVector3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: UnitVector3 = UnitVector3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: UnitVector3 = UnitVector3 { x: 0.0, y: 0.0, z: 1.0 };

    /// Accepts `(x, y, z)` if its norm is within `1e-9` of one, then rescales
    /// to unit length.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::NonUnitAxis { x, y, z, norm });
        }
        Ok(Self { x: x / norm, y: y / norm, z: z / norm })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NonUnitAxis { x, y, z, norm });
        }
        Ok(Self { x: x / norm, y: y / norm, z: z / norm })
    }

    /// Direction with polar angle `theta` from ẑ and azimuth `phi` from x̂.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self { x: st * cp, y: st * sp, z: ct }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Cross product (not normalized; callers check orthogonality first).
    pub fn cross(&self, other: &UnitVector3) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// Applies a 3×3 rotation matrix (row-major).
    pub fn rotated(&self, m: &[[f64; 3]; 3]) -> Self {
        let v = [self.x, self.y, self.z];
        let r: Vec<f64> = m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
        Self { x: r[0], y: r[1], z: r[2] }
    }
}

/// The 2×2 matrix `σ·n`.
pub(crate) fn pauli_dot(n: &UnitVector3) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(n.z, 0.0), Complex64::new(n.x, -n.y)],
        [Complex64::new(n.x, n.y), Complex64::new(-n.z, 0.0)],
    ]
}

fn check_particles(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PARTICLES {
        return Err(Error::UnsupportedParticleCount(n));
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|c| c.norm_sqr()).sum()
}

/// Normalized pure state of `n_particles` spin-½ particles.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    n_particles: usize,
    amps: Vec<Amplitude>,
}

impl SpinState {
    /// Builds a state from amplitudes that are already normalized to within
    /// `1e-9`; the stored copy is rescaled to unit norm.
    pub fn new(n_particles: usize, amps: Vec<Amplitude>) -> Result<Self> {
        let n2 = norm_sqr(&amps);
        if n2.is_finite() && (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(n2));
        }
        Self::normalized(n_particles, amps)
    }

    /// Builds a state by dividing arbitrary nonzero amplitudes by their norm.
    pub fn normalized(n_particles: usize, mut amps: Vec<Amplitude>) -> Result<Self> {
        check_particles(n_particles)?;
        let dim = 1 << n_particles;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: amps.len() });
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm < NULL_NORM {
            return Err(Error::ZeroNorm);
        }
        for c in &mut amps {
            *c /= norm;
        }
        Ok(Self { n_particles, amps })
    }

    /// The computational basis ket with the given index.
    pub fn basis(n_particles: usize, index: usize) -> Result<Self> {
        check_particles(n_particles)?;
        let dim = 1 << n_particles;
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: index });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_particles, amps })
    }

    pub fn up() -> Self {
        Self { n_particles: 1, amps: vec![ONE, ZERO] }
    }

    pub fn down() -> Self {
        Self { n_particles: 1, amps: vec![ZERO, ONE] }
    }

    /// Single spin `a|↑⟩ + b|↓⟩`.
    pub fn qubit(a: Amplitude, b: Amplitude) -> Result<Self> {
        Self::new(1, vec![a, b])
    }

    /// Single spin polarized along `n`.
    pub fn polarized(n: &UnitVector3) -> Self {
        let theta = n.z.clamp(-1.0, 1.0).acos();
        let phi = n.y.atan2(n.x);
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            n_particles: 1,
            amps: vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        }
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpinState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|`, the phase-insensitive comparison used for states.
    pub fn overlap(&self, other: &SpinState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Largest componentwise difference (phase sensitive).
    pub fn max_abs_diff(&self, other: &SpinState) -> f64 {
        max_abs_diff(&self.amps, &other.amps)
    }

    /// `self ⊗ other`, with `self` occupying the leading particles.
    pub fn tensor(&self, other: &SpinState) -> Result<SpinState> {
        let n = self.n_particles + other.n_particles;
        if n > MAX_PARTICLES {
            return Err(Error::DimensionOverflow { left: self.n_particles, right: other.n_particles });
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|l| other.amps.iter().map(move |r| l * r))
            .collect();
        SpinState::normalized(n, amps)
    }

    /// Bloch vector `2⟨S⟩` of a single spin.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.n_particles != 1 {
            return Err(Error::DimensionMismatch { expected: 2, actual: self.dim() });
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        let ab = a.conj() * b;
        Ok([2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
    }

    /// Applies a 2×2 matrix to one particle and returns the raw amplitudes.
    pub(crate) fn apply_single_raw(&self, particle: usize, m: &[[Complex64; 2]; 2]) -> Vec<Complex64> {
        let shift = self.n_particles - 1 - particle;
        let mask = 1usize << shift;
        let mut out = vec![ZERO; self.dim()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let row = (idx >> shift) & 1;
            let up = idx & !mask;
            let down = idx | mask;
            *slot = m[row][0] * self.amps[up] + m[row][1] * self.amps[down];
        }
        out
    }

    fn check_particle(&self, particle: usize) -> Result<()> {
        if particle >= self.n_particles {
            return Err(Error::InvalidParticle { index: particle, n_particles: self.n_particles });
        }
        Ok(())
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.amps.iter().enumerate() {
            if c.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let label: String = (0..self.n_particles)
                .map(|p| if (idx >> (self.n_particles - 1 - p)) & 1 == 0 { '↑' } else { '↓' })
                .collect();
            write!(f, "({:.6}{:+.6}i)|{}⟩", c.re, c.im, label)?;
        }
        Ok(())
    }
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Dense complex operator on the register of a given dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl SpinOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn from_2x2(m: [[Complex64; 2]; 2]) -> Self {
        Self { dim: 2, entries: vec![m[0][0], m[0][1], m[1][0], m[1][1]] }
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &SpinState, bra: &SpinState) -> Result<Self> {
        if ket.dim() != bra.dim() {
            return Err(Error::DimensionMismatch { expected: ket.dim(), actual: bra.dim() });
        }
        let dim = ket.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for k in ket.amplitudes() {
            for b in bra.amplitudes() {
                entries.push(k * b.conj());
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|c| c * s).collect() }
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &SpinOperator) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: rhs.dim });
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &SpinOperator) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for ar in 0..da {
            for ac in 0..da {
                let a = self.entries[ar * da + ac];
                for br in 0..db {
                    for bc in 0..db {
                        out.entries[(ar * db + br) * d + ac * db + bc] = a * rhs.entries[br * db + bc];
                    }
                }
            }
        }
        out
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SpinOperator) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        match self.adjoint().matmul(self) {
            Ok(p) => p.max_abs_diff(&Self::identity(self.dim)) <= tol,
            Err(_) => false,
        }
    }

    /// `op · state` without renormalization.
    pub fn apply(&self, state: &SpinState) -> Result<Applied> {
        if self.dim != state.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: state.dim() });
        }
        let d = self.dim;
        let amps: Vec<Complex64> = (0..d)
            .map(|r| {
                self.entries[r * d..(r + 1) * d]
                    .iter()
                    .zip(state.amplitudes())
                    .map(|(m, c)| m * c)
                    .sum()
            })
            .collect();
        let norm = norm_sqr(&amps).sqrt();
        Ok(Applied { n_particles: state.n_particles(), amplitudes: amps, norm })
    }

    /// `op · state`, renormalized; a zero-norm result is [`Error::ZeroNorm`].
    pub fn apply_normalized(&self, state: &SpinState) -> Result<SpinState> {
        self.apply(state)?.into_state()
    }

    /// Embeds this operator, acting on `particles` (in the given order), into
    /// an `n_particles` register as identity on every other particle.
    pub fn embed(&self, particles: &[usize], n_particles: usize) -> Result<Self> {
        check_particles(n_particles)?;
        let k = particles.len();
        if self.dim != 1 << k {
            return Err(Error::DimensionMismatch { expected: 1 << k, actual: self.dim });
        }
        for (i, &p) in particles.iter().enumerate() {
            if p >= n_particles || particles[..i].contains(&p) {
                return Err(Error::InvalidParticle { index: p, n_particles });
            }
        }
        let bit = |idx: usize, p: usize| (idx >> (n_particles - 1 - p)) & 1;
        let sub = |idx: usize| particles.iter().fold(0usize, |acc, &p| (acc << 1) | bit(idx, p));
        let others_mask: usize = (0..n_particles)
            .filter(|p| !particles.contains(p))
            .map(|p| 1usize << (n_particles - 1 - p))
            .sum();
        let d = 1usize << n_particles;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                if r & others_mask == c & others_mask {
                    out.entries[r * d + c] = self.entries[sub(r) * self.dim + sub(c)];
                }
            }
        }
        Ok(out)
    }
}

impl Add for &SpinOperator {
    type Output = SpinOperator;

    fn add(self, rhs: &SpinOperator) -> SpinOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        SpinOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SpinOperator {
    type Output = SpinOperator;

    fn sub(self, rhs: &SpinOperator) -> SpinOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        SpinOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &SpinOperator {
    type Output = SpinOperator;

    fn neg(self) -> SpinOperator {
        self.scale(-ONE)
    }
}

impl Mul for &SpinOperator {
    type Output = SpinOperator;

    fn mul(self, rhs: &SpinOperator) -> SpinOperator {
        self.matmul(rhs).expect("operator dimension mismatch")
    }
}

/// Unnormalized result of applying an operator, with its norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub n_particles: usize,
    pub amplitudes: Vec<Amplitude>,
    pub norm: f64,
}

impl Applied {
    /// True when the operator annihilated the state.
    pub fn is_null(&self) -> bool {
        self.norm < NULL_NORM
    }

    pub fn into_state(self) -> Result<SpinState> {
        if self.is_null() {
            return Err(Error::ZeroNorm);
        }
        SpinState::normalized(self.n_particles, self.amplitudes)
    }
}

/// `S_particle · axis` on an `n_particles` register.
pub fn spin_component(axis: &UnitVector3, particle: usize, n_particles: usize) -> Result<SpinOperator> {
    check_particles(n_particles)?;
    if particle >= n_particles {
        return Err(Error::InvalidParticle { index: particle, n_particles });
    }
    UnitVector3::new(axis.x, axis.y, axis.z)?;
    let half = SpinOperator::from_2x2(pauli_dot(axis)).scale(Complex64::new(0.5, 0.0));
    half.embed(&[particle], n_particles)
}

/// Total spin projection `S·n = S₁·n + S₂·n` on two particles.
pub fn total_spin_component(axis: &UnitVector3) -> Result<SpinOperator> {
    Ok(&spin_component(axis, 0, 2)? + &spin_component(axis, 1, 2)?)
}

/// Spin-difference projection `s·n = S₁·n − S₂·n` on two particles.
pub fn difference_spin_component(axis: &UnitVector3) -> Result<SpinOperator> {
    Ok(&spin_component(axis, 0, 2)? - &spin_component(axis, 1, 2)?)
}

/// Total spin squared `S²` on two particles.
pub fn total_spin_squared() -> SpinOperator {
    [UnitVector3::X, UnitVector3::Y, UnitVector3::Z]
        .iter()
        .map(|n| {
            let s = total_spin_component(n).expect("cartesian axis");
            &s * &s
        })
        .fold(SpinOperator::zeros(4), |acc, m| &acc + &m)
}

/// Spin-½ rotation `exp(−i angle σ·n / 2)`.
pub fn rotation(axis: &UnitVector3, angle: f64) -> Result<SpinOperator> {
    let axis = UnitVector3::new(axis.x, axis.y, axis.z)?;
    let (s, c) = (angle / 2.0).sin_cos();
    let p = pauli_dot(&axis);
    let minus_is = Complex64::new(0.0, -s);
    Ok(SpinOperator::from_2x2([
        [c + minus_is * p[0][0], minus_is * p[0][1]],
        [minus_is * p[1][0], c + minus_is * p[1][1]],
    ]))
}

/// The 3×3 spatial rotation about `axis` by `angle` (Rodrigues form).
pub fn spatial_rotation(axis: &UnitVector3, angle: f64) -> [[f64; 3]; 3] {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let (x, y, z) = (axis.x, axis.y, axis.z);
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

/// Result of a single projective spin measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Measured projection, `+0.5` or `-0.5`.
    pub value: f64,
    pub collapsed: SpinState,
    /// Born weight of the sampled branch.
    pub probability: f64,
}

/// Born probability that `particle` is found with projection `+½` along
/// `axis`, together with both projected (unnormalized) branches.
fn projection_branches(
    state: &SpinState,
    particle: usize,
    axis: &UnitVector3,
) -> (Vec<Complex64>, Vec<Complex64>, f64) {
    let p = pauli_dot(axis);
    let half = Complex64::new(0.5, 0.0);
    let plus = [
        [half * (ONE + p[0][0]), half * p[0][1]],
        [half * p[1][0], half * (ONE + p[1][1])],
    ];
    let minus = [
        [half * (ONE - p[0][0]), -half * p[0][1]],
        [-half * p[1][0], half * (ONE - p[1][1])],
    ];
    let up = state.apply_single_raw(particle, &plus);
    let down = state.apply_single_raw(particle, &minus);
    let p_up = norm_sqr(&up);
    (up, down, p_up)
}

/// Probability of the `+½` outcome for `particle` along `axis`.
pub fn projection_probability(state: &SpinState, particle: usize, axis: &UnitVector3) -> Result<f64> {
    state.check_particle(particle)?;
    Ok(projection_branches(state, particle, axis).2.clamp(0.0, 1.0))
}

/// Projective measurement of `S_particle · axis` with Born sampling.
pub fn measure_projection<R: RngCore + ?Sized>(
    state: &SpinState,
    particle: usize,
    axis: &UnitVector3,
    rng: &mut R,
) -> Result<Measurement> {
    state.check_particle(particle)?;
    let axis = UnitVector3::new(axis.x, axis.y, axis.z)?;
    let (up, down, p_up) = projection_branches(state, particle, &axis);
    let p_up = p_up.clamp(0.0, 1.0);
    let u = rng::uniform(rng);
    let (value, amps, probability) = if u < p_up { (0.5, up, p_up) } else { (-0.5, down, 1.0 - p_up) };
    let collapsed = SpinState::normalized(state.n_particles(), amps)?;
    Ok(Measurement { value, collapsed, probability })
}

/// Real expectation value `⟨ψ|M|ψ⟩` of a Hermitian operator.
pub fn expectation(state: &SpinState, op: &SpinOperator) -> Result<f64> {
    let dev = op.hermitian_deviation();
    if dev > EXACT_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let applied = op.apply(state)?;
    let value: Complex64 = state
        .amplitudes()
        .iter()
        .zip(&applied.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum();
    debug_assert!(value.im.abs() < 1e-10, "imaginary residue {}", value.im);
    Ok(value.re)
}
