//! Two-spin scattering operator.
//!
//! Invariant form, in a frame `(λ, μ, ν)`:
//!
//! ```text
//! f = A + B(S₁·λ)(S₂·λ) + C(S₁·μ)(S₂·μ) + D(S₁·ν)(S₂·ν)
//!       + E (S₁+S₂)·ν + F (S₁−S₂)·ν
//! ```
//!
//! Bell-projector form, in the canonical frame `λ = x̂, μ = ŷ, ν = ẑ`:
//!
//! ```text
//! f = a P_Ψ− + b P_Ψ+ + c P_Φ− + d P_Φ+ + E S_z + F s_z
//! a = A − (B+C+D)/4,  b = a + (B+C)/2,  c = a + (C+D)/2,  d = a + (B+D)/2
//! ```
//!
//! Amplitudes are dimensionless model inputs. The operator is used as a
//! relative-probability filter: detection probabilities are normalized per
//! detected event.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bell_basis::{bell_ket, bell_projector, collective_operator, BellOutcome, Collective};
use crate::error::{Error, Result};
use crate::rng;
use crate::spin_core::{spin_component, SpinOperator, SpinState, UnitVector3, EXACT_TOL};

/// Tolerance for symmetry relations of tabulated amplitudes.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// The six invariant amplitudes `A..F` at one c.m. angle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantAmplitudes {
    /// Scalar term.
    pub a: Complex64,
    /// `(S₁·λ)(S₂·λ)` term.
    pub b: Complex64,
    /// `(S₁·μ)(S₂·μ)` term.
    pub c: Complex64,
    /// `(S₁·ν)(S₂·ν)` term.
    pub d: Complex64,
    /// `(S₁+S₂)·ν` term.
    pub e: Complex64,
    /// `(S₁−S₂)·ν` term.
    pub f: Complex64,
}

impl InvariantAmplitudes {
    pub fn scalar(a: Complex64) -> Self {
        Self { a, ..Default::default() }
    }

    pub fn as_array(&self) -> [Complex64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn from_array(v: [Complex64; 6]) -> Self {
        Self { a: v[0], b: v[1], c: v[2], d: v[3], e: v[4], f: v[5] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidAmplitudes("non-finite amplitude".into()));
        }
        Ok(())
    }

    /// Amplitudes whose entries are uniform in `[-1, 1) + i[-1, 1)`.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut draw = || Complex64::new(2.0 * rng::uniform(rng) - 1.0, 2.0 * rng::uniform(rng) - 1.0);
        Self::from_array([draw(), draw(), draw(), draw(), draw(), draw()])
    }
}

/// Orthonormal right-handed frame `(λ, μ, ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterFrame {
    lambda: UnitVector3,
    mu: UnitVector3,
    nu: UnitVector3,
}

impl ScatterFrame {
    pub const CANONICAL: ScatterFrame =
        ScatterFrame { lambda: UnitVector3::X, mu: UnitVector3::Y, nu: UnitVector3::Z };

    pub fn new(lambda: UnitVector3, mu: UnitVector3, nu: UnitVector3) -> Result<Self> {
        for (name, a, b) in [("λ·μ", lambda, mu), ("μ·ν", mu, nu), ("ν·λ", nu, lambda)] {
            let dot = a.dot(&b);
            if dot.abs() > EXACT_TOL {
                return Err(Error::InvalidFrame(format!("{name} = {dot:e}")));
            }
        }
        let cross = lambda.cross(&mu);
        let dev = cross.iter().zip(nu.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if dev > EXACT_TOL {
            return Err(Error::InvalidFrame(format!("λ×μ differs from ν by {dev:e}")));
        }
        Ok(Self { lambda, mu, nu })
    }

    pub fn lambda(&self) -> UnitVector3 {
        self.lambda
    }

    pub fn mu(&self) -> UnitVector3 {
        self.mu
    }

    pub fn nu(&self) -> UnitVector3 {
        self.nu
    }

    /// Applies a 3×3 rotation to every axis.
    pub fn rotated(&self, m: &[[f64; 3]; 3]) -> Result<Self> {
        Self::new(self.lambda.rotated(m), self.mu.rotated(m), self.nu.rotated(m))
    }
}

impl Default for ScatterFrame {
    fn default() -> Self {
        Self::CANONICAL
    }
}

/// Coefficients of the Bell-projector form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BellCoefficients {
    /// Coefficient of `P_Ψ−`.
    pub a: Complex64,
    /// Coefficient of `P_Ψ+`.
    pub b: Complex64,
    /// Coefficient of `P_Φ−`.
    pub c: Complex64,
    /// Coefficient of `P_Φ+`.
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

impl BellCoefficients {
    /// The projector coefficient belonging to `outcome`.
    pub fn coefficient(&self, outcome: BellOutcome) -> Complex64 {
        match outcome {
            BellOutcome::PsiMinus => self.a,
            BellOutcome::PsiPlus => self.b,
            BellOutcome::PhiMinus => self.c,
            BellOutcome::PhiPlus => self.d,
        }
    }
}

fn pair_product(axis: &UnitVector3) -> SpinOperator {
    let s1 = spin_component(axis, 0, 2).expect("unit axis");
    let s2 = spin_component(axis, 1, 2).expect("unit axis");
    &s1 * &s2
}

/// Assembles `f` term by term in an arbitrary frame.
pub fn build_f_invariant(amps: &InvariantAmplitudes, frame: &ScatterFrame) -> Result<SpinOperator> {
    amps.validate()?;
    let frame = ScatterFrame::new(frame.lambda, frame.mu, frame.nu)?;
    let nu = frame.nu;
    let s1 = spin_component(&nu, 0, 2)?;
    let s2 = spin_component(&nu, 1, 2)?;
    let terms = [
        SpinOperator::identity(4).scale(amps.a),
        pair_product(&frame.lambda).scale(amps.b),
        pair_product(&frame.mu).scale(amps.c),
        pair_product(&nu).scale(amps.d),
        (&s1 + &s2).scale(amps.e),
        (&s1 - &s2).scale(amps.f),
    ];
    Ok(terms.iter().fold(SpinOperator::zeros(4), |acc, t| &acc + t))
}

/// Bell-projector coefficients of a set of invariant amplitudes.
pub fn bell_coefficients(amps: &InvariantAmplitudes) -> BellCoefficients {
    let a = amps.a - (amps.b + amps.c + amps.d) / 4.0;
    BellCoefficients {
        a,
        b: a + (amps.b + amps.c) / 2.0,
        c: a + (amps.c + amps.d) / 2.0,
        d: a + (amps.b + amps.d) / 2.0,
        e: amps.e,
        f: amps.f,
    }
}

/// Assembles `f` from Bell projectors and the collective `S_z`, `s_z`.
pub fn build_f_bell(coeffs: &BellCoefficients) -> SpinOperator {
    let terms = [
        bell_projector(BellOutcome::PsiMinus).scale(coeffs.a),
        bell_projector(BellOutcome::PsiPlus).scale(coeffs.b),
        bell_projector(BellOutcome::PhiMinus).scale(coeffs.c),
        bell_projector(BellOutcome::PhiPlus).scale(coeffs.d),
        collective_operator(Collective::Sz).scale(coeffs.e),
        collective_operator(Collective::DiffZ).scale(coeffs.f),
    ];
    terms.iter().fold(SpinOperator::zeros(4), |acc, t| &acc + t)
}

/// True iff `E` and `F` vanish and `target` is the only nonzero projector
/// coefficient, all judged by modulus against the same `tol`.
pub fn registration_condition(coeffs: &BellCoefficients, target: BellOutcome, tol: f64) -> bool {
    if coeffs.e.norm() >= tol || coeffs.f.norm() >= tol {
        return false;
    }
    BellOutcome::ALL.into_iter().all(|o| {
        let m = coeffs.coefficient(o).norm();
        if o == target {
            m > tol
        } else {
            m < tol
        }
    })
}

/// `a P_Ψ− + E(|Φ−⟩⟨Φ+| + |Φ+⟩⟨Φ−|)`, the identical-nucleon operator at 90°.
pub fn f_at_90_identical(a_val: Complex64, e_val: Complex64) -> SpinOperator {
    &bell_projector(BellOutcome::PsiMinus).scale(a_val) + &collective_operator(Collective::Sz).scale(e_val)
}

/// Result of passing a two-spin state through a scattering filter followed
/// by Bell-basis detection.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterResult {
    Detected {
        outcome: BellOutcome,
        /// Probability conditional on a detector count.
        probability: f64,
        post_state: SpinState,
    },
    /// The operator annihilated the state: no detector count.
    NoEvent,
}

/// Applies `f` to a two-spin state, then samples a Bell outcome with
/// probability `‖P_β f ψ‖² / ‖f ψ‖²`.
pub fn scatter_filter<R: RngCore + ?Sized>(state: &SpinState, f: &SpinOperator, rng: &mut R) -> Result<FilterResult> {
    let applied = f.apply(state)?;
    if applied.is_null() {
        return Ok(FilterResult::NoEvent);
    }
    let scattered = applied.into_state()?;
    let weights = bell_weights(&scattered)?;
    let outcome = sample_index(&weights, rng::uniform(rng));
    Ok(FilterResult::Detected {
        outcome,
        probability: weights[outcome.index()],
        post_state: bell_ket(outcome),
    })
}

/// Born weights `|⟨β|ψ⟩|²` over the Bell basis, indexed by outcome code.
pub fn bell_weights(state: &SpinState) -> Result<[f64; 4]> {
    let comps = crate::bell_basis::bell_components(state)?;
    Ok(comps.map(|c| c.norm_sqr()))
}

/// Inverse-CDF draw over outcomes in code order.
pub(crate) fn sample_index(weights: &[f64; 4], u: f64) -> BellOutcome {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for o in BellOutcome::ALL {
        acc += weights[o.index()] / total;
        if u < acc {
            return o;
        }
    }
    // rounding left the last bucket short; take the last nonzero weight
    BellOutcome::ALL
        .into_iter()
        .rev()
        .find(|o| weights[o.index()] > 0.0)
        .unwrap_or(BellOutcome::PhiPlus)
}

/// Invariant amplitudes tabulated on a grid of c.m. angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    rows: Vec<(f64, InvariantAmplitudes)>,
    identical_nucleons: bool,
}

impl AmplitudeTable {
    /// Rows must be finite and strictly increasing in angle within `[0, π]`.
    pub fn new(rows: Vec<(f64, InvariantAmplitudes)>, identical_nucleons: bool) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidAmplitudes("empty table".into()));
        }
        for (i, (theta, amps)) in rows.iter().enumerate() {
            if !theta.is_finite() || !(0.0..=PI + SYMMETRY_TOL).contains(theta) {
                return Err(Error::InvalidAmplitudes(format!("row {i}: angle {theta} outside [0, π]")));
            }
            if i > 0 && *theta <= rows[i - 1].0 {
                return Err(Error::InvalidAmplitudes(format!("row {i}: angles not strictly increasing")));
            }
            amps.validate().map_err(|e| Error::InvalidAmplitudes(format!("row {i}: {e}")))?;
        }
        Ok(Self { rows, identical_nucleons })
    }

    /// A single angle-independent row.
    pub fn constant(amps: InvariantAmplitudes) -> Self {
        Self { rows: vec![(FRAC_PI_2, amps)], identical_nucleons: false }
    }

    pub fn rows(&self) -> &[(f64, InvariantAmplitudes)] {
        &self.rows
    }

    pub fn identical_nucleons(&self) -> bool {
        self.identical_nucleons
    }

    /// Linear interpolation in angle; clamps outside the tabulated range.
    pub fn at(&self, theta: f64) -> InvariantAmplitudes {
        let rows = &self.rows;
        if theta <= rows[0].0 {
            return rows[0].1;
        }
        let last = rows.len() - 1;
        if theta >= rows[last].0 {
            return rows[last].1;
        }
        let hi = rows.partition_point(|(t, _)| *t < theta);
        let (t0, a0) = rows[hi - 1];
        let (t1, a1) = rows[hi];
        let w = (theta - t0) / (t1 - t0);
        let (x, y) = (a0.as_array(), a1.as_array());
        InvariantAmplitudes::from_array(std::array::from_fn(|k| x[k] * (1.0 - w) + y[k] * w))
    }

    /// Checks every identical-nucleon rule and returns the violations found.
    pub fn check_identical_nucleons(&self) -> SymmetryReport {
        let mut report = SymmetryReport::default();
        for (i, (theta, amps)) in self.rows.iter().enumerate() {
            let fmod = amps.f.norm();
            report.max_f = report.max_f.max(fmod);
            if fmod > SYMMETRY_TOL {
                report.violations.push(format!("F≡0 rule violated at row {i} (θ = {theta}, |F| = {fmod:e})"));
            }
        }
        for (i, (theta, amps)) in self.rows.iter().enumerate() {
            let mirror = PI - theta;
            let Some((j, (_, other))) =
                self.rows.iter().enumerate().find(|(_, (t, _))| (t - mirror).abs() <= SYMMETRY_TOL)
            else {
                continue;
            };
            if j < i {
                continue;
            }
            report.pairs_checked += 1;
            let (p, q) = (bell_coefficients(amps), bell_coefficients(other));
            let checks = [
                ("a(θ) = a(π−θ)", (p.a - q.a).norm()),
                ("b(θ) = −b(π−θ)", (p.b + q.b).norm()),
                ("c(θ) = −c(π−θ)", (p.c + q.c).norm()),
                ("d(θ) = −d(π−θ)", (p.d + q.d).norm()),
                ("E(θ) = E(π−θ)", (p.e - q.e).norm()),
            ];
            for (rule, residual) in checks {
                report.max_residual = report.max_residual.max(residual);
                if residual > SYMMETRY_TOL {
                    report
                        .violations
                        .push(format!("{rule} violated between rows {i} and {j} (residual {residual:e})"));
                }
            }
        }
        let mid = bell_coefficients(&self.at(FRAC_PI_2));
        report.max_mid_antisymmetric = [mid.b, mid.c, mid.d].iter().map(|c| c.norm()).fold(0.0, f64::max);
        report
    }
}

/// Findings of [`AmplitudeTable::check_identical_nucleons`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymmetryReport {
    pub pairs_checked: usize,
    pub max_f: f64,
    /// Largest residual over the five θ ↔ π−θ relations.
    pub max_residual: f64,
    /// Largest of `|b|, |c|, |d|` at θ = π/2.
    pub max_mid_antisymmetric: f64,
    pub violations: Vec<String>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates an identical-nucleon table at 90° and returns the reduced
/// operator, after confirming that `b, c, d` vanish there.
pub fn f_at_90_from_table(table: &AmplitudeTable) -> Result<SpinOperator> {
    let coeffs = bell_coefficients(&table.at(FRAC_PI_2));
    for (name, v) in [("b", coeffs.b), ("c", coeffs.c), ("d", coeffs.d)] {
        if v.norm() > SYMMETRY_TOL {
            return Err(Error::InvalidAmplitudes(format!("{name}(π/2) = {v} does not vanish")));
        }
    }
    Ok(f_at_90_identical(coeffs.a, coeffs.e))
}

/// Conjugation `U f U†` by a two-spin operator.
pub fn conjugate(f: &SpinOperator, u: &SpinOperator) -> SpinOperator {
    &(u * f) * &u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::spin_core::{rotation, spatial_rotation, ZERO};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn amps(v: [f64; 6]) -> InvariantAmplitudes {
        InvariantAmplitudes::from_array(v.map(re))
    }

    #[test]
    fn scalar_term_is_identity() {
        let f = build_f_invariant(&amps([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), &ScatterFrame::CANONICAL).unwrap();
        assert!(f.max_abs_diff(&SpinOperator::identity(4)) < EXACT_TOL);
    }

    #[test]
    fn isotropic_pair_term_eigenvalues() {
        let f = build_f_invariant(&amps([0.0, 2.0, 2.0, 2.0, 0.0, 0.0]), &ScatterFrame::CANONICAL).unwrap();
        for (o, lambda) in [
            (BellOutcome::PsiMinus, -1.5),
            (BellOutcome::PsiPlus, 0.5),
            (BellOutcome::PhiMinus, 0.5),
            (BellOutcome::PhiPlus, 0.5),
        ] {
            let ket = bell_ket(o);
            let out = f.apply(&ket).unwrap();
            for (x, k) in out.amplitudes.iter().zip(ket.amplitudes()) {
                assert!((x - k * lambda).norm() < EXACT_TOL, "{o}");
            }
        }
    }

    #[test]
    fn e_term_is_total_sz() {
        let f = build_f_invariant(&amps([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]), &ScatterFrame::CANONICAL).unwrap();
        assert!(f.max_abs_diff(&collective_operator(Collective::Sz)) < EXACT_TOL);
    }

    #[test]
    fn coefficient_relations() {
        let c = bell_coefficients(&amps([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        for o in BellOutcome::ALL {
            assert_eq!(c.coefficient(o), re(1.0));
        }
        let c = bell_coefficients(&amps([0.0, 2.0, 2.0, 2.0, 0.0, 0.0]));
        assert_eq!((c.a, c.b, c.c, c.d), (re(-1.5), re(0.5), re(0.5), re(0.5)));
        let c = bell_coefficients(&amps([0.0, 2.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!((c.a, c.b, c.c, c.d), (re(-0.5), re(0.5), re(-0.5), re(0.5)));
    }

    #[test]
    fn bell_form_special_cases() {
        let unit = BellCoefficients { a: re(1.0), b: re(1.0), c: re(1.0), d: re(1.0), ..Default::default() };
        assert!(build_f_bell(&unit).max_abs_diff(&SpinOperator::identity(4)) < EXACT_TOL);
        let single = BellCoefficients { a: re(1.0), ..Default::default() };
        assert!(build_f_bell(&single).max_abs_diff(&bell_projector(BellOutcome::PsiMinus)) < EXACT_TOL);
    }

    #[test]
    fn forms_agree_on_random_amplitudes() {
        let mut rng = stream(5, 0, 0);
        for _ in 0..100 {
            let a = InvariantAmplitudes::random(&mut rng);
            let inv = build_f_invariant(&a, &ScatterFrame::CANONICAL).unwrap();
            let bell = build_f_bell(&bell_coefficients(&a));
            assert!(inv.max_abs_diff(&bell) < EXACT_TOL);
        }
    }

    #[test]
    fn frame_validation() {
        assert!(ScatterFrame::new(UnitVector3::X, UnitVector3::Y, UnitVector3::Z).is_ok());
        // left-handed
        assert!(matches!(
            ScatterFrame::new(UnitVector3::Y, UnitVector3::X, UnitVector3::Z),
            Err(Error::InvalidFrame(_))
        ));
        let tilted = UnitVector3::normalize(1.0, 0.1, 0.0).unwrap();
        assert!(ScatterFrame::new(tilted, UnitVector3::Y, UnitVector3::Z).is_err());
    }

    #[test]
    fn frame_covariance() {
        let mut rng = stream(6, 0, 0);
        for k in 0..20 {
            let axis = UnitVector3::from_polar(0.3 + 0.1 * k as f64, 1.7 * k as f64);
            let angle = 0.4 + 0.3 * k as f64;
            let frame = ScatterFrame::CANONICAL.rotated(&spatial_rotation(&axis, angle)).unwrap();
            let r = rotation(&axis, angle).unwrap();
            let rr = r.kron(&r);
            let a = InvariantAmplitudes::random(&mut rng);
            let rotated_frame = build_f_invariant(&a, &frame).unwrap();
            let conjugated = conjugate(&build_f_invariant(&a, &ScatterFrame::CANONICAL).unwrap(), &rr);
            assert!(rotated_frame.max_abs_diff(&conjugated) < 1e-9);
        }
    }

    #[test]
    fn registration_examples() {
        let only_a = BellCoefficients { a: re(0.8), ..Default::default() };
        assert!(registration_condition(&only_a, BellOutcome::PsiMinus, 1e-6));
        assert!(!registration_condition(&only_a, BellOutcome::PsiPlus, 1e-6));
        let unit = BellCoefficients { a: re(1.0), b: re(1.0), c: re(1.0), d: re(1.0), ..Default::default() };
        for o in BellOutcome::ALL {
            assert!(!registration_condition(&unit, o, 1e-6));
        }
        let with_e = BellCoefficients { a: re(1.0), e: re(0.1), ..Default::default() };
        assert!(!registration_condition(&with_e, BellOutcome::PsiMinus, 1e-6));
    }

    #[test]
    fn f90_forms() {
        let a = Complex64::new(0.3, -0.2);
        let f = f_at_90_identical(a, ZERO);
        assert!(f.max_abs_diff(&bell_projector(BellOutcome::PsiMinus).scale(a)) < EXACT_TOL);
        let f = f_at_90_identical(ZERO, re(1.0));
        let out = f.apply_normalized(&bell_ket(BellOutcome::PhiPlus)).unwrap();
        assert!(out.max_abs_diff(&bell_ket(BellOutcome::PhiMinus)) < EXACT_TOL);
    }

    #[test]
    fn filter_examples() {
        let mut rng = stream(7, 0, 0);
        for _ in 0..50 {
            match scatter_filter(&bell_ket(BellOutcome::PhiPlus), &SpinOperator::identity(4), &mut rng).unwrap() {
                FilterResult::Detected { outcome, probability, .. } => {
                    assert_eq!(outcome, BellOutcome::PhiPlus);
                    assert!((probability - 1.0).abs() < EXACT_TOL);
                }
                FilterResult::NoEvent => panic!("identity never annihilates"),
            }
            let f = f_at_90_identical(re(0.7), re(0.7));
            match scatter_filter(&bell_ket(BellOutcome::PhiPlus), &f, &mut rng).unwrap() {
                FilterResult::Detected { outcome, .. } => assert_eq!(outcome, BellOutcome::PhiMinus),
                FilterResult::NoEvent => panic!("E term maps Φ+ to Φ−"),
            }
        }
        let none = scatter_filter(&bell_ket(BellOutcome::PsiPlus), &bell_projector(BellOutcome::PsiMinus), &mut rng).unwrap();
        assert_eq!(none, FilterResult::NoEvent);
    }

    fn symmetric_table(f_value: f64) -> AmplitudeTable {
        // Bell coefficients chosen with the required parities, then mapped
        // back to invariant amplitudes.
        let n = 13;
        let rows = (0..n)
            .map(|k| {
                let t = PI * k as f64 / (n - 1) as f64;
                let u = t - FRAC_PI_2;
                let bc = BellCoefficients {
                    a: Complex64::new(1.0 + u * u, 0.3 * u.cos()),
                    b: Complex64::new(u, 0.2 * u.powi(3)),
                    c: Complex64::new(0.5 * u.sin(), -u),
                    d: Complex64::new(-2.0 * u, 0.1 * u),
                    e: Complex64::new(0.4 * u.cos(), u * u),
                    f: re(f_value),
                };
                (t, invariant_from_bell(&bc))
            })
            .collect();
        AmplitudeTable::new(rows, true).unwrap()
    }

    /// Inverts the coefficient relations (test oracle).
    fn invariant_from_bell(bc: &BellCoefficients) -> InvariantAmplitudes {
        // b−a = (B+C)/2, c−a = (C+D)/2, d−a = (B+D)/2
        let (p, q, r) = (2.0 * (bc.b - bc.a), 2.0 * (bc.c - bc.a), 2.0 * (bc.d - bc.a));
        let big_b = (p - q + r) / 2.0;
        let big_c = (p + q - r) / 2.0;
        let big_d = (q + r - p) / 2.0;
        InvariantAmplitudes {
            a: bc.a + (big_b + big_c + big_d) / 4.0,
            b: big_b,
            c: big_c,
            d: big_d,
            e: bc.e,
            f: bc.f,
        }
    }

    #[test]
    fn symmetric_table_passes_and_reduces_at_90() {
        let table = symmetric_table(0.0);
        let report = table.check_identical_nucleons();
        assert!(report.passed(), "{:?}", report.violations);
        assert_eq!(report.pairs_checked, 7);
        assert!(report.max_mid_antisymmetric < SYMMETRY_TOL);
        let reduced = f_at_90_from_table(&table).unwrap();
        let full = build_f_bell(&bell_coefficients(&table.at(FRAC_PI_2)));
        assert!(reduced.max_abs_diff(&full) < SYMMETRY_TOL);
    }

    #[test]
    fn nonzero_f_names_the_rule() {
        let report = symmetric_table(0.25).check_identical_nucleons();
        assert!(!report.passed());
        assert!(report.violations.iter().any(|v| v.contains("F≡0")));
    }

    #[test]
    fn interpolation_is_linear() {
        let table = AmplitudeTable::new(
            vec![(0.0, amps([0.0; 6])), (1.0, amps([2.0, 4.0, 0.0, 0.0, 0.0, 1.0]))],
            false,
        )
        .unwrap();
        let mid = table.at(0.25);
        assert!((mid.a - re(0.5)).norm() < EXACT_TOL);
        assert!((mid.b - re(1.0)).norm() < EXACT_TOL);
        assert!((mid.f - re(0.25)).norm() < EXACT_TOL);
        assert_eq!(table.at(-1.0), table.rows()[0].1);
        assert_eq!(table.at(5.0), table.rows()[1].1);
    }

    #[test]
    fn table_rejects_unsorted_rows() {
        let r = AmplitudeTable::new(vec![(1.0, amps([0.0; 6])), (0.5, amps([0.0; 6]))], false);
        assert!(matches!(r, Err(Error::InvalidAmplitudes(_))));
    }
}
