//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Each check carries its own independent oracle and a runtime cap.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use nuclear_teleport::bell_basis::{bell_ket, bell_projector, correlation_probability, discriminate_bell, BellOutcome};
use nuclear_teleport::cli::commands::bellscan_rows;
use nuclear_teleport::cli::RunConfig;
use nuclear_teleport::expsim::{
    causal_filter, run_experiment, EventRecord, ExperimentSetup, GeometryConfig, PolarizedTarget, SPEED_OF_LIGHT,
};
use nuclear_teleport::rng::{self, stream};
use nuclear_teleport::scattering::{
    bell_coefficients, build_f_bell, build_f_invariant, AmplitudeTable, InvariantAmplitudes, ScatterFrame,
};
use nuclear_teleport::spin_core::{spin_component, total_spin_component, SpinOperator, UnitVector3};
use nuclear_teleport::teleport::{
    bell_expansion, compose_three, fidelity, make_epr, pre_message_density, run_batch, run_protocol, Trial,
    UnknownState,
};

type Check = std::result::Result<String, String>;

const SEED: u64 = 0x5eed_2024;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_axis(rng: &mut rng::Stream) -> UnitVector3 {
    let z = 2.0 * rng::uniform(rng) - 1.0;
    UnitVector3::from_polar(z.acos(), 2.0 * PI * rng::uniform(rng))
}

/// `½ Σ_k |B_k⟩₁₃ |χ_k⟩₂` written out amplitude by amplitude.
fn four_term_oracle(a: Complex64, b: Complex64) -> Vec<Complex64> {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    // Bell kets over (particle 1, particle 3) in ↑↑, ↑↓, ↓↑, ↓↓ order
    let psi_m = [z, c(h, 0.0), c(-h, 0.0), z];
    let psi_p = [z, c(h, 0.0), c(h, 0.0), z];
    let phi_m = [c(h, 0.0), z, z, c(-h, 0.0)];
    let phi_p = [c(h, 0.0), z, z, c(h, 0.0)];
    let terms = [(psi_m, [a, b]), (psi_p, [a, -b]), (phi_m, [-b, -a]), (phi_p, [b, -a])];
    let mut out = vec![z; 8];
    for (bell, chi) in terms {
        for i1 in 0..2 {
            for i2 in 0..2 {
                for i3 in 0..2 {
                    out[(i1 << 2) | (i2 << 1) | i3] += bell[(i1 << 1) | i3] * chi[i2] * 0.5;
                }
            }
        }
    }
    out
}

fn criterion_1() -> Check {
    let mut rng = stream(SEED, 101, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let phi = UnknownState::random(&mut rng);
        let product = compose_three(&phi, &make_epr(BellOutcome::PsiMinus)).map_err(|e| e.to_string())?;
        let oracle = four_term_oracle(phi.a(), phi.b());
        let lib = bell_expansion(&phi);
        for ((p, o), l) in product.amplitudes().iter().zip(&oracle).zip(lib.amplitudes()) {
            worst = worst.max((p - o).norm()).max((p - l).norm());
        }
    }
    ensure(worst < 1e-12, || format!("max amplitude error {worst:e}"))?;
    Ok(format!("max amplitude error {worst:.2e} over 100 inputs"))
}

fn criterion_2() -> Check {
    const N: u64 = 10_000;
    let mut rng = stream(SEED, 102, 0);
    let mut histogram = [0u64; 4];
    let mut min_fid = f64::INFINITY;
    for _ in 0..N {
        let phi = UnknownState::random(&mut rng);
        match run_protocol(&phi, &mut rng, None).map_err(|e| e.to_string())? {
            Trial::Completed(rec) => {
                histogram[rec.outcome.index()] += 1;
                // oracle: |⟨φ|out⟩|² from raw amplitudes
                let o = rec.output.amplitudes();
                let f = (phi.a().conj() * o[0] + phi.b().conj() * o[1]).norm_sqr();
                min_fid = min_fid.min(f).min(fidelity(&phi.state(), &rec.output));
            }
            Trial::Discarded => return Err("ideal protocol discarded a trial".into()),
        }
    }
    let batch = run_batch(&UnknownState::random(&mut rng), BellOutcome::PsiMinus, None, N, SEED)
        .map_err(|e| e.to_string())?;
    min_fid = min_fid.min(batch.min_fidelity);
    let sigma = (N as f64 * 0.25 * 0.75).sqrt();
    for counts in [histogram, batch.histogram] {
        for (k, &n) in counts.iter().enumerate() {
            let dev = (n as f64 - N as f64 / 4.0).abs();
            ensure(n > 0, || format!("channel {k} never exercised"))?;
            ensure(dev <= 4.0 * sigma, || format!("channel {k} count {n} deviates {dev:.1} > 4σ"))?;
        }
    }
    ensure(min_fid >= 1.0 - 1e-12, || format!("min fidelity {min_fid}"))?;
    Ok(format!("histogram {histogram:?}, batch {:?}, min fidelity 1 - {:.1e}", batch.histogram, 1.0 - min_fid))
}

fn criterion_3() -> Check {
    let mut rng = stream(SEED, 103, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = random_axis(&mut rng);
        let s1 = spin_component(&n, 0, 2).map_err(|e| e.to_string())?;
        let s2 = spin_component(&n, 1, 2).map_err(|e| e.to_string())?;
        let total = total_spin_component(&n).map_err(|e| e.to_string())?;
        let lhs = &s1 * &s2;
        let rhs = (&(&total * &total) - &SpinOperator::identity(4).scale(c(0.5, 0.0))).scale(c(0.5, 0.0));
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    ensure(worst < 1e-12, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.2e} over 100 axes"))
}

/// Eigenvalue of `A + B σ₁ˣσ₂ˣ/4 + C σ₁ʸσ₂ʸ/4 + D σ₁ᶻσ₂ᶻ/4` on each Bell
/// state, from the sign table of `σᵢσᵢ` on Bell states.
fn eigen_oracle(amps: &InvariantAmplitudes, o: BellOutcome) -> Complex64 {
    let (sx, sy, sz) = match o {
        BellOutcome::PsiMinus => (-1.0, -1.0, -1.0),
        BellOutcome::PsiPlus => (1.0, 1.0, -1.0),
        BellOutcome::PhiMinus => (-1.0, 1.0, 1.0),
        BellOutcome::PhiPlus => (1.0, -1.0, 1.0),
    };
    amps.a + (amps.b * sx + amps.c * sy + amps.d * sz) / 4.0
}

fn criterion_4() -> Check {
    let mut rng = stream(SEED, 104, 0);
    let (mut form, mut eig) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let amps = InvariantAmplitudes::random(&mut rng);
        let inv = build_f_invariant(&amps, &ScatterFrame::CANONICAL).map_err(|e| e.to_string())?;
        form = form.max(inv.max_abs_diff(&build_f_bell(&bell_coefficients(&amps))));

        let diag = InvariantAmplitudes { e: c(0.0, 0.0), f: c(0.0, 0.0), ..amps };
        let f = build_f_invariant(&diag, &ScatterFrame::CANONICAL).map_err(|e| e.to_string())?;
        let coeffs = bell_coefficients(&diag);
        for o in BellOutcome::ALL {
            let ket = bell_ket(o);
            let image = f.apply(&ket).map_err(|e| e.to_string())?;
            let want = eigen_oracle(&diag, o);
            eig = eig.max((coeffs.coefficient(o) - want).norm());
            for (x, k) in image.amplitudes.iter().zip(ket.amplitudes()) {
                eig = eig.max((x - want * k).norm());
            }
        }
    }
    ensure(form < 1e-12, || format!("form residual {form:e}"))?;
    ensure(eig < 1e-12, || format!("eigenvector residual {eig:e}"))?;
    Ok(format!("form residual {form:.2e}, eigen residual {eig:.2e} over 1000 sets"))
}

fn criterion_5() -> Check {
    // symmetric Bell coefficients, inverted to invariant amplitudes
    let rows: Vec<(f64, InvariantAmplitudes)> = (0..=24)
        .map(|i| {
            let th = PI * i as f64 / 24.0;
            let x = th.cos();
            let a = c(0.9 + 0.4 * x * x, 0.3 - 0.1 * x * x);
            let b = c(0.6 * x, -0.2 * x);
            let cc = c(-0.3 * x + 0.1 * x.powi(3), 0.4 * x);
            let d = c(0.2 * x, 0.1 * x.powi(3));
            let e = c(0.5 * th.sin(), 0.05);
            let amps = InvariantAmplitudes {
                a: a + (b + cc + d - a * 3.0) / 4.0,
                b: b - cc + d - a,
                c: b + cc - d - a,
                d: -b + cc + d - a,
                e,
                f: c(0.0, 0.0),
            };
            (th, amps)
        })
        .collect();
    let table = AmplitudeTable::new(rows, true).map_err(|e| e.to_string())?;
    let report = table.check_identical_nucleons();
    ensure(report.passed(), || format!("violations: {:?}", report.violations))?;
    ensure(report.pairs_checked == 13, || format!("{} mirror pairs checked", report.pairs_checked))?;

    let mut worst = 0.0f64;
    for (i, (_, p)) in table.rows().iter().enumerate() {
        let q = &table.rows()[24 - i].1;
        let (p, q) = (bell_coefficients(p), bell_coefficients(q));
        for r in [(p.a - q.a), (p.b + q.b), (p.c + q.c), (p.d + q.d), (p.e - q.e), p.f] {
            worst = worst.max(r.norm());
        }
    }
    ensure(worst < 1e-9, || format!("symmetry residual {worst:e}"))?;

    let mid = table.at(FRAC_PI_2);
    let coeffs = bell_coefficients(&mid);
    let full = build_f_invariant(&mid, &ScatterFrame::CANONICAL).map_err(|e| e.to_string())?;
    let (pm, pp) = (bell_ket(BellOutcome::PhiMinus), bell_ket(BellOutcome::PhiPlus));
    let swap = &SpinOperator::outer(&pm, &pp).map_err(|e| e.to_string())?
        + &SpinOperator::outer(&pp, &pm).map_err(|e| e.to_string())?;
    let reduced = &bell_projector(BellOutcome::PsiMinus).scale(coeffs.a) + &swap.scale(coeffs.e);
    let d = full.max_abs_diff(&reduced);
    ensure(d < 1e-9, || format!("θ = π/2 residual {d:e}"))?;
    Ok(format!("symmetry residual {worst:.2e}, θ = π/2 residual {d:.2e}"))
}

fn criterion_6() -> Check {
    let mut rng = stream(SEED, 106, 0);
    let singlet = bell_ket(BellOutcome::PsiMinus);
    let mut singlet_dev = 0.0f64;
    for _ in 0..100 {
        let n = random_axis(&mut rng);
        let p = correlation_probability(&singlet, &n, &n).map_err(|e| e.to_string())?;
        singlet_dev = singlet_dev.max((p - 1.0).abs());
    }
    ensure(singlet_dev < 1e-12, || format!("singlet anticorrelation off by {singlet_dev:e}"))?;

    let mut cfg = RunConfig::default();
    cfg.seed = SEED;
    cfg.bellscan.grid_points = 19;
    cfg.bellscan.samples_per_point = 100_000;
    let rows = bellscan_rows(&cfg).map_err(|e| e.to_string())?;
    let mut law = 0.0f64;
    let mut worst_z = 0.0f64;
    for r in &rows {
        let oracle = r.theta.cos().powi(2);
        law = law.max((r.analytic - oracle).abs());
        let dev = (r.mc_frequency - r.analytic).abs();
        ensure(dev <= 4.0 * r.mc_sigma, || format!("θ = {:.4}: MC {} vs {} (σ {:e})", r.theta, r.mc_frequency, r.analytic, r.mc_sigma))?;
        if r.mc_sigma > 0.0 {
            worst_z = worst_z.max(dev / r.mc_sigma);
        }
    }
    ensure(law < 1e-12, || format!("cos²θ law residual {law:e}"))?;
    Ok(format!("singlet dev {singlet_dev:.1e}, cos²θ residual {law:.1e}, worst MC pull {worst_z:.2}σ"))
}

fn criterion_7() -> Check {
    const TRIALS: u64 = 10_000;
    for (k, state) in BellOutcome::ALL.into_iter().enumerate() {
        let ket = bell_ket(state);
        let errors: Vec<(u64, BellOutcome)> = (0..TRIALS)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream(SEED, rng::DOMAIN_DISCRIMINATE, k as u64 * TRIALS + t);
                let d = discriminate_bell(std::iter::repeat(ket.clone()), 64, &mut rng).expect("valid source");
                (t, d)
            })
            .filter_map(|(t, d)| (d.estimate != state).then_some((t, d.estimate)))
            .collect();
        ensure(errors.is_empty(), || format!("{state}: {} misidentifications, first {:?}", errors.len(), errors[0]))?;
    }
    Ok(format!("0 errors in {} runs of 64 copies", 4 * TRIALS))
}

fn synthetic_event(id: u64, t1: f64, t2: f64) -> EventRecord {
    EventRecord {
        event_id: id,
        t_start: 0.0,
        t_ph2: 0.0,
        t_k: 0.0,
        t_f1: Some(t1),
        t_f2: Some(t2),
        outcome: Some(BellOutcome::PsiMinus),
        side: None,
        normal_index: 0,
        causal_separated: false,
        accepted: true,
    }
}

fn criterion_8() -> Check {
    let setup = ExperimentSetup::default();
    let target = PolarizedTarget::from_bloch(&UnitVector3::Y);
    let run = run_experiment(&setup, &target, &bell_projector(BellOutcome::PsiMinus), 1_000_000, SEED)
        .map_err(|e| e.to_string())?;
    let y = run.summary.orientations[1].asymmetry.ok_or("no y asymmetry")?;
    ensure((y.epsilon - 0.5).abs() <= 3.0 * y.sigma, || format!("ε_y = {} ± {}", y.epsilon, y.sigma))?;
    let rec = run.summary.reconstruction.as_ref().ok_or("no reconstruction")?;
    for (k, want) in [0.0, 1.0, 0.0].into_iter().enumerate() {
        let (p, s) = (rec.polarization[k], rec.sigma[k]);
        ensure((p - want).abs() <= 3.0 * s, || format!("component {k}: {p} ± {s}, want {want}"))?;
    }

    // F-1 and F-2 10 m apart, Δt = i ns: retained iff c·i·1e-9 < 10, i.e. i ≤ 33
    let geometry = GeometryConfig {
        f1: [0.0, 0.0, 0.0],
        f2: [10.0, 0.0, 0.0],
        lh2_target: [5.0, 5.0, 0.0],
        ph2_target: [0.0, 5.0, 0.0],
        analyzer: [10.0, 5.0, 0.0],
        ..GeometryConfig::default()
    };
    let events: Vec<EventRecord> =
        (0..100).map(|i| synthetic_event(i, 1e-6, 1e-6 + i as f64 * 1e-9)).collect();
    let kept = causal_filter(&events, &geometry);
    let hand = (0..100u64).filter(|&i| (i as f64) < 10.0 / (SPEED_OF_LIGHT * 1e-9)).count();
    ensure(hand == 34 && kept.len() == 34, || format!("kept {} events, hand count {hand}", kept.len()))?;
    ensure(kept.iter().map(|e| e.event_id).eq(0..34), || "wrong events retained".into())?;
    Ok(format!(
        "ε_y = {:.4} ± {:.4}, p = ({:.4}, {:.4}, {:.4}), causal kept 34/100",
        y.epsilon, y.sigma, rec.polarization[0], rec.polarization[1], rec.polarization[2]
    ))
}

fn criterion_9() -> Check {
    let mut rng = stream(SEED, 109, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let phi = UnknownState::random(&mut rng);
        let rho = pre_message_density(&phi, BellOutcome::PsiMinus).map_err(|e| e.to_string())?;
        for (r, row) in rho.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let want = if r == k { 0.5 } else { 0.0 };
                worst = worst.max((v - c(want, 0.0)).norm());
            }
        }
    }
    ensure(worst < 1e-12, || format!("max deviation from 1/2 {worst:e}"))?;
    Ok(format!("max deviation from maximally mixed {worst:.2e} over 100 inputs"))
}

fn run_cli(dir: &Path, threads: usize) -> std::result::Result<(Vec<u8>, Vec<u8>), String> {
    let out = dir.join(format!("threads{threads}"));
    let status = Command::new(env!("CARGO_BIN_EXE_nuclear-teleport"))
        .arg("--config")
        .arg(dir.join("run.toml"))
        .args(["--seed", "99", "--threads", &threads.to_string(), "--out"])
        .arg(&out)
        .arg("experiment")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("exit {:?}: {}", status.status, String::from_utf8_lossy(&status.stderr)))?;
    let read = |name: &str| std::fs::read(out.join(name)).map_err(|e| e.to_string());
    Ok((read("events.csv")?, read("summary.json")?))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = "schema_version = 1\n[experiment]\nevents = 20000\nsinglet_acceptance = 0.5\nevent_spacing_s = 2.0e-8\n\
                  [experiment.detectors]\nefficiency_f1 = 0.7\njitter_s = 1.0e-9\n";
    std::fs::write(dir.path().join("run.toml"), config).map_err(|e| e.to_string())?;
    let one = run_cli(dir.path(), 1)?;
    let four = run_cli(dir.path(), 4)?;
    let seven = run_cli(dir.path(), 7)?;
    ensure(one == four && one == seven, || "outputs differ across --threads".into())?;
    Ok(format!("events.csv ({} bytes) and summary.json identical for 1, 4, 7 threads", one.0.len()))
}

fn main() {
    let criteria: [(&str, Option<u64>, fn() -> Check); 10] = [
        ("bell-expansion identity", Some(1), criterion_1),
        ("teleportation fidelity", Some(5), criterion_2),
        ("pair-product operator identity", Some(1), criterion_3),
        ("invariant vs Bell-projector form", Some(5), criterion_4),
        ("identical-nucleon symmetry", Some(1), criterion_5),
        ("correlation laws", Some(30), criterion_6),
        ("Bell discrimination", Some(30), criterion_7),
        ("experiment pipeline", Some(60), criterion_8),
        ("no-signaling bookkeeping", Some(1), criterion_9),
        ("determinism across thread counts", None, criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(s) => {
                Err(format!("took {:.2} s, limit {s} s", elapsed.as_secs_f64()))
            }
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS  {:>2}  {name}: {detail} [{:.2} s]", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("FAIL  {:>2}  {name}: {why} [{:.2} s]", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
