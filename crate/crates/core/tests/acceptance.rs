//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails unless every criterion outside `EXPECTED_RED` passes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zeta_core::analytic::{self, delta_from_zeta, omega_prime_from_zeta};
use zeta_core::cli::{run_scenario, run_verify_suite, Scenario, VerifyOptions};
use zeta_core::control::{ControlProblem, Envelope, Phase};
use zeta_core::designer::clifford::{closure_failures, same_up_to_phase};
use zeta_core::designer::individual::evaluate_individual;
use zeta_core::designer::schedule::admissibility;
use zeta_core::designer::{
    build_st_gate, clifford_table, j_from_zeta, GateReport, PulseSchedule, StGate,
};
use zeta_core::linalg::{Unitary2, ONE, ZERO};
use zeta_core::metrics::gate_fidelity;
use zeta_core::oracle::{evolve_state, propagate_interval, HamiltonianSampler, DEFAULT_STEPS};
use zeta_core::zeta::{ZetaSeries, ZetaTerm};

/// The literal (A = −0.29, T = 0.95 μs) individual-control schedule gives
/// ∫Ω dt ≈ 3.97π and ξ₊(T) ≈ −4.50π, far from the NOT/identity pair. The
/// re-solved (A, T) reaching both gates is reported in the same line.
const EXPECTED_RED: &[&str] = &["individual_control_literal"];

const TWO_PI: f64 = 2.0 * PI;

struct Criterion {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn criterion(name: &'static str, passed: bool, detail: String) -> Criterion {
    Criterion { name, passed, detail }
}

fn scenario_file(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.toml"));
    Scenario::load(&path).unwrap()
}

fn oracle_equivalence() -> Criterion {
    let start = Instant::now();
    let summary = run_verify_suite(&VerifyOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let failures = summary.cases.iter().filter(|c| !c.passed).count();
    criterion(
        "oracle_equivalence",
        summary.passed && summary.cases.len() == 200 && elapsed < 60.0,
        format!(
            "200 cases, {failures} above 1e-6, max deviation {:.2e}, {elapsed:.1} s",
            summary.max_deviation
        ),
    )
}

fn rabi_reduction() -> Criterion {
    let omega = TWO_PI;
    let duration = 1.3;
    let series = ZetaSeries::constant(FRAC_PI_4, duration).unwrap();
    let problem = ControlProblem::sigma_z(Envelope::constant(omega), Phase::zero(), duration);
    let h = HamiltonianSampler::new("rabi", duration, {
        let (s, p) = (series.clone(), problem.clone());
        move |t| analytic::synthesized_hamiltonian(&s, &p, t)
    });
    let times = 100;
    let trace = evolve_state(&h, [ONE, ZERO], [ONE, ZERO], times + 1, DEFAULT_STEPS / times).unwrap();
    let mut worst: f64 = 0.0;
    for p in &trace[1..] {
        let area = omega * p.t;
        let u = analytic::propagator(&series, &problem, p.t).unwrap();
        let analytic_p1 = u.u21().norm_sqr();
        worst = worst
            .max((p.p0 - area.cos().powi(2)).abs())
            .max((p.p1 - area.sin().powi(2)).abs())
            .max((analytic_p1 - area.sin().powi(2)).abs());
    }
    criterion(
        "rabi_reduction",
        trace.len() == times + 1 && worst < 1e-9,
        format!("{times} times, worst population error {worst:.2e}"),
    )
}

fn landau_zener() -> Criterion {
    let (omega, duration) = (TWO_PI, 2.0);
    let mut returns = Vec::new();
    for eps in [0.1, 0.05, 0.02] {
        let series =
            ZetaSeries::new(eps, vec![ZetaTerm::new(2, FRAC_PI_4 - eps, 1)], duration).unwrap();
        let problem = ControlProblem::sigma_z(Envelope::constant(omega), Phase::zero(), duration);
        let schedule = PulseSchedule::synthesize(&series, &problem, 1001).unwrap();
        let u = propagate_interval(&schedule.hamiltonian(), 0.0, duration, 1 << 16).unwrap();
        returns.push(u.get(0, 0).norm_sqr());
    }
    let monotone = returns.windows(2).all(|w| w[1] > w[0]);
    criterion(
        "landau_zener_limit",
        monotone && returns[2] > 0.99,
        format!("|U11|^2 at eps = 0.1, 0.05, 0.02: {returns:.6?}"),
    )
}

fn not_gate(out: &Path) -> Criterion {
    let outcome = run_scenario(&scenario_file("fig1_not"), out).unwrap();
    let p1 = outcome.summary.checks.iter().find(|c| c.name == "final_p1").unwrap();
    criterion(
        "not_gate_sigma_z",
        p1.value >= 0.999,
        format!("P1(T) = {:.6} at T = 0.69 us, drive 2pi rad/us", p1.value),
    )
}

fn st_hadamard(out: &Path) -> Criterion {
    let outcome = run_scenario(&scenario_file("fig3_hadamard"), out).unwrap();
    let gate = &outcome.summary.gates[0];
    let [j0, jt] = outcome.summary.boundary;
    let h = TWO_PI;
    let a3 = outcome.summary.zeta.terms()[1].amplitude;
    criterion(
        "st_hadamard",
        gate.fidelity_numeric >= 0.999 && j0.abs() < 1e-6 * h && jt.abs() < 1e-6 * h,
        format!(
            "fidelity {:.12}, |J(0)| = {:.1e}, |J(T)| = {:.1e}, A3 = {a3:.5}",
            gate.fidelity_numeric,
            j0.abs(),
            jt.abs()
        ),
    )
}

fn xy_hadamard() -> Criterion {
    let s = scenario_file("fig2_hadamard");
    let problem = s.problem();
    let schedule = PulseSchedule::synthesize(&s.zeta, &problem, 1001).unwrap();
    let report = GateReport::evaluate(Unitary2::hadamard(), &[schedule], DEFAULT_STEPS).unwrap();
    let f = gate_fidelity(report.achieved_analytic.matrix(), report.achieved_numeric.matrix())
        .unwrap()
        .value;
    criterion(
        "hadamard_sigma_xy",
        f >= 0.999,
        format!("composed-frame vs oracle fidelity {f:.12}"),
    )
}

fn individual(delta: f64, amplitude: f64, duration: f64) -> (GateReport, GateReport, f64) {
    let series =
        ZetaSeries::new(FRAC_PI_8, vec![ZetaTerm::new(3, amplitude, 1)], duration).unwrap();
    evaluate_individual(&series, delta, Unitary2::not(), Unitary2::identity(), DEFAULT_STEPS)
        .unwrap()
}

fn individual_control_literal() -> Criterion {
    let (resonant, detuned, area) = individual(TWO_PI, -0.29, 0.95);
    let cal = scenario_file("fig4_individual");
    let a = cal.zeta.terms()[0].amplitude;
    let (r2, d2, area2) = individual(TWO_PI, a, cal.duration());
    criterion(
        "individual_control_literal",
        resonant.fidelity_numeric >= 0.999 && detuned.fidelity_numeric >= 0.999,
        format!(
            "A = -0.29, T = 0.95: area {:.3}pi, NOT {:.4}, I {:.2e}; re-solved A = {a:.5}, T = {:.5}: area {:.3}pi, NOT {:.12}, I {:.12}",
            area / PI,
            resonant.fidelity_numeric,
            detuned.fidelity_numeric,
            cal.duration(),
            area2 / PI,
            r2.fidelity_numeric,
            d2.fidelity_numeric
        ),
    )
}

fn square_pulse() -> Criterion {
    let delta = TWO_PI;
    let series = ZetaSeries::constant(FRAC_PI_6, 1.0).unwrap();
    let problem = ControlProblem::sigma_xy(Envelope::constant(delta), Phase::zero(), 1.0);
    let expected = delta / 3f64.sqrt();
    let mut worst: f64 = 0.0;
    for k in 0..=10 {
        let omega = omega_prime_from_zeta(&series, &problem, k as f64 / 10.0).unwrap();
        worst = worst.max((omega.abs() - expected).abs() / expected);
    }
    criterion(
        "square_pulse",
        worst < 1e-9,
        format!("|Omega'| = Delta/sqrt(3) to relative {worst:.1e}"),
    )
}

fn clifford() -> Criterion {
    let h = TWO_PI;
    let table = clifford_table(h, DEFAULT_STEPS).unwrap();
    let targets = table.targets();
    let distinct = (0..targets.len())
        .all(|i| (0..i).all(|j| !same_up_to_phase(&targets[i], &targets[j])));
    let failures = closure_failures(&targets);
    let min_f = table.min_fidelity();
    criterion(
        "clifford_closure",
        targets.len() == 24
            && distinct
            && failures == 0
            && min_f >= 0.999
            && table.max_endpoint < 1e-6 * h,
        format!(
            "{} distinct classes, {failures} closure failures in 24x24, min fidelity {min_f:.12}, max endpoint |J| {:.1e} h",
            targets.len(),
            table.max_endpoint / h
        ),
    )
}

fn specialization_identity() -> Criterion {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut compared, mut mismatches) = (0, 0);
    while compared < 1000 {
        let h = rng.gen_range(PI..4.0 * PI);
        let duration = rng.gen_range(0.5..1.5);
        let terms = (0..rng.gen_range(1..=2))
            .map(|_| {
                ZetaTerm::new(rng.gen_range(1..=3), rng.gen_range(-0.2..0.2), rng.gen_range(1..=4))
            })
            .collect();
        let series = ZetaSeries::new(rng.gen_range(0.2..1.3), terms, duration).unwrap();
        let problem = ControlProblem::sigma_z(Envelope::constant(h), Phase::zero(), duration);
        if !admissibility(&series, &problem).unwrap().admissible {
            continue;
        }
        for _ in 0..10 {
            let t = rng.gen_range(0.0..=duration);
            let j = j_from_zeta(&series, h, t).unwrap();
            let d = delta_from_zeta(&series, &problem, t).unwrap();
            if j.to_bits() != d.to_bits() {
                mismatches += 1;
            }
            compared += 1;
        }
    }
    criterion(
        "specialization_identity",
        mismatches == 0,
        format!("{compared} evaluations, {mismatches} bitwise mismatches"),
    )
}

fn calibration_reproduction() -> Criterion {
    let h = TWO_PI;
    let had = build_st_gate(StGate::Hadamard, h, DEFAULT_STEPS).unwrap();
    let rot = build_st_gate(StGate::XRotation(FRAC_PI_2), h, DEFAULT_STEPS).unwrap();
    let free = |d: &zeta_core::designer::st::StDesign| {
        let c = &d.calibrations[0];
        c.series.terms()[c.free_index].amplitude
    };
    let (a_h, a_x) = (free(&had), free(&rot));
    criterion(
        "calibration_reproduction",
        (a_h - 0.18).abs() <= 0.02 && (a_x - 0.24).abs() <= 0.02,
        format!("H: A3 = {a_h:.5} (0.18), x-rotation pi/2: A3 = {a_x:.5} (0.24)"),
    )
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let results = vec![
        oracle_equivalence(),
        rabi_reduction(),
        landau_zener(),
        not_gate(dir.path()),
        st_hadamard(dir.path()),
        xy_hadamard(),
        individual_control_literal(),
        square_pulse(),
        clifford(),
        specialization_identity(),
        calibration_reproduction(),
    ];
    for c in &results {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let note = if !c.passed && EXPECTED_RED.contains(&c.name) {
            " [expected]"
        } else {
            ""
        };
        println!("{tag} {}{note}: {}", c.name, c.detail);
    }
    let unexpected: Vec<&str> = results
        .iter()
        .filter(|c| !c.passed && !EXPECTED_RED.contains(&c.name))
        .map(|c| c.name)
        .collect();
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing criteria: {unexpected:?}");
        ExitCode::FAILURE
    }
}
