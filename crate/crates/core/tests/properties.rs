use std::f64::consts::PI;

use proptest::prelude::*;

use zeta_core::analytic;
use zeta_core::control::{ControlProblem, Envelope, Phase};
use zeta_core::designer::calibrate::{calibrate_near, lift_branch, Objective};
use zeta_core::designer::schedule::admissibility;
use zeta_core::linalg::phase_aligned_distance;
use zeta_core::oracle::{propagate_interval, HamiltonianSampler};
use zeta_core::zeta::{ZetaSeries, ZetaTerm};

fn series_strategy() -> impl Strategy<Value = ZetaSeries> {
    (
        0.4..1.1f64,
        0.5..1.2f64,
        proptest::collection::vec((1u32..=3, -0.1..0.1f64, 1u32..=3), 1..=2),
    )
        .prop_map(|(a0, t, terms)| {
            let terms = terms.into_iter().map(|(n, a, f)| ZetaTerm::new(n, a, f)).collect();
            ZetaSeries::new(a0, terms, t).unwrap()
        })
}

fn oracle(series: &ZetaSeries, problem: &ControlProblem, steps: usize) -> zeta_core::linalg::Mat2 {
    let (s, p) = (series.clone(), problem.clone());
    let h = HamiltonianSampler::new("prop", problem.duration, move |t| {
        analytic::synthesized_hamiltonian(&s, &p, t)
    });
    propagate_interval(&h, 0.0, problem.duration, steps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sigma_xy_closed_form_matches_oracle(
        series in series_strategy(),
        detuning in 2.0 * PI..4.0 * PI,
        phi_amp in 0.0..1.0f64,
    ) {
        let t = series.duration();
        let phase = Phase::Sine { amplitude: phi_amp, angular_frequency: 2.0 * PI / t, offset: 0.0 };
        let problem = ControlProblem::sigma_xy(Envelope::constant(detuning), phase, t);
        prop_assume!(admissibility(&series, &problem).unwrap().admissible);
        let u = analytic::propagator(&series, &problem, t).unwrap();
        let d = phase_aligned_distance(u.matrix(), &oracle(&series, &problem, 1 << 13));
        prop_assert!(d < 1e-5, "deviation {d}");
    }

    #[test]
    fn analytic_propagator_is_unitary_along_the_pulse(
        series in series_strategy(),
        omega in 2.0 * PI..4.0 * PI,
        frac in 0.0..=1.0f64,
    ) {
        let t = series.duration();
        let problem = ControlProblem::sigma_z(Envelope::constant(omega), Phase::zero(), t);
        prop_assume!(admissibility(&series, &problem).unwrap().admissible);
        let u = analytic::propagator(&series, &problem, frac * t).unwrap();
        prop_assert!(u.defect() < 1e-12);
    }

    #[test]
    fn calibration_hits_lifted_target(target in 0.0..PI, a in -0.05..0.05f64) {
        let series = ZetaSeries::new(PI / 4.0, vec![ZetaTerm::new(3, a, 1)], 0.7).unwrap();
        let problem = ControlProblem::sigma_z(Envelope::constant(2.0 * PI), Phase::zero(), 0.7);
        let cal = calibrate_near(&series, 0, &problem, Objective::XiMinusAtT, target, 0.01);
        if let Ok(cal) = cal {
            let achieved = Objective::XiMinusAtT.evaluate(&cal.series, &problem).unwrap();
            prop_assert!((achieved - cal.target).abs() < 1e-8);
            prop_assert!((lift_branch(target, achieved) - cal.target).abs() < 1e-12);
        }
    }
}
