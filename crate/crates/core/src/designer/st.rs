//! Singlet-triplet qubit, `H = h·σx + J(t)·σz` with fixed h.
//!
//! This is the σz problem with Ω ≡ h and φ ≡ 0, so J(t) is the detuning
//! formula specialized to a constant rate. For a series built from
//! integer-frequency sine powers, ζ(T) = ζ(0) and the U₀ phases cancel at the
//! endpoints: the gate is `exp[−i·ξ·(sin 2ζ₀·σx − cos 2ζ₀·σz)]` with ξ = ξ±(T).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::analytic::slope_factor;
use crate::error::{Error, Result};
use crate::linalg::Unitary2;
use crate::zeta::{ZetaSeries, ZetaTerm};

use super::calibrate::{calibrate_near, Calibration, Objective};
use super::schedule::{st_problem, PulseSchedule, DEFAULT_POINTS};
use super::GateReport;

/// Reference h (rad/μs) at which the template durations below are quoted.
pub const REFERENCE_H: f64 = 2.0 * PI;
/// Hadamard duration at [`REFERENCE_H`].
pub const HADAMARD_DURATION: f64 = 0.942;
/// NOT duration at [`REFERENCE_H`].
pub const NOT_DURATION: f64 = 0.69;
/// Ratio ξ(T)/(h·T) used to size x-rotations on the π/4 plateau.
pub const ROTATION_PHASE_RATIO: f64 = 1.03;
const CALIBRATION_STEP: f64 = 0.01;

/// Exchange J(t) = ζ̈/(2h·c) − h·c·cot 2ζ, c = √(1 − ζ̇²/h²).
pub fn j_from_zeta(series: &ZetaSeries, h: f64, t: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidEnvelope { t, value: h });
    }
    let p = series.eval(t)?;
    let c = slope_factor(&p, h, t)?;
    Ok(p.ddot / (2.0 * h * c) - h * c / (2.0 * p.zeta).tan())
}

/// Set the amplitude of the first n = 2 term so that J(0) = 0, i.e.
/// ζ̈(0) = 2h²·cot 2ζ(0). Requires ζ̇(0) = 0. Sine powers with integer
/// frequency repeat their endpoint values at T, so J(T) vanishes as well.
pub fn repair_endpoints(series: &ZetaSeries, h: f64) -> Result<ZetaSeries> {
    let start = series.eval(0.0)?;
    if start.dot != 0.0 {
        return Err(Error::InvalidSeries(format!(
            "endpoint repair needs ζ̇(0) = 0, got {}",
            start.dot
        )));
    }
    let required = 2.0 * h * h / (2.0 * start.zeta).tan();
    let Some(index) = series.terms().iter().position(|t| t.power == 2) else {
        if (required - start.ddot).abs() <= 1e-12 * h * h {
            return Ok(series.clone());
        }
        return Err(Error::InvalidSeries(
            "endpoint repair needs a squared-sine term".into(),
        ));
    };
    let without = series.with_amplitude(index, 0.0)?;
    let rest = without.eval(0.0)?.ddot;
    let w = series.terms()[index].frequency as f64 * PI / series.duration();
    series.with_amplitude(index, (required - rest) / (2.0 * w * w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", content = "angle", rename_all = "snake_case")]
pub enum StGate {
    Hadamard,
    S,
    T,
    Not,
    /// Rx(θ) = exp(−iθσx/2).
    XRotation(f64),
}

impl StGate {
    pub fn target(self) -> Unitary2 {
        match self {
            StGate::Hadamard => Unitary2::hadamard(),
            StGate::S => Unitary2::s_gate(),
            StGate::T => Unitary2::t_gate(),
            StGate::Not => Unitary2::not(),
            StGate::XRotation(angle) => Unitary2::rx(angle),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StDesign {
    pub gate: StGate,
    pub h: f64,
    /// Applied in order.
    pub schedules: Vec<PulseSchedule>,
    pub calibrations: Vec<Calibration>,
    pub report: GateReport,
}

fn scaled(duration: f64, h: f64) -> f64 {
    duration * REFERENCE_H / h
}

fn calibrated_schedule(
    template: ZetaSeries,
    free: usize,
    h: f64,
    target_xi: f64,
) -> Result<(PulseSchedule, Calibration)> {
    let template = repair_endpoints(&template, h)?;
    let problem = st_problem(h, template.duration());
    let cal = calibrate_near(
        &template,
        free,
        &problem,
        Objective::XiPlusAtT,
        target_xi,
        CALIBRATION_STEP,
    )?;
    let schedule = PulseSchedule::synthesize_exchange(&cal.series, h, DEFAULT_POINTS)?;
    Ok((schedule, cal))
}

/// π rotation about (x + z)/√2: plateau ζ₀ = 3π/8, ξ(T) = π/2 mod π.
pub fn hadamard_schedule(h: f64) -> Result<(PulseSchedule, Calibration)> {
    let template = ZetaSeries::new(
        3.0 * PI / 8.0,
        vec![ZetaTerm::new(2, 0.0, 4), ZetaTerm::new(3, 0.18, 1)],
        scaled(HADAMARD_DURATION, h),
    )?;
    calibrated_schedule(template, 1, h, FRAC_PI_2)
}

/// Rx(θ) on the ζ₀ = π/4 plateau, ξ(T) = θ/2 mod π. The duration is chosen
/// so that the calibrated phase exceeds the plateau phase h·T by the factor
/// [`ROTATION_PHASE_RATIO`] on the branch one half-turn above θ/2.
pub fn x_rotation_schedule(angle: f64, h: f64) -> Result<(PulseSchedule, Calibration)> {
    let branch = (angle / 2.0).rem_euclid(PI) + PI;
    let duration = branch / (ROTATION_PHASE_RATIO * h);
    let template = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(3, 0.24, 1)], duration)?;
    calibrated_schedule(template, 0, h, angle / 2.0)
}

/// Rx(π) from the negative-amplitude family on the π/4 plateau.
pub fn not_schedule(h: f64) -> Result<(PulseSchedule, Calibration)> {
    let template = ZetaSeries::new(
        FRAC_PI_4,
        vec![ZetaTerm::new(3, -0.38, 1)],
        scaled(NOT_DURATION, h),
    )?;
    calibrated_schedule(template, 0, h, FRAC_PI_2)
}

/// Calibrated schedules for `gate`. S and T are `H·Rx(ξ)·H` sequences.
pub fn build_st_gate(gate: StGate, h: f64, steps: usize) -> Result<StDesign> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
    }
    let conjugated = |angle: f64| -> Result<(Vec<PulseSchedule>, Vec<Calibration>)> {
        let (hs, hc) = hadamard_schedule(h)?;
        let (rs, rc) = x_rotation_schedule(angle, h)?;
        Ok((vec![hs.clone(), rs, hs], vec![hc, rc]))
    };
    let (schedules, calibrations) = match gate {
        StGate::Hadamard => {
            let (s, c) = hadamard_schedule(h)?;
            (vec![s], vec![c])
        }
        StGate::Not => {
            let (s, c) = not_schedule(h)?;
            (vec![s], vec![c])
        }
        StGate::XRotation(angle) => {
            let (s, c) = x_rotation_schedule(angle, h)?;
            (vec![s], vec![c])
        }
        StGate::S => conjugated(FRAC_PI_2)?,
        StGate::T => conjugated(FRAC_PI_4)?,
    };
    let report = GateReport::evaluate(gate.target(), &schedules, steps)?;
    Ok(StDesign {
        gate,
        h,
        schedules,
        calibrations,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::delta_from_zeta;
    use crate::linalg::phase_aligned_distance;

    const H: f64 = REFERENCE_H;

    #[test]
    fn plateau_values() {
        let flat = ZetaSeries::constant(FRAC_PI_4, 1.0).unwrap();
        assert!(j_from_zeta(&flat, H, 0.3).unwrap().abs() < 1e-14);
        let tilted = ZetaSeries::constant(3.0 * PI / 8.0, 1.0).unwrap();
        assert!((j_from_zeta(&tilted, H, 0.3).unwrap() - H).abs() < 1e-12);
    }

    #[test]
    fn matches_detuning_formula() {
        let s = ZetaSeries::new(
            1.0,
            vec![ZetaTerm::new(2, -0.1, 3), ZetaTerm::new(3, 0.2, 1)],
            0.9,
        )
        .unwrap();
        let problem = st_problem(H, 0.9);
        for k in 0..=30 {
            let t = 0.03 * k as f64;
            assert_eq!(j_from_zeta(&s, H, t).unwrap(), delta_from_zeta(&s, &problem, t).unwrap());
        }
    }

    #[test]
    fn repair_zeroes_both_endpoints() {
        let template = ZetaSeries::new(
            3.0 * PI / 8.0,
            vec![ZetaTerm::new(2, 0.0, 4), ZetaTerm::new(3, 0.18, 1)],
            HADAMARD_DURATION,
        )
        .unwrap();
        let repaired = repair_endpoints(&template, H).unwrap();
        let a2 = repaired.terms()[0].amplitude;
        // −h²·T²/(4π)² at ζ₀ = 3π/8
        let expected = -(H * HADAMARD_DURATION / (4.0 * PI)).powi(2);
        assert!((a2 - expected).abs() < 1e-14);
        assert!((a2 + 0.22).abs() < 0.005);
        for t in [0.0, HADAMARD_DURATION] {
            assert!(j_from_zeta(&repaired, H, t).unwrap().abs() < 1e-12 * H);
        }
    }

    #[test]
    fn repair_requires_flat_start() {
        let s = ZetaSeries::new(1.0, vec![ZetaTerm::new(1, 0.1, 1)], 1.0).unwrap();
        assert!(repair_endpoints(&s, H).is_err());
    }

    #[test]
    fn hadamard_calibrates_near_reference() {
        let (schedule, cal) = hadamard_schedule(H).unwrap();
        let a3 = cal.series.terms()[1].amplitude;
        assert!((a3 - 0.18).abs() < 0.02, "{a3}");
        let (j0, jt) = schedule.boundary_residuals();
        assert!(j0.abs() < 1e-6 * H && jt.abs() < 1e-6 * H);
        let u = schedule.analytic_unitary().unwrap();
        assert!(phase_aligned_distance(u.matrix(), Unitary2::hadamard().matrix()) < 1e-6);
    }

    #[test]
    fn quarter_turn_calibrates_near_reference() {
        let (_, cal) = x_rotation_schedule(FRAC_PI_2, H).unwrap();
        let a3 = cal.series.terms()[0].amplitude;
        assert!((a3 - 0.24).abs() < 0.02, "{a3}");
    }

    #[test]
    fn durations_scale_inversely_with_h() {
        let (a, _) = hadamard_schedule(H).unwrap();
        let (b, _) = hadamard_schedule(2.0 * H).unwrap();
        assert!((a.duration() - 2.0 * b.duration()).abs() < 1e-12);
    }
}
