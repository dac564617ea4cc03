//! One pulse driving two transitions: a resonant pair sees
//! `H_r = Ω(t)·σx` and a pair detuned by Δ sees `H_d = Δ·σz + Ω(t)·σx`.
//!
//! Ω(t) is the σx/y-synthesized amplitude for ζ(t) = ζ₀ + A·sin³(πt/T) with
//! Δ′ = Δ and φ = 0. The resonant pair then rotates by the Bloch angle
//! 2∫Ω dt about x, and the detuned pair ends at
//! `cos ξ + i·sin ξ·(sin 2ζ₀·σz + cos 2ζ₀·σx)` with ξ = ξ₊(T).

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, omega_prime_from_zeta};
use crate::control::{ControlProblem, Envelope, Phase};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Unitary2};
use crate::oracle::{propagate_numeric, HamiltonianSampler};
use crate::rootfind::{solve_bracketed, RootOptions};
use crate::zeta::{ZetaSeries, ZetaTerm};

use super::calibrate::{
    bracket_near, calibrate_near_on_branch, lift_branch, pulse_area, Objective, CALIBRATION_TOL,
};
use super::schedule::{PulseSchedule, DEFAULT_POINTS};
use super::GateReport;

/// Mean of sin³ over one half period, 4/(3π).
const SIN3_MEAN: f64 = 4.0 / (3.0 * PI);
const BRANCH_TRIES: usize = 3;
const AMPLITUDE_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "zeta0", rename_all = "snake_case")]
pub enum Variant {
    /// ζ₀ = π/4: the detuned pair picks up diag(e^{iξ}, e^{−iξ}).
    PhaseGate,
    /// ζ₀ = π/6.
    XRotation,
    /// Any other plateau value.
    Boundary(f64),
}

impl Variant {
    pub fn boundary(self) -> f64 {
        match self {
            Variant::PhaseGate => FRAC_PI_4,
            Variant::XRotation => FRAC_PI_6,
            Variant::Boundary(z) => z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndividualTargets {
    /// Bloch rotation angle of the resonant pair; ∫Ω dt is half of it.
    pub pulse_area: f64,
    /// ξ of the detuned pair.
    pub detuned_phase: f64,
}

/// Starting point of the two-parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndividualGuess {
    pub amplitude: f64,
    pub duration: f64,
}

impl IndividualGuess {
    /// Small-amplitude estimates: the plateau solution when ζ₀ ≠ π/4,
    /// otherwise two detuned periods with the amplitude that supplies the
    /// area through the cot(2ζ) term.
    pub fn default_for(variant: Variant, targets: &IndividualTargets, delta: f64) -> Self {
        let z = variant.boundary();
        let d = delta.abs();
        let half = (targets.pulse_area / 2.0).abs();
        let cot = 1.0 / (2.0 * z).tan();
        if cot.abs() > 1e-3 {
            IndividualGuess {
                amplitude: 0.0,
                duration: half / (d * cot.abs()),
            }
        } else {
            let duration = 2.0 * PI / d;
            IndividualGuess {
                amplitude: -half / (2.0 * d * duration * SIN3_MEAN),
                duration,
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct IndividualDesign {
    pub variant: Variant,
    pub delta: f64,
    pub targets: IndividualTargets,
    pub schedule: PulseSchedule,
    pub amplitude: f64,
    pub duration: f64,
    /// ∫₀ᵀ Ω dt.
    pub area: f64,
    /// ξ₊(T) of the detuned pair.
    pub xi: f64,
    pub predicted_resonant: Unitary2,
    pub predicted_detuned: Unitary2,
    pub resonant: GateReport,
    pub detuned: GateReport,
}

pub fn individual_problem(delta: f64, duration: f64) -> ControlProblem {
    ControlProblem::sigma_xy(Envelope::constant(delta), Phase::zero(), duration)
}

pub fn individual_series(zeta0: f64, amplitude: f64, duration: f64) -> Result<ZetaSeries> {
    ZetaSeries::new(zeta0, vec![ZetaTerm::new(3, amplitude, 1)], duration)
}

/// exp(−i·area·σx).
pub fn resonant_form(area: f64) -> Unitary2 {
    Unitary2::rx(2.0 * area)
}

/// `cos ξ + i·sin ξ·(sin 2ζ₀·σz + cos 2ζ₀·σx)`.
pub fn detuned_form(zeta0: f64, xi: f64) -> Unitary2 {
    let (s, c) = xi.sin_cos();
    let (s2, c2) = (2.0 * zeta0).sin_cos();
    let m = Mat2::new(
        Complex64::new(c, s * s2),
        Complex64::new(0.0, s * c2),
        Complex64::new(0.0, s * c2),
        Complex64::new(c, -s * s2),
    );
    Unitary2::new(m).expect("closed form is unitary")
}

/// `Ω(t)·(cos φ·σx + sin φ·σy)` for the resonant pair.
pub fn resonant_sampler(series: &ZetaSeries, problem: &ControlProblem) -> HamiltonianSampler {
    let (series, problem) = (series.clone(), problem.clone());
    HamiltonianSampler::new("resonant pair", problem.duration, move |t| {
        let omega = omega_prime_from_zeta(&series, &problem, t)?;
        Ok(Mat2::drive(0.0, omega, problem.phase.value(t)))
    })
}

/// Analytic and oracle unitaries of both pairs for a fixed series, against
/// the given targets. Returns (resonant, detuned, ∫Ω dt).
pub fn evaluate_individual(
    series: &ZetaSeries,
    delta: f64,
    resonant_target: Unitary2,
    detuned_target: Unitary2,
    steps: usize,
) -> Result<(GateReport, GateReport, f64)> {
    let problem = individual_problem(delta, series.duration());
    let schedule = PulseSchedule::synthesize(series, &problem, DEFAULT_POINTS)?;
    let area = pulse_area(series, &problem)?;
    let xi = schedule.xi_at_end()?;
    let t = problem.duration;
    let (resonant_numeric, detuned_numeric) = rayon::join(
        || propagate_numeric(&resonant_sampler(series, &problem), t, steps),
        || schedule.numeric_unitary(steps),
    );
    let residuals = vec![schedule.boundary_residuals()];
    let resonant = GateReport::from_parts(
        resonant_target,
        resonant_form(area),
        resonant_numeric?.unitary,
        residuals.clone(),
        vec![xi],
    )?;
    let detuned = GateReport::from_parts(
        detuned_target,
        analytic::propagator_xy(series, &problem, t)?,
        detuned_numeric?.unitary,
        residuals,
        vec![xi],
    )?;
    Ok((resonant, detuned, area))
}

fn infeasible(targets: &IndividualTargets, delta: f64, e: Error) -> Error {
    Error::Calibration(format!(
        "no schedule reaches Bloch angle {} and detuned phase {} at Δ = {delta}: {e}",
        targets.pulse_area, targets.detuned_phase
    ))
}

/// Branch order 0, +1, −1, +2, −2 … in units of π.
fn branch_offset(k: usize) -> f64 {
    let step = k.div_ceil(2) as f64;
    if k % 2 == 1 {
        step
    } else {
        -step
    }
}

fn solve_on_branch(
    z: f64,
    delta: f64,
    targets: &IndividualTargets,
    guess: IndividualGuess,
    xi_target: f64,
) -> Result<ZetaSeries> {
    let amplitude_at = |duration: f64| -> Result<ZetaSeries> {
        let template = individual_series(z, guess.amplitude, duration)?;
        let problem = individual_problem(delta, duration);
        Ok(calibrate_near_on_branch(&template, 0, &problem, Objective::XiPlusAtT, xi_target, AMPLITUDE_STEP)?
            .series)
    };
    let area_of =
        |series: &ZetaSeries| pulse_area(series, &individual_problem(delta, series.duration()));
    let first = amplitude_at(guess.duration)?;
    let area_target = lift_branch(targets.pulse_area / 2.0, area_of(&first)?);
    let residual =
        |duration: f64| -> Result<f64> { Ok(area_of(&amplitude_at(duration)?)? - area_target) };
    let (lo, hi) = bracket_near(residual, guess.duration, 0.01 * guess.duration, 40)?;
    let opts = RootOptions {
        f_tol: CALIBRATION_TOL,
        ..RootOptions::default()
    };
    let root = solve_bracketed(residual, lo, hi, opts)?;
    amplitude_at(root.x)
}

/// Solve for (A, T) so that ξ₊(T) hits the detuned target and ∫Ω dt hits
/// half the resonant angle, each modulo π. Detuned branches are tried in
/// order of distance from the value at `guess`; the first solvable one wins.
pub fn design_individual_control(
    targets: IndividualTargets,
    delta: f64,
    variant: Variant,
    guess: Option<IndividualGuess>,
    steps: usize,
) -> Result<IndividualDesign> {
    if !(delta != 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("Δ must be nonzero, got {delta}")));
    }
    let z = variant.boundary();
    let guess = guess.unwrap_or_else(|| IndividualGuess::default_for(variant, &targets, delta));
    let fail = |e| infeasible(&targets, delta, e);

    let start = individual_series(z, guess.amplitude, guess.duration).map_err(fail)?;
    let xi_start = Objective::XiPlusAtT
        .evaluate(&start, &individual_problem(delta, guess.duration))
        .map_err(fail)?;
    let nearest = lift_branch(targets.detuned_phase, xi_start);
    let away = if xi_start >= nearest { PI } else { -PI };
    let mut last = None;
    let mut solved = None;
    for xi_target in (0..BRANCH_TRIES).map(|k| nearest + branch_offset(k) * away) {
        match solve_on_branch(z, delta, &targets, guess, xi_target) {
            Ok(series) => {
                solved = Some(series);
                break;
            }
            Err(e) => last = Some(e),
        }
    }
    let series = match solved {
        Some(s) => s,
        None => return Err(fail(last.expect("at least one branch tried"))),
    };

    let resonant_target = Unitary2::rx(targets.pulse_area);
    let detuned_target = detuned_form(z, targets.detuned_phase);
    let (resonant, detuned, area) =
        evaluate_individual(&series, delta, resonant_target, detuned_target, steps)?;
    let problem = individual_problem(delta, series.duration());
    let schedule = PulseSchedule::synthesize(&series, &problem, DEFAULT_POINTS)?;
    let xi = resonant.xi_at_t[0].xi_plus;
    Ok(IndividualDesign {
        variant,
        delta,
        targets,
        amplitude: series.terms()[0].amplitude,
        duration: series.duration(),
        area,
        xi,
        predicted_resonant: resonant.achieved_analytic,
        predicted_detuned: detuned.achieved_analytic,
        schedule,
        resonant,
        detuned,
    })
}
