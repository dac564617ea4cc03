//! One-coefficient calibration of a ζ-series against a phase objective.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::control::ControlProblem;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_TOL};
use crate::rootfind::{solve_bracketed, RootOptions};
use crate::zeta::ZetaSeries;

use super::schedule::admissibility;

/// Objectives are compared modulo this period (a π shift flips only the
/// global sign of the resulting unitary).
pub const BRANCH_PERIOD: f64 = PI;
pub const CALIBRATION_TOL: f64 = 1e-9;
const ADMISSIBILITY_SAMPLES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    XiMinusAtT,
    XiPlusAtT,
    /// ∫₀ᵀ of the synthesized quantity.
    PulseArea,
}

impl Objective {
    pub fn evaluate(self, series: &ZetaSeries, problem: &ControlProblem) -> Result<f64> {
        let t = problem.duration;
        match self {
            Objective::XiMinusAtT => Ok(analytic::xi_integrals(series, problem, t)?.xi_minus),
            Objective::XiPlusAtT => Ok(analytic::xi_integrals(series, problem, t)?.xi_plus),
            Objective::PulseArea => pulse_area(series, problem),
        }
    }
}

pub fn pulse_area(series: &ZetaSeries, problem: &ControlProblem) -> Result<f64> {
    analytic::xi_integrals(series, problem, problem.duration)?;
    let failure = RefCell::new(None);
    let area = adaptive_simpson(
        |t| {
            analytic::controllable(series, problem, t).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e.to_string());
                0.0
            })
        },
        0.0,
        problem.duration,
        DEFAULT_TOL,
    );
    match failure.into_inner() {
        Some(msg) => Err(Error::Calibration(format!("pulse area undefined: {msg}"))),
        None => Ok(area),
    }
}

/// `target + kπ` closest to `current`.
pub fn lift_branch(target: f64, current: f64) -> f64 {
    target + ((current - target) / BRANCH_PERIOD).round() * BRANCH_PERIOD
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub series: ZetaSeries,
    pub free_index: usize,
    pub objective: Objective,
    /// Target after branch lifting.
    pub target: f64,
    pub achieved: f64,
    pub iterations: usize,
}

fn check_bracket_admissible(
    template: &ZetaSeries,
    free: usize,
    problem: &ControlProblem,
    lo: f64,
    hi: f64,
) -> Result<()> {
    for k in 0..ADMISSIBILITY_SAMPLES {
        let value = lo + (hi - lo) * k as f64 / (ADMISSIBILITY_SAMPLES - 1) as f64;
        let series = template.with_amplitude(free, value)?;
        let report = admissibility(&series, problem)?;
        if !report.admissible {
            return Err(Error::CalibrationDomain {
                value,
                reason: format!(
                    "coefficient {free} leaves the admissible domain ({} violations, max |ζ̇|/rate {:.4})",
                    report.violations.len(),
                    report.max_slope_ratio
                ),
            });
        }
    }
    Ok(())
}

/// Solve `objective(series with terms[free].amplitude = x) = target` for x
/// in `bracket`. The target is lifted by a multiple of π to the branch
/// nearest the template's current objective value.
pub fn calibrate_scalar(
    template: &ZetaSeries,
    free: usize,
    problem: &ControlProblem,
    objective: Objective,
    target: f64,
    bracket: (f64, f64),
) -> Result<Calibration> {
    let lifted = lift_branch(target, objective.evaluate(template, problem)?);
    calibrate_on_branch(template, free, problem, objective, lifted, bracket)
}

/// As [`calibrate_scalar`] but with `target` taken literally.
pub fn calibrate_on_branch(
    template: &ZetaSeries,
    free: usize,
    problem: &ControlProblem,
    objective: Objective,
    target: f64,
    bracket: (f64, f64),
) -> Result<Calibration> {
    if free >= template.terms().len() {
        return Err(Error::InvalidArgument(format!("series has no term {free}")));
    }
    check_bracket_admissible(template, free, problem, bracket.0, bracket.1)?;
    let start = objective.evaluate(template, problem)?;
    let done = |series: ZetaSeries, achieved: f64, iterations: usize| Calibration {
        series,
        free_index: free,
        objective,
        target,
        achieved,
        iterations,
    };
    if (start - target).abs() <= CALIBRATION_TOL {
        return Ok(done(template.clone(), start, 0));
    }
    let residual = |x: f64| -> Result<f64> {
        Ok(objective.evaluate(&template.with_amplitude(free, x)?, problem)? - target)
    };
    let opts = RootOptions {
        f_tol: CALIBRATION_TOL,
        ..RootOptions::default()
    };
    let root = solve_bracketed(residual, bracket.0, bracket.1, opts)?;
    Ok(done(
        template.with_amplitude(free, root.x)?,
        target + root.residual,
        root.iterations,
    ))
}

/// Walk outward from `x0` in steps of `step` until `f` changes sign between
/// neighbouring samples, returning the first such pair. A direction stops at
/// its first evaluation error.
pub fn bracket_near<F>(mut f: F, x0: f64, step: f64, max_steps: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f0 = f(x0)?;
    if f0 == 0.0 {
        return Ok((x0, x0));
    }
    let mut up = Some((x0, f0));
    let mut down = Some((x0, f0));
    for k in 1..=max_steps {
        for (dir, state) in [(1.0, &mut up), (-1.0, &mut down)] {
            let Some((xp, fp)) = *state else { continue };
            let x = x0 + dir * step * k as f64;
            match f(x) {
                Ok(fx) if fx.signum() != fp.signum() => {
                    return Ok(if xp < x { (xp, x) } else { (x, xp) });
                }
                Ok(fx) => *state = Some((x, fx)),
                Err(_) => *state = None,
            }
        }
        if up.is_none() && down.is_none() {
            break;
        }
    }
    Err(Error::Calibration(format!(
        "no sign change within {max_steps} steps of {step} around {x0}"
    )))
}

/// [`calibrate_on_branch`] with the bracket found by [`bracket_near`],
/// starting from the template's current coefficient. `target` is lifted
/// first, as in [`calibrate_scalar`].
pub fn calibrate_near(
    template: &ZetaSeries,
    free: usize,
    problem: &ControlProblem,
    objective: Objective,
    target: f64,
    step: f64,
) -> Result<Calibration> {
    let lifted = lift_branch(target, objective.evaluate(template, problem)?);
    calibrate_near_on_branch(template, free, problem, objective, lifted, step)
}

pub fn calibrate_near_on_branch(
    template: &ZetaSeries,
    free: usize,
    problem: &ControlProblem,
    objective: Objective,
    target: f64,
    step: f64,
) -> Result<Calibration> {
    let x0 = template
        .terms()
        .get(free)
        .ok_or_else(|| Error::InvalidArgument(format!("series has no term {free}")))?
        .amplitude;
    let residual = |x: f64| -> Result<f64> {
        let series = template.with_amplitude(free, x)?;
        if !admissibility(&series, problem)?.admissible {
            return Err(Error::CalibrationDomain {
                value: x,
                reason: "inadmissible".into(),
            });
        }
        Ok(objective.evaluate(&series, problem)? - target)
    };
    let (lo, hi) = bracket_near(residual, x0, step, 64)?;
    calibrate_on_branch(template, free, problem, objective, target, (lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{Envelope, Phase};
    use crate::zeta::ZetaTerm;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn rabi_problem(t: f64) -> ControlProblem {
        ControlProblem::sigma_z(Envelope::constant(2.0 * PI), Phase::zero(), t)
    }

    #[test]
    fn lift_branch_picks_nearest() {
        assert!((lift_branch(FRAC_PI_2, 7.5) - (FRAC_PI_2 + 2.0 * PI)).abs() < 1e-15);
        assert!((lift_branch(FRAC_PI_2, -1.0) - (-FRAC_PI_2)).abs() < 1e-15);
        assert_eq!(lift_branch(1.0, 1.0), 1.0);
    }

    #[test]
    fn satisfied_template_is_unchanged() {
        // Constant ζ = π/4 gives ξ = Ω·T exactly.
        let t = 0.25;
        let series = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(3, 0.0, 1)], t).unwrap();
        let c = calibrate_scalar(
            &series,
            0,
            &rabi_problem(t),
            Objective::XiPlusAtT,
            FRAC_PI_2,
            (-0.1, 0.1),
        )
        .unwrap();
        assert_eq!(c.iterations, 0);
        assert_eq!(c.series, series);
    }

    #[test]
    fn solves_to_tolerance() {
        let t = 0.6068;
        let series = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(3, 0.2, 1)], t).unwrap();
        let problem = rabi_problem(t);
        let c = calibrate_near(&series, 0, &problem, Objective::XiPlusAtT, FRAC_PI_4, 0.02).unwrap();
        let check = Objective::XiPlusAtT.evaluate(&c.series, &problem).unwrap();
        assert!((check - c.target).abs() < 1e-8);
        assert!((c.target - 1.25 * PI).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let t = 0.6;
        let series = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(3, 0.0, 1)], t).unwrap();
        let r = calibrate_scalar(
            &series,
            0,
            &rabi_problem(t),
            Objective::XiPlusAtT,
            FRAC_PI_2 + 0.3,
            (0.0, 0.01),
        );
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn inadmissible_bracket_names_value() {
        let t = 0.6;
        let series = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(3, 0.0, 1)], t).unwrap();
        let r = calibrate_scalar(
            &series,
            0,
            &rabi_problem(t),
            Objective::XiPlusAtT,
            1.0,
            (0.0, 2.0),
        );
        match r {
            Err(Error::CalibrationDomain { value, .. }) => assert!(value > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bracket_near_finds_closest_crossing() {
        let (lo, hi) = bracket_near(|x| Ok((x - 0.33) * (x + 2.0)), 0.0, 0.1, 50).unwrap();
        assert!(lo <= 0.33 && 0.33 <= hi);
    }
}
