//! Pulse synthesis from ζ(t) and the closed-form evolution operator.
//!
//! For a drive `[[Δ, r·e^{-iφ}], [r·e^{iφ}, -Δ]]` with a prescribed
//! off-diagonal rate r(t), choosing
//!
//! ```text
//! Δ = (ζ̈ − ζ̇·ṙ/r) / (2·r·c) − r·c·cot(2ζ) + φ̇/2,      c = √(1 − ζ̇²/r²)
//! ```
//!
//! makes the first column of the propagator `(e^{iα}·cos ζ, e^{iβ}·sin ζ)` with
//! `α = ξ₋ − (π + φ)/2`, `β = ξ₊ + (π + φ)/2` and
//!
//! ```text
//! ξ±(t) = ∫₀ᵗ r·c·csc(2ζ) dt′ ± ½·arcsin(ζ̇/r).
//! ```
//!
//! `U(t) = U₀(t)·U₀†(0)` then starts at the identity. The rate may be negative,
//! which is what the σx/y route needs after the frame rotation.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::control::{Axis, ControlProblem};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Unitary2};
use crate::quadrature::{self, adaptive_simpson};
use crate::zeta::{ZetaPoint, ZetaSeries, DEFAULT_GUARD};

/// Points used to pre-scan `[0, t]` before integrating.
const SCAN_POINTS: usize = 512;

/// ξ₋(t), ξ₊(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiPair {
    pub xi_minus: f64,
    pub xi_plus: f64,
    pub t: f64,
}

impl XiPair {
    fn new(integral: f64, slope_angle: f64, t: f64) -> Self {
        XiPair {
            xi_minus: integral - 0.5 * slope_angle,
            xi_plus: integral + 0.5 * slope_angle,
            t,
        }
    }
}

/// √(1 − ζ̇²/r²) with the domain checks shared by every formula.
pub(crate) fn slope_factor(p: &ZetaPoint, rate: f64, t: f64) -> Result<f64> {
    if p.zeta <= DEFAULT_GUARD || p.zeta >= FRAC_PI_2 - DEFAULT_GUARD {
        return Err(Error::Divergence { t, zeta: p.zeta });
    }
    let ratio = p.dot / rate;
    if !(ratio.abs() < 1.0) {
        return Err(Error::SqrtDomain {
            t,
            ratio: ratio.abs(),
        });
    }
    Ok((1.0 - ratio * ratio).sqrt())
}

fn check_window(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<()> {
    let duration = series.duration().min(problem.duration);
    if !(0.0..=duration).contains(&t) {
        return Err(Error::TimeOutOfRange { t, duration });
    }
    Ok(())
}

/// Diagonal entry that realizes ζ for the effective drive of `problem`.
fn effective_diagonal(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<f64> {
    check_window(series, problem, t)?;
    let p = series.eval_unchecked(t);
    let r = problem.checked_rate(t)?;
    let r_dot = problem.effective_rate_dot(t);
    let c = slope_factor(&p, r, t)?;
    Ok((p.ddot - p.dot * r_dot / r) / (2.0 * r * c) - r * c / (2.0 * p.zeta).tan()
        + problem.phase.rate(t) / 2.0)
}

fn require_axis(problem: &ControlProblem, axis: Axis) -> Result<()> {
    if problem.axis != axis {
        return Err(Error::InvalidArgument(format!(
            "expected a {axis:?} problem, got {:?}",
            problem.axis
        )));
    }
    Ok(())
}

/// Detuning Δ(t) that drives the σz-control problem along ζ.
pub fn delta_from_zeta(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<f64> {
    require_axis(problem, Axis::SigmaZ)?;
    effective_diagonal(series, problem, t)
}

/// Drive amplitude Ω′(t) for the σx/y-control problem.
///
/// In the frame rotated by [`rotate_frame_ur`] the diagonal entry is
/// `Ω′ + φ̇/2` and the off-diagonal rate is `Δ″ = −Δ′ + φ̇/2`, so Ω′ is the
/// effective diagonal minus `φ̇/2`.
pub fn omega_prime_from_zeta(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<f64> {
    require_axis(problem, Axis::SigmaXy)?;
    Ok(effective_diagonal(series, problem, t)? - problem.phase.rate(t) / 2.0)
}

/// The synthesized quantity for either axis (Δ or Ω′).
pub fn controllable(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<f64> {
    match problem.axis {
        Axis::SigmaZ => delta_from_zeta(series, problem, t),
        Axis::SigmaXy => omega_prime_from_zeta(series, problem, t),
    }
}

/// Lab-frame Hamiltonian at `t` with the synthesized entry filled in.
pub fn synthesized_hamiltonian(
    series: &ZetaSeries,
    problem: &ControlProblem,
    t: f64,
) -> Result<Mat2> {
    let phi = problem.phase.value(t);
    let fixed = problem.envelope.value(t);
    let designed = controllable(series, problem, t)?;
    Ok(match problem.axis {
        Axis::SigmaZ => Mat2::drive(designed, fixed, phi),
        Axis::SigmaXy => Mat2::drive(fixed, designed, phi),
    })
}

/// Integrand of the phase integral, r·c·csc(2ζ).
fn xi_integrand(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<f64> {
    let p = series.eval_unchecked(t);
    let r = problem.checked_rate(t)?;
    let c = slope_factor(&p, r, t)?;
    Ok(r * c / (2.0 * p.zeta).sin())
}

/// Reject `[0, t]` if any scan point leaves the domain or the effective
/// rate changes sign.
fn scan_interval(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<()> {
    let sign0 = problem.checked_rate(0.0)?.signum();
    for k in 0..=SCAN_POINTS {
        let s = t * k as f64 / SCAN_POINTS as f64;
        let r = problem.checked_rate(s)?;
        if r.signum() != sign0 {
            return Err(Error::EnvelopeSign { t: s, value: r });
        }
        xi_integrand(series, problem, s)?;
    }
    Ok(())
}

fn slope_angle(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<f64> {
    let p = series.eval_unchecked(t);
    let r = problem.checked_rate(t)?;
    slope_factor(&p, r, t)?;
    Ok((p.dot / r).asin())
}

/// Integrate with domain errors surfaced instead of NaN.
fn integrate(series: &ZetaSeries, problem: &ControlProblem, a: f64, b: f64, tol: f64) -> Result<f64> {
    let failure = RefCell::new(None);
    let v = adaptive_simpson(
        |s| match xi_integrand(series, problem, s) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        tol,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// ξ±(t) by adaptive Simpson quadrature to [`quadrature::DEFAULT_TOL`].
pub fn xi_integrals(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<XiPair> {
    check_window(series, problem, t)?;
    scan_interval(series, problem, t)?;
    let integral = integrate(series, problem, 0.0, t, quadrature::DEFAULT_TOL)?;
    Ok(XiPair::new(integral, slope_angle(series, problem, t)?, t))
}

/// U₀ at one instant, with the two constant phases θ₁, θ₂ of the general
/// solution left explicit.
fn frame_operator(p: &ZetaPoint, xi: &XiPair, phi: f64, theta1: f64, theta2: f64) -> Mat2 {
    let theta = theta1 - theta2;
    let xi_m = xi.xi_minus + 0.5 * (theta - (phi + PI));
    let xi_p = xi.xi_plus + 0.5 * (theta + (phi + PI));
    let (s, c) = p.zeta.sin_cos();
    let e11 = Complex64::from_polar(c, theta1 + xi_m);
    let e21 = Complex64::from_polar(s, theta2 + xi_p);
    let e12 = -Complex64::from_polar(s, -(theta2 + xi_p));
    let e22 = Complex64::from_polar(c, -(theta1 + xi_m));
    Mat2::new(e11, e12, e21, e22)
}

fn effective_propagator(
    series: &ZetaSeries,
    problem: &ControlProblem,
    t: f64,
    xi_t: &XiPair,
    theta: (f64, f64),
) -> Result<Mat2> {
    let xi_0 = XiPair::new(0.0, slope_angle(series, problem, 0.0)?, 0.0);
    let u_t = frame_operator(
        &series.eval_unchecked(t),
        xi_t,
        problem.phase.value(t),
        theta.0,
        theta.1,
    );
    let u_0 = frame_operator(
        &series.eval_unchecked(0.0),
        &xi_0,
        problem.phase.value(0.0),
        theta.0,
        theta.1,
    );
    Ok(u_t * u_0.adjoint())
}

/// `U₀(t)·U₀†(0)` with arbitrary θ₁, θ₂. Only the difference θ₁ − θ₂ enters
/// the result, and the propagator of the synthesized Hamiltonian is the
/// θ₁ = θ₂ member.
pub fn propagator_with_phases(
    series: &ZetaSeries,
    problem: &ControlProblem,
    t: f64,
    theta1: f64,
    theta2: f64,
) -> Result<Mat2> {
    let xi = xi_integrals(series, problem, t)?;
    effective_propagator(series, problem, t, &xi, (theta1, theta2))
}

/// Closed-form propagator of the σz-control problem.
pub fn propagator_z(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<Unitary2> {
    require_axis(problem, Axis::SigmaZ)?;
    effective_unitary(series, problem, t)
}

fn effective_unitary(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<Unitary2> {
    check_window(series, problem, t)?;
    if t == 0.0 {
        scan_interval(series, problem, 0.0)?;
        return Ok(Unitary2::identity());
    }
    let xi = xi_integrals(series, problem, t)?;
    Unitary2::new(effective_propagator(series, problem, t, &xi, (0.0, 0.0))?)
}

/// Element-by-element form of the σz propagator in terms of ζ(0), ζ(t),
/// ξ±(0), ξ±(t) and φ(t). It coincides with [`propagator_z`] whenever
/// φ(0) = 0; for φ(0) ≠ 0 it is not the propagator of the synthesized
/// Hamiltonian.
pub fn propagator_z_elementwise(
    series: &ZetaSeries,
    problem: &ControlProblem,
    t: f64,
) -> Result<Unitary2> {
    require_axis(problem, Axis::SigmaZ)?;
    let xi_t = xi_integrals(series, problem, t)?;
    let xi_0 = XiPair::new(0.0, slope_angle(series, problem, 0.0)?, 0.0);
    let z0 = series.eval_unchecked(0.0).zeta;
    let zt = series.eval_unchecked(t).zeta;
    let phi = problem.phase.value(t);
    let (s0, c0) = z0.sin_cos();
    let (st, ct) = zt.sin_cos();
    let e = |angle: f64| Complex64::from_polar(1.0, angle);
    let u11 = -e(0.5 * (xi_0.xi_minus + 2.0 * xi_t.xi_minus - 2.0 * phi)) * ct * c0
        - e(0.5 * (xi_0.xi_plus - 2.0 * xi_t.xi_plus)) * st * s0;
    let u21 = e(0.5 * (xi_0.xi_minus + 2.0 * xi_t.xi_plus)) * ct * s0
        - e(0.5 * (xi_0.xi_plus + 2.0 * phi - 2.0 * xi_t.xi_minus)) * c0 * st;
    Unitary2::from_su2(u11, u21)
}

/// `U_R(φ) = exp[−i·π/4·M]`, `M = [[0, e^{−i(φ+π/2)}], [e^{i(φ+π/2)}, 0]]`.
pub fn rotate_frame_ur(phi: f64) -> Unitary2 {
    let m = Mat2::drive(0.0, 1.0, phi + FRAC_PI_2);
    Unitary2::assume(Mat2::expm_hermitian(&m, FRAC_PI_4))
}

/// Closed-form propagator of the σx/y-control problem,
/// `U(t) = U_R(φ(t))·U′(t)·U_R†(φ(0))`.
pub fn propagator_xy(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<Unitary2> {
    require_axis(problem, Axis::SigmaXy)?;
    let inner = effective_unitary(series, problem, t)?;
    if t == 0.0 {
        return Ok(inner);
    }
    let left = rotate_frame_ur(problem.phase.value(t));
    let right = rotate_frame_ur(problem.phase.value(0.0)).adjoint();
    Unitary2::new(*(left * inner * right).matrix())
}

/// Closed-form propagator for either axis.
pub fn propagator(series: &ZetaSeries, problem: &ControlProblem, t: f64) -> Result<Unitary2> {
    match problem.axis {
        Axis::SigmaZ => propagator_z(series, problem, t),
        Axis::SigmaXy => propagator_xy(series, problem, t),
    }
}

/// Propagators at every entry of the ascending `times` (starting at 0),
/// sharing one cumulative quadrature pass.
pub fn propagator_trace(
    series: &ZetaSeries,
    problem: &ControlProblem,
    times: &[f64],
) -> Result<Vec<Unitary2>> {
    let Some(&last) = times.last() else {
        return Ok(Vec::new());
    };
    if times[0] != 0.0 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument(
            "trace times must start at 0 and be non-decreasing".into(),
        ));
    }
    check_window(series, problem, last)?;
    scan_interval(series, problem, last)?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(times.len());
    let tol = quadrature::DEFAULT_TOL / times.len() as f64;
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            acc += integrate(series, problem, times[k - 1], t, tol)?;
        }
        if t == 0.0 {
            out.push(Unitary2::identity());
            continue;
        }
        let xi = XiPair::new(acc, slope_angle(series, problem, t)?, t);
        let inner = Unitary2::new(effective_propagator(series, problem, t, &xi, (0.0, 0.0))?)?;
        out.push(match problem.axis {
            Axis::SigmaZ => inner,
            Axis::SigmaXy => {
                let left = rotate_frame_ur(problem.phase.value(t));
                let right = rotate_frame_ur(problem.phase.value(0.0)).adjoint();
                Unitary2::new(*(left * inner * right).matrix())?
            }
        });
    }
    Ok(out)
}
