//! The auxiliary angle ζ(t) = A₀ + Σ Aₙ·sinⁿ(aₙ·π·t/T).
//!
//! Every frequency multiplier is a positive integer, so each term vanishes at
//! both ends of the window and ζ(0) = ζ(T) = A₀. Values are restricted to the
//! open branch (0, π/2) where cot(2ζ) and csc(2ζ) stay finite.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default distance kept from the poles of cot(2ζ) and from |ζ̇| = envelope.
pub const DEFAULT_GUARD: f64 = 1e-3;
/// Default admissibility grid.
pub const DEFAULT_GRID: usize = 4096;
const SNAP: f64 = 1e-12;

/// One `A·sinⁿ(a·π·t/T)` term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaTerm {
    #[serde(rename = "n")]
    pub power: u32,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "a")]
    pub frequency: u32,
}

impl ZetaTerm {
    pub fn new(power: u32, amplitude: f64, frequency: u32) -> Self {
        ZetaTerm {
            power,
            amplitude,
            frequency,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSeries {
    #[serde(rename = "A0")]
    a0: f64,
    #[serde(rename = "T")]
    duration: f64,
    #[serde(default)]
    terms: Vec<ZetaTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries", into = "RawSeries")]
pub struct ZetaSeries {
    a0: f64,
    terms: Vec<ZetaTerm>,
    duration: f64,
}

impl TryFrom<RawSeries> for ZetaSeries {
    type Error = Error;
    fn try_from(raw: RawSeries) -> Result<Self> {
        ZetaSeries::new(raw.a0, raw.terms, raw.duration)
    }
}

impl From<ZetaSeries> for RawSeries {
    fn from(s: ZetaSeries) -> Self {
        RawSeries {
            a0: s.a0,
            duration: s.duration,
            terms: s.terms,
        }
    }
}

/// ζ and its first two time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPoint {
    pub zeta: f64,
    pub dot: f64,
    pub ddot: f64,
}

impl ZetaSeries {
    pub fn new(a0: f64, terms: Vec<ZetaTerm>, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidSeries(format!(
                "duration must be positive, got {duration}"
            )));
        }
        if !a0.is_finite() {
            return Err(Error::InvalidSeries("A0 is not finite".into()));
        }
        for term in &terms {
            if term.power == 0 || term.frequency == 0 {
                return Err(Error::InvalidSeries(format!(
                    "power and frequency must be positive integers, got n = {}, a = {}",
                    term.power, term.frequency
                )));
            }
            if !term.amplitude.is_finite() {
                return Err(Error::InvalidSeries("term amplitude is not finite".into()));
            }
        }
        Ok(ZetaSeries {
            a0,
            terms,
            duration,
        })
    }

    pub fn constant(a0: f64, duration: f64) -> Result<Self> {
        Self::new(a0, Vec::new(), duration)
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn terms(&self) -> &[ZetaTerm] {
        &self.terms
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Copy with term `index`'s amplitude replaced.
    pub fn with_amplitude(&self, index: usize, amplitude: f64) -> Result<Self> {
        let mut terms = self.terms.clone();
        let term = terms.get_mut(index).ok_or_else(|| {
            Error::InvalidArgument(format!("series has no term {index}"))
        })?;
        term.amplitude = amplitude;
        Self::new(self.a0, terms, self.duration)
    }

    /// Same shape on a new time window.
    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        Self::new(self.a0, self.terms.clone(), duration)
    }

    /// ζ, ζ̇, ζ̈ at `t` by term-wise differentiation.
    pub fn eval(&self, t: f64) -> Result<ZetaPoint> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                duration: self.duration,
            });
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> ZetaPoint {
        let mut zeta = self.a0;
        let mut dot = 0.0;
        let mut ddot = 0.0;
        for term in &self.terms {
            let w = term.frequency as f64 * PI / self.duration;
            let (mut s, c) = (w * t).sin_cos();
            if s.abs() < SNAP {
                s = 0.0;
            }
            let n = term.power as i32;
            let nf = n as f64;
            let a = term.amplitude;
            zeta += a * s.powi(n);
            dot += a * nf * s.powi(n - 1) * c * w;
            let curvature = if n >= 2 {
                nf * (nf - 1.0) * s.powi(n - 2) * c * c
            } else {
                0.0
            };
            ddot += a * w * w * (curvature - nf * s.powi(n));
        }
        ZetaPoint { zeta, dot, ddot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// ζ left [0, π/2] altogether.
    Range,
    /// |ζ̇| / envelope above 1 − guard.
    Slope,
    /// ζ within the guard of 0 or π/2, where cot(2ζ) blows up.
    DivergenceProximity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub kind: ViolationKind,
}

/// Grid check of the admissible domain. Passing is necessary on the grid
/// only; nothing is certified between grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub min_zeta: f64,
    pub max_zeta: f64,
    pub max_slope_ratio: f64,
    pub violations: Vec<Violation>,
}

/// Scan `grid_points` uniformly spaced times on [0, T].
pub fn check_admissible<F>(
    series: &ZetaSeries,
    envelope: F,
    grid_points: usize,
    guard: f64,
) -> Result<AdmissibilityReport>
where
    F: Fn(f64) -> f64,
{
    if grid_points < 64 {
        return Err(Error::InvalidArgument(format!(
            "admissibility grid needs at least 64 points, got {grid_points}"
        )));
    }
    if !(guard > 0.0 && guard < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "guard must lie in (0, 1), got {guard}"
        )));
    }
    let duration = series.duration();
    let mut min_zeta = f64::INFINITY;
    let mut max_zeta = f64::NEG_INFINITY;
    let mut max_slope_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    for k in 0..grid_points {
        let t = if k + 1 == grid_points {
            duration
        } else {
            duration * k as f64 / (grid_points - 1) as f64
        };
        let env = envelope(t);
        if !(env > 0.0) {
            return Err(Error::InvalidEnvelope { t, value: env });
        }
        let p = series.eval_unchecked(t);
        min_zeta = min_zeta.min(p.zeta);
        max_zeta = max_zeta.max(p.zeta);
        let ratio = p.dot.abs() / env;
        max_slope_ratio = max_slope_ratio.max(ratio);

        if !(0.0..=FRAC_PI_2).contains(&p.zeta) {
            violations.push(Violation {
                t,
                kind: ViolationKind::Range,
            });
        } else if p.zeta <= guard || p.zeta >= FRAC_PI_2 - guard {
            violations.push(Violation {
                t,
                kind: ViolationKind::DivergenceProximity,
            });
        }
        if ratio > 1.0 - guard {
            violations.push(Violation {
                t,
                kind: ViolationKind::Slope,
            });
        }
    }
    Ok(AdmissibilityReport {
        admissible: violations.is_empty(),
        min_zeta,
        max_zeta,
        max_slope_ratio,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn fd_oracle(series: &ZetaSeries, t: f64, h: f64) -> (f64, f64) {
        let f = |x: f64| series.eval_unchecked(x).zeta;
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn midpoint_of_single_sine() {
        let t_total = 0.8;
        let s = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(1, 0.1, 1)], t_total).unwrap();
        let p = s.eval(t_total / 2.0).unwrap();
        let w = PI / t_total;
        assert!((p.zeta - (FRAC_PI_4 + 0.1)).abs() < 1e-15);
        assert!(p.dot.abs() < 1e-14);
        assert!((p.ddot + 0.1 * w * w).abs() < 1e-12);
    }

    #[test]
    fn start_of_single_sine() {
        let t_total = 0.8;
        let s = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(1, 0.1, 1)], t_total).unwrap();
        let p = s.eval(0.0).unwrap();
        assert_eq!(p.zeta, FRAC_PI_4);
        assert!((p.dot - 0.1 * PI / t_total).abs() < 1e-15);
        assert_eq!(p.ddot, 0.0);
    }

    #[test]
    fn hadamard_series_matches_finite_differences() {
        let t_total = 0.942;
        let s = ZetaSeries::new(
            3.0 * PI / 8.0,
            vec![ZetaTerm::new(2, -0.22, 4), ZetaTerm::new(3, 0.18, 1)],
            t_total,
        )
        .unwrap();
        let t = 0.37 * t_total;
        let p = s.eval(t).unwrap();
        let (d1, d2) = fd_oracle(&s, t, t_total * 1e-5);
        assert!(((p.dot - d1) / d1).abs() < 1e-6, "{} vs {}", p.dot, d1);
        assert!(((p.ddot - d2) / d2).abs() < 1e-6, "{} vs {}", p.ddot, d2);
    }

    #[test]
    fn endpoints_return_offset() {
        let s = ZetaSeries::new(
            0.7,
            vec![ZetaTerm::new(1, 0.2, 3), ZetaTerm::new(2, -0.1, 5), ZetaTerm::new(3, 0.05, 7)],
            1.3,
        )
        .unwrap();
        assert_eq!(s.eval(0.0).unwrap().zeta, 0.7);
        assert_eq!(s.eval(1.3).unwrap().zeta, 0.7);
    }

    #[test]
    fn out_of_window_is_rejected() {
        let s = ZetaSeries::constant(0.5, 1.0).unwrap();
        assert!(matches!(s.eval(1.0 + 1e-9), Err(Error::TimeOutOfRange { .. })));
        assert!(matches!(s.eval(-1e-9), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn invalid_series_rejected() {
        assert!(ZetaSeries::constant(0.5, 0.0).is_err());
        assert!(ZetaSeries::new(0.5, vec![ZetaTerm::new(0, 0.1, 1)], 1.0).is_err());
        assert!(ZetaSeries::new(0.5, vec![ZetaTerm::new(1, 0.1, 0)], 1.0).is_err());
    }

    #[test]
    fn constant_quarter_is_admissible() {
        let s = ZetaSeries::constant(FRAC_PI_4, 1.0).unwrap();
        let r = check_admissible(&s, |_| 3.0, DEFAULT_GRID, DEFAULT_GUARD).unwrap();
        assert!(r.admissible);
        assert_eq!(r.max_slope_ratio, 0.0);
        assert_eq!(r.min_zeta, r.max_zeta);
    }

    #[test]
    fn zero_offset_hits_divergence() {
        let s = ZetaSeries::new(0.0, vec![ZetaTerm::new(1, 0.3, 1)], 1.0).unwrap();
        let r = check_admissible(&s, |_| 10.0, DEFAULT_GRID, DEFAULT_GUARD).unwrap();
        assert!(!r.admissible);
        assert_eq!(r.violations[0].t, 0.0);
        assert_eq!(r.violations[0].kind, ViolationKind::DivergenceProximity);
    }

    #[test]
    fn negative_envelope_is_an_error() {
        let s = ZetaSeries::constant(FRAC_PI_4, 1.0).unwrap();
        let r = check_admissible(&s, |t| 0.5 - t, DEFAULT_GRID, DEFAULT_GUARD);
        assert!(matches!(r, Err(Error::InvalidEnvelope { .. })));
    }

    #[test]
    fn not_gate_series_extrema_match_dense_scan() {
        let t_total = 0.69;
        let s = ZetaSeries::new(FRAC_PI_4, vec![ZetaTerm::new(3, -0.38, 1)], t_total).unwrap();
        let omega = 2.0 * PI;
        let r = check_admissible(&s, |_| omega, DEFAULT_GRID, DEFAULT_GUARD).unwrap();
        assert!(r.admissible);
        // Dense 10^6-point scan, computed independently from the closed form.
        let n = 1_000_000;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..=n {
            let t = t_total * k as f64 / n as f64;
            let z = FRAC_PI_4 - 0.38 * (PI * t / t_total).sin().powi(3);
            lo = lo.min(z);
            hi = hi.max(z);
        }
        assert!((r.min_zeta - lo).abs() < 1e-6, "{} vs {}", r.min_zeta, lo);
        assert!((r.max_zeta - hi).abs() < 1e-12);
    }

    #[test]
    fn small_grid_rejected() {
        let s = ZetaSeries::constant(FRAC_PI_4, 1.0).unwrap();
        assert!(check_admissible(&s, |_| 1.0, 16, DEFAULT_GUARD).is_err());
        assert!(check_admissible(&s, |_| 1.0, 64, 1.5).is_err());
    }
}
