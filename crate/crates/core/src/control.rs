//! Fixed (non-designable) parts of a control problem: the envelope, the
//! drive phase and the axis whose entry is synthesized from ζ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which Hamiltonian entry is designed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Diagonal detuning Δ(t) is synthesized; Ω(t) is fixed.
    SigmaZ,
    /// Off-diagonal amplitude Ω′(t) is synthesized; detuning Δ′(t) is fixed.
    SigmaXy,
}

/// Uniformly sampled curve with cubic Hermite interpolation. Node tangents
/// are second-order differences (one-sided at the ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl SampledCurve {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(step > 0.0) {
            return Err(Error::InvalidArgument(
                "sampled curve needs at least two samples and a positive step".into(),
            ));
        }
        Ok(SampledCurve {
            start,
            step,
            values,
        })
    }

    fn tangent(&self, k: usize) -> f64 {
        let v = &self.values;
        let n = v.len();
        if n == 2 {
            (v[1] - v[0]) / self.step
        } else if k == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * self.step)
        } else if k == n - 1 {
            (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * self.step)
        } else {
            (v[k + 1] - v[k - 1]) / (2.0 * self.step)
        }
    }

    /// Value and first derivative.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.values.len();
        let x = ((t - self.start) / self.step).clamp(0.0, (n - 1) as f64);
        let k = (x.floor() as usize).min(n - 2);
        let s = x - k as f64;
        let (p0, p1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.tangent(k) * self.step, self.tangent(k + 1) * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1;
        let slope = ((6.0 * s2 - 6.0 * s) * p0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * p1
            + (3.0 * s2 - 2.0 * s) * m1)
            / self.step;
        (value, slope)
    }
}

/// A fixed rate (rad/μs): Ω(t) on the σz axis, Δ′(t) on the σx/y axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Constant { value: f64 },
    /// `offset + amplitude·sin(angular_frequency·t + phase)`
    Sine {
        offset: f64,
        amplitude: f64,
        angular_frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Sampled(SampledCurve),
}

impl Envelope {
    pub fn constant(value: f64) -> Self {
        Envelope::Constant { value }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant { value } => *value,
            Envelope::Sine {
                offset,
                amplitude,
                angular_frequency,
                phase,
            } => offset + amplitude * (angular_frequency * t + phase).sin(),
            Envelope::Sampled(c) => c.eval(t).0,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant { .. } => 0.0,
            Envelope::Sine {
                amplitude,
                angular_frequency,
                phase,
                ..
            } => amplitude * angular_frequency * (angular_frequency * t + phase).cos(),
            Envelope::Sampled(c) => c.eval(t).1,
        }
    }
}

/// Drive phase φ(t) with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    Constant { value: f64 },
    /// `offset + amplitude·sin(angular_frequency·t)`
    Sine {
        amplitude: f64,
        angular_frequency: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl Default for Phase {
    fn default() -> Self {
        Phase::Constant { value: 0.0 }
    }
}

impl Phase {
    pub fn zero() -> Self {
        Phase::default()
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Phase::Constant { value } => value,
            Phase::Sine {
                amplitude,
                angular_frequency,
                offset,
            } => offset + amplitude * (angular_frequency * t).sin(),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Phase::Constant { .. } => 0.0,
            Phase::Sine {
                amplitude,
                angular_frequency,
                ..
            } => amplitude * angular_frequency * (angular_frequency * t).cos(),
        }
    }

    pub fn accel(&self, t: f64) -> f64 {
        match *self {
            Phase::Constant { .. } => 0.0,
            Phase::Sine {
                amplitude,
                angular_frequency,
                ..
            } => -amplitude * angular_frequency * angular_frequency * (angular_frequency * t).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlProblem {
    pub axis: Axis,
    pub envelope: Envelope,
    #[serde(default)]
    pub phase: Phase,
    pub duration: f64,
}

impl ControlProblem {
    pub fn sigma_z(envelope: Envelope, phase: Phase, duration: f64) -> Self {
        ControlProblem {
            axis: Axis::SigmaZ,
            envelope,
            phase,
            duration,
        }
    }

    pub fn sigma_xy(detuning: Envelope, phase: Phase, duration: f64) -> Self {
        ControlProblem {
            axis: Axis::SigmaXy,
            envelope: detuning,
            phase,
            duration,
        }
    }

    /// Off-diagonal rate of the problem as seen by the σz machinery: Ω(t) for
    /// σz control, Δ″(t) = −Δ′(t) + φ̇(t)/2 in the rotated σx/y frame.
    pub fn effective_rate(&self, t: f64) -> f64 {
        match self.axis {
            Axis::SigmaZ => self.envelope.value(t),
            Axis::SigmaXy => -self.envelope.value(t) + 0.5 * self.phase.rate(t),
        }
    }

    pub fn effective_rate_dot(&self, t: f64) -> f64 {
        match self.axis {
            Axis::SigmaZ => self.envelope.derivative(t),
            Axis::SigmaXy => -self.envelope.derivative(t) + 0.5 * self.phase.accel(t),
        }
    }

    /// Effective rate at `t`, rejecting values the formulas cannot use.
    pub(crate) fn checked_rate(&self, t: f64) -> Result<f64> {
        let r = self.effective_rate(t);
        match self.axis {
            Axis::SigmaZ if !(r > 0.0) => Err(Error::InvalidEnvelope { t, value: r }),
            Axis::SigmaXy if !(r != 0.0 && r.is_finite()) => {
                Err(Error::EnvelopeSign { t, value: r })
            }
            _ => Ok(r),
        }
    }
}
