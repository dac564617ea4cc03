//! Brute-force propagation of `i·U̇ = H(t)·U` for arbitrary 2×2 Hamiltonians.
//!
//! Each step applies the exact exponential of the Hamiltonian sampled at the
//! step midpoint. The scheme is unitary per step and second-order accurate;
//! the final operator is never renormalized.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Unitary2};
use crate::metrics::state_fidelity;

/// Default step count over one gate window.
pub const DEFAULT_STEPS: usize = 1 << 14;
const HERMITIAN_TOL: f64 = 1e-12;

type SampleFn = dyn Fn(f64) -> Result<Mat2> + Send + Sync;

/// Time-dependent Hamiltonian `t ↦ H(t)` on `[0, duration]`.
#[derive(Clone)]
pub struct HamiltonianSampler {
    sample: Arc<SampleFn>,
    pub duration: f64,
    pub label: String,
}

impl fmt::Debug for HamiltonianSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSampler")
            .field("duration", &self.duration)
            .field("label", &self.label)
            .finish()
    }
}

impl HamiltonianSampler {
    pub fn new<F>(label: impl Into<String>, duration: f64, sample: F) -> Self
    where
        F: Fn(f64) -> Result<Mat2> + Send + Sync + 'static,
    {
        HamiltonianSampler {
            sample: Arc::new(sample),
            duration,
            label: label.into(),
        }
    }

    pub fn constant(label: impl Into<String>, duration: f64, h: Mat2) -> Self {
        Self::new(label, duration, move |_| Ok(h))
    }

    /// Sample with the Hermiticity contract enforced.
    pub fn at(&self, t: f64) -> Result<Mat2> {
        let h = (self.sample)(t)?;
        let scale = h.frobenius_norm().max(1.0);
        let deviation = h.hermiticity_defect();
        if !(deviation <= HERMITIAN_TOL * scale) {
            return Err(Error::NotHermitian { t, deviation });
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropagationResult {
    pub unitary: Unitary2,
    pub steps: usize,
    /// ‖U(n steps) − U(2n steps)‖_F.
    pub step_doubling_defect: f64,
}

fn validate(h: &HamiltonianSampler, t_start: f64, t_end: f64, steps: usize) -> Result<()> {
    if steps < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 steps, got {steps}")));
    }
    if !(t_start >= 0.0 && t_end >= t_start && t_end <= h.duration * (1.0 + 1e-12)) {
        return Err(Error::TimeOutOfRange {
            t: t_end,
            duration: h.duration,
        });
    }
    Ok(())
}

fn march(h: &HamiltonianSampler, t_start: f64, t_end: f64, steps: usize) -> Result<Mat2> {
    let dt = (t_end - t_start) / steps as f64;
    let mut u = Mat2::identity();
    for k in 0..steps {
        let mid = t_start + (k as f64 + 0.5) * dt;
        u = Mat2::expm_hermitian(&h.at(mid)?, dt) * u;
    }
    Ok(u)
}

/// Propagator over `[t_start, t_end]` without the step-doubling check.
pub fn propagate_interval(
    h: &HamiltonianSampler,
    t_start: f64,
    t_end: f64,
    steps: usize,
) -> Result<Mat2> {
    validate(h, t_start, t_end, steps)?;
    march(h, t_start, t_end, steps)
}

/// Propagator over `[0, t_end]` plus the defect against a run with twice the
/// steps.
pub fn propagate_numeric(
    h: &HamiltonianSampler,
    t_end: f64,
    steps: usize,
) -> Result<PropagationResult> {
    validate(h, 0.0, t_end, steps)?;
    let coarse = march(h, 0.0, t_end, steps)?;
    let fine = march(h, 0.0, t_end, 2 * steps)?;
    Ok(PropagationResult {
        unitary: Unitary2::new(coarse)?,
        steps,
        step_doubling_defect: (coarse - fine).frobenius_norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    pub fidelity: f64,
}

fn check_normalized(psi: &[Complex64; 2]) -> Result<()> {
    let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Populations and fidelity against `target` at `samples` evenly spaced
/// times over `[0, h.duration]`, using `steps_per_sample` midpoint steps
/// between consecutive samples.
pub fn evolve_state(
    h: &HamiltonianSampler,
    psi0: [Complex64; 2],
    target: [Complex64; 2],
    samples: usize,
    steps_per_sample: usize,
) -> Result<Vec<TracePoint>> {
    check_normalized(&psi0)?;
    check_normalized(&target)?;
    if samples < 2 || steps_per_sample == 0 {
        return Err(Error::InvalidArgument(
            "need at least two samples and one step per sample".into(),
        ));
    }
    let span = h.duration / (samples - 1) as f64;
    let dt = span / steps_per_sample as f64;
    let mut psi = psi0;
    let mut out = Vec::with_capacity(samples);
    let record = |t: f64, psi: &[Complex64; 2]| -> Result<TracePoint> {
        Ok(TracePoint {
            t,
            p0: psi[0].norm_sqr(),
            p1: psi[1].norm_sqr(),
            fidelity: state_fidelity(psi, &target)?.value,
        })
    };
    out.push(record(0.0, &psi)?);
    for k in 1..samples {
        let t0 = (k - 1) as f64 * span;
        for j in 0..steps_per_sample {
            let mid = t0 + (j as f64 + 0.5) * dt;
            psi = Mat2::expm_hermitian(&h.at(mid)?, dt).apply(psi);
        }
        let t = if k + 1 == samples { h.duration } else { k as f64 * span };
        out.push(record(t, &psi)?);
    }
    Ok(out)
}
