use serde::{Deserialize, Serialize};

use crate::analytic::{self, XiPair};
use crate::control::{Axis, ControlProblem, Envelope, Phase};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Unitary2};
use crate::oracle::{self, HamiltonianSampler, PropagationResult};
use crate::zeta::{check_admissible, AdmissibilityReport, ZetaSeries, DEFAULT_GRID, DEFAULT_GUARD};

use super::st::j_from_zeta;

/// Default number of grid points in a synthesized schedule.
pub const DEFAULT_POINTS: usize = 1001;

/// The Hamiltonian entry a schedule synthesizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Δ(t) against a fixed Rabi rate Ω(t).
    Detuning,
    /// Ω′(t) against a fixed detuning Δ′(t).
    DriveAmplitude,
    /// Exchange J(t) of `h·σx + J·σz` with fixed h.
    Exchange,
}

impl Quantity {
    pub fn column(self) -> &'static str {
        match self {
            Quantity::Detuning => "delta",
            Quantity::DriveAmplitude => "omega_prime",
            Quantity::Exchange => "J",
        }
    }

    pub fn fixed_column(self) -> &'static str {
        match self {
            Quantity::Detuning => "omega",
            Quantity::DriveAmplitude => "delta_prime",
            Quantity::Exchange => "h",
        }
    }
}

/// A sampled pulse together with the ζ-series and problem it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub quantity: Quantity,
    pub series: ZetaSeries,
    pub problem: ControlProblem,
    pub grid: Vec<f64>,
    pub controllable: Vec<f64>,
    pub fixed: Vec<f64>,
    pub phase: Vec<f64>,
    pub admissibility: AdmissibilityReport,
}

/// Grid check of `series` against the magnitude of the effective rate.
pub fn admissibility(series: &ZetaSeries, problem: &ControlProblem) -> Result<AdmissibilityReport> {
    check_admissible(
        series,
        |t| problem.effective_rate(t).abs(),
        DEFAULT_GRID,
        DEFAULT_GUARD,
    )
}

fn uniform_grid(duration: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| {
            if k + 1 == points {
                duration
            } else {
                duration * k as f64 / (points - 1) as f64
            }
        })
        .collect()
}

impl PulseSchedule {
    fn build(
        quantity: Quantity,
        series: &ZetaSeries,
        problem: &ControlProblem,
        points: usize,
    ) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument("a schedule needs at least two points".into()));
        }
        if (series.duration() - problem.duration).abs() > 1e-12 * problem.duration {
            return Err(Error::InvalidArgument(format!(
                "series duration {} differs from problem duration {}",
                series.duration(),
                problem.duration
            )));
        }
        let report = admissibility(series, problem)?;
        if !report.admissible {
            return Err(Error::Inadmissible(Box::new(report)));
        }
        let mut schedule = PulseSchedule {
            quantity,
            series: series.clone(),
            problem: problem.clone(),
            grid: uniform_grid(problem.duration, points),
            controllable: Vec::with_capacity(points),
            fixed: Vec::with_capacity(points),
            phase: Vec::with_capacity(points),
            admissibility: report,
        };
        for k in 0..points {
            let t = schedule.grid[k];
            let value = schedule.value_at(t)?;
            schedule.controllable.push(value);
            schedule.fixed.push(problem.envelope.value(t));
            schedule.phase.push(problem.phase.value(t));
        }
        Ok(schedule)
    }

    /// Δ(t) or Ω′(t) on a uniform grid, depending on the problem axis.
    pub fn synthesize(series: &ZetaSeries, problem: &ControlProblem, points: usize) -> Result<Self> {
        let quantity = match problem.axis {
            Axis::SigmaZ => Quantity::Detuning,
            Axis::SigmaXy => Quantity::DriveAmplitude,
        };
        Self::build(quantity, series, problem, points)
    }

    /// J(t) for the singlet-triplet Hamiltonian `h·σx + J·σz`.
    pub fn synthesize_exchange(series: &ZetaSeries, h: f64, points: usize) -> Result<Self> {
        let problem = st_problem(h, series.duration());
        Self::build(Quantity::Exchange, series, &problem, points)
    }

    pub fn duration(&self) -> f64 {
        self.problem.duration
    }

    /// Controllable value at an arbitrary time, evaluated from the formula.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        match self.quantity {
            Quantity::Exchange => j_from_zeta(&self.series, self.problem.envelope.value(0.0), t),
            _ => analytic::controllable(&self.series, &self.problem, t),
        }
    }

    /// Controllable value at t = 0 and t = T.
    pub fn boundary_residuals(&self) -> (f64, f64) {
        (self.controllable[0], *self.controllable.last().unwrap())
    }

    pub fn hamiltonian(&self) -> HamiltonianSampler {
        let schedule = self.clone();
        HamiltonianSampler::new(
            format!("{} schedule", self.quantity.column()),
            self.duration(),
            move |t| {
                let designed = schedule.value_at(t)?;
                let phi = schedule.problem.phase.value(t);
                let fixed = schedule.problem.envelope.value(t);
                Ok(match schedule.quantity {
                    Quantity::Detuning | Quantity::Exchange => Mat2::drive(designed, fixed, phi),
                    Quantity::DriveAmplitude => Mat2::drive(fixed, designed, phi),
                })
            },
        )
    }

    pub fn analytic_unitary(&self) -> Result<Unitary2> {
        analytic::propagator(&self.series, &self.problem, self.duration())
    }

    pub fn numeric_unitary(&self, steps: usize) -> Result<PropagationResult> {
        oracle::propagate_numeric(&self.hamiltonian(), self.duration(), steps)
    }

    pub fn xi_at_end(&self) -> Result<XiPair> {
        analytic::xi_integrals(&self.series, &self.problem, self.duration())
    }
}

/// σz problem with constant Ω ≡ h and φ ≡ 0.
pub fn st_problem(h: f64, duration: f64) -> ControlProblem {
    ControlProblem::sigma_z(Envelope::constant(h), Phase::zero(), duration)
}
