//! Gate-level design on top of the ζ machinery: calibrated singlet-triplet
//! gates, the Clifford table and one-pulse individual control.

pub mod calibrate;
pub mod clifford;
pub mod individual;
pub mod schedule;
pub mod st;

use rayon::prelude::*;

use crate::analytic::XiPair;
use crate::error::Result;
use crate::linalg::Unitary2;
use crate::metrics::gate_fidelity;

pub use calibrate::{calibrate_scalar, Calibration, Objective};
pub use clifford::{clifford_table, word_string, CliffordEntry, CliffordTable, Generator};
pub use individual::{design_individual_control, IndividualDesign, IndividualTargets, Variant};
pub use schedule::{PulseSchedule, Quantity};
pub use st::{build_st_gate, j_from_zeta, StGate};

#[derive(Debug, Clone)]
pub struct GateReport {
    pub target: Unitary2,
    pub achieved_analytic: Unitary2,
    pub achieved_numeric: Unitary2,
    pub fidelity_analytic: f64,
    pub fidelity_numeric: f64,
    /// Controllable value at t = 0 and t = T, per schedule.
    pub boundary_residuals: Vec<(f64, f64)>,
    /// ξ±(T), per schedule.
    pub xi_at_t: Vec<XiPair>,
}

/// Product of per-schedule unitaries in time order (first schedule acts
/// first).
pub fn compose(parts: &[Unitary2]) -> Unitary2 {
    parts
        .iter()
        .fold(Unitary2::identity(), |acc, u| *u * acc)
}

impl GateReport {
    /// Propagate each schedule analytically and with the oracle (in
    /// parallel), compose in time order and compare to `target`.
    pub fn evaluate(target: Unitary2, schedules: &[PulseSchedule], steps: usize) -> Result<Self> {
        let parts: Vec<(Unitary2, Unitary2, XiPair)> = schedules
            .par_iter()
            .map(|s| {
                Ok((
                    s.analytic_unitary()?,
                    s.numeric_unitary(steps)?.unitary,
                    s.xi_at_end()?,
                ))
            })
            .collect::<Result<_>>()?;
        let analytic: Vec<_> = parts.iter().map(|p| p.0).collect();
        let numeric: Vec<_> = parts.iter().map(|p| p.1).collect();
        Self::from_parts(
            target,
            compose(&analytic),
            compose(&numeric),
            schedules.iter().map(PulseSchedule::boundary_residuals).collect(),
            parts.iter().map(|p| p.2).collect(),
        )
    }

    pub fn from_parts(
        target: Unitary2,
        achieved_analytic: Unitary2,
        achieved_numeric: Unitary2,
        boundary_residuals: Vec<(f64, f64)>,
        xi_at_t: Vec<XiPair>,
    ) -> Result<Self> {
        Ok(GateReport {
            fidelity_analytic: gate_fidelity(target.matrix(), achieved_analytic.matrix())?.value,
            fidelity_numeric: gate_fidelity(target.matrix(), achieved_numeric.matrix())?.value,
            target,
            achieved_analytic,
            achieved_numeric,
            boundary_residuals,
            xi_at_t,
        })
    }

    /// Largest |controllable| at any schedule endpoint.
    pub fn max_boundary_residual(&self) -> f64 {
        self.boundary_residuals
            .iter()
            .map(|(a, b)| a.abs().max(b.abs()))
            .fold(0.0, f64::max)
    }
}
