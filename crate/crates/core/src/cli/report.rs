use serde::{Deserialize, Serialize};

use crate::designer::GateReport;
use crate::linalg::{phase_aligned_distance, Unitary2};
use crate::zeta::ZetaSeries;

use super::scenario::Check;

/// Row-major `[re, im]` pairs.
pub type MatrixEntries = [[f64; 2]; 4];

pub fn entries(u: &Unitary2) -> MatrixEntries {
    let m = u.matrix();
    let e = |r, c| {
        let z = m.get(r, c);
        [z.re, z.im]
    };
    [e(0, 0), e(0, 1), e(1, 0), e(1, 1)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSummary {
    pub label: String,
    pub fidelity_analytic: f64,
    pub fidelity_numeric: f64,
    /// Phase-aligned distance between the analytic and oracle unitaries.
    pub deviation: f64,
    pub xi_minus: Vec<f64>,
    pub xi_plus: Vec<f64>,
    pub target: MatrixEntries,
    pub analytic: MatrixEntries,
    pub numeric: MatrixEntries,
}

impl GateSummary {
    pub fn from_report(label: &str, r: &GateReport) -> Self {
        GateSummary {
            label: label.into(),
            fidelity_analytic: r.fidelity_analytic,
            fidelity_numeric: r.fidelity_numeric,
            deviation: phase_aligned_distance(r.achieved_analytic.matrix(), r.achieved_numeric.matrix()),
            xi_minus: r.xi_at_t.iter().map(|x| x.xi_minus).collect(),
            xi_plus: r.xi_at_t.iter().map(|x| x.xi_plus).collect(),
            target: entries(&r.target),
            analytic: entries(&r.achieved_analytic),
            numeric: entries(&r.achieved_numeric),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_iterations: Option<usize>,
    /// Controllable value at t = 0 and t = T (rad/μs).
    pub boundary: [f64; 2],
    pub zeta: ZetaSeries,
    pub checks: Vec<Check>,
    pub gates: Vec<GateSummary>,
}
