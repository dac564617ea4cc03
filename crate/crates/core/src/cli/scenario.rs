use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::{ControlProblem, Envelope, Phase};
use crate::designer::calibrate::{calibrate_near, calibrate_scalar, Objective};
use crate::designer::individual::{evaluate_individual, resonant_sampler};
use crate::designer::st::repair_endpoints;
use crate::designer::{GateReport, PulseSchedule};
use crate::error::{Error, Result};
use crate::linalg::{phase_aligned_distance, Unitary2, ONE, ZERO};
use crate::oracle::{evolve_state, DEFAULT_STEPS};
use crate::zeta::ZetaSeries;

use super::io::{pulse_csv, trace_csv, write_atomic};
use super::report::{GateSummary, ScenarioSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioAxis {
    /// Δ(t) designed against Ω(t).
    SigmaZ,
    /// Ω′(t) designed against Δ′(t).
    SigmaXy,
    /// J(t) for `h·σx + J·σz`; the envelope is h.
    Exchange,
    /// Resonant and detuned pairs driven by one Ω′(t); the envelope is Δ.
    Individual,
}

/// Named gate: I, NOT, H, S, T, Rx(θ) or Rz(θ), angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSpec {
    I,
    Not,
    H,
    S,
    T,
    Rx(f64),
    Rz(f64),
}

impl GateSpec {
    pub fn unitary(self) -> Unitary2 {
        match self {
            GateSpec::I => Unitary2::identity(),
            GateSpec::Not => Unitary2::not(),
            GateSpec::H => Unitary2::hadamard(),
            GateSpec::S => Unitary2::s_gate(),
            GateSpec::T => Unitary2::t_gate(),
            GateSpec::Rx(a) => Unitary2::rx(a),
            GateSpec::Rz(a) => Unitary2::rz(a),
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::I => write!(f, "I"),
            GateSpec::Not => write!(f, "NOT"),
            GateSpec::H => write!(f, "H"),
            GateSpec::S => write!(f, "S"),
            GateSpec::T => write!(f, "T"),
            GateSpec::Rx(a) => write!(f, "Rx({a})"),
            GateSpec::Rz(a) => write!(f, "Rz({a})"),
        }
    }
}

impl FromStr for GateSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let angle = |prefix: &str| -> Option<Result<f64>> {
            let inner = s.strip_prefix(prefix)?.strip_suffix(')')?;
            Some(inner.trim().parse::<f64>().map_err(|e| {
                Error::Scenario(format!("bad angle in {s:?}: {e}"))
            }))
        };
        if let Some(a) = angle("Rx(") {
            return Ok(GateSpec::Rx(a?));
        }
        if let Some(a) = angle("Rz(") {
            return Ok(GateSpec::Rz(a?));
        }
        match s.to_ascii_uppercase().as_str() {
            "I" | "ID" | "IDENTITY" => Ok(GateSpec::I),
            "NOT" | "X" => Ok(GateSpec::Not),
            "H" => Ok(GateSpec::H),
            "S" => Ok(GateSpec::S),
            "T" => Ok(GateSpec::T),
            _ => Err(Error::Scenario(format!("unknown gate {s:?}"))),
        }
    }
}

impl Serialize for GateSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GateSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A named basis state or explicit amplitudes `[re₀, im₀, re₁, im₁]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Amplitudes([f64; 4]),
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Named("zero".into())
    }
}

impl StateSpec {
    pub fn vector(&self) -> Result<[Complex64; 2]> {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let i = Complex64::new(0.0, FRAC_1_SQRT_2);
        match self {
            StateSpec::Named(name) => match name.as_str() {
                "zero" => Ok([ONE, ZERO]),
                "one" => Ok([ZERO, ONE]),
                "plus" => Ok([r, r]),
                "minus" => Ok([r, -r]),
                "plus_i" => Ok([r, i]),
                "minus_i" => Ok([r, -i]),
                other => Err(Error::Scenario(format!("unknown state {other:?}"))),
            },
            StateSpec::Amplitudes([a, b, c, d]) => {
                Ok([Complex64::new(*a, *b), Complex64::new(*c, *d)])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSpec {
    /// Index into `zeta.terms` of the free amplitude.
    pub free: usize,
    pub objective: Objective,
    pub target: f64,
    /// Explicit bracket; when absent the bracket is searched outward from
    /// the current amplitude in steps of `step`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    #[serde(default = "default_step")]
    pub step: f64,
    /// Zero J at both endpoints before calibrating (exchange axis only).
    #[serde(default)]
    pub repair_endpoints: bool,
}

fn default_step() -> f64 {
    0.01
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_gate_fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_final_fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_final_p1: Option<f64>,
    /// Largest |controllable| at t = 0 and t = T, relative to |envelope(0)|.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_endpoint_relative: Option<f64>,
    /// Largest phase-aligned distance between analytic and oracle U(T).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Points in the pulse table.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Points in the dynamics trace.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Oracle steps over the whole window.
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_points() -> usize {
    1001
}

fn default_samples() -> usize {
    201
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            points: default_points(),
            samples: default_samples(),
            steps: default_steps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub axis: ScenarioAxis,
    /// ζ-series; its `T` is the scenario duration in μs.
    pub zeta: ZetaSeries,
    pub envelope: Envelope,
    #[serde(default)]
    pub phase: Phase,
    #[serde(default)]
    pub initial_state: StateSpec,
    pub target: GateSpec,
    /// Individual axis only: gate expected on the detuned pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuned_target: Option<GateSpec>,
    /// Overrides `target·initial_state` as the trace fidelity reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSpec>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: OutputOptions,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn duration(&self) -> f64 {
        self.zeta.duration()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::Scenario(format!(
                "name {:?} must be non-empty and use [A-Za-z0-9_-]",
                self.name
            )));
        }
        self.initial_state.vector()?;
        if let Some(s) = &self.target_state {
            s.vector()?;
        }
        match (self.axis, self.detuned_target) {
            (ScenarioAxis::Individual, None) => {
                return Err(Error::Scenario("individual axis needs detuned_target".into()))
            }
            (ScenarioAxis::Individual, Some(_)) => {}
            (_, Some(_)) => {
                return Err(Error::Scenario("detuned_target only applies to the individual axis".into()))
            }
            _ => {}
        }
        if matches!(self.axis, ScenarioAxis::Exchange | ScenarioAxis::Individual)
            && !matches!(self.envelope, Envelope::Constant { .. })
        {
            return Err(Error::Scenario(format!(
                "{:?} axis needs a constant envelope",
                self.axis
            )));
        }
        if self.output.samples < 2 || self.output.steps < 16 || self.output.points < 2 {
            return Err(Error::Scenario(
                "output needs samples >= 2, points >= 2 and steps >= 16".into(),
            ));
        }
        Ok(())
    }

    /// The control problem seen by the ζ machinery.
    pub fn problem(&self) -> ControlProblem {
        let t = self.duration();
        match self.axis {
            ScenarioAxis::SigmaZ | ScenarioAxis::Exchange => {
                ControlProblem::sigma_z(self.envelope.clone(), self.phase, t)
            }
            ScenarioAxis::SigmaXy | ScenarioAxis::Individual => {
                ControlProblem::sigma_xy(self.envelope.clone(), self.phase, t)
            }
        }
    }
}

/// One thresholded quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }

    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub summary: ScenarioSummary,
    pub files: Vec<PathBuf>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }
}

fn calibrated_series(scenario: &Scenario, problem: &ControlProblem) -> Result<(ZetaSeries, Option<usize>)> {
    let Some(spec) = &scenario.calibration else {
        return Ok((scenario.zeta.clone(), None));
    };
    let mut template = scenario.zeta.clone();
    if spec.repair_endpoints {
        if scenario.axis != ScenarioAxis::Exchange {
            return Err(Error::Scenario("repair_endpoints needs the exchange axis".into()));
        }
        template = repair_endpoints(&template, scenario.envelope.value(0.0))?;
    }
    let cal = match spec.bracket {
        Some([lo, hi]) => {
            calibrate_scalar(&template, spec.free, problem, spec.objective, spec.target, (lo, hi))?
        }
        None => calibrate_near(&template, spec.free, problem, spec.objective, spec.target, spec.step)?,
    };
    Ok((cal.series, Some(cal.iterations)))
}

/// Run a scenario and write `<name>_pulse.csv`, `<name>_trace.csv` (plus
/// `<name>_trace_detuned.csv` on the individual axis) and `<name>_report.toml`
/// into `out_dir`. An inadmissible series writes `<name>_admissibility.toml`
/// before returning the error.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<ScenarioOutcome> {
    scenario.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let problem = scenario.problem();
    let (series, iterations) = calibrated_series(scenario, &problem)?;
    let synthesized = match scenario.axis {
        ScenarioAxis::Exchange => {
            PulseSchedule::synthesize_exchange(&series, scenario.envelope.value(0.0), scenario.output.points)
        }
        _ => PulseSchedule::synthesize(&series, &problem, scenario.output.points),
    };
    let schedule = match synthesized {
        Ok(s) => s,
        Err(Error::Inadmissible(report)) => {
            let path = out_dir.join(format!("{}_admissibility.toml", scenario.name));
            write_atomic(&path, toml::to_string(&*report)?.as_bytes())?;
            return Err(Error::Inadmissible(report));
        }
        Err(e) => return Err(e),
    };

    let steps = scenario.output.steps;
    let samples = scenario.output.samples;
    let per_sample = steps.div_ceil(samples - 1).max(1);
    let psi0 = scenario.initial_state.vector()?;
    let reference = |gate: Unitary2| -> Result<[Complex64; 2]> {
        match &scenario.target_state {
            Some(s) => s.vector(),
            None => Ok(gate.matrix().apply(psi0)),
        }
    };

    let mut files = Vec::new();
    let mut write = |suffix: &str, bytes: Vec<u8>| -> Result<()> {
        let path = out_dir.join(format!("{}_{suffix}", scenario.name));
        write_atomic(&path, &bytes)?;
        files.push(path);
        Ok(())
    };
    write("pulse.csv", pulse_csv(&schedule)?)?;

    let mut reports: Vec<(String, GateReport)> = Vec::new();
    let mut final_points = Vec::new();
    match scenario.axis {
        ScenarioAxis::Individual => {
            let delta = scenario.envelope.value(0.0);
            let detuned_gate = scenario.detuned_target.expect("validated").unitary();
            let (resonant, detuned, _) =
                evaluate_individual(&series, delta, scenario.target.unitary(), detuned_gate, steps)?;
            let resonant_h = resonant_sampler(&series, &problem);
            let trace_r = evolve_state(&resonant_h, psi0, reference(scenario.target.unitary())?, samples, per_sample)?;
            let trace_d = evolve_state(&schedule.hamiltonian(), psi0, reference(detuned_gate)?, samples, per_sample)?;
            write("trace.csv", trace_csv(&trace_r)?)?;
            write("trace_detuned.csv", trace_csv(&trace_d)?)?;
            final_points.push(*trace_r.last().unwrap());
            final_points.push(*trace_d.last().unwrap());
            reports.push(("resonant".into(), resonant));
            reports.push(("detuned".into(), detuned));
        }
        _ => {
            let report = GateReport::evaluate(scenario.target.unitary(), std::slice::from_ref(&schedule), steps)?;
            let trace = evolve_state(&schedule.hamiltonian(), psi0, reference(scenario.target.unitary())?, samples, per_sample)?;
            write("trace.csv", trace_csv(&trace)?)?;
            final_points.push(*trace.last().unwrap());
            reports.push(("gate".into(), report));
        }
    }

    let t = &scenario.thresholds;
    let mut checks = Vec::new();
    for (label, r) in &reports {
        if let Some(min) = t.min_gate_fidelity {
            checks.push(Check::at_least(&format!("{label}_fidelity"), r.fidelity_numeric, min));
        }
        if let Some(max) = t.max_deviation {
            let d = phase_aligned_distance(r.achieved_analytic.matrix(), r.achieved_numeric.matrix());
            checks.push(Check::at_most(&format!("{label}_deviation"), d, max));
        }
    }
    for (k, p) in final_points.iter().enumerate() {
        let label = if k == 0 { "final" } else { "final_detuned" };
        if let Some(min) = t.min_final_fidelity {
            checks.push(Check::at_least(&format!("{label}_fidelity"), p.fidelity, min));
        }
        if let Some(min) = t.min_final_p1 {
            if k == 0 {
                checks.push(Check::at_least(&format!("{label}_p1"), p.p1, min));
            }
        }
    }
    if let Some(max) = t.max_endpoint_relative {
        let (a, b) = schedule.boundary_residuals();
        let scale = scenario.envelope.value(0.0).abs();
        checks.push(Check::at_most("endpoint_relative", a.abs().max(b.abs()) / scale, max));
    }

    let summary = ScenarioSummary {
        name: scenario.name.clone(),
        passed: checks.iter().all(|c| c.passed),
        calibration_iterations: iterations,
        zeta: series.clone(),
        boundary: schedule.boundary_residuals().into(),
        gates: reports
            .iter()
            .map(|(label, r)| GateSummary::from_report(label, r))
            .collect(),
        checks,
    };
    write("report.toml", toml::to_string(&summary)?.into_bytes())?;
    Ok(ScenarioOutcome { summary, files })
}
