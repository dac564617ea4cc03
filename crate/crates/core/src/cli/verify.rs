//! Seeded comparison of the closed-form propagator against the oracle on
//! random admissible σz problems.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::control::{ControlProblem, Envelope, Phase};
use crate::designer::schedule::admissibility;
use crate::error::{Error, Result};
use crate::linalg::phase_aligned_distance;
use crate::oracle::{propagate_interval, HamiltonianSampler, DEFAULT_STEPS};
use crate::zeta::{ZetaSeries, ZetaTerm};

pub const DEFAULT_SEED: u64 = 20_240_531;
pub const DEFAULT_COUNT: usize = 200;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Extra margin on top of the admissibility guard for generated cases.
const SLOPE_MARGIN: f64 = 0.8;
const ZETA_MARGIN: f64 = 0.15;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub count: usize,
    pub seed: u64,
    pub steps: usize,
    pub tolerance: f64,
    /// Make case 0 the constant ζ = π/4 Rabi problem.
    pub include_rabi: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            count: DEFAULT_COUNT,
            seed: DEFAULT_SEED,
            steps: DEFAULT_STEPS,
            tolerance: DEFAULT_TOLERANCE,
            include_rabi: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCase {
    pub index: usize,
    pub series: ZetaSeries,
    pub envelope: Envelope,
    pub phase: Phase,
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub steps: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub cases: Vec<VerifyCase>,
}

impl VerifySummary {
    /// One line per case, `case,deviation,pass`, after a header.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["case", "duration[us]", "A0", "terms", "deviation", "pass"])?;
        for c in &self.cases {
            let terms: Vec<String> = c
                .series
                .terms()
                .iter()
                .map(|t| format!("{}:{}:{}", t.power, t.amplitude, t.frequency))
                .collect();
            w.write_record([
                c.index.to_string(),
                c.series.duration().to_string(),
                c.series.a0().to_string(),
                terms.join(" "),
                format!("{:e}", c.deviation),
                c.passed.to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

struct Case {
    series: ZetaSeries,
    problem: ControlProblem,
}

fn random_case(rng: &mut ChaCha8Rng) -> Result<Case> {
    loop {
        let duration = rng.gen_range(0.3..1.2);
        let envelope = if rng.gen_bool(0.5) {
            Envelope::constant(rng.gen_range(PI..4.0 * PI))
        } else {
            let offset = rng.gen_range(2.0 * PI..4.0 * PI);
            Envelope::Sine {
                offset,
                amplitude: rng.gen_range(0.0..0.4) * offset,
                angular_frequency: rng.gen_range(1.0..4.0) * PI / duration,
                phase: rng.gen_range(0.0..2.0 * PI),
            }
        };
        let phase = if rng.gen_bool(0.5) {
            Phase::Constant {
                value: rng.gen_range(-PI..PI),
            }
        } else {
            Phase::Sine {
                amplitude: rng.gen_range(0.0..1.0),
                angular_frequency: 2.0 * PI / duration,
                offset: rng.gen_range(-PI..PI),
            }
        };
        let terms = (0..rng.gen_range(1..=3))
            .map(|_| {
                ZetaTerm::new(
                    rng.gen_range(1..=3),
                    rng.gen_range(-0.15..0.15),
                    rng.gen_range(1..=3),
                )
            })
            .collect();
        let series = ZetaSeries::new(rng.gen_range(PI / 8.0..3.0 * PI / 8.0), terms, duration)?;
        let problem = ControlProblem::sigma_z(envelope, phase, duration);
        let report = admissibility(&series, &problem)?;
        if report.admissible
            && report.max_slope_ratio < SLOPE_MARGIN
            && report.min_zeta > ZETA_MARGIN
            && report.max_zeta < PI / 2.0 - ZETA_MARGIN
        {
            return Ok(Case { series, problem });
        }
    }
}

fn rabi_case() -> Result<Case> {
    let duration = 0.8;
    Ok(Case {
        series: ZetaSeries::constant(FRAC_PI_4, duration)?,
        problem: ControlProblem::sigma_z(Envelope::constant(2.0 * PI), Phase::zero(), duration),
    })
}

fn deviation(case: &Case, steps: usize) -> Result<f64> {
    let t = case.problem.duration;
    let u = analytic::propagator(&case.series, &case.problem, t)?;
    let (series, problem) = (case.series.clone(), case.problem.clone());
    let h = HamiltonianSampler::new("verify", t, move |s| {
        analytic::synthesized_hamiltonian(&series, &problem, s)
    });
    let v = propagate_interval(&h, 0.0, t, steps)?;
    Ok(phase_aligned_distance(u.matrix(), &v))
}

/// Generate the cases sequentially from the seed, evaluate them in
/// parallel and keep the input order. Per-case failures are recorded as
/// infinite deviations.
pub fn run_verify_suite(opts: &VerifyOptions) -> Result<VerifySummary> {
    if opts.count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cases = (0..opts.count)
        .map(|k| {
            if k == 0 && opts.include_rabi {
                rabi_case()
            } else {
                random_case(&mut rng)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<VerifyCase> = cases
        .into_par_iter()
        .enumerate()
        .map(|(index, case)| {
            let d = deviation(&case, opts.steps).unwrap_or(f64::INFINITY);
            VerifyCase {
                index,
                deviation: d,
                passed: d < opts.tolerance,
                series: case.series,
                envelope: case.problem.envelope,
                phase: case.problem.phase,
            }
        })
        .collect();
    let max_deviation = results.iter().map(|c| c.deviation).fold(0.0, f64::max);
    Ok(VerifySummary {
        seed: opts.seed,
        steps: opts.steps,
        tolerance: opts.tolerance,
        max_deviation,
        passed: results.iter().all(|c| c.passed),
        cases: results,
    })
}
