use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use zeta_core::cli::io::{pulse_csv, read_pulse_csv, trace_csv, write_atomic};
use zeta_core::cli::report::{entries, GateSummary, MatrixEntries};
use zeta_core::cli::scenario::{GateSpec, StateSpec};
use zeta_core::cli::{run_scenario, run_verify_suite, Scenario, VerifyOptions};
use zeta_core::designer::{
    build_st_gate, clifford_table, design_individual_control, word_string, IndividualTargets,
    StGate, Variant,
};
use zeta_core::error::{Error, Result};
use zeta_core::oracle::{evolve_state, DEFAULT_STEPS};
use zeta_core::zeta::{AdmissibilityReport, ViolationKind};

const PASS: u8 = 0;
const THRESHOLD_FAIL: u8 = 1;
const INVALID_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "zeta-pulse", version, about = "Smooth qubit pulses from an auxiliary angle ζ(t)")]
struct Cli {
    /// Directory for every file written.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Oracle steps over one pulse window.
    #[arg(long, global = true, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a gate and write its pulse tables and report.
    Design {
        #[command(subcommand)]
        kind: DesignKind,
    },
    /// Propagate a state through a pulse table and write the trace.
    Propagate(PropagateArgs),
    /// Compare closed-form and numerical propagators on random problems.
    Verify(VerifyArgs),
    /// Build the 24-element Clifford table for the singlet-triplet qubit.
    Clifford {
        /// Fixed field h in rad/μs.
        #[arg(long, default_value_t = 2.0 * PI)]
        h: f64,
        #[arg(long, default_value_t = 0.999)]
        min_fidelity: f64,
    },
    /// Run scenario files in parallel.
    Scenario {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DesignKind {
    /// Singlet-triplet gate with J(t) zero at both ends.
    St {
        /// H, S, T, NOT or Rx(θ).
        #[arg(long)]
        gate: GateSpec,
        #[arg(long, default_value_t = 2.0 * PI)]
        h: f64,
        #[arg(long, default_value_t = 0.999)]
        min_fidelity: f64,
    },
    /// One Ω′(t) for a resonant and a detuned pair.
    Individual {
        /// Detuning of the second pair in rad/μs.
        #[arg(long, default_value_t = 2.0 * PI)]
        delta: f64,
        /// Rotation angle of the resonant pair.
        #[arg(long, default_value_t = PI)]
        angle: f64,
        /// ξ of the detuned pair.
        #[arg(long, default_value_t = PI)]
        detuned_phase: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::PhaseGate)]
        variant: VariantArg,
        /// Plateau ζ₀ for `--variant boundary`.
        #[arg(long)]
        zeta0: Option<f64>,
        #[arg(long, default_value_t = 0.999)]
        min_fidelity: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    PhaseGate,
    XRotation,
    Boundary,
}

#[derive(Args)]
struct PropagateArgs {
    pulse: PathBuf,
    #[arg(long, default_value = "zero")]
    initial: String,
    /// Gate whose action on the initial state is the fidelity reference.
    #[arg(long, default_value = "I")]
    target: GateSpec,
    #[arg(long, default_value_t = 201)]
    samples: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = zeta_core::cli::verify::DEFAULT_COUNT)]
    count: usize,
    #[arg(long, default_value_t = zeta_core::cli::verify::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = zeta_core::cli::verify::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Replace the first case with constant ζ = π/4.
    #[arg(long)]
    rabi: bool,
}

#[derive(Serialize)]
struct DesignReport {
    design: String,
    durations: Vec<f64>,
    passed: bool,
    gate: GateSummary,
}

fn st_gate(spec: GateSpec) -> Result<StGate> {
    match spec {
        GateSpec::H => Ok(StGate::Hadamard),
        GateSpec::S => Ok(StGate::S),
        GateSpec::T => Ok(StGate::T),
        GateSpec::Not => Ok(StGate::Not),
        GateSpec::Rx(a) => Ok(StGate::XRotation(a)),
        other => Err(Error::InvalidArgument(format!("no singlet-triplet design for {other}"))),
    }
}

fn file_stem(spec: GateSpec) -> String {
    spec.to_string()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect::<String>()
        .trim_end_matches('_')
        .to_lowercase()
}

fn write(out: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let path = out.join(name);
    write_atomic(&path, bytes)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn verdict(passed: bool) -> u8 {
    if passed {
        PASS
    } else {
        THRESHOLD_FAIL
    }
}

fn design(kind: DesignKind, out: &Path, steps: usize) -> Result<u8> {
    match kind {
        DesignKind::St { gate, h, min_fidelity } => {
            let design = build_st_gate(st_gate(gate)?, h, steps)?;
            let stem = format!("st_{}", file_stem(gate));
            for (k, s) in design.schedules.iter().enumerate() {
                write(out, &format!("{stem}_{k}_pulse.csv"), &pulse_csv(s)?)?;
            }
            let passed = design.report.fidelity_numeric >= min_fidelity;
            let report = DesignReport {
                design: gate.to_string(),
                durations: design.schedules.iter().map(|s| s.duration()).collect(),
                passed,
                gate: GateSummary::from_report("gate", &design.report),
            };
            write(out, &format!("{stem}_report.toml"), toml::to_string(&report)?.as_bytes())?;
            println!("{gate}: fidelity {:.12}", design.report.fidelity_numeric);
            Ok(verdict(passed))
        }
        DesignKind::Individual {
            delta,
            angle,
            detuned_phase,
            variant,
            zeta0,
            min_fidelity,
        } => {
            let variant = match (variant, zeta0) {
                (VariantArg::PhaseGate, _) => Variant::PhaseGate,
                (VariantArg::XRotation, _) => Variant::XRotation,
                (VariantArg::Boundary, Some(z)) => Variant::Boundary(z),
                (VariantArg::Boundary, None) => {
                    return Err(Error::InvalidArgument("--variant boundary needs --zeta0".into()))
                }
            };
            let targets = IndividualTargets {
                pulse_area: angle,
                detuned_phase,
            };
            let d = design_individual_control(targets, delta, variant, None, steps)?;
            write(out, "individual_pulse.csv", &pulse_csv(&d.schedule)?)?;
            let passed = d.resonant.fidelity_numeric >= min_fidelity
                && d.detuned.fidelity_numeric >= min_fidelity;
            #[derive(Serialize)]
            struct Report {
                passed: bool,
                amplitude: f64,
                duration: f64,
                area: f64,
                xi: f64,
                resonant: GateSummary,
                detuned: GateSummary,
            }
            let report = Report {
                passed,
                amplitude: d.amplitude,
                duration: d.duration,
                area: d.area,
                xi: d.xi,
                resonant: GateSummary::from_report("resonant", &d.resonant),
                detuned: GateSummary::from_report("detuned", &d.detuned),
            };
            write(out, "individual_report.toml", toml::to_string(&report)?.as_bytes())?;
            println!(
                "A = {:.12}, T = {:.12} us, fidelity resonant {:.12}, detuned {:.12}",
                d.amplitude, d.duration, d.resonant.fidelity_numeric, d.detuned.fidelity_numeric
            );
            Ok(verdict(passed))
        }
    }
}

fn propagate(args: PropagateArgs, out: &Path, steps: usize) -> Result<u8> {
    if args.samples < 2 {
        return Err(Error::InvalidArgument("--samples must be at least 2".into()));
    }
    let table = read_pulse_csv(&std::fs::read(&args.pulse)?)?;
    let h = table.hamiltonian()?;
    let psi0 = StateSpec::Named(args.initial).vector()?;
    let reference = args.target.unitary().matrix().apply(psi0);
    let per_sample = steps.div_ceil(args.samples - 1).max(1);
    let trace = evolve_state(&h, psi0, reference, args.samples, per_sample)?;
    let stem = args
        .pulse
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("pulse")
        .trim_end_matches("_pulse");
    write(out, &format!("{stem}_trace.csv"), &trace_csv(&trace)?)?;
    if let Some(last) = trace.last() {
        println!("P0 {:.12}  P1 {:.12}  F {:.12}", last.p0, last.p1, last.fidelity);
    }
    Ok(PASS)
}

fn verify(args: VerifyArgs, out: &Path, steps: usize) -> Result<u8> {
    let opts = VerifyOptions {
        count: args.count,
        seed: args.seed,
        steps,
        tolerance: args.tolerance,
        include_rabi: args.rabi,
    };
    let summary = run_verify_suite(&opts)?;
    write(out, "verify_summary.csv", &summary.to_csv()?)?;
    let failed = summary.cases.iter().filter(|c| !c.passed).count();
    println!(
        "{} cases, {failed} above {:e}, max deviation {:e}",
        summary.cases.len(),
        summary.tolerance,
        summary.max_deviation
    );
    Ok(verdict(summary.passed))
}

fn clifford(h: f64, min_fidelity: f64, out: &Path, steps: usize) -> Result<u8> {
    let table = clifford_table(h, steps)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["index", "word", "schedules", "duration[us]", "fidelity"]
        .map(String::from)
        .to_vec();
    for rc in ["00", "01", "10", "11"] {
        header.push(format!("u{rc}_re"));
        header.push(format!("u{rc}_im"));
    }
    w.write_record(&header)?;
    for (k, e) in table.entries.iter().enumerate() {
        let u: MatrixEntries = entries(&e.achieved_numeric);
        let mut row = vec![
            k.to_string(),
            word_string(&e.word),
            e.schedules.len().to_string(),
            e.schedules.iter().fold(0.0, |acc, s| acc + s.duration()).to_string(),
            e.fidelity_numeric.to_string(),
        ];
        row.extend(u.iter().flatten().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write(out, "clifford.csv", &bytes)?;
    let endpoint = table.max_endpoint / h;
    println!(
        "{} classes, min fidelity {:.12}, max |J| at endpoints {:e} h",
        table.entries.len(),
        table.min_fidelity(),
        endpoint
    );
    Ok(verdict(table.min_fidelity() >= min_fidelity && endpoint < 1e-6))
}

fn summarize_violations(report: &AdmissibilityReport) {
    let mut seen: Vec<ViolationKind> = Vec::new();
    for v in &report.violations {
        if !seen.contains(&v.kind) {
            seen.push(v.kind);
        }
    }
    for kind in seen {
        let times: Vec<f64> = report
            .violations
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.t)
            .collect();
        eprintln!(
            "  {kind:?}: {} grid points in [{}, {}] us",
            times.len(),
            times[0],
            times[times.len() - 1]
        );
    }
}

fn scenarios(files: &[PathBuf], out: &Path) -> u8 {
    files
        .par_iter()
        .map(|path| {
            let result = Scenario::load(path).and_then(|s| run_scenario(&s, out));
            match result {
                Ok(outcome) => {
                    let failed: Vec<&str> = outcome
                        .summary
                        .checks
                        .iter()
                        .filter(|c| !c.passed)
                        .map(|c| c.name.as_str())
                        .collect();
                    if failed.is_empty() {
                        println!("{}: pass", outcome.summary.name);
                    } else {
                        println!("{}: FAIL {}", outcome.summary.name, failed.join(", "));
                    }
                    verdict(outcome.passed())
                }
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    if let Error::Inadmissible(report) = &e {
                        summarize_violations(report);
                    }
                    INVALID_INPUT
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .max()
        .unwrap_or(PASS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out_dir.as_path();
    let code = match cli.command {
        Command::Design { kind } => design(kind, out, cli.steps),
        Command::Propagate(args) => propagate(args, out, cli.steps),
        Command::Verify(args) => verify(args, out, cli.steps),
        Command::Clifford { h, min_fidelity } => clifford(h, min_fidelity, out, cli.steps),
        Command::Scenario { files } => Ok(scenarios(&files, out)),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INVALID_INPUT)
        }
    }
}
