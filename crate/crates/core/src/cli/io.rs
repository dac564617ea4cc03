//! Plot-ready CSV tables and atomic file output.
//!
//! Pulse tables carry one header line `t[us],<quantity>[rad/us],<fixed>[rad/us],phi[rad]`
//! where `<quantity>` is `delta`, `omega_prime` or `J`. Dynamics traces use
//! `t[us],P0,P1,F`.

use std::io::Write;
use std::path::Path;

use crate::control::SampledCurve;
use crate::designer::{PulseSchedule, Quantity};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::oracle::{HamiltonianSampler, TracePoint};

pub const TRACE_HEADER: [&str; 4] = ["t[us]", "P0", "P1", "F"];

/// Write to a temporary file beside `path`, then rename over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn header(quantity: Quantity) -> [String; 4] {
    [
        "t[us]".into(),
        format!("{}[rad/us]", quantity.column()),
        format!("{}[rad/us]", quantity.fixed_column()),
        "phi[rad]".into(),
    ]
}

pub fn pulse_csv(schedule: &PulseSchedule) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(schedule.quantity))?;
    for k in 0..schedule.grid.len() {
        w.write_record([
            schedule.grid[k].to_string(),
            schedule.controllable[k].to_string(),
            schedule.fixed[k].to_string(),
            schedule.phase[k].to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn trace_csv(trace: &[TracePoint]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRACE_HEADER)?;
    for p in trace {
        w.write_record([
            p.t.to_string(),
            p.p0.to_string(),
            p.p1.to_string(),
            p.fidelity.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// A pulse table read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTable {
    pub quantity: Quantity,
    pub t: Vec<f64>,
    pub controllable: Vec<f64>,
    pub fixed: Vec<f64>,
    pub phi: Vec<f64>,
}

fn quantity_from_header(name: &str) -> Result<Quantity> {
    let bare = name.split('[').next().unwrap_or("").trim();
    [Quantity::Detuning, Quantity::DriveAmplitude, Quantity::Exchange]
        .into_iter()
        .find(|q| q.column() == bare)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown pulse column {name:?}")))
}

pub fn read_pulse_csv(bytes: &[u8]) -> Result<PulseTable> {
    let mut r = csv::Reader::from_reader(bytes);
    let headers = r.headers()?.clone();
    if headers.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "pulse table needs 4 columns, found {}",
            headers.len()
        )));
    }
    let quantity = quantity_from_header(&headers[1])?;
    let mut table = PulseTable {
        quantity,
        t: Vec::new(),
        controllable: Vec::new(),
        fixed: Vec::new(),
        phi: Vec::new(),
    };
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<f64> {
            record[k].trim().parse().map_err(|e| {
                Error::InvalidArgument(format!("row {}: column {k}: {e}", line + 2))
            })
        };
        table.t.push(field(0)?);
        table.controllable.push(field(1)?);
        table.fixed.push(field(2)?);
        table.phi.push(field(3)?);
    }
    Ok(table)
}

impl PulseTable {
    pub fn duration(&self) -> f64 {
        *self.t.last().unwrap_or(&0.0)
    }

    /// Hamiltonian interpolated from the table with cubic Hermite curves.
    /// The grid must be uniform and start at 0.
    pub fn hamiltonian(&self) -> Result<HamiltonianSampler> {
        let n = self.t.len();
        if n < 2 || self.t[0] != 0.0 {
            return Err(Error::InvalidArgument(
                "pulse table needs at least two rows starting at t = 0".into(),
            ));
        }
        let step = self.duration() / (n - 1) as f64;
        let uneven = self
            .t
            .iter()
            .enumerate()
            .any(|(k, &t)| (t - k as f64 * step).abs() > 1e-9 * self.duration().max(1.0));
        if uneven {
            return Err(Error::InvalidArgument("pulse table grid is not uniform".into()));
        }
        let curve = |v: &[f64]| SampledCurve::new(0.0, step, v.to_vec());
        let designed = curve(&self.controllable)?;
        let fixed = curve(&self.fixed)?;
        let phi = curve(&self.phi)?;
        let quantity = self.quantity;
        Ok(HamiltonianSampler::new(
            format!("{} table", quantity.column()),
            self.duration(),
            move |t| {
                let (d, f, p) = (designed.eval(t).0, fixed.eval(t).0, phi.eval(t).0);
                Ok(match quantity {
                    Quantity::Detuning | Quantity::Exchange => Mat2::drive(d, f, p),
                    Quantity::DriveAmplitude => Mat2::drive(f, d, p),
                })
            },
        ))
    }
}
