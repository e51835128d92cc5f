use std::io::{Read, Write};

use super::sweep::{PlotAxis, TrialRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    PlotData(PlotAxis),
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)
}

/// `x,success_rate` rows, one per distinct axis value, ascending. Records
/// without a recovery outcome are skipped.
pub fn plot_data(records: &[TrialRecord], axis: PlotAxis) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for r in records {
        let Some(ok) = r.support_match else { continue };
        let x = match axis {
            PlotAxis::Rho => r.rho,
            PlotAxis::K => r.k as f64,
            PlotAxis::Epsilon => r.epsilon,
        };
        match groups.iter_mut().find(|g| g.0 == x) {
            Some(g) => {
                g.1 += 1;
                g.2 += usize::from(ok);
            }
            None => groups.push((x, 1, usize::from(ok))),
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = String::from("x,success_rate\n");
    for (x, count, ok) in groups {
        out.push_str(&format!("{x},{}\n", ok as f64 / count as f64));
    }
    Ok(out)
}

pub fn emit_report<W: Write>(
    records: &[TrialRecord],
    format: ReportFormat,
    mut out: W,
) -> Result<()> {
    match format {
        ReportFormat::Csv => write_csv(records, out),
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, records)
                .map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(b"\n")?;
            Ok(())
        }
        ReportFormat::PlotData(axis) => {
            out.write_all(plot_data(records, axis)?.as_bytes())?;
            Ok(())
        }
    }
}
