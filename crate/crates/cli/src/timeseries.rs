//! Per-step CSV rows.

use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSeriesRow {
    pub step: u64,
    /// `step · Δt` (s).
    pub t: f64,
    pub storage: f64,
    pub supply_step: f64,
    pub supply_cum: f64,
    /// Initial storage plus cumulative supply.
    pub init_plus_supplied: f64,
    pub residual: f64,
    pub max_abs_state: f64,
    pub max_abs_potential: Option<f64>,
}

pub const HEADER: &str = "step,t,storage,supply_step,supply_cum,init_plus_supplied,residual,max_abs_state";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `rows` with 17 significant digits and LF line endings. The
/// potential column is present iff the first row carries one.
pub fn write_timeseries<W: Write>(rows: &[TimeSeriesRow], mut w: W) -> std::io::Result<()> {
    if rows.is_empty() {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidInput, "no rows to write"));
    }
    let with_pot = rows[0].max_abs_potential.is_some();
    w.write_all(HEADER.as_bytes())?;
    if with_pot {
        w.write_all(b",max_abs_potential")?;
    }
    w.write_all(b"\n")?;
    for r in rows {
        let mut line = format!(
            "{},{},{},{},{},{},{},{}",
            r.step,
            num(r.t),
            num(r.storage),
            num(r.supply_step),
            num(r.supply_cum),
            num(r.init_plus_supplied),
            num(r.residual),
            num(r.max_abs_state)
        );
        if with_pot {
            line.push(',');
            line.push_str(&num(r.max_abs_potential.unwrap_or(f64::NAN)));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

pub fn write_timeseries_csv(rows: &[TimeSeriesRow], path: &Path) -> std::io::Result<()> {
    let f = std::fs::File::create(path)?;
    write_timeseries(rows, std::io::BufWriter::new(f))
}

/// Parse a file written by [`write_timeseries_csv`].
pub fn read_timeseries_csv(path: &Path) -> Result<Vec<TimeSeriesRow>, csv::Error> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec[i].parse::<f64>().unwrap_or(f64::NAN);
        out.push(TimeSeriesRow {
            step: rec[0].parse().unwrap_or(0),
            t: f(1),
            storage: f(2),
            supply_step: f(3),
            supply_cum: f(4),
            init_plus_supplied: f(5),
            residual: f(6),
            max_abs_state: f(7),
            max_abs_potential: (rec.len() > 8).then(|| f(8)),
        });
    }
    Ok(out)
}
