//! CSV and JSON rendering of sweep tables.
//!
//! CSV columns start with the fixed schema (`k,phi,I_aa,I_ab,I_ba,I_bb,absorption`
//! for two ports, `k,k_c,phi,I_aa,...,I_cc` for three) and continue with
//! `energy`, `delta`, the remaining absorption column for two ports, and a
//! `flag`. `I_xy` is the flow into chain x for a photon entering through y.
//! Numbers carry 17 significant digits; missing values print as `nan`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{Format, Mode, Row, SweepTable};
use crate::waveguide::Channel;

pub const TWO_PORT_HEADER: &str = "k,phi,I_aa,I_ab,I_ba,I_bb,absorption,energy,delta,absorption_b,flag";
pub const THREE_PORT_HEADER: &str = "k,k_c,phi,I_aa,I_ab,I_ac,I_ba,I_bb,I_bc,I_ca,I_cb,I_cc,energy,delta,flag";

/// Renders a number with 17 significant digits; non-finite values as `nan`/`inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn csv_line(fields: impl IntoIterator<Item = f64>, tail: &str) -> String {
    let mut line: Vec<String> = fields.into_iter().map(format_number).collect();
    line.push(tail.to_owned());
    line.join(",")
}

fn two_port_line(row: &Row) -> String {
    use Channel::{A, B};
    let flows = [row.flow(A, A), row.flow(A, B), row.flow(B, A), row.flow(B, B)];
    let mut fields = vec![row.k, row.phi];
    fields.extend(flows);
    fields.extend([row.absorption[0], row.energy, row.delta, row.absorption[1]]);
    csv_line(fields, &row.flag.to_string())
}

fn three_port_line(row: &Row) -> String {
    let mut fields = vec![row.k, row.k_c, row.phi];
    fields.extend(row.flows.iter().flatten().copied());
    fields.extend([row.energy, row.delta]);
    csv_line(fields, &row.flag.to_string())
}

pub fn write_csv<W: Write>(table: &SweepTable, mut w: W) -> io::Result<()> {
    let (header, line): (_, fn(&Row) -> String) = match table.mode {
        Mode::TwoPort => (TWO_PORT_HEADER, two_port_line),
        Mode::ThreePort => (THREE_PORT_HEADER, three_port_line),
    };
    writeln!(w, "{header}")?;
    for row in &table.rows {
        writeln!(w, "{}", line(row))?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

/// Writes `table` to `path` in the requested format.
pub fn save(table: &SweepTable, path: &Path, format: Format) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(table, &mut w)?,
        Format::Json => write_json(table, &mut w)?,
    }
    w.flush()
}

/// Flow ratio `I_ab / I_ba` against `k` for several two-port parameter sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub labels: Vec<String>,
    pub k: Vec<f64>,
    /// `ratios[i][j]`: series `j` at `k[i]`.
    pub ratios: Vec<Vec<f64>>,
}

impl RatioTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = std::iter::once("k".to_owned())
            .chain(self.labels.iter().map(|l| format!("ratio_{l}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (k, ratios) in self.k.iter().zip(&self.ratios) {
            let fields: Vec<String> = std::iter::once(*k)
                .chain(ratios.iter().copied())
                .map(format_number)
                .collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}
