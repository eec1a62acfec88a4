//! CSV and JSON writers. Numbers use 17 significant digits in scientific
//! notation, `.` as decimal separator and LF line endings.

use std::io::{self, Write};

use csv::{Terminator, WriterBuilder};
use thinvisc_core::{LimitFields, PressureSolution, ValidationReport};

pub const PRESSURE_HEADER: &str = "x,q,p";
pub const FIELDS_HEADER: &str = "x,z,u1,u2,sigma11,sigma12,sigma22";
pub const RESCALED_HEADER: &str = "x,y,p,u1,u2,sigma11,sigma12,sigma22";

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(w: W, header: &str) -> csv::Result<csv::Writer<W>> {
    let mut out = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(header.split(','))?;
    Ok(out)
}

fn row<W: Write>(out: &mut csv::Writer<W>, values: &[f64]) -> csv::Result<()> {
    out.write_record(values.iter().map(|&v| num(v)))
}

pub fn write_pressure_csv<W: Write>(w: W, ps: &PressureSolution) -> io::Result<()> {
    let mut out = writer(w, PRESSURE_HEADER)?;
    for ((&x, &q), &p) in ps.x.iter().zip(&ps.q).zip(&ps.p) {
        row(&mut out, &[x, q, p])?;
    }
    out.flush()
}

/// Row-major over `(x, z)`: all heights of the first column, then the next.
pub fn write_fields_csv<W: Write>(w: W, f: &LimitFields) -> io::Result<()> {
    let mut out = writer(w, FIELDS_HEADER)?;
    let (n1, m1) = f.shape();
    for i in 0..n1 {
        for j in 0..m1 {
            let k = [i, j];
            row(
                &mut out,
                &[
                    f.x[i],
                    f.z[k],
                    f.u1[k],
                    f.u2[k],
                    f.sigma11[k],
                    f.sigma12[k],
                    f.sigma22[k],
                ],
            )?;
        }
    }
    out.flush()
}

/// Fields already mapped to a thin gap; `y` is the physical height.
pub fn write_rescaled_csv<W: Write>(w: W, f: &LimitFields) -> io::Result<()> {
    let mut out = writer(w, RESCALED_HEADER)?;
    let (n1, m1) = f.shape();
    for i in 0..n1 {
        let p = f.pressure.p[i];
        for j in 0..m1 {
            let k = [i, j];
            row(
                &mut out,
                &[
                    f.x[i],
                    f.z[k],
                    p,
                    f.u1[k],
                    f.u2[k],
                    f.sigma11[k],
                    f.sigma12[k],
                    f.sigma22[k],
                ],
            )?;
        }
    }
    out.flush()
}

pub fn rescaled_file_name(epsilon: f64) -> String {
    format!("fields_eps_{epsilon}.csv")
}

pub fn write_report<W: Write>(w: &mut W, report: &ValidationReport) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, report)?;
    w.write_all(b"\n")
}
