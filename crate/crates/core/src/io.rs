//! CSV import/export for grid functions, kernels, pseudospectra, and
//! symbol samples, plus a canonical JSON writer.
//!
//! All floats are printed with 17 significant digits, so round-trips are
//! bit-exact. JSON output is canonical: keys sorted, floats in a fixed
//! exponent format, no timestamps — byte-identical reruns diff cleanly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operators::Kernel;
use crate::spectra::PseudospectrumGrid;
use crate::weights::Weight;
use crate::C64;

/// Relative slack when matching imported abscissae against the lattice.
const LATTICE_TOL: f64 = 1e-9;

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(row: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        row,
        message: message.into(),
    }
}

fn parse_field(rec: &csv::StringRecord, idx: usize, line: usize, what: &str) -> Result<f64> {
    let raw = rec
        .get(idx)
        .ok_or_else(|| csv_err(line, format!("missing {what} column")))?;
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| csv_err(line, format!("unparseable {what} value {raw:?}")))?;
    if !v.is_finite() {
        return Err(csv_err(line, format!("non-finite {what} value {raw:?}")));
    }
    Ok(v)
}

/// Read rows of a headed CSV file, handing each to `f` with its 1-based
/// file line number.
fn read_rows(
    path: &Path,
    expected_header: &[&str],
    mut f: impl FnMut(usize, &csv::StringRecord) -> Result<()>,
) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(0, e.to_string()))?;
    let header = rdr.headers().map_err(|e| csv_err(1, e.to_string()))?;
    if header != *expected_header {
        return Err(csv_err(
            1,
            format!("expected header {:?}, found {:?}", expected_header.join(","), header),
        ));
    }
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_err(line, e.to_string()))?;
        if rec.len() != expected_header.len() {
            return Err(csv_err(
                line,
                format!("expected {} fields, found {}", expected_header.len(), rec.len()),
            ));
        }
        f(line, &rec)?;
    }
    Ok(())
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    let mut out = String::from("x,re,im\n");
    for (j, v) in f.samples().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(f.grid().node(j)),
            fmt_f64(v.re),
            fmt_f64(v.im)
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Import a grid function; the abscissae must form the midpoint lattice
/// (j+½)h for a single positive h, which is inferred from the file.
pub fn read_grid_function(path: &Path, weight: Weight) -> Result<GridFunction> {
    let mut xs: Vec<f64> = Vec::new();
    let mut samples: Vec<C64> = Vec::new();
    read_rows(path, &["x", "re", "im"], |line, rec| {
        xs.push(parse_field(rec, 0, line, "x")?);
        samples.push(C64::new(
            parse_field(rec, 1, line, "re")?,
            parse_field(rec, 2, line, "im")?,
        ));
        Ok(())
    })?;
    if xs.len() < 2 {
        return Err(csv_err(xs.len() + 1, "need at least 2 rows to infer the grid"));
    }
    let h = xs[1] - xs[0];
    if !(h.is_finite() && h > 0.0) {
        return Err(csv_err(3, format!("non-increasing abscissae ({} then {})", xs[0], xs[1])));
    }
    for (j, &x) in xs.iter().enumerate() {
        let expected = (j as f64 + 0.5) * h;
        if (x - expected).abs() > LATTICE_TOL * h {
            return Err(csv_err(
                j + 2,
                format!("abscissa {x} is off the midpoint lattice (expected {expected})"),
            ));
        }
    }
    let grid = Grid::new(h * xs.len() as f64, xs.len())?;
    GridFunction::new(grid, weight, samples)
}

pub fn write_kernel(path: &Path, k: &Kernel) -> Result<()> {
    let mut out = String::from("t,re,im\n");
    let h = k.spacing();
    for (m, v) in k.samples().iter().enumerate() {
        let t = (k.start_step() + m as i64) as f64 * h;
        let _ = writeln!(out, "{},{},{}", fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Import a kernel whose samples must sit on the lattice of the working
/// grid spacing.
pub fn read_kernel(path: &Path, grid_spacing: f64) -> Result<Kernel> {
    if !(grid_spacing.is_finite() && grid_spacing > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kernel import needs a positive grid spacing, got {grid_spacing}"
        )));
    }
    let mut ts: Vec<f64> = Vec::new();
    let mut samples: Vec<C64> = Vec::new();
    read_rows(path, &["t", "re", "im"], |line, rec| {
        ts.push(parse_field(rec, 0, line, "t")?);
        samples.push(C64::new(
            parse_field(rec, 1, line, "re")?,
            parse_field(rec, 2, line, "im")?,
        ));
        Ok(())
    })?;
    if ts.is_empty() {
        return Err(csv_err(2, "kernel file has no samples"));
    }
    if ts.len() >= 2 {
        let file_spacing = ts[1] - ts[0];
        if (file_spacing - grid_spacing).abs() > LATTICE_TOL * grid_spacing {
            return Err(csv_err(
                3,
                format!("kernel spacing {file_spacing} does not match the grid spacing {grid_spacing}"),
            ));
        }
    }
    for (j, &t) in ts.iter().enumerate() {
        let expected = ts[0] + j as f64 * grid_spacing;
        if (t - expected).abs() > LATTICE_TOL * grid_spacing {
            return Err(csv_err(
                j + 2,
                format!("abscissa {t} breaks the uniform spacing (expected {expected})"),
            ));
        }
    }
    Kernel::new(ts[0], grid_spacing, samples)
}

pub fn write_pseudospectrum_csv(path: &Path, ps: &PseudospectrumGrid) -> Result<()> {
    let mut out = String::from("z_re,z_im,sigma_min\n");
    for ((re, im), s) in ps.nodes.iter().zip(&ps.sigma_min) {
        let sigma = if s.is_finite() {
            fmt_f64(*s)
        } else {
            "NaN".to_string()
        };
        let _ = writeln!(out, "{},{},{}", fmt_f64(*re), fmt_f64(*im), sigma);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_symbol_samples(path: &Path, rows: &[(f64, f64, C64)]) -> Result<()> {
    let mut out = String::from("xi,a,re,im\n");
    for (xi, a, v) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(*xi),
            fmt_f64(*a),
            fmt_f64(v.re),
            fmt_f64(v.im)
        );
    }
    fs::write(path, out)?;
    Ok(())
}

struct CanonicalFloats;

impl serde_json::ser::Formatter for CanonicalFloats {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Canonical JSON: keys sorted, floats in fixed 17-digit exponent form,
/// non-finite floats as null. Byte-identical across reruns.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::InvalidArgument(format!("not serializable: {e}")))?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFloats);
    v.serialize(&mut ser)
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json emits utf8"))
}

pub fn write_json_canonical<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut doc = to_canonical_json(value)?;
    doc.push('\n');
    fs::write(path, doc)?;
    Ok(())
}
