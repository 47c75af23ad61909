//! CSV formats for intensity data, illumination records and recovered
//! fields, and atomic file output.
//!
//! Floating-point values are written with 17 significant digits so that
//! every file round-trips bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forward::{FieldRole, FieldVector, IlluminationKind, IntensityData};

pub const INTENSITY_HEADER: [&str; 4] = ["freq_index", "omega_rad_s", "receiver_index", "value"];
pub const RECOVERED_HEADER: [&str; 5] = ["freq_index", "omega_rad_s", "receiver_index", "re", "im"];

/// Writes `contents` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(std::io::Error::other(format!("not a file path: {}", path.display()))))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Hex-encoded SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses CSV text with an exact header, mapping each record through `row`.
/// `row` receives the record and its 1-based line number.
pub fn parse_records<T>(
    text: &str,
    header: &[&str],
    mut row: impl FnMut(&csv::StringRecord, usize) -> Result<T>,
) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::parse(
            "header",
            format!(
                "expected `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(format!("line {line}"), e.to_string()))?;
        if rec.len() != header.len() {
            return Err(Error::parse(
                format!("line {line}"),
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        out.push(row(&rec, line)?);
    }
    Ok(out)
}

/// Parses field `i` of a record.
pub fn field<T: FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|e: T::Err| Error::parse(format!("line {line}, column {}", i + 1), format!("`{raw}`: {e}")))
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn intensity_csv(data: &IntensityData) -> String {
    let mut out = INTENSITY_HEADER.join(",");
    out.push('\n');
    for (i, (w, row)) in data.omegas.iter().zip(&data.rows).enumerate() {
        for (r, v) in row.iter().enumerate() {
            writeln!(out, "{i},{},{r},{}", fmt_f64(*w), fmt_f64(*v)).expect("writing to a String");
        }
    }
    out
}

pub fn illumination_csv(data: &IntensityData) -> String {
    let mut out = format!("freq_index,omega_rad_s,{}\n", data.kind.column());
    for (i, (w, f)) in data.omegas.iter().zip(&data.illumination).enumerate() {
        writeln!(out, "{i},{},{}", fmt_f64(*w), fmt_f64(*f)).expect("writing to a String");
    }
    out
}

/// Rows of a per-(frequency, receiver) table, checked to form a complete
/// grid sorted by frequency then receiver.
fn gridded<T>(rows: Vec<(usize, f64, usize, T)>) -> Result<(Vec<f64>, Vec<Vec<T>>)> {
    let mut omegas: Vec<f64> = Vec::new();
    let mut table: Vec<Vec<T>> = Vec::new();
    for (k, (fi, w, ri, v)) in rows.into_iter().enumerate() {
        let line = k + 2;
        if fi == omegas.len() && ri == 0 {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::parse(
                    format!("line {line}"),
                    format!("bad angular frequency {w}"),
                ));
            }
            omegas.push(w);
            table.push(Vec::new());
        }
        if fi + 1 != omegas.len() || ri != table[fi].len() {
            return Err(Error::parse(
                format!("line {line}"),
                "rows must be sorted by freq_index then receiver_index with no gaps",
            ));
        }
        if w.to_bits() != omegas[fi].to_bits() {
            return Err(Error::parse(
                format!("line {line}"),
                format!("frequency {fi} listed with two different omegas"),
            ));
        }
        table[fi].push(v);
    }
    if let Some(first) = table.first() {
        if let Some(i) = table.iter().position(|row| row.len() != first.len()) {
            return Err(Error::parse(
                "receiver_index",
                format!(
                    "frequency {i} has {} receivers, frequency 0 has {}",
                    table[i].len(),
                    first.len()
                ),
            ));
        }
    }
    Ok((omegas, table))
}

/// Intensity rows and their frequencies.
pub fn parse_intensity_csv(text: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let rows = parse_records(text, &INTENSITY_HEADER, |rec, line| {
        let v: f64 = field(rec, 3, line)?;
        if !v.is_finite() {
            return Err(Error::parse(format!("line {line}"), "intensity must be finite"));
        }
        Ok((field(rec, 0, line)?, field(rec, 1, line)?, field(rec, 2, line)?, v))
    })?;
    gridded(rows)
}

/// Illumination record: kind from the header, frequencies and values.
pub fn parse_illumination_csv(text: &str) -> Result<(IlluminationKind, Vec<f64>, Vec<f64>)> {
    let kind = if text
        .lines()
        .next()
        .is_some_and(|h| h.trim_end().ends_with("twopi_Fhat"))
    {
        IlluminationKind::TwoPiFhat
    } else {
        IlluminationKind::FhatSquared
    };
    let header = ["freq_index", "omega_rad_s", kind.column()];
    let rows = parse_records(text, &header, |rec, line| {
        let i: usize = field(rec, 0, line)?;
        let w: f64 = field(rec, 1, line)?;
        let f: f64 = field(rec, 2, line)?;
        if !(f >= 0.0) || !f.is_finite() {
            return Err(Error::parse(
                format!("line {line}"),
                format!("illumination must be finite and nonnegative, got {f}"),
            ));
        }
        Ok((i, w, f))
    })?;
    let mut omegas = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for (k, (i, w, f)) in rows.into_iter().enumerate() {
        if i != k {
            return Err(Error::parse(
                format!("line {}", k + 2),
                format!("expected freq_index {k}"),
            ));
        }
        omegas.push(w);
        values.push(f);
    }
    Ok((kind, omegas, values))
}

/// Joins an intensity table with its illumination record.
pub fn parse_intensity_data(intensity: &str, illumination: &str) -> Result<IntensityData> {
    let (omegas, rows) = parse_intensity_csv(intensity)?;
    let (kind, sidecar_omegas, values) = parse_illumination_csv(illumination)?;
    if sidecar_omegas.len() != omegas.len()
        || sidecar_omegas
            .iter()
            .zip(&omegas)
            .any(|(a, b)| a.to_bits() != b.to_bits())
    {
        return Err(Error::Mismatch(
            "illumination record and intensities list different frequencies".into(),
        ));
    }
    Ok(IntensityData {
        omegas,
        rows,
        illumination: values,
        kind,
    })
}

pub fn recovered_csv(omegas: &[f64], fields: &[FieldVector]) -> String {
    let mut out = RECOVERED_HEADER.join(",");
    out.push('\n');
    for (i, (w, f)) in omegas.iter().zip(fields).enumerate() {
        for (r, v) in f.values.iter().enumerate() {
            writeln!(out, "{i},{},{r},{},{}", fmt_f64(*w), fmt_f64(v.re), fmt_f64(v.im)).expect("writing to a String");
        }
    }
    out
}

/// Recovered (or any per-receiver complex) fields and their frequencies.
pub fn parse_recovered_csv(text: &str) -> Result<(Vec<f64>, Vec<FieldVector>)> {
    let rows = parse_records(text, &RECOVERED_HEADER, |rec, line| {
        let v = Complex64::new(field(rec, 3, line)?, field(rec, 4, line)?);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::parse(format!("line {line}"), "field values must be finite"));
        }
        Ok((field(rec, 0, line)?, field(rec, 1, line)?, field(rec, 2, line)?, v))
    })?;
    let (omegas, table) = gridded(rows)?;
    Ok((
        omegas,
        table
            .into_iter()
            .map(|values| FieldVector::new(FieldRole::Recovered, values))
            .collect(),
    ))
}
