//! Number formatting and file writers. Output is a pure function of the
//! inputs so repeated runs give identical bytes.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::{Failure, Outcome};

pub const CSV_DIGITS: usize = 12;

/// `v` with `digits` significant digits, trailing zeros trimmed. Very large
/// or small magnitudes use exponent notation.
pub fn sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&mag) {
        let s = format!("{:.*e}", digits - 1, v);
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        return format!("{}e{}", trim(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    trim(&format!("{v:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_num(v: f64) -> String {
    sig(v, CSV_DIGITS)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Outcome<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_failure(path, e))?;
    w.write_record(header).map_err(|e| csv_failure(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_failure(path, e))?;
    }
    w.flush()?;
    Ok(())
}

fn csv_failure(path: &Path, e: csv::Error) -> Failure {
    Failure::invalid(format!("cannot write {}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::invalid(format!("cannot encode {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))
}
