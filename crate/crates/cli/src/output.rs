//! Row output in CSV or JSON lines.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cyltile::{FieldSample, TensorError};
use serde::Serialize;

use crate::scene::Format;

pub const CSV_HEADER: [&str; 13] = [
    "x", "y", "z", "Bx", "By", "Bz", "Hx", "Hy", "Hz", "H_abs", "inside", "provenance", "error",
];

/// One output row; `point` is in scene units.
pub struct Row<'a> {
    pub point: [f64; 3],
    pub result: &'a Result<FieldSample, TensorError>,
}

/// 17 significant digits, so values survive a text round trip.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_record(row: &Row) -> Vec<String> {
    let mut rec: Vec<String> = row.point.iter().map(|&v| float(v)).collect();
    match row.result {
        Ok(s) => {
            rec.extend(s.b.iter().chain(s.h.iter()).map(|&v| float(v)));
            rec.push(float(s.h.norm()));
            rec.push(u8::from(s.inside).to_string());
            rec.push(s.provenance.as_str().to_owned());
            rec.push(String::new());
        }
        Err(e) => {
            rec.extend(std::iter::repeat_n(String::new(), 9));
            rec.push(e.to_string());
        }
    }
    rec
}

#[derive(Serialize)]
struct JsonRow<'a> {
    x: f64,
    y: f64,
    z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_abs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inside: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn json_row<'a>(row: &'a Row) -> JsonRow<'a> {
    let [x, y, z] = row.point;
    match row.result {
        Ok(s) => JsonRow {
            x,
            y,
            z,
            b: Some(s.b.into()),
            h: Some(s.h.into()),
            h_abs: Some(s.h.norm()),
            inside: Some(s.inside),
            provenance: Some(s.provenance.as_str()),
            error: None,
        },
        Err(e) => JsonRow {
            x,
            y,
            z,
            b: None,
            h: None,
            h_abs: None,
            inside: None,
            provenance: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn write_rows(path: &Path, format: Format, rows: &[Row]) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
            w.write_record(CSV_HEADER)?;
            for row in rows {
                w.write_record(csv_record(row))?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = file;
            for row in rows {
                serde_json::to_writer(&mut w, &json_row(row))?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 6.02214076e23, 1e-300, 0.0] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn error_row_has_empty_values() {
        let res = Err(TensorError::NonFinitePoint);
        let rec = csv_record(&Row {
            point: [1.0, 2.0, 3.0],
            result: &res,
        });
        assert_eq!(rec.len(), CSV_HEADER.len());
        assert!(rec[3..12].iter().all(String::is_empty));
        assert!(!rec[12].is_empty());
    }
}
