//! CSV tables with a `#` metadata line, grid files, and versioned JSON
//! reports. Output is deterministic: floats use the shortest round-trip
//! representation and JSON keys are sorted.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::pdesolve::{Chart, GridShape, ScalarGrid};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("{path}: {msg}")]
    File { path: String, msg: String },
    #[error("CSV: {0}")]
    Csv(String),
    #[error("JSON: {0}")]
    Json(String),
    #[error("schema: {0}")]
    Schema(String),
}

fn file_err(path: &Path, e: impl std::fmt::Display) -> IoError {
    IoError::File { path: path.display().to_string(), msg: e.to_string() }
}

/// `key=value` pairs, space separated, in key order.
pub type Meta = BTreeMap<String, String>;

fn meta_line(meta: &Meta) -> String {
    let parts: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", parts.join(" "))
}

fn parse_meta(line: &str) -> Meta {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Meta,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<Vec<f64>, IoError> {
        let k = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::Schema(format!("missing column {name}")))?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Shortest round-trip text; integral values print without a fraction.
fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

pub fn write_csv(path: &Path, meta: &Meta, header: &[&str], rows: &[Vec<f64>]) -> Result<(), IoError> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).map_err(|e| IoError::Csv(e.to_string()))?;
    for r in rows {
        if r.len() != header.len() {
            return Err(IoError::Csv(format!("row has {} fields, header {}", r.len(), header.len())));
        }
        w.write_record(r.iter().map(|&v| number(v))).map_err(|e| IoError::Csv(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| IoError::Csv(e.to_string()))?;
    let mut out = meta_line(meta).into_bytes();
    out.extend(body);
    fs::write(path, out).map_err(|e| file_err(path, e))
}

pub fn read_csv(path: &Path) -> Result<Table, IoError> {
    let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    let mut meta = Meta::new();
    let mut body = String::new();
    for line in text.lines() {
        if line.starts_with('#') {
            meta.extend(parse_meta(line));
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut r = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header: Vec<String> =
        r.headers().map_err(|e| IoError::Csv(e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| IoError::Csv(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| IoError::Csv(format!("not a number: {f:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { meta, header, rows })
}

/// Writes `i, j, x, y, <name>` rows with the grid geometry in the metadata.
pub fn write_grid(path: &Path, grid: &ScalarGrid, name: &str, extra: &Meta) -> Result<(), IoError> {
    let s = grid.shape;
    let mut meta = extra.clone();
    meta.insert("nx".into(), s.nx.to_string());
    meta.insert("ny".into(), s.ny.to_string());
    meta.insert("x0".into(), format!("{:?}", s.x0));
    meta.insert("y0".into(), format!("{:?}", s.y0));
    meta.insert("hx".into(), format!("{:?}", s.hx));
    meta.insert("hy".into(), format!("{:?}", s.hy));
    meta.insert("chart".into(), format!("{:?}", s.chart));
    let mut rows = Vec::with_capacity(s.len());
    for j in 0..s.ny {
        for i in 0..s.nx {
            rows.push(vec![i as f64, j as f64, s.x(i), s.y(j), grid.at(i, j)]);
        }
    }
    write_csv(path, &meta, &["i", "j", "x", "y", name], &rows)
}

/// Reads a file written by [`write_grid`]; the value column is the fifth.
pub fn read_grid(path: &Path) -> Result<(ScalarGrid, Meta), IoError> {
    let t = read_csv(path)?;
    let get = |k: &str| -> Result<&String, IoError> {
        t.meta.get(k).ok_or_else(|| IoError::Schema(format!("grid metadata lacks {k}")))
    };
    let num =
        |k: &str| -> Result<f64, IoError> { get(k)?.parse::<f64>().map_err(|_| IoError::Schema(format!("bad {k}"))) };
    let nx = num("nx")? as usize;
    let ny = num("ny")? as usize;
    let chart = match get("chart")?.as_str() {
        "Cartesian" => Chart::Cartesian,
        "LogPolar" => Chart::LogPolar,
        other => return Err(IoError::Schema(format!("unknown chart {other}"))),
    };
    let mut shape = GridShape::new(nx, ny, num("x0")?, num("y0")?, num("hx")?, num("hy")?)
        .map_err(|e| IoError::Schema(e.to_string()))?;
    shape.chart = chart;
    if t.header.len() != 5 || t.rows.len() != nx * ny {
        return Err(IoError::Schema(format!("expected {} rows of 5 fields", nx * ny)));
    }
    let mut g = ScalarGrid::filled(shape, 0.0);
    for r in &t.rows {
        let (i, j) = (r[0] as usize, r[1] as usize);
        if i >= nx || j >= ny || !r[4].is_finite() {
            return Err(IoError::Schema(format!("bad row {r:?}")));
        }
        g.set(i, j, r[4]);
    }
    Ok((g, t.meta))
}

/// Serialises `value` as an object with `"schema": 1` added, sorted keys.
pub fn to_report(value: &impl Serialize) -> Result<Value, IoError> {
    let mut v = serde_json::to_value(value).map_err(|e| IoError::Json(e.to_string()))?;
    match &mut v {
        Value::Object(m) => {
            m.insert("schema".into(), Value::from(SCHEMA_VERSION));
        }
        _ => return Err(IoError::Json("report must be an object".into())),
    }
    Ok(v)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), IoError> {
    let v = to_report(value)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| IoError::Json(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| file_err(path, e))
}

pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let s = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    let v: Value = serde_json::from_str(&s).map_err(|e| IoError::Json(e.to_string()))?;
    match v.get("schema").and_then(Value::as_u64) {
        Some(SCHEMA_VERSION) => Ok(v),
        other => Err(IoError::Schema(format!("expected schema {SCHEMA_VERSION}, found {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        let s = GridShape::rect(4, 3, -1.0, 0.5, 0.0, 2.0).unwrap();
        let g = ScalarGrid::from_xy(s, |x, y| x * 0.1 + y * y);
        let mut m = Meta::new();
        m.insert("field".into(), "psi".into());
        write_grid(&p, &g, "psi", &m).unwrap();
        let (h, meta) = read_grid(&p).unwrap();
        assert_eq!(h.values, g.values);
        assert_eq!(h.shape, g.shape);
        assert_eq!(meta["field"], "psi");
    }

    #[test]
    fn json_schema_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        let mut m = BTreeMap::new();
        m.insert("b", 2.0);
        m.insert("a", 1.0);
        write_json(&p, &m).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert_eq!(read_json(&p).unwrap()["schema"], 1);
        fs::write(&p, "{\"a\": 1}").unwrap();
        assert!(matches!(read_json(&p), Err(IoError::Schema(_))));
    }

    #[test]
    fn bad_number_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "# k=v\na,b\n1,x\n").unwrap();
        assert!(matches!(read_csv(&p), Err(IoError::Csv(_))));
    }
}
