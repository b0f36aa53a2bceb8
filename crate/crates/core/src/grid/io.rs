//! CSV (`index,t,value`) and JSON exchange formats.
//!
//! `t` is always written as an exact rational `p/q`. Values are `p/q` in
//! exact mode and shortest round-trip decimals in float mode. Lines starting
//! with `#` are comments.

use serde::{Deserialize, Serialize};

use super::{GridFunction, Orientation};
use crate::error::{Error, Result};
use crate::kernels::{format_rational, int, parse_rational, Mode, Rational, Scalar};

pub const CSV_HEADER: &str = "index,t,value";

pub fn write_csv<S: Scalar>(f: &GridFunction<S>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, (t, v)) in f.points().enumerate() {
        out.push_str(&format!("{i},{},{}\n", format_rational(&t), v.to_csv()));
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn build<S: Scalar>(rows: Vec<(usize, Rational, S)>, last_line: usize) -> Result<GridFunction<S>> {
    if rows.is_empty() {
        return Err(parse_err(last_line, "no data rows"));
    }
    let orientation = match rows.get(1) {
        Some((_, t1, _)) if *t1 == &rows[0].1 - int(1) => Orientation::Right,
        _ => Orientation::Left,
    };
    let base = rows[0].1.clone();
    let f = GridFunction::<S> {
        base,
        orientation,
        values: Vec::new(),
    };
    let mut values = Vec::with_capacity(rows.len());
    for (i, (line, t, v)) in rows.into_iter().enumerate() {
        if t != f.point(i) {
            return Err(parse_err(
                line,
                format!("t = {t} breaks the unit-step lattice (expected {})", f.point(i)),
            ));
        }
        values.push(v);
    }
    GridFunction::new(f.base, orientation, values)
}

pub fn read_csv<S: Scalar>(text: &str) -> Result<GridFunction<S>> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    let mut last_line = 0;
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            let header: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if header != ["index", "t", "value"] {
                return Err(parse_err(line, format!("expected header `{CSV_HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(parse_err(line, format!("expected 3 columns, got {}", cols.len())));
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| parse_err(line, format!("bad index `{}`", cols[0])))?;
        if index != rows.len() {
            return Err(parse_err(line, format!("index {index} out of sequence")));
        }
        let t = parse_rational(cols[1]).map_err(|e| parse_err(line, e.to_string()))?;
        let v = S::parse_csv(cols[2]).map_err(|e| parse_err(line, e.to_string()))?;
        rows.push((line, t, v));
    }
    if !header_seen {
        return Err(parse_err(last_line.max(1), "missing header"));
    }
    build(rows, last_line)
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    mode: Mode,
    orientation: Orientation,
    base: String,
    points: Vec<PointJson>,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    index: usize,
    t: String,
    value: serde_json::Value,
}

fn value_json<S: Scalar>(v: &S) -> serde_json::Value {
    match S::MODE {
        Mode::Exact => serde_json::Value::String(v.to_csv()),
        Mode::Float => serde_json::Number::from_f64(v.to_f64())
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(v.to_csv())),
    }
}

pub fn write_json<S: Scalar>(f: &GridFunction<S>) -> String {
    let doc = GridJson {
        mode: S::MODE,
        orientation: f.orientation(),
        base: format_rational(f.base()),
        points: f
            .points()
            .enumerate()
            .map(|(index, (t, v))| PointJson {
                index,
                t: format_rational(&t),
                value: value_json(v),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("grid json") + "\n"
}

pub fn read_json<S: Scalar>(text: &str) -> Result<GridFunction<S>> {
    let doc: GridJson = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    if doc.mode != S::MODE {
        return Err(Error::Mode(format!(
            "file holds {} values, {} requested",
            doc.mode,
            S::MODE
        )));
    }
    let base = parse_rational(&doc.base).map_err(|e| parse_err(0, e.to_string()))?;
    let mut values = Vec::with_capacity(doc.points.len());
    for (i, p) in doc.points.into_iter().enumerate() {
        let raw = match &p.value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(parse_err(0, format!("point {i}: bad value {other}"))),
        };
        if p.index != i {
            return Err(parse_err(0, format!("point {i}: index {} out of sequence", p.index)));
        }
        values.push(S::parse_csv(&raw).map_err(|e| parse_err(0, format!("point {i}: {e}")))?);
        let t = parse_rational(&p.t).map_err(|e| parse_err(0, e.to_string()))?;
        let expected = match doc.orientation {
            Orientation::Left => &base + int(i as i64),
            Orientation::Right => &base - int(i as i64),
        };
        if t != expected {
            return Err(parse_err(0, format!("point {i}: t = {t}, expected {expected}")));
        }
    }
    GridFunction::new(base, doc.orientation, values)
}
