// SPDX-License-Identifier: Apache-2.0

//! Deterministic text, JSON and CSV rendering. Every float goes out with 17 significant digits.

use std::io;

use gaussteady_core::{Complex64, RMat};
use serde::Serialize;
use serde_json::{json, Value};

/// `{:.16e}` for finite values; `NaN`, `inf`, `-inf` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// serde_json formatter that writes floats like [`fmt_f64`]. Non-finite values already
/// reach serde_json as `null`.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Compact JSON with fixed float formatting and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    // only in-memory values of our own types are serialized here
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

pub fn num(x: f64) -> Value {
    // serde_json maps non-finite floats to null
    json!(x)
}

pub fn matrix_json(m: &RMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array(m.row(i).iter().map(|&x| num(x)).collect())).collect())
}

pub fn vector_json(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn complex_json(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| json!({"re": num(z.re), "im": num(z.im)})).collect())
}

pub fn matrix_text(m: &RMat, indent: &str) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        s.push_str(indent);
        let row: Vec<String> = m.row(i).iter().map(|&x| format!("{:>24}", fmt_f64(x))).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn vector_text(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(", ")
}

pub fn complex_text(v: &[Complex64]) -> String {
    v.iter()
        .map(|z| {
            let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { '-' } else { '+' };
            format!("{} {sign} {}i", fmt_f64(z.re), fmt_f64(z.im.abs()))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Comma-separated table with a header row.
pub fn csv_table(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    // writes into a Vec never fail
    w.write_record(header).expect("in-memory CSV");
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt_f64(x))).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV of ASCII fields")
}
