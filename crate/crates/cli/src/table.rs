//! Row output as CSV with a header, or one JSON object per line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use liberata::Measure;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Value>>,
}

pub fn measure(m: &Measure) -> Value {
    match m {
        Measure::Value(v) => float(*v),
        Measure::Absent(_) => Value::Null,
    }
}

pub fn float(v: f64) -> Value {
    // adding zero folds -0.0 into 0.0
    serde_json::Number::from_f64(v + 0.0).map_or(Value::Null, Value::Number)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Table with `prefix` columns followed by the fields of `items`.
    pub fn from_records<T: Serialize>(prefix: &[&str], items: impl IntoIterator<Item = (Vec<Value>, T)>) -> Self {
        let mut t = Table::new(prefix);
        for (lead, item) in items {
            let Value::Object(fields) = serde_json::to_value(item).expect("serializable record") else {
                panic!("record must serialize to an object");
            };
            if t.rows.is_empty() {
                t.header.extend(fields.keys().cloned());
            }
            let mut row = lead;
            row.extend(fields.into_iter().map(|(_, v)| flatten(v)));
            t.rows.push(row);
        }
        t
    }

    pub fn write(&self, json: bool, out: Option<&Path>) -> io::Result<()> {
        let mut w: Box<dyn Write> = match out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        if json {
            for row in &self.rows {
                let obj: Map<String, Value> = self.header.iter().cloned().zip(row.iter().cloned()).collect();
                serde_json::to_writer(&mut w, &obj)?;
                w.write_all(b"\n")?;
            }
        } else {
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(&self.header)?;
            for row in &self.rows {
                csv.write_record(row.iter().map(cell))?;
            }
            csv.flush()?;
        }
        w.flush()
    }
}

/// Absent measures serialize as `{value: null, absent: reason}`; rows
/// carry them as plain nulls.
fn flatten(v: Value) -> Value {
    match v {
        Value::Object(ref m) if m.contains_key("absent") => Value::Null,
        Value::Number(ref n) if n.is_f64() => n.as_f64().map_or(v, float),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}
