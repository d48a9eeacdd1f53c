//! Rendering of command results as JSON, long-format CSV or a plain table.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

/// One command's result: the JSON body plus an optional `(series, t, value)` set.
pub struct Artifact {
    pub command: &'static str,
    pub body: Value,
    pub series: Vec<(String, f64, f64)>,
}

impl Artifact {
    pub fn new<T: Serialize>(command: &'static str, body: &T) -> Self {
        Artifact {
            command,
            body: serde_json::to_value(body).expect("results serialize"),
            series: Vec::new(),
        }
    }

    pub fn with_series(mut self, name: &str, pts: impl IntoIterator<Item = (f64, f64)>) -> Self {
        self.series
            .extend(pts.into_iter().map(|(t, v)| (name.to_string(), t, v)));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&serde_json::json!({
                    "command": self.command,
                    "result": self.body,
                }))
                .expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(),
            Format::Table => self.table(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.series.is_empty() {
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in flatten(&self.body) {
                w.write_record([k, v]).expect("in-memory write");
            }
        } else {
            w.write_record(["series", "t", "value"]).expect("in-memory write");
            for (name, t, v) in &self.series {
                w.write_record([name.clone(), fmt_num(*t), fmt_num(*v)])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    fn table(&self) -> String {
        let rows = flatten(&self.body);
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.command);
        for (k, v) in rows {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        if !self.series.is_empty() {
            out.push_str(&format!("  {:<12} {:>24} {:>24}\n", "series", "t", "value"));
            for (name, t, v) in &self.series {
                out.push_str(&format!("  {name:<12} {:>24} {:>24}\n", fmt_num(*t), fmt_num(*v)));
            }
        }
        out
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Dotted paths to scalar leaves; arrays of scalars are joined with `;`.
fn flatten(v: &Value) -> Vec<(String, String)> {
    fn go(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    go(&key, x, out);
                }
            }
            Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let s: Vec<String> = xs.iter().map(scalar).collect();
                out.push((prefix.to_string(), s.join(";")));
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    go(&format!("{prefix}[{i}]"), x, out);
                }
            }
            x => out.push((prefix.to_string(), scalar(x))),
        }
    }
    let mut out = Vec::new();
    go("", v, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        x => x.to_string(),
    }
}
