//! The single structured record every command prints.

use serde_json::{json, Map, Value};

/// Output layout version.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

pub struct Record {
    pub command: String,
    pub inputs: Value,
    pub parameters: Value,
    pub result: Value,
    /// Conditions under which a result should be read with care.
    pub flags: Vec<String>,
    /// Raw values printed one per line in TSV mode, so a simulation can be
    /// fed back as an input file.
    pub values: Option<Vec<Value>>,
}

impl Record {
    pub fn new(
        command: impl Into<String>,
        inputs: Value,
        parameters: Value,
        result: Value,
    ) -> Self {
        Record {
            command: command.into(),
            inputs,
            parameters,
            result,
            flags: Vec::new(),
            values: None,
        }
    }

    pub fn with_flags(mut self, flags: impl IntoIterator<Item = String>) -> Self {
        self.flags.extend(flags);
        self
    }

    pub fn with_values(mut self, values: Vec<Value>) -> Self {
        self.values = Some(values);
        self
    }

    fn to_json(&self) -> Value {
        let mut result = self.result.clone();
        if let (Some(values), Value::Object(map)) = (&self.values, &mut result) {
            map.insert("values".into(), Value::Array(values.clone()));
        }
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "result": result,
            "flags": self.flags,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("values are serializable");
                s.push('\n');
                s
            }
            Format::Tsv => match &self.values {
                Some(values) => values.iter().map(|v| format!("{}\n", scalar(v))).collect(),
                None => {
                    let mut rows = Vec::new();
                    flatten("", &self.to_json(), &mut rows);
                    rows.into_iter()
                        .map(|(k, v)| format!("{k}\t{v}\n"))
                        .collect()
                }
            },
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

/// Dotted key paths to scalar leaves, in key order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => flatten_map(map, &key, out),
        Value::Array(items) if items.is_empty() => out.push((prefix.to_string(), String::new())),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), item, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn flatten_map(
    map: &Map<String, Value>,
    key: &dyn Fn(&str) -> String,
    out: &mut Vec<(String, String)>,
) {
    for (k, v) in map {
        flatten(&key(k), v, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_flattens_in_key_order() {
        let r = Record::new(
            "x",
            json!({}),
            json!({"b": 1, "a": [true, "s"]}),
            json!({"v": 0.5}),
        );
        let tsv = r.render(Format::Tsv);
        assert_eq!(
            tsv,
            "command\tx\nflags\t\nparameters.a.0\ttrue\nparameters.a.1\ts\nparameters.b\t1\nresult.v\t0.5\nschema\t1\n"
        );
    }

    #[test]
    fn values_print_one_per_line() {
        let r = Record::new("s", json!({}), json!({}), json!({}))
            .with_values(vec![json!(1), json!(0.25)]);
        assert_eq!(r.render(Format::Tsv), "1\n0.25\n");
        assert!(r.render(Format::Json).contains("\"values\""));
    }
}
