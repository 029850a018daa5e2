//! Ordered key/value reports rendered as two-column CSV or a JSON object.

use serde_json::{Map, Number, Value};

use crate::format::FloatFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Text(String),
    /// Not applicable for this model or outcome.
    Missing,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Field)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.entries.push((key.into(), Field::Num(v)));
        self
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), Field::Text(v.into())));
        self
    }

    pub fn opt(&mut self, key: &str, v: Option<f64>) -> &mut Self {
        self.entries.push((key.into(), v.map_or(Field::Missing, Field::Num)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, Field)] {
        &self.entries
    }

    /// `key,value` lines under a header; missing values are empty.
    pub fn to_csv(&self, f: &FloatFormat) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in &self.entries {
            let v = match v {
                Field::Num(x) => f.fmt(*x),
                Field::Text(s) => s.clone(),
                Field::Missing => String::new(),
            };
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }

    /// Pretty JSON object in entry order. Missing values are `null`;
    /// non-finite numbers become the strings `inf`, `-inf` or `nan`.
    pub fn to_json(&self, f: &FloatFormat) -> String {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            let v = match v {
                Field::Num(x) => json_number(*x, f),
                Field::Text(s) => Value::String(s.clone()),
                Field::Missing => Value::Null,
            };
            map.insert(k.clone(), v);
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("report serializes");
        s.push('\n');
        s
    }
}

pub(crate) fn json_number(x: f64, f: &FloatFormat) -> Value {
    let text = f.fmt(x);
    // Apply the requested precision by round-tripping through the text.
    match text.parse::<f64>().ok().and_then(Number::from_f64) {
        Some(n) => Value::Number(n),
        None => Value::String(text),
    }
}
