use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Ok,
    ValidationFailed,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::ValidationFailed => 2,
            Outcome::Inconclusive => 3,
        }
    }

    /// The worse of two outcomes.
    pub fn and(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (ValidationFailed, _) | (_, ValidationFailed) => ValidationFailed,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Ok,
        }
    }

    pub fn from_pass(pass: bool) -> Outcome {
        if pass {
            Outcome::Ok
        } else {
            Outcome::ValidationFailed
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    /// Path to SHA-256 of every file read.
    pub inputs: BTreeMap<String, String>,
    pub horizon: Option<u32>,
    pub outcome: Outcome,
    /// Reasons the results are only valid within the horizon.
    pub completeness: Vec<String>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(skip)]
    pub table: Option<Table>,
}

/// Tabular view used for CSV output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, horizon: Option<u32>) -> Self {
        Report {
            command: command.into(),
            inputs: BTreeMap::new(),
            horizon,
            outcome: Outcome::Ok,
            completeness: Vec::new(),
            results: Value::Null,
            wall_time_ms: None,
            table: None,
        }
    }

    pub fn incomplete(&mut self, why: impl Into<String>) {
        let why = why.into();
        if !self.completeness.contains(&why) {
            self.completeness.push(why);
        }
        self.outcome = self.outcome.and(Outcome::Inconclusive);
    }

    pub fn fail(&mut self) {
        self.outcome = Outcome::ValidationFailed;
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report is serializable");
        let mut s = serde_json::to_string_pretty(&v).expect("value is serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Option<String> {
        let t = self.table.as_ref()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&t.header).ok()?;
        for r in &t.rows {
            w.write_record(r).ok()?;
        }
        String::from_utf8(w.into_inner().ok()?).ok()
    }
}
