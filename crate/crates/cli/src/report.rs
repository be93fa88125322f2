use std::sync::OnceLock;
use std::time::Instant;

use serde_json::{Map, Value};

use crate::Common;

pub const SCHEMA: &str = "pvi-rh-lab/report-v1";

static STARTED: OnceLock<Instant> = OnceLock::new();

/// Marks the start of the run; wall time is measured from here.
pub fn start_clock() {
    STARTED.get_or_init(Instant::now);
}

/// Result of a subcommand before it is written out.
pub struct Output {
    pub body: Value,
    /// `None` for plain computations, `Some` for verifications.
    pub pass: Option<bool>,
    pub csv: Option<String>,
}

/// Envelope shared by all reports.
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, claim: &str, common: &Common) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), SCHEMA.into());
        fields.insert("command".into(), command.into());
        fields.insert("claim".into(), claim.into());
        fields.insert("seed".into(), common.seed.into());
        fields.insert("tol".into(), common.tol.into());
        Report { fields }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    /// Copies the entries of a JSON object into the top level, so that the
    /// report can itself be read back as that document.
    pub fn merge(&mut self, doc: Value) -> &mut Self {
        if let Value::Object(m) = doc {
            self.fields.extend(m);
        }
        self
    }

    pub fn finish(mut self, common: &Common, pass: Option<bool>, csv: Option<String>) -> Output {
        if let Some(p) = pass {
            self.fields.insert("pass".into(), p.into());
        }
        if !common.no_timing {
            self.fields
                .insert("wall_time_s".into(), STARTED.get_or_init(Instant::now).elapsed().as_secs_f64().into());
        }
        Output {
            body: Value::Object(self.fields),
            pass,
            csv,
        }
    }
}

pub fn emit(common: &Common, out: &Output) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(&out.body).map_err(|e| e.to_string())?;
    text.push('\n');
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    match (&common.csv, &out.csv) {
        (Some(path), Some(csv)) => std::fs::write(path, csv).map_err(|e| format!("{}: {e}", path.display())),
        (Some(_), None) => Err("this subcommand produces no CSV data".into()),
        _ => Ok(()),
    }
}
