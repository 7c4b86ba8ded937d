//! The JSON run report and its text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use extsym::geom::Tolerances;
use extsym::report::{Check, Report, Status};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "extsym";
pub const SCHEMA: &str = "extsym.report.v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    pub checks: Vec<Check>,
    /// Sorted by key, so serialization is stable.
    #[serde(default)]
    pub data: BTreeMap<String, Value>,
}

impl RunReport {
    pub fn new(command: &str, input: impl Into<String>) -> Self {
        RunReport {
            schema: SCHEMA.into(),
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            input: input.into(),
            tolerances: None,
            checks: Vec::new(),
            data: BTreeMap::new(),
        }
    }

    /// Appends a check; a repeated name gets a `#n` suffix so names stay unique.
    pub fn push(&mut self, mut c: Check) {
        if self.checks.iter().any(|d| d.name == c.name) {
            let base = c.name.clone();
            let mut n = 2;
            while self.checks.iter().any(|d| d.name == format!("{base}#{n}")) {
                n += 1;
            }
            c.name = format!("{base}#{n}");
        }
        self.checks.push(c);
    }

    pub fn push_all(&mut self, prefix: &str, r: Report) {
        for mut c in r.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.push(c);
        }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.into(), serde_json::to_value(v).expect("report data serializes"));
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {} {}", self.tool, self.version, self.command, self.input);
        if let Some(t) = &self.tolerances {
            let _ = writeln!(
                s,
                "tolerances: manifold {:e}, curvature {:e}, parallel {:e}, degeneracy {:e}",
                t.manifold, t.curvature, t.parallel, t.degeneracy
            );
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Unsupported => "UNSUPPORTED",
                Status::Undecided => "UNDECIDED",
            };
            let line = format!("{tag:<11} {:<width$}  {}", c.name, c.detail);
            s.push_str(line.trim_end());
            s.push('\n');
        }
        for (k, v) in &self.data {
            let _ = writeln!(s, "{k}: {}", compact(v));
        }
        let count = |st: Status| self.checks.iter().filter(|c| c.status == st).count();
        let _ = writeln!(
            s,
            "summary: {} pass, {} fail, {} unsupported, {} undecided",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Unsupported),
            count(Status::Undecided)
        );
        s
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
