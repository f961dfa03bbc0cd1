use std::io::Write;
use std::path::Path;

use harmonet::VertexId;
use serde_json::{json, Value};

use crate::Failure;

/// Command name, arguments and worker count written into every output.
pub struct RunConfig {
    pub command: &'static str,
    pub args: Value,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn to_json(&self) -> Value {
        json!({ "command": self.command, "args": self.args, "workers": self.workers })
    }

    pub fn envelope(&self, result: Value) -> Value {
        json!({ "harmonet_version": harmonet::VERSION, "config": self.to_json(), "result": result })
    }

    /// Comment lines heading CSV and plot files.
    pub fn header(&self) -> String {
        format!("# harmonet {}\n# config {}\n", harmonet::VERSION, self.to_json())
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

pub fn emit_json(cfg: &RunConfig, out: Option<&Path>, result: Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(&cfg.envelope(result)).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    write_to(out, &text)
}

pub fn emit_csv(cfg: &RunConfig, out: Option<&Path>, body: &str) -> Result<(), Failure> {
    write_to(out, &format!("{}{body}", cfg.header()))
}

pub fn emit_plot(cfg: &RunConfig, path: Option<&Path>, points: &[(f64, f64)]) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let mut s = cfg.header();
    for (x, y) in points {
        s.push_str(&format!("{x} {y}\n"));
    }
    write_to(Some(path), &s)
}

/// Plot abscissa of a vertex: the integer itself, the level of a pair,
/// the first coordinate of a lattice point.
pub fn abscissa(v: VertexId) -> f64 {
    match v {
        VertexId::Int(k) => k as f64,
        VertexId::Pair(n, _) => n as f64,
        VertexId::Point { coords, .. } => coords[0] as f64,
    }
}
