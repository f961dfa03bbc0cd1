//! Network abstraction: neighbor oracles, finite windows and boundaries.

mod explicit;
mod vertex;
mod window;

use std::collections::BTreeSet;

use serde::Serialize;

pub use explicit::ExplicitNetwork;
pub use vertex::VertexId;
pub use window::{materialize_ball, try_materialize_ball, FiniteWindow, Role, Window, WindowEdge};

use crate::error::{Error, Result};

/// A locally finite weighted graph given by its neighbor oracle.
///
/// `neighbors_into` clears `out` and fills it with `(y, c_xy)` pairs in
/// ascending vertex order. Implementations must be symmetric, strictly
/// positive and loop-free; [`validate`] checks this on a window.
pub trait Network: Send + Sync {
    fn neighbors_into(&self, x: VertexId, out: &mut Vec<(VertexId, f64)>) -> Result<()>;

    fn neighbors(&self, x: VertexId) -> Result<Vec<(VertexId, f64)>> {
        let mut out = Vec::new();
        self.neighbors_into(x, &mut out)?;
        Ok(out)
    }

    /// Designated origin `o`, when the model has one.
    fn origin(&self) -> Option<VertexId> {
        None
    }

    fn name(&self) -> String {
        "network".to_string()
    }
}

/// c(x) = Σ_{y∼x} c_xy.
pub fn total_conductance(net: &dyn Network, x: VertexId) -> Result<f64> {
    let nb = net.neighbors(x)?;
    let c: f64 = nb.iter().map(|&(_, c)| c).sum();
    if nb.is_empty() || c <= 0.0 {
        return Err(Error::InvalidVertex { vertex: x.to_string(), reason: "isolated vertex".into() });
    }
    Ok(c)
}

/// Vertices outside `w` adjacent to some vertex of `w`, ascending.
pub fn outer_boundary(net: &dyn Network, w: &[VertexId]) -> Result<Vec<VertexId>> {
    let inside: BTreeSet<VertexId> = w.iter().copied().collect();
    let mut out = BTreeSet::new();
    let mut buf = Vec::new();
    for &x in &inside {
        net.neighbors_into(x, &mut buf)?;
        for &(y, _) in &buf {
            if !inside.contains(&y) {
                out.insert(y);
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `c_yx` is `None` when `y` does not list `x` at all.
    Asymmetric {
        x: VertexId,
        y: VertexId,
        c_xy: f64,
        c_yx: Option<f64>,
    },
    NonPositive {
        x: VertexId,
        y: VertexId,
        c: f64,
    },
    Loop {
        x: VertexId,
    },
    Isolated {
        x: VertexId,
    },
    DuplicateNeighbor {
        x: VertexId,
        y: VertexId,
    },
    OracleError {
        x: VertexId,
        message: String,
    },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub checked_vertices: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the network axioms on every vertex of the window.
pub fn validate(net: &dyn Network, window: &FiniteWindow) -> ValidationReport {
    let mut report = ValidationReport { checked_vertices: window.len(), violations: Vec::new() };
    let mut buf = Vec::new();
    let mut back = Vec::new();
    for &x in window.vertices() {
        if let Err(e) = net.neighbors_into(x, &mut buf) {
            report.violations.push(Violation::OracleError { x, message: e.to_string() });
            continue;
        }
        if buf.is_empty() {
            report.violations.push(Violation::Isolated { x });
        }
        let mut seen = BTreeSet::new();
        for &(y, c) in &buf {
            if y == x {
                report.violations.push(Violation::Loop { x });
                continue;
            }
            if !seen.insert(y) {
                report.violations.push(Violation::DuplicateNeighbor { x, y });
            }
            if !(c > 0.0) || !c.is_finite() {
                report.violations.push(Violation::NonPositive { x, y, c });
            }
            // each unordered pair is reported once, from its smaller end
            let c_yx = match net.neighbors_into(y, &mut back) {
                Ok(()) => back.iter().find(|&&(z, _)| z == x).map(|&(_, c)| c),
                Err(_) => None,
            };
            if c_yx != Some(c) && (x < y || c_yx.is_none() || !window.contains(y)) {
                report.violations.push(Violation::Asymmetric { x, y, c_xy: c, c_yx });
            }
        }
    }
    report
}
