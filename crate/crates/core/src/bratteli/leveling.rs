use std::collections::HashMap;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::CsrMatrix;
use crate::network::{Network, VertexId};

use super::diagram::BratteliDiagram;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum LevelingViolation {
    /// More than one vertex of degree below 2.
    Degree { vertex: VertexId, other: VertexId },
    /// An edge inside one distance level.
    IntraLevelEdge { a: VertexId, b: VertexId, level: usize },
    /// A vertex with no neighbor one level further out.
    NoForwardNeighbor { vertex: VertexId, level: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelingReport {
    pub root: VertexId,
    pub depth: usize,
    /// Distance levels V_0..V_{depth+1}.
    pub levels: Vec<Vec<VertexId>>,
    pub violation: Option<LevelingViolation>,
    #[serde(skip)]
    pub diagram: Option<BratteliDiagram>,
}

impl LevelingReport {
    pub fn success(&self) -> bool {
        self.violation.is_none()
    }
}

/// Breadth-first leveling around `root`, checked up to `depth`: degree at
/// least 2 for all but one vertex, no edges within a level, and a forward
/// neighbor for every vertex. On success the levels 0..=depth+1 are
/// returned as a diagram.
pub fn graph_to_bratteli(net: &dyn Network, root: VertexId, depth: usize) -> Result<LevelingReport> {
    let mut dist: HashMap<VertexId, usize> = HashMap::new();
    let mut levels = vec![vec![root]];
    dist.insert(root, 0);
    let mut adj: HashMap<VertexId, Vec<(VertexId, f64)>> = HashMap::new();
    for n in 0..=depth {
        let mut next = Vec::new();
        for &x in &levels[n] {
            let nb = net.neighbors(x)?;
            for &(y, _) in &nb {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                    e.insert(n + 1);
                    next.push(y);
                }
            }
            adj.insert(x, nb);
        }
        next.sort_unstable();
        levels.push(next);
    }
    let mut violation = None;
    let mut low_degree: Option<VertexId> = None;
    'scan: for n in 0..=depth {
        for &x in &levels[n] {
            let nb = &adj[&x];
            if nb.len() < 2 {
                if let Some(o) = low_degree {
                    violation = Some(LevelingViolation::Degree { vertex: x, other: o });
                    break 'scan;
                }
                low_degree = Some(x);
            }
            if n >= 1 {
                if let Some(&(y, _)) = nb.iter().find(|(y, _)| dist.get(y) == Some(&n)) {
                    violation = Some(LevelingViolation::IntraLevelEdge { a: x.min(y), b: x.max(y), level: n });
                    break 'scan;
                }
            }
            if !nb.iter().any(|(y, _)| dist.get(y) == Some(&(n + 1))) {
                violation = Some(LevelingViolation::NoForwardNeighbor { vertex: x, level: n });
                break 'scan;
            }
        }
    }
    let diagram = if violation.is_none() {
        let index: Vec<HashMap<VertexId, usize>> = levels.iter().map(|l| l.iter().enumerate().map(|(i, &v)| (v, i)).collect()).collect();
        let cond = (0..=depth)
            .map(|n| {
                let trip: Vec<(usize, usize, f64)> = levels[n]
                    .iter()
                    .enumerate()
                    .flat_map(|(i, x)| adj[x].iter().filter_map(|(y, c)| index[n + 1].get(y).map(|&j| (i, j, *c))).collect::<Vec<_>>())
                    .collect();
                CsrMatrix::from_triplets(levels[n].len(), levels[n + 1].len(), &trip)
            })
            .collect();
        let sizes = levels.iter().map(|l| l.len()).collect();
        Some(BratteliDiagram::from_conductances(&format!("leveling of {}", net.name()), sizes, cond, 0))
    } else {
        None
    };
    Ok(LevelingReport { root, depth, levels, violation, diagram })
}
