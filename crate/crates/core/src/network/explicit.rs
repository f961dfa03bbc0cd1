use std::collections::BTreeMap;

use super::{Network, VertexId};
use crate::error::{Error, Result};

/// Finite network from an edge list.
#[derive(Clone, Debug)]
pub struct ExplicitNetwork {
    adj: BTreeMap<VertexId, Vec<(VertexId, f64)>>,
    origin: Option<VertexId>,
    name: String,
}

impl ExplicitNetwork {
    /// Integer-labelled convenience constructor.
    pub fn from_edges(edges: &[(i64, i64, f64)], origin: Option<i64>) -> Result<Self> {
        let e: Vec<_> = edges.iter().map(|&(x, y, c)| (VertexId::Int(x), VertexId::Int(y), c)).collect();
        Self::from_vertex_edges(&e, origin.map(VertexId::Int))
    }

    /// Rejects loops, nonpositive or non-finite conductances and repeated
    /// pairs (a repeat with a different value is reported as asymmetric).
    pub fn from_vertex_edges(edges: &[(VertexId, VertexId, f64)], origin: Option<VertexId>) -> Result<Self> {
        let mut seen: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        let mut adj: BTreeMap<VertexId, Vec<(VertexId, f64)>> = BTreeMap::new();
        for &(x, y, c) in edges {
            let bad = |reason: String| Error::InvalidVertex { vertex: format!("{x}-{y}"), reason };
            if x == y {
                return Err(bad("loop edge".into()));
            }
            if !(c > 0.0) || !c.is_finite() {
                return Err(bad(format!("conductance {c} is not strictly positive")));
            }
            let key = if x < y { (x, y) } else { (y, x) };
            if let Some(&prev) = seen.get(&key) {
                return Err(if prev == c {
                    bad("edge listed twice".into())
                } else {
                    bad(format!("asymmetric conductance: c({x},{y}) = {c} but the pair was already given {prev}"))
                });
            }
            seen.insert(key, c);
            adj.entry(x).or_default().push((y, c));
            adj.entry(y).or_default().push((x, c));
        }
        for list in adj.values_mut() {
            list.sort_by_key(|a| a.0);
        }
        if let Some(o) = origin {
            if !adj.contains_key(&o) {
                return Err(Error::InvalidVertex { vertex: o.to_string(), reason: "origin is not a vertex".into() });
            }
        }
        Ok(ExplicitNetwork { adj, origin, name: "explicit".into() })
    }

    /// Takes an adjacency map as is. Used to build deliberately faulty
    /// oracles for validation tests.
    pub fn from_adjacency_unchecked(adj: BTreeMap<VertexId, Vec<(VertexId, f64)>>, origin: Option<VertexId>) -> Self {
        ExplicitNetwork { adj, origin, name: "explicit".into() }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.adj.keys().copied().collect()
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId, f64)> {
        let mut out = Vec::new();
        for (&x, list) in &self.adj {
            for &(y, c) in list {
                if x < y {
                    out.push((x, y, c));
                }
            }
        }
        out
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (0..n.saturating_sub(1) as i64).map(|i| (i, i + 1, 1.0)).collect();
        Self::from_edges(&e, Some(0)).unwrap().with_name(&format!("path{n}"))
    }

    pub fn triangle() -> Self {
        Self::from_edges(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], Some(0)).unwrap().with_name("triangle")
    }
}

impl Network for ExplicitNetwork {
    fn neighbors_into(&self, x: VertexId, out: &mut Vec<(VertexId, f64)>) -> Result<()> {
        out.clear();
        match self.adj.get(&x) {
            Some(list) => {
                out.extend_from_slice(list);
                Ok(())
            }
            None => Err(Error::InvalidVertex { vertex: x.to_string(), reason: "not a vertex of the explicit network".into() }),
        }
    }

    fn origin(&self) -> Option<VertexId> {
        self.origin
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}
