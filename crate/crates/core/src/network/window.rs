use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{Network, VertexId};
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Interior,
    Boundary,
}

/// Window edge between positions `a < b` (ascending vertex order).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowEdge {
    pub a: usize,
    pub b: usize,
    pub c: f64,
}

/// Shared handle; functions on a window keep one of these.
pub type Window = Arc<FiniteWindow>;

/// A finite set of vertices materialized from a network.
#[derive(Debug)]
pub struct FiniteWindow {
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    role: Vec<Role>,
    edges: Vec<WindowEdge>,
    // total conductance from the full oracle
    total: Vec<f64>,
    // all neighbors inside the window
    closed: Vec<bool>,
    // per vertex: (neighbor position, conductance, edge index)
    adj_start: Vec<usize>,
    adj: Vec<(usize, f64, usize)>,
    crossing: usize,
    distance: Option<Vec<usize>>,
    root: Option<VertexId>,
    radius: Option<usize>,
}

impl FiniteWindow {
    /// Window on an arbitrary vertex set; a vertex is interior when all its
    /// neighbors are inside the set.
    pub fn from_vertices(net: &dyn Network, vertices: &[VertexId]) -> Result<Window> {
        let set: BTreeSet<VertexId> = vertices.iter().copied().collect();
        Self::build(net, set.into_iter().collect(), None, |_, closed| if closed { Role::Interior } else { Role::Boundary })
    }

    /// Window with an explicit interior set; every other vertex is boundary.
    pub fn with_interior(net: &dyn Network, vertices: &[VertexId], interior: &[VertexId]) -> Result<Window> {
        let set: BTreeSet<VertexId> = vertices.iter().chain(interior).copied().collect();
        let inner: BTreeSet<VertexId> = interior.iter().copied().collect();
        Self::build(net, set.into_iter().collect(), None, |v, _| if inner.contains(&v) { Role::Interior } else { Role::Boundary })
    }

    fn build(
        net: &dyn Network,
        vertices: Vec<VertexId>,
        ball: Option<(VertexId, usize, HashMap<VertexId, usize>)>,
        role_of: impl Fn(VertexId, bool) -> Role,
    ) -> Result<Window> {
        let index: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vertices.len();
        let mut total = Vec::with_capacity(n);
        let mut closed = Vec::with_capacity(n);
        let mut role = Vec::with_capacity(n);
        let mut edges = Vec::new();
        let mut nbrs: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut crossing = 0usize;
        let mut buf = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            net.neighbors_into(v, &mut buf)?;
            let mut inside = Vec::with_capacity(buf.len());
            let mut all_in = true;
            let mut t = 0.0;
            for &(y, c) in &buf {
                t += c;
                match index.get(&y) {
                    Some(&j) => {
                        inside.push((j, c));
                        if i < j {
                            edges.push(WindowEdge { a: i, b: j, c });
                        }
                    }
                    None => {
                        all_in = false;
                        crossing += 1;
                    }
                }
            }
            total.push(t);
            closed.push(all_in);
            role.push(role_of(v, all_in));
            nbrs.push(inside);
        }
        let edge_of: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(k, e)| ((e.a, e.b), k)).collect();
        let mut adj_start = Vec::with_capacity(n + 1);
        let mut adj = Vec::new();
        for (i, list) in nbrs.iter().enumerate() {
            adj_start.push(adj.len());
            for &(j, c) in list {
                let key = if i < j { (i, j) } else { (j, i) };
                adj.push((j, c, edge_of[&key]));
            }
        }
        adj_start.push(adj.len());
        let (root, radius, distance) = match ball {
            Some((r, k, d)) => (Some(r), Some(k), Some(vertices.iter().map(|v| d[v]).collect())),
            None => (None, None, None),
        };
        Ok(Arc::new(FiniteWindow { vertices, index, role, edges, total, closed, adj_start, adj, crossing, distance, root, radius }))
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> VertexId {
        self.vertices[i]
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn require(&self, v: VertexId) -> Result<usize> {
        self.position(v).ok_or(Error::NotInWindow(v))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn role(&self, i: usize) -> Role {
        self.role[i]
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.role[i] == Role::Interior
    }

    pub fn interior(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&i| self.is_interior(i)).map(|i| self.vertices[i]).collect()
    }

    pub fn boundary(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&i| !self.is_interior(i)).map(|i| self.vertices[i]).collect()
    }

    pub fn edges(&self) -> &[WindowEdge] {
        &self.edges
    }

    /// Oracle total conductance c(x), including edges that leave the window.
    pub fn total_conductance(&self, i: usize) -> f64 {
        self.total[i]
    }

    /// True when every neighbor of the vertex lies in the window.
    pub fn is_closed(&self, i: usize) -> bool {
        self.closed[i]
    }

    /// Window neighbors of position `i`: (position, conductance, edge index).
    pub fn neighbors(&self, i: usize) -> &[(usize, f64, usize)] {
        &self.adj[self.adj_start[i]..self.adj_start[i + 1]]
    }

    /// Number of (vertex, outside neighbor) incidences, i.e. edges crossing
    /// the window boundary.
    pub fn crossing_edges(&self) -> usize {
        self.crossing
    }

    /// Hop distance from the ball root, for windows built as balls.
    pub fn distance(&self, i: usize) -> Option<usize> {
        self.distance.as_ref().map(|d| d[i])
    }

    pub fn root(&self) -> Option<VertexId> {
        self.root
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    pub fn same_as(&self, other: &FiniteWindow) -> bool {
        std::ptr::eq(self, other) || self.vertices == other.vertices
    }
}

/// Ball of the given hop radius around `root`. Vertices at distance
/// `< radius` are interior, those at distance `radius` are boundary.
pub fn materialize_ball(net: &dyn Network, root: VertexId, radius: usize) -> Result<Window> {
    try_materialize_ball(net, root, radius, usize::MAX)
}

/// As [`materialize_ball`], failing once the ball exceeds `max_vertices`.
pub fn try_materialize_ball(net: &dyn Network, root: VertexId, radius: usize, max_vertices: usize) -> Result<Window> {
    let mut dist: HashMap<VertexId, usize> = HashMap::new();
    dist.insert(root, 0);
    net.neighbors(root)?;
    let mut frontier = vec![root];
    let mut buf = Vec::new();
    for d in 1..=radius {
        let mut next = Vec::new();
        for &x in &frontier {
            net.neighbors_into(x, &mut buf)?;
            for &(y, _) in &buf {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                    e.insert(d);
                    next.push(y);
                }
            }
        }
        if dist.len() > max_vertices {
            return Err(invalid(format!("ball of radius {d} exceeds {max_vertices} vertices")));
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut vertices: Vec<VertexId> = dist.keys().copied().collect();
    vertices.sort_unstable();
    let role = |v: VertexId, _| if dist[&v] < radius { Role::Interior } else { Role::Boundary };
    let roles: HashMap<VertexId, Role> = vertices.iter().map(|&v| (v, role(v, false))).collect();
    FiniteWindow::build(net, vertices, Some((root, radius, dist)), |v, _| roles[&v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ExplicitNetwork;

    #[test]
    fn p3_ball() {
        let n = ExplicitNetwork::from_edges(&[(0, 1, 1.0), (1, 2, 1.0)], None).unwrap();
        let w = materialize_ball(&n, VertexId::Int(1), 1).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.interior(), vec![VertexId::Int(1)]);
        assert_eq!(w.edges().len(), 2);
        assert_eq!(w.crossing_edges(), 0);
        let w0 = materialize_ball(&n, VertexId::Int(1), 0).unwrap();
        assert_eq!(w0.len(), 1);
        assert_eq!(w0.crossing_edges(), 2);
    }
}
