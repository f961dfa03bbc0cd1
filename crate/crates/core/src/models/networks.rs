use std::sync::Arc;

use crate::error::{Error, Result};
use crate::network::{Network, VertexId};

type EdgeLaw = Arc<dyn Fn(i64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineDomain {
    /// ℕ₀ = {0, 1, 2, …}
    N0,
    /// ℤ
    Z,
}

/// Nearest-neighbor network on ℕ₀ or ℤ; `law(i)` is the conductance of the
/// edge (i, i+1).
#[derive(Clone)]
pub struct LineNetwork {
    domain: LineDomain,
    law: EdgeLaw,
    name: String,
}

impl std::fmt::Debug for LineNetwork {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LineNetwork").field("domain", &self.domain).field("name", &self.name).finish()
    }
}

impl LineNetwork {
    pub fn from_law(domain: LineDomain, name: &str, law: impl Fn(i64) -> f64 + Send + Sync + 'static) -> Self {
        LineNetwork { domain, law: Arc::new(law), name: name.to_string() }
    }

    /// c_{n,n+1} = n+1 on ℕ₀.
    pub fn n0_linear() -> Self {
        Self::from_law(LineDomain::N0, "line_n0_linear", |n| (n + 1) as f64)
    }

    /// c ≡ 1 on ℤ.
    pub fn z_unit() -> Self {
        Self::from_law(LineDomain::Z, "line_z_unit", |_| 1.0)
    }

    /// c_{i,i+1} = λ^{max(|i|,|i+1|)} on ℤ.
    pub fn z_geometric(lambda: f64) -> Self {
        Self::from_law(LineDomain::Z, "line_z_geometric", move |i| lambda.powi(i.abs().max((i + 1).abs()) as i32))
    }

    /// c_{i,i+1} = λ^i on ℕ₀.
    pub fn n0_geometric(lambda: f64) -> Self {
        Self::from_law(LineDomain::N0, "line_n0_geometric", move |i| lambda.powi(i as i32))
    }

    /// c_{n,n+1} = λ^{n+1} on ℕ₀; Σ 1/c = 1/(λ−1) for λ > 1.
    pub fn n0_summable(lambda: f64) -> Self {
        Self::from_law(LineDomain::N0, "line_n0_summable", move |n| lambda.powi(n as i32 + 1))
    }

    pub fn domain(&self) -> LineDomain {
        self.domain
    }

    pub fn conductance(&self, i: i64) -> f64 {
        (self.law)(i)
    }

    fn check(&self, x: VertexId) -> Result<i64> {
        match (x, self.domain) {
            (VertexId::Int(n), LineDomain::Z) => Ok(n),
            (VertexId::Int(n), LineDomain::N0) if n >= 0 => Ok(n),
            _ => Err(Error::InvalidVertex { vertex: x.to_string(), reason: format!("not a vertex of {}", self.name) }),
        }
    }

    fn edge(&self, i: i64, x: VertexId) -> Result<f64> {
        let c = (self.law)(i);
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::OutOfRange { vertex: x });
        }
        Ok(c)
    }
}

impl Network for LineNetwork {
    fn neighbors_into(&self, x: VertexId, out: &mut Vec<(VertexId, f64)>) -> Result<()> {
        out.clear();
        let n = self.check(x)?;
        if n == i64::MIN || n == i64::MAX {
            return Err(Error::OutOfRange { vertex: x });
        }
        if self.domain == LineDomain::Z || n > 0 {
            out.push((VertexId::Int(n - 1), self.edge(n - 1, x)?));
        }
        out.push((VertexId::Int(n + 1), self.edge(n, x)?));
        Ok(())
    }

    fn origin(&self) -> Option<VertexId> {
        Some(VertexId::Int(0))
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

/// Deepest level whose neighbor list is representable.
pub const TREE_MAX_LEVEL: i64 = 61;

/// Rooted binary tree with c(e) = λⁿ on edges between levels n and n+1.
/// Vertices are `(n, j)` with 1 ≤ j ≤ 2ⁿ, enumerated top to bottom.
#[derive(Clone, Debug)]
pub struct BinaryTree {
    lambda: f64,
}

impl BinaryTree {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(crate::error::invalid(format!("binary tree needs λ > 0, got {lambda}")));
        }
        Ok(BinaryTree { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn root() -> VertexId {
        VertexId::Pair(0, 1)
    }

    /// Level-lumped chain on ℕ₀ with c_{n,n+1} = 2^{n+1} λⁿ. Walks from the
    /// root on the tree and on this chain have the same level process, so
    /// root quantities (𝒢(o,o), U(o,o)) coincide.
    pub fn radial_quotient(&self) -> LineNetwork {
        let lambda = self.lambda;
        LineNetwork::from_law(LineDomain::N0, "binary_tree_radial", move |n| 2f64.powi(n as i32 + 1) * lambda.powi(n as i32))
    }

    fn check(&self, x: VertexId) -> Result<(i64, i64)> {
        match x {
            VertexId::Pair(n, j) if (0..=62).contains(&n) && j >= 1 && j <= 1i64 << n => Ok((n, j)),
            _ => Err(Error::InvalidVertex { vertex: x.to_string(), reason: "not a binary tree vertex (n, 1..2^n)".into() }),
        }
    }
}

impl Network for BinaryTree {
    fn neighbors_into(&self, x: VertexId, out: &mut Vec<(VertexId, f64)>) -> Result<()> {
        out.clear();
        let (n, j) = self.check(x)?;
        if n > TREE_MAX_LEVEL {
            return Err(Error::OutOfRange { vertex: x });
        }
        if n > 0 {
            out.push((VertexId::Pair(n - 1, (j + 1) / 2), self.lambda.powi(n as i32 - 1)));
        }
        let c = self.lambda.powi(n as i32);
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::OutOfRange { vertex: x });
        }
        out.push((VertexId::Pair(n + 1, 2 * j - 1), c));
        out.push((VertexId::Pair(n + 1, 2 * j), c));
        Ok(())
    }

    fn origin(&self) -> Option<VertexId> {
        Some(Self::root())
    }

    fn name(&self) -> String {
        "binary_tree".into()
    }
}

/// ℤ^d with unit conductances, d ∈ {1, 2, 3}. For d = 1 the vertices are
/// plain integers, so the network coincides with the unit line on ℤ.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
}

impl Lattice {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(crate::error::invalid(format!("lattice dimension must be 1, 2 or 3, got {dim}")));
        }
        Ok(Lattice { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl Network for Lattice {
    fn neighbors_into(&self, x: VertexId, out: &mut Vec<(VertexId, f64)>) -> Result<()> {
        out.clear();
        if self.dim == 1 {
            let n = x.as_int().ok_or_else(|| Error::InvalidVertex { vertex: x.to_string(), reason: "expected an integer".into() })?;
            out.push((VertexId::Int(n - 1), 1.0));
            out.push((VertexId::Int(n + 1), 1.0));
            return Ok(());
        }
        let c = match x.coords() {
            Some(c) if c.len() == self.dim => c.to_vec(),
            _ => return Err(Error::InvalidVertex { vertex: x.to_string(), reason: format!("expected a {}-dimensional point", self.dim) }),
        };
        for k in 0..self.dim {
            for s in [-1, 1] {
                let mut y = c.clone();
                y[k] += s;
                out.push((VertexId::point(&y), 1.0));
            }
        }
        out.sort_by_key(|a| a.0);
        Ok(())
    }

    fn origin(&self) -> Option<VertexId> {
        Some(if self.dim == 1 { VertexId::Int(0) } else { VertexId::point(&vec![0; self.dim]) })
    }

    fn name(&self) -> String {
        format!("lattice_z{}", self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{materialize_ball, total_conductance, validate};

    #[test]
    fn line_total_conductance() {
        let n = LineNetwork::n0_linear();
        for k in 1..20 {
            assert_eq!(total_conductance(&n, VertexId::Int(k)).unwrap(), (2 * k + 1) as f64);
        }
        assert_eq!(total_conductance(&n, VertexId::Int(0)).unwrap(), 1.0);
        assert!(n.neighbors(VertexId::Int(-1)).is_err());
    }

    #[test]
    fn tree_ball_and_validity() {
        let t = BinaryTree::new(1.0).unwrap();
        let w = materialize_ball(&t, BinaryTree::root(), 2).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w.interior().len(), 3);
        assert_eq!(total_conductance(&t, BinaryTree::root()).unwrap(), 2.0);
        let w = materialize_ball(&t, VertexId::Pair(3, 5), 4).unwrap();
        assert!(validate(&t, &w).is_valid());
        assert!(matches!(t.neighbors(VertexId::Pair(62, 1)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn lattice_balls() {
        let z = Lattice::new(1).unwrap();
        assert_eq!(materialize_ball(&z, VertexId::Int(0), 5).unwrap().len(), 11);
        let z2 = Lattice::new(2).unwrap();
        let w = materialize_ball(&z2, z2.origin().unwrap(), 3).unwrap();
        assert_eq!(w.len(), 25);
        assert!(validate(&z2, &w).is_valid());
        let z3 = Lattice::new(3).unwrap();
        assert_eq!(materialize_ball(&z3, z3.origin().unwrap(), 1).unwrap().len(), 7);
    }
}
