use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::network::{FiniteWindow, Network, VertexId, Window};

use super::VertexFunction;

fn closed_position(w: &FiniteWindow, x: VertexId) -> Result<usize> {
    let i = w.require(x)?;
    if !w.is_closed(i) {
        return Err(Error::WindowTooSmall { vertex: x, required_radius: None });
    }
    Ok(i)
}

/// (Δf)(x) at window position `i`; the vertex must be closed.
pub fn laplacian_at(f: &VertexFunction, i: usize) -> f64 {
    let w = f.window();
    let fx = f.at(i);
    w.neighbors(i).iter().map(|&(j, c, _)| c * (fx - f.at(j))).sum()
}

/// (Pf)(x) at window position `i`; the vertex must be closed.
pub fn markov_at(f: &VertexFunction, i: usize) -> f64 {
    let w = f.window();
    let s: f64 = w.neighbors(i).iter().map(|&(j, c, _)| c * f.at(j)).sum();
    s / w.total_conductance(i)
}

/// Δf on the vertices `at`.
pub fn laplacian_values(f: &VertexFunction, at: &[VertexId]) -> Result<Vec<f64>> {
    at.iter().map(|&x| closed_position(f.window(), x).map(|i| laplacian_at(f, i))).collect()
}

/// Δf(x) = Σ_{y∼x} c_xy (f(x) − f(y)) on `at`, returned on a window of `at`.
pub fn laplacian_apply(net: &dyn Network, f: &VertexFunction, at: &[VertexId]) -> Result<VertexFunction> {
    let values = laplacian_values(f, at)?;
    on_vertex_set(net, at, values)
}

/// (Pf)(x) = Σ p(x,y) f(y) on `at`.
pub fn markov_apply(net: &dyn Network, f: &VertexFunction, at: &[VertexId]) -> Result<VertexFunction> {
    let values = at.iter().map(|&x| closed_position(f.window(), x).map(|i| markov_at(f, i))).collect::<Result<Vec<_>>>()?;
    on_vertex_set(net, at, values)
}

fn on_vertex_set(net: &dyn Network, at: &[VertexId], values: Vec<f64>) -> Result<VertexFunction> {
    let w = FiniteWindow::from_vertices(net, at)?;
    let mut out = VertexFunction::zeros(w);
    for (&x, v) in at.iter().zip(values) {
        out.set(x, v)?;
    }
    Ok(out)
}

/// Largest |Δf| over closed vertices flagged interior.
pub fn harmonic_residual(f: &VertexFunction) -> f64 {
    let w = f.window();
    (0..w.len()).filter(|&i| w.is_interior(i) && w.is_closed(i)).map(|i| laplacian_at(f, i).abs()).fold(0.0, f64::max)
}

/// Laplacian matrix over the window: diagonal c(x) from the full oracle,
/// off-diagonal −c_xy for window edges.
#[derive(Clone, Debug)]
pub struct SparseLaplacian {
    window: Window,
    matrix: CsrMatrix,
}

impl SparseLaplacian {
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.matvec(x)
    }

    /// xᵀ M y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.apply(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Row sums equal the conductance leaking out of the window.
    pub fn leakage(&self) -> Vec<f64> {
        self.matrix.row_sums()
    }

    pub fn to_triplet_text(&self) -> String {
        self.matrix.to_triplet_text()
    }
}

pub fn assemble_laplacian(_net: &dyn Network, window: &Window) -> SparseLaplacian {
    let mut t = Vec::with_capacity(window.len() + 2 * window.edges().len());
    for i in 0..window.len() {
        t.push((i, i, window.total_conductance(i)));
    }
    for e in window.edges() {
        t.push((e.a, e.b, -e.c));
        t.push((e.b, e.a, -e.c));
    }
    SparseLaplacian { window: window.clone(), matrix: CsrMatrix::from_triplets(window.len(), window.len(), &t) }
}

/// Laplacian of the window viewed as a finite network on its own (edges
/// leaving the window are dropped, so rows sum to zero).
pub fn window_graph_laplacian(window: &Window) -> CsrMatrix {
    let mut deg = vec![0.0; window.len()];
    let mut t = Vec::new();
    for e in window.edges() {
        deg[e.a] += e.c;
        deg[e.b] += e.c;
        t.push((e.a, e.b, -e.c));
        t.push((e.b, e.a, -e.c));
    }
    for (i, d) in deg.into_iter().enumerate() {
        t.push((i, i, d));
    }
    CsrMatrix::from_triplets(window.len(), window.len(), &t)
}
