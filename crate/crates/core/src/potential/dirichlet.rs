use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{solve_spd, CsrMatrix, Solver};
use crate::network::{outer_boundary, FiniteWindow, Network, VertexId, Window};
use crate::operators::{laplacian_at, VertexFunction};

/// Δu = g on V₁, u = f on bd(V₁).
#[derive(Clone, Debug)]
pub struct DirichletProblem {
    /// V₁ ∪ bd(V₁), with V₁ flagged interior.
    pub window: Window,
    pub interior: Vec<VertexId>,
    pub boundary: Vec<VertexId>,
    /// g on V₁, aligned with `interior`.
    pub source: Vec<f64>,
    /// f on bd(V₁), aligned with `boundary`.
    pub boundary_values: Vec<f64>,
}

impl DirichletProblem {
    pub fn new(net: &dyn Network, interior: &[VertexId], source: impl Fn(VertexId) -> f64, boundary: impl Fn(VertexId) -> f64) -> Result<Self> {
        if interior.is_empty() {
            return Err(invalid("V₁ must be nonempty"));
        }
        let mut v1 = interior.to_vec();
        v1.sort_unstable();
        v1.dedup();
        let bd = outer_boundary(net, &v1)?;
        let all: Vec<VertexId> = v1.iter().chain(&bd).copied().collect();
        let window = FiniteWindow::with_interior(net, &all, &v1)?;
        Ok(DirichletProblem {
            window,
            source: v1.iter().map(|&x| source(x)).collect(),
            boundary_values: bd.iter().map(|&x| boundary(x)).collect(),
            interior: v1,
            boundary: bd,
        })
    }
}

/// Solves on the window: positions flagged interior are unknowns, every other
/// position keeps its value from `fixed`. `source` is indexed by window
/// position. Interior vertices must have all neighbors in the window.
pub(crate) fn grounded_solve(window: &Window, source: &[f64], fixed: &[f64], solver: Solver) -> Result<Vec<f64>> {
    let n = window.len();
    let unknowns: Vec<usize> = (0..n).filter(|&i| window.is_interior(i)).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &i) in unknowns.iter().enumerate() {
        if !window.is_closed(i) {
            return Err(Error::WindowTooSmall { vertex: window.vertex(i), required_radius: None });
        }
        slot[i] = k;
    }
    let mut t = Vec::new();
    let mut rhs = vec![0.0; unknowns.len()];
    for (k, &i) in unknowns.iter().enumerate() {
        t.push((k, k, window.total_conductance(i)));
        rhs[k] = source[i];
        for &(j, c, _) in window.neighbors(i) {
            if slot[j] != usize::MAX {
                t.push((k, slot[j], -c));
            } else {
                rhs[k] += c * fixed[j];
            }
        }
    }
    let a = CsrMatrix::from_triplets(unknowns.len(), unknowns.len(), &t);
    let x = solve_spd(&a, &rhs, solver)?;
    let mut out = fixed.to_vec();
    for (k, &i) in unknowns.iter().enumerate() {
        out[i] = x[k];
    }
    Ok(out)
}

pub fn solve_dirichlet(p: &DirichletProblem, solver: Solver) -> Result<VertexFunction> {
    let w = &p.window;
    let mut source = vec![0.0; w.len()];
    let mut fixed = vec![0.0; w.len()];
    for (&x, &g) in p.interior.iter().zip(&p.source) {
        source[w.require(x)?] = g;
    }
    for (&x, &f) in p.boundary.iter().zip(&p.boundary_values) {
        fixed[w.require(x)?] = f;
    }
    let values = grounded_solve(w, &source, &fixed, solver)?;
    VertexFunction::new(w.clone(), values)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximumPrincipleReport {
    pub constant: bool,
    pub max_interior: f64,
    pub min_interior: f64,
    pub max_boundary: f64,
    pub min_boundary: f64,
    pub max_residual: f64,
    /// Interior vertices whose value exceeds the boundary extrema.
    pub violations: Vec<VertexId>,
}

impl MaximumPrincipleReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that max and min over V₁ ∪ bd(V₁) are attained on bd(V₁). `u` must
/// live on a window containing V₁ and its neighbors.
pub fn maximum_principle_check(u: &VertexFunction, v1: &[VertexId], tol: f64) -> Result<MaximumPrincipleReport> {
    let w = u.window();
    let mut max_residual = 0.0f64;
    let mut inner = Vec::new();
    for &x in v1 {
        let i = w.require(x)?;
        if !w.is_closed(i) {
            return Err(Error::WindowTooSmall { vertex: x, required_radius: None });
        }
        max_residual = max_residual.max(laplacian_at(u, i).abs());
        inner.push(i);
    }
    let scale = u.values().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if max_residual > tol * scale {
        return Err(Error::NotHarmonic { max_residual, tolerance: tol * scale });
    }
    let mut bd = Vec::new();
    for &i in &inner {
        for &(j, _, _) in w.neighbors(i) {
            if !v1.contains(&w.vertex(j)) {
                bd.push(j);
            }
        }
    }
    bd.sort_unstable();
    bd.dedup();
    let ext = |idx: &[usize]| idx.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(mx, mn), &i| (mx.max(u.at(i)), mn.min(u.at(i))));
    let (max_i, min_i) = ext(&inner);
    let (max_b, min_b) = ext(&bd);
    let constant = max_i.max(max_b) - min_i.min(min_b) <= tol * scale;
    let slack = tol * scale;
    let violations =
        if constant { Vec::new() } else { inner.iter().filter(|&&i| u.at(i) > max_b + slack || u.at(i) < min_b - slack).map(|&i| w.vertex(i)).collect() };
    Ok(MaximumPrincipleReport { constant, max_interior: max_i, min_interior: min_i, max_boundary: max_b, min_boundary: min_b, max_residual, violations })
}

/// Largest |Δu − g| over the problem's interior.
pub fn dirichlet_residual(p: &DirichletProblem, u: &VertexFunction) -> Result<f64> {
    let mut worst = 0.0f64;
    for (&x, &g) in p.interior.iter().zip(&p.source) {
        let i = u.window().require(x)?;
        worst = worst.max((laplacian_at(u, i) - g).abs());
    }
    Ok(worst)
}
