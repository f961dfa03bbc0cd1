use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::Solver;
use crate::network::{try_materialize_ball, Network, VertexId};
use crate::numeric::compensated_sum;
use crate::operators::{energy_report, laplacian_at, VertexFunction};

use super::dirichlet::grounded_solve;
use super::Exhaustion;

/// ∂v/∂n(x) = Σ_{y∈H, y∼x} c_xy (v(x) − v(y)) for x ∈ bd(H).
pub fn normal_derivative(net: &dyn Network, h: &[VertexId], v: &VertexFunction, x: VertexId) -> Result<f64> {
    let inside: BTreeSet<VertexId> = h.iter().copied().collect();
    if inside.contains(&x) {
        return Err(invalid(format!("{x} lies in H, not on its boundary")));
    }
    let vx = v.get(x)?;
    let mut terms = Vec::new();
    for (y, c) in net.neighbors(x)? {
        if inside.contains(&y) {
            terms.push(c * (vx - v.get(y)?));
        }
    }
    if terms.is_empty() {
        return Err(invalid(format!("{x} is not on the boundary of H")));
    }
    Ok(compensated_sum(terms))
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussGreenWindow {
    pub radius: usize,
    /// Σ_{x∈H} u(x) Δv(x), H = vertices at distance < radius.
    pub interior_sum: f64,
    /// Σ_{x∈bd H} u(x) ∂v/∂n(x).
    pub boundary_sum: f64,
    /// Energy over edges touching H; equals interior + boundary exactly.
    pub inner_product: f64,
    /// Energy over all ball edges (includes edges inside bd H).
    pub window_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussGreenReport {
    pub root: VertexId,
    /// Sums with u as given.
    pub raw: Vec<GaussGreenWindow>,
    /// Sums with the representative u − u(root).
    pub gauged: Vec<GaussGreenWindow>,
}

impl GaussGreenReport {
    /// Last boundary sum of the raw form; a nonvanishing limit signals
    /// transience.
    pub fn boundary_limit(&self) -> Option<f64> {
        self.raw.last().map(|w| w.boundary_sum)
    }
}

/// Interior and boundary sums of the Gauss-Green identity along a ball
/// exhaustion. `u` and `v` must share a window containing every ball.
pub fn gauss_green_split(net: &dyn Network, u: &VertexFunction, v: &VertexFunction, ex: &Exhaustion) -> Result<GaussGreenReport> {
    u.check_same_window(v)?;
    let root = ex.center(net, u.window().vertex(0));
    let u0 = u.get(root)?;
    let mut raw = Vec::new();
    let mut gauged = Vec::new();
    for &r in &ex.radii {
        let ball = match try_materialize_ball(net, root, r, ex.max_vertices) {
            Ok(b) => b,
            Err(Error::InvalidInput(_)) => break,
            Err(e) => return Err(e),
        };
        for &x in ball.vertices() {
            u.window().require(x)?;
        }
        let mut interior_terms = Vec::new();
        let mut boundary_terms = Vec::new();
        let mut edge_terms = Vec::new();
        for i in 0..ball.len() {
            let x = ball.vertex(i);
            let bi = u.window().position(x).unwrap();
            if ball.is_interior(i) {
                if !u.window().is_closed(bi) {
                    return Err(Error::WindowTooSmall { vertex: x, required_radius: Some(r + 1) });
                }
                interior_terms.push((u.at(bi), laplacian_at(v, bi)));
            } else {
                let vx = v.at(bi);
                let dn: f64 = compensated_sum(
                    ball.neighbors(i)
                        .iter()
                        .filter(|&&(j, _, _)| ball.is_interior(j))
                        .map(|&(j, c, _)| c * (vx - v.at(u.window().position(ball.vertex(j)).unwrap()))),
                );
                boundary_terms.push((u.at(bi), dn));
            }
        }
        for e in ball.edges() {
            if ball.is_interior(e.a) || ball.is_interior(e.b) {
                let (a, b) = (u.window().position(ball.vertex(e.a)).unwrap(), u.window().position(ball.vertex(e.b)).unwrap());
                edge_terms.push((e.c, a, b));
            }
        }
        let uw = u.transplant(ball.clone(), 0.0);
        let vw = v.transplant(ball.clone(), 0.0);
        let window_energy = energy_report(&uw, &vw)?.value;
        for (shift, out) in [(0.0, &mut raw), (u0, &mut gauged)] {
            let interior_sum = compensated_sum(interior_terms.iter().map(|&(a, b)| (a - shift) * b));
            let boundary_sum = compensated_sum(boundary_terms.iter().map(|&(a, b)| (a - shift) * b));
            let inner_product = compensated_sum(edge_terms.iter().map(|&(c, a, b)| c * (u.at(a) - u.at(b)) * (v.at(a) - v.at(b))));
            out.push(GaussGreenWindow { radius: r, interior_sum, boundary_sum, inner_product, window_energy });
        }
    }
    Ok(GaussGreenReport { root, raw, gauged })
}

/// u = fin + harm on the window: fin is supported on the interior, harm is
/// harmonic on the interior and agrees with u on the boundary.
#[derive(Clone, Debug)]
pub struct RoydenSplit {
    pub fin: VertexFunction,
    pub harm: VertexFunction,
}

pub fn royden_split(_net: &dyn Network, window: &crate::network::Window, u: &VertexFunction) -> Result<RoydenSplit> {
    if !u.window().same_as(window) {
        return Err(Error::WindowMismatch);
    }
    let n = window.len();
    let has_boundary = (0..n).any(|i| !window.is_interior(i));
    if !has_boundary {
        // every vertex is interior: the whole space is spanned by deltas
        return Ok(RoydenSplit { fin: u.clone(), harm: VertexFunction::zeros(window.clone()) });
    }
    let mut fixed = u.values().to_vec();
    for (i, f) in fixed.iter_mut().enumerate() {
        if window.is_interior(i) {
            *f = 0.0;
        }
    }
    let harm = grounded_solve(window, &vec![0.0; n], &fixed, Solver::Auto)?;
    let harm = VertexFunction::new(window.clone(), harm)?;
    let fin = u.sub(&harm)?;
    Ok(RoydenSplit { fin, harm })
}
