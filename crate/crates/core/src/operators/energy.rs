use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Network;

use super::function::cycle_steps;
use super::{laplacian_at, markov_at, EdgeFlow, VertexFunction};
use crate::network::VertexId;

/// Energy over window edges, with the truncation made explicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub value: f64,
    /// Edges leaving the window, which the sum excludes.
    pub crossing_edges: usize,
    /// True when an excluded edge touches a vertex where u or v is nonzero,
    /// so the value is a truncated partial energy.
    pub truncated: bool,
}

/// E(u,v) = ½ Σ_{x,y} c_xy (u(x)−u(y))(v(x)−v(y)) over window edges.
pub fn energy_form(_net: &dyn Network, u: &VertexFunction, v: &VertexFunction) -> Result<f64> {
    Ok(energy_report(u, v)?.value)
}

pub fn energy_report(u: &VertexFunction, v: &VertexFunction) -> Result<EnergyReport> {
    u.check_same_window(v)?;
    let w = u.window();
    let value = w.edges().iter().map(|e| e.c * (u.at(e.a) - u.at(e.b)) * (v.at(e.a) - v.at(e.b))).sum();
    let truncated = (0..w.len()).any(|i| !w.is_closed(i) && (u.at(i) != 0.0 || v.at(i) != 0.0));
    Ok(EnergyReport { value, crossing_edges: w.crossing_edges(), truncated })
}

pub fn energy(u: &VertexFunction) -> f64 {
    let w = u.window();
    w.edges().iter().map(|e| e.c * (u.at(e.a) - u.at(e.b)).powi(2)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub l2: f64,
    /// ‖u‖ in ℓ²(V, c), weights from the full oracle.
    pub l2_c: f64,
    /// Energy seminorm ‖u‖_E.
    pub energy: f64,
}

pub fn norms(_net: &dyn Network, u: &VertexFunction) -> Norms {
    let w = u.window();
    let l2 = u.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    let l2_c = (0..w.len()).map(|i| w.total_conductance(i) * u.at(i).powi(2)).sum::<f64>().sqrt();
    Norms { l2, l2_c, energy: energy(u).sqrt() }
}

/// ∂u(x,y) = c_xy (u(x) − u(y)) in canonical orientation.
pub fn drop(_net: &dyn Network, u: &VertexFunction) -> EdgeFlow {
    let w = u.window();
    let values = w.edges().iter().map(|e| e.c * (u.at(e.a) - u.at(e.b))).collect();
    EdgeFlow::new(w.clone(), values).expect("drop of a finite function is finite")
}

/// Σ over unordered edges of r_e f(e)².
pub fn dissipation_norm_sq(flow: &EdgeFlow) -> f64 {
    flow.window().edges().iter().zip(flow.values()).map(|(e, f)| f * f / e.c).sum()
}

pub fn dissipation_norm(flow: &EdgeFlow) -> f64 {
    dissipation_norm_sq(flow).sqrt()
}

/// ⟨flow, χ_C⟩_D = Σ_{steps (a,b) of C} r_ab flow(a,b).
pub fn cycle_pairing(flow: &EdgeFlow, cycle: &[VertexId]) -> Result<f64> {
    let w = flow.window();
    let mut s = 0.0;
    for (a, b) in cycle_steps(cycle) {
        let f = flow.get(a, b)?;
        let i = w.require(a)?;
        let j = w.require(b)?;
        let c = w.neighbors(i).iter().find(|&&(k, _, _)| k == j).map(|&(_, c, _)| c).unwrap();
        s += f / c;
    }
    Ok(s)
}

fn check_harmonic(f: &VertexFunction, tol: f64) -> Result<()> {
    let w = f.window();
    let mut worst = 0.0f64;
    for i in (0..w.len()).filter(|&i| w.is_interior(i)) {
        if !w.is_closed(i) {
            return Err(Error::WindowTooSmall { vertex: w.vertex(i), required_radius: None });
        }
        let scale = w.total_conductance(i) * f.at(i).abs().max(1.0);
        worst = worst.max(laplacian_at(f, i).abs() / scale);
    }
    if worst > tol {
        return Err(Error::NotHarmonic { max_residual: worst, tolerance: tol });
    }
    Ok(())
}

/// ½ Σ_{interior x} c(x) (P(f²)(x) − f(x)²) for f harmonic on the interior.
/// `tol` bounds the relative residual |Δf(x)| / (c(x) max(1,|f(x)|)).
pub fn harmonic_energy_via_p(_net: &dyn Network, f: &VertexFunction, tol: f64) -> Result<f64> {
    check_harmonic(f, tol)?;
    let w = f.window();
    let sq = f.map(|x| x * x);
    Ok(0.5 * (0..w.len()).filter(|&i| w.is_interior(i)).map(|i| w.total_conductance(i) * (markov_at(&sq, i) - sq.at(i))).sum::<f64>())
}

/// ½ Σ_{interior x} Σ_{y∼x} c_xy (f(x) − f(y))², the direct counterpart of
/// [`harmonic_energy_via_p`].
pub fn interior_energy_sum(f: &VertexFunction) -> f64 {
    let w = f.window();
    0.5 * (0..w.len()).filter(|&i| w.is_interior(i)).map(|i| w.neighbors(i).iter().map(|&(j, c, _)| c * (f.at(i) - f.at(j)).powi(2)).sum::<f64>()).sum::<f64>()
}
