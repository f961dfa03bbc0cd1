use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{solve_spd, CsrMatrix, Solver};
use crate::network::{try_materialize_ball, Network, VertexId, Window};
use crate::operators::{energy, window_graph_laplacian, VertexFunction};

use super::dirichlet::grounded_solve;

/// Relative energy increment below which a step counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Increment ratio (last over previous) at or above which a diverging
/// monopole energy is read as recurrence.
pub const RECURRENT_INCREMENT_RATIO: f64 = 0.75;

/// Nested hop balls used to approximate infinite-volume potentials.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Exhaustion {
    pub radii: Vec<usize>,
    /// Ball center; defaults to the network origin, then to the first source.
    pub root: Option<VertexId>,
    /// Radii whose ball would exceed this size are skipped.
    pub max_vertices: usize,
    pub solver: Solver,
}

impl Default for Exhaustion {
    fn default() -> Self {
        Exhaustion::doubling(6)
    }
}

impl Exhaustion {
    /// Radii 2, 4, …, 2^k.
    pub fn doubling(k: u32) -> Self {
        Exhaustion { radii: (1..=k).map(|i| 1usize << i).collect(), root: None, max_vertices: 400_000, solver: Solver::Auto }
    }

    pub fn with_radii(radii: &[usize]) -> Self {
        Exhaustion { radii: radii.to_vec(), ..Exhaustion::default() }
    }

    pub fn rooted(mut self, root: VertexId) -> Self {
        self.root = Some(root);
        self
    }

    pub fn solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub(crate) fn center(&self, net: &dyn Network, fallback: VertexId) -> VertexId {
        self.root.or_else(|| net.origin()).unwrap_or(fallback)
    }
}

/// How a potential is cut off at the window edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// v = 0 on the window boundary.
    #[default]
    Grounded,
    /// The window is treated as a finite network of its own (no current
    /// leaves it); the gauge fixes v at the last sink to zero.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    NotConverged,
    TransientConsistent,
    RecurrentConsistent,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusEnergy {
    pub radius: usize,
    pub vertices: usize,
    pub energy: f64,
    /// energy minus the previous window's energy (first entry: the energy).
    pub increment: f64,
    /// True when the ball covers a whole finite component.
    pub exhaustive: bool,
}

#[derive(Clone, Debug)]
pub struct PotentialResult {
    pub function: VertexFunction,
    pub energy_by_radius: Vec<RadiusEnergy>,
    pub verdict: Verdict,
    pub truncation: Truncation,
}

impl PotentialResult {
    pub fn energy(&self) -> f64 {
        self.energy_by_radius.last().map(|r| r.energy).unwrap_or(0.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let values: serde_json::Map<String, serde_json::Value> = self.function.iter().map(|(v, x)| (v.to_string(), serde_json::json!(x))).collect();
        serde_json::json!({
            "values": values,
            "energy_by_radius": self.energy_by_radius,
            "verdict": self.verdict,
            "truncation": self.truncation,
        })
    }
}

/// Point sources: the potential solves Δv = Σ q_i δ_{x_i}.
struct Sources {
    points: Vec<(VertexId, f64)>,
}

impl Sources {
    fn net_charge(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }
}

fn solve_on_window(window: &Window, sources: &Sources, truncation: Truncation, solver: Solver) -> Result<Vec<f64>> {
    let n = window.len();
    let mut rhs = vec![0.0; n];
    for &(x, q) in &sources.points {
        rhs[window.require(x)?] += q;
    }
    let exhaustive = (0..n).all(|i| window.is_closed(i));
    if truncation == Truncation::Grounded && !exhaustive {
        return grounded_solve(window, &rhs, &vec![0.0; n], solver);
    }
    // finite network: pin the gauge at the last listed point
    if sources.net_charge().abs() > 1e-12 {
        return Err(Error::Numerical("a finite network admits no potential with nonzero net charge".into()));
    }
    let gauge = window.require(sources.points.last().unwrap().0)?;
    let l = window_graph_laplacian(window);
    let keep: Vec<usize> = (0..n).filter(|&i| i != gauge).collect();
    let a: CsrMatrix = l.principal(&keep);
    let b: Vec<f64> = keep.iter().map(|&i| rhs[i]).collect();
    let x = solve_spd(&a, &b, solver)?;
    let mut out = vec![0.0; n];
    for (k, &i) in keep.iter().enumerate() {
        out[i] = x[k];
    }
    Ok(out)
}

fn converged(series: &[RadiusEnergy]) -> bool {
    if series.last().map(|r| r.exhaustive).unwrap_or(false) {
        return true;
    }
    if series.len() < 3 {
        return false;
    }
    let rel = |r: &RadiusEnergy| r.increment.abs() / r.energy.abs().max(f64::MIN_POSITIVE);
    series[series.len() - 2..].iter().all(|r| rel(r) < CONVERGENCE_TOL)
}

fn solve_schedule(net: &dyn Network, sources: Sources, ex: &Exhaustion, truncation: Truncation) -> Result<(Option<VertexFunction>, Vec<RadiusEnergy>, bool)> {
    let center = ex.center(net, sources.points[0].0);
    let mut series: Vec<RadiusEnergy> = Vec::new();
    let mut last: Option<VertexFunction> = None;
    let mut hit_finite = false;
    for &r in &ex.radii {
        let window = match try_materialize_ball(net, center, r, ex.max_vertices) {
            Ok(w) => w,
            Err(Error::InvalidInput(_)) => break,
            Err(e) => return Err(e),
        };
        let placed = sources.points.iter().all(|&(x, _)| window.position(x).map(|i| window.is_interior(i)).unwrap_or(false));
        let exhaustive = (0..window.len()).all(|i| window.is_closed(i));
        if !placed && !exhaustive {
            continue;
        }
        if exhaustive && truncation == Truncation::Grounded && sources.net_charge().abs() > 1e-12 {
            hit_finite = true;
            break;
        }
        let values = solve_on_window(&window, &sources, truncation, ex.solver)?;
        let f = VertexFunction::new(window.clone(), values)?;
        let e = energy(&f);
        let prev = series.last().map(|s| s.energy).unwrap_or(0.0);
        series.push(RadiusEnergy { radius: r, vertices: window.len(), energy: e, increment: e - prev, exhaustive });
        last = Some(f);
        if converged(&series) {
            break;
        }
    }
    Ok((last, series, hit_finite))
}

fn result_or_zero(net: &dyn Network, last: Option<VertexFunction>, anchor: VertexId) -> Result<VertexFunction> {
    match last {
        Some(f) => Ok(f),
        None => {
            let w = crate::network::FiniteWindow::from_vertices(net, &[anchor])?;
            Ok(VertexFunction::zeros(w))
        }
    }
}

/// Δv = δ_x − δ_y solved on each window of the exhaustion.
pub fn dipole(net: &dyn Network, x: VertexId, y: VertexId, ex: &Exhaustion) -> Result<PotentialResult> {
    dipole_with(net, x, y, ex, Truncation::Grounded)
}

pub fn dipole_with(net: &dyn Network, x: VertexId, y: VertexId, ex: &Exhaustion, truncation: Truncation) -> Result<PotentialResult> {
    if x == y {
        let w = crate::network::FiniteWindow::from_vertices(net, &[x])?;
        return Ok(PotentialResult { function: VertexFunction::zeros(w), energy_by_radius: Vec::new(), verdict: Verdict::Converged, truncation });
    }
    let (last, series, _) = solve_schedule(net, Sources { points: vec![(x, 1.0), (y, -1.0)] }, ex, truncation)?;
    let verdict = if converged(&series) { Verdict::Converged } else { Verdict::NotConverged };
    Ok(PotentialResult { function: result_or_zero(net, last, x)?, energy_by_radius: series, verdict, truncation })
}

/// Grounded solves of Δw = δ_x. Converging energies read as transience,
/// energies growing without a shrinking trend as recurrence.
pub fn monopole(net: &dyn Network, x: VertexId, ex: &Exhaustion) -> Result<PotentialResult> {
    let (last, series, hit_finite) = solve_schedule(net, Sources { points: vec![(x, 1.0)] }, ex, Truncation::Grounded)?;
    let verdict = if hit_finite { Verdict::RecurrentConsistent } else { monopole_trend(&series) };
    Ok(PotentialResult { function: result_or_zero(net, last, x)?, energy_by_radius: series, verdict, truncation: Truncation::Grounded })
}

pub(crate) fn monopole_trend(series: &[RadiusEnergy]) -> Verdict {
    if converged(series) {
        return Verdict::TransientConsistent;
    }
    if series.len() < 3 {
        return Verdict::Inconclusive;
    }
    let k = series.len();
    let (a, b) = (series[k - 2].increment, series[k - 1].increment);
    if a <= 0.0 {
        return Verdict::Inconclusive;
    }
    if b / a >= RECURRENT_INCREMENT_RATIO {
        Verdict::RecurrentConsistent
    } else {
        Verdict::TransientConsistent
    }
}

/// Δv = δ_{x₀} − Σ α_i δ_{x_i} with α_i > 0 and Σ α_i = 1.
pub fn multipole(net: &dyn Network, x0: VertexId, points: &[(VertexId, f64)], ex: &Exhaustion) -> Result<PotentialResult> {
    multipole_with(net, x0, points, ex, Truncation::Grounded)
}

pub fn multipole_with(net: &dyn Network, x0: VertexId, points: &[(VertexId, f64)], ex: &Exhaustion, truncation: Truncation) -> Result<PotentialResult> {
    if points.is_empty() {
        return Err(invalid("multipole needs at least one sink"));
    }
    let sum: f64 = points.iter().map(|p| p.1).sum();
    if (sum - 1.0).abs() > 1e-12 || points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(invalid(format!("multipole weights must be positive and sum to 1 (sum = {sum})")));
    }
    let mut ids: Vec<VertexId> = points.iter().map(|p| p.0).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != points.len() || ids.contains(&x0) {
        return Err(invalid("multipole points must be distinct and differ from x₀"));
    }
    let mut pts = vec![(x0, 1.0)];
    pts.extend(points.iter().map(|&(x, a)| (x, -a)));
    let (last, series, _) = solve_schedule(net, Sources { points: pts }, ex, truncation)?;
    let verdict = if converged(&series) { Verdict::Converged } else { Verdict::NotConverged };
    Ok(PotentialResult { function: result_or_zero(net, last, x0)?, energy_by_radius: series, verdict, truncation })
}

/// ‖v_xy‖²_E of the converged grounded dipole.
pub fn resistance_distance(net: &dyn Network, x: VertexId, y: VertexId, ex: &Exhaustion) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    let d = dipole(net, x, y, ex)?;
    if d.verdict != Verdict::Converged {
        return Err(Error::Numerical(format!("dipole ({x},{y}) did not converge within the radius schedule")));
    }
    Ok(d.energy())
}
