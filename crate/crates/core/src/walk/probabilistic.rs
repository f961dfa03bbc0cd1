use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::network::{total_conductance, Network, VertexId, Window};
use crate::operators::{energy, laplacian_at, VertexFunction};

use super::engine::{mean_estimate, run_batches, run_until, tag, McParams, Outcome, Stepper, WalkEstimate};
use super::estimates::{estimate_f, estimate_green_visits, estimate_u};
use super::green::IdentityCheck;

/// Where walks from one start first meet a finite target set.
#[derive(Clone, Debug)]
pub(crate) struct HitDistribution {
    pub counts: Vec<u64>,
    pub censored: u64,
    pub total: u64,
}

impl HitDistribution {
    pub fn p(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    /// Multinomial covariance of the estimated frequencies.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        let n = self.total as f64;
        if i == j {
            self.p(i) * (1.0 - self.p(i)) / n
        } else {
            -self.p(i) * self.p(j) / n
        }
    }

    pub fn se(&self, i: usize) -> f64 {
        self.cov(i, i).sqrt()
    }
}

pub(crate) fn hitting_distribution(
    net: &dyn Network,
    a: VertexId,
    targets: &[VertexId],
    min_step: u64,
    params: &McParams,
    label: &str,
) -> Result<HitDistribution> {
    net.neighbors(a)?;
    let is_target = |v: VertexId| targets.contains(&v);
    let parts = run_batches(params, tag(label), |rng, count| {
        let mut st = Stepper::new(net);
        let mut counts = vec![0u64; targets.len()];
        let mut cens = 0u64;
        for _ in 0..count {
            match run_until(&mut st, rng, a, params.horizon, min_step, &is_target)? {
                Outcome::Hit { at, .. } => counts[targets.iter().position(|&t| t == at).unwrap()] += 1,
                _ => cens += 1,
            }
        }
        Ok((counts, cens))
    })?;
    let mut counts = vec![0u64; targets.len()];
    let mut censored = 0;
    for (c, k) in parts {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
        censored += k;
    }
    Ok(HitDistribution { counts, censored, total: params.samples })
}

/// A Monte-Carlo function on an evaluation window with pointwise errors and
/// its Laplacian residual against the intended source.
#[derive(Clone, Debug)]
pub struct McFunction {
    pub function: VertexFunction,
    pub stderr: VertexFunction,
    /// max |Δf − source| over closed vertices of the window.
    pub residual: f64,
    /// The same maximum measured in propagated standard errors.
    pub residual_z: f64,
    /// Largest censored fraction among the per-vertex estimates.
    pub censored: f64,
}

impl McFunction {
    pub fn to_json(&self) -> serde_json::Value {
        let map = |f: &VertexFunction| -> serde_json::Map<String, serde_json::Value> { f.iter().map(|(v, x)| (v.to_string(), serde_json::json!(x))).collect() };
        serde_json::json!({
            "values": map(&self.function),
            "stderr": map(&self.stderr),
            "residual": self.residual,
            "residual_z": self.residual_z,
            "censored": self.censored,
        })
    }
}

fn residual_against(f: &VertexFunction, se: &VertexFunction, source: &[(VertexId, f64)]) -> (f64, f64) {
    let w = f.window();
    let (mut r, mut z) = (0.0f64, 0.0f64);
    for i in (0..w.len()).filter(|&i| w.is_closed(i)) {
        let x = w.vertex(i);
        let s: f64 = source.iter().filter(|p| p.0 == x).map(|p| p.1).sum();
        let d = (laplacian_at(f, i) - s).abs();
        let var = w.total_conductance(i).powi(2) * se.at(i).powi(2) + w.neighbors(i).iter().map(|&(j, c, _)| c * c * se.at(j).powi(2)).sum::<f64>();
        r = r.max(d);
        z = z.max(if d == 0.0 {
            0.0
        } else if var > 0.0 {
            d / var.sqrt()
        } else {
            f64::INFINITY
        });
    }
    (r, z)
}

fn mc_function(values: Vec<f64>, errors: Vec<f64>, window: &Window, source: &[(VertexId, f64)], censored: f64) -> Result<McFunction> {
    let function = VertexFunction::new(window.clone(), values)?;
    let stderr = VertexFunction::new(window.clone(), errors)?;
    let (residual, residual_z) = residual_against(&function, &stderr, source);
    Ok(McFunction { function, stderr, residual, residual_z, censored })
}

/// 1 − U(x,x) with its error; refuses when U is within 3σ of 1.
fn escape_probability(net: &dyn Network, x: VertexId, params: &McParams, checked: bool) -> Result<(f64, f64)> {
    let u = estimate_u(net, x, params)?.direct;
    let e = 1.0 - u.point;
    if checked && e <= 3.0 * u.stderr {
        return Err(Error::Recurrent(format!("U({x},{x}) = {} ± {} is indistinguishable from 1", u.point, u.stderr)));
    }
    if e <= 0.0 {
        return Err(Error::Recurrent(format!("no escapes from {x} observed")));
    }
    Ok((e, u.stderr))
}

/// w_x(a) = 𝒢(a,x)/c(x) = F(a,x) / (c(x)(1 − U(x,x))) on the evaluation
/// window. Refuses when the return probability cannot be told apart from 1.
pub fn monopole_probabilistic(net: &dyn Network, x: VertexId, eval: &Window, params: &McParams) -> Result<McFunction> {
    monopole_impl(net, x, eval, params, true)
}

/// [`monopole_probabilistic`] without the recurrence guard.
pub fn monopole_probabilistic_unchecked(net: &dyn Network, x: VertexId, eval: &Window, params: &McParams) -> Result<McFunction> {
    monopole_impl(net, x, eval, params, false)
}

fn monopole_impl(net: &dyn Network, x: VertexId, eval: &Window, params: &McParams, checked: bool) -> Result<McFunction> {
    let cx = total_conductance(net, x)?;
    let (e, se_e) = escape_probability(net, x, params, checked)?;
    let k = 1.0 / (cx * e);
    let mut vals = Vec::with_capacity(eval.len());
    let mut errs = Vec::with_capacity(eval.len());
    let mut cens = 0.0f64;
    for &a in eval.vertices() {
        let (h, se_h) = if a == x {
            (1.0, 0.0)
        } else {
            let f = estimate_f(net, a, x, params)?;
            cens = cens.max(f.censored);
            (f.point, f.stderr)
        };
        vals.push(k * h);
        errs.push(k * se_h.hypot(h * se_e / e));
    }
    mc_function(vals, errs, eval, &[(x, 1.0)], cens)
}

/// D[j][i] = (Δh_i)(x_j) for the two-point set F = {x₁, x₂}, estimated
/// directly and through the factorization with U and F.
#[derive(Clone, Debug, Serialize)]
pub struct HittingMatrixD {
    pub x1: VertexId,
    pub x2: VertexId,
    /// c(x_j)(δ_ij − a_ji), a_ji = Pr_{x_j}[first visit to F at time ≥ 1 is x_i].
    pub direct: [[f64; 2]; 2],
    pub direct_stderr: [[f64; 2]; 2],
    /// diag(c)·[[1−U₁, −F₁₂], [−F₂₁, 1−U₂]].
    pub factorized: [[f64; 2]; 2],
    pub factorized_stderr: [[f64; 2]; 2],
    pub det_direct: f64,
    pub det_direct_stderr: f64,
    pub det_factorized: f64,
    /// c₁c₂(1 − 𝒢₁₂𝒢₂₁)/(𝒢₁₁𝒢₂₂) from visit-count estimates of 𝒢.
    pub det_green: f64,
    pub det_green_stderr: f64,
    pub near_singular: bool,
    /// Exact first-visit decompositions linking the two estimation paths.
    pub relations: Vec<IdentityCheck>,
    pub estimates: Vec<WalkEstimate>,
}

impl HittingMatrixD {
    /// Largest entrywise |direct − factorized| in combined standard errors.
    pub fn factorization_z(&self) -> f64 {
        let mut z = 0.0f64;
        for j in 0..2 {
            for i in 0..2 {
                let d = (self.direct[j][i] - self.factorized[j][i]).abs();
                let s = self.direct_stderr[j][i].hypot(self.factorized_stderr[j][i]);
                z = z.max(if d == 0.0 {
                    0.0
                } else if s > 0.0 {
                    d / s
                } else {
                    f64::INFINITY
                });
            }
        }
        z
    }
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn hitting_matrix_d(net: &dyn Network, x1: VertexId, x2: VertexId, params: &McParams) -> Result<HittingMatrixD> {
    if x1 == x2 {
        return Err(invalid("hitting matrix needs two distinct vertices"));
    }
    let xs = [x1, x2];
    let c = [total_conductance(net, x1)?, total_conductance(net, x2)?];
    let dist = [
        hitting_distribution(net, x1, &xs, 1, params, &format!("D-row({x1};{x1},{x2})"))?,
        hitting_distribution(net, x2, &xs, 1, params, &format!("D-row({x2};{x1},{x2})"))?,
    ];
    let mut direct = [[0.0; 2]; 2];
    let mut direct_stderr = [[0.0; 2]; 2];
    for j in 0..2 {
        for i in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            direct[j][i] = c[j] * (delta - dist[j].p(i));
            direct_stderr[j][i] = c[j] * dist[j].se(i);
        }
    }
    // det = c₁c₂[(1−a₁₁)(1−a₂₂) − a₁₂a₂₁]; rows are independent multinomials
    let (a11, a12, a21, a22) = (dist[0].p(0), dist[0].p(1), dist[1].p(0), dist[1].p(1));
    let g0 = [-(1.0 - a22), -a21];
    let g1 = [-a12, -(1.0 - a11)];
    let quad = |g: [f64; 2], d: &HitDistribution| {
        let mut s = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                s += g[i] * g[k] * d.cov(i, k);
            }
        }
        s
    };
    let det_direct = det2(&direct);
    let det_direct_stderr = c[0] * c[1] * (quad(g0, &dist[0]) + quad(g1, &dist[1])).max(0.0).sqrt();

    let u1 = estimate_u(net, x1, params)?.direct;
    let u2 = estimate_u(net, x2, params)?.direct;
    let f12 = estimate_f(net, x1, x2, params)?;
    let f21 = estimate_f(net, x2, x1, params)?;
    let factorized = [[c[0] * (1.0 - u1.point), -c[0] * f12.point], [-c[1] * f21.point, c[1] * (1.0 - u2.point)]];
    let factorized_stderr = [[c[0] * u1.stderr, c[0] * f12.stderr], [c[1] * f21.stderr, c[1] * u2.stderr]];

    let g11 = estimate_green_visits(net, x1, x1, params)?;
    let g22 = estimate_green_visits(net, x2, x2, params)?;
    let g12 = estimate_green_visits(net, x1, x2, params)?;
    let g21 = estimate_green_visits(net, x2, x1, params)?;
    let num = 1.0 - g12.point * g21.point;
    let den = g11.point * g22.point;
    let det_green = c[0] * c[1] * num / den;
    let rel = ((g21.point * g12.stderr).powi(2) + (g12.point * g21.stderr).powi(2)).sqrt() / num.abs().max(f64::MIN_POSITIVE);
    let rel = rel.hypot(g11.stderr / g11.point).hypot(g22.stderr / g22.point);
    let det_green_stderr = det_green.abs() * rel;
    let near_singular = det_direct.abs() <= 3.0 * det_direct_stderr;

    let gate = 3.0;
    let sd = |d: &HitDistribution, i| d.se(i);
    let relations = vec![
        IdentityCheck::new(
            "U(x1,x1)=a11+a12*F(x2,x1)",
            u1.point,
            a11 + a12 * f21.point,
            u1.stderr.hypot(sd(&dist[0], 0)).hypot(sd(&dist[0], 1) * f21.point).hypot(a12 * f21.stderr),
            gate,
        ),
        IdentityCheck::new(
            "U(x2,x2)=a22+a21*F(x1,x2)",
            u2.point,
            a22 + a21 * f12.point,
            u2.stderr.hypot(sd(&dist[1], 1)).hypot(sd(&dist[1], 0) * f12.point).hypot(a21 * f12.stderr),
            gate,
        ),
        IdentityCheck::new(
            "F(x1,x2)=a12+a11*F(x1,x2)",
            f12.point,
            a12 + a11 * f12.point,
            f12.stderr.hypot(sd(&dist[0], 1)).hypot(sd(&dist[0], 0) * f12.point).hypot(a11 * f12.stderr),
            gate,
        ),
        IdentityCheck::new(
            "F(x2,x1)=a21+a22*F(x2,x1)",
            f21.point,
            a21 + a22 * f21.point,
            f21.stderr.hypot(sd(&dist[1], 0)).hypot(sd(&dist[1], 1) * f21.point).hypot(a22 * f21.stderr),
            gate,
        ),
    ];
    Ok(HittingMatrixD {
        x1,
        x2,
        direct,
        direct_stderr,
        det_factorized: det2(&factorized),
        factorized,
        factorized_stderr,
        det_direct,
        det_direct_stderr,
        det_green,
        det_green_stderr,
        near_singular,
        relations,
        estimates: vec![u1, u2, f12, f21, g11, g22, g12, g21],
    })
}

/// Both dipole constructions on an evaluation window.
#[derive(Clone, Debug)]
pub struct DipoleProbabilistic {
    /// α h₁ + β h₂ with D(α, β)ᵀ = (1, −1)ᵀ.
    pub via_d: McFunction,
    /// w_{x₁} − w_{x₂}.
    pub via_monopoles: McFunction,
    pub alpha: f64,
    pub beta: f64,
    pub d: HittingMatrixD,
    /// max |Δ(via_d − via_monopoles)| over closed window vertices.
    pub difference_residual: f64,
}

/// Hitting distribution h_i(a) on a finite set, h_i(x_j) = δ_ij.
fn set_hitting(net: &dyn Network, set: &[VertexId], eval: &Window, params: &McParams) -> Result<(Vec<HitDistribution>, f64)> {
    let mut out = Vec::with_capacity(eval.len());
    let mut cens = 0.0f64;
    for &a in eval.vertices() {
        if let Some(k) = set.iter().position(|&s| s == a) {
            let mut counts = vec![0; set.len()];
            counts[k] = params.samples;
            out.push(HitDistribution { counts, censored: 0, total: params.samples });
            continue;
        }
        let label = format!("hit({a};{})", set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
        let d = hitting_distribution(net, a, set, 0, params, &label)?;
        cens = cens.max(d.censored as f64 / d.total as f64);
        out.push(d);
    }
    Ok((out, cens))
}

pub fn dipole_probabilistic(net: &dyn Network, x1: VertexId, x2: VertexId, eval: &Window, params: &McParams) -> Result<DipoleProbabilistic> {
    if x1 == x2 {
        return Err(invalid("dipole needs two distinct vertices"));
    }
    let d = hitting_matrix_d(net, x1, x2, params)?;
    if d.near_singular {
        return Err(Error::Numerical(format!("matrix D is singular within error: det = {} ± {}", d.det_direct, d.det_direct_stderr)));
    }
    let m = &d.direct;
    let det = d.det_direct;
    let alpha = (m[1][1] + m[0][1]) / det;
    let beta = (-m[0][0] - m[1][0]) / det;
    let (hs, cens) = set_hitting(net, &[x1, x2], eval, params)?;
    let vals = hs.iter().map(|h| alpha * h.p(0) + beta * h.p(1)).collect();
    let errs = hs
        .iter()
        .map(|h| {
            let v = alpha * alpha * h.cov(0, 0) + beta * beta * h.cov(1, 1) + 2.0 * alpha * beta * h.cov(0, 1);
            v.max(0.0).sqrt()
        })
        .collect();
    let source = [(x1, 1.0), (x2, -1.0)];
    let via_d = mc_function(vals, errs, eval, &source, cens)?;
    let w1 = monopole_probabilistic(net, x1, eval, params)?;
    let w2 = monopole_probabilistic(net, x2, eval, params)?;
    let vals = w1.function.sub(&w2.function)?.into_values();
    let errs = w1.stderr.values().iter().zip(w2.stderr.values()).map(|(a, b)| a.hypot(*b)).collect();
    let via_monopoles = mc_function(vals, errs, eval, &source, w1.censored.max(w2.censored))?;
    let diff = via_d.function.sub(&via_monopoles.function)?;
    let w = diff.window();
    let difference_residual = (0..w.len()).filter(|&i| w.is_closed(i)).map(|i| laplacian_at(&diff, i).abs()).fold(0.0, f64::max);
    Ok(DipoleProbabilistic { via_d, via_monopoles, alpha, beta, d, difference_residual })
}

/// Φ(a) = Σ φ(x_i) h_{x_i}(a) on the evaluation window.
#[derive(Clone, Debug)]
pub struct HarmonicExtension {
    pub estimate: McFunction,
    /// Σ_i h_{x_i}(a): the probability that the walk from a meets the set.
    pub hit_mass: VertexFunction,
}

pub fn harmonic_extension(net: &dyn Network, set: &[(VertexId, f64)], eval: &Window, params: &McParams) -> Result<HarmonicExtension> {
    if set.is_empty() {
        return Err(invalid("harmonic extension needs a nonempty set"));
    }
    let pts: Vec<VertexId> = set.iter().map(|p| p.0).collect();
    let mut sorted = pts.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != pts.len() {
        return Err(invalid("duplicate vertex in boundary set"));
    }
    let mut vals = Vec::with_capacity(eval.len());
    let mut errs = Vec::with_capacity(eval.len());
    let mut mass = Vec::with_capacity(eval.len());
    let mut cens = 0.0f64;
    for &a in eval.vertices() {
        if let Some(k) = pts.iter().position(|&s| s == a) {
            vals.push(set[k].1);
            errs.push(0.0);
            mass.push(1.0);
            continue;
        }
        let d = hitting_distribution(net, a, &pts, 0, params, &format!("ext({a})"))?;
        let n = d.total as f64;
        let (mut s, mut s2) = (0.0, 0.0);
        for (k, &cnt) in d.counts.iter().enumerate() {
            s += cnt as f64 * set[k].1;
            s2 += cnt as f64 * set[k].1 * set[k].1;
        }
        let e = mean_estimate(s, s2, d.total, d.censored, String::new(), params);
        vals.push(e.point);
        errs.push(e.stderr);
        mass.push((n - d.censored as f64) / n);
        cens = cens.max(e.censored);
    }
    // Φ is harmonic off the set; the set points carry no prescribed source
    let w = eval;
    let function = VertexFunction::new(w.clone(), vals)?;
    let stderr = VertexFunction::new(w.clone(), errs)?;
    let (mut r, mut z) = (0.0f64, 0.0f64);
    for i in (0..w.len()).filter(|&i| w.is_closed(i) && !pts.contains(&w.vertex(i))) {
        let d = laplacian_at(&function, i).abs();
        let var = w.total_conductance(i).powi(2) * stderr.at(i).powi(2) + w.neighbors(i).iter().map(|&(j, c, _)| c * c * stderr.at(j).powi(2)).sum::<f64>();
        r = r.max(d);
        z = z.max(if d == 0.0 {
            0.0
        } else if var > 0.0 {
            d / var.sqrt()
        } else {
            f64::INFINITY
        });
    }
    Ok(HarmonicExtension {
        estimate: McFunction { function, stderr, residual: r, residual_z: z, censored: cens },
        hit_mass: VertexFunction::new(w.clone(), mass)?,
    })
}

/// Energy of h_x = F(·,x) on a window against the bound
/// ½ c(x) Σ_a Pr[x→a](1 − Pr[a→x]) and the form it is derived from,
/// ½ Σ_a c(a) F(a,x)(1 − F(a,x)).
#[derive(Clone, Debug, Serialize)]
pub struct HEnergyReport {
    pub x: VertexId,
    pub window_energy: f64,
    pub bound: f64,
    pub bound_stderr: f64,
    /// Σ over a of c(a)F(a,x)(1−F(a,x)), halved.
    pub direct_form: f64,
    pub direct_form_stderr: f64,
}

pub fn h_energy_report(net: &dyn Network, x: VertexId, eval: &Window, params: &McParams) -> Result<HEnergyReport> {
    let cx = total_conductance(net, x)?;
    let mut h = Vec::with_capacity(eval.len());
    let (mut bound, mut bvar, mut direct, mut dvar) = (0.0, 0.0, 0.0, 0.0);
    for &a in eval.vertices() {
        if a == x {
            h.push(1.0);
            continue;
        }
        let fa = estimate_f(net, a, x, params)?;
        let fx = estimate_f(net, x, a, params)?;
        let ca = total_conductance(net, a)?;
        h.push(fa.point);
        bound += 0.5 * cx * fx.point * (1.0 - fa.point);
        bvar += (0.5 * cx).powi(2) * ((1.0 - fa.point) * fx.stderr).hypot(fx.point * fa.stderr).powi(2);
        direct += 0.5 * ca * fa.point * (1.0 - fa.point);
        dvar += (0.5 * ca * (1.0 - 2.0 * fa.point) * fa.stderr).powi(2);
    }
    let f = VertexFunction::new(eval.clone(), h)?;
    Ok(HEnergyReport { x, window_energy: energy(&f), bound, bound_stderr: bvar.sqrt(), direct_form: direct, direct_form_stderr: dvar.sqrt() })
}
