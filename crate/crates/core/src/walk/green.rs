use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{Network, VertexId, Window};

use super::engine::McParams;
use super::estimates::{estimate_f, estimate_green_visits, estimate_u};

/// Increment ratio over a doubling of N at or above which Green partial
/// sums are read as diverging.
pub const GREEN_DIVERGENCE_RATIO: f64 = 0.85;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// Partial sums settle (transient-consistent).
    Bounded,
    /// Partial sums keep growing (recurrent-consistent).
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenSeries {
    pub x: VertexId,
    pub y: VertexId,
    /// Σ_{n≤k} p⁽ⁿ⁾(x,y) for k = 0..=N.
    pub partial_sums: Vec<f64>,
    /// (S_N − S_{N/2}) / (S_{N/2} − S_{N/4}).
    pub increment_ratio: Option<f64>,
    pub growth: Growth,
}

impl GreenSeries {
    pub fn last(&self) -> f64 {
        *self.partial_sums.last().unwrap()
    }
}

/// (S_{4q} − S_{2q}) / (S_{2q} − S_q) for the largest even q with 4q ≤ N.
pub(crate) fn doubling_ratio(s: &[f64]) -> Option<f64> {
    let n = s.len().checked_sub(1)?;
    if n < 8 {
        return None;
    }
    // even indices so periodic chains compare like with like
    let q = (n / 4) & !1;
    let h = 2 * q;
    let d0 = s[h] - s[q];
    let d1 = s[2 * h] - s[h];
    if !(d0 > 0.0) {
        return None;
    }
    Some(d1 / d0)
}

pub(crate) fn classify_growth(s: &[f64]) -> (Option<f64>, Growth) {
    match doubling_ratio(s) {
        None => (None, Growth::Inconclusive),
        Some(r) => (Some(r), if r >= GREEN_DIVERGENCE_RATIO { Growth::Diverging } else { Growth::Bounded }),
    }
}

/// Partial sums of 𝒢(x,y) = Σ p⁽ⁿ⁾(x,y) by exact mass propagation on the
/// window. Fails if mass could leave the window within N steps.
pub fn green_truncated(_net: &dyn Network, x: VertexId, y: VertexId, window: &Window, n: usize) -> Result<GreenSeries> {
    let xi = window.require(x)?;
    let yi = window.position(y);
    let mut mass = vec![0.0; window.len()];
    let mut next = vec![0.0; window.len()];
    mass[xi] = 1.0;
    let mut active = vec![xi];
    let mut seen = vec![false; window.len()];
    let mut sums = Vec::with_capacity(n + 1);
    let mut acc = if Some(xi) == yi { 1.0 } else { 0.0 };
    sums.push(acc);
    for _ in 0..n {
        let mut touched = Vec::with_capacity(active.len() * 2);
        for &i in &active {
            let m = mass[i];
            if m == 0.0 {
                continue;
            }
            if !window.is_closed(i) {
                return Err(Error::WindowTooSmall { vertex: window.vertex(i), required_radius: Some(n) });
            }
            let c = window.total_conductance(i);
            for &(j, cij, _) in window.neighbors(i) {
                next[j] += m * cij / c;
                if !seen[j] {
                    seen[j] = true;
                    touched.push(j);
                }
            }
        }
        for &i in &active {
            mass[i] = 0.0;
        }
        for &j in &touched {
            mass[j] = next[j];
            next[j] = 0.0;
            seen[j] = false;
        }
        active = touched;
        if let Some(yi) = yi {
            acc += mass[yi];
        }
        sums.push(acc);
    }
    let (increment_ratio, growth) = classify_growth(&sums);
    Ok(GreenSeries { x, y, partial_sums: sums, increment_ratio, growth })
}

/// One identity `lhs ≈ rhs` with its combined standard error.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub sigma: f64,
    pub z: f64,
    pub pass: bool,
}

impl IdentityCheck {
    pub(crate) fn new(name: &str, lhs: f64, rhs: f64, sigma: f64, gate: f64) -> Self {
        let d = (lhs - rhs).abs();
        let z = if d == 0.0 {
            0.0
        } else if sigma > 0.0 {
            d / sigma
        } else {
            f64::INFINITY
        };
        IdentityCheck { name: name.to_string(), lhs, rhs, sigma, z, pass: z <= gate }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenIdentitiesReport {
    pub x: VertexId,
    pub y: VertexId,
    pub checks: Vec<IdentityCheck>,
}

impl GreenIdentitiesReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the Green/F/U relations with independent Monte-Carlo estimates
/// at a 3σ gate:
/// - `G(x,y)=F(x,y)G(y,y)`
/// - `G(x,x)(1-U(x,x))=1`
/// - `c(x)F(x,y)=c(y)F(y,x)` (holds only when 𝒢(x,x) = 𝒢(y,y))
/// - `c(x)G(x,y)=c(y)G(y,x)`
/// - `c(x)F(x,y)G(y,y)=c(y)F(y,x)G(x,x)`, the general form of the previous line
pub fn green_identities_report(net: &dyn Network, x: VertexId, y: VertexId, params: &McParams) -> Result<GreenIdentitiesReport> {
    let gate = 3.0;
    let cx = crate::network::total_conductance(net, x)?;
    let gxx = estimate_green_visits(net, x, x, params)?;
    let u = estimate_u(net, x, params)?.direct;
    let mut checks = Vec::new();
    let one_minus_u = 1.0 - u.point;
    checks.push(IdentityCheck::new("G(x,x)(1-U(x,x))=1", gxx.point * one_minus_u, 1.0, (one_minus_u * gxx.stderr).hypot(gxx.point * u.stderr), gate));
    if x != y {
        let cy = crate::network::total_conductance(net, y)?;
        let gyy = estimate_green_visits(net, y, y, params)?;
        let gxy = estimate_green_visits(net, x, y, params)?;
        let gyx = estimate_green_visits(net, y, x, params)?;
        let fxy = estimate_f(net, x, y, params)?;
        let fyx = estimate_f(net, y, x, params)?;
        checks.push(IdentityCheck::new(
            "G(x,y)=F(x,y)G(y,y)",
            gxy.point,
            fxy.point * gyy.point,
            (gxy.stderr.powi(2) + (gyy.point * fxy.stderr).powi(2) + (fxy.point * gyy.stderr).powi(2)).sqrt(),
            gate,
        ));
        checks.push(IdentityCheck::new("c(x)F(x,y)=c(y)F(y,x)", cx * fxy.point, cy * fyx.point, (cx * fxy.stderr).hypot(cy * fyx.stderr), gate));
        checks.push(IdentityCheck::new("c(x)G(x,y)=c(y)G(y,x)", cx * gxy.point, cy * gyx.point, (cx * gxy.stderr).hypot(cy * gyx.stderr), gate));
        let l = cx * fxy.point * gyy.point;
        let r = cy * fyx.point * gxx.point;
        let sl = cx * (fxy.stderr * gyy.point).hypot(fxy.point * gyy.stderr);
        let sr = cy * (fyx.stderr * gxx.point).hypot(fyx.point * gxx.stderr);
        checks.push(IdentityCheck::new("c(x)F(x,y)G(y,y)=c(y)F(y,x)G(x,x)", l, r, sl.hypot(sr), gate));
    }
    Ok(GreenIdentitiesReport { x, y, checks })
}
