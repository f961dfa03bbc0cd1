use serde::{Deserialize, Serialize};

use crate::bratteli::{arrow_matrices, level_harmonic_residuals, DiagramNetwork, LevelFunction};
use crate::error::{invalid, Result};
use crate::network::VertexId;

use super::engine::{mean_estimate, run_batches, run_until, tag, McParams, Outcome, Stepper, WalkEstimate};

/// Which consistency between levels the input must satisfy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compatibility {
    /// f is harmonic on the interior levels of the range.
    #[default]
    Harmonic,
    /// P̄_n f_{n+1} = f_n on the range.
    LeftArrow,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelHittingReport {
    pub x: VertexId,
    /// (n, estimate of h_n(x) = E_x f_n(X_τ(V_n))).
    pub estimates: Vec<(usize, WalkEstimate)>,
    /// First n after which consecutive estimates agree within 3σ.
    pub stabilization_index: Option<usize>,
    /// (n, residual of the compatibility condition).
    pub compatibility_residuals: Vec<(usize, f64)>,
}

/// Estimates h_n(x) for n in `levels`. Walks that never reach V_n (the
/// horizon, or leaving the materialized depth) contribute 0.
pub fn level_hitting_sequence(
    net: &DiagramNetwork,
    f: &LevelFunction,
    x: VertexId,
    levels: std::ops::RangeInclusive<usize>,
    params: &McParams,
    compat: Compatibility,
    tol: f64,
) -> Result<LevelHittingReport> {
    let d = net.diagram();
    f.check(d)?;
    let (lo, hi) = (*levels.start(), *levels.end());
    if lo > hi || lo < f.start || hi > f.end() || hi > d.depth() {
        return Err(invalid(format!("level range {lo}..={hi} is not covered by f and the diagram")));
    }
    let (xl, xi) = x.as_pair().ok_or_else(|| invalid("diagram vertices are (level, index) pairs"))?;
    let compatibility_residuals: Vec<(usize, f64)> = match compat {
        Compatibility::Harmonic => level_harmonic_residuals(d, f)?.into_iter().filter(|(n, _)| *n > lo && *n < hi).collect(),
        Compatibility::LeftArrow => (lo..hi)
            .map(|n| {
                let ar = arrow_matrices(d, n)?;
                let r = &ar.left * f.vector(n + 1)? - f.vector(n)?;
                Ok((n, r.amax()))
            })
            .collect::<Result<_>>()?,
    };
    if let Some((n, r)) = compatibility_residuals.iter().find(|(_, r)| *r > tol) {
        return Err(invalid(format!("compatibility residual {r} at level {n} exceeds {tol}")));
    }
    let mut estimates = Vec::new();
    for n in lo..=hi {
        let fnv = f.level(n)?;
        if xl as usize == n {
            let v = fnv[xi as usize];
            estimates.push((
                n,
                WalkEstimate {
                    quantity: format!("h_{n}({x})"),
                    point: v,
                    stderr: 0.0,
                    samples: params.samples,
                    horizon: params.horizon,
                    censored: 0.0,
                    seed: params.seed,
                },
            ));
            continue;
        }
        let target = move |v: VertexId| v.as_pair().map(|(l, _)| l as usize == n).unwrap_or(false);
        let parts = run_batches(params, tag(&format!("h_{n}({x})")), |rng, count| {
            let mut st = Stepper::new(net);
            let (mut s, mut s2, mut c) = (0.0, 0.0, 0u64);
            for _ in 0..count {
                match run_until(&mut st, rng, x, params.horizon, 0, &target)? {
                    Outcome::Hit { at, .. } => {
                        let v = fnv[at.as_pair().unwrap().1 as usize];
                        s += v;
                        s2 += v * v;
                    }
                    _ => c += 1,
                }
            }
            Ok((s, s2, c))
        })?;
        let (s, s2, c) = parts.iter().fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        estimates.push((n, mean_estimate(s, s2, params.samples, c, format!("h_{n}({x})"), params)));
    }
    let agree = |a: &WalkEstimate, b: &WalkEstimate| (a.point - b.point).abs() <= 3.0 * a.stderr.hypot(b.stderr) + 1e-12;
    let k = estimates.len();
    let mut stabilization_index = None;
    for i in (0..k.saturating_sub(1)).rev() {
        if agree(&estimates[i].1, &estimates[i + 1].1) {
            stabilization_index = Some(estimates[i].0);
        } else {
            break;
        }
    }
    Ok(LevelHittingReport { x, estimates, stabilization_index, compatibility_residuals })
}
