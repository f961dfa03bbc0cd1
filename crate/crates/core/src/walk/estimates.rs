use serde::Serialize;

use crate::error::{invalid, Result};
use crate::network::{total_conductance, Network, VertexId};

use super::engine::{mean_estimate, run_batches, run_until, tag, McParams, Outcome, Stepper, Tally, WalkEstimate};

/// F(x,y): probability that the walk from x ever reaches y (time ≥ 1),
/// capped at the horizon. Censoring biases the estimate downward.
pub fn estimate_f(net: &dyn Network, x: VertexId, y: VertexId, params: &McParams) -> Result<WalkEstimate> {
    if x == y {
        return Err(invalid("estimate_f needs x ≠ y; use estimate_u for returns"));
    }
    hit_probability(net, x, y, params, &format!("F({x},{y})"))
}

fn hit_probability(net: &dyn Network, x: VertexId, y: VertexId, params: &McParams, label: &str) -> Result<WalkEstimate> {
    net.neighbors(x)?;
    let target = move |v: VertexId| v == y;
    let parts = run_batches(params, tag(label), |rng, count| {
        let mut st = Stepper::new(net);
        let mut t = Tally::default();
        for _ in 0..count {
            match run_until(&mut st, rng, x, params.horizon, 1, &target)? {
                Outcome::Hit { .. } => t.hits += 1,
                Outcome::Censored | Outcome::Escaped => t.censored += 1,
            }
            t.total += 1;
        }
        Ok(t)
    })?;
    Ok(Tally::merge(&parts).estimate(label.to_string(), params))
}

/// Return probability U(x,x) estimated two ways.
#[derive(Clone, Debug, Serialize)]
pub struct UEstimate {
    /// Fraction of walks with T(x) ≤ horizon, T(x) ≥ 1.
    pub direct: WalkEstimate,
    /// Σ_y p(x,y) F̂(y,x) with independent F̂ per neighbor.
    pub via_identity: WalkEstimate,
}

pub fn estimate_u(net: &dyn Network, x: VertexId, params: &McParams) -> Result<UEstimate> {
    let direct = hit_probability(net, x, x, params, &format!("U({x},{x})"))?;
    let nb = net.neighbors(x)?;
    let c = total_conductance(net, x)?;
    let (mut point, mut var, mut cens) = (0.0, 0.0, 0.0);
    for &(y, cxy) in &nb {
        let p = cxy / c;
        let f = hit_probability(net, y, x, params, &format!("F({y},{x})|U"))?;
        point += p * f.point;
        var += p * p * f.stderr * f.stderr;
        cens += p * f.censored;
    }
    let via_identity = WalkEstimate {
        quantity: format!("U({x},{x}) via sum p F"),
        point,
        stderr: var.sqrt(),
        samples: params.samples * nb.len() as u64,
        horizon: params.horizon,
        censored: cens,
        seed: params.seed,
    };
    Ok(UEstimate { direct, via_identity })
}

/// U(x,x) at several horizons from one pass that records return times.
pub fn return_profile(net: &dyn Network, x: VertexId, horizons: &[u64], params: &McParams) -> Result<Vec<WalkEstimate>> {
    let hmax = *horizons.iter().max().ok_or_else(|| invalid("no horizons"))?;
    let mut p = params.clone();
    p.horizon = hmax;
    let target = move |v: VertexId| v == x;
    let parts = run_batches(&p, tag(&format!("U-profile({x})")), |rng, count| {
        let mut st = Stepper::new(net);
        let mut times = Vec::with_capacity(count as usize);
        for _ in 0..count {
            times.push(match run_until(&mut st, rng, x, hmax, 1, &target)? {
                Outcome::Hit { steps, .. } => Some(steps),
                _ => None,
            });
        }
        Ok(times)
    })?;
    let all: Vec<Option<u64>> = parts.into_iter().flatten().collect();
    Ok(horizons
        .iter()
        .map(|&h| {
            let hits = all.iter().filter(|t| matches!(t, Some(s) if *s <= h)).count() as u64;
            let tally = Tally { hits, censored: all.len() as u64 - hits, total: all.len() as u64 };
            let mut e = tally.estimate(format!("U({x},{x})"), &p);
            e.horizon = h;
            e
        })
        .collect())
}

/// 𝒢(x,y) as the mean number of visits to y at times 0..=horizon.
pub fn estimate_green_visits(net: &dyn Network, x: VertexId, y: VertexId, params: &McParams) -> Result<WalkEstimate> {
    net.neighbors(x)?;
    let parts = run_batches(params, tag(&format!("G({x},{y})")), |rng, count| {
        let mut st = Stepper::new(net);
        let (mut s, mut s2, mut cens) = (0.0, 0.0, 0u64);
        for _ in 0..count {
            let mut v = if x == y { 1.0 } else { 0.0 };
            let mut cur = x;
            let mut escaped = false;
            for _ in 0..params.horizon {
                match st.step(cur, rng)? {
                    Some(n) => cur = n,
                    None => {
                        escaped = true;
                        break;
                    }
                }
                if cur == y {
                    v += 1.0;
                }
            }
            if !escaped {
                cens += 1;
            }
            s += v;
            s2 += v * v;
        }
        Ok((s, s2, cens))
    })?;
    let (s, s2, c) = parts.iter().fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    // walks that run to the horizon may still visit y later
    Ok(mean_estimate(s, s2, params.samples, c, format!("G({x},{y})"), params))
}
