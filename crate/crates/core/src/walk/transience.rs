use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{try_materialize_ball, Network, VertexId};
use crate::potential::{monopole, monopole_trend, Exhaustion, RadiusEnergy, Verdict};

use super::engine::{McParams, WalkEstimate};
use super::estimates::return_profile;
use super::green::{green_truncated, Growth};

/// U(x,x) at or above this reads as recurrent.
pub const U_RECURRENT: f64 = 0.95;
/// Largest rise of U between horizon/10 and horizon still read as settled.
pub const U_SETTLED_RISE: f64 = 0.02;

const GREEN_RADII: [usize; 4] = [64, 32, 16, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Transient,
    Recurrent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransienceEvidence {
    pub u_profile: Vec<WalkEstimate>,
    pub u_vote: Classification,
    pub green_steps: Option<usize>,
    pub green_partial_sum: Option<f64>,
    pub green_increment_ratio: Option<f64>,
    pub green_vote: Classification,
    pub monopole_energies: Vec<RadiusEnergy>,
    pub monopole_vote: Classification,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransienceReport {
    pub vertex: VertexId,
    pub classification: Classification,
    pub evidence: TransienceEvidence,
}

pub(crate) fn u_vote(profile: &[WalkEstimate]) -> Classification {
    let (early, last) = (&profile[0], profile.last().unwrap());
    if last.point >= U_RECURRENT {
        Classification::Recurrent
    } else if last.point + 3.0 * last.stderr < 1.0 && last.point - early.point < U_SETTLED_RISE {
        Classification::Transient
    } else {
        Classification::Inconclusive
    }
}

pub(crate) fn majority(votes: &[Classification]) -> Classification {
    let t = votes.iter().filter(|v| **v == Classification::Transient).count();
    let r = votes.iter().filter(|v| **v == Classification::Recurrent).count();
    if t >= 2 && t > r {
        Classification::Transient
    } else if r >= 2 && r > t {
        Classification::Recurrent
    } else {
        Classification::Inconclusive
    }
}

/// Heuristic classification by majority of three votes: the return
/// probability over growing horizons, the growth of truncated Green sums,
/// and the trend of grounded monopole energies.
pub fn transience_test(net: &dyn Network, x: VertexId, params: &McParams) -> Result<TransienceReport> {
    let h = params.horizon;
    let horizons: Vec<u64> = [h / 100, h / 10, h].into_iter().filter(|&k| k > 0).collect();
    let u_profile = return_profile(net, x, &horizons, params)?;
    let uv = u_vote(&u_profile[u_profile.len().saturating_sub(2)..]);

    let ex = Exhaustion::default().rooted(x);
    let mut green = None;
    for &n in &GREEN_RADII {
        match try_materialize_ball(net, x, n, ex.max_vertices) {
            Ok(w) => {
                green = Some(green_truncated(net, x, x, &w, n)?);
                break;
            }
            Err(Error::InvalidInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let green_vote = match green.as_ref().map(|g| g.growth) {
        Some(Growth::Bounded) => Classification::Transient,
        Some(Growth::Diverging) => Classification::Recurrent,
        _ => Classification::Inconclusive,
    };

    let mono = monopole(net, x, &ex)?;
    let monopole_vote = match mono.verdict {
        Verdict::RecurrentConsistent => Classification::Recurrent,
        Verdict::TransientConsistent | Verdict::Converged => Classification::Transient,
        _ => match monopole_trend(&mono.energy_by_radius) {
            Verdict::RecurrentConsistent => Classification::Recurrent,
            Verdict::TransientConsistent => Classification::Transient,
            _ => Classification::Inconclusive,
        },
    };

    let classification = majority(&[uv, green_vote, monopole_vote]);
    Ok(TransienceReport {
        vertex: x,
        classification,
        evidence: TransienceEvidence {
            u_profile,
            u_vote: uv,
            green_steps: green.as_ref().map(|g| g.partial_sums.len() - 1),
            green_partial_sum: green.as_ref().map(|g| g.last()),
            green_increment_ratio: green.as_ref().and_then(|g| g.increment_ratio),
            green_vote,
            monopole_energies: mono.energy_by_radius,
            monopole_vote,
        },
    })
}
