use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::network::{Network, VertexId};

/// Monte-Carlo parameters.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct McParams {
    pub samples: u64,
    /// Step cap per walk.
    pub horizon: u64,
    pub seed: u64,
    /// Walks per RNG stream. Results depend on it, not on the worker count.
    pub batch_size: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for McParams {
    fn default() -> Self {
        McParams { samples: 100_000, horizon: 10_000, seed: 0, batch_size: 1_000, workers: None }
    }
}

impl McParams {
    pub fn new(samples: u64, horizon: u64, seed: u64) -> Self {
        McParams { samples, horizon, seed, ..McParams::default() }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.horizon == 0 || self.batch_size == 0 {
            return Err(invalid("samples, horizon and batch size must be positive"));
        }
        if self.workers == Some(0) {
            return Err(invalid("worker count must be positive"));
        }
        Ok(())
    }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WalkEstimate {
    pub quantity: String,
    pub point: f64,
    pub stderr: f64,
    pub samples: u64,
    pub horizon: u64,
    /// Fraction of walks stopped by the horizon or by leaving the
    /// representable range before an outcome was decided.
    pub censored: f64,
    pub seed: u64,
}

impl WalkEstimate {
    /// |point − value| in standard errors; infinite if stderr is 0 and they differ.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.point - value).abs();
        if d == 0.0 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            d / self.stderr
        }
    }

    pub fn within(&self, value: f64, sigmas: f64) -> bool {
        self.z_score(value) <= sigmas
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("estimate serializes")
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable tag for a named quantity, so different estimates drawn under one
/// seed use unrelated streams.
pub(crate) fn tag(label: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

pub(crate) fn stream_rng(seed: u64, tag: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(tag)));
    rng.set_stream(stream);
    rng
}

/// Runs `params.samples` replicates in fixed batches, one RNG stream per
/// batch, and returns the per-batch results in batch order.
pub(crate) fn run_batches<A, F>(params: &McParams, tag: u64, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> Result<A> + Sync,
{
    params.validate()?;
    let nb = params.samples.div_ceil(params.batch_size);
    let job = || {
        (0..nb)
            .into_par_iter()
            .map(|b| {
                let count = params.batch_size.min(params.samples - b * params.batch_size);
                let mut rng = stream_rng(params.seed, tag, b);
                f(&mut rng, count)
            })
            .collect::<Result<Vec<A>>>()
    };
    match params.workers {
        None => job(),
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w).build().map_err(|e| Error::Numerical(format!("thread pool: {e}")))?.install(job),
    }
}

/// One step of the walk with kernel p(x,y) = c_xy / c(x).
pub(crate) struct Stepper<'a> {
    net: &'a dyn Network,
    buf: Vec<(VertexId, f64)>,
}

impl<'a> Stepper<'a> {
    pub fn new(net: &'a dyn Network) -> Self {
        Stepper { net, buf: Vec::with_capacity(8) }
    }

    /// `Ok(None)` when the walk leaves the representable range.
    pub fn step<R: Rng>(&mut self, x: VertexId, rng: &mut R) -> Result<Option<VertexId>> {
        match self.net.neighbors_into(x, &mut self.buf) {
            Ok(()) => {}
            Err(Error::OutOfRange { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
        let total: f64 = self.buf.iter().map(|p| p.1).sum();
        if self.buf.is_empty() || !(total > 0.0) {
            return Err(Error::InvalidVertex { vertex: x.to_string(), reason: "isolated vertex".into() });
        }
        let mut u = rng.random::<f64>() * total;
        for &(y, c) in &self.buf {
            if u < c {
                return Ok(Some(y));
            }
            u -= c;
        }
        Ok(Some(self.buf.last().unwrap().0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Outcome {
    Hit {
        at: VertexId,
        steps: u64,
    },
    /// Horizon reached.
    Censored,
    /// Left the representable range.
    Escaped,
}

/// Walks from `start` until a target is met at some time ≥ `min_step`.
pub(crate) fn run_until<R: Rng>(
    stepper: &mut Stepper<'_>,
    rng: &mut R,
    start: VertexId,
    horizon: u64,
    min_step: u64,
    is_target: &dyn Fn(VertexId) -> bool,
) -> Result<Outcome> {
    if min_step == 0 && is_target(start) {
        return Ok(Outcome::Hit { at: start, steps: 0 });
    }
    let mut x = start;
    for t in 1..=horizon {
        match stepper.step(x, rng)? {
            Some(y) => x = y,
            None => return Ok(Outcome::Escaped),
        }
        if is_target(x) {
            return Ok(Outcome::Hit { at: x, steps: t });
        }
    }
    Ok(Outcome::Censored)
}

/// Stop rule for [`sample_path`].
#[derive(Clone, Debug)]
pub enum StopRule {
    Length(u64),
    HitSet(Vec<VertexId>),
    HitSetCapped { targets: Vec<VertexId>, horizon: u64 },
}

/// One trajectory starting at `start`; hit-set rules stop at the first
/// visit to the set at time ≥ 1. An uncapped hit-set rule may not terminate
/// on a transient network.
pub fn sample_path(net: &dyn Network, start: VertexId, stop: &StopRule, seed: u64) -> Result<Vec<VertexId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stepper = Stepper::new(net);
    let (targets, cap): (&[VertexId], u64) = match stop {
        StopRule::Length(n) => (&[], *n),
        StopRule::HitSet(t) => (t, u64::MAX),
        StopRule::HitSetCapped { targets, horizon } => (targets, *horizon),
    };
    net.neighbors(start)?;
    let mut path = vec![start];
    let mut x = start;
    let mut t = 0u64;
    while t < cap {
        match stepper.step(x, &mut rng)? {
            Some(y) => x = y,
            None => break,
        }
        path.push(x);
        t += 1;
        if !targets.is_empty() && targets.contains(&x) {
            break;
        }
    }
    Ok(path)
}

/// Bernoulli summary: (hits, decided-not-hit, censored) counts.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Tally {
    pub hits: u64,
    pub censored: u64,
    pub total: u64,
}

impl Tally {
    pub fn merge(parts: &[Tally]) -> Tally {
        parts.iter().fold(Tally::default(), |a, b| Tally { hits: a.hits + b.hits, censored: a.censored + b.censored, total: a.total + b.total })
    }

    pub fn estimate(&self, quantity: String, params: &McParams) -> WalkEstimate {
        let n = self.total as f64;
        let p = self.hits as f64 / n;
        WalkEstimate {
            quantity,
            point: p,
            stderr: (p * (1.0 - p) / n).sqrt(),
            samples: self.total,
            horizon: params.horizon,
            censored: self.censored as f64 / n,
            seed: params.seed,
        }
    }
}

/// Mean and standard error of a sample given its sum and sum of squares.
pub(crate) fn mean_estimate(sum: f64, sum_sq: f64, n: u64, censored: u64, quantity: String, params: &McParams) -> WalkEstimate {
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 { ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
    WalkEstimate { quantity, point: mean, stderr: (var / nf).sqrt(), samples: n, horizon: params.horizon, censored: censored as f64 / nf, seed: params.seed }
}
