use serde::Serialize;

use crate::error::{invalid, Result};

use super::diagram::{BratteliDiagram, LevelFunction};

/// Doubling-increment ratio of Σ (β_n|V_n|)⁻¹ at or above which the series
/// is read as divergent.
pub const SERIES_DIVERGENCE_RATIO: f64 = 0.85;

fn val(f: &LevelFunction, n: usize, i: usize) -> Result<f64> {
    Ok(f.level(n)?[i])
}

/// Δf at every vertex of V_n; f must cover the neighboring levels.
fn level_laplacian(d: &BratteliDiagram, f: &LevelFunction, n: usize) -> Result<Vec<f64>> {
    let fx = f.level(n)?;
    let mut out = Vec::with_capacity(fx.len());
    for (x, &v) in fx.iter().enumerate() {
        let mut s = 0.0;
        for (z, c) in d.children(n, x) {
            s += c * (v - val(f, n + 1, z)?);
        }
        if n > 0 {
            for (y, c) in d.parents(n - 1, x) {
                s += c * (v - val(f, n - 1, y)?);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// (n, max_x |Δf(x)|) for every level whose neighbors f covers.
pub fn level_harmonic_residuals(d: &BratteliDiagram, f: &LevelFunction) -> Result<Vec<(usize, f64)>> {
    f.check(d)?;
    let first = if f.start == 0 { 0 } else { f.start + 1 };
    let last = f.end().min(d.depth());
    (first..last).map(|n| Ok((n, level_laplacian(d, f, n)?.iter().map(|v| v.abs()).fold(0.0, f64::max)))).collect()
}

fn scale(d: &BratteliDiagram, f: &LevelFunction) -> f64 {
    let fmax = f.levels.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let cmax = (0..f.end().min(d.depth())).filter_map(|n| d.beta(n).ok()).fold(0.0, f64::max);
    (fmax * cmax).max(1.0)
}

fn require_harmonic(d: &BratteliDiagram, f: &LevelFunction, from: usize, to: usize) -> Result<()> {
    let tol = 1e-9 * scale(d, f);
    for (n, r) in level_harmonic_residuals(d, f)? {
        if n >= from && n <= to && r > tol {
            return Err(invalid(format!("function is not harmonic at level {n}: max |Δf| = {r}")));
        }
    }
    Ok(())
}

/// Incoming and outgoing currents on V_n.
#[derive(Clone, Debug, Serialize)]
pub struct Currents {
    pub n: usize,
    /// I_in(x) = Σ_{y∈V_{n−1}} c_xy (f(x) − f(y)).
    pub incoming: Vec<f64>,
    /// I_out(x) = Σ_{z∈V_{n+1}} c_xz (f(z) − f(x)).
    pub outgoing: Vec<f64>,
    /// I_in − I_out = Δf(x).
    pub imbalance: Vec<f64>,
    /// I_n = Σ_x I_in(x).
    pub total: f64,
}

pub fn currents(d: &BratteliDiagram, f: &LevelFunction, n: usize) -> Result<Currents> {
    if n == 0 || n >= d.depth() {
        return Err(invalid(format!("currents need 1 ≤ n < {}", d.depth())));
    }
    let fx = f.level(n)?;
    let mut incoming = vec![0.0; fx.len()];
    let mut outgoing = vec![0.0; fx.len()];
    for (x, &v) in fx.iter().enumerate() {
        for (y, c) in d.parents(n - 1, x) {
            incoming[x] += c * (v - val(f, n - 1, y)?);
        }
        for (z, c) in d.children(n, x) {
            outgoing[x] += c * (val(f, n + 1, z)? - v);
        }
    }
    let imbalance = incoming.iter().zip(&outgoing).map(|(a, b)| a - b).collect();
    let total = crate::numeric::compensated_sum(incoming.iter().copied());
    Ok(Currents { n, incoming, outgoing, imbalance, total })
}

/// Level maxima and minima of a harmonic function.
#[derive(Clone, Debug, Serialize)]
pub struct LevelExtrema {
    pub levels: Vec<usize>,
    /// M_n = max over V_n.
    pub max: Vec<f64>,
    /// m_n = min over V_n.
    pub min: Vec<f64>,
    pub strictly_increasing: bool,
    pub strictly_decreasing: bool,
    /// max/min over levels 0..=n are attained on V_n.
    pub attained_on_last_level: bool,
    /// f(x) − f(y) ≤ M_n − m_n for all x, y in levels 0..=n.
    pub oscillation_bound_holds: bool,
    /// Both sequences look bounded (shrinking increments).
    pub bounded_consistent: bool,
}

/// Extrema on levels `from..=to`; f must be harmonic at every level it
/// covers (including the root) and nonconstant.
pub fn level_extrema(d: &BratteliDiagram, f: &LevelFunction, from: usize, to: usize) -> Result<LevelExtrema> {
    if from > to || to > f.end() || from < f.start {
        return Err(invalid(format!("level range {from}..={to} not covered by the function")));
    }
    if f.start != 0 {
        return Err(invalid("extrema need the function from the root level"));
    }
    require_harmonic(d, f, 0, usize::MAX)?;
    let all: Vec<f64> = f.levels.iter().flatten().copied().collect();
    if all.iter().all(|&v| v == all[0]) {
        return Err(invalid("extrema need a nonconstant function"));
    }
    let lmax = |n: usize| f.levels[n].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lmin = |n: usize| f.levels[n].iter().cloned().fold(f64::INFINITY, f64::min);
    let levels: Vec<usize> = (from..=to).collect();
    let max: Vec<f64> = levels.iter().map(|&n| lmax(n)).collect();
    let min: Vec<f64> = levels.iter().map(|&n| lmin(n)).collect();
    let mut attained = true;
    let mut osc = true;
    let (mut gmax, mut gmin) = (f64::NEG_INFINITY, f64::INFINITY);
    for n in 0..=to {
        gmax = gmax.max(lmax(n));
        gmin = gmin.min(lmin(n));
        if n >= from && n >= 1 {
            attained &= gmax == lmax(n) && gmin == lmin(n);
            osc &= gmax - gmin <= lmax(n) - lmin(n);
        }
    }
    let inc = max.windows(2).all(|w| w[1] > w[0]);
    let dec = min.windows(2).all(|w| w[1] < w[0]);
    let shrinking = |s: &[f64]| {
        let k = s.len();
        k >= 3 && {
            let (a, b) = ((s[k - 2] - s[k - 3]).abs(), (s[k - 1] - s[k - 2]).abs());
            a > 0.0 && b / a < 0.9
        }
    };
    Ok(LevelExtrema {
        bounded_consistent: shrinking(&max) && shrinking(&min),
        levels,
        max,
        min,
        strictly_increasing: inc,
        strictly_decreasing: dec,
        attained_on_last_level: attained,
        oscillation_bound_holds: osc,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyVerdict {
    /// Σ (β_n|V_n|)⁻¹ diverges and I₁ ≠ 0.
    InfiniteEnergy,
    /// The bound stays finite; it decides nothing.
    Inconclusive,
    /// I₁ = 0 makes the bound zero.
    Vacuous,
}

/// Σ_{n≤N} I₁²/(β_n|V_n|) against the measured energy of edges up to
/// levels N → N+1.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyBound {
    pub i1: f64,
    /// I₁²/(β_n|V_n|) for n = 0..=N.
    pub terms: Vec<f64>,
    pub partial_bounds: Vec<f64>,
    /// Energy of the edges between levels n and n+1, summed over n ≤ N.
    pub partial_energies: Vec<f64>,
    /// Σ (β_n|V_n|)⁻¹ partial sums.
    pub series: Vec<f64>,
    pub series_ratio: Option<f64>,
    pub verdict: EnergyVerdict,
}

impl EnergyBound {
    pub fn bound_holds(&self) -> bool {
        self.partial_bounds.iter().zip(&self.partial_energies).all(|(b, e)| *b <= *e * (1.0 + 1e-12) + 1e-300)
    }
}

/// f must cover levels 0..=N+1 and be harmonic on levels 1..=N.
pub fn energy_lower_bound(d: &BratteliDiagram, f: &LevelFunction, big_n: usize) -> Result<EnergyBound> {
    if f.start != 0 || f.end() < big_n + 1 || big_n + 1 > d.depth() {
        return Err(invalid(format!("energy bound to N = {big_n} needs f on levels 0..={} inside the diagram", big_n + 1)));
    }
    require_harmonic(d, f, 1, big_n)?;
    let f0 = f.level(0)?;
    let mut i1 = 0.0;
    for (o, &fo) in f0.iter().enumerate() {
        for (x, c) in d.children(0, o) {
            i1 += c * (val(f, 1, x)? - fo);
        }
    }
    let (mut terms, mut partial_bounds, mut partial_energies, mut series) = (vec![], vec![], vec![], vec![]);
    let (mut b, mut e, mut s) = (0.0, 0.0, 0.0);
    for n in 0..=big_n {
        let w = d.beta(n)? * d.level_size(n) as f64;
        let t = i1 * i1 / w;
        terms.push(t);
        b += t;
        s += 1.0 / w;
        let fx = f.level(n)?;
        for (x, &v) in fx.iter().enumerate() {
            for (z, c) in d.children(n, x) {
                e += c * (val(f, n + 1, z)? - v).powi(2);
            }
        }
        partial_bounds.push(b);
        partial_energies.push(e);
        series.push(s);
    }
    let series_ratio = crate::walk::doubling_ratio(&series);
    let verdict = if i1 == 0.0 {
        EnergyVerdict::Vacuous
    } else if series_ratio.map(|r| r >= SERIES_DIVERGENCE_RATIO).unwrap_or(false) {
        EnergyVerdict::InfiniteEnergy
    } else {
        EnergyVerdict::Inconclusive
    };
    Ok(EnergyBound { i1, terms, partial_bounds, partial_energies, series, series_ratio, verdict })
}
