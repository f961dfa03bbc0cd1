//! Transfer operators between weighted level spaces of a Bratteli diagram.
//!
//! A row-stochastic R_n on the edges E_n and a positive q⁽⁰⁾ generate level
//! weights q⁽ⁿ⁾, dual matrices S_n and an induced network whose total
//! conductance at v is q⁽ⁿ⁾_v.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bratteli::{BratteliDiagram, LevelFunction};
use crate::error::{invalid, Result};
use crate::linalg::CsrMatrix;
use crate::numeric::compensated_sum;
use crate::walk::Growth;

/// Tolerance for the row sums of R_n.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// q⁽ⁿ⁺¹⁾_v = Σ_w q⁽ⁿ⁾_w r⁽ⁿ⁾_wv for n < R.len().
pub fn propagate_q(q0: &[f64], r: &[CsrMatrix]) -> Result<Vec<Vec<f64>>> {
    if q0.is_empty() || q0.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(invalid("q⁽⁰⁾ must be nonempty and strictly positive"));
    }
    let mut q = vec![q0.to_vec()];
    for (n, rn) in r.iter().enumerate() {
        if rn.nrows() != q[n].len() {
            return Err(invalid(format!("R_{n} has {} rows but level {n} has {} vertices", rn.nrows(), q[n].len())));
        }
        for (w, s) in rn.row_sums().into_iter().enumerate() {
            if (s - 1.0).abs() > STOCHASTIC_TOL || rn.row(w).any(|(_, x)| !(x > 0.0)) {
                return Err(invalid(format!("R_{n} row {w} is not a positive stochastic row (sum {s})")));
            }
        }
        let next = rn.vecmat(&q[n]);
        if let Some(v) = next.iter().position(|&x| x <= 0.0) {
            return Err(invalid(format!("R_{n} has a zero column at vertex {v} of level {}", n + 1)));
        }
        q.push(next);
    }
    Ok(q)
}

/// s⁽ⁿ⁾_vw = q⁽ⁿ⁾_w r⁽ⁿ⁾_wv / q⁽ⁿ⁺¹⁾_v; S_n is |V_{n+1}| × |V_n|.
pub fn dual_matrices(q: &[Vec<f64>], r: &[CsrMatrix]) -> Vec<CsrMatrix> {
    r.iter()
        .enumerate()
        .map(|(n, rn)| {
            let trip: Vec<(usize, usize, f64)> = rn.triplets().into_iter().map(|(w, v, x)| (v, w, q[n][w] * x / q[n + 1][v])).collect();
            CsrMatrix::from_triplets(rn.ncols(), rn.nrows(), &trip)
        })
        .collect()
}

/// Weighted ℓ² space on one level: ⟨φ,ψ⟩ = Σ φψ q⁽ⁿ⁾.
#[derive(Clone, Debug)]
pub struct WeightedLevelSpace<'a> {
    pub n: usize,
    pub weights: &'a [f64],
}

impl WeightedLevelSpace<'_> {
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        compensated_sum(a.iter().zip(b).zip(self.weights).map(|((x, y), q)| x * y * q))
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// T_{R_n}: H_{n+1} → H_n
    R,
    /// T_{S_n}: H_n → H_{n+1}
    S,
}

/// q⁽⁰⁾, the R_n and everything they determine.
#[derive(Clone, Debug)]
pub struct TransferSystem {
    r: Vec<CsrMatrix>,
    s: Vec<CsrMatrix>,
    q: Vec<Vec<f64>>,
}

/// JSON form: `{ "q0": [...], "R": [[[...], ...], ...] }` with dense R_n.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferSpec {
    pub q0: Vec<f64>,
    #[serde(rename = "R")]
    pub r: Vec<Vec<Vec<f64>>>,
}

impl TransferSystem {
    pub fn new(q0: &[f64], r: Vec<CsrMatrix>) -> Result<Self> {
        for n in 1..r.len() {
            if r[n].nrows() != r[n - 1].ncols() {
                return Err(invalid(format!("R_{} has {} columns but R_{n} has {} rows", n - 1, r[n - 1].ncols(), r[n].nrows())));
            }
        }
        let q = propagate_q(q0, &r)?;
        let s = dual_matrices(&q, &r);
        Ok(TransferSystem { r, s, q })
    }

    pub fn from_spec(spec: &TransferSpec) -> Result<Self> {
        let r = spec
            .r
            .iter()
            .enumerate()
            .map(|(n, m)| {
                let cols = m.first().map(|row| row.len()).unwrap_or(0);
                if m.iter().any(|row| row.len() != cols) {
                    return Err(invalid(format!("R_{n} is ragged")));
                }
                let trip: Vec<(usize, usize, f64)> =
                    m.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().filter(|(_, &x)| x != 0.0).map(move |(j, &x)| (i, j, x))).collect();
                Ok(CsrMatrix::from_triplets(m.len(), cols, &trip))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&spec.q0, r)
    }

    /// R_n proportional to the diagram's forward conductances.
    pub fn from_diagram(d: &BratteliDiagram, q0: &[f64]) -> Result<Self> {
        let r = (0..d.depth())
            .map(|n| {
                let c = d.conductance(n)?;
                let sums = c.row_sums();
                let trip: Vec<_> = c.triplets().into_iter().map(|(i, j, x)| (i, j, x / sums[i])).collect();
                Ok(CsrMatrix::from_triplets(c.nrows(), c.ncols(), &trip))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(q0, r)
    }

    /// Pascal graph with q⁽⁰⁾ = 1 and R rows (½, ½): q⁽ⁿ⁾_i = C(n,i)/2ⁿ.
    pub fn pascal_binomial(depth: usize) -> Result<Self> {
        let r = (0..depth)
            .map(|n| {
                let trip: Vec<_> = (0..=n).flat_map(|i| [(i, i, 0.5), (i, i + 1, 0.5)]).collect();
                CsrMatrix::from_triplets(n + 1, n + 2, &trip)
            })
            .collect();
        Self::new(&[1.0], r)
    }

    /// Number of the last level.
    pub fn depth(&self) -> usize {
        self.r.len()
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.q[n].len()
    }

    pub fn q(&self, n: usize) -> &[f64] {
        &self.q[n]
    }

    pub fn r(&self, n: usize) -> &CsrMatrix {
        &self.r[n]
    }

    pub fn s(&self, n: usize) -> &CsrMatrix {
        &self.s[n]
    }

    pub fn space(&self, n: usize) -> WeightedLevelSpace<'_> {
        WeightedLevelSpace { n, weights: &self.q[n] }
    }

    fn check_level(&self, n: usize, len: usize, what: &str) -> Result<()> {
        if n > self.depth() || len != self.q[n].len() {
            return Err(invalid(format!("{what}: expected a vector on level {n}, got length {len}")));
        }
        Ok(())
    }

    /// T_{R_n} f for f on V_{n+1}, or T_{S_n} f for f on V_n.
    pub fn apply(&self, dir: Direction, n: usize, f: &[f64]) -> Result<Vec<f64>> {
        if n >= self.depth() {
            return Err(invalid(format!("no transfer operator at level {n}; depth is {}", self.depth())));
        }
        match dir {
            Direction::R => {
                self.check_level(n + 1, f.len(), "T_R")?;
                Ok(self.r[n].matvec(f))
            }
            Direction::S => {
                self.check_level(n, f.len(), "T_S")?;
                Ok(self.s[n].matvec(f))
            }
        }
    }

    /// max_v |Σ_w s⁽ⁿ⁾_vw − 1| over all levels.
    pub fn dual_row_sum_error(&self) -> f64 {
        self.s.iter().flat_map(|s| s.row_sums()).map(|x| (x - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest relative change of Σ q⁽ⁿ⁾ from level to level.
    pub fn mass_drift(&self) -> f64 {
        let m0 = compensated_sum(self.q[0].iter().copied());
        self.q.iter().map(|q| (compensated_sum(q.iter().copied()) - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// c⁽ⁿ⁾_vu = ½ q⁽ⁿ⁾_v r⁽ⁿ⁾_vu, with the same edge read from the next
    /// level as ½ q⁽ⁿ⁺¹⁾_u s⁽ⁿ⁾_uv.
    pub fn conductance(&self) -> InducedConductance {
        let forward: Vec<CsrMatrix> = self
            .r
            .iter()
            .enumerate()
            .map(|(n, r)| {
                let trip: Vec<_> = r.triplets().into_iter().map(|(v, u, x)| (v, u, 0.5 * self.q[n][v] * x)).collect();
                CsrMatrix::from_triplets(r.nrows(), r.ncols(), &trip)
            })
            .collect();
        let backward: Vec<CsrMatrix> = self
            .s
            .iter()
            .enumerate()
            .map(|(n, s)| {
                let trip: Vec<_> = s.triplets().into_iter().map(|(u, v, x)| (v, u, 0.5 * self.q[n + 1][u] * x)).collect();
                CsrMatrix::from_triplets(s.ncols(), s.nrows(), &trip)
            })
            .collect();
        let symmetry_error =
            forward.iter().zip(&backward).flat_map(|(f, b)| f.triplets().into_iter().map(move |(v, u, x)| (x - b.get(v, u)).abs())).fold(0.0, f64::max);
        let k = self.depth();
        let totals: Vec<Vec<f64>> = (0..=k)
            .map(|n| {
                let mut t = vec![0.0; self.q[n].len()];
                if n < k {
                    for (v, s) in forward[n].row_sums().into_iter().enumerate() {
                        t[v] += s;
                    }
                }
                if n > 0 {
                    for (v, s) in backward[n - 1].transpose().row_sums().into_iter().enumerate() {
                        t[v] += s;
                    }
                }
                t
            })
            .collect();
        let total_error = (1..k).flat_map(|n| totals[n].iter().zip(&self.q[n]).map(|(t, q)| (t - q).abs() / q)).fold(0.0, f64::max);
        InducedConductance { forward, backward, totals, symmetry_error, total_error }
    }

    /// The induced network as a diagram.
    pub fn induced_diagram(&self) -> Arc<BratteliDiagram> {
        let sizes = self.q.iter().map(|q| q.len()).collect();
        Arc::new(BratteliDiagram::from_conductances("transfer_induced", sizes, self.conductance().forward, 0))
    }

    /// Transition kernel of the induced network: ½R_n forward and ½S_{n−1}
    /// backward on levels 1..K−1; on level 0 the forward rows are R_0.
    pub fn kernel(&self) -> MarkovKernel {
        let forward = self
            .r
            .iter()
            .enumerate()
            .map(|(n, r)| {
                let scale = if n == 0 { 1.0 } else { 0.5 };
                let trip: Vec<_> = r.triplets().into_iter().map(|(v, u, x)| (v, u, scale * x)).collect();
                CsrMatrix::from_triplets(r.nrows(), r.ncols(), &trip)
            })
            .collect();
        let backward = self
            .s
            .iter()
            .map(|s| {
                let trip: Vec<_> = s.triplets().into_iter().map(|(v, w, x)| (v, w, 0.5 * x)).collect();
                CsrMatrix::from_triplets(s.nrows(), s.ncols(), &trip)
            })
            .collect();
        MarkovKernel { forward, backward }
    }

    /// max over levels 1 ≤ n < K of |q⁽ⁿ⁾M − ½(q⁽ⁿ⁺¹⁾ + q⁽ⁿ⁻¹⁾)|.
    pub fn q_identity_error(&self) -> f64 {
        let m = self.kernel();
        let mut err = 0.0f64;
        for n in 1..self.depth() {
            let up = m.forward[n].vecmat(&self.q[n]);
            let down = m.backward[n - 1].vecmat(&self.q[n]);
            for (a, b) in up.iter().zip(&self.q[n + 1]) {
                err = err.max((a - 0.5 * b).abs());
            }
            for (a, b) in down.iter().zip(&self.q[n - 1]) {
                err = err.max((a - 0.5 * b).abs());
            }
        }
        err
    }

    /// max |c(v)m(v,u) − c(u)m(u,v)| with the induced totals c.
    pub fn reversibility_error(&self) -> f64 {
        let m = self.kernel();
        let c = self.conductance().totals;
        let mut err = 0.0f64;
        for n in 0..self.depth() {
            if n + 1 == self.depth() {
                break;
            }
            for (v, u, x) in m.forward[n].triplets() {
                let back = m.backward[n].get(u, v);
                err = err.max((c[n][v] * x - c[n + 1][u] * back).abs());
            }
        }
        err
    }

    fn check_function(&self, f: &LevelFunction) -> Result<()> {
        if f.end() > self.depth() {
            return Err(invalid(format!("function reaches level {} beyond depth {}", f.end(), self.depth())));
        }
        for n in f.start..=f.end() {
            self.check_level(n, f.level(n)?.len(), "level function")?;
        }
        Ok(())
    }

    /// Residual 2f_n − R_n f_{n+1} − S_{n−1} f_{n−1} on every level f
    /// covers together with its neighbors; on level 0 the residual is
    /// f_0 − R_0 f_1. In both cases Δf = ½ q⁽ⁿ⁾ · residual pointwise.
    pub fn harmonic_check(&self, f: &LevelFunction) -> Result<Vec<TransferResidual>> {
        self.check_function(f)?;
        let first = if f.start == 0 { 0 } else { f.start + 1 };
        let mut out = Vec::new();
        for n in first..f.end() {
            let fnv = f.level(n)?;
            let up = self.r[n].matvec(f.level(n + 1)?);
            let residual: Vec<f64> = if n == 0 {
                fnv.iter().zip(&up).map(|(a, b)| a - b).collect()
            } else {
                let down = self.s[n - 1].matvec(f.level(n - 1)?);
                fnv.iter().zip(&up).zip(&down).map(|((a, b), c)| 2.0 * a - b - c).collect()
            };
            let norm = self.space(n).norm(&residual);
            out.push(TransferResidual { n, norm, residual });
        }
        Ok(out)
    }

    /// Partial sums of Σ (‖f_n‖² − 2⟨f_n, T_R f_{n+1}⟩ + ‖f_{n+1}‖²) for
    /// n = 0..=N. Each term is twice the energy of the edges E_n.
    pub fn finite_energy_series(&self, f: &LevelFunction, big_n: usize) -> Result<EnergySeries> {
        self.check_function(f)?;
        if f.start != 0 || f.end() < big_n + 1 {
            return Err(invalid(format!("series to N = {big_n} needs f on levels 0..={}", big_n + 1)));
        }
        let mut terms = Vec::with_capacity(big_n + 1);
        for n in 0..=big_n {
            let a = f.level(n)?;
            let b = f.level(n + 1)?;
            let t = self.space(n).inner(a, a) - 2.0 * self.space(n).inner(a, &self.r[n].matvec(b)) + self.space(n + 1).inner(b, b);
            terms.push(t);
        }
        let partial_sums: Vec<f64> = terms
            .iter()
            .scan(0.0, |s, t| {
                *s += t;
                Some(*s)
            })
            .collect();
        let (tail_ratio, growth) = crate::walk::classify_growth(&partial_sums);
        Ok(EnergySeries { terms, partial_sums, tail_ratio, growth })
    }
}

#[derive(Clone, Debug)]
pub struct InducedConductance {
    /// c⁽ⁿ⁾ from ½ q⁽ⁿ⁾ r⁽ⁿ⁾, |V_n| × |V_{n+1}|.
    pub forward: Vec<CsrMatrix>,
    /// The same edges from ½ q⁽ⁿ⁺¹⁾ s⁽ⁿ⁾, |V_n| × |V_{n+1}|.
    pub backward: Vec<CsrMatrix>,
    /// c_n(v) from the induced edges.
    pub totals: Vec<Vec<f64>>,
    pub symmetry_error: f64,
    /// max relative |c_n(v) − q⁽ⁿ⁾_v| over levels 1..K−1. Level 0 only has
    /// its forward half, so c_0 = ½ q⁽⁰⁾ there.
    pub total_error: f64,
}

#[derive(Clone, Debug)]
pub struct MarkovKernel {
    /// m(v,u) for v ∈ V_n, u ∈ V_{n+1}.
    pub forward: Vec<CsrMatrix>,
    /// m(v,w) for v ∈ V_{n+1}, w ∈ V_n.
    pub backward: Vec<CsrMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferResidual {
    pub n: usize,
    /// Norm in H_n.
    pub norm: f64,
    pub residual: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergySeries {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub tail_ratio: Option<f64>,
    pub growth: Growth,
}

impl EnergySeries {
    /// Energy of the edges up to level N+1: half the series.
    pub fn energies(&self) -> Vec<f64> {
        self.partial_sums.iter().map(|s| 0.5 * s).collect()
    }
}
