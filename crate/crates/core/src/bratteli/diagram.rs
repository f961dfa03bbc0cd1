use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::CsrMatrix;
use crate::network::{Network, VertexId, Window};
use crate::operators::{fmt_f64, VertexFunction};

/// 0-1 (or multi-edge) incidence between consecutive levels, rows indexed
/// by V_n and columns by V_{n+1}.
pub type Incidence = Vec<Vec<u32>>;

/// How edge conductances are assigned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ConductanceRule {
    /// c ≡ 1.
    Unit,
    /// c = λⁿ on every edge of E_n.
    LambdaPowN { lambda: f64 },
    /// C_n given entrywise; the support must equal the incidence support.
    Explicit { matrices: Vec<Vec<Vec<f64>>> },
}

impl ConductanceRule {
    fn value(&self, n: usize, x: usize, y: usize) -> Result<f64> {
        match self {
            ConductanceRule::Unit => Ok(1.0),
            ConductanceRule::LambdaPowN { lambda } => Ok(lambda.powi(n as i32)),
            ConductanceRule::Explicit { matrices } => matrices
                .get(n)
                .and_then(|m| m.get(x))
                .and_then(|r| r.get(y))
                .copied()
                .ok_or_else(|| invalid(format!("explicit conductance missing at level {n} entry ({x},{y})"))),
        }
    }
}

/// Treatment of incidence entries above 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiEdge {
    #[default]
    Reject,
    /// k parallel edges become one edge of k times the rule's conductance.
    MergeParallel,
}

/// A weighted graded graph truncated at a finite depth K: levels
/// V_0..V_K, conductance matrices C_0..C_{K−1}.
#[derive(Clone, Debug)]
pub struct BratteliDiagram {
    name: String,
    sizes: Vec<usize>,
    cond: Vec<CsrMatrix>,
    cond_t: Vec<CsrMatrix>,
    totals: Vec<Vec<f64>>,
    harmonic_from: usize,
}

fn check_shape(incidence: &[Incidence]) -> Result<Vec<usize>> {
    if incidence.is_empty() {
        return Err(invalid("a diagram needs at least one incidence matrix"));
    }
    let mut sizes = Vec::with_capacity(incidence.len() + 1);
    for (n, m) in incidence.iter().enumerate() {
        let rows = m.len();
        let cols = m.first().map(|r| r.len()).unwrap_or(0);
        if rows == 0 || cols == 0 {
            return Err(invalid(format!("incidence matrix {n} is empty")));
        }
        if m.iter().any(|r| r.len() != cols) {
            return Err(invalid(format!("incidence matrix {n} has rows of different lengths")));
        }
        if n == 0 {
            sizes.push(rows);
        } else if sizes[n] != rows {
            return Err(invalid(format!("dimension mismatch: matrix {} has {} columns but matrix {n} has {rows} rows", n - 1, sizes[n])));
        }
        sizes.push(cols);
        for (i, r) in m.iter().enumerate() {
            if r.iter().all(|&a| a == 0) {
                return Err(invalid(format!("incidence matrix {n} has a zero row at {i}")));
            }
        }
        for j in 0..cols {
            if m.iter().all(|r| r[j] == 0) {
                return Err(invalid(format!("incidence matrix {n} has a zero column at {j}")));
            }
        }
    }
    Ok(sizes)
}

/// Validates the incidence matrices and attaches conductances.
pub fn build_diagram(incidence: &[Incidence], rule: &ConductanceRule, multi: MultiEdge) -> Result<BratteliDiagram> {
    if let ConductanceRule::Explicit { matrices } = rule {
        if matrices.len() != incidence.len() {
            return Err(invalid(format!("{} conductance matrices for {} incidence matrices", matrices.len(), incidence.len())));
        }
        for (n, (m, a)) in matrices.iter().zip(incidence).enumerate() {
            if m.len() != a.len() || m.iter().zip(a).any(|(r, s)| r.len() != s.len()) {
                return Err(invalid(format!("conductance matrix {n} does not match the incidence shape")));
            }
            for (x, (r, s)) in m.iter().zip(a).enumerate() {
                for (y, (&v, &k)) in r.iter().zip(s).enumerate() {
                    if (v != 0.0) != (k != 0) {
                        return Err(invalid(format!("conductance support differs from incidence at level {n} ({x},{y})")));
                    }
                }
            }
        }
    }
    build_diagram_with(incidence, multi, |n, x, y| rule.value(n, x, y))
}

/// As [`build_diagram`] with conductances from `c(n, x, y)`, x ∈ V_n, y ∈ V_{n+1}.
pub fn build_diagram_with(incidence: &[Incidence], multi: MultiEdge, c: impl Fn(usize, usize, usize) -> Result<f64>) -> Result<BratteliDiagram> {
    let sizes = check_shape(incidence)?;
    let mut cond = Vec::with_capacity(incidence.len());
    for (n, m) in incidence.iter().enumerate() {
        let mut trip = Vec::new();
        for (x, r) in m.iter().enumerate() {
            for (y, &a) in r.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                if a > 1 && multi == MultiEdge::Reject {
                    return Err(invalid(format!("incidence entry {a} > 1 at level {n} ({x},{y}); subdivide or merge parallel edges first")));
                }
                let v = c(n, x, y)?;
                if !(v > 0.0) || !v.is_finite() {
                    return Err(invalid(format!("conductance {v} at level {n} ({x},{y}) must be positive")));
                }
                trip.push((x, y, v * a as f64));
            }
        }
        cond.push(CsrMatrix::from_triplets(sizes[n], sizes[n + 1], &trip));
    }
    Ok(BratteliDiagram::from_conductances("diagram", sizes, cond, if incidence[0].len() == 1 { 0 } else { 1 }))
}

/// Splits every edge of every level through a new midpoint vertex, which
/// turns multi-edges into distinct paths. Level n of the input becomes
/// level 2n of the output; the midpoint levels hold one vertex per edge.
pub fn subdivide_multi_edges(incidence: &[Incidence]) -> Result<Vec<Incidence>> {
    let sizes = check_shape(incidence)?;
    let mut out = Vec::with_capacity(2 * incidence.len());
    for (n, m) in incidence.iter().enumerate() {
        let edges: Vec<(usize, usize)> =
            m.iter().enumerate().flat_map(|(x, r)| r.iter().enumerate().flat_map(move |(y, &a)| std::iter::repeat_n((x, y), a as usize))).collect();
        let mut down = vec![vec![0u32; edges.len()]; sizes[n]];
        let mut up = vec![vec![0u32; sizes[n + 1]]; edges.len()];
        for (k, &(x, y)) in edges.iter().enumerate() {
            down[x][k] = 1;
            up[k][y] = 1;
        }
        out.push(down);
        out.push(up);
    }
    Ok(out)
}

impl BratteliDiagram {
    pub(crate) fn from_conductances(name: &str, sizes: Vec<usize>, cond: Vec<CsrMatrix>, harmonic_from: usize) -> Self {
        let cond_t: Vec<CsrMatrix> = cond.iter().map(|c| c.transpose()).collect();
        let k = sizes.len() - 1;
        let totals = (0..=k)
            .map(|n| {
                let mut t = vec![0.0; sizes[n]];
                if n < k {
                    for (x, s) in cond[n].row_sums().into_iter().enumerate() {
                        t[x] += s;
                    }
                }
                if n > 0 {
                    for (x, s) in cond_t[n - 1].row_sums().into_iter().enumerate() {
                        t[x] += s;
                    }
                }
                t
            })
            .collect();
        BratteliDiagram { name: name.to_string(), sizes, cond, cond_t, totals, harmonic_from }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// The Pascal graph: |V_n| = n+1, (n,i) joined to (n+1,i) and (n+1,i+1).
    pub fn pascal(depth: usize, rule: &ConductanceRule) -> Result<Self> {
        let inc: Vec<Incidence> = (0..depth).map(|n| (0..=n).map(|i| (0..n + 2).map(|j| (j == i || j == i + 1) as u32).collect()).collect()).collect();
        Ok(build_diagram(&inc, rule, MultiEdge::Reject)?.with_name("pascal"))
    }

    /// Binary tree as a diagram: vertex i of V_n has children 2i, 2i+1;
    /// c = λⁿ on E_n.
    pub fn binary_tree(lambda: f64, depth: usize) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(invalid("tree needs λ > 0"));
        }
        if depth > 24 {
            return Err(invalid("binary tree diagrams are limited to depth 24"));
        }
        let sizes: Vec<usize> = (0..=depth).map(|n| 1usize << n).collect();
        let cond = (0..depth)
            .map(|n| {
                let c = lambda.powi(n as i32);
                let trip: Vec<(usize, usize, f64)> = (0..sizes[n]).flat_map(|i| [(i, 2 * i, c), (i, 2 * i + 1, c)]).collect();
                CsrMatrix::from_triplets(sizes[n], sizes[n + 1], &trip)
            })
            .collect();
        Ok(Self::from_conductances("binary_tree", sizes, cond, 0))
    }

    /// Stationary diagram F_n = A with c = λⁿ on E_n and |V_0| = d.
    /// Multi-edges of A are merged into single edges of multiplied weight.
    pub fn stationary(a: &DMatrix<f64>, lambda: f64, depth: usize) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(invalid("stationary diagram needs λ > 0"));
        }
        let rows: Incidence = (0..a.nrows())
            .map(|i| {
                (0..a.ncols())
                    .map(|j| {
                        let v = a[(i, j)];
                        if v < 0.0 || v.fract() != 0.0 {
                            Err(invalid(format!("stationary incidence entry {v} is not a nonnegative integer")))
                        } else {
                            Ok(v as u32)
                        }
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?;
        if a.nrows() != a.ncols() {
            return Err(invalid("stationary incidence must be square"));
        }
        let inc = vec![rows; depth];
        let rule = ConductanceRule::LambdaPowN { lambda };
        Ok(build_diagram(&inc, &rule, MultiEdge::MergeParallel)?.with_name("stationary"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// K, the last materialized level.
    pub fn depth(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// First level at which harmonicity is imposed: 0 for rooted diagrams,
    /// 1 when V_0 has several vertices (those act as a boundary).
    pub fn harmonic_from(&self) -> usize {
        self.harmonic_from
    }

    /// C_n, |V_n| × |V_{n+1}|.
    pub fn conductance(&self, n: usize) -> Result<&CsrMatrix> {
        self.cond.get(n).ok_or_else(|| self.range_error(n))
    }

    pub fn conductance_dense(&self, n: usize) -> Result<DMatrix<f64>> {
        Ok(self.conductance(n)?.to_dense())
    }

    /// Incidence pattern of C_n.
    pub fn incidence(&self, n: usize) -> Result<Incidence> {
        let c = self.conductance(n)?;
        Ok((0..c.nrows())
            .map(|x| {
                let mut r = vec![0u32; c.ncols()];
                for (y, _) in c.row(x) {
                    r[y] = 1;
                }
                r
            })
            .collect())
    }

    /// c_n(x), complete for levels below K.
    pub fn total(&self, n: usize) -> Result<&[f64]> {
        if n >= self.depth() {
            return Err(self.range_error(n));
        }
        Ok(&self.totals[n])
    }

    /// β_n = max c(x) over V_n.
    pub fn beta(&self, n: usize) -> Result<f64> {
        Ok(self.total(n)?.iter().cloned().fold(0.0, f64::max))
    }

    pub(crate) fn range_error(&self, n: usize) -> Error {
        invalid(format!("level {n} is outside the materialized depth {}", self.depth()))
    }

    pub fn network(self: &Arc<Self>) -> DiagramNetwork {
        DiagramNetwork { d: self.clone() }
    }

    /// Column-wise parent edges: for y ∈ V_{n+1}, (x, c_xy) with x ∈ V_n.
    pub(crate) fn parents(&self, n: usize, y: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cond_t[n].row(y)
    }

    pub(crate) fn children(&self, n: usize, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cond[n].row(x)
    }
}

/// Values f_n on a contiguous run of levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelFunction {
    pub start: usize,
    pub levels: Vec<Vec<f64>>,
}

impl LevelFunction {
    pub fn new(start: usize, levels: Vec<Vec<f64>>) -> Self {
        LevelFunction { start, levels }
    }

    pub fn from_fn(d: &BratteliDiagram, levels: std::ops::RangeInclusive<usize>, f: impl Fn(usize, usize) -> f64) -> Self {
        let start = *levels.start();
        LevelFunction { start, levels: levels.map(|n| (0..d.level_size(n)).map(|i| f(n, i)).collect()).collect() }
    }

    pub fn end(&self) -> usize {
        self.start + self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&[f64]> {
        if n < self.start || n > self.end() {
            return Err(invalid(format!("level {n} not in {}..={}", self.start, self.end())));
        }
        Ok(&self.levels[n - self.start])
    }

    pub fn vector(&self, n: usize) -> Result<DVector<f64>> {
        Ok(DVector::from_column_slice(self.level(n)?))
    }

    pub fn check(&self, d: &BratteliDiagram) -> Result<()> {
        for (k, l) in self.levels.iter().enumerate() {
            let n = self.start + k;
            if n > d.depth() || l.len() != d.level_size(n) {
                return Err(invalid(format!("level {n} vector has length {} but the level has {} vertices", l.len(), d.sizes.get(n).copied().unwrap_or(0))));
            }
        }
        Ok(())
    }

    /// Values on a window of the diagram network; vertices outside the
    /// stored levels get `fill`.
    pub fn on_window(&self, window: &Window, fill: f64) -> VertexFunction {
        VertexFunction::from_fn(window.clone(), |v| match v {
            VertexId::Pair(n, i) => self.level(n as usize).ok().and_then(|l| l.get(i as usize)).copied().unwrap_or(fill),
            _ => fill,
        })
    }

    /// `level,index,value` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,index,value\n");
        for (k, l) in self.levels.iter().enumerate() {
            for (i, v) in l.iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", self.start + k, i, fmt_f64(*v)));
            }
        }
        s
    }
}

/// Neighbor oracle over a diagram: vertex (n, i), 0-based i. Vertices on
/// the last level are out of range since their forward edges are unknown.
#[derive(Clone, Debug)]
pub struct DiagramNetwork {
    d: Arc<BratteliDiagram>,
}

impl DiagramNetwork {
    pub fn diagram(&self) -> &BratteliDiagram {
        &self.d
    }

    fn locate(&self, x: VertexId) -> Result<(usize, usize)> {
        let (n, i) = x.as_pair().ok_or_else(|| Error::InvalidVertex { vertex: x.to_string(), reason: "expected (level, index)".into() })?;
        if n < 0 || i < 0 || n as usize > self.d.depth() || i as usize >= self.d.level_size(n as usize) {
            return Err(Error::InvalidVertex { vertex: x.to_string(), reason: "no such diagram vertex".into() });
        }
        if n as usize == self.d.depth() {
            return Err(Error::OutOfRange { vertex: x });
        }
        Ok((n as usize, i as usize))
    }
}

impl Network for DiagramNetwork {
    fn neighbors_into(&self, x: VertexId, out: &mut Vec<(VertexId, f64)>) -> Result<()> {
        out.clear();
        let (n, i) = self.locate(x)?;
        if n > 0 {
            out.extend(self.d.parents(n - 1, i).map(|(p, c)| (VertexId::Pair(n as i64 - 1, p as i64), c)));
        }
        out.extend(self.d.children(n, i).map(|(ch, c)| (VertexId::Pair(n as i64 + 1, ch as i64), c)));
        Ok(())
    }

    fn origin(&self) -> Option<VertexId> {
        Some(VertexId::Pair(0, 0))
    }

    fn name(&self) -> String {
        self.d.name.clone()
    }
}
