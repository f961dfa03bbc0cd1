use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{column_space, min_norm_solve, null_space, rank, subspace_distance, subspace_sum, RANK_RTOL};

use super::diagram::{BratteliDiagram, LevelFunction};

/// Left and right arrow matrices at level n.
#[derive(Clone, Debug)]
pub struct ArrowMatrices {
    pub n: usize,
    /// P̄_n, |V_n| × |V_{n+1}|, entries c⁽ⁿ⁾_xz / c_n(x).
    pub left: DMatrix<f64>,
    /// P⃗_{n−1}, |V_n| × |V_{n−1}|, entries c⁽ⁿ⁻¹⁾_yx / c_n(x); absent at n = 0.
    pub right: Option<DMatrix<f64>>,
}

impl ArrowMatrices {
    /// max_x |Σ_z P̄(x,z) + Σ_y P⃗(x,y) − 1|.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.left.nrows())
            .map(|x| {
                let s = self.left.row(x).sum() + self.right.as_ref().map(|r| r.row(x).sum()).unwrap_or(0.0);
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn arrow_matrices(d: &BratteliDiagram, n: usize) -> Result<ArrowMatrices> {
    let c = d.total(n)?;
    let mut left = d.conductance_dense(n)?;
    for (x, mut row) in left.row_iter_mut().enumerate() {
        row /= c[x];
    }
    let right = if n == 0 {
        None
    } else {
        let mut r = d.conductance_dense(n - 1)?.transpose();
        for (x, mut row) in r.row_iter_mut().enumerate() {
            row /= c[x];
        }
        Some(r)
    };
    Ok(ArrowMatrices { n, left, right })
}

/// Assembly of the level-n harmonic condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assembly {
    /// C_n f_{n+1} = D_n f_n − C_{n−1}ᵀ f_{n−1}.
    Conductance,
    /// P̄_n f_{n+1} = f_n − P⃗_{n−1} f_{n−1}.
    Arrow,
}

/// The affine set of f_{n+1} continuing (f_{n−1}, f_n) harmonically at V_n.
#[derive(Clone, Debug)]
pub struct Extension {
    pub n: usize,
    pub assembly: Assembly,
    /// Minimal-norm least-squares solution.
    pub particular: DVector<f64>,
    /// Orthonormal basis of the kernel, as columns.
    pub kernel: DMatrix<f64>,
    /// ‖A f − b‖ at the particular solution; ≈ 0 iff the set is nonempty.
    pub residual: f64,
}

impl Extension {
    pub fn dimension(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn feasible(&self, tol: f64) -> bool {
        self.residual <= tol
    }

    /// (distance between particular solutions, projector distance between kernels).
    pub fn compare(&self, other: &Extension) -> (f64, f64) {
        ((&self.particular - &other.particular).norm(), subspace_distance(&self.kernel, &other.kernel))
    }

    pub fn solution(&self, coefficients: &[f64]) -> Result<DVector<f64>> {
        if coefficients.len() != self.dimension() {
            return Err(invalid(format!("{} coefficients for a {}-dimensional kernel", coefficients.len(), self.dimension())));
        }
        Ok(&self.particular + &self.kernel * DVector::from_column_slice(coefficients))
    }
}

/// Solves the level-n condition for f_{n+1}. At n = 0 there is no f_{n−1}.
pub fn harmonic_extend(d: &BratteliDiagram, n: usize, f_prev: Option<&[f64]>, f_n: &[f64], assembly: Assembly) -> Result<Extension> {
    if f_n.len() != d.level_size(n) {
        return Err(invalid(format!("f_{n} has length {} but V_{n} has {} vertices", f_n.len(), d.level_size(n))));
    }
    let fp = match (n, f_prev) {
        (0, _) => None,
        (_, Some(p)) if p.len() == d.level_size(n - 1) => Some(DVector::from_column_slice(p)),
        (_, Some(p)) => return Err(invalid(format!("f_{} has length {} but the level has {} vertices", n - 1, p.len(), d.level_size(n - 1)))),
        (_, None) => return Err(invalid(format!("extension at level {n} needs f_{}", n - 1))),
    };
    let fnv = DVector::from_column_slice(f_n);
    let (a, b) = match assembly {
        Assembly::Conductance => {
            let c = d.total(n)?;
            let mut b = DVector::from_iterator(fnv.len(), fnv.iter().zip(c).map(|(f, c)| f * c));
            if let Some(p) = &fp {
                b -= d.conductance_dense(n - 1)?.transpose() * p;
            }
            (d.conductance_dense(n)?, b)
        }
        Assembly::Arrow => {
            let ar = arrow_matrices(d, n)?;
            let mut b = fnv.clone();
            if let (Some(p), Some(r)) = (&fp, &ar.right) {
                b -= r * p;
            }
            (ar.left, b)
        }
    };
    let (particular, residual) = min_norm_solve(&a, &b, RANK_RTOL)?;
    let kernel = null_space(&a, RANK_RTOL);
    Ok(Extension { n, assembly, particular, kernel, residual })
}

/// Continues (f_0, f_1) level by level with minimal-norm solutions up to
/// level `last`. Fails when a level has no solution.
pub fn harmonic_sequence(d: &BratteliDiagram, f0: &[f64], f1: &[f64], last: usize, assembly: Assembly, tol: f64) -> Result<LevelFunction> {
    if last > d.depth() {
        return Err(d.range_error(last));
    }
    let mut levels = vec![f0.to_vec(), f1.to_vec()];
    for n in 1..last {
        let e = harmonic_extend(d, n, Some(&levels[n - 1]), &levels[n], assembly)?;
        let gate = tol * (1.0 + e.particular.norm());
        if !e.feasible(gate) {
            return Err(Error::NotHarmonic { max_residual: e.residual, tolerance: gate });
        }
        levels.push(e.particular.iter().copied().collect());
    }
    levels.truncate(last + 1);
    let f = LevelFunction::new(0, levels);
    f.check(d)?;
    Ok(f)
}

/// Nontrivial-harmonic-prefix test to a given depth.
#[derive(Clone, Debug, Serialize)]
pub struct ExistenceReport {
    pub depth: usize,
    /// Exact answer: some prefix (f_0 = 0, f_1..f_D) solving every level
    /// condition below D is nonzero on levels 1..D−1.
    pub exists: bool,
    pub failing_depth: Option<usize>,
    /// (D, dimension of the admissible interior parts) for D = 2..=depth.
    pub interior_dims: Vec<(usize, usize)>,
    /// Col(P̄_n) ∩ 𝒢_n ≠ {0} for n = 1..depth−1, with 𝒩_n, 𝒢_n built iteratively.
    pub iterative_criterion: Vec<bool>,
    pub iterative_exists: bool,
    /// Rank(P̄_n) = |V_n| on every tested level.
    pub full_rank: bool,
    pub witness: Option<LevelFunction>,
}

fn level_offsets(d: &BratteliDiagram, depth: usize) -> Vec<usize> {
    let mut off = vec![0usize; depth + 2];
    for n in 1..=depth {
        off[n + 1] = off[n] + d.level_size(n);
    }
    off
}

/// Joint system in the unknowns f_1..f_D with f_0 = 0.
fn joint_system(d: &BratteliDiagram, depth: usize) -> Result<(DMatrix<f64>, Vec<usize>)> {
    let off = level_offsets(d, depth);
    let unknowns = off[depth + 1];
    let col = |n: usize| off[n];
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for n in d.harmonic_from()..depth {
        let c = d.total(n)?;
        for x in 0..d.level_size(n) {
            let mut r = DVector::zeros(unknowns);
            // Δf(x) = c(x) f(x) − Σ c_xy f(y) over both neighbor levels
            if n >= 1 {
                r[col(n) + x] += c[x];
            }
            for (z, cz) in d.children(n, x) {
                r[col(n + 1) + z] -= cz;
            }
            if n >= 2 {
                for (y, cy) in d.parents(n - 1, x) {
                    r[col(n - 1) + y] -= cy;
                }
            }
            rows.push(r);
        }
    }
    let m = if rows.is_empty() { DMatrix::zeros(0, unknowns) } else { DMatrix::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>()) };
    Ok((m, off))
}

pub fn harmonic_exists(d: &BratteliDiagram, depth: usize) -> Result<ExistenceReport> {
    if depth < 2 || depth > d.depth() {
        return Err(invalid(format!("existence depth must lie in 2..={}", d.depth())));
    }
    let mut interior_dims = Vec::new();
    let mut failing_depth = None;
    let mut witness = None;
    for dd in 2..=depth {
        let (m, off) = joint_system(d, dd)?;
        let ns = null_space(&m, RANK_RTOL);
        let split = off[dd];
        let interior = ns.rows(0, split).into_owned();
        let dim = rank(&interior, RANK_RTOL);
        interior_dims.push((dd, dim));
        if dim == 0 {
            failing_depth.get_or_insert(dd);
        }
        if dd == depth && dim > 0 {
            let best = (0..ns.ncols()).max_by(|&a, &b| interior.column(a).norm().total_cmp(&interior.column(b).norm())).unwrap();
            let v = ns.column(best);
            let mut levels = vec![vec![0.0; d.level_size(0)]];
            for n in 1..=dd {
                levels.push(v.rows(off[n], d.level_size(n)).iter().copied().collect());
            }
            witness = Some(LevelFunction::new(0, levels));
        }
    }

    // iterative construction
    let mut iterative_criterion = Vec::new();
    let mut full_rank = true;
    let mut n_prev = DMatrix::<f64>::zeros(d.level_size(0), 0);
    let mut n_cur = if d.harmonic_from() == 0 { null_space(&d.conductance_dense(0)?, RANK_RTOL) } else { DMatrix::identity(d.level_size(1), d.level_size(1)) };
    for n in 1..depth {
        let ar = arrow_matrices(d, n)?;
        let right = ar.right.as_ref().unwrap();
        let g = subspace_sum(&n_cur, &(right * &n_prev), RANK_RTOL);
        let col = column_space(&ar.left, RANK_RTOL);
        if col.ncols() < d.level_size(n) {
            full_rank = false;
        }
        let inter = col.ncols() + g.ncols() - subspace_sum(&col, &g, RANK_RTOL).ncols();
        iterative_criterion.push(inter > 0);
        // 𝒩_{n+1} = {f : P̄_n f ∈ 𝒢_n}
        let (rows, k) = (ar.left.nrows(), ar.left.ncols());
        let mut sys = DMatrix::zeros(rows, k + g.ncols());
        sys.view_mut((0, 0), (rows, k)).copy_from(&ar.left);
        sys.view_mut((0, k), (rows, g.ncols())).copy_from(&(-&g));
        let ns = null_space(&sys, RANK_RTOL);
        let next = column_space(&ns.rows(0, k).into_owned(), RANK_RTOL);
        n_prev = n_cur;
        n_cur = next;
    }
    let iterative_exists = iterative_criterion.iter().all(|&b| b);
    Ok(ExistenceReport { depth, exists: failing_depth.is_none(), failing_depth, interior_dims, iterative_criterion, iterative_exists, full_rank, witness })
}
