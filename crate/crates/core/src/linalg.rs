//! Sparse matrices and the two linear solver backends.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    /// Duplicate entries are summed; explicit zeros are kept.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|a| (a.0, a.1));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut data: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &sorted {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) outside {nrows}x{ncols}");
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { nrows, ncols, indptr, indices, data }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let s = self.indptr[r];
        let e = self.indptr[r + 1];
        self.indices[s..e].iter().copied().zip(self.data[s..e].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map(|(_, v)| v).unwrap_or(0.0)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// xᵀ A.
    pub fn vecmat(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (r, &xr) in x.iter().enumerate() {
            if xr != 0.0 {
                for (c, v) in self.row(r) {
                    out[c] += xr * v;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> CsrMatrix {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows).map(|r| self.row(r).map(|(_, v)| v).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|r| self.get(r, r)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.triplets().iter().all(|&(r, c, v)| self.get(c, r) == v)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// Principal submatrix on the given (sorted or not) index list.
    pub fn principal(&self, keep: &[usize]) -> CsrMatrix {
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        let mut t = Vec::new();
        for (k, &i) in keep.iter().enumerate() {
            for (c, v) in self.row(i) {
                if pos[c] != usize::MAX {
                    t.push((k, pos[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), keep.len(), &t)
    }

    /// Coordinate triplet text, one `row col value` line per entry.
    pub fn to_triplet_text(&self) -> String {
        let mut s = String::new();
        for (r, c, v) in self.triplets() {
            s.push_str(&format!("{r} {c} {v:?}\n"));
        }
        s
    }
}

/// Linear solver backend for symmetric positive definite systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Dense Cholesky below [`DIRECT_LIMIT`] unknowns, conjugate gradients above.
    #[default]
    Auto,
    Direct,
    ConjugateGradient,
}

pub const DIRECT_LIMIT: usize = 1500;

pub fn solve_spd(a: &CsrMatrix, b: &[f64], solver: Solver) -> Result<Vec<f64>> {
    match solver {
        Solver::Direct => solve_direct(a, b),
        Solver::ConjugateGradient => solve_cg(a, b, 1e-13, 20 * a.nrows() + 100).map(|r| r.0),
        Solver::Auto if a.nrows() <= DIRECT_LIMIT => solve_direct(a, b),
        Solver::Auto => solve_cg(a, b, 1e-13, 20 * a.nrows() + 100).map(|r| r.0),
    }
}

/// Dense Cholesky solve.
pub fn solve_direct(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    if a.nrows() > 8000 {
        return Err(Error::Numerical(format!("{} unknowns is too large for the dense solver", a.nrows())));
    }
    let chol = a.to_dense().cholesky().ok_or_else(|| Error::Numerical("matrix is not positive definite (singular system)".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec())
}

/// Jacobi-preconditioned conjugate gradients. Returns the solution, the
/// iteration count and the final relative residual.
pub fn solve_cg(a: &CsrMatrix, b: &[f64], rel_tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize, f64)> {
    let n = a.nrows();
    let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0, 0.0));
    }
    let diag = a.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Numerical("nonpositive diagonal entry in SPD solve".into()));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iter {
        let ap = a.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::Numerical("conjugate gradients hit a nonpositive curvature (singular system)".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rnorm <= rel_tol * bnorm {
            return Ok((x, it + 1, rnorm / bnorm));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    Err(Error::Numerical(format!("conjugate gradients did not converge: relative residual {:e}", rnorm / bnorm)))
}

/// Relative singular-value cutoff used by the dense subspace helpers.
pub const RANK_RTOL: f64 = 1e-10;

fn full_svd(a: &DMatrix<f64>) -> nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    // pad to at least as many rows as columns so V is square
    let a = if a.nrows() < a.ncols() {
        let mut p = DMatrix::zeros(a.ncols(), a.ncols());
        p.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        p
    } else {
        a.clone()
    };
    a.svd(true, true)
}

fn cutoff(s: &DVector<f64>, rtol: f64) -> f64 {
    s.iter().cloned().fold(0.0, f64::max) * rtol
}

pub fn rank(a: &DMatrix<f64>, rtol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s = a.singular_values();
    let tol = cutoff(&s, rtol);
    s.iter().filter(|&&x| x > tol && x > 0.0).count()
}

/// Orthonormal basis (as columns) of {x : Ax = 0}.
pub fn null_space(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = full_svd(a);
    let tol = cutoff(&svd.singular_values, rtol);
    let vt = svd.v_t.as_ref().unwrap();
    let cols: Vec<DVector<f64>> =
        (0..vt.nrows()).filter(|&i| !(svd.singular_values[i] > tol && svd.singular_values[i] > 0.0)).map(|i| vt.row(i).transpose()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column space.
pub fn column_space(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let tol = cutoff(&svd.singular_values, rtol);
    let u = svd.u.as_ref().unwrap();
    let cols: Vec<DVector<f64>> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol && svd.singular_values[i] > 0.0).map(|i| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(a.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Minimal-norm least-squares solution of Ax = b and the residual ‖Ax − b‖.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>, rtol: f64) -> Result<(DVector<f64>, f64)> {
    if a.ncols() == 0 {
        return Ok((DVector::zeros(0), b.norm()));
    }
    let svd = a.clone().svd(true, true);
    let tol = cutoff(&svd.singular_values, rtol).max(f64::MIN_POSITIVE);
    let x = svd.solve(b, tol).map_err(|e| Error::Numerical(e.to_string()))?;
    let r = (a * &x - b).norm();
    Ok((x, r))
}

/// ‖P_A − P_B‖₂ for the orthogonal projectors onto two column spaces given
/// by orthonormal bases; 0 iff the subspaces coincide.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let pa = a * a.transpose();
    let pb = b * b.transpose();
    let d = pa - pb;
    if d.is_empty() {
        return 0.0;
    }
    d.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Orthonormal basis of the sum of two subspaces given by basis columns.
pub fn subspace_sum(a: &DMatrix<f64>, b: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    column_space(&m, rtol)
}
