//! Dense complex kernels with explicit rank decisions.
//!
//! Rank is always decided from singular values. Householder reflectors are
//! used for the structured factorizations, and every triangular factor
//! returned here has a real positive diagonal so that outputs are
//! deterministic.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{PencilError, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const EPS: f64 = f64::EPSILON;

/// Outcome of a numerical rank test.
///
/// `smallest_accepted` is `+inf` when the rank is zero and
/// `largest_rejected` is `0` when the rank is full.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDecision {
    pub rank: usize,
    pub tolerance_used: f64,
    pub smallest_accepted: f64,
    pub largest_rejected: f64,
}

impl RankDecision {
    /// `sv` must be sorted in descending order.
    pub fn from_singular_values(sv: &[f64], tol: f64) -> Self {
        let rank = sv.iter().take_while(|&&s| s > tol).count();
        RankDecision {
            rank,
            tolerance_used: tol,
            smallest_accepted: if rank == 0 { f64::INFINITY } else { sv[rank - 1] },
            largest_rejected: sv.get(rank).copied().unwrap_or(0.0),
        }
    }

    /// Ratio between the weakest accepted and the strongest rejected singular
    /// value. Large values mean the decision was clear-cut.
    pub fn gap(&self) -> f64 {
        if self.largest_rejected == 0.0 {
            f64::INFINITY
        } else {
            self.smallest_accepted / self.largest_rejected
        }
    }
}

/// Rank tolerance used when the caller does not provide one:
/// `sqrt(max(rows,cols)·eps)·scale`.
///
/// Each staircase step rotates the remaining rows by a basis computed from
/// the previous rank decision, so rounding noise in later blocks grows like
/// `eps/gap`. On planted pencils with well-separated structure this noise
/// reaches `1e3·max(rows,cols)·eps`, which a plain `max(rows,cols)·eps`
/// threshold misreads as rank.
pub fn default_tolerance(rows: usize, cols: usize, scale: f64) -> f64 {
    (rows.max(cols).max(1) as f64 * EPS).sqrt() * scale
}

pub fn check_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(PencilError::input(format!("{what} has non-finite entries")))
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD left factor and singular values, both in descending order.
/// nalgebra's complex SVD loses accuracy on rank-deficient input, so the
/// decomposition is delegated to faer.
fn left_svd(m: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let dec = to_faer(m).thin_svd().map_err(|e| PencilError::contract(format!("SVD failed: {e:?}")))?;
    let s = dec.S().column_vector();
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let u = dec.U();
    let left = CMatrix::from_fn(m.nrows(), order.len(), |i, j| u[(i, order[j])]);
    Ok((left, order.iter().map(|&i| s[i].re).collect()))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    check_finite(m, "matrix")?;
    let mut sv = to_faer(m)
        .singular_values()
        .map_err(|e| PencilError::contract(format!("SVD failed: {e:?}")))?;
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

pub fn numerical_rank(m: &CMatrix, tol: f64) -> Result<RankDecision> {
    Ok(RankDecision::from_singular_values(&singular_values(m)?, tol))
}

/// `P = I - beta * v * v^H`, acting on a contiguous index window.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    v: Vec<C64>,
    beta: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto a multiple of the unit vector `e_target`.
    /// Returns `None` when `x` is zero.
    pub(crate) fn new(x: &[C64], target: usize) -> Option<Self> {
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            return None;
        }
        let xt = x[target];
        let phase = if xt == C64::new(0.0, 0.0) { C64::new(1.0, 0.0) } else { xt / xt.norm() };
        let mut v = x.to_vec();
        v[target] += phase * alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Some(Reflector { v, beta: 2.0 / vnorm2 })
    }

    /// `M[row0.., cols] <- P * M[row0.., cols]`
    pub(crate) fn apply_left(&self, m: &mut CMatrix, row0: usize, cols: Range<usize>) {
        for j in cols {
            let mut w = C64::new(0.0, 0.0);
            for (i, vi) in self.v.iter().enumerate() {
                w += vi.conj() * m[(row0 + i, j)];
            }
            w *= self.beta;
            for (i, vi) in self.v.iter().enumerate() {
                m[(row0 + i, j)] -= vi * w;
            }
        }
    }

    /// `M[rows, col0..] <- M[rows, col0..] * P`
    pub(crate) fn apply_right(&self, m: &mut CMatrix, col0: usize, rows: Range<usize>) {
        let mut w = vec![C64::new(0.0, 0.0); rows.len()];
        for (j, vj) in self.v.iter().enumerate() {
            for (wi, i) in w.iter_mut().zip(rows.clone()) {
                *wi += m[(i, col0 + j)] * vj;
            }
        }
        for (j, vj) in self.v.iter().enumerate() {
            let c = vj.conj() * self.beta;
            for (wi, i) in w.iter().zip(rows.clone()) {
                m[(i, col0 + j)] -= wi * c;
            }
        }
    }
}

/// Extends the columns of `basis` (n×r, full column rank) to an n×n unitary
/// matrix whose leading r columns span the same space.
pub fn complete_basis(basis: &CMatrix) -> CMatrix {
    let (n, r) = basis.shape();
    let mut work = basis.clone();
    let mut q = identity(n);
    for j in 0..r.min(n) {
        let x: Vec<C64> = (j..n).map(|i| work[(i, j)]).collect();
        if let Some(h) = Reflector::new(&x, 0) {
            h.apply_left(&mut work, j, j..r);
            h.apply_right(&mut q, j, 0..n);
        }
    }
    q
}

/// Result of [`row_compress`]: `q^H * M = r`, with `r` zero below row `rank`.
#[derive(Debug, Clone)]
pub struct RowCompression {
    pub q: CMatrix,
    pub r: CMatrix,
    pub decision: RankDecision,
    /// Frobenius norm of the block that was set to zero.
    pub discarded: f64,
}

/// Unitary `q` such that `q^H * M = [M1; 0]` with `M1` of full numerical row
/// rank at tolerance `tol` (absolute, on singular values).
pub fn row_compress(m: &CMatrix, tol: f64) -> Result<RowCompression> {
    check_finite(m, "matrix")?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(RowCompression {
            q: identity(rows),
            r: m.clone(),
            decision: RankDecision::from_singular_values(&[], tol),
            discarded: 0.0,
        });
    }
    let (u, sv) = left_svd(m)?;
    let decision = RankDecision::from_singular_values(&sv, tol);
    let rank = decision.rank;
    let range = u.columns(0, rank).into_owned();
    let q = complete_basis(&range);
    let mut r = q.adjoint() * m;
    let discarded = r.rows(rank, rows - rank).norm();
    r.rows_mut(rank, rows - rank).fill(C64::new(0.0, 0.0));
    Ok(RowCompression { q, r, decision, discarded })
}

/// Result of [`col_compress`]: `M * v = c`, with `c` zero in its leading
/// `cols - rank` columns.
#[derive(Debug, Clone)]
pub struct ColCompression {
    pub v: CMatrix,
    pub c: CMatrix,
    pub decision: RankDecision,
    pub discarded: f64,
}

impl ColCompression {
    pub fn nullity(&self) -> usize {
        self.c.ncols() - self.decision.rank
    }
}

/// Unitary `v` such that `M * v = [0 M1]` with `M1` of full numerical column
/// rank; the leading columns of `v` span the numerical null space of `M`.
pub fn col_compress(m: &CMatrix, tol: f64) -> Result<ColCompression> {
    let rc = row_compress(&m.adjoint(), tol)?;
    let cols = m.ncols();
    let rank = rc.decision.rank;
    let null = cols - rank;
    // [range | null] -> [null | range]
    let mut v = CMatrix::zeros(cols, cols);
    v.columns_mut(0, null).copy_from(&rc.q.columns(rank, null));
    v.columns_mut(null, rank).copy_from(&rc.q.columns(0, rank));
    let mut c = m * &v;
    let discarded = c.columns(0, null).norm();
    c.columns_mut(0, null).fill(C64::new(0.0, 0.0));
    Ok(ColCompression { v, c, decision: rc.decision, discarded })
}

/// Householder QR of a full-column-rank `s×t` block: `u^H * a = [ahat; 0]`
/// with `ahat` upper triangular, real positive diagonal.
pub fn ql_upper(a: &CMatrix, tol: f64) -> Result<(CMatrix, CMatrix)> {
    check_finite(a, "matrix")?;
    let (s, t) = a.shape();
    if s < t {
        return Err(PencilError::contract(format!(
            "ql_upper needs at least as many rows as columns, got {s}x{t}"
        )));
    }
    let mut w = a.clone();
    let mut u = identity(s);
    for j in 0..t {
        let x: Vec<C64> = (j..s).map(|i| w[(i, j)]).collect();
        if let Some(h) = Reflector::new(&x, 0) {
            h.apply_left(&mut w, j, j..t);
            h.apply_right(&mut u, j, 0..s);
        }
        for i in j + 1..s {
            w[(i, j)] = C64::new(0.0, 0.0);
        }
        let d = w[(j, j)];
        if d.norm() <= tol || d.norm() == 0.0 {
            return Err(PencilError::contract(format!(
                "column-rank deficient stair: |R[{j},{j}]| = {:.3e} <= tol {:.3e}",
                d.norm(),
                tol
            )));
        }
        let phase = d / d.norm();
        for c in j..t {
            w[(j, c)] *= phase.conj();
        }
        for r in 0..s {
            u[(r, j)] *= phase;
        }
        w[(j, j)] = C64::new(d.norm(), 0.0);
    }
    Ok((u, w.rows(0, t).into_owned()))
}

/// Householder RQ of a full-row-rank `s×t` block: `e * v = [0 ehat]` with
/// `ehat` upper triangular, real positive diagonal.
pub fn rq_upper(e: &CMatrix, tol: f64) -> Result<(CMatrix, CMatrix)> {
    check_finite(e, "matrix")?;
    let (s, t) = e.shape();
    if s > t {
        return Err(PencilError::contract(format!(
            "rq_upper needs at least as many columns as rows, got {s}x{t}"
        )));
    }
    let mut w = e.clone();
    let mut v = identity(t);
    for i in (0..s).rev() {
        let p = t - s + i;
        let x: Vec<C64> = (0..=p).map(|j| w[(i, j)].conj()).collect();
        if let Some(h) = Reflector::new(&x, p) {
            h.apply_right(&mut w, 0, 0..i + 1);
            h.apply_right(&mut v, 0, 0..t);
        }
        for j in 0..p {
            w[(i, j)] = C64::new(0.0, 0.0);
        }
        let d = w[(i, p)];
        if d.norm() <= tol || d.norm() == 0.0 {
            return Err(PencilError::contract(format!(
                "row-rank deficient stair: |R[{i},{i}]| = {:.3e} <= tol {:.3e}",
                d.norm(),
                tol
            )));
        }
        let phase = d.conj() / d.norm();
        for r in 0..s {
            w[(r, p)] *= phase;
        }
        for r in 0..t {
            v[(r, p)] *= phase;
        }
        w[(i, p)] = C64::new(d.norm(), 0.0);
    }
    Ok((v, w.columns(t - s, s).into_owned()))
}

/// `r^{-1} * b` for upper triangular `r`.
pub fn solve_upper(r: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    r.solve_upper_triangular(b)
        .ok_or_else(|| PencilError::contract("singular triangular pivot"))
}

/// `b * r^{-1}` for upper triangular `r`.
pub fn solve_upper_right(b: &CMatrix, r: &CMatrix) -> Result<CMatrix> {
    r.transpose()
        .solve_lower_triangular(&b.transpose())
        .map(|x| x.transpose())
        .ok_or_else(|| PencilError::contract("singular triangular pivot"))
}

/// Inverse of a unit (or general) upper triangular matrix.
pub fn inv_upper(r: &CMatrix) -> Result<CMatrix> {
    solve_upper(r, &identity(r.nrows()))
}
