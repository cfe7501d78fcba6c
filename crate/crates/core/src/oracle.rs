//! Independent checks: index counts from ranks of block Toeplitz matrices,
//! zero-direction tests by coefficient convolution, and residual figures of
//! a completed reduction.
//!
//! Everything here is dense and slow on purpose; it only shares the SVD rank
//! primitive with the production path.

use crate::bidiag::{KroneckerForm, SeparatedForm};
use crate::error::Result;
use crate::extract::{MinimalBasis, RootPolynomialSet};
use crate::linalg::{numerical_rank, solve_upper, solve_upper_right, spectral_norm, CMatrix, C64, EPS};
use crate::pencil::{PolyMatrix, ShiftedPencil};

/// Nullities and ranks of the three Toeplitz families and the counts derived
/// from their second differences.
///
/// `mu[k]`, `nu[k]`, `r[k]` hold the values for Toeplitz parameter `k`
/// (`mu[0] = nu[0] = 0`). `m_counts[j]` and `n_counts[j]` count right and
/// left minimal indices equal to `j`; `e_counts[i-1]` counts elementary
/// divisors of degree `i` at `λ0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzReport {
    pub kmax: usize,
    pub mu: Vec<usize>,
    pub nu: Vec<usize>,
    pub r: Vec<usize>,
    pub m_counts: Vec<usize>,
    pub n_counts: Vec<usize>,
    pub e_counts: Vec<usize>,
    pub normal_rank: usize,
    /// False when the counts do not add up to `n - r` and `m - r`, or a
    /// second difference came out negative.
    pub complete: bool,
}

fn expand(counts: &[usize], base: usize) -> Vec<usize> {
    counts.iter().enumerate().flat_map(|(j, &c)| std::iter::repeat_n(j + base, c)).collect()
}

impl ToeplitzReport {
    pub fn right_minimal(&self) -> Vec<usize> {
        expand(&self.m_counts, 0)
    }

    pub fn left_minimal(&self) -> Vec<usize> {
        expand(&self.n_counts, 0)
    }

    pub fn partial_multiplicities(&self) -> Vec<usize> {
        expand(&self.e_counts, 1)
    }
}

/// Block matrix with `blocks(i, j)` placed at block position `(i, j)`.
fn block_toeplitz(
    block_rows: usize,
    block_cols: usize,
    (m, n): (usize, usize),
    pick: impl Fn(usize, usize) -> Option<CMatrix>,
) -> CMatrix {
    let mut t = CMatrix::zeros(block_rows * m, block_cols * n);
    for i in 0..block_rows {
        for j in 0..block_cols {
            if let Some(b) = pick(i, j) {
                t.view_mut((i * m, j * n), (m, n)).copy_from(&b);
            }
        }
    }
    t
}

fn second_difference(prev2: usize, prev: usize, cur: usize, ok: &mut bool) -> usize {
    let v = prev2 as i64 - 2 * prev as i64 + cur as i64;
    if v < 0 {
        *ok = false;
    }
    v.max(0) as usize
}

/// Normal rank as the largest rank at a few fixed points of the unit circle.
pub fn normal_rank(sp: &ShiftedPencil, tol: f64) -> Result<usize> {
    let points = [C64::new(0.6, 0.8), C64::new(-0.28, 0.96), C64::new(0.8, -0.6)];
    let mut best = 0;
    for z in points {
        let m = &sp.lhat0 + &sp.lhat1 * z;
        best = best.max(numerical_rank(&m, tol)?.rank);
    }
    Ok(best)
}

/// Threshold for ranks of matrices built directly from `Lhat0`, `Lhat1`.
/// These see only the rounding already present in the pencil, so the plain
/// `max(rows,cols)·eps·scale` rule applies. A looser threshold would turn
/// small eigenvalues into spurious Jordan chains, because Toeplitz singular
/// values shrink like `|λ|^k`.
fn direct_tolerance(rows: usize, cols: usize, scale: f64) -> f64 {
    rows.max(cols).max(1) as f64 * EPS * scale
}

/// Toeplitz-rank structure of `sp` at its expansion point. `kmax` defaults
/// to `min(m,n) + 1`; `tol` is an absolute singular value threshold and
/// defaults to `max(rows,cols)·eps·2·scale` per Toeplitz matrix.
pub fn toeplitz_structure(sp: &ShiftedPencil, kmax: Option<usize>, tol: Option<f64>) -> Result<ToeplitzReport> {
    let (m, n) = (sp.rows(), sp.cols());
    let kmax = kmax.unwrap_or(m.min(n) + 1).max(1);
    let scale = sp.scale()?.max(f64::MIN_POSITIVE);
    let rank = |t: &CMatrix| -> Result<usize> {
        let tol = tol.unwrap_or_else(|| direct_tolerance(t.nrows(), t.ncols(), 2.0 * scale));
        Ok(numerical_rank(t, tol)?.rank)
    };
    let (l0, l1) = (&sp.lhat0, &sp.lhat1);

    let mut mu = vec![0];
    let mut nu = vec![0];
    let mut r = Vec::new();
    for k in 0..=kmax + 1 {
        let tk = block_toeplitz(k + 1, k + 1, (m, n), |i, j| {
            if i == j {
                Some(l0.clone())
            } else if j == i + 1 {
                Some(l1.clone())
            } else {
                None
            }
        });
        r.push(rank(&tk)?);
        if k == 0 {
            continue;
        }
        let that = block_toeplitz(k + 1, k, (m, n), |i, j| {
            if i == j {
                Some(l1.clone())
            } else if i == j + 1 {
                Some(l0.clone())
            } else {
                None
            }
        });
        mu.push(n * k - rank(&that)?);
        let ttilde = block_toeplitz(k, k + 1, (m, n), |i, j| {
            if i == j {
                Some(l0.clone())
            } else if j == i + 1 {
                Some(l1.clone())
            } else {
                None
            }
        });
        nu.push(m * k - rank(&ttilde)?);
    }

    let mut ok = true;
    let at = |v: &[usize], k: i64| if k <= 0 { 0 } else { v[k as usize] };
    let m_counts: Vec<usize> = (0..=kmax as i64)
        .map(|j| second_difference(at(&mu, j - 1), at(&mu, j), at(&mu, j + 1), &mut ok))
        .collect();
    let n_counts: Vec<usize> = (0..=kmax as i64)
        .map(|j| second_difference(at(&nu, j - 1), at(&nu, j), at(&nu, j + 1), &mut ok))
        .collect();
    let rr = |k: i64| if k < 0 { 0 } else { r[k as usize] };
    // Partial multiplicities sum to at most min(m,n); higher Toeplitz levels
    // only see eigenvalues near λ0 through singular values like |λ-λ0|^k.
    let max_degree = (kmax + 1).min(m.min(n)) as i64;
    let e_counts: Vec<usize> =
        (1..=max_degree).map(|i| second_difference(rr(i - 2), rr(i - 1), rr(i), &mut ok)).collect();

    let normal = normal_rank(sp, tol.unwrap_or_else(|| direct_tolerance(m, n, scale)))?;
    let complete = ok && m_counts.iter().sum::<usize>() == n - normal && n_counts.iter().sum::<usize>() == m - normal;
    Ok(ToeplitzReport { kmax, mu, nu, r, m_counts, n_counts, e_counts, normal_rank: normal, complete })
}

/// Outcome of [`verify_zero_direction`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDirectionCheck {
    pub valid: bool,
    /// Largest norm among the convolution coefficients that must vanish.
    pub residual: f64,
    /// `v(λ0)`, the coefficient of `μ^k` in `L(λ)x(λ)`.
    pub quotient: CMatrix,
    pub threshold: f64,
}

/// Tests whether `x` (one column) is a zero direction of order exactly `k`:
/// `x(λ0) ≠ 0`, the coefficients `0..k` of `L(λ)x(λ)` vanish and the
/// coefficient of `μ^k` does not. The default threshold is
/// `sqrt(eps)·‖x‖·max(‖Lhat0‖₂,‖Lhat1‖₂)`.
pub fn verify_zero_direction(sp: &ShiftedPencil, x: &PolyMatrix, k: usize, tol: Option<f64>) -> Result<ZeroDirectionCheck> {
    let threshold = match tol {
        Some(t) => t,
        None => EPS.sqrt() * x.norm() * sp.scale()?,
    };
    let prod = x.pencil_product(&sp.lhat0, &sp.lhat1);
    let coeff = |d: usize| prod.coeffs().get(d).cloned().unwrap_or_else(|| CMatrix::zeros(sp.rows(), x.cols()));
    let residual = (0..k).map(|d| coeff(d).norm()).fold(0.0, f64::max);
    let quotient = coeff(k);
    let valid = x.coeffs()[0].norm() > threshold && residual <= threshold && quotient.norm() > threshold;
    Ok(ZeroDirectionCheck { valid, residual, quotient, threshold })
}

/// The residual figures of a completed reduction, all Frobenius norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `eps·‖S‖₂·‖T^{-1}‖₂` for the overall triangular transformations.
    pub eps_kappa: f64,
    /// `‖U S Â T^{-1} V^H - L̂‖` summed over both coefficients, where `Â` is
    /// the transformed pencil.
    pub back: f64,
    /// Distance of the transformed pencil from the exact 0/1 pattern on the
    /// staircase columns.
    pub off: f64,
    pub res_n: f64,
    pub norm_n: f64,
    pub res_r: f64,
    pub norm_r: f64,
}

pub fn residual_report(
    sp: &ShiftedPencil,
    sep: &SeparatedForm,
    kron: &KroneckerForm,
    basis: &MinimalBasis,
    roots: &RootPolynomialSet,
) -> Result<ResidualReport> {
    let (s, t) = (&kron.s_prime, &kron.t_prime);
    let t_inv = solve_upper(t, &CMatrix::identity(t.nrows(), t.ncols()))?;
    let eps_kappa = EPS * spectral_norm(s)? * spectral_norm(&t_inv)?;

    let (ideal_a, ideal_e) = kron.ideal();
    let stair_cols = kron.layout.co[kron.layout.k()];
    let mut back = 0.0;
    let mut off = 0.0;
    for (l, ideal) in [(&sp.lhat0, &ideal_a), (&sp.lhat1, &ideal_e)] {
        let transformed = solve_upper(s, &(sep.u.adjoint() * l * &sep.v * t))?;
        let rebuilt = &sep.u * solve_upper_right(&(s * &transformed), t)? * sep.v.adjoint();
        back += (rebuilt - l).norm();
        off += (ideal.columns(0, stair_cols) - transformed.columns(0, stair_cols)).norm();
    }

    let mut res_n = 0.0;
    for c in basis.n.pencil_product(&sp.lhat0, &sp.lhat1).coeffs() {
        res_n += c.norm_squared();
    }
    let mut res_r = 0.0;
    let mut norm_r = 0.0;
    for (v, &order) in roots.vectors.iter().zip(&roots.orders) {
        let prod = v.pencil_product(&sp.lhat0, &sp.lhat1);
        res_r += prod.coeffs().iter().take(order).map(|c| c.norm_squared()).sum::<f64>();
        norm_r += v.norm().powi(2);
    }
    Ok(ResidualReport {
        eps_kappa,
        back,
        off,
        res_n: res_n.sqrt(),
        norm_n: basis.n.norm(),
        res_r: res_r.sqrt(),
        norm_r: norm_r.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GeneratorSpec};
    use crate::linalg::identity;
    use crate::pencil::{make_shifted, Pencil};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn all_lambda() -> ShiftedPencil {
        let l1 = CMatrix::from_element(2, 2, c(1.0));
        make_shifted(&Pencil::new(CMatrix::zeros(2, 2), l1).unwrap(), c(0.0)).unwrap()
    }

    #[test]
    fn all_lambda_counts() {
        let rep = toeplitz_structure(&all_lambda(), None, None).unwrap();
        assert_eq!(rep.mu[1], 1);
        assert_eq!(rep.mu[2], 2);
        assert_eq!(&rep.r[..3], &[0, 1, 2]);
        assert_eq!(rep.m_counts[0], 1);
        assert_eq!(rep.e_counts[0], 1);
        assert_eq!(rep.e_counts[1], 0);
        assert_eq!(rep.right_minimal(), vec![0]);
        assert_eq!(rep.left_minimal(), vec![0]);
        assert_eq!(rep.partial_multiplicities(), vec![1]);
        assert_eq!(rep.normal_rank, 1);
        assert!(rep.complete);
    }

    #[test]
    fn identity_pencil_has_no_structure() {
        let sp = make_shifted(&Pencil::new(identity(3), CMatrix::zeros(3, 3)).unwrap(), c(0.0)).unwrap();
        let rep = toeplitz_structure(&sp, None, None).unwrap();
        assert!(rep.right_minimal().is_empty());
        assert!(rep.left_minimal().is_empty());
        assert!(rep.partial_multiplicities().is_empty());
        assert!(rep.complete);
    }

    #[test]
    fn matlabex_counts() {
        let p = generate(&GeneratorSpec::new(vec![4, 2, 0], vec![5, 3, 1], 2).disguised()).unwrap();
        let rep = toeplitz_structure(&make_shifted(&p, c(0.0)).unwrap(), None, None).unwrap();
        assert_eq!(rep.right_minimal(), vec![0, 1, 2]);
        assert_eq!(rep.partial_multiplicities(), vec![1, 2]);
        assert!(rep.left_minimal().is_empty());
        assert!(rep.complete);
    }

    #[test]
    fn small_kmax_is_flagged() {
        let p = generate(&GeneratorSpec::new(vec![4, 2, 0], vec![5, 3, 1], 2)).unwrap();
        let rep = toeplitz_structure(&make_shifted(&p, c(0.0)).unwrap(), Some(1), None).unwrap();
        assert!(!rep.complete);
    }

    fn column(coeffs: &[[f64; 2]]) -> PolyMatrix {
        let cs = coeffs.iter().map(|v| CMatrix::from_column_slice(2, 1, &[c(v[0]), c(v[1])])).collect();
        PolyMatrix::new(cs, c(0.0)).unwrap()
    }

    #[test]
    fn zero_direction_examples() {
        let sp = all_lambda();
        let x = column(&[[1.0, 1.0]]);
        let chk = verify_zero_direction(&sp, &x, 1, None).unwrap();
        assert!(chk.valid);
        // normalized pencil: L̂1 = [[1,1],[1,1]]/2
        assert_eq!(chk.quotient[(0, 0)], c(1.0));
        assert!(!verify_zero_direction(&sp, &x, 2, None).unwrap().valid);

        // z = (λ^k + 1, λ^k - 1) has order k + 1
        for k in 1..4 {
            let mut coeffs = vec![[0.0, 0.0]; k + 1];
            coeffs[0] = [1.0, -1.0];
            coeffs[k] = [1.0, 1.0];
            let z = column(&coeffs);
            assert!(verify_zero_direction(&sp, &z, k + 1, None).unwrap().valid);
            assert!(!verify_zero_direction(&sp, &z, k + 2, None).unwrap().valid);
        }

        let vanishing = column(&[[0.0, 0.0], [1.0, 1.0]]);
        assert!(!verify_zero_direction(&sp, &vanishing, 1, None).unwrap().valid);
    }
}
