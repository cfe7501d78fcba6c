//! Minimal basis, root polynomials and right inverse from the separated
//! bidiagonal pencils, and their embedding into original coordinates.

use crate::bidiag::{BlockPencil, SeparatedForm};
use crate::error::{PencilError, Result};
use crate::linalg::{solve_upper, CMatrix, C64};
use crate::pencil::PolyMatrix;

/// Coordinates a polynomial result is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Columns of the red or blue pencil of the separated form.
    Separated,
    /// Columns of the input pencil.
    Original,
}

/// Columns of `n` form a minimal basis of the right null space; `degrees`
/// are the right minimal indices, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalBasis {
    pub n: PolyMatrix,
    pub degrees: Vec<usize>,
    pub frame: Frame,
}

/// Maximal set of root polynomials at `lambda0`, by descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct RootPolynomialSet {
    pub vectors: Vec<PolyMatrix>,
    pub orders: Vec<usize>,
    pub lambda0: C64,
    pub frame: Frame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RightInverse {
    pub r: PolyMatrix,
    pub frame: Frame,
}

fn singular_stair(what: &str) -> PencilError {
    PencilError::contract(format!("singular {what} stair"))
}

fn check_singular_shape(p: &BlockPencil) -> Result<()> {
    let k = p.col_blocks.len();
    let ok = p.row_blocks.len() == k
        && (0..k).all(|i| {
            let next = p.col_blocks.get(i + 1).copied().unwrap_or(0);
            p.row_blocks[i] == next && p.row_blocks[i] <= p.col_blocks[i]
        });
    if ok {
        Ok(())
    } else {
        Err(PencilError::contract("pencil does not have square A stairs"))
    }
}

fn check_nilpotent_shape(p: &BlockPencil) -> Result<()> {
    let k = p.col_blocks.len();
    let ok = p.row_blocks.len() == k
        && (0..k).all(|i| {
            let next = p.col_blocks.get(i + 1).copied().unwrap_or(0);
            p.row_blocks[i] == p.col_blocks[i] && p.row_blocks[i] >= next
        });
    if ok {
        Ok(())
    } else {
        Err(PencilError::contract("pencil does not have square E stairs"))
    }
}

/// `N(μ) = [I; Z_1 μ; Z_2 Z_1 μ²; …]` with `Z_i = -A_{i,i+1}^{-1} E_{i,i}`.
pub fn minimal_basis(red: &BlockPencil, lambda0: C64) -> Result<MinimalBasis> {
    check_singular_shape(red)?;
    let k = red.col_blocks.len();
    let n = red.cols();
    let t1 = red.col_blocks.first().copied().unwrap_or(0);
    let co = red.col_offsets();
    let mut coeffs = Vec::new();
    let mut cur = CMatrix::identity(t1, t1);
    #[allow(clippy::needless_range_loop)]
    for h in 0..k {
        let mut c = CMatrix::zeros(n, t1);
        c.rows_mut(co[h], red.col_blocks[h]).copy_from(&cur);
        coeffs.push(c);
        if h + 1 == k || red.col_blocks[h + 1] == 0 {
            break;
        }
        let a = red.a_stair(h).upper_triangle();
        let z = -solve_upper(&a, &red.e_stair(h)).map_err(|_| singular_stair("A"))?;
        cur = z * cur;
        if cur.iter().all(|x| *x == C64::new(0.0, 0.0)) {
            break;
        }
    }
    if coeffs.is_empty() {
        coeffs.push(CMatrix::zeros(n, 0));
    }
    let n_poly = PolyMatrix::new(coeffs, lambda0)?;
    let degrees = n_poly.column_degrees();
    let mut order: Vec<usize> = (0..t1).collect();
    order.sort_by_key(|&j| degrees[j]);
    let sorted = PolyMatrix::hstack(&order.iter().map(|&j| n_poly.column(j)).collect::<Vec<_>>(), n, lambda0);
    Ok(MinimalBasis {
        degrees: order.iter().map(|&j| degrees[j]).collect(),
        n: sorted,
        frame: Frame::Separated,
    })
}

/// For every block `i`, the rightmost `t_i - t_{i+1}` columns of block `i`
/// start a root polynomial of order `i`; lower coefficients follow from
/// `Ẑ_j = -E_{j,j}^{-1} A_{j,j+1}`. The sign is chosen so that the
/// coefficient of highest degree is `(-1)^(order-1)` times a unit vector.
pub fn root_polynomials(blue: &BlockPencil, lambda0: C64) -> Result<RootPolynomialSet> {
    check_nilpotent_shape(blue)?;
    let k = blue.col_blocks.len();
    let n = blue.cols();
    let t = &blue.col_blocks;
    let co = blue.col_offsets();
    let mut vectors = Vec::new();
    let mut orders = Vec::new();
    for i in (0..k).rev() {
        let next = t.get(i + 1).copied().unwrap_or(0);
        let count = t[i] - next;
        if count == 0 {
            continue;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut cur = CMatrix::zeros(t[i], count);
        for j in 0..count {
            cur[(next + j, j)] = C64::new(sign, 0.0);
        }
        let mut coeffs = vec![CMatrix::zeros(n, count); i + 1];
        coeffs[i].rows_mut(co[i], t[i]).copy_from(&cur);
        for j in (0..i).rev() {
            let e = blue.e_stair(j).upper_triangle();
            let z = -solve_upper(&e, &blue.a_stair(j)).map_err(|_| singular_stair("E"))?;
            cur = z * cur;
            coeffs[j].rows_mut(co[j], t[j]).copy_from(&cur);
        }
        let block = PolyMatrix::new(coeffs, lambda0)?;
        for j in 0..count {
            vectors.push(block.column(j));
            orders.push(i + 1);
        }
    }
    Ok(RootPolynomialSet { vectors, orders, lambda0, frame: Frame::Separated })
}

/// `R(μ) = Σ_h (Z^h A†) μ^h` with `A†` the block inverse of the `A` stairs
/// and `Z = -A† E`; satisfies `(A + μE) R(μ) = I`.
pub fn right_inverse(red: &BlockPencil, lambda0: C64) -> Result<RightInverse> {
    check_singular_shape(red)?;
    let (m, n) = (red.rows(), red.cols());
    let k = red.col_blocks.len();
    let ro = red.row_offsets();
    let co = red.col_offsets();
    let mut pinv = CMatrix::zeros(n, m);
    for i in 0..k {
        let s = red.row_blocks[i];
        if s == 0 {
            continue;
        }
        let a = red.a_stair(i).upper_triangle();
        let inv = solve_upper(&a, &CMatrix::identity(s, s)).map_err(|_| singular_stair("A"))?;
        pinv.view_mut((co[i + 1], ro[i]), (s, s)).copy_from(&inv);
    }
    let z = -(&pinv * &red.e);
    let mut coeffs = vec![pinv];
    for _ in 1..k.max(1) {
        let next = &z * coeffs.last().expect("nonempty");
        if next.iter().all(|x| *x == C64::new(0.0, 0.0)) {
            break;
        }
        coeffs.push(next);
    }
    Ok(RightInverse { r: PolyMatrix::new(coeffs, lambda0)?, frame: Frame::Separated })
}

/// Embeds separated-frame results into the columns of the input pencil via
/// the right transformation of `sep`; the zero blocks of the other parts are
/// implicit.
pub fn lift_to_original(
    sep: &SeparatedForm,
    basis: &MinimalBasis,
    roots: &RootPolynomialSet,
) -> Result<(MinimalBasis, RootPolynomialSet)> {
    let nr = sep.partition.red_cols.len();
    let nb = sep.partition.blue_cols.len();
    if basis.frame != Frame::Separated || roots.frame != Frame::Separated {
        return Err(PencilError::input("results are not in the separated frame"));
    }
    if basis.n.rows() != nr || roots.vectors.iter().any(|v| v.rows() != nb) {
        return Err(PencilError::input("results do not match the separated form"));
    }
    let red_map = sep.right.columns(0, nr).into_owned();
    let blue_map = sep.right.columns(nr, nb).into_owned();
    let lifted_basis = MinimalBasis {
        n: basis.n.left_mul(&red_map),
        degrees: basis.degrees.clone(),
        frame: Frame::Original,
    };
    let lifted_roots = RootPolynomialSet {
        vectors: roots.vectors.iter().map(|v| v.left_mul(&blue_map)).collect(),
        orders: roots.orders.clone(),
        lambda0: roots.lambda0,
        frame: Frame::Original,
    };
    Ok((lifted_basis, lifted_roots))
}

fn convolve(p: &[CMatrix], q: &[CMatrix], len: usize) -> Vec<CMatrix> {
    let rows = p[0].nrows();
    let cols = q[0].ncols();
    (0..len)
        .map(|d| {
            let mut c = CMatrix::zeros(rows, cols);
            for (i, pi) in p.iter().enumerate().take(d + 1) {
                if let Some(qj) = q.get(d - i) {
                    c += pi * qj;
                }
            }
            c
        })
        .collect()
}

/// Red component `u = -R(μ) C(μ) v(μ) mod μ^order` that completes a blue
/// zero direction `v` when the red and blue parts are still coupled through
/// `C(μ) = coupling_a + μ coupling_e`.
pub fn coupled_root_component(
    red: &BlockPencil,
    coupling_a: &CMatrix,
    coupling_e: &CMatrix,
    v: &PolyMatrix,
    order: usize,
) -> Result<PolyMatrix> {
    let r = right_inverse(red, v.lambda0())?;
    let cv = v.pencil_product(coupling_a, coupling_e);
    let u = convolve(r.r.coeffs(), cv.coeffs(), order.max(1));
    PolyMatrix::new(u.into_iter().map(|c| -c).collect(), v.lambda0())
}
