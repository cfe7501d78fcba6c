//! Unitary staircase reduction of a shifted pencil and its Wong chains.

use crate::error::Result;
use crate::linalg::{col_compress, default_tolerance, identity, row_compress, CMatrix, RankDecision, C64};
use crate::pencil::{indices_from_staircase, LocalIndices, ShiftedPencil};

/// Rank decisions taken at one staircase step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecision {
    /// Column compression of the remaining `A` rows (its nullity is `t_i`).
    pub null_space: RankDecision,
    /// Row compression of the new `E` columns (its rank is `s_i`).
    pub image: RankDecision,
}

/// `U^H (Lhat0 + μ Lhat1) V = A + μ E` in staircase form.
///
/// Block row `i` (height `s[i]`) carries `E_{i,i}` of full row rank in block
/// column `i` (width `t[i]`) and `A_{i,i+1}` of full column rank in block
/// column `i+1`. Rows and columns past the staircase form the tail block.
#[derive(Debug, Clone)]
pub struct StaircaseForm {
    pub u: CMatrix,
    pub v: CMatrix,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub a: CMatrix,
    pub e: CMatrix,
    pub tail_rows: usize,
    pub tail_cols: usize,
    pub decisions: Vec<StepDecision>,
    /// Decision that ended the reduction, when one was needed.
    pub final_decision: Option<RankDecision>,
    pub tol: f64,
}

/// Offsets of consecutive blocks: `offsets(&[2, 3]) == [0, 2, 5]`.
pub fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

impl StaircaseForm {
    pub fn k(&self) -> usize {
        self.t.len()
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn row_offsets(&self) -> Vec<usize> {
        offsets(&self.s)
    }

    pub fn col_offsets(&self) -> Vec<usize> {
        offsets(&self.t)
    }

    pub fn local_indices(&self) -> LocalIndices {
        indices_from_staircase(&self.s, &self.t).expect("staircase produces monotone indices")
    }

    /// Frobenius norm of `U (A + μE) V^H - (Lhat0 + μ Lhat1)`, split per
    /// coefficient and summed.
    pub fn backward_error(&self, sp: &ShiftedPencil) -> f64 {
        let vh = self.v.adjoint();
        (&self.u * &self.a * &vh - &sp.lhat0).norm() + (&self.u * &self.e * &vh - &sp.lhat1).norm()
    }
}

/// Staircase reduction of `sp` with absolute rank tolerance `tol` (default
/// `sqrt(max(m,n)·eps)·max(‖Lhat0‖₂,‖Lhat1‖₂)`).
///
/// Each step splits off the null space of `A` restricted to the rows not yet
/// reduced, then compresses the image of those columns under `E`. The loop
/// stops when the null space is trivial.
pub fn staircase_reduce(sp: &ShiftedPencil, tol: Option<f64>) -> Result<StaircaseForm> {
    let (m, n) = (sp.rows(), sp.cols());
    let tol = match tol {
        Some(t) => t,
        None => default_tolerance(m, n, sp.scale()?),
    };
    let mut a = sp.lhat0.clone();
    let mut e = sp.lhat1.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let (mut s, mut t) = (Vec::new(), Vec::new());
    let mut decisions = Vec::new();
    let mut final_decision = None;
    let (mut r0, mut c0) = (0, 0);
    let zero = C64::new(0.0, 0.0);

    while c0 < n {
        if r0 == m {
            // No rows left: every remaining column is annihilated by A.
            t.push(n - c0);
            s.push(0);
            break;
        }
        let cc = col_compress(&a.view((r0, c0), (m - r0, n - c0)).into_owned(), tol)?;
        let null = cc.nullity();
        if null == 0 {
            final_decision = Some(cc.decision);
            break;
        }
        apply_right(&mut a, c0, &cc.v);
        apply_right(&mut e, c0, &cc.v);
        apply_right(&mut v, c0, &cc.v);
        a.view_mut((r0, c0), (m - r0, null)).fill(zero);

        let rc = row_compress(&e.view((r0, c0), (m - r0, null)).into_owned(), tol)?;
        let rank = rc.decision.rank;
        apply_left_adjoint(&mut a, r0, &rc.q);
        apply_left_adjoint(&mut e, r0, &rc.q);
        apply_right_rows(&mut u, r0, &rc.q);
        e.view_mut((r0 + rank, c0), (m - r0 - rank, null)).fill(zero);

        decisions.push(StepDecision { null_space: cc.decision, image: rc.decision });
        s.push(rank);
        t.push(null);
        r0 += rank;
        c0 += null;
    }

    Ok(StaircaseForm {
        u,
        v,
        tail_rows: m - s.iter().sum::<usize>(),
        tail_cols: n - t.iter().sum::<usize>(),
        s,
        t,
        a,
        e,
        decisions,
        final_decision,
        tol,
    })
}

/// `M[:, c0..] <- M[:, c0..] · W`
fn apply_right(m: &mut CMatrix, c0: usize, w: &CMatrix) {
    let width = w.nrows();
    let block = m.columns(c0, width) * w;
    m.columns_mut(c0, width).copy_from(&block);
}

/// `M[r0.., :] <- Q^H · M[r0.., :]`
fn apply_left_adjoint(m: &mut CMatrix, r0: usize, q: &CMatrix) {
    let height = q.nrows();
    let block = q.adjoint() * m.rows(r0, height);
    m.rows_mut(r0, height).copy_from(&block);
}

/// `U[:, r0..] <- U[:, r0..] · Q`
fn apply_right_rows(u: &mut CMatrix, r0: usize, q: &CMatrix) {
    apply_right(u, r0, q)
}

/// Dimensions of the Wong chains `V_i`, `U_i` spanned by leading columns of
/// `V` and `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WongChain {
    pub dims_u: Vec<usize>,
    pub dims_v: Vec<usize>,
}

pub fn wong_chain(sf: &StaircaseForm) -> WongChain {
    WongChain {
        dims_u: offsets(&sf.s)[1..].to_vec(),
        dims_v: offsets(&sf.t)[1..].to_vec(),
    }
}
