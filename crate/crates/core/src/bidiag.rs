//! From staircase form to the decoupled block bidiagonal form.
//!
//! The stairs are first made triangular by unitary transformations inside
//! each block. Unit upper triangular row and column operations then remove
//! every block that is not a stair, the index sets are split into a singular
//! (red) and a nilpotent (blue) part, and the two parts are decoupled and
//! permuted apart. Optionally all stairs are normalized to identities.

use crate::error::{PencilError, Result};
use crate::linalg::{identity, ql_upper, rq_upper, solve_upper, solve_upper_right, CMatrix, C64, EPS};
use crate::staircase::{offsets, StaircaseForm};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Staircase form whose stairs are `E_{i,i} = [0 Ê]` and `A_{i,i+1} = [Â; 0]`
/// with `Ê`, `Â` upper triangular.
#[derive(Debug, Clone)]
pub struct TriangularStairForm {
    pub stairs: StaircaseForm,
}

impl TriangularStairForm {
    pub fn s(&self) -> &[usize] {
        &self.stairs.s
    }

    pub fn t(&self) -> &[usize] {
        &self.stairs.t
    }
}

pub fn triangularize_stairs(sf: &StaircaseForm) -> Result<TriangularStairForm> {
    let mut f = sf.clone();
    let k = f.k();
    if k == 0 {
        return Ok(TriangularStairForm { stairs: f });
    }
    let ro = offsets(&f.s);
    let co = offsets(&f.t);
    triangularize_e_stair(&mut f, k - 1, &ro, &co)?;
    for i in (0..k - 1).rev() {
        let (si, tn) = (f.s[i], f.t[i + 1]);
        let blk = f.a.view((ro[i], co[i + 1]), (si, tn)).into_owned();
        let (uq, ahat) = ql_upper(&blk, f.tol)?;
        let uh = uq.adjoint();
        let rows = &uh * f.a.rows(ro[i], si);
        f.a.rows_mut(ro[i], si).copy_from(&rows);
        let rows = &uh * f.e.rows(ro[i], si);
        f.e.rows_mut(ro[i], si).copy_from(&rows);
        let cols = f.u.columns(ro[i], si) * &uq;
        f.u.columns_mut(ro[i], si).copy_from(&cols);
        let mut stair = f.a.view_mut((ro[i], co[i + 1]), (si, tn));
        stair.fill(ZERO);
        stair.view_mut((0, 0), (tn, tn)).copy_from(&ahat);
        triangularize_e_stair(&mut f, i, &ro, &co)?;
    }
    Ok(TriangularStairForm { stairs: f })
}

fn triangularize_e_stair(f: &mut StaircaseForm, i: usize, ro: &[usize], co: &[usize]) -> Result<()> {
    let (si, ti) = (f.s[i], f.t[i]);
    if si == 0 {
        return Ok(());
    }
    let blk = f.e.view((ro[i], co[i]), (si, ti)).into_owned();
    let (vq, ehat) = rq_upper(&blk, f.tol)?;
    for m in [&mut f.a, &mut f.e, &mut f.v] {
        let cols = m.columns(co[i], ti) * &vq;
        m.columns_mut(co[i], ti).copy_from(&cols);
    }
    let mut stair = f.e.view_mut((ro[i], co[i]), (si, ti));
    stair.fill(ZERO);
    stair.view_mut((0, ti - si), (si, si)).copy_from(&ehat);
    Ok(())
}

/// Block positions shared by all later stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub ro: Vec<usize>,
    pub co: Vec<usize>,
}

impl Layout {
    pub fn new(s: &[usize], t: &[usize]) -> Self {
        Layout { s: s.to_vec(), t: t.to_vec(), ro: offsets(s), co: offsets(t) }
    }

    pub fn k(&self) -> usize {
        self.t.len()
    }

    /// Columns of block `i` holding `Ê_{i,i}`.
    fn e_pivot_cols(&self, i: usize) -> usize {
        self.co[i] + self.t[i] - self.s[i]
    }
}

/// `S^{-1} (A0 + μE0) T` in block bidiagonal form, where `A0 + μE0` is the
/// triangular stair form and `S`, `T` are unit upper triangular.
#[derive(Debug, Clone)]
pub struct BidiagonalForm {
    pub base: TriangularStairForm,
    pub layout: Layout,
    pub a: CMatrix,
    pub e: CMatrix,
    pub s_mat: CMatrix,
    pub t_mat: CMatrix,
    pub refinement_iterations: usize,
    /// `off_norm` after the first elimination and after every accepted
    /// refinement step.
    pub off_history: Vec<f64>,
    pub off_norm: f64,
    pub diverged: bool,
}

impl BidiagonalForm {
    /// `‖S W T^{-1} - W0‖_F` summed over both coefficients.
    pub fn reconstruction_error(&self) -> Result<f64> {
        let w0 = &self.base.stairs;
        let back = |w: &CMatrix, target: &CMatrix| -> Result<f64> {
            Ok((solve_upper_right(&(&self.s_mat * w), &self.t_mat)? - target).norm())
        };
        Ok(back(&self.a, &w0.a)? + back(&self.e, &w0.e)?)
    }
}

/// Frobenius norm of everything in the staircase columns that is neither a
/// stair nor exactly zero by construction.
pub fn off_norm(a: &CMatrix, e: &CMatrix, layout: &Layout) -> f64 {
    let k = layout.k();
    let cols = layout.co[k];
    let mut aa = a.columns(0, cols).into_owned();
    let mut ee = e.columns(0, cols).into_owned();
    for i in 0..k {
        ee.view_mut((layout.ro[i], layout.co[i]), (layout.s[i], layout.t[i])).fill(ZERO);
        if i + 1 < k {
            aa.view_mut((layout.ro[i], layout.co[i + 1]), (layout.s[i], layout.t[i + 1])).fill(ZERO);
        }
    }
    aa.norm() + ee.norm()
}

/// One sweep over the block rows, bottom to top. Row operations use the
/// `Â` stairs as pivots, column operations the `Ê` stairs.
fn elimination_pass(
    a: &mut CMatrix,
    e: &mut CMatrix,
    s_mat: &mut CMatrix,
    t_mat: &mut CMatrix,
    layout: &Layout,
) -> Result<()> {
    let k = layout.k();
    let Layout { s, t, ro, co } = layout;
    for i in (0..k.saturating_sub(1)).rev() {
        if s[i] == 0 {
            continue;
        }
        for l in i + 2..k {
            if t[l] == 0 {
                continue;
            }
            let pivot_rows = ro[l - 1];
            let ahat = a.view((pivot_rows, co[l]), (t[l], t[l])).upper_triangle();
            let target = a.view((ro[i], co[l]), (s[i], t[l])).into_owned();
            let x = solve_upper_right(&target, &ahat)?;
            for m in [&mut *a, &mut *e] {
                let update = &x * m.rows(pivot_rows, t[l]);
                let mut rows = m.rows_mut(ro[i], s[i]);
                rows -= update;
            }
            let update = s_mat.columns(ro[i], s[i]) * &x;
            let mut cols = s_mat.columns_mut(pivot_rows, t[l]);
            cols += update;
        }
        let pc = layout.e_pivot_cols(i);
        let ehat = e.view((ro[i], pc), (s[i], s[i])).upper_triangle();
        for l in i + 1..k {
            if t[l] == 0 {
                continue;
            }
            let target = e.view((ro[i], co[l]), (s[i], t[l])).into_owned();
            let z = solve_upper(&ehat, &target)?;
            for m in [&mut *a, &mut *e, &mut *t_mat] {
                let update = m.columns(pc, s[i]) * &z;
                let mut cols = m.columns_mut(co[l], t[l]);
                cols -= update;
            }
        }
    }
    Ok(())
}

pub fn block_bidiagonalize(tf: &TriangularStairForm) -> Result<BidiagonalForm> {
    let st = &tf.stairs;
    let layout = Layout::new(&st.s, &st.t);
    let mut a = st.a.clone();
    let mut e = st.e.clone();
    let mut s_mat = identity(st.rows());
    let mut t_mat = identity(st.cols());
    elimination_pass(&mut a, &mut e, &mut s_mat, &mut t_mat, &layout)?;
    let off = off_norm(&a, &e, &layout);
    Ok(BidiagonalForm {
        base: tf.clone(),
        layout,
        a,
        e,
        s_mat,
        t_mat,
        refinement_iterations: 0,
        off_history: vec![off],
        off_norm: off,
        diverged: false,
    })
}

/// Repeats the elimination on the current form to remove rounding residue.
///
/// A sweep is kept only if it lowers `off_norm`; two consecutive sweeps
/// without improvement set `diverged` and stop. The best iterate is returned.
pub fn refine(bf: &BidiagonalForm, max_iters: usize) -> Result<BidiagonalForm> {
    let w0 = &bf.base.stairs;
    let (m, n) = (w0.rows(), w0.cols());
    let target = EPS * w0.a.norm().max(w0.e.norm()) * (m + n) as f64;
    let mut best = bf.clone();
    let mut current = bf.clone();
    let mut misses = 0;
    for _ in 0..max_iters {
        if best.off_norm <= target {
            break;
        }
        elimination_pass(&mut current.a, &mut current.e, &mut current.s_mat, &mut current.t_mat, &current.layout)?;
        current.off_norm = off_norm(&current.a, &current.e, &current.layout);
        best.refinement_iterations += 1;
        if current.off_norm < best.off_norm {
            let iterations = best.refinement_iterations;
            let mut history = std::mem::take(&mut best.off_history);
            history.push(current.off_norm);
            best = current.clone();
            best.refinement_iterations = iterations;
            best.off_history = history;
            misses = 0;
        } else {
            misses += 1;
            if misses == 2 {
                best.diverged = true;
                break;
            }
        }
    }
    Ok(best)
}

/// Index sequences of one part of the split.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexPair {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

/// Splits `(s, t)` into the part carrying the right minimal indices (red,
/// square `A` stairs: `s_i = t_{i+1}`) and the part carrying the Jordan
/// structure at `λ0` (blue, square `E` stairs: `s_i = t_i`).
pub fn split_indices(s: &[usize], t: &[usize]) -> Result<(IndexPair, IndexPair)> {
    let k = t.len();
    let s = crate::pencil::validate_indices(s, t)?;
    let mut red = IndexPair { s: vec![0; k], t: vec![0; k] };
    let mut blue = IndexPair { s: vec![0; k], t: vec![0; k] };
    let broken = || PencilError::contract("index sets do not split into singular and nilpotent parts");
    let mut tb_next = 0;
    for i in (1..=k).rev() {
        let ti = t.get(i).copied().unwrap_or(0);
        let tr = ti.checked_sub(tb_next).ok_or_else(broken)?;
        if i < k {
            red.t[i] = tr;
        }
        red.s[i - 1] = tr;
        let sb = s[i - 1].checked_sub(tr).ok_or_else(broken)?;
        blue.s[i - 1] = sb;
        blue.t[i - 1] = sb;
        tb_next = sb;
    }
    if k > 0 {
        red.t[0] = t[0].checked_sub(blue.t[0]).ok_or_else(broken)?;
    }
    Ok((red, blue))
}

/// Pencil `A + μE` with block rows `row_blocks` and block columns
/// `col_blocks`; stairs sit at `E_{i,i}` and `A_{i,i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPencil {
    pub a: CMatrix,
    pub e: CMatrix,
    pub row_blocks: Vec<usize>,
    pub col_blocks: Vec<usize>,
}

impl BlockPencil {
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn row_offsets(&self) -> Vec<usize> {
        offsets(&self.row_blocks)
    }

    pub fn col_offsets(&self) -> Vec<usize> {
        offsets(&self.col_blocks)
    }

    pub fn e_stair(&self, i: usize) -> CMatrix {
        let (ro, co) = (self.row_offsets(), self.col_offsets());
        self.e.view((ro[i], co[i]), (self.row_blocks[i], self.col_blocks[i])).into_owned()
    }

    /// `A_{i,i+1}`; empty when `i+1` is past the last block.
    pub fn a_stair(&self, i: usize) -> CMatrix {
        let (ro, co) = (self.row_offsets(), self.col_offsets());
        let width = self.col_blocks.get(i + 1).copied().unwrap_or(0);
        let c0 = co.get(i + 1).copied().unwrap_or(self.cols());
        self.a.view((ro[i], c0), (self.row_blocks[i], width)).into_owned()
    }
}

fn gather(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn permute_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Row and column positions of the red, blue and tail parts, in the order
/// used by the separated form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub red_rows: Vec<usize>,
    pub blue_rows: Vec<usize>,
    pub tail_rows: Vec<usize>,
    pub red_cols: Vec<usize>,
    pub blue_cols: Vec<usize>,
    pub tail_cols: Vec<usize>,
}

impl Partition {
    fn new(layout: &Layout, red: &IndexPair, m: usize, n: usize) -> Self {
        let mut p = Partition {
            red_rows: Vec::new(),
            blue_rows: Vec::new(),
            tail_rows: (layout.ro[layout.k()]..m).collect(),
            red_cols: Vec::new(),
            blue_cols: Vec::new(),
            tail_cols: (layout.co[layout.k()]..n).collect(),
        };
        for i in 0..layout.k() {
            let (r0, c0) = (layout.ro[i], layout.co[i]);
            p.red_rows.extend(r0..r0 + red.s[i]);
            p.blue_rows.extend(r0 + red.s[i]..r0 + layout.s[i]);
            p.red_cols.extend(c0..c0 + red.t[i]);
            p.blue_cols.extend(c0 + red.t[i]..c0 + layout.t[i]);
        }
        p
    }

    pub fn row_perm(&self) -> Vec<usize> {
        [&self.red_rows[..], &self.blue_rows, &self.tail_rows].concat()
    }

    pub fn col_perm(&self) -> Vec<usize> {
        [&self.red_cols[..], &self.blue_cols, &self.tail_cols].concat()
    }
}

/// Decoupled bidiagonal form.
///
/// In staircase order `S^{-1} U^H (Lhat0 + μLhat1) V T = W` where `W`
/// (`a`, `e`) has no coupling between the red and the blue part. After the
/// permutations `[red | blue | tail]` the pencil is block upper triangular
/// with diagonal blocks `eps_pencil`, `zero_pencil` and the tail.
#[derive(Debug, Clone)]
pub struct SeparatedForm {
    pub layout: Layout,
    pub red: IndexPair,
    pub blue: IndexPair,
    pub partition: Partition,
    pub u: CMatrix,
    pub v: CMatrix,
    pub s_mat: CMatrix,
    pub t_mat: CMatrix,
    pub a: CMatrix,
    pub e: CMatrix,
    /// `U·S·Π1`, columns in `[red | blue | tail]` order.
    pub left: CMatrix,
    /// `V·T·Π2`, columns in `[red | blue | tail]` order.
    pub right: CMatrix,
    pub eps_pencil: BlockPencil,
    pub zero_pencil: BlockPencil,
    /// Red rows by blue columns before decoupling, as `(A part, E part)`.
    pub coupling: (CMatrix, CMatrix),
    pub tol: f64,
}

impl SeparatedForm {
    /// `(a, e)` permuted to `[red | blue | tail]` order.
    pub fn permuted(&self) -> (CMatrix, CMatrix) {
        let rp = self.partition.row_perm();
        let cp = self.partition.col_perm();
        (gather(&self.a, &rp, &cp), gather(&self.e, &rp, &cp))
    }

    /// Norm of what must vanish below the diagonal blocks, plus the residual
    /// coupling between the red and blue parts.
    pub fn block_triangularity_error(&self) -> f64 {
        let p = &self.partition;
        let mut err = 0.0;
        for m in [&self.a, &self.e] {
            let red_cols: Vec<usize> = p.red_cols.clone();
            let below_red = [&p.blue_rows[..], &p.tail_rows].concat();
            err += gather(m, &below_red, &red_cols).norm_squared();
            err += gather(m, &p.tail_rows, &p.blue_cols).norm_squared();
            err += gather(m, &p.red_rows, &p.blue_cols).norm_squared();
        }
        err.sqrt()
    }
}

/// Removes the red/blue coupling with unit upper triangular operations,
/// working from the last block upwards.
fn decouple(
    a: &mut CMatrix,
    e: &mut CMatrix,
    s_mat: &mut CMatrix,
    t_mat: &mut CMatrix,
    layout: &Layout,
    red: &IndexPair,
    blue: &IndexPair,
) -> Result<()> {
    let Layout { ro, co, .. } = layout;
    for i in (0..layout.k()).rev() {
        let (sr, sb) = (red.s[i], blue.s[i]);
        if sr > 0 && sb > 0 {
            let red_rows = ro[i];
            let pivot_cols = co[i] + red.t[i] - sr;
            let blue_cols = co[i] + red.t[i];
            let e11 = e.view((red_rows, pivot_cols), (sr, sr)).upper_triangle();
            let e12 = e.view((red_rows, blue_cols), (sr, sb)).into_owned();
            let z = solve_upper(&e11, &e12)?;
            for m in [&mut *a, &mut *e, &mut *t_mat] {
                let update = m.columns(pivot_cols, sr) * &z;
                let mut cols = m.columns_mut(blue_cols, sb);
                cols -= update;
            }
        }
        if i == 0 {
            continue;
        }
        let (sr_prev, tb) = (red.s[i - 1], blue.t[i]);
        if sr_prev > 0 && tb > 0 {
            let red_rows = ro[i - 1];
            let pivot_rows = ro[i - 1] + sr_prev;
            let blue_cols = co[i] + red.t[i];
            let a12 = a.view((red_rows, blue_cols), (sr_prev, tb)).into_owned();
            let a22 = a.view((pivot_rows, blue_cols), (tb, tb)).upper_triangle();
            let x = solve_upper_right(&a12, &a22)?;
            for m in [&mut *a, &mut *e] {
                let update = &x * m.rows(pivot_rows, tb);
                let mut rows = m.rows_mut(red_rows, sr_prev);
                rows -= update;
            }
            let update = s_mat.columns(red_rows, sr_prev) * &x;
            let mut cols = s_mat.columns_mut(pivot_rows, tb);
            cols += update;
        }
    }
    Ok(())
}

pub fn split_structure(bf: &BidiagonalForm) -> Result<SeparatedForm> {
    let layout = bf.layout.clone();
    let (red, blue) = split_indices(&layout.s, &layout.t)?;
    let st = &bf.base.stairs;
    let (m, n) = (st.rows(), st.cols());
    let partition = Partition::new(&layout, &red, m, n);

    let coupling = (
        gather(&bf.a, &partition.red_rows, &partition.blue_cols),
        gather(&bf.e, &partition.red_rows, &partition.blue_cols),
    );
    let (mut a, mut e) = (bf.a.clone(), bf.e.clone());
    let (mut s_mat, mut t_mat) = (bf.s_mat.clone(), bf.t_mat.clone());
    decouple(&mut a, &mut e, &mut s_mat, &mut t_mat, &layout, &red, &blue)?;

    let left = permute_columns(&(&st.u * &s_mat), &partition.row_perm());
    let right = permute_columns(&(&st.v * &t_mat), &partition.col_perm());
    let eps_pencil = BlockPencil {
        a: gather(&a, &partition.red_rows, &partition.red_cols),
        e: gather(&e, &partition.red_rows, &partition.red_cols),
        row_blocks: red.s.clone(),
        col_blocks: red.t.clone(),
    };
    let zero_pencil = BlockPencil {
        a: gather(&a, &partition.blue_rows, &partition.blue_cols),
        e: gather(&e, &partition.blue_rows, &partition.blue_cols),
        row_blocks: blue.s.clone(),
        col_blocks: blue.t.clone(),
    };
    Ok(SeparatedForm {
        layout,
        red,
        blue,
        partition,
        u: st.u.clone(),
        v: st.v.clone(),
        s_mat,
        t_mat,
        a,
        e,
        left,
        right,
        eps_pencil,
        zero_pencil,
        coupling,
        tol: st.tol,
    })
}

/// Bidiagonal form with every stair equal to an identity block:
/// `P^{-1} W Q` with block diagonal upper triangular `P`, `Q`.
#[derive(Debug, Clone)]
pub struct KroneckerForm {
    pub a: CMatrix,
    pub e: CMatrix,
    /// `S·P`, upper triangular.
    pub s_prime: CMatrix,
    /// `T·Q`, upper triangular.
    pub t_prime: CMatrix,
    pub layout: Layout,
    pub red: IndexPair,
    pub blue: IndexPair,
    pub partition: Partition,
}

impl KroneckerForm {
    /// The exact 0/1 pattern the stairs are normalized to, restricted to the
    /// staircase columns (tail columns are copied from the computed form).
    pub fn ideal(&self) -> (CMatrix, CMatrix) {
        let (m, n) = self.a.shape();
        let mut a = CMatrix::zeros(m, n);
        let mut e = CMatrix::zeros(m, n);
        let stair_cols = self.layout.co[self.layout.k()];
        a.columns_mut(stair_cols, n - stair_cols).copy_from(&self.a.columns(stair_cols, n - stair_cols));
        e.columns_mut(stair_cols, n - stair_cols).copy_from(&self.e.columns(stair_cols, n - stair_cols));
        let Layout { s, t, ro, co } = &self.layout;
        let one = C64::new(1.0, 0.0);
        for i in 0..self.layout.k() {
            for j in 0..s[i] {
                e[(ro[i] + j, co[i] + t[i] - s[i] + j)] = one;
            }
            if i + 1 < self.layout.k() {
                for j in 0..t[i + 1] {
                    a[(ro[i] + j, co[i + 1] + j)] = one;
                }
            }
        }
        (a, e)
    }

    /// Distance to [`KroneckerForm::ideal`] over the staircase columns.
    pub fn pattern_error(&self) -> f64 {
        let (a, e) = self.ideal();
        (&a - &self.a).norm() + (&e - &self.e).norm()
    }

    pub fn red_pencil(&self) -> BlockPencil {
        let p = &self.partition;
        BlockPencil {
            a: gather(&self.a, &p.red_rows, &p.red_cols),
            e: gather(&self.e, &p.red_rows, &p.red_cols),
            row_blocks: self.red.s.clone(),
            col_blocks: self.red.t.clone(),
        }
    }

    pub fn blue_pencil(&self) -> BlockPencil {
        let p = &self.partition;
        BlockPencil {
            a: gather(&self.a, &p.blue_rows, &p.blue_cols),
            e: gather(&self.e, &p.blue_rows, &p.blue_cols),
            row_blocks: self.blue.s.clone(),
            col_blocks: self.blue.t.clone(),
        }
    }
}

pub fn kronecker_normalize(sep: &SeparatedForm) -> Result<KroneckerForm> {
    let (m, n) = sep.a.shape();
    let Layout { ro, co, .. } = &sep.layout;
    let k = sep.layout.k();
    let (red, blue) = (&sep.red, &sep.blue);
    let mut p = identity(m);
    let mut q = identity(n);
    let (a, e) = (&sep.a, &sep.e);
    let check = |d: &CMatrix| -> Result<()> {
        if (0..d.nrows()).any(|i| d[(i, i)].norm() <= sep.tol) {
            Err(PencilError::contract("stair with a vanishing pivot"))
        } else {
            Ok(())
        }
    };

    // red chain: E stairs [0 Ê], square A stairs
    let mut qb = identity(red.t.first().copied().unwrap_or(0));
    for i in 0..k {
        let (tr, sr) = (red.t[i], red.s[i]);
        q.view_mut((co[i], co[i]), (tr, tr)).copy_from(&qb);
        let ehat = e.view((ro[i], co[i] + tr - sr), (sr, sr)).upper_triangle();
        check(&ehat)?;
        let pb = &ehat * qb.view((tr - sr, tr - sr), (sr, sr));
        p.view_mut((ro[i], ro[i]), (sr, sr)).copy_from(&pb);
        if i + 1 < k {
            let ahat = a.view((ro[i], co[i + 1]), (sr, red.t[i + 1])).upper_triangle();
            check(&ahat)?;
            qb = solve_upper(&ahat, &pb)?;
        }
    }

    // blue chain: square E stairs, A stairs [Â; 0]
    let mut qb = identity(blue.t.first().copied().unwrap_or(0));
    for i in 0..k {
        let (r0, c0) = (ro[i] + red.s[i], co[i] + red.t[i]);
        let sb = blue.s[i];
        q.view_mut((c0, c0), (sb, sb)).copy_from(&qb);
        let ehat = e.view((r0, c0), (sb, sb)).upper_triangle();
        check(&ehat)?;
        let pb = &ehat * &qb;
        p.view_mut((r0, r0), (sb, sb)).copy_from(&pb);
        if i + 1 < k {
            let tb = blue.t[i + 1];
            let ahat = a.view((r0, co[i + 1] + red.t[i + 1]), (tb, tb)).upper_triangle();
            check(&ahat)?;
            qb = solve_upper(&ahat, &pb.view((0, 0), (tb, tb)).into_owned())?;
        }
    }

    Ok(KroneckerForm {
        a: solve_upper(&p, &(a * &q))?,
        e: solve_upper(&p, &(e * &q))?,
        s_prime: &sep.s_mat * &p,
        t_prime: &sep.t_mat * &q,
        layout: sep.layout.clone(),
        red: red.clone(),
        blue: blue.clone(),
        partition: sep.partition.clone(),
    })
}
