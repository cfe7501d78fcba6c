//! The full reduction chained together.

use crate::bidiag::{
    block_bidiagonalize, kronecker_normalize, refine, split_structure, triangularize_stairs, BidiagonalForm,
    KroneckerForm, SeparatedForm,
};
use crate::error::Result;
use crate::extract::{lift_to_original, minimal_basis, right_inverse, root_polynomials, MinimalBasis, RightInverse, RootPolynomialSet};
use crate::linalg::{default_tolerance, C64};
use crate::oracle::{residual_report, toeplitz_structure, ResidualReport, ToeplitzReport};
use crate::pencil::{make_shifted, Pencil, PolyMatrix, ShiftedPencil, StructuralIndices};
use crate::staircase::{staircase_reduce, wong_chain, StaircaseForm, WongChain};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub lambda0: C64,
    /// Absolute rank tolerance; see [`crate::linalg::default_tolerance`].
    pub tol: Option<f64>,
    pub refine_iters: usize,
    /// Also run the Toeplitz oracle.
    pub verify: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { lambda0: C64::new(0.0, 0.0), tol: None, refine_iters: 2, verify: false }
    }
}

/// Every intermediate form of the right-side reduction together with its
/// results. `basis` and `roots` are in original coordinates; the right
/// inverse stays in the frame of the singular part.
#[derive(Debug, Clone)]
pub struct RightStructure {
    pub staircase: StaircaseForm,
    pub wong: WongChain,
    pub bidiagonal: BidiagonalForm,
    pub separated: SeparatedForm,
    pub kronecker: KroneckerForm,
    pub basis: MinimalBasis,
    pub roots: RootPolynomialSet,
    pub right_inverse: RightInverse,
    /// Results before the lift, in separated coordinates.
    pub basis_separated: MinimalBasis,
    pub roots_separated: RootPolynomialSet,
}

pub fn right_structure(sp: &ShiftedPencil, tol: Option<f64>, refine_iters: usize) -> Result<RightStructure> {
    let staircase = staircase_reduce(sp, tol)?;
    let wong = wong_chain(&staircase);
    let tri = triangularize_stairs(&staircase)?;
    let bidiagonal = refine(&block_bidiagonalize(&tri)?, refine_iters)?;
    let separated = split_structure(&bidiagonal)?;
    let kronecker = kronecker_normalize(&separated)?;
    let basis_separated = minimal_basis(&separated.eps_pencil, sp.lambda0)?;
    let roots_separated = root_polynomials(&separated.zero_pencil, sp.lambda0)?;
    let right_inverse = right_inverse(&separated.eps_pencil, sp.lambda0)?;
    let (basis, roots) = lift_to_original(&separated, &basis_separated, &roots_separated)?;
    Ok(RightStructure {
        staircase,
        wong,
        bidiagonal,
        separated,
        kronecker,
        basis,
        roots,
        right_inverse,
        basis_separated,
        roots_separated,
    })
}

/// Left minimal indices with a basis `Y(λ)` such that `Y(λ)^T L(λ) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftStructure {
    pub left_minimal: Vec<usize>,
    pub basis: PolyMatrix,
}

/// Runs the right-side reduction on `L0^H + ν L1^H` at `conj(λ0)` and maps
/// the basis back by conjugating its coefficients.
pub fn left_structure(p: &Pencil, lambda0: C64, tol: Option<f64>, refine_iters: usize) -> Result<LeftStructure> {
    let sp = make_shifted(&p.adjoint(), lambda0.conj())?;
    let rs = right_structure(&sp, tol, refine_iters)?;
    let coeffs = rs.basis.n.coeffs().iter().map(|c| c.map(|z| z.conj())).collect();
    Ok(LeftStructure { left_minimal: rs.basis.degrees, basis: PolyMatrix::new(coeffs, lambda0)? })
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub shifted: ShiftedPencil,
    pub tol: f64,
    pub indices: StructuralIndices,
    pub right: RightStructure,
    pub left: LeftStructure,
    /// Whether `m - rank` agrees with the number of left minimal indices.
    pub rank_consistent: bool,
    pub residuals: ResidualReport,
    pub toeplitz: Option<ToeplitzReport>,
}

pub fn analyze(p: &Pencil, opts: &AnalysisOptions) -> Result<Analysis> {
    let sp = make_shifted(p, opts.lambda0)?;
    let tol = match opts.tol {
        Some(t) => t,
        None => default_tolerance(sp.rows(), sp.cols(), sp.scale()?),
    };
    let right = right_structure(&sp, Some(tol), opts.refine_iters)?;
    let left = left_structure(p, opts.lambda0, Some(tol), opts.refine_iters)?;
    let local = right.staircase.local_indices();
    let normal_rank = sp.cols() - local.right_minimal.len();
    let indices = StructuralIndices {
        right_minimal: local.right_minimal,
        left_minimal: left.left_minimal.clone(),
        partial_multiplicities: local.partial_multiplicities,
        normal_rank,
    };
    let rank_consistent = sp.rows() - normal_rank == indices.left_minimal.len();
    let residuals = residual_report(&sp, &right.separated, &right.kronecker, &right.basis, &right.roots)?;
    let toeplitz = if opts.verify { Some(toeplitz_structure(&sp, None, None)?) } else { None };
    Ok(Analysis { shifted: sp, tol, indices, right, left, rank_consistent, residuals, toeplitz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, random_pencil, GeneratorSpec};
    use crate::linalg::{identity, CMatrix};
    use crate::oracle::verify_zero_direction;

    #[test]
    fn all_lambda_example() {
        let l1 = CMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        let p = Pencil::new(CMatrix::zeros(2, 2), l1).unwrap();
        let an = analyze(&p, &AnalysisOptions { verify: true, ..Default::default() }).unwrap();
        assert_eq!(an.indices.right_minimal, vec![0]);
        assert_eq!(an.indices.partial_multiplicities, vec![1]);
        assert_eq!(an.indices.left_minimal, vec![0]);
        assert_eq!(an.indices.normal_rank, 1);
        assert!(an.rank_consistent);
        let tz = an.toeplitz.unwrap();
        assert_eq!(tz.right_minimal(), an.indices.right_minimal);
        // left basis annihilates from the left
        let y = &an.left.basis;
        for z in [C64::new(0.3, 0.1), C64::new(-1.0, 2.0)] {
            let prod = y.eval_at_lambda(z).transpose() * p.eval(z);
            assert!(prod.norm() < 1e-14);
        }
    }

    #[test]
    fn identity_pencil_has_empty_outputs() {
        let p = Pencil::new(identity(3), CMatrix::zeros(3, 3)).unwrap();
        let an = analyze(&p, &AnalysisOptions::default()).unwrap();
        assert!(an.indices.right_minimal.is_empty());
        assert!(an.right.roots.vectors.is_empty());
        assert_eq!(an.right.basis.n.cols(), 0);
    }

    #[test]
    fn structure_at_nonzero_point() {
        let lambda0 = C64::new(0.5, -1.5);
        for seed in 0..4 {
            let spec = GeneratorSpec::new(vec![4, 2, 0], vec![5, 3, 1], seed).disguised().with_tail(2).with_lambda0(lambda0);
            let p = generate(&spec).unwrap();
            let an = analyze(&p, &AnalysisOptions { lambda0, ..Default::default() }).unwrap();
            assert_eq!(an.indices.right_minimal, vec![0, 1, 2]);
            assert_eq!(an.indices.partial_multiplicities, vec![1, 2]);
            for (v, &l) in an.right.roots.vectors.iter().zip(&an.right.roots.orders) {
                assert!(verify_zero_direction(&an.shifted, v, l, None).unwrap().valid);
                assert!(!verify_zero_direction(&an.shifted, v, l + 1, None).unwrap().valid);
            }
            // at zero the same pencil has no eigenvalue structure
            let at_zero = analyze(&p, &AnalysisOptions::default()).unwrap();
            assert!(at_zero.indices.partial_multiplicities.is_empty());
            assert_eq!(at_zero.indices.right_minimal, vec![0, 1, 2]);
        }
    }

    #[test]
    fn left_structure_of_transposed_pattern() {
        let p = generate(&GeneratorSpec::new(vec![4, 2, 0], vec![5, 3, 1], 8).disguised()).unwrap();
        let pt = Pencil::new(p.l0.transpose(), p.l1.transpose()).unwrap();
        let ls = left_structure(&pt, C64::new(0.0, 0.0), None, 2).unwrap();
        assert_eq!(ls.left_minimal, vec![0, 1, 2]);
        let right = left_structure(&Pencil::new(CMatrix::from_row_slice(1, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]), CMatrix::from_row_slice(1, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])).unwrap(), C64::new(0.0, 0.0), None, 2).unwrap();
        assert!(right.left_minimal.is_empty());
    }

    #[test]
    fn symmetric_pencil_has_equal_left_and_right_indices() {
        let g = random_pencil(4, 4, 3);
        let x = CMatrix::from_fn(4, 2, |i, j| g.l0[(i, j)]);
        let sym = &x * x.transpose();
        let y = CMatrix::from_fn(4, 1, |i, _| g.l1[(i, 0)]);
        let sym1 = &y * y.transpose();
        let p = Pencil::new(sym, sym1).unwrap();
        let an = analyze(&p, &AnalysisOptions::default()).unwrap();
        assert_eq!(an.indices.left_minimal, an.indices.right_minimal);
        assert!(!an.indices.right_minimal.is_empty());
    }
}
