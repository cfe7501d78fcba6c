//! Machine-readable analysis report.

use pencil_core::oracle::{ResidualReport, ToeplitzReport};
use pencil_core::{Analysis, PolyMatrix, StructuralIndices};
use serde::Serialize;

use crate::document::{matrix_to_rows, Entry};

#[derive(Debug, Clone, Serialize)]
pub struct IndicesOut {
    pub right_minimal: Vec<usize>,
    pub left_minimal: Vec<usize>,
    pub partial_multiplicities: Vec<usize>,
    pub normal_rank: usize,
}

impl From<&StructuralIndices> for IndicesOut {
    fn from(s: &StructuralIndices) -> Self {
        IndicesOut {
            right_minimal: s.right_minimal.clone(),
            left_minimal: s.left_minimal.clone(),
            partial_multiplicities: s.partial_multiplicities.clone(),
            normal_rank: s.normal_rank,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequencePair {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisOut {
    pub degrees: Vec<usize>,
    /// `coefficients[d]` multiplies the `d`-th power, an `n×p` matrix.
    pub coefficients: Vec<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootOut {
    pub order: usize,
    /// `coefficients[d]` multiplies the `d`-th power, a vector of length `n`.
    pub coefficients: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementOut {
    pub iterations: usize,
    pub off_history: Vec<f64>,
    pub diverged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualsOut {
    pub eps_kappa: f64,
    pub back: f64,
    pub off: f64,
    #[serde(rename = "resN")]
    pub res_n: f64,
    #[serde(rename = "normN")]
    pub norm_n: f64,
    #[serde(rename = "resR")]
    pub res_r: f64,
    #[serde(rename = "normR")]
    pub norm_r: f64,
}

impl From<&ResidualReport> for ResidualsOut {
    fn from(r: &ResidualReport) -> Self {
        ResidualsOut {
            eps_kappa: r.eps_kappa,
            back: r.back,
            off: r.off,
            res_n: r.res_n,
            norm_n: r.norm_n,
            res_r: r.res_r,
            norm_r: r.norm_r,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToeplitzOut {
    pub kmax: usize,
    pub mu: Vec<usize>,
    pub nu: Vec<usize>,
    pub r: Vec<usize>,
    pub right_minimal: Vec<usize>,
    pub left_minimal: Vec<usize>,
    pub partial_multiplicities: Vec<usize>,
    pub normal_rank: usize,
    pub complete: bool,
    /// Whether every count matches the staircase result.
    pub agrees: bool,
}

impl ToeplitzOut {
    fn new(t: &ToeplitzReport, ours: &StructuralIndices) -> Self {
        let (right, left, pm) = (t.right_minimal(), t.left_minimal(), t.partial_multiplicities());
        let agrees = right == ours.right_minimal
            && left == ours.left_minimal
            && pm == ours.partial_multiplicities
            && t.normal_rank == ours.normal_rank;
        ToeplitzOut {
            kmax: t.kmax,
            mu: t.mu.clone(),
            nu: t.nu.clone(),
            r: t.r.clone(),
            right_minimal: right,
            left_minimal: left,
            partial_multiplicities: pm,
            normal_rank: t.normal_rank,
            complete: t.complete,
            agrees,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub m: usize,
    pub n: usize,
    pub lambda0: String,
    /// `"lambda-lambda0"` or `"lambda"`: the variable the coefficient lists
    /// are powers of.
    pub variable: String,
    pub tol: f64,
    pub indices: IndicesOut,
    pub rank_consistent: bool,
    pub staircase: SequencePair,
    pub red: SequencePair,
    pub blue: SequencePair,
    pub refinement: RefinementOut,
    pub minimal_basis: BasisOut,
    pub root_polynomials: Vec<RootOut>,
    pub left_minimal_basis: BasisOut,
    pub residuals: ResidualsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toeplitz: Option<ToeplitzOut>,
}

fn coefficients(p: &PolyMatrix, monomial: bool) -> Vec<Vec<Vec<Entry>>> {
    let p = if monomial { p.to_monomial() } else { p.clone() };
    p.coeffs().iter().map(matrix_to_rows).collect()
}

fn basis_out(p: &PolyMatrix, degrees: &[usize], monomial: bool) -> BasisOut {
    BasisOut { degrees: degrees.to_vec(), coefficients: coefficients(p, monomial) }
}

impl StructureReport {
    pub fn new(an: &Analysis, monomial: bool) -> Self {
        let right = &an.right;
        let roots = right
            .roots
            .vectors
            .iter()
            .zip(&right.roots.orders)
            .map(|(v, &order)| RootOut {
                order,
                coefficients: coefficients(v, monomial).into_iter().map(|c| c.into_iter().map(|row| row[0]).collect()).collect(),
            })
            .collect();
        let sep = &right.separated;
        let bf = &right.bidiagonal;
        StructureReport {
            m: an.shifted.rows(),
            n: an.shifted.cols(),
            lambda0: an.shifted.lambda0.to_string(),
            variable: if monomial { "lambda" } else { "lambda-lambda0" }.to_string(),
            tol: an.tol,
            indices: (&an.indices).into(),
            rank_consistent: an.rank_consistent,
            staircase: SequencePair { s: right.staircase.s.clone(), t: right.staircase.t.clone() },
            red: SequencePair { s: sep.red.s.clone(), t: sep.red.t.clone() },
            blue: SequencePair { s: sep.blue.s.clone(), t: sep.blue.t.clone() },
            refinement: RefinementOut {
                iterations: bf.refinement_iterations,
                off_history: bf.off_history.clone(),
                diverged: bf.diverged,
            },
            minimal_basis: basis_out(&right.basis.n, &right.basis.degrees, monomial),
            root_polynomials: roots,
            left_minimal_basis: basis_out(&an.left.basis, &an.left.left_minimal, monomial),
            residuals: (&an.residuals).into(),
            toeplitz: an.toeplitz.as_ref().map(|t| ToeplitzOut::new(t, &an.indices)),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
