//! Pencils, shifted pencils, polynomial matrices and index sets.

use crate::error::{PencilError, Result};
use crate::linalg::{check_finite, spectral_norm, CMatrix, C64};

/// `L(λ) = L0 + λ L1`, scaled so that `max(‖L0‖₂, ‖L1‖₂) = 1`.
///
/// The raw input equals `norm_scale` times the stored pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub l0: CMatrix,
    pub l1: CMatrix,
    pub norm_scale: f64,
}

impl Pencil {
    pub fn new(l0: CMatrix, l1: CMatrix) -> Result<Self> {
        if l0.shape() != l1.shape() {
            return Err(PencilError::input(format!(
                "L0 is {}x{} but L1 is {}x{}",
                l0.nrows(),
                l0.ncols(),
                l1.nrows(),
                l1.ncols()
            )));
        }
        check_finite(&l0, "L0")?;
        check_finite(&l1, "L1")?;
        let scale = spectral_norm(&l0)?.max(spectral_norm(&l1)?);
        let norm_scale = if scale > 0.0 { scale } else { 1.0 };
        Ok(Pencil { l0: l0 / C64::from(norm_scale), l1: l1 / C64::from(norm_scale), norm_scale })
    }

    pub fn rows(&self) -> usize {
        self.l0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.l0.ncols()
    }

    /// `L0 + λ L1` for the normalized pair.
    pub fn eval(&self, lambda: C64) -> CMatrix {
        &self.l0 + &self.l1 * lambda
    }

    /// The pencil `L0^H + ν L1^H`, whose right structure at `conj(λ0)` is the
    /// left structure of `self` at `λ0`.
    pub fn adjoint(&self) -> Pencil {
        Pencil { l0: self.l0.adjoint(), l1: self.l1.adjoint(), norm_scale: self.norm_scale }
    }
}

/// Expansion of a pencil around `lambda0`: `L0 + λL1 = Lhat0 + (λ-λ0) Lhat1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedPencil {
    pub base: Pencil,
    pub lambda0: C64,
    pub lhat0: CMatrix,
    pub lhat1: CMatrix,
}

pub fn make_shifted(p: &Pencil, lambda0: C64) -> Result<ShiftedPencil> {
    if !(lambda0.re.is_finite() && lambda0.im.is_finite()) {
        return Err(PencilError::input("lambda0 must be finite"));
    }
    Ok(ShiftedPencil {
        base: p.clone(),
        lambda0,
        lhat0: p.eval(lambda0),
        lhat1: p.l1.clone(),
    })
}

impl ShiftedPencil {
    pub fn rows(&self) -> usize {
        self.lhat0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.lhat0.ncols()
    }

    /// `max(‖Lhat0‖₂, ‖Lhat1‖₂)`.
    pub fn scale(&self) -> Result<f64> {
        Ok(spectral_norm(&self.lhat0)?.max(spectral_norm(&self.lhat1)?))
    }
}

/// Matrix polynomial `Σ coeffs[i] μ^i` in the shifted variable `μ = λ - λ0`.
///
/// Always holds at least one coefficient; the zero polynomial has degree 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    coeffs: Vec<CMatrix>,
    lambda0: C64,
}

impl PolyMatrix {
    pub fn new(coeffs: Vec<CMatrix>, lambda0: C64) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(PencilError::input("polynomial needs at least one coefficient"));
        };
        let shape = first.shape();
        if coeffs.iter().any(|c| c.shape() != shape) {
            return Err(PencilError::input("coefficient dimensions differ"));
        }
        let mut p = PolyMatrix { coeffs, lambda0 };
        p.drop_zero_tail(0.0);
        Ok(p)
    }

    pub fn zeros(rows: usize, cols: usize, lambda0: C64) -> Self {
        PolyMatrix { coeffs: vec![CMatrix::zeros(rows, cols)], lambda0 }
    }

    pub fn constant(m: CMatrix, lambda0: C64) -> Self {
        PolyMatrix { coeffs: vec![m], lambda0 }
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn lambda0(&self) -> C64 {
        self.lambda0
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.coeffs[0].ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|z| *z == C64::new(0.0, 0.0)))
    }

    fn drop_zero_tail(&mut self, threshold: f64) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.norm() <= threshold) {
            self.coeffs.pop();
        }
    }

    /// Drops trailing coefficients whose norm is at most `rel_tol` times the
    /// largest coefficient norm.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let top = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut p = self.clone();
        p.drop_zero_tail(rel_tol * top);
        p
    }

    /// Horner evaluation at `μ`.
    pub fn eval(&self, mu: C64) -> CMatrix {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * mu + c;
        }
        acc
    }

    pub fn eval_at_lambda(&self, lambda: C64) -> CMatrix {
        self.eval(lambda - self.lambda0)
    }

    pub fn column(&self, j: usize) -> PolyMatrix {
        let coeffs = self.coeffs.iter().map(|c| c.columns(j, 1).into_owned()).collect();
        PolyMatrix::new(coeffs, self.lambda0).expect("same shapes")
    }

    /// Degree of each column (index of its last nonzero coefficient).
    pub fn column_degrees(&self) -> Vec<usize> {
        (0..self.cols())
            .map(|j| {
                self.coeffs
                    .iter()
                    .rposition(|c| c.column(j).iter().any(|z| *z != C64::new(0.0, 0.0)))
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Coefficients `0..order`, i.e. the polynomial modulo `μ^order`.
    pub fn truncated(&self, order: usize) -> PolyMatrix {
        let keep = order.clamp(1, self.coeffs.len());
        let mut coeffs: Vec<CMatrix> = self.coeffs[..keep].to_vec();
        if order == 0 {
            coeffs[0].fill(C64::new(0.0, 0.0));
        }
        PolyMatrix::new(coeffs, self.lambda0).expect("same shapes")
    }

    pub fn left_mul(&self, m: &CMatrix) -> PolyMatrix {
        let coeffs = self.coeffs.iter().map(|c| m * c).collect();
        PolyMatrix::new(coeffs, self.lambda0).expect("same shapes")
    }

    /// Coefficients of `(l0 + μ l1) · P(μ)`.
    pub fn pencil_product(&self, l0: &CMatrix, l1: &CMatrix) -> PolyMatrix {
        let d = self.coeffs.len();
        let mut out = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let mut c = CMatrix::zeros(l0.nrows(), self.cols());
            if i < d {
                c += l0 * &self.coeffs[i];
            }
            if i > 0 {
                c += l1 * &self.coeffs[i - 1];
            }
            out.push(c);
        }
        PolyMatrix::new(out, self.lambda0).expect("same shapes")
    }

    /// Re-expansion in powers of `λ` (returned with `lambda0 = 0`).
    pub fn to_monomial(&self) -> PolyMatrix {
        let d = self.coeffs.len();
        let shift = -self.lambda0;
        let mut out = vec![CMatrix::zeros(self.rows(), self.cols()); d];
        for (i, c) in self.coeffs.iter().enumerate() {
            // (λ - λ0)^i = Σ_j binom(i, j) λ^j (-λ0)^(i-j)
            let mut binom = 1.0;
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                *slot += c * (shift.powu((i - j) as u32) * binom);
                binom = binom * (i - j) as f64 / (j + 1) as f64;
            }
        }
        PolyMatrix::new(out, C64::new(0.0, 0.0)).expect("same shapes")
    }

    /// Frobenius norm over all coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt()
    }

    /// Horizontal concatenation; all parts must share row count and `λ0`.
    pub fn hstack(parts: &[PolyMatrix], rows: usize, lambda0: C64) -> PolyMatrix {
        let deg = parts.iter().map(|p| p.degree()).max().unwrap_or(0);
        let cols: usize = parts.iter().map(|p| p.cols()).sum();
        let mut coeffs = vec![CMatrix::zeros(rows, cols); deg + 1];
        let mut c0 = 0;
        for p in parts {
            for (i, c) in p.coeffs.iter().enumerate() {
                coeffs[i].columns_mut(c0, p.cols()).copy_from(c);
            }
            c0 += p.cols();
        }
        PolyMatrix::new(coeffs, lambda0).expect("same shapes")
    }
}

/// Right minimal indices and partial multiplicities read off a staircase.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalIndices {
    pub right_minimal: Vec<usize>,
    pub partial_multiplicities: Vec<usize>,
}

/// Complete index data of a pencil at one expansion point. All lists are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructuralIndices {
    pub right_minimal: Vec<usize>,
    pub left_minimal: Vec<usize>,
    pub partial_multiplicities: Vec<usize>,
    pub normal_rank: usize,
}

/// Checks `t1 ≥ s1 ≥ t2 ≥ … ≥ s_k ≥ 0`. `s` may be one shorter than `t`, in
/// which case the missing `s_k` is 0. Returns `s` padded to the length of `t`.
pub fn validate_indices(s: &[usize], t: &[usize]) -> Result<Vec<usize>> {
    if s.len() != t.len() && s.len() + 1 != t.len() {
        return Err(PencilError::input(format!(
            "index lists have lengths {} and {}",
            s.len(),
            t.len()
        )));
    }
    let mut padded = s.to_vec();
    padded.resize(t.len(), 0);
    let mut prev = usize::MAX;
    for (i, (&ti, &si)) in t.iter().zip(&padded).enumerate() {
        if ti > prev || si > ti {
            return Err(PencilError::input(format!(
                "index sequence is not monotone at block {}",
                i + 1
            )));
        }
        prev = si;
    }
    Ok(padded)
}

/// `t_i - s_i` right minimal indices equal to `i-1` and `s_i - t_{i+1}`
/// partial multiplicities equal to `i` (with `t_{k+1} = 0`).
pub fn indices_from_staircase(s: &[usize], t: &[usize]) -> Result<LocalIndices> {
    let s = validate_indices(s, t)?;
    let mut out = LocalIndices::default();
    for i in 0..t.len() {
        let next_t = t.get(i + 1).copied().unwrap_or(0);
        out.right_minimal.extend(std::iter::repeat_n(i, t[i] - s[i]));
        out.partial_multiplicities.extend(std::iter::repeat_n(i + 1, s[i] - next_t));
    }
    Ok(out)
}
