//! Seeded random pencils, including pencils with a planted staircase.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{PencilError, Result};
use crate::linalg::{spectral_norm, CMatrix, C64};
use crate::pencil::{validate_indices, Pencil};
use crate::staircase::offsets;

/// Distribution of the free entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fill {
    /// Real standard normal.
    #[default]
    Gaussian,
    /// Complex normal with unit variance.
    ComplexGaussian,
}

impl std::str::FromStr for Fill {
    type Err = PencilError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "real" => Ok(Fill::Gaussian),
            "complex" | "complex-gaussian" => Ok(Fill::ComplexGaussian),
            other => Err(PencilError::input(format!("unknown fill distribution '{other}'"))),
        }
    }
}

/// Planted staircase: stairs `E_{i,i} = [0 Ê]`, `A_{i,i+1} = [Â; 0]` with
/// triangular `Ê`, `Â`, random entries above the stairs, an optional regular
/// tail block, and optionally a random unitary equivalence on top.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub seed: u64,
    pub disguise: bool,
    pub fill: Fill,
    /// Order of the square tail block (no structure at `lambda0`).
    pub tail: usize,
    /// Point at which the structure is planted.
    pub lambda0: C64,
}

impl GeneratorSpec {
    pub fn new(s: Vec<usize>, t: Vec<usize>, seed: u64) -> Self {
        GeneratorSpec {
            s,
            t,
            seed,
            disguise: false,
            fill: Fill::Gaussian,
            tail: 0,
            lambda0: C64::new(0.0, 0.0),
        }
    }

    pub fn disguised(mut self) -> Self {
        self.disguise = true;
        self
    }

    pub fn with_fill(mut self, fill: Fill) -> Self {
        self.fill = fill;
        self
    }

    pub fn with_tail(mut self, tail: usize) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_lambda0(mut self, lambda0: C64) -> Self {
        self.lambda0 = lambda0;
        self
    }
}

struct Sampler {
    rng: ChaCha8Rng,
    fill: Fill,
}

impl Sampler {
    fn entry(&mut self) -> C64 {
        let re: f64 = self.rng.sample(StandardNormal);
        match self.fill {
            Fill::Gaussian => C64::new(re, 0.0),
            Fill::ComplexGaussian => {
                let im: f64 = self.rng.sample(StandardNormal);
                C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
        }
    }

    /// Stair diagonals are kept away from zero.
    fn pivot(&mut self) -> C64 {
        loop {
            let x = self.entry();
            if x.norm() >= 0.1 {
                return x;
            }
        }
    }

    fn fill_block(&mut self, m: &mut CMatrix, r0: usize, c0: usize, rows: usize, cols: usize) {
        for j in c0..c0 + cols {
            for i in r0..r0 + rows {
                m[(i, j)] = self.entry();
            }
        }
    }

    /// Upper triangular `size×size` block at `(r0, c0)`.
    fn fill_triangle(&mut self, m: &mut CMatrix, r0: usize, c0: usize, size: usize) {
        for j in 0..size {
            for i in 0..j {
                m[(r0 + i, c0 + j)] = self.entry();
            }
            m[(r0 + j, c0 + j)] = self.pivot();
        }
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        let mut m = CMatrix::zeros(rows, cols);
        self.fill_block(&mut m, 0, 0, rows, cols);
        m
    }

    fn unitary(&mut self, n: usize) -> CMatrix {
        let fill = self.fill;
        self.fill = Fill::ComplexGaussian;
        let g = self.matrix(n, n);
        self.fill = fill;
        g.qr().q()
    }
}

/// Builds the pencil described by `spec`, normalized so that the shifted pair
/// has unit norm.
pub fn generate(spec: &GeneratorSpec) -> Result<Pencil> {
    let s = validate_indices(&spec.s, &spec.t)?;
    let t = &spec.t;
    let k = t.len();
    let ro = offsets(&s);
    let co = offsets(t);
    let m = ro[k] + spec.tail;
    let n = co[k] + spec.tail;
    let mut g = Sampler { rng: ChaCha8Rng::seed_from_u64(spec.seed), fill: spec.fill };
    let mut a = CMatrix::zeros(m, n);
    let mut e = CMatrix::zeros(m, n);

    for i in 0..k {
        let (r0, si) = (ro[i], s[i]);
        // E_{i,i} = [0 Ê], then everything to the right of it
        g.fill_triangle(&mut e, r0, co[i] + t[i] - si, si);
        g.fill_block(&mut e, r0, co[i + 1], si, n - co[i + 1]);
        if i + 1 < k {
            g.fill_triangle(&mut a, r0, co[i + 1], t[i + 1]);
            g.fill_block(&mut a, r0, co[i + 2], si, n - co[i + 2]);
        } else {
            g.fill_block(&mut a, r0, co[k], si, n - co[k]);
        }
    }
    g.fill_block(&mut a, ro[k], co[k], spec.tail, spec.tail);
    g.fill_block(&mut e, ro[k], co[k], spec.tail, spec.tail);

    let scale = spectral_norm(&a)?.max(spectral_norm(&e)?);
    if scale > 0.0 {
        a /= C64::from(scale);
        e /= C64::from(scale);
    }
    if spec.disguise {
        let u = g.unitary(m);
        let v = g.unitary(n);
        a = &u * a * v.adjoint();
        e = &u * e * v.adjoint();
    }
    let l0 = a - &e * spec.lambda0;
    Pencil::new(l0, e)
}

/// Pencil with independent complex Gaussian entries.
pub fn random_pencil(m: usize, n: usize, seed: u64) -> Pencil {
    let mut g = Sampler { rng: ChaCha8Rng::seed_from_u64(seed), fill: Fill::ComplexGaussian };
    let l0 = g.matrix(m, n);
    let l1 = g.matrix(m, n);
    Pencil::new(l0, l1).expect("finite random entries")
}

/// `L0 = X0·Y0`, `L1 = X1·Y1` with inner dimensions `r0`, `r1`.
pub fn low_rank_pencil(m: usize, n: usize, r0: usize, r1: usize, seed: u64) -> Pencil {
    let mut g = Sampler { rng: ChaCha8Rng::seed_from_u64(seed), fill: Fill::ComplexGaussian };
    let l0 = g.matrix(m, r0) * g.matrix(r0, n);
    let l1 = g.matrix(m, r1) * g.matrix(r1, n);
    Pencil::new(l0, l1).expect("finite random entries")
}
