//! Inputs shared by the benchmarks.

use pencil_core::generate::{generate, random_pencil, GeneratorSpec};
use pencil_core::Pencil;

/// Disguised pencil with the planted staircase `s = (4,2,0)`, `t = (5,3,1)`
/// repeated `copies` times along the diagonal of the index sequences.
pub fn structured(copies: usize, seed: u64) -> Pencil {
    let s = vec![4 * copies, 2 * copies, 0];
    let t = vec![5 * copies, 3 * copies, copies];
    generate(&GeneratorSpec::new(s, t, seed).disguised()).expect("valid planted indices")
}

/// Dense random `m×n` pencil.
pub fn dense(m: usize, n: usize, seed: u64) -> Pencil {
    random_pencil(m, n, seed)
}
