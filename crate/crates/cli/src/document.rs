//! Pencil input and output: the JSON document and Matrix Market pairs.

use std::fs;
use std::path::Path;

use nalgebra_sparse::io::load_coo_from_matrix_market_str;
use nalgebra_sparse::CooMatrix;
use pencil_core::{CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One complex entry as `[re, im]`.
pub type Entry = [f64; 2];

/// Dense pencil `A + λE` on disk. `A` and `E` are row-major lists of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PencilDocument {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Entry>>,
    #[serde(rename = "E")]
    pub e: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Entry>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn rows_to_matrix(name: &str, rows: &[Vec<Entry>], m: usize, n: usize) -> Result<CMatrix, CliError> {
    if rows.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input(format!("{name} does not have shape {m}x{n}")));
    }
    let out = CMatrix::from_fn(m, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Input(format!("{name} has non-finite entries")));
    }
    Ok(out)
}

impl PencilDocument {
    pub fn from_matrices(a: &CMatrix, e: &CMatrix) -> Self {
        PencilDocument {
            m: a.nrows(),
            n: a.ncols(),
            a: matrix_to_rows(a),
            e: matrix_to_rows(e),
            lambda0: None,
            metadata: None,
        }
    }

    pub fn matrices(&self) -> Result<(CMatrix, CMatrix), CliError> {
        Ok((rows_to_matrix("A", &self.a, self.m, self.n)?, rows_to_matrix("E", &self.e, self.m, self.n)?))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

/// Parses `a+bi` style numbers; a bare real or imaginary part is accepted.
pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let z: C64 = s
        .trim()
        .replace(' ', "")
        .parse()
        .map_err(|_| CliError::Input(format!("cannot parse complex number '{s}'")))?;
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(CliError::Input(format!("complex number '{s}' is not finite")))
    }
}

fn dense_from_coo<T: Copy>(coo: &CooMatrix<T>, to_c: impl Fn(T) -> C64) -> CMatrix {
    let mut m = CMatrix::zeros(coo.nrows(), coo.ncols());
    for (i, j, &v) in coo.triplet_iter() {
        m[(i, j)] += to_c(v);
    }
    m
}

/// Reads one Matrix Market file (coordinate or array; real, integer or
/// complex field) into a dense matrix.
pub fn read_matrix_market(path: &Path) -> Result<CMatrix, CliError> {
    let text = read_text(path)?;
    let header = text.lines().next().unwrap_or_default().to_ascii_lowercase();
    let bad = |e: nalgebra_sparse::io::MatrixMarketError| CliError::Input(format!("{}: {e}", path.display()));
    let words: Vec<&str> = header.split_whitespace().collect();
    let field = words.get(3).copied().unwrap_or_default();
    let m = match field {
        "complex" => dense_from_coo(&load_coo_from_matrix_market_str::<C64>(&text).map_err(bad)?, |z| z),
        "integer" => dense_from_coo(&load_coo_from_matrix_market_str::<i64>(&text).map_err(bad)?, |x| C64::new(x as f64, 0.0)),
        "real" => dense_from_coo(&load_coo_from_matrix_market_str::<f64>(&text).map_err(bad)?, |x| C64::new(x, 0.0)),
        other => {
            return Err(CliError::Input(format!(
                "{}: unsupported Matrix Market field '{other}'",
                path.display()
            )))
        }
    };
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Input(format!("{} has non-finite entries", path.display())));
    }
    Ok(m)
}

/// `A` and `E` from two Matrix Market files of equal shape.
pub fn read_matrix_market_pair(a: &Path, e: &Path) -> Result<PencilDocument, CliError> {
    let (ma, me) = (read_matrix_market(a)?, read_matrix_market(e)?);
    if ma.shape() != me.shape() {
        return Err(CliError::Input(format!(
            "A is {}x{} but E is {}x{}",
            ma.nrows(),
            ma.ncols(),
            me.nrows(),
            me.ncols()
        )));
    }
    Ok(PencilDocument::from_matrices(&ma, &me))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_forms() {
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("-0.5").unwrap(), C64::new(-0.5, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), C64::new(0.0, 3.0));
        assert_eq!(parse_complex(" 1 - 1i ").unwrap(), C64::new(1.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("inf").is_err());
    }

    #[test]
    fn shape_mismatch_is_input_error() {
        let doc = PencilDocument { m: 1, n: 2, a: vec![vec![[0.0, 0.0]]], e: vec![vec![[0.0, 0.0]; 2]], lambda0: None, metadata: None };
        assert!(matches!(doc.matrices(), Err(CliError::Input(_))));
    }

    #[test]
    fn json_round_trip_is_bit_identical() {
        let a = CMatrix::from_fn(2, 3, |i, j| C64::new(0.1 * (i as f64 + 1.0) / 3.0, -(j as f64).exp() / 7.0));
        let e = CMatrix::from_fn(2, 3, |i, j| C64::new(1e-300 * (i + j) as f64, std::f64::consts::PI));
        let doc = PencilDocument::from_matrices(&a, &e);
        let back: PencilDocument = serde_json::from_str(&doc.to_json()).unwrap();
        let (a2, e2) = back.matrices().unwrap();
        for (x, y) in a.iter().chain(e.iter()).zip(a2.iter().chain(e2.iter())) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}
