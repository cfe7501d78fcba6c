//! The three subcommands as plain functions returning their output text.

use std::path::PathBuf;

use pencil_core::generate::{generate, Fill, GeneratorSpec};
use pencil_core::{analyze, AnalysisOptions, Pencil, C64};
use serde::Serialize;

use crate::document::{parse_complex, read_matrix_market_pair, PencilDocument};
use crate::error::CliError;
use crate::report::StructureReport;

/// Where the pencil comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Json(PathBuf),
    MatrixMarket { a: PathBuf, e: PathBuf },
}

#[derive(Debug, Clone)]
pub struct AnalyzeArgs {
    pub source: Source,
    /// Overrides the document's `lambda0`.
    pub lambda0: Option<String>,
    pub tol: Option<f64>,
    pub refine_iters: usize,
    pub verify: bool,
    pub expand_monomial: bool,
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<StructureReport, CliError> {
    let doc = match &args.source {
        Source::Json(p) => PencilDocument::read(p)?,
        Source::MatrixMarket { a, e } => read_matrix_market_pair(a, e)?,
    };
    let lambda0 = match args.lambda0.as_deref().or(doc.lambda0.as_deref()) {
        Some(s) => parse_complex(s)?,
        None => C64::new(0.0, 0.0),
    };
    if let Some(t) = args.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Input(format!("tolerance must be finite and nonnegative, got {t}")));
        }
    }
    let (a, e) = doc.matrices()?;
    let pencil = Pencil::new(a, e)?;
    let opts = AnalysisOptions { lambda0, tol: args.tol, refine_iters: args.refine_iters, verify: args.verify };
    let an = analyze(&pencil, &opts)?;
    Ok(StructureReport::new(&an, args.expand_monomial))
}

#[derive(Debug, Clone, Serialize)]
struct GeneratorMeta<'a> {
    s: &'a [usize],
    t: &'a [usize],
    seed: u64,
    disguise: bool,
    fill: &'a str,
    tail: usize,
}

pub fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::Input(format!("'{x}' in index list '{s}' is not a count"))))
        .collect()
}

#[derive(Debug, Clone)]
pub struct GenerateArgs {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub seed: u64,
    pub disguise: bool,
    pub fill: String,
    pub tail: usize,
    pub lambda0: Option<String>,
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<PencilDocument, CliError> {
    let fill: Fill = args.fill.parse()?;
    let lambda0 = args.lambda0.as_deref().map(parse_complex).transpose()?;
    let mut spec = GeneratorSpec::new(args.s.clone(), args.t.clone(), args.seed).with_fill(fill).with_tail(args.tail);
    if args.disguise {
        spec = spec.disguised();
    }
    if let Some(l) = lambda0 {
        spec = spec.with_lambda0(l);
    }
    let p = generate(&spec)?;
    let mut doc = PencilDocument::from_matrices(&p.l0, &p.l1);
    doc.lambda0 = lambda0.map(|l| l.to_string());
    let meta = GeneratorMeta {
        s: &args.s,
        t: &args.t,
        seed: args.seed,
        disguise: args.disguise,
        fill: &args.fill,
        tail: args.tail,
    };
    doc.metadata = Some(serde_json::json!({ "generator": meta }));
    Ok(doc)
}

pub const TABLE1_HEADER: [&str; 7] = ["eps_kappa", "back", "off", "resN", "normN", "resR", "normR"];

/// One residual row per seed `first_seed..first_seed + seeds` on random
/// pencils with the `s = (4,2,0)`, `t = (5,3,1)` pattern.
pub fn cmd_table1(seeds: u64, first_seed: u64, disguise: bool, refine_iters: usize) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Internal(format!("csv: {e}"));
    w.write_record(TABLE1_HEADER).map_err(csv_err)?;
    for seed in first_seed..first_seed + seeds {
        let mut spec = GeneratorSpec::new(vec![4, 2, 0], vec![5, 3, 1], seed);
        if disguise {
            spec = spec.disguised();
        }
        let an = analyze(&generate(&spec)?, &AnalysisOptions { refine_iters, ..Default::default() })?;
        let r = &an.residuals;
        let row = [r.eps_kappa, r.back, r.off, r.res_n, r.norm_n, r.res_r, r.norm_r];
        w.write_record(row.iter().map(|x| format!("{x:.6e}"))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("4,2,0").unwrap(), vec![4, 2, 0]);
        assert_eq!(parse_list("").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_list(" 3 ").unwrap(), vec![3]);
        assert!(parse_list("1,-2").is_err());
    }

    #[test]
    fn table1_rows_and_determinism() {
        let out = cmd_table1(3, 0, false, 2).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "eps_kappa,back,off,resN,normN,resR,normR");
        assert_eq!(lines.len(), 4);
        assert_eq!(out, cmd_table1(3, 0, false, 2).unwrap());
        assert_eq!(cmd_table1(0, 0, false, 2).unwrap().lines().count(), 1);
    }

    #[test]
    fn invalid_generator_spec_is_input_error() {
        let args = GenerateArgs { s: vec![3], t: vec![2], seed: 0, disguise: false, fill: "gaussian".into(), tail: 0, lambda0: None };
        assert!(matches!(cmd_generate(&args), Err(CliError::Input(_))));
    }
}
