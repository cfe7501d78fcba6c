use pencil_core::generate::{generate, low_rank_pencil, random_pencil, GeneratorSpec};
use pencil_core::oracle::toeplitz_structure;
use pencil_core::{analyze, make_shifted, AnalysisOptions, Pencil, C64};
use proptest::prelude::*;

fn any_pencil() -> impl Strategy<Value = Pencil> {
    (1usize..7, 1usize..7, 0u64..1_000_000, 0usize..3, 0usize..4, 0usize..4).prop_map(|(m, n, seed, kind, r0, r1)| {
        let small = m.min(n);
        match kind {
            0 => random_pencil(m, n, seed),
            _ => low_rank_pencil(m, n, r0.min(small), r1.min(small), seed),
        }
    })
}

/// Non-increasing `t1 ≥ s1 ≥ t2 ≥ …`, ending either with `s = 0` or not.
fn planted_lists() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    prop::collection::vec((1usize..4, 0usize..4), 1..4).prop_map(|steps| {
        let mut s = Vec::new();
        let mut t = Vec::new();
        let mut bound = usize::MAX;
        for (ti, si) in steps {
            let ti = ti.min(bound);
            if ti == 0 {
                break;
            }
            let si = si.min(ti);
            t.push(ti);
            s.push(si);
            bound = si;
        }
        (s, t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_agree_with_toeplitz_ranks(p in any_pencil()) {
        let an = analyze(&p, &AnalysisOptions::default()).unwrap();
        let tz = toeplitz_structure(&an.shifted, None, None).unwrap();
        prop_assert_eq!(tz.right_minimal(), an.indices.right_minimal.clone());
        prop_assert_eq!(tz.left_minimal(), an.indices.left_minimal.clone());
        prop_assert_eq!(tz.partial_multiplicities(), an.indices.partial_multiplicities.clone());
        prop_assert_eq!(tz.normal_rank, an.indices.normal_rank);
    }

    #[test]
    fn index_bookkeeping(p in any_pencil()) {
        let an = analyze(&p, &AnalysisOptions::default()).unwrap();
        let ix = &an.indices;
        prop_assert!(an.rank_consistent);
        prop_assert_eq!(ix.right_minimal.len(), p.cols() - ix.normal_rank);
        // degree sum of a minimal basis equals the sum of the minimal indices
        prop_assert_eq!(an.right.basis.n.column_degrees(), ix.right_minimal.clone());
        prop_assert_eq!(an.right.roots.orders.iter().sum::<usize>(), ix.partial_multiplicities.iter().sum::<usize>());
        prop_assert!(ix.partial_multiplicities.iter().sum::<usize>() <= ix.normal_rank);
    }

    #[test]
    fn planted_structure_is_recovered((s, t) in planted_lists(), seed in 0u64..10_000, tail in 0usize..3) {
        let spec = GeneratorSpec::new(s.clone(), t.clone(), seed).disguised().with_tail(tail);
        let p = generate(&spec).unwrap();
        let sf = pencil_core::staircase::staircase_reduce(&make_shifted(&p, C64::new(0.0, 0.0)).unwrap(), None).unwrap();
        let mut got = sf.s.clone();
        if got.len() == s.len() + 1 && got.last() == Some(&0) {
            got.pop();
        }
        prop_assert_eq!(got, s);
        prop_assert_eq!(sf.t, t);
    }

    #[test]
    fn left_basis_annihilates(p in any_pencil(), re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let an = analyze(&p, &AnalysisOptions::default()).unwrap();
        let y = &an.left.basis;
        let z = C64::new(re, im);
        let prod = y.eval_at_lambda(z).transpose() * p.eval(z);
        prop_assert!(prod.norm() <= 1e-10 * (1.0 + y.norm()));
    }
}
