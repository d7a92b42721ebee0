use lrdisc::bounds::{theorem1_rhs, theorem2_rhs};
use lrdisc::discrepancy::{star_discrepancy_exact, theorem_a_bound, to_f64, PointSet};
use lrdisc::experiment::selftest::{lemma1_suite_with, run_selftest};
use lrdisc::multiseq::{block_points, box_indices, x_multiseq, LatticeIndex, MultiseqParams};
use lrdisc::seqgen::{lfsr_to_alpha, multistep_x, theorem1_points, trace_seq, GeneratorParams};
use lrdisc::FieldCtx;

fn gf9() -> FieldCtx {
    FieldCtx::new(3, 2, &[2, 2, 1]).unwrap()
}

#[test]
fn shifted_points_are_multistep_values() {
    let ctx = FieldCtx::new(5, 2, &[2, 1, 1]).unwrap();
    let beta = ctx.enumerate_primitive()[3].clone();
    let alpha = ctx.element(&[4, 1]).unwrap();
    let (b1, b2, s) = (2u64, 3u64, 3usize);
    let params = GeneratorParams::new(&ctx, alpha, beta, b1, b2, s).unwrap();
    let pts = theorem1_points(&params, 40).unwrap();
    for (n, pt) in pts.iter().enumerate() {
        for (i, c) in pt.coords().iter().enumerate() {
            let idx = b1 as u128 * n as u128 + i as u128 + b2 as u128;
            assert_eq!(*c, multistep_x(&params, idx).unwrap(), "n={n} i={i}");
        }
    }
}

#[test]
fn alpha_recovered_from_initial_values() {
    let ctx = gf9();
    for beta in ctx.enumerate_primitive() {
        for alpha in ctx.elements().filter(|a| !a.is_zero()) {
            let params = GeneratorParams::new(&ctx, alpha.clone(), beta.clone(), 1, 1, 1).unwrap();
            let init = trace_seq(&params, 0, ctx.k()).unwrap();
            assert_eq!(lfsr_to_alpha(&ctx, &beta, &init).unwrap(), alpha);
        }
    }
}

#[test]
fn block_points_follow_multisequence_values() {
    let ctx = gf9();
    let prim = ctx.enumerate_primitive();
    let params = MultiseqParams::new(
        &ctx,
        2,
        vec![1, 2],
        vec![ctx.element(&[1, 1]).unwrap(), ctx.element(&[0, 2]).unwrap()],
        vec![prim[0].clone(), prim[2].clone()],
    )
    .unwrap();
    let entries = block_points(&params, &[3, 3]).unwrap();
    assert_eq!(entries.len(), 9);
    for (n, pt) in &entries {
        let coords = pt.coords();
        assert_eq!(coords.len(), 2);
        for (c, off) in coords.iter().zip(box_indices(&[1, 2])) {
            let shifted = LatticeIndex(n.0.iter().zip(&off).map(|(&a, &b)| a + b as u64).collect());
            assert_eq!(*c, x_multiseq(&params, &shifted).unwrap());
        }
    }
}

#[test]
fn weighted_bound_covers_generated_sets() {
    let ctx = gf9();
    let beta = ctx.enumerate_primitive()[1].clone();
    let params = GeneratorParams::new(&ctx, ctx.one(), beta, 1, 1, 2).unwrap();
    let pts = theorem1_points(&params, 8).unwrap();
    let ps = PointSet::from_prn_points(&pts).unwrap();
    let d = to_f64(&star_discrepancy_exact(&ps).unwrap());
    for m in 1..=2 {
        assert!(theorem_a_bound(3, &ps, m).unwrap() >= d);
    }
}

#[test]
fn headline_bounds_are_vacuous_at_desk_scale() {
    for n in [1u64, 10, 100, 625] {
        for s in 1..=3 {
            assert!(theorem1_rhs(5, s, 1, 1, n, 0.5).unwrap() > 1.0);
        }
        assert!(theorem2_rhs(3, 2, 1, &[1, 1], &[n, n], 0.5).unwrap() > 1.0);
    }
}

#[test]
fn selftest_passes_and_detects_corrupted_weight() {
    for res in run_selftest() {
        assert!(res.passed, "{}: {}", res.name, res.detail);
    }
    let broken = lemma1_suite_with(|_, _| 1.0);
    assert!(!broken.passed);
}
