//! Desk-scale property suites for the inequality and identity checkers, runnable from the CLI.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::lemma6_check;
use crate::discrepancy::{
    completion_check, completion_check_multi, floor_log, harmonic_weight_sum, lemma1_lhs_with, lemma1_rhs,
    lemma2_delta_check, q_weight, star_discrepancy_exact, theorem_a_bound, to_f64, PointSet,
};
use crate::error::Result;
use crate::gf::{euler_phi, FieldCtx};
use crate::multiseq::{lemma5_check, LatticeIndex};
use crate::seqgen::{lfsr_seq, theorem1_points, trace_seq, GeneratorParams};

pub const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub detail: String,
    pub elapsed_ms: u128,
}

/// Outcome of a suite body: number of cases checked, then the first failure.
type Verdict = Result<(usize, Option<String>)>;

fn timed(name: &str, body: impl FnOnce() -> Verdict) -> SuiteResult {
    let start = Instant::now();
    let (passed, checked, detail) = match body() {
        Ok((n, None)) => (true, n, "ok".to_string()),
        Ok((n, Some(msg))) => (false, n, msg),
        Err(e) => (false, 0, e.to_string()),
    };
    SuiteResult {
        name: name.to_string(),
        passed,
        checked,
        detail,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// Field sizes used by the exhaustive field and character suites.
pub const SMALL_FIELDS: [(u64, usize); 3] = [(3, 2), (5, 2), (3, 3)];

pub fn field_suite() -> SuiteResult {
    timed("field", || {
        let mut checked = 0;
        for (p, k) in SMALL_FIELDS {
            let ctx = FieldCtx::find_primitive(p, k)?;
            let q = ctx.q();
            let primitives = ctx.enumerate_primitive();
            if primitives.len() as u64 != euler_phi(q - 1) {
                return Ok((checked, Some(format!("q = {q}: {} primitive roots", primitives.len()))));
            }
            let len = 2 * (q - 1) as usize;
            for beta in &primitives {
                let a: Vec<u64> = ctx.minimal_poly(beta)?[..k].iter().map(|&c| (p - c) % p).collect();
                for alpha in ctx.elements().filter(|e| !e.is_zero()) {
                    let params = GeneratorParams::new(&ctx, alpha.clone(), beta.clone(), 1, 1, 1)?;
                    let y = trace_seq(&params, 0, len)?;
                    if lfsr_seq(&ctx, &a, &y[..k], len)? != y {
                        return Ok((
                            checked,
                            Some(format!("q = {q}: recursion fails for α = {alpha}, β = {beta}")),
                        ));
                    }
                    checked += 1;
                }
            }
        }
        Ok((checked, None))
    })
}

/// Parameter grid of the total-weight suite.
pub fn lemma1_cases() -> Vec<(u64, usize, usize)> {
    let mut out = Vec::new();
    for b in [2, 3, 5] {
        for s in [1, 2] {
            for m in [1, 2] {
                out.push((b, s, m));
            }
        }
    }
    out
}

pub fn lemma1_suite() -> SuiteResult {
    lemma1_suite_with(q_weight)
}

/// The total-weight suite with a substitute row weight, for fault injection.
pub fn lemma1_suite_with(row_weight: impl Fn(u64, &[i64]) -> f64 + Copy) -> SuiteResult {
    timed("lemma1", || {
        let cases = lemma1_cases();
        for (i, &(b, s, m)) in cases.iter().enumerate() {
            let lhs = lemma1_lhs_with(b, s, m, row_weight)?;
            let rhs = lemma1_rhs(b, s, m);
            if lhs >= rhs + SLACK {
                return Ok((i, Some(format!("b = {b}, s = {s}, m = {m}: {lhs} ≥ {rhs}"))));
            }
        }
        Ok((cases.len(), None))
    })
}

pub fn lemma2_suite() -> SuiteResult {
    timed("lemma2", || {
        let mut checked = 0;
        let mut worst: f64 = 0.0;
        for (p, k) in SMALL_FIELDS {
            let ctx = FieldCtx::find_primitive(p, k)?;
            for beta in ctx.elements() {
                worst = worst.max(lemma2_delta_check(&ctx, &beta)?);
                checked += 1;
            }
        }
        Ok((checked, (worst >= SLACK).then(|| format!("max deviation {worst:e}"))))
    })
}

pub fn lemma3_suite(seed: u64, instances: usize) -> SuiteResult {
    timed("lemma3", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..instances {
            let t = rng.gen_range(1..=64usize);
            let n = rng.gen_range(1..=t);
            let x: Vec<f64> = (0..t).map(|_| rng.gen()).collect();
            let (lhs, rhs) = completion_check(&x, n)?;
            if lhs > rhs + SLACK {
                return Ok((i, Some(format!("T = {t}, N = {n}: {lhs} > {rhs}"))));
            }
            let h = harmonic_weight_sum(t);
            if h > 3.0 + 2.0 * (t as f64).ln() + SLACK {
                return Ok((i, Some(format!("T = {t}: harmonic weight {h}"))));
            }
        }
        Ok((instances, None))
    })
}

pub fn lemma4_suite(seed: u64, instances: usize) -> SuiteResult {
    timed("lemma4", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..instances {
            let t: Vec<usize> = (0..2).map(|_| rng.gen_range(1..=8)).collect();
            let n: Vec<usize> = t.iter().map(|&tw| rng.gen_range(1..=tw)).collect();
            let x: Vec<f64> = (0..t[0] * t[1]).map(|_| rng.gen()).collect();
            let (lhs, rhs) = completion_check_multi(&x, &t, &n)?;
            if lhs > rhs + SLACK {
                return Ok((i, Some(format!("T = {t:?}, N = {n:?}: {lhs} > {rhs}"))));
            }
        }
        Ok((instances, None))
    })
}

/// Block shapes `(s_1, ..., s_r)` with each `s_w ≥ 1` and product `≤ s`.
pub fn valid_block_dims(r: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (1..=s).filter_map(move |d| {
                    let mut next = prefix.clone();
                    next.push(d);
                    (next.iter().product::<usize>() <= s).then_some(next)
                })
            })
            .collect();
    }
    out
}

pub fn lemma5_suite() -> SuiteResult {
    timed("lemma5", || {
        let mut checked = 0;
        for r in [2usize, 3] {
            for s in [1usize, 2, 3] {
                let side = s.pow(r as u32) as u64;
                let bases = side.pow(r as u32);
                for dims in valid_block_dims(r, s) {
                    for k in [2usize, 3] {
                        for flat in 0..bases {
                            let mut rest = flat;
                            let n: Vec<u64> = (0..r)
                                .map(|_| {
                                    let v = rest % side;
                                    rest /= side;
                                    v
                                })
                                .collect();
                            let n = LatticeIndex(n);
                            if !lemma5_check(s, &dims, &n, k) {
                                return Ok((
                                    checked,
                                    Some(format!("r = {r}, s = {s}, dims {dims:?}, k = {k}, n = {:?}", n.0)),
                                ));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
        Ok((checked, None))
    })
}

/// `(q, k)` pairs of the totient sweep.
pub const LEMMA6_FIELDS: [(u64, u32); 3] = [(3125, 5), (4096, 12), (16807, 5)];

/// `count` values of `T` spaced evenly in `ln T` over `[1, max]`, rounded;
/// small values may repeat.
pub fn log_spaced(max: u64, count: usize) -> Vec<u64> {
    let top = (max as f64).ln();
    (0..count)
        .map(|i| {
            let v = (top * i as f64 / (count - 1).max(1) as f64).exp().round() as u64;
            v.clamp(1, max)
        })
        .collect()
}

pub fn lemma6_suite() -> SuiteResult {
    timed("lemma6", || {
        let mut checked = 0;
        for (q, k) in LEMMA6_FIELDS {
            for t in log_spaced(4 * q, 64) {
                let out = lemma6_check(q, k, t)?;
                if !out.holds {
                    return Ok((checked, Some(format!("q = {q}, T = {t}: {} > {}", out.lhs, out.rhs))));
                }
                checked += 1;
            }
        }
        Ok((checked, None))
    })
}

/// Weighted-sum bound against exact discrepancy over the prefixes
/// `N = n_min..=n_max` of the sequence for each listed pair.
pub fn theorem_a_cases(ctx: &FieldCtx, s: usize, pairs: &[(u64, u64)], n_min: usize, n_max: usize) -> Verdict {
    let primitives = ctx.enumerate_primitive();
    let p = ctx.p();
    let mut checked = 0;
    for &(beta_index, alpha_index) in pairs {
        let params = GeneratorParams::new(
            ctx,
            ctx.element_from_index(alpha_index),
            primitives[beta_index as usize].clone(),
            1,
            1,
            s,
        )?;
        let pts = theorem1_points(&params, n_max)?;
        for n in n_min..=n_max {
            let ps = PointSet::from_prn_points(&pts[..n])?;
            let d = to_f64(&star_discrepancy_exact(&ps)?);
            let m = floor_log(n as u64, p) + 1;
            let bound = theorem_a_bound(p, &ps, m)?;
            if bound < d - SLACK {
                return Ok((
                    checked,
                    Some(format!(
                        "β#{beta_index}, α#{alpha_index}, s = {s}, N = {n}: bound {bound} < {d}"
                    )),
                ));
            }
            checked += 1;
        }
    }
    Ok((checked, None))
}

/// Pairs `(β index, α index)` spread over the primitive roots and nonzero α.
pub fn spread_pairs(q: u64, n_primitive: u64, count: usize) -> Vec<(u64, u64)> {
    (0..count as u64)
        .map(|i| (i % n_primitive, 1 + (i * 7) % (q - 1)))
        .collect()
}

pub fn theorem_a_suite() -> SuiteResult {
    timed("theorem_a", || {
        let ctx = FieldCtx::find_primitive(5, 2)?;
        let pairs = spread_pairs(ctx.q(), euler_phi(ctx.q() - 1), 20);
        let mut total = 0;
        for s in [1, 2] {
            let (n, fail) = theorem_a_cases(&ctx, s, &pairs, 4, 24)?;
            total += n;
            if fail.is_some() {
                return Ok((total, fail));
            }
        }
        Ok((total, None))
    })
}

/// Every suite at its default parameters, in a fixed order.
pub fn run_selftest() -> Vec<SuiteResult> {
    vec![
        field_suite(),
        lemma1_suite(),
        lemma2_suite(),
        lemma3_suite(3, 200),
        lemma4_suite(4, 200),
        lemma5_suite(),
        lemma6_suite(),
        theorem_a_suite(),
    ]
}
