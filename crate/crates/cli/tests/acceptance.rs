//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Reference values come from independent re-implementations in
//! this file (brute force, direct formula evaluation) or from a stored
//! golden file for the scan distribution.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lrdisc::bounds::{c1, c2, lemma6_check};
use lrdisc::discrepancy::{
    completion_check, completion_check_multi, floor_log, harmonic_weight_sum, lemma1_lhs, lemma1_rhs,
    lemma2_delta_check, star_discrepancy_exact, star_discrepancy_grid, star_discrepancy_sorted_1d, theorem_a_bound,
    to_f64, PointSet,
};
use lrdisc::experiment::{run_scan, FieldSpec, RunConfig, ScanMode};
use lrdisc::gf::euler_phi;
use lrdisc::multiseq::{lemma5_check, LatticeIndex};
use lrdisc::seqgen::{theorem1_points, trace_seq, GeneratorParams};
use lrdisc::{FieldCtx, FieldElement};

type Check = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Check);

/// Realizations of F_9, F_25 and F_27 used throughout.
const SMALL_FIELDS: [(u64, usize, &[i64]); 3] = [(3, 2, &[2, 2, 1]), (5, 2, &[2, 1, 1]), (3, 3, &[1, 2, 0, 1])];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn small_fields() -> Vec<FieldCtx> {
    SMALL_FIELDS
        .iter()
        .map(|&(p, k, m)| FieldCtx::new(p, k, m).expect("irreducible modulus"))
        .collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn coprime_count(n: u64) -> u64 {
    (1..=n).filter(|&m| gcd(m, n) == 1).count() as u64
}

/// `Tr(γ) = Σ_i γ^{p^i}` by repeated Frobenius.
fn trace_by_conjugates(ctx: &FieldCtx, g: &FieldElement) -> u64 {
    let mut acc = ctx.zero();
    let mut conj = g.clone();
    for _ in 0..ctx.k() {
        acc = ctx.add(&acc, &conj);
        conj = ctx.frobenius(&conj);
    }
    assert!(acc.coeffs()[1..].iter().all(|&c| c == 0), "trace left the prime field");
    acc.coeffs()[0]
}

/// Monic degree-k polynomial over F_p vanishing at `beta`, found by search.
fn annihilator(ctx: &FieldCtx, beta: &FieldElement) -> Vec<u64> {
    let (p, k) = (ctx.p(), ctx.k());
    for idx in 0..p.pow(k as u32) {
        let mut coeffs: Vec<u64> = (0..k).map(|i| idx / p.pow(i as u32) % p).collect();
        coeffs.push(1);
        let value = coeffs
            .iter()
            .rev()
            .fold(ctx.zero(), |acc, &c| ctx.add(&ctx.mul(&acc, beta), &ctx.constant(c)));
        if value.is_zero() {
            return coeffs;
        }
    }
    panic!("no annihilating polynomial of degree {k}");
}

fn field_trace() -> Check {
    let mut sequences = 0;
    for ctx in small_fields() {
        let (p, k, q) = (ctx.p(), ctx.k(), ctx.q());
        let len = 2 * (q - 1) as usize;
        for beta in ctx.enumerate_primitive() {
            let f = annihilator(&ctx, &beta);
            for alpha in ctx.elements().filter(|a| !a.is_zero()) {
                let params =
                    GeneratorParams::new(&ctx, alpha.clone(), beta.clone(), 1, 1, 1).map_err(|e| e.to_string())?;
                let y = trace_seq(&params, 0, len).map_err(|e| e.to_string())?;
                let mut g = alpha.clone();
                for (n, &yn) in y.iter().enumerate() {
                    ensure(yn == trace_by_conjugates(&ctx, &g), || {
                        format!("q={q}: trace mismatch at n={n}")
                    })?;
                    g = ctx.mul(&g, &beta);
                }
                for n in 0..len - k {
                    // y_{n+k} = -(f_0 y_n + ... + f_{k-1} y_{n+k-1})
                    let s: u64 = (0..k).map(|i| f[i] * y[n + i]).sum::<u64>() % p;
                    ensure((y[n + k] + s).is_multiple_of(p), || {
                        format!("q={q}: recursion fails at n={n}, α={alpha}, β={beta}")
                    })?;
                }
                sequences += 1;
            }
        }
    }
    Ok(format!("{sequences} sequences over q = 9, 25, 27"))
}

fn primitive_counts() -> Check {
    let mut found = Vec::new();
    for (ctx, expected) in small_fields().into_iter().zip([4u64, 8, 12]) {
        let q = ctx.q();
        let phi = coprime_count(q - 1);
        ensure(phi == expected, || format!("coprime count of {} is {phi}", q - 1))?;
        ensure(euler_phi(q - 1) == phi, || format!("euler_phi({}) disagrees", q - 1))?;
        // brute-force order by repeated multiplication
        let brute = ctx
            .elements()
            .filter(|a| !a.is_zero())
            .filter(|a| {
                let mut x = a.clone();
                let mut order = 1;
                while x != ctx.one() {
                    x = ctx.mul(&x, a);
                    order += 1;
                }
                order == q - 1
            })
            .count() as u64;
        let listed = ctx.enumerate_primitive().len() as u64;
        ensure(listed == phi && brute == phi, || {
            format!("q={q}: listed {listed}, brute {brute}, φ {phi}")
        })?;
        found.push(listed);
    }
    Ok(format!("counts {found:?}"))
}

/// Block shapes with entries in `[1, s]` and product at most `s`.
fn block_shapes(r: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = s.pow(r as u32);
    for flat in 0..total {
        let dims: Vec<usize> = (0..r).map(|w| flat / s.pow(w as u32) % s + 1).collect();
        if dims.iter().product::<usize>() <= s {
            out.push(dims);
        }
    }
    out
}

/// Independent evaluation of the index set whose size the injectivity
/// check counts, for the `l`-th (1-based) component.
fn index_set_size(s: usize, dims: &[usize], n: &[u64], k: usize, l: usize) -> usize {
    let r = dims.len();
    let modulus = (s as u64).pow(r as u32 - 1);
    let mut seen = HashSet::new();
    let box_size: usize = dims.iter().product();
    for flat in 0..box_size {
        let mut rest = flat;
        let mut i = vec![0usize; r];
        for w in (0..r).rev() {
            i[w] = rest % dims[w];
            rest /= dims[w];
        }
        let shifted: Vec<u64> = n.iter().zip(&i).map(|(&a, &b)| a + b as u64).collect();
        let mut t = 0u64;
        for w in 1..=r {
            if w != l {
                let d = if w < l { w - 1 } else { w - 2 };
                t = (t + shifted[w - 1] % modulus * (s as u64).pow(d as u32)) % modulus;
            }
        }
        for j in 0..k {
            seen.insert(k as u64 * (s as u64 * t + i[l - 1] as u64) + j as u64);
        }
    }
    seen.len()
}

fn lemma5_injectivity() -> Check {
    let mut cases = 0;
    for r in [2usize, 3] {
        for s in [1usize, 2, 3] {
            let side = (s as u64).pow(r as u32);
            for dims in block_shapes(r, s) {
                let expected_base: usize = dims.iter().product();
                for k in [2usize, 3] {
                    for flat in 0..side.pow(r as u32) {
                        let n: Vec<u64> = (0..r).map(|w| flat / side.pow(w as u32) % side).collect();
                        for l in 1..=r {
                            let size = index_set_size(s, &dims, &n, k, l);
                            ensure(size == k * expected_base, || {
                                format!("r={r} s={s} dims={dims:?} k={k} n={n:?} l={l}: {size} values")
                            })?;
                        }
                        ensure(lemma5_check(s, &dims, &LatticeIndex(n.clone()), k), || {
                            format!("lemma5_check false at r={r} s={s} dims={dims:?} k={k} n={n:?}")
                        })?;
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} (r, s, dims, k, n) cases"))
}

fn lemma2_identity() -> Check {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for ctx in small_fields() {
        for beta in ctx.elements() {
            worst = worst.max(lemma2_delta_check(&ctx, &beta).map_err(|e| e.to_string())?);
            count += 1;
        }
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("{count} elements, max deviation {worst:.2e}"))
}

/// Row weight computed from its definition, independent of the library.
fn row_weight(b: u64, row: &[i64]) -> f64 {
    let Some(d) = row.iter().rposition(|&v| v != 0).map(|i| i + 1) else {
        return 1.0;
    };
    let bf = b as f64;
    if b == 2 {
        return bf.powi(-(d as i32));
    }
    let sigma = if d < row.len() { 1.0 } else { 0.0 };
    bf.powi(-(d as i32)) * (1.0 / (PI * row[d - 1].unsigned_abs() as f64 / bf).sin() + sigma)
}

fn lemma1_inequality() -> Check {
    let mut worst_ratio: f64 = 0.0;
    for b in [2u64, 3, 5] {
        let lo = -((b as i64 - 1) / 2);
        for s in [1usize, 2] {
            for m in [1usize, 2] {
                let cells = s * m;
                let mut total = 0.0;
                for flat in 0..b.pow(cells as u32) {
                    let entries: Vec<i64> = (0..cells).map(|c| lo + (flat / b.pow(c as u32) % b) as i64).collect();
                    if entries.iter().all(|&v| v == 0) {
                        continue;
                    }
                    total += entries.chunks(m).map(|row| row_weight(b, row)).product::<f64>();
                }
                let lib = lemma1_lhs(b, s, m).map_err(|e| e.to_string())?;
                ensure((lib - total).abs() <= 1e-12 * total.max(1.0), || {
                    format!("b={b} s={s} m={m}: library {lib} vs enumeration {total}")
                })?;
                let rhs = (2.0 / PI * m as f64 * (b as f64).ln() + 1.4 * m as f64 - (m as f64 - 1.0) / b as f64)
                    .powi(s as i32);
                ensure((rhs - lemma1_rhs(b, s, m)).abs() < 1e-12, || {
                    format!("rhs mismatch at b={b} s={s} m={m}")
                })?;
                ensure(total < rhs - 1e-9, || format!("b={b} s={s} m={m}: {total} not < {rhs}"))?;
                worst_ratio = worst_ratio.max(total / rhs);
            }
        }
    }
    Ok(format!("12 cases, max lhs/rhs {worst_ratio:.4}"))
}

fn theorem_a_domination() -> Check {
    let ctx = FieldCtx::new(5, 2, &[2, 1, 1]).map_err(|e| e.to_string())?;
    let prim = ctx.enumerate_primitive();
    let pairs: Vec<(usize, u64)> = (0..24).map(|i| (i % prim.len(), 1 + (7 * i as u64) % 24)).collect();
    let mut checks = 0;
    let mut min_gap = f64::INFINITY;
    for s in [1usize, 2] {
        for &(bi, ai) in &pairs {
            let params = GeneratorParams::new(&ctx, ctx.element_from_index(ai), prim[bi].clone(), 1, 1, s)
                .map_err(|e| e.to_string())?;
            let pts = theorem1_points(&params, 24).map_err(|e| e.to_string())?;
            for n in 4..=24usize {
                let ps = PointSet::from_prn_points(&pts[..n]).map_err(|e| e.to_string())?;
                let d = to_f64(&star_discrepancy_exact(&ps).map_err(|e| e.to_string())?);
                let m = floor_log(n as u64, 5) + 1;
                let expected_m = if n < 5 { 1 } else { 2 };
                ensure(m == expected_m, || format!("floor_log({n}, 5) + 1 = {m}"))?;
                let bound = theorem_a_bound(5, &ps, m).map_err(|e| e.to_string())?;
                ensure(bound >= d - 1e-9, || {
                    format!("s={s} β#{bi} α#{ai} N={n}: bound {bound} < D {d}")
                })?;
                min_gap = min_gap.min(bound - d);
                checks += 1;
            }
        }
    }
    Ok(format!(
        "{} pairs × 2 dims × 21 N = {checks} checks, min gap {min_gap:.4}",
        pairs.len()
    ))
}

type Q = Ratio<i128>;

/// Star discrepancy by evaluating every corner built from point
/// coordinates and 1, with every combination of open and closed sides.
fn brute_force_discrepancy(points: &[Vec<Q>]) -> Q {
    let s = points[0].len();
    let n = Q::from_integer(points.len() as i128);
    let cands: Vec<Vec<Q>> = (0..s)
        .map(|i| {
            let mut v: Vec<Q> = points.iter().map(|p| p[i]).collect();
            v.push(Q::from_integer(1));
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let mut best = Q::from_integer(0);
    let mut idx = vec![0usize; s];
    loop {
        let corner: Vec<Q> = (0..s).map(|i| cands[i][idx[i]]).collect();
        let vol: Q = corner.iter().product();
        for mask in 0..(1u32 << s) {
            let count = points
                .iter()
                .filter(|p| {
                    (0..s).all(|i| {
                        if mask >> i & 1 == 1 {
                            p[i] <= corner[i]
                        } else {
                            p[i] < corner[i]
                        }
                    })
                })
                .count();
            let diff = Q::from_integer(count as i128) / n - vol;
            let abs = if diff < Q::from_integer(0) { -diff } else { diff };
            if abs > best {
                best = abs;
            }
        }
        let mut w = 0;
        loop {
            if w == s {
                return best;
            }
            idx[w] += 1;
            if idx[w] < cands[w].len() {
                break;
            }
            idx[w] = 0;
            w += 1;
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, s: usize, n: usize) -> Vec<Vec<Ratio<u64>>> {
    (0..n)
        .map(|_| {
            (0..s)
                .map(|_| {
                    let den = rng.gen_range(1..=12u64);
                    Ratio::new(rng.gen_range(0..den), den)
                })
                .collect()
        })
        .collect()
}

fn same(a: &num_rational::BigRational, b: &Q) -> bool {
    a.numer().to_string() == b.numer().to_string() && a.denom().to_string() == b.denom().to_string()
}

fn discrepancy_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for t in 0..100 {
        let n = rng.gen_range(1..=8);
        let pts = random_points(&mut rng, 1, n);
        let ps = PointSet::from_rationals(1, &pts).map_err(|e| e.to_string())?;
        let fast = star_discrepancy_sorted_1d(&ps);
        let grid = star_discrepancy_grid(&ps).map_err(|e| e.to_string())?;
        ensure(fast == grid, || format!("1-D set {t}: sorted {fast} vs grid {grid}"))?;
    }
    for t in 0..25 {
        let n = rng.gen_range(1..=5);
        let pts = random_points(&mut rng, 2, n);
        let ps = PointSet::from_rationals(2, &pts).map_err(|e| e.to_string())?;
        let grid = star_discrepancy_grid(&ps).map_err(|e| e.to_string())?;
        let wide: Vec<Vec<Q>> = pts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|c| Q::new(*c.numer() as i128, *c.denom() as i128))
                    .collect()
            })
            .collect();
        let brute = brute_force_discrepancy(&wide);
        ensure(same(&grid, &brute), || {
            format!("2-D set {t}: grid {grid} vs brute force {brute}")
        })?;
    }
    Ok("100 one-dimensional and 25 two-dimensional sets agree exactly".into())
}

fn lemma6_sweep() -> Check {
    let mut checks = 0;
    for (q, k) in [(3125u64, 5u32), (4096, 12), (16807, 5)] {
        let phi = coprime_count(q - 1);
        ensure(euler_phi(q - 1) == phi, || format!("φ({}) mismatch", q - 1))?;
        let top = (4.0 * q as f64).ln();
        for i in 0..64 {
            let t = ((top * i as f64 / 63.0).exp().round() as u64).clamp(1, 4 * q);
            let lhs = k as f64 * t as f64 / phi as f64;
            let l = (3.0 * t as f64).ln();
            let rhs = 40.0 * l * (3.0 * l).ln();
            let out = lemma6_check(q, k, t).map_err(|e| e.to_string())?;
            ensure(
                (out.lhs - lhs).abs() <= 1e-12 * lhs && (out.rhs - rhs).abs() <= 1e-9,
                || format!("q={q} T={t}: library ({}, {}) vs ({lhs}, {rhs})", out.lhs, out.rhs),
            )?;
            ensure(lhs <= rhs && out.holds, || {
                format!("counterexample q={q} T={t}: {lhs} > {rhs}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (q, T) points, no counterexample"))
}

fn e(phase: f64) -> (f64, f64) {
    let a = 2.0 * PI * phase;
    (a.cos(), a.sin())
}

fn completion_inequalities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for inst in 0..200 {
        let t = rng.gen_range(1..=64usize);
        let n = rng.gen_range(1..=t);
        let x: Vec<f64> = (0..t).map(|_| rng.gen()).collect();
        let (lhs, rhs) = completion_check(&x, n).map_err(|e| e.to_string())?;
        // direct evaluation
        let (mut re, mut im) = (0.0, 0.0);
        for &xv in &x[..n] {
            let (c, s) = e(xv);
            re += c;
            im += s;
        }
        let direct_lhs = f64::hypot(re, im);
        let half = (t / 2) as i64;
        let mut direct_rhs = 0.0;
        let mut harmonic = 0.0;
        for m in -half..=half {
            let w = 1.0 / m.unsigned_abs().max(1) as f64;
            harmonic += w;
            let (mut sr, mut si) = (0.0, 0.0);
            for (j, &xv) in x.iter().enumerate() {
                let (c, s) = e(xv + (j as i64 * m) as f64 / t as f64);
                sr += c;
                si += s;
            }
            direct_rhs += w * f64::hypot(sr, si);
        }
        ensure(
            (lhs - direct_lhs).abs() < 1e-9 && (rhs - direct_rhs).abs() < 1e-9,
            || format!("instance {inst}: library ({lhs}, {rhs}) vs direct ({direct_lhs}, {direct_rhs})"),
        )?;
        ensure(lhs <= rhs + 1e-9, || {
            format!("instance {inst} (T={t}, N={n}): {lhs} > {rhs}")
        })?;
        ensure((harmonic - harmonic_weight_sum(t)).abs() < 1e-12, || {
            format!("harmonic sum mismatch at T={t}")
        })?;
        ensure(harmonic <= 3.0 + 2.0 * (t as f64).ln() + 1e-9, || {
            format!("T={t}: Σ1/m̄ = {harmonic}")
        })?;
    }
    for inst in 0..200 {
        let t = [rng.gen_range(1..=8usize), rng.gen_range(1..=8usize)];
        let n = [rng.gen_range(1..=t[0]), rng.gen_range(1..=t[1])];
        let x: Vec<f64> = (0..t[0] * t[1]).map(|_| rng.gen()).collect();
        let (lhs, rhs) = completion_check_multi(&x, &t, &n).map_err(|e| e.to_string())?;
        ensure(lhs <= rhs + 1e-9, || {
            format!("2-D instance {inst} (T={t:?}, N={n:?}): {lhs} > {rhs}")
        })?;
    }
    Ok("200 one-dimensional and 200 two-dimensional instances".into())
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/scan_q25_s1.json")
}

fn scan_distribution() -> Check {
    let mut cfg = RunConfig::single(
        FieldSpec {
            p: 5,
            k: 2,
            poly: Some("2,1,1".into()),
        },
        1,
    );
    cfg.epsilons = vec![0.25, 0.5];
    let out = run_scan(&cfg).map_err(|e| e.to_string())?;
    let expected_cells = 25 * coprime_count(24) as usize;
    ensure(out.records.len() == expected_cells, || {
        format!("{} records, expected {expected_cells}", out.records.len())
    })?;
    ensure(out.summary.grid == vec![vec![4], vec![8], vec![16], vec![24]], || {
        format!("grid {:?}", out.summary.grid)
    })?;
    for rec in &out.records {
        if rec.degenerate {
            ensure(rec.alpha == "0,0" && rec.d_exact.iter().all(|d| d == "1/1"), || {
                format!("degenerate record {rec:?}")
            })?;
        }
    }
    ensure(out.records.iter().filter(|r| r.degenerate).count() == 8, || {
        "expected 8 degenerate records".into()
    })?;
    let constant = c1(5, 1, 1, 1);
    for eps in &out.summary.epsilons {
        ensure(eps.fraction_good == 1.0, || {
            format!("ε={}: fraction {}", eps.epsilon, eps.fraction_good)
        })?;
        ensure((eps.threshold - constant / eps.epsilon).abs() < 1e-9, || {
            "threshold is not c1/ε".into()
        })?;
    }

    // the multisequence analogue on F_9, r = 2
    let mut multi = RunConfig::single(
        FieldSpec {
            p: 3,
            k: 2,
            poly: Some("2,2,1".into()),
        },
        1,
    );
    multi.mode = ScanMode::Multi;
    multi.r = 2;
    multi.dims = vec![1, 1];
    let mo = run_scan(&multi).map_err(|e| e.to_string())?;
    ensure(mo.records.len() == 81 * 16, || {
        format!("{} multisequence records", mo.records.len())
    })?;
    let c2v = c2(3, 2, 1, &[1, 1]).map_err(|e| e.to_string())?;
    ensure(
        mo.summary
            .epsilons
            .iter()
            .all(|e| e.fraction_good == 1.0 && (e.threshold - c2v / e.epsilon).abs() < 1e-6),
        || "multisequence fraction below 1".into(),
    )?;

    let rho = &out.summary.rho;
    let path = golden_path();
    let note = match std::fs::read_to_string(&path) {
        Ok(text) => {
            let golden: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            for (key, got) in [("median", rho.median), ("p95", rho.p95), ("max", rho.max)] {
                let want = golden[key].as_f64().ok_or_else(|| format!("golden lacks {key}"))?;
                ensure((got - want).abs() <= 1e-12 * want.abs(), || {
                    format!("ρ {key}: {got} vs golden {want}")
                })?;
            }
            "matches golden"
        }
        Err(_) => {
            let text = serde_json::json!({ "median": rho.median, "p95": rho.p95, "max": rho.max });
            std::fs::write(&path, serde_json::to_string_pretty(&text).unwrap() + "\n").map_err(|e| e.to_string())?;
            "golden recorded"
        }
    };
    Ok(format!(
        "200 pairs, fraction 1.0 at ε = 0.25, 0.5 (vacuous: c1 = {constant:.1}); ρ median {:.6e}, p95 {:.6e}, max {:.6e} ({note})",
        rho.median, rho.p95, rho.max
    ))
}

fn run_cli_scan(dir: &std::path::Path, workers: usize, extra: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_lrdisc"))
        .args(["scan", "--workers", &workers.to_string(), "--out"])
        .arg(dir)
        .args(extra)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("scan exited with {status}"))?;
    let read = |name: &str| std::fs::read(dir.join(name)).map_err(|e| e.to_string());
    Ok((read("summary.json")?, read("records.csv")?))
}

fn determinism() -> Check {
    let tmp = std::env::temp_dir().join(format!("lrdisc-acceptance-{}", std::process::id()));
    let runs: [&[&str]; 3] = [
        &["--p", "5", "--k", "2", "--poly", "2,1,1", "--s", "1"],
        &["--p", "5", "--k", "2", "--poly", "2,1,1", "--s", "2"],
        &[
            "--p",
            "3",
            "--k",
            "2",
            "--r",
            "2",
            "--dims",
            "1,1",
            "--samples",
            "300",
            "--seed",
            "11",
        ],
    ];
    for (i, extra) in runs.iter().enumerate() {
        let one = run_cli_scan(&tmp.join(format!("{i}-w1")), 1, extra)?;
        let four = run_cli_scan(&tmp.join(format!("{i}-w4")), 4, extra)?;
        ensure(one == four, || {
            format!("outputs differ between 1 and 4 workers for {extra:?}")
        })?;
    }
    let _ = std::fs::remove_dir_all(&tmp);
    Ok("summary.json and records.csv byte-identical for workers 1 and 4 (3 configurations)".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "field/trace correctness", 10, field_trace),
        (2, "primitive counts", 1, primitive_counts),
        (3, "block index injectivity", 30, lemma5_injectivity),
        (4, "character sum identity", 5, lemma2_identity),
        (5, "total weight inequality", 60, lemma1_inequality),
        (
            6,
            "weighted bound dominates exact discrepancy",
            120,
            theorem_a_domination,
        ),
        (7, "exact discrepancy oracle agreement", 60, discrepancy_oracles),
        (8, "totient inequality sweep", 5, lemma6_sweep),
        (9, "completion inequalities", 30, completion_inequalities),
        (10, "scan fractions and distribution", 300, scan_distribution),
        (11, "scan determinism across worker counts", 300, determinism),
    ];
    let mut failures = 0;
    for (id, title, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= Duration::from_secs(budget) {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.2?}, budget {budget} s"))
            }
        });
        match result {
            Ok(msg) => println!("PASS [{id:>2}] {title} ({:.2?} / {budget} s): {msg}", elapsed),
            Err(msg) => {
                failures += 1;
                println!("FAIL [{id:>2}] {title} ({:.2?} / {budget} s): {msg}", elapsed);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
