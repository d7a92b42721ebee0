//! Exhaustive or sampled scan over generator parameters, recording the
//! normalized discrepancy statistic of every `(α, β)` cell.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RunConfig, ScanMode};
use crate::bounds::{c1, c2, eq23_avg_bound, theorem1_shape, theorem2_shape};
use crate::discrepancy::{star_discrepancy_exact, to_f64, PointSet};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::multiseq::{block_points, MultiseqParams};
use crate::seqgen::{shifted_points, GeneratorParams, PrnPoint, TraceSource};

/// Largest field scanned exhaustively in single-sequence mode.
pub const SINGLE_EXHAUSTIVE_MAX_Q: u64 = 625;
/// Largest field scanned exhaustively in multisequence mode.
pub const MULTI_EXHAUSTIVE_MAX_Q: u64 = 81;
/// Largest field for which a sampled scan enumerates the primitive roots.
pub const SAMPLED_MAX_Q: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub beta_index: u64,
    pub alpha_index: u64,
    pub alpha: String,
    pub beta: String,
    pub degenerate: bool,
    /// Exact discrepancy per grid entry as `num/den`.
    pub d_exact: Vec<String>,
    pub d: Vec<f64>,
    pub rho: f64,
    /// 1-based position in ascending `rho` order, ties by scan order.
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoStats {
    pub min: f64,
    pub median: f64,
    pub p95: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfStep {
    pub rho: f64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub threshold: f64,
    pub fraction_good: f64,
    /// The threshold exceeds every observed `rho`.
    pub vacuous: bool,
}

/// Mean of `N·D(N)` over all scanned cells next to the averaged bound
/// `s·p + eq23_avg_bound(b1, s, N)` it must stay below.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanReport {
    pub n: Vec<u64>,
    pub mean_nd: f64,
    pub reference: Option<f64>,
    pub below: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub mode: ScanMode,
    pub p: u64,
    pub k: usize,
    pub q: u64,
    pub modulus: Vec<u64>,
    pub s: usize,
    pub b1: u64,
    pub b2: u64,
    pub r: usize,
    pub dims: Vec<usize>,
    pub grid: Vec<Vec<u64>>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub exhaustive: bool,
    pub cells: usize,
    pub degenerate: usize,
    pub constant: f64,
    pub rho: RhoStats,
    pub cdf: Vec<CdfStep>,
    pub epsilons: Vec<EpsilonReport>,
    pub mean_nd: Vec<MeanReport>,
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    pub summary: ScanSummary,
}

impl ScanOutcome {
    pub fn summary_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&self.summary).map_err(|e| Error::Internal(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn records_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["beta_index", "alpha_index", "beta", "alpha", "degenerate"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(self.summary.grid.iter().map(|n| format!("D_{}", grid_label(n))));
        header.extend(["rho".to_string(), "rank".to_string()]);
        w.write_record(&header)?;
        for rec in &self.records {
            let mut row = vec![
                rec.beta_index.to_string(),
                rec.alpha_index.to_string(),
                rec.beta.clone(),
                rec.alpha.clone(),
                rec.degenerate.to_string(),
            ];
            row.extend(rec.d_exact.iter().cloned());
            row.push(format!("{:.17e}", rec.rho));
            row.push(rec.rank.to_string());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

fn grid_label(n: &[u64]) -> String {
    n.iter().map(u64::to_string).collect::<Vec<_>>().join("x")
}

/// Runs the scan described by `cfg` on a pool of `cfg.workers` threads
/// (0 means the rayon default). Output order is (β index, α index)
/// regardless of the worker count.
pub fn run_scan(cfg: &RunConfig) -> Result<ScanOutcome> {
    let ctx = cfg.field.build()?;
    let grid = cfg.effective_grid(ctx.q());
    validate(cfg, &ctx, &grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let primitives = ctx.enumerate_primitive();
    let (cells, exhaustive) = select_cells(cfg, &ctx, primitives.len() as u64)?;
    let mut records = pool.install(|| match cfg.mode {
        ScanMode::Single => scan_single(cfg, &ctx, &primitives, &grid, &cells),
        ScanMode::Multi => scan_multi(cfg, &ctx, &primitives, &grid, &cells),
    })?;
    assign_ranks(&mut records);
    let summary = summarize(cfg, &ctx, &grid, &records, exhaustive)?;
    Ok(ScanOutcome { records, summary })
}

fn validate(cfg: &RunConfig, ctx: &FieldCtx, grid: &[Vec<u64>]) -> Result<()> {
    let width = match cfg.mode {
        ScanMode::Single => 1,
        ScanMode::Multi => cfg.r,
    };
    if grid.is_empty() || grid.iter().any(|n| n.len() != width || n.contains(&0)) {
        return Err(Error::InvalidParams(format!(
            "N grid {grid:?} must hold positive entries of width {width}"
        )));
    }
    if cfg.s == 0 {
        return Err(Error::InvalidParams("dimension s must be at least 1".into()));
    }
    if cfg.samples == Some(0) {
        return Err(Error::InvalidParams("samples must be positive".into()));
    }
    let limit = match (cfg.samples, cfg.mode) {
        (Some(_), _) => SAMPLED_MAX_Q,
        (None, ScanMode::Single) => SINGLE_EXHAUSTIVE_MAX_Q,
        (None, ScanMode::Multi) => MULTI_EXHAUSTIVE_MAX_Q,
    };
    if ctx.q() > limit {
        return Err(Error::TooLarge(format!(
            "q = {} exceeds {limit} for this scan; pass a sample count",
            ctx.q()
        )));
    }
    Ok(())
}

/// Cells as (β flat index, α flat index), sorted.
fn select_cells(cfg: &RunConfig, ctx: &FieldCtx, n_prim: u64) -> Result<(Vec<(u64, u64)>, bool)> {
    let width = match cfg.mode {
        ScanMode::Single => 1,
        ScanMode::Multi => cfg.r as u32,
    };
    let too_many = || Error::TooLarge("cell count overflows".into());
    let n_alpha = ctx.q().checked_pow(width).ok_or_else(too_many)?;
    let n_beta = n_prim.checked_pow(width).ok_or_else(too_many)?;
    let total = n_alpha.checked_mul(n_beta).ok_or_else(too_many)?;
    let split = |flat: u64| (flat / n_alpha, flat % n_alpha);
    match cfg.samples {
        Some(count) if (count as u64) < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let total = usize::try_from(total).map_err(|_| too_many())?;
            let mut picked = rand::seq::index::sample(&mut rng, total, count).into_vec();
            picked.sort_unstable();
            Ok((picked.into_iter().map(|f| split(f as u64)).collect(), false))
        }
        _ => Ok(((0..total).map(split).collect(), true)),
    }
}

/// Digits of `flat` in base `radix`, most significant first.
fn unflatten(mut flat: u64, radix: u64, width: usize) -> Vec<u64> {
    let mut out = vec![0; width];
    for slot in out.iter_mut().rev() {
        *slot = flat % radix;
        flat /= radix;
    }
    out
}

fn exact_row(points: &[PrnPoint], sizes: impl Iterator<Item = usize>) -> Result<(Vec<String>, Vec<f64>)> {
    let mut exact = Vec::new();
    let mut approx = Vec::new();
    for n in sizes {
        let d = star_discrepancy_exact(&PointSet::from_prn_points(&points[..n])?)?;
        exact.push(format!("{}/{}", d.numer(), d.denom()));
        approx.push(to_f64(&d));
    }
    Ok((exact, approx))
}

fn rho_of(d: &[f64], shapes: &[f64]) -> f64 {
    d.iter().zip(shapes).map(|(d, sh)| d / sh).fold(0.0, f64::max)
}

fn scan_single(
    cfg: &RunConfig,
    ctx: &FieldCtx,
    primitives: &[FieldElement],
    grid: &[Vec<u64>],
    cells: &[(u64, u64)],
) -> Result<Vec<ScanRecord>> {
    let sizes: Vec<usize> = grid.iter().map(|n| n[0] as usize).collect();
    let count = *sizes.iter().max().unwrap_or(&0);
    let shapes: Vec<f64> = grid.iter().map(|n| theorem1_shape(cfg.s, n[0])).collect();
    let basis = ctx.trace_basis()?;
    let mut records = Vec::with_capacity(cells.len());
    for group in cells.chunk_by(|a, b| a.0 == b.0) {
        let beta_index = group[0].0;
        let beta = &primitives[beta_index as usize];
        let powers: Vec<FieldElement> = std::iter::successors(Some(ctx.one()), |x| Some(ctx.mul(x, beta)))
            .take(ctx.group_order() as usize)
            .collect();
        let part = group
            .par_iter()
            .map(|&(_, alpha_index)| {
                let alpha = ctx.element_from_index(alpha_index);
                let source = TraceSource::from_powers(ctx, &basis, &alpha, &powers);
                let params = GeneratorParams::new(ctx, alpha.clone(), beta.clone(), cfg.b1, cfg.b2, cfg.s)?;
                let points = shifted_points(&params, &source, count);
                let (d_exact, d) = exact_row(&points, sizes.iter().copied())?;
                Ok(ScanRecord {
                    beta_index,
                    alpha_index,
                    alpha: alpha.to_string(),
                    beta: beta.to_string(),
                    degenerate: alpha.is_zero(),
                    rho: rho_of(&d, &shapes),
                    d_exact,
                    d,
                    rank: 0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        records.extend(part);
    }
    Ok(records)
}

fn scan_multi(
    cfg: &RunConfig,
    ctx: &FieldCtx,
    primitives: &[FieldElement],
    grid: &[Vec<u64>],
    cells: &[(u64, u64)],
) -> Result<Vec<ScanRecord>> {
    let s0: usize = cfg.dims.iter().product();
    let shapes: Vec<f64> = grid.iter().map(|n| theorem2_shape(cfg.r, s0, n)).collect();
    let join = |v: &[FieldElement]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";");
    cells
        .par_iter()
        .map(|&(beta_index, alpha_index)| {
            let alphas: Vec<FieldElement> = unflatten(alpha_index, ctx.q(), cfg.r)
                .into_iter()
                .map(|i| ctx.element_from_index(i))
                .collect();
            let betas: Vec<FieldElement> = unflatten(beta_index, primitives.len() as u64, cfg.r)
                .into_iter()
                .map(|i| primitives[i as usize].clone())
                .collect();
            let params = MultiseqParams::new(ctx, cfg.s, cfg.dims.clone(), alphas.clone(), betas.clone())?;
            let mut d_exact = Vec::with_capacity(grid.len());
            let mut d = Vec::with_capacity(grid.len());
            for n in grid {
                let dims: Vec<usize> = n.iter().map(|&v| v as usize).collect();
                let pts: Vec<PrnPoint> = block_points(&params, &dims)?.into_iter().map(|(_, p)| p).collect();
                let (e, a) = exact_row(&pts, std::iter::once(pts.len()))?;
                d_exact.extend(e);
                d.extend(a);
            }
            Ok(ScanRecord {
                beta_index,
                alpha_index,
                alpha: join(&alphas),
                beta: join(&betas),
                degenerate: params.is_degenerate(),
                rho: rho_of(&d, &shapes),
                d_exact,
                d,
                rank: 0,
            })
        })
        .collect()
}

fn assign_ranks(records: &mut [ScanRecord]) {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| records[a].rho.total_cmp(&records[b].rho).then(a.cmp(&b)));
    for (rank, idx) in order.into_iter().enumerate() {
        records[idx].rank = rank + 1;
    }
}

/// Nearest-rank percentile of sorted data, `0 < pct ≤ 1`.
pub fn nearest_rank(sorted: &[f64], pct: f64) -> f64 {
    let idx = ((pct * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

fn summarize(
    cfg: &RunConfig,
    ctx: &FieldCtx,
    grid: &[Vec<u64>],
    records: &[ScanRecord],
    exhaustive: bool,
) -> Result<ScanSummary> {
    if records.is_empty() {
        return Err(Error::Internal("scan produced no records".into()));
    }
    let constant = match cfg.mode {
        ScanMode::Single => c1(ctx.p(), cfg.s, cfg.b1, cfg.b2),
        ScanMode::Multi => c2(ctx.p(), cfg.r, cfg.s, &cfg.dims)?,
    };
    let mut sorted: Vec<f64> = records.iter().map(|r| r.rho).collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let rho = RhoStats {
        min: sorted[0],
        median: nearest_rank(&sorted, 0.5),
        p95: nearest_rank(&sorted, 0.95),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / n,
    };
    let mut cdf: Vec<CdfStep> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let fraction = (i + 1) as f64 / n;
        match cdf.last_mut() {
            Some(last) if last.rho == v => last.fraction = fraction,
            _ => cdf.push(CdfStep { rho: v, fraction }),
        }
    }
    let epsilons = cfg
        .epsilons
        .iter()
        .map(|&epsilon| {
            let threshold = constant / epsilon;
            let good = sorted.iter().filter(|&&v| v <= threshold).count();
            EpsilonReport {
                epsilon,
                threshold,
                fraction_good: good as f64 / n,
                vacuous: threshold > rho.max,
            }
        })
        .collect();
    let mean_nd = grid
        .iter()
        .enumerate()
        .map(|(g, nv)| {
            let size: u64 = nv.iter().product();
            let mean_nd = records.iter().map(|r| size as f64 * r.d[g]).sum::<f64>() / n;
            let reference = match cfg.mode {
                ScanMode::Single => Some(cfg.s as f64 * ctx.p() as f64 + eq23_avg_bound(cfg.b1, cfg.s, size)?),
                ScanMode::Multi => None,
            };
            Ok(MeanReport {
                n: nv.clone(),
                mean_nd,
                reference,
                below: reference.map(|r| mean_nd <= r),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanSummary {
        mode: cfg.mode,
        p: ctx.p(),
        k: ctx.k(),
        q: ctx.q(),
        modulus: ctx.modulus().to_vec(),
        s: cfg.s,
        b1: cfg.b1,
        b2: cfg.b2,
        r: if cfg.mode == ScanMode::Multi { cfg.r } else { 1 },
        dims: cfg.dims.clone(),
        grid: grid.to_vec(),
        seed: cfg.seed,
        samples: cfg.samples,
        exhaustive,
        cells: records.len(),
        degenerate: records.iter().filter(|r| r.degenerate).count(),
        constant,
        rho,
        cdf,
        epsilons,
        mean_nd,
    })
}
