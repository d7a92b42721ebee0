//! CSV encodings of generated points and the JSON discrepancy report.

use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;

use crate::discrepancy::{floor_log, star_discrepancy_exact, theorem_a_bound, to_f64, PointSet};
use crate::error::{Error, Result};
use crate::multiseq::LatticeIndex;
use crate::seqgen::PrnPoint;

/// `num/den` followed by the value to 17 significant digits.
pub fn format_coord(num: u64, den: u64) -> String {
    format!("{num}/{den} {:.16e}", num as f64 / den as f64)
}

fn write_rows(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn coord_cells(pt: &PrnPoint) -> impl Iterator<Item = String> + '_ {
    let den = pt.denominator();
    pt.numerators().into_iter().map(move |n| format_coord(n, den))
}

/// `n,x_0,...,x_{s-1}`, one row per point.
pub fn gen_csv(points: &[PrnPoint]) -> Result<String> {
    let s = points.first().map_or(0, PrnPoint::dim);
    let header = std::iter::once("n".to_string())
        .chain((0..s).map(|i| format!("x_{i}")))
        .collect();
    write_rows(
        header,
        points
            .iter()
            .enumerate()
            .map(|(n, pt)| std::iter::once(n.to_string()).chain(coord_cells(pt)).collect()),
    )
}

/// `n_1,...,n_r,c_0,...,c_{s0-1}`, one row per lattice index.
pub fn multigen_csv(r: usize, entries: &[(LatticeIndex, PrnPoint)]) -> Result<String> {
    let s0 = entries.first().map_or(0, |(_, p)| p.dim());
    let header = (1..=r)
        .map(|w| format!("n_{w}"))
        .chain((0..s0).map(|i| format!("c_{i}")))
        .collect();
    write_rows(
        header,
        entries
            .iter()
            .map(|(n, pt)| n.0.iter().map(u64::to_string).chain(coord_cells(pt)).collect()),
    )
}

/// Exact rational from `a/b`, an integer, or a plain decimal literal.
pub fn parse_rational(text: &str) -> Result<Ratio<u64>> {
    let token = text.split_whitespace().next().unwrap_or("");
    let bad = || Error::Parse(format!("coordinate {text:?}"));
    if let Some((a, b)) = token.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    match token.split_once('.') {
        Some((int, frac)) => {
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            if frac.len() > 18 || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let f: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse().map_err(|_| bad())?
            };
            Ok(Ratio::new(int * den + f, den))
        }
        None => Ok(Ratio::from_integer(token.parse().map_err(|_| bad())?)),
    }
}

/// Reads a `gen` or `multigen` file; columns named `x_*` or `c_*` are
/// coordinates, everything else is ignored.
pub fn parse_points_csv(text: &str) -> Result<PointSet> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let coord_cols: Vec<usize> = rdr
        .headers()?
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("x_") || h.starts_with("c_"))
        .map(|(i, _)| i)
        .collect();
    if coord_cols.is_empty() {
        return Err(Error::Parse("no coordinate columns (x_* or c_*) in header".into()));
    }
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let pt = coord_cols
            .iter()
            .map(|&c| parse_rational(rec.get(c).unwrap_or("")))
            .collect::<Result<Vec<_>>>()?;
        points.push(pt);
    }
    if points.is_empty() {
        return Err(Error::InvalidParams("point file has no rows".into()));
    }
    PointSet::from_rationals(coord_cols.len(), &points)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    pub b: Option<u64>,
    pub m: Option<usize>,
    pub d_exact_num: String,
    pub d_exact_den: String,
    pub d_exact: f64,
    pub theorem_a_bound: Option<f64>,
    pub digits_truncated: Option<bool>,
    pub elapsed_ms: u128,
}

/// Exact discrepancy and, when `base` is given, the weighted bound with
/// `m` digits (default `floor(log_b N) + 1`).
pub fn disc_report(ps: &PointSet, base: Option<u64>, m: Option<usize>) -> Result<DiscrepancyReport> {
    let start = Instant::now();
    let d = star_discrepancy_exact(ps)?;
    let (mut bound, mut used_m, mut truncated) = (None, None, None);
    if let Some(b) = base {
        let m = m.unwrap_or_else(|| floor_log(ps.len() as u64, b) + 1);
        bound = Some(theorem_a_bound(b, ps, m)?);
        used_m = Some(m);
        truncated = ps.with_digits(b, m)?.digits().map(|d| d.truncated());
    }
    Ok(DiscrepancyReport {
        n: ps.len(),
        s: ps.dim(),
        b: base,
        m: used_m,
        d_exact_num: d.numer().to_string(),
        d_exact_den: d.denom().to_string(),
        d_exact: to_f64(&d),
        theorem_a_bound: bound,
        digits_truncated: truncated,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Smallest `b` with `den` a power of `b`, if any; used as the default
/// digit base for reports.
pub fn infer_base(den: u64) -> Option<u64> {
    if den < 2 {
        return None;
    }
    let b = crate::gf::factorize(den)[0].0;
    let mut v = den;
    while v.is_multiple_of(b) {
        v /= b;
    }
    (v == 1).then_some(b)
}
