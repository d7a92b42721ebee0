//! Point-set measurement: exact star discrepancy and the digit-weighted
//! exponential-sum machinery (frequency weights, the weighted bound, and
//! numeric checkers for the weight-sum, character-sum and completion
//! inequalities).

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::Num;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::seqgen::PrnPoint;

/// Largest star-discrepancy grid evaluated.
pub const MAX_GRID_CORNERS: u128 = 100_000_000;

/// Largest frequency-matrix enumeration.
pub const MAX_FREQUENCY_MATRICES: u128 = 10_000_000;

/// Frequency matrices are summed in fixed-size chunks so the reduction order
/// does not depend on the number of worker threads.
const CHUNK: u64 = 4096;

/// Base-`b` expansion of every coordinate, `m` digits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    base: u64,
    m: usize,
    digits: Vec<u32>,
    truncated: bool,
}

impl DigitExpansion {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// True when some coordinate needs more than `m` digits.
    pub fn truncated(&self) -> bool {
        self.truncated
    }
}

/// `N` points in `[0,1)^s` with coordinates `nums[n*s + i] / den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    den: u64,
    nums: Vec<u64>,
    digits: Option<DigitExpansion>,
}

impl PointSet {
    /// Points given as numerators over a shared denominator.
    pub fn from_numerators(dim: usize, den: u64, nums: Vec<u64>) -> Result<Self> {
        if dim == 0 || den == 0 || !nums.len().is_multiple_of(dim) {
            return Err(Error::InvalidParams(format!(
                "{} numerators do not form points of dimension {dim}",
                nums.len()
            )));
        }
        if let Some(&bad) = nums.iter().find(|&&x| x >= den) {
            return Err(Error::InvalidParams(format!(
                "coordinate {bad}/{den} is outside [0, 1)"
            )));
        }
        Ok(Self {
            dim,
            den,
            nums,
            digits: None,
        })
    }

    /// Points with arbitrary rational coordinates; the denominators are
    /// brought to their least common multiple.
    pub fn from_rationals(dim: usize, points: &[Vec<Ratio<u64>>]) -> Result<Self> {
        let mut den = 1u64;
        for c in points.iter().flatten() {
            den = (den / den.gcd(c.denom()))
                .checked_mul(*c.denom())
                .ok_or_else(|| Error::TooLarge("common denominator".into()))?;
        }
        let mut nums = Vec::with_capacity(points.len() * dim);
        for pt in points {
            if pt.len() != dim {
                return Err(Error::InvalidParams(format!(
                    "point has {} coordinates, expected {dim}",
                    pt.len()
                )));
            }
            for c in pt {
                let scaled = u128::from(*c.numer()) * u128::from(den / c.denom());
                nums.push(u64::try_from(scaled).map_err(|_| Error::TooLarge("coordinate".into()))?);
            }
        }
        Self::from_numerators(dim, den, nums)
    }

    /// Generator output; the digit rows become an exact expansion.
    pub fn from_prn_points(points: &[PrnPoint]) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidParams("empty point set".into()))?;
        let (dim, base) = (first.dim(), first.base());
        let m = first.digit_matrix().first().map_or(0, Vec::len);
        let mut nums = Vec::with_capacity(points.len() * dim);
        let mut digits = Vec::with_capacity(points.len() * dim * m);
        for pt in points {
            nums.extend(pt.numerators());
            for row in pt.digit_matrix() {
                digits.extend(row.iter().map(|&d| d as u32));
            }
        }
        let mut ps = Self::from_numerators(dim, first.denominator(), nums)?;
        ps.digits = Some(DigitExpansion {
            base,
            m,
            digits,
            truncated: false,
        });
        Ok(ps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nums.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn point(&self, n: usize) -> &[u64] {
        &self.nums[n * self.dim..(n + 1) * self.dim]
    }

    pub fn coord(&self, n: usize, i: usize) -> Ratio<u64> {
        Ratio::new(self.nums[n * self.dim + i], self.den)
    }

    pub fn digits(&self) -> Option<&DigitExpansion> {
        self.digits.as_ref()
    }

    /// Digit `j` (0-based) of coordinate `i` of point `n`.
    pub fn digit(&self, n: usize, i: usize, j: usize) -> Option<u32> {
        let d = self.digits.as_ref()?;
        (j < d.m).then(|| d.digits[(n * self.dim + i) * d.m + j])
    }

    /// Copy with a fresh base-`base` expansion of `m` digits per coordinate,
    /// computed from the exact coordinates. Coordinates needing more digits
    /// are truncated and the expansion is flagged.
    pub fn with_digits(&self, base: u64, m: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidParams(format!("digit base {base} < 2")));
        }
        let den = u128::from(self.den);
        let mut digits = Vec::with_capacity(self.nums.len() * m);
        let mut truncated = false;
        for &num in &self.nums {
            let mut rem = u128::from(num);
            for _ in 0..m {
                rem *= u128::from(base);
                digits.push((rem / den) as u32);
                rem %= den;
            }
            truncated |= rem != 0;
        }
        Ok(Self {
            digits: Some(DigitExpansion {
                base,
                m,
                digits,
                truncated,
            }),
            ..self.clone()
        })
    }
}

/// Exact star discrepancy over anchored half-open boxes `[0, γ)`.
pub fn star_discrepancy_exact(ps: &PointSet) -> Result<BigRational> {
    if ps.is_empty() {
        return Err(Error::InvalidParams("empty point set".into()));
    }
    if ps.dim == 1 {
        Ok(star_discrepancy_sorted_1d(ps))
    } else {
        star_discrepancy_grid(ps)
    }
}

/// One-dimensional closed form on the sorted sample:
/// `max_i max(i/N - x_(i), x_(i) - (i-1)/N)`.
pub fn star_discrepancy_sorted_1d(ps: &PointSet) -> BigRational {
    assert_eq!(ps.dim, 1, "sorted formula is one-dimensional");
    let mut xs = ps.nums.clone();
    xs.sort_unstable();
    let n = xs.len() as u64;
    // over the common denominator N·den
    let den = i128::from(ps.den);
    let mut best = 0i128;
    for (idx, &x) in xs.iter().enumerate() {
        let i = idx as i128 + 1;
        let xn = i128::from(x) * n as i128;
        best = best.max(i * den - xn).max(xn - (i - 1) * den);
    }
    BigRational::new(BigInt::from(best), BigInt::from(n) * BigInt::from(ps.den))
}

/// Critical-grid evaluation valid in every dimension: the maximum over
/// `γ ∈ ∏_i ({x_{n,i}} ∪ {1})` of `max(A_≤(γ)/N - vol γ, vol γ - A_<(γ)/N)`.
pub fn star_discrepancy_grid(ps: &PointSet) -> Result<BigRational> {
    if ps.is_empty() {
        return Err(Error::InvalidParams("empty point set".into()));
    }
    let axes: Vec<Vec<u64>> = (0..ps.dim)
        .map(|i| {
            let mut v: Vec<u64> = (0..ps.len()).map(|n| ps.point(n)[i]).collect();
            v.push(ps.den);
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let corners = axes
        .iter()
        .try_fold(1u128, |acc, a| acc.checked_mul(a.len() as u128))
        .unwrap_or(u128::MAX);
    if corners > MAX_GRID_CORNERS {
        return Err(Error::DimensionTooLarge { corners });
    }
    let n = ps.len() as u128;
    let den_pow = (0..ps.dim).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(ps.den)));
    let fits = den_pow
        .and_then(|d| d.checked_mul(n))
        .is_some_and(|v| v < (1u128 << 126));
    let (best, scale) = if fits {
        let (b, s) = grid_max::<i128>(ps, &axes);
        (BigInt::from(b), BigInt::from(s))
    } else {
        grid_max::<BigInt>(ps, &axes)
    };
    Ok(BigRational::new(best, scale))
}

/// Returns the maximum numerator and the common denominator `N·den^s`.
fn grid_max<T>(ps: &PointSet, axes: &[Vec<u64>]) -> (T, T)
where
    T: Num + Ord + Clone + From<u64>,
{
    let s = ps.dim;
    let n = ps.len();
    let den_pow = (0..s).fold(T::one(), |acc, _| acc * T::from(ps.den));
    let n_t = T::from(n as u64);
    let mut idx = vec![0usize; s];
    let mut gamma = vec![0u64; s];
    let mut best = T::zero();
    loop {
        for i in 0..s {
            gamma[i] = axes[i][idx[i]];
        }
        let (mut closed, mut open) = (0u64, 0u64);
        for pt in 0..n {
            let x = ps.point(pt);
            let mut le = true;
            let mut lt = true;
            for i in 0..s {
                if x[i] > gamma[i] {
                    le = false;
                    lt = false;
                    break;
                }
                if x[i] == gamma[i] {
                    lt = false;
                }
            }
            closed += u64::from(le);
            open += u64::from(lt);
        }
        let vol = gamma.iter().fold(T::one(), |acc, &g| acc * T::from(g)) * n_t.clone();
        let over = T::from(closed) * den_pow.clone();
        let under = T::from(open) * den_pow.clone();
        if over > vol {
            let d = over - vol.clone();
            if d > best {
                best = d;
            }
        }
        if vol > under {
            let d = vol - under;
            if d > best {
                best = d;
            }
        }
        // odometer over the grid
        let mut axis = 0;
        loop {
            if axis == s {
                return (best, n_t * den_pow);
            }
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// `C(b) = (-b/2, b/2] ∩ Z` in ascending order.
pub fn digit_alphabet(b: u64) -> Vec<i64> {
    let lo = -((b as i64 - 1) / 2);
    (lo..lo + b as i64).collect()
}

fn in_alphabet(h: i64, b: u64) -> bool {
    2 * h > -(b as i64) && 2 * h <= b as i64
}

/// Largest 1-based index of a nonzero entry, 0 for the zero vector.
pub fn digit_d(b: u64, h: &[i64]) -> Result<usize> {
    if let Some(&bad) = h.iter().find(|&&v| !in_alphabet(v, b)) {
        return Err(Error::OutOfRange { value: bad, base: b });
    }
    Ok(h.iter().rposition(|&v| v != 0).map_or(0, |i| i + 1))
}

/// Weight of one frequency row: `2^{-d}` for `b = 2`, otherwise
/// `b^{-d}(csc(π|h_d|/b) + σ(d, m))` with `σ(d, m) = [d < m]`.
pub fn q_weight(b: u64, h: &[i64]) -> f64 {
    let d = h.iter().rposition(|&v| v != 0).map_or(0, |i| i + 1);
    if d == 0 {
        return 1.0;
    }
    let scale = (b as f64).powi(-(d as i32));
    if b == 2 {
        return scale;
    }
    let hd = h[d - 1].unsigned_abs() as f64;
    let sigma = if d < h.len() { 1.0 } else { 0.0 };
    scale * (1.0 / (PI * hd / b as f64).sin() + sigma)
}

/// Product of row weights of an `s × m` frequency matrix.
pub fn w_weight(b: u64, h: &[Vec<i64>]) -> f64 {
    h.iter().map(|row| q_weight(b, row)).product()
}

/// Nonzero `s × m` matrices over `C(b)` in row-major lexicographic order
/// with entries ascending, each flattened row by row.
pub fn nonzero_frequency_matrices(b: u64, s: usize, m: usize) -> Result<FrequencyMatrices> {
    let count = frequency_matrix_count(b, s, m)?;
    Ok(FrequencyMatrices {
        alphabet: digit_alphabet(b),
        len: s * m,
        next: 0,
        end: count,
    })
}

fn frequency_matrix_count(b: u64, s: usize, m: usize) -> Result<u64> {
    let count = (0..s * m).try_fold(1u128, |acc, _| acc.checked_mul(u128::from(b)));
    match count {
        Some(c) if c <= MAX_FREQUENCY_MATRICES => Ok(c as u64),
        other => Err(Error::EnumerationTooLarge {
            count: other.unwrap_or(u128::MAX),
        }),
    }
}

pub struct FrequencyMatrices {
    alphabet: Vec<i64>,
    len: usize,
    next: u64,
    end: u64,
}

impl FrequencyMatrices {
    fn decode(&self, mut index: u64) -> Vec<i64> {
        let b = self.alphabet.len() as u64;
        let mut out = vec![0i64; self.len];
        for slot in out.iter_mut().rev() {
            *slot = self.alphabet[(index % b) as usize];
            index /= b;
        }
        out
    }
}

impl Iterator for FrequencyMatrices {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        while self.next < self.end {
            let h = self.decode(self.next);
            self.next += 1;
            if h.iter().any(|&v| v != 0) {
                return Some(h);
            }
        }
        None
    }
}

/// Roots of unity `e(t/b)`.
fn unit_roots(b: u64) -> Vec<(f64, f64)> {
    (0..b)
        .map(|t| {
            let a = 2.0 * PI * t as f64 / b as f64;
            (a.cos(), a.sin())
        })
        .collect()
}

fn check_digits(b: u64, m: usize, ps: &PointSet) -> Result<&DigitExpansion> {
    match ps.digits() {
        Some(d) if d.base == b && d.m >= m => Ok(d),
        _ => Err(Error::MissingDigits(b)),
    }
}

/// `|Σ_n e(b^{-1} Σ_{i,j} h_ij w_nj^{(i)})|` for a flattened `s × m`
/// frequency matrix against the first `m` digits of each coordinate.
fn exp_sum_flat(b: u64, h: &[i64], m: usize, ps: &PointSet, roots: &[(f64, f64)]) -> f64 {
    let digits = ps.digits.as_ref().expect("digits checked by caller");
    let bi = b as i64;
    let (mut re, mut im) = (0.0, 0.0);
    for n in 0..ps.len() {
        let mut phase = 0i64;
        for i in 0..ps.dim {
            let base = (n * ps.dim + i) * digits.m;
            for j in 0..m {
                let hij = h[i * m + j];
                if hij != 0 {
                    phase += hij * i64::from(digits.digits[base + j]);
                }
            }
        }
        let (c, s) = roots[phase.rem_euclid(bi) as usize];
        re += c;
        im += s;
    }
    re.hypot(im)
}

/// Magnitude of the digit exponential sum for an `s × m` matrix `h`.
pub fn exp_sum(b: u64, h: &[Vec<i64>], ps: &PointSet) -> Result<f64> {
    if h.len() != ps.dim {
        return Err(Error::InvalidParams(format!(
            "frequency matrix has {} rows, point set dimension is {}",
            h.len(),
            ps.dim
        )));
    }
    let m = h.first().map_or(0, Vec::len);
    check_digits(b, m, ps)?;
    for row in h {
        digit_d(b, row)?;
    }
    let flat: Vec<i64> = h.iter().flatten().copied().collect();
    Ok(exp_sum_flat(b, &flat, m, ps, &unit_roots(b)))
}

/// `s·b/N + Σ_{H ≠ 0} W_b(H) |N^{-1} Σ_n e(...)|` over all nonzero
/// `s × m` frequency matrices, with digits recomputed from the exact
/// coordinates in base `b`.
pub fn theorem_a_bound(b: u64, ps: &PointSet, m: usize) -> Result<f64> {
    if ps.is_empty() {
        return Err(Error::InvalidParams("empty point set".into()));
    }
    let min = floor_log(ps.len() as u64, b);
    if m < min {
        return Err(Error::MTooSmall { m, min });
    }
    let count = frequency_matrix_count(b, ps.dim, m)?;
    let ps = ps.with_digits(b, m)?;
    let roots = unit_roots(b);
    let alphabet = digit_alphabet(b);
    let len = ps.dim * m;
    let n = ps.len() as f64;
    let chunks: Vec<f64> = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sum = 0.0;
            let mut h = vec![0i64; len];
            for index in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let mut t = index;
                for slot in h.iter_mut().rev() {
                    *slot = alphabet[(t % b) as usize];
                    t /= b;
                }
                if h.iter().all(|&v| v == 0) {
                    continue;
                }
                let w: f64 = h.chunks(m).map(|row| q_weight(b, row)).product();
                sum += w * exp_sum_flat(b, &h, m, &ps, &roots) / n;
            }
            sum
        })
        .collect();
    let tail: f64 = chunks.iter().sum();
    Ok(ps.dim as f64 * b as f64 / n + tail)
}

/// `floor(log_b n)` computed in integers.
pub fn floor_log(n: u64, b: u64) -> usize {
    let mut e = 0;
    let mut acc = b;
    while acc <= n {
        e += 1;
        match acc.checked_mul(b) {
            Some(v) => acc = v,
            None => break,
        }
    }
    e
}

/// Closed-form bound `(2/π · m ln b + 7/5 · m - (m-1)/b)^s` on the total
/// frequency weight.
pub fn lemma1_rhs(b: u64, s: usize, m: usize) -> f64 {
    let (bf, mf) = (b as f64, m as f64);
    (2.0 / PI * mf * bf.ln() + 1.4 * mf - (mf - 1.0) / bf).powi(s as i32)
}

/// Brute-force total weight `Σ_{H ≠ 0} W_b(H)`.
pub fn lemma1_lhs(b: u64, s: usize, m: usize) -> Result<f64> {
    lemma1_lhs_with(b, s, m, q_weight)
}

/// [`lemma1_lhs`] with a caller-supplied row weight.
pub fn lemma1_lhs_with(b: u64, s: usize, m: usize, row_weight: impl Fn(u64, &[i64]) -> f64) -> Result<f64> {
    let mut total = 0.0;
    for h in nonzero_frequency_matrices(b, s, m)? {
        total += h.chunks(m).map(|row| row_weight(b, row)).product::<f64>();
    }
    Ok(total)
}

/// `|q^{-1} Σ_{α ∈ F_q} e(Tr(αβ)/p) - δ(β)|`.
pub fn lemma2_delta_check(ctx: &FieldCtx, beta: &crate::gf::FieldElement) -> Result<f64> {
    let roots = unit_roots(ctx.p());
    let (mut re, mut im) = (0.0, 0.0);
    for alpha in ctx.elements() {
        let t = ctx.trace(&ctx.mul(&alpha, beta))?;
        re += roots[t as usize].0;
        im += roots[t as usize].1;
    }
    let q = ctx.q() as f64;
    let delta = if beta.is_zero() { 1.0 } else { 0.0 };
    Ok((re / q - delta).hypot(im / q))
}

/// `Σ_{|m| ≤ T/2} 1/max(1, |m|)`.
pub fn harmonic_weight_sum(t: usize) -> f64 {
    let half = (t / 2) as i64;
    (-half..=half).map(|m| 1.0 / m.unsigned_abs().max(1) as f64).sum()
}

/// Completion of an incomplete exponential sum. Returns
/// `(|Σ_{n<N} e(x_n)|, Σ_{|m| ≤ T/2} m̄^{-1} |Σ_{n<T} e(x_n + nm/T)|)`
/// where `T = x.len()`.
pub fn completion_check(x: &[f64], n: usize) -> Result<(f64, f64)> {
    completion_check_multi(x, &[x.len()], &[n])
}

/// Multidimensional completion over a row-major array of shape `t`,
/// truncated to the box `n`.
pub fn completion_check_multi(x: &[f64], t: &[usize], n: &[usize]) -> Result<(f64, f64)> {
    if t.len() != n.len() || t.is_empty() {
        return Err(Error::InvalidParams("shape and box ranks differ".into()));
    }
    let total: usize = t.iter().product();
    if x.len() != total {
        return Err(Error::InvalidParams(format!(
            "array of {} values does not have shape {t:?}",
            x.len()
        )));
    }
    if n.iter().zip(t).any(|(ni, ti)| ni > ti) {
        return Err(Error::InvalidParams("box exceeds the array shape".into()));
    }
    let r = t.len();
    let e = |phase: f64| {
        let a = 2.0 * PI * phase;
        (a.cos(), a.sin())
    };
    let unravel = |mut flat: usize, shape: &[usize]| -> Vec<usize> {
        let mut idx = vec![0; r];
        for w in (0..r).rev() {
            idx[w] = flat % shape[w];
            flat /= shape[w];
        }
        idx
    };

    let (mut re, mut im) = (0.0, 0.0);
    for (flat, &xv) in x.iter().enumerate() {
        let idx = unravel(flat, t);
        if idx.iter().zip(n).all(|(i, ni)| i < ni) {
            let (c, s) = e(xv);
            re += c;
            im += s;
        }
    }
    let lhs = re.hypot(im);

    // m_w ranges over |m_w| ≤ T_w/2
    let spans: Vec<usize> = t.iter().map(|&tw| 2 * (tw / 2) + 1).collect();
    let m_count: usize = spans.iter().product();
    let mut rhs = 0.0;
    for mflat in 0..m_count {
        let m: Vec<i64> = unravel(mflat, &spans)
            .iter()
            .zip(t)
            .map(|(&u, &tw)| u as i64 - (tw / 2) as i64)
            .collect();
        let weight: f64 = m.iter().map(|&mw| 1.0 / mw.unsigned_abs().max(1) as f64).product();
        let (mut sr, mut si) = (0.0, 0.0);
        for (flat, &xv) in x.iter().enumerate() {
            let idx = unravel(flat, t);
            let twist: f64 = idx
                .iter()
                .zip(&m)
                .zip(t)
                .map(|((&nw, &mw), &tw)| (nw as i64 * mw) as f64 / tw as f64)
                .sum();
            let (c, s) = e(xv + twist);
            sr += c;
            si += s;
        }
        rhs += weight * sr.hypot(si);
    }
    Ok((lhs, rhs))
}

/// Converts an exact discrepancy to the nearest double.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
