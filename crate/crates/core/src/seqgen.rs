//! Linear recurring sequences over F_p, their trace representation, the
//! digital multistep transform and the shifted s-dimensional point sequence.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf::{mod_inv, FieldCtx, FieldElement};

/// Field sizes up to this bound get a precomputed table of
/// `Tr(α β^e)` over one period.
const TABLE_LIMIT: u64 = 1 << 22;

/// Parameters of the shifted point sequence `x(b1·n + b2)`.
#[derive(Clone, Debug)]
pub struct GeneratorParams<'a> {
    ctx: &'a FieldCtx,
    alpha: FieldElement,
    beta: FieldElement,
    b1: u64,
    b2: u64,
    s: usize,
}

impl<'a> GeneratorParams<'a> {
    pub fn new(ctx: &'a FieldCtx, alpha: FieldElement, beta: FieldElement, b1: u64, b2: u64, s: usize) -> Result<Self> {
        if !ctx.is_primitive(&beta) {
            return Err(Error::NotPrimitive);
        }
        let q = ctx.q();
        if !(1..=q).contains(&b1) || !(1..=q).contains(&b2) {
            return Err(Error::InvalidParams(format!(
                "shifts b1 = {b1}, b2 = {b2} must lie in [1, {q}]"
            )));
        }
        if s == 0 {
            return Err(Error::InvalidParams("dimension s must be at least 1".into()));
        }
        Ok(Self {
            ctx,
            alpha,
            beta,
            b1,
            b2,
            s,
        })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    pub fn b1(&self) -> u64 {
        self.b1
    }

    pub fn b2(&self) -> u64 {
        self.b2
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `α = 0` yields the all-zero sequence.
    pub fn is_degenerate(&self) -> bool {
        self.alpha.is_zero()
    }

    pub fn trace_source(&self) -> Result<TraceSource> {
        TraceSource::new(self.ctx, &self.alpha, &self.beta)
    }
}

/// Random access to `y_m = Tr(α β^m)`.
#[derive(Clone, Debug)]
pub struct TraceSource {
    period: u64,
    repr: TraceRepr,
}

#[derive(Clone, Debug)]
enum TraceRepr {
    Table(Vec<u32>),
    Direct {
        ctx: FieldCtx,
        basis: Vec<u64>,
        alpha: FieldElement,
        beta: FieldElement,
    },
}

impl TraceSource {
    pub fn new(ctx: &FieldCtx, alpha: &FieldElement, beta: &FieldElement) -> Result<Self> {
        let period = ctx.group_order();
        let basis = ctx.trace_basis()?;
        let repr = if ctx.q() <= TABLE_LIMIT {
            let mut cur = alpha.clone();
            let mut table = Vec::with_capacity(period as usize);
            for _ in 0..period {
                table.push(linear_trace(ctx, &basis, &cur) as u32);
                cur = ctx.mul(&cur, beta);
            }
            TraceRepr::Table(table)
        } else {
            TraceRepr::Direct {
                ctx: ctx.clone(),
                basis,
                alpha: alpha.clone(),
                beta: beta.clone(),
            }
        };
        Ok(Self { period, repr })
    }

    /// Table over one period from precomputed powers `β^0, ..., β^{q-2}`.
    pub fn from_powers(ctx: &FieldCtx, basis: &[u64], alpha: &FieldElement, powers: &[FieldElement]) -> Self {
        let table = powers
            .iter()
            .map(|pw| linear_trace(ctx, basis, &ctx.mul(alpha, pw)) as u32)
            .collect();
        Self {
            period: ctx.group_order(),
            repr: TraceRepr::Table(table),
        }
    }

    /// `y_m` for any absolute index `m`; the exponent is reduced mod `q - 1`.
    pub fn y(&self, m: u128) -> u64 {
        let e = (m % u128::from(self.period)) as u64;
        match &self.repr {
            TraceRepr::Table(t) => u64::from(t[e as usize]),
            TraceRepr::Direct {
                ctx,
                basis,
                alpha,
                beta,
            } => {
                let g = ctx.mul(alpha, &ctx.pow_u(beta, u128::from(e)));
                linear_trace(ctx, basis, &g)
            }
        }
    }
}

fn linear_trace(ctx: &FieldCtx, basis: &[u64], e: &FieldElement) -> u64 {
    let p = ctx.p();
    e.coeffs().iter().zip(basis).fold(0, |acc, (&c, &b)| (acc + c * b) % p)
}

/// Runs the recursion `y_{n+k} = a_{k-1} y_{n+k-1} + ... + a_0 y_n mod p`.
pub fn lfsr_seq(ctx: &FieldCtx, a_coeffs: &[u64], y_init: &[u64], count: usize) -> Result<Vec<u64>> {
    let (p, k) = (ctx.p(), ctx.k());
    if a_coeffs.len() != k || y_init.len() != k {
        return Err(Error::InvalidParams(format!(
            "expected {k} recurrence coefficients and {k} initial values"
        )));
    }
    if y_init.iter().all(|&y| y % p == 0) {
        return Err(Error::AllZeroInit);
    }
    let mut seq: Vec<u64> = y_init.iter().map(|&y| y % p).collect();
    while seq.len() < count {
        let n = seq.len() - k;
        let next = (0..k).fold(0, |acc, i| (acc + a_coeffs[i] % p * seq[n + i]) % p);
        seq.push(next);
    }
    seq.truncate(count);
    Ok(seq)
}

/// Streaming `y_n = Tr(α β^n)`, one field multiplication per step.
pub struct TraceIter<'a> {
    ctx: &'a FieldCtx,
    basis: Vec<u64>,
    beta: FieldElement,
    current: FieldElement,
}

impl<'a> TraceIter<'a> {
    pub fn new(params: &GeneratorParams<'a>, n_from: u128) -> Result<Self> {
        let ctx = params.ctx;
        let start = ctx.pow_u(&params.beta, n_from % u128::from(ctx.group_order()));
        Ok(Self {
            ctx,
            basis: ctx.trace_basis()?,
            beta: params.beta.clone(),
            current: ctx.mul(&params.alpha, &start),
        })
    }
}

impl Iterator for TraceIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let y = linear_trace(self.ctx, &self.basis, &self.current);
        self.current = self.ctx.mul(&self.current, &self.beta);
        Some(y)
    }
}

/// `y_{n_from}, ..., y_{n_from + count - 1}` with `y_n = Tr(α β^n)`.
pub fn trace_seq(params: &GeneratorParams<'_>, n_from: u128, count: usize) -> Result<Vec<u64>> {
    Ok(TraceIter::new(params, n_from)?.take(count).collect())
}

/// Finds `α` with `Tr(α β^n) = y_init[n]` for `n < k` by solving the
/// `k × k` system over F_p in the coefficients of `α`.
pub fn lfsr_to_alpha(ctx: &FieldCtx, beta: &FieldElement, y_init: &[u64]) -> Result<FieldElement> {
    let (p, k) = (ctx.p(), ctx.k());
    if y_init.len() != k {
        return Err(Error::InvalidParams(format!("expected {k} initial values")));
    }
    if y_init.iter().all(|&y| y % p == 0) {
        return Err(Error::AllZeroInit);
    }
    let basis = ctx.trace_basis()?;
    // row n: Tr(x^t β^n) for t < k, augmented with y_n
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(k);
    let mut beta_pow = ctx.one();
    for &y in y_init {
        let mut row: Vec<u64> = (0..k)
            .map(|t| linear_trace(ctx, &basis, &ctx.mul(&ctx.monomial(t), &beta_pow)))
            .collect();
        row.push(y % p);
        rows.push(row);
        beta_pow = ctx.mul(&beta_pow, beta);
    }
    let solution = solve_mod_p(rows, p)
        .ok_or_else(|| Error::Internal("singular trace system; β is not a primitive root".into()))?;
    let coeffs: Vec<i64> = solution.iter().map(|&c| c as i64).collect();
    ctx.element(&coeffs)
}

/// Gauss–Jordan elimination on an augmented `k × (k+1)` system over F_p.
fn solve_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> Option<Vec<u64>> {
    let k = rows.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| rows[r][col] != 0)?;
        rows.swap(col, pivot);
        let inv = mod_inv(rows[col][col], p);
        for v in rows[col].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v = (*v + p - factor * pv % p) % p;
                }
            }
        }
    }
    Some(rows.into_iter().map(|r| r[k]).collect())
}

/// Digital multistep value `x_n = Σ_{j=1}^{k} y_{kn+j-1} p^{-j}`.
pub fn multistep_x(params: &GeneratorParams<'_>, n: u128) -> Result<Ratio<u64>> {
    let ctx = params.ctx;
    let k = ctx.k() as u128;
    let digits = trace_seq(params, k * n, ctx.k())?;
    Ok(Ratio::new(digits_to_numerator(&digits, ctx.p()), ctx.q()))
}

/// Numerator over `p^k` of the base-`p` fraction `0.d_1 d_2 ... d_k`.
pub fn digits_to_numerator(digits: &[u64], p: u64) -> u64 {
    digits.iter().fold(0, |acc, &d| acc * p + d)
}

/// An s-dimensional point with coordinates `Σ_j y_j p^{-j}` stored as
/// base-`p` digits, one row of `k` digits per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrnPoint {
    base: u64,
    digits: Vec<Vec<u64>>,
}

impl PrnPoint {
    pub fn new(base: u64, digits: Vec<Vec<u64>>) -> Self {
        Self { base, digits }
    }

    pub fn dim(&self) -> usize {
        self.digits.len()
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `s × m` digit matrix; row `i` holds the digits of coordinate `i`.
    pub fn digit_matrix(&self) -> &[Vec<u64>] {
        &self.digits
    }

    /// Common denominator `base^m`.
    pub fn denominator(&self) -> u64 {
        let m = self.digits.first().map_or(0, Vec::len);
        self.base.pow(m as u32)
    }

    pub fn numerators(&self) -> Vec<u64> {
        self.digits
            .iter()
            .map(|row| digits_to_numerator(row, self.base))
            .collect()
    }

    pub fn coords(&self) -> Vec<Ratio<u64>> {
        let den = self.denominator();
        self.numerators().into_iter().map(|n| Ratio::new(n, den)).collect()
    }
}

/// The points `(x_{b1 n + b2}, ..., x_{b1 n + b2 + s - 1})` for `n < count`.
/// Digit `j` of coordinate `i` of point `n` is `y` at index
/// `k((b1 n + i) + b2) + j - 1`.
pub fn theorem1_points(params: &GeneratorParams<'_>, count: usize) -> Result<Vec<PrnPoint>> {
    let source = params.trace_source()?;
    Ok(shifted_points(params, &source, count))
}

/// As [`theorem1_points`] with a prebuilt trace source.
pub fn shifted_points(params: &GeneratorParams<'_>, source: &TraceSource, count: usize) -> Vec<PrnPoint> {
    let ctx = params.ctx;
    let k = ctx.k() as u128;
    let (b1, b2) = (u128::from(params.b1), u128::from(params.b2));
    (0..count as u128)
        .map(|n| {
            let digits = (0..params.s as u128)
                .map(|i| {
                    let start = k * (b1 * n + i + b2);
                    (0..k).map(|j| source.y(start + j)).collect()
                })
                .collect();
            PrnPoint::new(ctx.p(), digits)
        })
        .collect()
}
