//! The r-dimensional multisequence: `r` trace sequences interleaved through
//! the tilde index map, and its `s_1 × ... × s_r` block point sets.

use std::collections::HashSet;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::seqgen::{digits_to_numerator, PrnPoint, TraceSource};

/// A lattice point `(n_1, ..., n_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeIndex(pub Vec<u64>);

impl LatticeIndex {
    pub fn rank(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Debug)]
pub struct MultiseqParams<'a> {
    ctx: &'a FieldCtx,
    s: usize,
    block_dims: Vec<usize>,
    alphas: Vec<FieldElement>,
    betas: Vec<FieldElement>,
}

impl<'a> MultiseqParams<'a> {
    /// `r` is the number of `(α_i, β_i)` pairs. Every `β_i` must be
    /// primitive, `r ≥ 2`, and `s_1 ⋯ s_r ≤ s`.
    pub fn new(
        ctx: &'a FieldCtx,
        s: usize,
        block_dims: Vec<usize>,
        alphas: Vec<FieldElement>,
        betas: Vec<FieldElement>,
    ) -> Result<Self> {
        let r = alphas.len();
        if r < 2 || betas.len() != r || block_dims.len() != r {
            return Err(Error::InvalidParams(format!(
                "need r ≥ 2 with matching lengths, got {} alphas, {} betas, {} block dims",
                r,
                betas.len(),
                block_dims.len()
            )));
        }
        if s == 0 || block_dims.iter().any(|&d| d == 0 || d > s) {
            return Err(Error::InvalidParams(format!(
                "block dims {block_dims:?} must lie in [1, {s}]"
            )));
        }
        let s0: usize = block_dims.iter().product();
        if s0 > s {
            return Err(Error::InvalidParams(format!(
                "block size {s0} exceeds the bound s = {s}"
            )));
        }
        if betas.iter().any(|b| !ctx.is_primitive(b)) {
            return Err(Error::NotPrimitive);
        }
        Ok(Self {
            ctx,
            s,
            block_dims,
            alphas,
            betas,
        })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn r(&self) -> usize {
        self.alphas.len()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Dimension `s_0 = s_1 ⋯ s_r` of a block point.
    pub fn block_size(&self) -> usize {
        self.block_dims.iter().product()
    }

    pub fn alphas(&self) -> &[FieldElement] {
        &self.alphas
    }

    pub fn betas(&self) -> &[FieldElement] {
        &self.betas
    }

    pub fn is_degenerate(&self) -> bool {
        self.alphas.iter().all(FieldElement::is_zero)
    }
}

/// Exponent offset `d_{w,i}`: `w - 1` below the diagonal index, `w - 2` above.
pub fn d_offset(w: usize, i: usize, r: usize) -> Result<u32> {
    if w == i {
        return Err(Error::DiagonalIndex(w));
    }
    if !(1..=r).contains(&w) || !(1..=r).contains(&i) {
        return Err(Error::InvalidParams(format!("indices ({w}, {i}) outside [1, {r}]")));
    }
    Ok(if w < i { w as u32 - 1 } else { w as u32 - 2 })
}

/// `ñ_l = Σ_{w ≠ l} n_w s^{d_{w,l}} mod s^{r-1}` with 1-based `l`.
pub fn tilde(n: &LatticeIndex, l: usize, s: usize) -> u64 {
    let r = n.rank();
    let modulus = (s as u128).pow(r as u32 - 1);
    let mut acc = 0u128;
    for w in 1..=r {
        if w == l {
            continue;
        }
        let d = if w < l { w - 1 } else { w - 2 };
        let term = (u128::from(n.0[w - 1]) % modulus) * (s as u128).pow(d as u32);
        acc = (acc + term) % modulus;
    }
    acc as u64
}

/// Exponent `k(n_i + s ñ_i) + j - 1` of the `i`-th trace term (1-based `i`, `j`).
fn exponent(k: usize, s: usize, n: &LatticeIndex, i: usize, j: usize) -> u128 {
    let ni = u128::from(n.0[i - 1]);
    let nt = u128::from(tilde(n, i, s));
    k as u128 * (ni + s as u128 * nt) + j as u128 - 1
}

/// `y(n, j) = Σ_i Tr(α_i β_i^{k(n_i + s ñ_i) + j - 1}) mod p`, evaluated
/// directly by exponentiation.
pub fn y_value(params: &MultiseqParams<'_>, n: &LatticeIndex, j: usize) -> Result<u64> {
    let ctx = params.ctx;
    check_rank(params, n)?;
    if !(1..=ctx.k()).contains(&j) {
        return Err(Error::InvalidParams(format!(
            "digit index {j} outside [1, {}]",
            ctx.k()
        )));
    }
    let order = u128::from(ctx.group_order());
    let mut acc = 0;
    for i in 1..=params.r() {
        let e = exponent(ctx.k(), params.s, n, i, j) % order;
        let g = ctx.mul(&params.alphas[i - 1], &ctx.pow_u(&params.betas[i - 1], e));
        acc = (acc + ctx.trace(&g)?) % ctx.p();
    }
    Ok(acc)
}

/// `x_n = Σ_{j=1}^{k} y(n, j) p^{-j}`.
pub fn x_multiseq(params: &MultiseqParams<'_>, n: &LatticeIndex) -> Result<Ratio<u64>> {
    let ctx = params.ctx;
    let digits = (1..=ctx.k())
        .map(|j| y_value(params, n, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ratio::new(digits_to_numerator(&digits, ctx.p()), ctx.q()))
}

fn check_rank(params: &MultiseqParams<'_>, n: &LatticeIndex) -> Result<()> {
    if n.rank() != params.r() {
        return Err(Error::InvalidParams(format!(
            "lattice index of rank {} for r = {}",
            n.rank(),
            params.r()
        )));
    }
    Ok(())
}

/// Table-driven evaluator for bulk block generation.
pub struct MultiseqGen<'p, 'a> {
    params: &'p MultiseqParams<'a>,
    sources: Vec<TraceSource>,
}

impl<'p, 'a> MultiseqGen<'p, 'a> {
    pub fn new(params: &'p MultiseqParams<'a>) -> Result<Self> {
        let sources = params
            .alphas
            .iter()
            .zip(&params.betas)
            .map(|(a, b)| TraceSource::new(params.ctx, a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, sources })
    }

    /// Base-`p` digits `y(n, 1), ..., y(n, k)` of `x_n`.
    pub fn digits(&self, n: &LatticeIndex) -> Vec<u64> {
        let ctx = self.params.ctx;
        let (k, s, p) = (ctx.k(), self.params.s, ctx.p());
        (1..=k)
            .map(|j| {
                self.sources
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, src)| (acc + src.y(exponent(k, s, n, i + 1, j))) % p)
            })
            .collect()
    }

    /// Block point at `n`: coordinates `x_{n+i}` for `0 ≤ i_w < s_w`, with
    /// `i` in lexicographic order (`i_1` slowest).
    pub fn block_point(&self, n: &LatticeIndex) -> PrnPoint {
        let rows = box_indices(self.params.block_dims())
            .map(|i| {
                let shifted = LatticeIndex(n.0.iter().zip(&i).map(|(&a, &b)| a + b as u64).collect());
                self.digits(&shifted)
            })
            .collect();
        PrnPoint::new(self.params.ctx.p(), rows)
    }
}

/// All `i` with `0 ≤ i_w < dims_w`, lexicographic with the first
/// component slowest.
pub fn box_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dims.len()];
        for w in (0..dims.len()).rev() {
            idx[w] = flat % dims[w];
            flat /= dims[w];
        }
        idx
    })
}

/// Whether the box `N_1 × ... × N_r` exceeds the `N_1 ⋯ N_r ≤ q` range
/// covered by the bound.
pub fn box_exceeds_field(ctx: &FieldCtx, box_dims: &[usize]) -> bool {
    box_dims
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .is_none_or(|v| v > ctx.q())
}

/// One block point per lattice index in `[0, N_1) × ... × [0, N_r)`, in
/// lexicographic order of the index (`n_1` slowest).
pub fn block_points(params: &MultiseqParams<'_>, box_dims: &[usize]) -> Result<Vec<(LatticeIndex, PrnPoint)>> {
    if box_dims.len() != params.r() || box_dims.contains(&0) {
        return Err(Error::InvalidParams(format!(
            "box {box_dims:?} must have r = {} positive sides",
            params.r()
        )));
    }
    let gen = MultiseqGen::new(params)?;
    Ok(box_indices(box_dims)
        .map(|idx| {
            let n = LatticeIndex(idx.into_iter().map(|v| v as u64).collect());
            let pt = gen.block_point(&n);
            (n, pt)
        })
        .collect())
}

/// Whether `{k(s·tilde(n+i, l) + i_l) + j : 0 ≤ j < k, 0 ≤ i_ν < s_ν}` has
/// `k·s_1 ⋯ s_r` elements for every `l`.
pub fn lemma5_check(s: usize, block_dims: &[usize], n: &LatticeIndex, k: usize) -> bool {
    let r = block_dims.len();
    let expected = k * block_dims.iter().product::<usize>();
    let offsets: Vec<Vec<usize>> = box_indices(block_dims).collect();
    (1..=r).all(|l| {
        let mut seen = HashSet::with_capacity(expected);
        for i in &offsets {
            let shifted = LatticeIndex(n.0.iter().zip(i).map(|(&a, &b)| a + b as u64).collect());
            let base = k as u128 * (s as u128 * u128::from(tilde(&shifted, l, s)) + i[l - 1] as u128);
            for j in 0..k {
                seen.insert(base + j as u128);
            }
        }
        seen.len() == expected
    })
}
