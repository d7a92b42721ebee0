//! Explicit analytic right-hand sides: the totient inequality, the
//! single-sequence and multisequence discrepancy bounds with their
//! constants, and the averaged bound used as the scan reference curve.
//!
//! `ln^a x` always means `(ln x)^a`.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::euler_phi;

/// Outcome of the totient inequality `kT/φ(q-1) ≤ 40 ln 3T ln(3 ln 3T)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma6Outcome {
    pub lhs_num: u128,
    pub lhs_den: u128,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// False when `q ≤ 3000` or `T ∉ [1, 4q]`; the values are still reported.
    pub in_range: bool,
}

pub fn lemma6_rhs(t: u64) -> f64 {
    let l = (3.0 * t as f64).ln();
    40.0 * l * (3.0 * l).ln()
}

/// Evaluates both sides. Outside the precondition the result is flagged
/// rather than asserted.
pub fn lemma6_check(q: u64, k: u32, t: u64) -> Result<Lemma6Outcome> {
    if q < 2 || t == 0 {
        return Err(Error::PreconditionOutOfRange(format!("q = {q}, T = {t}")));
    }
    let lhs = Ratio::new(u128::from(k) * u128::from(t), u128::from(euler_phi(q - 1)));
    let lhs_f = *lhs.numer() as f64 / *lhs.denom() as f64;
    let rhs = lemma6_rhs(t);
    Ok(Lemma6Outcome {
        lhs_num: *lhs.numer(),
        lhs_den: *lhs.denom(),
        lhs: lhs_f,
        rhs,
        holds: lhs_f <= rhs,
        in_range: q > 3000 && t <= 4 * q,
    })
}

/// `c_1 = s p + 3^6 (s+2)^{1/2} 2.5^s b_1^{1.5} b_2 ln^2 3b_1 ln^2 3b_2`.
pub fn c1(p: u64, s: usize, b1: u64, b2: u64) -> f64 {
    let (s_f, b1f, b2f) = (s as f64, b1 as f64, b2 as f64);
    s_f * p as f64
        + 729.0
            * (s_f + 2.0).sqrt()
            * 2.5f64.powi(s as i32)
            * b1f.powf(1.5)
            * b2f
            * (3.0 * b1f).ln().powi(2)
            * (3.0 * b2f).ln().powi(2)
}

/// `N^{-1/2} ln^{s+2.5}(6N) ln^{2.5}(3 ln 6N)`, the shape of the
/// single-sequence bound without `ε^{-1} c_1`.
pub fn theorem1_shape(s: usize, n: u64) -> f64 {
    let l = (6.0 * n as f64).ln();
    (n as f64).powf(-0.5) * l.powf(s as f64 + 2.5) * (3.0 * l).ln().powf(2.5)
}

/// `ε^{-1} c_1 N^{-1/2} ln^{s+2.5}(6N) ln^{2.5}(3 ln 6N)`.
pub fn theorem1_rhs(p: u64, s: usize, b1: u64, b2: u64, n: u64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::PreconditionOutOfRange("N must be at least 1".into()));
    }
    Ok(c1(p, s, b1, b2) / epsilon * theorem1_shape(s, n))
}

/// `c_2 = s_0 p + 3^{5r} 2.5^s s^{r^2 - r/2} s_1 ⋯ s_r ln^2 3s_1 ⋯ ln^2 3s_r`.
pub fn c2(p: u64, r: usize, s: usize, dims: &[usize]) -> Result<f64> {
    check_dims(r, s, dims)?;
    let s0: usize = dims.iter().product();
    let rf = r as f64;
    let dim_factor: f64 = dims.iter().map(|&d| d as f64 * (3.0 * d as f64).ln().powi(2)).product();
    Ok(s0 as f64 * p as f64
        + 3f64.powi(5 * r as i32) * 2.5f64.powi(s as i32) * (s as f64).powf(rf * rf - rf / 2.0) * dim_factor)
}

/// `(N_1⋯N_r)^{-1/2} ln^{s_0+2.5r}(2^{r+1} N_1⋯N_r) ln^{2.5r}(3 ln 6N_1⋯N_r)`.
pub fn theorem2_shape(r: usize, s0: usize, n_vec: &[u64]) -> f64 {
    let prod: f64 = n_vec.iter().map(|&n| n as f64).product();
    let rf = r as f64;
    prod.powf(-0.5)
        * (2f64.powi(r as i32 + 1) * prod).ln().powf(s0 as f64 + 2.5 * rf)
        * (3.0 * (6.0 * prod).ln()).ln().powf(2.5 * rf)
}

/// `ε^{-1} c_2` times [`theorem2_shape`].
pub fn theorem2_rhs(p: u64, r: usize, s: usize, dims: &[usize], n_vec: &[u64], epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if n_vec.len() != r || n_vec.contains(&0) {
        return Err(Error::PreconditionOutOfRange(format!(
            "need r = {r} positive box sides, got {n_vec:?}"
        )));
    }
    let s0: usize = dims.iter().product();
    Ok(c2(p, r, s, dims)? / epsilon * theorem2_shape(r, s0, n_vec))
}

/// `3·40^{1/2}(s+2)^{1/2} 2.5^s b_1^{1/2} T^{1/2} ln^{s+1.5}(3T) ln^{1/2}(3 ln 3T)`.
pub fn eq23_avg_bound(b1: u64, s: usize, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::PreconditionOutOfRange("T must be at least 1".into()));
    }
    let l = (3.0 * t as f64).ln();
    Ok(3.0
        * 40f64.sqrt()
        * (s as f64 + 2.0).sqrt()
        * 2.5f64.powi(s as i32)
        * (b1 as f64).sqrt()
        * (t as f64).sqrt()
        * l.powf(s as f64 + 1.5)
        * (3.0 * l).ln().sqrt())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::PreconditionOutOfRange(format!("ε = {epsilon} not in (0, 1)")))
    }
}

fn check_dims(r: usize, s: usize, dims: &[usize]) -> Result<()> {
    if dims.len() != r || dims.iter().any(|&d| d == 0 || d > s) {
        return Err(Error::PreconditionOutOfRange(format!(
            "block dims {dims:?} must be r = {r} values in [1, {s}]"
        )));
    }
    Ok(())
}
