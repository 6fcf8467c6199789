//! Closed-form competitive-ratio bounds, evaluated to full f64 precision.
//!
//! Every evaluator is pure and deterministic. Lower bounds on competitive
//! ratios clamp at 1 (no algorithm beats the optimum), and branch
//! hypotheses are enforced as errors instead of silently extrapolating.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::{Error, Result};

/// Competitive ratio of query-wise LRU on a size-`k` cache.
pub fn lru_upper(k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParameter("cache size must be >= 1".into()));
    }
    Ok(k)
}

/// Best competitive ratio any deterministic online algorithm can reach:
/// `k - l + 1`.
pub fn det_lower(k: usize, l: usize) -> Result<usize> {
    if l == 0 || k < l {
        return Err(Error::InvalidParameter(format!("need k >= l >= 1, got k={k} l={l}")));
    }
    Ok(k - l + 1)
}

/// Expected misses of the marking algorithm in one phase with `m` new
/// pages: `m + m * sum_{j=m+1..=k} 1/j`, evaluated exactly in rationals and
/// rounded once to f64.
pub fn marking_phase_miss_bound(m: usize, k: usize) -> Result<f64> {
    if m == 0 || m > k {
        return Err(Error::InvalidParameter(format!("need 1 <= m <= k, got m={m} k={k}")));
    }
    let mut sum = BigRational::from_integer(BigInt::from(0));
    for j in m + 1..=k {
        sum += BigRational::new(BigInt::one(), BigInt::from(j));
    }
    let value = BigRational::from_integer(BigInt::from(m)) * (BigRational::one() + sum);
    Ok(rational_to_f64(&value))
}

/// Rounds a non-negative rational to the nearest f64 via one scaled
/// integer division, so small values like 11/6 land on the same double as
/// the literal quotient.
fn rational_to_f64(x: &BigRational) -> f64 {
    let scaled: BigInt = ((x.numer() << 64u32) + x.denom() / 2) / x.denom();
    scaled.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(64)
}

/// Upper bound for the marking algorithm in (h,k)-paging with bundles of
/// length `l`: `2l (ln s - ln ln s + 1/2)` with `s = k/(k-h)` when
/// `s >= e`, else `2l`.
pub fn marking_hk_upper(k: usize, h: usize, l: usize) -> Result<f64> {
    check_hk(k, h, l)?;
    let s = k as f64 / (k - h) as f64;
    let l = l as f64;
    if s >= std::f64::consts::E {
        Ok(2.0 * l * (s.ln() - s.ln().ln() + 0.5))
    } else {
        Ok(2.0 * l)
    }
}

/// Lower bound on the competitive ratio of any randomized algorithm in
/// (h,k)-paging: `l ln a - l ln ln a - 2l + 1` with
/// `a = (k+1)/(k-h+l+1)`, clamped at 1. Requires `k/(k-h) >= e` and
/// `a > 1`.
pub fn randomized_lower(k: usize, h: usize, l: usize) -> Result<f64> {
    check_hk(k, h, l)?;
    let s = k as f64 / (k - h) as f64;
    if s < std::f64::consts::E {
        return Err(Error::NotApplicable(format!(
            "randomized lower bound needs k/(k-h) >= e, got {s:.4}"
        )));
    }
    let a = (k + 1) as f64 / (k - h + l + 1) as f64;
    if a <= 1.0 {
        return Err(Error::NotApplicable(format!(
            "ln ln argument (k+1)/(k-h+l+1) = {a:.4} must exceed 1"
        )));
    }
    let l = l as f64;
    let raw = l * a.ln() - l * a.ln().ln() - 2.0 * l + 1.0;
    Ok(raw.max(1.0))
}

/// Envelope of the per-phase ratio `T(m) = (m + m ln(k/m)) / ((k-h+m)/l)`:
/// `l (ln s - ln ln s + 1/2)` when `s = k/(k-h) >= e`, else `l`.
pub fn phase_ratio_envelope(k: usize, h: usize, l: usize) -> Result<f64> {
    Ok(marking_hk_upper(k, h, l)? / 2.0)
}

/// Floor of the maximized segment ratio term
/// `f(m) = m/(c+m) ln(b/(c+m))` with `b = k+1`, `c = k-h+l+1`:
/// `ln(b/c) - ln ln(b/c) - 2`. Same hypotheses as [`randomized_lower`].
pub fn segment_ratio_floor(k: usize, h: usize, l: usize) -> Result<f64> {
    check_hk(k, h, l)?;
    let s = k as f64 / (k - h) as f64;
    if s < std::f64::consts::E {
        return Err(Error::NotApplicable(format!(
            "segment floor needs k/(k-h) >= e, got {s:.4}"
        )));
    }
    let a = (k + 1) as f64 / (k - h + l + 1) as f64;
    if a <= 1.0 {
        return Err(Error::NotApplicable(format!(
            "ln ln argument (k+1)/(k-h+l+1) = {a:.4} must exceed 1"
        )));
    }
    Ok(a.ln() - a.ln().ln() - 2.0)
}

/// Deterministic distributed bound with `l+1` caches: `l^2 + l`.
pub fn distributed_det_upper(l: usize) -> Result<usize> {
    if l == 0 {
        return Err(Error::InvalidParameter("query length must be >= 1".into()));
    }
    Ok(l * l + l)
}

/// Randomized distributed bound with `l+1` caches:
/// `2l (ln(2l+1) - ln ln l + 1/2)`, defined for `l >= 2`.
pub fn distributed_rand_upper(l: usize) -> Result<f64> {
    if l < 2 {
        return Err(Error::NotApplicable(
            "randomized distributed bound needs l >= 2 (ln ln 1 is undefined)".into(),
        ));
    }
    let lf = l as f64;
    Ok(2.0 * lf * ((2.0 * lf + 1.0).ln() - lf.ln().ln() + 0.5))
}

/// Size bound for a minimal r-dense family:
/// `(C(N,r)/C(k,r)) (1 + ln C(k,r))`, with natural log.
pub fn dense_family_size_bound(n: u32, k: usize, r: usize) -> Result<f64> {
    if !(r >= 1 && r < k && (k as u64) < n as u64) {
        return Err(Error::InvalidParameter(format!(
            "dense family bound needs 1 <= r < k < N, got r={r} k={k} N={n}"
        )));
    }
    // C(N,r)/C(k,r) as a product of exact small ratios
    let mut ratio = 1.0f64;
    for i in 0..r {
        ratio *= (n as f64 - i as f64) / (k as f64 - i as f64);
    }
    let mut binom_kr = 1.0f64;
    for i in 0..r {
        binom_kr *= (k as f64 - i as f64) / (i as f64 + 1.0);
    }
    Ok(ratio * (1.0 + binom_kr.ln()))
}

/// Generalized distributed bound for a virtual capacity `k*` over caches of
/// size `k`: the (h,k) marking bound with roles `k <- k*`, `h <- k`.
pub fn general_distributed_upper(kstar: usize, k: usize, l: usize) -> Result<f64> {
    if !(k < kstar) {
        return Err(Error::InvalidParameter(format!(
            "need k < k*, got k={k} k*={kstar}"
        )));
    }
    marking_hk_upper(kstar, k, l)
}

fn check_hk(k: usize, h: usize, l: usize) -> Result<()> {
    if l == 0 || l > h {
        return Err(Error::InvalidParameter(format!("need 1 <= l <= h, got l={l} h={h}")));
    }
    if h > k {
        return Err(Error::InvalidParameter(format!("need h <= k, got h={h} k={k}")));
    }
    if h == k {
        return Err(Error::NotApplicable(
            "h = k makes s = k/(k-h) unbounded; use the classic marking bound".into(),
        ));
    }
    Ok(())
}
