//! Triangle numbers, tetrahedral numbers, and binomial coefficients.
//!
//! These are the counting primitives behind every index map in the crate:
//! `triangle(n)` counts unordered pairs drawn with repetition from `n`
//! items, `tetrahedral(n)` counts such triples, and `binomial` covers the
//! general case. Public entry points check for overflow; the `_u128`
//! variants are for internal hot paths whose inputs were already bounded by
//! a successful checked computation.

use crate::error::{Error, Result};
use alloc::format;

/// The `n`-th triangle number `n(n+1)/2`.
pub fn triangle(n: usize) -> Result<usize> {
    let t = tri_u128(n as u128);
    usize::try_from(t).map_err(|_| Error::Overflow(format!("triangle({n}) exceeds usize")))
}

/// The `n`-th tetrahedral number `n(n+1)(n+2)/6`.
pub fn tetrahedral(n: usize) -> Result<usize> {
    let n = n as u128;
    let prod = n
        .checked_mul(n + 1)
        .and_then(|p| p.checked_mul(n + 2))
        .ok_or_else(|| Error::Overflow(format!("tetrahedral({n}) exceeds usize")))?;
    usize::try_from(prod / 6)
        .map_err(|_| Error::Overflow(format!("tetrahedral({n}) exceeds usize")))
}

/// The binomial coefficient `C(n, k)`, exactly. Returns 0 when `k > n`.
pub fn binomial(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // The running value after step i is C(n - k + i, i), so the division
        // below is exact.
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(|| Error::Overflow(format!("binomial({n}, {k}) exceeds usize")))?
            / i as u128;
    }
    usize::try_from(acc).map_err(|_| Error::Overflow(format!("binomial({n}, {k}) exceeds usize")))
}

/// `n(n+1)/2` in u128. Exact for any `n` up to 2^63.
#[inline]
pub(crate) fn tri_u128(n: u128) -> u128 {
    n * (n + 1) / 2
}

/// `n(n+1)(n+2)/6` in u128. Callers guarantee the result fits in usize,
/// which bounds `n` far below the u128 overflow threshold.
#[inline]
pub(crate) fn tet_u128(n: u128) -> u128 {
    n * (n + 1) * (n + 2) / 6
}
