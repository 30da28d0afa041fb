//! Generalised Laguerre and Legendre polynomials by three-term recurrence.

use crate::error::{Error, Result};

/// Generalised Laguerre polynomial `L_n^(alpha)(x)`.
///
/// Weight parameters used by the solvers are 0, 1 and 2; derivatives reach
/// higher `alpha` through `d/dx L_n^(a) = -L_{n-1}^(a+1)`, so any
/// `alpha > -1` is accepted here.
pub fn laguerre_gen(n: i64, alpha: f64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Domain(format!("Laguerre order must be >= 0, got {n}")));
    }
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("Laguerre parameter must be > -1, got {alpha}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Laguerre argument must be >= 0, got {x}")));
    }
    Ok(laguerre(n as usize, alpha, x))
}

/// First derivative of `L_n^(alpha)` at `x`.
pub fn laguerre_gen_deriv(n: i64, alpha: f64, x: f64) -> Result<f64> {
    if n == 0 {
        laguerre_gen(0, alpha, x).map(|_| 0.0)
    } else {
        laguerre_gen(n - 1, alpha + 1.0, x).map(|v| -v)
    }
}

#[inline]
pub(crate) fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fill `out[k] = L_k^(alpha)(x)` for `k = 0..out.len()`.
#[inline]
pub(crate) fn laguerre_all(alpha: f64, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 1.0 + alpha - x;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
    }
}

/// Legendre polynomial `P_k(t)` (Bonnet recurrence).
pub fn legendre(k: i64, t: f64) -> Result<f64> {
    if k < 0 {
        return Err(Error::Domain(format!("Legendre order must be >= 0, got {k}")));
    }
    if !(t.abs() <= 1.0) {
        return Err(Error::Domain(format!("Legendre argument must lie in [-1, 1], got {t}")));
    }
    Ok(legendre_unchecked(k as usize, t))
}

/// Derivative `P_k'(t)`, via `P'_{k+1} = P'_{k-1} + (2k+1) P_k`.
pub fn legendre_deriv(k: i64, t: f64) -> Result<f64> {
    legendre(k, t)?;
    let k = k as usize;
    let mut p = vec![0.0; k + 1];
    let mut d = vec![0.0; k + 1];
    legendre_all_with_deriv(t, &mut p, &mut d);
    Ok(d[k])
}

#[inline]
pub(crate) fn legendre_unchecked(k: usize, t: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * t * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fill `p[k] = P_k(t)`.
#[inline]
pub(crate) fn legendre_all(t: f64, p: &mut [f64]) {
    if p.is_empty() {
        return;
    }
    p[0] = 1.0;
    if p.len() > 1 {
        p[1] = t;
    }
    for j in 1..p.len().saturating_sub(1) {
        let jf = j as f64;
        p[j + 1] = ((2.0 * jf + 1.0) * t * p[j] - jf * p[j - 1]) / (jf + 1.0);
    }
}

/// Fill values and first derivatives.
pub(crate) fn legendre_all_with_deriv(t: f64, p: &mut [f64], d: &mut [f64]) {
    legendre_all(t, p);
    if d.is_empty() {
        return;
    }
    d[0] = 0.0;
    if d.len() > 1 {
        d[1] = 1.0;
    }
    for j in 1..d.len().saturating_sub(1) {
        d[j + 1] = d[j - 1] + (2.0 * j as f64 + 1.0) * p[j];
    }
}
