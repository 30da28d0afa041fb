//! Gauss-Legendre and generalised Gauss-Laguerre rules.

use std::f64::consts::PI;

use super::eigen::eig_sym_tridiag;
use super::poly::{laguerre, legendre_unchecked};
use crate::error::{Error, Result};

const MAX_NEWTON: usize = 100;

/// Weight function of a Gauss rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Weight 1 on `[-1, 1]`.
    Legendre,
    /// Weight `x^alpha e^{-x}` on `[0, inf)`, `alpha` in {0, 1, 2}.
    Laguerre { alpha: u32 },
}

/// Nodes and positive weights of an n-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    pub kind: WeightKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule: `sum_i w_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Affine image of a Legendre rule on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(self.kind, WeightKind::Legendre);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = self.nodes.iter().map(|&x| mid + half * x).collect();
        let weights = self.weights.iter().map(|&w| half * w).collect();
        (nodes, weights)
    }
}

/// Build the n-point Gauss rule for `kind`.
pub fn gauss_rule(kind: WeightKind, n: usize) -> Result<QuadratureRule1D> {
    if n == 0 {
        return Err(Error::Contract("Gauss rule needs at least one point".into()));
    }
    match kind {
        WeightKind::Legendre => gauss_legendre(n),
        WeightKind::Laguerre { alpha } => {
            if alpha > 2 {
                return Err(Error::Domain(format!("Laguerre weight alpha must be 0, 1 or 2, got {alpha}")));
            }
            gauss_laguerre(n, alpha)
        }
    }
}

/// Convenience wrapper for Gauss-Legendre rules.
pub fn gauss_legendre_rule(n: usize) -> QuadratureRule1D {
    gauss_rule(WeightKind::Legendre, n).expect("Gauss-Legendre construction")
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let p = legendre_unchecked(n, x);
    let pm1 = legendre_unchecked(n - 1, x);
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

fn gauss_legendre(n: usize) -> Result<QuadratureRule1D> {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    if n == 1 {
        return Ok(QuadratureRule1D { kind: WeightKind::Legendre, nodes, weights: vec![2.0] });
    }
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, d) = legendre_with_deriv(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("Gauss-Legendre Newton iteration failed for order {n}")));
        }
        let (_, d) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule1D { kind: WeightKind::Legendre, nodes, weights })
}

fn gauss_laguerre(n: usize, alpha: u32) -> Result<QuadratureRule1D> {
    let a = alpha as f64;
    // Initial guesses: eigenvalues of the Jacobi matrix of the recurrence.
    let guesses = if n == 1 {
        vec![1.0 + a]
    } else {
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + 1.0 + a).collect();
        let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
        eig_sym_tridiag(&diag, &off, false)?.values
    };
    // ln[Gamma(n + a + 1) / n!]
    let ln_ratio: f64 = (n + 1..=n + alpha as usize).map(|m| (m as f64).ln()).sum();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut x in guesses {
        let mut converged = false;
        let mut last = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let p = laguerre(n, a, x);
            let pm1 = laguerre(n - 1, a, x);
            let d = (n as f64 * p - (n as f64 + a) * pm1) / x;
            let dx = p / d;
            x -= dx;
            // stop at the roundoff floor: tiny and no longer shrinking
            if dx.abs() <= 4.0 * f64::EPSILON * x.abs() || (dx.abs() <= 1e-13 * x.abs() && dx.abs() >= 0.5 * last) {
                converged = true;
                break;
            }
            last = dx.abs();
        }
        if !converged || !x.is_finite() || x <= 0.0 {
            return Err(Error::Numerical(format!(
                "Gauss-Laguerre Newton iteration failed for order {n} (alpha {alpha})"
            )));
        }
        let pm1 = laguerre(n - 1, a, x);
        let ln_w = ln_ratio + x.ln() - 2.0 * ((n as f64 + a).ln() + pm1.abs().ln());
        nodes.push(x);
        weights.push(ln_w.exp());
    }
    Ok(QuadratureRule1D { kind: WeightKind::Laguerre { alpha }, nodes, weights })
}
