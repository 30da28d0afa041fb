//! Radial grids, tabulated radial fields and cubic-spline resampling.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre_rule, gauss_rule, WeightKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GridKind {
    /// Equally spaced nodes starting at r = 0, composite Simpson weights.
    Uniform,
    GaussLegendrePanel,
    /// Scaled Gauss-Laguerre nodes; weights are for plain `dr` integration.
    GaussLaguerre {
        alpha: u32,
    },
}

/// Radial nodes (bohr) with quadrature weights for `∫ f(r) dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: GridKind,
}

impl RadialGrid {
    /// `n_nodes` equally spaced nodes on `[0, r_max]`.
    pub fn uniform(r_max: f64, n_nodes: usize) -> Result<Self> {
        if n_nodes < 5 || !(r_max > 0.0) {
            return Err(Error::Contract(format!(
                "uniform grid needs >= 5 nodes and r_max > 0 (got {n_nodes}, {r_max})"
            )));
        }
        let h = r_max / (n_nodes - 1) as f64;
        let nodes = (0..n_nodes).map(|i| i as f64 * h).collect();
        Ok(Self { nodes, weights: simpson_weights(n_nodes, h), kind: GridKind::Uniform })
    }

    /// Gauss-Legendre panels between consecutive `boundaries`.
    pub fn gl_panels(boundaries: &[f64], points_per_panel: usize) -> Result<Self> {
        if boundaries.len() < 2 || boundaries.windows(2).any(|b| !(b[1] > b[0])) || boundaries[0] < 0.0 {
            return Err(Error::Contract("panel boundaries must be increasing and non-negative".into()));
        }
        let rule = gauss_legendre_rule(points_per_panel);
        let mut nodes = Vec::with_capacity((boundaries.len() - 1) * points_per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for b in boundaries.windows(2) {
            let (x, w) = rule.mapped(b[0], b[1]);
            nodes.extend(x);
            weights.extend(w);
        }
        Ok(Self { nodes, weights, kind: GridKind::GaussLegendrePanel })
    }

    /// Panels `[0, r_lo], [r_lo, q r_lo], ...` growing geometrically up to `r_hi`.
    pub fn geometric_panels(r_lo: f64, r_hi: f64, ratio: f64, points_per_panel: usize) -> Result<Self> {
        if !(r_lo > 0.0 && r_hi > r_lo && ratio > 1.0) {
            return Err(Error::Contract(format!(
                "geometric panels need 0 < r_lo < r_hi and ratio > 1 (got {r_lo}, {r_hi}, {ratio})"
            )));
        }
        let mut b = vec![0.0, r_lo];
        let mut r = r_lo;
        while r < r_hi {
            r = (r * ratio).min(r_hi);
            b.push(r);
        }
        Self::gl_panels(&b, points_per_panel)
    }

    /// n-point Gauss-Laguerre rule for `∫_0^∞ f(r) dr` with `r = x / scale`.
    pub fn gauss_laguerre(n: usize, alpha: u32, scale: f64) -> Result<Self> {
        let rule = gauss_rule(WeightKind::Laguerre { alpha }, n)?;
        let nodes = rule.nodes.iter().map(|x| x / scale).collect();
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| (w.ln() + x - alpha as f64 * x.ln()).exp() / scale)
            .collect();
        Ok(Self { nodes, weights, kind: GridKind::GaussLaguerre { alpha } })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }

    /// Node spacing of a uniform grid.
    pub fn spacing(&self) -> Option<f64> {
        (self.kind == GridKind::Uniform).then(|| self.nodes[1] - self.nodes[0])
    }

    /// `∫ f(r) dr`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    /// `∫ f(r) 4π r² dr`, the volume integral of a spherically symmetric field.
    pub fn radial_integral(&self, values: &[f64]) -> f64 {
        4.0 * PI * self.nodes.iter().zip(&self.weights).zip(values).map(|((r, w), f)| w * r * r * f).sum::<f64>()
    }
}

/// Composite Simpson weights, closing with a 3/8 rule on an odd number of intervals.
fn simpson_weights(n_nodes: usize, h: f64) -> Vec<f64> {
    let intervals = n_nodes - 1;
    let mut w = vec![0.0; n_nodes];
    let simpson_end = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    let mut i = 0;
    while i < simpson_end {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Real samples of a radial function on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "field has {} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite field sample at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn radial_integral(&self) -> f64 {
        self.grid.radial_integral(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn spline(&self) -> CubicSpline {
        CubicSpline::new(self.grid.nodes(), &self.values)
    }
}

/// Clamped cubic spline; endpoint slopes from five-point one-sided differences.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    uniform: Option<(f64, f64)>,
}

/// Derivative at `x0` of the interpolating polynomial through the points.
fn lagrange_slope(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    let n = xs.len();
    let mut d = 0.0;
    for j in 0..n {
        // d/dx of basis polynomial l_j at x0
        let mut denom = 1.0;
        for m in 0..n {
            if m != j {
                denom *= xs[j] - xs[m];
            }
        }
        let mut num = 0.0;
        for k in 0..n {
            if k == j {
                continue;
            }
            let mut prod = 1.0;
            for m in 0..n {
                if m != j && m != k {
                    prod *= x0 - xs[m];
                }
            }
            num += prod;
        }
        d += ys[j] * num / denom;
    }
    d
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 5 && y.len() == n, "spline needs >= 5 matching samples");
        let k = 5;
        let d0 = lagrange_slope(&x[..k], &y[..k], x[0]);
        let dn = lagrange_slope(&x[n - k..], &y[n - k..], x[n - 1]);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        b[0] = 2.0 * h[0];
        c[0] = h[0];
        r[0] = 6.0 * ((y[1] - y[0]) / h[0] - d0);
        for i in 1..n - 1 {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            r[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        a[n - 1] = h[n - 2];
        b[n - 1] = 2.0 * h[n - 2];
        r[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / h[n - 2]);
        for i in 1..n {
            let f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            r[i] -= f * r[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = r[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
        }
        let h0 = h[0];
        let uniform = h.iter().all(|&hi| (hi - h0).abs() <= 1e-12 * h0).then_some((x[0], h0));
        Self { x: x.to_vec(), y: y.to_vec(), m, uniform }
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    /// `∫ f(x, s(x), s'(x), s''(x)) dx` over the whole table, four Gauss points
    /// per interval (exact when `f` is a polynomial of degree ≤ 7 in x).
    pub fn integrate_with(&self, f: impl Fn(f64, f64, f64, f64) -> f64) -> f64 {
        const X: [f64; 2] = [0.339_981_043_584_856_26, 0.861_136_311_594_052_6];
        const W: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let mut total = 0.0;
        for w in self.x.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            let mut s = 0.0;
            for k in 0..2 {
                for sign in [-1.0, 1.0] {
                    let x = mid + sign * half * X[k];
                    let (v, d, dd) = self.eval_all(x).expect("node inside table");
                    s += W[k] * f(x, v, d, dd);
                }
            }
            total += half * s;
        }
        total
    }

    fn interval(&self, x: f64) -> usize {
        let n = self.x.len();
        match self.uniform {
            Some((x0, h)) => (((x - x0) / h).floor().max(0.0) as usize).min(n - 2),
            None => self.x.partition_point(|&xi| xi <= x).saturating_sub(1).min(n - 2),
        }
    }

    /// Value, first and second derivative; `None` outside the tabulated range.
    pub fn eval_all(&self, x: f64) -> Option<(f64, f64, f64)> {
        if !(x >= self.x[0] && x <= self.x_max()) {
            return None;
        }
        let i = self.interval(x);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - x) / h;
        let b = 1.0 - a;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let d =
            (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi + (3.0 * b * b - 1.0) / 6.0 * h * mj;
        Some((v, d, a * mi + b * mj))
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        self.eval_all(x).map(|t| t.0)
    }

    /// Value, treating the function as zero beyond the last node.
    pub fn eval_or_zero(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_integrates_constant_and_polynomials() {
        for n in [5usize, 6, 101, 1000] {
            let g = RadialGrid::uniform(3.0, n).unwrap();
            assert!(g.weights().iter().all(|&w| w > 0.0));
            assert!((g.integrate(&vec![1.0; n]) - 3.0).abs() < 1e-12 * 3.0);
            let cubic: Vec<f64> = g.nodes().iter().map(|r| r * r * r).collect();
            assert!((g.integrate(&cubic) - 81.0 / 4.0).abs() < 1e-11);
        }
    }

    #[test]
    fn panels_integrate_interval_length() {
        let g = RadialGrid::geometric_panels(1e-3, 40.0, 1.5, 12).unwrap();
        assert!(g.nodes().windows(2).all(|p| p[1] > p[0]));
        assert!((g.integrate(&vec![1.0; g.len()]) - 40.0).abs() < 1e-12 * 40.0);
        let e: Vec<f64> = g.nodes().iter().map(|r| (-2.0 * r).exp()).collect();
        assert!((g.radial_integral(&e) - 4.0 * PI * 2.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_grid_integrates_exponential() {
        let g = RadialGrid::gauss_laguerre(30, 2, 3.0).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|r| (-3.0 * r).exp()).collect();
        // ∫ r² e^{-3r} 4π dr = 4π 2/27
        assert!((g.radial_integral(&v) - 4.0 * PI * 2.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn field_rejects_mismatch_and_nan() {
        let g = Arc::new(RadialGrid::uniform(1.0, 5).unwrap());
        assert!(RadialField::new(g.clone(), vec![0.0; 4]).is_err());
        assert!(RadialField::new(g, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn spline_is_fourth_order() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 / (n - 1) as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| (-v).exp() * v.cos()).collect();
            let s = CubicSpline::new(&x, &y);
            (0..997)
                .map(|k| {
                    let t = 3.0 * k as f64 / 996.0;
                    (s.eval(t).unwrap() - (-t).exp() * t.cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(41), err(81));
        assert!(e1 < 1e-6 && e1 / e2 > 12.0, "{e1} {e2}");
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let s = CubicSpline::new(&x, &x);
        assert!(s.eval(2.5).is_none());
        assert_eq!(s.eval_or_zero(2.5), 0.0);
    }
}
