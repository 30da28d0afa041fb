//! Evaluatable two-electron s-states `ψ(r1, r2, cos θ12)` normalised to N = 2,
//! and quadrature over the reduced coordinates `(r1, r2, t)`.
//!
//! For s-states the six-dimensional measure reduces to
//! `d³r1 d³r2 = 8π² r1² r2² dr1 dr2 dt`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::helium::HeliumState;
use crate::hooke::HookeState;
use crate::ksinv::ProductState;
use crate::numerics::{gauss_legendre_rule, QuadratureRule1D, RadialGrid};

/// Particle number of every system handled here.
pub const N_ELECTRONS: f64 = 2.0;

/// Value and derivatives of a state at one point of `(r1, r2, t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateDerivs {
    pub value: f64,
    pub d_r1: f64,
    pub d_r2: f64,
    pub d_t: f64,
    /// `(∇1² + ∇2²) ψ`.
    pub laplacian: f64,
}

impl StateDerivs {
    /// `|∇1 ψ|²` for an s-state.
    pub fn grad1_sq(&self, r1: f64, t: f64) -> f64 {
        self.d_r1 * self.d_r1 + (1.0 - t * t) * self.d_t * self.d_t / (r1 * r1)
    }

    pub fn grad2_sq(&self, r2: f64, t: f64) -> f64 {
        self.d_r2 * self.d_r2 + (1.0 - t * t) * self.d_t * self.d_t / (r2 * r2)
    }
}

/// A spin-singlet two-electron spatial state, symmetric under `r1 <-> r2`.
#[derive(Debug, Clone)]
pub enum CorrelatedState {
    Hooke(HookeState),
    Helium(HeliumState),
    Product(ProductState),
}

impl CorrelatedState {
    /// Fill `out[q] = ψ(r1, r2, ts[q])`.
    pub fn fill(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [f64]) {
        match self {
            CorrelatedState::Hooke(s) => s.fill(r1, r2, ts, out),
            CorrelatedState::Helium(s) => s.fill(r1, r2, ts, out),
            CorrelatedState::Product(s) => s.fill(r1, r2, ts, out),
        }
    }

    pub fn fill_derivs(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [StateDerivs]) {
        match self {
            CorrelatedState::Hooke(s) => s.fill_derivs(r1, r2, ts, out),
            CorrelatedState::Helium(s) => s.fill_derivs(r1, r2, ts, out),
            CorrelatedState::Product(s) => s.fill_derivs(r1, r2, ts, out),
        }
    }

    pub fn value(&self, r1: f64, r2: f64, t: f64) -> f64 {
        let mut out = [0.0];
        self.fill(r1, r2, &[t], &mut out);
        out[0]
    }

    /// Radius beyond which the state is negligible.
    pub fn extent(&self) -> f64 {
        match self {
            CorrelatedState::Hooke(s) => s.extent(),
            CorrelatedState::Helium(s) => s.extent(),
            CorrelatedState::Product(s) => s.extent(),
        }
    }

    /// Smallest length scale on which the state varies.
    pub fn length_scale(&self) -> f64 {
        match self {
            CorrelatedState::Hooke(s) => s.length_scale(),
            CorrelatedState::Helium(s) => s.length_scale(),
            CorrelatedState::Product(s) => s.length_scale(),
        }
    }

    /// Polynomial degree in `t`, when the state is polynomial in `t`.
    pub fn t_degree(&self) -> Option<usize> {
        match self {
            CorrelatedState::Hooke(_) => None,
            CorrelatedState::Helium(s) => Some(s.t_degree()),
            CorrelatedState::Product(_) => Some(0),
        }
    }

    /// Kinetic expectation `⟨ψ|T|ψ⟩` (N-normalised) in gradient form
    /// `½∫(|∇1ψ|² + |∇2ψ|²)` and in Laplacian form `-½∫ψ(∇1² + ∇2²)ψ`.
    pub fn kinetic_forms(&self, grid: &PairGrid, exec: Execution) -> (f64, f64) {
        match self {
            CorrelatedState::Hooke(s) => s.kinetic_forms(),
            _ => {
                let sums = grid.integrate_symmetric(exec, 2, |r1, r2, w, ts, wts, acc| {
                    let mut d = vec![StateDerivs::default(); ts.len()];
                    self.fill_derivs(r1, r2, ts, &mut d);
                    for ((dq, &t), &wt) in d.iter().zip(ts).zip(wts) {
                        acc[0] += w * wt * 0.5 * (dq.grad1_sq(r1, t) + dq.grad2_sq(r2, t));
                        acc[1] -= w * wt * 0.5 * dq.value * dq.laplacian;
                    }
                });
                (sums[0], sums[1])
            }
        }
    }

    /// `∫ d³r1 |ψ(r, r1)|² / |r - r1|` at each radius.
    pub fn pair_field(&self, radii: &[f64], exec: Execution) -> Result<Vec<f64>> {
        match self {
            CorrelatedState::Hooke(s) => Ok(exec.map_slice(radii, |&r| s.pair_field_at(r))),
            _ => {
                let deg = self
                    .t_degree()
                    .ok_or_else(|| Error::Contract("multipole pair field needs a state polynomial in cos θ".into()))?;
                Ok(multipole_pair_field(self, deg, radii, exec))
            }
        }
    }

    /// Kinetic energy density `τ(r) = ½ ∫ d³r2 |∇_r ψ(r, r2)|²` at each radius.
    pub fn kinetic_density(&self, radii: &[f64], grid: &PairGrid, exec: Execution) -> Vec<f64> {
        let ts = grid.angular.nodes.as_slice();
        let wts = grid.angular.weights.as_slice();
        exec.map_slice(radii, |&r| {
            if r <= 0.0 {
                return 0.0;
            }
            let mut d = vec![StateDerivs::default(); ts.len()];
            let mut sum = 0.0;
            for (&r2, &w2) in grid.radial.nodes().iter().zip(grid.radial.weights()) {
                self.fill_derivs(r, r2, ts, &mut d);
                let inner: f64 = d.iter().zip(ts).zip(wts).map(|((dq, &t), &wt)| wt * dq.grad1_sq(r, t)).sum();
                sum += w2 * r2 * r2 * inner;
            }
            0.5 * 2.0 * PI * sum
        })
    }

    /// `∫ d³r2 |ψ(r, r2)|²` at each radius by direct quadrature.
    pub fn density_by_quadrature(&self, radii: &[f64], grid: &PairGrid, exec: Execution) -> Vec<f64> {
        let ts = grid.angular.nodes.as_slice();
        let wts = grid.angular.weights.as_slice();
        exec.map_slice(radii, |&r| {
            let mut v = vec![0.0; ts.len()];
            let mut sum = 0.0;
            for (&r2, &w2) in grid.radial.nodes().iter().zip(grid.radial.weights()) {
                self.fill(r, r2, ts, &mut v);
                let inner: f64 = v.iter().zip(wts).map(|(x, wt)| wt * x * x).sum();
                sum += w2 * r2 * r2 * inner;
            }
            2.0 * PI * sum
        })
    }
}

/// Tensor quadrature over `(r1, r2, t)`.
#[derive(Debug, Clone)]
pub struct PairGrid {
    pub radial: RadialGrid,
    pub angular: QuadratureRule1D,
}

/// Geometric ratio between consecutive radial panels.
pub const PANEL_RATIO: f64 = 1.5;
/// Gauss-Legendre points per radial panel.
pub const PANEL_POINTS: usize = 12;
/// Gauss-Legendre points in `t = cos θ12`.
pub const ANGULAR_POINTS: usize = 64;

impl PairGrid {
    pub fn new(radial: RadialGrid, angular: QuadratureRule1D) -> Self {
        Self { radial, angular }
    }

    /// Grid resolving every state in `states`: geometric panels from a
    /// fraction of the smallest length scale out to the largest extent.
    pub fn covering<'a>(states: impl IntoIterator<Item = &'a CorrelatedState>) -> Result<Self> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for s in states {
            lo = lo.min(s.length_scale());
            hi = hi.max(s.extent());
        }
        if !(lo.is_finite() && hi > 0.0) {
            return Err(Error::Contract("pair grid needs at least one state".into()));
        }
        let radial = RadialGrid::geometric_panels(0.05 * lo, hi, PANEL_RATIO, PANEL_POINTS)?;
        Ok(Self::new(radial, gauss_legendre_rule(ANGULAR_POINTS)))
    }

    /// Description used in provenance records.
    pub fn describe(&self) -> String {
        format!(
            "radial {} nodes on [0, {:.6e}] (geometric GL panels, ratio {PANEL_RATIO}, {PANEL_POINTS} pts), angular {}-pt GL",
            self.radial.len(),
            self.radial.r_max(),
            self.angular.len()
        )
    }

    /// Sum a symmetric integrand over the 6D measure.
    ///
    /// `f(r1, r2, w, ts, wts, acc)` adds `w * Σ_q wts[q] * g(r1, r2, ts[q])`
    /// into `acc`; `w` already contains `8π² r1² r2²`, the radial weights
    /// and the factor 2 for the off-diagonal half of the `(r1, r2)` square.
    /// Rows are processed independently and reduced in index order.
    pub fn integrate_symmetric<F>(&self, exec: Execution, n_out: usize, f: F) -> Vec<f64>
    where
        F: Fn(f64, f64, f64, &[f64], &[f64], &mut [f64]) + Sync + Send,
    {
        let nodes = self.radial.nodes();
        let weights = self.radial.weights();
        let ts = self.angular.nodes.as_slice();
        let wts = self.angular.weights.as_slice();
        let rows = exec.map(nodes.len(), |i| {
            let mut acc = vec![0.0; n_out];
            let (r1, w1) = (nodes[i], weights[i]);
            for j in i..nodes.len() {
                let (r2, w2) = (nodes[j], weights[j]);
                let sym = if i == j { 1.0 } else { 2.0 };
                let w = sym * 8.0 * PI * PI * w1 * w2 * r1 * r1 * r2 * r2;
                f(r1, r2, w, ts, wts, &mut acc);
            }
            acc
        });
        let mut total = vec![0.0; n_out];
        for row in rows {
            for (t, v) in total.iter_mut().zip(row) {
                *t += v;
            }
        }
        total
    }

    /// `⟨a|b⟩` for each requested pair plus `⟨s|s⟩` for each state.
    pub fn norm_sq(&self, state: &CorrelatedState, exec: Execution) -> f64 {
        self.integrate_symmetric(exec, 1, |r1, r2, w, ts, wts, acc| {
            let mut v = vec![0.0; ts.len()];
            state.fill(r1, r2, ts, &mut v);
            acc[0] += w * v.iter().zip(wts).map(|(x, wt)| wt * x * x).sum::<f64>();
        })[0]
    }

    pub fn overlap(&self, a: &CorrelatedState, b: &CorrelatedState, exec: Execution) -> f64 {
        self.integrate_symmetric(exec, 1, |r1, r2, w, ts, wts, acc| {
            let mut va = vec![0.0; ts.len()];
            let mut vb = vec![0.0; ts.len()];
            a.fill(r1, r2, ts, &mut va);
            b.fill(r1, r2, ts, &mut vb);
            acc[0] += w * va.iter().zip(&vb).zip(wts).map(|((x, y), wt)| wt * x * y).sum::<f64>();
        })[0]
    }
}

/// Multipole evaluation of the pair field for a state of degree `deg` in `t`.
///
/// `|ψ|²` has degree `2 deg` in `t`, so the expansion of `1/|r - r1|` can be
/// truncated at `l = 2 deg` without error; the `r1` integral is split at `r1 = r`.
fn multipole_pair_field(state: &CorrelatedState, deg: usize, radii: &[f64], exec: Execution) -> Vec<f64> {
    let lmax = 2 * deg;
    let trule = gauss_legendre_rule(2 * deg + 1);
    let ts = trule.nodes.as_slice();
    let wts = trule.weights.as_slice();
    // P_l(t_q) table
    let mut ptab = vec![vec![0.0; lmax + 1]; ts.len()];
    for (q, &t) in ts.iter().enumerate() {
        crate::numerics::poly::legendre_all(t, &mut ptab[q]);
    }
    let inner_rule = gauss_legendre_rule(24);
    let extent = state.extent();
    let scale = state.length_scale();
    exec.map_slice(radii, |&r| {
        if r <= 0.0 {
            // 1/r1 potential at the origin
            let outer =
                RadialGrid::geometric_panels(0.05 * scale, extent, PANEL_RATIO, PANEL_POINTS).expect("valid panels");
            let mut v = vec![0.0; ts.len()];
            let mut sum = 0.0;
            for (&r1, &w1) in outer.nodes().iter().zip(outer.weights()) {
                state.fill(0.0, r1, ts, &mut v);
                let inner: f64 = v.iter().zip(wts).map(|(x, wt)| wt * x * x).sum();
                sum += w1 * r1 * inner;
            }
            return 2.0 * PI * sum;
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let (x, w) = inner_rule.mapped(0.0, r);
        nodes.extend(x);
        weights.extend(w);
        if extent > r {
            let start = r.max(0.05 * scale);
            let mut b = vec![r];
            let mut edge = start;
            while edge < extent {
                edge = (edge * PANEL_RATIO).min(extent).max(edge + 1e-12);
                b.push(edge);
            }
            if b.len() >= 2 {
                let outer = RadialGrid::gl_panels(&b, PANEL_POINTS).expect("valid panels");
                nodes.extend_from_slice(outer.nodes());
                weights.extend_from_slice(outer.weights());
            }
        }
        let mut v = vec![0.0; ts.len()];
        let mut sum = 0.0;
        for (&r1, &w1) in nodes.iter().zip(&weights) {
            state.fill(r, r1, ts, &mut v);
            let (rl, rg) = if r1 < r { (r1, r) } else { (r, r1) };
            let ratio = rl / rg;
            let mut inner = 0.0;
            for (q, (&x, &wt)) in v.iter().zip(wts).enumerate() {
                let mut kernel = 0.0;
                let mut pw = 1.0 / rg;
                for l in 0..=lmax {
                    kernel += pw * ptab[q][l];
                    pw *= ratio;
                }
                inner += wt * x * x * kernel;
            }
            sum += w1 * r1 * r1 * inner;
        }
        2.0 * PI * sum
    })
}
