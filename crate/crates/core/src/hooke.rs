//! Hooke's atom: two electrons in an isotropic harmonic trap,
//! `H = ½(p1² + ω²r1² + p2² + ω²r2²) + λ/|r1 - r2|`.
//!
//! The Hamiltonian separates into centre-of-mass motion `R = (r1 + r2)/2`
//! (a mass-2 oscillator with ground energy `3ω/2`) and relative motion
//! `u = r1 - r2`, whose s-wave radial function `χ(u)` solves
//! `-χ'' + (ω²u²/4 + λ/u) χ = ε χ`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::exec::Execution;
use crate::numerics::{lowest_tridiag, CubicSpline, RadialField, RadialGrid};
use crate::state::{CorrelatedState, StateDerivs};

/// Smallest accepted coarse grid.
pub const MIN_GRID_N: usize = 512;
/// Default coarse grid (nodes including both ends).
pub const DEFAULT_GRID_N: usize = 2001;
/// Largest relative disagreement between the two Richardson estimates.
pub const RICHARDSON_TOL: f64 = 1e-6;
/// Largest tolerated amplitude next to the outer wall, relative to the maximum.
pub const LEAKAGE_TOL: f64 = 1e-8;
/// Largest tolerated miss of `∫ρ = 2` from the density quadrature.
pub const DENSITY_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HookeSpec {
    pub omega: f64,
    pub lambda: f64,
}

impl HookeSpec {
    pub fn new(omega: f64, lambda: f64) -> Result<Self> {
        let spec = Self { omega, lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        contract!(self.omega > 0.0 && self.omega.is_finite(), "omega must be positive (got {})", self.omega);
        contract!((0.0..=1.0).contains(&self.lambda), "lambda must lie in [0, 1] (got {})", self.lambda);
        Ok(())
    }

    /// Default outer wall of the relative-motion box.
    pub fn auto_u_max(&self) -> f64 {
        let w = self.omega;
        (12.0 / w.sqrt() + 10.0 * w.powf(-0.25)).max(25.0)
    }

    /// Coarse grid size: the requested one, grown until the spacing resolves
    /// both the oscillator length and the Coulomb cusp.
    pub fn effective_grid_n(&self, grid_n: usize, u_max: f64) -> usize {
        let h_max = self.omega.sqrt().recip().min(1.0) / 25.0;
        let needed = (u_max / h_max).ceil() as usize + 1;
        let n = grid_n.max(needed);
        n + (n + 1) % 2
    }
}

/// Lowest relative-motion eigenpair.
#[derive(Debug, Clone)]
pub struct RelativeSolution {
    pub eps_rel: f64,
    /// `χ(u)` extrapolated onto the h/2 grid, `∫χ² du = 1`.
    pub orbital: RadialField,
    /// Raw finite-difference eigenvalues at h, h/2, h/4.
    pub raw: [f64; 3],
}

fn fd_lowest(spec: &HookeSpec, n_nodes: usize, u_max: f64) -> Result<(f64, Vec<f64>)> {
    let h = u_max / (n_nodes - 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let w2 = 0.25 * spec.omega * spec.omega;
    let diag: Vec<f64> = (1..n_nodes - 1)
        .map(|i| {
            let u = i as f64 * h;
            2.0 * inv_h2 + w2 * u * u + spec.lambda / u
        })
        .collect();
    let off = vec![-inv_h2; diag.len() - 1];
    let (eps, v) = lowest_tridiag(&diag, &off)?;
    let mut chi = Vec::with_capacity(n_nodes);
    chi.push(0.0);
    chi.extend(v);
    chi.push(0.0);
    Ok((eps, chi))
}

/// Solve the relative-motion radial equation by finite differences with
/// `χ(0) = χ(u_max) = 0`, at spacings h, h/2 and h/4, and Richardson-extrapolate.
pub fn solve_relative(spec: &HookeSpec, grid_n: usize, u_max: Option<f64>) -> Result<RelativeSolution> {
    spec.validate()?;
    contract!(grid_n >= MIN_GRID_N, "grid_n must be at least {MIN_GRID_N} (got {grid_n})");
    let u_max = u_max.unwrap_or_else(|| spec.auto_u_max());
    contract!(u_max > 0.0 && u_max.is_finite(), "u_max must be positive (got {u_max})");
    let n0 = spec.effective_grid_n(grid_n, u_max);
    let levels = [n0, 2 * n0 - 1, 4 * n0 - 3];
    let mut raw = [0.0; 3];
    let mut vecs = Vec::with_capacity(3);
    for (k, &n) in levels.iter().enumerate() {
        let (eps, chi) = fd_lowest(spec, n, u_max)?;
        raw[k] = eps;
        vecs.push(chi);
    }
    let e1 = (4.0 * raw[1] - raw[0]) / 3.0;
    let e2 = (4.0 * raw[2] - raw[1]) / 3.0;
    let rel = (e2 - e1).abs() / e2.abs();
    if rel >= RICHARDSON_TOL {
        return Err(Error::Numerical(format!(
            "hooke relative solve not converged in h: successive extrapolations {e1} and {e2} differ by {rel:.2e}"
        )));
    }
    let fine = &vecs[2];
    let peak = fine.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nf = fine.len();
    let edge = fine[nf - 2].abs().max(fine[nf - 3].abs());
    if edge > LEAKAGE_TOL * peak {
        return Err(Error::Domain(format!(
            "relative orbital leaks to the wall at u_max = {u_max}: edge amplitude {:.2e} of peak",
            edge / peak
        )));
    }
    // extrapolate the orbital itself onto the h/2 grid
    let n = levels[1];
    let grid = Arc::new(RadialGrid::uniform(u_max, n)?);
    let fine_grid = RadialGrid::uniform(u_max, nf)?;
    let unit = |g: &RadialGrid, v: &[f64]| -> Vec<f64> {
        let norm = g.integrate(&v.iter().map(|c| c * c).collect::<Vec<_>>()).sqrt();
        v.iter().map(|c| c / norm).collect()
    };
    let mid = unit(&grid, &vecs[1]);
    let fine = unit(&fine_grid, fine);
    let mut chi: Vec<f64> = (0..n).map(|i| (4.0 * fine[2 * i] - mid[i]) / 3.0).collect();
    chi = unit(&grid, &chi);
    Ok(RelativeSolution { eps_rel: e2, orbital: RadialField::new(grid, chi)?, raw })
}

/// Expectation values of the N = 2 state: kinetic, interaction and external.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyComponents {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

impl EnergyComponents {
    pub fn total(&self) -> f64 {
        self.t + self.u + self.v
    }
}

/// `ψ(r1, r2, t) = √2 Φ(R) χ(u) / (u √(4π))`, normalised to 2.
#[derive(Debug, Clone)]
pub struct HookeState {
    spec: HookeSpec,
    chi: RadialField,
    g: CubicSpline,
    prefactor: f64,
}

impl HookeState {
    pub fn new(spec: HookeSpec, chi: RadialField) -> Result<Self> {
        spec.validate()?;
        let u = chi.grid().nodes();
        let c = chi.values();
        contract!(u.len() >= 9 && u[0] == 0.0, "relative orbital must start at u = 0 with >= 9 nodes");
        let mut g: Vec<f64> = u.iter().zip(c).map(|(&u, &c)| if u > 0.0 { c / u } else { 0.0 }).collect();
        g[0] = 4.0 * g[1] - 6.0 * g[2] + 4.0 * g[3] - g[4];
        let g = CubicSpline::new(u, &g);
        let w = spec.omega;
        let prefactor = 2f64.sqrt() * (2.0 * w / PI).powf(0.75) / (4.0 * PI).sqrt();
        Ok(Self { spec, chi, g, prefactor })
    }

    pub fn spec(&self) -> &HookeSpec {
        &self.spec
    }

    pub fn relative_orbital(&self) -> &RadialField {
        &self.chi
    }

    pub fn extent(&self) -> f64 {
        self.chi.grid().r_max()
    }

    pub fn length_scale(&self) -> f64 {
        self.spec.omega.sqrt().recip()
    }

    fn geometry(r1: f64, r2: f64, t: f64) -> (f64, f64) {
        let rr = (r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * t).max(0.0) / 4.0;
        let u = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * t).max(0.0).sqrt();
        (rr, u)
    }

    pub fn fill(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [f64]) {
        let w = self.spec.omega;
        for (o, &t) in out.iter_mut().zip(ts) {
            let (rr, u) = Self::geometry(r1, r2, t);
            *o = self.prefactor * (-w * rr).exp() * self.g.eval_or_zero(u);
        }
    }

    pub fn fill_derivs(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [StateDerivs]) {
        let w = self.spec.omega;
        for (o, &t) in out.iter_mut().zip(ts) {
            let (rr, u) = Self::geometry(r1, r2, t);
            let (g, gp, gpp) = self.g.eval_all(u).unwrap_or((0.0, 0.0, 0.0));
            let be = self.prefactor * (-w * rr).exp();
            let (du1, du2, dut, lap_u) = if u > 0.0 {
                ((r1 - r2 * t) / u, (r2 - r1 * t) / u, -r1 * r2 / u, gpp + 2.0 * gp / u)
            } else {
                (0.0, 0.0, 0.0, 3.0 * gpp)
            };
            *o = StateDerivs {
                value: be * g,
                d_r1: be * (-0.5 * w * (r1 + r2 * t) * g + gp * du1),
                d_r2: be * (-0.5 * w * (r2 + r1 * t) * g + gp * du2),
                d_t: be * (-0.5 * w * r1 * r2 * g + gp * dut),
                laplacian: be * (0.5 * (4.0 * w * w * rr - 6.0 * w) * g + 2.0 * lap_u),
            };
        }
    }

    /// Kinetic energy of the N-normalised state in gradient and Laplacian form,
    /// integrated exactly over the spline representation of `g = χ/u`.
    pub fn kinetic_forms(&self) -> (f64, f64) {
        let com = 0.75 * self.spec.omega;
        let grad = self.g.integrate_with(|u, _, d, _| d * d * u * u);
        let lap = -self.g.integrate_with(|u, v, d, dd| v * (dd * u * u + 2.0 * d * u));
        (2.0 * (com + grad), 2.0 * (com + lap))
    }

    /// (T, U, V) per system (not multiplied by N).
    pub fn components(&self) -> EnergyComponents {
        let w = self.spec.omega;
        let t = 0.5 * self.kinetic_forms().0;
        let u = self.spec.lambda * self.g.integrate_with(|u, v, _, _| v * v * u);
        let v = 0.75 * w + 0.25 * w * w * self.g.integrate_with(|u, v, _, _| v * v * u.powi(4));
        EnergyComponents { t, u, v }
    }

    /// `Σ_u w(u) χ(u)² K(r, u) / u^p`, with K the angular-averaged
    /// centre-of-mass Gaussian: `ρ(r)` for p = 0, the pair field for p = 1.
    fn reduced_integral(&self, r: f64, power: i32) -> f64 {
        let w = self.spec.omega;
        let grid = self.chi.grid();
        let (nodes, weights, chi) = (grid.nodes(), grid.weights(), self.chi.values());
        let h = grid.spacing().expect("uniform relative grid");
        let norm = (2.0 * w / PI).powf(1.5);
        // skip nodes where the Gaussian factor underflows
        let half_width = 2.0 * (375.0 / w).sqrt();
        let lo = (((2.0 * r - half_width) / h).floor().max(1.0)) as usize;
        let hi = ((((2.0 * r + half_width) / h).ceil()) as usize).min(nodes.len() - 1);
        let mut sum = 0.0;
        for i in lo..=hi {
            let u = nodes[i];
            let d = r - 0.5 * u;
            let x = 2.0 * w * r * u;
            let s = if x > 1e-8 { -(-2.0 * x).exp_m1() / x } else { 2.0 - 2.0 * x };
            sum += weights[i] * chi[i] * chi[i] * (-2.0 * w * d * d).exp() * s / u.powi(power);
        }
        norm * sum
    }

    pub fn density_at(&self, r: f64) -> f64 {
        self.reduced_integral(r, 0)
    }

    /// `∫ d³r1 |ψ(r, r1)|² / |r - r1|`.
    pub fn pair_field_at(&self, r: f64) -> f64 {
        self.reduced_integral(r, 1)
    }
}

#[derive(Debug, Clone)]
pub struct HookeSolution {
    pub spec: HookeSpec,
    pub eps_rel: f64,
    pub e_com: f64,
    pub e_total: f64,
    pub ionization: f64,
    pub rel_orbital: RadialField,
    pub density: RadialField,
    pub state: CorrelatedState,
    pub components: EnergyComponents,
}

/// Uniform grid on which the density is tabulated.
pub fn density_grid(spec: &HookeSpec, u_max: f64) -> Result<RadialGrid> {
    let h = spec.omega.sqrt().recip().min(1.0) / 60.0;
    let n = ((u_max / h).ceil() as usize + 1).max(2001);
    RadialGrid::uniform(u_max, n + (n + 1) % 2)
}

/// Solve and assemble energies, density and the correlated state.
pub fn assemble_solution(spec: &HookeSpec, grid_n: usize, exec: Execution) -> Result<HookeSolution> {
    let rel = solve_relative(spec, grid_n, None)?;
    from_relative(*spec, rel.eps_rel, rel.orbital, exec)
}

/// Rebuild a solution from a stored relative orbital without re-solving.
pub fn from_relative(spec: HookeSpec, eps_rel: f64, orbital: RadialField, exec: Execution) -> Result<HookeSolution> {
    let state = HookeState::new(spec, orbital.clone())?;
    let grid = Arc::new(density_grid(&spec, state.extent())?);
    let components = state.components();
    let density = density_on(&state, grid, exec)?;
    let e_com = 1.5 * spec.omega;
    Ok(HookeSolution {
        spec,
        eps_rel,
        e_com,
        e_total: eps_rel + e_com,
        ionization: eps_rel,
        rel_orbital: orbital,
        density,
        state: CorrelatedState::Hooke(state),
        components,
    })
}

fn density_on(state: &HookeState, grid: Arc<RadialGrid>, exec: Execution) -> Result<RadialField> {
    contract!(grid.spacing().is_some(), "density grid must be uniform");
    let values = exec.map_slice(grid.nodes(), |&r| state.density_at(r));
    let field = RadialField::new(grid, values)?;
    let miss = (field.radial_integral() - 2.0).abs();
    if miss > DENSITY_NORM_TOL {
        return Err(Error::Numerical(format!("hooke density integrates to 2 ± {miss:.2e}; grid too coarse")));
    }
    Ok(field)
}

/// `ρ(r) = ∫ d³r2 |ψ(r, r2)|²` on a uniform grid.
pub fn compute_density(solution: &HookeSolution, r_grid: Arc<RadialGrid>, exec: Execution) -> Result<RadialField> {
    match &solution.state {
        CorrelatedState::Hooke(s) => density_on(s, r_grid, exec),
        _ => Err(Error::Contract("hooke solution carries a foreign state".into())),
    }
}
