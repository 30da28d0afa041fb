//! Metric-space distances between two-electron systems: wavefunction
//! `D_ψ`, density `D_ρ`, and the potential distances `D_v1` (6D eigenstate
//! form) and `D_v2` (3D, eigenstate form or from the energy density `h`).
//!
//! The gauge constant `c` shifts the total energy of every system in a
//! comparison set by the same amount; per particle the shift is `c/N`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::exec::Execution;
use crate::numerics::{RadialField, RadialGrid};
use crate::state::{CorrelatedState, PairGrid, StateDerivs, N_ELECTRONS};
use crate::system::SystemRecord;

const N: f64 = N_ELECTRONS;
/// Tolerance on the N = 2 normalisation of states and densities.
pub const NORM_TOL: f64 = 1e-6;
/// Search step of the h-field gauge constant (hartree).
pub const H_GAUGE_STEP: f64 = 1e-3;
/// Divergence threshold of the h-field gauge search.
pub const H_GAUGE_MAX: f64 = 1e9;
/// Relative density floor below which h-field nodes are not constrained.
pub const H_DENSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeRule {
    /// `c = max(0, -min E)` over the comparison set.
    EigenstateMin,
    /// Smallest c on the search grid making every h field non-negative.
    HFieldMin,
    /// Supplied by the caller.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeContext {
    pub c: f64,
    pub member_energies: Vec<f64>,
    pub rule: GaugeRule,
}

impl GaugeContext {
    /// Fail unless `E + c ≥ 0`.
    pub fn check(&self, e: f64) -> Result<()> {
        contract!(e + self.c >= 0.0, "gauge violation: E + c = {} < 0 (E = {e}, c = {})", e + self.c, self.c);
        Ok(())
    }

    /// Stamp written into output headers.
    pub fn describe(&self) -> String {
        let rule = match self.rule {
            GaugeRule::EigenstateMin => "eigenstate-min",
            GaugeRule::HFieldMin => "h-field-min",
            GaugeRule::Fixed => "fixed",
        };
        format!("c = {:.16e} ({rule}, {} members)", self.c, self.member_energies.len())
    }
}

/// `c = max(0, -min E)`, one constant for the whole set.
pub fn gauge_constant_eigen(energies: &[f64]) -> Result<GaugeContext> {
    contract!(!energies.is_empty(), "gauge constant needs at least one energy");
    contract!(energies.iter().all(|e| e.is_finite()), "energies must be finite");
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GaugeContext { c: (-min).max(0.0), member_energies: energies.to_vec(), rule: GaugeRule::EigenstateMin })
}

/// Caller-chosen constant, validated against every member.
pub fn gauge_fixed(c: f64, energies: &[f64]) -> Result<GaugeContext> {
    contract!(c.is_finite(), "gauge constant must be finite");
    let g = GaugeContext { c, member_energies: energies.to_vec(), rule: GaugeRule::Fixed };
    for &e in energies {
        g.check(e)?;
    }
    Ok(g)
}

/// Raw 6D sums for one pair of states on a [`PairGrid`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairSums {
    /// `∫ (a - b)²`
    pub minus: f64,
    /// `∫ (a + b)²`
    pub plus: f64,
    /// `∫ |(E_a + c) a² - (E_b + c) b²|`
    pub v1: f64,
}

impl PairSums {
    pub fn d_psi(&self) -> f64 {
        self.minus.min(self.plus).max(0.0).sqrt()
    }
}

/// One state with its gauged energy `E + c`.
#[derive(Debug, Clone, Copy)]
pub struct Weighted<'a> {
    pub state: &'a CorrelatedState,
    pub e_shifted: f64,
}

/// Stream every state over the grid once and accumulate the sums of all
/// requested pairs, plus each state's norm `∫ ψ²`.
pub fn pair_sums(
    states: &[Weighted<'_>],
    pairs: &[(usize, usize)],
    grid: &PairGrid,
    exec: Execution,
) -> Result<(Vec<PairSums>, Vec<f64>)> {
    for &(i, j) in pairs {
        contract!(i < states.len() && j < states.len(), "pair ({i}, {j}) out of range");
    }
    let ns = states.len();
    let np = pairs.len();
    let nt = grid.angular.len();
    let out = grid.integrate_symmetric(exec, ns + 3 * np, |r1, r2, w, ts, wts, acc| {
        let mut vals = vec![0.0; ns * nt];
        for (s, st) in states.iter().enumerate() {
            st.state.fill(r1, r2, ts, &mut vals[s * nt..(s + 1) * nt]);
        }
        for s in 0..ns {
            let v = &vals[s * nt..(s + 1) * nt];
            acc[s] += w * v.iter().zip(wts).map(|(x, wt)| wt * x * x).sum::<f64>();
        }
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let (a, b) = (&vals[i * nt..(i + 1) * nt], &vals[j * nt..(j + 1) * nt]);
            let (ea, eb) = (states[i].e_shifted, states[j].e_shifted);
            let (mut m, mut pl, mut v1) = (0.0, 0.0, 0.0);
            for q in 0..nt {
                let (x, y) = (a[q], b[q]);
                m += wts[q] * (x - y) * (x - y);
                pl += wts[q] * (x + y) * (x + y);
                v1 += wts[q] * (ea * x * x - eb * y * y).abs();
            }
            acc[ns + 3 * p] += w * m;
            acc[ns + 3 * p + 1] += w * pl;
            acc[ns + 3 * p + 2] += w * v1;
        }
    });
    let norms = out[..ns].to_vec();
    let sums = (0..np)
        .map(|p| PairSums { minus: out[ns + 3 * p], plus: out[ns + 3 * p + 1], v1: out[ns + 3 * p + 2] })
        .collect();
    Ok((sums, norms))
}

fn check_norm(norm: f64, what: &str) -> Result<()> {
    if (norm - N).abs() > NORM_TOL {
        return Err(Error::Numerical(format!("{what} has norm {norm} on the pair grid, expected {N}")));
    }
    Ok(())
}

/// `D_ψ = √(2N - 2|⟨a|b⟩|)`, evaluated as `min(‖a - b‖, ‖a + b‖)`.
pub fn d_psi(a: &CorrelatedState, b: &CorrelatedState, grid: &PairGrid, exec: Execution) -> Result<f64> {
    let states = [Weighted { state: a, e_shifted: 0.0 }, Weighted { state: b, e_shifted: 0.0 }];
    let (sums, norms) = pair_sums(&states, &[(0, 1)], grid, exec)?;
    check_norm(norms[0], "first state")?;
    check_norm(norms[1], "second state")?;
    let overlap = 0.25 * (sums[0].plus - sums[0].minus);
    if overlap.abs() > N + NORM_TOL {
        return Err(Error::Numerical(format!("overlap {overlap} exceeds N; quadrature unresolved")));
    }
    Ok(sums[0].d_psi())
}

/// Sample a density on `radii`, zero beyond its table (which must have decayed).
pub fn resample_density(rho: &RadialField, radii: &[f64]) -> Result<Vec<f64>> {
    let peak = rho.max_abs();
    let last = *rho.values().last().unwrap_or(&0.0);
    let r_max = rho.grid().r_max();
    if radii.iter().any(|&r| r > r_max) && last.abs() > 1e-12 * peak {
        return Err(Error::Contract(format!(
            "density resample beyond r = {r_max} where it has not decayed ({last:e})"
        )));
    }
    let s = rho.spline();
    Ok(radii.iter().map(|&r| s.eval(r).unwrap_or(0.0).max(0.0)).collect())
}

fn same_field(a: &RadialField, b: &RadialField) -> bool {
    (Arc::ptr_eq(a.grid(), b.grid()) || a.grid() == b.grid()) && a.values() == b.values()
}

/// `D_ρ = ∫ |ρ_a - ρ_b| d³r` on the radial quadrature `radial`.
pub fn d_rho(a: &RadialField, b: &RadialField, radial: &RadialGrid) -> Result<f64> {
    if same_field(a, b) {
        return Ok(0.0);
    }
    let ra = resample_density(a, radial.nodes())?;
    let rb = resample_density(b, radial.nodes())?;
    let diff: Vec<f64> = ra.iter().zip(&rb).map(|(x, y)| (x - y).abs()).collect();
    Ok(radial.radial_integral(&diff))
}

/// `D_v1 = ∫ |(E_a + c)|ψ_a|² - (E_b + c)|ψ_b|²|` over all six coordinates.
pub fn d_v1_eigen(
    a: &SystemRecord,
    b: &SystemRecord,
    gauge: &GaugeContext,
    grid: &PairGrid,
    exec: Execution,
) -> Result<f64> {
    gauge.check(a.e_total)?;
    gauge.check(b.e_total)?;
    let (ea, eb) = (a.e_total + gauge.c, b.e_total + gauge.c);
    let states = [Weighted { state: &a.state, e_shifted: ea }, Weighted { state: &b.state, e_shifted: eb }];
    let (sums, _) = pair_sums(&states, &[(0, 1)], grid, exec)?;
    Ok(sums[0].v1.min(N * (ea + eb)))
}

/// `D_v2 = ∫ |(E_a + c)ρ_a - (E_b + c)ρ_b| d³r`; exactly `N|E_a - E_b|` for equal densities.
pub fn d_v2_eigen(a: &SystemRecord, b: &SystemRecord, gauge: &GaugeContext, radial: &RadialGrid) -> Result<f64> {
    gauge.check(a.e_total)?;
    gauge.check(b.e_total)?;
    if same_field(&a.density, &b.density) {
        return Ok(N * (a.e_total - b.e_total).abs());
    }
    let (ea, eb) = (a.e_total + gauge.c, b.e_total + gauge.c);
    let ra = resample_density(&a.density, radial.nodes())?;
    let rb = resample_density(&b.density, radial.nodes())?;
    let diff: Vec<f64> = ra.iter().zip(&rb).map(|(x, y)| (ea * x - eb * y).abs()).collect();
    Ok(radial.radial_integral(&diff).min(N * (ea + eb)))
}

/// Gauge-free pieces of the energy density on the radial nodes of a pair grid.
#[derive(Debug, Clone)]
pub struct HComponents {
    pub radial: Arc<RadialGrid>,
    /// `τ(r) = ½ ∫ d³r2 |∇_r ψ(r, r2)|²`.
    pub tau: Vec<f64>,
    /// `½ λ ∫ d³r1 |ψ(r, r1)|² / |r - r1|`.
    pub pair: Vec<f64>,
    pub v: Vec<f64>,
    pub rho: Vec<f64>,
    pub energy: f64,
}

/// `h(r) = N[τ + pair + (v + c/N) ρ]` with its components.
#[derive(Debug, Clone)]
pub struct HField {
    pub h: RadialField,
    pub tau: RadialField,
    pub pair: RadialField,
    pub potential: RadialField,
    pub c: f64,
}

impl HField {
    /// `∫ h d³r`, to be compared with `(E + c) N`.
    pub fn integral(&self) -> f64 {
        self.h.radial_integral()
    }
}

pub fn h_components(system: &SystemRecord, grid: &PairGrid, exec: Execution) -> Result<HComponents> {
    let radial = Arc::new(grid.radial.clone());
    let nodes = radial.nodes();
    let tau = system.state.kinetic_density(nodes, grid, exec);
    let pair = if system.interaction > 0.0 {
        let p = system.state.pair_field(nodes, exec)?;
        p.into_iter().map(|x| 0.5 * system.interaction * x).collect()
    } else {
        vec![0.0; nodes.len()]
    };
    let v = system.potential.sample(nodes);
    let rho = resample_density(&system.density, nodes)?;
    Ok(HComponents { radial, tau, pair, v, rho, energy: system.e_total })
}

impl HComponents {
    pub fn field(&self, c: f64) -> Result<HField> {
        let mk = |v: Vec<f64>| RadialField::new(self.radial.clone(), v);
        let n = self.tau.len();
        let potential: Vec<f64> = (0..n).map(|i| N * (self.v[i] + c / N) * self.rho[i]).collect();
        let h: Vec<f64> = (0..n).map(|i| N * (self.tau[i] + self.pair[i]) + potential[i]).collect();
        Ok(HField {
            h: mk(h)?,
            tau: mk(self.tau.iter().map(|t| N * t).collect())?,
            pair: mk(self.pair.iter().map(|p| N * p).collect())?,
            potential: mk(potential)?,
            c,
        })
    }

    /// Smallest `c` making `h ≥ 0` at every node where `ρ` is above the floor.
    pub fn min_gauge(&self) -> f64 {
        let peak = self.rho.iter().fold(0.0f64, |m, v| m.max(*v));
        let nodes = self.radial.nodes();
        let mut c = 0.0f64;
        for i in 0..nodes.len() {
            if nodes[i] <= 0.0 || self.rho[i] <= H_DENSITY_FLOOR * peak {
                continue;
            }
            c = c.max(N * (-(self.tau[i] + self.pair[i]) / self.rho[i] - self.v[i]));
        }
        c
    }
}

pub fn h_field(system: &SystemRecord, gauge: &GaugeContext, grid: &PairGrid, exec: Execution) -> Result<HField> {
    h_components(system, grid, exec)?.field(gauge.c)
}

/// `c̄₂`: the smallest constant on a 1 mHa grid making every member's h non-negative.
pub fn gauge_constant_h(members: &[HComponents]) -> Result<GaugeContext> {
    contract!(!members.is_empty(), "gauge constant needs at least one system");
    let raw = members.iter().map(HComponents::min_gauge).fold(0.0f64, f64::max);
    if !(raw <= H_GAUGE_MAX) {
        return Err(Error::Numerical(format!("h-field gauge search diverged (c > {H_GAUGE_MAX:e})")));
    }
    let c = (raw / H_GAUGE_STEP).ceil() * H_GAUGE_STEP;
    Ok(GaugeContext { c, member_energies: members.iter().map(|m| m.energy).collect(), rule: GaugeRule::HFieldMin })
}

/// `D_v2 = ∫ |h_a - h_b| d³r` from general-form energy densities.
pub fn d_v2_general(a: &HField, b: &HField) -> Result<f64> {
    contract!(a.h.grid() == b.h.grid(), "h fields must share a radial grid");
    contract!(a.c == b.c, "h fields must share a gauge constant");
    let diff: Vec<f64> = a.h.values().iter().zip(b.h.values()).map(|(x, y)| (x - y).abs()).collect();
    Ok(a.h.grid().radial_integral(&diff))
}

/// `∫ f` over all coordinates: kinetic (gradient form), interaction,
/// potential and gauge terms; equals `(E + c) N` for an eigenstate.
pub fn f_norm(system: &SystemRecord, gauge: &GaugeContext, grid: &PairGrid, exec: Execution) -> f64 {
    let lambda = system.interaction;
    let c = gauge.c;
    let pot = &system.potential;
    let v_nodes = pot.sample(grid.radial.nodes());
    let nodes = grid.radial.nodes().to_vec();
    let index = move |r: f64| nodes.partition_point(|&x| x < r);
    grid.integrate_symmetric(exec, 1, |r1, r2, w, ts, wts, acc| {
        let (v1, v2) = (v_nodes[index(r1)], v_nodes[index(r2)]);
        let mut d = vec![StateDerivs::default(); ts.len()];
        system.state.fill_derivs(r1, r2, ts, &mut d);
        let mut s = 0.0;
        for ((dq, &t), &wt) in d.iter().zip(ts).zip(wts) {
            let psi2 = dq.value * dq.value;
            let u = (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * t).max(0.0).sqrt();
            let inter = if lambda > 0.0 && u > 0.0 { lambda * psi2 / u } else { 0.0 };
            s += wt * (0.5 * (dq.grad1_sq(r1, t) + dq.grad2_sq(r2, t)) + inter + psi2 * (v1 + v2 + c));
        }
        acc[0] += w * s;
    })[0]
}

/// Raw and max-2 rescaled distances for one pair of systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub d_psi: f64,
    pub d_rho: f64,
    pub d_v1: f64,
    pub d_v2: f64,
    pub rescaled_d_psi: f64,
    pub rescaled_d_rho: f64,
    pub rescaled_d_v1: f64,
    pub rescaled_d_v2: f64,
    pub energies: [f64; 2],
    pub gauge_c: f64,
}

/// Map each distance onto `[0, 2]` by its theoretical supremum.
pub fn rescale(
    d_psi: f64,
    d_rho: f64,
    d_v1: f64,
    d_v2: f64,
    energies: [f64; 2],
    gauge: &GaugeContext,
) -> Result<DistanceReport> {
    let denom = N * ((energies[0] + gauge.c) + (energies[1] + gauge.c));
    let v_scale = if denom > 0.0 {
        2.0 / denom
    } else if d_v1 == 0.0 && d_v2 == 0.0 {
        0.0
    } else {
        return Err(Error::Contract("rescaling potential distances with zero gauged energies".into()));
    };
    Ok(DistanceReport {
        d_psi,
        d_rho,
        d_v1,
        d_v2,
        rescaled_d_psi: 2.0 * d_psi / (2.0 * N).sqrt(),
        rescaled_d_rho: 2.0 * d_rho / (2.0 * N),
        rescaled_d_v1: v_scale * d_v1,
        rescaled_d_v2: v_scale * d_v2,
        energies,
        gauge_c: gauge.c,
    })
}

/// All four distances between two systems.
pub fn compare(
    a: &SystemRecord,
    b: &SystemRecord,
    gauge: &GaugeContext,
    grid: &PairGrid,
    exec: Execution,
) -> Result<DistanceReport> {
    let sums = {
        gauge.check(a.e_total)?;
        gauge.check(b.e_total)?;
        let states = [
            Weighted { state: &a.state, e_shifted: a.e_total + gauge.c },
            Weighted { state: &b.state, e_shifted: b.e_total + gauge.c },
        ];
        pair_sums(&states, &[(0, 1)], grid, exec)?.0[0]
    };
    report_from_sums(a, b, &sums, gauge, &grid.radial)
}

/// Assemble a report from precomputed 6D sums.
pub fn report_from_sums(
    a: &SystemRecord,
    b: &SystemRecord,
    sums: &PairSums,
    gauge: &GaugeContext,
    radial: &RadialGrid,
) -> Result<DistanceReport> {
    let (ea, eb) = (a.e_total + gauge.c, b.e_total + gauge.c);
    let d_v1 = sums.v1.min(N * (ea + eb));
    let d_v2 = d_v2_eigen(a, b, gauge, radial)?;
    let d_rho = d_rho(&a.density, &b.density, radial)?;
    rescale(sums.d_psi(), d_rho, d_v1, d_v2, [a.e_total, b.e_total], gauge)
}

/// `|⟨U⟩ / ⟨V⟩|` of the many-body system.
pub fn energy_ratio(system: &SystemRecord) -> Result<f64> {
    let c = &system.components;
    contract!(c.v != 0.0 && c.v.is_finite(), "external energy is zero or undefined");
    Ok((c.u / c.v).abs())
}
