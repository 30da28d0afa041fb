//! Exact Kohn-Sham inversion for two-electron singlets: a doubly occupied
//! orbital `φ = √(ρ/2)` and the potential `v = ε + ½∇²φ/φ`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::numerics::diff::second_derivative_values;
use crate::numerics::{lowest_tridiag, CubicSpline, RadialField, RadialGrid};
use crate::state::{CorrelatedState, StateDerivs};
use crate::system::{Family, SystemRecord};

/// Density floor (relative to the maximum) below which `v` is extrapolated.
pub const DENSITY_FLOOR: f64 = 1e-12;
/// Points used by the tail fit.
const TAIL_FIT_POINTS: usize = 20;

/// Orbital `φ = √(ρ/2)`; small negative samples are clamped to zero.
pub fn ks_orbital(density: &RadialField) -> Result<RadialField> {
    let vals = density.values();
    if let Some((i, v)) = vals.iter().enumerate().find(|(_, v)| **v < -1e-12) {
        return Err(Error::Contract(format!("negative density {v:e} at node {i}")));
    }
    let total = density.radial_integral();
    contract!((total - 2.0).abs() <= 1e-6, "density integrates to {total}, expected 2");
    RadialField::new(density.grid().clone(), vals.iter().map(|v| (v.max(0.0) / 2.0).sqrt()).collect())
}

/// `ε_KS = E(N) - E(N-1)`.
pub fn ks_eigenvalue(system: &SystemRecord) -> f64 {
    system.e_total - system.remnant_energy()
}

/// How `v_KS` is continued beyond the density floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// `-C/r`, matched at the last valid node.
    Coulomb,
    /// `a + b r²`, least squares over the last valid nodes.
    Harmonic,
}

impl From<Family> for TailKind {
    fn from(f: Family) -> Self {
        match f {
            Family::Hooke => TailKind::Harmonic,
            Family::Helium => TailKind::Coulomb,
        }
    }
}

/// `v(r) = ε + (rφ)''/(2rφ)` where `ρ > floor`, tail-extrapolated beyond.
/// Returns the potential and the last radius of the valid region.
pub fn ks_potential(orbital: &RadialField, eps_ks: f64, tail: TailKind) -> Result<(RadialField, f64)> {
    let grid = orbital.grid();
    let h = grid.spacing().ok_or_else(|| Error::Contract("KS inversion needs a uniform grid".into()))?;
    contract!(eps_ks.is_finite(), "KS eigenvalue must be finite");
    let r = grid.nodes();
    let phi = orbital.values();
    let peak = phi.iter().fold(0.0f64, |m, v| m.max(v * v));
    let last_valid = phi.iter().rposition(|p| p * p > DENSITY_FLOOR * peak && p * p > 0.0);
    let last = match last_valid {
        Some(i) if i >= 8 => i,
        _ => return Err(Error::Numerical("density is below the floor everywhere".into())),
    };
    let u: Vec<f64> = r.iter().zip(phi).map(|(r, p)| r * p).collect();
    let upp = second_derivative_values(&u, h);
    let mut v = vec![0.0; r.len()];
    for i in 1..=last {
        v[i] = eps_ks + 0.5 * upp[i] / u[i];
    }
    v[0] = 4.0 * v[1] - 6.0 * v[2] + 4.0 * v[3] - v[4];
    let r_valid = r[last];
    match tail {
        TailKind::Coulomb => {
            let c = -v[last] * r_valid;
            for i in last + 1..r.len() {
                v[i] = -c / r[i];
            }
        }
        TailKind::Harmonic => {
            let lo = last.saturating_sub(TAIL_FIT_POINTS - 1).max(1);
            let (mut s1, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in lo..=last {
                let x = r[i] * r[i];
                s1 += 1.0;
                sx += x;
                sxx += x * x;
                sy += v[i];
                sxy += x * v[i];
            }
            let b = (s1 * sxy - sx * sy) / (s1 * sxx - sx * sx);
            let a = (sy - b * sx) / s1;
            for i in last + 1..r.len() {
                v[i] = a + b * r[i] * r[i];
            }
        }
    }
    Ok((RadialField::new(grid.clone(), v)?, r_valid))
}

/// Product state `√2 φ(r1) φ(r2)`, normalised to 2 like every state here.
#[derive(Debug, Clone)]
pub struct ProductState {
    phi: CubicSpline,
    extent: f64,
    length_scale: f64,
}

impl ProductState {
    pub fn new(orbital: &RadialField, length_scale: f64) -> Self {
        Self { phi: orbital.spline(), extent: orbital.grid().r_max(), length_scale }
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    fn orbital_all(&self, r: f64) -> (f64, f64, f64) {
        self.phi.eval_all(r).unwrap_or((0.0, 0.0, 0.0))
    }

    pub fn fill(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [f64]) {
        let v = 2f64.sqrt() * self.phi.eval_or_zero(r1) * self.phi.eval_or_zero(r2);
        for o in out.iter_mut().take(ts.len()) {
            *o = v;
        }
    }

    pub fn fill_derivs(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [StateDerivs]) {
        let s = 2f64.sqrt();
        let (a, da, dda) = self.orbital_all(r1);
        let (b, db, ddb) = self.orbital_all(r2);
        let d = StateDerivs {
            value: s * a * b,
            d_r1: s * da * b,
            d_r2: s * a * db,
            d_t: 0.0,
            laplacian: s * ((dda + 2.0 * da / r1) * b + a * (ddb + 2.0 * db / r2)),
        };
        for o in out.iter_mut().take(ts.len()) {
            *o = d;
        }
    }
}

/// Kohn-Sham counterpart of a solved system.
#[derive(Debug, Clone)]
pub struct KsSystem {
    pub orbital: RadialField,
    pub eps_ks: f64,
    pub v_ks: RadialField,
    pub e_ks_total: f64,
    pub state: CorrelatedState,
    pub density: RadialField,
    pub valid_r_max: f64,
}

impl KsSystem {
    /// `½√(ρ(r1)ρ(r2))`, the unit-normalised Slater-determinant amplitude.
    pub fn orbital_product(&self, r1: f64, r2: f64) -> f64 {
        let s = self.orbital.spline();
        s.eval_or_zero(r1) * s.eval_or_zero(r2)
    }
}

pub fn ks_two_electron(
    orbital: RadialField,
    v_ks: RadialField,
    eps_ks: f64,
    density: RadialField,
    valid_r_max: f64,
    length_scale: f64,
) -> Result<KsSystem> {
    contract!(
        Arc::ptr_eq(orbital.grid(), v_ks.grid()) || orbital.grid() == v_ks.grid(),
        "orbital and potential must share a grid"
    );
    let state = CorrelatedState::Product(ProductState::new(&orbital, length_scale));
    Ok(KsSystem { orbital, eps_ks, v_ks, e_ks_total: 2.0 * eps_ks, state, density, valid_r_max })
}

/// Invert a solved many-body system.
pub fn invert(system: &SystemRecord) -> Result<KsSystem> {
    let orbital = ks_orbital(&system.density)?;
    let eps = ks_eigenvalue(system);
    let (v, valid) = ks_potential(&orbital, eps, system.family().into())?;
    ks_two_electron(orbital, v, eps, system.density.clone(), valid, system.state.length_scale())
}

/// Result of re-solving `-½∇²φ + v φ = ε φ` in the recovered potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTrip {
    pub eps: f64,
    /// `|⟨φ, φ_KS⟩|` of unit-normalised orbitals.
    pub overlap: f64,
}

fn radial_lowest(v: &[f64], h: f64, stride: usize) -> Result<(f64, Vec<f64>)> {
    let vs: Vec<f64> = v.iter().step_by(stride).copied().collect();
    let hs = h * stride as f64;
    let inv = 0.5 / (hs * hs);
    let diag: Vec<f64> = vs[1..vs.len() - 1].iter().map(|v| 2.0 * inv + v).collect();
    let off = vec![-inv; diag.len() - 1];
    lowest_tridiag(&diag, &off)
}

/// Round-trip check: finite differences at h and 2h, Richardson-extrapolated.
pub fn round_trip(ks: &KsSystem) -> Result<RoundTrip> {
    let grid: &RadialGrid = ks.v_ks.grid();
    let h = grid.spacing().ok_or_else(|| Error::Contract("round trip needs a uniform grid".into()))?;
    contract!((grid.len() - 1).is_multiple_of(2), "round trip needs an even number of intervals");
    let (e_h, vec_h) = radial_lowest(ks.v_ks.values(), h, 1)?;
    let (e_2h, _) = radial_lowest(ks.v_ks.values(), h, 2)?;
    let eps = (4.0 * e_h - e_2h) / 3.0;
    let r = grid.nodes();
    let mut u = vec![0.0; r.len()];
    u[1..r.len() - 1].copy_from_slice(&vec_h);
    let target: Vec<f64> = r.iter().zip(ks.orbital.values()).map(|(r, p)| r * p).collect();
    let nu = grid.integrate(&u.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let nt = grid.integrate(&target.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let dot = grid.integrate(&u.iter().zip(&target).map(|(a, b)| a * b).collect::<Vec<_>>());
    Ok(RoundTrip { eps, overlap: (dot / (nu * nt)).abs() })
}
