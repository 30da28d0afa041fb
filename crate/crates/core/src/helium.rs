//! Helium isoelectronic series, `H = -½∇1² - ½∇2² - Z/r1 - Z/r2 + λ/r12`,
//! solved variationally in the orthonormal basis
//! `e^{-(x1+x2)/2} ℓ_i(x1) ℓ_j(x2) p_k(cos θ12)`, `x = 2Zr`,
//! `ℓ_i = L_i^(2)/√((i+1)(i+2))`, `p_k = √((2k+1)/2) P_k`, with `i + j + k ≤ Ω`.
//!
//! The spatial singlet is enforced by working in the exchange-symmetrised
//! combinations `(φ_ijk + φ_jik)/√2` (i < j) and `φ_iik`.

use std::f64::consts::PI;
use std::sync::Arc;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::exec::Execution;
use crate::hooke::EnergyComponents;
use crate::numerics::poly::{laguerre, laguerre_all, legendre_all, legendre_all_with_deriv};
use crate::numerics::{eig_sym_dense, gauss_legendre_rule, gauss_rule, RadialField, RadialGrid, WeightKind};
use crate::state::{CorrelatedState, StateDerivs};

/// Largest basis cutoff accepted.
pub const MAX_OMEGA: usize = 20;
/// Smallest basis cutoff used for the weakly bound Z = 1 ion.
pub const HYDRIDE_MIN_OMEGA: usize = 10;
/// Gauss-Legendre points for the radial-ratio integral of the repulsion.
pub const RATIO_POINTS: usize = 64;
/// Largest tolerated deviation of the basis overlap from the identity.
pub const OVERLAP_TOL: f64 = 1e-9;
/// Density grid spacing in units of `x = 2Zr`.
pub const DENSITY_DX: f64 = 0.0125;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeliumSpec {
    pub z: f64,
    pub omega_basis: usize,
    pub lambda: f64,
}

impl HeliumSpec {
    pub fn new(z: f64, omega_basis: usize, lambda: f64) -> Result<Self> {
        let spec = Self { z, omega_basis, lambda };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        contract!(self.z > 0.0 && self.z.is_finite(), "nuclear charge must be positive (got {})", self.z);
        contract!((0.0..=1.0).contains(&self.lambda), "lambda must lie in [0, 1] (got {})", self.lambda);
        contract!(
            self.omega_basis <= MAX_OMEGA,
            "basis cutoff {} exceeds the supported maximum {MAX_OMEGA}",
            self.omega_basis
        );
        Ok(())
    }

    /// Cutoff actually used: raised for the hydride-like edge.
    pub fn effective_omega(&self) -> usize {
        if self.z <= 1.0 {
            self.omega_basis.max(HYDRIDE_MIN_OMEGA)
        } else {
            self.omega_basis
        }
    }

    /// `x = 2Zr` beyond which the basis carries no weight.
    pub fn x_extent(&self) -> f64 {
        60.0 + 6.0 * self.effective_omega() as f64
    }
}

/// Exchange-symmetrised basis index set, ordered by `(i + j + k, i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub omega: usize,
    pub index: Vec<(usize, usize, usize)>,
}

impl Basis {
    pub fn new(omega: usize) -> Self {
        let mut index = Vec::new();
        for total in 0..=omega {
            for i in 0..=total {
                for j in i..=total - i {
                    let k = total - i - j;
                    index.push((i, j, k));
                }
            }
        }
        Self { omega, index }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Expand symmetrised coefficients into `C[k][(i, j)]` with `C_ijk = C_jik`.
    pub fn expand(&self, coeffs: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.omega + 1;
        let mut c = vec![DMatrix::zeros(n, n); n];
        for (&(i, j, k), &v) in self.index.iter().zip(coeffs) {
            if i == j {
                c[k][(i, i)] = v;
            } else {
                c[k][(i, j)] = v / 2f64.sqrt();
                c[k][(j, i)] = v / 2f64.sqrt();
            }
        }
        c
    }
}

fn norm_l(i: usize) -> f64 {
    1.0 / (((i + 1) * (i + 2)) as f64).sqrt()
}

fn norm_p(k: usize) -> f64 {
    ((2 * k + 1) as f64 / 2.0).sqrt()
}

/// Hamiltonian pieces over the symmetrised basis (orthonormal, norm-1 states).
#[derive(Debug, Clone)]
pub struct HeliumMatrices {
    pub basis: Basis,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    /// `1/r12` matrix (before multiplying by λ).
    pub repulsion: DMatrix<f64>,
}

impl HeliumMatrices {
    pub fn hamiltonian(&self, lambda: f64) -> DMatrix<f64> {
        &self.kinetic + &self.nuclear + &self.repulsion * lambda
    }
}

/// One-electron radial integrals in units of `x`:
/// kinetic `T^k_ii'` and nuclear attraction `V_ii'` for the given Z.
fn one_body(z: f64, omega: usize) -> Result<(Vec<DMatrix<f64>>, DMatrix<f64>, f64)> {
    let n = omega + 1;
    let nq = 2 * omega + 16;
    let rule2 = gauss_rule(WeightKind::Laguerre { alpha: 2 }, nq)?;
    let rule1 = gauss_rule(WeightKind::Laguerre { alpha: 1 }, nq)?;
    let rule0 = gauss_rule(WeightKind::Laguerre { alpha: 0 }, nq)?;
    let scale = 2.0 * z;
    // value and derivative of the polynomial factor: ℓ and ℓ' - ℓ/2
    let tab = |x: f64| -> (Vec<f64>, Vec<f64>) {
        let mut l = vec![0.0; n];
        laguerre_all(2.0, x, &mut l);
        let mut d = vec![0.0; n];
        for i in 0..n {
            let lp = if i == 0 { 0.0 } else { -laguerre(i - 1, 3.0, x) };
            d[i] = norm_l(i) * (lp - 0.5 * l[i]);
            l[i] *= norm_l(i);
        }
        (l, d)
    };
    let mut overlap = DMatrix::zeros(n, n);
    let mut grad = DMatrix::zeros(n, n);
    let mut centrifugal = DMatrix::zeros(n, n);
    let mut nuclear = DMatrix::zeros(n, n);
    for (&x, &w) in rule2.nodes.iter().zip(&rule2.weights) {
        let (l, d) = tab(x);
        for a in 0..n {
            for b in 0..n {
                overlap[(a, b)] += w * l[a] * l[b];
                grad[(a, b)] += w * d[a] * d[b];
            }
        }
    }
    for (&x, &w) in rule1.nodes.iter().zip(&rule1.weights) {
        let (l, _) = tab(x);
        for a in 0..n {
            for b in 0..n {
                nuclear[(a, b)] += w * l[a] * l[b];
            }
        }
    }
    for (&x, &w) in rule0.nodes.iter().zip(&rule0.weights) {
        let (l, _) = tab(x);
        for a in 0..n {
            for b in 0..n {
                centrifugal[(a, b)] += w * l[a] * l[b];
            }
        }
    }
    let dev = (&overlap - DMatrix::<f64>::identity(n, n)).abs().max();
    let kinetic =
        (0..n).map(|k| (&grad * 0.5 + &centrifugal * (0.5 * (k * (k + 1)) as f64)) * (scale * scale)).collect();
    Ok((kinetic, nuclear * (-z * scale), dev))
}

/// Index of the unordered pair `(a, b)`, `a, b ≤ omega`.
fn pair_index(a: usize, b: usize, n: usize) -> usize {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo * n - lo * (lo + 1) / 2 + hi
}

/// Radial Slater integrals `R^l[(ii'), (jj')]` in units of `x`, up to `l = 2Ω`.
///
/// With `x2 = s x1` on the region `x2 < x1` and `y = (1 + s) x1`, the
/// inner integral is an exact Gauss-Laguerre sum and only the ratio
/// `s ∈ [0, 1]` needs a Gauss-Legendre rule.
fn slater_integrals(omega: usize, exec: Execution) -> Result<Vec<DMatrix<f64>>> {
    let n = omega + 1;
    let npair = n * (n + 1) / 2;
    let ny = 2 * omega + 16;
    let yrule = gauss_rule(WeightKind::Laguerre { alpha: 2 }, ny)?;
    let srule = gauss_legendre_rule(RATIO_POINTS);
    let (s_nodes, s_weights) = srule.mapped(0.0, 1.0);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    debug_assert!(pairs.iter().enumerate().all(|(p, &(a, b))| pair_index(a, b, n) == p));
    let pair_values = |x: f64, row: &mut [f64]| {
        let mut l = vec![0.0; n];
        laguerre_all(2.0, x, &mut l);
        for (i, v) in l.iter_mut().enumerate() {
            *v *= norm_l(i);
        }
        for (p, &(a, b)) in pairs.iter().enumerate() {
            row[p] = l[a] * l[b];
        }
    };
    let sym: Vec<DMatrix<f64>> = exec.map_slice(&s_nodes, |&s| {
        let mut a = DMatrix::zeros(npair, ny);
        let mut b = DMatrix::zeros(npair, ny);
        let mut col = vec![0.0; npair];
        for (q, (&y, &w)) in yrule.nodes.iter().zip(&yrule.weights).enumerate() {
            pair_values(y / (1.0 + s), &mut col);
            for p in 0..npair {
                a[(p, q)] = col[p] * w * y * y;
            }
            pair_values(s * y / (1.0 + s), &mut col);
            for p in 0..npair {
                b[(p, q)] = col[p];
            }
        }
        let m = &a * b.transpose();
        &m + m.transpose()
    });
    let lmax = 2 * omega;
    Ok(exec.map(lmax + 1, |l| {
        let mut r = DMatrix::zeros(npair, npair);
        for ((&s, &w), m) in s_nodes.iter().zip(&s_weights).zip(&sym) {
            let c = w * s.powi(l as i32 + 2) / (1.0 + s).powi(5);
            r += m * c;
        }
        r
    }))
}

/// `∫ p_k p_k' P_l dt` for all `k, k' ≤ Ω`, `l ≤ 2Ω`.
fn gaunt_table(omega: usize) -> Vec<Vec<Vec<f64>>> {
    let n = omega + 1;
    let lmax = 2 * omega;
    let rule = gauss_legendre_rule(2 * omega + 2);
    let mut p = vec![0.0; lmax + 1];
    let mut g = vec![vec![vec![0.0; lmax + 1]; n]; n];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        legendre_all(t, &mut p);
        for k in 0..n {
            for kp in 0..n {
                for l in 0..=lmax {
                    g[k][kp][l] += w * norm_p(k) * norm_p(kp) * p[k] * p[kp] * p[l];
                }
            }
        }
    }
    g
}

/// Build the kinetic, nuclear and repulsion matrices over the symmetrised basis.
pub fn build_hamiltonian(spec: &HeliumSpec, exec: Execution) -> Result<HeliumMatrices> {
    spec.validate()?;
    let omega = spec.effective_omega();
    let basis = Basis::new(omega);
    let n = omega + 1;
    let (tk, vn, dev) = one_body(spec.z, omega)?;
    if dev > OVERLAP_TOL {
        return Err(Error::Numerical(format!(
            "basis overlap deviates from identity by {dev:.2e}; normalisation or quadrature order wrong"
        )));
    }
    let slater = slater_integrals(omega, exec)?;
    let gaunt = gaunt_table(omega);
    let scale = 2.0 * spec.z;
    let raw = |i: usize, j: usize, k: usize, ip: usize, jp: usize, kp: usize| -> (f64, f64, f64) {
        let mut t = 0.0;
        let mut v = 0.0;
        if k == kp {
            if j == jp {
                t += tk[k][(i, ip)];
                v += vn[(i, ip)];
            }
            if i == ip {
                t += tk[k][(j, jp)];
                v += vn[(j, jp)];
            }
        }
        let (p, q) = (pair_index(i, ip, n), pair_index(j, jp, n));
        let lo = k.abs_diff(kp);
        let mut e = 0.0;
        for l in (lo..=k + kp).step_by(2) {
            e += gaunt[k][kp][l] * slater[l][(p, q)];
        }
        (t, v, scale * e)
    };
    let dim = basis.len();
    let perms = |(i, j, _): (usize, usize, usize)| -> (Vec<(usize, usize)>, f64) {
        if i == j {
            (vec![(i, j)], 1.0)
        } else {
            (vec![(i, j), (j, i)], 1.0 / 2f64.sqrt())
        }
    };
    let rows = exec.map(dim, |a| {
        let ia = basis.index[a];
        let (pa, sa) = perms(ia);
        (0..dim)
            .map(|b| {
                let ib = basis.index[b];
                let (pb, sb) = perms(ib);
                let mut acc = (0.0, 0.0, 0.0);
                for &(i, j) in &pa {
                    for &(ip, jp) in &pb {
                        let (t, v, e) = raw(i, j, ia.2, ip, jp, ib.2);
                        acc.0 += t;
                        acc.1 += v;
                        acc.2 += e;
                    }
                }
                (sa * sb * acc.0, sa * sb * acc.1, sa * sb * acc.2)
            })
            .collect::<Vec<_>>()
    });
    let mut kinetic = DMatrix::zeros(dim, dim);
    let mut nuclear = DMatrix::zeros(dim, dim);
    let mut repulsion = DMatrix::zeros(dim, dim);
    for (a, row) in rows.into_iter().enumerate() {
        for (b, (t, v, e)) in row.into_iter().enumerate() {
            kinetic[(a, b)] = t;
            nuclear[(a, b)] = v;
            repulsion[(a, b)] = e;
        }
    }
    Ok(HeliumMatrices { basis, kinetic, nuclear, repulsion })
}

/// Ground state evaluated from the coefficient tensor; normalised to 2.
#[derive(Debug, Clone)]
pub struct HeliumState {
    z: f64,
    omega: usize,
    coeffs: Vec<f64>,
    tensor: Vec<DMatrix<f64>>,
    prefactor: f64,
}

/// Radial polynomial factors at one radius: value, d/dr and d²/dr² of
/// `ℓ_i(2Zr) e^{-Zr}` with the exponential divided out.
fn radial_factors(z: f64, n: usize, r: f64) -> [Vec<f64>; 3] {
    let x = 2.0 * z * r;
    let s = 2.0 * z;
    let mut l0 = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    laguerre_all(2.0, x, &mut l0);
    for i in 0..n {
        let d1 = if i >= 1 { -laguerre(i - 1, 3.0, x) } else { 0.0 };
        let d2 = if i >= 2 { laguerre(i - 2, 4.0, x) } else { 0.0 };
        let nl = norm_l(i);
        let v = l0[i];
        l0[i] = nl * v;
        l1[i] = nl * s * (d1 - 0.5 * v);
        l2[i] = nl * s * s * (d2 - d1 + 0.25 * v);
    }
    [l0, l1, l2]
}

impl HeliumState {
    pub fn new(z: f64, omega: usize, coeffs: Vec<f64>) -> Result<Self> {
        let basis = Basis::new(omega);
        contract!(
            coeffs.len() == basis.len(),
            "{} coefficients for a basis of {} functions",
            coeffs.len(),
            basis.len()
        );
        let tensor = basis.expand(&coeffs);
        let prefactor = (2.0 * z).powi(3) / (2.0 * PI);
        Ok(Self { z, omega, coeffs, tensor, prefactor })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn t_degree(&self) -> usize {
        self.omega
    }

    pub fn extent(&self) -> f64 {
        (60.0 + 6.0 * self.omega as f64) / (2.0 * self.z)
    }

    pub fn length_scale(&self) -> f64 {
        1.0 / self.z
    }

    fn contract_k(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        let n = self.omega + 1;
        for (k, c) in self.tensor.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..n {
                if a[i] == 0.0 {
                    continue;
                }
                let mut row = 0.0;
                for j in 0..n {
                    row += c[(i, j)] * b[j];
                }
                s += a[i] * row;
            }
            out[k] = s;
        }
    }

    pub fn fill(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [f64]) {
        let n = self.omega + 1;
        let f1 = radial_factors_value(self.z, n, r1);
        let f2 = radial_factors_value(self.z, n, r2);
        let mut a = vec![0.0; n];
        self.contract_k(&f1, &f2, &mut a);
        let e = self.prefactor * (-self.z * (r1 + r2)).exp();
        let mut p = vec![0.0; n];
        for (o, &t) in out.iter_mut().zip(ts) {
            legendre_all(t, &mut p);
            *o = e * (0..n).map(|k| a[k] * norm_p(k) * p[k]).sum::<f64>();
        }
    }

    pub fn fill_derivs(&self, r1: f64, r2: f64, ts: &[f64], out: &mut [StateDerivs]) {
        let n = self.omega + 1;
        let f1 = radial_factors(self.z, n, r1);
        let f2 = radial_factors(self.z, n, r2);
        let mut a00 = vec![0.0; n];
        let mut a10 = vec![0.0; n];
        let mut a01 = vec![0.0; n];
        let mut a20 = vec![0.0; n];
        let mut a02 = vec![0.0; n];
        self.contract_k(&f1[0], &f2[0], &mut a00);
        self.contract_k(&f1[1], &f2[0], &mut a10);
        self.contract_k(&f1[0], &f2[1], &mut a01);
        self.contract_k(&f1[2], &f2[0], &mut a20);
        self.contract_k(&f1[0], &f2[2], &mut a02);
        let lap: Vec<f64> = (0..n)
            .map(|k| {
                let kk = (k * (k + 1)) as f64;
                a20[k] + 2.0 * a10[k] / r1 - kk * a00[k] / (r1 * r1) + a02[k] + 2.0 * a01[k] / r2
                    - kk * a00[k] / (r2 * r2)
            })
            .collect();
        let e = self.prefactor * (-self.z * (r1 + r2)).exp();
        let mut p = vec![0.0; n];
        let mut dp = vec![0.0; n];
        for (o, &t) in out.iter_mut().zip(ts) {
            legendre_all_with_deriv(t, &mut p, &mut dp);
            let mut d = StateDerivs::default();
            for k in 0..n {
                let pk = norm_p(k) * p[k];
                d.value += a00[k] * pk;
                d.d_r1 += a10[k] * pk;
                d.d_r2 += a01[k] * pk;
                d.d_t += a00[k] * norm_p(k) * dp[k];
                d.laplacian += lap[k] * pk;
            }
            d.value *= e;
            d.d_r1 *= e;
            d.d_r2 *= e;
            d.d_t *= e;
            d.laplacian *= e;
            *o = d;
        }
    }

    /// `ρ(r) = (2Z)³/(2π) e^{-2Zr} Σ_jk (Σ_i C_ijk ℓ_i(2Zr))²`.
    pub fn density_at(&self, r: f64) -> f64 {
        let n = self.omega + 1;
        let l = radial_factors_value(self.z, n, r);
        let mut sum = 0.0;
        for c in &self.tensor {
            for j in 0..n {
                let v: f64 = (0..n).map(|i| c[(i, j)] * l[i]).sum();
                sum += v * v;
            }
        }
        self.prefactor * (-2.0 * self.z * r).exp() * sum
    }
}

fn radial_factors_value(z: f64, n: usize, r: f64) -> Vec<f64> {
    let mut l = vec![0.0; n];
    laguerre_all(2.0, 2.0 * z * r, &mut l);
    for (i, v) in l.iter_mut().enumerate() {
        *v *= norm_l(i);
    }
    l
}

#[derive(Debug, Clone)]
pub struct HeliumSolution {
    pub spec: HeliumSpec,
    /// Cutoff actually used (see [`HeliumSpec::effective_omega`]).
    pub omega_used: usize,
    pub coeffs: Vec<f64>,
    pub e_total: f64,
    /// `E(N) - E(N-1)` with `E(N-1) = -Z²/2`.
    pub ionization: f64,
    pub density: RadialField,
    pub state: CorrelatedState,
    pub components: EnergyComponents,
    pub warnings: Vec<String>,
}

impl HeliumSolution {
    pub fn virial_defect(&self) -> f64 {
        let c = &self.components;
        (2.0 * c.t + c.u + c.v).abs() / self.e_total.abs()
    }
}

/// Uniform grid on which the density is tabulated.
pub fn density_grid(spec: &HeliumSpec) -> Result<RadialGrid> {
    let x_max = spec.x_extent();
    let n = (x_max / DENSITY_DX).round() as usize + 1;
    RadialGrid::uniform(x_max / (2.0 * spec.z), n + (n + 1) % 2)
}

pub fn solve(spec: &HeliumSpec, exec: Execution) -> Result<HeliumSolution> {
    let m = build_hamiltonian(spec, exec)?;
    let h = m.hamiltonian(spec.lambda);
    let eig = eig_sym_dense(&h)?;
    let vectors = eig.vectors.ok_or_else(|| Error::Numerical("dense eigensolver returned no vectors".into()))?;
    let mut c = vectors[0].clone();
    if c[0] < 0.0 {
        for v in &mut c {
            *v = -*v;
        }
    }
    from_coefficients(*spec, c, exec, Some(&m))
}

/// Assemble a solution from basis coefficients (e.g. reloaded from disk).
pub fn from_coefficients(
    spec: HeliumSpec,
    coeffs: Vec<f64>,
    exec: Execution,
    matrices: Option<&HeliumMatrices>,
) -> Result<HeliumSolution> {
    spec.validate()?;
    let owned;
    let m = match matrices {
        Some(m) => m,
        None => {
            owned = build_hamiltonian(&spec, exec)?;
            &owned
        }
    };
    let cv = nalgebra::DVector::from_column_slice(&coeffs);
    let quad = |a: &DMatrix<f64>| cv.dot(&(a * &cv));
    let norm = cv.dot(&cv);
    contract!((norm - 1.0).abs() < 1e-9, "coefficient vector must be unit norm (got {norm})");
    let components = EnergyComponents { t: quad(&m.kinetic), u: spec.lambda * quad(&m.repulsion), v: quad(&m.nuclear) };
    let e_total = components.total();
    let omega_used = spec.effective_omega();
    let state = HeliumState::new(spec.z, omega_used, coeffs.clone())?;
    let mut warnings = Vec::new();
    let c000 = coeffs[0].abs();
    if coeffs.iter().any(|c| c.abs() > c000) {
        let msg = format!("Z = {}: c_000 is not the dominant coefficient", spec.z);
        warn!("{msg}");
        warnings.push(msg);
    }
    if spec.z <= 1.0 && e_total > -0.5 * spec.z * spec.z {
        let msg = format!("Z = {}: e_total = {e_total} lies above the one-electron threshold", spec.z);
        warn!("{msg}");
        warnings.push(msg);
    }
    let grid = Arc::new(density_grid(&spec)?);
    let density = density_on(&state, grid, exec)?;
    Ok(HeliumSolution {
        spec,
        omega_used,
        coeffs,
        e_total,
        ionization: e_total + 0.5 * spec.z * spec.z,
        density,
        state: CorrelatedState::Helium(state),
        components,
        warnings,
    })
}

fn density_on(state: &HeliumState, grid: Arc<RadialGrid>, exec: Execution) -> Result<RadialField> {
    contract!(grid.spacing().is_some(), "density grid must be uniform");
    let values = exec.map_slice(grid.nodes(), |&r| state.density_at(r));
    let field = RadialField::new(grid, values)?;
    let miss = (field.radial_integral() - 2.0).abs();
    if miss > crate::hooke::DENSITY_NORM_TOL {
        return Err(Error::Numerical(format!("helium density integrates to 2 ± {miss:.2e}; grid too coarse")));
    }
    Ok(field)
}

/// `ρ(r)` on a caller-supplied uniform grid.
pub fn compute_density(solution: &HeliumSolution, r_grid: Arc<RadialGrid>, exec: Execution) -> Result<RadialField> {
    match &solution.state {
        CorrelatedState::Helium(s) => density_on(s, r_grid, exec),
        _ => Err(Error::Contract("helium solution carries a foreign state".into())),
    }
}
