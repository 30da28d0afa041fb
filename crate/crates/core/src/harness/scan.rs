//! Family scans: solve every member, invert it, and measure distances to the
//! reference and between the many-body and Kohn-Sham descriptions.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::exec::Execution;
use crate::helium::{self, HeliumSpec};
use crate::hooke::{self, EnergyComponents, HookeSpec};
use crate::ksinv::{self, KsSystem};
use crate::metrics::{self, DistanceReport, GaugeContext, Weighted};
use crate::state::{CorrelatedState, PairGrid};
use crate::system::{Family, SystemRecord, SystemSpec};

/// Supported parameter window per family; values outside are clipped.
pub fn window(family: Family) -> (f64, f64) {
    match family {
        Family::Hooke => (1e-4, 1000.0),
        Family::Helium => (1.0, 2000.0),
    }
}

/// Desk-scale range and reference.
pub fn desk_range(family: Family) -> (f64, f64, f64) {
    match family {
        Family::Hooke => (0.05, 10.0, 0.5),
        Family::Helium => (1.0, 200.0, 50.0),
    }
}

pub const POINTS_PER_SIDE: usize = 12;
pub const DEFAULT_OMEGA_BASIS: usize = 12;
/// Largest tolerated fraction of failed members.
pub const MAX_FAILURE_FRACTION: f64 = 0.2;
/// Round-trip tolerances on the KS eigenvalue and orbital overlap.
pub const ROUND_TRIP_EPS_TOL: f64 = 1e-4;
pub const ROUND_TRIP_OVERLAP_TOL: f64 = 1e-6;

/// `n` log-spaced points per side of `reference`, with the reference itself.
pub fn log_spaced(lo: f64, hi: f64, reference: f64, n: usize) -> Vec<f64> {
    let side = |a: f64, b: f64| -> Vec<f64> {
        (0..n).map(|i| if i == 0 { a } else { (a.ln() + (b.ln() - a.ln()) * i as f64 / n as f64).exp() }).collect()
    };
    let mut p = side(lo, reference);
    p.push(reference);
    let mut up = side(hi, reference);
    up.reverse();
    p.extend(up);
    p
}

/// Default parameter list: desk range, or the whole window with `full`.
pub fn default_params(family: Family, full: bool) -> (Vec<f64>, f64) {
    let (lo, hi, reference) = desk_range(family);
    let (lo, hi) = if full { window(family) } else { (lo, hi) };
    (log_spaced(lo, hi, reference, POINTS_PER_SIDE), reference)
}

fn clip(family: Family, p: f64, warnings: &mut Vec<String>) -> f64 {
    let (lo, hi) = window(family);
    let c = p.clamp(lo, hi);
    if c != p {
        let msg = format!("{} parameter {p} clipped to {c}", family.name());
        warn!("{msg}");
        warnings.push(msg);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub lambda: f64,
    pub omega_basis: usize,
    pub grid_n: usize,
    /// Extra parameter whose energy joins the gauge set.
    pub gauge_anchor: Option<f64>,
    #[serde(skip)]
    pub exec: Execution,
}

impl ScanOptions {
    /// Helium anchors its gauge at the top of the supported window, so every
    /// member of a desk-scale scan keeps a positive shifted energy.
    pub fn for_family(family: Family) -> Self {
        Self {
            lambda: 1.0,
            omega_basis: DEFAULT_OMEGA_BASIS,
            grid_n: hooke::DEFAULT_GRID_N,
            gauge_anchor: match family {
                Family::Hooke => None,
                Family::Helium => Some(window(family).1),
            },
            exec: Execution::Parallel,
        }
    }

    pub fn spec(&self, family: Family, p: f64) -> Result<SystemSpec> {
        Ok(match family {
            Family::Hooke => SystemSpec::Hooke(HookeSpec::new(p, self.lambda)?),
            Family::Helium => SystemSpec::Helium(HeliumSpec::new(p, self.omega_basis, self.lambda)?),
        })
    }

    fn solve(&self, spec: &SystemSpec) -> Result<SystemRecord> {
        match spec {
            SystemSpec::Hooke(h) => {
                Ok(SystemRecord::from_hooke(&hooke::assemble_solution(h, self.grid_n, Execution::Serial)?))
            }
            SystemSpec::Helium(h) => Ok(SystemRecord::from_helium(&helium::solve(h, Execution::Serial)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTripCheck {
    pub eps_ks: f64,
    pub eps: f64,
    pub overlap: f64,
    pub passed: bool,
}

/// Per-parameter results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowData {
    pub e_total: f64,
    pub e_ks: f64,
    pub components: EnergyComponents,
    pub energy_ratio: f64,
    pub round_trip: RoundTripCheck,
    pub mb_vs_ref: DistanceReport,
    pub ks_vs_ref: DistanceReport,
    pub mb_vs_ks: DistanceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<RowData>,
}

/// Solved member kept in memory alongside the rows.
#[derive(Debug, Clone)]
pub struct Member {
    pub mb: SystemRecord,
    pub ks: KsSystem,
    pub ks_record: SystemRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyScan {
    pub family: Family,
    pub reference: f64,
    pub params: Vec<f64>,
    pub spacing: String,
    pub options: ScanOptions,
    pub gauge: GaugeContext,
    pub quadrature: String,
    pub warnings: Vec<String>,
    pub rows: Vec<ScanRow>,
    #[serde(skip)]
    pub members: Vec<Option<Member>>,
}

impl FamilyScan {
    pub fn reference_row(&self) -> Option<&RowData> {
        self.rows.iter().find(|r| r.param == self.reference).and_then(|r| r.data.as_ref())
    }

    /// Successful rows in parameter order.
    pub fn ok_rows(&self) -> impl Iterator<Item = (f64, &RowData)> {
        self.rows.iter().filter_map(|r| r.data.as_ref().map(|d| (r.param, d)))
    }

    pub fn failed_count(&self) -> usize {
        self.rows.iter().filter(|r| r.failed.is_some()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Schema(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })
    }
}

fn solve_member(opts: &ScanOptions, spec: &SystemSpec) -> Result<(Member, RoundTripCheck)> {
    let mb = opts.solve(spec)?;
    let (ks, ks_record) = mb.invert()?;
    let rt = ksinv::round_trip(&ks)?;
    let passed = (rt.eps - ks.eps_ks).abs() <= ROUND_TRIP_EPS_TOL && rt.overlap >= 1.0 - ROUND_TRIP_OVERLAP_TOL;
    let check = RoundTripCheck { eps_ks: ks.eps_ks, eps: rt.eps, overlap: rt.overlap, passed };
    Ok((Member { mb, ks, ks_record }, check))
}

/// Scan over the default log-spaced parameters.
pub fn scan_default(family: Family, full: bool, opts: &ScanOptions) -> Result<FamilyScan> {
    let (params, reference) = default_params(family, full);
    let mut scan = scan_family(family, &params, reference, opts)?;
    let (lo, hi) = if full { window(family) } else { (desk_range(family).0, desk_range(family).1) };
    scan.spacing = format!("log, {POINTS_PER_SIDE} per side of the reference on [{lo}, {hi}]");
    Ok(scan)
}

/// Solve, invert and compare every member of a family scan.
pub fn scan_family(family: Family, params: &[f64], reference: f64, opts: &ScanOptions) -> Result<FamilyScan> {
    contract!(!params.is_empty(), "scan needs at least one parameter");
    contract!(params.iter().all(|p| p.is_finite()) && reference.is_finite(), "scan parameters must be finite");
    let mut warnings = Vec::new();
    let reference = clip(family, reference, &mut warnings);
    let mut ps: Vec<f64> = params.iter().map(|&p| clip(family, p, &mut warnings)).collect();
    ps.push(reference);
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let ref_idx = ps.iter().position(|&p| p == reference).expect("reference inserted");

    let specs: Vec<Result<SystemSpec>> = ps.iter().map(|&p| opts.spec(family, p)).collect();
    let solved = opts.exec.map(ps.len(), |i| match &specs[i] {
        Ok(s) => solve_member(opts, s),
        Err(e) => Err(Error::Contract(e.to_string())),
    });

    let mut failures: Vec<Option<String>> = solved.iter().map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
    let n_failed = failures.iter().filter(|f| f.is_some()).count();
    if n_failed as f64 > MAX_FAILURE_FRACTION * ps.len() as f64 {
        return Err(Error::Numerical(format!("{n_failed} of {} scan members failed", ps.len())));
    }
    if let Some(msg) = &failures[ref_idx] {
        return Err(Error::Numerical(format!("reference {reference} failed: {msg}")));
    }
    for (p, f) in ps.iter().zip(&failures) {
        if let Some(msg) = f {
            let w = format!("member {p} failed: {msg}");
            warn!("{w}");
            warnings.push(w);
        }
    }
    let (members, checks): (Vec<Option<Member>>, Vec<Option<RoundTripCheck>>) =
        solved.into_iter().map(|r| r.ok().map(|(m, c)| (Some(m), Some(c))).unwrap_or((None, None))).unzip();
    for (p, c) in ps.iter().zip(&checks) {
        if let Some(c) = c.filter(|c| !c.passed) {
            warnings.push(format!("member {p}: KS round trip eps {} vs {}, overlap {}", c.eps, c.eps_ks, c.overlap));
        }
    }

    let mut energies: Vec<f64> = members.iter().flatten().flat_map(|m| [m.mb.e_total, m.ks_record.e_total]).collect();
    if let Some(a) = opts.gauge_anchor {
        let a = clip(family, a, &mut warnings);
        energies.push(opts.solve(&opts.spec(family, a)?)?.e_total);
    }
    let gauge = metrics::gauge_constant_eigen(&energies)?;

    let ok: Vec<usize> = (0..ps.len()).filter(|&i| members[i].is_some()).collect();
    let states: Vec<&CorrelatedState> = ok
        .iter()
        .flat_map(|&i| {
            let m = members[i].as_ref().unwrap();
            [&m.mb.state, &m.ks_record.state]
        })
        .collect();
    let grid = PairGrid::covering(states.iter().copied())?;
    let weighted: Vec<Weighted> = ok
        .iter()
        .flat_map(|&i| {
            let m = members[i].as_ref().unwrap();
            [
                Weighted { state: &m.mb.state, e_shifted: m.mb.e_total + gauge.c },
                Weighted { state: &m.ks_record.state, e_shifted: m.ks_record.e_total + gauge.c },
            ]
        })
        .collect();
    let slot = |i: usize| ok.iter().position(|&k| k == i).unwrap();
    let r = slot(ref_idx);
    let mut pairs = Vec::with_capacity(3 * ok.len());
    for s in 0..ok.len() {
        pairs.push((2 * s, 2 * r));
        pairs.push((2 * s + 1, 2 * r + 1));
        pairs.push((2 * s, 2 * s + 1));
    }
    let (sums, norms) = metrics::pair_sums(&weighted, &pairs, &grid, opts.exec)?;
    for (k, n) in norms.iter().enumerate() {
        if (n - 2.0).abs() > metrics::NORM_TOL {
            let i = ok[k / 2];
            if i == ref_idx {
                return Err(Error::Numerical(format!("reference state norm {n} on the pair grid")));
            }
            failures[i].get_or_insert_with(|| format!("state norm {n} on the pair grid"));
        }
    }

    let ref_m = members[ref_idx].as_ref().unwrap();
    let mut rows = Vec::with_capacity(ps.len());
    for (i, &p) in ps.iter().enumerate() {
        if let Some(msg) = &failures[i] {
            rows.push(ScanRow { param: p, failed: Some(msg.clone()), data: None });
            continue;
        }
        let m = members[i].as_ref().unwrap();
        let s = slot(i);
        let row = (|| -> Result<RowData> {
            Ok(RowData {
                e_total: m.mb.e_total,
                e_ks: m.ks_record.e_total,
                components: m.mb.components,
                energy_ratio: metrics::energy_ratio(&m.mb)?,
                round_trip: checks[i].unwrap(),
                mb_vs_ref: metrics::report_from_sums(&m.mb, &ref_m.mb, &sums[3 * s], &gauge, &grid.radial)?,
                ks_vs_ref: metrics::report_from_sums(
                    &m.ks_record,
                    &ref_m.ks_record,
                    &sums[3 * s + 1],
                    &gauge,
                    &grid.radial,
                )?,
                mb_vs_ks: metrics::report_from_sums(&m.mb, &m.ks_record, &sums[3 * s + 2], &gauge, &grid.radial)?,
            })
        })();
        match row {
            Ok(d) => rows.push(ScanRow { param: p, failed: None, data: Some(d) }),
            Err(e) => rows.push(ScanRow { param: p, failed: Some(e.to_string()), data: None }),
        }
    }
    let n_failed = rows.iter().filter(|r| r.failed.is_some()).count();
    if n_failed as f64 > MAX_FAILURE_FRACTION * ps.len() as f64 {
        return Err(Error::Numerical(format!("{n_failed} of {} scan members failed", ps.len())));
    }
    Ok(FamilyScan {
        family,
        reference,
        params: ps,
        spacing: "explicit list".into(),
        options: *opts,
        gauge,
        quadrature: grid.describe(),
        warnings,
        rows,
        members,
    })
}
