//! CSV and SVG output for the three figures.

use std::fmt::Write;

use crate::error::{contract, Result};
use crate::metrics::DistanceReport;
use crate::system::Family;

use super::scan::FamilyScan;
use super::svg::{self, Panel, Series};

/// Slack allowed by the monotonicity check.
pub const MONOTONE_SLACK: f64 = 1e-6;

/// A rendered figure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Figure {
    pub csv: String,
    pub svg: String,
}

/// Fixed 17-significant-digit format.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut String, figure: &str, scan: &FamilyScan) {
    let _ = writeln!(out, "# figure: {figure}");
    let _ = writeln!(out, "# family: {}", scan.family.name());
    let _ = writeln!(out, "# reference: {}", num(scan.reference));
    let _ = writeln!(out, "# gauge: {}", scan.gauge.describe());
    let _ = writeln!(out, "# quadrature: {}", scan.quadrature);
    let _ = writeln!(out, "# spacing: {}", scan.spacing);
    for r in scan.rows.iter().filter(|r| r.failed.is_some()) {
        let _ = writeln!(out, "# failed: {} {}", num(r.param), r.failed.as_deref().unwrap_or(""));
    }
}

fn param_name(f: Family) -> &'static str {
    match f {
        Family::Hooke => "omega",
        Family::Helium => "Z",
    }
}

fn four(d: &DistanceReport) -> [f64; 4] {
    [d.rescaled_d_psi, d.rescaled_d_rho, d.rescaled_d_v1, d.rescaled_d_v2]
}

fn check_scan(scan: &FamilyScan) -> Result<()> {
    contract!(scan.ok_rows().next().is_some(), "scan has no successful rows");
    Ok(())
}

/// Distances to the reference state, many-body and Kohn-Sham panels.
pub fn emit_fig1(scan: &FamilyScan) -> Result<Figure> {
    check_scan(scan)?;
    let mut csv = String::new();
    header(&mut csv, "fig1", scan);
    csv.push_str("param,mb_d_psi,mb_d_rho,mb_d_v1,mb_d_v2,ks_d_psi,ks_d_rho,ks_d_v1,ks_d_v2\n");
    let names = ["D_psi", "D_rho", "D_v1", "D_v2"];
    let mut mb: Vec<Series> =
        names.iter().map(|n| Series { label: n.to_string(), points: vec![], markers: false }).collect();
    let mut ks = mb.clone();
    for (p, d) in scan.ok_rows() {
        let (a, b) = (four(&d.mb_vs_ref), four(&d.ks_vs_ref));
        let cells: Vec<String> = std::iter::once(p).chain(a).chain(b).map(num).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
        for k in 0..4 {
            mb[k].points.push((p, a[k]));
            ks[k].points.push((p, b[k]));
        }
    }
    let x = param_name(scan.family);
    let panel = |title: &str, series: Vec<Series>| Panel {
        title: format!("{title}, reference {x} = {}", scan.reference),
        x_label: x.into(),
        y_label: "rescaled distance".into(),
        log_x: true,
        x_range: None,
        y_range: Some((0.0, 2.0)),
        series,
    };
    let svg = svg::render(&[panel("many-body", mb), panel("Kohn-Sham", ks)]);
    Ok(Figure { csv, svg })
}

/// One monotone branch of a Fig. 2 scatter.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Family {
    pub system: Family,
    pub flavour: &'static str,
    pub direction: &'static str,
    /// `(param, D_ψ, D_v1, D_ρ, D_v2)`, rescaled, ordered away from the reference.
    pub points: Vec<(f64, f64, f64, f64, f64)>,
    pub monotone: bool,
    pub spearman_psi_v1: f64,
    pub spearman_rho_v2: f64,
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; NaN for fewer than two points.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 || x.len() != y.len() {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

fn non_decreasing(v: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for x in v {
        if x < prev - MONOTONE_SLACK {
            return false;
        }
        prev = prev.max(x);
    }
    true
}

/// Split each scan into its increasing and decreasing branches, MB and KS.
pub fn fig2_families(scans: &[FamilyScan]) -> Vec<Fig2Family> {
    let mut out = Vec::new();
    for scan in scans {
        for flavour in ["MB", "KS"] {
            for direction in ["increasing", "decreasing"] {
                let mut pts: Vec<(f64, f64, f64, f64, f64)> = scan
                    .ok_rows()
                    .filter(|(p, _)| match direction {
                        "increasing" => *p >= scan.reference,
                        _ => *p <= scan.reference,
                    })
                    .map(|(p, d)| {
                        let r = if flavour == "MB" { &d.mb_vs_ref } else { &d.ks_vs_ref };
                        (p, r.rescaled_d_psi, r.rescaled_d_v1, r.rescaled_d_rho, r.rescaled_d_v2)
                    })
                    .collect();
                if direction == "decreasing" {
                    pts.reverse();
                }
                let monotone = (1..5).all(|k| non_decreasing(pts.iter().map(|t| [t.0, t.1, t.2, t.3, t.4][k])));
                let col = |f: fn(&(f64, f64, f64, f64, f64)) -> f64| pts.iter().map(f).collect::<Vec<f64>>();
                out.push(Fig2Family {
                    system: scan.family,
                    flavour,
                    direction,
                    spearman_psi_v1: spearman(&col(|t| t.1), &col(|t| t.2)),
                    spearman_rho_v2: spearman(&col(|t| t.3), &col(|t| t.4)),
                    points: pts,
                    monotone,
                });
            }
        }
    }
    out
}

/// Potential distances against wavefunction and density distances.
pub fn emit_fig2(scans: &[FamilyScan]) -> Result<Figure> {
    contract!(!scans.is_empty(), "fig2 needs at least one scan");
    for s in scans {
        check_scan(s)?;
    }
    let fams = fig2_families(scans);
    let mut csv = String::new();
    let _ = writeln!(csv, "# figure: fig2");
    for s in scans {
        let _ = writeln!(
            csv,
            "# scan: {} reference {} gauge {} quadrature {}",
            s.family.name(),
            num(s.reference),
            s.gauge.describe(),
            s.quadrature
        );
    }
    for f in &fams {
        let _ = writeln!(
            csv,
            "# family: {} {} {} points {} monotone {} spearman_psi_v1 {} spearman_rho_v2 {}",
            f.system.name(),
            f.flavour,
            f.direction,
            f.points.len(),
            f.monotone,
            num(f.spearman_psi_v1),
            num(f.spearman_rho_v2)
        );
    }
    csv.push_str("system,flavour,direction,param,d_psi,d_v1,d_rho,d_v2,monotone\n");
    let mut left = Vec::new();
    let mut right = Vec::new();
    for f in &fams {
        for p in &f.points {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                f.system.name(),
                f.flavour,
                f.direction,
                num(p.0),
                num(p.1),
                num(p.2),
                num(p.3),
                num(p.4),
                u8::from(f.monotone)
            );
        }
        let label = format!("{} {} {}", f.system.name(), f.flavour, f.direction);
        left.push(Series {
            label: label.clone(),
            points: f.points.iter().map(|p| (p.1, p.2)).collect(),
            markers: true,
        });
        right.push(Series { label, points: f.points.iter().map(|p| (p.3, p.4)).collect(), markers: true });
    }
    let panel = |x: &str, y: &str, series| Panel {
        title: format!("{y} against {x}"),
        x_label: format!("rescaled {x}"),
        y_label: format!("rescaled {y}"),
        log_x: false,
        x_range: Some((0.0, 2.0)),
        y_range: Some((0.0, 2.0)),
        series,
    };
    let svg = svg::render(&[panel("D_psi", "D_v1", left), panel("D_rho", "D_v2", right)]);
    Ok(Figure { csv, svg })
}

/// Many-body against Kohn-Sham distances and the `|U/V|` ratio.
pub fn emit_fig3(scan: &FamilyScan) -> Result<Figure> {
    check_scan(scan)?;
    let mut csv = String::new();
    header(&mut csv, "fig3", scan);
    csv.push_str("param,d_psi_mb_ks,d_v1_ext_ks,u_over_v\n");
    let mut series: Vec<Series> = ["D_psi(MB, KS)", "D_v1(ext, KS)", "|U/V|"]
        .iter()
        .map(|n| Series { label: n.to_string(), points: vec![], markers: false })
        .collect();
    for (p, d) in scan.ok_rows() {
        let v = [d.mb_vs_ks.rescaled_d_psi, d.mb_vs_ks.rescaled_d_v1, d.energy_ratio];
        let _ = writeln!(csv, "{},{},{},{}", num(p), num(v[0]), num(v[1]), num(v[2]));
        for k in 0..3 {
            series[k].points.push((p, v[k]));
        }
    }
    let x = param_name(scan.family);
    let svg = svg::render(&[Panel {
        title: format!("{}: many-body against Kohn-Sham", scan.family.name()),
        x_label: x.into(),
        y_label: "rescaled distance, ratio".into(),
        log_x: true,
        x_range: None,
        y_range: None,
        series,
    }]);
    Ok(Figure { csv, svg })
}
