//! Finite-difference second derivative on uniform grids.

use super::grid::{GridKind, RadialField};
use crate::error::{Error, Result};

/// Five-point second derivative of a field on a uniform grid.
///
/// Central stencil in the interior; five-point one-sided stencils on the
/// outermost node and seven-point ones on the next node at each end.
pub fn second_derivative(field: &RadialField) -> Result<RadialField> {
    let grid = field.grid();
    if grid.kind() != GridKind::Uniform {
        return Err(Error::Contract("second_derivative needs a uniform grid".into()));
    }
    if grid.len() < 7 {
        return Err(Error::Contract(format!("second_derivative needs >= 7 nodes, got {}", grid.len())));
    }
    let h = grid.spacing().expect("uniform grid");
    RadialField::new(grid.clone(), second_derivative_values(field.values(), h))
}

pub(crate) fn second_derivative_values(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let s = 1.0 / (12.0 * h * h);
    let mut d = vec![0.0; n];
    let t = 1.0 / (180.0 * h * h);
    let near = |a: f64, b: f64, c: f64, e: f64, g: f64, k: f64, l: f64| {
        t * (137.0 * a - 147.0 * b - 255.0 * c + 470.0 * e - 285.0 * g + 93.0 * k - 13.0 * l)
    };
    for i in 2..n - 2 {
        d[i] = s * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    }
    d[0] = s * (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]);
    d[1] = near(f[0], f[1], f[2], f[3], f[4], f[5], f[6]);
    let m = n - 1;
    d[m] = s * (35.0 * f[m] - 104.0 * f[m - 1] + 114.0 * f[m - 2] - 56.0 * f[m - 3] + 11.0 * f[m - 4]);
    d[m - 1] = near(f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4], f[m - 5], f[m - 6]);
    d
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::numerics::grid::RadialGrid;

    fn field(n: usize, r_max: f64, f: impl Fn(f64) -> f64) -> RadialField {
        RadialField::from_fn(Arc::new(RadialGrid::uniform(r_max, n).unwrap()), f).unwrap()
    }

    #[test]
    fn polynomial_and_constant() {
        let d = second_derivative(&field(50, 4.0, |r| r * r)).unwrap();
        assert!(d.values().iter().all(|v| (v - 2.0).abs() < 1e-8));
        let d = second_derivative(&field(50, 4.0, |_| 3.7)).unwrap();
        assert!(d.values().iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn sine_at_h_1e_2() {
        let n = 501; // h = 1e-2 on [0, 5]
        let d = second_derivative(&field(n, 5.0, f64::sin)).unwrap();
        for (r, v) in d.grid().nodes().iter().zip(d.values()) {
            assert!((v + r.sin()).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn interior_is_fourth_order() {
        let err = |n: usize| {
            let d = second_derivative(&field(n, 2.0, |r| (1.3 * r).exp())).unwrap();
            let nodes = d.grid().nodes();
            (2..n - 2).map(|i| (d.values()[i] - 1.69 * (1.3 * nodes[i]).exp()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    /// Cumulative integral with four-point interval rules (O(h^4)).
    fn cumulative(f: &[f64], h: f64) -> Vec<f64> {
        let n = f.len();
        let mut out = vec![0.0; n];
        for i in 0..n - 1 {
            let piece = if i == 0 {
                h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
            } else if i == n - 2 {
                h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
            } else {
                h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
            };
            out[i + 1] = out[i] + piece;
        }
        out
    }

    #[test]
    fn double_integration_recovers_input() {
        let err = |n: usize| {
            let f = field(n, 4.0, |r| (-r).exp() * (2.0 * r).sin());
            let d = second_derivative(&f).unwrap();
            let h = 4.0 / (n - 1) as f64;
            let g = cumulative(&cumulative(d.values(), h), h);
            let fv = f.values();
            let a = fv[0] - g[0];
            let b = ((fv[n - 1] - g[n - 1]) - a) / 4.0;
            (0..n).map(|i| (g[i] + a + b * i as f64 * h - fv[i]).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(201), err(401));
        assert!(e2 < 1e-7, "{e2}");
        // boundary stencils are third order; the recovered profile must converge at least that fast
        assert!(e1 / e2 > 7.5, "{e1} {e2}");
    }

    #[test]
    fn rejects_nonuniform() {
        let g = Arc::new(RadialGrid::gl_panels(&[0.0, 1.0], 8).unwrap());
        let f = RadialField::from_fn(g, |r| r).unwrap();
        assert!(matches!(second_derivative(&f), Err(Error::Contract(_))));
    }
}
