use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use twoel::numerics::*;

#[test]
fn gauss_legendre_exact_to_degree_2n_minus_1() {
    let rule = gauss_legendre_rule(6);
    assert!((rule.integrate(|x| x.powi(10)) - 2.0 / 11.0).abs() < 1e-14);
    assert!((rule.integrate(|x| x.powi(11) + 3.0 * x.powi(4))).abs() - 6.0 / 5.0 < 1e-14);
    let w: f64 = rule.weights.iter().sum();
    assert!((w - 2.0).abs() < 1e-14);
}

#[test]
fn gauss_laguerre_moments_are_factorials() {
    for alpha in 0..=2u32 {
        let rule = gauss_rule(WeightKind::Laguerre { alpha }, 20).unwrap();
        for k in 0..20 {
            let exact: f64 = (1..=(k + alpha as i32)).map(f64::from).product();
            let got = rule.integrate(|x| x.powi(k));
            assert!((got / exact - 1.0).abs() < 1e-11, "alpha {alpha} k {k}: {got} vs {exact}");
        }
    }
    assert!(gauss_rule(WeightKind::Legendre, 0).is_err());
}

#[test]
fn polynomial_values() {
    for &x in &[0.0, 0.3, 1.7, 5.0] {
        let l2 = 0.5 * (x * x - 4.0 * x + 2.0);
        assert!((laguerre_gen(2, 0.0, x).unwrap() - l2).abs() < 1e-13);
        let l1a2 = 3.0 - x;
        assert!((laguerre_gen(1, 2.0, x).unwrap() - l1a2).abs() < 1e-13);
    }
    for &t in &[-1.0, -0.4, 0.2, 1.0] {
        assert!((legendre(3, t).unwrap() - 0.5 * (5.0 * t * t * t - 3.0 * t)).abs() < 1e-14);
        assert!((legendre_deriv(3, t).unwrap() - 0.5 * (15.0 * t * t - 3.0)).abs() < 1e-13);
    }
}

#[test]
fn tridiagonal_laplacian_spectrum() {
    let n = 40;
    let e = eig_sym_tridiag(&vec![2.0; n], &vec![-1.0; n - 1], false).unwrap();
    for (k, v) in e.values.iter().enumerate() {
        let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
        assert!((v - exact).abs() < 1e-12, "k {k}");
    }
    let (low, vec) = lowest_tridiag(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
    assert!((low - e.values[0]).abs() < 1e-13);
    let norm: f64 = vec.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!(vec.iter().all(|&x| x > 0.0));
}

#[test]
fn dense_matches_tridiagonal() {
    let n = 12;
    let diag: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.5).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| 0.3 - 0.05 * i as f64).collect();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let a = eig_sym_dense(&m).unwrap();
    let b = eig_sym_tridiag(&diag, &off, false).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn radial_integrals_and_splines() {
    let g = Arc::new(RadialGrid::uniform(60.0, 6001).unwrap());
    let f = RadialField::from_fn(g.clone(), |r| (-r).exp()).unwrap();
    assert!((f.radial_integral() - 8.0 * PI).abs() < 1e-8);
    let p = RadialGrid::geometric_panels(1e-3, 60.0, 1.5, 12).unwrap();
    let vals: Vec<f64> = p.nodes().iter().map(|r| (-r).exp()).collect();
    assert!((p.radial_integral(&vals) - 8.0 * PI).abs() < 1e-9);

    let x: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let y: Vec<f64> = x.iter().map(|x| x.sin()).collect();
    let s = CubicSpline::new(&x, &y);
    for &t in &[0.123, 3.3, 7.77] {
        assert!((s.eval(t).unwrap() - t.sin()).abs() < 1e-6);
    }
    assert!(s.eval(20.0).is_none());
    assert_eq!(s.eval_or_zero(20.0), 0.0);
}

#[test]
fn second_derivative_near_ends() {
    let g = Arc::new(RadialGrid::uniform(2.0, 201).unwrap());
    let f = RadialField::from_fn(g, |r| r * (-1.5 * r).exp()).unwrap();
    let d = second_derivative(&f).unwrap();
    let exact = |r: f64| (-3.0 + 2.25 * r) * (-1.5 * r).exp();
    for (i, (&r, &v)) in d.grid().nodes().iter().zip(d.values()).enumerate() {
        let tol = if i == 0 || i == 200 { 1e-4 } else { 1e-7 };
        assert!((v - exact(r)).abs() < tol, "node {i}: {v} vs {}", exact(r));
    }
}
