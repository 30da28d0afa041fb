//! Symmetric eigensolvers: implicit QL for tridiagonal matrices, Sturm
//! bisection with inverse iteration for the lowest eigenpair of large
//! tridiagonal problems, and a dense solver backed by nalgebra.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector of `values[k]`.
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Flip `v` so that its first component of non-negligible size is positive.
pub fn fix_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale).copied() {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// All eigenvalues (and optionally eigenvectors) of the symmetric
/// tridiagonal matrix with diagonal `diag` and off-diagonal `offdiag`.
pub fn eig_sym_tridiag(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> Result<SymEigen> {
    let n = diag.len();
    if n < 2 {
        return Err(Error::Contract(format!("tridiagonal dimension must be >= 2, got {n}")));
    }
    if offdiag.len() != n - 1 {
        return Err(Error::Contract(format!("off-diagonal length {} does not match dimension {n}", offdiag.len())));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = if want_vectors {
        let mut m = vec![0.0; n * n];
        (0..n).for_each(|i| m[i * n + i] = 1.0);
        Some(m)
    } else {
        None
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::Numerical(format!("tridiagonal QL did not converge for eigenvalue {l} of {n}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    for k in 0..n {
                        let zf = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * zf;
                        z[k * n + i] = c * z[k * n + i] - s * zf;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = z.map(|z| {
        order
            .iter()
            .map(|&k| {
                let mut v: Vec<f64> = (0..n).map(|i| z[i * n + k]).collect();
                fix_sign(&mut v);
                v
            })
            .collect()
    });
    Ok(SymEigen { values, vectors })
}

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 { f64::EPSILON * (off[i - 1].abs() + 1.0) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest eigenpair of a (possibly large) symmetric tridiagonal matrix.
///
/// The eigenvalue comes from Sturm bisection to machine precision; the
/// eigenvector from inverse iteration with a shift just below it, where the
/// shifted matrix is positive definite and the Thomas sweep is stable.
/// The vector has unit Euclidean norm and positive leading sign.
pub fn lowest_tridiag(diag: &[f64], off: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = diag.len();
    if n < 2 || off.len() != n - 1 {
        return Err(Error::Contract("lowest_tridiag needs n >= 2 and n-1 off-diagonals".into()));
    }
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(1e-300);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let gap = (hi - lo).max(64.0 * f64::EPSILON * scale);
    let shift = lambda - gap;

    let mut v = vec![1.0; n];
    let mut cp = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for _ in 0..4 {
        // Thomas algorithm on (T - shift I) x = v
        let mut denom = diag[0] - shift;
        cp[0] = if n > 1 { off[0] / denom } else { 0.0 };
        rhs[0] = v[0] / denom;
        for i in 1..n {
            denom = diag[i] - shift - off[i - 1] * cp[i - 1];
            if denom == 0.0 {
                return Err(Error::Numerical("inverse iteration hit a zero pivot".into()));
            }
            cp[i] = if i + 1 < n { off[i] / denom } else { 0.0 };
            rhs[i] = (v[i] - off[i - 1] * rhs[i - 1]) / denom;
        }
        v[n - 1] = rhs[n - 1];
        for i in (0..n - 1).rev() {
            v[i] = rhs[i] - cp[i] * v[i + 1];
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numerical("inverse iteration diverged".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    fix_sign(&mut v);
    Ok((lambda, v))
}

/// Eigen-decomposition of a dense symmetric matrix.
///
/// The input must be symmetric to 1e-10 relative; it is symmetrised before
/// solving.
pub fn eig_sym_dense(matrix: &DMatrix<f64>) -> Result<SymEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::Contract(format!("matrix is {}x{}, not square", n, matrix.ncols())));
    }
    let scale = matrix.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::Contract(format!("matrix not symmetric: max asymmetry {asym:e} (scale {scale:e})")));
    }
    let sym = (matrix + matrix.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("dense symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(SymEigen { values, vectors: Some(vectors) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_exchange() {
        let e = eig_sym_tridiag(&[1.0, 1.0, 1.0], &[0.0, 0.0], true).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let e = eig_sym_tridiag(&[0.0, 0.0], &[1.0], true).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v = &e.vectors.unwrap()[0];
        assert!(v[0] > 0.0 && (v[0] + v[1]).abs() < 1e-14);
    }

    #[test]
    fn ql_matches_bisection() {
        let n = 40;
        let d: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 * 0.3 - 1.0).collect();
        let o: Vec<f64> = (0..n - 1).map(|i| 0.5 + ((i * 3) % 5) as f64 * 0.1).collect();
        let all = eig_sym_tridiag(&d, &o, true).unwrap();
        let (lo, vec) = lowest_tridiag(&d, &o).unwrap();
        assert!((all.values[0] - lo).abs() < 1e-12);
        let v0 = &all.vectors.as_ref().unwrap()[0];
        let dot: f64 = v0.iter().zip(&vec).map(|(a, b)| a * b).sum();
        assert!((dot - 1.0).abs() < 1e-10);
        for (k, v) in all.vectors.unwrap().iter().enumerate() {
            // residual check
            for i in 0..n {
                let mut tv = d[i] * v[i];
                if i > 0 {
                    tv += o[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += o[i] * v[i + 1];
                }
                assert!((tv - all.values[k] * v[i]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn half_line_oscillator_odd_sector() {
        // -1/2 f'' + 1/2 x^2 f on (0, L) with f(0) = 0: lowest level 3/2.
        let l = 10.0;
        let level = |n: usize| {
            let h = l / (n + 1) as f64;
            let d: Vec<f64> = (1..=n).map(|i| 1.0 / (h * h) + 0.5 * (i as f64 * h).powi(2)).collect();
            let o = vec![-0.5 / (h * h); n - 1];
            lowest_tridiag(&d, &o).unwrap().0
        };
        let coarse = level(4999);
        let fine = level(9999);
        let extrap = (4.0 * fine - coarse) / 3.0;
        assert!((fine - 1.5).abs() < 1e-5, "{fine}");
        assert!((extrap - 1.5).abs() < 1e-9, "{extrap}");
    }

    #[test]
    fn dense_examples() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        assert_eq!(eig_sym_dense(&m).unwrap().values, vec![1.0, 2.0, 3.0]);
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = eig_sym_dense(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.1, 2.0]);
        assert!(matches!(eig_sym_dense(&bad), Err(Error::Contract(_))));
    }

    /// det(A - x I) by Gaussian elimination with partial pivoting.
    fn char_poly(a: &DMatrix<f64>, x: f64) -> f64 {
        let n = a.nrows();
        let mut m = a.clone();
        for i in 0..n {
            m[(i, i)] -= x;
        }
        let mut det = 1.0;
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[(i, c)].abs().total_cmp(&m[(j, c)].abs())).unwrap();
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)];
            det *= piv;
            for r in c + 1..n {
                let f = m[(r, c)] / piv;
                for k in c..n {
                    m[(r, k)] -= f * m[(c, k)];
                }
            }
        }
        det
    }

    #[test]
    fn dense_random_matches_characteristic_roots() {
        // deterministic pseudo-random symmetric 8x8
        let mut s: u64 = 0x9E3779B97F4A7C15;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 8;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        // oracle: scan sign changes of det(A - xI) on a fine grid, then bisect
        let mut roots = Vec::new();
        let steps = 40_000;
        let (lo, hi) = (-5.0, 5.0);
        let mut prev_x = lo;
        let mut prev_f = char_poly(&a, lo);
        for k in 1..=steps {
            let x = lo + (hi - lo) * k as f64 / steps as f64;
            let f = char_poly(&a, x);
            if f == 0.0 || f.signum() != prev_f.signum() {
                let (mut l, mut r, fl) = (prev_x, x, prev_f);
                for _ in 0..100 {
                    let m = 0.5 * (l + r);
                    if char_poly(&a, m).signum() == fl.signum() {
                        l = m;
                    } else {
                        r = m;
                    }
                }
                roots.push(0.5 * (l + r));
            }
            prev_x = x;
            prev_f = f;
        }
        assert_eq!(roots.len(), n);
        let e = eig_sym_dense(&a).unwrap();
        for (x, y) in e.values.iter().zip(&roots) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }
}
