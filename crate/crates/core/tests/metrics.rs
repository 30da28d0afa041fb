use std::sync::OnceLock;

use proptest::prelude::*;
use twoel::helium::{self, HeliumSpec};
use twoel::hooke::HookeSpec;
use twoel::metrics::*;
use twoel::state::{CorrelatedState, PairGrid};
use twoel::system::SystemSpec;
use twoel::{Error, Execution, SystemRecord};

const EX: Execution = Execution::Serial;

fn hooke(w: f64, l: f64) -> SystemRecord {
    SystemRecord::solve(&SystemSpec::Hooke(HookeSpec::new(w, l).unwrap()), EX).unwrap()
}

fn helium(z: f64, l: f64) -> SystemRecord {
    SystemRecord::solve(&SystemSpec::Helium(HeliumSpec::new(z, 10, l).unwrap()), EX).unwrap()
}

struct Table {
    n: usize,
    interacting: Vec<bool>,
    shifted: Vec<f64>,
    d: Vec<[f64; 4]>,
}

impl Table {
    fn get(&self, i: usize, j: usize) -> [f64; 4] {
        self.d[i * self.n + j]
    }
}

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let mut sys = vec![
            hooke(0.3, 1.0),
            hooke(0.5, 1.0),
            hooke(1.0, 1.0),
            hooke(2.0, 1.0),
            hooke(0.5, 0.0),
            helium(1.0, 1.0),
            helium(2.0, 1.0),
            helium(3.0, 1.0),
            helium(2.0, 0.0),
        ];
        sys.push(sys[1].invert().unwrap().1);
        sys.push(sys[6].invert().unwrap().1);
        let n = sys.len();
        let energies: Vec<f64> = sys.iter().map(|s| s.e_total).collect();
        let gauge = gauge_constant_eigen(&energies).unwrap();
        let grid = PairGrid::covering(sys.iter().map(|s| &s.state)).unwrap();
        let w: Vec<Weighted> =
            sys.iter().map(|s| Weighted { state: &s.state, e_shifted: s.e_total + gauge.c }).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let (sums, norms) = pair_sums(&w, &pairs, &grid, EX).unwrap();
        assert!(norms.iter().all(|x| (x - 2.0).abs() < NORM_TOL), "{norms:?}");
        let d = pairs
            .iter()
            .zip(&sums)
            .map(|(&(i, j), s)| {
                let r = report_from_sums(&sys[i], &sys[j], s, &gauge, &grid.radial).unwrap();
                [r.d_psi, r.d_rho, r.d_v1, r.d_v2]
            })
            .collect();
        let interacting = sys.iter().map(|s| s.interaction > 0.0).collect();
        let shifted = sys.iter().map(|s| s.e_total + gauge.c).collect();
        Table { n, interacting, shifted, d }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn metric_axioms(i in 0usize..11, j in 0usize..11, k in 0usize..11) {
        let t = table();
        let (ij, ji, ik, kj) = (t.get(i, j), t.get(j, i), t.get(i, k), t.get(k, j));
        for m in 0..4 {
            prop_assert!(ij[m] >= 0.0);
            prop_assert_eq!(ij[m].to_bits(), ji[m].to_bits());
            prop_assert!(ij[m] <= ik[m] + kj[m] + 1e-8, "metric {} on ({}, {}, {})", m, i, j, k);
        }
        prop_assert!(t.get(i, i).iter().all(|v| v.abs() <= 1e-8));
        prop_assert!(ij[3] <= ij[2] + 1e-12);
        // A member at the bottom of the gauge has E + c = 0, and then the
        // integrand of D_v1 cannot change sign within a shell.
        if i != j && t.interacting[i] && t.interacting[j] && t.shifted[i] > 0.0 && t.shifted[j] > 0.0 {
            prop_assert!(ij[3] < ij[2]);
            prop_assert!(ij[0] > 1e-8);
        }
    }
}

#[test]
fn table_covers_ten_systems() {
    assert!(table().n >= 10);
}

#[test]
fn eigen_gauge_is_minus_lowest_energy() {
    let e: Vec<f64> = [1.0, 2.0, 50.0]
        .iter()
        .map(|&z| helium::solve(&HeliumSpec::new(z, 10, 1.0).unwrap(), EX).unwrap().e_total)
        .collect();
    let g = gauge_constant_eigen(&e).unwrap();
    assert_eq!(g.c, -e[2]);
    assert!(g.c > 2400.0 && g.c < 2500.0, "{}", g.c);
    assert_eq!(gauge_constant_eigen(&[2.0, 3.0]).unwrap().c, 0.0);
    assert!(matches!(gauge_constant_eigen(&[]), Err(Error::Contract(_))));
    assert!(matches!(gauge_fixed(1.0, &[-2.0]), Err(Error::Contract(_))));
}

#[test]
fn equal_densities_give_energy_difference() {
    let a = hooke(0.5, 1.0);
    let mut b = a.clone();
    b.e_total += 0.75;
    let g = gauge_constant_eigen(&[a.e_total, b.e_total]).unwrap();
    let grid = PairGrid::covering([&a.state]).unwrap();
    assert_eq!(d_v2_eigen(&a, &b, &g, &grid.radial).unwrap(), 2.0 * 0.75);
    assert_eq!(d_rho(&a.density, &b.density, &grid.radial).unwrap(), 0.0);
    let g_bad = GaugeContext { c: -10.0, ..g };
    assert!(matches!(d_v1_eigen(&a, &b, &g_bad, &grid, EX), Err(Error::Contract(_))));
}

#[test]
fn wavefunction_distance_ignores_global_sign() {
    let a = helium(2.0, 1.0);
    let CorrelatedState::Helium(h) = &a.state else { panic!() };
    let neg: Vec<f64> = h.coeffs().iter().map(|c| -c).collect();
    let b = CorrelatedState::Helium(helium::HeliumState::new(h.z(), h.omega(), neg).unwrap());
    let grid = PairGrid::covering([&a.state]).unwrap();
    assert!(d_psi(&a.state, &b, &grid, EX).unwrap() < 1e-8);
    let far = hooke(5.0, 1.0);
    let grid = PairGrid::covering([&a.state, &far.state]).unwrap();
    let d = d_psi(&a.state, &far.state, &grid, EX).unwrap();
    assert!(d > 0.0 && d <= 2.0);
}

#[test]
fn rescaled_values_lie_in_zero_two() {
    let a = hooke(0.2, 1.0);
    let b = hooke(4.0, 1.0);
    let g = gauge_constant_eigen(&[a.e_total, b.e_total]).unwrap();
    let grid = PairGrid::covering([&a.state, &b.state]).unwrap();
    let r = compare(&a, &b, &g, &grid, EX).unwrap();
    for v in [r.rescaled_d_psi, r.rescaled_d_rho, r.rescaled_d_v1, r.rescaled_d_v2] {
        assert!((0.0..=2.0).contains(&v), "{r:?}");
    }
    assert!(r.rescaled_d_v1 > 1.5);
    assert_eq!(r.rescaled_d_psi, r.d_psi);
    assert_eq!(r.rescaled_d_rho, r.d_rho / 2.0);
}

#[test]
fn energy_density_integrates_to_shifted_energy() {
    for rec in [hooke(0.5, 1.0), helium(2.0, 1.0)] {
        let grid = PairGrid::covering([&rec.state]).unwrap();
        let g = gauge_fixed(rec.e_total.abs() + 1.0, &[rec.e_total]).unwrap();
        let target = (rec.e_total + g.c) * 2.0;
        let h = h_field(&rec, &g, &grid, EX).unwrap();
        assert!((h.integral() / target - 1.0).abs() < 5e-3, "{} vs {target}", h.integral());
        let f = f_norm(&rec, &g, &grid, EX);
        assert!((f / target - 1.0).abs() < 1e-4, "{f} vs {target}");
        assert_eq!(d_v2_general(&h, &h).unwrap(), 0.0);
        let comps = h_components(&rec, &grid, EX).unwrap();
        let ch = gauge_constant_h(&[comps]).unwrap();
        assert!(ch.c >= 0.0 && ch.c.is_finite());
        assert_eq!((ch.c / H_GAUGE_STEP).round() * H_GAUGE_STEP, ch.c);
    }
}

#[test]
fn harmonic_energy_density_needs_no_shift() {
    let rec = hooke(1.0, 1.0);
    let grid = PairGrid::covering([&rec.state]).unwrap();
    let c = h_components(&rec, &grid, EX).unwrap();
    assert_eq!(gauge_constant_h(&[c]).unwrap().c, 0.0);
}

#[test]
fn ratio_of_interaction_to_external_energy() {
    let rec = hooke(0.5, 1.0);
    let r = energy_ratio(&rec).unwrap();
    assert_eq!(r, (rec.components.u / rec.components.v).abs());
    assert_eq!(energy_ratio(&hooke(0.5, 0.0)).unwrap(), 0.0);
}
