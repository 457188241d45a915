mod common;

use common::*;
use num_complex::Complex64;
use orbichar::characters::permutation_lattice;
use orbichar::lattice::*;
use orbichar::linalg::rat;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn theta_functions_transform_under_s_and_t(seed in any::<u64>(), zx in -0.4f64..0.4, zy in -0.2f64..0.2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let l = random_even_lattice(&mut rng, 64);
        let tau = random_tau(&mut rng);
        let z: Vec<Complex64> = (0..l.rank()).map(|i| c(zx / (i + 1) as f64, zy)).collect();
        let res = theta_law_residual(&l, tau, &z);
        prop_assert!(res < 1e-8, "gram {:?}, tau {}: residual {:e}", l.gram(), tau, res);
    }

    #[test]
    fn fincke_pohst_agrees_with_box_search(seed in any::<u64>(), num in prop::collection::vec(-7i64..8, 4), den in 1i64..6, bound in 0i64..14) {
        let mut rng = StdRng::seed_from_u64(seed);
        let l = random_even_lattice(&mut rng, 512);
        let shift: Vec<_> = (0..l.rank()).map(|i| rat(num[i], den)).collect();
        prop_assert_eq!(enumeration_mismatch(l.form(), &shift, &rat(bound, 2)), None);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eta_transforms_under_s_and_t(x in -0.5f64..0.5, y in 0.6f64..2.0) {
        let res = eta_law_residual(c(x, y));
        prop_assert!(res < 1e-10, "{res:e}");
    }

    #[test]
    fn k_functions_transform(m in prop::sample::select(vec![2i64, 4, 6, 8]), x in -0.5f64..0.5, y in 0.7f64..1.5, zr in -0.5f64..0.5, zi in -0.1f64..0.1) {
        let [s, t, sym] = k_law_residuals(m, c(x, y), c(zr, zi));
        prop_assert!(s < 1e-8 && t < 1e-10 && sym < 1e-12, "S {s:e}, T {t:e}, l↔−l {sym:e}");
    }

    #[test]
    fn jacobi_triple_product(x in -0.5f64..0.5, y in 0.5f64..2.0, zr in -1.0f64..1.0, zi in -0.2f64..0.2) {
        let res = triple_product_residual(c(x, y), c(zr, zi));
        prop_assert!(res < 1e-10, "{res:e}");
    }
}

#[test]
fn k_function_laws_at_the_reference_point() {
    let tau = c(0.2, 0.9);
    for m in [2, 4, 6] {
        let [s, t, sym] = k_law_residuals(m, tau, c(0.0, 0.0));
        assert!(s < 1e-8 && t < 1e-10 && sym < 1e-12, "m = {m}: {s:e} {t:e} {sym:e}");
    }
}

#[test]
fn exact_identities_on_the_example_family() {
    for (name, l, s) in identity_cases() {
        let bad = exact_identity_failures(&l, &s);
        assert!(bad.is_empty(), "{name}: {bad:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_identities_on_permutation_lattices(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let mut rng = StdRng::seed_from_u64(seed);
        let max = if p == 5 { 4 } else { 16 };
        let q0 = loop {
            let l = random_even_lattice(&mut rng, max);
            if l.rank() <= 2 {
                break l;
            }
        };
        let (l, s) = permutation_lattice(&q0, p).unwrap();
        let bad = exact_identity_failures(&l, &s);
        prop_assert!(bad.is_empty(), "Q0 = {:?}, p = {}: {:?}", q0.gram(), p, bad);
    }
}

#[test]
fn enumeration_agrees_on_named_lattices() {
    let a3 = new_lattice(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap();
    let d4 = orbichar::builtin::d4().unwrap().0;
    for l in [a3, d4] {
        for rep in discriminant_group(&l).representatives() {
            assert_eq!(enumeration_mismatch(l.form(), &rep.0, &rat(12, 1)), None);
        }
    }
}

#[test]
fn reference_points_for_k_and_p() {
    use orbichar::modular::{k_function, p_triple, SeriesTolerance, PI};
    let tol = SeriesTolerance::new(1e-14);
    let [s, _, _] = k_law_residuals(4, c(0.0, 1.0), c(0.1, 0.0));
    assert!(s < 1e-9, "{s:e}");
    for l in 0..4 {
        let a = k_function(l, c(0.0, 1.0), c(0.0, 0.0), 4, &tol).unwrap();
        let b = k_function(-l, c(0.0, 1.0), c(0.0, 0.0), 4, &tol).unwrap();
        assert!((a - b).norm() < 1e-14);
    }
    assert!(triple_product_residual(c(0.0, 1.0), c(0.3, 0.0)) < 1e-10);
    let (tau, zeta) = (c(0.13, 0.85), c(0.3, 0.05));
    let p = p_triple(tau, zeta, &tol).unwrap();
    assert!((p_triple(tau, zeta + 1.0, &tol).unwrap() - p).norm() < 1e-12);
    let t = p_triple(tau + 1.0, zeta, &tol).unwrap() - Complex64::from_polar(1.0, PI / 6.0) * p;
    assert!(t.norm() < 1e-10, "{t}");
}
