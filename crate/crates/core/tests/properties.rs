//! Property tests of the structural invariants.

use std::f64::consts::FRAC_PI_2;

use packing_bounds::asymptotic::{convex_minorant_g, delta, f_m_min, f_of_t, r1_grassmann, r_lp, r_s, r_y, crossing_alpha};
use packing_bounds::finite_bounds::KernelBoundTable;
use packing_bounds::geometry::{chordal_distance, positivity_sum, seeded_rng, sigma_overlap, GrassmannPoint, ProductPoint};
use packing_bounds::spaces::{chordal_from_product_angle, grassmann_to_product_angle, stiefel_to_product_angle};
use packing_bounds::{AngleKind, Field, PolyFamily};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = PolyFamily> {
    prop_oneof![
        (2usize..=12).prop_map(|n| PolyFamily::gegenbauer(n).unwrap()),
        (2usize..=10, prop_oneof![Just(Field::R), Just(Field::C), Just(Field::H)])
            .prop_map(|(n, f)| PolyFamily::projective(f, n).unwrap()),
    ]
}

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::R), Just(Field::C)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_coefficients_sum_to_one(fam in family(), k in 0usize..=50) {
        let c = fam.recurrence_coeffs(k);
        prop_assert!((c.a + c.b + c.c - 1.0).abs() < 1e-13);
        prop_assert!(c.a > 0.0 && c.a <= 1.0);
    }

    #[test]
    fn gegenbauer_forward_coefficient(n in 3usize..=40, k in 1usize..=50) {
        let c = PolyFamily::gegenbauer(n).unwrap().recurrence_coeffs(k);
        let expect = (n - 2 + k) as f64 / (n - 2 + 2 * k) as f64;
        prop_assert!((c.a - expect).abs() < 1e-14);
    }

    #[test]
    fn zeros_interlace(fam in family(), k in 1usize..=20) {
        let table = fam.table(k + 1);
        let (z0, z1) = (table.largest_zero(k).unwrap(), table.largest_zero(k + 1).unwrap());
        let y = table.companion_root(k).unwrap();
        prop_assert!(z0 < z1);
        prop_assert!(z0 < y && y < z1, "z_k={} y={} z_k+1={}", z0, y, z1);
    }

    #[test]
    fn grassmann_reduction_round_trips(m in 1usize..=6, frac in 0.0f64..=1.0) {
        let d = frac * (m as f64).sqrt();
        let a = grassmann_to_product_angle(d, m).unwrap();
        prop_assert!((chordal_from_product_angle(&a, m) - d).abs() < 1e-12);
    }

    #[test]
    fn stiefel_reduction_round_trips(m in 1usize..=6, frac in 0.0f64..=1.0) {
        let d = frac * 2.0 * (m as f64).sqrt();
        let a = stiefel_to_product_angle(d, m).unwrap();
        prop_assert!((chordal_from_product_angle(&a, m) - d).abs() < 1e-12);
    }

    #[test]
    fn reductions_are_monotone(m in 1usize..=6, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let s = (m as f64).sqrt();
        let g = |x: f64| grassmann_to_product_angle(x * s, m).unwrap().theta;
        let v = |x: f64| stiefel_to_product_angle(2.0 * x * s, m).unwrap().theta;
        prop_assert!(g(lo) < g(hi));
        prop_assert!(v(lo) < v(hi));
    }

    #[test]
    fn overlap_is_basis_independent(seed in any::<u64>(), m in 1usize..=3, extra in 1usize..=4, f in field()) {
        let mut rng = seeded_rng(seed, 0);
        let n = m + extra;
        let p = GrassmannPoint::random(m, n, f, &mut rng).unwrap();
        let q = GrassmannPoint::random(m, n, f, &mut rng).unwrap();
        let (p2, q2) = (p.rebased(&mut rng), q.rebased(&mut rng));
        prop_assert!((sigma_overlap(&p, &q).unwrap() - sigma_overlap(&p2, &q2).unwrap()).abs() < 1e-10);
        prop_assert!((chordal_distance(&p, &q).unwrap() - chordal_distance(&p2, &q2).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn positivity_in_products(
        seed in any::<u64>(),
        n in 3usize..=6,
        m in 1usize..=3,
        size in 1usize..=12,
        kind in 0usize..4,
        ks in proptest::collection::vec(0usize..=3, 3),
    ) {
        let (angle, f, fam) = match kind {
            0 => (AngleKind::Sphere, Field::R, PolyFamily::gegenbauer(n).unwrap()),
            1 => (AngleKind::Projective, Field::R, PolyFamily::projective(Field::R, n).unwrap()),
            2 => (AngleKind::Projective, Field::C, PolyFamily::projective(Field::C, n).unwrap()),
            _ => (AngleKind::Projective, Field::H, PolyFamily::projective(Field::H, n).unwrap()),
        };
        let mut rng = seeded_rng(seed, 1);
        let code: Vec<ProductPoint> = (0..size).map(|_| ProductPoint::random(angle, f, n, m, &mut rng).unwrap()).collect();
        let sum = positivity_sum(&code, &fam.table(3), &ks[..m]).unwrap();
        prop_assert!(sum >= -1e-8 * (size * size) as f64);
    }

    #[test]
    fn degree_one_positivity_is_a_squared_norm(seed in any::<u64>(), n in 2usize..=6, size in 1usize..=10) {
        let mut rng = seeded_rng(seed, 2);
        let code: Vec<ProductPoint> = (0..size)
            .map(|_| ProductPoint::random(AngleKind::Sphere, Field::R, n, 1, &mut rng).unwrap())
            .collect();
        let sum = positivity_sum(&code, &PolyFamily::gegenbauer(n).unwrap().table(1), &[1]).unwrap();
        let total: Vec<f64> = (0..n).map(|i| code.iter().map(|p| p.components[0][i]).sum()).collect();
        let norm2: f64 = total.iter().map(|x| x * x).sum();
        prop_assert!((sum - norm2).abs() < 1e-10 * (1.0 + norm2));
    }

    #[test]
    fn selected_witness_is_sound(n in 3usize..=8, m in 1usize..=3, t in -0.5f64..0.9) {
        let fam = PolyFamily::gegenbauer(n).unwrap();
        let table = KernelBoundTable::new(&fam, 20).unwrap();
        if let Ok((k, value)) = table.select(m, t) {
            prop_assert!(table.sign_conditions_hold(&k).unwrap());
            let w = table.witness(&k).unwrap();
            prop_assert!(w.sigma_y >= m as f64 * t);
            prop_assert!(table.closed_value(&k).unwrap() >= table.exact_value(&k).unwrap() - 1e-9 * value);
        }
    }

    #[test]
    fn envelope_below_lp(theta in 1e-3f64..FRAC_PI_2) {
        let (rs, lp) = (r_s(theta).unwrap(), r_lp(theta).unwrap());
        prop_assert!(rs <= lp + 1e-15 && rs >= 0.0);
        if theta <= crossing_alpha().unwrap() {
            prop_assert_eq!(rs, r_y(theta).unwrap().min(lp).max(0.0));
        }
    }

    #[test]
    fn average_minimum_is_sandwiched(t in 0.0f64..0.97, m in 1usize..=3) {
        let (g, f) = (convex_minorant_g(t).unwrap(), f_of_t(t).unwrap());
        let v = f_m_min(t, m).unwrap();
        let v2 = f_m_min(t, 2 * m).unwrap();
        prop_assert!(g - 1e-12 <= v && v <= f + 1e-12);
        prop_assert!(v2 <= v + 1e-12);
        prop_assert!(f - v <= delta() + 1e-3);
    }

    #[test]
    fn product_rate_never_exceeds_lp(frac in 0.01f64..1.0, m in 1usize..=4, c in 1u32..=2) {
        let d = frac * (m as f64).sqrt();
        let a = grassmann_to_product_angle(d, m).unwrap();
        let lp = if a.theta >= FRAC_PI_2 { 0.0 } else { r_lp(a.theta).unwrap() };
        prop_assert!(r1_grassmann(d, m, c).unwrap() <= c as f64 * m as f64 * lp + 1e-9);
    }
}
