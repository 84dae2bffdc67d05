use orbit_equidist::measures::{monte_carlo_integral, target_integral, Region};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Box in R^d with every side in [0.2, 1.5], one side bounded away from
/// zero so that frames stay away from the origin.
fn random_box(rng: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, Vec<f64>) {
    let lo: Vec<f64> = (0..d)
        .map(|i| if i == 0 { rng.random_range(0.5..2.0) } else { rng.random_range(-2.0..2.0) })
        .collect();
    let hi = lo.iter().map(|a| a + rng.random_range(0.2..1.5)).collect();
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integral_is_homogeneous(seed in any::<u64>(), n in 2usize..=4, c in 0.3f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = random_box(&mut rng, n);
        let base = target_integral(&Region::single_box(lo.clone(), hi.clone()).unwrap(), n, 1).unwrap();
        let scaled = Region::single_box(lo.iter().map(|x| x * c).collect(), hi.iter().map(|x| x * c).collect()).unwrap();
        let s = target_integral(&scaled, n, 1).unwrap();
        let want = base.value * c.powi(n as i32 - 1);
        prop_assert!((s.value - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn integral_is_reflection_invariant(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = random_box(&mut rng, n);
        let a = target_integral(&Region::single_box(lo.clone(), hi.clone()).unwrap(), n, 1).unwrap();
        let b = target_integral(&Region::single_box(hi.iter().map(|x| -x).collect(), lo.iter().map(|x| -x).collect()).unwrap(), n, 1).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value);
    }

    #[test]
    fn split_boxes_add_up(seed in any::<u64>(), n in 2usize..=3, cut in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = random_box(&mut rng, n);
        let mid = lo[1] + cut * (hi[1] - lo[1]);
        let (mut hi_a, mut lo_b) = (hi.clone(), lo.clone());
        hi_a[1] = mid;
        lo_b[1] = mid;
        let whole = target_integral(&Region::single_box(lo.clone(), hi.clone()).unwrap(), n, 1).unwrap().value;
        let a = target_integral(&Region::single_box(lo, hi_a).unwrap(), n, 1).unwrap().value;
        let b = target_integral(&Region::single_box(lo_b, hi).unwrap(), n, 1).unwrap().value;
        prop_assert!((a + b - whole).abs() <= 1e-9 * whole);
    }
}

#[test]
fn annulus_closed_form_against_monte_carlo() {
    let a = Region::annulus(0.5, 2.0).unwrap();
    let exact = target_integral(&a, 2, 1).unwrap().value;
    assert!((exact - 2.0 * std::f64::consts::PI * 1.5).abs() < 1e-12);
    let mc = monte_carlo_integral(&a, 2, 1, 400_000, 3).unwrap();
    assert!((mc.value - exact).abs() < 4.0 * mc.error, "{mc:?} vs {exact}");
}
