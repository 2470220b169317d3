use densify::guidance::{
    compute_range, confidence_filter, linspace, modulate_cost_volume, modulation_gain, patch_descriptor,
    sample_candidates, CostVolume,
};
use densify::{GuidanceParams, Grid, HintMap, ShiftSign};
use proptest::prelude::*;

fn guidance(alpha: f64, d_max: f64, k: f64, c: f64) -> GuidanceParams<f64> {
    GuidanceParams { alpha, d_min: 0.0, d_max, k, c, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn range_is_ordered_and_contains_hint(h in 0.01f64..300.0, alpha in 0.0f64..0.99, d_max in 1.0f64..256.0) {
        let p = guidance(alpha, d_max, 10.0, 1.0);
        let map = HintMap::from_hints(1, 2, [(0, 0, h)]).unwrap();
        let r = compute_range(&map, &p).unwrap();
        let (lo, hi) = r.bounds(0, 0);
        prop_assert!(0.0 <= lo && lo <= hi && hi <= d_max);
        if h <= d_max {
            prop_assert!(lo <= h && h <= hi);
        }
        prop_assert_eq!(r.bounds(0, 1), (0.0, d_max));
        for n in [1usize, 2, 16] {
            let cands = sample_candidates(&r, 0, 0, n).unwrap();
            prop_assert_eq!(cands.len(), n);
            prop_assert!(cands.iter().all(|&d| lo <= d && d <= hi));
            prop_assert!(cands.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn modulation_peak_and_passthrough(h in 0.5f64..190.0, d in 0.0f64..192.0, k in 0.1f64..50.0, c in 0.05f64..20.0) {
        prop_assert_eq!(modulation_gain(h, h, k, c), k);
        prop_assert_eq!(modulation_gain(d, 0.0, k, c), 1.0);
        let g = modulation_gain(d, h, k, c);
        prop_assert!(g > 0.0 || (d - h).abs() > 10.0 * c.sqrt());
        prop_assert!(g <= k);
    }

    #[test]
    fn modulated_argmax_sits_on_hint(h in 0.5f64..62.0, k in 1.01f64..50.0, c in 0.05f64..20.0, f in 0.1f64..5.0) {
        let p = GuidanceParams { d_max: 63.0, ..guidance(0.2, 63.0, k, c) };
        let vol = CostVolume::filled(1, 2, 0, 64, f);
        let map = HintMap::from_hints(1, 2, [(0, 0, h)]).unwrap();
        let out = modulate_cost_volume(&vol, &map, &p).unwrap();
        // Half-integer hints tie between two levels; the lower one wins.
        let want = if (h - h.floor() - 0.5).abs() < 1e-12 { h.floor() } else { h.round() };
        prop_assert_eq!(out.argmax(0, 0), want as i64);
        prop_assert_eq!(out.at(0, 1), vol.at(0, 1));
    }
}

#[test]
fn linspace_endpoints() {
    assert_eq!(linspace(40.0, 60.0, 5), vec![40.0, 45.0, 50.0, 55.0, 60.0]);
    assert_eq!(linspace(2.0, 4.0, 1), vec![3.0]);
}

fn textured(height: usize, width: usize, seed: u64) -> Grid<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    Grid::from_fn(height, width, |_, _| {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn confidence_filter_properties(
        seed in any::<u64>(),
        hints in proptest::collection::vec((0usize..12, 0usize..24, 0.1f64..20.0), 0..40),
        tau_a in 0.0f64..1.0,
        tau_b in 0.0f64..1.0,
        plus in any::<bool>(),
    ) {
        let left = textured(12, 24, seed);
        let right = Grid::from_fn(12, 24, |r, c| left.get_clamped(r as isize, c as isize + 3));
        let (fl, fr) = (patch_descriptor(&left, 5).unwrap(), patch_descriptor(&right, 5).unwrap());
        let mut map = HintMap::new(12, 24);
        for (r, c, v) in hints {
            map.set(r, c, v).unwrap();
        }
        let sign = if plus { ShiftSign::Plus } else { ShiftSign::Minus };
        let (lo, hi) = (tau_a.min(tau_b), tau_a.max(tau_b));
        let run = |tau: f64| {
            let p = GuidanceParams { conf_tau: tau, shift_sign: sign, ..Default::default() };
            confidence_filter(&map, &fl, &fr, &p).unwrap()
        };
        let (kept_lo, conf) = run(lo);
        let (kept_hi, _) = run(hi);
        for &v in conf.as_slice() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for (r, c, v) in kept_lo.iter_hints() {
            prop_assert_eq!(map.get(r, c), v);
            prop_assert!(conf.get(r, c) > lo);
        }
        for (r, c, _) in kept_hi.iter_hints() {
            prop_assert!(kept_lo.has_hint(r, c));
        }
    }
}

#[test]
fn correct_hints_score_one() {
    let left = textured(16, 40, 9);
    let right = Grid::from_fn(16, 40, |r, c| left.get_clamped(r as isize, c as isize + 5));
    let (fl, fr) = (patch_descriptor(&left, 5).unwrap(), patch_descriptor(&right, 5).unwrap());
    // right(c) = left(c + 5): a left pixel at col appears at col - 5.
    let h = HintMap::from_hints(16, 40, [(8, 20, 5.0), (8, 21, 5.2), (9, 20, 11.0)]).unwrap();
    let p = GuidanceParams { shift_sign: ShiftSign::Minus, ..Default::default() };
    let (kept, conf) = confidence_filter(&h, &fl, &fr, &p).unwrap();
    assert!(conf.get(8, 20) > 1.0 - 1e-12);
    assert!(conf.get(8, 21) > 1.0 - 1e-12);
    assert!(kept.has_hint(8, 20) && kept.has_hint(8, 21));
    assert!(!kept.has_hint(9, 20));
}
