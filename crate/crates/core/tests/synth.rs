use densify::matcher::{match_cost, MatchParams};
use densify::metrics::hint_stats;
use densify::synth::{gen_planar_scene, gen_stereo_scene, warp_right, SceneSpec, TextureKind};
use densify::{expand_graph, validate_hint_map, DisparityMap, GraphParams, Grid};

#[test]
fn deterministic_and_valid() {
    for texture in [TextureKind::Noise, TextureKind::Gradient, TextureKind::Checker, TextureKind::Features] {
        let spec = SceneSpec { seed: 17, height: 60, width: 80, texture, density: 0.02, noise_sigma: 0.7, ..Default::default() };
        let a = gen_stereo_scene::<f64>(&spec).unwrap();
        let b = gen_stereo_scene::<f64>(&spec).unwrap();
        assert_eq!(a, b);
        assert!(validate_hint_map(&a.hints).is_empty());
        assert_eq!(a.hints.count(), spec.hint_count());
        for r in 0..60 {
            for c in 0..80 {
                let d = a.scene.disparity.get(r, c).unwrap();
                assert!((spec.d_min..=spec.d_max).contains(&d));
            }
        }
    }
}

#[test]
fn hint_noise_is_half_normal() {
    let sigma = 1.5;
    let want = sigma * (2.0 / std::f64::consts::PI).sqrt();
    let (mut sum, mut n) = (0.0, 0usize);
    for seed in 0..4 {
        let spec = SceneSpec { seed, density: 0.005, noise_sigma: sigma, ..Default::default() };
        let s = gen_stereo_scene::<f64>(&spec).unwrap();
        let stats = hint_stats(&s.hints, &s.scene.disparity).unwrap();
        sum += stats.mae.unwrap() * stats.count as f64;
        n += stats.count;
    }
    assert!(n >= 1000);
    let got = sum / n as f64;
    assert!((got - want).abs() <= 0.1 * want, "{got} vs {want}");
}

#[test]
fn constant_shift_warps_exactly() {
    let spec = SceneSpec { seed: 3, height: 40, width: 60, ..Default::default() };
    let scene = gen_planar_scene::<f64>(&spec).unwrap();
    let gt = DisparityMap::filled(40, 60, 5.0);
    let (right, valid) = warp_right(&scene.left, &gt).unwrap();
    for r in 0..40 {
        for c in 0..55 {
            assert!(valid.get(r, c));
            assert_eq!(right.pixel(r, c), scene.left.pixel(r, c + 5));
        }
        for c in 55..60 {
            assert!(!valid.get(r, c));
        }
    }
}

#[test]
fn ground_truth_shift_costs_nearly_nothing() {
    let spec = SceneSpec { seed: 8, planes: 1, max_slope: 0.0, ..Default::default() };
    let s = gen_stereo_scene::<f64>(&spec).unwrap();
    let (l, r) = (s.scene.left.to_gray(), s.right.to_gray());
    let p = MatchParams::default();
    let d = s.scene.disparity.get(120, 160).unwrap();
    let at_truth = match_cost(&l, &r, 120, 160, d, &p);
    let off = match_cost(&l, &r, 120, 160, d + 3.0, &p);
    // Fractional shifts interpolate twice, so the cost is small, not zero.
    assert!(at_truth / 25.0 < 0.02 && at_truth < 0.1 * off, "{at_truth} {off}");
}

#[test]
fn single_plane_expansion_error_is_bounded() {
    for seed in 0..20 {
        let spec = SceneSpec { seed, planes: 1, max_slope: 0.2, density: 0.01, ..Default::default() };
        let s = gen_stereo_scene::<f64>(&spec).unwrap();
        let bound = s.scene.planes[0].slope() * std::f64::consts::SQRT_2 / 2.0 + 1e-6;
        let out = expand_graph(&s.hints, &s.scene.left, &GraphParams::default()).unwrap();
        assert!(out.count() > s.hints.count());
        for (r, c, v) in out.iter_hints() {
            let err = (v - s.scene.disparity.get(r, c).unwrap()).abs();
            assert!(err <= bound, "seed {seed} ({r}, {c}): {err} > {bound}");
        }
    }
}

#[test]
fn f32_scene_matches_f64_scene() {
    let spec = SceneSpec { seed: 2, height: 30, width: 40, ..Default::default() };
    let a = gen_planar_scene::<f64>(&spec).unwrap();
    let b = gen_planar_scene::<f32>(&spec).unwrap();
    let diff = Grid::from_fn(30, 40, |r, c| (a.disparity.get(r, c).unwrap() - b.disparity.get(r, c).unwrap() as f64).abs());
    assert!(diff.as_slice().iter().all(|&d| d < 1e-4));
}
