use waysim_core::alt_model::{self, AltProbe};
use waysim_core::grid_core::{l1_distance, make_grid, sample_wavefunction, smear};
use waysim_core::ozawa_model::{self, OzawaProbe};
use waysim_core::repeatability::{
    conditional_prob, predicted_halfwidth, repeatability_width, IntervalFamily, ProbeSupports,
};
use waysim_core::way_bounds::noise_moment;
use waysim_core::{Grid64, Model, NumericPolicy, ProbeFamily64, WaveFunction64};

fn grid(lo: f64, hi: f64, n: usize) -> Grid64 {
    make_grid(lo, hi, n).unwrap()
}

fn state(g: &Grid64, fam: ProbeFamily64) -> WaveFunction64 {
    sample_wavefunction(g, &fam).unwrap()
}

fn gauss(g: &Grid64, s: f64) -> WaveFunction64 {
    state(g, ProbeFamily64::gaussian(0.0, s))
}

fn ozawa(g: &Grid64, phi1: ProbeFamily64, phi2: ProbeFamily64) -> OzawaProbe<f64> {
    OzawaProbe::new(state(g, phi1), state(g, phi2), gauss(g, 1.0)).unwrap()
}

#[test]
fn ozawa_accurate_limit_reproduces_object_density() {
    let g = grid(-8.0, 8.0, 2048);
    let obj = gauss(&g, 0.7);
    let p = ozawa(&g, ProbeFamily64::gaussian(0.0, 0.05), ProbeFamily64::gaussian(0.0, 1.0));
    let q = ozawa_model::scaled_outcome_density(&obj, &p, 50.0).unwrap();
    let d = l1_distance(&q, &obj.density()).unwrap();
    assert!(d < 0.05, "{d}");
}

#[test]
fn ozawa_variance_tends_to_reference_variance() {
    let g = grid(-8.0, 8.0, 1024);
    let p = ozawa(&g, ProbeFamily64::gaussian(0.0, 0.5), ProbeFamily64::gaussian(0.0, 1.0));
    let (lhs, _) = ozawa_model::variance_identity_check(&p, 1e4).unwrap();
    let v1 = p.phi1.density().variance();
    assert!((lhs / v1 - 1.0).abs() < 0.01, "{lhs} vs {v1}");
}

#[test]
fn ozawa_error_width_floor() {
    let g = grid(-8.0, 8.0, 1024);
    let dx = g.dx();
    // sharp reference: the error width stays at least the reference width
    let p = ozawa(&g, ProbeFamily64::boxed(0.0, 1.0), ProbeFamily64::gaussian(0.0, 1.0));
    let w1 = p.phi1.density().overall_width(0.05).unwrap();
    for lambda in [1.0, 3.0, 10.0, 100.0, 1e4] {
        let e = ozawa_model::error_density(&p, lambda).unwrap();
        for eps in [0.05, 0.2] {
            let we = e.overall_width(eps).unwrap();
            let wr = p.phi1.density().overall_width(eps).unwrap();
            assert!(we >= wr - 2.0 * dx, "lambda {lambda} eps {eps}: {we} < {wr}");
        }
    }
    // spike reference: the width shrinks with lambda
    let spike = OzawaProbe::new(
        WaveFunction64::spike(g, 0.0).unwrap(),
        gauss(&g, 1.0),
        gauss(&g, 1.0),
    )
    .unwrap();
    let e = ozawa_model::error_density(&spike, 100.0).unwrap();
    let w = e.overall_width(0.05).unwrap();
    assert!(w <= 2.0 * 1.96 * 2.0 / 100.0 + 2.0 * dx, "{w} vs {w1}");
}

#[test]
fn ozawa_excess_variance_scales_as_inverse_square() {
    let g = grid(-8.0, 8.0, 1024);
    let p = ozawa(&g, ProbeFamily64::gaussian(0.0, 0.5), ProbeFamily64::gaussian(0.0, 1.0));
    let v1 = p.phi1.density().variance();
    let scaled: Vec<f64> = [1.0, 2.0, 4.0, 10.0]
        .iter()
        .map(|&l| {
            let v = ozawa_model::error_density(&p, l).unwrap().variance();
            (v - v1) * l * l
        })
        .collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi / lo - 1.0 < 0.02, "{scaled:?}");
}

#[test]
fn ozawa_orientation_pinned_by_asymmetric_probe() {
    // a pointer state displaced to +u0 reads w = x - (2/lambda) u0
    let g = grid(-8.0, 8.0, 512);
    let obj = gauss(&g, 0.5);
    let p = ozawa(&g, ProbeFamily64::gaussian(0.0, 0.3), ProbeFamily64::gaussian(1.0, 0.5));
    let q = ozawa_model::scaled_outcome_density(&obj, &p, 2.0).unwrap();
    assert!((q.mean() + 1.0).abs() < 1e-6, "{}", q.mean());
    let e = ozawa_model::error_density(&p, 2.0).unwrap();
    assert!((e.mean() - 1.0).abs() < 1e-6);
    let m = smear(&obj.density(), &e).unwrap();
    assert!(l1_distance(&q, &m).unwrap() < 1e-3);
}

#[test]
fn alt_width_times_gain_is_constant() {
    let g = grid(-8.0, 8.0, 2048);
    let p = AltProbe::new(gauss(&g, 1.0)).unwrap();
    let vals: Vec<f64> = [0.2, 0.4, 0.7]
        .iter()
        .map(|&l: &f64| alt_model::error_density(&p, l).unwrap().overall_width(0.05).unwrap() * l.exp_m1())
        .collect();
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi / lo - 1.0 < 0.02, "{vals:?}");
}

#[test]
fn alt_conditional_probability_on_compact_probe() {
    let g = grid(-8.0, 8.0, 512);
    let dx = g.dx();
    let obj = gauss(&g, 1.0);
    let lambda = 3.0f64.ln();
    let narrow = AltProbe::new(state(&g, ProbeFamily64::boxed(0.0, 1.0))).unwrap();
    let j = alt_model::joint_object_outcome_density(&obj, &narrow, lambda).unwrap();
    let fam = IntervalFamily::covering_support(&j, 2, &NumericPolicy::DEFAULT).unwrap();
    let d = predicted_halfwidth(Model::Alt, ProbeSupports::Alt { n: 1.0 }, lambda).unwrap();
    assert!((d - 0.5).abs() < 1e-12);
    for x in fam.intervals() {
        match conditional_prob(&j, x, d + 2.0 * dx) {
            Ok(p) => assert!(p >= 1.0 - 1e-6, "{x:?}: {p}"),
            Err(waysim_core::Error::NullConditioningEvent(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    let w = repeatability_width(&j, &fam, 1e-6).unwrap();
    assert!(w <= d + 4.0 * dx, "{w}");

    let wide = AltProbe::new(state(&g, ProbeFamily64::boxed(0.0, 4.0))).unwrap();
    let j = alt_model::joint_object_outcome_density(&obj, &wide, lambda).unwrap();
    let d = 4.0 / lambda.exp_m1();
    let fam = IntervalFamily::covering_support(&j, 2, &NumericPolicy::DEFAULT).unwrap();
    let worst = fam
        .intervals()
        .iter()
        .filter_map(|x| conditional_prob(&j, x, d / 4.0).ok())
        .fold(1.0f64, f64::min);
    assert!(worst < 1.0 - 1e-3, "{worst}");
}

#[test]
fn spike_probes_are_perfectly_repeatable() {
    let g = grid(-6.0, 6.0, 256);
    let dx = g.dx();
    let obj = gauss(&g, 0.6);
    let p = OzawaProbe::new(
        WaveFunction64::spike(g, 0.0).unwrap(),
        WaveFunction64::spike(g, 0.0).unwrap(),
        gauss(&g, 1.0),
    )
    .unwrap();
    let j = ozawa_model::joint_object_outcome_density(&obj, &p, 2.0).unwrap();
    assert!(noise_moment(&j).unwrap() < 1e-20);
    let fam = IntervalFamily::covering_support(&j, 1, &NumericPolicy::DEFAULT).unwrap();
    assert!(repeatability_width(&j, &fam, 1e-6).unwrap() <= 2.0 * dx);
    for x in fam.intervals() {
        if let Ok(p) = conditional_prob(&j, x, 0.0) {
            assert!((p - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn alt_large_coupling_concentrates_on_diagonal() {
    let g = grid(-8.0, 8.0, 512);
    let obj = gauss(&g, 1.0);
    let p = AltProbe::new(gauss(&g, 1.0)).unwrap();
    let j = alt_model::joint_object_outcome_density(&obj, &p, 12.0).unwrap();
    let near = j.expect(|x, w| if (w - x).abs() <= g.dx() { 1.0 } else { 0.0 });
    assert!(near > 1.0 - 1e-6, "{near}");
}

#[test]
fn f32_models_run() {
    let g = make_grid(-8.0f32, 8.0, 256).unwrap();
    let obj = sample_wavefunction(&g, &waysim_core::ProbeFamily::gaussian(0.0f32, 1.0)).unwrap();
    let p = AltProbe::new(sample_wavefunction(&g, &waysim_core::ProbeFamily::gaussian(0.0f32, 1.0)).unwrap())
        .unwrap();
    let e = alt_model::error_density(&p, 1.0f32).unwrap();
    let want = 1.0 / 1.0f32.exp_m1().powi(2);
    assert!((e.variance() / want - 1.0).abs() < 0.01);
    let q = alt_model::scaled_outcome_density(&obj, &p, 1.0f32).unwrap();
    assert!((q.variance() / (1.0 + want) - 1.0).abs() < 0.01);
}
