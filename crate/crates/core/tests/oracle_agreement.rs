//! Cross-validation of the three volume routes: adaptive quadrature, the
//! tube sampler and the box sampler, plus exact piecewise-polynomial
//! references available at a = 0 for n = 3, m = 2.

use std::f64::consts::PI;

use tubecut_core::body::{BodySpec, NormalForm, Side, total_volume};
use tubecut_core::oracle::{mc_cut_volume, mc_cut_volume_box, mc_total_volume_box};
use tubecut_core::quadrature::cut_volume;

fn spec325() -> BodySpec {
    BodySpec::new(3, 2, 0.5).unwrap()
}

/// Exact V_geq(0, c) for n = 3, m = 2: the section area is piecewise
/// polynomial, A(u) = 2π²(g(1+ε) − g(max(|u|, 1−ε))) with
/// g(ρ) = (ε²−1)ρ²/2 + 2ρ³/3 − ρ⁴/4, constant on the middle band.
fn exact_slab_volume(eps: f64, c: f64) -> f64 {
    let g = |r: f64| (eps * eps - 1.0) * r * r / 2.0 + 2.0 * r.powi(3) / 3.0 - r.powi(4) / 4.0;
    let area = |u: f64| {
        if u.abs() >= 1.0 + eps {
            0.0
        } else {
            2.0 * PI * PI * (g(1.0 + eps) - g(u.abs().max(1.0 - eps)))
        }
    };
    // Integrate the polynomial pieces with a dense Simpson rule; the
    // integrand is piecewise quartic, so the error is far below 1e-12.
    let lo = c.max(-(1.0 + eps));
    let hi = 1.0 + eps;
    if lo >= hi {
        return 0.0;
    }
    let steps = 40_000;
    let h = (hi - lo) / steps as f64;
    let mut acc = area(lo) + area(hi);
    for k in 1..steps {
        let u = lo + k as f64 * h;
        acc += area(u) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn exact_slab_reference_is_consistent() {
    // V(0, 0) must be half the closed-form volume, and V(0, 1) = 19π²/480.
    let spec = spec325();
    let half = total_volume(&spec) / 2.0;
    assert!((exact_slab_volume(0.5, 0.0) - half).abs() < 1e-9);
    assert!((exact_slab_volume(0.5, 1.0) - 19.0 * PI * PI / 480.0).abs() < 1e-9);
}

#[test]
fn quadrature_tracks_the_exact_slab_family() {
    let spec = spec325();
    for c in [-1.3, -0.75, -0.2, 0.1, 0.65, 0.8, 1.2, 1.4] {
        let nf = NormalForm::new(0.0, c).unwrap();
        let quad = cut_volume(&spec, &nf, Side::Geq, 1e-9).unwrap();
        let exact = exact_slab_volume(0.5, c);
        assert!(
            (quad.value - exact).abs() <= 5e-9,
            "c={c}: {} vs {exact}",
            quad.value
        );
    }
}

#[test]
fn tube_and_box_samplers_agree_on_cut_volumes() {
    let spec = spec325();
    let samples = 400_000;
    for (a, c) in [(0.0, 0.7), (1.2, -0.4), (2.3, 0.1)] {
        let nf = NormalForm::new(a, c).unwrap();
        let tube = mc_cut_volume(&spec, &nf, Side::Geq, samples, 101).unwrap();
        let boxed = mc_cut_volume_box(&spec, Some(&nf), Side::Geq, samples, 202).unwrap();
        let sigma = tube.error_estimate.hypot(boxed.error_estimate);
        assert!(
            (tube.value - boxed.value).abs() <= 4.0 * sigma,
            "({a},{c}): tube {} vs box {} (σ={sigma:.2e})",
            tube.value,
            boxed.value
        );
    }
}

#[test]
fn quadrature_agrees_with_tube_mc_on_degenerate_planes() {
    let spec = spec325();
    let nf = NormalForm::degenerate(0.25).unwrap();
    let quad = cut_volume(&spec, &nf, Side::Geq, 1e-9).unwrap();
    let mc = mc_cut_volume(&spec, &nf, Side::Geq, 1_000_000, 42).unwrap();
    assert!(
        (quad.value - mc.value).abs() <= 4.0 * mc.error_estimate,
        "{} vs {} ± {:.2e}",
        quad.value,
        mc.value,
        mc.error_estimate
    );
    // Exact value for this plane: 4π² ∫_c^ε (ε²−v²) + (ε²−v²)²/4 dv.
    let exact = 1.062_139_067_382_858_6;
    assert!((quad.value - exact).abs() <= 1e-9);
}

#[test]
fn box_oracle_validates_every_spec_dimension() {
    for (n, m) in [(3u32, 2u32), (5, 2), (3, 4)] {
        let spec = BodySpec::new(n, m, 0.5).unwrap();
        let est = mc_total_volume_box(&spec, 2_000_000, 7).unwrap();
        let c0 = total_volume(&spec);
        assert!(
            (est.value - c0).abs() <= 4.0 * est.error_estimate,
            "({n},{m}): {} vs {c0}",
            est.value
        );
    }
}

#[test]
fn quadrature_matches_mc_at_the_spec_reference_plane() {
    // The (a, c) = (0, 1) value from the analytic reference, the quadrature
    // and the tube sampler all coincide.
    let spec = spec325();
    let nf = NormalForm::new(0.0, 1.0).unwrap();
    let exact = 19.0 * PI * PI / 480.0;
    let quad = cut_volume(&spec, &nf, Side::Geq, 1e-10).unwrap();
    assert!((quad.value - exact).abs() <= 1e-10);
    let mc = mc_cut_volume(&spec, &nf, Side::Geq, 2_000_000, 5).unwrap();
    assert!((mc.value - exact).abs() <= 4.0 * mc.error_estimate);
}
