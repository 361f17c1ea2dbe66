mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spdt_core::diffusion::{infection_probability, link_exposure, total_exposure, DiseaseParams, RemovalTime};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Random link in seconds with the class chosen by `class`.
fn random_link(rng: &mut ChaCha8Rng, class: u32) -> (f64, f64, f64, f64) {
    let start = rng.random_range(0..100_000) as f64 * 300.0;
    let ta = rng.random_range(1..=48) as f64 * 300.0;
    let end = start + ta;
    let (join, leave) = match class {
        // neighbour leaves before the host
        0 => {
            let j = start + rng.random_range(0.0..ta - 1.0);
            (j, rng.random_range(j + 1.0..=end))
        }
        // arrives during the stay, leaves after
        1 => {
            let j = start + rng.random_range(0.0..ta);
            (j, end + rng.random_range(1.0..20_000.0))
        }
        // arrives after the host left
        _ => {
            let j = end + rng.random_range(0.0..10_800.0);
            (j, j + rng.random_range(1.0..20_000.0))
        }
    };
    (start, end, join, leave)
}

#[test]
fn exposure_matches_ode_across_link_classes() {
    let params = DiseaseParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for i in 0..300 {
        let (s, e, j, l) = random_link(&mut rng, i % 3);
        let r = RemovalTime::rate(rng.random_range(7.5..300.0));
        let got = link_exposure(s, e, j, l, &params, r);
        // shift to the host's arrival so the reference does not lose digits
        let want = common::exposure_by_ode(0.0, e - s, j - s, l - s, params.generation_rate, params.ventilation, params.volume, r);
        assert!(got > 0.0);
        worst = worst.max(rel(got, want));
    }
    assert!(worst < 1e-6, "worst relative error {worst}");
}

#[test]
fn indirect_only_closed_form() {
    let params = DiseaseParams::default();
    let k = |r: f64| params.generation_rate * params.ventilation / (params.volume * r * r);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let (s, e, j, l) = random_link(&mut rng, 2);
        let r = RemovalTime::rate(rng.random_range(7.5..300.0));
        let (e0, j0, l0) = (e - s, j - s, l - s);
        let closed = k(r) * (1.0 - (-r * e0).exp()) * (r * e0).exp() * ((-r * j0).exp() - (-r * l0).exp());
        let got = link_exposure(s, e, j, l, &params, r);
        assert!(rel(got, closed) < 1e-12, "{got} vs {closed}");
    }
}

#[test]
fn exposure_is_translation_invariant() {
    let params = DiseaseParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..300 {
        // whole seconds, so the shifted inputs are exact
        let (s, e, j, l) = random_link(&mut rng, i % 3);
        let (s, e, j, l) = (s.round(), e.round(), j.round(), l.round().max(j.round() + 1.0));
        let r = RemovalTime::rate(60.0);
        let shift = rng.random_range(1..1000) as f64 * 86_400.0;
        let a = link_exposure(s, e, j, l, &params, r);
        let b = link_exposure(s + shift, e + shift, j + shift, l + shift, &params, r);
        assert!(rel(a, b) < 1e-12);
    }
}

#[test]
fn zero_presence_gives_zero_exposure() {
    let params = DiseaseParams::default();
    assert_eq!(link_exposure(0.0, 3600.0, 600.0, 600.0, &params, 1e-3), 0.0);
    assert_eq!(total_exposure(std::iter::empty(), &params, 1e-3), 0.0);
}

#[test]
fn total_exposure_is_linear_and_order_free() {
    let params = DiseaseParams::default();
    let r = RemovalTime::rate(60.0);
    let one = (0.0, 3600.0, 1800.0, 5400.0);
    let single = total_exposure([one], &params, r);
    assert_eq!(total_exposure([one, one], &params, r), 2.0 * single);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut links: Vec<_> = (0..500).map(|i| random_link(&mut rng, i % 3)).collect();
    let a = total_exposure(links.iter().copied(), &params, r);
    links.reverse();
    links.swap(3, 400);
    let b = total_exposure(links.iter().copied(), &params, r);
    assert!(rel(a, b) < 1e-12);
}

#[test]
fn dose_response_points() {
    assert_eq!(infection_probability(0.0, 0.33), 0.0);
    assert!((infection_probability(2f64.ln() / 0.33, 0.33) - 0.5).abs() < 1e-15);
    assert_eq!(infection_probability(1e6, 0.33), 1.0);
}

#[test]
fn removal_law_has_requested_median_and_range() {
    let law = RemovalTime::new(7.5, 60.0, 300.0).unwrap();
    assert!((law.quantile(0.5) - 60.0).abs() < 1e-9);
    assert!((law.quantile(0.0) - 7.5).abs() < 1e-9);
    assert!((law.quantile(1.0 - 1e-15) - 300.0).abs() < 1e-6);
}
