use mean_king::linalg::{inner_product, C64};
use mean_king::mub::{mub_family, verify_mub, MubFamily};

fn closed_form(d: usize, mu: usize, j: usize, k: usize) -> C64 {
    // Odd prime d, mu >= 1: omega^{mu k^2 + j k} / sqrt(d).
    let phase = 2.0 * std::f64::consts::PI * ((mu * k * k + j * k) % d) as f64 / d as f64;
    C64::from_polar(1.0 / (d as f64).sqrt(), phase)
}

#[test]
fn overlaps_are_one_over_d_for_every_supported_dimension() {
    for d in [2usize, 3, 4, 5, 7, 11, 13] {
        let family = mub_family(d).unwrap();
        let report = verify_mub(&family, 1e-10);
        assert!(report.pass, "d = {d}: {report:?}");
        let (a, b) = (family.vector(0, 0), family.vector(d, d - 1));
        let overlap = inner_product(a, b).unwrap().norm_sqr();
        assert!((overlap - 1.0 / d as f64).abs() < 1e-12);
    }
}

#[test]
fn prime_family_matches_gauss_sum_up_to_phase() {
    let d = 5;
    let family = mub_family(d).unwrap();
    for mu in 1..=d {
        for j in 0..d {
            let v = family.vector(mu, j).amplitudes();
            let w: Vec<C64> = (0..d).map(|k| closed_form(d, mu, j, k)).collect();
            let inner: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            assert!((inner.norm() - 1.0).abs() < 1e-12, "mu = {mu}, j = {j}");
        }
    }
}

#[test]
fn json_round_trip_preserves_family() {
    let family = mub_family(7).unwrap();
    let text = serde_json::to_string(&family.to_json()).unwrap();
    let back = MubFamily::from_json(serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(family, back);
}
