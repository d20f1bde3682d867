use scpi_core::dynamics::{classify, iterate_orbit, parse_start};
use scpi_core::series::pi_oracle;
use scpi_core::{FixedReal, Precision};

fn p() -> Precision {
    Precision::new(128)
}

/// Limit class by plain double-precision iteration.
fn float_class(a0: f64) -> i64 {
    let mut a = a0;
    for _ in 0..10_000 {
        a += a.sin();
    }
    (a / std::f64::consts::PI).round() as i64
}

#[test]
fn classes_agree_with_float_iteration() {
    for s in [
        "1", "2", "3", "7", "-1", "-7", "10", "100.5", "0.25", "-3.5", "20", "-50.1",
    ] {
        let a0 = parse_start(s, p()).unwrap();
        let orbit = iterate_orbit(&a0, p(), 200, 64).unwrap();
        let x: f64 = s.parse().unwrap();
        assert_eq!(orbit.class.odd_multiple, float_class(x), "a0 = {s}");
        assert_eq!(orbit.class.odd_multiple.rem_euclid(2), 1);
    }
}

#[test]
fn negation_mirrors_the_orbit() {
    for s in ["0.5", "2", "7", "13.25"] {
        let a = parse_start(s, p()).unwrap();
        let fwd = iterate_orbit(&a, p(), 200, 64).unwrap();
        let back = iterate_orbit(&-&a, p(), 200, 64).unwrap();
        assert_eq!(fwd.class.odd_multiple, -back.class.odd_multiple);
        assert_eq!(fwd.records.len(), back.records.len());
        for (x, y) in fwd.records.iter().zip(&back.records) {
            assert_eq!(x.a_k, -&y.a_k);
        }
    }
}

#[test]
fn shifting_by_two_pi_shifts_the_class() {
    let pi = pi_oracle(p().widened(16));
    for s in ["1", "-2.5"] {
        let a = parse_start(s, p()).unwrap();
        let shifted = (&a + &pi.mul_int(2)).rescale(p().working());
        let c0 = classify(&a, p()).unwrap();
        let c1 = classify(&shifted, p()).unwrap();
        assert_eq!(c1.n, c0.n + 1);
        assert_eq!(c1.odd_multiple, c0.odd_multiple + 2);
    }
}

#[test]
fn capture_zone_contracts_cubically() {
    let p = Precision::new(256);
    let pi = pi_oracle(p.widened(16));
    for num in 1..20i64 {
        // b = π − num/20 ∈ (π − 1, π)
        let d = FixedReal::new(num, 0)
            .div(&FixedReal::from_int(20), p)
            .unwrap();
        let b = (&pi - &d).rescale(p.working());
        let next = &b + &scpi_core::series::sin_full(&b, p).unwrap();
        let e0 = (&pi - &b).abs();
        let e1 = (&pi - &next).abs();
        let cube = e0
            .mul(&e0, p)
            .mul(&e0, p)
            .div(&FixedReal::from_int(6), p)
            .unwrap();
        assert!(e1 <= &cube + &FixedReal::pow2_neg(250));
    }
}

#[test]
fn degenerate_starts() {
    for s in ["0", "2pi", "-4pi"] {
        let a = parse_start(s, p()).unwrap();
        let orbit = iterate_orbit(&a, p(), 200, 64).unwrap();
        assert!(orbit.class.degenerate, "{s}");
        assert_eq!(orbit.class.odd_multiple % 2, 0);
    }
}
