use acyclic_core::radius::{
    build_lower, build_upper, certify, certify_interval, constants, BivariateSystem, RHO_HAT,
};
use acyclic_core::series::make_l;

#[test]
fn interval_at_order_100() {
    let cert = certify_interval(100).unwrap();
    assert!(cert.rho_lo <= cert.rho_hi);
    assert!(cert.max_residual() <= 1e-10);
    assert!(cert.e >= 0.0 && cert.b > 0.0 && cert.b < 1.0);
    let json = serde_json::to_value(&cert).unwrap();
    assert_eq!(json["N"], 100);
}

#[test]
fn orders_are_stable_and_nested() {
    let c100 = certify(100).unwrap();
    let c80 = certify(80).unwrap();
    let c20 = certify(20).unwrap();
    assert!((c100.rho_hi - c80.rho_hi).abs() <= 1e-4);
    for c in [&c20, &c80, &c100] {
        assert!(c.r_lower <= c.r_upper, "order {}", c.order);
    }
    // the order-20 interval is wider and contains the order-100 one
    assert!(
        c20.rho_lo <= c100.rho_lo && c100.rho_hi <= c20.rho_hi,
        "{c20:?}"
    );
}

/// Taylor coefficients `[z^i w^j]` by finite differences of `G` around 0.
fn taylor(g: &dyn BivariateSystem, i: usize, j: usize) -> f64 {
    // central differences in w, forward in z, on a small grid
    let h = 0.05;
    let fact = |n: usize| (1..=n).product::<usize>() as f64;
    let binom = |n: usize, k: usize| fact(n) / (fact(k) * fact(n - k));
    let mut acc = 0.0;
    for a in 0..=i {
        for b in 0..=j {
            let sign = if (i - a + j - b).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            acc += sign * binom(i, a) * binom(j, b) * g.eval(a as f64 * h, b as f64 * h);
        }
    }
    acc / (h.powi((i + j) as i32) * fact(i) * fact(j))
}

#[test]
fn lower_system_dominates_upper() {
    let l = make_l(20);
    let (e, b) = constants(RHO_HAT, 20).unwrap();
    let upper = build_upper(&l, 20);
    let lower = build_lower(&l, e, b, 20).unwrap();
    for i in 1..=4 {
        for j in 0..=(6 - i) {
            let (lo, up) = (taylor(&lower, i, j), taylor(&upper, i, j));
            assert!(lo >= up - 1e-9, "[z^{i} w^{j}] lower {lo} < upper {up}");
        }
    }
    for w in [-0.5, 0.0, 0.25] {
        assert!(lower.eval(0.3, w) >= upper.eval(0.3, w));
    }
}
