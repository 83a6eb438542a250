use fracvisc::cli::{emit_problem, parse_problem_str, ProblemFile, RunOptions};
use fracvisc::dist_order::{Density, OrderWeight};
use fracvisc::solver::{ForcingTerm, ProblemSpec, Profile};
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = OrderWeight> {
    prop_oneof![
        proptest::collection::btree_set(0..40u32, 0..4).prop_flat_map(|ks| {
            let n = ks.len();
            proptest::collection::vec(prop_oneof![-5.0..-1e-3f64, 1e-3..5.0f64], n).prop_map(
                move |cs| {
                    let pairs: Vec<(f64, f64)> = ks
                        .iter()
                        .rev()
                        .zip(cs)
                        .map(|(&k, c)| (c, k as f64 / 20.0 - 0.1))
                        .collect();
                    OrderWeight::atoms(&pairs).unwrap()
                },
            )
        }),
        (0.01..10.0f64).prop_map(|b| OrderWeight::exponential(b).unwrap()),
        (0.0..0.9f64, 0.05..1.0f64, -3.0..3.0f64, 0.0..2.0f64).prop_map(|(lo, w, c, e)| {
            OrderWeight::continuous(
                Density::Power {
                    coef: c,
                    exponent: e,
                },
                lo,
                lo + w,
            )
            .unwrap()
        }),
        (-1.0..0.5f64, 0.1..1.0f64, 0.1..4.0f64).prop_map(|(lo, w, b)| OrderWeight::continuous(
            Density::Exp { base: b },
            lo,
            lo + w
        )
        .unwrap()),
    ]
}

fn profile() -> impl Strategy<Value = Profile> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(Profile::Constant),
        (0.0..3.0f64, 0.0..3.0f64).prop_map(|(c, e)| Profile::Power {
            coef: c,
            exponent: e
        }),
        proptest::collection::vec(0.0..2.0f64, 1..5).prop_map(|v| {
            Profile::samples(
                v.iter()
                    .enumerate()
                    .map(|(i, &x)| (i as f64 * 0.3, x))
                    .collect(),
            )
            .unwrap()
        }),
    ]
}

fn forcing() -> impl Strategy<Value = ForcingTerm> {
    prop_oneof![
        Just(ForcingTerm::Zero),
        profile().prop_map(|g| ForcingTerm::TimeOnly { g }),
        (profile(), 0.1..2.0f64)
            .prop_filter_map("nonnegative h", |(h, a)| ForcingTerm::power_bound(h, a)
                .ok()),
        profile().prop_map(|h| ForcingTerm::Lipschitz { h }),
        (-2.0..2.0f64).prop_map(|amp| ForcingTerm::Pendulum { amp }),
    ]
}

proptest! {
    #[test]
    fn parse_inverts_emit(
        phi1 in weight(),
        phi2 in weight(),
        f in forcing(),
        y0 in -3.0..3.0f64,
        v0 in -3.0..3.0f64,
        horizon in 1e-3..10.0f64,
        extra in 1e-6..5.0f64,
        n in 4usize..5000,
        tol in 1e-14..1e-2f64,
        max_iter in 1usize..1000,
        damping in 0.01..=1.0f64,
    ) {
        let r = y0.abs().max(v0.abs()) + extra;
        let spec = ProblemSpec::new(phi1, phi2, f, y0, v0, horizon, r).unwrap();
        let file = ProblemFile { spec, run: RunOptions { n_steps: n, tol, max_iter, damping } };
        let text = emit_problem(&file);
        let back = parse_problem_str(&text, "emitted", None).unwrap();
        prop_assert_eq!(back, file);
    }
}
