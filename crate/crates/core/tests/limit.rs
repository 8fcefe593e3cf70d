use mushy::limit::{
    integrate, rhs, EventKind, FloorBranch, FloorLaw, IntegrateConfig, LawRegistry, LimitParams, SideLengths,
    VelocityLaw,
};
use mushy::rational::{int, rat};
use mushy::Params;
use proptest::prelude::*;

fn law(alpha: f64, branch: FloorBranch) -> FloorLaw {
    FloorLaw::new(LimitParams::new(alpha, 1.0, 1.0).unwrap(), branch)
}

#[test]
fn rhs_is_constant_between_events() {
    let law = law(0.125, FloorBranch::Retain);
    let trace = integrate(SideLengths::new(0.4, 0.3), &law, &IntegrateConfig::new(1.0, 1e-3)).unwrap();
    let events: Vec<f64> = trace.event_times().collect();
    assert!(events.len() >= 2);
    for w in trace.times.windows(2).zip(trace.states.windows(2)) {
        let ((t0, t1), (s0, s1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        if t1 - t0 < 1e-12 || s1.l1 <= 0.0 || s1.l2 <= 0.0 {
            continue;
        }
        let slope = (s1.l1 - s0.l1) / (t1 - t0);
        let mid = SideLengths::new(0.5 * (s0.l1 + s1.l1), 0.5 * (s0.l2 + s1.l2));
        let v = law.velocity(mid.l2);
        // sub-picosecond steps between close events lose digits in both differences
        let roundoff = 4.0 * f64::EPSILON * (s0.l1 + v.abs() * t1) / (t1 - t0);
        assert!((slope - v).abs() <= 1e-6 * v.abs().max(1.0) + roundoff, "slope {slope} vs rhs {v} at t = {t0}");
    }
}

#[test]
fn registry_laws_all_integrate() {
    let p = Params::with_gamma(rat(1, 8), int(1), rat(1, 100), int(1)).unwrap();
    let reg = LawRegistry::with_defaults();
    for name in reg.names() {
        let law = reg.build(name, &p).unwrap();
        let trace = integrate(SideLengths::new(0.4, 0.4), law.as_ref(), &IntegrateConfig::new(0.5, 1e-3)).unwrap();
        assert!(trace.events.iter().any(|e| e.kind == EventKind::Vanished), "{name}");
    }
}

#[test]
fn square_above_threshold_is_pinned() {
    let trace =
        integrate(SideLengths::new(1.0, 1.0), &law(0.125, FloorBranch::Retain), &IntegrateConfig::new(1.0, 1e-2))
            .unwrap();
    assert!(trace.pinned());
    assert_eq!(rhs(1.0, &LimitParams::new(0.125, 1.0, 1.0).unwrap(), FloorBranch::Retain).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traces_are_nonincreasing(a in 0.01f64..2.0, l1 in 0.05f64..1.5, l2 in 0.05f64..1.5, dissolve in any::<bool>()) {
        let branch = if dissolve { FloorBranch::Dissolve } else { FloorBranch::Retain };
        let trace = integrate(SideLengths::new(l1, l2), &law(a, branch), &IntegrateConfig::new(0.5, 1e-3)).unwrap();
        for w in trace.states.windows(2) {
            prop_assert!(w[1].l1 <= w[0].l1 && w[1].l2 <= w[0].l2);
        }
        prop_assert!(trace.times.windows(2).all(|w| w[1] >= w[0]));
    }
}
