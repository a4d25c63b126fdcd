use lexsamp_web::demo;

const FIVE: &str = "n 5\n1 3\n1 5\n2 3\n2 5\n3 5\n4 5\n";

#[test]
fn histogram_covers_all_extensions() {
    let h = demo::histogram(FIVE, 4000, 1).unwrap();
    assert_eq!(h.count, 8);
    assert_eq!(h.report.trials, 4000);
    assert_eq!(h.report.unmatched, 0);
    assert!(h.passed, "{:?}", h.report);
    let total: f64 = h.frequencies.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn histogram_rejects_bad_input() {
    assert!(demo::histogram("n 3\n1 2\n2 1\n", 10, 0).unwrap_err().contains("cycle"));
    assert!(demo::histogram(FIVE, 0, 0).is_err());
    assert!(demo::histogram("n 11\n", 10, 0).is_err());
}

#[test]
fn json_is_deterministic() {
    let a = demo::to_json(&demo::histogram(FIVE, 500, 9).unwrap());
    let b = demo::to_json(&demo::histogram(FIVE, 500, 9).unwrap());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["frequencies"].as_array().unwrap().len(), 8);
}

#[test]
fn coalescence_curve_is_monotone() {
    let c = demo::coalescence(5, 500, 3).unwrap();
    assert_eq!(c.recommended_t, 35);
    assert_eq!(c.curve[0].t, 0);
    assert_eq!(c.curve[0].fraction, 0.0);
    assert!(c.curve.windows(2).all(|w| w[0].fraction <= w[1].fraction));
    assert!(c.curve.last().unwrap().t <= 70);
    assert!(demo::coalescence(1, 10, 0).is_err());
    assert!(demo::coalescence(5, 0, 0).is_err());
}

#[test]
fn trace_ends_in_an_extension() {
    let t = demo::trace(FIVE, 4, 10_000).unwrap();
    assert!(t.coalesced);
    assert_eq!(t.states[0], vec![None, None, None, None, Some(1)]);
    let last: Vec<usize> = t.states.last().unwrap().iter().map(|s| s.unwrap()).collect();
    let poset = lexsamp::Poset::parse(FIVE).unwrap();
    let p = lexsamp::Permutation::from_one_based(&last).unwrap();
    assert!(poset.original().is_linear_extension(p.as_slice()));
    // at most one placeholder is promoted per sweep
    for w in t.states.windows(2) {
        let stars = |r: &Vec<Option<usize>>| r.iter().filter(|s| s.is_none()).count();
        assert!(stars(&w[0]) <= stars(&w[1]) + 1);
    }
}

#[test]
fn trace_respects_sweep_limit() {
    let t = demo::trace(FIVE, 4, 1).unwrap();
    assert!(t.states.len() <= 2);
    assert!(!t.coalesced);
    assert!(demo::trace(FIVE, 4, 1_000_000).is_err());
}
