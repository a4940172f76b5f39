use wprelay::montecarlo::{Axis, AxisParam, Engine, ScenarioField, Scheme, TauMode};
use wprelay::SimError;
use wprelay_core::analysis::{outage_exact, outage_high_snr};
use wprelay_core::beamform::Strategy;
use wprelay_core::channel::Scenario;

fn combined(a: f64, b: f64) -> f64 {
    3.0 * a.hypot(b)
}

#[test]
fn suboptimal_never_beats_exact_across_power() {
    let engine = Engine::new(None).unwrap();
    let axis = Axis::new(
        AxisParam::Field(ScenarioField::PsDbm),
        vec![20.0, 30.0, 40.0, 50.0],
    );
    let schemes = [
        Scheme::Relay(Strategy::ExactSearch),
        Scheme::Relay(Strategy::Suboptimal),
    ];
    let template = Scenario {
        n_antennas: 4,
        ..Scenario::default()
    };
    let cells = engine
        .sweep(&template, &axis, &schemes, TauMode::Optimized, 300, 2)
        .unwrap();
    assert_eq!(cells.len(), 8);
    for pair in cells.chunks(2) {
        let (ex, sub) = (&pair[0].estimates.throughput, &pair[1].estimates.throughput);
        assert_eq!(pair[0].axis_value, pair[1].axis_value);
        assert!(sub.value <= ex.value + combined(ex.std_err, sub.std_err));
    }
}

#[test]
fn relay_position_has_interior_optimum() {
    let engine = Engine::new(None).unwrap();
    let axis = Axis::new(
        AxisParam::RelayPosition { span: 12.0 },
        (1..12).map(f64::from).collect(),
    );
    let template = Scenario {
        n_antennas: 20,
        d1: 10.0,
        ps_dbm: 40.0,
        ..Scenario::default()
    };
    let cells = engine
        .sweep(
            &template,
            &axis,
            &[Scheme::Relay(Strategy::Suboptimal)],
            TauMode::Optimized,
            5000,
            4,
        )
        .unwrap();
    let v: Vec<f64> = cells.iter().map(|c| c.estimates.throughput.value).collect();
    let interior = v[1..v.len() - 1]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(interior > v[0] && interior > v[v.len() - 1], "{v:?}");
}

#[test]
fn throughput_grows_with_antennas() {
    let engine = Engine::new(None).unwrap();
    let axis = Axis::parse("n_antennas", vec![2.0, 5.0, 10.0]).unwrap();
    let cells = engine
        .sweep(
            &Scenario::default(),
            &axis,
            &[Scheme::Relay(Strategy::MrtUser)],
            TauMode::Fixed(0.5),
            20_000,
            6,
        )
        .unwrap();
    for w in cells.windows(2) {
        let (a, b) = (&w[0].estimates.throughput, &w[1].estimates.throughput);
        assert!(b.value - a.value > combined(a.std_err, b.std_err));
    }
}

#[test]
fn mrt_outage_matches_analysis_at_ten_antennas() {
    let base = Scenario::default();
    let p_hi = outage_high_snr(&base.build().unwrap(), 0.5).unwrap();
    // power where the exact outage sits near 1e-2
    let mut ps = base.ps_dbm + 20.0 / 11.0 * (p_hi / 1e-2).log10();
    for _ in 0..3 {
        let p = outage_exact(&Scenario { ps_dbm: ps, ..base }.build().unwrap(), 0.5).unwrap();
        ps += 20.0 / 11.0 * (p / 1e-2).log10();
    }
    let params = Scenario { ps_dbm: ps, ..base }.build().unwrap();
    let exact = outage_exact(&params, 0.5).unwrap();
    let mc = Engine::new(None)
        .unwrap()
        .run(
            &params,
            Scheme::Relay(Strategy::MrtUser),
            TauMode::Fixed(0.5),
            1_000_000,
            10,
        )
        .unwrap()
        .outage;
    assert!(
        (exact - mc.value).abs() <= 3.0 * mc.std_err,
        "{exact} vs {} +- {}",
        mc.value,
        mc.std_err
    );
}

#[test]
fn relay_improves_outage_but_costs_throughput_at_high_power() {
    let engine = Engine::new(None).unwrap();
    let base = Scenario {
        d1: 30.0,
        d2: 16.0,
        d3: 16.0,
        alpha: 3.0,
        ..Scenario::default()
    };
    for ps in [-35.0, -25.0, 0.0, 20.0] {
        let p = Scenario { ps_dbm: ps, ..base }.build().unwrap();
        let r = engine
            .run(
                &p,
                Scheme::Relay(Strategy::MrtUser),
                TauMode::Fixed(0.5),
                20_000,
                1,
            )
            .unwrap();
        let d = engine
            .baseline_no_relay(&p, TauMode::Fixed(0.5), 20_000, 1)
            .unwrap();
        assert!(r.outage.value <= d.outage.value);
        if ps >= 0.0 {
            assert!(d.throughput.value > r.throughput.value);
        }
    }
}

#[test]
fn no_relay_with_optimized_split_beats_any_fixed_split() {
    let engine = Engine::new(Some(2)).unwrap();
    let p = Scenario::default().build().unwrap();
    let best = engine
        .baseline_no_relay(&p, TauMode::Optimized, 2000, 5)
        .unwrap()
        .throughput;
    for tau in [0.1, 0.3, 0.5] {
        let fixed = engine
            .baseline_no_relay(&p, TauMode::Fixed(tau), 2000, 5)
            .unwrap()
            .throughput;
        assert!(best.value >= fixed.value);
    }
}

#[test]
fn failing_trials_are_counted_and_bounded() {
    let engine = Engine::new(Some(2)).unwrap();
    let ok = engine
        .average(10_000, 0, |rng| {
            use rand::Rng;
            if rng.random::<f64>() < 5e-4 {
                Err(wprelay_core::Error::DegenerateChannel)
            } else {
                Ok(1.0)
            }
        })
        .unwrap();
    assert!(ok.n_errors > 0 && ok.n_errors <= 10);
    assert_eq!(ok.n_trials + ok.n_errors, 10_000);
    let bad = engine.average(10_000, 0, |_| {
        Err::<f64, _>(wprelay_core::Error::DegenerateChannel)
    });
    assert!(matches!(
        bad,
        Err(SimError::TooManyErrors { errors: 10_000, .. })
    ));
}

#[test]
fn estimates_carry_their_provenance() {
    let engine = Engine::new(Some(1)).unwrap();
    let p = Scenario::default().build().unwrap();
    let e = engine
        .estimate(
            &p,
            Strategy::LargeN,
            TauMode::Optimized,
            wprelay::montecarlo::Metric::Outage,
            500,
            99,
        )
        .unwrap();
    assert_eq!(e.master_seed, 99);
    assert_eq!(e.scheme, Scheme::Relay(Strategy::LargeN));
    assert_eq!(e.params_digest.len(), 16);
    let other = Scenario {
        d1: 21.0,
        ..Scenario::default()
    }
    .build()
    .unwrap();
    let e2 = engine
        .estimate(
            &other,
            Strategy::LargeN,
            TauMode::Optimized,
            wprelay::montecarlo::Metric::Outage,
            500,
            99,
        )
        .unwrap();
    assert_ne!(e.params_digest, e2.params_digest);
    assert!((0.0..=1.0).contains(&e.value) && e.std_err >= 0.0);
}
