use escape_core::couple::*;
use escape_core::dynamics::sample_initial;
use escape_core::replica::Sequential;
use escape_core::rng::{Purpose, Stream};
use escape_core::Error;

#[test]
fn xi_ignores_eta() {
    let plan = make_plan(0, 4, 16).unwrap();
    let geo = CouplingTorus::for_plan(&plan).unwrap();
    let base = Stream::new(11, "xi-ignores-eta");
    for i in 0..20 {
        let s = base.replica(i);
        let xi0 = sample_initial(0.7, geo.torus, &mut s.purpose(Purpose::Xi).rng()).unwrap();
        let e1 = sample_initial(0.2, geo.torus, &mut s.purpose(Purpose::Eta).rng()).unwrap();
        let e2 = sample_initial(0.4, geo.torus, &mut s.label("other").rng()).unwrap();
        let r1 = coupled_evolve_from(e1.as_slice(), xi0.as_slice(), &plan, geo, s, true).unwrap();
        let r2 = coupled_evolve_from(e2.as_slice(), xi0.as_slice(), &plan, geo, s, true).unwrap();
        assert_eq!(r1.xi_record, r2.xi_record);
        assert_eq!(r1.xi_t, r2.xi_t);
        assert_eq!(r1.xi_t, r1.xi_record.as_ref().unwrap().final_configuration().as_slice());
    }
}

#[test]
fn extreme_densities() {
    let plan = make_plan(0, 8, 16).unwrap();
    let s = Stream::new(3, "extremes");
    for i in 0..10 {
        let empty = coupled_evolve(0.0, 0.5, &plan, s.replica(i), false).unwrap();
        assert!(!empty.diagnostics.a && !empty.diagnostics.c);
        assert!(empty.eta_t.iter().all(|&v| v == 0));
        let full = coupled_evolve(0.3, 1.0, &plan, s.replica(i), false).unwrap();
        assert!(!full.diagnostics.c && full.dominates_on_i(&plan));
        assert!(full.xi_t.iter().all(|&v| v == 1));
    }
    assert!(coupled_evolve(0.5, 0.5, &plan, s, false).is_err());
    assert!(make_plan(0, 4, 8).is_err());
}

#[test]
fn invariant_and_particle_counts() {
    let plan = make_plan(0, 4, 16).unwrap();
    let geo = CouplingTorus::for_plan(&plan).unwrap();
    let s = Stream::new(5, "invariant");
    let mut clean = 0;
    for i in 0..300 {
        let r = coupled_evolve(0.05, 0.95, &plan, s.replica(i), false).unwrap();
        let eta0 = sample_initial(0.05, geo.torus, &mut s.replica(i).purpose(Purpose::Eta).rng()).unwrap();
        let xi0 = sample_initial(0.95, geo.torus, &mut s.replica(i).purpose(Purpose::Xi).rng()).unwrap();
        assert_eq!(r.eta_t.iter().filter(|&&v| v == 1).count(), eta0.count());
        assert_eq!(r.xi_t.iter().filter(|&&v| v == 1).count(), xi0.count());
        let d = &r.diagnostics;
        if !d.a && !d.b && d.all_met {
            clean += 1;
            assert!(r.dominates_on_i(&plan), "replica {i}");
            assert!(!d.c);
        }
    }
    assert!(clean > 10, "{clean}");
}

#[test]
fn failure_rates_against_bounds() {
    let rates = domination_failure_rate(0.2, 0.8, (0, 4), 16, 200, Stream::new(9, "rates"), &Sequential).unwrap();
    assert_eq!(rates.invariant_violations, 0);
    assert!(rates.c_not_ab.estimate() <= rates.c.estimate());
    assert!((rates.eta_density.mean() - 0.2).abs() < 4.0 * rates.eta_density.se() + 1e-9);
    assert!((rates.xi_density.mean() - 0.8).abs() < 4.0 * rates.xi_density.se() + 1e-9);
    assert!(rates.plan.bound_a() > 0.0);
}

#[test]
fn pair_meeting_against_reflection() {
    let m = isolated_pair_meeting(64.0, 4, 4000, Stream::new(1, "pairs"), &Sequential).unwrap();
    assert!((m.not_met.estimate() - m.exact).abs() < 4.0 * m.not_met.se(), "{m:?}");
    assert!(m.exact <= m.bound);
    assert!(matches!(isolated_pair_meeting(1.0, 0, 1, Stream::new(1, "x"), &Sequential), Err(Error::Invalid(_))));
}

#[test]
fn covariance_at_small_time() {
    let row = covariance_probe(0.5, 1.0, 64, 4000, Stream::new(2, "cov"), &Sequential).unwrap();
    let se = (row.cov_se * row.cov_se + row.rhs_se * row.rhs_se).sqrt();
    assert!((row.cov_hat - row.rhs_hat).abs() <= 4.0 * se, "{row:?}");
    assert!((row.return_hat - row.bessel_ref).abs() <= 4.0 * row.return_se, "{row:?}");
    assert!(covariance_probe(0.5, 16.0, 64, 1, Stream::new(2, "cov"), &Sequential).is_err());
}

#[test]
fn boxes() {
    let b1 = SpaceTimeBox { x0: 0, x1: 2, t0: 0, t1: 2 };
    let b2 = SpaceTimeBox { x0: 100, x1: 102, t0: 0, t1: 2 };
    assert_eq!(b1.perimeter(), 8);
    assert_eq!(b1.distance(&b2), 98.0);
    let far = SpaceTimeBox { x0: 5, x1: 6, t0: 7, t1: 8 };
    assert_eq!(b1.distance(&far), (9.0f64 + 25.0).sqrt());
    let r = box_decoupling_probe(0.5, 0.5, (b1, b2), column_open, column_open, 128, 400, 50, Stream::new(4, "boxes"), &Sequential)
        .unwrap();
    assert!(r.distance_hypothesis);
    assert!(r.gap.abs() <= 4.0 * r.gap_se + 1e-12, "{r:?}");
    let r = box_decoupling_probe(0.3, 0.6, (b1, b2), fully_occupied, fully_occupied, 128, 200, 50, Stream::new(4, "boxes"), &Sequential)
        .unwrap();
    assert!(r.joint.estimate() <= 1.0);
    let not_monotone = |t: &escape_core::dynamics::TrajectoryRecord, b: &SpaceTimeBox| fully_occupied(t, b).map(|v| !v);
    let e = box_decoupling_probe(0.3, 0.6, (b1, b2), not_monotone, column_open, 32, 1, 200, Stream::new(4, "boxes"), &Sequential);
    assert!(matches!(e, Err(Error::NotMonotone(_))));
}
