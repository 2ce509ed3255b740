use escape_core::paths::{find_crossing, is_open_crossing, CrossingRegion, LatticePath, SiteField, StepSet};
use escape_core::precise::Precise;
use escape_core::renorm::*;
use escape_core::rng::Stream;
use escape_core::Error;
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::Rng;

fn covering_field(regions: &[CrossingRegion], open: impl FnMut((i64, i64)) -> bool) -> SiteField {
    let x0 = regions.iter().map(|r| r.bounding_box().0 .0).min().unwrap();
    let y0 = regions.iter().map(|r| r.bounding_box().0 .1).min().unwrap();
    let x1 = regions.iter().map(|r| r.bounding_box().1 .0).max().unwrap();
    let y1 = regions.iter().map(|r| r.bounding_box().1 .1).max().unwrap();
    SiteField::from_fn((x0, y0), (x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize, open)
}

fn sub_crossings(regions: &[CrossingRegion], field: &SiteField, steps: &StepSet) -> Vec<Option<LatticePath>> {
    regions.iter().map(|r| find_crossing(r, field, steps).unwrap()).collect()
}

#[test]
fn ladder_growth_and_aspect() {
    let lad = ScaleLadder::from_u64(16, 5).unwrap();
    for k in 0..5 {
        assert!(lad.growth_holds(k), "k = {k}");
    }
    for k in 2..=5 {
        assert!(lad.aspect_holds(k));
        let per = 4 * (lad.l_i64(k).unwrap() + lad.big_l_i64(k).unwrap());
        assert!(per <= 12 * lad.l_i64(k).unwrap());
    }
}

#[test]
fn chain_facts_up_to_four() {
    let lad = ScaleLadder::from_u64(16, 4).unwrap();
    for k in 2..=4 {
        let fam = chain_points(&lad, k).unwrap();
        assert!(fam.cardinality_bound_holds(), "k = {k}: {}", fam.cardinality());
        assert!(corner_inequality(&lad, k).unwrap());
        assert!(chain_separation(&lad, k).unwrap().positive());
    }
    assert!(chain_separation(&lad, 1).is_err());
}

#[test]
fn separation_from_corners() {
    let lad = ScaleLadder::from_u64(16, 3).unwrap();
    let s2 = chain_separation(&lad, 2).unwrap();
    // Y = (448, 1088); line 160 x - 64 y - 160 * 224 = 0
    assert_eq!(s2.numerator, BigInt::from(160 * 448 - 64 * 1088 - 160 * 224));
    assert_eq!(s2.norm_sq, BigUint::from(64u32 * 64 + 160 * 160));
    assert!((s2.distance - 33792.0 / (29696f64).sqrt()).abs() < 1e-9);
    let s3 = chain_separation(&lad, 3).unwrap();
    assert_eq!(s3.numerator, BigInt::from(-1_397_760));
    assert!(s3.same_side_as_first_chain());
    let r = s3.ratio();
    assert!((0.1..=10.0).contains(&r), "ratio {r}");
}

#[test]
fn lift_in_open_field() {
    let lad = ScaleLadder::from_u64(16, 2).unwrap();
    let steps = StepSet::staircase();
    let regions = lift_regions(&lad, 2).unwrap();
    assert_eq!(regions.len(), 20);
    let field = covering_field(&regions, |_| true);
    let subs = sub_crossings(&regions, &field, &steps);
    let h = lift_crossings(&subs, &lad, 2, &steps).unwrap();
    h.validate(&steps).unwrap();
    let target = lad.region_at(2, (0, 0)).unwrap();
    assert!(is_open_crossing(&target, &h, &field).unwrap());
}

#[test]
fn lift_reports_missing_region() {
    let lad = ScaleLadder::from_u64(16, 2).unwrap();
    let steps = StepSet::staircase();
    let regions = lift_regions(&lad, 2).unwrap();
    let field = covering_field(&regions, |_| true);
    let mut subs = sub_crossings(&regions, &field, &steps);
    subs[13] = None;
    assert_eq!(lift_crossings(&subs, &lad, 2, &steps).unwrap_err(), Error::MissingSubCrossing(13));
}

#[test]
fn lift_at_base_four() {
    let lad = ScaleLadder::from_u64(4, 2).unwrap();
    assert!(!corner_inequality(&lad, 2).unwrap());
    let steps = StepSet::staircase();
    let regions = lift_regions(&lad, 2).unwrap();
    let field = covering_field(&regions, |_| true);
    let subs = sub_crossings(&regions, &field, &steps);
    let h = lift_crossings(&subs, &lad, 2, &steps).unwrap();
    assert!(is_open_crossing(&lad.region_at(2, (0, 0)).unwrap(), &h, &field).unwrap());
    assert_eq!(h.start(), (8, 0));
    assert_eq!(h.end(), (48, 40));
}

#[test]
fn lift_on_random_fields_is_sound() {
    let lad = ScaleLadder::from_u64(16, 2).unwrap();
    let steps = StepSet::staircase();
    let regions = lift_regions(&lad, 2).unwrap();
    let target = lad.region_at(2, (0, 0)).unwrap();
    let mut lifted = 0;
    for seed in 0..20 {
        let mut rng = Stream::new(seed, "lift").rng();
        let field = covering_field(&regions, |_| rng.gen::<f64>() < 0.9);
        let subs = sub_crossings(&regions, &field, &steps);
        if subs.iter().any(Option::is_none) {
            continue;
        }
        let h = lift_crossings(&subs, &lad, 2, &steps).unwrap();
        assert!(is_open_crossing(&target, &h, &field).unwrap());
        lifted += 1;
    }
    assert!(lifted > 0);
}

#[test]
fn density_ladder_thirty_digits() {
    let lad = ScaleLadder::from_u64(16, 2).unwrap();
    let d = density_ladder("0.5", (1, 16), &lad).unwrap();
    let pinned = "8.90032556136601813002475906061";
    let (lo, hi) = d.u[0].sci(31);
    assert!(lo.starts_with(pinned) && hi.starts_with(pinned), "{lo} {hi}");
    assert!(d.u[0].agreed_digits() >= 30);
    for k in 0..d.truncation {
        assert_eq!(d.u[k].lt(&d.u[k + 1]), Some(true));
        let back = d.u[k + 1].mul(&d.factors[k]);
        assert!((back.mid_f64() - d.u[k].mid_f64()).abs() <= 1e-25 * d.u[k].mid_f64());
    }
}

#[test]
fn trigger_bounds() {
    let lad = ScaleLadder::from_u64(16, 2).unwrap();
    let half = trigger_bound_exclusion(&lad, 2, 0.5).unwrap();
    assert_eq!(half.verdict, Verdict::Holds);
    assert!(half.bound.agreed_digits() >= 30);
    assert!((half.bound.mid_f64() / 2.577_468_220_346_184e-20 - 1.0).abs() < 1e-12);
    let low = trigger_bound_exclusion(&lad, 2, 0.3).unwrap();
    assert!((low.bound.mid_f64() / 1.020_192_643_892_939_4e-10 - 1.0).abs() < 1e-12);
    assert_eq!(low.verdict, Verdict::Fails);
    let mut last = f64::INFINITY;
    for r in [0.0, 0.1, 0.3, 0.5, 0.9, 1.0] {
        let b = trigger_bound_exclusion(&lad, 2, r).unwrap().bound.mid_f64();
        assert!(b < last);
        last = b;
    }
}

#[test]
fn threshold_at_sixteen() {
    let lad = ScaleLadder::from_u64(16, 2).unwrap();
    let row = recursion_ledger(&lad, 2, (0.0, 1e-12), None, power_error(8), 6).unwrap();
    // 100 (1/512 + 512^7 / 3072^8)
    let exact = 100.0 * (1.0 / 512.0 + 512f64.powi(7) / 3072f64.powi(8));
    assert!((row.threshold.mid_f64() / exact - 1.0).abs() < 1e-14);
    assert_eq!(row.threshold_verdict, Verdict::Holds);
    assert_eq!(row.trigger, Verdict::Holds);
    let x = BigUint::from(3072u32);
    assert!(power_error(8)(&x).unwrap().le(&Precise::from_u64(1)).unwrap());
    assert_eq!(row.m.to_u64(), Some(chain_points(&{ let mut l = lad.clone(); l.extend_to(3); l }, 3).unwrap().cardinality() as u64));
}
