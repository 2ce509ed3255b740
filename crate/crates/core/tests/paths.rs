use escape_core::paths::{concatenate, first_intersection, LatticePath, StepSet};
use num_rational::Rational64;
use proptest::prelude::*;

fn walk(start: (i64, i64), moves: &[i64]) -> LatticePath {
    let mut pts = vec![start];
    for &d in moves {
        let p = *pts.last().unwrap();
        pts.push((p.0 + d, p.1 + 1));
    }
    LatticePath::unchecked(pts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn concatenation_stays_in_the_path_set(
        r in 1u32..=3,
        f_moves in prop::collection::vec(-3i64..=3, 1..12),
        g_moves in prop::collection::vec(-3i64..=3, 1..12),
        gx in -4i64..=4,
        gy in -3i64..=3,
    ) {
        let steps = StepSet::detection(r).unwrap();
        let clamp = |m: &[i64]| m.iter().map(|&d| d.clamp(-(r as i64), r as i64)).collect::<Vec<_>>();
        let f = walk((0, 0), &clamp(&f_moves));
        let g = walk((gx, gy), &clamp(&g_moves));
        f.validate(&steps).unwrap();
        g.validate(&steps).unwrap();
        if let Some((s, t)) = first_intersection(&f, &g) {
            prop_assert_eq!(f.interpolate_exact(s).unwrap(), g.interpolate_exact(t).unwrap());
            let h = concatenate(&f, &g, s, t, &steps).unwrap();
            h.validate(&steps).unwrap();
            let fs = s.floor().to_integer() as usize;
            prop_assert_eq!(&h.points()[..=fs], &f.points()[..=fs]);
            let gt = t.floor().to_integer() as usize;
            let tail = &g.points()[(gt + 1).min(g.points().len())..];
            prop_assert_eq!(&h.points()[fs + 1..], tail, "s = {}, t = {}", s, t);
        }
    }

    #[test]
    fn self_concatenation_is_identity(moves in prop::collection::vec(-2i64..=2, 1..10), k in 0usize..10) {
        let steps = StepSet::detection(2).unwrap();
        let f = walk((1, 1), &moves);
        let s = Rational64::from_integer((k % f.points().len()) as i64);
        prop_assert_eq!(concatenate(&f, &f, s, s, &steps).unwrap(), f);
    }
}

#[test]
fn disjoint_paths_do_not_concatenate() {
    let steps = StepSet::detection(1).unwrap();
    let f = walk((0, 0), &[0, 0]);
    let g = walk((5, 0), &[0, 0]);
    assert!(first_intersection(&f, &g).is_none());
    assert!(concatenate(&f, &g, Rational64::from_integer(1), Rational64::from_integer(1), &steps).is_err());
}

