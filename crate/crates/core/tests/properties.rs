use curvehash::grid::{snap_to_grid, GridShift};
use curvehash::signature::{compute_signature, verify_signature};
use curvehash::{constrained_distance, continuous_frechet_1d, discrete_frechet, dtw, Curve, DistanceKind};
use proptest::prelude::*;

fn curve(dim: usize, max_len: usize) -> impl Strategy<Value = Curve> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), 1..=max_len)
        .prop_map(|points| Curve::new("c", points).unwrap())
}

fn pair(max_len: usize) -> impl Strategy<Value = (Curve, Curve)> {
    (1usize..=3).prop_flat_map(move |d| (curve(d, max_len), curve(d, max_len)))
}

fn triple(max_len: usize) -> impl Strategy<Value = (Curve, Curve, Curve)> {
    (1usize..=3).prop_flat_map(move |d| (curve(d, max_len), curve(d, max_len), curve(d, max_len)))
}

proptest! {
    #[test]
    fn distances_are_symmetric((p, q) in pair(8)) {
        for kind in [
            DistanceKind::Frechet,
            DistanceKind::Dtw,
            DistanceKind::AnchoredFrechet(4),
            DistanceKind::SpeedFrechet(2),
            DistanceKind::SpeedDtw(3),
        ] {
            let a = constrained_distance(&p, &q, kind).ok();
            let b = constrained_distance(&q, &p, kind).ok();
            match (a, b) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9),
                (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
            }
        }
    }

    #[test]
    fn frechet_satisfies_the_triangle_inequality((p, q, s) in triple(7)) {
        let pq = discrete_frechet(&p, &q).unwrap();
        let qs = discrete_frechet(&q, &s).unwrap();
        let ps = discrete_frechet(&p, &s).unwrap();
        prop_assert!(ps <= pq + qs + 1e-9);
    }

    #[test]
    fn frechet_is_at_most_dtw((p, q) in pair(8)) {
        prop_assert!(discrete_frechet(&p, &q).unwrap() <= dtw(&p, &q).unwrap() + 1e-9);
    }

    #[test]
    fn continuous_is_at_most_discrete(p in curve(1, 10), q in curve(1, 10)) {
        let c = continuous_frechet_1d(&p, &q).unwrap();
        prop_assert!(c <= discrete_frechet(&p, &q).unwrap() + 1e-12);
        prop_assert!((c - continuous_frechet_1d(&q, &p).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn wide_constraints_match_unconstrained((p, q) in pair(8)) {
        let wide = 2 * p.len().max(q.len());
        let f = discrete_frechet(&p, &q).unwrap();
        let t = dtw(&p, &q).unwrap();
        prop_assert!((constrained_distance(&p, &q, DistanceKind::AnchoredFrechet(wide)).unwrap() - f).abs() <= 1e-9);
        prop_assert!((constrained_distance(&p, &q, DistanceKind::SpeedFrechet(wide)).unwrap() - f).abs() <= 1e-9);
        prop_assert!((constrained_distance(&p, &q, DistanceKind::AnchoredDtw(wide)).unwrap() - t).abs() <= 1e-9);
        prop_assert!((constrained_distance(&p, &q, DistanceKind::SpeedDtw(wide)).unwrap() - t).abs() <= 1e-9);
    }

    #[test]
    fn tighter_constraints_never_help((p, q) in pair(7)) {
        let f = discrete_frechet(&p, &q).unwrap();
        if let Ok(a) = constrained_distance(&p, &q, DistanceKind::AnchoredFrechet(2)) {
            prop_assert!(a + 1e-12 >= f);
            prop_assert!(a + 1e-12 >= constrained_distance(&p, &q, DistanceKind::AnchoredFrechet(4)).unwrap());
        }
        if let Ok(s) = constrained_distance(&p, &q, DistanceKind::SpeedFrechet(1)) {
            prop_assert!(s + 1e-12 >= constrained_distance(&p, &q, DistanceKind::SpeedFrechet(2)).unwrap());
        }
    }

    #[test]
    fn equal_grid_keys_bound_the_distance(
        (p, q) in pair(6),
        delta in 0.1f64..20.0,
        frac in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let offset = frac[..p.dim()].iter().map(|f| f * delta).collect();
        let shift = GridShift::new(delta, offset).unwrap();
        if snap_to_grid(&p, &shift).unwrap() == snap_to_grid(&q, &shift).unwrap() {
            prop_assert!(discrete_frechet(&p, &q).unwrap() <= (p.dim() as f64).sqrt() * delta);
        }
    }

    #[test]
    fn signatures_are_valid(p in curve(1, 40), delta in 0.01f64..30.0) {
        let sig = compute_signature(&p, delta).unwrap();
        prop_assert_eq!(sig.indices()[0], 0);
        prop_assert_eq!(*sig.indices().last().unwrap(), p.len() - 1);
        prop_assert!(verify_signature(&p, &sig).is_ok(), "{:?}", verify_signature(&p, &sig));
    }
}
