use balltrack_core::detect::{circumcenter, vote_center, vote_circle, Bounds, VoteParams};
use balltrack_core::Point;
use nalgebra::{Matrix2, Vector2};
use proptest::prelude::*;

/// Intersection of two perpendicular bisectors.
fn bisector_oracle(a: Point, b: Point, c: Point) -> Option<Point> {
    let m = Matrix2::new(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
    let rhs = Vector2::new(
        (b.x * b.x - a.x * a.x + b.y * b.y - a.y * a.y) / 2.0,
        (c.x * c.x - a.x * a.x + c.y * c.y - a.y * a.y) / 2.0,
    );
    m.lu().solve(&rhs).map(|v| Point::new(v.x, v.y))
}

fn collinear(a: Point, b: Point, c: Point) -> bool {
    (b.x - a.x) * (c.y - a.y) == (b.y - a.y) * (c.x - a.x)
}

fn int_point() -> impl Strategy<Value = Point> {
    (-1000i32..1000, -1000i32..1000).prop_map(Point::from)
}

fn close(a: Point, b: Point) -> bool {
    let tol = |v: f64| 1e-9 * v.abs().max(1.0);
    (a.x - b.x).abs() <= tol(b.x) && (a.y - b.y).abs() <= tol(b.y)
}

proptest! {
    #[test]
    fn matches_bisector_oracle(a in int_point(), b in int_point(), c in int_point()) {
        prop_assume!(!collinear(a, b, c));
        let got = circumcenter(a, b, c).expect("non-collinear");
        let want = bisector_oracle(a, b, c).expect("non-singular");
        prop_assert!(close(got, want), "{got:?} vs {want:?}");
    }

    #[test]
    fn equidistant_from_all_three(a in int_point(), b in int_point(), c in int_point()) {
        prop_assume!(!collinear(a, b, c));
        let o = circumcenter(a, b, c).unwrap();
        let (da, db, dc) = (o.distance(a), o.distance(b), o.distance(c));
        let tol = 1e-9 * da.max(1.0);
        prop_assert!((da - db).abs() <= tol && (da - dc).abs() <= tol);
    }

    #[test]
    fn permutation_invariant(a in int_point(), b in int_point(), c in int_point()) {
        let base = circumcenter(a, b, c);
        for p in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            prop_assert_eq!(circumcenter(p.0, p.1, p.2), base);
        }
    }

    #[test]
    fn collinear_is_degenerate(a in int_point(), dx in -50i32..50, dy in -50i32..50, s in -5i32..5, t in -5i32..5) {
        let b = Point::new(a.x + f64::from(s * dx), a.y + f64::from(s * dy));
        let c = Point::new(a.x + f64::from(t * dx), a.y + f64::from(t * dy));
        prop_assert_eq!(circumcenter(a, b, c), None);
    }
}

fn ring(cx: i32, cy: i32, r: f64) -> Vec<Point> {
    (0..360)
        .map(|k| {
            let t = f64::from(k).to_radians();
            Point::new(
                f64::from(cx) + (r * t.cos()).round(),
                f64::from(cy) + (r * t.sin()).round(),
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vote_is_translation_equivariant(r in 8.0f64..40.0, tx in -100i32..100, ty in -100i32..100, seed: u64) {
        let bounds = Bounds::new(800, 800);
        let params = VoteParams::default();
        let pts = ring(400, 400, r);
        let moved: Vec<Point> = pts.iter().map(|p| Point::new(p.x + f64::from(tx), p.y + f64::from(ty))).collect();
        let a = vote_center(&pts, bounds, &params, seed).unwrap();
        let b = vote_center(&moved, bounds, &params, seed).unwrap();
        prop_assert_eq!(b.center, Point::new(a.center.x + f64::from(tx), a.center.y + f64::from(ty)));
        prop_assert_eq!((a.c_max, a.n_votes, a.draws), (b.c_max, b.n_votes, b.draws));
    }

    #[test]
    fn vote_is_deterministic_and_bounded(r in 8.0f64..40.0, seed: u64) {
        let params = VoteParams::default();
        let pts = ring(100, 100, r);
        let a = vote_circle(&pts, Bounds::new(200, 200), &params, seed).unwrap();
        prop_assert_eq!(a, vote_circle(&pts, Bounds::new(200, 200), &params, seed).unwrap());
        prop_assert!(a.c_max <= params.center_threshold);
        prop_assert!(a.n_votes <= a.draws && a.draws <= params.max_votes);
        prop_assert!(a.quality > 0.0 && a.quality <= 1.0);
    }
}
