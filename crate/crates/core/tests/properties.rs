//! Property tests: exact arithmetic against a big-rational reference, the
//! geometric predicates, visibility against direct segment tests, and the
//! solver's refinement invariants on generated instances.

use bendext::cli_io::{generate, Family, GenSpec};
use bendext::extension_solver::{solve, Verdict};
use bendext::geometry_core::{
    diff_of_products_sign, intersection_points, on_segment, orient_sign, orient_value, polygon_intersection,
    ring_locate, segment_intersect, Frac, Location, Point, Rational, Segment, SegmentIntersection, SimplePolygon,
};
use bendext::instance_model::Instance;
use bendext::verifier::{validate_drawing, winding_number};
use bendext::visibility::visibility_polygon;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// Rationals over both the machine-word fast path and big numerators.
fn rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        (-1000i64..1000, 1i64..50).prop_map(|(n, d)| Rational::new(n, d)),
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d)),
        (any::<i128>(), 1u64..u64::MAX).prop_map(|(n, d)| Rational::new(BigInt::from(n) * 3 + 1, d)),
    ]
}

fn small_point() -> impl Strategy<Value = Point> {
    (-20i64..20, -20i64..20).prop_map(|(x, y)| Point::int(x, y))
}

fn point() -> impl Strategy<Value = Point> {
    prop_oneof![small_point(), (rational(), rational()).prop_map(|(x, y)| Point::new(x, y))]
}

fn reference(r: &Rational) -> BigRational {
    r.to_big_rational()
}

fn family() -> impl Strategy<Value = Family> {
    prop::sample::select(Family::ALL.to_vec())
}

fn instance() -> impl Strategy<Value = Instance> {
    (family(), 6usize..16, any::<u64>()).prop_filter_map("generator rejected the parameters", |(f, n, seed)| {
        let m = (seed as usize) % (n - 2);
        generate(&GenSpec::new(f, n, m, seed)).ok()
    })
}

fn grid_probes(poly: &SimplePolygon, k: i64) -> Vec<Point> {
    let bb = poly.bbox();
    let (w, h) = (&bb.max.x - &bb.min.x, &bb.max.y - &bb.min.y);
    let mut out = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let fx = Rational::new(2 * i + 1, 2 * k);
            let fy = Rational::new(2 * j + 1, 2 * k);
            out.push(Point::new(&bb.min.x + &(&w * &fx), &bb.min.y + &(&h * &fy)));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arithmetic_matches_reference(a in rational(), b in rational()) {
        let (ra, rb) = (reference(&a), reference(&b));
        prop_assert_eq!(reference(&(&a + &b)), &ra + &rb);
        prop_assert_eq!(reference(&(&a - &b)), &ra - &rb);
        prop_assert_eq!(reference(&(&a * &b)), &ra * &rb);
        if !b.is_zero() {
            prop_assert_eq!(reference(&(&a / &b)), &ra / &rb);
        }
        prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
        prop_assert_eq!(a == b, ra == rb);
    }

    #[test]
    fn unreduced_fractions_agree(a in rational(), b in rational(), c in rational()) {
        let (fa, fb, fc) = (Frac::of(&a), Frac::of(&b), Frac::of(&c));
        prop_assert_eq!(fa.mul(&fb).add(&fc).to_rational(), &(&a * &b) + &c);
        prop_assert_eq!(fa.sub(&fb).cmp_to(&fc), (&a - &b).cmp(&c));
        prop_assert_eq!(fa.signum(), a.signum());
    }

    #[test]
    fn diff_of_products_sign_is_exact(a in rational(), b in rational(), c in rational(), d in rational()) {
        let expect = (&(&a * &b) - &(&c * &d)).signum();
        prop_assert_eq!(diff_of_products_sign(&a, &b, &c, &d), expect);
    }

    #[test]
    fn text_and_json_round_trip(a in rational()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Rational>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), a);
    }

    #[test]
    fn orientation_is_exact_and_antisymmetric(a in point(), b in point(), c in point()) {
        let s = orient_sign(&a, &b, &c);
        let exact = match orient_value(&a, &b, &c).signum() {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        };
        prop_assert_eq!(s, exact);
        prop_assert_eq!(orient_sign(&b, &a, &c), -s);
        prop_assert_eq!(orient_sign(&b, &c, &a), s);
    }

    #[test]
    fn segment_intersection_is_symmetric_and_consistent(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
        prop_assume!(a != b && c != d);
        let (s, t) = (Segment::new(a.clone(), b.clone()), Segment::new(c.clone(), d.clone()));
        let kind = segment_intersect(&s, &t);
        prop_assert_eq!(kind, segment_intersect(&t, &s));
        let pts = intersection_points(&s, &t);
        for p in &pts {
            prop_assert!(on_segment(p, &a, &b) && on_segment(p, &c, &d));
        }
        match kind {
            SegmentIntersection::Disjoint => prop_assert!(pts.is_empty()),
            SegmentIntersection::ProperCross => {
                prop_assert_eq!(pts.len(), 1);
                prop_assert!(pts[0] != a && pts[0] != b && pts[0] != c && pts[0] != d);
            }
            SegmentIntersection::EndpointTouch => prop_assert_eq!(pts.len(), 1),
            SegmentIntersection::Overlap => prop_assert_eq!(pts.len(), 2),
        }
    }

    #[test]
    fn instance_json_round_trips(inst in instance()) {
        let json = inst.to_json();
        let back = Instance::from_json(&json).unwrap();
        prop_assert_eq!(back.to_json(), json);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn location_agrees_with_winding_number(inst in instance()) {
        let ring = inst.boundary().corners();
        for q in grid_probes(inst.boundary(), 9) {
            let loc = ring_locate(ring, &q);
            match winding_number(ring, &q) {
                None => prop_assert_eq!(loc, Location::OnBoundary),
                Some(0) => prop_assert_eq!(loc, Location::Outside),
                Some(w) => {
                    prop_assert_eq!(w, 1);
                    prop_assert_eq!(loc, Location::Inside);
                }
            }
        }
    }

    #[test]
    fn visibility_region_matches_segment_tests(inst in instance(), corner in any::<prop::sample::Index>()) {
        let poly = inst.boundary();
        let p = poly.corner(corner.index(poly.len())).clone();
        let vis = visibility_polygon(poly, &p).unwrap();
        prop_assert!(vis.region.area() <= poly.area());
        for q in grid_probes(poly, 10) {
            if poly.locate(&q) != Location::Inside {
                continue;
            }
            let sees = poly.segment_in_closure(&p, &q);
            let inside = vis.region.locate(&q) != Location::Outside;
            prop_assert_eq!(sees, inside, "probe {:?} from {:?}", q, p);
        }
    }

    #[test]
    fn intersection_pieces_lie_in_both(a in instance(), b in instance()) {
        let (pa, pb) = (a.boundary(), b.boundary());
        let pieces = polygon_intersection(pa, pb);
        let total = pieces.iter().fold(Rational::zero(), |s, p| &s + &p.area());
        prop_assert!(total <= pa.area().min(pb.area()));
        for piece in &pieces {
            let q = piece.interior_point();
            prop_assert_eq!(pa.locate(&q), Location::Inside);
            prop_assert_eq!(pb.locate(&q), Location::Inside);
        }
        for q in grid_probes(pa, 8) {
            let both = pa.locate(&q) == Location::Inside && pb.locate(&q) == Location::Inside;
            let any = pieces.iter().any(|p| p.locate(&q) != Location::Outside);
            if both {
                prop_assert!(any, "{:?} lies in both but in no piece", q);
            }
        }
    }

    #[test]
    fn refinement_is_monotone_and_drawings_validate(inst in instance()) {
        let sol = solve(&inst).unwrap();
        let mut area = inst.boundary().area();
        for rec in &sol.state.log {
            let next = rec.after.area();
            prop_assert!(next <= area);
            prop_assert!(rec.after.area() <= rec.before.area());
            area = next;
        }
        if let Verdict::Yes(d) = &sol.verdict {
            prop_assert_eq!(d.chords.len(), inst.chords().len());
            prop_assert!(d.chords.iter().all(|c| c.bends() <= 1));
            let report = validate_drawing(&inst, d);
            prop_assert!(report.ok, "{:?}", report.violations);
        }
    }
}
