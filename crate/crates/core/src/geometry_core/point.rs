use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::rational::{diff_of_products_sign, Frac, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Point {
    pub fn new(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        Point {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::new(x, y)
    }

    /// Cross product of `self` and `other` viewed as vectors.
    #[inline]
    pub fn cross(&self, other: &Point) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn scale(&self, k: &Rational) -> Point {
        Point {
            x: &self.x * k,
            y: &self.y * k,
        }
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let half = Rational::new(1, 2);
        Point {
            x: (&self.x + &other.x) * &half,
            y: (&self.y + &other.y) * &half,
        }
    }

    /// `self + t (other - self)`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point {
            x: &self.x + &((&other.x - &self.x) * t),
            y: &self.y + &((&other.y - &self.y) * t),
        }
    }

    pub fn dist2(&self, other: &Point) -> Rational {
        let d = other - self;
        d.dot(&d)
    }

    /// Perpendicular vector rotated counterclockwise.
    pub fn perp(&self) -> Point {
        Point {
            x: -&self.y,
            y: self.x.clone(),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl<'a> Sub<&'a Point> for &'a Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: &'a Point) -> Point {
        Point {
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        }
    }
}

impl<'a> Add<&'a Point> for &'a Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: &'a Point) -> Point {
        Point {
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        }
    }
}

impl<'a> Mul<&'a Rational> for &'a Point {
    type Output = Point;
    fn mul(self, k: &'a Rational) -> Point {
        self.scale(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Twice the signed area of triangle `abc`.
#[inline]
pub fn orient_value(a: &Point, b: &Point, c: &Point) -> Rational {
    let (bx, by) = (&b.x - &a.x, &b.y - &a.y);
    let (cx, cy) = (&c.x - &a.x, &c.y - &a.y);
    bx * cy - by * cx
}

/// Sign of the exact cross product `(b - a) x (c - a)`.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Orientation {
    match orient_sign(a, b, c) {
        1 => Orientation::CounterClockwise,
        -1 => Orientation::Clockwise,
        _ => Orientation::Collinear,
    }
}

/// Sign of `(b - a) x (c - a)`. A floating-point evaluation decides when
/// its magnitude clears a forward error bound; otherwise the exact value is
/// computed.
#[inline]
pub fn orient_sign(a: &Point, b: &Point, c: &Point) -> i8 {
    let (ax, ay) = (a.x.approx(), a.y.approx());
    let (bx, by) = (b.x.approx(), b.y.approx());
    let (cx, cy) = (c.x.approx(), c.y.approx());
    let det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    let mag = (bx.abs() + ax.abs()) * (cy.abs() + ay.abs()) + (by.abs() + ay.abs()) * (cx.abs() + ax.abs());
    let bound = 1e-13 * mag;
    if det.is_finite() && bound.is_finite() && mag > 1e-250 {
        if det > bound {
            return 1;
        }
        if det < -bound {
            return -1;
        }
    }
    match exact_orient_sign(a, b, c) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

fn exact_orient_sign(a: &Point, b: &Point, c: &Point) -> Ordering {
    const LIM: i64 = 1 << 60;
    let small = [&a.x, &a.y, &b.x, &b.y, &c.x, &c.y].map(|r| r.as_small_int().filter(|v| v.abs() < LIM));
    if let [Some(ax), Some(ay), Some(bx), Some(by), Some(cx), Some(cy)] = small {
        let (ax, ay, bx, by, cx, cy) = (ax as i128, ay as i128, bx as i128, by as i128, cx as i128, cy as i128);
        return ((bx - ax) * (cy - ay)).cmp(&((by - ay) * (cx - ax)));
    }
    let (ax, ay) = (Frac::of(&a.x), Frac::of(&a.y));
    let (bx, by) = (Frac::of(&b.x).sub(&ax), Frac::of(&b.y).sub(&ay));
    let (cx, cy) = (Frac::of(&c.x).sub(&ax), Frac::of(&c.y).sub(&ay));
    bx.mul(&cy).cmp_to(&by.mul(&cx))
}

/// Sign of the cross product `d1 x d2`.
#[inline]
pub fn cross_sign(d1: &Point, d2: &Point) -> Ordering {
    diff_of_products_sign(&d1.x, &d2.y, &d1.y, &d2.x)
}

/// Sign of the dot product `d1 . d2`.
#[inline]
pub fn dot_sign(d1: &Point, d2: &Point) -> Ordering {
    diff_of_products_sign(&d1.x, &d2.x, &-&d1.y, &d2.y)
}

/// Compare directions `d1`, `d2` by counterclockwise angle measured from
/// `start`, with angles taken in `[0, 2pi)`.
pub fn ccw_angle_cmp(start: &Point, d1: &Point, d2: &Point) -> Ordering {
    let half = |d: &Point| -> u8 {
        let c = cross_sign(start, d);
        match c {
            Ordering::Greater => 0,
            Ordering::Equal if dot_sign(start, d) == Ordering::Greater => 0,
            _ => 1,
        }
    };
    let (h1, h2) = (half(d1), half(d2));
    if h1 != h2 {
        return h1.cmp(&h2);
    }
    // same half: d1 first iff d2 lies counterclockwise of d1
    match cross_sign(d1, d2) {
        Ordering::Greater => Ordering::Less,
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Angular comparison in either rotation sense.
pub fn angle_cmp(start: &Point, d1: &Point, d2: &Point, ccw: bool) -> Ordering {
    if ccw {
        ccw_angle_cmp(start, d1, d2)
    } else {
        let m = |p: &Point| Point {
            x: p.x.clone(),
            y: -&p.y,
        };
        ccw_angle_cmp(&m(start), &m(d1), &m(d2))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentIntersection {
    Disjoint,
    /// A single common point that is an endpoint of at least one segment.
    EndpointTouch,
    ProperCross,
    /// Collinear with a common sub-segment of positive length.
    Overlap,
}

pub(crate) fn in_box(p: &Point, a: &Point, b: &Point) -> bool {
    let (xl, xh) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (yl, yh) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= xl && &p.x <= xh && &p.y >= yl && &p.y <= yh
}

/// Sorts points lying on the line through `a` and `b` by their position
/// along the direction `a -> b` and removes duplicates.
pub fn sort_along(pts: &mut Vec<Point>, a: &Point, b: &Point) {
    let by_x = a.x != b.x;
    let forward = if by_x { a.x < b.x } else { a.y < b.y };
    pts.sort_by(|p, q| {
        let o = if by_x { p.x.cmp(&q.x) } else { p.y.cmp(&q.y) };
        if forward {
            o
        } else {
            o.reverse()
        }
    });
    pts.dedup();
}

/// `p` lies on the closed segment `ab`.
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orient_sign(a, b, p) == 0 && in_box(p, a, b)
}

/// `p` lies on the open segment `ab` (excluding endpoints).
pub fn strictly_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    p != a && p != b && on_segment(p, a, b)
}

fn boxes_overlap(s: &Segment, t: &Segment) -> bool {
    let (sxl, sxh) = minmax(&s.a.x, &s.b.x);
    let (txl, txh) = minmax(&t.a.x, &t.b.x);
    if sxh < txl || txh < sxl {
        return false;
    }
    let (syl, syh) = minmax(&s.a.y, &s.b.y);
    let (tyl, tyh) = minmax(&t.a.y, &t.b.y);
    !(syh < tyl || tyh < syl)
}

fn minmax<'a>(a: &'a Rational, b: &'a Rational) -> (&'a Rational, &'a Rational) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Exact classification of how two closed segments meet.
pub fn segment_intersect(s: &Segment, t: &Segment) -> SegmentIntersection {
    if !boxes_overlap(s, t) {
        return SegmentIntersection::Disjoint;
    }
    let d1 = orient_sign(&s.a, &s.b, &t.a);
    let d2 = orient_sign(&s.a, &s.b, &t.b);
    let d3 = orient_sign(&t.a, &t.b, &s.a);
    let d4 = orient_sign(&t.a, &t.b, &s.b);
    if d1 == 0 && d2 == 0 {
        // collinear (or degenerate)
        let pts = collinear_overlap(s, t);
        return match pts {
            None => SegmentIntersection::Disjoint,
            Some((p, q)) if p == q => SegmentIntersection::EndpointTouch,
            Some(_) => SegmentIntersection::Overlap,
        };
    }
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return SegmentIntersection::ProperCross;
    }
    let touch = (d1 == 0 && in_box(&t.a, &s.a, &s.b))
        || (d2 == 0 && in_box(&t.b, &s.a, &s.b))
        || (d3 == 0 && in_box(&s.a, &t.a, &t.b))
        || (d4 == 0 && in_box(&s.b, &t.a, &t.b));
    if touch {
        SegmentIntersection::EndpointTouch
    } else {
        SegmentIntersection::Disjoint
    }
}

/// For collinear segments, the common closed sub-segment if any.
fn collinear_overlap(s: &Segment, t: &Segment) -> Option<(Point, Point)> {
    let (p, q) = if s.a != s.b { (&s.a, &s.b) } else { (&t.a, &t.b) };
    if p == q {
        return if s.a == t.a { Some((s.a.clone(), s.a.clone())) } else { None };
    }
    // On a common non-vertical line x orders the points; otherwise y does.
    let by_x = p.x != q.x;
    fn pick(r: &Point, by_x: bool) -> &Rational {
        if by_x {
            &r.x
        } else {
            &r.y
        }
    }
    let key = |r| pick(r, by_x);
    let (mut s0, mut s1) = (&s.a, &s.b);
    if key(s0) > key(s1) {
        std::mem::swap(&mut s0, &mut s1);
    }
    let (mut t0, mut t1) = (&t.a, &t.b);
    if key(t0) > key(t1) {
        std::mem::swap(&mut t0, &mut t1);
    }
    let lo = if key(s0) >= key(t0) { s0 } else { t0 };
    let hi = if key(s1) <= key(t1) { s1 } else { t1 };
    match key(lo).cmp(key(hi)) {
        Ordering::Greater => None,
        _ => Some((lo.clone(), hi.clone())),
    }
}

/// All intersection points of two closed segments: empty, one point, or the
/// two endpoints of the overlap.
pub fn intersection_points(s: &Segment, t: &Segment) -> Vec<Point> {
    match segment_intersect(s, t) {
        SegmentIntersection::Disjoint => vec![],
        SegmentIntersection::Overlap => {
            let (p, q) = collinear_overlap(s, t).expect("overlap");
            vec![p, q]
        }
        SegmentIntersection::EndpointTouch => {
            for p in [&t.a, &t.b] {
                if on_segment(p, &s.a, &s.b) {
                    return vec![p.clone()];
                }
            }
            for p in [&s.a, &s.b] {
                if on_segment(p, &t.a, &t.b) {
                    return vec![p.clone()];
                }
            }
            unreachable!("touch without endpoint contact")
        }
        SegmentIntersection::ProperCross => vec![line_intersection(&s.a, &s.b, &t.a, &t.b)
            .expect("proper crossing of parallel lines")],
    }
}

/// Intersection of the lines through `a1 a2` and `b1 b2`, if not parallel.
pub fn line_intersection(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> Option<Point> {
    let f = |p: &Point| (Frac::of(&p.x), Frac::of(&p.y));
    let (a1, a2, b1, b2) = (f(a1), f(a2), f(b1), f(b2));
    let (rx, ry) = (a2.0.sub(&a1.0), a2.1.sub(&a1.1));
    let (sx, sy) = (b2.0.sub(&b1.0), b2.1.sub(&b1.1));
    let denom = rx.mul(&sy).sub(&ry.mul(&sx));
    if denom.is_zero() {
        return None;
    }
    let (wx, wy) = (b1.0.sub(&a1.0), b1.1.sub(&a1.1));
    let t = wx.mul(&sy).sub(&wy.mul(&sx)).div(&denom);
    Some(Point::new(
        a1.0.add(&rx.mul(&t)).to_rational(),
        a1.1.add(&ry.mul(&t)).to_rational(),
    ))
}

/// Parameter `t >= 0` at which the ray `origin + t dir` meets segment `ab`,
/// taking the nearest point when collinear.
pub fn ray_segment_hit(origin: &Point, dir: &Point, a: &Point, b: &Point) -> Option<Rational> {
    let e = b - a;
    let denom = dir.cross(&e);
    let oa = a - origin;
    if denom.is_zero() {
        if !oa.cross(dir).is_zero() {
            return None;
        }
        // collinear: nearest endpoint ahead, or origin if inside
        let dd = dir.dot(dir);
        let ta = oa.dot(dir) / &dd;
        let tb = (b - origin).dot(dir) / &dd;
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if hi.signum() == Ordering::Less {
            return None;
        }
        return Some(if lo.signum() == Ordering::Less { Rational::zero() } else { lo });
    }
    let t = oa.cross(&e) / &denom;
    let u = oa.cross(dir) / &denom;
    if t.signum() == Ordering::Less || u.signum() == Ordering::Less || u > Rational::one() {
        return None;
    }
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::int(x, y)
    }

    fn seg(a: (i64, i64), b: (i64, i64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1))
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(0, 1)), Orientation::CounterClockwise);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), Orientation::Collinear);
        assert_eq!(orientation(&p(0, 0), &p(0, 1), &p(1, 1)), Orientation::Clockwise);
    }

    #[test]
    fn segment_intersection_examples() {
        use SegmentIntersection::*;
        assert_eq!(segment_intersect(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0))), ProperCross);
        assert_eq!(segment_intersect(&seg((0, 0), (1, 0)), &seg((1, 0), (2, 1))), EndpointTouch);
        assert_eq!(segment_intersect(&seg((0, 0), (2, 0)), &seg((1, 0), (3, 0))), Overlap);
        assert_eq!(segment_intersect(&seg((0, 0), (1, 0)), &seg((2, 0), (3, 0))), Disjoint);
        assert_eq!(segment_intersect(&seg((0, 0), (1, 0)), &seg((1, 0), (3, 0))), EndpointTouch);
        // T-junction
        assert_eq!(segment_intersect(&seg((0, 0), (2, 0)), &seg((1, 0), (1, 5))), EndpointTouch);
        assert_eq!(segment_intersect(&seg((0, 0), (2, 0)), &seg((1, 1), (1, 5))), Disjoint);
    }

    #[test]
    fn intersection_point_values() {
        let pts = intersection_points(&seg((0, 0), (2, 2)), &seg((0, 2), (2, 0)));
        assert_eq!(pts, vec![p(1, 1)]);
        let pts = intersection_points(&seg((0, 0), (4, 0)), &seg((3, 0), (1, 0)));
        assert_eq!(pts.len(), 2);
        assert!(pts.contains(&p(1, 0)) && pts.contains(&p(3, 0)));
    }

    #[test]
    fn angle_order() {
        let s = p(1, 0);
        let mut v = vec![p(0, -1), p(-1, 0), p(1, 1), p(1, 0), p(0, 1)];
        v.sort_by(|a, b| ccw_angle_cmp(&s, a, b));
        assert_eq!(v, vec![p(1, 0), p(1, 1), p(0, 1), p(-1, 0), p(0, -1)]);
        v.sort_by(|a, b| angle_cmp(&s, a, b, false));
        assert_eq!(v, vec![p(1, 0), p(0, -1), p(-1, 0), p(0, 1), p(1, 1)]);
    }

    #[test]
    fn ray_hits() {
        let t = ray_segment_hit(&p(0, 0), &p(1, 0), &p(3, -1), &p(3, 1)).unwrap();
        assert_eq!(t, Rational::from(3));
        assert!(ray_segment_hit(&p(0, 0), &p(-1, 0), &p(3, -1), &p(3, 1)).is_none());
        let t = ray_segment_hit(&p(0, 0), &p(1, 0), &p(5, 0), &p(2, 0)).unwrap();
        assert_eq!(t, Rational::from(2));
    }
}
