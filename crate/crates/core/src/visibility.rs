//! Visibility regions inside a simple polygon and the rotating-ray query
//! used when refining around convex chords.

use std::borrow::Cow;
use std::cmp::Ordering;

use crate::geometry_core::{
    angle_cmp, ccw_angle_cmp, cross_sign, dot_sign, Frac, normalize_ring, orient_sign, polygon_intersection, ray_segment_hit,
    GeometryError, Location, Point, SimplePolygon,
};

/// The closed region of a polygon visible from `viewpoint`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisRegion {
    pub region: SimplePolygon,
    pub viewpoint: Point,
}

/// Rotation sense for [`rotate_ray_hit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    Clockwise,
    CounterClockwise,
}

struct FrontEdge {
    a: Point,
    b: Point,
    da: Point,
    db: Point,
    // cross(a - p, b - p), positive for edges facing the viewpoint, with a
    // floating-point estimate and its absolute error bound
    num: Frac,
    num_f: (f64, f64),
    dir: Point,
}

impl FrontEdge {
    fn new(a: &Point, b: &Point, da: Point, db: Point) -> FrontEdge {
        let num = Frac::of(&da.x)
            .mul(&Frac::of(&db.y))
            .sub(&Frac::of(&da.y).mul(&Frac::of(&db.x)));
        let (x, y) = (da.x.approx() * db.y.approx(), da.y.approx() * db.x.approx());
        FrontEdge {
            a: a.clone(),
            b: b.clone(),
            num,
            num_f: (x - y, 1e-14 * (x.abs() + y.abs())),
            dir: b - a,
            da,
            db,
        }
    }

    /// Ray parameter denominator along `d`; positive inside the edge's span.
    fn den(&self, d: &Point) -> Frac {
        Frac::of(&d.x)
            .mul(&Frac::of(&self.dir.y))
            .sub(&Frac::of(&d.y).mul(&Frac::of(&self.dir.x)))
    }

    /// Floating-point `den` with an absolute error bound.
    fn den_approx(&self, d: &(f64, f64)) -> (f64, f64) {
        let (x, y) = (d.0 * self.dir.y.approx(), d.1 * self.dir.x.approx());
        (x - y, 1e-14 * (x.abs() + y.abs()))
    }

    /// Whether this edge is strictly closer than `o` along `d`, i.e. the
    /// sign of `self.num * den_o - o.num * den_self` is negative.
    fn closer_than(&self, o: &FrontEdge, d: &Point, da: &(f64, f64)) -> bool {
        let (ds, es) = self.den_approx(da);
        let (dn, en) = o.den_approx(da);
        let ((ns, ens), (no, eno)) = (self.num_f, o.num_f);
        let x = ns * dn - no * ds;
        let err = dn.abs() * ens + ns.abs() * en + ens * en + ds.abs() * eno + no.abs() * es + eno * es;
        let bound = 2.0 * err + 1e-14 * ((ns * dn).abs() + (no * ds).abs());
        if x.is_finite() && bound.is_finite() && bound > 0.0 && x.abs() > bound {
            return x < 0.0;
        }
        self.num.mul(&o.den(d)).cmp_to(&o.num.mul(&self.den(d))) == Ordering::Less
    }

    fn hit(&self, p: &Point, d: &Point) -> Point {
        if cross_sign(d, &self.da) == Ordering::Equal && dot_sign(d, &self.da) == Ordering::Greater {
            return self.a.clone();
        }
        if cross_sign(d, &self.db) == Ordering::Equal && dot_sign(d, &self.db) == Ordering::Greater {
            return self.b.clone();
        }
        let (dx, dy) = (Frac::of(&d.x), Frac::of(&d.y));
        let den = self.den(d);
        let t = self.num.div(&den);
        Point::new(
            Frac::of(&p.x).add(&dx.mul(&t)).to_rational(),
            Frac::of(&p.y).add(&dy.mul(&t)).to_rational(),
        )
    }
}

/// Computes the closed visibility region of `p` in `poly`.
///
/// Runs an exact angular sweep around `p`. Only edges facing `p` can be the
/// first boundary point along a ray, so back-facing and collinear edges are
/// ignored. Sector directions are the corner directions plus the four axis
/// directions, which keeps every sector narrower than a half-turn.
pub fn visibility_polygon(poly: &SimplePolygon, p: &Point) -> Result<VisRegion, GeometryError> {
    let loc = poly.locate(p);
    if loc == Location::Outside {
        return Err(GeometryError::PointOutside(format!("{p:?}")));
    }
    let (host, wedge): (Cow<SimplePolygon>, Option<(Point, Point)>) = if loc == Location::OnBoundary {
        let (host, i) = poly.with_boundary_point(p).expect("point is on the boundary");
        let n = host.len();
        let start = host.corner(i + 1) - p;
        let end = host.corner(i + n - 1) - p;
        (Cow::Owned(host), Some((start, end)))
    } else {
        (Cow::Borrowed(poly), None)
    };

    let s = match &wedge {
        Some((s, _)) => s.clone(),
        None => Point::int(1, 0),
    };
    let cmp = |a: &Point, b: &Point| ccw_angle_cmp(&s, a, b);

    let offs: Vec<Point> = host.corners().iter().map(|c| c - p).collect();
    let mut dirs: Vec<Point> = offs.iter().filter(|d| !d.x.is_zero() || !d.y.is_zero()).cloned().collect();
    for (x, y) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
        dirs.push(Point::int(x, y));
    }
    if let Some((s0, e0)) = &wedge {
        dirs.retain(|d| cmp(d, e0) != Ordering::Greater);
        dirs.push(s0.clone());
        dirs.push(e0.clone());
    }
    dirs.sort_by(cmp);
    dirs.dedup_by(|a, b| cmp(a, b) == Ordering::Equal);
    let events = dirs.len();
    let sectors = if wedge.is_some() { events - 1 } else { events };
    let rep: Vec<Point> = (0..sectors).map(|k| &dirs[k] + &dirs[(k + 1) % events]).collect();
    let lower = |d: &Point| dirs.partition_point(|e| cmp(e, d) == Ordering::Less).min(sectors);

    let mut edges: Vec<FrontEdge> = Vec::new();
    let mut starts: Vec<Vec<usize>> = vec![Vec::new(); sectors + 1];
    let mut ends: Vec<Vec<usize>> = vec![Vec::new(); sectors + 1];
    for i in 0..host.len() {
        let (a, b) = (host.corner(i), host.corner(i + 1));
        if orient_sign(p, a, b) <= 0 {
            continue;
        }
        let (da, db) = (&offs[i], &offs[(i + 1) % host.len()]);
        let (la, lb) = (lower(da), lower(db));
        let id = edges.len();
        let mut ranges = Vec::with_capacity(2);
        if cmp(da, db) == Ordering::Less {
            ranges.push((la, lb));
        } else {
            ranges.push((la, sectors));
            ranges.push((0, lb));
        }
        for (l, r) in ranges {
            if l < r {
                starts[l].push(id);
                ends[r].push(id);
            }
        }
        edges.push(FrontEdge::new(a, b, da.clone(), db.clone()));
    }

    // active edges sorted by distance along the sector's representative ray
    let mut active: Vec<usize> = Vec::new();
    let mut removed = vec![false; edges.len()];
    let mut nearest: Vec<usize> = Vec::with_capacity(sectors);
    for k in 0..sectors {
        if !ends[k].is_empty() {
            for &e in &ends[k] {
                removed[e] = true;
            }
            active.retain(|&e| !removed[e]);
            for &e in &ends[k] {
                removed[e] = false;
            }
        }
        let d = &rep[k];
        let dapprox = (d.x.approx(), d.y.approx());
        for &e in &starts[k] {
            let fe = &edges[e];
            let pos = active.partition_point(|&f| edges[f].closer_than(fe, d, &dapprox));
            active.insert(pos, e);
        }
        match active.first() {
            Some(&e) => nearest.push(e),
            None => {
                return Err(GeometryError::NotSimple(format!(
                    "no boundary visible from {p:?} in direction {d:?}"
                )))
            }
        }
    }

    let mut ring: Vec<Point> = Vec::new();
    if wedge.is_some() {
        ring.push(p.clone());
    }
    for (k, d) in dirs.iter().enumerate() {
        let prev = if k > 0 {
            Some(k - 1)
        } else if wedge.is_none() {
            Some(sectors - 1)
        } else {
            None
        };
        let next = (k < sectors).then_some(k);
        if let (Some(a), Some(b)) = (prev, next) {
            // the same edge on both sides: `d` meets its relative interior
            if nearest[a] == nearest[b] {
                continue;
            }
        }
        for sec in [prev, next].into_iter().flatten() {
            let h = edges[nearest[sec]].hit(p, d);
            if ring.last() != Some(&h) {
                ring.push(h);
            }
        }
    }
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    let region = SimplePolygon::new(normalize_ring(&ring, &|q| q == p))?;
    Ok(VisRegion {
        region,
        viewpoint: p.clone(),
    })
}

/// Common visibility of two boundary points: the positive-area pieces of
/// `V(u) ∩ V(v)` from which both `u` and `v` are reachable by a segment.
pub fn common_visibility(
    poly: &SimplePolygon,
    u: &Point,
    v: &Point,
) -> Result<Vec<SimplePolygon>, GeometryError> {
    let vu = visibility_polygon(poly, u)?;
    let vv = visibility_polygon(poly, v)?;
    Ok(common_visibility_of(poly, &vu, &vv))
}

/// Same as [`common_visibility`] but reuses already computed regions.
pub fn common_visibility_of(poly: &SimplePolygon, vu: &VisRegion, vv: &VisRegion) -> Vec<SimplePolygon> {
    polygon_intersection(&vu.region, &vv.region)
        .into_iter()
        .filter(|piece| {
            let q = piece.interior_point();
            poly.segment_in_closure(&vu.viewpoint, &q) && poly.segment_in_closure(&q, &vv.viewpoint)
        })
        .collect()
}

/// Rotates the ray from `pivot` along `start_dir` and returns the first
/// point of `target` it touches.
///
/// A contact at zero rotation yields the nearest point of `target` on the
/// starting ray. Otherwise the first contact happens at a corner of
/// `target`: the one with the smallest rotation angle, nearest to `pivot`
/// among ties. The sweep may not pass the far side of the pivot's interior
/// wedge in `poly`.
pub fn rotate_ray_hit(
    poly: &SimplePolygon,
    pivot: &Point,
    start_dir: &Point,
    target: &SimplePolygon,
    rotation: Rotation,
) -> Result<Point, GeometryError> {
    if target.locate(pivot) != Location::Outside {
        return Ok(pivot.clone());
    }
    let (host, i) = poly
        .with_boundary_point(pivot)
        .ok_or_else(|| GeometryError::PointOutside(format!("{pivot:?}")))?;
    let n = host.len();
    let ccw = rotation == Rotation::CounterClockwise;
    let limit = if ccw {
        host.corner(i + n - 1) - pivot
    } else {
        host.corner(i + 1) - pivot
    };

    let first_t = target
        .edges()
        .iter()
        .filter_map(|e| ray_segment_hit(pivot, start_dir, &e.a, &e.b))
        .min();
    if let Some(t) = first_t {
        return Ok(pivot + &(start_dir * &t));
    }

    let best = target
        .corners()
        .iter()
        .min_by(|a, b| {
            angle_cmp(start_dir, &(*a - pivot), &(*b - pivot), ccw)
                .then_with(|| a.dist2(pivot).cmp(&b.dist2(pivot)))
        })
        .ok_or(GeometryError::NoHit)?;
    if angle_cmp(start_dir, &(best - pivot), &limit, ccw) == Ordering::Greater {
        return Err(GeometryError::NoHit);
    }
    Ok(best.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry_core::Rational;

    fn poly(pts: &[(i64, i64)]) -> SimplePolygon {
        SimplePolygon::from_ints(pts).unwrap()
    }

    fn grid_agrees(host: &SimplePolygon, p: &Point, res: i64) {
        let vis = visibility_polygon(host, p).unwrap();
        let bb = host.bbox();
        let (w, h) = (&bb.max.x - &bb.min.x, &bb.max.y - &bb.min.y);
        for i in 0..=res {
            for j in 0..=res {
                let q = Point {
                    x: &bb.min.x + &(&w * &Rational::new(i, res)),
                    y: &bb.min.y + &(&h * &Rational::new(j, res)),
                };
                let brute = host.segment_in_closure(p, &q);
                let got = vis.region.locate(&q) != Location::Outside;
                assert_eq!(brute, got, "viewpoint {p:?}, sample {q:?}");
            }
        }
    }

    #[test]
    fn convex_sees_everything() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        for p in [Point::int(1, 3), Point::int(0, 0), Point::int(2, 0)] {
            let v = visibility_polygon(&sq, &p).unwrap();
            assert_eq!(v.region.area(), sq.area());
        }
    }

    #[test]
    fn l_shape_matches_brute_force() {
        let l = poly(&[(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)]);
        for p in [Point::int(1, 1), Point::int(3, 1), Point::int(4, 0), Point::int(2, 2), Point::int(1, 4)] {
            grid_agrees(&l, &p, 60);
        }
        let v = visibility_polygon(&l, &Point::int(3, 1)).unwrap();
        assert!(v.region.area() < l.area());
    }

    #[test]
    fn comb_matches_brute_force() {
        let comb = poly(&[(0, 0), (9, 0), (9, 5), (8, 5), (8, 1), (6, 1), (6, 5), (5, 5), (5, 1), (3, 1), (3, 5), (2, 5), (2, 1), (1, 1), (1, 5), (0, 5)]);
        for p in [Point::int(4, 0), Point::new(1, Rational::new(1, 2)), Point::int(8, 3), Point::int(0, 5)] {
            grid_agrees(&comb, &p, 45);
        }
    }

    #[test]
    fn outside_point_rejected() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        assert!(matches!(
            visibility_polygon(&sq, &Point::int(5, 5)),
            Err(GeometryError::PointOutside(_))
        ));
    }

    fn s_shape() -> SimplePolygon {
        poly(&[(0, 0), (5, 0), (5, 3), (1, 3), (1, 4), (5, 4), (5, 5), (0, 5), (0, 2), (4, 2), (4, 1), (0, 1)])
    }

    #[test]
    fn s_shape_has_no_common_visibility() {
        let s = s_shape();
        let (u, v) = (Point::int(0, 0), Point::int(5, 5));
        assert!(common_visibility(&s, &u, &v).unwrap().is_empty());
        // no grid bend point sees both ends
        for i in 0..=50 {
            for j in 0..=50 {
                let b = Point::new(Rational::new(i, 10), Rational::new(j, 10));
                assert!(!(s.segment_in_closure(&u, &b) && s.segment_in_closure(&b, &v)));
            }
        }
    }

    #[test]
    fn common_visibility_symmetric_and_whole_for_convex() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        let r = common_visibility(&sq, &Point::int(0, 0), &Point::int(4, 0)).unwrap();
        assert_eq!(r, vec![sq.canonical()]);
        let l = poly(&[(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)]);
        let (u, v) = (Point::int(4, 1), Point::int(1, 4));
        assert_eq!(common_visibility(&l, &u, &v).unwrap(), common_visibility(&l, &v, &u).unwrap());
    }

    fn angular_oracle(pivot: &Point, start: &Point, target: &SimplePolygon, ccw: bool) -> Point {
        let mut cs: Vec<Point> = target.corners().to_vec();
        cs.sort_by(|a, b| {
            angle_cmp(start, &(a - pivot), &(b - pivot), ccw).then(a.dist2(pivot).cmp(&b.dist2(pivot)))
        });
        cs[0].clone()
    }

    #[test]
    fn rotating_ray_hits() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        let tri = poly(&[(3, 1), (3, 3), (1, 3)]);
        let o = Point::int(0, 0);
        let got = rotate_ray_hit(&sq, &o, &Point::int(4, 0), &tri, Rotation::CounterClockwise).unwrap();
        assert_eq!(got, Point::int(3, 1));
        assert_eq!(got, angular_oracle(&o, &Point::int(4, 0), &tri, true));
        // zero rotation: the start ray already crosses the target
        let got = rotate_ray_hit(&sq, &o, &Point::int(1, 1), &tri, Rotation::CounterClockwise).unwrap();
        assert_eq!(got, Point::int(2, 2));
        // clockwise from the left edge
        let got = rotate_ray_hit(&sq, &o, &Point::int(0, 4), &tri, Rotation::Clockwise).unwrap();
        assert_eq!(got, Point::int(1, 3));
        assert_eq!(got, angular_oracle(&o, &Point::int(0, 4), &tri, false));
    }

    #[test]
    fn rotating_ray_thin_target_edge_orthogonal() {
        let sq = poly(&[(0, 0), (8, 0), (8, 8), (0, 8)]);
        // the edge (6,1)-(6,5) is orthogonal to the initial sweep direction
        let thin = poly(&[(6, 1), (7, 3), (6, 5)]);
        let o = Point::int(0, 0);
        let got = rotate_ray_hit(&sq, &o, &Point::int(1, 0), &thin, Rotation::CounterClockwise).unwrap();
        assert_eq!(got, Point::int(6, 1));
        assert_eq!(got, angular_oracle(&o, &Point::int(1, 0), &thin, true));
    }

    #[test]
    fn rotating_ray_reports_no_hit_outside_wedge() {
        let sq = poly(&[(0, 0), (4, 0), (4, 4), (0, 4)]);
        let tri = poly(&[(3, 1), (3, 3), (1, 3)]);
        let pivot = Point::int(2, 0);
        // sweeping clockwise from +x immediately leaves the interior wedge
        let r = rotate_ray_hit(&sq, &pivot, &Point::int(1, 0), &tri, Rotation::Clockwise);
        assert_eq!(r, Err(GeometryError::NoHit));
    }
}
