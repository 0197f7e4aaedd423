use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::point::{
    intersection_points, on_segment, orient_sign, orient_value, segment_intersect, sort_along, Point,
    Segment, SegmentIntersection,
};
use super::rational::Rational;
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    OnBoundary,
    Outside,
}

/// Where a boundary point sits on a polygon ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryPos {
    Corner(usize),
    /// Strictly inside edge `i` (from corner `i` to corner `i + 1`).
    Edge(usize),
}

/// Simple polygon with counterclockwise corners.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct SimplePolygon {
    corners: Vec<Point>,
}

impl TryFrom<Vec<Point>> for SimplePolygon {
    type Error = GeometryError;
    fn try_from(v: Vec<Point>) -> Result<Self, Self::Error> {
        SimplePolygon::new(v)
    }
}

impl From<SimplePolygon> for Vec<Point> {
    fn from(p: SimplePolygon) -> Self {
        p.corners
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = pts.into_iter();
        let first = it.next()?;
        let mut b = BBox {
            min: first.clone(),
            max: first.clone(),
        };
        for p in it {
            if p.x < b.min.x {
                b.min.x = p.x.clone();
            }
            if p.y < b.min.y {
                b.min.y = p.y.clone();
            }
            if p.x > b.max.x {
                b.max.x = p.x.clone();
            }
            if p.y > b.max.y {
                b.max.y = p.y.clone();
            }
        }
        Some(b)
    }

    pub fn overlaps(&self, o: &BBox) -> bool {
        !(self.max.x < o.min.x || o.max.x < self.min.x || self.max.y < o.min.y || o.max.y < self.min.y)
    }
}

/// Twice the signed area of a closed ring (shoelace).
pub fn ring_twice_area(ring: &[Point]) -> Rational {
    let n = ring.len();
    let mut acc = Rational::zero();
    for i in 0..n {
        acc = acc + ring[i].cross(&ring[(i + 1) % n]);
    }
    acc
}

/// Sign of the signed ring area. A floating-point sum with a conservative
/// error bound decides most cases; the exact shoelace sum settles the rest.
pub fn ring_area_sign(ring: &[Point]) -> Ordering {
    let n = ring.len();
    let (mut acc, mut mag) = (0.0f64, 0.0f64);
    for i in 0..n {
        let (a, b) = (&ring[i], &ring[(i + 1) % n]);
        let (ax, ay, bx, by) = (a.x.approx(), a.y.approx(), b.x.approx(), b.y.approx());
        acc += ax * by - ay * bx;
        mag += (ax * by).abs() + (ay * bx).abs();
    }
    let bound = mag * (n as f64 + 8.0) * 8.0 * f64::EPSILON + 1e-290;
    if acc.is_finite() && mag.is_finite() {
        if acc > bound {
            return Ordering::Greater;
        }
        if acc < -bound {
            return Ordering::Less;
        }
    }
    ring_twice_area(ring).signum()
}

/// Even-odd membership with exact boundary detection; works for any ring.
pub fn ring_locate(ring: &[Point], p: &Point) -> Location {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = &ring[i];
        let b = &ring[(i + 1) % n];
        if on_segment(p, a, b) {
            return Location::OnBoundary;
        }
        let a_up = a.y <= p.y;
        let b_up = b.y <= p.y;
        if a_up && !b_up {
            // upward crossing of the horizontal through p
            if orient_sign(a, b, p) > 0 {
                inside = !inside;
            }
        } else if !a_up && b_up && orient_sign(a, b, p) < 0 {
            inside = !inside;
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Checks that a ring is simple: adjacent edges meet only at their shared
/// corner and non-adjacent edges are disjoint.
pub fn check_ring_simple(ring: &[Point]) -> Result<(), String> {
    let n = ring.len();
    if n < 3 {
        return Err(format!("only {n} corners"));
    }
    for i in 0..n {
        if ring[i] == ring[(i + 1) % n] {
            return Err(format!("repeated corner at {i}"));
        }
    }
    let edges: Vec<Segment> = (0..n)
        .map(|i| Segment::new(ring[i].clone(), ring[(i + 1) % n].clone()))
        .collect();
    let pairs = candidate_pairs(&edges, &edges, true);
    for (i, j) in pairs {
        let adjacent = (i + 1) % n == j || (j + 1) % n == i;
        let kind = segment_intersect(&edges[i], &edges[j]);
        let ok = if adjacent {
            kind == SegmentIntersection::EndpointTouch
        } else {
            kind == SegmentIntersection::Disjoint
        };
        if !ok {
            return Err(format!("edges {i} and {j} intersect ({kind:?})"));
        }
    }
    Ok(())
}

/// Index pairs whose x-extents overlap. With `same` the two slices are the
/// same edge set and only pairs `i < j` are reported.
pub(crate) fn candidate_pairs(a: &[Segment], b: &[Segment], same: bool) -> Vec<(usize, usize)> {
    let ext = |s: &Segment| -> (Rational, Rational) {
        if s.a.x <= s.b.x {
            (s.a.x.clone(), s.b.x.clone())
        } else {
            (s.b.x.clone(), s.a.x.clone())
        }
    };
    // events: (xmin, set, idx)
    let mut items: Vec<(Rational, Rational, u8, usize)> = Vec::with_capacity(a.len() + b.len());
    for (i, s) in a.iter().enumerate() {
        let (lo, hi) = ext(s);
        items.push((lo, hi, 0, i));
    }
    if !same {
        for (i, s) in b.iter().enumerate() {
            let (lo, hi) = ext(s);
            items.push((lo, hi, 1, i));
        }
    }
    items.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out = Vec::new();
    for k in 0..items.len() {
        let (_, hi, set, idx) = &items[k];
        for other in items.iter().skip(k + 1) {
            if &other.0 > hi {
                break;
            }
            if same {
                let (i, j) = if idx < &other.3 { (*idx, other.3) } else { (other.3, *idx) };
                out.push((i, j));
            } else if *set != other.2 {
                if *set == 0 {
                    out.push((*idx, other.3));
                } else {
                    out.push((other.3, *idx));
                }
            }
        }
    }
    if !same {
        // y-extent filter
        out.retain(|&(i, j)| {
            let (sa, sb) = (&a[i], &b[j]);
            let (ylo, yhi) = if sa.a.y <= sa.b.y { (&sa.a.y, &sa.b.y) } else { (&sa.b.y, &sa.a.y) };
            let (tlo, thi) = if sb.a.y <= sb.b.y { (&sb.a.y, &sb.b.y) } else { (&sb.b.y, &sb.a.y) };
            !(yhi < tlo || thi < ylo)
        });
    }
    out
}

/// Drops repeated corners, straight (collinear) corners and zero-width
/// spikes. Straight corners for which `keep` holds are retained; spike tips
/// are always dropped.
pub fn normalize_ring(ring: &[Point], keep: &dyn Fn(&Point) -> bool) -> Vec<Point> {
    let mut v: Vec<Point> = Vec::with_capacity(ring.len());
    for p in ring {
        if v.last() != Some(p) {
            v.push(p.clone());
        }
    }
    while v.len() > 1 && v.first() == v.last() {
        v.pop();
    }
    let mut changed = true;
    while changed && v.len() >= 3 {
        changed = false;
        let n = v.len();
        let mut out: Vec<Point> = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            let prev = if out.is_empty() { &v[(i + n - 1) % n] } else { out.last().unwrap() };
            let cur = &v[i];
            let next = &v[(i + 1) % n];
            let removable = orient_sign(prev, cur, next) == 0 && prev != next;
            // on a common line, `cur` is a straight corner iff it lies between
            let straight = removable && cur != prev && cur != next && super::point::in_box(cur, prev, next);
            if removable && (!straight || !keep(cur)) {
                changed = true;
            } else if prev == next && prev != cur {
                // spike of zero width returning to the same point
                changed = true;
            } else {
                out.push(cur.clone());
            }
            i += 1;
        }
        let mut dedup: Vec<Point> = Vec::with_capacity(out.len());
        for p in out {
            if dedup.last() != Some(&p) {
                dedup.push(p);
            }
        }
        while dedup.len() > 1 && dedup.first() == dedup.last() {
            dedup.pop();
        }
        v = dedup;
    }
    v
}

impl SimplePolygon {
    /// Validates corner count, distinct consecutive corners, simplicity and
    /// counterclockwise orientation. Straight corners are allowed.
    pub fn new(corners: Vec<Point>) -> Result<Self, GeometryError> {
        if corners.len() < 3 {
            return Err(GeometryError::NotSimple(format!("only {} corners", corners.len())));
        }
        check_ring_simple(&corners).map_err(GeometryError::NotSimple)?;
        if ring_area_sign(&corners) != Ordering::Greater {
            return Err(GeometryError::NotCounterclockwise);
        }
        Ok(SimplePolygon { corners })
    }

    /// Normalizes (collinear corners and spikes removed except `keep`
    /// corners), then validates.
    pub fn from_ring_normalized(
        ring: &[Point],
        keep: &dyn Fn(&Point) -> bool,
    ) -> Result<Self, GeometryError> {
        SimplePolygon::new(normalize_ring(ring, keep))
    }

    pub(crate) fn new_unchecked(corners: Vec<Point>) -> Self {
        debug_assert!(corners.len() >= 3);
        SimplePolygon { corners }
    }

    pub fn from_ints(pts: &[(i64, i64)]) -> Result<Self, GeometryError> {
        SimplePolygon::new(pts.iter().map(|&(x, y)| Point::int(x, y)).collect())
    }

    pub fn corners(&self) -> &[Point] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn corner(&self, i: usize) -> &Point {
        &self.corners[i % self.corners.len()]
    }

    pub fn next_index(&self, i: usize) -> usize {
        (i + 1) % self.corners.len()
    }

    pub fn prev_index(&self, i: usize) -> usize {
        (i + self.corners.len() - 1) % self.corners.len()
    }

    pub fn edge(&self, i: usize) -> Segment {
        Segment::new(self.corner(i).clone(), self.corner(i + 1).clone())
    }

    pub fn edges(&self) -> Vec<Segment> {
        (0..self.len()).map(|i| self.edge(i)).collect()
    }

    pub fn twice_area(&self) -> Rational {
        ring_twice_area(&self.corners)
    }

    pub fn area(&self) -> Rational {
        self.twice_area() * Rational::new(1, 2)
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.corners).expect("nonempty polygon")
    }

    pub fn locate(&self, p: &Point) -> Location {
        ring_locate(&self.corners, p)
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.corners.iter().position(|c| c == p)
    }

    pub fn boundary_pos(&self, p: &Point) -> Option<BoundaryPos> {
        if let Some(i) = self.index_of(p) {
            return Some(BoundaryPos::Corner(i));
        }
        (0..self.len())
            .find(|&i| on_segment(p, self.corner(i), self.corner(i + 1)))
            .map(BoundaryPos::Edge)
    }

    /// Copy of this polygon with `p` inserted as a corner if it lies inside
    /// an edge; returns the corner index of `p`.
    pub fn with_boundary_point(&self, p: &Point) -> Option<(SimplePolygon, usize)> {
        match self.boundary_pos(p)? {
            BoundaryPos::Corner(i) => Some((self.clone(), i)),
            BoundaryPos::Edge(i) => {
                let mut c = self.corners.clone();
                c.insert(i + 1, p.clone());
                Some((SimplePolygon { corners: c }, i + 1))
            }
        }
    }

    /// Corners from index `from` to index `to` inclusive, counterclockwise.
    pub fn chain(&self, from: usize, to: usize) -> Vec<Point> {
        let n = self.len();
        let mut out = vec![self.corners[from].clone()];
        let mut i = from;
        while i != to {
            i = (i + 1) % n;
            out.push(self.corners[i].clone());
        }
        out
    }

    pub fn rotated_to(&self, start: usize) -> SimplePolygon {
        let n = self.len();
        SimplePolygon {
            corners: (0..n).map(|k| self.corners[(start + k) % n].clone()).collect(),
        }
    }

    /// Rotation starting at the lexicographically smallest corner.
    pub fn canonical(&self) -> SimplePolygon {
        let (i, _) = self
            .corners
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.cmp(b.1))
            .expect("nonempty");
        self.rotated_to(i)
    }

    pub fn normalized(&self, keep: &dyn Fn(&Point) -> bool) -> Option<SimplePolygon> {
        let v = normalize_ring(&self.corners, keep);
        if v.len() < 3 || ring_area_sign(&v) != Ordering::Greater {
            return None;
        }
        Some(SimplePolygon { corners: v })
    }

    pub fn is_convex(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            orient_sign(self.corner(i + n - 1), self.corner(i), self.corner(i + 1)) >= 0
        })
    }

    /// A deterministic point strictly inside the polygon: the lowest
    /// (then leftmost) corner is convex; if its ear contains no other corner
    /// the ear centroid is used, otherwise the midpoint of the diagonal to
    /// the ear corner nearest to it.
    pub fn interior_point(&self) -> Point {
        let n = self.len();
        let (vi, _) = self
            .corners
            .iter()
            .enumerate()
            .min_by(|a, b| (&a.1.y, &a.1.x).cmp(&(&b.1.y, &b.1.x)))
            .expect("nonempty");
        let v = &self.corners[vi];
        let a = &self.corners[(vi + n - 1) % n];
        let b = &self.corners[(vi + 1) % n];
        // (v, b, a) is counterclockwise since v is a convex corner
        let mut best: Option<(Rational, usize)> = None;
        for (k, q) in self.corners.iter().enumerate() {
            if k == vi || q == a || q == b {
                continue;
            }
            if orient_sign(v, b, q) >= 0 && orient_sign(b, a, q) >= 0 && orient_sign(a, v, q) >= 0 {
                let depth = -orient_value(a, b, q);
                match &best {
                    Some((d, _)) if d >= &depth => {}
                    _ => best = Some((depth, k)),
                }
            }
        }
        match best {
            None => {
                let third = Rational::new(1, 3);
                Point {
                    x: (&a.x + &v.x + &b.x) * &third,
                    y: (&a.y + &v.y + &b.y) * &third,
                }
            }
            Some((_, k)) => v.midpoint(&self.corners[k]),
        }
    }

    /// Whether the open segment `ab` lies in the interior of the polygon.
    /// The endpoints themselves may be on the boundary.
    pub fn segment_strictly_inside(&self, a: &Point, b: &Point) -> bool {
        if a == b {
            return self.locate(a) == Location::Inside;
        }
        let s = Segment::new(a.clone(), b.clone());
        for e in self.edges() {
            for x in intersection_points(&s, &e) {
                if &x != a && &x != b {
                    return false;
                }
            }
            if segment_intersect(&s, &e) == SegmentIntersection::Overlap {
                return false;
            }
        }
        self.locate(&a.midpoint(b)) == Location::Inside
    }

    /// Whether the closed segment `ab` lies in the closed polygon.
    pub fn segment_in_closure(&self, a: &Point, b: &Point) -> bool {
        if self.locate(a) == Location::Outside || self.locate(b) == Location::Outside {
            return false;
        }
        let s = Segment::new(a.clone(), b.clone());
        let mut cuts: Vec<Point> = vec![a.clone(), b.clone()];
        for e in self.edges() {
            cuts.extend(intersection_points(&s, &e));
        }
        sort_along(&mut cuts, a, b);
        cuts.windows(2)
            .all(|w| self.locate(&w[0].midpoint(&w[1])) != Location::Outside)
    }

    /// Boundary interval from `from` counterclockwise to `to`.
    pub fn interval(&self, from: &Point, to: &Point) -> Option<BoundaryInterval<'_>> {
        Some(BoundaryInterval {
            polygon: self,
            from: self.boundary_pos(from)?,
            from_point: from.clone(),
            to: self.boundary_pos(to)?,
            to_point: to.clone(),
        })
    }

    /// Splits the polygon along `path`, whose endpoints lie on the boundary
    /// and whose remaining points lie strictly inside.
    pub fn split_by_path(&self, path: &[Point]) -> Result<SplitPieces, GeometryError> {
        if path.len() < 2 {
            return Err(GeometryError::PathNotInside("path needs two points".into()));
        }
        let s = &path[0];
        let t = &path[path.len() - 1];
        if s == t {
            return Err(GeometryError::PathSelfIntersects);
        }
        for w in path.windows(2) {
            if w[0] == w[1] {
                return Err(GeometryError::PathSelfIntersects);
            }
        }
        // containment
        for (k, p) in path.iter().enumerate() {
            let loc = self.locate(p);
            let endpoint = k == 0 || k == path.len() - 1;
            if endpoint && loc != Location::OnBoundary || !endpoint && loc != Location::Inside {
                return Err(GeometryError::PathNotInside(format!("{p:?}")));
            }
        }
        for w in path.windows(2) {
            if !self.segment_strictly_inside(&w[0], &w[1]) {
                return Err(GeometryError::PathNotInside(format!("{:?}-{:?}", w[0], w[1])));
            }
        }
        let segs: Vec<Segment> = path.windows(2).map(|w| Segment::new(w[0].clone(), w[1].clone())).collect();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let kind = segment_intersect(&segs[i], &segs[j]);
                let ok = if j == i + 1 {
                    kind == SegmentIntersection::EndpointTouch
                } else {
                    kind == SegmentIntersection::Disjoint
                };
                if !ok {
                    return Err(GeometryError::PathSelfIntersects);
                }
            }
        }
        let (poly, _) = self.with_boundary_point(s).expect("located");
        let (poly, _) = poly.with_boundary_point(t).expect("located");
        let si = poly.index_of(s).expect("inserted");
        let ti = poly.index_of(t).expect("inserted");
        let mut right = poly.chain(si, ti);
        right.extend(path[1..path.len() - 1].iter().rev().cloned());
        let mut left = poly.chain(ti, si);
        left.extend(path[1..path.len() - 1].iter().cloned());
        Ok(SplitPieces {
            left: SimplePolygon::new_unchecked(left),
            right: SimplePolygon::new_unchecked(right),
        })
    }
}

/// Result of cutting a polygon along a path: `left` lies to the left of the
/// path direction, `right` to its right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPieces {
    pub left: SimplePolygon,
    pub right: SimplePolygon,
}

/// The counterclockwise boundary stretch `P(from, to)`.
#[derive(Debug, Clone)]
pub struct BoundaryInterval<'a> {
    pub polygon: &'a SimplePolygon,
    pub from: BoundaryPos,
    pub from_point: Point,
    pub to: BoundaryPos,
    pub to_point: Point,
}

impl BoundaryInterval<'_> {
    /// Points of the interval in traversal order, endpoints included.
    pub fn points(&self) -> Vec<Point> {
        let p = self.polygon;
        let n = p.len();
        let mut out = vec![self.from_point.clone()];
        // first corner strictly after `from`
        let mut i = match self.from {
            BoundaryPos::Corner(i) => (i + 1) % n,
            BoundaryPos::Edge(i) => (i + 1) % n,
        };
        let last = match self.to {
            BoundaryPos::Corner(j) => j,
            BoundaryPos::Edge(j) => j,
        };
        // same edge, `to` ahead of `from`: no corners between
        if let (BoundaryPos::Edge(a), BoundaryPos::Edge(b)) = (self.from, self.to) {
            let e = p.edge(a);
            let dir = &e.b - &e.a;
            if a == b && (&self.from_point - &e.a).dot(&dir) < (&self.to_point - &e.a).dot(&dir) {
                out.push(self.to_point.clone());
                return out;
            }
        }
        if let (BoundaryPos::Corner(a), BoundaryPos::Corner(b)) = (self.from, self.to) {
            if a == b {
                return out;
            }
        }
        if let (BoundaryPos::Edge(a), BoundaryPos::Corner(b)) = (self.from, self.to) {
            if (a + 1) % n == b {
                out.push(self.to_point.clone());
                return out;
            }
        }
        loop {
            out.push(p.corners[i].clone());
            if i == last {
                break;
            }
            i = (i + 1) % n;
        }
        if matches!(self.to, BoundaryPos::Edge(_)) {
            out.push(self.to_point.clone());
        }
        out
    }
}
