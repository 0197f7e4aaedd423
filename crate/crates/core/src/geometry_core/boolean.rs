//! Exact intersection of simple polygons.
//!
//! Both boundaries are cut at every mutual contact point, giving a planar
//! arrangement. Each arrangement edge knows, for each input polygon, whether
//! the region immediately to its left and right is inside that polygon;
//! edges with the intersection on exactly one side are traced into rings.
//! The intersection of two simply connected regions has no holes, so every
//! traced ring is an outer boundary.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::point::{
    angle_cmp, ccw_angle_cmp, intersection_points, orient_sign, sort_along, Point,
};
use super::polygon::{candidate_pairs, normalize_ring, ring_area_sign, Location, SimplePolygon};
use super::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
enum RingLoc {
    Corner(usize),
    Edge(usize),
}

struct SubEdge {
    p: Point,
    q: Point,
    /// +1 when polygon k traverses p -> q, -1 for q -> p, 0 when not on it.
    dir: [i8; 2],
    /// Membership of the open edge in polygon k when not on its boundary.
    member: [Option<bool>; 2],
}

fn loc_on_edge(poly: &SimplePolygon, i: usize, x: &Point) -> RingLoc {
    if x == poly.corner(i) {
        RingLoc::Corner(i)
    } else if x == poly.corner(i + 1) {
        RingLoc::Corner(poly.next_index(i))
    } else {
        RingLoc::Edge(i)
    }
}

/// Whether direction `d` leaving boundary point at `loc` enters the interior.
fn enters_interior(poly: &SimplePolygon, loc: RingLoc, x: &Point, d: &Point) -> bool {
    match loc {
        RingLoc::Edge(i) => {
            let e = poly.corner(i + 1) - poly.corner(i);
            super::point::cross_sign(&e, d) == Ordering::Greater
        }
        RingLoc::Corner(i) => {
            let next = poly.corner(i + 1) - x;
            let prev = poly.corner(poly.prev_index(i)) - x;
            if ccw_angle_cmp(&next, d, &next) == Ordering::Equal {
                return false;
            }
            ccw_angle_cmp(&next, d, &prev) == Ordering::Less
        }
    }
}

/// Exact intersection pieces with positive area, each rotated to start at
/// its lexicographically smallest corner, sorted by that corner.
pub fn polygon_intersection(a: &SimplePolygon, b: &SimplePolygon) -> Vec<SimplePolygon> {
    if !a.bbox().overlaps(&b.bbox()) {
        return vec![];
    }
    let polys = [a, b];
    let edges = [a.edges(), b.edges()];
    let mut splits: [Vec<Vec<Point>>; 2] = [
        edges[0].iter().map(|e| vec![e.a.clone(), e.b.clone()]).collect(),
        edges[1].iter().map(|e| vec![e.a.clone(), e.b.clone()]).collect(),
    ];
    // location of contact points on the other polygon's boundary
    let mut on_other: [HashMap<Point, RingLoc>; 2] = [HashMap::new(), HashMap::new()];
    for (i, j) in candidate_pairs(&edges[0], &edges[1], false) {
        for x in intersection_points(&edges[0][i], &edges[1][j]) {
            on_other[0].insert(x.clone(), loc_on_edge(b, j, &x));
            on_other[1].insert(x.clone(), loc_on_edge(a, i, &x));
            splits[0][i].push(x.clone());
            splits[1][j].push(x);
        }
    }

    let mut subs: Vec<SubEdge> = Vec::new();
    let mut index: HashMap<(Point, Point), usize> = HashMap::new();
    // per polygon, ring-ordered list of (sub-edge id, forward?)
    let mut ring_order: [Vec<(usize, bool)>; 2] = [Vec::new(), Vec::new()];
    for k in 0..2 {
        for (ei, e) in edges[k].iter().enumerate() {
            let pts = &mut splits[k][ei];
            sort_along(pts, &e.a, &e.b);
            for w in pts.windows(2) {
                let (x, y) = (&w[0], &w[1]);
                let fwd = x < y;
                let key = if fwd { (x.clone(), y.clone()) } else { (y.clone(), x.clone()) };
                let id = *index.entry(key.clone()).or_insert_with(|| {
                    subs.push(SubEdge {
                        p: key.0.clone(),
                        q: key.1.clone(),
                        dir: [0, 0],
                        member: [None, None],
                    });
                    subs.len() - 1
                });
                subs[id].dir[k] = if fwd { 1 } else { -1 };
                ring_order[k].push((id, fwd));
            }
        }
    }

    // membership of sub-edges of polygon k in the other polygon
    for k in 0..2 {
        let other = polys[1 - k];
        let order = &ring_order[k];
        let start_of = |&(id, fwd): &(usize, bool)| -> (&Point, &Point) {
            let s = &subs[id];
            if fwd {
                (&s.p, &s.q)
            } else {
                (&s.q, &s.p)
            }
        };
        let first_contact = order
            .iter()
            .position(|h| on_other[k].contains_key(start_of(h).0));
        let (start, mut current) = match first_contact {
            Some(pos) => (pos, false),
            None => {
                let inside = other.locate(polys[k].corner(0)) == Location::Inside;
                (0, inside)
            }
        };
        let n = order.len();
        let mut results: Vec<(usize, bool)> = Vec::with_capacity(n);
        for step in 0..n {
            let h = &order[(start + step) % n];
            let (x, y) = start_of(h);
            if subs[h.0].dir[1 - k] != 0 {
                continue;
            }
            if let Some(loc) = on_other[k].get(x) {
                current = enters_interior(other, *loc, x, &(y - x));
            }
            results.push((h.0, current));
        }
        for (id, m) in results {
            subs[id].member[1 - k] = Some(m);
        }
    }

    // boundary half-edges of the intersection
    let mut out_edges: HashMap<Point, Vec<Point>> = HashMap::new();
    for s in &subs {
        let mut left = true;
        let mut right = true;
        for k in 0..2 {
            let (l, r) = match s.dir[k] {
                1 => (true, false),
                -1 => (false, true),
                _ => {
                    let m = s.member[k].unwrap_or(false);
                    (m, m)
                }
            };
            left &= l;
            right &= r;
        }
        if left && !right {
            out_edges.entry(s.p.clone()).or_default().push(s.q.clone());
        } else if right && !left {
            out_edges.entry(s.q.clone()).or_default().push(s.p.clone());
        }
    }
    let mut pieces = trace_rings(out_edges);
    pieces.sort_by(|x, y| x.corners()[0].cmp(&y.corners()[0]));
    pieces
}

/// Traces half-edges (interior on the left) into rings, taking at every
/// vertex the first outgoing edge clockwise from the reversed incoming one.
fn trace_rings(mut out_edges: HashMap<Point, Vec<Point>>) -> Vec<SimplePolygon> {
    let mut starts: Vec<Point> = out_edges.keys().cloned().collect();
    starts.sort();
    let mut pieces = Vec::new();
    for s in starts {
        while let Some(first) = out_edges.get_mut(&s).and_then(|v| v.pop()) {
            let mut ring = vec![s.clone()];
            let mut prev = s.clone();
            let mut cur = first;
            let mut guard = 0usize;
            while cur != s || ring.len() < 2 {
                ring.push(cur.clone());
                let back = &prev - &cur;
                let cands = out_edges.get_mut(&cur).expect("dangling half-edge");
                let pick = (0..cands.len())
                    .min_by(|&i, &j| {
                        let di = &cands[i] - &cur;
                        let dj = &cands[j] - &cur;
                        cw_from(&back, &di, &dj)
                    })
                    .expect("dead end while tracing");
                let next = cands.swap_remove(pick);
                prev = cur;
                cur = next;
                guard += 1;
                assert!(guard < 10_000_000, "tracing did not terminate");
                if cur == s {
                    break;
                }
            }
            let v = normalize_ring(&ring, &|_| false);
            if v.len() >= 3 && ring_area_sign(&v) == Ordering::Greater {
                pieces.push(SimplePolygon::new_unchecked(v).canonical());
            }
        }
    }
    pieces
}

/// Clockwise angle order from `start`, where `start` itself sorts last.
fn cw_from(start: &Point, d1: &Point, d2: &Point) -> Ordering {
    let is_start = |d: &Point| angle_cmp(start, d, start, false) == Ordering::Equal;
    match (is_start(d1), is_start(d2)) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => angle_cmp(start, d1, d2, false),
    }
}

/// Clips a convex ring by the closed half-plane on `side` of line `ab`.
pub fn clip_convex_by_halfplane(ring: &[Point], a: &Point, b: &Point, side: Side) -> Vec<Point> {
    let sgn = |p: &Point| -> i8 {
        let s = orient_sign(a, b, p);
        if side == Side::Left {
            s
        } else {
            -s
        }
    };
    let n = ring.len();
    let mut out = Vec::new();
    for i in 0..n {
        let p = &ring[i];
        let q = &ring[(i + 1) % n];
        let (sp, sq) = (sgn(p), sgn(q));
        if sp >= 0 {
            out.push(p.clone());
        }
        if sp * sq < 0 {
            let x = super::point::line_intersection(p, q, a, b).expect("crossing");
            out.push(x);
        }
    }
    normalize_ring(&out, &|_| false)
}

/// Pieces of `poly` in the closed half-plane on `side` of the line `ab`;
/// zero-area pieces are dropped.
pub fn clip_halfplane(poly: &SimplePolygon, a: &Point, b: &Point, side: Side) -> Vec<SimplePolygon> {
    if a == b {
        return vec![];
    }
    let bb = poly.bbox();
    let span = (&bb.max.x - &bb.min.x) + (&bb.max.y - &bb.min.y) + Rational::one();
    let lo = Point {
        x: &bb.min.x - &span,
        y: &bb.min.y - &span,
    };
    let hi = Point {
        x: &bb.max.x + &span,
        y: &bb.max.y + &span,
    };
    let frame = vec![
        lo.clone(),
        Point { x: hi.x.clone(), y: lo.y.clone() },
        hi.clone(),
        Point { x: lo.x.clone(), y: hi.y.clone() },
    ];
    let clipped = clip_convex_by_halfplane(&frame, a, b, side);
    if clipped.len() < 3 || ring_area_sign(&clipped) != Ordering::Greater {
        return vec![];
    }
    polygon_intersection(poly, &SimplePolygon::new_unchecked(clipped))
}
