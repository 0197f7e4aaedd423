//! Independent checks of solver output.
//!
//! Nothing here calls into [`crate::extension_solver`] beyond reading its plain data
//! types (drawings and refinement records).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry_core::{
    intersection_points, orient_sign, segment_intersect, sort_along, BBox, Location, Point, Rational, Segment,
    SegmentIntersection, SimplePolygon,
};
use crate::instance_model::{build_dual_tree, Instance};
use crate::extension_solver::{ChordPath, Drawing};
use crate::visibility::common_visibility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    Crossing,
    OutsidePolygon,
    BendCount,
    EndpointMismatch,
    TouchesBoundaryImproperly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Chords involved, as given in the drawing.
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Point>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

fn key(e: [usize; 2]) -> [usize; 2] {
    [e[0].min(e[1]), e[0].max(e[1])]
}

fn segments(path: &[Point]) -> Vec<Segment> {
    path.windows(2).map(|w| Segment::new(w[0].clone(), w[1].clone())).collect()
}

/// How the relative interior of a path meets the polygon.
fn path_containment(poly: &SimplePolygon, path: &[Point]) -> Option<(ViolationKind, Point)> {
    let (first, last) = (&path[0], &path[path.len() - 1]);
    let mut touch: Option<Point> = None;
    for (i, s) in segments(path).iter().enumerate() {
        if s.is_degenerate() {
            continue;
        }
        let mut cuts = vec![s.a.clone(), s.b.clone()];
        for e in poly.edges() {
            cuts.extend(intersection_points(s, &e));
        }
        sort_along(&mut cuts, &s.a, &s.b);
        for w in cuts.windows(2) {
            let mid = w[0].midpoint(&w[1]);
            match poly.locate(&mid) {
                Location::Outside => return Some((ViolationKind::OutsidePolygon, mid)),
                Location::OnBoundary => {
                    touch.get_or_insert(mid);
                }
                Location::Inside => {}
            }
        }
        for c in &cuts {
            let is_path_end = (i == 0 && c == first) || (c == last && i + 2 == path.len());
            if !is_path_end && poly.locate(c) != Location::Inside {
                touch.get_or_insert(c.clone());
            }
        }
    }
    touch.map(|p| (ViolationKind::TouchesBoundaryImproperly, p))
}

/// Points where two chord paths meet other than shared end vertices.
fn path_conflict(a: &[Point], b: &[Point]) -> Option<Point> {
    let ends_a = [&a[0], &a[a.len() - 1]];
    let ends_b = [&b[0], &b[b.len() - 1]];
    for s in segments(a) {
        for t in segments(b) {
            match segment_intersect(&s, &t) {
                SegmentIntersection::Disjoint => {}
                SegmentIntersection::Overlap => return Some(s.a.midpoint(&s.b)),
                _ => {
                    for p in intersection_points(&s, &t) {
                        if !(ends_a.contains(&&p) && ends_b.contains(&&p)) {
                            return Some(p);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Checks a drawing against the instance: endpoints, bend count, interior
/// containment and pairwise non-crossing.
pub fn validate_drawing(inst: &Instance, d: &Drawing) -> ValidationReport {
    let poly = inst.boundary();
    let mut violations = Vec::new();
    let mut seen: HashMap<[usize; 2], usize> = HashMap::new();
    for c in &d.chords {
        *seen.entry(key(c.edge)).or_default() += 1;
    }
    for c in inst.chords() {
        match seen.get(&key(*c)) {
            Some(1) => {}
            Some(k) => violations.push(Violation {
                kind: ViolationKind::EndpointMismatch,
                edges: vec![*c],
                points: vec![],
                detail: format!("chord drawn {k} times"),
            }),
            None => violations.push(Violation {
                kind: ViolationKind::EndpointMismatch,
                edges: vec![*c],
                points: vec![],
                detail: "chord missing from drawing".into(),
            }),
        }
    }
    let wanted: std::collections::HashSet<[usize; 2]> = inst.chords().iter().map(|c| key(*c)).collect();
    let n = inst.n();
    let mut usable: Vec<&ChordPath> = Vec::new();
    for c in &d.chords {
        let bad = |detail: String| Violation {
            kind: ViolationKind::EndpointMismatch,
            edges: vec![c.edge],
            points: vec![],
            detail,
        };
        if c.edge[0] >= n || c.edge[1] >= n || !wanted.contains(&key(c.edge)) {
            violations.push(bad("edge is not a chord of the instance".into()));
            continue;
        }
        if c.path.len() < 2 {
            violations.push(bad("path has fewer than two points".into()));
            continue;
        }
        if c.path[0] != *inst.vertex_point(c.edge[0]) || c.path[c.path.len() - 1] != *inst.vertex_point(c.edge[1]) {
            violations.push(bad("path ends are not at the vertex positions".into()));
            continue;
        }
        if c.path.len() > 3 {
            violations.push(Violation {
                kind: ViolationKind::BendCount,
                edges: vec![c.edge],
                points: c.path[1..c.path.len() - 1].to_vec(),
                detail: format!("{} bends", c.path.len() - 2),
            });
        }
        if let Some((kind, p)) = path_containment(poly, &c.path) {
            violations.push(Violation {
                kind,
                edges: vec![c.edge],
                points: vec![p],
                detail: "path leaves the open interior".into(),
            });
        }
        usable.push(c);
    }
    for (i, a) in usable.iter().enumerate() {
        for b in &usable[i + 1..] {
            if let Some(p) = path_conflict(&a.path, &b.path) {
                violations.push(Violation {
                    kind: ViolationKind::Crossing,
                    edges: vec![a.edge, b.edge],
                    points: vec![p],
                    detail: "paths meet away from a shared vertex".into(),
                });
            }
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;
pub const BUDGET_ENV: &str = "BENDEXT_ORACLE_BUDGET";

/// The budget from the environment, or the default.
pub fn oracle_budget_from_env() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search needs more than {budget} node expansions")]
    ResolutionTooLarge { budget: u64 },
    #[error("resolution must be at least 2")]
    ResolutionTooSmall,
    #[error(transparent)]
    Instance(#[from] crate::instance_model::InstanceError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Found(Drawing),
    NotFound,
}

/// Grid points of the bounding box at the given resolution that lie
/// strictly inside the polygon.
pub fn interior_grid(poly: &SimplePolygon, resolution: u32) -> Vec<Point> {
    let bb = poly.bbox();
    let r = Rational::from_integer(resolution);
    let w = &(&bb.max.x - &bb.min.x) / &r;
    let h = &(&bb.max.y - &bb.min.y) / &r;
    let mut out = Vec::new();
    for i in 0..=resolution {
        let x = &bb.min.x + &(&w * &Rational::from_integer(i));
        for j in 0..=resolution {
            let p = Point::new(x.clone(), &bb.min.y + &(&h * &Rational::from_integer(j)));
            if poly.locate(&p) == Location::Inside {
                out.push(p);
            }
        }
    }
    out
}

struct Search<'a> {
    cands: Vec<Vec<Vec<Point>>>,
    placed: Vec<Option<usize>>,
    expansions: u64,
    budget: u64,
    _poly: &'a SimplePolygon,
}

impl Search<'_> {
    /// Depth-first search with conflict-directed backjumping. Returns the
    /// conflict set (levels) on failure.
    fn run(&mut self, level: usize) -> Result<Result<(), Vec<usize>>, OracleError> {
        if level == self.cands.len() {
            return Ok(Ok(()));
        }
        let mut conflicts: Vec<usize> = Vec::new();
        for k in 0..self.cands[level].len() {
            self.expansions += 1;
            if self.expansions > self.budget {
                return Err(OracleError::ResolutionTooLarge { budget: self.budget });
            }
            let cand = &self.cands[level][k];
            let clash = (0..level).find(|&j| {
                let pj = &self.cands[j][self.placed[j].expect("placed")];
                path_conflict(cand, pj).is_some()
            });
            if let Some(j) = clash {
                if !conflicts.contains(&j) {
                    conflicts.push(j);
                }
                continue;
            }
            self.placed[level] = Some(k);
            match self.run(level + 1)? {
                Ok(()) => return Ok(Ok(())),
                Err(deeper) => {
                    self.placed[level] = None;
                    if !deeper.contains(&level) {
                        return Ok(Err(deeper));
                    }
                    for j in deeper {
                        if j != level && !conflicts.contains(&j) {
                            conflicts.push(j);
                        }
                    }
                }
            }
        }
        Ok(Err(conflicts))
    }
}

/// Searches for a drawing whose bends are interior grid points. Each chord
/// tries its straight segment first, then grid bends ordered by distance to
/// the chord's midpoint (ties by coordinates). Chords are assigned in
/// bottom-up order of the dual tree.
pub fn grid_oracle(inst: &Instance, resolution: u32, budget: u64) -> Result<OracleResult, OracleError> {
    if resolution < 2 {
        return Err(OracleError::ResolutionTooSmall);
    }
    let poly = inst.boundary();
    if inst.m() == 0 {
        return Ok(OracleResult::Found(Drawing::default()));
    }
    let dt = build_dual_tree(inst, None)?;
    let order: Vec<usize> = dt
        .bottom_up_order()
        .into_iter()
        .filter_map(|f| dt.tree_edge[f])
        .collect();
    let grid = interior_grid(poly, resolution);
    let mut cands = Vec::with_capacity(order.len());
    let mut total: u64 = 0;
    for &ci in &order {
        let [a, b] = inst.chords()[ci];
        let (pa, pb) = (inst.vertex_point(a), inst.vertex_point(b));
        let mid = pa.midpoint(pb);
        let mut list: Vec<Vec<Point>> = Vec::new();
        let straight = vec![pa.clone(), pb.clone()];
        if path_containment(poly, &straight).is_none() {
            list.push(straight);
        }
        let mut bends: Vec<&Point> = grid.iter().filter(|g| orient_sign(pa, pb, g) != 0).collect();
        bends.sort_by(|p, q| p.dist2(&mid).cmp(&q.dist2(&mid)).then_with(|| p.cmp(q)));
        for g in bends {
            total += 1;
            if total > budget {
                return Err(OracleError::ResolutionTooLarge { budget });
            }
            let path = vec![pa.clone(), g.clone(), pb.clone()];
            if poly.segment_strictly_inside(pa, g) && poly.segment_strictly_inside(g, pb) {
                list.push(path);
            }
        }
        if list.is_empty() {
            return Ok(OracleResult::NotFound);
        }
        cands.push(list);
    }
    let mut search = Search {
        placed: vec![None; cands.len()],
        cands,
        expansions: total,
        budget,
        _poly: poly,
    };
    match search.run(0)? {
        Err(_) => Ok(OracleResult::NotFound),
        Ok(()) => {
            let mut chords: Vec<Option<ChordPath>> = vec![None; inst.m()];
            for (lvl, &ci) in order.iter().enumerate() {
                let edge = inst.chords()[ci];
                let path = search.cands[lvl][search.placed[lvl].expect("placed")].clone();
                chords[ci] = Some(ChordPath { edge, path });
            }
            Ok(OracleResult::Found(Drawing {
                chords: chords.into_iter().map(|c| c.expect("all chords assigned")).collect(),
            }))
        }
    }
}

/// Winding number of a closed ring around `r`; `None` when `r` is on it.
pub fn winding_number(ring: &[Point], r: &Point) -> Option<i32> {
    let n = ring.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (&ring[i], &ring[(i + 1) % n]);
        let s = orient_sign(a, b, r);
        if s == 0 && crate::geometry_core::on_segment(r, a, b) {
            return None;
        }
        if a.y <= r.y {
            if b.y > r.y && s > 0 {
                w += 1;
            }
        } else if b.y <= r.y && s < 0 {
            w -= 1;
        }
    }
    Some(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    In,
    Out,
    Undecided,
}

/// Samples bend points of a convex chord and answers membership queries
/// for its restricted region: points of the chord-side polygon that some
/// bend placements cut off and others keep.
#[derive(Debug, Clone)]
pub struct RestrictedRegionSampler {
    u: Point,
    v: Point,
    pocket: Vec<Point>,
    bends: Vec<Point>,
}

impl RestrictedRegionSampler {
    /// `poly` is the polygon the chord is processed in and `(u, v)` has
    /// the chord side counterclockwise from `u` to `v`.
    pub fn new(poly: &SimplePolygon, u: &Point, v: &Point, bend_samples: usize) -> RestrictedRegionSampler {
        let ui = poly.index_of(u).expect("u is a corner");
        let vi = poly.index_of(v).expect("v is a corner");
        let pocket = poly.chain(ui, vi);
        let pieces = common_visibility(poly, u, v).unwrap_or_default();
        let total_area: Rational = pieces.iter().map(|p| p.area()).fold(Rational::zero(), |a, b| &a + &b);
        let mut bends = Vec::new();
        for piece in &pieces {
            let share = if total_area.is_zero() {
                0.0
            } else {
                (&piece.area() / &total_area).to_f64()
            };
            let want = ((bend_samples as f64) * share).ceil().max(1.0) as u32;
            let mut res = (want as f64).sqrt().ceil() as u32 + 1;
            let mut got = Vec::new();
            for _ in 0..8 {
                got = sample_inside(piece, res);
                if got.len() as u32 >= want {
                    break;
                }
                res *= 2;
            }
            if got.is_empty() {
                got.push(piece.interior_point());
            }
            bends.extend(got);
        }
        RestrictedRegionSampler {
            u: u.clone(),
            v: v.clone(),
            pocket,
            bends,
        }
    }

    pub fn bend_count(&self) -> usize {
        self.bends.len()
    }

    /// Whether `r` is cut off by the path `u, b, v`; `None` on the path.
    fn obstructed(&self, wq: i32, b: &Point, r: &Point) -> Option<bool> {
        let tri = [self.v.clone(), b.clone(), self.u.clone()];
        let wt = winding_number(&tri, r)?;
        Some(wq + wt == 1)
    }

    pub fn classify(&self, r: &Point) -> Membership {
        let Some(wq) = winding_number(&self.pocket, r) else {
            return Membership::Out;
        };
        if wq == 0 {
            return Membership::Out;
        }
        let (mut cut, mut kept, mut unsure) = (false, false, false);
        for b in &self.bends {
            match self.obstructed(wq, b, r) {
                Some(true) => cut = true,
                Some(false) => kept = true,
                None => unsure = true,
            }
            if cut && kept {
                return Membership::In;
            }
        }
        if unsure {
            Membership::Undecided
        } else {
            Membership::Out
        }
    }
}

fn sample_inside(piece: &SimplePolygon, res: u32) -> Vec<Point> {
    let bb: BBox = piece.bbox();
    let r = Rational::from_integer(res);
    let w = &(&bb.max.x - &bb.min.x) / &r;
    let h = &(&bb.max.y - &bb.min.y) / &r;
    let mut out = Vec::new();
    for i in 1..res {
        for j in 1..res {
            let p = Point::new(
                &bb.min.x + &(&w * &Rational::from_integer(i)),
                &bb.min.y + &(&h * &Rational::from_integer(j)),
            );
            if piece.locate(&p) == Location::Inside {
                out.push(p);
            }
        }
    }
    out
}

/// One-shot membership query, see [`RestrictedRegionSampler`].
pub fn restricted_region_member(poly: &SimplePolygon, u: &Point, v: &Point, r: &Point, bend_samples: usize) -> Membership {
    RestrictedRegionSampler::new(poly, u, v, bend_samples).classify(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_inst(chords: &[[usize; 2]]) -> Instance {
        let pts = [(0, 0), (4, 0), (4, 4), (0, 4)].map(|(x, y)| Point::int(x, y));
        Instance::new(pts.to_vec(), vec![0, 1, 2, 3], chords.to_vec()).unwrap()
    }

    fn pentagon() -> Instance {
        let pts = [(0, 0), (6, 0), (8, 4), (3, 8), (-2, 4)].map(|(x, y)| Point::int(x, y));
        Instance::new(pts.to_vec(), vec![0, 1, 2, 3, 4], vec![[0, 2], [0, 3]]).unwrap()
    }

    fn path(edge: [usize; 2], pts: &[(i64, i64)]) -> ChordPath {
        ChordPath {
            edge,
            path: pts.iter().map(|&(x, y)| Point::int(x, y)).collect(),
        }
    }

    fn kinds(r: &ValidationReport) -> Vec<ViolationKind> {
        r.violations.iter().map(|v| v.kind).collect()
    }

    #[test]
    fn straight_diagonal_is_valid() {
        let inst = square_inst(&[[0, 2]]);
        let d = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (4, 4)])],
        };
        let r = validate_drawing(&inst, &d);
        assert!(r.ok, "{:?}", r.violations);
        // reversed orientation is the same chord
        let d = Drawing {
            chords: vec![path([2, 0], &[(4, 4), (0, 0)])],
        };
        assert!(validate_drawing(&inst, &d).ok);
    }

    #[test]
    fn crossing_paths_are_reported() {
        let inst = pentagon();
        let ok = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (8, 4)]), path([0, 3], &[(0, 0), (3, 8)])],
        };
        assert!(validate_drawing(&inst, &ok).ok);
        let bad = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (0, 5), (8, 4)]), path([0, 3], &[(0, 0), (3, 8)])],
        };
        assert_eq!(kinds(&validate_drawing(&inst, &bad)), vec![ViolationKind::Crossing]);
    }

    #[test]
    fn leaving_the_polygon_is_reported() {
        let pts = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)].map(|(x, y)| Point::int(x, y));
        let inst = Instance::new(pts.to_vec(), (0..6).collect(), vec![[2, 4]]).unwrap();
        let straight = Drawing {
            chords: vec![path([2, 4], &[(4, 2), (2, 4)])],
        };
        assert_eq!(kinds(&validate_drawing(&inst, &straight)), vec![ViolationKind::OutsidePolygon]);
        let bent = Drawing {
            chords: vec![path([2, 4], &[(4, 2), (1, 1), (2, 4)])],
        };
        assert!(validate_drawing(&inst, &bent).ok);
    }

    #[test]
    fn touching_the_boundary_is_reported() {
        let inst = square_inst(&[[0, 2]]);
        // bend on the outer edge
        let d = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (4, 2), (4, 4)])],
        };
        let k = kinds(&validate_drawing(&inst, &d));
        assert_eq!(k, vec![ViolationKind::TouchesBoundaryImproperly]);
    }

    #[test]
    fn bend_count_and_endpoints() {
        let inst = square_inst(&[[0, 2]]);
        let two_bends = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (2, 1), (3, 2), (4, 4)])],
        };
        assert_eq!(kinds(&validate_drawing(&inst, &two_bends)), vec![ViolationKind::BendCount]);
        let missing = Drawing::default();
        assert_eq!(kinds(&validate_drawing(&inst, &missing)), vec![ViolationKind::EndpointMismatch]);
        let wrong_end = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (4, 3)])],
        };
        assert!(kinds(&validate_drawing(&inst, &wrong_end)).contains(&ViolationKind::EndpointMismatch));
        let foreign = Drawing {
            chords: vec![path([0, 2], &[(0, 0), (4, 4)]), path([1, 3], &[(4, 0), (0, 4)])],
        };
        assert!(kinds(&validate_drawing(&inst, &foreign)).contains(&ViolationKind::EndpointMismatch));
    }

    #[test]
    fn oracle_finds_straight_square_diagonal() {
        let inst = square_inst(&[[0, 2]]);
        match grid_oracle(&inst, 10, DEFAULT_ORACLE_BUDGET).unwrap() {
            OracleResult::Found(d) => {
                assert_eq!(d.chords[0].bends(), 0);
                assert!(validate_drawing(&inst, &d).ok);
            }
            OracleResult::NotFound => panic!("square diagonal is drawable"),
        }
    }

    #[test]
    fn oracle_bends_around_a_notch() {
        let pts = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)].map(|(x, y)| Point::int(x, y));
        let inst = Instance::new(pts.to_vec(), (0..6).collect(), vec![[2, 4]]).unwrap();
        match grid_oracle(&inst, 8, DEFAULT_ORACLE_BUDGET).unwrap() {
            OracleResult::Found(d) => {
                assert_eq!(d.chords[0].bends(), 1);
                assert!(validate_drawing(&inst, &d).ok);
            }
            OracleResult::NotFound => panic!("L-shape chord is drawable"),
        }
    }

    #[test]
    fn oracle_rejects_s_shape_and_bad_arguments() {
        let pts = [(0, 0), (5, 0), (5, 3), (1, 3), (1, 4), (5, 4), (5, 5), (0, 5), (0, 2), (4, 2), (4, 1), (0, 1)]
            .map(|(x, y)| Point::int(x, y));
        let inst = Instance::new(pts.to_vec(), (0..12).collect(), vec![[0, 6]]).unwrap();
        assert_eq!(grid_oracle(&inst, 50, DEFAULT_ORACLE_BUDGET).unwrap(), OracleResult::NotFound);
        assert_eq!(grid_oracle(&inst, 1, 100), Err(OracleError::ResolutionTooSmall));
        assert_eq!(
            grid_oracle(&inst, 50, 10),
            Err(OracleError::ResolutionTooLarge { budget: 10 })
        );
    }

    #[test]
    fn winding_numbers() {
        let sq: Vec<Point> = [(0, 0), (4, 0), (4, 4), (0, 4)].iter().map(|&(x, y)| Point::int(x, y)).collect();
        assert_eq!(winding_number(&sq, &Point::int(1, 1)), Some(1));
        assert_eq!(winding_number(&sq, &Point::int(5, 1)), Some(0));
        assert_eq!(winding_number(&sq, &Point::int(4, 1)), None);
        let rev: Vec<Point> = sq.iter().rev().cloned().collect();
        assert_eq!(winding_number(&rev, &Point::int(1, 1)), Some(-1));
    }

    #[test]
    fn restricted_region_of_square_diagonal() {
        let sq = SimplePolygon::from_ints(&[(0, 0), (4, 0), (4, 4), (0, 4)]).unwrap();
        let (u, v) = (Point::int(0, 0), Point::int(4, 4));
        let s = RestrictedRegionSampler::new(&sq, &u, &v, 200);
        assert!(s.bend_count() >= 100);
        assert_eq!(s.classify(&Point::int(3, 1)), Membership::In);
        assert_eq!(s.classify(&Point::int(1, 3)), Membership::Out);
        assert_eq!(s.classify(&Point::int(4, 1)), Membership::Out);
        assert_eq!(restricted_region_member(&sq, &u, &v, &Point::int(9, 9), 10), Membership::Out);
    }
}
