//! Bottom-up polygon refinement and top-down bend placement.
//!
//! The bottom-up pass processes the dual tree leaf by leaf. For the chord
//! `(u, v)` of a leaf face, the pocket side is the part of the current
//! polygon to the right of `u -> v` (the face side); the root side is to the
//! left. Reflex chords are cut at their unique minimal bend point, convex
//! chords remove the region every convex drawing cuts off. The top-down pass
//! then places actual bends inside the recorded regions.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry_core::{
    check_ring_simple, clip_halfplane, intersection_points, normalize_ring, on_segment, orient_sign,
    orient_value, polygon_intersection, ring_area_sign, sort_along, strictly_on_segment, BBox, BoundaryPos,
    GeometryError, Location, Point, Rational, Segment, Side, SimplePolygon,
};
use crate::instance_model::{build_dual_tree, DualTree, Instance, InstanceError};
use crate::visibility::{common_visibility_of, rotate_ray_hit, visibility_polygon, Rotation, VisRegion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Convex,
    Reflex,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("refined polygon is not simple: {0}")]
    AssemblyNotSimple(String),
    #[error("bend placement failed: {0}")]
    PlacementFailed(String),
    #[error("geometry failure: {0}")]
    Geometry(#[from] GeometryError),
}

impl SolveError {
    /// Internal errors signal a broken invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        !matches!(self, SolveError::Instance(_))
    }
}

/// Why an instance was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// The chord's endpoints share no visible region with interior.
    EmptyVisibility,
    /// Several containment-minimal bend points exist for a reflex chord.
    NoMinimalPoint,
    /// Refinement left a polygon without interior.
    DegeneratePolygon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub face: usize,
    /// Oriented chord `(u, v)`, face side counterclockwise from `u` to `v`.
    pub edge: [usize; 2],
    pub step: usize,
}

/// A single bottom-up step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub face: usize,
    pub chord: usize,
    pub u: usize,
    pub v: usize,
    pub class: EdgeClass,
    /// `P_i`, the polygon the chord was processed in.
    pub before: Arc<SimplePolygon>,
    /// `P_{i+1}`.
    pub after: Arc<SimplePolygon>,
    /// All pieces of the common visibility region.
    pub vis: Vec<SimplePolygon>,
    /// The piece the refinement (and later the bend) uses.
    pub piece: SimplePolygon,
    /// Minimal bend point of a reflex chord.
    pub minimal_bend: Option<Point>,
    /// Number of containment-minimal candidates seen for a reflex chord.
    pub minimal_candidates: usize,
    /// Replacement boundary from `u` to `v` that `P_{i+1}` uses.
    pub cut_path: Vec<Point>,
}

#[derive(Debug, Clone)]
struct CacheEntry {
    /// Stamps of the two endpoint regions the pieces were built from.
    stamps: [u64; 2],
    pieces: Vec<SimplePolygon>,
    class: Option<EdgeClass>,
}

/// State of the bottom-up pass.
#[derive(Debug, Clone)]
pub struct RefinementState {
    pub current: Arc<SimplePolygon>,
    pub processed: Vec<bool>,
    pub log: Vec<StepRecord>,
    /// Number of visibility computations performed.
    pub visibility_calls: usize,
    /// Visibility region of a vertex in `current`, with a unique stamp.
    vertex_vis: HashMap<usize, (u64, Arc<VisRegion>)>,
    cache: HashMap<usize, CacheEntry>,
    pinned: HashSet<Point>,
    /// Unprocessed chords at each vertex.
    open_chords: Vec<usize>,
    next_stamp: u64,
}

impl RefinementState {
    pub fn new(inst: &Instance, faces: usize) -> RefinementState {
        let mut open_chords = vec![0; inst.n()];
        for c in inst.chords() {
            open_chords[c[0]] += 1;
            open_chords[c[1]] += 1;
        }
        RefinementState {
            current: Arc::new(inst.boundary().clone()),
            processed: vec![false; faces],
            log: Vec::new(),
            visibility_calls: 0,
            vertex_vis: HashMap::new(),
            cache: HashMap::new(),
            pinned: (0..inst.n()).map(|v| inst.vertex_point(v).clone()).collect(),
            open_chords,
            next_stamp: 0,
        }
    }

    fn vertex_region(&mut self, inst: &Instance, x: usize) -> Result<(u64, Arc<VisRegion>), SolveError> {
        if let Some((st, r)) = self.vertex_vis.get(&x) {
            return Ok((*st, r.clone()));
        }
        let r = Arc::new(visibility_polygon(&self.current, inst.vertex_point(x))?);
        self.visibility_calls += 1;
        self.next_stamp += 1;
        self.vertex_vis.insert(x, (self.next_stamp, r.clone()));
        Ok((self.next_stamp, r))
    }

    fn entry(&mut self, inst: &Instance, dt: &DualTree, face: usize) -> Result<&CacheEntry, SolveError> {
        let (u, v) = dt.oriented_chord(inst, face).expect("non-root face");
        let (su, vu) = self.vertex_region(inst, u)?;
        let (sv, vv) = self.vertex_region(inst, v)?;
        let fresh = self.cache.get(&face).is_some_and(|e| e.stamps == [su, sv]);
        if !fresh {
            let pieces = common_visibility_of(&self.current, &vu, &vv);
            let class = classify_pieces(&pieces, inst.vertex_point(u), inst.vertex_point(v));
            self.cache.insert(
                face,
                CacheEntry {
                    stamps: [su, sv],
                    pieces,
                    class,
                },
            );
        }
        Ok(&self.cache[&face])
    }

    /// Marks the chord `(u, v)` processed and drops cached regions that may
    /// see into the area its refinement removed (`cut` is the new boundary
    /// path), or that no open chord needs any more.
    fn retire(&mut self, face: usize, u: usize, v: usize, cut: Option<&[Point]>) {
        self.processed[face] = true;
        self.cache.remove(&face);
        self.open_chords[u] -= 1;
        self.open_chords[v] -= 1;
        let open = &self.open_chords;
        let segs: Vec<Segment> = cut
            .map(|c| c.windows(2).map(|w| Segment::new(w[0].clone(), w[1].clone())).collect())
            .unwrap_or_default();
        self.vertex_vis.retain(|&x, (_, r)| {
            if open[x] == 0 {
                return false;
            }
            if cut.is_none() {
                return true;
            }
            x != u && x != v && !path_enters_interior(&segs, &r.region)
        });
    }
}


/// Whether some segment has points in the interior of `poly`.
fn path_enters_interior(segs: &[Segment], poly: &SimplePolygon) -> bool {
    let bb = poly.bbox();
    for s in segs {
        let sb = BBox::of([&s.a, &s.b]).expect("two points");
        if !sb.overlaps(&bb) {
            continue;
        }
        let mut cuts = vec![s.a.clone(), s.b.clone()];
        for e in poly.edges() {
            let eb = BBox::of([&e.a, &e.b]).expect("two points");
            if eb.overlaps(&sb) {
                cuts.extend(intersection_points(s, &e));
            }
        }
        sort_along(&mut cuts, &s.a, &s.b);
        if cuts.windows(2).any(|w| poly.locate(&w[0].midpoint(&w[1])) == Location::Inside) {
            return true;
        }
    }
    false
}

/// A polygon has interior strictly right of `u -> v` exactly when one of
/// its corners is.
fn reaches_pocket_side(piece: &SimplePolygon, u: &Point, v: &Point) -> bool {
    piece.corners().iter().any(|c| orient_sign(u, v, c) < 0)
}

/// Convex iff some piece has interior strictly on the pocket side of the
/// line `u -> v`; `None` when there is no common visibility at all.
fn classify_pieces(pieces: &[SimplePolygon], u: &Point, v: &Point) -> Option<EdgeClass> {
    if pieces.is_empty() {
        return None;
    }
    let convex = pieces.iter().any(|p| reaches_pocket_side(p, u, v));
    Some(if convex { EdgeClass::Convex } else { EdgeClass::Reflex })
}

/// Classifies the chord of `face` against the current polygon.
pub fn classify_edge(
    state: &mut RefinementState,
    inst: &Instance,
    dt: &DualTree,
    face: usize,
) -> Result<Option<EdgeClass>, SolveError> {
    Ok(state.entry(inst, dt, face)?.class)
}

/// Leaves of the unprocessed part of the tree.
fn current_leaves(state: &RefinementState, dt: &DualTree) -> Vec<usize> {
    (0..dt.face_count())
        .filter(|&f| f != dt.root && !state.processed[f])
        .filter(|&f| dt.children[f].iter().all(|&c| state.processed[c]))
        .collect()
}

/// Outcome of leaf selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafChoice {
    Next(usize, EdgeClass),
    /// A leaf whose chord has no common visibility.
    Empty(usize),
}

/// Prefers reflex leaves (smallest face id), otherwise the deepest convex
/// leaf (smallest face id among ties).
pub fn choose_next_leaf(
    state: &mut RefinementState,
    inst: &Instance,
    dt: &DualTree,
) -> Result<Option<LeafChoice>, SolveError> {
    let leaves = current_leaves(state, dt);
    let mut best_convex: Option<usize> = None;
    for &f in &leaves {
        match classify_edge(state, inst, dt, f)? {
            None => return Ok(Some(LeafChoice::Empty(f))),
            Some(EdgeClass::Reflex) => return Ok(Some(LeafChoice::Next(f, EdgeClass::Reflex))),
            Some(EdgeClass::Convex) => {
                if best_convex.is_none_or(|b| dt.depth[f] > dt.depth[b]) {
                    best_convex = Some(f);
                }
            }
        }
    }
    Ok(best_convex.map(|f| LeafChoice::Next(f, EdgeClass::Convex)))
}

/// Result of the minimal bend search for a reflex chord.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinimalBend {
    Unique { point: Point, piece: usize },
    /// The containment-minimal candidates; more than one.
    Ambiguous(Vec<Point>),
}

/// Whether `b` lies in the closed triangle `u, v, apex`.
fn in_closed_triangle(b: &Point, u: &Point, v: &Point, apex: &Point) -> bool {
    let s = orient_sign(u, v, apex);
    if s == 0 {
        // Candidates on the line lie strictly between u and v, so the
        // triangle collapses to the segment uv.
        return on_segment(b, u, v);
    }
    orient_sign(u, v, b) * s >= 0 && orient_sign(v, apex, b) * s >= 0 && orient_sign(apex, u, b) * s >= 0
}

/// Candidate bend points of a reflex chord: the corners of the common
/// visibility pieces other than `u` and `v` that give a non-degenerate path.
pub fn reflex_candidates(pieces: &[SimplePolygon], u: &Point, v: &Point) -> Vec<(Point, usize)> {
    let mut out: Vec<(Point, usize)> = Vec::new();
    let mut seen: HashSet<Point> = HashSet::new();
    for (k, p) in pieces.iter().enumerate() {
        for c in p.corners() {
            if c == u || c == v || seen.contains(c) {
                continue;
            }
            if orient_sign(u, v, c) == 0 && !strictly_on_segment(c, u, v) {
                continue;
            }
            seen.insert(c.clone());
            out.push((c.clone(), k));
        }
    }
    out
}

/// Finds the bend point whose obstructed region is contained in that of
/// every other candidate. The obstructed area grows with the distance from
/// the line `uv`, so the closest candidate is the only possible answer.
pub fn minimal_bend_reflex(pieces: &[SimplePolygon], u: &Point, v: &Point) -> MinimalBend {
    let cands = reflex_candidates(pieces, u, v);
    let Some(best) = cands.iter().min_by(|a, b| orient_value(u, v, &a.0).cmp(&orient_value(u, v, &b.0))) else {
        return MinimalBend::Ambiguous(Vec::new());
    };
    if cands.iter().all(|(c, _)| in_closed_triangle(&best.0, u, v, c)) {
        return MinimalBend::Unique {
            point: best.0.clone(),
            piece: best.1,
        };
    }
    let minimal: Vec<Point> = cands
        .iter()
        .filter(|(b, _)| !cands.iter().any(|(c, _)| c != b && in_closed_triangle(c, u, v, b)))
        .map(|(b, _)| b.clone())
        .collect();
    MinimalBend::Ambiguous(minimal)
}

/// Whether two polygons have the same corners in the same cyclic order.
fn same_ring(a: &SimplePolygon, b: &SimplePolygon) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = b.index_of(a.corner(0)) else {
        return false;
    };
    (0..a.len()).all(|i| a.corner(i) == b.corner(k + i))
}

enum Assembly {
    Polygon(SimplePolygon),
    Degenerate,
}

fn assemble(ring: Vec<Point>, pinned: &HashSet<Point>) -> Result<Assembly, SolveError> {
    let ring = normalize_ring(&ring, &|q| pinned.contains(q));
    if ring.len() < 3 || ring_area_sign(&ring) != std::cmp::Ordering::Greater {
        return Ok(Assembly::Degenerate);
    }
    check_ring_simple(&ring).map_err(SolveError::AssemblyNotSimple)?;
    Ok(Assembly::Polygon(SimplePolygon::new(ring)?))
}

/// `P(v, u)` followed by `path` (which runs from `u` to `v`).
fn root_side_with(poly: &SimplePolygon, u: &Point, v: &Point, path: &[Point]) -> Vec<Point> {
    let ui = poly.index_of(u).expect("vertex is a corner");
    let vi = poly.index_of(v).expect("vertex is a corner");
    let mut ring = poly.chain(vi, ui);
    for q in &path[1..path.len() - 1] {
        if ring.last() != Some(q) {
            ring.push(q.clone());
        }
    }
    ring
}

/// Reflex refinement: `P(v, u)` closed by the two segments through `b`.
pub fn refine_reflex(poly: &SimplePolygon, u: &Point, v: &Point, b: &Point, pinned: &HashSet<Point>) -> Result<Option<SimplePolygon>, SolveError> {
    let path = [u.clone(), b.clone(), v.clone()];
    Ok(match assemble(root_side_with(poly, u, v, &path), pinned)? {
        Assembly::Polygon(p) => Some(p),
        Assembly::Degenerate => None,
    })
}

/// The cut path `u, p_u, ..., p_v, v` of a convex chord in one piece of its
/// common visibility.
pub fn convex_cut_path(poly: &SimplePolygon, u: &Point, v: &Point, piece: &SimplePolygon) -> Result<Vec<Point>, SolveError> {
    let ui = poly.index_of(u).expect("vertex is a corner");
    let vi = poly.index_of(v).expect("vertex is a corner");
    let n = poly.len();
    let p_u = if piece.locate(u) != Location::Outside {
        u.clone()
    } else {
        rotate_ray_hit(poly, u, &(poly.corner(ui + 1) - u), piece, Rotation::CounterClockwise)?
    };
    let p_v = if piece.locate(v) != Location::Outside {
        v.clone()
    } else {
        rotate_ray_hit(poly, v, &(poly.corner(vi + n - 1) - v), piece, Rotation::Clockwise)?
    };
    let (q, _) = piece.with_boundary_point(&p_u).ok_or(GeometryError::PointOutside(format!("{p_u:?}")))?;
    let (q, _) = q.with_boundary_point(&p_v).ok_or(GeometryError::PointOutside(format!("{p_v:?}")))?;
    let a = q.index_of(&p_u).expect("inserted");
    let b = q.index_of(&p_v).expect("inserted");
    let mut path = vec![u.clone()];
    let along = if a == b { vec![p_u] } else { q.chain(a, b) };
    for x in along.into_iter().chain(std::iter::once(v.clone())) {
        if path.last() != Some(&x) {
            path.push(x);
        }
    }
    Ok(path)
}

/// Convex refinement in the given piece:
/// `P(v, u) ∘ u p_u ∘ ∂V(p_u, p_v) ∘ p_v v`.
pub fn refine_convex(
    poly: &SimplePolygon,
    u: &Point,
    v: &Point,
    piece: &SimplePolygon,
    pinned: &HashSet<Point>,
) -> Result<(Option<SimplePolygon>, Vec<Point>), SolveError> {
    let path = convex_cut_path(poly, u, v, piece)?;
    let p = match assemble(root_side_with(poly, u, v, &path), pinned)? {
        Assembly::Polygon(p) => Some(p),
        Assembly::Degenerate => None,
    };
    Ok((p, path))
}

/// Outcome of the bottom-up pass.
#[derive(Debug, Clone)]
pub enum BottomUp {
    Yes(RefinementState),
    No(Witness, RefinementState),
}

/// Runs the bottom-up refinement over all non-root faces.
pub fn bottom_up(inst: &Instance, dt: &DualTree) -> Result<BottomUp, SolveError> {
    let mut state = RefinementState::new(inst, dt.face_count());
    let m = dt.face_count() - 1;
    for step in 0..m {
        let choice = choose_next_leaf(&mut state, inst, dt)?.expect("unprocessed leaves remain");
        let (face, class) = match choice {
            LeafChoice::Empty(face) => {
                let (u, v) = dt.oriented_chord(inst, face).expect("non-root");
                let w = Witness {
                    kind: WitnessKind::EmptyVisibility,
                    face,
                    edge: [u, v],
                    step,
                };
                return Ok(BottomUp::No(w, state));
            }
            LeafChoice::Next(f, c) => (f, c),
        };
        let (u, v) = dt.oriented_chord(inst, face).expect("non-root");
        let (pu, pv) = (inst.vertex_point(u).clone(), inst.vertex_point(v).clone());
        let entry = state.cache.remove(&face).expect("classified leaf");
        let poly = state.current.clone();
        let no = |kind| Witness {
            kind,
            face,
            edge: [u, v],
            step,
        };
        let (after, piece, cut, minimal_bend, minimal_candidates) = match class {
            EdgeClass::Reflex => match minimal_bend_reflex(&entry.pieces, &pu, &pv) {
                MinimalBend::Ambiguous(c) => {
                    let mut state = state;
                    state.log.push(StepRecord {
                        step,
                        face,
                        chord: dt.tree_edge[face].expect("non-root"),
                        u,
                        v,
                        class,
                        before: poly.clone(),
                        after: poly.clone(),
                        vis: entry.pieces.clone(),
                        piece: entry.pieces[0].clone(),
                        minimal_bend: None,
                        minimal_candidates: c.len(),
                        cut_path: Vec::new(),
                    });
                    return Ok(BottomUp::No(no(WitnessKind::NoMinimalPoint), state));
                }
                MinimalBend::Unique { point, piece } => match refine_reflex(&poly, &pu, &pv, &point, &state.pinned)? {
                    None => return Ok(BottomUp::No(no(WitnessKind::DegeneratePolygon), state)),
                    Some(p) => (p, piece, vec![pu.clone(), point.clone(), pv.clone()], Some(point), 1),
                },
            },
            EdgeClass::Convex => {
                let mut best: Option<(SimplePolygon, usize, Vec<Point>)> = None;
                let mut first_err = None;
                for (k, piece) in entry.pieces.iter().enumerate() {
                    if !reaches_pocket_side(piece, &pu, &pv) {
                        continue;
                    }
                    match refine_convex(&poly, &pu, &pv, piece, &state.pinned) {
                        Ok((Some(p), path)) => {
                            if best.as_ref().is_none_or(|b| p.area() > b.0.area()) {
                                best = Some((p, k, path));
                            }
                        }
                        Ok((None, _)) => {}
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                match (best, first_err) {
                    (Some((p, k, path)), _) => (p, k, path, None, 0),
                    (None, Some(e)) => return Err(e),
                    (None, None) => return Ok(BottomUp::No(no(WitnessKind::DegeneratePolygon), state)),
                }
            }
        };
        let unchanged = same_ring(&after, &poly);
        let after = if unchanged { poly.clone() } else { Arc::new(after) };
        state.log.push(StepRecord {
            step,
            face,
            chord: dt.tree_edge[face].expect("non-root"),
            u,
            v,
            class,
            before: poly,
            after: after.clone(),
            piece: entry.pieces[piece].clone(),
            vis: entry.pieces,
            minimal_bend,
            minimal_candidates,
            cut_path: cut.clone(),
        });
        state.current = after;
        state.retire(face, u, v, (!unchanged).then_some(&cut[..]));
    }
    Ok(BottomUp::Yes(state))
}

/// A drawn chord: the path runs from `edge[0]` to `edge[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordPath {
    pub edge: [usize; 2],
    pub path: Vec<Point>,
}

impl ChordPath {
    pub fn bends(&self) -> usize {
        self.path.len().saturating_sub(2)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Drawing {
    pub chords: Vec<ChordPath>,
}

fn bend_is_valid(free: &SimplePolygon, u: &Point, b: &Point, v: &Point) -> bool {
    orient_sign(u, b, v) != 0
        && free.locate(b) == Location::Inside
        && free.segment_strictly_inside(u, b)
        && free.segment_strictly_inside(b, v)
}

/// A direction pointing into `poly` from its boundary point `b`, if any.
fn inward_direction(poly: &SimplePolygon, b: &Point) -> Option<Point> {
    match poly.boundary_pos(b)? {
        BoundaryPos::Edge(i) => Some((poly.corner(i + 1) - poly.corner(i)).perp()),
        BoundaryPos::Corner(i) => {
            let d1 = poly.corner(i + 1) - b;
            let d2 = poly.corner(i + poly.len() - 1) - b;
            let sum = &d1 + &d2;
            match orient_sign(poly.corner(i + poly.len() - 1), b, poly.corner(i + 1)) {
                1 => Some(sum),
                -1 => Some(sum.scale(&Rational::from_integer(-1))),
                _ => Some(d1.perp()),
            }
        }
    }
}

/// Points `b + t (c - b)` for `t = 1/2, 1/4, ...` over 64 halvings.
fn shrink_towards<'a>(b: &'a Point, c: &Point) -> impl Iterator<Item = Point> + 'a {
    let d = c - b;
    (1..=64u32).map(move |k| b + &d.scale(&Rational::one().halved(k)))
}

/// The coarsest dyadic rounding of `c`, at precision `2^-min_k` or finer,
/// that `accept` admits; `c` itself when none does.
fn simplify_point(c: &Point, min_k: u32, accept: impl Fn(&Point) -> bool) -> Point {
    for k in min_k..min_k + 72 {
        let q = Point::new(c.x.round_dyadic(k), c.y.round_dyadic(k));
        if accept(&q) {
            return q;
        }
    }
    c.clone()
}

/// Smallest `k >= 0` with `2^-k` at most a quarter of the larger coordinate
/// difference between `a` and `b`.
fn precision_for(a: &Point, b: &Point) -> u32 {
    let d = a - b;
    let tol = d.x.abs().max(d.y.abs()).to_f64() / 4.0;
    if !(tol > 0.0) || tol.is_infinite() {
        return 0;
    }
    (-tol.log2()).ceil().max(0.0) as u32
}

/// Chooses the path of one chord inside the free region `free`.
fn place_chord(free: &SimplePolygon, rec: &StepRecord, u: &Point, v: &Point) -> Result<Vec<Point>, SolveError> {
    if free.segment_strictly_inside(u, v) && rec.class == EdgeClass::Convex {
        return Ok(vec![u.clone(), v.clone()]);
    }
    let vu = visibility_polygon(free, u)?;
    let vv = visibility_polygon(free, v)?;
    let mut avail: Vec<SimplePolygon> = Vec::new();
    for piece in common_visibility_of(free, &vu, &vv) {
        avail.extend(polygon_intersection(&piece, &rec.piece));
    }
    avail.sort_by_cached_key(|a| std::cmp::Reverse(a.area()));
    let fail = || SolveError::PlacementFailed(format!("no valid bend for chord {:?} at step {}", [rec.u, rec.v], rec.step));
    match rec.class {
        EdgeClass::Reflex => {
            let b = rec.minimal_bend.as_ref().expect("reflex step has a minimal bend");
            for a in &avail {
                let mut refs = Vec::new();
                if let Some(d) = inward_direction(a, b) {
                    refs.push(b + &d);
                }
                refs.push(a.interior_point());
                for c in &refs {
                    if let Some(q) = shrink_towards(b, c).find(|q| bend_is_valid(free, u, q, v)) {
                        let side = orient_sign(u, v, &q);
                        let q = simplify_point(&q, precision_for(&q, b), |r| {
                            orient_sign(u, v, r) == side && bend_is_valid(free, u, r, v)
                        });
                        return Ok(vec![u.clone(), q, v.clone()]);
                    }
                }
            }
            Err(fail())
        }
        EdgeClass::Convex => {
            let mut convex: Vec<SimplePolygon> =
                avail.iter().flat_map(|a| clip_halfplane(a, u, v, Side::Right)).collect();
            convex.sort_by_cached_key(|a| std::cmp::Reverse(a.area()));
            for a in convex.iter().chain(avail.iter()) {
                let c = a.interior_point();
                if bend_is_valid(free, u, &c, v) {
                    let q = simplify_point(&c, 0, |r| a.locate(r) == Location::Inside && bend_is_valid(free, u, r, v));
                    return Ok(vec![u.clone(), q, v.clone()]);
                }
            }
            Err(fail())
        }
    }
}

/// Places every chord, parents before children and, among siblings, in
/// reverse processing order. Each face's children live inside the region
/// its own drawn chord cuts off from the polygon it was processed in.
pub fn top_down(inst: &Instance, dt: &DualTree, state: &RefinementState) -> Result<Drawing, SolveError> {
    let mut free: HashMap<usize, SimplePolygon> = HashMap::new();
    free.insert(dt.root, (*state.current).clone());
    let mut paths: Vec<Option<Vec<Point>>> = vec![None; inst.m()];
    for rec in state.log.iter().rev() {
        let parent = dt.parent[rec.face].expect("non-root");
        let region = free.get(&parent).expect("parent placed first").clone();
        let (u, v) = (inst.vertex_point(rec.u), inst.vertex_point(rec.v));
        let path = place_chord(&region, rec, u, v)?;
        let split = region
            .split_by_path(&path)
            .map_err(|e| SolveError::PlacementFailed(format!("step {}: {e}", rec.step)))?;
        free.insert(parent, split.left);
        let own = rec
            .before
            .split_by_path(&path)
            .map_err(|e| SolveError::PlacementFailed(format!("step {}: {e}", rec.step)))?;
        free.insert(rec.face, own.right);
        paths[rec.chord] = Some(path);
    }
    let chords = inst
        .chords()
        .iter()
        .zip(paths)
        .map(|(c, p)| {
            let mut path = p.expect("every chord placed");
            if inst.vertex_point(c[0]) != &path[0] {
                path.reverse();
            }
            ChordPath { edge: *c, path }
        })
        .collect();
    Ok(Drawing { chords })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Yes(Drawing),
    No(Witness),
}

/// Full result of [`solve`], including the refinement log.
#[derive(Debug, Clone)]
pub struct Solution {
    pub verdict: Verdict,
    pub dual_tree: DualTree,
    pub state: RefinementState,
}

impl Solution {
    pub fn is_yes(&self) -> bool {
        matches!(self.verdict, Verdict::Yes(_))
    }

    pub fn trace(&self) -> Vec<TraceRecord> {
        self.state
            .log
            .iter()
            .map(|r| TraceRecord {
                step: r.step,
                face: r.face,
                class: r.class,
                polygon_corners: r.after.corners().to_vec(),
                bend: r.minimal_bend.clone(),
            })
            .collect()
    }
}

/// Trace entry written by the CLI's `--trace` option.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub face: usize,
    pub class: EdgeClass,
    pub polygon_corners: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bend: Option<Point>,
}

/// Decides the instance and draws it when possible.
pub fn solve(inst: &Instance) -> Result<Solution, SolveError> {
    solve_rooted(inst, None)
}

/// Like [`solve`] with an explicit root face.
pub fn solve_rooted(inst: &Instance, root: Option<usize>) -> Result<Solution, SolveError> {
    let dt = build_dual_tree(inst, root)?;
    match bottom_up(inst, &dt)? {
        BottomUp::No(w, state) => Ok(Solution {
            verdict: Verdict::No(w),
            dual_tree: dt,
            state,
        }),
        BottomUp::Yes(state) => {
            let d = top_down(inst, &dt, &state)?;
            Ok(Solution {
                verdict: Verdict::Yes(d),
                dual_tree: dt,
                state,
            })
        }
    }
}

/// Vertices that must stay on the boundary after processing `face`.
pub fn remaining_vertices(dt: &DualTree, processed: &[bool]) -> BTreeSet<usize> {
    (0..dt.face_count())
        .filter(|&f| !processed[f])
        .flat_map(|f| dt.faces[f].iter().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli_io::generate::{generate, Family, GenSpec};
    use crate::verifier::validate_drawing;

    fn inst(pts: &[(i64, i64)], chords: &[[usize; 2]]) -> Instance {
        let boundary = pts.iter().map(|&(x, y)| Point::int(x, y)).collect();
        Instance::new(boundary, (0..pts.len()).collect(), chords.to_vec()).unwrap()
    }

    fn drawing(sol: &Solution) -> &Drawing {
        match &sol.verdict {
            Verdict::Yes(d) => d,
            Verdict::No(w) => panic!("expected a drawing, got {w:?}"),
        }
    }

    #[test]
    fn square_diagonal_is_straight() {
        let i = inst(&[(0, 0), (4, 0), (4, 4), (0, 4)], &[[0, 2]]);
        let sol = solve(&i).unwrap();
        let d = drawing(&sol);
        assert_eq!(d.chords.len(), 1);
        assert_eq!(d.chords[0].bends(), 0);
        assert_eq!(sol.state.log.len(), 1);
        assert_eq!(sol.state.log[0].class, EdgeClass::Convex);
        assert!(validate_drawing(&i, d).ok);
    }

    #[test]
    fn convex_polygons_draw_every_chord_straight() {
        for seed in 0..5 {
            let i = generate(&GenSpec::new(Family::Convex, 12, 9, seed)).unwrap();
            let sol = solve(&i).unwrap();
            let d = drawing(&sol);
            assert!(d.chords.iter().all(|c| c.bends() == 0), "seed {seed}");
            assert!(validate_drawing(&i, d).ok);
        }
    }

    #[test]
    fn s_shape_has_empty_visibility() {
        let pts = [
            (0, 0),
            (5, 0),
            (5, 3),
            (1, 3),
            (1, 4),
            (5, 4),
            (5, 5),
            (0, 5),
            (0, 2),
            (4, 2),
            (4, 1),
            (0, 1),
        ];
        let sol = solve(&inst(&pts, &[[0, 6]])).unwrap();
        match sol.verdict {
            Verdict::No(w) => {
                assert_eq!(w.kind, WitnessKind::EmptyVisibility);
                assert_eq!(w.step, 0);
                let mut e = w.edge;
                e.sort();
                assert_eq!(e, [0, 6]);
            }
            Verdict::Yes(_) => panic!("S-shape must be rejected"),
        }
    }

    #[test]
    fn notch_forces_a_reflex_bend() {
        let pts = [(0, 0), (10, 0), (10, 5), (7, 5), (6, 3), (4, 3), (3, 5), (0, 5)];
        let i = inst(&pts, &[[3, 5]]);
        let sol = solve(&i).unwrap();
        let rec = &sol.state.log[0];
        assert_eq!(rec.class, EdgeClass::Reflex);
        assert_eq!(rec.minimal_candidates, 1);
        assert!(rec.minimal_bend.is_some());
        let d = drawing(&sol);
        assert_eq!(d.chords[0].bends(), 1);
        let b = &d.chords[0].path[1];
        // the bend sits below the notch floor, strictly inside
        assert!(b.y < Rational::from_integer(3));
        assert_eq!(i.boundary().locate(b), Location::Inside);
        assert!(validate_drawing(&i, d).ok);
    }

    #[test]
    fn fan_in_star_polygon() {
        let base = generate(&GenSpec::new(Family::Star, 10, 0, 4)).unwrap();
        let chords: Vec<[usize; 2]> = (2..9).map(|k| [0, k]).collect();
        let i = Instance::new(base.boundary().corners().to_vec(), (0..10).collect(), chords).unwrap();
        let sol = solve(&i).unwrap();
        let d = drawing(&sol);
        assert_eq!(d.chords.len(), 7);
        assert!(d.chords.iter().all(|c| c.bends() <= 1));
        let report = validate_drawing(&i, d);
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn generated_star_is_yes() {
        let i = generate(&GenSpec::new(Family::Star, 12, 9, 7)).unwrap();
        let sol = solve(&i).unwrap();
        let d = drawing(&sol);
        assert_eq!(sol.state.log.len(), 9);
        assert!(validate_drawing(&i, d).ok);
        let trace = sol.trace();
        assert_eq!(trace.len(), 9);
        assert_eq!(trace.last().unwrap().polygon_corners, sol.state.current.corners().to_vec());
    }

    #[test]
    fn refinement_shrinks_and_keeps_remaining_vertices() {
        let i = generate(&GenSpec::new(Family::RandomSimple, 14, 10, 2)).unwrap();
        let sol = solve(&i).unwrap();
        let mut processed = vec![false; sol.dual_tree.face_count()];
        for rec in &sol.state.log {
            assert!(rec.after.area() <= rec.before.area());
            processed[rec.face] = true;
            for v in remaining_vertices(&sol.dual_tree, &processed) {
                assert_ne!(rec.after.locate(i.vertex_point(v)), Location::Inside);
                assert_ne!(rec.after.locate(i.vertex_point(v)), Location::Outside);
            }
        }
    }

    #[test]
    fn explicit_root_gives_same_verdict() {
        let i = generate(&GenSpec::new(Family::Star, 10, 6, 3)).unwrap();
        let a = solve(&i).unwrap();
        let dt = build_dual_tree(&i, None).unwrap();
        let leaf = (0..dt.face_count()).find(|&f| dt.children[f].is_empty() && dt.parent[f].is_some()).unwrap();
        let b = solve_rooted(&i, Some(leaf)).unwrap();
        assert_eq!(a.is_yes(), b.is_yes());
        if let Verdict::Yes(d) = &b.verdict {
            assert!(validate_drawing(&i, d).ok);
        }
    }
}
