//! Problem instances: a polygon with marked vertex corners and interior
//! chords, plus the dual tree of the resulting outerplanar graph.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::geometry_core::{Point, SimplePolygon};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("boundary is not a simple counterclockwise polygon: {0}")]
    NotSimplePolygon(String),
    #[error("invalid vertex corners: {0}")]
    InvalidVertexCorners(String),
    #[error("outer edge {0} has more than one bend")]
    TooManyOuterBends(usize),
    #[error("chords {0} and {1} cross")]
    CrossingChords(usize, usize),
    #[error("chord {0} duplicates an earlier chord")]
    DuplicateChord(usize),
    #[error("chord {0} connects consecutive vertices")]
    ChordIsOuterEdge(usize),
    #[error("chord {0} has invalid endpoints")]
    InvalidChord(usize),
    #[error("face {0} cannot be the root: its tree degree is not one")]
    RootNotDegreeOne(usize),
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        InstanceError::Json {
            line: e.line(),
            column: e.column(),
            message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    }
}

/// Wire form of an instance, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub boundary: Vec<Point>,
    pub vertex_corners: Vec<usize>,
    pub chords: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A validated instance. Chords are stored exactly as given; vertex `i` of
/// the graph sits at boundary corner `vertex_corners[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    boundary: SimplePolygon,
    vertex_corners: Vec<usize>,
    chords: Vec<[usize; 2]>,
    metadata: Option<serde_json::Value>,
    corner_is_vertex: Vec<bool>,
}

impl Instance {
    pub fn new(
        boundary: Vec<Point>,
        vertex_corners: Vec<usize>,
        chords: Vec<[usize; 2]>,
    ) -> Result<Instance, InstanceError> {
        validate_instance(RawInstance {
            boundary,
            vertex_corners,
            chords,
            metadata: None,
        })
    }

    pub fn from_json(s: &str) -> Result<Instance, InstanceError> {
        let raw: RawInstance = serde_json::from_str(s)?;
        validate_instance(raw)
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            boundary: self.boundary.corners().to_vec(),
            vertex_corners: self.vertex_corners.clone(),
            chords: self.chords.clone(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("instance serializes")
    }

    pub fn with_metadata(mut self, metadata: serde_json::Value) -> Instance {
        self.metadata = Some(metadata);
        self
    }

    pub fn boundary(&self) -> &SimplePolygon {
        &self.boundary
    }

    pub fn vertex_corners(&self) -> &[usize] {
        &self.vertex_corners
    }

    pub fn chords(&self) -> &[[usize; 2]] {
        &self.chords
    }

    pub fn metadata(&self) -> Option<&serde_json::Value> {
        self.metadata.as_ref()
    }

    /// Number of graph vertices.
    pub fn n(&self) -> usize {
        self.vertex_corners.len()
    }

    /// Number of chords.
    pub fn m(&self) -> usize {
        self.chords.len()
    }

    pub fn vertex_point(&self, v: usize) -> &Point {
        self.boundary.corner(self.vertex_corners[v])
    }

    /// Whether boundary corner `c` is a graph vertex.
    pub fn is_vertex_corner(&self, c: usize) -> bool {
        self.corner_is_vertex[c]
    }
}

/// Whether two chords of the vertex cycle interleave, i.e. cross as chords.
pub fn chords_interleave(c1: [usize; 2], c2: [usize; 2]) -> bool {
    let (a, b) = (c1[0].min(c1[1]), c1[0].max(c1[1]));
    let inside = |x: usize| a < x && x < b;
    let (c, d) = (c2[0], c2[1]);
    if [a, b].contains(&c) || [a, b].contains(&d) {
        return false;
    }
    inside(c) != inside(d)
}

/// Checks the boundary, the bend budget of outer edges and the chord set.
pub fn validate_instance(raw: RawInstance) -> Result<Instance, InstanceError> {
    let boundary =
        SimplePolygon::new(raw.boundary).map_err(|e| InstanceError::NotSimplePolygon(e.to_string()))?;
    let corners = boundary.len();
    let vc = &raw.vertex_corners;
    let n = vc.len();
    if n < 3 {
        return Err(InstanceError::InvalidVertexCorners(format!("need at least 3 vertices, got {n}")));
    }
    if let Some(&bad) = vc.iter().find(|&&c| c >= corners) {
        return Err(InstanceError::InvalidVertexCorners(format!("corner index {bad} out of range")));
    }
    let descents = (0..n).filter(|&i| vc[i] >= vc[(i + 1) % n]).count();
    if descents != 1 {
        return Err(InstanceError::InvalidVertexCorners(
            "indices must be distinct and in counterclockwise order".into(),
        ));
    }
    for i in 0..n {
        let gap = (vc[(i + 1) % n] + corners - vc[i]) % corners;
        if gap > 2 {
            return Err(InstanceError::TooManyOuterBends(i));
        }
    }

    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, c) in raw.chords.iter().enumerate() {
        let [a, b] = *c;
        if a >= n || b >= n || a == b {
            return Err(InstanceError::InvalidChord(k));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if hi - lo == 1 || (lo == 0 && hi == n - 1) {
            return Err(InstanceError::ChordIsOuterEdge(k));
        }
        if seen.insert((lo, hi), k).is_some() {
            return Err(InstanceError::DuplicateChord(k));
        }
    }
    if let Some((i, j)) = find_crossing(&raw.chords) {
        return Err(InstanceError::CrossingChords(i, j));
    }
    let mut corner_is_vertex = vec![false; corners];
    for &c in vc {
        corner_is_vertex[c] = true;
    }
    Ok(Instance {
        boundary,
        corner_is_vertex,
        vertex_corners: raw.vertex_corners,
        chords: raw.chords,
        metadata: raw.metadata,
    })
}

/// Stack scan over chords sorted by left endpoint: intervals must nest.
fn find_crossing(chords: &[[usize; 2]]) -> Option<(usize, usize)> {
    let mut iv: Vec<(usize, usize, usize)> = chords
        .iter()
        .enumerate()
        .map(|(k, c)| (c[0].min(c[1]), c[0].max(c[1]), k))
        .collect();
    iv.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for &(a, b, k) in &iv {
        while stack.last().is_some_and(|t| t.1 <= a) {
            stack.pop();
        }
        if let Some(t) = stack.last() {
            if t.1 < b {
                return Some((t.2.min(k), t.2.max(k)));
            }
        }
        stack.push((a, b, k));
    }
    None
}

/// Dual tree of the bounded faces. Face ids index `faces`, which are
/// sorted lexicographically; each face lists its vertices counterclockwise
/// starting from the smallest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualTree {
    pub faces: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    /// Chord index shared with the parent face.
    pub tree_edge: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    pub root: usize,
    n: usize,
}

impl DualTree {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Non-root faces ordered deepest first (ties by face id); every face
    /// comes after all of its children.
    pub fn bottom_up_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.faces.len()).filter(|&f| f != self.root).collect();
        order.sort_by(|&a, &b| self.depth[b].cmp(&self.depth[a]).then(a.cmp(&b)));
        order
    }

    /// The chord of non-root face `f` oriented as `(u, v)` so that the
    /// face lies on the counterclockwise vertex arc from `u` to `v`.
    pub fn oriented_chord(&self, inst: &Instance, f: usize) -> Option<(usize, usize)> {
        let [a, b] = inst.chords()[self.tree_edge[f]?];
        let w = *self.faces[f].iter().find(|&&w| w != a && w != b)?;
        let off = |x: usize, from: usize| (x + self.n - from) % self.n;
        if off(w, a) < off(b, a) {
            Some((a, b))
        } else {
            Some((b, a))
        }
    }

    /// Faces in the subtree rooted at `f`, including `f`.
    pub fn subtree(&self, f: usize) -> Vec<usize> {
        let mut out = vec![f];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.children[out[i]].iter().copied());
            i += 1;
        }
        out
    }

    pub fn tree_degree(&self, f: usize) -> usize {
        self.children[f].len() + usize::from(self.parent[f].is_some())
    }
}

/// Builds the faces and the dual tree. Without `root_choice` the root is
/// the first face (in face order) of tree degree one.
pub fn build_dual_tree(inst: &Instance, root_choice: Option<usize>) -> Result<DualTree, InstanceError> {
    let n = inst.n();
    let mut adj: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
    for c in inst.chords() {
        adj[c[0]].push(c[1]);
        adj[c[1]].push(c[0]);
    }
    let off = |z: usize, y: usize| (z + n - y) % n;
    // interior darts: outer edges counterclockwise, chords both ways
    let mut darts: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for c in inst.chords() {
        darts.push((c[0], c[1]));
        darts.push((c[1], c[0]));
    }
    let mut dart_face: HashMap<(usize, usize), usize> = HashMap::new();
    let mut raw_faces: Vec<Vec<usize>> = Vec::new();
    for &d in &darts {
        if dart_face.contains_key(&d) {
            continue;
        }
        let id = raw_faces.len();
        let mut face = Vec::new();
        let (mut x, mut y) = d;
        loop {
            dart_face.insert((x, y), id);
            face.push(x);
            let ox = off(x, y);
            let z = *adj[y]
                .iter()
                .filter(|&&z| off(z, y) < ox)
                .max_by_key(|&&z| off(z, y))
                .expect("interior face continues");
            x = y;
            y = z;
            if (x, y) == d {
                break;
            }
        }
        raw_faces.push(face);
    }
    // canonical labelling
    for f in raw_faces.iter_mut() {
        let k = f.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap();
        f.rotate_left(k);
    }
    let mut order: Vec<usize> = (0..raw_faces.len()).collect();
    order.sort_by(|&a, &b| raw_faces[a].cmp(&raw_faces[b]));
    let mut relabel = vec![0; raw_faces.len()];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let faces: Vec<Vec<usize>> = order.iter().map(|&o| raw_faces[o].clone()).collect();
    let count = faces.len();

    let mut nbrs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    for (k, c) in inst.chords().iter().enumerate() {
        let f1 = relabel[dart_face[&(c[0], c[1])]];
        let f2 = relabel[dart_face[&(c[1], c[0])]];
        nbrs[f1].push((f2, k));
        nbrs[f2].push((f1, k));
    }
    for l in nbrs.iter_mut() {
        l.sort();
    }
    let root = match root_choice {
        Some(r) => {
            if r >= count || (count > 1 && nbrs[r].len() != 1) {
                return Err(InstanceError::RootNotDegreeOne(r));
            }
            r
        }
        None => (0..count).find(|&f| nbrs[f].len() <= 1).expect("a tree has a leaf"),
    };
    let mut parent = vec![None; count];
    let mut tree_edge = vec![None; count];
    let mut depth = vec![0; count];
    let mut children = vec![Vec::new(); count];
    let mut visited = vec![false; count];
    visited[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        for &(g, k) in &nbrs[f] {
            if !visited[g] {
                visited[g] = true;
                parent[g] = Some(f);
                tree_edge[g] = Some(k);
                depth[g] = depth[f] + 1;
                children[f].push(g);
                queue.push_back(g);
            }
        }
    }
    Ok(DualTree {
        faces,
        parent,
        tree_edge,
        children,
        depth,
        root,
        n,
    })
}

/// Vertices of the faces outside the subtree of `f`; for the root, the
/// root's own vertices.
pub fn subtree_vertices(dt: &DualTree, f: usize) -> BTreeSet<usize> {
    if f == dt.root {
        return dt.faces[f].iter().copied().collect();
    }
    let sub: BTreeSet<usize> = dt.subtree(f).into_iter().collect();
    (0..dt.faces.len())
        .filter(|g| !sub.contains(g))
        .flat_map(|g| dt.faces[g].iter().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(corners: &[(i64, i64)], chords: Vec<[usize; 2]>) -> Result<Instance, InstanceError> {
        let b: Vec<Point> = corners.iter().map(|&(x, y)| Point::int(x, y)).collect();
        let vc = (0..b.len()).collect();
        Instance::new(b, vc, chords)
    }

    const HEX: [(i64, i64); 6] = [(2, 0), (4, 1), (4, 3), (2, 4), (0, 3), (0, 1)];

    #[test]
    fn validation_examples() {
        let sq = [(0, 0), (4, 0), (4, 4), (0, 4)];
        assert!(regular(&sq, vec![[0, 2]]).is_ok());
        assert_eq!(regular(&HEX, vec![[0, 2], [1, 3]]), Err(InstanceError::CrossingChords(0, 1)));
        assert_eq!(regular(&HEX, vec![[0, 2], [2, 0]]), Err(InstanceError::DuplicateChord(1)));
        assert_eq!(regular(&HEX, vec![[5, 0]]), Err(InstanceError::ChordIsOuterEdge(0)));
        let pent: Vec<Point> = [(0, 0), (1, -1), (3, -1), (4, 0), (2, 3)].iter().map(|&(x, y)| Point::int(x, y)).collect();
        assert_eq!(
            Instance::new(pent, vec![0, 3, 4], vec![]),
            Err(InstanceError::TooManyOuterBends(0))
        );
        let bow = [(0, 0), (4, 4), (4, 0), (0, 4)];
        assert!(matches!(regular(&bow, vec![]), Err(InstanceError::NotSimplePolygon(_))));
    }

    #[test]
    fn json_errors_carry_position() {
        let e = Instance::from_json("{\"boundary\": [\n  {\"x\": \"0\", }").unwrap_err();
        match e {
            InstanceError::Json { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"boundary":[{"x":"0","y":"0"},{"x":"4","y":"0"},{"x":"9/2","y":"2"},{"x":"4","y":"4"},{"x":"0","y":"4"}],"vertex_corners":[0,1,3,4],"chords":[[2,0]]}"#;
        let inst = Instance::from_json(s).unwrap();
        assert_eq!(inst.to_json(), s);
        let loose = r#"{"boundary":[{"x":0,"y":0},{"x":"8/2","y":0},{"x":"9/2","y":"2"},{"x":4,"y":4},{"x":0,"y":4}],"vertex_corners":[0,1,3,4],"chords":[[2,0]]}"#;
        assert_eq!(Instance::from_json(loose).unwrap(), inst);
    }

    #[test]
    fn square_dual_tree() {
        let inst = regular(&[(0, 0), (4, 0), (4, 4), (0, 4)], vec![[0, 2]]).unwrap();
        let dt = build_dual_tree(&inst, None).unwrap();
        assert_eq!(dt.faces, vec![vec![0, 1, 2], vec![0, 2, 3]]);
        assert_eq!(dt.root, 0);
        assert_eq!(dt.parent[1], Some(0));
        assert_eq!(subtree_vertices(&dt, 1), BTreeSet::from([0, 1, 2]));
        assert_eq!(subtree_vertices(&dt, 0), BTreeSet::from([0, 1, 2]));
        assert_eq!(dt.oriented_chord(&inst, 1), Some((2, 0)));
    }

    #[test]
    fn fan_faces_form_a_path() {
        let inst = regular(&HEX, vec![[0, 2], [0, 3], [0, 4]]).unwrap();
        let dt = build_dual_tree(&inst, None).unwrap();
        // hand-enumerated faces of the fan
        assert_eq!(dt.faces, vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 4], vec![0, 4, 5]]);
        assert_eq!(dt.faces.len(), inst.m() + 1);
        let dt = build_dual_tree(&inst, Some(3)).unwrap();
        assert_eq!(dt.depth, vec![3, 2, 1, 0]);
        assert_eq!(subtree_vertices(&dt, 0), BTreeSet::from([0, 2, 3, 4, 5]));
        assert_eq!(build_dual_tree(&inst, Some(1)), Err(InstanceError::RootNotDegreeOne(1)));
    }

    #[test]
    fn triangle_has_single_face() {
        let inst = regular(&[(0, 0), (4, 0), (0, 4)], vec![]).unwrap();
        let dt = build_dual_tree(&inst, None).unwrap();
        assert_eq!(dt.faces, vec![vec![0, 1, 2]]);
        assert!(dt.bottom_up_order().is_empty());
    }
}
