//! Seeded random instance families.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::geometry_core::{orient_sign, segment_intersect, Point, Rational, Segment, SegmentIntersection, SimplePolygon};
use crate::instance_model::{Instance, InstanceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Convex,
    Star,
    Spiral,
    Notched,
    RandomSimple,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Convex,
        Family::Star,
        Family::Spiral,
        Family::Notched,
        Family::RandomSimple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Convex => "CONVEX",
            Family::Star => "STAR",
            Family::Spiral => "SPIRAL",
            Family::Notched => "NOTCHED",
            Family::RandomSimple => "RANDOM_SIMPLE",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == up)
            .ok_or_else(|| format!("unknown family {s:?}; expected one of CONVEX, STAR, SPIRAL, NOTCHED, RANDOM_SIMPLE"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    /// Number of graph vertices.
    pub n: usize,
    /// Number of chords.
    pub m: usize,
    /// Probability that an outer edge gets a bend.
    pub outer_bend_prob: Rational,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, m: usize, seed: u64) -> GenSpec {
        GenSpec {
            family,
            n,
            m,
            outer_bend_prob: Rational::zero(),
            seed,
        }
    }

    pub fn with_outer_bends(mut self, p: Rational) -> GenSpec {
        self.outer_bend_prob = p;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("infeasible spec: {0}")]
    InfeasibleSpec(String),
    #[error("could not build a {0} polygon with {1} vertices")]
    ShapeFailed(Family, usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

const SCALE: f64 = 1_000_000.0;

fn round_pt(x: f64, y: f64) -> Point {
    Point::int(x.round() as i64, y.round() as i64)
}

fn strictly_convex(pts: &[Point]) -> bool {
    let n = pts.len();
    (0..n).all(|i| orient_sign(&pts[i], &pts[(i + 1) % n], &pts[(i + 2) % n]) > 0)
}

/// Sorted angles with a bounded largest gap.
fn angles(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let step = 2.0 * PI / n as f64;
    let offset = rng.gen_range(0.0..step);
    (0..n)
        .map(|i| offset + step * (i as f64 + rng.gen_range(-0.3..0.3)))
        .collect()
}

fn convex_shape(rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<Point>> {
    let radius = SCALE;
    let pts: Vec<Point> = angles(rng, n)
        .into_iter()
        .map(|t| round_pt(radius * t.cos(), radius * t.sin()))
        .collect();
    strictly_convex(&pts).then_some(pts)
}

fn star_shape(rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<Point>> {
    let pts: Vec<Point> = angles(rng, n)
        .into_iter()
        .map(|t| {
            let r = SCALE * rng.gen_range(0.25..1.0);
            round_pt(r * t.cos(), r * t.sin())
        })
        .collect();
    let o = Point::int(0, 0);
    let k = pts.len();
    (0..k)
        .all(|i| orient_sign(&pts[i], &pts[(i + 1) % k], &o) > 0)
        .then_some(pts)
}

fn spiral_shape(rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<Point>> {
    let outer = n.div_ceil(2);
    let inner = n - outer;
    let step = (PI / 4.0).min(3.0 * PI / (outer - 1) as f64);
    let turn = step * (outer - 1) as f64;
    let growth = rng.gen_range(0.8..1.2) * SCALE / (2.0 * PI);
    let r0 = growth * rng.gen_range(4.0..6.0);
    let width = 2.0 * PI * growth * rng.gen_range(0.45..0.6);
    let mut pts = Vec::with_capacity(n);
    for i in 0..outer {
        let t = step * i as f64;
        let r = r0 + growth * t;
        pts.push(round_pt(r * t.cos(), r * t.sin()));
    }
    for j in 0..inner {
        let t = turn * (1.0 - j as f64 / (inner - 1).max(1) as f64);
        let r = r0 + growth * t - width;
        pts.push(round_pt(r * t.cos(), r * t.sin()));
    }
    Some(pts)
}

fn notched_shape(rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<Point>> {
    let width = SCALE;
    let height = SCALE / 2.0;
    let top = n - 2;
    let mut pts = vec![Point::int(0, 0), round_pt(width, 0.0)];
    let mut xs: Vec<f64> = (0..top)
        .map(|j| width * (top - j) as f64 / (top + 1) as f64 + rng.gen_range(-0.3..0.3) * width / (top + 1) as f64)
        .collect();
    xs[0] = width;
    if top > 1 {
        xs[top - 1] = 0.0;
    }
    let mut depth = height * rng.gen_range(0.2..0.7);
    for (j, x) in xs.into_iter().enumerate() {
        let y = if (j / 2) % 2 == 0 {
            height
        } else {
            if j % 2 == 0 {
                depth = height * rng.gen_range(0.2..0.7);
            }
            depth
        };
        let p = round_pt(x, y);
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    (pts.len() == n).then_some(pts)
}

fn random_simple_shape(rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<Point>> {
    let lim = SCALE as i64;
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::int(rng.gen_range(-lim..=lim), rng.gen_range(-lim..=lim));
        let collinear = (0..pts.len()).any(|i| (i + 1..pts.len()).any(|j| orient_sign(&pts[i], &pts[j], &p) == 0));
        if !collinear {
            pts.push(p);
        }
    }
    pts.shuffle(rng);
    // Untangle crossing edge pairs by reversing the section between them;
    // each move strictly shortens the tour, so this terminates.
    for _ in 0..100_000 {
        let mut fixed = false;
        'outer: for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let s = Segment::new(pts[i].clone(), pts[(i + 1) % n].clone());
                let t = Segment::new(pts[j].clone(), pts[(j + 1) % n].clone());
                if segment_intersect(&s, &t) == SegmentIntersection::ProperCross {
                    pts[i + 1..=j].reverse();
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if !fixed {
            return Some(pts);
        }
    }
    None
}

fn ccw(mut pts: Vec<Point>) -> Vec<Point> {
    let twice: Rational = (0..pts.len())
        .map(|i| pts[i].cross(&pts[(i + 1) % pts.len()]))
        .fold(Rational::zero(), |a, b| &a + &b);
    if twice < Rational::zero() {
        pts.reverse();
    }
    pts
}

/// Whether the polygon with these corners is acceptable for the family.
fn shape_ok(family: Family, ring: &[Point]) -> bool {
    if SimplePolygon::new(ring.to_vec()).is_err() {
        return false;
    }
    match family {
        Family::Convex => {
            let k = ring.len();
            (0..k).all(|i| orient_sign(&ring[i], &ring[(i + 1) % k], &ring[(i + 2) % k]) >= 0)
        }
        Family::Star => {
            let o = Point::int(0, 0);
            let k = ring.len();
            (0..k).all(|i| orient_sign(&ring[i], &ring[(i + 1) % k], &o) > 0)
        }
        _ => true,
    }
}

/// Coin flip with a rational probability.
fn flip(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    if p.is_zero() {
        return false;
    }
    let den: u64 = 1 << 20;
    let k = rng.gen_range(0..den);
    Rational::new(k as i64, den as i64) < *p
}

/// Inserts outer-edge bends by pushing edge midpoints sideways.
fn add_outer_bends(rng: &mut ChaCha8Rng, family: Family, verts: &[Point], p: &Rational) -> (Vec<Point>, Vec<usize>) {
    let n = verts.len();
    let mut bend_after: Vec<Option<Point>> = vec![None; n];
    for i in 0..n {
        if !flip(rng, p) {
            continue;
        }
        let (a, b) = (&verts[i], &verts[(i + 1) % n]);
        let mid = a.midpoint(b);
        let perp = (b - a).perp();
        for _ in 0..100 {
            let k: i64 = rng.gen_range(-300..=300);
            if k == 0 {
                continue;
            }
            let c = &mid + &perp.scale(&Rational::new(k, 1024));
            bend_after[i] = Some(c);
            if shape_ok(family, &assemble(verts, &bend_after).0) {
                break;
            }
            bend_after[i] = None;
        }
    }
    assemble(verts, &bend_after)
}

fn assemble(verts: &[Point], bends: &[Option<Point>]) -> (Vec<Point>, Vec<usize>) {
    let mut ring = Vec::new();
    let mut vc = Vec::new();
    for (v, b) in verts.iter().zip(bends) {
        vc.push(ring.len());
        ring.push(v.clone());
        if let Some(b) = b {
            ring.push(b.clone());
        }
    }
    (ring, vc)
}

/// Diagonals of a uniformly seeded random triangulation of the `n`-gon.
fn random_triangulation(rng: &mut ChaCha8Rng, n: usize) -> Vec<[usize; 2]> {
    let mut out = Vec::with_capacity(n.saturating_sub(3));
    let mut stack = vec![(0usize, n - 1)];
    while let Some((i, j)) = stack.pop() {
        if j < i + 2 {
            continue;
        }
        let k = rng.gen_range(i + 1..j);
        if k > i + 1 {
            out.push([i, k]);
            stack.push((i, k));
        }
        if j > k + 1 {
            out.push([k, j]);
            stack.push((k, j));
        }
    }
    out
}

/// Builds a seeded instance of the requested family.
pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    let n = spec.n;
    if n < 3 {
        return Err(GenError::InfeasibleSpec(format!("n = {n} is below 3")));
    }
    if spec.m + 3 > n {
        return Err(GenError::InfeasibleSpec(format!("m = {} exceeds n - 3 = {}", spec.m, n - 3)));
    }
    if spec.outer_bend_prob < Rational::zero() || spec.outer_bend_prob > Rational::one() {
        return Err(GenError::InfeasibleSpec("outer bend probability outside [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut verts = None;
    for _ in 0..200 {
        let shape = match (spec.family, n) {
            (Family::Spiral | Family::Notched, 3) => star_shape(&mut rng, 3),
            (Family::Convex, _) => convex_shape(&mut rng, n),
            (Family::Star, _) => star_shape(&mut rng, n),
            (Family::Spiral, _) => spiral_shape(&mut rng, n),
            (Family::Notched, _) => notched_shape(&mut rng, n),
            (Family::RandomSimple, _) => random_simple_shape(&mut rng, n),
        };
        if let Some(s) = shape {
            let s = ccw(s);
            if shape_ok(spec.family, &s) {
                verts = Some(s);
                break;
            }
        }
    }
    let verts = verts.ok_or(GenError::ShapeFailed(spec.family, n))?;
    let (ring, vc) = add_outer_bends(&mut rng, spec.family, &verts, &spec.outer_bend_prob);
    let mut diagonals = random_triangulation(&mut rng, n);
    diagonals.shuffle(&mut rng);
    let mut chords: Vec<[usize; 2]> = diagonals.into_iter().take(spec.m).collect();
    chords.sort();
    let mut meta = json!({
        "family": spec.family.name(),
        "seed": spec.seed,
        "outer_bend_prob": spec.outer_bend_prob.to_string(),
    });
    if spec.family == Family::Star {
        meta["kernel"] = json!({"x": "0", "y": "0"});
    }
    Ok(Instance::new(ring, vc, chords)?.with_metadata(meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_validates() {
        for fam in Family::ALL {
            for n in [3usize, 4, 5, 8, 13, 30] {
                for seed in 0..5u64 {
                    let spec = GenSpec::new(fam, n, n - 3, seed).with_outer_bends(Rational::new(1, 3));
                    let inst = generate(&spec).unwrap_or_else(|e| panic!("{fam} n={n} seed={seed}: {e}"));
                    assert_eq!(inst.n(), n);
                    assert_eq!(inst.m(), n - 3);
                    assert!(inst.boundary().len() <= 2 * n);
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let spec = GenSpec::new(Family::RandomSimple, 20, 9, 42).with_outer_bends(Rational::new(1, 2));
        assert_eq!(generate(&spec).unwrap().to_json(), generate(&spec).unwrap().to_json());
        let other = GenSpec { seed: 43, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap().to_json(), generate(&other).unwrap().to_json());
    }

    #[test]
    fn infeasible_chord_count() {
        let spec = GenSpec::new(Family::Convex, 8, 6, 1);
        assert!(matches!(generate(&spec), Err(GenError::InfeasibleSpec(_))));
    }

    #[test]
    fn star_kernel_sees_all_corners() {
        let spec = GenSpec::new(Family::Star, 25, 10, 3).with_outer_bends(Rational::new(1, 2));
        let inst = generate(&spec).unwrap();
        let o = Point::int(0, 0);
        for c in inst.boundary().corners() {
            assert!(inst.boundary().segment_in_closure(&o, c));
        }
        assert_eq!(inst.metadata().unwrap()["kernel"]["x"], "0");
    }

    #[test]
    fn convex_stays_convex() {
        for seed in 0..10 {
            let spec = GenSpec::new(Family::Convex, 12, 9, seed).with_outer_bends(Rational::new(1, 2));
            let inst = generate(&spec).unwrap();
            assert!(inst.boundary().is_convex());
        }
    }

    #[test]
    fn denominators_bounded() {
        for fam in Family::ALL {
            let spec = GenSpec::new(fam, 16, 8, 9).with_outer_bends(Rational::one());
            let inst = generate(&spec).unwrap();
            let bound = num_bigint::BigInt::from(1u64 << 20);
            for c in inst.boundary().corners() {
                assert!(c.x.denom() <= bound && c.y.denom() <= bound);
            }
        }
    }
}
