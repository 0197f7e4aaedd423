//! Exact planar geometry: rationals, predicates, simple polygons and the
//! boolean operations the solver needs.

mod boolean;
mod point;
mod polygon;
mod rational;

pub use boolean::{clip_halfplane, clip_convex_by_halfplane, polygon_intersection, Side};
pub use point::{
    angle_cmp, ccw_angle_cmp, intersection_points, line_intersection, on_segment,
    orient_sign, orient_value, orientation, ray_segment_hit, segment_intersect, sort_along, cross_sign, dot_sign,
    strictly_on_segment, Orientation, Point, Segment, SegmentIntersection,
};
pub use polygon::{
    check_ring_simple, normalize_ring, ring_area_sign, ring_locate, ring_twice_area, BBox, BoundaryInterval,
    BoundaryPos, Location, SimplePolygon, SplitPieces,
};
pub use rational::{diff_of_products_sign, Frac, ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("polygon is not simple: {0}")]
    NotSimple(String),
    #[error("polygon corners are not counterclockwise")]
    NotCounterclockwise,
    #[error("path leaves the polygon interior at {0}")]
    PathNotInside(String),
    #[error("path intersects itself")]
    PathSelfIntersects,
    #[error("point {0} is outside the polygon")]
    PointOutside(String),
    #[error("rotating ray never meets the target region")]
    NoHit,
}
