//! Points, lattice voxels, segments and the distance/rounding rules every
//! voxelizer in this crate shares.
//!
//! Coordinates are in voxel-grid units: voxel `(i, j, k)` is the unit cube
//! centred on the point `(i, j, k)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Point3 {
    type Output = Point3;

    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;

    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;

    fn mul(self, rhs: f64) -> Point3 {
        Point3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Point3::new(x, y, z)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Integer lattice index of a unit voxel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Voxel {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Voxel {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Voxel { x, y, z }
    }

    /// Centre of the voxel in continuous coordinates.
    pub fn center(self) -> Point3 {
        Point3::new(self.x as f64, self.y as f64, self.z as f64)
    }

    /// 26-adjacency: distinct, and no coordinate differs by more than one.
    pub fn is_adjacent(self, other: Voxel) -> bool {
        self != other && self.chebyshev(other) <= 1
    }

    pub fn chebyshev(self, other: Voxel) -> u64 {
        let dx = (self.x as i64 - other.x as i64).unsigned_abs();
        let dy = (self.y as i64 - other.y as i64).unsigned_abs();
        let dz = (self.z as i64 - other.z as i64).unsigned_abs();
        dx.max(dy).max(dz)
    }

    pub fn checked_add(self, other: Voxel) -> Option<Voxel> {
        Some(Voxel::new(
            self.x.checked_add(other.x)?,
            self.y.checked_add(other.y)?,
            self.z.checked_add(other.z)?,
        ))
    }
}

impl fmt::Display for Voxel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Directed segment from `start` (S) to `end` (E). Zero-length segments are
/// allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    start: Point3,
    end: Point3,
}

impl Segment {
    pub fn new(start: Point3, end: Point3) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::NonFinite("segment start"));
        }
        if !end.is_finite() {
            return Err(Error::NonFinite("segment end"));
        }
        Ok(Segment { start, end })
    }

    /// Convenience constructor from coordinate arrays.
    pub fn from_coords(start: [f64; 3], end: [f64; 3]) -> Result<Self> {
        Segment::new(start.into(), end.into())
    }

    pub fn start(&self) -> Point3 {
        self.start
    }

    pub fn end(&self) -> Point3 {
        self.end
    }

    /// `E - S`.
    pub fn direction(&self) -> Point3 {
        self.end - self.start
    }

    pub fn reversed(&self) -> Segment {
        Segment {
            start: self.end,
            end: self.start,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.start, self.end)
    }
}

pub fn segment_length(seg: &Segment) -> f64 {
    seg.direction().norm()
}

fn round_component(v: f64) -> Result<i32> {
    // f64::round rounds half-way cases away from zero.
    let r = v.round();
    if r >= i32::MIN as f64 && r <= i32::MAX as f64 {
        Ok(r as i32)
    } else {
        Err(Error::OutOfRange(v))
    }
}

/// Maps a point to the voxel containing it: nearest integer per axis, ties
/// away from zero.
pub fn round_point(p: Point3) -> Result<Voxel> {
    Ok(Voxel::new(
        round_component(p.x)?,
        round_component(p.y)?,
        round_component(p.z)?,
    ))
}

/// The infinite line through a segment's endpoints, prepared for repeated
/// distance queries.
#[derive(Debug, Clone, Copy)]
pub struct Line {
    origin: Point3,
    direction: Point3,
    norm: f64,
}

impl Line {
    pub fn through(seg: &Segment) -> Result<Self> {
        let direction = seg.direction();
        let norm = direction.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateSegment);
        }
        Ok(Line {
            origin: seg.start(),
            direction,
            norm,
        })
    }

    pub fn direction(&self) -> Point3 {
        self.direction
    }

    /// Perpendicular distance from `p` to the line.
    pub fn distance(&self, p: Point3) -> f64 {
        (p - self.origin).cross(self.direction).norm() / self.norm
    }
}

/// Perpendicular distance from `p` to the infinite line through `seg`.
pub fn point_line_distance(p: Point3, seg: &Segment) -> Result<f64> {
    Ok(Line::through(seg)?.distance(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(s: [f64; 3], e: [f64; 3]) -> Segment {
        Segment::from_coords(s, e).unwrap()
    }

    #[test]
    fn length_examples() {
        assert_eq!(segment_length(&seg([0.0; 3], [5.0, 0.0, 0.0])), 5.0);
        assert_eq!(segment_length(&seg([0.0; 3], [0.0; 3])), 0.0);
        let l = segment_length(&seg([0.0; 3], [3.0, 3.0, 3.0]));
        assert!((l - 27f64.sqrt()).abs() < 1e-12);
        assert!((l - 5.196152422706632).abs() < 1e-12);
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(
            round_point(Point3::new(0.4, -0.4, 0.0)).unwrap(),
            Voxel::new(0, 0, 0)
        );
        assert_eq!(
            round_point(Point3::new(0.5, -0.5, 1.5)).unwrap(),
            Voxel::new(1, -1, 2)
        );
        assert_eq!(
            round_point(Point3::new(2.999999, 3.000001, -2.5)).unwrap(),
            Voxel::new(3, 3, -3)
        );
    }

    #[test]
    fn rounding_out_of_range() {
        assert!(matches!(
            round_point(Point3::new(3e9, 0.0, 0.0)),
            Err(Error::OutOfRange(_))
        ));
        assert!(round_point(Point3::new(0.0, f64::NAN, 0.0)).is_err());
        assert!(round_point(Point3::new(i32::MAX as f64, i32::MIN as f64, 0.0)).is_ok());
    }

    #[test]
    fn distance_examples() {
        let s = seg([0.0; 3], [2.0, 1.0, 0.0]);
        let d = point_line_distance(Point3::new(1.0, 0.0, 0.0), &s).unwrap();
        assert!((d - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            point_line_distance(Point3::new(0.5, 0.25, 0.0), &s).unwrap(),
            0.0
        );
        let axis = seg([0.0; 3], [1.0, 0.0, 0.0]);
        assert_eq!(
            point_line_distance(Point3::new(0.0, 0.0, 1.0), &axis).unwrap(),
            1.0
        );
    }

    #[test]
    fn distance_to_degenerate_segment_fails() {
        let s = seg([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]);
        assert!(matches!(
            point_line_distance(Point3::ZERO, &s),
            Err(Error::DegenerateSegment)
        ));
    }

    #[test]
    fn non_finite_segments_rejected() {
        assert!(Segment::from_coords([f64::NAN, 0.0, 0.0], [0.0; 3]).is_err());
        assert!(Segment::from_coords([0.0; 3], [0.0, f64::INFINITY, 0.0]).is_err());
    }

    fn coord() -> impl Strategy<Value = f64> {
        -1e4f64..1e4
    }

    fn point() -> impl Strategy<Value = Point3> {
        (coord(), coord(), coord()).prop_map(|(x, y, z)| Point3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn length_is_symmetric(a in point(), b in point()) {
            let ab = segment_length(&Segment::new(a, b).unwrap());
            let ba = segment_length(&Segment::new(b, a).unwrap());
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn rounding_is_idempotent_on_lattice(x in -100_000i32..100_000, y in -100_000i32..100_000, z in -100_000i32..100_000) {
            let v = Voxel::new(x, y, z);
            prop_assert_eq!(round_point(v.center()).unwrap(), v);
        }

        #[test]
        fn distance_translation_invariant(p in point(), a in point(), b in point(), t in point()) {
            prop_assume!((b - a).norm() > 1e-3);
            let d0 = point_line_distance(p, &Segment::new(a, b).unwrap()).unwrap();
            let d1 = point_line_distance(p + t, &Segment::new(a + t, b + t).unwrap()).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-9 * d0.max(1.0), "{d0} vs {d1}");
        }

        #[test]
        fn points_on_line_have_zero_distance(a in point(), b in point(), t in -2.0f64..3.0) {
            prop_assume!((b - a).norm() > 1.0);
            let p = a + (b - a) * t;
            let d = point_line_distance(p, &Segment::new(a, b).unwrap()).unwrap();
            prop_assert!(d <= 1e-9, "{d}");
        }
    }
}
