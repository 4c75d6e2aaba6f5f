use serde::Serialize;

use crate::error::{Error, Result};

/// The monoid `(N_0 x {0}) ∪ (Z x N)` inside `Z^2`. Its only atom is `(1, 0)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LexCone;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn checked_sub(&self, other: &Point) -> Option<Point> {
        Some(Point::new(self.x.checked_sub(other.x)?, self.y.checked_sub(other.y)?))
    }

    pub fn checked_add(&self, other: &Point) -> Option<Point> {
        Some(Point::new(self.x.checked_add(other.x)?, self.y.checked_add(other.y)?))
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn lexcone_member(x: i64, y: i64) -> bool {
    (y == 0 && x >= 0) || y >= 1
}

impl LexCone {
    pub const ATOM: Point = Point { x: 1, y: 0 };

    pub fn contains(&self, p: Point) -> bool {
        lexcone_member(p.x, p.y)
    }

    /// Whether `a` divides `b`; both must lie in the cone.
    pub fn divides(&self, a: Point, b: Point) -> Result<bool> {
        for q in [a, b] {
            if !self.contains(q) {
                return Err(Error::NotAMember {
                    element: q.to_string(),
                    monoid: "family:lexcone".into(),
                });
            }
        }
        let diff = b
            .checked_sub(&a)
            .ok_or_else(|| Error::arg("coordinates overflow"))?;
        Ok(self.contains(diff))
    }

    /// `Some(k)` when `p = k (1, 0)`, i.e. `p` is a sum of atoms.
    pub fn atom_multiple(&self, p: Point) -> Option<u64> {
        (p.y == 0 && p.x >= 0).then_some(p.x as u64)
    }

    /// A decomposition `p = q + r` into nonzero members, if one exists.
    /// Only `(1, 0)` has none.
    pub fn split(&self, p: Point) -> Option<(Point, Point)> {
        if !self.contains(p) || p.is_zero() || p == Self::ATOM {
            return None;
        }
        if p.y == 0 {
            return Some((Self::ATOM, Point::new(p.x - 1, 0)));
        }
        // (x, y) = (x - 1, y) + (1, 0) with y >= 1
        Some((Point::new(p.x - 1, p.y), Self::ATOM))
    }
}
