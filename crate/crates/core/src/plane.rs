//! The Desarguesian plane PG(2,q) as an indexed incidence structure.
//!
//! Points are nonzero triples scaled so their first nonzero coordinate is 1,
//! numbered in lexicographic order of their labels. Lines use the same
//! normalisation on dual triples, so line `i` has the same coordinates as
//! point `i` and the incidence relation (`a·x = 0`) is symmetric in the two
//! indices.

use serde::Serialize;
use thiserror::Error;

use crate::galois::{FieldError, FieldTables};

/// Upper bound on `q² + q + 1` for the supported orders (q = 9).
pub const MAX_POINTS: usize = 91;
/// Upper bound on `q + 1`.
pub const MAX_LINE_SIZE: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("points {0} and {0} coincide; a line needs two distinct points")]
    SamePoint(usize),
    #[error("point index {index} out of range for a plane with {count} points")]
    PointOutOfRange { index: usize, count: usize },
    #[error("coordinates {0:?} do not name a point of PG(2,{1})")]
    BadCoordinates(Vec<u32>, usize),
    #[error("incidence check failed: {0}")]
    Incidence(String),
}

#[derive(Debug, Clone)]
pub struct ProjectivePlane {
    field: FieldTables,
    q: usize,
    points: Vec<[u8; 3]>,
    line_bits: Vec<u128>,
    line_points: Vec<Vec<u8>>,
    point_lines: Vec<Vec<u8>>,
    line_through: Vec<u8>,
    /// Normalised point index of every nonzero vector, keyed by `(x0*q + x1)*q + x2`.
    vec_index: Vec<u8>,
}

impl ProjectivePlane {
    pub fn build(field: FieldTables) -> Result<Self, PlaneError> {
        let q = field.order();
        let mut points = Vec::with_capacity(q * q + q + 1);
        for x0 in 0..q as u8 {
            for x1 in 0..q as u8 {
                for x2 in 0..q as u8 {
                    let v = [x0, x1, x2];
                    if let Some(&lead) = v.iter().find(|&&c| c != 0) {
                        if lead == 1 {
                            points.push(v);
                        }
                    }
                }
            }
        }
        let n = points.len();
        let mut vec_index = vec![u8::MAX; q * q * q];
        for (i, &p) in points.iter().enumerate() {
            for s in 1..q as u8 {
                let v = p.map(|c| field.mul(c, s));
                vec_index[(v[0] as usize * q + v[1] as usize) * q + v[2] as usize] = i as u8;
            }
        }

        let dot = |a: &[u8; 3], b: &[u8; 3]| {
            field.add(field.add(field.mul(a[0], b[0]), field.mul(a[1], b[1])), field.mul(a[2], b[2]))
        };
        let mut line_bits = vec![0u128; n];
        let mut line_points = vec![Vec::with_capacity(q + 1); n];
        let mut point_lines = vec![Vec::with_capacity(q + 1); n];
        for (l, lc) in points.iter().enumerate() {
            for (p, pc) in points.iter().enumerate() {
                if dot(lc, pc) == 0 {
                    line_bits[l] |= 1u128 << p;
                    line_points[l].push(p as u8);
                    point_lines[p].push(l as u8);
                }
            }
        }
        let mut line_through = vec![u8::MAX; n * n];
        for (l, pts) in line_points.iter().enumerate() {
            for &a in pts {
                for &b in pts {
                    if a != b {
                        line_through[a as usize * n + b as usize] = l as u8;
                    }
                }
            }
        }

        let plane = ProjectivePlane { field, q, points, line_bits, line_points, point_lines, line_through, vec_index };
        plane.check_axioms()?;
        Ok(plane)
    }

    pub fn build_default(q: u32) -> Result<Self, PlaneError> {
        Self::build(FieldTables::build_default(q)?)
    }

    fn check_axioms(&self) -> Result<(), PlaneError> {
        let n = self.num_points();
        let q = self.q;
        let fail = |m: String| Err(PlaneError::Incidence(m));
        if n != q * q + q + 1 {
            return fail(format!("{n} points, expected {}", q * q + q + 1));
        }
        for i in 0..n {
            if self.line_bits[i].count_ones() as usize != q + 1 {
                return fail(format!("line {i} has {} points", self.line_bits[i].count_ones()));
            }
            if self.point_lines[i].len() != q + 1 {
                return fail(format!("point {i} is on {} lines", self.point_lines[i].len()));
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let common_lines =
                    (0..n).filter(|&l| self.is_on(a, l) && self.is_on(b, l)).count();
                if common_lines != 1 {
                    return fail(format!("points {a}, {b} share {common_lines} lines"));
                }
                if (self.line_bits[a] & self.line_bits[b]).count_ones() != 1 {
                    return fail(format!("lines {a}, {b} do not meet in one point"));
                }
                if self.line_through[a * n + b] == u8::MAX {
                    return fail(format!("no line recorded through {a}, {b}"));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    /// Number of points, equal to the number of lines.
    #[inline]
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn field(&self) -> &FieldTables {
        &self.field
    }

    #[inline]
    pub fn point(&self, p: usize) -> [u8; 3] {
        self.points[p]
    }

    /// Dual coordinates `[a0, a1, a2]` of line `l`: the line `a·x = 0`.
    #[inline]
    pub fn line(&self, l: usize) -> [u8; 3] {
        self.points[l]
    }

    #[inline]
    pub fn line_bits(&self, l: usize) -> u128 {
        self.line_bits[l]
    }

    #[inline]
    pub fn points_on(&self, l: usize) -> &[u8] {
        &self.line_points[l]
    }

    #[inline]
    pub fn lines_through(&self, p: usize) -> &[u8] {
        &self.point_lines[p]
    }

    #[inline]
    pub fn is_on(&self, p: usize, l: usize) -> bool {
        self.line_bits[l] >> p & 1 == 1
    }

    /// Bit mask of all points of the plane.
    #[inline]
    pub fn all_points(&self) -> u128 {
        if self.num_points() == 128 {
            u128::MAX
        } else {
            (1u128 << self.num_points()) - 1
        }
    }

    pub fn line_through(&self, a: usize, b: usize) -> Result<usize, PlaneError> {
        let n = self.num_points();
        for p in [a, b] {
            if p >= n {
                return Err(PlaneError::PointOutOfRange { index: p, count: n });
            }
        }
        if a == b {
            return Err(PlaneError::SamePoint(a));
        }
        Ok(self.join(a, b))
    }

    /// Unchecked [`line_through`](Self::line_through) for distinct in-range points.
    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.line_through[a * self.num_points() + b] as usize
    }

    /// The common point of two distinct lines.
    #[inline]
    pub fn meet(&self, l: usize, m: usize) -> usize {
        (self.line_bits[l] & self.line_bits[m]).trailing_zeros() as usize
    }

    #[inline]
    pub fn collinear(&self, a: usize, b: usize, c: usize) -> bool {
        self.is_on(c, self.join(a, b))
    }

    /// Point index of a nonzero vector (any scalar multiple of a point).
    #[inline]
    pub fn index_of(&self, v: [u8; 3]) -> Option<usize> {
        let q = self.q;
        if v.iter().any(|&c| c as usize >= q) {
            return None;
        }
        match self.vec_index[(v[0] as usize * q + v[1] as usize) * q + v[2] as usize] {
            u8::MAX => None,
            i => Some(i as usize),
        }
    }

    /// Point index of a nonzero in-range vector without checks.
    #[inline]
    pub(crate) fn index_of_unchecked(&self, v: [u8; 3]) -> usize {
        let q = self.q;
        self.vec_index[(v[0] as usize * q + v[1] as usize) * q + v[2] as usize] as usize
    }

    /// Resolve a coordinate triple given as integers into a point index.
    pub fn point_from_coords(&self, coords: &[u32]) -> Result<usize, PlaneError> {
        let bad = || PlaneError::BadCoordinates(coords.to_vec(), self.q);
        if coords.len() != 3 || coords.iter().any(|&c| c as usize >= self.q) {
            return Err(bad());
        }
        self.index_of([coords[0] as u8, coords[1] as u8, coords[2] as u8]).ok_or_else(bad)
    }

    pub fn dump(&self) -> PlaneDump {
        let n = self.num_points();
        PlaneDump {
            q: self.q,
            field_poly: self.field.spec().coefficients_string(),
            points: self.points.clone(),
            lines: self.points.clone(),
            incidence: (0..n).map(|l| self.line_points[l].clone()).collect(),
        }
    }
}

/// Serialisable incidence list: `incidence[l]` holds the point indices on line `l`.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneDump {
    pub q: usize,
    pub field_poly: String,
    pub points: Vec<[u8; 3]>,
    pub lines: Vec<[u8; 3]>,
    pub incidence: Vec<Vec<u8>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::SUPPORTED_ORDERS;

    #[test]
    fn sizes() {
        let fano = ProjectivePlane::build_default(2).unwrap();
        assert_eq!(fano.num_points(), 7);
        assert!((0..7).all(|l| fano.points_on(l).len() == 3));
        let p8 = ProjectivePlane::build_default(8).unwrap();
        assert_eq!(p8.num_points(), 73);
        assert_eq!(p8.points_on(0).len(), 9);
        assert_eq!(ProjectivePlane::build_default(9).unwrap().num_points(), 91);
    }

    #[test]
    fn ordering_is_lexicographic() {
        for q in SUPPORTED_ORDERS {
            let plane = ProjectivePlane::build_default(q).unwrap();
            let n = plane.num_points();
            assert_eq!(plane.point(0), [0, 0, 1]);
            assert_eq!(plane.point(1), [0, 1, 0]);
            assert_eq!(plane.point(q as usize + 1), [1, 0, 0]);
            assert!((1..n).all(|i| plane.point(i - 1) < plane.point(i)));
        }
    }

    #[test]
    fn fano_line_through_axis_points() {
        let fano = ProjectivePlane::build_default(2).unwrap();
        let a = fano.index_of([1, 0, 0]).unwrap();
        let b = fano.index_of([0, 1, 0]).unwrap();
        let l = fano.line_through(a, b).unwrap();
        assert_eq!(fano.line(l), [0, 0, 1]);
        assert_eq!(fano.line_through(b, a).unwrap(), l);
        assert_eq!(fano.line_through(a, a), Err(PlaneError::SamePoint(a)));
    }

    #[test]
    fn line_through_matches_brute_force_scan() {
        let plane = ProjectivePlane::build_default(3).unwrap();
        let n = plane.num_points();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let scan: Vec<usize> = (0..n)
                    .filter(|&l| plane.points_on(l).contains(&(a as u8)) && plane.points_on(l).contains(&(b as u8)))
                    .collect();
                assert_eq!(scan, vec![plane.line_through(a, b).unwrap()]);
            }
        }
    }

    #[test]
    fn incidence_is_self_dual() {
        // The identity pairing of point and line indices maps the incidence
        // matrix onto its transpose.
        for q in [2, 3, 4] {
            let plane = ProjectivePlane::build_default(q).unwrap();
            let n = plane.num_points();
            for p in 0..n {
                for l in 0..n {
                    assert_eq!(plane.is_on(p, l), plane.is_on(l, p));
                }
            }
        }
    }

    #[test]
    fn coordinates_resolve() {
        let plane = ProjectivePlane::build_default(9).unwrap();
        let a = plane.point_from_coords(&[2, 4, 6]).unwrap();
        assert_eq!(plane.point(a)[0], 1);
        assert!(plane.point_from_coords(&[0, 0, 0]).is_err());
        assert!(plane.point_from_coords(&[0, 9, 1]).is_err());
        assert!(plane.point_from_coords(&[0, 1]).is_err());
    }

    #[test]
    fn meet_is_dual_join() {
        let plane = ProjectivePlane::build_default(5).unwrap();
        for l in 0..10 {
            for m in l + 1..12 {
                let p = plane.meet(l, m);
                assert!(plane.is_on(p, l) && plane.is_on(p, m));
            }
        }
    }
}
