use std::fmt;

use thiserror::Error;

use crate::plane::{ProjectivePlane, MAX_POINTS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("operation needs a non-empty point set")]
    Empty,
    #[error("point {0} is not in the set")]
    NotMember(usize),
    #[error("point index {index} out of range for a plane with {count} points")]
    OutOfRange { index: usize, count: usize },
    #[error("point set belongs to PG(2,{found}), expected PG(2,{expected})")]
    PlaneMismatch { expected: usize, found: usize },
}

/// A set of points of one plane together with its incidence caches.
///
/// Bit `i` of `bits` is point `i`. `line_counts[l]` is `|S ∩ l|` and, for a
/// point `P` of the set, `tangent_counts[P]` is the number of lines meeting
/// the set in `P` alone. Both caches are kept in step with every insertion
/// and removal.
#[derive(Clone)]
pub struct PointSet {
    q: u8,
    n: u8,
    bits: u128,
    size: u8,
    line_counts: [u8; MAX_POINTS],
    tangent_counts: [u8; MAX_POINTS],
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.bits == other.bits
    }
}

impl Eq for PointSet {}

impl std::hash::Hash for PointSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.q.hash(state);
        self.bits.hash(state);
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSet(q={}, {:?})", self.q, self.points().collect::<Vec<_>>())
    }
}

impl PointSet {
    pub fn empty(plane: &ProjectivePlane) -> Self {
        PointSet {
            q: plane.order() as u8,
            n: plane.num_points() as u8,
            bits: 0,
            size: 0,
            line_counts: [0; MAX_POINTS],
            tangent_counts: [0; MAX_POINTS],
        }
    }

    pub fn from_bits(plane: &ProjectivePlane, bits: u128) -> Result<Self, SetError> {
        let extra = bits & !plane.all_points();
        if extra != 0 {
            return Err(SetError::OutOfRange { index: extra.trailing_zeros() as usize, count: plane.num_points() });
        }
        let mut set = Self::empty(plane);
        let mut rest = bits;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            set.insert(plane, p);
        }
        Ok(set)
    }

    pub fn from_points(plane: &ProjectivePlane, points: &[usize]) -> Result<Self, SetError> {
        let mut set = Self::empty(plane);
        for &p in points {
            if p >= plane.num_points() {
                return Err(SetError::OutOfRange { index: p, count: plane.num_points() });
            }
            set.insert(plane, p);
        }
        Ok(set)
    }

    /// A whole line of the plane.
    pub fn line(plane: &ProjectivePlane, l: usize) -> Self {
        Self::from_bits(plane, plane.line_bits(l)).expect("line points are in range")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q as usize
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.size as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        p < 128 && self.bits >> p & 1 == 1
    }

    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        BitIter(self.bits)
    }

    #[inline]
    pub fn line_count(&self, l: usize) -> usize {
        self.line_counts[l] as usize
    }

    pub fn line_counts(&self) -> &[u8] {
        &self.line_counts[..self.n as usize]
    }

    pub fn check_plane(&self, plane: &ProjectivePlane) -> Result<(), SetError> {
        if self.q as usize != plane.order() {
            return Err(SetError::PlaneMismatch { expected: plane.order(), found: self.q as usize });
        }
        Ok(())
    }

    /// Add `p`; returns `false` if it was already present.
    #[inline]
    pub fn insert(&mut self, plane: &ProjectivePlane, p: usize) -> bool {
        if self.contains(p) {
            return false;
        }
        for &l in plane.lines_through(p) {
            let l = l as usize;
            match self.line_counts[l] {
                0 => self.tangent_counts[p] += 1,
                1 => {
                    let other = (plane.line_bits(l) & self.bits).trailing_zeros() as usize;
                    self.tangent_counts[other] -= 1;
                }
                _ => {}
            }
            self.line_counts[l] += 1;
        }
        self.bits |= 1u128 << p;
        self.size += 1;
        true
    }

    /// Remove `p`; returns `false` if it was absent.
    #[inline]
    pub fn remove(&mut self, plane: &ProjectivePlane, p: usize) -> bool {
        if !self.contains(p) {
            return false;
        }
        self.bits &= !(1u128 << p);
        self.size -= 1;
        self.tangent_counts[p] = 0;
        for &l in plane.lines_through(p) {
            let l = l as usize;
            self.line_counts[l] -= 1;
            if self.line_counts[l] == 1 {
                let other = (plane.line_bits(l) & self.bits).trailing_zeros() as usize;
                self.tangent_counts[other] += 1;
            }
        }
        true
    }

    /// Number of tangents at `p`, i.e. lines through `p` meeting the set only in `p`.
    pub fn tangent_count(&self, p: usize) -> Result<usize, SetError> {
        if !self.contains(p) {
            return Err(SetError::NotMember(p));
        }
        Ok(self.tangent_counts[p] as usize)
    }

    #[inline]
    pub(crate) fn tangents_at(&self, p: usize) -> usize {
        self.tangent_counts[p] as usize
    }

    /// Every point lies on at least one tangent.
    pub fn is_admissible(&self) -> Result<bool, SetError> {
        self.nonempty()?;
        Ok(self.points().all(|p| self.tangent_counts[p] >= 1))
    }

    /// Every point lies on exactly one tangent.
    pub fn is_semioval(&self) -> Result<bool, SetError> {
        self.nonempty()?;
        Ok(self.points().all(|p| self.tangent_counts[p] == 1))
    }

    /// A semioval meeting every line in at least one point and missing at least one point of it.
    pub fn is_blocking_semioval(&self) -> Result<bool, SetError> {
        Ok(self.is_semioval()? && self.line_counts().iter().all(|&c| c >= 1 && c as usize <= self.order()))
    }

    fn nonempty(&self) -> Result<(), SetError> {
        if self.is_empty() {
            Err(SetError::Empty)
        } else {
            Ok(())
        }
    }

    /// `spectrum[i]` is the number of lines meeting the set in exactly `i` points, `0 ≤ i ≤ q+1`.
    pub fn spectrum(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.order() + 2];
        for &c in self.line_counts() {
            out[c as usize] += 1;
        }
        out
    }

    /// Sorted tangent counts of the points of the set.
    pub fn tangent_profile(&self) -> Vec<u8> {
        let mut v: Vec<u8> = self.points().map(|p| self.tangent_counts[p]).collect();
        v.sort_unstable();
        v
    }

    /// Recompute both caches from `bits` and compare.
    pub fn caches_consistent(&self, plane: &ProjectivePlane) -> bool {
        let n = plane.num_points();
        for l in 0..n {
            if self.line_counts[l] as u32 != (plane.line_bits(l) & self.bits).count_ones() {
                return false;
            }
        }
        for p in 0..n {
            let want = if self.contains(p) {
                plane.lines_through(p).iter().filter(|&&l| self.line_counts[l as usize] == 1).count()
            } else {
                0
            };
            if self.tangent_counts[p] as usize != want {
                return false;
            }
        }
        let incidences: usize = self.line_counts().iter().map(|&c| c as usize).sum();
        incidences == self.len() * (self.order() + 1) && self.bits.count_ones() as usize == self.len()
    }
}

/// Ascending iterator over the set bits of a mask.
#[derive(Clone, Copy)]
pub struct BitIter(pub u128);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }
}
