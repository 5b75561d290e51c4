//! Collineations of PG(2,q): semilinear maps `x ↦ M·x^σ` with `σ` a power of
//! the Frobenius automorphism, acting on point indices through materialised
//! permutations.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::canon::{self, CanonError};
use crate::galois::{FieldError, FieldSpec, FieldTables};
use crate::plane::ProjectivePlane;
use crate::search::pointset::{BitIter, PointSet, SetError};

pub type Matrix = [[u8; 3]; 3];

pub const IDENTITY: Matrix = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix {0:?} is singular")]
    Singular(Matrix),
    #[error("automorphism exponent {k} out of range for extension degree {h}")]
    Automorphism { k: u8, h: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error("collineation acts on {found} points, plane has {expected}")]
    PlaneMismatch { expected: usize, found: usize },
}

pub mod linalg {
    use super::Matrix;
    use crate::galois::FieldTables;

    pub fn mul(f: &FieldTables, a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = [[0u8; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0;
                for k in 0..3 {
                    acc = f.add(acc, f.mul(a[i][k], b[k][j]));
                }
                out[i][j] = acc;
            }
        }
        out
    }

    #[inline]
    pub fn apply(f: &FieldTables, m: &Matrix, v: [u8; 3]) -> [u8; 3] {
        let row = |r: &[u8; 3]| f.add(f.add(f.mul(r[0], v[0]), f.mul(r[1], v[1])), f.mul(r[2], v[2]));
        [row(&m[0]), row(&m[1]), row(&m[2])]
    }

    pub fn det(f: &FieldTables, m: &Matrix) -> u8 {
        let minor = |a: u8, b: u8, c: u8, d: u8| f.sub(f.mul(a, d), f.mul(b, c));
        let t0 = f.mul(m[0][0], minor(m[1][1], m[1][2], m[2][1], m[2][2]));
        let t1 = f.mul(m[0][1], minor(m[1][0], m[1][2], m[2][0], m[2][2]));
        let t2 = f.mul(m[0][2], minor(m[1][0], m[1][1], m[2][0], m[2][1]));
        f.add(f.sub(t0, t1), t2)
    }

    /// Inverse by the adjugate; `None` when singular.
    pub fn inverse(f: &FieldTables, m: &Matrix) -> Option<Matrix> {
        let d = det(f, m);
        if d == 0 {
            return None;
        }
        let di = f.inv(d);
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            f.sub(f.mul(m[r0][c0], m[r1][c1]), f.mul(m[r0][c1], m[r1][c0]))
        };
        // adj[i][j] = cofactor(j, i)
        let adj = [
            [cof(1, 2, 1, 2), f.neg(cof(0, 2, 1, 2)), cof(0, 1, 1, 2)],
            [f.neg(cof(1, 2, 0, 2)), cof(0, 2, 0, 2), f.neg(cof(0, 1, 0, 2))],
            [cof(1, 2, 0, 1), f.neg(cof(0, 2, 0, 1)), cof(0, 1, 0, 1)],
        ];
        Some(adj.map(|row| row.map(|x| f.mul(x, di))))
    }

    pub fn frob(f: &FieldTables, k: usize, m: &Matrix) -> Matrix {
        m.map(|row| row.map(|x| f.frob(k, x)))
    }

    pub fn from_columns(c: [[u8; 3]; 3]) -> Matrix {
        [[c[0][0], c[1][0], c[2][0]], [c[0][1], c[1][1], c[2][1]], [c[0][2], c[1][2], c[2][2]]]
    }
}

/// A semilinear map `x ↦ matrix · σ^frob(x)` in matrix form, without a
/// materialised permutation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Semilinear {
    pub matrix: Matrix,
    pub frob: u8,
}

impl Semilinear {
    pub const IDENTITY: Semilinear = Semilinear { matrix: IDENTITY, frob: 0 };

    #[inline]
    pub fn apply_vec(&self, f: &FieldTables, v: [u8; 3]) -> [u8; 3] {
        let k = self.frob as usize;
        linalg::apply(f, &self.matrix, v.map(|c| f.frob(k, c)))
    }

    #[inline]
    pub fn apply_point(&self, plane: &ProjectivePlane, p: usize) -> usize {
        plane.index_of_unchecked(self.apply_vec(plane.field(), plane.point(p)))
    }

    pub fn apply_bits(&self, plane: &ProjectivePlane, bits: u128) -> u128 {
        BitIter(bits).fold(0u128, |acc, p| acc | 1u128 << self.apply_point(plane, p))
    }

    /// `self ∘ other`.
    pub fn compose(&self, f: &FieldTables, other: &Semilinear) -> Semilinear {
        let h = f.degree();
        let b = linalg::frob(f, self.frob as usize, &other.matrix);
        Semilinear {
            matrix: linalg::mul(f, &self.matrix, &b),
            frob: ((self.frob as usize + other.frob as usize) % h) as u8,
        }
    }

    pub fn inverse(&self, f: &FieldTables) -> Semilinear {
        let h = f.degree();
        let inv = linalg::inverse(f, &self.matrix).expect("semilinear maps are invertible");
        let back = (h - self.frob as usize) % h;
        Semilinear { matrix: linalg::frob(f, back, &inv), frob: back as u8 }
    }
}

/// A collineation together with the permutation it induces on point indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Collineation {
    map: Semilinear,
    perm: Vec<u8>,
}

impl fmt::Debug for Collineation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Collineation({:?}, σ^{})", self.map.matrix, self.map.frob)
    }
}

impl Collineation {
    pub fn new(plane: &ProjectivePlane, matrix: Matrix, frob: u8) -> Result<Self, GroupError> {
        let f = plane.field();
        if frob as usize >= f.degree() {
            return Err(GroupError::Automorphism { k: frob, h: f.degree() });
        }
        if linalg::det(f, &matrix) == 0 {
            return Err(GroupError::Singular(matrix));
        }
        Ok(Self::from_map(plane, Semilinear { matrix, frob }))
    }

    pub fn from_map(plane: &ProjectivePlane, map: Semilinear) -> Self {
        let perm = (0..plane.num_points()).map(|p| map.apply_point(plane, p) as u8).collect();
        Collineation { map, perm }
    }

    pub fn identity(plane: &ProjectivePlane) -> Self {
        Self::from_map(plane, Semilinear::IDENTITY)
    }

    pub fn map(&self) -> &Semilinear {
        &self.map
    }

    pub fn matrix(&self) -> Matrix {
        self.map.matrix
    }

    pub fn frob_exp(&self) -> u8 {
        self.map.frob
    }

    pub fn perm(&self) -> &[u8] {
        &self.perm
    }

    #[inline]
    pub fn apply_point(&self, p: usize) -> usize {
        self.perm[p] as usize
    }

    pub fn apply_bits(&self, bits: u128) -> u128 {
        permute_bits(&self.perm, bits)
    }

    /// `self ∘ other`, composing both the matrices and the permutations.
    pub fn compose(&self, plane: &ProjectivePlane, other: &Collineation) -> Collineation {
        Collineation {
            map: self.map.compose(plane.field(), &other.map),
            perm: other.perm.iter().map(|&p| self.perm[p as usize]).collect(),
        }
    }

    pub fn inverse(&self, plane: &ProjectivePlane) -> Collineation {
        let mut perm = vec![0u8; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p as usize] = i as u8;
        }
        Collineation { map: self.map.inverse(plane.field()), perm }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// Image of a point set.
    pub fn apply_set(&self, plane: &ProjectivePlane, set: &PointSet) -> Result<PointSet, GroupError> {
        set.check_plane(plane)?;
        if self.perm.len() != plane.num_points() {
            return Err(GroupError::PlaneMismatch { expected: plane.num_points(), found: self.perm.len() });
        }
        Ok(PointSet::from_bits(plane, self.apply_bits(set.bits()))?)
    }
}

pub fn permute_bits(perm: &[u8], bits: u128) -> u128 {
    BitIter(bits).fold(0u128, |acc, p| acc | 1u128 << perm[p])
}

/// `|PΓL(3,q)| = h·q³(q³−1)(q²−1)`.
pub fn group_order(q: u32) -> Result<u64, GroupError> {
    let spec = FieldSpec::default_for(q)?;
    let q = q as u64;
    Ok(spec.h() as u64 * q.pow(3) * (q.pow(3) - 1) * (q * q - 1))
}

/// Order of PGL(3,q), the linear part.
pub fn linear_group_order(q: u64) -> u64 {
    q.pow(3) * (q.pow(3) - 1) * (q * q - 1)
}

/// `I + c·E_ij`.
pub fn transvection(i: usize, j: usize, c: u8) -> Matrix {
    let mut m = IDENTITY;
    m[i][j] = c;
    m
}

pub fn diagonal(a: u8, b: u8, c: u8) -> Matrix {
    [[a, 0, 0], [0, b, 0], [0, 0, c]]
}

/// Labels `p^k`, `0 ≤ k < h`: the powers of `x`, an additive basis of GF(q) over GF(p).
pub(crate) fn additive_basis(f: &FieldTables) -> Vec<u8> {
    let p = f.spec().p() as usize;
    (0..f.degree()).map(|k| p.pow(k as u32) as u8).collect()
}

/// Generators of PΓL(3,q): all elementary transvections over an additive
/// basis, one diagonal matrix with a primitive entry, and the Frobenius map.
pub fn pgamma_generators(plane: &ProjectivePlane) -> Vec<Collineation> {
    let f = plane.field();
    let mut gens = Vec::new();
    for c in additive_basis(f) {
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    gens.push(Collineation::from_map(plane, Semilinear { matrix: transvection(i, j, c), frob: 0 }));
                }
            }
        }
    }
    let w = f.primitive_element();
    if w != 1 {
        gens.push(Collineation::from_map(plane, Semilinear { matrix: diagonal(w, 1, 1), frob: 0 }));
    }
    if f.degree() > 1 {
        gens.push(Collineation::from_map(plane, Semilinear { matrix: IDENTITY, frob: 1 }));
    }
    gens
}

/// All permutations generated by `gens`, or `None` once more than `limit` are found.
pub fn closure(gens: &[Vec<u8>], n: usize, limit: usize) -> Option<HashSet<Vec<u8>>> {
    let identity: Vec<u8> = (0..n as u8).collect();
    let mut seen = HashSet::new();
    seen.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<u8> = x.iter().map(|&p| g[p as usize]).collect();
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen)
}

/// Explicit orbit of a set under the group generated by `gens`.
pub fn enumerate_orbit(gens: &[Collineation], bits: u128) -> Vec<u128> {
    let mut seen = HashSet::from([bits]);
    let mut order = vec![bits];
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for g in gens {
            let y = g.apply_bits(x);
            if seen.insert(y) {
                order.push(y);
            }
        }
    }
    order
}

/// Order of a permutation.
pub fn element_order(perm: &[u8]) -> u64 {
    let mut visited = vec![false; perm.len()];
    let mut order = 1u64;
    for start in 0..perm.len() {
        if visited[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !visited[x] {
            visited[x] = true;
            x = perm[x] as usize;
            len += 1;
        }
        order = lcm(order, len);
    }
    order
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub order: u64,
    pub generators: Vec<Collineation>,
}

/// The setwise stabilizer `{g : g·S = S}` as its order and a generating set.
pub fn set_stabilizer(plane: &ProjectivePlane, set: &PointSet) -> Result<Stabilizer, GroupError> {
    set.check_plane(plane)?;
    if set.is_empty() {
        return Ok(Stabilizer { order: group_order(plane.order() as u32)?, generators: pgamma_generators(plane) });
    }
    let c = canon::canonize(plane, set, true)?;
    let mut generators: Vec<Collineation> = c
        .automorphisms
        .iter()
        .chain(&c.kernel_generators)
        .map(|m| Collineation::from_map(plane, *m))
        .collect();
    generators.retain(|g| !g.is_identity());
    Ok(Stabilizer { order: c.stabilizer_order, generators: reduce_generators(plane, generators) })
}

/// Greedily drop generators already in the span of the earlier ones.
pub(crate) fn reduce_generators(plane: &ProjectivePlane, elements: Vec<Collineation>) -> Vec<Collineation> {
    const LIMIT: usize = 200_000;
    let n = plane.num_points();
    let mut kept: Vec<Collineation> = Vec::new();
    let mut span: HashSet<Vec<u8>> = HashSet::from([(0..n as u8).collect()]);
    let mut rest = elements.into_iter();
    while let Some(e) = rest.next() {
        if span.contains(e.perm()) {
            continue;
        }
        kept.push(e);
        let perms: Vec<Vec<u8>> = kept.iter().map(|g| g.perm().to_vec()).collect();
        match closure(&perms, n, LIMIT) {
            Some(s) => span = s,
            // Too large to track; keep the remaining elements unreduced.
            None => {
                kept.extend(rest);
                return kept;
            }
        }
    }
    kept
}

/// Number of distinct images of `set` under PΓL(3,q).
pub fn orbit_size(plane: &ProjectivePlane, set: &PointSet) -> Result<u64, GroupError> {
    if set.is_empty() {
        return Ok(1);
    }
    let order = group_order(plane.order() as u32)?;
    Ok(order / canon::canonize(plane, set, false)?.stabilizer_order)
}
