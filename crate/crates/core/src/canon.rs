//! Canonical representatives of PΓL(3,q)-orbits of point sets.
//!
//! A collineation is pinned down by the images of an ordered frame (four
//! points, no three collinear) together with its field automorphism. For a set
//! containing a frame we therefore look at every ordered frame drawn from the
//! set whose colour sequence is minimal, map it onto the standard frame
//! `e1, e2, e3, e1+e2+e3` under every automorphism, and keep the
//! lexicographically least image. The candidate family is defined from
//! orbit-invariant data only, so equivalent sets produce the same family of
//! images and the same minimum.
//!
//! Sets without a frame are either tiny (at most three points) or lie on a
//! line plus at most one further point; those are normalised through ordered
//! triples on the line instead, which fixes the image although not the map.
//!
//! Every map in the candidate family reaching the minimum differs from the
//! first one by an element of the set stabilizer, which gives the stabilizer
//! order and its elements as a by-product.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::group::{self, linalg, Collineation, Matrix, Semilinear};
use crate::plane::ProjectivePlane;
use crate::search::pointset::{BitIter, PointSet, SetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("the empty set has no canonical form")]
    Empty,
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Lexicographic order on ascending point-index lists: the set holding the
/// smallest point of the symmetric difference comes first.
#[inline]
pub fn lex_cmp(a: u128, b: u128) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let d = a ^ b;
    if a & d & d.wrapping_neg() != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Orbit-invariant summary used as a cheap pre-filter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub size: u8,
    pub spectrum: Vec<u32>,
    pub tangent_profile: Vec<u8>,
}

impl Fingerprint {
    pub fn of(set: &PointSet) -> Self {
        Fingerprint { size: set.len() as u8, spectrum: set.spectrum(), tangent_profile: set.tangent_profile() }
    }
}

/// The distinguished representative of an orbit plus its fingerprint.
#[derive(Debug, Clone)]
pub struct CanonicalKey {
    q: u8,
    bits: u128,
    fingerprint: Fingerprint,
}

impl CanonicalKey {
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn order(&self) -> usize {
        self.q as usize
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.fingerprint.size as usize
    }

    pub fn is_empty(&self) -> bool {
        self.fingerprint.size == 0
    }

    pub fn points(&self) -> Vec<usize> {
        BitIter(self.bits).collect()
    }

    /// Rebuild from representative bits, which must already be canonical.
    pub fn from_canonical_bits(plane: &ProjectivePlane, bits: u128) -> Result<Self, SetError> {
        let set = PointSet::from_bits(plane, bits)?;
        Ok(CanonicalKey { q: plane.order() as u8, bits, fingerprint: Fingerprint::of(&set) })
    }

    pub fn to_set(&self, plane: &ProjectivePlane) -> PointSet {
        PointSet::from_bits(plane, self.bits).expect("canonical keys hold in-range points")
    }

    /// 32-digit hex rendering of the representative bits.
    pub fn hex(&self) -> String {
        format!("{:032x}", self.bits)
    }
}

impl PartialEq for CanonicalKey {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.bits == other.bits
    }
}

impl Eq for CanonicalKey {}

impl Hash for CanonicalKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.q.hash(state);
        self.bits.hash(state);
    }
}

impl PartialOrd for CanonicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.q.cmp(&other.q).then_with(|| lex_cmp(self.bits, other.bits))
    }
}

#[derive(Debug, Clone)]
pub struct Canonization {
    pub key: CanonicalKey,
    /// Maps the input set onto `key.bits()`.
    pub transform: Semilinear,
    pub stabilizer_order: u64,
    /// `transform⁻¹ ∘ g` for every candidate map `g` reaching the minimum
    /// (empty unless requested). For sets with a frame this is the whole stabilizer.
    pub automorphisms: Vec<Semilinear>,
    /// Stabilizer elements fixing the normalising configuration pointwise,
    /// non-empty only for frameless sets.
    pub kernel_generators: Vec<Semilinear>,
}

pub fn canonical_form(plane: &ProjectivePlane, set: &PointSet) -> Result<CanonicalKey, CanonError> {
    Ok(canonize(plane, set, false)?.key)
}

pub fn are_equivalent(plane: &ProjectivePlane, a: &PointSet, b: &PointSet) -> Result<bool, CanonError> {
    a.check_plane(plane)?;
    b.check_plane(plane)?;
    if a.len() != b.len() {
        return Ok(false);
    }
    if a.is_empty() {
        return Ok(true);
    }
    if Fingerprint::of(a) != Fingerprint::of(b) {
        return Ok(false);
    }
    Ok(canonical_form(plane, a)? == canonical_form(plane, b)?)
}

/// Stabilizer elements found while canonising `set`.
pub fn automorphisms_found(plane: &ProjectivePlane, set: &PointSet) -> Result<Vec<Collineation>, CanonError> {
    let c = canonize(plane, set, true)?;
    Ok(c.automorphisms.iter().chain(&c.kernel_generators).map(|m| Collineation::from_map(plane, *m)).collect())
}

#[inline]
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Two rounds of invariant colouring; returns `(colour, point)` sorted.
fn colour_points(plane: &ProjectivePlane, set: &PointSet) -> Vec<(u64, usize)> {
    let bits = set.bits();
    let mut first = [0u64; crate::plane::MAX_POINTS];
    for p in set.points() {
        let mut c = 0u64;
        for &l in plane.lines_through(p) {
            c += 1u64 << (4 * set.line_count(l as usize));
        }
        first[p] = c;
    }
    let mut out: Vec<(u64, usize)> = set
        .points()
        .map(|p| {
            let mut acc = 0u64;
            for &l in plane.lines_through(p) {
                let l = l as usize;
                let count = set.line_count(l);
                if count < 2 {
                    continue;
                }
                let members = plane.line_bits(l) & bits & !(1u128 << p);
                let inner = BitIter(members).fold(0u64, |a, x| a.wrapping_add(mix(first[x])));
                acc = acc.wrapping_add(mix(inner ^ (count as u64) << 56));
            }
            (first[p] ^ mix(acc) & !0xFFFF_FFFF_FFFF, p)
        })
        .collect();
    out.sort_unstable();
    out
}

/// All ordered tuples of length `depth` (≤ 4) accepted by `valid` whose colour
/// sequence is lexicographically least.
fn minimal_tuples(
    sorted: &[(u64, usize)],
    depth: usize,
    valid: &dyn Fn(&[usize], usize) -> bool,
) -> Vec<[usize; 4]> {
    struct State<'a> {
        sorted: &'a [(u64, usize)],
        depth: usize,
        valid: &'a dyn Fn(&[usize], usize) -> bool,
        best: Option<[u64; 4]>,
        found: Vec<[usize; 4]>,
        pts: [usize; 4],
        cols: [u64; 4],
    }
    fn go(s: &mut State<'_>, d: usize) {
        for i in 0..s.sorted.len() {
            let (c, x) = s.sorted[i];
            if s.pts[..d].contains(&x) || !(s.valid)(&s.pts[..d], x) {
                continue;
            }
            s.cols[d] = c;
            if let Some(b) = s.best {
                if s.cols[..=d] > b[..=d] {
                    break;
                }
            }
            s.pts[d] = x;
            if d + 1 == s.depth {
                match s.best.map(|b| s.cols[..s.depth].cmp(&b[..s.depth])) {
                    Some(Ordering::Equal) => s.found.push(s.pts),
                    Some(Ordering::Greater) => {}
                    _ => {
                        s.best = Some(s.cols);
                        s.found.clear();
                        s.found.push(s.pts);
                    }
                }
            } else {
                go(s, d + 1);
            }
        }
    }
    let mut s = State { sorted, depth, valid, best: None, found: Vec::new(), pts: [usize::MAX; 4], cols: [0; 4] };
    go(&mut s, 0);
    s.found
}

enum Shape {
    Frame,
    /// Points `A, B, C` on a line plus an optional point off it.
    LinePlus(Option<usize>),
    Small(usize),
}

/// Complete independent columns with standard basis vectors.
fn complete_basis(f: &crate::galois::FieldTables, cols: &[[u8; 3]]) -> Matrix {
    let e = [[1u8, 0, 0], [0, 1, 0], [0, 0, 1]];
    let r = cols.len();
    let choices: Vec<Vec<usize>> = match r {
        3 => vec![vec![]],
        2 => (0..3).map(|i| vec![i]).collect(),
        1 => vec![vec![1, 2], vec![0, 2], vec![0, 1]],
        _ => vec![vec![0, 1, 2]],
    };
    for extra in choices {
        let mut c = [[0u8; 3]; 3];
        c[..r].copy_from_slice(cols);
        for (k, &j) in extra.iter().enumerate() {
            c[r + k] = e[j];
        }
        let m = linalg::from_columns(c);
        if linalg::det(f, &m) != 0 {
            return m;
        }
    }
    unreachable!("independent columns always extend to a basis")
}

pub fn canonize(plane: &ProjectivePlane, set: &PointSet, with_automorphisms: bool) -> Result<Canonization, CanonError> {
    set.check_plane(plane)?;
    if set.is_empty() {
        return Err(CanonError::Empty);
    }
    let f = plane.field();
    let q = plane.order() as u64;
    let h = f.degree();
    let sorted = colour_points(plane, set);

    let frame_ok = |pre: &[usize], x: usize| match pre.len() {
        2 => !plane.collinear(pre[0], pre[1], x),
        3 => {
            !plane.collinear(pre[0], pre[1], x)
                && !plane.collinear(pre[0], pre[2], x)
                && !plane.collinear(pre[1], pre[2], x)
        }
        _ => true,
    };
    let mut tuples = if set.len() >= 4 { minimal_tuples(&sorted, 4, &frame_ok) } else { Vec::new() };
    let shape = if !tuples.is_empty() {
        Shape::Frame
    } else if set.len() >= 3 {
        // No frame: all points but at most one lie on one line.
        let (line, count) = (0..plane.num_points())
            .map(|l| (l, set.line_count(l)))
            .max_by_key(|&(l, c)| (c, std::cmp::Reverse(l)))
            .expect("plane has lines");
        if count == set.len() || count + 1 == set.len() && count >= 3 {
            let on_line = plane.line_bits(line);
            let rest = set.bits() & !on_line;
            let extra = (rest != 0).then(|| rest.trailing_zeros() as usize);
            let line_pts: Vec<(u64, usize)> =
                sorted.iter().copied().filter(|&(_, p)| on_line >> p & 1 == 1).collect();
            tuples = minimal_tuples(&line_pts, 3, &|_, _| true);
            Shape::LinePlus(extra)
        } else {
            debug_assert_eq!(set.len(), 3);
            tuples = minimal_tuples(&sorted, 3, &|_, _| true);
            Shape::Small(3)
        }
    } else {
        tuples = minimal_tuples(&sorted, set.len(), &|_, _| true);
        Shape::Small(set.len())
    };

    let frob_vec = |k: usize, p: usize| plane.point(p).map(|c| f.frob(k, c));
    let mut best: Option<(u128, Semilinear)> = None;
    let mut minimizers: Vec<Semilinear> = Vec::new();
    let mut count = 0u64;
    for t in &tuples {
        for k in 0..h {
            let matrix = match shape {
                Shape::Frame => {
                    let cols = [frob_vec(k, t[0]), frob_vec(k, t[1]), frob_vec(k, t[2])];
                    let inv = linalg::inverse(f, &linalg::from_columns(cols)).expect("frame is independent");
                    let lambda = linalg::apply(f, &inv, frob_vec(k, t[3]));
                    let mut m = inv;
                    for (row, &l) in m.iter_mut().zip(&lambda) {
                        let s = f.inv(l);
                        *row = row.map(|x| f.mul(x, s));
                    }
                    m
                }
                Shape::LinePlus(extra) => {
                    let (a, b, c) = (frob_vec(k, t[0]), frob_vec(k, t[1]), frob_vec(k, t[2]));
                    let (i, j) = [(0, 1), (0, 2), (1, 2)]
                        .into_iter()
                        .find(|&(i, j)| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i])) != 0)
                        .expect("distinct points are independent");
                    let det = f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
                    let lam = f.div(f.sub(f.mul(c[i], b[j]), f.mul(c[j], b[i])), det);
                    let mu = f.div(f.sub(f.mul(a[i], c[j]), f.mul(a[j], c[i])), det);
                    let cols = [a.map(|x| f.mul(x, lam)), b.map(|x| f.mul(x, mu))];
                    let n = match extra {
                        Some(p) => linalg::from_columns([cols[0], cols[1], frob_vec(k, p)]),
                        None => complete_basis(f, &cols),
                    };
                    linalg::inverse(f, &n).expect("basis")
                }
                Shape::Small(r) => {
                    let cols: Vec<[u8; 3]> = t[..r].iter().map(|&p| frob_vec(k, p)).collect();
                    linalg::inverse(f, &complete_basis(f, &cols)).expect("basis")
                }
            };
            let g = Semilinear { matrix, frob: k as u8 };
            let image = g.apply_bits(plane, set.bits());
            match best.map(|(b, _)| lex_cmp(image, b)) {
                Some(Ordering::Greater) => continue,
                Some(Ordering::Equal) => {
                    count += 1;
                    if with_automorphisms {
                        minimizers.push(g);
                    }
                }
                _ => {
                    best = Some((image, g));
                    count = 1;
                    minimizers.clear();
                    if with_automorphisms {
                        minimizers.push(g);
                    }
                }
            }
        }
    }
    let (bits, transform) = best.expect("at least one normalising tuple");

    let w = f.primitive_element();
    let basis = group::additive_basis(f);
    let transvections = |pairs: &[(usize, usize)]| -> Vec<Matrix> {
        pairs.iter().flat_map(|&(i, j)| basis.iter().map(move |&c| group::transvection(i, j, c))).collect()
    };
    let (kernel_order, kernel): (u64, Vec<Matrix>) = match shape {
        Shape::Frame => (1, vec![]),
        Shape::LinePlus(Some(_)) => (q - 1, vec![group::diagonal(1, 1, w)]),
        Shape::LinePlus(None) => {
            let mut k = vec![group::diagonal(1, 1, w)];
            k.extend(transvections(&[(0, 2), (1, 2)]));
            (q * q * (q - 1), k)
        }
        Shape::Small(1) => {
            let mut k = vec![group::diagonal(w, 1, 1), group::diagonal(1, w, 1)];
            k.extend(transvections(&[(0, 1), (0, 2), (1, 2), (2, 1)]));
            (q.pow(3) * (q - 1) * (q * q - 1), k)
        }
        Shape::Small(2) => {
            let mut k = vec![group::diagonal(w, 1, 1), group::diagonal(1, w, 1)];
            k.extend(transvections(&[(0, 2), (1, 2)]));
            (q * q * (q - 1) * (q - 1), k)
        }
        Shape::Small(_) => ((q - 1) * (q - 1), vec![group::diagonal(w, 1, 1), group::diagonal(1, w, 1)]),
    };

    let (automorphisms, kernel_generators) = if with_automorphisms {
        let back = transform.inverse(f);
        let autos = minimizers.iter().map(|g| back.compose(f, g)).collect();
        let kernel = kernel
            .into_iter()
            .filter(|m| *m != group::IDENTITY)
            .map(|m| back.compose(f, &Semilinear { matrix: m, frob: 0 }).compose(f, &transform))
            .collect();
        (autos, kernel)
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(Canonization {
        key: CanonicalKey { q: plane.order() as u8, bits, fingerprint: Fingerprint::of(set) },
        transform,
        stabilizer_order: count * kernel_order,
        automorphisms,
        kernel_generators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_order, pgamma_generators};

    #[test]
    fn lex_order() {
        assert_eq!(lex_cmp(0b011, 0b101), Ordering::Less);
        assert_eq!(lex_cmp(0b110, 0b101), Ordering::Greater);
        assert_eq!(lex_cmp(0b1, 0b1), Ordering::Equal);
    }

    #[test]
    fn singletons_share_a_key() {
        let plane = ProjectivePlane::build_default(8).unwrap();
        let keys: std::collections::HashSet<u128> = (0..73)
            .map(|p| canonical_form(&plane, &PointSet::from_points(&plane, &[p]).unwrap()).unwrap().bits())
            .collect();
        assert_eq!(keys.len(), 1);
    }

    #[test]
    fn empty_set_is_an_error() {
        let plane = ProjectivePlane::build_default(3).unwrap();
        assert_eq!(canonical_form(&plane, &PointSet::empty(&plane)).unwrap_err(), CanonError::Empty);
    }

    #[test]
    fn image_matches_transform() {
        let plane = ProjectivePlane::build_default(9).unwrap();
        for pts in [vec![0usize, 5, 40, 77, 90, 13], vec![0, 1, 2], vec![3, 17], vec![0, 1, 2, 3, 50]] {
            let set = PointSet::from_points(&plane, &pts).unwrap();
            let c = canonize(&plane, &set, true).unwrap();
            assert_eq!(c.transform.apply_bits(&plane, set.bits()), c.key.bits());
            for a in c.automorphisms.iter().chain(&c.kernel_generators) {
                assert_eq!(a.apply_bits(&plane, set.bits()), set.bits());
            }
        }
    }

    #[test]
    fn small_configuration_stabilizers() {
        // Orbit–stabilizer sizes that can be counted by hand.
        let plane = ProjectivePlane::build_default(4).unwrap();
        let n = 21u64;
        let total = group_order(4).unwrap();
        let pair = PointSet::from_points(&plane, &[0, 1]).unwrap();
        assert_eq!(canonize(&plane, &pair, false).unwrap().stabilizer_order, total / (n * (n - 1) / 2));
        let line = PointSet::line(&plane, 0);
        assert_eq!(canonize(&plane, &line, false).unwrap().stabilizer_order, total / n);
        let triangle = PointSet::from_points(&plane, &[0, 1, 5]).unwrap();
        assert!(!plane.collinear(0, 1, 5));
        let triangles = n * (n - 1) * (n - 5) / 6;
        assert_eq!(canonize(&plane, &triangle, false).unwrap().stabilizer_order, total / triangles);
    }

    #[test]
    fn kernel_generators_close_to_stabilizer() {
        let plane = ProjectivePlane::build_default(3).unwrap();
        for pts in [vec![0usize], vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 5], vec![0, 1, 5]] {
            let set = PointSet::from_points(&plane, &pts).unwrap();
            let elems = automorphisms_found(&plane, &set).unwrap();
            let perms: Vec<Vec<u8>> = elems.iter().map(|g| g.perm().to_vec()).collect();
            let span = group::closure(&perms, 13, 10_000).unwrap();
            let order = canonize(&plane, &set, false).unwrap().stabilizer_order;
            assert_eq!(span.len() as u64, order, "{pts:?}");
            // brute force: count group elements fixing the set
            let gens: Vec<Vec<u8>> = pgamma_generators(&plane).iter().map(|g| g.perm().to_vec()).collect();
            let all = group::closure(&gens, 13, 10_000).unwrap();
            let fixing = all.iter().filter(|p| group::permute_bits(p, set.bits()) == set.bits()).count();
            assert_eq!(fixing as u64, order, "{pts:?}");
        }
    }
}
