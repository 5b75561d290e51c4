//! Brute-force oracles shared by the integration tests.
//!
//! Orbits are computed by breadth-first search over the generator
//! permutations, and the semioval and admissibility predicates are evaluated
//! straight from the incidence lists, independently of the cached counts in
//! `PointSet`.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use semioval::canon::canonize;
use semioval::group::{self, group_order, linalg, Collineation, Matrix};
use semioval::{classify, PointSet, ProjectivePlane, SearchConfig};

pub fn generator_perms(plane: &ProjectivePlane) -> Vec<Vec<u8>> {
    group::pgamma_generators(plane).iter().map(|g| g.perm().to_vec()).collect()
}

pub fn image(perm: &[u8], bits: u128) -> u128 {
    let mut out = 0u128;
    let mut rest = bits;
    while rest != 0 {
        let p = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1u128 << perm[p];
    }
    out
}

pub fn orbit(gens: &[Vec<u8>], start: u128) -> HashSet<u128> {
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for g in gens {
            let t = image(g, s);
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    seen
}

/// Tangent counts computed from the line lists.
pub fn tangents(plane: &ProjectivePlane, bits: u128, p: usize) -> usize {
    plane
        .lines_through(p)
        .iter()
        .filter(|&&l| plane.points_on(l as usize).iter().filter(|&&x| bits >> x & 1 == 1).count() == 1)
        .count()
}

pub fn brute_semioval(plane: &ProjectivePlane, bits: u128) -> bool {
    bits != 0 && points(bits).all(|p| tangents(plane, bits, p) == 1)
}

pub fn brute_admissible(plane: &ProjectivePlane, bits: u128) -> bool {
    bits != 0 && points(bits).all(|p| tangents(plane, bits, p) >= 1)
}

pub fn points(bits: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |&i| bits >> i & 1 == 1)
}

/// All `k`-subsets of `0..n` as bit masks (Gosper's hack).
pub fn subsets(n: usize, k: usize) -> Vec<u128> {
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut s: u128 = (1u128 << k) - 1;
    while s < 1u128 << n {
        out.push(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// Orbits of the subsets of size `k` satisfying `pred`.
pub fn orbits_where(plane: &ProjectivePlane, k: usize, pred: impl Fn(u128) -> bool) -> Vec<HashSet<u128>> {
    let gens = generator_perms(plane);
    let mut assigned = HashSet::new();
    let mut out = Vec::new();
    for s in subsets(plane.num_points(), k) {
        if assigned.contains(&s) || !pred(s) {
            continue;
        }
        let o = orbit(&gens, s);
        assigned.extend(o.iter().copied());
        out.push(o);
    }
    out
}

/// Classification over the whole size window equals the brute-force orbit
/// partition of semiovals, class for class, with matching stabilizer orders.
pub fn check_classification(q: u32, max_size: usize, thresholds: &[usize]) -> usize {
    let plane = ProjectivePlane::build_default(q).unwrap();
    let n = plane.num_points();
    let order = group_order(q).unwrap();
    let mut brute: Vec<HashSet<u128>> = Vec::new();
    for k in 1..=max_size.min(n) {
        let found = orbits_where(&plane, k, |s| brute_semioval(&plane, s));
        let (lo, hi) = SearchConfig::size_bounds(q);
        if !(lo..=hi).contains(&k) {
            assert!(found.is_empty(), "q={q}: semioval of size {k} outside the size bounds");
        }
        brute.extend(found);
    }
    assert!(!brute.is_empty());
    for &h in thresholds {
        let mut config = SearchConfig::new(q, 1, max_size);
        config.threshold = Some(h);
        let out = classify(&plane, &config).unwrap();
        assert_eq!(out.records.len(), brute.len(), "q={q} h={h}: class count");
        for rec in &out.records {
            let bits = rec.points.iter().fold(0u128, |a, &p| a | 1u128 << p);
            let o = brute.iter().find(|o| o.contains(&bits)).expect("record is a brute-force semioval");
            assert_eq!(rec.stabilizer_order * o.len() as u64, order, "q={q}: orbit-stabilizer");
            assert_eq!(rec.blocking, {
                let set = PointSet::from_bits(&plane, bits).unwrap();
                set.line_counts().iter().all(|&c| c >= 1 && (c as u32) <= q)
            });
        }
    }
    brute.len()
}

pub fn random_collineation(plane: &ProjectivePlane, rng: &mut impl Rng) -> Collineation {
    let f = plane.field();
    let q = plane.order() as u8;
    let h = f.degree() as u8;
    loop {
        let m: Matrix = [[0; 3]; 3].map(|row: [u8; 3]| row.map(|_| rng.gen_range(0..q)));
        if linalg::det(f, &m) != 0 {
            return Collineation::new(plane, m, rng.gen_range(0..h)).unwrap();
        }
    }
}

/// Random sets of mixed shapes: arbitrary, and a partial line with or without
/// one point off it (the sets with no four points in general position).
pub fn random_set(plane: &ProjectivePlane, rng: &mut impl Rng) -> PointSet {
    let n = plane.num_points();
    let q = plane.order();
    let bits = match rng.gen_range(0..4) {
        0 => {
            let l = rng.gen_range(0..n);
            let mut b = 0u128;
            for &p in plane.points_on(l) {
                if rng.gen_bool(0.6) {
                    b |= 1u128 << p;
                }
            }
            if rng.gen_bool(0.5) {
                let off = (0..n).filter(|&p| !plane.is_on(p, l)).nth(rng.gen_range(0..q * q)).unwrap();
                b |= 1u128 << off;
            }
            b
        }
        _ => {
            let k = rng.gen_range(1..=(3 * q + 3).min(n));
            let mut b = 0u128;
            while (b.count_ones() as usize) < k {
                b |= 1u128 << rng.gen_range(0..n);
            }
            b
        }
    };
    if bits == 0 {
        return PointSet::from_points(plane, &[0]).unwrap();
    }
    PointSet::from_bits(plane, bits).unwrap()
}

/// Canonize at least `trials` random images of random sets and check that
/// each agrees with its preimage. Returns the number of collineations tried.
pub fn check_invariance(q: u32, trials: usize, rng: &mut impl Rng) -> usize {
    let plane = ProjectivePlane::build_default(q).unwrap();
    let mut done = 0;
    while done < trials {
        let set = random_set(&plane, rng);
        let base = canonize(&plane, &set, false).unwrap();
        assert_eq!(base.transform.apply_bits(&plane, set.bits()), base.key.bits());
        for _ in 0..50 {
            let g = random_collineation(&plane, rng);
            let image = g.apply_set(&plane, &set).unwrap();
            let c = canonize(&plane, &image, false).unwrap();
            assert_eq!(c.key, base.key, "q={q}: {:032x} and its image differ", set.bits());
            assert_eq!(c.stabilizer_order, base.stabilizer_order);
            done += 1;
        }
    }
    done
}
