//! Naming of small stabilizer groups from certified structural data.
//!
//! Only names determined by the order, commutativity of the generators and
//! the element-order census are produced: cyclic groups `Z_n`, abelian
//! products in invariant-factor form `Z_a x Z_b` (smallest factor first),
//! `S_3`, the dihedral group `D_4` of order 8, and the dicyclic group `Q_6` and
//! alternating group `A_4` of order 12. Everything else is `G_n`.

use std::collections::BTreeMap;

use crate::group::{self, Collineation};
use crate::plane::ProjectivePlane;

/// Groups larger than this are named by order alone.
pub const CENSUS_LIMIT: u64 = 100_000;

pub fn group_structure_label(plane: &ProjectivePlane, order: u64, generators: &[Collineation]) -> String {
    if order == 1 {
        return "Z_1".into();
    }
    let fallback = format!("G_{order}");
    if order > CENSUS_LIMIT {
        return fallback;
    }
    let perms: Vec<Vec<u8>> = generators.iter().map(|g| g.perm().to_vec()).collect();
    let Some(elements) = group::closure(&perms, plane.num_points(), order as usize + 1) else {
        return fallback;
    };
    if elements.len() as u64 != order {
        log::warn!("stabilizer generators span {} elements, expected {order}", elements.len());
        return fallback;
    }
    let mut census: BTreeMap<u64, u64> = BTreeMap::new();
    for e in &elements {
        *census.entry(group::element_order(e)).or_default() += 1;
    }
    let abelian = generators.iter().enumerate().all(|(i, a)| {
        generators[i + 1..].iter().all(|b| a.compose(plane, b).perm() == b.compose(plane, a).perm())
    });
    label_from_census(order, abelian, &census).unwrap_or(fallback)
}

/// `census[d]` = number of elements of order `d`.
pub fn label_from_census(order: u64, abelian: bool, census: &BTreeMap<u64, u64>) -> Option<String> {
    let count = |d: u64| census.get(&d).copied().unwrap_or(0);
    if abelian {
        let factors = abelian_invariants(order, census)?;
        return Some(factors.iter().map(|f| format!("Z_{f}")).collect::<Vec<_>>().join("x"));
    }
    match order {
        6 => Some("S_3".into()),
        8 if count(2) == 5 => Some("D_4".into()),
        12 if count(2) == 1 && count(3) == 2 && count(4) == 6 && count(6) == 2 => Some("Q_6".into()),
        12 if count(2) == 3 && count(3) == 8 => Some("A_4".into()),
        _ => None,
    }
}

/// Invariant factors `d₁ | d₂ | …` of an abelian group from its element orders.
fn abelian_invariants(order: u64, census: &BTreeMap<u64, u64>) -> Option<Vec<u64>> {
    let mut n = order;
    let mut primes = Vec::new();
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            primes.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    // For each prime, the elementary divisor exponents as a partition.
    let mut factors: Vec<u64> = Vec::new();
    for p in primes {
        let mut pk = 1u64;
        let mut exps_at_least: Vec<u32> = Vec::new();
        let mut prev_log = 0u32;
        loop {
            pk *= p;
            // Number of elements killed by p^k in the p-part equals p^{Σ min(k, eᵢ)}.
            let killed: u64 = census.iter().filter(|(&d, _)| pk.is_multiple_of(d)).map(|(_, &c)| c).sum();
            let log = ilog(killed, p)?;
            if log == prev_log {
                break;
            }
            exps_at_least.push(log - prev_log);
            prev_log = log;
        }
        // exps_at_least[k] = number of cyclic factors of order ≥ p^{k+1}.
        let mut parts = Vec::new();
        for (k, &m) in exps_at_least.iter().enumerate() {
            let next = exps_at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..m - next {
                parts.push(p.pow(k as u32 + 1));
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        for (i, part) in parts.into_iter().enumerate() {
            if i < factors.len() {
                factors[i] *= part;
            } else {
                factors.push(part);
            }
        }
    }
    if factors.iter().product::<u64>() != order {
        return None;
    }
    factors.sort_unstable();
    Some(factors)
}

fn ilog(mut x: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        k += 1;
    }
    Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn abelian_names() {
        assert_eq!(label_from_census(4, true, &census(&[(1, 1), (2, 3)])).unwrap(), "Z_2xZ_2");
        assert_eq!(label_from_census(4, true, &census(&[(1, 1), (2, 1), (4, 2)])).unwrap(), "Z_4");
        assert_eq!(label_from_census(6, true, &census(&[(1, 1), (2, 1), (3, 2), (6, 2)])).unwrap(), "Z_6");
        assert_eq!(label_from_census(8, true, &census(&[(1, 1), (2, 3), (4, 4)])).unwrap(), "Z_2xZ_4");
        assert_eq!(label_from_census(9, true, &census(&[(1, 1), (3, 8)])).unwrap(), "Z_3xZ_3");
        assert_eq!(label_from_census(12, true, &census(&[(1, 1), (2, 1), (3, 2), (4, 2), (6, 2), (12, 4)])).unwrap(), "Z_12");
    }

    #[test]
    fn non_abelian_names() {
        assert_eq!(label_from_census(6, false, &census(&[(1, 1), (2, 3), (3, 2)])).unwrap(), "S_3");
        assert_eq!(label_from_census(8, false, &census(&[(1, 1), (2, 5), (4, 2)])).unwrap(), "D_4");
        // quaternion group: one involution
        assert_eq!(label_from_census(8, false, &census(&[(1, 1), (2, 1), (4, 6)])), None);
        assert_eq!(label_from_census(12, false, &census(&[(1, 1), (2, 1), (3, 2), (4, 6), (6, 2)])).unwrap(), "Q_6");
        assert_eq!(label_from_census(12, false, &census(&[(1, 1), (2, 3), (3, 8)])).unwrap(), "A_4");
        // dihedral group of order 12
        assert_eq!(label_from_census(12, false, &census(&[(1, 1), (2, 7), (3, 2), (6, 2)])), None);
    }

    #[test]
    fn labels_of_real_stabilizers() {
        let plane = ProjectivePlane::build_default(3).unwrap();
        let set = crate::PointSet::from_points(&plane, &[0]).unwrap();
        let stab = group::set_stabilizer(&plane, &set).unwrap();
        assert_eq!(stab.order, 432);
        assert_eq!(group_structure_label(&plane, stab.order, &stab.generators), "G_432");
        let full = crate::PointSet::from_bits(&plane, plane.all_points()).unwrap();
        let stab = group::set_stabilizer(&plane, &full).unwrap();
        assert_eq!(group_structure_label(&plane, stab.order, &stab.generators), "G_5616");
    }
}
