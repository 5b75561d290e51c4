//! Invariance of canonical forms under random collineations, and the
//! stabilizer data attached to them.

mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semioval::canon::{automorphisms_found, canonical_form};
use semioval::group::{self, group_order};
use semioval::search::vertexless_triangle;
use semioval::{PointSet, ProjectivePlane};

const ORDERS: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

#[test]
fn canonical_form_is_invariant_under_random_collineations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e3107a1);
    for q in ORDERS {
        assert!(check_invariance(q, 10_000, &mut rng) >= 10_000);
    }
}

#[test]
fn automorphisms_fix_the_set_and_close_to_the_stabilizer() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for q in ORDERS {
        let plane = ProjectivePlane::build_default(q).unwrap();
        let order = group_order(q).unwrap();
        for _ in 0..40 {
            let set = random_set(&plane, &mut rng);
            let stab = group::set_stabilizer(&plane, &set).unwrap();
            assert_eq!(order % stab.order, 0);
            for g in automorphisms_found(&plane, &set).unwrap().iter().chain(&stab.generators) {
                assert_eq!(g.apply_bits(set.bits()), set.bits());
            }
            if stab.order <= 2000 {
                let perms: Vec<Vec<u8>> = stab.generators.iter().map(|g| g.perm().to_vec()).collect();
                let closed = group::closure(&perms, plane.num_points(), 2000).unwrap();
                assert_eq!(closed.len() as u64, stab.order, "q={q}: {:032x}", set.bits());
            }
        }
    }
}

fn conic(plane: &ProjectivePlane) -> PointSet {
    let f = plane.field();
    let pts: Vec<usize> = (0..plane.num_points())
        .filter(|&p| {
            let [x, y, z] = plane.point(p);
            f.mul(x, z) == f.mul(y, y)
        })
        .collect();
    PointSet::from_points(plane, &pts).unwrap()
}

#[test]
fn conic_orbit_in_pg29() {
    let plane = ProjectivePlane::build_default(9).unwrap();
    let c = conic(&plane);
    assert_eq!(c.len(), 10);
    let stab = group::set_stabilizer(&plane, &c).unwrap();
    assert_eq!(stab.order, 1440);
    let orbit = group::enumerate_orbit(&group::pgamma_generators(&plane), c.bits());
    assert_eq!(orbit.len(), 58_968);
    assert_eq!(orbit.len() as u64 * stab.order, group_order(9).unwrap());
}

#[test]
fn vertexless_triangle_orbit_in_pg28() {
    let plane = ProjectivePlane::build_default(8).unwrap();
    let t = vertexless_triangle(&plane).unwrap();
    assert!(t.is_semioval().unwrap());
    let stab = group::set_stabilizer(&plane, &t).unwrap();
    assert_eq!(stab.order, 882);
    let orbit = group::enumerate_orbit(&group::pgamma_generators(&plane), t.bits());
    assert_eq!(orbit.len() as u64 * 882, group_order(8).unwrap());
    let perms: Vec<Vec<u8>> = stab.generators.iter().map(|g| g.perm().to_vec()).collect();
    assert_eq!(group::closure(&perms, plane.num_points(), 2000).unwrap().len(), 882);
}

#[test]
fn all_lines_form_one_class() {
    for q in ORDERS {
        let plane = ProjectivePlane::build_default(q).unwrap();
        let lines: Vec<_> = (0..plane.num_points())
            .map(|l| canonical_form(&plane, &PointSet::line(&plane, l)).unwrap())
            .collect();
        assert!(lines.windows(2).all(|w| w[0] == w[1]));
        let stab = group::set_stabilizer(&plane, &PointSet::line(&plane, 0)).unwrap();
        let n = plane.num_points() as u64;
        assert_eq!(stab.order * n, group_order(q).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn equivalent_sets_share_keys(q_index in 0usize..4, raw in any::<u128>(), seed in any::<u64>()) {
        let q = ORDERS[q_index];
        let plane = ProjectivePlane::build_default(q).unwrap();
        let bits = raw & plane.all_points();
        prop_assume!(bits != 0);
        let set = PointSet::from_bits(&plane, bits).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_collineation(&plane, &mut rng);
        let image = g.apply_set(&plane, &set).unwrap();
        prop_assert_eq!(canonical_form(&plane, &set).unwrap(), canonical_form(&plane, &image).unwrap());
    }

    #[test]
    fn canonical_key_is_a_fixed_point(q_index in 0usize..7, raw in any::<u128>()) {
        let q = ORDERS[q_index];
        let plane = ProjectivePlane::build_default(q).unwrap();
        let bits = raw & plane.all_points();
        prop_assume!(bits != 0);
        let key = canonical_form(&plane, &PointSet::from_bits(&plane, bits).unwrap()).unwrap();
        let again = canonical_form(&plane, &key.to_set(&plane)).unwrap();
        prop_assert_eq!(key.bits(), again.bits());
        prop_assert_eq!(key.len(), bits.count_ones() as usize);
    }
}
