//! Level-by-level generation of one representative per class of admissible sets.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::canon::{self, lex_cmp, CanonicalKey};
use crate::plane::ProjectivePlane;
use crate::search::pointset::PointSet;

/// Marks an inadmissible child in [`OrderlyTree::child_class`].
pub const NO_CLASS: u32 = u32::MAX;

/// Representatives of all admissible classes of sizes `1..=depth`.
#[derive(Debug, Clone)]
pub struct OrderlyTree {
    /// `levels[k]` holds the sorted representatives of size `k + 1`.
    levels: Vec<Vec<CanonicalKey>>,
    /// For each representative `r` of size `depth − 1` and each point `x ∉ r`,
    /// the index in the top level of the class of `r ∪ {x}`, row-major by `r`.
    child_class: Vec<u32>,
    n: usize,
}

impl OrderlyTree {
    pub fn build(plane: &ProjectivePlane, depth: usize) -> Self {
        assert!(depth >= 1, "orderly depth must be positive");
        let n = plane.num_points();
        let first = canon::canonical_form(plane, &PointSet::from_points(plane, &[0]).expect("point 0"))
            .expect("non-empty");
        let mut levels = vec![vec![first]];
        let mut child_class = Vec::new();
        for size in 2..=depth {
            let parents = levels.last().expect("non-empty");
            // Canonical bits of every admissible child, per parent.
            let children: Vec<Vec<Option<u128>>> = parents
                .par_iter()
                .map(|key| {
                    let mut set = key.to_set(plane);
                    (0..n)
                        .map(|x| {
                            if set.contains(x) {
                                return None;
                            }
                            set.insert(plane, x);
                            let out = if set.is_admissible().expect("non-empty") {
                                Some(canon::canonical_form(plane, &set).expect("non-empty").bits())
                            } else {
                                None
                            };
                            set.remove(plane, x);
                            out
                        })
                        .collect()
                })
                .collect();
            let mut distinct: Vec<u128> = children.iter().flatten().flatten().copied().collect();
            distinct.sort_unstable_by(|a, b| lex_cmp(*a, *b));
            distinct.dedup();
            let level: Vec<CanonicalKey> = distinct
                .par_iter()
                .map(|&b| CanonicalKey::from_canonical_bits(plane, b).expect("in range"))
                .collect();
            if size == depth {
                let index: HashMap<u128, u32> = distinct.iter().enumerate().map(|(i, &b)| (b, i as u32)).collect();
                child_class = children
                    .iter()
                    .flat_map(|row| row.iter().map(|c| c.map_or(NO_CLASS, |b| index[&b])))
                    .collect();
            }
            log::debug!("orderly level {size}: {} classes", level.len());
            levels.push(level);
        }
        OrderlyTree { levels, child_class, n }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Sorted representatives of size `size`.
    pub fn level(&self, size: usize) -> &[CanonicalKey] {
        &self.levels[size - 1]
    }

    pub fn seeds(&self) -> &[CanonicalKey] {
        self.levels.last().expect("non-empty")
    }

    /// Class counts for sizes `1..=depth`.
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Top-level class of `parent ∪ {x}`, where `parent` indexes the level below the top.
    pub(crate) fn child_class(&self, parent: usize, x: usize) -> u32 {
        self.child_class[parent * self.n + x]
    }

    /// Index of the representative with canonical bits `bits` in level `size`.
    pub fn position(&self, size: usize, bits: u128) -> Option<usize> {
        self.level(size).binary_search_by(|k| lex_cmp(k.bits(), bits)).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_levels() {
        // PG(2,2): triples are lines or triangles; no four-point set has a
        // tangent at every point.
        let plane = ProjectivePlane::build_default(2).unwrap();
        let tree = OrderlyTree::build(&plane, 4);
        assert_eq!(tree.counts(), [1, 1, 2, 0]);
        for size in 1..=4 {
            for key in tree.level(size) {
                let set = key.to_set(&plane);
                assert!(set.is_admissible().unwrap());
                assert_eq!(canon::canonical_form(&plane, &set).unwrap().bits(), key.bits());
                assert_eq!(tree.position(size, key.bits()).map(|i| tree.level(size)[i].bits()), Some(key.bits()));
            }
        }
    }

    #[test]
    fn child_classes_point_to_top_level() {
        let plane = ProjectivePlane::build_default(3).unwrap();
        let tree = OrderlyTree::build(&plane, 3);
        for (r, key) in tree.level(2).iter().enumerate() {
            let mut set = key.to_set(&plane);
            for x in 0..13 {
                if set.contains(x) {
                    continue;
                }
                set.insert(&plane, x);
                let want = canon::canonical_form(&plane, &set).unwrap().bits();
                let got = tree.child_class(r, x);
                assert_eq!(tree.seeds()[got as usize].bits(), want);
                set.remove(&plane, x);
            }
        }
    }
}
