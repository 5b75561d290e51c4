//! Per-class descriptive data, table output and comparison with reference data.

pub mod emit;
pub mod golden;
pub mod labels;
pub mod seven_secant;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::canon::{CanonError, CanonicalKey};
use crate::group::{self, GroupError};
use crate::plane::ProjectivePlane;
use crate::search::pointset::PointSet;

pub use emit::{emit_tables, parse_tables, Format, OutputDocument};
pub use golden::{compare_golden, GoldenError, GoldenTable};
pub use labels::group_structure_label;

/// One equivalence class of semiovals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub size: usize,
    /// Point indices of the canonical representative, ascending.
    pub points: Vec<usize>,
    /// Homogeneous coordinates of `points`, as element labels.
    pub coords: Vec<[u8; 3]>,
    /// `spectrum[i]` = number of `i`-secant lines, `0 ≤ i ≤ q+1`.
    pub spectrum: Vec<u32>,
    pub stabilizer_order: u64,
    pub group_label: String,
    pub blocking: bool,
}

impl ClassificationRecord {
    /// Describe the class with canonical representative `key`.
    pub fn from_key(plane: &ProjectivePlane, key: &CanonicalKey) -> Result<Self, GroupError> {
        let set = key.to_set(plane);
        let stab = group::set_stabilizer(plane, &set)?;
        let label = group_structure_label(plane, stab.order, &stab.generators);
        let rec = ClassificationRecord {
            size: set.len(),
            points: set.points().collect(),
            coords: set.points().map(|p| plane.point(p)).collect(),
            spectrum: set.spectrum(),
            stabilizer_order: stab.order,
            group_label: label,
            blocking: set.is_blocking_semioval().map_err(|e| GroupError::Canon(CanonError::Set(e)))?,
        };
        debug_assert!(rec.check_invariants(plane.order()).is_ok());
        Ok(rec)
    }

    pub fn to_set(&self, plane: &ProjectivePlane) -> Result<PointSet, crate::search::pointset::SetError> {
        PointSet::from_points(plane, &self.points)
    }

    /// Intersection sizes that occur: `{i : ℓᵢ > 0}`.
    pub fn spectrum_support(&self) -> BTreeSet<usize> {
        spectrum_support(&self.spectrum)
    }

    /// Every non-tangent line meets the set in 0 or a single constant number of points.
    pub fn is_regular(&self) -> bool {
        regular_value(&self.spectrum).is_some()
    }

    /// The counting identities every semioval spectrum satisfies.
    pub fn check_invariants(&self, q: usize) -> Result<(), String> {
        let s = &self.spectrum;
        let k = self.size as u64;
        if s.len() != q + 2 {
            return Err(format!("spectrum has {} entries, expected {}", s.len(), q + 2));
        }
        let lines: u64 = s.iter().map(|&x| x as u64).sum();
        let incidences: u64 = s.iter().enumerate().map(|(i, &x)| i as u64 * x as u64).sum();
        let pairs: u64 = s.iter().enumerate().map(|(i, &x)| (i as u64 * i.saturating_sub(1) as u64 / 2) * x as u64).sum();
        let n = (q * q + q + 1) as u64;
        if lines != n {
            return Err(format!("spectrum covers {lines} lines, expected {n}"));
        }
        if incidences != k * (q as u64 + 1) {
            return Err(format!("spectrum has {incidences} incidences, expected {}", k * (q as u64 + 1)));
        }
        if pairs != k * k.saturating_sub(1) / 2 {
            return Err(format!("spectrum covers {pairs} point pairs, expected {}", k * k.saturating_sub(1) / 2));
        }
        if s[1] as u64 != k {
            return Err(format!("{} tangent lines for {k} points", s[1]));
        }
        if self.blocking && (s[0] != 0 || s[q + 1] != 0) {
            return Err("blocking set with an external or full line".into());
        }
        if self.points.len() != self.size || self.coords.len() != self.size {
            return Err("point list length differs from size".into());
        }
        Ok(())
    }
}

pub fn spectrum_support(spectrum: &[u32]) -> BTreeSet<usize> {
    spectrum.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i).collect()
}

/// The constant `a` if the spectrum support minus `{0, 1}` is `{a}`.
pub fn regular_value(spectrum: &[u32]) -> Option<usize> {
    let mut rest = spectrum_support(spectrum).into_iter().filter(|&i| i > 1);
    match (rest.next(), rest.next()) {
        (Some(a), None) => Some(a),
        _ => None,
    }
}

/// Regular semiovals are ovals (`a = 2`, size `q+1`) or unitals
/// (`a = √q+1`, size `q√q+1`). Returns `false` for a regular record that is neither.
pub fn regularity_consistent(record: &ClassificationRecord, q: usize) -> bool {
    let Some(a) = regular_value(&record.spectrum) else {
        return true;
    };
    let oval = record.size == q + 1 && a == 2;
    let r = (1..=3).find(|r| r * r == q);
    let unital = r.is_some_and(|r| record.size == q * r + 1 && a == r + 1);
    oval || unital
}
