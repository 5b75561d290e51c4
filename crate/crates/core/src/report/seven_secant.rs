//! Verification of four published 20-point semiovals of PG(2,8) that have a
//! 7-secant line.
//!
//! The coordinates are small integers naming elements of GF(8), and the
//! naming convention is not stated alongside them. The verifier therefore
//! tries a family of conventions: the digit encoding over each of the two
//! irreducible cubics with every ordering of the three bits, and the power
//! encoding `0 ↦ 0, i ↦ ωⁱ⁻¹` for every primitive `ω`. It reports, for each
//! convention, which of the sets come out as semiovals with the listed
//! spectrum and stabilizer order.

use std::fmt;

use crate::galois::{FieldError, FieldSpec, FieldTables};
use crate::group::{self, GroupError};
use crate::plane::{PlaneError, ProjectivePlane};
use crate::search::pointset::PointSet;

/// A published set: columns are homogeneous coordinates.
#[derive(Debug, Clone)]
pub struct ListedSet {
    pub rows: [[u8; 20]; 3],
    /// `ℓ₀ … ℓ₇`; the remaining entries are zero.
    pub spectrum: [u32; 8],
    pub stabilizer_order: u64,
    pub group_label: &'static str,
}

impl ListedSet {
    pub fn columns(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        (0..20).map(|j| [self.rows[0][j], self.rows[1][j], self.rows[2][j]])
    }
}

pub const LISTED_SETS: [ListedSet; 4] = [
    ListedSet {
        rows: [
            [1, 0, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            [0, 1, 0, 1, 1, 1, 0, 0, 1, 1, 3, 4, 5, 5, 5, 5, 5, 5, 6, 7],
            [0, 0, 1, 1, 2, 3, 3, 4, 2, 3, 3, 3, 0, 1, 2, 4, 5, 7, 7, 3],
        ],
        spectrum: [0, 20, 19, 19, 13, 0, 1, 1],
        stabilizer_order: 1,
        group_label: "Z_1",
    },
    ListedSet {
        rows: [
            [1, 0, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            [0, 1, 0, 1, 1, 1, 0, 1, 1, 3, 4, 5, 5, 5, 5, 5, 5, 6, 7, 7],
            [0, 0, 1, 1, 2, 3, 3, 2, 3, 3, 3, 0, 1, 2, 4, 5, 7, 7, 1, 3],
        ],
        spectrum: [0, 20, 18, 22, 10, 1, 1, 1],
        stabilizer_order: 1,
        group_label: "Z_1",
    },
    ListedSet {
        rows: [
            [1, 0, 0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            [0, 1, 0, 1, 1, 1, 0, 0, 1, 3, 4, 4, 5, 5, 5, 5, 5, 5, 6, 7],
            [0, 0, 1, 1, 2, 3, 3, 4, 3, 3, 3, 7, 0, 1, 2, 4, 5, 7, 7, 3],
        ],
        spectrum: [0, 20, 19, 19, 13, 0, 1, 1],
        stabilizer_order: 3,
        group_label: "Z_3",
    },
    ListedSet {
        rows: [
            [1, 0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            [0, 1, 0, 1, 1, 0, 1, 2, 3, 3, 5, 5, 5, 5, 5, 5, 6, 6, 7, 7],
            [0, 0, 1, 1, 2, 3, 2, 4, 3, 4, 0, 1, 2, 4, 5, 7, 2, 7, 1, 3],
        ],
        spectrum: [0, 20, 19, 19, 13, 0, 1, 1],
        stabilizer_order: 3,
        group_label: "Z_3",
    },
];

/// A naming convention for the elements of GF(8).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeling {
    /// Label `n` with bits `b₀b₁b₂` is `Σ b_{order[i]} xⁱ` modulo the cubic
    /// with coefficients `poly` (constant term first).
    Digits { poly: [u32; 4], order: [usize; 3] },
    /// Label `0` is zero and label `i ≥ 1` is `ω^{i−1}`, with `ω` given by its
    /// digit label over `x³ + x + 1`.
    Powers { primitive: u8 },
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Labeling::Digits { poly, order } => {
                let p = FieldSpec::new(8, poly).map(|s| s.poly_string()).unwrap_or_default();
                write!(f, "digits over {p}, bit order {order:?}")
            }
            Labeling::Powers { primitive } => {
                let t = FieldTables::build_default(8).expect("GF(8)");
                let w = *primitive;
                let other_root = t.add(t.add(t.pow(w, 3), t.pow(w, 2)), 1) == 0;
                let minimal = if other_root { "x^3+x^2+1" } else { "x^3+x+1" };
                write!(f, "powers of w = digit label {w} over x^3+x+1 (a root of {minimal})")
            }
        }
    }
}

const CUBICS: [[u32; 4]; 2] = [[1, 1, 0, 1], [1, 0, 1, 1]];
const BIT_ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

impl Labeling {
    pub fn all() -> Vec<Labeling> {
        let mut out = Vec::new();
        for poly in CUBICS {
            for order in BIT_ORDERS {
                out.push(Labeling::Digits { poly, order });
            }
        }
        let f = FieldTables::build_default(8).expect("GF(8)");
        for w in 2..8u8 {
            if (1..7).all(|e| f.pow(w, e) != 1) {
                out.push(Labeling::Powers { primitive: w });
            }
        }
        out
    }

    fn field_poly(&self) -> [u32; 4] {
        match self {
            Labeling::Digits { poly, .. } => *poly,
            Labeling::Powers { .. } => CUBICS[0],
        }
    }

    /// The plane whose element labels this convention maps into.
    pub fn plane(&self) -> Result<ProjectivePlane, PlaneError> {
        let spec = FieldSpec::new(8, &self.field_poly()).map_err(PlaneError::Field)?;
        ProjectivePlane::build(FieldTables::build(spec).map_err(PlaneError::Field)?)
    }

    /// Element of `field` (built by [`Labeling::plane`]) named by `label`.
    pub fn element(&self, field: &FieldTables, label: u8) -> Result<u8, FieldError> {
        if label >= 8 {
            return Err(FieldError::ElementOutOfRange { x: label as u32, q: 8 });
        }
        Ok(match self {
            Labeling::Digits { order, .. } => {
                (0..3).map(|i| ((label >> order[i]) & 1) << i).sum()
            }
            Labeling::Powers { primitive } => {
                if label == 0 {
                    0
                } else {
                    field.pow(*primitive, label as u32 - 1)
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCheck {
    /// Distinct points after translating the columns.
    pub points: usize,
    pub semioval: bool,
    pub spectrum: Vec<u32>,
    pub spectrum_ok: bool,
    pub stabilizer_order: u64,
    pub stabilizer_ok: bool,
}

impl SetCheck {
    pub fn passes(&self) -> bool {
        self.points == 20 && self.semioval && self.spectrum_ok && self.stabilizer_ok
    }
}

#[derive(Debug, Clone)]
pub struct LabelingReport {
    pub labeling: Labeling,
    pub sets: Vec<SetCheck>,
}

impl LabelingReport {
    pub fn validates(&self) -> bool {
        self.sets.iter().all(SetCheck::passes)
    }
}

#[derive(Debug, Clone)]
pub struct SevenSecantReport {
    pub labelings: Vec<LabelingReport>,
}

impl SevenSecantReport {
    pub fn validating(&self) -> Vec<&LabelingReport> {
        self.labelings.iter().filter(|r| r.validates()).collect()
    }
}

impl fmt::Display for SevenSecantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.labelings {
            let marks: Vec<&str> = r.sets.iter().map(|s| if s.passes() { "pass" } else { "fail" }).collect();
            writeln!(f, "{}: {}", r.labeling, marks.join(" "))?;
        }
        let ok = self.validating();
        if ok.is_empty() {
            writeln!(f, "no labeling among the {} tried validates all four sets", self.labelings.len())
        } else {
            for r in ok {
                writeln!(f, "validated by: {}", r.labeling)?;
            }
            Ok(())
        }
    }
}

/// Translate listed coordinates into points of `plane` under `labeling`.
pub fn translate(plane: &ProjectivePlane, labeling: &Labeling, set: &ListedSet) -> Result<PointSet, PlaneError> {
    let f = plane.field();
    let mut pts = Vec::with_capacity(20);
    for col in set.columns() {
        let mut v = [0u32; 3];
        for (i, &c) in col.iter().enumerate() {
            v[i] = labeling.element(f, c).map_err(PlaneError::Field)? as u32;
        }
        pts.push(plane.point_from_coords(&v)?);
    }
    Ok(PointSet::from_points(plane, &pts).expect("points are in range"))
}

/// A translation failure (zero column, point off the plane) is reported as a failed check.
pub fn check_set(plane: &ProjectivePlane, labeling: &Labeling, set: &ListedSet) -> Result<SetCheck, GroupError> {
    let Ok(s) = translate(plane, labeling, set) else {
        return Ok(SetCheck {
            points: 0,
            semioval: false,
            spectrum: Vec::new(),
            spectrum_ok: false,
            stabilizer_order: 0,
            stabilizer_ok: false,
        });
    };
    let spectrum = s.spectrum();
    let spectrum_ok = spectrum[..8] == set.spectrum && spectrum[8..].iter().all(|&c| c == 0);
    let stabilizer_order = group::set_stabilizer(plane, &s)?.order;
    Ok(SetCheck {
        points: s.len(),
        semioval: s.is_semioval().unwrap_or(false),
        spectrum,
        spectrum_ok,
        stabilizer_order,
        stabilizer_ok: stabilizer_order == set.stabilizer_order,
    })
}

pub fn verify_seven_secant_sets() -> Result<SevenSecantReport, GroupError> {
    let mut labelings = Vec::new();
    for labeling in Labeling::all() {
        let plane = labeling.plane().expect("both cubics are irreducible");
        let sets = LISTED_SETS.iter().map(|s| check_set(&plane, &labeling, s)).collect::<Result<_, _>>()?;
        labelings.push(LabelingReport { labeling, sets });
    }
    Ok(SevenSecantReport { labelings })
}
