//! Exhaustive classification of semiovals in the Desarguesian planes PG(2,q).

pub mod canon;
pub mod galois;
pub mod group;
pub mod plane;
pub mod report;
pub mod search;

pub use canon::{canonical_form, canonize, CanonError, CanonicalKey, Canonization};
pub use galois::{FieldError, FieldSpec, FieldTables};
pub use group::{Collineation, GroupError, Semilinear};
pub use plane::{PlaneError, ProjectivePlane};
pub use report::ClassificationRecord;
pub use search::{classify, Mode, SearchConfig, SearchError};
pub use search::pointset::{PointSet, SetError};
