//! Classification of semiovals: orderly generation of admissible sets up to a
//! threshold size, then backtracking extension of each threshold-size class.

pub mod backtrack;
pub mod checkpoint;
pub mod orderly;
pub mod pointset;

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{lex_cmp, CanonicalKey};
use crate::group::GroupError;
use crate::plane::ProjectivePlane;
use crate::report::ClassificationRecord;
use backtrack::{Budget, SeedOutcome, Target};
use checkpoint::{Checkpoint, CheckpointError, CheckpointHeader, SeedEntry};
use orderly::OrderlyTree;
use pointset::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every semioval.
    #[default]
    All,
    /// Blocking semiovals only.
    Blocking,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Mode::All),
            "blocking" => Ok(Mode::Blocking),
            other => Err(format!("unknown mode {other:?} (expected all or blocking)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::All => "all",
            Mode::Blocking => "blocking",
        })
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("plane of order {found} does not match configured order {expected}")]
    PlaneMismatch { expected: u32, found: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub q: u32,
    pub size_min: usize,
    pub size_max: usize,
    /// Orderly-phase depth; `None` means `q + 1`.
    pub threshold: Option<usize>,
    pub mode: Mode,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
    /// Restrict the backtracking phase to these seed indices.
    pub seed_filter: Option<BTreeSet<usize>>,
    /// Stop after roughly this many backtracking nodes.
    pub node_budget: Option<u64>,
}

impl SearchConfig {
    pub fn new(q: u32, size_min: usize, size_max: usize) -> Self {
        SearchConfig {
            q,
            size_min,
            size_max,
            threshold: None,
            mode: Mode::All,
            workers: 0,
            seed_filter: None,
            node_budget: None,
        }
    }

    /// Smallest and largest possible semioval sizes, `q+1` and `⌊q√q⌋+1`.
    pub fn size_bounds(q: u32) -> (usize, usize) {
        let q = q as usize;
        let mut r = 0;
        while (r + 1) * (r + 1) <= q * q * q {
            r += 1;
        }
        (q + 1, r + 1)
    }

    /// Clamp the window to the possible sizes and settle the threshold.
    pub fn normalized(&self) -> Result<NormalizedConfig, SearchError> {
        if !crate::galois::SUPPORTED_ORDERS.contains(&self.q) {
            return Err(SearchError::Config(format!("unsupported plane order {}", self.q)));
        }
        if self.size_min > self.size_max {
            return Err(SearchError::Config(format!("empty size range {}..{}", self.size_min, self.size_max)));
        }
        let (lo, hi) = Self::size_bounds(self.q);
        let size_min = self.size_min.max(lo);
        let size_max = self.size_max.min(hi);
        if size_min != self.size_min || size_max != self.size_max {
            log::warn!(
                "size range {}..{} clamped to the possible semioval sizes {lo}..{hi}",
                self.size_min,
                self.size_max
            );
        }
        let threshold = self.threshold.unwrap_or(self.q as usize + 1);
        if threshold == 0 {
            return Err(SearchError::Config("threshold must be at least 1".into()));
        }
        let threshold = if size_min <= size_max && threshold > size_max {
            log::warn!("threshold {threshold} lowered to the largest target size {size_max}");
            size_max
        } else {
            threshold
        };
        Ok(NormalizedConfig { size_min, size_max, threshold, empty: size_min > size_max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizedConfig {
    pub size_min: usize,
    pub size_max: usize,
    pub threshold: usize,
    /// The window holds no possible semioval size.
    pub empty: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    /// Sorted by size, then canonical representative.
    pub records: Vec<ClassificationRecord>,
    pub status: Status,
    pub window: NormalizedConfig,
    /// Backtracking nodes over all completed seeds, including resumed ones.
    pub nodes: u64,
    /// Admissible class counts for sizes `1..=threshold`.
    pub orderly_counts: Vec<usize>,
    pub seeds_total: usize,
    pub seeds_done: usize,
}

/// How to persist completed seeds.
#[derive(Debug, Clone)]
pub enum CheckpointTarget {
    Create(PathBuf),
    Resume(PathBuf),
}

/// Three non-concurrent lines without their three pairwise intersections.
pub fn vertexless_triangle(plane: &ProjectivePlane) -> Result<PointSet, SearchError> {
    if plane.order() <= 2 {
        return Err(SearchError::Config("the vertexless triangle needs q > 2".into()));
    }
    let axes = [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|v| plane.index_of(v).expect("axis point"));
    // Line i has the same coordinates as point i.
    let union = axes.iter().fold(0u128, |acc, &l| acc | plane.line_bits(l));
    let vertices = axes.iter().fold(0u128, |acc, &p| acc | 1u128 << p);
    Ok(PointSet::from_bits(plane, union & !vertices).expect("in range"))
}

pub fn orderly_phase(plane: &ProjectivePlane, config: &SearchConfig) -> Result<OrderlyTree, SearchError> {
    check_plane(plane, config)?;
    let window = config.normalized()?;
    Ok(OrderlyTree::build(plane, window.threshold))
}

fn check_plane(plane: &ProjectivePlane, config: &SearchConfig) -> Result<(), SearchError> {
    if plane.order() != config.q as usize {
        return Err(SearchError::PlaneMismatch { expected: config.q, found: plane.order() });
    }
    Ok(())
}

pub fn classify(plane: &ProjectivePlane, config: &SearchConfig) -> Result<ClassifyOutcome, SearchError> {
    classify_with_checkpoint(plane, config, None)
}

pub fn classify_with_checkpoint(
    plane: &ProjectivePlane,
    config: &SearchConfig,
    checkpoint: Option<&CheckpointTarget>,
) -> Result<ClassifyOutcome, SearchError> {
    check_plane(plane, config)?;
    let window = config.normalized()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))?;
    pool.install(|| run(plane, config, window, checkpoint))
}

fn run(
    plane: &ProjectivePlane,
    config: &SearchConfig,
    window: NormalizedConfig,
    checkpoint: Option<&CheckpointTarget>,
) -> Result<ClassifyOutcome, SearchError> {
    if window.empty {
        log::warn!("no semioval sizes in the requested range");
        return Ok(ClassifyOutcome {
            records: Vec::new(),
            status: Status::Complete,
            window,
            nodes: 0,
            orderly_counts: Vec::new(),
            seeds_total: 0,
            seeds_done: 0,
        });
    }
    let tree = OrderlyTree::build(plane, window.threshold);
    let h = window.threshold;
    let keep = |set: &PointSet| {
        set.is_semioval().unwrap_or(false) && (config.mode == Mode::All || set.is_blocking_semioval().unwrap_or(false))
    };

    let mut found: HashSet<u128> = HashSet::new();
    for size in window.size_min..=window.size_max.min(h) {
        found.extend(tree.level(size).iter().map(|k| (k, k.to_set(plane))).filter(|(_, s)| keep(s)).map(|(k, _)| k.bits()));
    }

    let seeds = tree.seeds();
    let mut status = Status::Complete;
    let mut nodes = 0u64;
    let mut seeds_done = 0usize;
    let wanted: Vec<usize> = (0..seeds.len())
        .filter(|i| config.seed_filter.as_ref().is_none_or(|f| f.contains(i)))
        .collect();
    if window.size_max > h {
        let cp = match checkpoint {
            None => None,
            Some(target) => {
                let header = CheckpointHeader {
                    format: checkpoint::FORMAT.into(),
                    q: config.q,
                    field_poly: plane.field().spec().coefficients_string(),
                    size_min: window.size_min,
                    size_max: window.size_max,
                    threshold: h,
                    mode: config.mode,
                    seeds: seeds.len(),
                };
                Some(match target {
                    CheckpointTarget::Create(p) => Checkpoint::create(p, &header)?,
                    CheckpointTarget::Resume(p) => Checkpoint::resume(p, &header)?,
                })
            }
        };
        let mut todo = Vec::new();
        for &i in &wanted {
            match cp.as_ref().and_then(|c| c.completed().get(&i)) {
                Some(entry) => {
                    if entry.key != seeds[i].hex() {
                        return Err(SearchError::Config(format!(
                            "checkpoint seed {i} has key {} but this run has {}",
                            entry.key,
                            seeds[i].hex()
                        )));
                    }
                    for text in &entry.found {
                        let bits = checkpoint::parse_hex(text).ok_or_else(|| {
                            SearchError::Config(format!("checkpoint seed {i}: bad key {text:?}"))
                        })?;
                        found.insert(bits);
                    }
                    nodes += entry.nodes;
                    seeds_done += 1;
                }
                None => todo.push(i),
            }
        }
        log::info!("{} seeds of size {h}, {} to search", seeds.len(), todo.len());
        let budget = Budget::new(config.node_budget);
        let target = Target { size_min: window.size_min, size_max: window.size_max, mode: config.mode };
        let results: Vec<Result<(usize, SeedOutcome), SearchError>> = todo
            .par_iter()
            .filter_map(|&i| {
                if budget.is_exhausted() {
                    return None;
                }
                let out = backtrack::backtrack_extend(plane, &tree, i, target, &budget).ok()?;
                if let Some(cp) = &cp {
                    let entry = SeedEntry {
                        seed: i,
                        key: seeds[i].hex(),
                        found: out.found.iter().map(|b| format!("{b:032x}")).collect(),
                        nodes: out.nodes,
                    };
                    if let Err(e) = cp.append(&entry) {
                        return Some(Err(e.into()));
                    }
                }
                Some(Ok((i, out)))
            })
            .collect();
        for r in results {
            let (_, out) = r?;
            found.extend(out.found);
            nodes += out.nodes;
            seeds_done += 1;
        }
        if seeds_done < wanted.len() {
            status = Status::BudgetExhausted;
        }
    } else {
        seeds_done = wanted.len();
    }

    let mut keys: Vec<u128> = found.into_iter().collect();
    keys.sort_unstable_by(|a, b| a.count_ones().cmp(&b.count_ones()).then_with(|| lex_cmp(*a, *b)));
    let records = keys
        .par_iter()
        .map(|&b| {
            let key = CanonicalKey::from_canonical_bits(plane, b).expect("in range");
            ClassificationRecord::from_key(plane, &key)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ClassifyOutcome {
        records,
        status,
        window,
        nodes,
        orderly_counts: tree.counts(),
        seeds_total: seeds.len(),
        seeds_done,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_bounds() {
        assert_eq!(SearchConfig::size_bounds(8), (9, 23));
        assert_eq!(SearchConfig::size_bounds(9), (10, 28));
        assert_eq!(SearchConfig::size_bounds(3), (4, 6));
        assert_eq!(SearchConfig::size_bounds(4), (5, 9));
    }

    #[test]
    fn window_is_clamped() {
        let w = SearchConfig::new(8, 2, 40).normalized().unwrap();
        assert_eq!((w.size_min, w.size_max, w.threshold), (9, 23, 9));
        let w = SearchConfig::new(8, 30, 40).normalized().unwrap();
        assert!(w.empty);
        assert!(SearchConfig::new(8, 12, 10).normalized().is_err());
        assert!(SearchConfig::new(6, 7, 10).normalized().is_err());
        let mut c = SearchConfig::new(9, 10, 10);
        c.threshold = Some(12);
        assert_eq!(c.normalized().unwrap().threshold, 10);
        c.threshold = Some(0);
        assert!(c.normalized().is_err());
    }

    #[test]
    fn vertexless_triangles() {
        for (q, size) in [(3, 6), (4, 9), (8, 21), (9, 24)] {
            let plane = ProjectivePlane::build_default(q).unwrap();
            let t = vertexless_triangle(&plane).unwrap();
            assert_eq!(t.len(), size);
            assert!(t.is_semioval().unwrap());
            assert!(t.is_blocking_semioval().unwrap());
        }
        let fano = ProjectivePlane::build_default(2).unwrap();
        assert!(vertexless_triangle(&fano).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("blocking".parse::<Mode>().unwrap(), Mode::Blocking);
        assert_eq!(Mode::All.to_string(), "all");
        assert!("some".parse::<Mode>().is_err());
    }
}
