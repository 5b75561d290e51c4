//! Extension of a single seed to semiovals of the target sizes.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use crate::canon;
use crate::plane::ProjectivePlane;
use crate::search::orderly::{OrderlyTree, NO_CLASS};
use crate::search::pointset::{BitIter, PointSet};
use crate::search::Mode;

/// Shared node counter with an optional cap.
#[derive(Debug, Default)]
pub struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
    exhausted: AtomicBool,
}

impl Budget {
    pub fn new(limit: Option<u64>) -> Self {
        Budget { limit, used: AtomicU64::new(0), exhausted: AtomicBool::new(false) }
    }

    /// Add `nodes`; returns `false` once the cap is exceeded.
    pub fn charge(&self, nodes: u64) -> bool {
        let total = self.used.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if self.limit.is_some_and(|l| total > l) {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.is_exhausted()
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Aborted;

/// Semiovals found below one seed, as sorted canonical bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedOutcome {
    pub found: Vec<u128>,
    pub nodes: u64,
}

/// Window of sizes and kind of set to report.
#[derive(Debug, Clone, Copy)]
pub struct Target {
    pub size_min: usize,
    pub size_max: usize,
    pub mode: Mode,
}

const FLUSH_EVERY: u64 = 1 << 12;

/// Points that may be added to seed `index`.
///
/// A point `x` is dropped when `seed ∪ {x}` is not admissible, or when
/// `seed ∪ {x} \ {y}` lies in the class of an earlier seed for some `y` in the
/// seed: every superset of such a set also contains a copy of that earlier
/// seed, and the earliest seed a set contains never excludes its points.
pub fn allowed_points(plane: &ProjectivePlane, tree: &OrderlyTree, index: usize) -> u128 {
    let seed = tree.seeds()[index].to_set(plane);
    let mut allowed = plane.all_points() & !seed.bits();
    let h = seed.len();
    if h < 2 {
        return allowed;
    }
    for y in seed.points() {
        let mut rest = seed.clone();
        rest.remove(plane, y);
        let c = canon::canonize(plane, &rest, false).expect("non-empty");
        let parent = tree.position(h - 1, c.key.bits()).expect("subsets of admissible sets are admissible");
        for x in BitIter(allowed) {
            let class = tree.child_class(parent, c.transform.apply_point(plane, x));
            if class == NO_CLASS || (class as usize) < index {
                allowed &= !(1u128 << x);
            }
        }
    }
    allowed
}

struct Walker<'a> {
    plane: &'a ProjectivePlane,
    target: Target,
    budget: &'a Budget,
    emit_above: usize,
    found: HashSet<u128>,
    nodes: u64,
    pending: u64,
}

impl Walker<'_> {
    fn visit(&mut self, set: &mut PointSet, avail: u128) -> Result<(), Aborted> {
        self.nodes += 1;
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            let ok = self.budget.charge(self.pending);
            self.pending = 0;
            if !ok {
                return Err(Aborted);
            }
        }
        let plane = self.plane;
        let k = set.len();
        let slots = self.target.size_max - k;

        let mut blocked = 0u128;
        let mut semioval = true;
        for p in set.points() {
            if set.tangents_at(p) == 1 {
                let l = plane.lines_through(p).iter().find(|&&l| set.line_count(l as usize) == 1).expect("tangent");
                blocked |= plane.line_bits(*l as usize);
            } else {
                semioval = false;
            }
        }
        if semioval && k > self.emit_above && k >= self.target.size_min {
            let keep = match self.target.mode {
                Mode::All => true,
                Mode::Blocking => set.is_blocking_semioval().expect("non-empty"),
            };
            if keep {
                self.found.insert(canon::canonical_form(plane, set).expect("non-empty").bits());
            }
        }
        if slots == 0 {
            return Ok(());
        }
        let cand = avail & !blocked;
        if cand == 0 {
            return Ok(());
        }
        // Each added point removes at most one tangent through a given point,
        // and only along a tangent that still has a candidate on it.
        for p in set.points() {
            let t = set.tangents_at(p);
            if t >= 2 {
                if t - 1 > slots {
                    return Ok(());
                }
                let live = plane
                    .lines_through(p)
                    .iter()
                    .filter(|&&l| set.line_count(l as usize) == 1 && plane.line_bits(l as usize) & cand != 0)
                    .count();
                if live < t - 1 {
                    return Ok(());
                }
            }
        }
        if self.target.mode == Mode::Blocking {
            let q = plane.order();
            for l in 0..plane.num_points() {
                let c = set.line_count(l);
                if c > q || c == 0 && plane.line_bits(l) & cand == 0 {
                    return Ok(());
                }
            }
        }
        for x in BitIter(cand) {
            set.insert(plane, x);
            if set.tangents_at(x) >= 1 {
                let above = if x + 1 >= 128 { 0 } else { cand & !((1u128 << (x + 1)) - 1) };
                let r = self.visit(set, above);
                if r.is_err() {
                    set.remove(plane, x);
                    return r;
                }
            }
            set.remove(plane, x);
        }
        Ok(())
    }
}

/// Enumerate semiovals in the target window that contain seed `index` and
/// otherwise only allowed points, added in increasing index order.
pub fn backtrack_extend(
    plane: &ProjectivePlane,
    tree: &OrderlyTree,
    index: usize,
    target: Target,
    budget: &Budget,
) -> Result<SeedOutcome, Aborted> {
    let allowed = allowed_points(plane, tree, index);
    let mut set = tree.seeds()[index].to_set(plane);
    let mut walker =
        Walker { plane, target, budget, emit_above: set.len(), found: HashSet::new(), nodes: 0, pending: 0 };
    walker.visit(&mut set, allowed)?;
    // The seed is finished; the cap only stops work not yet done.
    budget.charge(walker.pending);
    let mut found: Vec<u128> = walker.found.into_iter().collect();
    found.sort_unstable_by(|a, b| canon::lex_cmp(*a, *b));
    Ok(SeedOutcome { found, nodes: walker.nodes })
}
