//! End-to-end behaviour of the classifier: independence from the threshold,
//! worker count and seed scheduling, budgets and checkpoints.

use std::collections::BTreeSet;

use semioval::search::{classify_with_checkpoint, CheckpointTarget, Mode, Status};
use semioval::{classify, ClassificationRecord, ProjectivePlane, SearchConfig, SearchError};

fn config(q: u32, a: usize, b: usize) -> SearchConfig {
    SearchConfig::new(q, a, b)
}

fn records(plane: &ProjectivePlane, c: &SearchConfig) -> Vec<ClassificationRecord> {
    let out = classify(plane, c).unwrap();
    assert_eq!(out.status, Status::Complete);
    out.records
}

#[test]
fn threshold_does_not_change_the_result() {
    let plane = ProjectivePlane::build_default(7).unwrap();
    let mut c = config(7, 8, 15);
    let base = records(&plane, &c);
    assert!(!base.is_empty());
    for h in [5, 7, 9] {
        c.threshold = Some(h);
        assert_eq!(records(&plane, &c), base, "threshold {h}");
    }
}

#[test]
fn records_are_sorted_and_distinct() {
    let plane = ProjectivePlane::build_default(7).unwrap();
    let recs = records(&plane, &config(7, 8, 16));
    assert!(recs.windows(2).all(|w| w[0].size <= w[1].size && w[0].points != w[1].points));
    let keys: BTreeSet<_> = recs.iter().map(|r| r.points.clone()).collect();
    assert_eq!(keys.len(), recs.len());
}

#[test]
fn worker_count_and_seed_split_do_not_change_the_result() {
    let plane = ProjectivePlane::build_default(8).unwrap();
    let mut c = config(8, 9, 13);
    c.workers = 1;
    let base = records(&plane, &c);
    c.workers = 3;
    assert_eq!(records(&plane, &c), base);

    let seeds = classify(&plane, &c).unwrap().seeds_total;
    let mut merged = BTreeSet::new();
    for part in 0..3 {
        c.seed_filter = Some((0..seeds).filter(|i| i % 3 == part).collect());
        let out = classify(&plane, &c).unwrap();
        assert_eq!(out.seeds_done, c.seed_filter.as_ref().unwrap().len());
        merged.extend(out.records.into_iter().map(|r| (r.size, r.points)));
    }
    let expected: BTreeSet<_> = base.into_iter().map(|r| (r.size, r.points)).collect();
    assert_eq!(merged, expected);
}

#[test]
fn blocking_mode_keeps_only_blocking_records() {
    let plane = ProjectivePlane::build_default(7).unwrap();
    let all = records(&plane, &config(7, 8, 19));
    let mut c = config(7, 8, 19);
    c.mode = Mode::Blocking;
    let blocking = records(&plane, &c);
    let expected: Vec<_> = all.into_iter().filter(|r| r.blocking).collect();
    assert_eq!(blocking, expected);
}

#[test]
fn size_windows_partition_the_classes() {
    let plane = ProjectivePlane::build_default(7).unwrap();
    let whole = records(&plane, &config(7, 8, 16));
    let mut parts = records(&plane, &config(7, 8, 12));
    parts.extend(records(&plane, &config(7, 13, 16)));
    assert_eq!(parts, whole);
}

#[test]
fn budget_stops_the_search() {
    let plane = ProjectivePlane::build_default(8).unwrap();
    let mut c = config(8, 9, 14);
    c.node_budget = Some(1);
    let out = classify(&plane, &c).unwrap();
    assert_eq!(out.status, Status::BudgetExhausted);
    assert!(out.seeds_done < out.seeds_total);
}

#[test]
fn plane_and_config_must_agree() {
    let plane = ProjectivePlane::build_default(7).unwrap();
    assert!(matches!(classify(&plane, &config(8, 9, 10)), Err(SearchError::PlaneMismatch { .. })));
    assert!(matches!(classify(&plane, &config(7, 12, 10)), Err(SearchError::Config(_))));
    let out = classify(&plane, &config(7, 30, 40)).unwrap();
    assert!(out.records.is_empty() && out.window.empty);
}

#[test]
fn checkpoint_resume_completes_an_interrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ckpt");
    let plane = ProjectivePlane::build_default(8).unwrap();
    let mut c = config(8, 9, 14);
    let full = records(&plane, &c);

    c.node_budget = Some(200_000);
    let first = classify_with_checkpoint(&plane, &c, Some(&CheckpointTarget::Create(path.clone()))).unwrap();
    assert_eq!(first.status, Status::BudgetExhausted);
    assert!(first.seeds_done > 0, "some seeds finish before the budget runs out");

    c.node_budget = None;
    let resumed = classify_with_checkpoint(&plane, &c, Some(&CheckpointTarget::Resume(path.clone()))).unwrap();
    assert_eq!(resumed.status, Status::Complete);
    assert_eq!(resumed.seeds_done, resumed.seeds_total);
    assert_eq!(resumed.records, full);

    // A checkpoint from a different window is rejected.
    let other = config(8, 9, 15);
    assert!(matches!(
        classify_with_checkpoint(&plane, &other, Some(&CheckpointTarget::Resume(path))),
        Err(SearchError::Checkpoint(_))
    ));
}
