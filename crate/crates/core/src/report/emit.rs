//! JSON and CSV output documents.
//!
//! JSON documents are `{"manifest": {...}, "records": [...]}`. CSV documents
//! start with `# ` comment lines, one of which is `# manifest=<json>`, followed
//! by a header row and one row per record; list-valued columns are
//! space-separated and coordinate triples are written `a:b:c`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane::ProjectivePlane;
use crate::report::ClassificationRecord;
use crate::search::{ClassifyOutcome, Mode, SearchConfig, Status};

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV document has no manifest line")]
    MissingManifest,
    #[error("CSV row {row}: bad {column} value {value:?}")]
    BadField { row: usize, column: &'static str, value: String },
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Timing data, the only part of a document that may differ between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub wall_clock_seconds: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub q: u32,
    /// Reduction polynomial coefficients, constant term first.
    pub field_poly: String,
    pub sizes_requested: [usize; 2],
    /// The window after clamping to possible semioval sizes; `None` if empty.
    pub sizes: Option<[usize; 2]>,
    pub threshold: usize,
    pub mode: Mode,
    pub status: Status,
    pub nodes: u64,
    pub orderly_counts: Vec<usize>,
    pub seeds_total: usize,
    pub seeds_done: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_filter: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime: Option<Runtime>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDocument {
    pub manifest: Manifest,
    pub records: Vec<ClassificationRecord>,
}

impl OutputDocument {
    /// Package the result of a classification run, with its configuration.
    pub fn from_outcome(
        plane: &ProjectivePlane,
        config: &SearchConfig,
        outcome: ClassifyOutcome,
        runtime: Option<Runtime>,
    ) -> Self {
        let w = outcome.window;
        let manifest = Manifest {
            tool: "semioval".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            q: config.q,
            field_poly: plane.field().spec().coefficients_string(),
            sizes_requested: [config.size_min, config.size_max],
            sizes: (!w.empty).then_some([w.size_min, w.size_max]),
            threshold: w.threshold,
            mode: config.mode,
            status: outcome.status,
            nodes: outcome.nodes,
            orderly_counts: outcome.orderly_counts,
            seeds_total: outcome.seeds_total,
            seeds_done: outcome.seeds_done,
            seed_filter: config.seed_filter.as_ref().map(|s| s.iter().copied().collect()),
            node_budget: config.node_budget,
            runtime,
        };
        OutputDocument { manifest, records: outcome.records }
    }
}

const COLUMNS: [&str; 7] = ["size", "points", "coords", "spectrum", "stabilizer_order", "group_label", "blocking"];

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn emit_tables(doc: &OutputDocument, format: Format) -> Result<String, EmitError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out = String::from("# semioval classification\n");
            out.push_str(&format!("# manifest={}\n", serde_json::to_string(&doc.manifest)?));
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for r in &doc.records {
                w.write_record([
                    r.size.to_string(),
                    join(&r.points),
                    join(r.coords.iter().map(|c| format!("{}:{}:{}", c[0], c[1], c[2]))),
                    join(&r.spectrum),
                    r.stabilizer_order.to_string(),
                    r.group_label.clone(),
                    r.blocking.to_string(),
                ])?;
            }
            let body = w.into_inner().map_err(|e| EmitError::Io(e.into_error()))?;
            out.push_str(&String::from_utf8(body).expect("CSV output is UTF-8"));
            Ok(out)
        }
    }
}

/// Parse a document produced by [`emit_tables`]; the format is detected.
pub fn parse_tables(text: &str) -> Result<OutputDocument, EmitError> {
    if text.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(text)?);
    }
    let manifest = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# manifest="))
        .ok_or(EmitError::MissingManifest)?;
    let manifest: Manifest = serde_json::from_str(manifest)?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let rec = result?;
        let bad = |column: &'static str, value: &str| EmitError::BadField { row: row + 1, column, value: value.into() };
        let field = |i: usize| rec.get(i).unwrap_or("");
        let list = |i: usize, column: &'static str| -> Result<Vec<u64>, EmitError> {
            field(i).split_whitespace().map(|x| x.parse().map_err(|_| bad(column, x))).collect()
        };
        let coords = field(2)
            .split_whitespace()
            .map(|t| {
                let parts: Vec<u8> = t.split(':').map(|x| x.parse()).collect::<Result<_, _>>().map_err(|_| bad("coords", t))?;
                <[u8; 3]>::try_from(parts).map_err(|_| bad("coords", t))
            })
            .collect::<Result<Vec<_>, _>>()?;
        records.push(ClassificationRecord {
            size: field(0).parse().map_err(|_| bad("size", field(0)))?,
            points: list(1, "points")?.into_iter().map(|x| x as usize).collect(),
            coords,
            spectrum: list(3, "spectrum")?.into_iter().map(|x| x as u32).collect(),
            stabilizer_order: field(4).parse().map_err(|_| bad("stabilizer_order", field(4)))?,
            group_label: field(5).to_string(),
            blocking: field(6).parse().map_err(|_| bad("blocking", field(6)))?,
        });
    }
    Ok(OutputDocument { manifest, records })
}
