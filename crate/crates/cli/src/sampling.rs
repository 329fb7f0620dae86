//! Export shapes for finite-statistics runs.
//!
//! CSV is the spreadsheet contract: a fixed `outcome_tuple,count` header and
//! one row per possible tuple (zero counts included), tuples rendered as
//! `|`-joined outcomes. JSON carries the same counts plus the reproduction
//! parameters (context, shots, seed).

use std::collections::BTreeMap;

use bellks_core::sampler::SampleRun;
use serde::Serialize;

/// JSON document for one run; key order is fixed and `counts` is sorted by
/// rendered tuple, so equal runs serialize byte-identically.
#[derive(Debug, Clone, Serialize)]
pub struct SampleDocument {
    pub context: Vec<String>,
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
}

impl SampleDocument {
    pub fn from_run(run: &SampleRun) -> Self {
        Self {
            context: run.context().to_vec(),
            shots: run.shots(),
            seed: run.seed(),
            counts: run
                .counts()
                .iter()
                .map(|(tuple, &n)| (SampleRun::render_tuple(tuple), n))
                .collect(),
        }
    }
}

pub fn render_json(run: &SampleRun) -> String {
    let mut text =
        serde_json::to_string_pretty(&SampleDocument::from_run(run)).expect("document serializes");
    text.push('\n');
    text
}

pub fn render_csv(run: &SampleRun) -> String {
    let mut out = String::from("outcome_tuple,count\n");
    for (tuple, count) in run.counts() {
        out.push_str(&SampleRun::render_tuple(tuple));
        out.push(',');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}
