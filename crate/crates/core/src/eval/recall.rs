use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::retrieval::Ranking;

/// Fraction of queries with at least one relevant id among their first `n`
/// results. Queries with an empty truth set are excluded from the
/// denominator; if every set is empty the recall is 0.
pub fn recall_at_n<R: Ranking>(rankings: &[R], truth: &[BTreeSet<String>], n: usize) -> Result<f64> {
    check_lengths(rankings.len(), truth.len())?;
    let mut hits = 0usize;
    let mut counted = 0usize;
    for (ranking, relevant) in rankings.iter().zip(truth) {
        if relevant.is_empty() {
            continue;
        }
        counted += 1;
        let top = n.min(ranking.ranked_len());
        if (0..top).any(|pos| relevant.contains(ranking.id_at(pos))) {
            hits += 1;
        }
    }
    Ok(if counted == 0 { 0.0 } else { hits as f64 / counted as f64 })
}

/// Number of queries that count towards recall.
pub fn evaluated_query_count(truth: &[BTreeSet<String>]) -> usize {
    truth.iter().filter(|t| !t.is_empty()).count()
}

/// `ceil(pct% of database_size)`, at least 1.
pub fn percent_cutoff(database_size: usize, pct: f64) -> usize {
    let raw = pct * database_size as f64 / 100.0;
    // guards against 1.0000000000000002-style rounding pushing ceil up
    let n = (raw - 1e-9).ceil();
    (n.max(1.0)) as usize
}

pub fn recall_at_percent<R: Ranking>(
    rankings: &[R],
    truth: &[BTreeSet<String>],
    database_size: usize,
    pct: f64,
) -> Result<f64> {
    recall_at_n(rankings, truth, percent_cutoff(database_size, pct))
}

fn check_lengths(rankings: usize, truth: usize) -> Result<()> {
    if rankings != truth {
        return Err(Error::Contract(format!("{rankings} rankings but {truth} truth sets")));
    }
    Ok(())
}

/// Drops database frames temporally adjacent to the query: same sequence
/// prefix and `1 <= |index difference| <= window`. The query's own frame
/// index is kept, since in cross-modal retrieval it is the counterpart scan.
/// Ids without a `prefix/number` shape are never excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExclusionWindow(pub usize);

impl ExclusionWindow {
    pub fn excludes(&self, query_id: &str, db_id: &str) -> bool {
        if self.0 == 0 {
            return false;
        }
        match (split_frame_id(query_id), split_frame_id(db_id)) {
            (Some((sq, iq)), Some((sd, id))) if sq == sd => {
                let d = iq.abs_diff(id);
                d >= 1 && d <= self.0 as u64
            }
            _ => false,
        }
    }

    /// Filters rankings and truth sets in place of the originals.
    pub fn apply<R: Ranking>(
        &self,
        query_ids: &[String],
        rankings: &[R],
        truth: &[BTreeSet<String>],
    ) -> Result<(Vec<Vec<String>>, Vec<BTreeSet<String>>)> {
        check_lengths(rankings.len(), truth.len())?;
        check_lengths(query_ids.len(), truth.len())?;
        let mut out_r = Vec::with_capacity(rankings.len());
        let mut out_t = Vec::with_capacity(truth.len());
        for ((q, r), t) in query_ids.iter().zip(rankings).zip(truth) {
            out_r.push(
                (0..r.ranked_len())
                    .map(|p| r.id_at(p))
                    .filter(|id| !self.excludes(q, id))
                    .map(String::from)
                    .collect(),
            );
            out_t.push(t.iter().filter(|id| !self.excludes(q, id)).cloned().collect());
        }
        Ok((out_r, out_t))
    }
}

fn split_frame_id(id: &str) -> Option<(&str, u64)> {
    let (prefix, index) = id.rsplit_once('/')?;
    Some((prefix, index.parse().ok()?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    /// True-positive planar distance threshold in meters.
    pub t: f64,
    /// Additional cutoffs reported in `r_at_n`.
    pub ns: Vec<usize>,
    pub pct: f64,
    pub exclusion_window: ExclusionWindow,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            t: 10.0,
            ns: vec![1, 5],
            pct: 1.0,
            exclusion_window: ExclusionWindow(0),
        }
    }
}

/// Recall summary for one method on one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    pub method: String,
    pub sequence: String,
    pub r_at_1: f64,
    pub r_at_5: f64,
    pub r_at_1pct: f64,
    pub query_count: usize,
    /// Recall at each requested cutoff.
    pub r_at_n: BTreeMap<usize, f64>,
    #[serde(rename = "params_json")]
    pub params: serde_json::Value,
}

/// Evaluates per-query rankings against truth sets. `query_ids` feed the
/// exclusion window.
pub fn evaluate<R: Ranking>(
    method: &str,
    sequence: &str,
    query_ids: &[String],
    rankings: &[R],
    truth: &[BTreeSet<String>],
    database_size: usize,
    params: &EvalParams,
    extra: serde_json::Value,
) -> Result<RecallReport> {
    let (rankings, truth) = params.exclusion_window.apply(query_ids, rankings, truth)?;
    let mut r_at_n = BTreeMap::new();
    for &n in &params.ns {
        r_at_n.insert(n, recall_at_n(&rankings, &truth, n)?);
    }
    let mut snapshot = serde_json::json!({
        "t": params.t,
        "ns": params.ns,
        "pct": params.pct,
        "exclusion_window": params.exclusion_window.0,
        "database_size": database_size,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (snapshot.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(RecallReport {
        method: method.to_string(),
        sequence: sequence.to_string(),
        r_at_1: recall_at_n(&rankings, &truth, 1)?,
        r_at_5: recall_at_n(&rankings, &truth, 5)?,
        r_at_1pct: recall_at_percent(&rankings, &truth, database_size, params.pct)?,
        query_count: evaluated_query_count(&truth),
        r_at_n,
        params: snapshot,
    })
}

/// CSV with columns `method,sequence,r_at_1,r_at_5,r_at_1pct,query_count,params_json`.
pub fn write_reports_csv<W: Write>(out: W, reports: &[RecallReport]) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        method: &'a str,
        sequence: &'a str,
        r_at_1: f64,
        r_at_5: f64,
        r_at_1pct: f64,
        query_count: usize,
        params_json: String,
    }
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(Row {
            method: &r.method,
            sequence: &r.sequence,
            r_at_1: r.r_at_1,
            r_at_5: r.r_at_5,
            r_at_1pct: r.r_at_1pct,
            query_count: r.query_count,
            params_json: r.params.to_string(),
        })
        .map_err(|e| Error::Data(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::io("<report csv>", e))
}

pub fn write_reports_json<W: Write>(out: W, reports: &[RecallReport]) -> Result<()> {
    serde_json::to_writer_pretty(out, reports).map_err(|e| Error::Data(format!("json: {e}")))
}
