//! Exact global-descriptor search and two-phase rank-fusion re-ranking.
//!
//! Phase 1 searches the range-image database with an RGB query. Phase 2
//! ranks only the top-k phase-1 candidates by BEV descriptor similarity.
//! The two 1-based ranks are combined linearly and the candidate block is
//! reordered by the fused score; everything past k keeps its phase-1 order.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::{dot, Descriptor, DescriptorSet, Modality};
use crate::error::{Error, Result};

/// Brute-force inner-product index over unit-norm descriptors.
#[derive(Debug, Clone)]
pub struct SearchIndex {
    database: DescriptorSet,
}

impl SearchIndex {
    pub fn new(database: DescriptorSet) -> Self {
        // DescriptorSet rows are normalized on construction
        Self { database }
    }

    pub fn database(&self) -> &DescriptorSet {
        &self.database
    }

    pub fn len(&self) -> usize {
        self.database.len()
    }

    pub fn is_empty(&self) -> bool {
        self.database.is_empty()
    }

    fn check_dim(&self, query: &Descriptor) -> Result<()> {
        if !self.database.is_empty() && query.dim() != self.database.dim() {
            return Err(Error::Dimension {
                expected: self.database.dim(),
                found: query.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub id: String,
    pub score: f64,
}

/// Best-first list of database ids with their similarity scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }
}

/// Read access to a ranking's ids, best first.
pub trait Ranking {
    fn ranked_len(&self) -> usize;
    fn id_at(&self, pos: usize) -> &str;
}

impl Ranking for RankedList {
    fn ranked_len(&self) -> usize {
        self.entries.len()
    }

    fn id_at(&self, pos: usize) -> &str {
        &self.entries[pos].id
    }
}

impl Ranking for Vec<String> {
    fn ranked_len(&self) -> usize {
        self.len()
    }

    fn id_at(&self, pos: usize) -> &str {
        &self[pos]
    }
}

/// Descending score, then ascending id. Scores are finite, and -0.0 and
/// +0.0 compare equal.
fn by_score_then_id(a: &(f64, &str), b: &(f64, &str)) -> Ordering {
    b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(b.1))
}

/// Exact top-`top_n` by inner product; ties go to the smaller id.
pub fn search(index: &SearchIndex, query: &Descriptor, top_n: usize) -> Result<RankedList> {
    index.check_dim(query)?;
    let q = query.vector();
    let mut scored: Vec<(f64, &str)> = index.database.iter().map(|(id, row)| (dot(q, row), id)).collect();
    let n = top_n.min(scored.len());
    if n == 0 {
        return Ok(RankedList::default());
    }
    if n < scored.len() {
        scored.select_nth_unstable_by(n - 1, by_score_then_id);
        scored.truncate(n);
    }
    scored.sort_unstable_by(by_score_then_id);
    Ok(RankedList {
        entries: scored
            .into_iter()
            .map(|(score, id)| RankedEntry {
                id: id.to_string(),
                score,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RerankParams {
    /// Number of phase-1 candidates re-ranked by the BEV phase.
    pub k: usize,
    pub w_range: f64,
    pub w_bev: f64,
}

impl Default for RerankParams {
    fn default() -> Self {
        Self {
            k: 60,
            w_range: 0.5,
            w_bev: 0.5,
        }
    }
}

impl RerankParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Argument("k must be >= 1".into()));
        }
        if !(self.w_range >= 0.0 && self.w_bev >= 0.0) || !(self.w_range + self.w_bev > 0.0) {
            return Err(Error::Argument(format!(
                "weights must be non-negative with a positive sum (got {}, {})",
                self.w_range, self.w_bev
            )));
        }
        Ok(())
    }
}

/// One entry of a fused ranking. `r1` is the 1-based phase-1 position;
/// `r2` and `fused` are present only for re-ranked candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedEntry {
    pub id: String,
    pub phase1_score: f64,
    pub r1: usize,
    pub r2: Option<usize>,
    pub fused: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FusedRanking {
    pub entries: Vec<FusedEntry>,
}

impl FusedRanking {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Ranking for FusedRanking {
    fn ranked_len(&self) -> usize {
        self.entries.len()
    }

    fn id_at(&self, pos: usize) -> &str {
        &self.entries[pos].id
    }
}

/// Ranks of `r2` within an explicit candidate block: descending BEV score,
/// ties to the smaller id. Returns 1-based ranks aligned with `candidates`.
fn phase2_ranks(candidates: &[&str], bev_query: &Descriptor, bev_db: &SearchIndex) -> Result<Vec<usize>> {
    bev_db.check_dim(bev_query)?;
    let mut scored = Vec::with_capacity(candidates.len());
    for (pos, &id) in candidates.iter().enumerate() {
        let row = bev_db.database.get(id).ok_or_else(|| Error::MissingId(id.to_string()))?;
        scored.push((dot(bev_query.vector(), row), id, pos));
    }
    scored.sort_by(|a, b| by_score_then_id(&(a.0, a.1), &(b.0, b.1)));
    let mut ranks = vec![0; candidates.len()];
    for (rank, (_, _, pos)) in scored.into_iter().enumerate() {
        ranks[pos] = rank + 1;
    }
    Ok(ranks)
}

/// Re-ranks the first `k` entries of `phase1` by `w_range·r1 + w_bev·r2`
/// (ascending, ties by `r1`). Weights are normalized to unit sum first, so
/// scaling both weights leaves the order unchanged.
pub fn rerank(phase1: &RankedList, bev_query: &Descriptor, bev_db: &SearchIndex, params: &RerankParams) -> Result<FusedRanking> {
    params.validate()?;
    if phase1.is_empty() {
        return Err(Error::Argument("phase-1 list is empty".into()));
    }
    let k = params.k.min(phase1.len());
    let block: Vec<&str> = phase1.entries[..k].iter().map(|e| e.id.as_str()).collect();
    let r2 = phase2_ranks(&block, bev_query, bev_db)?;
    let total = params.w_range + params.w_bev;
    let (w1, w2) = (params.w_range / total, params.w_bev / total);

    let mut fused: Vec<FusedEntry> = phase1.entries[..k]
        .iter()
        .enumerate()
        .map(|(i, e)| FusedEntry {
            id: e.id.clone(),
            phase1_score: e.score,
            r1: i + 1,
            r2: Some(r2[i]),
            fused: Some(w1 * (i + 1) as f64 + w2 * r2[i] as f64),
        })
        .collect();
    fused.sort_by(|a, b| {
        a.fused
            .unwrap()
            .total_cmp(&b.fused.unwrap())
            .then(a.r1.cmp(&b.r1))
    });
    fused.extend(phase1.entries[k..].iter().enumerate().map(|(i, e)| FusedEntry {
        id: e.id.clone(),
        phase1_score: e.score,
        r1: k + i + 1,
        r2: None,
        fused: None,
    }));
    Ok(FusedRanking { entries: fused })
}

/// Phase-1 search over the whole range database followed by BEV re-ranking.
pub fn retrieve_full(
    rgb_query: &Descriptor,
    bev_query: &Descriptor,
    range_index: &SearchIndex,
    bev_index: &SearchIndex,
    params: &RerankParams,
) -> Result<FusedRanking> {
    let phase1 = search(range_index, rgb_query, range_index.len())?;
    if phase1.is_empty() {
        return Ok(FusedRanking::default());
    }
    rerank(&phase1, bev_query, bev_index, params)
}

/// Phase-1 rankings over the full database for every row of `queries`,
/// in query order.
pub fn search_batch(index: &SearchIndex, queries: &DescriptorSet, top_n: usize) -> Result<Vec<RankedList>> {
    (0..queries.len())
        .into_par_iter()
        .map(|i| search(index, &queries.descriptor(i), top_n))
        .collect()
}

/// [`retrieve_full`] for every query; `rgb` and `bev` rows must be aligned.
pub fn retrieve_batch(
    rgb: &DescriptorSet,
    bev: &DescriptorSet,
    range_index: &SearchIndex,
    bev_index: &SearchIndex,
    params: &RerankParams,
) -> Result<Vec<FusedRanking>> {
    ensure_aligned(rgb, bev)?;
    params.validate()?;
    (0..rgb.len())
        .into_par_iter()
        .map(|i| retrieve_full(&rgb.descriptor(i), &bev.descriptor(i), range_index, bev_index, params))
        .collect()
}

/// Fails with the first id where two sets are not aligned row by row.
pub fn ensure_aligned(a: &DescriptorSet, b: &DescriptorSet) -> Result<()> {
    match a.first_id_mismatch(b) {
        Some(id) => Err(Error::IdMismatch(id.to_string())),
        None => Ok(()),
    }
}

/// Concatenates two aligned sets row-wise (each half unit-norm, the result
/// renormalized): the descriptor-concatenation fusion baseline.
pub fn concat_descriptor_sets(first: &DescriptorSet, second: &DescriptorSet, modality: Modality) -> Result<DescriptorSet> {
    ensure_aligned(first, second)?;
    let dim = first.dim() + second.dim();
    let mut data = Vec::with_capacity(first.len() * dim);
    for i in 0..first.len() {
        data.extend_from_slice(first.row(i));
        data.extend_from_slice(second.row(i));
    }
    DescriptorSet::new(modality, dim, first.ids().to_vec(), data)
}

/// Writes `query_id,rank,db_id,fused_score,r1,r2` rows. Entries outside the
/// re-ranked block have empty `fused_score` and `r2`.
pub fn write_rankings_csv<'a, W: Write>(
    out: W,
    rankings: impl IntoIterator<Item = (&'a str, &'a FusedRanking)>,
    max_rank: Option<usize>,
) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'r> {
        query_id: &'r str,
        rank: usize,
        db_id: &'r str,
        fused_score: Option<f64>,
        r1: usize,
        r2: Option<usize>,
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Data(format!("csv: {e}"));
    for (query_id, ranking) in rankings {
        let limit = max_rank.unwrap_or(usize::MAX);
        for (i, e) in ranking.entries.iter().take(limit).enumerate() {
            w.serialize(Row {
                query_id,
                rank: i + 1,
                db_id: &e.id,
                fused_score: e.fused,
                r1: e.r1,
                r2: e.r2,
            })
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<rankings csv>", e))?;
    Ok(())
}

/// Reads a rankings CSV back into per-query id lists in file order of
/// first appearance, each sorted by `rank`.
pub fn read_rankings_csv<R: std::io::Read>(input: R) -> Result<Vec<(String, Vec<String>)>> {
    #[derive(Deserialize)]
    struct Row {
        query_id: String,
        rank: usize,
        db_id: String,
    }
    let mut rdr = csv::Reader::from_reader(input);
    let mut order: Vec<String> = Vec::new();
    let mut lists: std::collections::HashMap<String, Vec<(usize, String)>> = std::collections::HashMap::new();
    for (line, rec) in rdr.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| Error::Parse {
            line: line + 2,
            message: e.to_string(),
        })?;
        let entry = lists.entry(row.query_id.clone()).or_insert_with(|| {
            order.push(row.query_id.clone());
            Vec::new()
        });
        entry.push((row.rank, row.db_id));
    }
    Ok(order
        .into_iter()
        .map(|q| {
            let mut v = lists.remove(&q).unwrap_or_default();
            v.sort_by_key(|(r, _)| *r);
            (q, v.into_iter().map(|(_, id)| id).collect())
        })
        .collect())
}
