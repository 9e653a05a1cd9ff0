//! Greedy selection of citing authors until half of the citations are
//! explained (A50%C).
//!
//! State is the set of unconsumed citing papers, each weighted by how many of
//! the examined author's counted papers it cites. A candidate's contribution
//! is the total weight of unconsumed papers it authored. The best candidate
//! (ties: smallest author id) is selected, its papers are consumed and the
//! contributions of its co-authors on those papers drop accordingly. The loop
//! stops once `2 * explained >= C`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{CountingRules, MetricError};
use crate::corpus::{AuthorIdx, CorpusIndex, PaperIdx};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageStep {
    pub author_id: String,
    pub contribution: u64,
    /// Cumulative citations explained after this step.
    pub explained: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageTrace {
    pub total: u64,
    pub steps: Vec<CoverageStep>,
}

impl CoverageTrace {
    pub fn a50pc(&self) -> u32 {
        self.steps.len() as u32
    }
}

pub fn a50pc_greedy(index: &CorpusIndex, author_id: &str, rules: &CountingRules) -> Result<u32, MetricError> {
    a50pc_trace(index, author_id, rules).map(|t| t.a50pc())
}

pub fn a50pc_trace(index: &CorpusIndex, author_id: &str, rules: &CountingRules) -> Result<CoverageTrace, MetricError> {
    let a = index.author_idx(author_id).ok_or_else(|| MetricError::UnknownAuthor(author_id.to_string()))?;
    let total = rules.counted_papers(index, a).map(|p| rules.citations_of_paper(index, p)).sum();
    let mut explained = 0;
    let steps = coverage_for(index, a, rules)?
        .into_iter()
        .map(|(x, contribution)| {
            explained += contribution;
            CoverageStep { author_id: index.author_id(x).to_string(), contribution, explained }
        })
        .collect();
    Ok(CoverageTrace { total, steps })
}

/// Selected authors with their contributions, in selection order.
pub(crate) fn coverage_for(
    index: &CorpusIndex,
    a: AuthorIdx,
    rules: &CountingRules,
) -> Result<Vec<(AuthorIdx, u64)>, MetricError> {
    let mut citing: Vec<PaperIdx> = rules.counted_papers(index, a).flat_map(|p| rules.citers(index, p)).collect();
    let total = citing.len() as u64;
    if total == 0 {
        return Err(MetricError::Undefined {
            author: index.author_id(a).to_string(),
            metric: "A50%C",
            reason: "no citations",
        });
    }
    citing.sort_unstable();
    // (citing paper, weight)
    let units: Vec<(PaperIdx, u64)> = citing.chunk_by(|x, y| x == y).map(|r| (r[0], r.len() as u64)).collect();
    drop(citing);

    // Candidates are renumbered densely in author-id order.
    let mut memberships: Vec<(AuthorIdx, u32)> = units
        .iter()
        .enumerate()
        .flat_map(|(k, &(u, _))| index.authors_of(u).iter().map(move |&x| (x, k as u32)))
        .collect();
    memberships.sort_unstable();
    let mut candidates: Vec<AuthorIdx> = Vec::new();
    let mut owned_offsets: Vec<usize> = vec![0];
    let mut owned: Vec<u32> = Vec::with_capacity(memberships.len());
    for run in memberships.chunk_by(|x, y| x.0 == y.0) {
        candidates.push(run[0].0);
        owned.extend(run.iter().map(|&(_, k)| k));
        owned_offsets.push(owned.len());
    }
    drop(memberships);
    let local = |x: AuthorIdx| candidates.binary_search(&x).expect("author of a citing paper is a candidate");

    let mut contribution: Vec<u64> = (0..candidates.len())
        .map(|c| owned[owned_offsets[c]..owned_offsets[c + 1]].iter().map(|&k| units[k as usize].1).sum())
        .collect();
    let mut heap: BinaryHeap<(u64, Reverse<u32>)> =
        contribution.iter().enumerate().map(|(c, &w)| (w, Reverse(c as u32))).collect();
    let mut consumed = vec![false; units.len()];
    let mut selected = vec![false; candidates.len()];
    let mut explained = 0u64;
    let mut steps = Vec::new();

    while 2 * explained < total {
        let Some((w, Reverse(c))) = heap.pop() else {
            return Err(MetricError::Unreachable { author: index.author_id(a).to_string(), explained, total });
        };
        let c = c as usize;
        if selected[c] || contribution[c] != w {
            continue;
        }
        if w == 0 {
            return Err(MetricError::Unreachable { author: index.author_id(a).to_string(), explained, total });
        }
        selected[c] = true;
        explained += w;
        steps.push((candidates[c], w));
        for &k in &owned[owned_offsets[c]..owned_offsets[c + 1]] {
            let k = k as usize;
            if consumed[k] {
                continue;
            }
            consumed[k] = true;
            let (u, weight) = units[k];
            for &y in index.authors_of(u) {
                let cy = local(y);
                if selected[cy] {
                    continue;
                }
                contribution[cy] -= weight;
                heap.push((contribution[cy], Reverse(cy as u32)));
            }
        }
        contribution[c] = 0;
    }
    Ok(steps)
}
