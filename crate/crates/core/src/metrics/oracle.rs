//! Naive reference implementation of A50%C.
//!
//! Every round recounts all contributions from the raw citation edges and
//! compares author identifiers as strings. There is no weighting, heap or
//! incremental bookkeeping, so it shares nothing with the greedy path beyond
//! the index accessors. Used to check [`super::a50pc_greedy`].

use std::collections::{BTreeMap, BTreeSet};

use super::{CountingRules, MetricError};
use crate::corpus::{CorpusIndex, PaperIdx};

pub fn a50pc_oracle(index: &CorpusIndex, author_id: &str, rules: &CountingRules) -> Result<u32, MetricError> {
    let a = index.author_idx(author_id).ok_or_else(|| MetricError::UnknownAuthor(author_id.to_string()))?;

    // One entry per citation edge (citing paper only; the cited side is not
    // needed once the edge is known to land on a counted paper).
    let mut edges: Vec<PaperIdx> = Vec::new();
    for &p in index.papers_of(a) {
        if rules.examined_full_only && !index.paper(p).is_full_paper() {
            continue;
        }
        for &u in index.citers_of(p) {
            if rules.citing_full_only && !index.paper(u).is_full_paper() {
                continue;
            }
            edges.push(u);
        }
    }
    let total = edges.len() as u64;
    if total == 0 {
        return Err(MetricError::Undefined { author: author_id.to_string(), metric: "A50%C", reason: "no citations" });
    }

    let mut unconsumed: BTreeSet<PaperIdx> = edges.iter().copied().collect();
    let mut explained = 0u64;
    let mut rounds = 0u32;
    while 2 * explained < total {
        let mut contribution: BTreeMap<&str, u64> = BTreeMap::new();
        for &u in &edges {
            if !unconsumed.contains(&u) {
                continue;
            }
            for &x in index.authors_of(u) {
                *contribution.entry(index.author_id(x)).or_default() += 1;
            }
        }
        // Ascending id order, so only a strictly larger value replaces the best.
        let mut best: Option<(&str, u64)> = None;
        for (&id, &c) in &contribution {
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((id, c));
            }
        }
        let Some((winner, c)) = best else {
            return Err(MetricError::Unreachable { author: author_id.to_string(), explained, total });
        };
        explained += c;
        rounds += 1;
        unconsumed.retain(|&u| !index.authors_of(u).iter().any(|&x| index.author_id(x) == winner));
    }
    Ok(rounds)
}
