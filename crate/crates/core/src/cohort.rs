//! Eligibility filtering and per-author field assignment.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{AuthorIdx, CorpusIndex};
use crate::metrics::{citation_profile, CountingRules};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilityConfig {
    /// Authors need strictly more full papers than this.
    pub min_full_papers: u32,
    /// Authors need at least this many citations.
    pub min_citations: u64,
    /// Keys the random tie-break of field assignment.
    pub seed: u64,
}

impl Default for EligibilityConfig {
    fn default() -> Self {
        EligibilityConfig { min_full_papers: 5, min_citations: 1000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldAssignment {
    pub field_id: String,
    pub subfield_id: String,
}

/// Authors passing both thresholds that also have an assignable field.
pub fn eligible_authors(index: &CorpusIndex, cfg: &EligibilityConfig, rules: &CountingRules) -> BTreeSet<String> {
    (0..index.author_count() as AuthorIdx)
        .into_par_iter()
        .filter(|&a| {
            let profile = citation_profile(index, a, rules);
            profile.n_full_papers > cfg.min_full_papers
                && profile.citations >= cfg.min_citations
                && assign_field_for(index, a, cfg.seed, rules).is_some()
        })
        .map(|a| index.author_id(a).to_string())
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Field with the most of the author's classified full papers; ties go to the
/// field whose papers drew more citations, then to a pseudo-random pick keyed
/// on `(seed, author_id)`. The subfield is chosen the same way inside the
/// winning field. `None` when no full paper carries a known subfield.
pub fn assign_field(index: &CorpusIndex, author_id: &str, seed: u64, rules: &CountingRules) -> Option<FieldAssignment> {
    assign_field_for(index, index.author_idx(author_id)?, seed, rules)
}

#[derive(Default, Clone, Copy)]
struct Tally {
    papers: u64,
    citations: u64,
}

pub(crate) fn assign_field_for(
    index: &CorpusIndex,
    a: AuthorIdx,
    seed: u64,
    rules: &CountingRules,
) -> Option<FieldAssignment> {
    // (field_id, subfield_id, citations) per classified full paper.
    let classified: Vec<(&str, &str, u64)> = index
        .papers_of(a)
        .iter()
        .filter(|&&p| index.paper(p).is_full_paper())
        .filter_map(|&p| {
            let sub = index.paper(p).subfield_id.as_deref()?;
            let entry = index.taxonomy().lookup(sub)?;
            Some((entry.field_id.as_str(), sub, rules.citations_of_paper(index, p)))
        })
        .collect();
    if classified.is_empty() {
        return None;
    }
    let author_id = index.author_id(a);

    let mut fields: BTreeMap<&str, Tally> = BTreeMap::new();
    for &(f, _, c) in &classified {
        let t = fields.entry(f).or_default();
        t.papers += 1;
        t.citations += c;
    }
    let field = pick(&fields, seed, author_id, b'F');

    let mut subfields: BTreeMap<&str, Tally> = BTreeMap::new();
    for &(_, s, c) in classified.iter().filter(|(f, _, _)| *f == field) {
        let t = subfields.entry(s).or_default();
        t.papers += 1;
        t.citations += c;
    }
    let subfield = pick(&subfields, seed, author_id, b'S');
    Some(FieldAssignment { field_id: field.to_string(), subfield_id: subfield.to_string() })
}

fn pick<'a>(tallies: &BTreeMap<&'a str, Tally>, seed: u64, author_id: &str, level: u8) -> &'a str {
    let best = tallies.values().map(|t| (t.papers, t.citations)).max().expect("non-empty tally");
    let tied: Vec<&str> = tallies.iter().filter(|(_, t)| (t.papers, t.citations) == best).map(|(&k, _)| k).collect();
    if tied.len() == 1 {
        return tied[0];
    }
    tied[(tie_break_hash(seed, author_id, level) % tied.len() as u64) as usize]
}

/// Stable across platforms and releases; independent of which other authors
/// are in the corpus.
pub fn tie_break_hash(seed: u64, author_id: &str, level: u8) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update([level]);
    h.update(author_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest has 32 bytes"))
}
