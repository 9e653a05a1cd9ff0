//! Per-author indicators: h-index, C/h², A50%C and A50.
//!
//! A citation is one (citing paper, cited paper) edge, so a paper that
//! references k of an author's papers contributes k citations. Which papers
//! count on either end of an edge is controlled by [`CountingRules`].

mod coverage;
mod oracle;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohort;
use crate::corpus::{AuthorIdx, CorpusIndex, PaperIdx};
use crate::value::MetricValue;

pub use coverage::{a50pc_greedy, a50pc_trace, CoverageStep, CoverageTrace};
pub use oracle::a50pc_oracle;

pub const DEFAULT_A50_THRESHOLD: u32 = 50;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("unknown author {0:?}")]
    UnknownAuthor(String),
    #[error("C/h² is undefined for h = 0")]
    ZeroHIndex,
    #[error("{metric} is undefined for author {author:?}: {reason}")]
    Undefined { author: String, metric: &'static str, reason: &'static str },
    #[error("citing authors of {author:?} explain only {explained} of {total} citations")]
    Unreachable { author: String, explained: u64, total: u64 },
}

/// Which papers take part on each side of a citation edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingRules {
    /// Only the examined author's full papers receive counted citations and
    /// enter the h-index and shared-paper counts.
    pub examined_full_only: bool,
    /// Only full papers count as citing papers.
    pub citing_full_only: bool,
}

impl Default for CountingRules {
    fn default() -> Self {
        CountingRules { examined_full_only: true, citing_full_only: false }
    }
}

impl CountingRules {
    pub fn counts_examined(&self, index: &CorpusIndex, p: PaperIdx) -> bool {
        !self.examined_full_only || index.paper(p).is_full_paper()
    }

    pub fn counts_citing(&self, index: &CorpusIndex, u: PaperIdx) -> bool {
        !self.citing_full_only || index.paper(u).is_full_paper()
    }

    /// The author's papers that can receive counted citations.
    pub fn counted_papers<'a>(&'a self, index: &'a CorpusIndex, a: AuthorIdx) -> impl Iterator<Item = PaperIdx> + 'a {
        index.papers_of(a).iter().copied().filter(move |&p| self.counts_examined(index, p))
    }

    pub fn citers<'a>(&'a self, index: &'a CorpusIndex, p: PaperIdx) -> impl Iterator<Item = PaperIdx> + 'a {
        index.citers_of(p).iter().copied().filter(move |&u| self.counts_citing(index, u))
    }

    pub fn citations_of_paper(&self, index: &CorpusIndex, p: PaperIdx) -> u64 {
        if self.citing_full_only {
            self.citers(index, p).count() as u64
        } else {
            index.citers_of(p).len() as u64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub rules: CountingRules,
    pub a50_threshold: u32,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { rules: CountingRules::default(), a50_threshold: DEFAULT_A50_THRESHOLD }
    }
}

/// Paper count and citation total, the inputs to eligibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CitationProfile {
    pub n_full_papers: u32,
    pub citations: u64,
}

pub fn citation_profile(index: &CorpusIndex, a: AuthorIdx, rules: &CountingRules) -> CitationProfile {
    let n_full_papers = index.papers_of(a).iter().filter(|&&p| index.paper(p).is_full_paper()).count() as u32;
    let citations = rules.counted_papers(index, a).map(|p| rules.citations_of_paper(index, p)).sum();
    CitationProfile { n_full_papers, citations }
}

/// Largest h such that at least h of the counts are ≥ h.
pub fn h_index(citation_counts: &[u64]) -> u32 {
    let mut sorted = citation_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().enumerate().take_while(|&(i, &c)| c > i as u64).count() as u32
}

pub fn c_over_h2(citations: u64, h: u32) -> Result<MetricValue, MetricError> {
    if h == 0 {
        return Err(MetricError::ZeroHIndex);
    }
    let h = h as u64;
    Ok(MetricValue::new(citations, h * h))
}

/// Number of other authors sharing strictly more than `threshold` counted
/// papers with `author_id`. Unknown authors have no co-authors.
pub fn a50_coauthors(index: &CorpusIndex, author_id: &str, threshold: u32, rules: &CountingRules) -> u32 {
    match index.author_idx(author_id) {
        Some(a) => a50_for(index, a, threshold, rules),
        None => 0,
    }
}

pub(crate) fn a50_for(index: &CorpusIndex, a: AuthorIdx, threshold: u32, rules: &CountingRules) -> u32 {
    let mut coauthors: Vec<AuthorIdx> =
        rules.counted_papers(index, a).flat_map(|p| index.authors_of(p).iter().copied()).filter(|&b| b != a).collect();
    coauthors.sort_unstable();
    coauthors.chunk_by(|x, y| x == y).filter(|run| run.len() as u64 > threshold as u64).count() as u32
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorMetrics {
    pub author_id: String,
    pub n_full_papers: u32,
    pub citations: u64,
    pub h_index: u32,
    pub c_over_h2: MetricValue,
    /// `None` only when citing papers without any recorded author hold more
    /// than half of the citations.
    pub a50pc: Option<u32>,
    pub a50: u32,
    pub field_id: Option<String>,
    pub subfield_id: Option<String>,
}

pub fn author_metrics(
    index: &CorpusIndex,
    author_id: &str,
    cfg: &MetricsConfig,
    seed: u64,
) -> Result<AuthorMetrics, MetricError> {
    let a = index.author_idx(author_id).ok_or_else(|| MetricError::UnknownAuthor(author_id.to_string()))?;
    metrics_for(index, a, cfg, seed)
}

fn metrics_for(
    index: &CorpusIndex,
    a: AuthorIdx,
    cfg: &MetricsConfig,
    seed: u64,
) -> Result<AuthorMetrics, MetricError> {
    let rules = &cfg.rules;
    let author_id = index.author_id(a).to_string();
    let counts: Vec<u64> = rules.counted_papers(index, a).map(|p| rules.citations_of_paper(index, p)).collect();
    let citations: u64 = counts.iter().sum();
    if citations == 0 {
        return Err(MetricError::Undefined { author: author_id, metric: "C/h²", reason: "no citations" });
    }
    let h = h_index(&counts);
    let ratio = c_over_h2(citations, h)?;
    let a50pc = match coverage::coverage_for(index, a, rules) {
        Ok(steps) => Some(steps.len() as u32),
        Err(MetricError::Unreachable { .. }) => None,
        Err(e) => return Err(e),
    };
    let assignment = cohort::assign_field_for(index, a, seed, rules);
    let n_full_papers = index.papers_of(a).iter().filter(|&&p| index.paper(p).is_full_paper()).count() as u32;
    Ok(AuthorMetrics {
        author_id,
        n_full_papers,
        citations,
        h_index: h,
        c_over_h2: ratio,
        a50pc,
        a50: a50_for(index, a, cfg.a50_threshold, rules),
        field_id: assignment.as_ref().map(|f| f.field_id.clone()),
        subfield_id: assignment.map(|f| f.subfield_id),
    })
}

/// Metrics for every cohort member, computed in parallel on the current rayon
/// pool. The result does not depend on cohort order or thread count.
pub fn compute_all_metrics<'a, I>(
    index: &CorpusIndex,
    cohort: I,
    cfg: &MetricsConfig,
    seed: u64,
) -> Result<BTreeMap<String, AuthorMetrics>, MetricError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut members = Vec::new();
    for id in cohort {
        members.push(index.author_idx(id).ok_or_else(|| MetricError::UnknownAuthor(id.to_string()))?);
    }
    members.sort_unstable();
    members.dedup();
    let rows: Vec<AuthorMetrics> =
        members.par_iter().map(|&a| metrics_for(index, a, cfg, seed)).collect::<Result<_, _>>()?;
    Ok(rows.into_iter().map(|m| (m.author_id.clone(), m)).collect())
}
