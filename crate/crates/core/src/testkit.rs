//! Random small corpora and brute-force reference computations that work on
//! raw records rather than on the index.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use crate::corpus::{build_index, AuthorshipRecord, CitationEdge, CorpusIndex, DocType, FieldTaxonomy, PaperRecord};

/// Records of a small corpus, kept so oracles can recompute from scratch.
#[derive(Debug, Clone)]
pub struct SmallCorpus {
    pub papers: Vec<PaperRecord>,
    pub authorships: Vec<AuthorshipRecord>,
    pub citations: Vec<CitationEdge>,
}

impl SmallCorpus {
    pub fn index(&self) -> CorpusIndex {
        build_index(self.papers.clone(), self.authorships.clone(), self.citations.clone(), FieldTaxonomy::new())
            .expect("small corpora always index")
    }

    pub fn author_ids(&self) -> BTreeSet<String> {
        self.authorships.iter().map(|a| a.author_id.clone()).collect()
    }

    fn doc_type(&self) -> BTreeMap<&str, DocType> {
        self.papers.iter().map(|p| (p.paper_id.as_str(), p.doc_type)).collect()
    }

    /// Distinct authors of each paper.
    pub fn authors_by_paper(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for a in &self.authorships {
            out.entry(a.paper_id.as_str()).or_default().insert(a.author_id.as_str());
        }
        out
    }

    /// Distinct full papers of `author`.
    pub fn full_papers_of(&self, author: &str) -> BTreeSet<&str> {
        let types = self.doc_type();
        self.authorships
            .iter()
            .filter(|a| a.author_id == author && types[a.paper_id.as_str()].is_full())
            .map(|a| a.paper_id.as_str())
            .collect()
    }

    /// Citation count per full paper of `author`, any citing document type.
    pub fn citation_counts(&self, author: &str) -> Vec<u64> {
        let full = self.full_papers_of(author);
        let edges = self.distinct_edges();
        full.iter().map(|p| edges.iter().filter(|(_, cited)| cited == p).count() as u64).collect()
    }

    /// Non-loop citation edges between known papers, duplicates collapsed.
    pub fn distinct_edges(&self) -> BTreeSet<(&str, &str)> {
        let known: BTreeSet<&str> = self.papers.iter().map(|p| p.paper_id.as_str()).collect();
        self.citations
            .iter()
            .map(|c| (c.citing_paper_id.as_str(), c.cited_paper_id.as_str()))
            .filter(|(u, p)| u != p && known.contains(u) && known.contains(p))
            .collect()
    }

    /// Co-authors sharing strictly more than `threshold` full papers.
    pub fn a50_brute(&self, author: &str, threshold: u32) -> u32 {
        let by_paper = self.authors_by_paper();
        let mut shared: BTreeMap<&str, u32> = BTreeMap::new();
        for p in self.full_papers_of(author) {
            for &b in by_paper.get(p).into_iter().flatten() {
                if b != author {
                    *shared.entry(b).or_default() += 1;
                }
            }
        }
        shared.values().filter(|&&n| n > threshold).count() as u32
    }
}

/// Largest h with at least h counts of h or more, by trying every h.
pub fn h_index_brute(counts: &[u64]) -> u32 {
    (0..=counts.len() as u64).filter(|&h| counts.iter().filter(|&&c| c >= h).count() as u64 >= h).max().unwrap_or(0)
        as u32
}

fn doc_type_of(code: u8) -> DocType {
    match code % 6 {
        0 | 1 => DocType::Article,
        2 => DocType::Review,
        3 => DocType::ConferencePaper,
        _ => DocType::Other,
    }
}

/// Up to `max_authors` authors, `max_papers` papers of mixed types with zero
/// to four authors each (author-less papers included), and up to `max_edges`
/// citation rows (self-loops and duplicates included).
pub fn small_corpus(max_authors: usize, max_papers: usize, max_edges: usize) -> impl Strategy<Value = SmallCorpus> {
    (2..=max_authors, 2..=max_papers).prop_flat_map(move |(n_authors, n_papers)| {
        let paper = (any::<u8>(), prop::collection::vec(0..n_authors, 0..=4));
        (prop::collection::vec(paper, n_papers), prop::collection::vec((0..n_papers, 0..n_papers), 0..=max_edges))
            .prop_map(|(papers, edges)| {
                let pid = |i: usize| format!("p{i:03}");
                SmallCorpus {
                    papers: papers
                        .iter()
                        .enumerate()
                        .map(|(i, (code, _))| PaperRecord::new(pid(i), doc_type_of(*code), None))
                        .collect(),
                    authorships: papers
                        .iter()
                        .enumerate()
                        .flat_map(|(i, (_, authors))| {
                            authors.iter().map(move |&a| AuthorshipRecord::new(pid(i), format!("x{a:02}")))
                        })
                        .collect(),
                    citations: edges.iter().map(|&(u, p)| CitationEdge::new(pid(u), pid(p))).collect(),
                }
            })
    })
}
