//! Corpus records and the immutable cross-linked index built from them.
//!
//! Identifiers are interned into dense `u32` indices. Paper and author tables
//! are sorted lexicographically by identifier, so index order is identifier
//! order and every adjacency list is sorted. Two corpora with the
//! same de-duplicated rows produce identical indexes regardless of row order.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub type PaperIdx = u32;
pub type AuthorIdx = u32;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("paper {paper_id:?} appears twice with conflicting {what}")]
    ConflictingPaper { paper_id: String, what: &'static str },
    #[error("subfield {subfield_id:?} is mapped twice with conflicting entries")]
    ConflictingSubfield { subfield_id: String },
    #[error("corpus too large: more than u32::MAX {0}")]
    TooLarge(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    Article,
    ConferencePaper,
    Review,
    Other,
}

impl DocType {
    /// Case-insensitive; anything unrecognised is `Other`.
    pub fn parse(s: &str) -> DocType {
        let s = s.trim();
        if s.eq_ignore_ascii_case("article") {
            DocType::Article
        } else if s.eq_ignore_ascii_case("conference_paper") || s.eq_ignore_ascii_case("conference paper") {
            DocType::ConferencePaper
        } else if s.eq_ignore_ascii_case("review") {
            DocType::Review
        } else {
            DocType::Other
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::ConferencePaper => "conference_paper",
            DocType::Review => "review",
            DocType::Other => "other",
        }
    }

    pub fn is_full(self) -> bool {
        !matches!(self, DocType::Other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PaperRecord {
    pub paper_id: String,
    pub doc_type: DocType,
    pub subfield_id: Option<String>,
}

impl PaperRecord {
    pub fn new(paper_id: impl Into<String>, doc_type: DocType, subfield_id: Option<&str>) -> Self {
        PaperRecord { paper_id: paper_id.into(), doc_type, subfield_id: subfield_id.map(str::to_string) }
    }

    pub fn is_full_paper(&self) -> bool {
        self.doc_type.is_full()
    }
}

/// Articles, conference papers and reviews are full papers.
pub fn is_full_paper(p: &PaperRecord) -> bool {
    p.is_full_paper()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AuthorshipRecord {
    pub paper_id: String,
    pub author_id: String,
}

impl AuthorshipRecord {
    pub fn new(paper_id: impl Into<String>, author_id: impl Into<String>) -> Self {
        AuthorshipRecord { paper_id: paper_id.into(), author_id: author_id.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CitationEdge {
    pub citing_paper_id: String,
    pub cited_paper_id: String,
}

impl CitationEdge {
    pub fn new(citing: impl Into<String>, cited: impl Into<String>) -> Self {
        CitationEdge { citing_paper_id: citing.into(), cited_paper_id: cited.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubfieldEntry {
    pub subfield_name: String,
    pub field_id: String,
    pub field_name: String,
}

/// Subfield → field classification. 22 fields / 174 subfields is the usual
/// shape but nothing here depends on it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldTaxonomy {
    subfields: BTreeMap<String, SubfieldEntry>,
}

impl FieldTaxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identical duplicates collapse; any disagreement is an error.
    pub fn insert(&mut self, subfield_id: impl Into<String>, entry: SubfieldEntry) -> Result<(), CorpusError> {
        let subfield_id = subfield_id.into();
        match self.subfields.get(&subfield_id) {
            Some(existing) if *existing == entry => Ok(()),
            Some(_) => Err(CorpusError::ConflictingSubfield { subfield_id }),
            None => {
                self.subfields.insert(subfield_id, entry);
                Ok(())
            }
        }
    }

    pub fn lookup(&self, subfield_id: &str) -> Option<&SubfieldEntry> {
        self.subfields.get(subfield_id)
    }

    pub fn field_of(&self, subfield_id: &str) -> Option<&str> {
        self.lookup(subfield_id).map(|e| e.field_id.as_str())
    }

    pub fn subfields(&self) -> impl Iterator<Item = (&str, &SubfieldEntry)> {
        self.subfields.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// field_id → field_name.
    pub fn fields(&self) -> BTreeMap<&str, &str> {
        self.subfields.values().map(|e| (e.field_id.as_str(), e.field_name.as_str())).collect()
    }

    pub fn field_name(&self, field_id: &str) -> Option<&str> {
        self.subfields.values().find(|e| e.field_id == field_id).map(|e| e.field_name.as_str())
    }

    /// Accepts a field id or a (case-insensitive) field name.
    pub fn resolve_field(&self, id_or_name: &str) -> Option<&str> {
        let fields = self.fields();
        if let Some((id, _)) = fields.get_key_value(id_or_name) {
            return Some(id);
        }
        fields.into_iter().find(|(_, name)| name.eq_ignore_ascii_case(id_or_name.trim())).map(|(id, _)| id)
    }

    pub fn len(&self) -> usize {
        self.subfields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subfields.is_empty()
    }
}

/// Compressed sparse rows: `targets[offsets[i]..offsets[i + 1]]` are the
/// neighbours of `i`, sorted ascending and unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// `pairs` must be sorted and de-duplicated.
    fn from_sorted_pairs(rows: usize, pairs: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; rows + 1];
        for &(src, _) in pairs {
            offsets[src as usize + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, dst)| dst).collect();
        Adjacency { offsets, targets }
    }

    fn row(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    fn edges(&self) -> usize {
        self.targets.len()
    }
}

/// Counts of everything collapsed or dropped while building an index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub papers: usize,
    pub duplicate_papers: usize,
    pub authorships: usize,
    pub duplicate_authorships: usize,
    pub authorships_unknown_paper: usize,
    pub citations: usize,
    pub duplicate_citations: usize,
    pub citations_unknown_paper: usize,
    pub citation_self_loops: usize,
}

/// Incremental builder. Papers must be supplied up front because authorship
/// and citation rows are resolved against them as they stream in.
pub struct IndexBuilder {
    papers: Vec<PaperRecord>,
    paper_lookup: HashMap<String, PaperIdx>,
    author_lookup: HashMap<String, u32>,
    author_names: Vec<String>,
    authorships: Vec<(PaperIdx, u32)>,
    citations: Vec<(PaperIdx, PaperIdx)>,
    taxonomy: FieldTaxonomy,
    report: BuildReport,
}

impl IndexBuilder {
    pub fn new<P>(papers: P, taxonomy: FieldTaxonomy) -> Result<Self, CorpusError>
    where
        P: IntoIterator<Item = PaperRecord>,
    {
        let mut report = BuildReport::default();
        let mut by_id: HashMap<String, PaperRecord> = HashMap::new();
        for p in papers {
            match by_id.get(&p.paper_id) {
                Some(existing) => {
                    if existing.doc_type != p.doc_type {
                        return Err(CorpusError::ConflictingPaper { paper_id: p.paper_id, what: "doc_type" });
                    }
                    if existing.subfield_id != p.subfield_id {
                        return Err(CorpusError::ConflictingPaper { paper_id: p.paper_id, what: "subfield_id" });
                    }
                    report.duplicate_papers += 1;
                }
                None => {
                    by_id.insert(p.paper_id.clone(), p);
                }
            }
        }
        if by_id.len() > u32::MAX as usize {
            return Err(CorpusError::TooLarge("papers"));
        }
        let mut papers: Vec<PaperRecord> = by_id.into_values().collect();
        papers.sort_unstable_by(|a, b| a.paper_id.cmp(&b.paper_id));
        let paper_lookup = papers.iter().enumerate().map(|(i, p)| (p.paper_id.clone(), i as PaperIdx)).collect();
        report.papers = papers.len();
        Ok(IndexBuilder {
            papers,
            paper_lookup,
            author_lookup: HashMap::new(),
            author_names: Vec::new(),
            authorships: Vec::new(),
            citations: Vec::new(),
            taxonomy,
            report,
        })
    }

    pub fn add_authorship(&mut self, paper_id: &str, author_id: &str) -> Result<(), CorpusError> {
        self.report.authorships += 1;
        let Some(&paper) = self.paper_lookup.get(paper_id) else {
            self.report.authorships_unknown_paper += 1;
            return Ok(());
        };
        let author = match self.author_lookup.get(author_id) {
            Some(&a) => a,
            None => {
                if self.author_names.len() >= u32::MAX as usize {
                    return Err(CorpusError::TooLarge("authors"));
                }
                let a = self.author_names.len() as u32;
                self.author_names.push(author_id.to_string());
                self.author_lookup.insert(author_id.to_string(), a);
                a
            }
        };
        self.authorships.push((paper, author));
        Ok(())
    }

    pub fn add_citation(&mut self, citing: &str, cited: &str) {
        self.report.citations += 1;
        if citing == cited {
            self.report.citation_self_loops += 1;
            return;
        }
        match (self.paper_lookup.get(citing), self.paper_lookup.get(cited)) {
            (Some(&u), Some(&p)) => self.citations.push((u, p)),
            _ => self.report.citations_unknown_paper += 1,
        }
    }

    pub fn finish(self) -> CorpusIndex {
        let IndexBuilder {
            papers, paper_lookup, author_names, authorships, mut citations, taxonomy, mut report, ..
        } = self;

        // Re-number authors in identifier order.
        let mut order: Vec<u32> = (0..author_names.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| author_names[a as usize].cmp(&author_names[b as usize]));
        let mut remap = vec![0u32; author_names.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let mut names = author_names;
        let authors: Vec<String> = order.iter().map(|&old| std::mem::take(&mut names[old as usize])).collect();
        let author_lookup = authors.iter().enumerate().map(|(i, a)| (a.clone(), i as AuthorIdx)).collect();

        let mut by_paper: Vec<(u32, u32)> = authorships.iter().map(|&(p, a)| (p, remap[a as usize])).collect();
        by_paper.sort_unstable();
        let before = by_paper.len();
        by_paper.dedup();
        report.duplicate_authorships = before - by_paper.len();
        let authors_of = Adjacency::from_sorted_pairs(papers.len(), &by_paper);

        let mut by_author: Vec<(u32, u32)> = by_paper.iter().map(|&(p, a)| (a, p)).collect();
        drop(by_paper);
        by_author.sort_unstable();
        let papers_of = Adjacency::from_sorted_pairs(authors.len(), &by_author);
        drop(by_author);

        // Stored cited -> citing.
        for e in citations.iter_mut() {
            *e = (e.1, e.0);
        }
        citations.sort_unstable();
        let before = citations.len();
        citations.dedup();
        report.duplicate_citations = before - citations.len();
        let citers_of = Adjacency::from_sorted_pairs(papers.len(), &citations);

        CorpusIndex { papers, paper_lookup, authors, author_lookup, authors_of, papers_of, citers_of, taxonomy, report }
    }
}

/// Builds an index from fully materialized (or single-pass) record streams.
/// Unknown-paper rows are dropped and counted in [`CorpusIndex::report`].
pub fn build_index<P, A, C>(
    papers: P,
    authorships: A,
    citations: C,
    taxonomy: FieldTaxonomy,
) -> Result<CorpusIndex, CorpusError>
where
    P: IntoIterator<Item = PaperRecord>,
    A: IntoIterator<Item = AuthorshipRecord>,
    C: IntoIterator<Item = CitationEdge>,
{
    let mut builder = IndexBuilder::new(papers, taxonomy)?;
    for a in authorships {
        builder.add_authorship(&a.paper_id, &a.author_id)?;
    }
    for c in citations {
        builder.add_citation(&c.citing_paper_id, &c.cited_paper_id);
    }
    Ok(builder.finish())
}

/// Read-only corpus index; `Sync`, so it can be shared across worker threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusIndex {
    papers: Vec<PaperRecord>,
    paper_lookup: HashMap<String, PaperIdx>,
    authors: Vec<String>,
    author_lookup: HashMap<String, AuthorIdx>,
    authors_of: Adjacency,
    papers_of: Adjacency,
    citers_of: Adjacency,
    taxonomy: FieldTaxonomy,
    report: BuildReport,
}

impl CorpusIndex {
    pub fn report(&self) -> &BuildReport {
        &self.report
    }

    pub fn taxonomy(&self) -> &FieldTaxonomy {
        &self.taxonomy
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn author_count(&self) -> usize {
        self.authors.len()
    }

    pub fn citation_count(&self) -> usize {
        self.citers_of.edges()
    }

    pub fn paper(&self, p: PaperIdx) -> &PaperRecord {
        &self.papers[p as usize]
    }

    pub fn paper_idx(&self, paper_id: &str) -> Option<PaperIdx> {
        self.paper_lookup.get(paper_id).copied()
    }

    pub fn author_id(&self, a: AuthorIdx) -> &str {
        &self.authors[a as usize]
    }

    pub fn author_idx(&self, author_id: &str) -> Option<AuthorIdx> {
        self.author_lookup.get(author_id).copied()
    }

    /// All author identifiers in sorted order.
    pub fn author_ids(&self) -> impl ExactSizeIterator<Item = &str> {
        self.authors.iter().map(String::as_str)
    }

    pub fn authors_of(&self, p: PaperIdx) -> &[AuthorIdx] {
        self.authors_of.row(p)
    }

    pub fn papers_of(&self, a: AuthorIdx) -> &[PaperIdx] {
        self.papers_of.row(a)
    }

    /// Papers citing `p`, sorted.
    pub fn citers_of(&self, p: PaperIdx) -> &[PaperIdx] {
        self.citers_of.row(p)
    }

    pub fn field_of_paper(&self, p: PaperIdx) -> Option<&SubfieldEntry> {
        self.paper(p).subfield_id.as_deref().and_then(|s| self.taxonomy.lookup(s))
    }

    pub fn papers(&self) -> impl Iterator<Item = &PaperRecord> {
        self.papers.iter()
    }

    pub fn authorships(&self) -> impl Iterator<Item = AuthorshipRecord> + '_ {
        (0..self.papers.len() as u32).flat_map(move |p| {
            self.authors_of(p)
                .iter()
                .map(move |&a| AuthorshipRecord::new(self.paper(p).paper_id.as_str(), self.author_id(a)))
        })
    }

    pub fn citations(&self) -> impl Iterator<Item = CitationEdge> + '_ {
        (0..self.papers.len() as u32).flat_map(move |p| {
            self.citers_of(p)
                .iter()
                .map(move |&u| CitationEdge::new(self.paper(u).paper_id.as_str(), self.paper(p).paper_id.as_str()))
        })
    }

    /// Rough resident size of the index in bytes.
    pub fn approx_heap_bytes(&self) -> usize {
        let strings: usize = self.papers.iter().map(|p| p.paper_id.len() * 2 + 64).sum::<usize>()
            + self.authors.iter().map(|a| a.len() * 2 + 56).sum::<usize>();
        let adj = |a: &Adjacency| a.offsets.len() * 8 + a.targets.len() * 4;
        strings + adj(&self.authors_of) + adj(&self.papers_of) + adj(&self.citers_of)
    }
}
