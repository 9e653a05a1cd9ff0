//! Streaming readers for the four corpus files.
//!
//! Each file is UTF-8 CSV (RFC 4180 quoting, LF or CRLF) whose first row must
//! be exactly the documented header. Readers hold one record buffer and
//! yield rows lazily, so memory use per file is constant.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::marker::PhantomData;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorshipRecord, CitationEdge, CorpusError, DocType, FieldTaxonomy, PaperRecord, SubfieldEntry};

pub const PAPERS_HEADER: &[&str] = &["paper_id", "doc_type", "subfield_id"];
pub const AUTHORSHIPS_HEADER: &[&str] = &["paper_id", "author_id"];
pub const CITATIONS_HEADER: &[&str] = &["citing_paper_id", "cited_paper_id"];
pub const TAXONOMY_HEADER: &[&str] = &["subfield_id", "subfield_name", "field_id", "field_name"];

pub const DROP_SELF_LOOP: &str = "self_loop";

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{file}: cannot open: {source}")]
    Open { file: String, source: std::io::Error },
    #[error("{file}:{line}: malformed CSV: {message}")]
    Malformed { file: String, line: u64, message: String },
    #[error("{file}: expected header {expected:?}, found {found:?}")]
    Header { file: String, expected: String, found: String },
    #[error("{file}:{line}: empty {column}")]
    EmptyField { file: String, line: u64, column: &'static str },
    #[error("{file}:{line}: {source}")]
    Taxonomy { file: String, line: u64, source: CorpusError },
}

impl IngestError {
    pub fn file(&self) -> &str {
        match self {
            IngestError::Open { file, .. }
            | IngestError::Malformed { file, .. }
            | IngestError::Header { file, .. }
            | IngestError::EmptyField { file, .. }
            | IngestError::Taxonomy { file, .. } => file,
        }
    }
}

/// Row accounting for one file. `rows_read` includes the header row.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FileReport {
    pub rows_read: u64,
    pub emitted: u64,
    pub dropped: BTreeMap<String, u64>,
    pub seconds: f64,
}

impl FileReport {
    pub fn rows_dropped(&self) -> u64 {
        self.dropped.values().sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub files: BTreeMap<String, FileReport>,
}

impl IngestReport {
    pub fn total_seconds(&self) -> f64 {
        self.files.values().map(|f| f.seconds).sum()
    }
}

/// How one CSV row becomes a record. `Ok(None)` means "dropped", with the
/// reason returned alongside.
pub trait RowKind {
    const HEADER: &'static [&'static str];
    type Record;
    fn decode(
        row: &csv::StringRecord,
        file: &str,
        line: u64,
    ) -> Result<Result<Self::Record, &'static str>, IngestError>;
}

pub struct Papers;
pub struct Authorships;
pub struct Citations;

fn field(row: &csv::StringRecord, i: usize) -> &str {
    row.get(i).unwrap_or("")
}

fn required<'r>(
    row: &'r csv::StringRecord,
    i: usize,
    column: &'static str,
    file: &str,
    line: u64,
) -> Result<&'r str, IngestError> {
    let v = field(row, i);
    if v.is_empty() {
        return Err(IngestError::EmptyField { file: file.to_string(), line, column });
    }
    Ok(v)
}

impl RowKind for Papers {
    const HEADER: &'static [&'static str] = PAPERS_HEADER;
    type Record = PaperRecord;

    fn decode(
        row: &csv::StringRecord,
        file: &str,
        line: u64,
    ) -> Result<Result<PaperRecord, &'static str>, IngestError> {
        let paper_id = required(row, 0, "paper_id", file, line)?;
        let subfield = field(row, 2);
        Ok(Ok(PaperRecord {
            paper_id: paper_id.to_string(),
            doc_type: DocType::parse(field(row, 1)),
            subfield_id: (!subfield.is_empty()).then(|| subfield.to_string()),
        }))
    }
}

impl RowKind for Authorships {
    const HEADER: &'static [&'static str] = AUTHORSHIPS_HEADER;
    type Record = AuthorshipRecord;

    fn decode(
        row: &csv::StringRecord,
        file: &str,
        line: u64,
    ) -> Result<Result<AuthorshipRecord, &'static str>, IngestError> {
        let paper_id = required(row, 0, "paper_id", file, line)?;
        let author_id = required(row, 1, "author_id", file, line)?;
        Ok(Ok(AuthorshipRecord::new(paper_id, author_id)))
    }
}

impl RowKind for Citations {
    const HEADER: &'static [&'static str] = CITATIONS_HEADER;
    type Record = CitationEdge;

    fn decode(
        row: &csv::StringRecord,
        file: &str,
        line: u64,
    ) -> Result<Result<CitationEdge, &'static str>, IngestError> {
        let citing = required(row, 0, "citing_paper_id", file, line)?;
        let cited = required(row, 1, "cited_paper_id", file, line)?;
        if citing == cited {
            return Ok(Err(DROP_SELF_LOOP));
        }
        Ok(Ok(CitationEdge::new(citing, cited)))
    }
}

/// Lazily decodes one CSV file. Iteration stops at the first error.
pub struct RowReader<R: Read, K: RowKind> {
    reader: csv::Reader<R>,
    row: csv::StringRecord,
    file: String,
    report: FileReport,
    started: Instant,
    header_checked: bool,
    failed: bool,
    kind: PhantomData<K>,
}

pub type PaperReader<R> = RowReader<R, Papers>;
pub type AuthorshipReader<R> = RowReader<R, Authorships>;
pub type CitationReader<R> = RowReader<R, Citations>;

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).flexible(false).from_reader(source)
}

fn malformed(file: &str, err: csv::Error) -> IngestError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    IngestError::Malformed { file: file.to_string(), line, message: err.to_string() }
}

fn check_header(row: Option<&csv::StringRecord>, expected: &[&str], file: &str) -> Result<(), IngestError> {
    let found: Vec<&str> = row.map(|r| r.iter().collect()).unwrap_or_default();
    // Tolerate a UTF-8 byte-order mark on the first column.
    let first_ok = found.first().map(|f| f.trim_start_matches('\u{feff}')) == expected.first().copied();
    if found.len() != expected.len() || !first_ok || found[1..] != expected[1..] {
        return Err(IngestError::Header {
            file: file.to_string(),
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

impl<R: Read, K: RowKind> RowReader<R, K> {
    /// `file` is the name used in errors and reports.
    pub fn new(source: R, file: impl Into<String>) -> Self {
        RowReader {
            reader: csv_reader(source),
            row: csv::StringRecord::new(),
            file: file.into(),
            report: FileReport::default(),
            started: Instant::now(),
            header_checked: false,
            failed: false,
            kind: PhantomData,
        }
    }

    pub fn report(&self) -> FileReport {
        let mut r = self.report.clone();
        r.seconds = self.started.elapsed().as_secs_f64();
        r
    }

    pub fn file(&self) -> &str {
        &self.file
    }

    fn read_header(&mut self) -> Result<(), IngestError> {
        let got = self.reader.read_record(&mut self.row).map_err(|e| malformed(&self.file, e))?;
        if got {
            self.report.rows_read += 1;
        }
        check_header(got.then_some(&self.row), K::HEADER, &self.file)
    }

    fn next_row(&mut self) -> Option<Result<K::Record, IngestError>> {
        if !self.header_checked {
            self.header_checked = true;
            if let Err(e) = self.read_header() {
                return Some(Err(e));
            }
        }
        loop {
            match self.reader.read_record(&mut self.row) {
                Ok(false) => return None,
                Ok(true) => {
                    self.report.rows_read += 1;
                    let line = self.row.position().map(|p| p.line()).unwrap_or(0);
                    match K::decode(&self.row, &self.file, line) {
                        Ok(Ok(rec)) => {
                            self.report.emitted += 1;
                            return Some(Ok(rec));
                        }
                        Ok(Err(reason)) => {
                            *self.report.dropped.entry(reason.to_string()).or_default() += 1;
                        }
                        Err(e) => return Some(Err(e)),
                    }
                }
                Err(e) => return Some(Err(malformed(&self.file, e))),
            }
        }
    }
}

impl<R: Read, K: RowKind> Iterator for RowReader<R, K> {
    type Item = Result<K::Record, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let item = self.next_row();
        if matches!(item, Some(Err(_))) {
            self.failed = true;
        }
        item
    }
}

pub fn open_file(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(|f| BufReader::with_capacity(1 << 20, f))
        .map_err(|source| IngestError::Open { file: path.display().to_string(), source })
}

fn collect_all<R: Read, K: RowKind>(reader: RowReader<R, K>) -> Result<(Vec<K::Record>, FileReport), IngestError> {
    let mut reader = reader;
    let mut out = Vec::new();
    for rec in reader.by_ref() {
        out.push(rec?);
    }
    Ok((out, reader.report()))
}

pub fn parse_papers<R: Read>(source: R) -> Result<Vec<PaperRecord>, IngestError> {
    collect_all(PaperReader::new(source, "papers.csv")).map(|(v, _)| v)
}

pub fn parse_authorships<R: Read>(source: R) -> Result<Vec<AuthorshipRecord>, IngestError> {
    collect_all(AuthorshipReader::new(source, "authorships.csv")).map(|(v, _)| v)
}

/// Self-loop rows are dropped; the returned report counts them.
pub fn parse_citations<R: Read>(source: R) -> Result<(Vec<CitationEdge>, FileReport), IngestError> {
    collect_all(CitationReader::new(source, "citations.csv"))
}

pub fn parse_taxonomy<R: Read>(source: R) -> Result<FieldTaxonomy, IngestError> {
    parse_taxonomy_named(source, "taxonomy.csv").map(|(t, _)| t)
}

pub fn parse_taxonomy_named<R: Read>(source: R, file: &str) -> Result<(FieldTaxonomy, FileReport), IngestError> {
    let started = Instant::now();
    let mut reader = csv_reader(source);
    let mut row = csv::StringRecord::new();
    let mut report = FileReport::default();
    let got = reader.read_record(&mut row).map_err(|e| malformed(file, e))?;
    if got {
        report.rows_read += 1;
    }
    check_header(got.then_some(&row), TAXONOMY_HEADER, file)?;
    let mut taxonomy = FieldTaxonomy::new();
    while reader.read_record(&mut row).map_err(|e| malformed(file, e))? {
        report.rows_read += 1;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let subfield_id = required(&row, 0, "subfield_id", file, line)?;
        let entry = SubfieldEntry {
            subfield_name: field(&row, 1).to_string(),
            field_id: required(&row, 2, "field_id", file, line)?.to_string(),
            field_name: field(&row, 3).to_string(),
        };
        taxonomy.insert(subfield_id, entry).map_err(|source| IngestError::Taxonomy {
            file: file.to_string(),
            line,
            source,
        })?;
        report.emitted += 1;
    }
    report.seconds = started.elapsed().as_secs_f64();
    Ok((taxonomy, report))
}
