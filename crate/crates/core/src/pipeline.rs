//! End-to-end run: ingest, index, cohort, metrics, tails and report files.
//!
//! Every output except the `runtime` section of `manifest.json` is a pure
//! function of the inputs and the [`RunConfig`]; thread count only changes
//! how fast it is produced.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cohort::{eligible_authors, EligibilityConfig};
use crate::corpus::{BuildReport, CorpusError, CorpusIndex, FieldTaxonomy, IndexBuilder};
use crate::ingest::{
    open_file, parse_taxonomy_named, AuthorshipReader, CitationReader, FileReport, IngestError, PaperReader,
};
use crate::metrics::{compute_all_metrics, AuthorMetrics, MetricError, MetricsConfig};
use crate::stats::{
    cohort_sorted_values, cooccurrence, histogram, tail_members, ContingencyTable, FieldAllocation, Histogram, Metric,
    StatsError, Tail, TailReport, TailSpec, DEFAULT_FOLD_CUTOFF,
};
use crate::synth::{DetectionScore, SynthError, TailMembers};
use crate::value::{format_fixed, format_significant, integer, MetricValue, Percent};

pub const DEFAULT_EXCLUDED_FIELD: &str = "Physics & Astronomy";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{file}: {source}")]
    Corpus { file: String, source: CorpusError },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("{path}: {message}")]
    Manifest { path: String, message: String },
    #[error("{0}")]
    Config(String),
}

impl PipelineError {
    /// Short machine-readable category used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Ingest(IngestError::Open { .. }) => "missing-input",
            PipelineError::Ingest(_) => "ingest",
            PipelineError::Corpus { .. } => "corpus",
            PipelineError::Metric(_) => "metrics",
            PipelineError::Stats(_) => "stats",
            PipelineError::Synth(_) => "synth",
            PipelineError::Output { .. } => "output",
            PipelineError::Manifest { .. } => "manifest",
            PipelineError::Config(_) => "config",
        }
    }
}

fn output_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Output { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputPaths {
    pub papers: PathBuf,
    pub authorships: PathBuf,
    pub citations: PathBuf,
    pub taxonomy: PathBuf,
}

impl InputPaths {
    /// The conventional file names inside one directory.
    pub fn in_dir(dir: &Path) -> Self {
        InputPaths {
            papers: dir.join("papers.csv"),
            authorships: dir.join("authorships.csv"),
            citations: dir.join("citations.csv"),
            taxonomy: dir.join("taxonomy.csv"),
        }
    }
}

/// Display range `[min, max)` of one metric's histogram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramRange {
    pub metric: Metric,
    pub min: MetricValue,
    pub max: MetricValue,
    pub bin_width: MetricValue,
}

impl HistogramRange {
    pub fn defaults() -> Vec<HistogramRange> {
        vec![
            HistogramRange {
                metric: Metric::CoverH2,
                min: integer(0),
                max: integer(20),
                bin_width: MetricValue::new(1, 10),
            },
            HistogramRange { metric: Metric::A50pc, min: integer(0), max: integer(201), bin_width: integer(1) },
            HistogramRange { metric: Metric::A50, min: integer(1), max: integer(41), bin_width: integer(1) },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub inputs: InputPaths,
    pub out_dir: PathBuf,
    pub eligibility: EligibilityConfig,
    pub metrics: MetricsConfig,
    /// One spec per reported metric. Excluded fields may be given by id or
    /// by name; they are resolved against the taxonomy at run time.
    pub tails: Vec<TailSpec>,
    pub histograms: Vec<HistogramRange>,
    /// Metric pairs for co-occurrence tables, each referring to the tail spec
    /// of that metric.
    pub cooccurrence: Vec<(Metric, Metric)>,
    pub fold_cutoff: f64,
}

impl RunConfig {
    pub fn new(inputs: InputPaths, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            inputs,
            out_dir: out_dir.into(),
            eligibility: EligibilityConfig::default(),
            metrics: MetricsConfig::default(),
            tails: default_tails(Percent::whole(1).expect("valid percent"), &[DEFAULT_EXCLUDED_FIELD.to_string()]),
            histograms: HistogramRange::defaults(),
            cooccurrence: vec![
                (Metric::CoverH2, Metric::A50pc),
                (Metric::A50pc, Metric::A50),
                (Metric::CoverH2, Metric::A50),
            ],
            fold_cutoff: DEFAULT_FOLD_CUTOFF,
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.eligibility.min_citations == 0 {
            return Err(PipelineError::Config(
                "min citations must be at least 1: C/h² is undefined for authors without citations".into(),
            ));
        }
        for m in self.tails.iter().map(|t| t.metric) {
            if self.tails.iter().filter(|t| t.metric == m).count() > 1 {
                return Err(PipelineError::Config(format!("more than one tail spec for {m}")));
            }
        }
        for &(a, b) in &self.cooccurrence {
            for m in [a, b] {
                if !self.tails.iter().any(|t| t.metric == m) {
                    return Err(PipelineError::Config(format!("co-occurrence pair uses {m}, which has no tail spec")));
                }
            }
        }
        if !(self.fold_cutoff.is_finite() && self.fold_cutoff >= 0.0) {
            return Err(PipelineError::Config(format!("invalid fold cutoff {}", self.fold_cutoff)));
        }
        Ok(())
    }
}

/// Lower tails for C/h² and A50%C, upper tail for A50. `excluded` applies to
/// the two co-authorship-based metrics only.
pub fn default_tails(percentile: Percent, excluded: &[String]) -> Vec<TailSpec> {
    vec![
        TailSpec::new(Metric::CoverH2, Tail::Lower, percentile),
        TailSpec::new(Metric::A50pc, Tail::Lower, percentile).excluding(excluded.iter().cloned()),
        TailSpec::new(Metric::A50, Tail::Upper, percentile).excluding(excluded.iter().cloned()),
    ]
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileCounts {
    pub rows_read: u64,
    pub emitted: u64,
    pub dropped: BTreeMap<String, u64>,
}

impl From<&FileReport> for FileCounts {
    fn from(r: &FileReport) -> Self {
        FileCounts { rows_read: r.rows_read, emitted: r.emitted, dropped: r.dropped.clone() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusions {
    pub resolved: Vec<String>,
    pub unresolved: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortCounts {
    pub authors: usize,
    pub eligible: usize,
    pub a50pc_undefined: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub threads: usize,
    pub timings_seconds: BTreeMap<String, f64>,
    pub total_seconds: f64,
    /// Peak resident set size of the process, where the platform reports it.
    pub peak_rss_bytes: Option<u64>,
    pub index_heap_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub config: RunConfig,
    pub seed: u64,
    pub exclusions: BTreeMap<Metric, Exclusions>,
    pub ingest: BTreeMap<String, FileCounts>,
    pub index: BuildReport,
    pub cohort: CohortCounts,
    pub outputs: Vec<String>,
    /// Varies between runs; everything else is reproducible.
    pub runtime: Runtime,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, PipelineError> {
        let bad = |message: String| PipelineError::Manifest { path: path.display().to_string(), message };
        let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub metrics: BTreeMap<String, AuthorMetrics>,
    pub tails: Vec<TailReport>,
    pub cooccurrence: Vec<((Metric, Metric), ContingencyTable)>,
}

struct Clock {
    start: Instant,
    lap: Instant,
    timings: BTreeMap<String, f64>,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Clock { start: now, lap: now, timings: BTreeMap::new() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.insert(stage.to_string(), (now - self.lap).as_secs_f64());
        self.lap = now;
    }
}

/// Index plus per-file row accounting.
pub struct Ingested {
    pub index: CorpusIndex,
    pub files: BTreeMap<String, FileReport>,
}

/// Streams the three tables into an [`IndexBuilder`]; only the index is
/// held afterwards.
pub fn ingest(inputs: &InputPaths) -> Result<Ingested, PipelineError> {
    let name = |p: &Path| p.display().to_string();
    // Open everything first so a missing file fails before any work.
    let tax_src = open_file(&inputs.taxonomy)?;
    let papers_src = open_file(&inputs.papers)?;
    let auth_src = open_file(&inputs.authorships)?;
    let cite_src = open_file(&inputs.citations)?;
    let mut files = BTreeMap::new();

    let (taxonomy, tax_report) = parse_taxonomy_named(tax_src, &name(&inputs.taxonomy))?;
    files.insert(name(&inputs.taxonomy), tax_report);

    let mut papers = PaperReader::new(papers_src, name(&inputs.papers));
    let mut failure = None;
    let built = IndexBuilder::new(papers.by_ref().map_while(|r| r.map_err(|e| failure = Some(e)).ok()), taxonomy);
    if let Some(e) = failure {
        return Err(e.into());
    }
    let mut builder = built.map_err(|source| PipelineError::Corpus { file: name(&inputs.papers), source })?;
    files.insert(name(&inputs.papers), papers.report());

    let mut authorships = AuthorshipReader::new(auth_src, name(&inputs.authorships));
    for rec in authorships.by_ref() {
        let rec = rec?;
        builder
            .add_authorship(&rec.paper_id, &rec.author_id)
            .map_err(|source| PipelineError::Corpus { file: name(&inputs.authorships), source })?;
    }
    files.insert(name(&inputs.authorships), authorships.report());

    let mut citations = CitationReader::new(cite_src, name(&inputs.citations));
    for rec in citations.by_ref() {
        let rec = rec?;
        builder.add_citation(&rec.citing_paper_id, &rec.cited_paper_id);
    }
    files.insert(name(&inputs.citations), citations.report());

    Ok(Ingested { index: builder.finish(), files })
}

/// Runs the whole pipeline on a dedicated pool of `threads` workers (rayon's
/// default when `None`) and writes every report into `cfg.out_dir`.
pub fn run_pipeline(cfg: &RunConfig, threads: Option<usize>) -> Result<RunOutput, PipelineError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_inner(cfg, pool.current_num_threads()))
}

fn run_inner(cfg: &RunConfig, threads: usize) -> Result<RunOutput, PipelineError> {
    let mut clock = Clock::new();
    let Ingested { index, files } = ingest(&cfg.inputs)?;
    clock.lap("ingest_and_index");
    for (file, report) in &files {
        clock.timings.insert(format!("read:{file}"), report.seconds);
    }

    let (specs, exclusions) = resolve_exclusions(&cfg.tails, index.taxonomy());
    let eligible = eligible_authors(&index, &cfg.eligibility, &cfg.metrics.rules);
    clock.lap("cohort");
    let metrics = compute_all_metrics(&index, eligible.iter().map(String::as_str), &cfg.metrics, cfg.eligibility.seed)?;
    clock.lap("metrics");

    let tails: Vec<TailReport> = specs.iter().map(|s| tail_members(&metrics, s)).collect::<Result<_, _>>()?;
    let mut histograms = Vec::new();
    for range in &cfg.histograms {
        let Some(spec) = specs.iter().find(|s| s.metric == range.metric) else { continue };
        let values = cohort_sorted_values(&metrics, spec);
        histograms.push((range.clone(), histogram(&values, range.bin_width, range.min, range.max)?));
    }
    let mut tables = Vec::new();
    for &(a, b) in &cfg.cooccurrence {
        let spec = |m: Metric| specs.iter().find(|s| s.metric == m).expect("validated pair");
        tables.push(((a, b), cooccurrence(&metrics, spec(a), spec(b))?));
    }
    clock.lap("stats");

    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(output_err(out))?;
    let mut outputs = Vec::new();
    let taxonomy = index.taxonomy();
    write_metrics(out, &metrics, &mut outputs)?;
    for t in &tails {
        write_tail(out, t, &mut outputs)?;
        write_allocation(out, t, taxonomy, cfg.fold_cutoff, &mut outputs)?;
    }
    for (range, h) in &histograms {
        write_histogram(out, range, h, &mut outputs)?;
    }
    write_summary(out, &tails, &histograms, &mut outputs)?;
    write_cooccurrence(out, &tails, &tables, &mut outputs)?;
    clock.lap("write");

    let mut manifest = Manifest {
        tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        config: cfg.clone(),
        seed: cfg.eligibility.seed,
        exclusions,
        ingest: files.iter().map(|(k, v)| (k.clone(), v.into())).collect(),
        index: index.report().clone(),
        cohort: CohortCounts {
            authors: index.author_count(),
            eligible: metrics.len(),
            a50pc_undefined: metrics.values().filter(|m| m.a50pc.is_none()).count(),
        },
        outputs,
        runtime: Runtime {
            threads,
            timings_seconds: BTreeMap::new(),
            total_seconds: 0.0,
            peak_rss_bytes: None,
            index_heap_bytes: index.approx_heap_bytes(),
        },
    };
    manifest.outputs.push(MANIFEST_FILE.to_string());
    manifest.runtime.total_seconds = clock.start.elapsed().as_secs_f64();
    manifest.runtime.timings_seconds = clock.timings;
    manifest.runtime.peak_rss_bytes = peak_rss_bytes();
    let path = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| PipelineError::Manifest { path: path.display().to_string(), message: e.to_string() })?;
    text.push('\n');
    fs::write(&path, text).map_err(output_err(&path))?;

    Ok(RunOutput { manifest, metrics, tails, cooccurrence: tables })
}

/// Maps excluded ids or names to field ids. Unknown entries are kept aside
/// and reported instead of failing the run, so the default exclusion works
/// on corpora that lack the field.
fn resolve_exclusions(specs: &[TailSpec], taxonomy: &FieldTaxonomy) -> (Vec<TailSpec>, BTreeMap<Metric, Exclusions>) {
    let mut resolved_specs = Vec::new();
    let mut report = BTreeMap::new();
    for spec in specs {
        let mut ex = Exclusions::default();
        for f in &spec.excluded_fields {
            match taxonomy.resolve_field(f) {
                Some(id) => ex.resolved.push(id.to_string()),
                None => ex.unresolved.push(f.clone()),
            }
        }
        ex.resolved.sort();
        ex.resolved.dedup();
        let mut s = spec.clone();
        s.excluded_fields = ex.resolved.iter().cloned().collect();
        resolved_specs.push(s);
        report.insert(spec.metric, ex);
    }
    (resolved_specs, report)
}

/// Peak resident set size from `/proc/self/status` (Linux only).
pub fn peak_rss_bytes() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

struct Report {
    path: PathBuf,
    w: csv::Writer<BufWriter<File>>,
}

impl Report {
    fn create(dir: &Path, name: &str, header: &[&str], outputs: &mut Vec<String>) -> Result<Report, PipelineError> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(output_err(&path))?;
        let w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::with_capacity(1 << 16, file));
        outputs.push(name.to_string());
        let mut r = Report { path, w };
        r.row(header)?;
        Ok(r)
    }

    fn row<I, T>(&mut self, fields: I) -> Result<(), PipelineError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.w
            .write_record(fields)
            .map_err(|e| PipelineError::Output { path: self.path.display().to_string(), source: io::Error::other(e) })
    }

    fn finish(mut self) -> Result<(), PipelineError> {
        self.w.flush().map_err(output_err(&self.path))?;
        let inner = self.w.into_inner().map_err(|e| PipelineError::Output {
            path: self.path.display().to_string(),
            source: io::Error::other(e.to_string()),
        })?;
        inner.into_inner().map_err(|e| e.into_error()).and_then(|mut f| f.flush()).map_err(output_err(&self.path))
    }
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

fn exact(v: MetricValue) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

fn fmt_value(metric: Metric, v: MetricValue) -> String {
    format_fixed(v, metric.decimals())
}

fn fmt_f64(x: f64, places: usize) -> String {
    if x.is_nan() {
        "NA".into()
    } else if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x:.places$}")
    }
}

pub const METRICS_HEADER: &[&str] = &[
    "author_id",
    "field_id",
    "subfield_id",
    "n_full_papers",
    "citations",
    "h_index",
    "c_over_h2",
    "c_over_h2_exact",
    "a50pc",
    "a50",
];

fn write_metrics(
    dir: &Path,
    metrics: &BTreeMap<String, AuthorMetrics>,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let mut r = Report::create(dir, "metrics.csv", METRICS_HEADER, outputs)?;
    for m in metrics.values() {
        r.row([
            m.author_id.clone(),
            opt(&m.field_id).to_string(),
            opt(&m.subfield_id).to_string(),
            m.n_full_papers.to_string(),
            m.citations.to_string(),
            m.h_index.to_string(),
            fmt_value(Metric::CoverH2, m.c_over_h2),
            exact(m.c_over_h2),
            m.a50pc.map_or_else(|| "NA".to_string(), |v| v.to_string()),
            m.a50.to_string(),
        ])?;
    }
    r.finish()
}

fn write_tail(dir: &Path, t: &TailReport, outputs: &mut Vec<String>) -> Result<(), PipelineError> {
    let metric = t.spec.metric;
    let name = format!("tail_{metric}.csv");
    let mut r = Report::create(dir, &name, &["rank", "author_id", "field_id", "subfield_id", metric.name()], outputs)?;
    for (i, m) in t.members.iter().enumerate() {
        r.row([
            (i + 1).to_string(),
            m.author_id.clone(),
            opt(&m.field_id).to_string(),
            opt(&m.subfield_id).to_string(),
            fmt_value(metric, m.value),
        ])?;
    }
    r.finish()
}

const ALLOCATION_COLUMNS: [&str; 6] =
    ["cohort_count", "cohort_share_pct", "tail_count", "tail_share_pct", "fold", "flagged"];

fn allocation_row(a: &FieldAllocation, cutoff: f64, labels: &[&str]) -> Vec<String> {
    let flagged = a.tail_count > 0 && a.fold > cutoff;
    let mut row = vec![a.field_id.clone()];
    row.extend(labels.iter().map(|l| l.to_string()));
    row.extend([
        a.cohort_count.to_string(),
        fmt_f64(a.cohort_share * 100.0, 2),
        a.tail_count.to_string(),
        fmt_f64(a.tail_share * 100.0, 2),
        fmt_f64(a.fold, 4),
        flagged.to_string(),
    ]);
    row
}

fn write_allocation(
    dir: &Path,
    t: &TailReport,
    taxonomy: &FieldTaxonomy,
    cutoff: f64,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let metric = t.spec.metric;
    let header: Vec<&str> = ["field_id", "field_name"].into_iter().chain(ALLOCATION_COLUMNS).collect();
    let mut r = Report::create(dir, &format!("allocation_{metric}.csv"), &header, outputs)?;
    for a in &t.field_allocation {
        r.row(allocation_row(a, cutoff, &[taxonomy.field_name(&a.field_id).unwrap_or("")]))?;
    }
    r.finish()?;

    let header: Vec<&str> =
        ["subfield_id", "subfield_name", "field_id"].into_iter().chain(ALLOCATION_COLUMNS).collect();
    let mut r = Report::create(dir, &format!("allocation_{metric}_subfield.csv"), &header, outputs)?;
    for a in &t.subfield_allocation {
        let entry = taxonomy.lookup(&a.field_id);
        let labels = [entry.map_or("", |e| e.subfield_name.as_str()), entry.map_or("", |e| e.field_id.as_str())];
        r.row(allocation_row(a, cutoff, &labels))?;
    }
    r.finish()
}

/// Decimal places needed to print every bin start of width `w` exactly.
fn bin_places(w: MetricValue) -> u32 {
    (0..=9).find(|&k| (w * integer(10u64.pow(k))).is_integer()).unwrap_or(9)
}

fn write_histogram(
    dir: &Path,
    range: &HistogramRange,
    h: &Histogram,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let places = bin_places(range.bin_width).max(bin_places(range.min));
    let mut r = Report::create(dir, &format!("hist_{}.csv", range.metric), &["bin_start", "count"], outputs)?;
    for &(start, count) in &h.bins {
        r.row([format_fixed(start, places), count.to_string()])?;
    }
    r.finish()
}

fn write_summary(
    dir: &Path,
    tails: &[TailReport],
    histograms: &[(HistogramRange, Histogram)],
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let header = [
        "metric",
        "tail",
        "percentile",
        "excluded_fields",
        "cohort_size",
        "threshold",
        "tail_count",
        "q1",
        "median",
        "q3",
        "hist_below",
        "hist_above",
    ];
    let mut r = Report::create(dir, "summary.csv", &header, outputs)?;
    for t in tails {
        let m = t.spec.metric;
        let hist = histograms.iter().find(|(range, _)| range.metric == m).map(|(_, h)| h);
        let excluded: Vec<&str> = t.spec.excluded_fields.iter().map(String::as_str).collect();
        r.row([
            m.name().to_string(),
            t.spec.tail.name().to_string(),
            t.spec.percentile.to_string(),
            excluded.join(";"),
            t.cohort_size.to_string(),
            fmt_value(m, t.threshold),
            t.members.len().to_string(),
            fmt_value(m, t.summary.q1),
            fmt_value(m, t.summary.median),
            fmt_value(m, t.summary.q3),
            hist.map_or(String::new(), |h| h.below.to_string()),
            hist.map_or(String::new(), |h| h.above.to_string()),
        ])?;
    }
    r.finish()
}

fn write_cooccurrence(
    dir: &Path,
    tails: &[TailReport],
    tables: &[((Metric, Metric), ContingencyTable)],
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let header = [
        "metric_a",
        "tail_a",
        "metric_b",
        "tail_b",
        "a",
        "b",
        "c",
        "d",
        "total",
        "odds_ratio_exact",
        "odds_ratio",
        "ci_low",
        "ci_high",
        "odds_ratio_2sf",
        "ci_low_2sf",
        "ci_high_2sf",
        "status",
    ];
    let tail_of = |m: Metric| tails.iter().find(|t| t.spec.metric == m).map_or("", |t| t.spec.tail.name());
    let sig = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format_significant(v, 2));
    let mut r = Report::create(dir, "cooccur.csv", &header, outputs)?;
    for ((ma, mb), t) in tables {
        r.row([
            ma.name().to_string(),
            tail_of(*ma).to_string(),
            mb.name().to_string(),
            tail_of(*mb).to_string(),
            t.a.to_string(),
            t.b.to_string(),
            t.c.to_string(),
            t.d.to_string(),
            t.total().to_string(),
            t.odds_ratio_exact().map_or_else(|| "NA".to_string(), |r| format!("{}/{}", r.numer(), r.denom())),
            fmt_f64(t.odds_ratio, 6),
            t.ci_low.map_or_else(|| "NA".to_string(), |v| fmt_f64(v, 6)),
            t.ci_high.map_or_else(|| "NA".to_string(), |v| fmt_f64(v, 6)),
            format_significant(t.odds_ratio, 2),
            sig(t.ci_low),
            sig(t.ci_high),
            t.status.name().to_string(),
        ])?;
    }
    r.finish()
}

/// Strips the run-specific `runtime` section so two manifests can be compared.
pub fn manifest_without_runtime(text: &str) -> Result<serde_json::Value, serde_json::Error> {
    let mut v: serde_json::Value = serde_json::from_str(text)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("runtime");
    }
    Ok(v)
}

/// Reads tail membership back from a run directory (`summary.csv` plus each
/// `tail_<metric>.csv`).
pub fn load_tails(run_dir: &Path) -> Result<Vec<TailMembers>, PipelineError> {
    let read_err = |path: &Path, e: csv::Error| PipelineError::Output {
        path: path.display().to_string(),
        source: io::Error::other(e.to_string()),
    };
    let summary = run_dir.join("summary.csv");
    let mut r = csv::Reader::from_path(&summary).map_err(|e| read_err(&summary, e))?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| read_err(&summary, e))?;
        let metric: Metric = row[0]
            .parse()
            .map_err(|message| PipelineError::Manifest { path: summary.display().to_string(), message })?;
        let tail = match &row[1] {
            s if s == Tail::Lower.name() => Tail::Lower,
            s if s == Tail::Upper.name() => Tail::Upper,
            other => {
                return Err(PipelineError::Manifest {
                    path: summary.display().to_string(),
                    message: format!("unknown tail {other:?}"),
                })
            }
        };
        let path = run_dir.join(format!("tail_{metric}.csv"));
        let mut t = csv::Reader::from_path(&path).map_err(|e| read_err(&path, e))?;
        let mut members = BTreeSet::new();
        for rec in t.records() {
            members.insert(rec.map_err(|e| read_err(&path, e))?[1].to_string());
        }
        out.push(TailMembers { metric, tail, members });
    }
    Ok(out)
}

pub const DETECTION_HEADER: &[&str] =
    &["motif", "metric", "tail", "designated", "planted", "recovered", "tail_size", "recall", "precision"];

pub fn write_detection<W: Write>(scores: &[DetectionScore], sink: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(DETECTION_HEADER)?;
    let ratio = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"));
    for s in scores {
        w.write_record([
            s.motif.name().to_string(),
            s.metric.name().to_string(),
            s.tail.name().to_string(),
            s.designated.to_string(),
            s.planted.to_string(),
            s.recovered.to_string(),
            s.tail_size.to_string(),
            ratio(s.recall),
            ratio(s.precision),
        ])?;
    }
    w.flush()?;
    Ok(())
}
