//! Acceptance suite: one PASS/FAIL line per criterion, details indented
//! below it. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cite_orch::cohort::EligibilityConfig;
use cite_orch::corpus::{
    build_index, AuthorIdx, AuthorshipRecord, CitationEdge, CorpusIndex, DocType, FieldTaxonomy, PaperRecord,
};
use cite_orch::metrics::{
    a50_coauthors, a50pc_greedy, a50pc_oracle, compute_all_metrics, h_index, AuthorMetrics, CountingRules,
    MetricsConfig,
};
use cite_orch::pipeline::{manifest_without_runtime, run_pipeline, InputPaths, RunConfig, MANIFEST_FILE};
use cite_orch::stats::{
    cooccurrence, enrichment_flags, reference, FieldAllocation, Metric, Tail, TailSpec, DEFAULT_FOLD_CUTOFF,
};
use cite_orch::synth::{evaluate_detection, generate, write_corpus, Motif, SynthConfig, SynthCorpus, TailMembers};
use cite_orch::value::{format_fixed, format_significant, MetricValue, Percent};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance on enrichment folds recomputed from published shares.
const FOLD_TOL: f64 = 0.01;
const OR_SIG_FIGS: u32 = 2;
const CRIT1_BUDGET: Duration = Duration::from_secs(1);
const CRIT3_BUDGET: Duration = Duration::from_secs(60);
const CRIT3_CORPORA: usize = 1000;
const CRIT3_H_VECTORS: usize = 10_000;
const CRIT5_BUDGET: Duration = Duration::from_secs(300);
const CRIT5_SELF_CARTEL_RECALL: f64 = 0.9;
const CRIT7_BUDGET_SECONDS: f64 = 60.0;
const CRIT7_MEMORY_BYTES: u64 = 4 << 30;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome { pass, summary: summary.into(), details: Vec::new() }
    }

    fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

fn pct(p: u64) -> Percent {
    Percent::whole(p).unwrap()
}

/// Rounded to two significant figures, then compared as numbers, so "0.090"
/// equals a published "0.09".
fn matches_published(x: f64, published: &str) -> bool {
    format_significant(x, OR_SIG_FIGS).parse::<f64>().unwrap() == published.parse::<f64>().unwrap()
}

// Criterion 1 ------------------------------------------------------------

/// Three published co-occurrence tables over one cohort of 1,322,652
/// authors, as (lower C/h², lower A50%C, upper A50) membership counts.
fn published_cohort() -> BTreeMap<String, AuthorMetrics> {
    // Joint cells with no author in all three tails; every pairwise table
    // then has the published counts.
    let cells: [((bool, bool, bool), u64); 7] = [
        ((true, true, false), 659),
        ((true, false, true), 11),
        ((false, true, true), 151),
        ((true, false, false), 12_555),
        ((false, true, false), 10_467),
        ((false, false, true), 11_853),
        ((false, false, false), 1_322_652 - 35_696),
    ];
    let mut out = BTreeMap::new();
    let mut n = 0u64;
    for ((x, y, z), count) in cells {
        for _ in 0..count {
            let id = format!("a{n:07}");
            n += 1;
            let m = AuthorMetrics {
                author_id: id.clone(),
                n_full_papers: 6,
                citations: 1000,
                h_index: 10,
                c_over_h2: MetricValue::from_integer(if x { 1 } else { 2 }),
                a50pc: Some(if y { 1 } else { 2 }),
                a50: if z { 10 } else { 0 },
                field_id: Some("F01".into()),
                subfield_id: None,
            };
            out.insert(id, m);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let cohort = published_cohort();
    let x = TailSpec::new(Metric::CoverH2, Tail::Lower, pct(1));
    let y = TailSpec::new(Metric::A50pc, Tail::Lower, pct(1));
    let z = TailSpec::new(Metric::A50, Tail::Upper, pct(1));
    let expected = [
        (&x, &y, [659, 12566, 10618, 1298809], ["6.4", "5.9", "6.9"]),
        (&x, &z, [11, 13214, 12004, 1297423], ["0.09", "0.05", "0.16"]),
        (&y, &z, [151, 11126, 11864, 1299511], ["1.5", "1.3", "1.7"]),
    ];
    let start = Instant::now();
    let tables: Vec<_> = expected.iter().map(|(a, b, ..)| cooccurrence(&cohort, a, b).unwrap()).collect();
    let elapsed = start.elapsed();

    let mut pass = elapsed < CRIT1_BUDGET;
    let mut details = Vec::new();
    for (t, (a, b, counts, published)) in tables.iter().zip(&expected) {
        let got = [t.odds_ratio, t.ci_low.unwrap_or(f64::NAN), t.ci_high.unwrap_or(f64::NAN)];
        let counts_ok = [t.a, t.b, t.c, t.d] == *counts;
        let values_ok: Vec<bool> = got.iter().zip(published).map(|(&g, p)| matches_published(g, p)).collect();
        pass &= counts_ok && values_ok.iter().all(|&ok| ok);
        let shown: Vec<String> = got
            .iter()
            .zip(published)
            .zip(&values_ok)
            .map(|((g, p), ok)| {
                format!(
                    "{} (exact {g:.6}, published {p}{})",
                    format_significant(*g, 2),
                    if *ok { "" } else { ", MISMATCH" }
                )
            })
            .collect();
        details.push(format!(
            "{} x {}: counts {:?}{} OR {} CI [{}, {}]",
            a.metric,
            b.metric,
            [t.a, t.b, t.c, t.d],
            if counts_ok { "" } else { " MISMATCH" },
            shown[0],
            shown[1],
            shown[2]
        ));
    }
    let mut o = Outcome::new(
        pass,
        format!("published odds ratios and 95% CIs at 2 s.f., cooccurrence in {elapsed:.2?} (< 1 s)"),
    );
    o.details = details;
    o
}

// Criterion 2 ------------------------------------------------------------

/// Field, cohort %, lower C/h² tail %, lower A50%C tail %, upper A50 tail %
/// (the last two exclude Physics & Astronomy and have no value for it).
type ShareRow = (&'static str, f64, f64, Option<f64>, Option<f64>);

const PUBLISHED_SHARES: [ShareRow; 22] = [
    ("Agriculture, Fisheries & Forestry", 2.39, 5.74, Some(2.19), Some(1.43)),
    ("Biology", 4.33, 5.99, Some(4.34), Some(0.75)),
    ("Biomedical Research", 12.66, 12.19, Some(4.76), Some(9.03)),
    ("Built Environment & Design", 0.24, 0.25, Some(0.44), Some(0.02)),
    ("Chemistry", 6.13, 13.80, Some(15.47), Some(3.07)),
    ("Clinical Medicine", 38.71, 29.20, Some(17.09), Some(73.29)),
    ("Communication & Textual Studies", 0.11, 0.03, Some(0.26), Some(0.00)),
    ("Earth & Environmental Sciences", 3.88, 5.93, Some(4.82), Some(1.34)),
    ("Economics & Business", 1.39, 0.62, Some(2.13), Some(0.00)),
    ("Enabling & Strategic Technologies", 6.80, 7.96, Some(10.84), Some(7.31)),
    ("Engineering", 3.75, 4.64, Some(12.18), Some(1.17)),
    ("General Arts, Humanities & Social Sciences", 0.00, 0.00, Some(0.00), Some(0.00)),
    ("General Science & Technology", 0.01, 0.00, Some(0.00), Some(0.00)),
    ("Historical Studies", 0.10, 0.08, Some(0.24), Some(0.00)),
    ("Information & Communication Technologies", 3.82, 1.06, Some(11.00), Some(1.59)),
    ("Mathematics & Statistics", 0.64, 0.48, Some(9.44), Some(0.04)),
    ("Philosophy & Theology", 0.03, 0.00, Some(0.16), Some(0.00)),
    ("Physics & Astronomy", 11.63, 9.77, None, None),
    ("Psychology & Cognitive Sciences", 1.22, 0.84, Some(1.99), Some(0.25)),
    ("Public Health & Health Services", 1.33, 0.92, Some(0.96), Some(0.67)),
    ("Social Sciences", 0.83, 0.46, Some(1.68), Some(0.03)),
    ("Visual & Performing Arts", 0.00, 0.00, Some(0.02), Some(0.00)),
];

fn published_allocation(column: usize) -> Vec<FieldAllocation> {
    PUBLISHED_SHARES
        .iter()
        .filter_map(|&(field, cohort, c_over_h2, a50pc, a50)| {
            let tail = match column {
                0 => Some(c_over_h2),
                1 => a50pc,
                _ => a50,
            }?;
            Some(FieldAllocation::from_shares(field, cohort / 100.0, tail / 100.0, u64::from(tail > 0.0)))
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (column, field, expected) in [(0, "Chemistry", 2.25), (2, "Clinical Medicine", 1.89)] {
        let alloc = published_allocation(column);
        let row = alloc.iter().find(|a| a.field_id == field).unwrap();
        let flagged = enrichment_flags(&alloc, DEFAULT_FOLD_CUTOFF).contains(field);
        let ok = (row.fold - expected).abs() <= FOLD_TOL && flagged;
        pass &= ok;
        details.push(format!("{field}: fold {:.4} (expected {expected} ± {FOLD_TOL}), flagged {flagged}", row.fold));
    }
    for (column, name) in [(0, "c_over_h2 lower"), (1, "a50pc lower"), (2, "a50 upper")] {
        let alloc = published_allocation(column);
        let flags = enrichment_flags(&alloc, DEFAULT_FOLD_CUTOFF);
        let wrongly: Vec<&str> = alloc
            .iter()
            .filter(|a| a.tail_share < a.cohort_share && flags.contains(&a.field_id))
            .map(|a| a.field_id.as_str())
            .collect();
        pass &= wrongly.is_empty();
        details.push(format!(
            "{name}: {} flagged, {} under-represented fields flagged {:?}",
            flags.len(),
            wrongly.len(),
            wrongly
        ));
    }
    let mut o = Outcome::new(pass, "enrichment folds from published field shares");
    o.details = details;
    o
}

// Criterion 3 ------------------------------------------------------------

/// Up to 50 authors, 120 papers of mixed types with zero to four authors
/// each, and up to 300 citation rows including self-loops and duplicates.
fn random_corpus(rng: &mut ChaCha8Rng) -> (CorpusIndex, Vec<String>, usize) {
    let n_authors = rng.gen_range(2..=50);
    let n_papers = rng.gen_range(2..=120);
    let n_edges = rng.gen_range(0..=300);
    let doc_types = [DocType::Article, DocType::Review, DocType::ConferencePaper, DocType::Other];
    let pid = |i: usize| format!("p{i:03}");
    let papers: Vec<PaperRecord> =
        (0..n_papers).map(|i| PaperRecord::new(pid(i), doc_types[rng.gen_range(0..4)], None)).collect();
    let mut authorships = Vec::new();
    for i in 0..n_papers {
        for _ in 0..rng.gen_range(0..=4) {
            authorships.push(AuthorshipRecord::new(pid(i), format!("x{:02}", rng.gen_range(0..n_authors))));
        }
    }
    let citations: Vec<CitationEdge> = (0..n_edges)
        .map(|_| CitationEdge::new(pid(rng.gen_range(0..n_papers)), pid(rng.gen_range(0..n_papers))))
        .collect();
    let mut authors: Vec<String> = authorships.iter().map(|a| a.author_id.clone()).collect();
    authors.sort();
    authors.dedup();
    let index = build_index(papers, authorships, citations, FieldTaxonomy::new()).unwrap();
    (index, authors, n_edges)
}

/// Largest h with at least h counts of h or more, by trying every h.
fn h_index_brute(counts: &[u64]) -> u32 {
    (0..=counts.len() as u64).filter(|&h| counts.iter().filter(|&&c| c >= h).count() as u64 >= h).max().unwrap_or(0)
        as u32
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut authors, mut multi_step, mut mismatches) = (0usize, 0usize, Vec::new());
    let (mut max_authors, mut max_edges) = (0, 0);
    for i in 0..CRIT3_CORPORA {
        let (index, ids, n_edges) = random_corpus(&mut rng);
        max_authors = max_authors.max(ids.len());
        max_edges = max_edges.max(n_edges);
        for citing_full_only in [false, true] {
            let rules = CountingRules { citing_full_only, ..CountingRules::default() };
            for id in &ids {
                let greedy = a50pc_greedy(&index, id, &rules);
                let oracle = a50pc_oracle(&index, id, &rules);
                authors += 1;
                multi_step += usize::from(matches!(greedy, Ok(k) if k > 1));
                if greedy != oracle {
                    mismatches.push(format!("corpus {i} author {id}: greedy {greedy:?} oracle {oracle:?}"));
                }
            }
        }
    }
    let vectors: Vec<Vec<u64>> = (0..CRIT3_H_VECTORS)
        .map(|_| {
            let len = rng.gen_range(0..80);
            (0..len).map(|_| rng.gen_range(0..200)).collect()
        })
        .collect();
    let h_mismatches = vectors.iter().filter(|v| h_index(v) != h_index_brute(v)).count();
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && h_mismatches == 0 && elapsed < CRIT3_BUDGET;
    let mut o = Outcome::new(
        pass,
        format!(
            "greedy A50%C = oracle on {} corpora, h-index = brute force on {} vectors, in {elapsed:.2?} (< 60 s)",
            CRIT3_CORPORA,
            vectors.len()
        ),
    )
    .detail(format!(
        "{authors} author evaluations ({multi_step} needing more than one citing author), {} mismatches; max {max_authors} authors, {max_edges} edge rows per corpus",
        mismatches.len()
    ))
    .detail(format!("h-index mismatches: {h_mismatches}"));
    for m in mismatches.iter().take(5) {
        o = o.detail(m.clone());
    }
    o
}

// Criterion 4 ------------------------------------------------------------

/// Full papers shared with each co-author, counted directly from the index.
fn shared_full_papers(index: &CorpusIndex, a: AuthorIdx) -> HashMap<AuthorIdx, u32> {
    let mut shared = HashMap::new();
    for &p in index.papers_of(a) {
        if !index.paper(p).is_full_paper() {
            continue;
        }
        for &b in index.authors_of(p) {
            if b != a {
                *shared.entry(b).or_insert(0) += 1;
            }
        }
    }
    shared
}

#[derive(Default)]
struct InvariantCounts {
    eligible: usize,
    c_below_h2: usize,
    a50pc_below_1: usize,
    asymmetric_pairs: usize,
    a50_count_mismatch: usize,
    qualifying_pairs: usize,
}

fn check_invariants(corpus: &SynthCorpus, counts: &mut InvariantCounts) {
    let index = build_index(
        corpus.papers.clone(),
        corpus.authorships.clone(),
        corpus.citations.clone(),
        corpus.taxonomy.clone(),
    )
    .unwrap();
    let rules = CountingRules::default();
    let eligible = cite_orch::cohort::eligible_authors(&index, &EligibilityConfig::default(), &rules);
    let metrics =
        compute_all_metrics(&index, eligible.iter().map(String::as_str), &MetricsConfig::default(), 0).unwrap();
    counts.eligible += metrics.len();
    for m in metrics.values() {
        counts.c_below_h2 += usize::from(m.citations < (m.h_index as u64).pow(2));
        counts.a50pc_below_1 += usize::from(m.a50pc.is_none_or(|k| k < 1));
    }
    let shared: Vec<HashMap<AuthorIdx, u32>> =
        (0..index.author_count() as AuthorIdx).map(|a| shared_full_papers(&index, a)).collect();
    for threshold in [5, 50] {
        for (a, row) in shared.iter().enumerate() {
            let qualifying = row.values().filter(|&&n| n > threshold).count() as u32;
            counts.qualifying_pairs += qualifying as usize;
            let id = index.author_id(a as AuthorIdx);
            counts.a50_count_mismatch += usize::from(a50_coauthors(&index, id, threshold, &rules) != qualifying);
            for (&b, &n) in row {
                let back = shared[b as usize].get(&(a as AuthorIdx)).copied().unwrap_or(0);
                counts.asymmetric_pairs += usize::from((n > threshold) != (back > threshold));
            }
        }
    }
}

fn criterion_4(default_corpus: &SynthCorpus) -> Outcome {
    let mut counts = InvariantCounts::default();
    check_invariants(default_corpus, &mut counts);
    let mut corpora = 1;
    for seed in 1..=3 {
        let cfg = SynthConfig { seed, n_background_authors: 2000, ..SynthConfig::default() };
        check_invariants(&generate(&cfg).unwrap(), &mut counts);
        corpora += 1;
    }
    let violations = counts.c_below_h2 + counts.a50pc_below_1 + counts.asymmetric_pairs + counts.a50_count_mismatch;
    Outcome::new(
        violations == 0 && counts.eligible > 0,
        format!("C >= h², A50%C >= 1 and A50 symmetry on {corpora} synthetic corpora, {violations} violations"),
    )
    .detail(format!(
        "{} eligible authors: C < h² {}, A50%C < 1 or undefined {}",
        counts.eligible, counts.c_below_h2, counts.a50pc_below_1
    ))
    .detail(format!(
        "{} qualifying co-author pairs (thresholds 5 and 50): asymmetric {}, A50 count mismatches {}",
        counts.qualifying_pairs, counts.asymmetric_pairs, counts.a50_count_mismatch
    ))
}

// Criteria 5 and 6 -------------------------------------------------------

fn read_reports(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn criterion_5(corpus: &SynthCorpus, cfg: &SynthConfig, generated_in: Duration, work: &Path) -> (Outcome, RunConfig) {
    let start = Instant::now();
    let input = work.join("default_corpus");
    write_corpus(corpus, &input).unwrap();
    let run_cfg = RunConfig::new(InputPaths::in_dir(&input), work.join("default_run"));
    let out = run_pipeline(&run_cfg, None).unwrap();
    let tails: Vec<TailMembers> = out.tails.iter().map(TailMembers::from).collect();
    let scores = evaluate_detection(&corpus.truth, &tails);
    let elapsed = generated_in + start.elapsed();

    let shape_ok = cfg.n_background_authors == 10_000
        && (cfg.n_cartels, cfg.cartel_size) == (3, 5)
        && (cfg.n_hyperteams, cfg.team_size, cfg.joint_papers) == (1, 10, 60)
        && cfg.n_self_citers == 20;
    let mut pass = shape_ok && elapsed < CRIT5_BUDGET;
    let mut details = vec![format!(
        "{} eligible of {} authors, {} citation edges, generate + write + run {elapsed:.2?} (< 300 s)",
        out.manifest.cohort.eligible,
        out.manifest.cohort.authors,
        corpus.citations.len()
    )];
    for s in scores.iter().filter(|s| s.designated) {
        let recall = s.recall.unwrap_or(0.0);
        let needed = if s.motif == Motif::Hyperteam { 1.0 } else { CRIT5_SELF_CARTEL_RECALL };
        pass &= recall >= needed;
        details.push(format!(
            "{} in {} {} 1%: recall {recall:.3} (needs >= {needed}), {}/{} recovered, tail size {}",
            s.motif.name(),
            s.metric,
            s.tail.name(),
            s.recovered,
            s.planted,
            s.tail_size
        ));
    }
    for t in &out.tails {
        let r = reference::for_metric(t.spec.metric);
        details.push(format!(
            "{} 1% threshold {} (full-database reference {}), median {} (reference {})",
            t.spec.metric,
            format_fixed(t.threshold, 2),
            format_fixed(r.tail_1pct, 2),
            format_fixed(t.summary.median, 2),
            format_fixed(r.median, 2)
        ));
    }
    let mut o = Outcome::new(pass, "planted motifs recovered in designated 1% tails under the default generator");
    o.details = details;
    (o, run_cfg)
}

fn criterion_6(base: &RunConfig) -> Outcome {
    let mut cfg = base.clone();
    cfg.out_dir = base.out_dir.with_file_name("determinism_run");
    run_pipeline(&cfg, Some(1)).unwrap();
    let single = read_reports(&cfg.out_dir);
    run_pipeline(&cfg, Some(8)).unwrap();
    let multi = read_reports(&cfg.out_dir);

    let mut differing = Vec::new();
    for (name, bytes) in &single {
        let same = if name == MANIFEST_FILE {
            let strip = |b: &[u8]| manifest_without_runtime(std::str::from_utf8(b).unwrap()).unwrap();
            multi.get(name).is_some_and(|m| strip(m) == strip(bytes))
        } else {
            multi.get(name) == Some(bytes)
        };
        if !same {
            differing.push(name.clone());
        }
    }
    let pass = differing.is_empty() && single.len() == multi.len();
    Outcome::new(pass, format!("run with 1 and 8 threads: {} files compared, {} differ", single.len(), differing.len()))
        .detail("report files compared byte for byte; manifest.json compared without its runtime section".to_string())
        .detail(format!("differing: {differing:?}"))
}

// Criterion 7 ------------------------------------------------------------

fn scale_config() -> SynthConfig {
    SynthConfig {
        seed: 7,
        n_background_authors: 100_000,
        papers_per_author: (1, 5),
        references_per_paper: (3, 6),
        n_self_citers: 0,
        n_cartels: 0,
        n_hyperteams: 0,
        ..SynthConfig::default()
    }
}

fn criterion_7(work: &Path) -> Outcome {
    let corpus = generate(&scale_config()).unwrap();
    let input = work.join("scale_corpus");
    write_corpus(&corpus, &input).unwrap();
    let (n_edges, n_papers) = (corpus.citations.len(), corpus.papers.len());
    drop(corpus);

    let out = work.join("scale_run");
    let status = Command::new(env!("CARGO_BIN_EXE_cite-orch"))
        .args(["run", "--min-papers", "0", "--min-citations", "1", "--input-dir"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    if !status.status.success() {
        return Outcome::new(false, "scale run failed").detail(String::from_utf8_lossy(&status.stderr).to_string());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    let runtime = &manifest["runtime"];
    let stage = |name: &str| runtime["timings_seconds"][name].as_f64();
    let (Some(ingest), Some(metrics), Some(cohort), Some(rss)) =
        (stage("ingest_and_index"), stage("metrics"), stage("cohort"), runtime["peak_rss_bytes"].as_u64())
    else {
        return Outcome::new(false, "manifest lacks stage timings or peak memory").detail(runtime.to_string());
    };
    let seconds = ingest + cohort + metrics;
    let authors = manifest["cohort"]["authors"].as_u64().unwrap_or(0);
    let computed = manifest["cohort"]["eligible"].as_u64().unwrap_or(0);
    let pass = authors >= 100_000 && n_edges >= 1_000_000 && seconds < CRIT7_BUDGET_SECONDS && rss < CRIT7_MEMORY_BYTES;
    Outcome::new(
        pass,
        format!(
            "{authors} authors / {n_edges} edges: ingest + index + metrics {seconds:.2} s (< 60 s), peak RSS {:.0} MiB (< 4 GiB), from manifest",
            rss as f64 / (1 << 20) as f64
        ),
    )
    .detail(format!(
        "{n_papers} papers; ingest+index {ingest:.2} s, cohort {cohort:.2} s, metrics {metrics:.2} s for {computed} authors on {} threads",
        runtime["threads"]
    ))
    .detail(format!("index heap {} bytes", runtime["index_heap_bytes"]))
}

fn main() -> ExitCode {
    let work = tempfile::tempdir().unwrap();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, o: Outcome| {
        println!("ACCEPTANCE {n} {} {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("    {d}");
        }
        results.push((n, o));
    };

    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());

    let cfg = SynthConfig::default();
    let start = Instant::now();
    let corpus = generate(&cfg).unwrap();
    let generated_in = start.elapsed();
    let (c5, run_cfg) = criterion_5(&corpus, &cfg, generated_in, work.path());
    report(4, criterion_4(&corpus));
    drop(corpus);
    report(5, c5);
    report(6, criterion_6(&run_cfg));
    report(7, criterion_7(work.path()));

    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    println!(
        "ACCEPTANCE SUMMARY {} passed, {} failed{}",
        results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" (criteria {failed:?})") }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
