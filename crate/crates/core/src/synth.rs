//! Deterministic synthetic corpora with planted citation-orchestration motifs.
//!
//! The background is a preferential-attachment citation network over papers
//! written by small lab groups. Plants are placed edge by edge so their
//! extremeness does not depend on sampling:
//!
//! - self-citers: an h-core of `h` solo papers, each cited `h + ε` times
//!   (ε ≤ 2), mostly by the author's own uncited papers;
//! - cartels: members whose h-cores are cited only by solo papers of the
//!   other members;
//! - hyperteams: cliques co-authoring every one of `joint_papers` papers, with
//!   dense citation between those papers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AuthorshipRecord, CitationEdge, DocType, FieldTaxonomy, PaperRecord, SubfieldEntry};
use crate::ingest::{AUTHORSHIPS_HEADER, CITATIONS_HEADER, PAPERS_HEADER, TAXONOMY_HEADER};
use crate::stats::{Metric, Tail, TailReport};

/// Field names with default mixture weights (share of eligible authors, %).
pub const DEFAULT_FIELDS: [(&str, f64); 22] = [
    ("Agriculture, Fisheries & Forestry", 2.39),
    ("Biology", 4.33),
    ("Biomedical Research", 12.66),
    ("Built Environment & Design", 0.24),
    ("Chemistry", 6.13),
    ("Clinical Medicine", 38.71),
    ("Communication & Textual Studies", 0.11),
    ("Earth & Environmental Sciences", 3.88),
    ("Economics & Business", 1.39),
    ("Enabling & Strategic Technologies", 6.80),
    ("Engineering", 3.75),
    ("General Arts, Humanities & Social Sciences", 0.0),
    ("General Science & Technology", 0.01),
    ("Historical Studies", 0.10),
    ("Information & Communication Technologies", 3.82),
    ("Mathematics & Statistics", 0.64),
    ("Philosophy & Theology", 0.03),
    ("Physics & Astronomy", 11.63),
    ("Psychology & Cognitive Sciences", 1.22),
    ("Public Health & Health Services", 1.33),
    ("Social Sciences", 0.83),
    ("Visual & Performing Arts", 0.0),
];

pub const SUBFIELDS_PER_FIELD: usize = 5;
pub const TRUTH_HEADER: &[&str] = &["author_id", "label", "group_id"];

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("infeasible synth config: {0}")]
    Infeasible(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: line {line}: {message}")]
    Truth { path: String, line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_background_authors: u32,
    /// Inclusive bounds of the log-uniform number of papers each background
    /// author leads; lab co-authorship adds more.
    pub papers_per_author: (u32, u32),
    /// Inclusive bounds on lab size; lab members co-author most of each
    /// other's papers.
    pub lab_size: (u32, u32),
    /// Probability that a lab member joins a colleague's paper.
    pub lab_coauthor_prob: f64,
    /// Probability that a paper gains one co-author from outside the lab.
    pub external_coauthor_prob: f64,
    /// Inclusive bounds on references of a full background paper.
    pub references_per_paper: (u32, u32),
    /// Probability that a reference is drawn in proportion to
    /// `1 + citations so far` rather than uniformly.
    pub attachment_bias: f64,
    /// Probability that a reference stays inside the citing paper's field.
    pub same_field_citation: f64,
    pub n_self_citers: u32,
    /// Minimum share of a self-citer's citations placed by their own papers.
    pub self_citation_share: f64,
    pub n_cartels: u32,
    pub cartel_size: u32,
    pub n_hyperteams: u32,
    pub team_size: u32,
    pub joint_papers: u32,
    pub hyperteam_field: String,
    /// Inclusive bounds on the h-index built for self-citers and cartel
    /// members.
    pub core_h: (u32, u32),
    pub field_weights: Vec<(String, f64)>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_background_authors: 10_000,
            papers_per_author: (4, 60),
            lab_size: (1, 6),
            lab_coauthor_prob: 0.5,
            external_coauthor_prob: 0.3,
            references_per_paper: (15, 45),
            attachment_bias: 0.85,
            same_field_citation: 0.9,
            n_self_citers: 20,
            self_citation_share: 0.8,
            n_cartels: 3,
            cartel_size: 5,
            n_hyperteams: 1,
            team_size: 10,
            joint_papers: 60,
            hyperteam_field: "Clinical Medicine".into(),
            core_h: (32, 45),
            field_weights: DEFAULT_FIELDS.iter().map(|&(n, w)| (n.to_string(), w)).collect(),
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), SynthError> {
    if ok {
        Ok(())
    } else {
        Err(SynthError::Infeasible(msg()))
    }
}

fn valid_range(name: &str, (lo, hi): (u32, u32)) -> Result<(), SynthError> {
    check(lo >= 1 && lo <= hi, || format!("{name} bounds ({lo}, {hi}) must satisfy 1 <= min <= max"))
}

fn valid_prob(name: &str, p: f64) -> Result<(), SynthError> {
    check((0.0..=1.0).contains(&p), || format!("{name} = {p} is not a probability"))
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        valid_range("papers_per_author", self.papers_per_author)?;
        valid_range("lab_size", self.lab_size)?;
        valid_range("references_per_paper", self.references_per_paper)?;
        valid_range("core_h", self.core_h)?;
        valid_prob("lab_coauthor_prob", self.lab_coauthor_prob)?;
        valid_prob("external_coauthor_prob", self.external_coauthor_prob)?;
        valid_prob("attachment_bias", self.attachment_bias)?;
        valid_prob("same_field_citation", self.same_field_citation)?;
        check((0.6..=1.0).contains(&self.self_citation_share), || {
            format!("self_citation_share = {} must lie in [0.6, 1]", self.self_citation_share)
        })?;
        if self.n_cartels > 0 {
            check(self.cartel_size >= 2, || {
                format!("cartel_size {} is too small to cite each other", self.cartel_size)
            })?;
        }
        if self.n_hyperteams > 0 {
            check(self.team_size >= 2, || format!("team_size {} is not a team", self.team_size))?;
            check(self.joint_papers > 50, || format!("joint_papers {} must exceed 50", self.joint_papers))?;
            check(self.field_weights.iter().any(|(n, _)| *n == self.hyperteam_field), || {
                format!("hyperteam_field {:?} is not among the configured fields", self.hyperteam_field)
            })?;
        }
        check(!self.field_weights.is_empty(), || "no fields configured".into())?;
        check(self.field_weights.iter().all(|(_, w)| w.is_finite() && *w >= 0.0), || {
            "field weights must be finite and non-negative".into()
        })?;
        check(self.field_weights.iter().any(|(_, w)| *w > 0.0), || "all field weights are zero".into())?;
        let names: BTreeSet<&str> = self.field_weights.iter().map(|(n, _)| n.as_str()).collect();
        check(names.len() == self.field_weights.len(), || "duplicate field names".into())?;
        Ok(())
    }

    pub fn planted_authors(&self) -> u64 {
        self.n_self_citers as u64
            + self.n_cartels as u64 * self.cartel_size as u64
            + self.n_hyperteams as u64 * self.team_size as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motif {
    SelfCiter,
    Cartel,
    Hyperteam,
}

impl Motif {
    pub const ALL: [Motif; 3] = [Motif::SelfCiter, Motif::Cartel, Motif::Hyperteam];

    pub fn name(self) -> &'static str {
        match self {
            Motif::SelfCiter => "self_citer",
            Motif::Cartel => "cartel_member",
            Motif::Hyperteam => "hyperteam_member",
        }
    }

    /// The tails a motif is expected to land in; the first is the designated
    /// one, the rest are informational.
    pub fn tails(self) -> &'static [(Metric, Tail)] {
        match self {
            Motif::SelfCiter | Motif::Cartel => &[(Metric::CoverH2, Tail::Lower), (Metric::A50pc, Tail::Lower)],
            Motif::Hyperteam => &[(Metric::A50, Tail::Upper)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Background,
    SelfCiter(u32),
    CartelMember(u32),
    HyperteamMember(u32),
}

impl Label {
    pub fn motif(self) -> Option<Motif> {
        match self {
            Label::Background => None,
            Label::SelfCiter(_) => Some(Motif::SelfCiter),
            Label::CartelMember(_) => Some(Motif::Cartel),
            Label::HyperteamMember(_) => Some(Motif::Hyperteam),
        }
    }

    pub fn name(self) -> &'static str {
        self.motif().map_or("background", Motif::name)
    }

    pub fn group_id(self) -> String {
        match self {
            Label::Background => String::new(),
            Label::SelfCiter(g) => format!("s{g:03}"),
            Label::CartelMember(g) => format!("c{g:03}"),
            Label::HyperteamMember(g) => format!("t{g:03}"),
        }
    }

    fn parse(label: &str, group: &str) -> Option<Label> {
        let num = |prefix: char| group.strip_prefix(prefix)?.parse::<u32>().ok();
        match label {
            "background" if group.is_empty() => Some(Label::Background),
            "self_citer" => num('s').map(Label::SelfCiter),
            "cartel_member" => num('c').map(Label::CartelMember),
            "hyperteam_member" => num('t').map(Label::HyperteamMember),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One label per author; every author of the corpus appears exactly once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    labels: BTreeMap<String, Label>,
}

impl GroundTruth {
    pub fn label(&self, author_id: &str) -> Option<Label> {
        self.labels.get(author_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Label)> {
        self.labels.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn members(&self, motif: Motif) -> BTreeSet<&str> {
        self.iter().filter(|(_, l)| l.motif() == Some(motif)).map(|(a, _)| a).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), SynthError> {
        let csv_err = |source| SynthError::Csv { path: path.display().to_string(), source };
        let mut w = csv_writer(path)?;
        w.write_record(TRUTH_HEADER).map_err(csv_err)?;
        for (id, label) in self.iter() {
            w.write_record([id, label.name(), &label.group_id()]).map_err(csv_err)?;
        }
        w.flush().map_err(|source| SynthError::Io { path: path.display().to_string(), source })
    }

    pub fn read_csv(path: &Path) -> Result<GroundTruth, SynthError> {
        let shown = path.display().to_string();
        let mut r = csv::ReaderBuilder::new()
            .from_path(path)
            .map_err(|source| SynthError::Csv { path: shown.clone(), source })?;
        let header = r.headers().map_err(|source| SynthError::Csv { path: shown.clone(), source })?;
        if header.iter().collect::<Vec<_>>() != TRUTH_HEADER {
            return Err(SynthError::Truth {
                path: shown,
                line: 1,
                message: format!("expected header {}", TRUTH_HEADER.join(",")),
            });
        }
        let mut labels = BTreeMap::new();
        for row in r.records() {
            let row = row.map_err(|source| SynthError::Csv { path: shown.clone(), source })?;
            let line = row.position().map_or(0, |p| p.line());
            let bad = |message: String| SynthError::Truth { path: shown.clone(), line, message };
            let label = Label::parse(&row[1], &row[2])
                .ok_or_else(|| bad(format!("unknown label {:?} / group {:?}", &row[1], &row[2])))?;
            if labels.insert(row[0].to_string(), label).is_some() {
                return Err(bad(format!("author {:?} listed twice", &row[0])));
            }
        }
        Ok(GroundTruth { labels })
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub papers: Vec<PaperRecord>,
    pub authorships: Vec<AuthorshipRecord>,
    pub citations: Vec<CitationEdge>,
    pub taxonomy: FieldTaxonomy,
    pub truth: GroundTruth,
}

/// Field ids are `F01`.. in configuration order; subfield ids are a running
/// three-digit number, [`SUBFIELDS_PER_FIELD`] per field.
pub fn synthetic_taxonomy(field_names: &[&str]) -> FieldTaxonomy {
    let mut t = FieldTaxonomy::new();
    for (f, name) in field_names.iter().enumerate() {
        for s in 0..SUBFIELDS_PER_FIELD {
            let (id, entry) = subfield_entry(f, s, name);
            t.insert(id, entry).expect("generated subfield ids are unique");
        }
    }
    t
}

fn field_id(f: usize) -> String {
    format!("F{:02}", f + 1)
}

fn subfield_id(f: usize, s: usize) -> String {
    format!("{:03}", f * SUBFIELDS_PER_FIELD + s + 1)
}

fn subfield_entry(f: usize, s: usize, field_name: &str) -> (String, SubfieldEntry) {
    let entry = SubfieldEntry {
        subfield_name: format!("{} {}", field_name.to_lowercase(), s + 1),
        field_id: field_id(f),
        field_name: field_name.to_string(),
    };
    (subfield_id(f, s), entry)
}

struct Paper {
    field: usize,
    subfield: usize,
    doc_type: DocType,
    authors: Vec<u32>,
}

#[derive(Default)]
struct Draft {
    papers: Vec<Paper>,
    citations: Vec<(u32, u32)>,
    labels: Vec<Label>,
    n_background_papers: u32,
}

impl Draft {
    fn add_author(&mut self, label: Label) -> u32 {
        self.labels.push(label);
        (self.labels.len() - 1) as u32
    }

    fn add_paper(&mut self, field: usize, subfield: usize, doc_type: DocType, authors: Vec<u32>) -> u32 {
        self.papers.push(Paper { field, subfield, doc_type, authors });
        (self.papers.len() - 1) as u32
    }

    /// Citations from `n` distinct background papers to `target`.
    fn cite_from_background(&mut self, target: u32, n: usize, rng: &mut ChaCha8Rng) -> Result<(), SynthError> {
        if n == 0 {
            return Ok(());
        }
        let pool = self.n_background_papers as usize;
        check(n <= pool, || format!("plants need {n} external citing papers but the background has {pool}"))?;
        for u in index::sample(rng, pool, n) {
            self.citations.push((u as u32, target));
        }
        Ok(())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (u32, u32)) -> u32 {
    let x = rng.gen_range((lo as f64).ln()..((hi + 1) as f64).ln());
    (x.exp() as u32).clamp(lo, hi)
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names: Vec<&str> = cfg.field_weights.iter().map(|(n, _)| n.as_str()).collect();
    let field_dist = WeightedIndex::new(cfg.field_weights.iter().map(|(_, w)| *w))
        .map_err(|e| SynthError::Infeasible(format!("field weights: {e}")))?;

    let mut d = Draft::default();
    background(cfg, &field_dist, names.len(), &mut d, &mut rng);
    for g in 0..cfg.n_self_citers {
        let field = field_dist.sample(&mut rng);
        plant_self_citer(cfg, g, field, &mut d, &mut rng)?;
    }
    for g in 0..cfg.n_cartels {
        let field = field_dist.sample(&mut rng);
        plant_cartel(cfg, g, field, &mut d, &mut rng)?;
    }
    let team_field = names.iter().position(|n| *n == cfg.hyperteam_field).unwrap_or(0);
    for g in 0..cfg.n_hyperteams {
        plant_hyperteam(cfg, g, team_field, &mut d, &mut rng)?;
    }
    Ok(finish(d, &names, &mut rng))
}

fn background(
    cfg: &SynthConfig,
    field_dist: &WeightedIndex<f64>,
    n_fields: usize,
    d: &mut Draft,
    rng: &mut ChaCha8Rng,
) {
    let mut by_field: Vec<Vec<u32>> = vec![Vec::new(); n_fields];
    for _ in 0..cfg.n_background_authors {
        let a = d.add_author(Label::Background);
        by_field[field_dist.sample(rng)].push(a);
    }

    for (field, members) in by_field.iter_mut().enumerate() {
        members.shuffle(rng);
        let mut rest: &[u32] = members;
        while !rest.is_empty() {
            let size = (rng.gen_range(cfg.lab_size.0..=cfg.lab_size.1) as usize).min(rest.len());
            let (lab, tail) = rest.split_at(size);
            rest = tail;
            let home = rng.gen_range(0..SUBFIELDS_PER_FIELD);
            for &lead in lab {
                for _ in 0..log_uniform(rng, cfg.papers_per_author) {
                    let mut authors = vec![lead];
                    authors.extend(lab.iter().filter(|&&x| x != lead && rng.gen_bool(cfg.lab_coauthor_prob)));
                    if rng.gen_bool(cfg.external_coauthor_prob) {
                        let x = members[rng.gen_range(0..members.len())];
                        if !authors.contains(&x) {
                            authors.push(x);
                        }
                    }
                    let subfield = if rng.gen_bool(0.7) { home } else { rng.gen_range(0..SUBFIELDS_PER_FIELD) };
                    let doc_type = match rng.gen_range(0..100) {
                        0..75 => DocType::Article,
                        75..85 => DocType::ConferencePaper,
                        85..93 => DocType::Review,
                        _ => DocType::Other,
                    };
                    d.add_paper(field, subfield, doc_type, authors);
                }
            }
        }
    }
    d.n_background_papers = d.papers.len() as u32;

    // Publication order; each paper cites only earlier ones.
    let mut order: Vec<u32> = (0..d.n_background_papers).collect();
    order.shuffle(rng);
    let mut field_list: Vec<Vec<u32>> = vec![Vec::new(); n_fields];
    let mut field_urn: Vec<Vec<u32>> = vec![Vec::new(); n_fields];
    let mut global_list: Vec<u32> = Vec::new();
    let mut global_urn: Vec<u32> = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    for &p in &order {
        let f = d.papers[p as usize].field;
        let refs = if d.papers[p as usize].doc_type.is_full() {
            rng.gen_range(cfg.references_per_paper.0..=cfg.references_per_paper.1)
        } else {
            rng.gen_range(0..=5)
        } as usize;
        chosen.clear();
        let mut attempts = 0;
        while chosen.len() < refs && attempts < 4 * refs && !global_list.is_empty() {
            attempts += 1;
            let local = !field_list[f].is_empty() && rng.gen_bool(cfg.same_field_citation);
            let (list, urn) = if local { (&field_list[f], &field_urn[f]) } else { (&global_list, &global_urn) };
            let target = if rng.gen_bool(cfg.attachment_bias) {
                urn[rng.gen_range(0..urn.len())]
            } else {
                list[rng.gen_range(0..list.len())]
            };
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &t in &chosen {
            d.citations.push((p, t));
            field_urn[d.papers[t as usize].field].push(t);
            global_urn.push(t);
        }
        field_list[f].push(p);
        field_urn[f].push(p);
        global_list.push(p);
        global_urn.push(p);
    }
}

/// Citation targets `h + ε` for an h-core, ε in `0..=2`.
fn core_targets(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let h = rng.gen_range(cfg.core_h.0..=cfg.core_h.1);
    (0..h).map(|_| h + rng.gen_range(0..=2)).collect()
}

fn plant_self_citer(
    cfg: &SynthConfig,
    g: u32,
    field: usize,
    d: &mut Draft,
    rng: &mut ChaCha8Rng,
) -> Result<(), SynthError> {
    let a = d.add_author(Label::SelfCiter(g));
    let sub = rng.gen_range(0..SUBFIELDS_PER_FIELD);
    let targets = core_targets(cfg, rng);
    let own: Vec<usize> =
        targets.iter().map(|&t| ((cfg.self_citation_share * t as f64).ceil() as usize).min(t as usize)).collect();
    let core: Vec<u32> = targets.iter().map(|_| d.add_paper(field, sub, DocType::Article, vec![a])).collect();
    let citing: Vec<u32> = (0..own.iter().copied().max().unwrap_or(0))
        .map(|_| d.add_paper(field, sub, DocType::Article, vec![a]))
        .collect();
    for (j, &p) in core.iter().enumerate() {
        d.citations.extend(citing[..own[j]].iter().map(|&u| (u, p)));
        d.cite_from_background(p, targets[j] as usize - own[j], rng)?;
    }
    Ok(())
}

fn plant_cartel(
    cfg: &SynthConfig,
    g: u32,
    field: usize,
    d: &mut Draft,
    rng: &mut ChaCha8Rng,
) -> Result<(), SynthError> {
    let size = cfg.cartel_size as usize;
    let members: Vec<u32> = (0..size).map(|_| d.add_author(Label::CartelMember(g))).collect();
    let sub = rng.gen_range(0..SUBFIELDS_PER_FIELD);
    let targets: Vec<Vec<u32>> = members.iter().map(|_| core_targets(cfg, rng)).collect();
    let most = targets.iter().flatten().copied().max().unwrap_or(0) as usize;
    let per_member = most.div_ceil(size - 1);
    let cores: Vec<Vec<u32>> = members
        .iter()
        .zip(&targets)
        .map(|(&m, t)| t.iter().map(|_| d.add_paper(field, sub, DocType::Article, vec![m])).collect())
        .collect();
    let citing: Vec<Vec<u32>> = members
        .iter()
        .map(|&m| (0..per_member).map(|_| d.add_paper(field, sub, DocType::Article, vec![m])).collect())
        .collect();
    for i in 0..size {
        // Other members' citing papers, interleaved so each member supplies
        // an even share.
        let pool: Vec<u32> = (0..per_member)
            .flat_map(|q| (0..size).filter(move |&k| k != i).map(move |k| (k, q)))
            .map(|(k, q)| citing[k][q])
            .collect();
        for (j, &p) in cores[i].iter().enumerate() {
            d.citations.extend(pool[..targets[i][j] as usize].iter().map(|&u| (u, p)));
        }
    }
    Ok(())
}

fn plant_hyperteam(
    cfg: &SynthConfig,
    g: u32,
    field: usize,
    d: &mut Draft,
    rng: &mut ChaCha8Rng,
) -> Result<(), SynthError> {
    let members: Vec<u32> = (0..cfg.team_size).map(|_| d.add_author(Label::HyperteamMember(g))).collect();
    let home = rng.gen_range(0..SUBFIELDS_PER_FIELD);
    let n = cfg.joint_papers as usize;
    let papers: Vec<u32> = (0..n)
        .map(|_| {
            let sub = if rng.gen_bool(0.8) { home } else { rng.gen_range(0..SUBFIELDS_PER_FIELD) };
            d.add_paper(field, sub, DocType::Article, members.clone())
        })
        .collect();
    // Zipf-like citation profile: paper k draws 5n/(k+1) citations, first
    // from the team's own later papers, the rest from the background.
    for (k, &p) in papers.iter().enumerate() {
        let target = 5 * n / (k + 1);
        let intra = target.min(n - 1 - k);
        d.citations.extend(papers[k + 1..=k + intra].iter().map(|&u| (u, p)));
        d.cite_from_background(p, target - intra, rng)?;
    }
    Ok(())
}

fn finish(d: Draft, names: &[&str], rng: &mut ChaCha8Rng) -> SynthCorpus {
    let n_authors = d.labels.len();
    let n_papers = d.papers.len();
    let mut author_perm: Vec<u32> = (0..n_authors as u32).collect();
    author_perm.shuffle(rng);
    let mut paper_perm: Vec<u32> = (0..n_papers as u32).collect();
    paper_perm.shuffle(rng);
    let aw = digits(n_authors).max(6);
    let pw = digits(n_papers).max(7);
    let author_id = |a: u32| format!("a{:0aw$}", author_perm[a as usize]);
    let paper_id = |p: u32| format!("p{:0pw$}", paper_perm[p as usize]);

    let mut by_id: Vec<u32> = (0..n_papers as u32).collect();
    by_id.sort_unstable_by_key(|&p| paper_perm[p as usize]);
    let mut papers = Vec::with_capacity(n_papers);
    let mut authorships = Vec::new();
    for &p in &by_id {
        let paper = &d.papers[p as usize];
        let sub = subfield_id(paper.field, paper.subfield);
        papers.push(PaperRecord::new(paper_id(p), paper.doc_type, Some(&sub)));
        let mut authors: Vec<u32> = paper.authors.iter().map(|&a| author_perm[a as usize]).collect();
        authors.sort_unstable();
        let pid = paper_id(p);
        authorships.extend(authors.into_iter().map(|a| AuthorshipRecord::new(pid.clone(), format!("a{a:0aw$}"))));
    }

    let mut edges: Vec<(u32, u32)> =
        d.citations.iter().map(|&(u, v)| (paper_perm[u as usize], paper_perm[v as usize])).collect();
    edges.sort_unstable();
    let citations =
        edges.into_iter().map(|(u, v)| CitationEdge::new(format!("p{u:0pw$}"), format!("p{v:0pw$}"))).collect();

    let labels = d.labels.iter().enumerate().map(|(a, &l)| (author_id(a as u32), l)).collect();
    SynthCorpus { papers, authorships, citations, taxonomy: synthetic_taxonomy(names), truth: GroundTruth { labels } }
}

fn digits(n: usize) -> usize {
    n.max(1).ilog10() as usize + 1
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, SynthError> {
    let file = File::create(path).map_err(|source| SynthError::Io { path: path.display().to_string(), source })?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::with_capacity(1 << 20, file)))
}

pub const CORPUS_FILES: [&str; 5] = ["papers.csv", "authorships.csv", "citations.csv", "taxonomy.csv", "truth.csv"];

/// Writes the four ingest tables plus `truth.csv` into `dir`.
pub fn write_corpus(corpus: &SynthCorpus, dir: &Path) -> Result<(), SynthError> {
    fs::create_dir_all(dir).map_err(|source| SynthError::Io { path: dir.display().to_string(), source })?;
    let write = |name: &str, header: &[&str], rows: &mut dyn Iterator<Item = [&str; 4]>, width: usize| {
        let path = dir.join(name);
        let csv_err = |source| SynthError::Csv { path: path.display().to_string(), source };
        let mut w = csv_writer(&path)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row[..width]).map_err(csv_err)?;
        }
        w.flush().map_err(|source| SynthError::Io { path: path.display().to_string(), source })
    };
    write(
        "papers.csv",
        PAPERS_HEADER,
        &mut corpus
            .papers
            .iter()
            .map(|p| [p.paper_id.as_str(), p.doc_type.as_str(), p.subfield_id.as_deref().unwrap_or(""), ""]),
        3,
    )?;
    write(
        "authorships.csv",
        AUTHORSHIPS_HEADER,
        &mut corpus.authorships.iter().map(|a| [a.paper_id.as_str(), a.author_id.as_str(), "", ""]),
        2,
    )?;
    write(
        "citations.csv",
        CITATIONS_HEADER,
        &mut corpus.citations.iter().map(|c| [c.citing_paper_id.as_str(), c.cited_paper_id.as_str(), "", ""]),
        2,
    )?;
    write(
        "taxonomy.csv",
        TAXONOMY_HEADER,
        &mut corpus
            .taxonomy
            .subfields()
            .map(|(id, e)| [id, e.subfield_name.as_str(), e.field_id.as_str(), e.field_name.as_str()]),
        4,
    )?;
    corpus.truth.write_csv(&dir.join("truth.csv"))
}

/// Tail membership as seen by detection scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailMembers {
    pub metric: Metric,
    pub tail: Tail,
    pub members: BTreeSet<String>,
}

impl From<&TailReport> for TailMembers {
    fn from(r: &TailReport) -> Self {
        TailMembers {
            metric: r.spec.metric,
            tail: r.spec.tail,
            members: r.members.iter().map(|m| m.author_id.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionScore {
    pub motif: Motif,
    pub metric: Metric,
    pub tail: Tail,
    /// Whether this is the tail the motif is meant to be caught by.
    pub designated: bool,
    pub planted: usize,
    pub recovered: usize,
    pub tail_size: usize,
    /// `None` when nothing of this motif was planted.
    pub recall: Option<f64>,
    /// `None` when the tail is empty.
    pub precision: Option<f64>,
}

/// Recall and precision of every motif against each of its expected tails
/// present in `tails`.
pub fn evaluate_detection(truth: &GroundTruth, tails: &[TailMembers]) -> Vec<DetectionScore> {
    let mut out = Vec::new();
    for motif in Motif::ALL {
        let planted = truth.members(motif);
        for (rank, &(metric, tail)) in motif.tails().iter().enumerate() {
            let Some(t) = tails.iter().find(|t| t.metric == metric && t.tail == tail) else {
                continue;
            };
            let recovered = planted.iter().filter(|a| t.members.contains(**a)).count();
            out.push(DetectionScore {
                motif,
                metric,
                tail,
                designated: rank == 0,
                planted: planted.len(),
                recovered,
                tail_size: t.members.len(),
                recall: (!planted.is_empty()).then(|| recovered as f64 / planted.len() as f64),
                precision: (!t.members.is_empty()).then(|| recovered as f64 / t.members.len() as f64),
            });
        }
    }
    out
}
