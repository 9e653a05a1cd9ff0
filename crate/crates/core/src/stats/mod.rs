//! Percentile thresholds, extreme tails, field enrichment, histograms and
//! co-occurrence of extreme indicators.

mod contingency;
mod histogram;
pub mod reference;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metrics::AuthorMetrics;
use crate::value::{integer, MetricValue, Percent};

pub use contingency::{cooccurrence, ContingencyTable, TableStatus, Z_95};
pub use histogram::{histogram, Histogram};

pub const DEFAULT_FOLD_CUTOFF: f64 = 1.5;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("percentile of an empty sequence")]
    Empty,
    #[error("no authors left for {0} after field exclusion")]
    EmptyCohort(Metric),
    #[error("invalid histogram: {0}")]
    InvalidHistogram(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "c_over_h2")]
    CoverH2,
    #[serde(rename = "a50pc")]
    A50pc,
    #[serde(rename = "a50")]
    A50,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::CoverH2, Metric::A50pc, Metric::A50];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CoverH2 => "c_over_h2",
            Metric::A50pc => "a50pc",
            Metric::A50 => "a50",
        }
    }

    pub fn value(self, m: &AuthorMetrics) -> Option<MetricValue> {
        match self {
            Metric::CoverH2 => Some(m.c_over_h2),
            Metric::A50pc => m.a50pc.map(|v| integer(v as u64)),
            Metric::A50 => Some(integer(m.a50 as u64)),
        }
    }

    /// Decimal places used when rendering values.
    pub fn decimals(self) -> u32 {
        match self {
            Metric::CoverH2 => 2,
            Metric::A50pc | Metric::A50 => 0,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?} (expected c_over_h2, a50pc or a50)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Lower,
    Upper,
}

impl Tail {
    pub fn name(self) -> &'static str {
        match self {
            Tail::Lower => "lower",
            Tail::Upper => "upper",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailSpec {
    pub metric: Metric,
    pub tail: Tail,
    pub percentile: Percent,
    pub excluded_fields: BTreeSet<String>,
}

impl TailSpec {
    pub fn new(metric: Metric, tail: Tail, percentile: Percent) -> Self {
        TailSpec { metric, tail, percentile, excluded_fields: BTreeSet::new() }
    }

    pub fn excluding<I, S>(mut self, fields: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.excluded_fields.extend(fields.into_iter().map(Into::into));
        self
    }

    /// Threshold at `p` (lower tail) or `100 - p` (upper tail).
    pub fn threshold(&self, sorted: &[MetricValue]) -> Result<MetricValue, StatsError> {
        percentile_sorted(sorted, self.cut())
    }

    /// As [`TailSpec::threshold`] on unsorted values, which are reordered.
    pub fn threshold_unsorted(&self, values: &mut [MetricValue]) -> Result<MetricValue, StatsError> {
        if values.is_empty() {
            return Err(StatsError::Empty);
        }
        let rank = self.cut().nearest_rank(values.len());
        Ok(*values.select_nth_unstable(rank - 1).1)
    }

    /// Strict inequality: authors exactly at the threshold are not members.
    pub fn is_member(&self, value: MetricValue, threshold: MetricValue) -> bool {
        match self.tail {
            Tail::Lower => value < threshold,
            Tail::Upper => value > threshold,
        }
    }

    fn cut(&self) -> Percent {
        match self.tail {
            Tail::Lower => self.percentile,
            Tail::Upper => self.percentile.complement(),
        }
    }

    fn admits(&self, m: &AuthorMetrics) -> bool {
        m.field_id.as_ref().is_none_or(|f| !self.excluded_fields.contains(f))
    }
}

/// Nearest-rank percentile: the element at 1-based rank `ceil(p/100 * n)` of
/// the ascending-sorted values.
pub fn percentile_threshold<T: Ord + Copy>(values: &[T], p: Percent) -> Result<T, StatsError> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    percentile_sorted(&sorted, p)
}

pub(crate) fn percentile_sorted<T: Copy>(sorted: &[T], p: Percent) -> Result<T, StatsError> {
    if sorted.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(sorted[p.nearest_rank(sorted.len()) - 1])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub q1: MetricValue,
    pub median: MetricValue,
    pub q3: MetricValue,
}

impl Summary {
    fn of_sorted(sorted: &[MetricValue]) -> Result<Self, StatsError> {
        let at = |p| percentile_sorted(sorted, Percent::whole(p).expect("valid percent"));
        Ok(Summary { q1: at(25)?, median: at(50)?, q3: at(75)? })
    }
}

/// Cohort and tail counts for one field, or one subfield when allocating at
/// subfield granularity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldAllocation {
    pub field_id: String,
    pub cohort_count: u64,
    pub cohort_share: f64,
    pub tail_count: u64,
    pub tail_share: f64,
    /// `tail_share / cohort_share`.
    pub fold: f64,
}

impl FieldAllocation {
    /// From already-computed shares (fractions, not percentages).
    pub fn from_shares(field_id: impl Into<String>, cohort_share: f64, tail_share: f64, tail_count: u64) -> Self {
        FieldAllocation {
            field_id: field_id.into(),
            cohort_count: 0,
            cohort_share,
            tail_count,
            tail_share,
            fold: fold(tail_share, cohort_share),
        }
    }
}

fn fold(tail_share: f64, cohort_share: f64) -> f64 {
    if tail_share == 0.0 {
        0.0
    } else if cohort_share == 0.0 {
        f64::INFINITY
    } else {
        tail_share / cohort_share
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailMember {
    pub author_id: String,
    pub field_id: Option<String>,
    pub subfield_id: Option<String>,
    pub value: MetricValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub spec: TailSpec,
    pub cohort_size: usize,
    pub threshold: MetricValue,
    /// Most extreme first, then by author id.
    pub members: Vec<TailMember>,
    pub summary: Summary,
    pub field_allocation: Vec<FieldAllocation>,
    pub subfield_allocation: Vec<FieldAllocation>,
}

impl TailReport {
    pub fn member_ids(&self) -> BTreeSet<&str> {
        self.members.iter().map(|m| m.author_id.as_str()).collect()
    }

    pub fn enriched_fields(&self, fold_cutoff: f64) -> BTreeSet<String> {
        enrichment_flags(&self.field_allocation, fold_cutoff)
    }
}

/// Post-exclusion cohort shared by `specs`: authors admitted by every spec
/// with every value defined, by author id.
pub(super) fn cohort_values<'m, const N: usize>(
    metrics: &'m BTreeMap<String, AuthorMetrics>,
    specs: [&TailSpec; N],
) -> Vec<(&'m AuthorMetrics, [MetricValue; N])> {
    metrics
        .values()
        .filter(|m| specs.iter().all(|s| s.admits(m)))
        .filter_map(|m| {
            let mut values = [MetricValue::from_integer(0); N];
            for (slot, s) in values.iter_mut().zip(specs) {
                *slot = s.metric.value(m)?;
            }
            Some((m, values))
        })
        .collect()
}

/// Ascending values of `spec`'s metric over its post-exclusion cohort.
pub fn cohort_sorted_values(metrics: &BTreeMap<String, AuthorMetrics>, spec: &TailSpec) -> Vec<MetricValue> {
    sorted_column(&cohort_values(metrics, [spec]), 0)
}

pub(super) fn sorted_column<const N: usize>(
    rows: &[(&AuthorMetrics, [MetricValue; N])],
    col: usize,
) -> Vec<MetricValue> {
    let mut v: Vec<MetricValue> = rows.iter().map(|(_, vals)| vals[col]).collect();
    v.sort_unstable();
    v
}

pub fn tail_members(metrics: &BTreeMap<String, AuthorMetrics>, spec: &TailSpec) -> Result<TailReport, StatsError> {
    let rows = cohort_values(metrics, [spec]);
    if rows.is_empty() {
        return Err(StatsError::EmptyCohort(spec.metric));
    }
    let sorted = sorted_column(&rows, 0);
    let threshold = spec.threshold(&sorted)?;
    let summary = Summary::of_sorted(&sorted)?;

    let mut members: Vec<TailMember> = rows
        .iter()
        .filter(|(_, v)| spec.is_member(v[0], threshold))
        .map(|(m, v)| TailMember {
            author_id: m.author_id.clone(),
            field_id: m.field_id.clone(),
            subfield_id: m.subfield_id.clone(),
            value: v[0],
        })
        .collect();
    match spec.tail {
        Tail::Lower => members.sort_by(|x, y| x.value.cmp(&y.value).then_with(|| x.author_id.cmp(&y.author_id))),
        Tail::Upper => members.sort_by(|x, y| y.value.cmp(&x.value).then_with(|| x.author_id.cmp(&y.author_id))),
    }
    let field_allocation =
        allocate(rows.iter().map(|(m, _)| m.field_id.as_deref()), members.iter().map(|t| t.field_id.as_deref()));
    let subfield_allocation =
        allocate(rows.iter().map(|(m, _)| m.subfield_id.as_deref()), members.iter().map(|t| t.subfield_id.as_deref()));

    Ok(TailReport {
        spec: spec.clone(),
        cohort_size: rows.len(),
        threshold,
        members,
        summary,
        field_allocation,
        subfield_allocation,
    })
}

/// Shares per key, ordered by key; a missing key is grouped under "".
fn allocate<'a>(
    cohort: impl Iterator<Item = Option<&'a str>>,
    tail: impl Iterator<Item = Option<&'a str>>,
) -> Vec<FieldAllocation> {
    let mut counts: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for k in cohort {
        counts.entry(k.unwrap_or("")).or_default().0 += 1;
    }
    for k in tail {
        counts.entry(k.unwrap_or("")).or_default().1 += 1;
    }
    let cohort_total: u64 = counts.values().map(|c| c.0).sum();
    let tail_total: u64 = counts.values().map(|c| c.1).sum();
    counts
        .into_iter()
        .map(|(key, (cohort_count, tail_count))| {
            let cohort_share = cohort_count as f64 / cohort_total as f64;
            let tail_share = if tail_total == 0 { 0.0 } else { tail_count as f64 / tail_total as f64 };
            FieldAllocation {
                field_id: key.to_string(),
                cohort_count,
                cohort_share,
                tail_count,
                tail_share,
                fold: fold(tail_share, cohort_share),
            }
        })
        .collect()
}
/// Fields over-represented in the tail: `fold > fold_cutoff` and at least one
/// tail member.
pub fn enrichment_flags(allocation: &[FieldAllocation], fold_cutoff: f64) -> BTreeSet<String> {
    allocation.iter().filter(|f| f.tail_count > 0 && f.fold > fold_cutoff).map(|f| f.field_id.clone()).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::value::Percent;

    fn pct(p: u64) -> Percent {
        Percent::whole(p).unwrap()
    }

    #[test]
    fn nearest_rank_examples() {
        let v: Vec<u64> = (1..=100).collect();
        assert_eq!(percentile_threshold(&v, pct(1)), Ok(1));
        assert_eq!(percentile_threshold(&v, pct(50)), Ok(50));
        assert_eq!(percentile_threshold(&[5, 5, 5, 5], pct(25)), Ok(5));
        assert_eq!(percentile_threshold::<u64>(&[], pct(25)), Err(StatsError::Empty));
        let shuffled = [9u64, 1, 7, 3, 5];
        assert_eq!(percentile_threshold(&shuffled, pct(50)), Ok(5));
    }

    pub(crate) fn author(id: &str, field: &str, c_over_h2: MetricValue, a50pc: u32, a50: u32) -> AuthorMetrics {
        AuthorMetrics {
            author_id: id.into(),
            n_full_papers: 10,
            citations: 1000,
            h_index: 10,
            c_over_h2,
            a50pc: Some(a50pc),
            a50,
            field_id: Some(field.into()),
            subfield_id: None,
        }
    }

    fn cohort() -> BTreeMap<String, AuthorMetrics> {
        // 200 authors: values 1..=200 / 10 for C/h², fields alternate F/G,
        // the two smallest are in F.
        (1..=200u64)
            .map(|i| {
                let field = if i <= 2 || i % 2 == 0 { "F" } else { "G" };
                let id = format!("a{i:03}");
                (id.clone(), author(&id, field, MetricValue::new(i, 10), i as u32, (i % 7) as u32))
            })
            .collect()
    }

    #[test]
    fn lower_tail_is_strictly_below_threshold() {
        let m = cohort();
        let spec = TailSpec::new(Metric::CoverH2, Tail::Lower, pct(1));
        let r = tail_members(&m, &spec).unwrap();
        // rank ceil(0.01 * 200) = 2 -> threshold 0.2; only 0.1 is below.
        assert_eq!(r.threshold, MetricValue::new(2, 10));
        assert_eq!(r.member_ids().into_iter().collect::<Vec<_>>(), ["a001"]);
        assert_eq!(r.summary.median, MetricValue::new(100, 10));
        let total: u64 = r.field_allocation.iter().map(|f| f.tail_count).sum();
        assert_eq!(total as usize, r.members.len());
        let share_sum: f64 = r.field_allocation.iter().map(|f| f.tail_share).sum();
        assert!((share_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn upper_tail_and_exclusion() {
        let m = cohort();
        let spec = TailSpec::new(Metric::A50pc, Tail::Upper, pct(5)).excluding(["G"]);
        let r = tail_members(&m, &spec).unwrap();
        assert!(r.members.iter().all(|t| t.field_id.as_deref() == Some("F")));
        // F holds 101 authors; rank ceil(0.95 * 101) = 96.
        assert_eq!(r.cohort_size, 101);
        assert!(r.members.iter().all(|t| t.value > r.threshold));
        assert_eq!(r.members[0].value, integer(200));

        let all_excluded = TailSpec::new(Metric::A50pc, Tail::Upper, pct(5)).excluding(["F", "G"]);
        assert_eq!(tail_members(&m, &all_excluded).unwrap_err(), StatsError::EmptyCohort(Metric::A50pc));
    }

    #[test]
    fn enrichment_from_counts() {
        let m = cohort();
        let spec = TailSpec::new(Metric::CoverH2, Tail::Lower, pct(1));
        let r = tail_members(&m, &spec).unwrap();
        // The single member is in F, which holds 101/200 of the cohort.
        let f = r.field_allocation.iter().find(|f| f.field_id == "F").unwrap();
        assert!((f.fold - 200.0 / 101.0).abs() < 1e-12);
        assert_eq!(r.enriched_fields(DEFAULT_FOLD_CUTOFF), BTreeSet::from(["F".to_string()]));
    }

    #[test]
    fn equal_shares_are_not_enriched() {
        let a = FieldAllocation::from_shares("F", 0.25, 0.25, 3);
        assert_eq!(a.fold, 1.0);
        assert!(enrichment_flags(&[a], DEFAULT_FOLD_CUTOFF).is_empty());
        let chem = FieldAllocation::from_shares("Chemistry", 0.0613, 0.1380, 2065);
        assert!((chem.fold - 2.25).abs() < 0.01);
        assert!(enrichment_flags(&[chem], DEFAULT_FOLD_CUTOFF).contains("Chemistry"));
        let empty = FieldAllocation::from_shares("E", 0.10, 0.50, 0);
        assert!(enrichment_flags(&[empty], DEFAULT_FOLD_CUTOFF).is_empty());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>(), Ok(m));
        }
        assert!("h".parse::<Metric>().is_err());
    }
}
