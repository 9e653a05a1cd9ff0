use std::collections::BTreeMap;

use num_rational::Ratio;
use proptest::prelude::*;

use crate::metrics::{
    a50_coauthors, a50pc_greedy, a50pc_oracle, a50pc_trace, author_metrics, c_over_h2, h_index, CountingRules,
    MetricError, MetricsConfig,
};
use crate::stats::{histogram, percentile_threshold, tail_members, ContingencyTable, Metric, Tail, TailSpec};
use crate::value::{MetricValue, Percent};

use crate::testkit::{h_index_brute, small_corpus};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn h_index_matches_brute_force(counts in prop::collection::vec(0u64..60, 0..40)) {
        prop_assert_eq!(h_index(&counts), h_index_brute(&counts));
    }

    #[test]
    fn h_index_ignores_order(mut counts in prop::collection::vec(0u64..60, 0..40), seed in any::<u64>()) {
        let h = h_index(&counts);
        rotate(&mut counts, seed);
        counts.reverse();
        prop_assert_eq!(h_index(&counts), h);
    }

    #[test]
    fn greedy_matches_oracle(corpus in small_corpus(30, 60, 200), citing_full_only in any::<bool>()) {
        let index = corpus.index();
        let rules = CountingRules { citing_full_only, ..CountingRules::default() };
        for id in corpus.author_ids() {
            prop_assert_eq!(a50pc_greedy(&index, &id, &rules), a50pc_oracle(&index, &id, &rules), "author {}", id);
        }
    }

    #[test]
    fn greedy_gains_shrink_and_stop_at_half(corpus in small_corpus(30, 60, 200)) {
        let index = corpus.index();
        let rules = CountingRules::default();
        for id in corpus.author_ids() {
            let Ok(trace) = a50pc_trace(&index, &id, &rules) else { continue };
            prop_assert!(!trace.steps.is_empty());
            for pair in trace.steps.windows(2) {
                prop_assert!(pair[0].contribution >= pair[1].contribution);
            }
            prop_assert!(trace.steps.iter().all(|s| s.contribution > 0));
            let last = trace.steps.last().unwrap();
            prop_assert!(2 * last.explained >= trace.total);
            prop_assert!(2 * (last.explained - last.contribution) < trace.total);
        }
    }

    #[test]
    fn metrics_match_record_level_recount(corpus in small_corpus(30, 60, 200)) {
        let index = corpus.index();
        let cfg = MetricsConfig { a50_threshold: 1, ..MetricsConfig::default() };
        for id in corpus.author_ids() {
            let counts = corpus.citation_counts(&id);
            let c: u64 = counts.iter().sum();
            match author_metrics(&index, &id, &cfg, 0) {
                Ok(m) => {
                    let h = h_index_brute(&counts);
                    prop_assert_eq!(m.citations, c);
                    prop_assert_eq!(m.h_index, h);
                    prop_assert_eq!(m.c_over_h2, Ratio::new(c, h as u64 * h as u64));
                    prop_assert!(m.citations >= (m.h_index as u64).pow(2));
                    prop_assert!(m.a50pc.is_none_or(|k| k >= 1));
                    prop_assert_eq!(m.a50, corpus.a50_brute(&id, 1));
                }
                Err(MetricError::Undefined { .. }) => prop_assert_eq!(c, 0),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }

    #[test]
    fn a50_relation_is_symmetric(corpus in small_corpus(20, 60, 0), threshold in 0u32..3) {
        let index = corpus.index();
        let rules = CountingRules::default();
        let ids: Vec<String> = corpus.author_ids().into_iter().collect();
        for id in &ids {
            prop_assert_eq!(a50_coauthors(&index, id, threshold, &rules), corpus.a50_brute(id, threshold));
        }
        // Summing the per-author counts counts every qualifying pair twice.
        let total: u32 = ids.iter().map(|id| a50_coauthors(&index, id, threshold, &rules)).sum();
        prop_assert_eq!(total % 2, 0);
    }

    #[test]
    fn index_ignores_row_order(corpus in small_corpus(20, 40, 120), seed in any::<u64>()) {
        let mut shuffled = corpus.clone();
        rotate(&mut shuffled.papers, seed);
        shuffled.papers.reverse();
        rotate(&mut shuffled.authorships, seed);
        shuffled.citations.reverse();
        prop_assert_eq!(corpus.index(), shuffled.index());
    }

    #[test]
    fn index_round_trips_its_records(corpus in small_corpus(20, 40, 120)) {
        let index = corpus.index();
        let rebuilt = crate::corpus::build_index(
            index.papers().cloned().collect::<Vec<_>>(),
            index.authorships().collect::<Vec<_>>(),
            index.citations().collect::<Vec<_>>(),
            index.taxonomy().clone(),
        ).unwrap();
        prop_assert_eq!(rebuilt.paper_count(), index.paper_count());
        prop_assert_eq!(rebuilt.citation_count(), index.citation_count());
        prop_assert_eq!(rebuilt.authorships().collect::<Vec<_>>(), index.authorships().collect::<Vec<_>>());
        prop_assert_eq!(rebuilt.citations().collect::<Vec<_>>(), index.citations().collect::<Vec<_>>());
        prop_assert_eq!(corpus.distinct_edges().len(), index.citation_count());
    }

    #[test]
    fn percentile_is_nearest_rank_and_order_free(
        mut values in prop::collection::vec(0u64..1000, 1..300),
        p in 1u64..100,
        seed in any::<u64>(),
    ) {
        let pct = Percent::whole(p).unwrap();
        let t = percentile_threshold(&values, pct).unwrap();
        let mut sorted = values.clone();
        sorted.sort();
        let rank = (p as usize * values.len()).div_ceil(100).max(1);
        prop_assert_eq!(t, sorted[rank - 1]);
        rotate(&mut values, seed);
        values.reverse();
        prop_assert_eq!(percentile_threshold(&values, pct).unwrap(), t);
    }

    #[test]
    fn selected_threshold_matches_sorted(
        values in prop::collection::vec((0u64..300, 1u64..12), 1..300),
        p in 1u64..100,
        upper in any::<bool>(),
    ) {
        let mut values: Vec<MetricValue> = values.iter().map(|&(n, d)| Ratio::new(n, d)).collect();
        let tail = if upper { Tail::Upper } else { Tail::Lower };
        let spec = TailSpec::new(Metric::CoverH2, tail, Percent::whole(p).unwrap());
        let mut sorted = values.clone();
        sorted.sort();
        prop_assert_eq!(spec.threshold_unsorted(&mut values).unwrap(), spec.threshold(&sorted).unwrap());
    }

    #[test]
    fn tails_are_strict_and_complete(
        values in prop::collection::vec((1u64..500, 1u64..20), 1..200),
        p in 1u64..50,
        upper in any::<bool>(),
    ) {
        let metrics: BTreeMap<String, _> = values
            .iter()
            .enumerate()
            .map(|(i, &(n, d))| {
                let id = format!("a{i:03}");
                (id.clone(), fake_author(&id, MetricValue::new(n, d)))
            })
            .collect();
        let tail = if upper { Tail::Upper } else { Tail::Lower };
        let spec = TailSpec::new(Metric::CoverH2, tail, Percent::whole(p).unwrap());
        let report = tail_members(&metrics, &spec).unwrap();
        let expected: Vec<&str> = metrics
            .values()
            .filter(|m| if upper { m.c_over_h2 > report.threshold } else { m.c_over_h2 < report.threshold })
            .map(|m| m.author_id.as_str())
            .collect();
        prop_assert_eq!(report.member_ids().into_iter().collect::<Vec<_>>(), expected);
        let tail_total: u64 = report.field_allocation.iter().map(|a| a.tail_count).sum();
        let cohort_total: u64 = report.field_allocation.iter().map(|a| a.cohort_count).sum();
        prop_assert_eq!(tail_total as usize, report.members.len());
        prop_assert_eq!(cohort_total as usize, metrics.len());
    }

    #[test]
    fn histogram_accounts_for_every_value(
        values in prop::collection::vec((0u64..400, 1u64..10), 0..300),
        width in (1u64..30, 1u64..10),
        lo in 0u64..10,
        span in 1u64..40,
    ) {
        let values: Vec<MetricValue> = values.iter().map(|&(n, d)| Ratio::new(n, d)).collect();
        let min = Ratio::from_integer(lo);
        let max = Ratio::from_integer(lo + span);
        let h = histogram(&values, Ratio::new(width.0, width.1), min, max).unwrap();
        let binned: u64 = h.bins.iter().map(|b| b.1).sum();
        prop_assert_eq!(binned + h.excluded(), values.len() as u64);
        prop_assert_eq!(h.below, values.iter().filter(|&&v| v < min).count() as u64);
        prop_assert_eq!(h.above, values.iter().filter(|&&v| v >= max).count() as u64);
    }

    #[test]
    fn odds_ratio_survives_transposition(a in 1u64..10_000, b in 1u64..10_000, c in 1u64..10_000, d in 1u64..10_000) {
        let t = ContingencyTable::from_counts(a, b, c, d);
        let u = t.transposed();
        prop_assert_eq!(t.odds_ratio_exact(), u.odds_ratio_exact());
        let (lo, hi) = (t.ci_low.unwrap(), t.ci_high.unwrap());
        prop_assert!(lo <= t.odds_ratio && t.odds_ratio <= hi);
        prop_assert!((lo - u.ci_low.unwrap()).abs() <= 1e-12 * lo.max(1.0));
    }

    #[test]
    fn c_over_h2_is_exact(c in 1u64..1_000_000, h in 1u32..1000) {
        let v = c_over_h2(c, h).unwrap();
        prop_assert_eq!(*v.numer() as u128 * (h as u128 * h as u128), c as u128 * *v.denom() as u128);
    }
}

fn rotate<T>(v: &mut [T], by: u64) {
    let n = v.len().max(1);
    v.rotate_left(by as usize % n);
}

fn fake_author(id: &str, c_over_h2: MetricValue) -> crate::metrics::AuthorMetrics {
    crate::metrics::AuthorMetrics {
        author_id: id.to_string(),
        n_full_papers: 6,
        citations: 1000,
        h_index: 10,
        c_over_h2,
        a50pc: Some(1),
        a50: 0,
        field_id: Some(if id.ends_with('7') { "F02" } else { "F01" }.to_string()),
        subfield_id: None,
    }
}
