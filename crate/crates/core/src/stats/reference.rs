//! Cohort-wide distribution constants observed on the full publication
//! database. They need the complete database to reproduce, so they serve as
//! reference points when reading synthetic or partial runs, not as targets.

use num_rational::Ratio;

use super::Metric;
use crate::value::MetricValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceDistribution {
    pub metric: Metric,
    /// 1st percentile for lower tails, 99th for upper tails.
    pub tail_1pct: MetricValue,
    /// 5th percentile for lower tails, 95th for upper tails.
    pub tail_5pct: Option<MetricValue>,
    pub q1: MetricValue,
    pub median: MetricValue,
    pub q3: MetricValue,
    /// Authors in the 1% tail.
    pub tail_size: Option<u64>,
}

const fn hundredths(v: u64) -> MetricValue {
    Ratio::new_raw(v, 100)
}

const fn whole(v: u64) -> MetricValue {
    Ratio::new_raw(v, 1)
}

pub const C_OVER_H2: ReferenceDistribution = ReferenceDistribution {
    metric: Metric::CoverH2,
    tail_1pct: hundredths(245),
    tail_5pct: Some(hundredths(276)),
    q1: hundredths(336),
    median: hundredths(411),
    q3: hundredths(611),
    tail_size: Some(14_967),
};

/// Physics & Astronomy excluded.
pub const A50PC: ReferenceDistribution = ReferenceDistribution {
    metric: Metric::A50pc,
    tail_1pct: whole(5),
    tail_5pct: None,
    q1: whole(21),
    median: whole(36),
    q3: whole(60),
    tail_size: None,
};

/// Physics & Astronomy excluded.
pub const A50: ReferenceDistribution = ReferenceDistribution {
    metric: Metric::A50,
    tail_1pct: whole(7),
    tail_5pct: Some(whole(2)),
    q1: whole(0),
    median: whole(0),
    q3: whole(0),
    tail_size: None,
};

pub const ALL: [ReferenceDistribution; 3] = [C_OVER_H2, A50PC, A50];

pub fn for_metric(metric: Metric) -> ReferenceDistribution {
    match metric {
        Metric::CoverH2 => C_OVER_H2,
        Metric::A50pc => A50PC,
        Metric::A50 => A50,
    }
}
