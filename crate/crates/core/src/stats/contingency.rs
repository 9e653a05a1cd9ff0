//! 2×2 co-occurrence of two tail memberships with a Woolf (log) odds-ratio
//! confidence interval.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use super::{cohort_values, StatsError, TailSpec};
use crate::metrics::AuthorMetrics;

/// Two-sided 95% normal quantile used by the interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStatus {
    Ok,
    /// At least one cell is zero; the interval is not computed and no
    /// continuity correction is applied.
    Degenerate,
}

impl TableStatus {
    pub fn name(self) -> &'static str {
        match self {
            TableStatus::Ok => "ok",
            TableStatus::Degenerate => "degenerate",
        }
    }
}

/// Rows: member of tail A yes/no. Columns: member of tail B yes/no.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContingencyTable {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    /// `(a·d)/(b·c)`; infinite or NaN when `b·c = 0`.
    pub odds_ratio: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub status: TableStatus,
}

impl ContingencyTable {
    pub fn from_counts(a: u64, b: u64, c: u64, d: u64) -> Self {
        let ad = a as f64 * d as f64;
        let bc = b as f64 * c as f64;
        let odds_ratio = ad / bc;
        let degenerate = a == 0 || b == 0 || c == 0 || d == 0;
        let (ci_low, ci_high) = if degenerate {
            (None, None)
        } else {
            let se = (1.0 / a as f64 + 1.0 / b as f64 + 1.0 / c as f64 + 1.0 / d as f64).sqrt();
            let ln = odds_ratio.ln();
            (Some((ln - Z_95 * se).exp()), Some((ln + Z_95 * se).exp()))
        };
        ContingencyTable {
            a,
            b,
            c,
            d,
            odds_ratio,
            ci_low,
            ci_high,
            status: if degenerate { TableStatus::Degenerate } else { TableStatus::Ok },
        }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn odds_ratio_exact(&self) -> Option<Ratio<u128>> {
        let bc = self.b as u128 * self.c as u128;
        (bc > 0).then(|| Ratio::new(self.a as u128 * self.d as u128, bc))
    }

    /// The same counts with the two memberships swapped.
    pub fn transposed(&self) -> Self {
        Self::from_counts(self.a, self.c, self.b, self.d)
    }
}

/// Both tails are evaluated on one shared cohort: authors outside the union of
/// the two specs' excluded fields with both values defined. Thresholds are
/// recomputed on that cohort.
pub fn cooccurrence(
    metrics: &BTreeMap<String, AuthorMetrics>,
    spec_a: &TailSpec,
    spec_b: &TailSpec,
) -> Result<ContingencyTable, StatsError> {
    let rows = cohort_values(metrics, [spec_a, spec_b]);
    if rows.is_empty() {
        return Err(StatsError::EmptyCohort(spec_a.metric));
    }
    let column = |i: usize| rows.iter().map(|(_, v)| v[i]).collect::<Vec<_>>();
    let threshold_a = spec_a.threshold_unsorted(&mut column(0))?;
    let threshold_b = spec_b.threshold_unsorted(&mut column(1))?;
    let mut cells = [0u64; 4];
    for (_, v) in &rows {
        let in_a = spec_a.is_member(v[0], threshold_a);
        let in_b = spec_b.is_member(v[1], threshold_b);
        cells[(usize::from(!in_a) << 1) | usize::from(!in_b)] += 1;
    }
    Ok(ContingencyTable::from_counts(cells[0], cells[1], cells[2], cells[3]))
}
