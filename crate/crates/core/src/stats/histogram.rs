use serde::Serialize;

use super::StatsError;
use crate::value::MetricValue;

/// Fixed-width bins over `[min, max)`, left-closed and right-open. Values
/// outside the range are counted in `below` / `above` rather than binned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub bins: Vec<(MetricValue, u64)>,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn excluded(&self) -> u64 {
        self.below + self.above
    }
}

pub fn histogram(
    values: &[MetricValue],
    bin_width: MetricValue,
    min: MetricValue,
    max: MetricValue,
) -> Result<Histogram, StatsError> {
    if *bin_width.numer() == 0 {
        return Err(StatsError::InvalidHistogram("bin width must be positive"));
    }
    if min >= max {
        return Err(StatsError::InvalidHistogram("min must be below max"));
    }
    let span = (max - min) / bin_width;
    let n_bins = span.ceil().to_integer() as usize;
    let mut bins: Vec<(MetricValue, u64)> =
        (0..n_bins).map(|i| (min + bin_width * MetricValue::from_integer(i as u64), 0)).collect();
    let (mut below, mut above) = (0, 0);
    for &v in values {
        if v < min {
            below += 1;
        } else if v >= max {
            above += 1;
        } else {
            bins[bin_of(v, min, bin_width)].1 += 1;
        }
    }
    Ok(Histogram { bins, below, above })
}

/// `floor((v - min) / width)` in 128-bit integer arithmetic.
fn bin_of(v: MetricValue, min: MetricValue, width: MetricValue) -> usize {
    let (vn, vd) = (*v.numer() as u128, *v.denom() as u128);
    let (mn, md) = (*min.numer() as u128, *min.denom() as u128);
    let (wn, wd) = (*width.numer() as u128, *width.denom() as u128);
    let num = (vn * md - mn * vd) * wd;
    let den = vd * md * wn;
    (num / den) as usize
}
