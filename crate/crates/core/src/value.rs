//! Exact metric values, percentages and their text rendering.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Every indicator is carried as a non-negative exact rational. Integer
/// indicators (A50%C, A50) are `n/1`.
pub type MetricValue = Ratio<u64>;

pub fn integer(v: u64) -> MetricValue {
    Ratio::from_integer(v)
}

/// Renders `value` with exactly `places` decimals, rounding half to even.
pub fn format_fixed(value: MetricValue, places: u32) -> String {
    let scale = 10u128.pow(places);
    let num = *value.numer() as u128 * scale;
    let den = *value.denom() as u128;
    let mut q = num / den;
    let rem = num % den;
    match (2 * rem).cmp(&den) {
        std::cmp::Ordering::Greater => q += 1,
        std::cmp::Ordering::Equal if q % 2 == 1 => q += 1,
        _ => {}
    }
    if places == 0 {
        return q.to_string();
    }
    let int = q / scale;
    let frac = q % scale;
    format!("{int}.{frac:0width$}", width = places as usize)
}

/// Renders `x` with `digits` significant figures (`6.4`, `0.09`, `0.16`).
pub fn format_significant(x: f64, digits: u32) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NA".into() } else { "inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let excess = magnitude + 1 - digits as i32;
    if excess > 0 {
        // Integer part alone has too many digits: 2251 -> 2300.
        let scale = 10f64.powi(excess);
        return format!("{:.0}", (x / scale).round() * scale);
    }
    // Rounding can carry into the next decade (0.0996 -> 0.10).
    let decimals = |m: i32| (digits as i32 - 1 - m).max(0) as usize;
    let first = format!("{:.*}", decimals(magnitude), x);
    let rounded: f64 = first.parse().unwrap_or(x);
    let m2 = rounded.abs().log10().floor() as i32;
    if m2 != magnitude {
        format!("{:.*}", decimals(m2), rounded)
    } else {
        first
    }
}

/// Nearest `f64`, for shares and plotting; never used for comparisons.
pub fn to_f64(value: MetricValue) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

/// A percentage in `(0, 100)`, parsed exactly from decimal text such as `1`,
/// `0.5` or `5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(Ratio<u64>);

impl Percent {
    pub fn new(value: Ratio<u64>) -> Option<Self> {
        let hundred = Ratio::from_integer(100);
        (value > Ratio::from_integer(0) && value < hundred).then_some(Percent(value))
    }

    pub fn whole(p: u64) -> Option<Self> {
        Self::new(Ratio::from_integer(p))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    /// `100 - p`.
    pub fn complement(self) -> Self {
        Percent(Ratio::from_integer(100) - self.0)
    }

    /// 1-based nearest rank `ceil(p/100 * n)`, clamped to `[1, n]`.
    pub fn nearest_rank(self, n: usize) -> usize {
        let num = *self.0.numer() as u128 * n as u128;
        let den = *self.0.denom() as u128 * 100;
        let rank = num.div_ceil(den) as usize;
        rank.clamp(1, n.max(1))
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            // Percent values come from finite decimals, so this terminates.
            let mut places = 1;
            while places < 18 {
                let scaled = self.0 * Ratio::from_integer(10u64.pow(places));
                if scaled.is_integer() {
                    break;
                }
                places += 1;
            }
            let s = format_fixed(self.0, places);
            write!(f, "{s}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid percentage {0:?}: expected a decimal strictly between 0 and 100")]
pub struct ParsePercentError(pub String);

impl FromStr for Percent {
    type Err = ParsePercentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePercentError(s.to_string());
        let t = s.trim().trim_end_matches('%');
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > 12 || int.len() > 3 {
            return Err(err());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int_v: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| err())? };
        Percent::new(Ratio::new(int_v * den + frac_v, den)).ok_or_else(err)
    }
}

impl Serialize for Percent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
