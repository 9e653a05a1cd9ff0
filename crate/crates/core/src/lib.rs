//! Citation-orchestration indicators over publication corpora.
//!
//! Paper, authorship and citation tables become an interned index
//! ([`corpus`]); per-author C/h², A50%C and A50 come from [`metrics`], and
//! [`stats`] reports the extreme tails of the eligible cohort. [`synth`]
//! generates labelled corpora for end-to-end checks; [`pipeline`] ties a run
//! together.

pub mod cohort;
pub mod corpus;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod value;

#[cfg(test)]
mod properties;
#[cfg(test)]
mod testkit;
