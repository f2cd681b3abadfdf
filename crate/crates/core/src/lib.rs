//! Departmental h-index pipeline for research assessment data.
//!
//! The crate is organised the way the data flows:
//!
//! * [`corpus`] holds publications, graded quality profiles and
//!   discipline maps, and applies the four-step document filter.
//! * [`metrics`] turns filtered publications into windowed h-indices and
//!   profiles into the `s`, `s'`, `s_output` scores and strength.
//! * [`stats`] correlates the two families of measures.
//! * [`ranking`] builds competition-ranked tables and movement markers.
//! * [`synth`] generates seeded synthetic corpora plus brute-force oracles.
//! * [`io`] reads and writes the CSV/JSON file formats.

pub mod corpus;
pub mod io;
pub mod measure;
pub mod metrics;
pub mod pipeline;
pub mod ranking;
pub mod stats;
pub mod synth;

pub use corpus::{
    Corpus, CorpusError, DisciplineMap, DocumentFilter, GradeProfile, PublicationRecord,
    PublicationWindow, QualityProfile,
};
pub use measure::{Measure, MeasureTable};
pub use metrics::{GroupMetrics, HIndexSeries, MetricsError, ScoreSet};
pub use ranking::{Movement, MovementReport, RankedEntry, RankedTable, RenderFormat};
pub use stats::{CorrelationReport, CorrelationSeries, StatsError};
pub use synth::{CitationModel, SynthConfig, SynthError};

/// Fixed precision for every floating-point value written to an output file.
pub const OUTPUT_DECIMALS: usize = 6;

/// Formats a float with [`OUTPUT_DECIMALS`] places.
pub fn fmt_f64(value: f64) -> String {
    let text = format!("{value:.prec$}", prec = OUTPUT_DECIMALS);
    // avoid "-0.000000"
    if text.starts_with('-') && text[1..].bytes().all(|b| b == b'0' || b == b'.') {
        text[1..].to_string()
    } else {
        text
    }
}
