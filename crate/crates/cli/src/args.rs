use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "refh", version, about = "Departmental h-index and research assessment pipeline")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Country code used by the document filter.
    #[arg(long, global = true, default_value = "GB")]
    pub country: String,

    /// Discipline label; defaults to every discipline with a profile.
    #[arg(long, global = true)]
    pub discipline: Option<String>,

    /// rae2008 (window 2001:2007, years 2008..2014) or ref2014 (window 2008:2013, year 2014).
    #[arg(long, global = true)]
    pub preset: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and print a summary.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Write hseries.csv for every institution.
    Hindex {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Write scores.csv (s, s_prime, s_output, strength) for every profile.
    Score {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Write correlations.csv, corr_series.csv and fig_points.csv.
    Correlate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Comma-separated x:y measure pairs, e.g. `s:h_2008,s:i`.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Write a competition-ranked table with movement markers.
    Rank {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Measure to rank by (s, s_prime, s_output, strength, i, h_YYYY, h_hat_YYYY).
        #[arg(long)]
        measure: String,
        /// Measure whose ranking serves as the movement baseline.
        #[arg(long)]
        baseline: Option<String>,
        /// Long-format `institution,discipline,measure,value` file used instead of a corpus.
        #[arg(long)]
        values: Option<PathBuf>,
        /// Publication window for h_hat measures.
        #[arg(long, default_value = "2008:2013")]
        hat_window: String,
    },
    /// Generate a seeded synthetic corpus.
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        institutions: u32,
        /// Papers per institution, MIN:MAX.
        #[arg(long, default_value = "120:240")]
        papers: String,
        /// `lognormal:MU:SIGMA` or `power-law:ALPHA:XMIN`.
        #[arg(long, default_value = "lognormal:2:1")]
        model: String,
        #[arg(long, default_value_t = 0.25)]
        accrual: f64,
        #[arg(long, default_value_t = 0.8)]
        quality_link: f64,
        #[arg(long, default_value_t = 0.6)]
        citation_spread: f64,
        /// Publication window of generated papers.
        #[arg(long, default_value = "2001:2013")]
        window: String,
        #[arg(long, default_value_t = 2013)]
        last_citing_year: i32,
    },
}

#[derive(Debug, Args, Clone)]
pub struct CorpusArgs {
    /// Directory holding publications.csv, citations.csv, profiles.csv, discipline_map.csv.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Overrides the publications file (`.csv` or `.json`).
    #[arg(long)]
    pub publications: Option<PathBuf>,
    /// Overrides the citations file.
    #[arg(long)]
    pub citations: Option<PathBuf>,
    /// Overrides the profiles file; `score` needs only this one.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Overrides the discipline map file.
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct WindowArgs {
    /// Publication window START:END.
    #[arg(long)]
    pub window: Option<String>,
    /// Measurement years: `2008..2014` (inclusive) or `2008,2010`.
    #[arg(long)]
    pub years: Option<String>,
}
