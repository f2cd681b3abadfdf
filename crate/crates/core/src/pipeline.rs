//! Glue between the corpus, metrics and measure table used by the CLI and
//! the demo.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_label, Corpus, PublicationWindow, QualityProfile};
use crate::measure::MeasureTable;
use crate::metrics::{h_series_all, GroupMetrics, HIndexSeries, MetricsError, ScoreSet};

/// A publication window together with the years at which h is measured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exercise {
    pub window: PublicationWindow,
    pub years: Vec<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Rae2008,
    Ref2014,
}

impl Preset {
    pub fn exercise(&self) -> Exercise {
        match self {
            Preset::Rae2008 => Exercise {
                window: PublicationWindow::RAE_2008,
                years: (2008..=2014).collect(),
            },
            Preset::Ref2014 => Exercise {
                window: PublicationWindow::REF_2014,
                years: vec![2014],
            },
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rae2008" => Ok(Preset::Rae2008),
            "ref2014" => Ok(Preset::Ref2014),
            other => Err(format!("unknown preset `{other}` (expected rae2008 or ref2014)")),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Rae2008 => "rae2008",
            Preset::Ref2014 => "ref2014",
        })
    }
}

pub fn scores_for<'a, I>(profiles: I) -> Vec<ScoreSet>
where
    I: IntoIterator<Item = &'a QualityProfile>,
{
    profiles.into_iter().map(ScoreSet::from_profile).collect()
}

/// h-series for every institution in `discipline`, with the NCI from the
/// matching profile attached. Also returns the count of publications that
/// pass the country, window and category steps.
pub fn group_metrics(
    corpus: &Corpus,
    country: &str,
    discipline: &str,
    exercise: &Exercise,
) -> Result<(Vec<HIndexSeries>, Vec<GroupMetrics>, usize), MetricsError> {
    let (series, matching) = h_series_all(corpus, country, exercise.window, discipline, &exercise.years)?;
    let nci: HashMap<&str, f64> = corpus
        .profiles_for(discipline)
        .filter_map(|p| p.nci.map(|v| (p.institution.as_str(), v)))
        .collect();
    let metrics = series
        .iter()
        .map(|s| GroupMetrics::from_series(s, nci.get(s.institution.as_str()).copied()))
        .collect();
    Ok((series, metrics, matching))
}

/// Disciplines to process: the requested one, or else every discipline with
/// a profile, or else every mapped discipline. Sorted, normalised.
pub fn disciplines(corpus: &Corpus, requested: Option<&str>) -> Vec<String> {
    if let Some(d) = requested {
        return vec![normalize_label(d)];
    }
    let mut out: Vec<String> = corpus.profiles.iter().map(|p| normalize_label(&p.discipline)).collect();
    if out.is_empty() {
        out = corpus.discipline_maps.iter().map(|m| normalize_label(&m.discipline)).collect();
    }
    out.sort();
    out.dedup();
    out
}

/// Scores plus h (and optionally h-hat) values for the given disciplines.
pub fn measure_table(
    corpus: &Corpus,
    country: &str,
    disciplines: &[String],
    h: Option<&Exercise>,
    h_hat: Option<&Exercise>,
) -> Result<MeasureTable, MetricsError> {
    let mut table = MeasureTable::new();
    for d in disciplines {
        let scores = scores_for(corpus.profiles_for(d));
        table.add_scores(&scores);
        if let Some(ex) = h {
            let (_, metrics, _) = group_metrics(corpus, country, d, ex)?;
            table.add_metrics(&metrics, false);
        }
        if let Some(ex) = h_hat {
            let (_, metrics, _) = group_metrics(corpus, country, d, ex)?;
            table.add_metrics(&metrics, true);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_encode_both_exercises() {
        let rae = Preset::Rae2008.exercise();
        assert_eq!(rae.window, PublicationWindow::new(2001, 2007).unwrap());
        assert_eq!(rae.years, (2008..=2014).collect::<Vec<_>>());
        let refx = Preset::Ref2014.exercise();
        assert_eq!(refx.window, PublicationWindow::new(2008, 2013).unwrap());
        assert_eq!(refx.years, vec![2014]);
        assert_eq!("REF2014".parse::<Preset>().unwrap(), Preset::Ref2014);
        assert!("ref2021".parse::<Preset>().is_err());
    }
}
