//! Departmental h-indices and peer-review quality scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, DocumentFilter, GradeProfile, PublicationRecord, PublicationWindow, QualityProfile};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("measurement year {year} must be after the window start {start}")]
    MeasurementBeforeWindow { year: i32, start: i32 },
    #[error("measurement years must be strictly ascending")]
    UnsortedYears,
    #[error("staff count must be positive, found {0}")]
    NonPositiveStaff(f64),
}

/// Citations received up to and including the end of `year`.
///
/// The h-index for measurement year `Y` uses `citations_to_end_of(r, Y - 1)`.
pub fn citations_to_end_of(record: &PublicationRecord, year: i32) -> u64 {
    record.citations_by_year.range(..=year).map(|(_, c)| c).sum()
}

/// Largest `n` such that at least `n` of the counts are `>= n`.
pub fn compute_h(counts: &[u64]) -> u64 {
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|&(i, &c)| c > i as u64)
        .count() as u64
}

/// h-index of the publications of one department in one discipline,
/// measured at the start of `measurement_year`.
pub fn departmental_h(
    corpus: &Corpus,
    country: &str,
    window: PublicationWindow,
    discipline: &str,
    institution: &str,
    measurement_year: i32,
) -> Result<u64, MetricsError> {
    let filter = DocumentFilter::new(country, window, corpus.discipline(discipline)?, institution);
    h_for_filter(corpus, &filter, measurement_year)
}

fn h_for_filter(corpus: &Corpus, filter: &DocumentFilter, year: i32) -> Result<u64, MetricsError> {
    if year <= filter.window.start_year() {
        return Err(MetricsError::MeasurementBeforeWindow {
            year,
            start: filter.window.start_year(),
        });
    }
    let counts: Vec<u64> = filter
        .apply(&corpus.publications)
        .into_iter()
        .map(|r| citations_to_end_of(r, year - 1))
        .collect();
    Ok(compute_h(&counts))
}

/// h-indices of one department for a list of measurement years.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HIndexSeries {
    pub institution: String,
    pub discipline: String,
    pub window: PublicationWindow,
    pub values: BTreeMap<i32, u64>,
}

impl HIndexSeries {
    pub fn is_non_decreasing(&self) -> bool {
        self.values.values().zip(self.values.values().skip(1)).all(|(a, b)| a <= b)
    }
}

pub fn h_series(
    corpus: &Corpus,
    country: &str,
    window: PublicationWindow,
    discipline: &str,
    institution: &str,
    years: &[i32],
) -> Result<HIndexSeries, MetricsError> {
    if years.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MetricsError::UnsortedYears);
    }
    let map = corpus.discipline(discipline)?;
    let filter = DocumentFilter::new(country, window, map, institution);
    let records = filter.apply(&corpus.publications);
    let mut values = BTreeMap::new();
    for &year in years {
        if year <= window.start_year() {
            return Err(MetricsError::MeasurementBeforeWindow {
                year,
                start: window.start_year(),
            });
        }
        let counts: Vec<u64> = records.iter().map(|r| citations_to_end_of(r, year - 1)).collect();
        values.insert(year, compute_h(&counts));
    }
    Ok(HIndexSeries {
        institution: institution.to_string(),
        discipline: map.discipline.clone(),
        window,
        values,
    })
}

/// h-series for every institution relevant to the discipline, sorted by
/// institution. Also returns the number of distinct matching publications.
pub fn h_series_all(
    corpus: &Corpus,
    country: &str,
    window: PublicationWindow,
    discipline: &str,
    years: &[i32],
) -> Result<(Vec<HIndexSeries>, usize), MetricsError> {
    let map = corpus.discipline(discipline)?;
    let field = DocumentFilter::new(country, window, map, "");
    let matching = corpus.publications.iter().filter(|r| field.matches_field(r)).count();
    let series = corpus
        .institutions_for(country, window, discipline)?
        .iter()
        .map(|inst| h_series(corpus, country, window, discipline, inst, years))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((series, matching))
}

fn weighted(profile: &GradeProfile, w3: f64, w2: f64) -> f64 {
    // p4 + w3 p3 + w2 p2; clamp only guards against round-off past 100.
    (profile.p4 + w3 * profile.p3 + w2 * profile.p2).clamp(0.0, 100.0)
}

fn funding_s(profile: &GradeProfile) -> f64 {
    // p4 + (3 p3 + p2) / 7 keeps a single rounding on the sevenths
    (profile.p4 + (3.0 * profile.p3 + profile.p2) / 7.0).clamp(0.0, 100.0)
}

/// `s = p4 + 3/7 p3 + 1/7 p2`.
pub fn score_s(profile: &QualityProfile) -> f64 {
    funding_s(&profile.overall)
}

/// `s' = p4 + 1/3 p3`.
pub fn score_s_prime(profile: &QualityProfile) -> f64 {
    weighted(&profile.overall, 1.0 / 3.0, 0.0)
}

/// `s` applied to the output sub-profile, if there is one.
pub fn score_s_output(profile: &QualityProfile) -> Option<f64> {
    profile.output.as_ref().map(funding_s)
}

/// Overall strength `S = s N`.
pub fn strength(profile: &QualityProfile) -> Result<f64, MetricsError> {
    if !(profile.staff_fte.is_finite() && profile.staff_fte > 0.0) {
        return Err(MetricsError::NonPositiveStaff(profile.staff_fte));
    }
    Ok(score_s(profile) * profile.staff_fte)
}

/// Scores derived from one quality profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub institution: String,
    pub discipline: String,
    pub s: f64,
    pub s_prime: f64,
    pub s_output: Option<f64>,
    pub strength: Option<f64>,
    pub nci: Option<f64>,
}

impl ScoreSet {
    pub fn from_profile(profile: &QualityProfile) -> Self {
        Self {
            institution: profile.institution.clone(),
            discipline: profile.discipline.clone(),
            s: score_s(profile),
            s_prime: score_s_prime(profile),
            s_output: score_s_output(profile),
            strength: strength(profile).ok(),
            nci: profile.nci,
        }
    }
}

/// Citation-side measures for one (institution, discipline).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub institution: String,
    pub discipline: String,
    pub h: BTreeMap<i32, u64>,
    pub nci: Option<f64>,
}

impl GroupMetrics {
    pub fn from_series(series: &HIndexSeries, nci: Option<f64>) -> Self {
        Self {
            institution: series.institution.clone(),
            discipline: series.discipline.clone(),
            h: series.values.clone(),
            nci,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::DisciplineMap;

    fn profile(bands: [f64; 5], staff: f64) -> QualityProfile {
        let [p4, p3, p2, p1, pu] = bands;
        QualityProfile {
            institution: "X".into(),
            discipline: "physics".into(),
            overall: GradeProfile::new(p4, p3, p2, p1, pu),
            output: None,
            staff_fte: staff,
            nci: None,
        }
    }

    fn paper(id: &str, year: i32, cites: &[(i32, u64)]) -> PublicationRecord {
        PublicationRecord {
            pub_id: id.into(),
            pub_year: year,
            country: "GB".into(),
            affiliations: ["X".to_string()].into(),
            categories: ["Physics and Astronomy".to_string()].into(),
            citations_by_year: cites.iter().copied().collect(),
        }
    }

    #[test]
    fn citations_to_end_of_examples() {
        assert_eq!(citations_to_end_of(&paper("a", 2001, &[]), 2010), 0);
        let r = paper("a", 2001, &[(2002, 3), (2003, 5), (2008, 9)]);
        assert_eq!(citations_to_end_of(&r, 2007), 3 + 5);
        assert_eq!(citations_to_end_of(&paper("a", 2001, &[(2002, 3)]), 2001), 0);
    }

    fn brute_h(counts: &[u64]) -> u64 {
        (0..=counts.len() as u64)
            .filter(|&n| counts.iter().filter(|&&c| c >= n).count() as u64 >= n)
            .max()
            .unwrap()
    }

    #[test]
    fn compute_h_examples() {
        assert_eq!(compute_h(&[]), 0);
        assert_eq!(brute_h(&[10, 5, 3, 2, 1]), 3);
        assert_eq!(compute_h(&[10, 5, 3, 2, 1]), 3);
        assert_eq!(brute_h(&[4, 4, 4, 4]), 4);
        assert_eq!(compute_h(&[4, 4, 4, 4]), 4);
        assert_eq!(compute_h(&[0, 0]), 0);
        assert_eq!(compute_h(&[7]), 1);
    }

    fn fixture() -> Corpus {
        // cutoff 2007: [2, 2, 1]; cutoff 2008: [5, 2, 1]
        let papers = vec![
            paper("a", 2002, &[(2003, 1), (2007, 1), (2008, 3)]),
            paper("b", 2004, &[(2005, 2)]),
            paper("c", 2006, &[(2007, 1)]),
        ];
        Corpus::new(papers, vec![], DisciplineMap::standard()).unwrap()
    }

    #[test]
    fn departmental_h_examples() {
        let c = fixture();
        let w = PublicationWindow::RAE_2008;
        assert_eq!(departmental_h(&c, "GB", w, "physics", "X", 2008).unwrap(), 2);
        assert_eq!(departmental_h(&c, "GB", w, "physics", "X", 2009).unwrap(), 2);
        assert_eq!(departmental_h(&c, "GB", w, "physics", "nobody", 2008).unwrap(), 0);
        assert!(matches!(
            departmental_h(&c, "GB", w, "physics", "X", 2001),
            Err(MetricsError::MeasurementBeforeWindow { .. })
        ));
    }

    #[test]
    fn series_single_year_matches_departmental_h() {
        let c = fixture();
        let w = PublicationWindow::RAE_2008;
        let s = h_series(&c, "GB", w, "physics", "X", &[2008]).unwrap();
        assert_eq!(s.values.len(), 1);
        assert_eq!(s.values[&2008], departmental_h(&c, "GB", w, "physics", "X", 2008).unwrap());
        assert!(matches!(
            h_series(&c, "GB", w, "physics", "X", &[2009, 2008]),
            Err(MetricsError::UnsortedYears)
        ));
    }

    #[test]
    fn series_on_uncited_corpus_is_zero() {
        let c = Corpus::new(vec![paper("a", 2003, &[])], vec![], DisciplineMap::standard()).unwrap();
        let years: Vec<i32> = (2008..=2014).collect();
        let s = h_series(&c, "GB", PublicationWindow::RAE_2008, "physics", "X", &years).unwrap();
        assert!(s.values.values().all(|&h| h == 0));
        assert_eq!(s.values.len(), 7);
    }

    #[test]
    fn score_examples() {
        assert_eq!(score_s(&profile([100.0, 0.0, 0.0, 0.0, 0.0], 1.0)), 100.0);
        let mixed = profile([20.0, 40.0, 30.0, 10.0, 0.0], 10.0);
        let expected = 20.0 + 120.0 / 7.0 + 30.0 / 7.0;
        assert!((score_s(&mixed) - expected).abs() < 1e-9);
        assert!((score_s(&mixed) - 41.428_571_428_571).abs() < 1e-9);
        assert_eq!(score_s(&profile([0.0, 0.0, 0.0, 0.0, 100.0], 1.0)), 0.0);

        assert_eq!(score_s_prime(&profile([100.0, 0.0, 0.0, 0.0, 0.0], 1.0)), 100.0);
        assert!((score_s_prime(&profile([0.0, 60.0, 40.0, 0.0, 0.0], 1.0)) - 20.0).abs() < 1e-12);
        assert_eq!(score_s_prime(&profile([0.0, 0.0, 100.0, 0.0, 0.0], 1.0)), 0.0);

        assert!((strength(&mixed).unwrap() - 414.285_714_285_71).abs() < 1e-8);
        assert_eq!(strength(&profile([100.0, 0.0, 0.0, 0.0, 0.0], 1.0)).unwrap(), 100.0);
        assert!(matches!(
            strength(&profile([100.0, 0.0, 0.0, 0.0, 0.0], 0.0)),
            Err(MetricsError::NonPositiveStaff(_))
        ));
    }

    #[test]
    fn output_score_absent_or_weighted() {
        let mut p = profile([100.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        assert_eq!(score_s_output(&p), None);
        p.output = Some(GradeProfile::new(100.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(score_s_output(&p), Some(100.0));
        p.output = Some(GradeProfile::new(20.0, 40.0, 30.0, 10.0, 0.0));
        assert!((score_s_output(&p).unwrap() - (20.0 + 150.0 / 7.0)).abs() < 1e-9);
    }

    #[test]
    fn pure_three_star_weights() {
        let p = profile([0.0, 100.0, 0.0, 0.0, 0.0], 1.0);
        assert!((score_s(&p) - 300.0 / 7.0).abs() < 1e-12);
        assert!((score_s_prime(&p) - 100.0 / 3.0).abs() < 1e-12);
    }
}
