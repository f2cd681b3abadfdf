//! Publication and quality-profile data model, plus the document filter.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for the "percentages sum to 100" profile invariant.
pub const PROFILE_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}: field `{field}`: {message}")]
    Malformed {
        file: String,
        line: u64,
        field: String,
        message: String,
    },
    #[error("{file}:{line}: duplicate pub_id `{pub_id}`")]
    DuplicatePubId {
        file: String,
        line: u64,
        pub_id: String,
    },
    #[error("{file}:{line}: profile sum for {institution}/{discipline} is {sum}, expected 100")]
    ProfileSum {
        file: String,
        line: u64,
        institution: String,
        discipline: String,
        sum: f64,
    },
    #[error("{file}:{line}: pub_id `{pub_id}` cited in {citing_year}, before its publication year {pub_year}")]
    CitingBeforePublication {
        file: String,
        line: u64,
        pub_id: String,
        citing_year: i32,
        pub_year: i32,
    },
    #[error("{file}:{line}: citation row for unknown pub_id `{pub_id}`")]
    UnknownPublication {
        file: String,
        line: u64,
        pub_id: String,
    },
    #[error("unknown discipline `{0}`")]
    UnknownDiscipline(String),
    #[error("invalid publication window {start}:{end}")]
    InvalidWindow { start: i32, end: i32 },
    #[error("invalid record `{id}`: {message}")]
    InvalidRecord { id: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Trimmed, case-folded form used for category and discipline matching.
pub fn normalize_label(label: &str) -> String {
    label.trim().to_lowercase()
}

/// One paper together with its per-year citation counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub pub_year: i32,
    /// Empty when the source has no country; such records never pass the
    /// country step of the filter.
    pub country: String,
    pub affiliations: BTreeSet<String>,
    pub categories: BTreeSet<String>,
    #[serde(default)]
    pub citations_by_year: BTreeMap<i32, u64>,
}

impl PublicationRecord {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |message: &str| CorpusError::InvalidRecord {
            id: self.pub_id.clone(),
            message: message.to_string(),
        };
        if self.pub_id.trim().is_empty() {
            return Err(bad("empty pub_id"));
        }
        if self.affiliations.is_empty() {
            return Err(bad("no affiliations"));
        }
        if self.categories.is_empty() {
            return Err(bad("no categories"));
        }
        if let Some((&year, _)) = self.citations_by_year.iter().next() {
            if year < self.pub_year {
                return Err(bad(&format!(
                    "citing year {year} before publication year {}",
                    self.pub_year
                )));
            }
        }
        Ok(())
    }
}

/// The set of subject categories whose union defines a discipline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisciplineMap {
    pub discipline: String,
    pub categories: BTreeSet<String>,
}

impl DisciplineMap {
    pub fn new<I, S>(discipline: &str, categories: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            discipline: discipline.to_string(),
            categories: categories.into_iter().map(Into::into).collect(),
        }
    }

    /// The four Scopus-category groupings used for the RAE/REF units of
    /// assessment in biology, chemistry, physics and sociology.
    pub fn standard() -> Vec<DisciplineMap> {
        vec![
            DisciplineMap::new(
                "biology",
                [
                    "Biochemistry, Genetics and Molecular Biology",
                    "Agricultural and Biological Sciences",
                    "Immunology and Microbiology",
                ],
            ),
            DisciplineMap::new("chemistry", ["Chemistry", "Chemical Engineering"]),
            DisciplineMap::new("physics", ["Physics and Astronomy"]),
            DisciplineMap::new("sociology", ["Social Sciences"]),
        ]
    }

    pub fn normalized_categories(&self) -> HashSet<String> {
        self.categories.iter().map(|c| normalize_label(c)).collect()
    }
}

/// Inclusive range of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicationWindow {
    start_year: i32,
    end_year: i32,
}

impl PublicationWindow {
    pub fn new(start_year: i32, end_year: i32) -> Result<Self, CorpusError> {
        if start_year > end_year {
            return Err(CorpusError::InvalidWindow {
                start: start_year,
                end: end_year,
            });
        }
        Ok(Self {
            start_year,
            end_year,
        })
    }

    /// Publication window of RAE 2008.
    pub const RAE_2008: Self = Self {
        start_year: 2001,
        end_year: 2007,
    };

    /// Publication window of REF 2014.
    pub const REF_2014: Self = Self {
        start_year: 2008,
        end_year: 2013,
    };

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.end_year
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }
}

impl fmt::Display for PublicationWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start_year, self.end_year)
    }
}

/// Percentages of work graded 4*, 3*, 2*, 1* and unclassified.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GradeProfile {
    pub p4: f64,
    pub p3: f64,
    pub p2: f64,
    pub p1: f64,
    pub pu: f64,
}

impl GradeProfile {
    pub fn new(p4: f64, p3: f64, p2: f64, p1: f64, pu: f64) -> Self {
        Self { p4, p3, p2, p1, pu }
    }

    pub fn bands(&self) -> [f64; 5] {
        [self.p4, self.p3, self.p2, self.p1, self.pu]
    }

    pub fn sum(&self) -> f64 {
        self.bands().iter().sum()
    }

    /// Checks the range and sum invariants, returning the offending sum on
    /// failure.
    pub fn check(&self) -> Result<(), f64> {
        let in_range = self
            .bands()
            .iter()
            .all(|p| p.is_finite() && (0.0..=100.0).contains(p));
        let sum = self.sum();
        if in_range && (sum - 100.0).abs() <= PROFILE_SUM_TOLERANCE {
            Ok(())
        } else {
            Err(sum)
        }
    }

    /// Component-wise `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &GradeProfile, alpha: f64) -> GradeProfile {
        let m = |a: f64, b: f64| alpha * a + (1.0 - alpha) * b;
        GradeProfile {
            p4: m(self.p4, other.p4),
            p3: m(self.p3, other.p3),
            p2: m(self.p2, other.p2),
            p1: m(self.p1, other.p1),
            pu: m(self.pu, other.pu),
        }
    }
}

/// Peer-review outcome for one submitted group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityProfile {
    pub institution: String,
    pub discipline: String,
    pub overall: GradeProfile,
    /// Output sub-profile (environment and esteem excluded), when published.
    pub output: Option<GradeProfile>,
    pub staff_fte: f64,
    /// Externally supplied normalised citation impact.
    pub nci: Option<f64>,
}

impl QualityProfile {
    /// Validates the profile; the error is a short reason string that the
    /// ingest layer decorates with file and line.
    pub fn check(&self) -> Result<(), ProfileViolation> {
        self.overall.check().map_err(ProfileViolation::Sum)?;
        if let Some(out) = &self.output {
            out.check().map_err(ProfileViolation::OutputSum)?;
        }
        if !(self.staff_fte.is_finite() && self.staff_fte > 0.0) {
            return Err(ProfileViolation::StaffFte(self.staff_fte));
        }
        if let Some(nci) = self.nci {
            if !(nci.is_finite() && nci >= 0.0) {
                return Err(ProfileViolation::Nci(nci));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileViolation {
    Sum(f64),
    OutputSum(f64),
    StaffFte(f64),
    Nci(f64),
}

/// The four filter steps for one (country, window, discipline, institution)
/// query. Categories are pre-normalised.
#[derive(Debug, Clone)]
pub struct DocumentFilter {
    pub country: String,
    pub window: PublicationWindow,
    pub categories: HashSet<String>,
    pub institution: String,
}

impl DocumentFilter {
    pub fn new(
        country: &str,
        window: PublicationWindow,
        map: &DisciplineMap,
        institution: &str,
    ) -> Self {
        Self {
            country: country.trim().to_string(),
            window,
            categories: map.normalized_categories(),
            institution: institution.to_string(),
        }
    }

    /// Steps (i) to (iii): everything except the institution.
    pub fn matches_field(&self, record: &PublicationRecord) -> bool {
        !record.country.is_empty()
            && record.country.eq_ignore_ascii_case(&self.country)
            && self.window.contains(record.pub_year)
            && record
                .categories
                .iter()
                .any(|c| self.categories.contains(&normalize_label(c)))
    }

    pub fn matches(&self, record: &PublicationRecord) -> bool {
        self.matches_field(record) && record.affiliations.contains(&self.institution)
    }

    pub fn apply<'a, I>(&self, records: I) -> Vec<&'a PublicationRecord>
    where
        I: IntoIterator<Item = &'a PublicationRecord>,
    {
        records.into_iter().filter(|r| self.matches(r)).collect()
    }
}

/// Publications, profiles and discipline maps. Immutable once built.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub publications: Vec<PublicationRecord>,
    pub profiles: Vec<QualityProfile>,
    pub discipline_maps: Vec<DisciplineMap>,
}

impl Corpus {
    /// Builds a corpus, checking every record and profile invariant.
    pub fn new(
        publications: Vec<PublicationRecord>,
        profiles: Vec<QualityProfile>,
        discipline_maps: Vec<DisciplineMap>,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for record in &publications {
            record.validate()?;
            if !seen.insert(record.pub_id.as_str()) {
                return Err(CorpusError::InvalidRecord {
                    id: record.pub_id.clone(),
                    message: "duplicate pub_id".into(),
                });
            }
        }
        for profile in &profiles {
            if let Err(v) = profile.check() {
                return Err(CorpusError::InvalidRecord {
                    id: format!("{}/{}", profile.institution, profile.discipline),
                    message: format!("{v:?}"),
                });
            }
        }
        for map in &discipline_maps {
            if map.categories.is_empty() {
                return Err(CorpusError::InvalidRecord {
                    id: map.discipline.clone(),
                    message: "discipline map with no categories".into(),
                });
            }
        }
        Ok(Self {
            publications,
            profiles,
            discipline_maps,
        })
    }

    pub fn discipline(&self, label: &str) -> Result<&DisciplineMap, CorpusError> {
        let wanted = normalize_label(label);
        self.discipline_maps
            .iter()
            .find(|m| normalize_label(&m.discipline) == wanted)
            .ok_or_else(|| CorpusError::UnknownDiscipline(label.to_string()))
    }

    pub fn filter_documents(
        &self,
        country: &str,
        window: PublicationWindow,
        discipline: &str,
        institution: &str,
    ) -> Result<Vec<&PublicationRecord>, CorpusError> {
        let map = self.discipline(discipline)?;
        Ok(DocumentFilter::new(country, window, map, institution).apply(&self.publications))
    }

    /// Institutions relevant to a discipline query: those with a profile in
    /// the discipline plus every affiliation of a record that passes the
    /// country, window and category steps. Sorted and de-duplicated.
    pub fn institutions_for(
        &self,
        country: &str,
        window: PublicationWindow,
        discipline: &str,
    ) -> Result<Vec<String>, CorpusError> {
        let map = self.discipline(discipline)?;
        let filter = DocumentFilter::new(country, window, map, "");
        let wanted = normalize_label(discipline);
        let mut out: BTreeSet<String> = self
            .profiles
            .iter()
            .filter(|p| normalize_label(&p.discipline) == wanted)
            .map(|p| p.institution.clone())
            .collect();
        for record in self.publications.iter().filter(|r| filter.matches_field(r)) {
            out.extend(record.affiliations.iter().cloned());
        }
        Ok(out.into_iter().collect())
    }

    pub fn profiles_for<'a>(&'a self, discipline: &'a str) -> impl Iterator<Item = &'a QualityProfile> {
        let wanted = normalize_label(discipline);
        self.profiles
            .iter()
            .filter(move |p| normalize_label(&p.discipline) == wanted)
    }
}
