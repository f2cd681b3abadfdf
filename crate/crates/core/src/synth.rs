//! Seeded synthetic corpora and brute-force oracles.
//!
//! Every draw comes from a single `ChaCha8Rng` stream (crate `rand_chacha`
//! 0.9) seeded with `seed_from_u64`, so a config fully determines the corpus.
//!
//! Each institution gets a latent quality `q ~ N(0, 1)`. Citation totals per
//! paper are drawn from the configured model and scaled by
//! `exp(citation_spread * q)`. Peer-review profiles are driven by
//! `z = link * q + sqrt(1 - link^2) * e` with independent noise `e`, so
//! `quality_link` dials the coupling between the two families of measures.
//! Citations arrive year by year: each not-yet-arrived citation lands in a
//! given year with probability `accrual`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, LogNormal, Normal, Pareto};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    normalize_label, Corpus, DisciplineMap, GradeProfile, PublicationRecord, PublicationWindow,
    QualityProfile,
};

pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// Category used for papers outside every standard discipline.
pub const OFF_TOPIC_CATEGORY: &str = "Mathematics";

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
}

/// Distribution of a paper's eventual citation total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CitationModel {
    LogNormal { mu: f64, sigma: f64 },
    /// Continuous power law with density proportional to `x^-alpha` above `x_min`.
    PowerLaw { alpha: f64, x_min: f64 },
}

impl CitationModel {
    fn validate(&self) -> Result<(), SynthError> {
        match *self {
            CitationModel::LogNormal { mu, sigma } => {
                if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) {
                    return Err(SynthError::InvalidConfig(format!(
                        "lognormal needs finite mu and sigma > 0 (got {mu}, {sigma})"
                    )));
                }
            }
            CitationModel::PowerLaw { alpha, x_min } => {
                if !(alpha.is_finite() && alpha > 1.0 && x_min.is_finite() && x_min > 0.0) {
                    return Err(SynthError::InvalidConfig(format!(
                        "power law needs alpha > 1 and x_min > 0 (got {alpha}, {x_min})"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_institutions: u32,
    /// Inclusive range of papers per institution.
    pub papers_per_institution: (u32, u32),
    pub window: PublicationWindow,
    pub citation_model: CitationModel,
    /// Per-year arrival probability of a pending citation, in (0, 1).
    pub accrual: f64,
    /// Coupling between latent quality and the generated profiles, in [0, 1].
    pub quality_link: f64,
    /// Log-scale effect of latent quality on citation totals.
    pub citation_spread: f64,
    /// Last citing year recorded.
    pub last_citing_year: i32,
    pub discipline: String,
    pub country: String,
    pub foreign_fraction: f64,
    pub off_topic_fraction: f64,
    pub coauthor_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_institutions: 40,
            papers_per_institution: (120, 240),
            window: PublicationWindow::new(2001, 2013).expect("valid"),
            citation_model: CitationModel::LogNormal { mu: 2.0, sigma: 1.0 },
            accrual: 0.25,
            quality_link: 0.8,
            citation_spread: 0.6,
            last_citing_year: 2013,
            discipline: "physics".into(),
            country: "GB".into(),
            foreign_fraction: 0.05,
            off_topic_fraction: 0.1,
            coauthor_fraction: 0.1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        self.citation_model.validate()?;
        if self.n_institutions == 0 {
            return bad("n_institutions must be positive".into());
        }
        let (lo, hi) = self.papers_per_institution;
        if lo == 0 || lo > hi {
            return bad(format!("papers_per_institution must be a positive range, got {lo}..={hi}"));
        }
        if !(self.accrual > 0.0 && self.accrual < 1.0) {
            return bad(format!("accrual must lie in (0, 1), got {}", self.accrual));
        }
        if !(0.0..=1.0).contains(&self.quality_link) {
            return bad(format!("quality_link must lie in [0, 1], got {}", self.quality_link));
        }
        if !self.citation_spread.is_finite() {
            return bad("citation_spread must be finite".into());
        }
        for (name, f) in [
            ("foreign_fraction", self.foreign_fraction),
            ("off_topic_fraction", self.off_topic_fraction),
            ("coauthor_fraction", self.coauthor_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("{name} must lie in [0, 1], got {f}"));
            }
        }
        if self.last_citing_year < self.window.end_year() {
            return bad("last_citing_year precedes the end of the publication window".into());
        }
        if self.discipline.trim().is_empty() || self.country.trim().is_empty() {
            return bad("discipline and country must be non-empty".into());
        }
        Ok(())
    }

    fn discipline_maps(&self) -> (Vec<DisciplineMap>, Vec<String>) {
        let mut maps = DisciplineMap::standard();
        let wanted = normalize_label(&self.discipline);
        let map = match maps.iter().find(|m| normalize_label(&m.discipline) == wanted) {
            Some(m) => m.clone(),
            None => {
                let custom = DisciplineMap::new(&self.discipline, [self.discipline.clone()]);
                maps.push(custom.clone());
                custom
            }
        };
        (maps, map.categories.into_iter().collect())
    }
}

fn institution_name(k: u32, n: u32) -> String {
    let width = n.to_string().len().max(2);
    format!("HEI-{:0width$}", k + 1, width = width)
}

/// Spreads 20 five-percent units over the bands 4*..U around a mean grade
/// `2.4 + 0.9 z`. Cumulative shares from the top band are rounded, so the
/// profile sums to exactly 100 and every cumulative share, hence `s`, is
/// non-decreasing in `z`.
pub fn profile_from_latent(z: f64) -> GradeProfile {
    let centre = (2.4 + 0.9 * z).clamp(-2.0, 6.0);
    let grades = [4.0, 3.0, 2.0, 1.0, 0.0];
    let weights: Vec<f64> = grades
        .iter()
        .map(|g: &f64| (-(g - centre).powi(2) / (2.0 * 0.9 * 0.9)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let mut units = [0u32; 5];
    let (mut acc, mut prev) = (0.0, 0u32);
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        let cumulative = if i == 4 { 20 } else { (20.0 * acc / total).round() as u32 };
        units[i] = cumulative - prev;
        prev = cumulative;
    }
    let p = |i: usize| f64::from(units[i] * 5);
    GradeProfile::new(p(0), p(1), p(2), p(3), p(4))
}

/// Generates a corpus from `config`.
pub fn generate(config: &SynthConfig) -> Result<Corpus, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
    let (maps, categories) = config.discipline_maps();
    let n = config.n_institutions;
    let names: Vec<String> = (0..n).map(|k| institution_name(k, n)).collect();
    let link = config.quality_link;
    let noise_weight = (1.0 - link * link).max(0.0).sqrt();

    let lognormal = match config.citation_model {
        CitationModel::LogNormal { mu, sigma } => Some(LogNormal::new(mu, sigma).expect("validated")),
        _ => None,
    };
    let pareto = match config.citation_model {
        CitationModel::PowerLaw { alpha, x_min } => Some(Pareto::new(x_min, alpha - 1.0).expect("validated")),
        _ => None,
    };

    let mut publications = Vec::new();
    let mut profiles = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let quality: f64 = std_normal.sample(&mut rng);
        let profile_noise: f64 = std_normal.sample(&mut rng);
        let output_noise: f64 = std_normal.sample(&mut rng);
        let nci_noise: f64 = std_normal.sample(&mut rng);
        let staff: f64 = rng.random_range(8.0..60.0);

        let z = link * quality + noise_weight * profile_noise;
        profiles.push(QualityProfile {
            institution: name.clone(),
            discipline: config.discipline.clone(),
            overall: profile_from_latent(z),
            output: Some(profile_from_latent(z + 0.3 * output_noise)),
            staff_fte: (staff * 10.0).round() / 10.0,
            nci: Some(((0.25 * quality + 0.25 * nci_noise).exp() * 1000.0).round() / 1000.0),
        });

        let multiplier = (config.citation_spread * quality).exp();
        let (lo, hi) = config.papers_per_institution;
        let count = rng.random_range(lo..=hi);
        for j in 0..count {
            let pub_year = rng.random_range(config.window.start_year()..=config.window.end_year());
            let country = if rng.random_bool(config.foreign_fraction) {
                "FR".to_string()
            } else {
                config.country.clone()
            };
            let mut affiliations = BTreeSet::from([name.clone()]);
            if n > 1 && rng.random_bool(config.coauthor_fraction) {
                let other = (k as u32 + rng.random_range(1..n)) % n;
                affiliations.insert(names[other as usize].clone());
            }
            let cats: BTreeSet<String> = if rng.random_bool(config.off_topic_fraction) {
                BTreeSet::from([OFF_TOPIC_CATEGORY.to_string()])
            } else {
                let first = rng.random_range(0..categories.len());
                let mut set = BTreeSet::from([categories[first].clone()]);
                if categories.len() > 1 && rng.random_bool(0.2) {
                    set.insert(categories[rng.random_range(0..categories.len())].clone());
                }
                set
            };
            let raw = match (&lognormal, &pareto) {
                (Some(d), _) => d.sample(&mut rng),
                (_, Some(d)) => d.sample(&mut rng),
                _ => unreachable!("one citation model is always set"),
            };
            let total = (raw * multiplier).min(1e9).floor() as u64;
            let mut pending = total;
            let mut citations_by_year = BTreeMap::new();
            for year in pub_year..=config.last_citing_year {
                if pending == 0 {
                    break;
                }
                let arrived = Binomial::new(pending, config.accrual)
                    .expect("valid binomial")
                    .sample(&mut rng);
                if arrived > 0 {
                    citations_by_year.insert(year, arrived);
                    pending -= arrived;
                }
            }
            publications.push(PublicationRecord {
                pub_id: format!("{name}-{j:05}"),
                pub_year,
                country,
                affiliations,
                categories: cats,
                citations_by_year,
            });
        }
    }
    Corpus::new(publications, profiles, maps)
        .map_err(|e| SynthError::InvalidConfig(format!("generator produced an invalid corpus: {e}")))
}

/// Definitional h-index: the largest `n` in `0..=len` such that at least `n`
/// records have `n` or more citations up to the end of `cutoff_year`.
pub fn oracle_h<'a, I>(records: I, cutoff_year: i32) -> u64
where
    I: IntoIterator<Item = &'a PublicationRecord>,
{
    let totals: Vec<u64> = records
        .into_iter()
        .map(|r| {
            let mut sum = 0;
            for (&year, &count) in &r.citations_by_year {
                if year <= cutoff_year {
                    sum += count;
                }
            }
            sum
        })
        .collect();
    let mut best = 0;
    for n in 0..=totals.len() as u64 {
        if totals.iter().filter(|&&c| c >= n).count() as u64 >= n {
            best = n;
        }
    }
    best
}

/// Manifest written next to synthetic corpus files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthManifest {
    pub generator: String,
    pub rng: String,
    pub config: SynthConfig,
    pub publications: usize,
    pub profiles: usize,
}

impl SynthManifest {
    pub fn new(config: &SynthConfig, corpus: &Corpus) -> Self {
        Self {
            generator: format!("refh-core {}", env!("CARGO_PKG_VERSION")),
            rng: RNG_NAME.to_string(),
            config: config.clone(),
            publications: corpus.publications.len(),
            profiles: corpus.profiles.len(),
        }
    }
}
