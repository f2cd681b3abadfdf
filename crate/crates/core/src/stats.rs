//! Pearson and Spearman correlation with tie handling, and t-test
//! significance at alpha = 0.05.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::measure::{MeasureTable, Measure};
use crate::metrics::{GroupMetrics, ScoreSet};

/// Significance level used throughout.
pub const ALPHA: f64 = 0.05;

/// Smallest sample size for which a report is produced.
pub const MIN_SAMPLE: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {MIN_SAMPLE} observations, got {0}")]
    TooFew(usize),
    #[error("correlation undefined: a vector is constant")]
    Constant,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("insufficient joined data for {x} vs {y} in {discipline}: {n} complete pairs")]
    InsufficientData {
        discipline: String,
        x: Measure,
        y: Measure,
        n: usize,
    },
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < MIN_SAMPLE {
        return Err(StatsError::TooFew(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::Constant);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks `1..=n`; tied values share the mean of the positions they occupy.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

/// Spearman's rho as Pearson correlation of fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub p: f64,
    pub significant: bool,
}

/// Two-sided p-value of `t = r sqrt((n-2)/(1-r^2))` against Student's t with
/// `n - 2` degrees of freedom. The same approximation serves both kinds.
pub fn significance(r: f64, n: usize, _kind: CorrelationKind) -> Result<Significance, StatsError> {
    if n < MIN_SAMPLE {
        return Err(StatsError::TooFew(n));
    }
    if !r.is_finite() {
        return Err(StatsError::NonFinite);
    }
    let r = r.clamp(-1.0, 1.0);
    if r.abs() == 1.0 {
        return Ok(Significance { p: 0.0, significant: true });
    }
    let df = (n - 2) as f64;
    let t = t_statistic(r, n);
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    let p = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(Significance {
        p,
        significant: p < ALPHA,
    })
}

pub fn t_statistic(r: f64, n: usize) -> f64 {
    r * ((n as f64 - 2.0) / (1.0 - r * r)).sqrt()
}

/// Pearson and Spearman coefficients for one pair of measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub discipline: String,
    pub measure_x: Measure,
    pub measure_y: Measure,
    pub n: usize,
    /// Institutions with only one of the two values.
    pub dropped: usize,
    pub pearson_r: f64,
    pub p_pearson: f64,
    pub significant_pearson: bool,
    pub spearman_rho: f64,
    pub p_spearman: f64,
    pub significant_spearman: bool,
}

impl CorrelationReport {
    pub fn compute(
        discipline: &str,
        measure_x: Measure,
        measure_y: Measure,
        x: &[f64],
        y: &[f64],
        dropped: usize,
    ) -> Result<Self, StatsError> {
        let r = pearson(x, y)?;
        let rho = spearman(x, y)?;
        let sp = significance(r, x.len(), CorrelationKind::Pearson)?;
        let ss = significance(rho, x.len(), CorrelationKind::Spearman)?;
        Ok(Self {
            discipline: discipline.to_string(),
            measure_x,
            measure_y,
            n: x.len(),
            dropped,
            pearson_r: r,
            p_pearson: sp.p,
            significant_pearson: sp.significant,
            spearman_rho: rho,
            p_spearman: ss.p,
            significant_spearman: ss.significant,
        })
    }
}

/// Correlates one pair of measures within a discipline.
pub fn correlate_pair(
    table: &MeasureTable,
    discipline: &str,
    x: Measure,
    y: Measure,
) -> Result<CorrelationReport, StatsError> {
    let joined = table.join(discipline, x, y);
    if joined.x.len() < MIN_SAMPLE {
        return Err(StatsError::InsufficientData {
            discipline: discipline.to_string(),
            x,
            y,
            n: joined.x.len(),
        });
    }
    CorrelationReport::compute(discipline, x, y, &joined.x, &joined.y, joined.dropped)
}

/// One report per (discipline, pair), disciplines in sorted order and pairs
/// in request order.
pub fn correlate_table(
    table: &MeasureTable,
    pairs: &[(Measure, Measure)],
) -> Result<Vec<CorrelationReport>, StatsError> {
    let mut out = Vec::new();
    for discipline in table.disciplines() {
        for &(x, y) in pairs {
            out.push(correlate_pair(table, discipline, x, y)?);
        }
    }
    Ok(out)
}

/// Joins scores and citation metrics on (institution, discipline) and
/// correlates every requested pair.
pub fn correlation_table(
    scores: &[ScoreSet],
    metrics: &[GroupMetrics],
    pairs: &[(Measure, Measure)],
) -> Result<Vec<CorrelationReport>, StatsError> {
    let mut table = MeasureTable::new();
    table.add_scores(scores);
    table.add_metrics(metrics, false);
    correlate_table(&table, pairs)
}

/// Correlation of one peer-review measure against `h_Y` for a run of years,
/// plus the baseline against NCI when available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub discipline: String,
    pub measure_x: Measure,
    pub baseline: Option<CorrelationReport>,
    pub by_year: BTreeMap<i32, CorrelationReport>,
}

pub fn correlation_series(
    table: &MeasureTable,
    discipline: &str,
    x: Measure,
    years: &[i32],
) -> Result<CorrelationSeries, StatsError> {
    let mut by_year = BTreeMap::new();
    for &year in years {
        by_year.insert(year, correlate_pair(table, discipline, x, Measure::H(year))?);
    }
    let baseline = if table.has(discipline, Measure::Nci) {
        Some(correlate_pair(table, discipline, x, Measure::Nci)?)
    } else {
        None
    };
    Ok(CorrelationSeries {
        discipline: discipline.to_string(),
        measure_x: x,
        baseline,
        by_year,
    })
}

/// Series built from score sets and group metrics.
pub fn correlation_series_from(
    scores: &[ScoreSet],
    metrics: &[GroupMetrics],
    discipline: &str,
    x: Measure,
    years: &[i32],
) -> Result<CorrelationSeries, StatsError> {
    let mut table = MeasureTable::new();
    table.add_scores(scores);
    table.add_metrics(metrics, false);
    correlation_series(&table, discipline, x, years)
}
