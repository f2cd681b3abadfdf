//! Browser bindings for three interactive views: an h-index calculator,
//! a synthetic-corpus correlation explorer and a rank-movement table.
//!
//! Every export takes plain strings or numbers and returns a JSON string,
//! so the page needs no generated type glue and the logic is testable
//! natively. Failures come back as `{"error": "..."}`.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use refh_core::corpus::PublicationWindow;
use refh_core::measure::Measure;
use refh_core::metrics::compute_h;
use refh_core::pipeline::{measure_table, Exercise};
use refh_core::ranking::{movement, rank_table, RankedTable};
use refh_core::stats::{correlate_pair, correlation_series};
use refh_core::synth::{generate, SynthConfig};

const DISCIPLINE: &str = "physics";
const YEARS: std::ops::RangeInclusive<i32> = 2008..=2014;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// h-index of citation counts separated by commas, spaces or newlines.
#[wasm_bindgen]
pub fn h_index(counts: &str) -> String {
    respond(h_index_value(counts))
}

fn h_index_value(counts: &str) -> Result<Value, String> {
    let mut parsed: Vec<u64> = counts
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| format!("`{t}` is not a non-negative integer")))
        .collect::<Result<_, _>>()?;
    let h = compute_h(&parsed);
    parsed.sort_unstable_by(|a, b| b.cmp(a));
    Ok(json!({ "h": h, "n": parsed.len(), "sorted": parsed }))
}

#[derive(Serialize)]
struct Point {
    institution: String,
    s: f64,
    h: f64,
}

#[derive(Serialize)]
struct YearCorrelation {
    year: i32,
    pearson: f64,
    spearman: f64,
    p_pearson: f64,
    p_spearman: f64,
}

/// Generates a synthetic corpus and reports the `s` vs `h_2008` scatter,
/// its correlations and the per-year correlation series for 2008 to 2014.
#[wasm_bindgen]
pub fn explore(seed: u32, institutions: u32, quality_link: f64, accrual: f64) -> String {
    respond(explore_value(seed, institutions, quality_link, accrual))
}

fn explore_value(seed: u32, institutions: u32, quality_link: f64, accrual: f64) -> Result<Value, String> {
    let config = SynthConfig {
        seed: seed as u64,
        n_institutions: institutions,
        papers_per_institution: (60, 120),
        quality_link,
        accrual,
        discipline: DISCIPLINE.into(),
        ..SynthConfig::default()
    };
    let corpus = generate(&config).map_err(|e| e.to_string())?;
    let exercise = Exercise {
        window: PublicationWindow::RAE_2008,
        years: YEARS.collect(),
    };
    let table = measure_table(&corpus, "GB", &[DISCIPLINE.to_string()], Some(&exercise), None)
        .map_err(|e| e.to_string())?;

    let joined = table.join(DISCIPLINE, Measure::S, Measure::H(2008));
    let points: Vec<Point> = joined
        .institutions
        .iter()
        .zip(joined.x.iter().zip(&joined.y))
        .map(|(i, (s, h))| Point {
            institution: i.clone(),
            s: *s,
            h: *h,
        })
        .collect();
    let report = correlate_pair(&table, DISCIPLINE, Measure::S, Measure::H(2008)).map_err(|e| e.to_string())?;
    let series = correlation_series(&table, DISCIPLINE, Measure::S, &exercise.years).map_err(|e| e.to_string())?;
    let by_year: Vec<YearCorrelation> = series
        .by_year
        .iter()
        .map(|(&year, r)| YearCorrelation {
            year,
            pearson: r.pearson_r,
            spearman: r.spearman_rho,
            p_pearson: r.p_pearson,
            p_spearman: r.p_spearman,
        })
        .collect();
    Ok(json!({
        "points": points,
        "correlation": report,
        "series": by_year,
        "baseline_nci": series.baseline.map(|b| b.pearson_r),
    }))
}

fn parse_values(text: &str) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (name, value) = line
            .rsplit_once([',', '\t'])
            .ok_or_else(|| format!("line {}: expected `name,value`", i + 1))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("line {}: `{}` is not a number", i + 1, value.trim()))?;
        if out.insert(name.trim().to_string(), value).is_some() {
            return Err(format!("line {}: duplicate name `{}`", i + 1, name.trim()));
        }
    }
    if out.is_empty() {
        return Err("no values".into());
    }
    Ok(out)
}

/// Ranks two pasted `name,value` lists and marks each institution's
/// movement from the first ranking to the second.
#[wasm_bindgen]
pub fn rank_movement(baseline: &str, comparison: &str) -> String {
    respond(rank_movement_value(baseline, comparison))
}

fn rank_movement_value(baseline: &str, comparison: &str) -> Result<Value, String> {
    let before = rank_table(&parse_values(baseline).map_err(|e| format!("baseline: {e}"))?, "", "baseline");
    let after = rank_table(
        &parse_values(comparison).map_err(|e| format!("comparison: {e}"))?,
        "",
        "comparison",
    );
    let report = movement(&before, &after);
    let marked: RankedTable = after.with_movement(&report);
    let rows: Vec<Value> = marked
        .entries
        .iter()
        .map(|e| {
            json!({
                "rank": e.rank,
                "institution": e.institution,
                "value": e.value,
                "movement": e.movement.token(),
                "arrow": e.movement.arrow(),
                "old_rank": report.moves[&e.institution].old_rank,
            })
        })
        .collect();
    Ok(json!({ "baseline": before.entries, "rows": rows, "dropped": report.dropped }))
}
