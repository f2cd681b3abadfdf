//! Competition-ranked institution tables and rank movement between two
//! tables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt_f64;
use crate::io::CsvTable;

pub const RANK_HEADER: &[&str] = &["rank", "institution", "value", "movement"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankingError {
    #[error("unknown output format `{0}` (expected csv or markdown)")]
    UnknownFormat(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

/// Rank shift of one institution relative to a baseline table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Movement {
    Up,
    Down,
    #[default]
    None,
    New,
}

impl Movement {
    pub fn token(&self) -> &'static str {
        match self {
            Movement::Up => "up",
            Movement::Down => "down",
            Movement::None => "none",
            Movement::New => "new",
        }
    }

    pub fn arrow(&self) -> &'static str {
        match self {
            Movement::Up => "↑",
            Movement::Down => "↓",
            Movement::None => "",
            Movement::New => "(new)",
        }
    }

    pub fn between(old_rank: u32, new_rank: u32) -> Movement {
        match new_rank.cmp(&old_rank) {
            std::cmp::Ordering::Less => Movement::Up,
            std::cmp::Ordering::Greater => Movement::Down,
            std::cmp::Ordering::Equal => Movement::None,
        }
    }

    pub fn reversed(&self) -> Movement {
        match self {
            Movement::Up => Movement::Down,
            Movement::Down => Movement::Up,
            other => *other,
        }
    }
}

impl FromStr for Movement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "up" => Ok(Movement::Up),
            "down" => Ok(Movement::Down),
            "none" | "" => Ok(Movement::None),
            "new" => Ok(Movement::New),
            other => Err(format!("unknown movement `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: u32,
    pub institution: String,
    pub value: Option<f64>,
    pub movement: Movement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTable {
    pub discipline: String,
    pub measure: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedTable {
    pub fn rank_of(&self, institution: &str) -> Option<u32> {
        self.entries
            .iter()
            .find(|e| e.institution == institution)
            .map(|e| e.rank)
    }

    /// Copy of the table with movement markers from `report`.
    pub fn with_movement(&self, report: &MovementReport) -> RankedTable {
        let mut out = self.clone();
        for e in &mut out.entries {
            if let Some(m) = report.moves.get(&e.institution) {
                e.movement = m.movement;
            }
        }
        out
    }
}

/// Competition ("1224") ranking by value, highest first.
///
/// Ties are listed by institution name; that order is cosmetic. Non-finite
/// values are treated as absent and share the rank after every valued entry.
pub fn rank_table(values: &BTreeMap<String, f64>, discipline: &str, measure: &str) -> RankedTable {
    let mut rows: Vec<(&String, Option<f64>)> = values
        .iter()
        .map(|(k, v)| (k, v.is_finite().then_some(*v)))
        .collect();
    rows.sort_by(|a, b| match (a.1, b.1) {
        (Some(x), Some(y)) => y.total_cmp(&x).then_with(|| a.0.cmp(b.0)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.0.cmp(b.0),
    });
    let mut entries: Vec<RankedEntry> = Vec::with_capacity(rows.len());
    for (pos, (inst, value)) in rows.into_iter().enumerate() {
        let rank = match entries.last() {
            Some(prev) if prev.value == value => prev.rank,
            _ => pos as u32 + 1,
        };
        entries.push(RankedEntry {
            rank,
            institution: inst.clone(),
            value,
            movement: Movement::None,
        });
    }
    RankedTable {
        discipline: discipline.to_string(),
        measure: measure.to_string(),
        entries,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub old_rank: Option<u32>,
    pub new_rank: u32,
    pub movement: Movement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovementReport {
    pub baseline_measure: String,
    pub comparison_measure: String,
    /// Keyed by every institution in the comparison table.
    pub moves: BTreeMap<String, Move>,
    /// Institutions ranked in the baseline but absent from the comparison.
    pub dropped: Vec<String>,
}

/// Positional shift of every institution in `comparison` relative to `baseline`.
pub fn movement(baseline: &RankedTable, comparison: &RankedTable) -> MovementReport {
    let old: HashMap<&str, u32> = baseline
        .entries
        .iter()
        .map(|e| (e.institution.as_str(), e.rank))
        .collect();
    let moves = comparison
        .entries
        .iter()
        .map(|e| {
            let old_rank = old.get(e.institution.as_str()).copied();
            let movement = match old_rank {
                Some(r) => Movement::between(r, e.rank),
                None => Movement::New,
            };
            (
                e.institution.clone(),
                Move {
                    old_rank,
                    new_rank: e.rank,
                    movement,
                },
            )
        })
        .collect::<BTreeMap<_, _>>();
    let mut dropped: Vec<String> = baseline
        .entries
        .iter()
        .filter(|e| !moves.contains_key(&e.institution))
        .map(|e| e.institution.clone())
        .collect();
    dropped.sort();
    MovementReport {
        baseline_measure: baseline.measure.clone(),
        comparison_measure: comparison.measure.clone(),
        moves,
        dropped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Csv,
    Markdown,
}

impl FromStr for RenderFormat {
    type Err = RankingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(RenderFormat::Csv),
            "markdown" | "md" => Ok(RenderFormat::Markdown),
            _ => Err(RankingError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderFormat::Csv => "csv",
            RenderFormat::Markdown => "markdown",
        })
    }
}

fn value_text(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Compact value for markdown cells: integers print without decimals.
fn short_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        fmt_f64(v)
    }
}

fn escape_md(s: &str) -> String {
    s.replace('|', "\\|")
}

pub fn render_table(table: &RankedTable, format: RenderFormat) -> String {
    match format {
        RenderFormat::Csv => {
            let mut csv = CsvTable::new(RANK_HEADER);
            for e in &table.entries {
                csv.row([
                    e.rank.to_string(),
                    e.institution.clone(),
                    value_text(e.value),
                    e.movement.token().to_string(),
                ]);
            }
            csv.into_string()
        }
        RenderFormat::Markdown => {
            let mut out = String::from("| rank | institution | value | movement |\n|---:|---|---:|:---:|\n");
            for e in &table.entries {
                out.push_str(&format!(
                    "| {} | {} | {} | {} |\n",
                    e.rank,
                    escape_md(&e.institution),
                    e.value.map(short_value).unwrap_or_default(),
                    e.movement.arrow()
                ));
            }
            out
        }
    }
}

/// Side-by-side markdown layout, one column per table, each cell
/// `rank. institution [arrow] (value)`.
pub fn render_side_by_side(columns: &[&RankedTable]) -> String {
    let mut out = String::new();
    let header: Vec<String> = columns
        .iter()
        .map(|t| format!("ranked by {}", t.measure))
        .collect();
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(columns.len())));
    let rows = columns.iter().map(|t| t.entries.len()).max().unwrap_or(0);
    for i in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|t| match t.entries.get(i) {
                None => String::new(),
                Some(e) => {
                    let mut cell = format!("{}. {}", e.rank, escape_md(&e.institution));
                    let arrow = e.movement.arrow();
                    if !arrow.is_empty() {
                        cell.push(' ');
                        cell.push_str(arrow);
                    }
                    if let Some(v) = e.value {
                        cell.push_str(&format!(" ({})", short_value(v)));
                    }
                    cell
                }
            })
            .collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    out
}

/// Parses the CSV produced by [`render_table`].
pub fn parse_table_csv(text: &str, discipline: &str, measure: &str) -> Result<RankedTable, RankingError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| RankingError::Parse { line: 1, message: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    if header != RANK_HEADER {
        return Err(RankingError::Parse {
            line: 1,
            message: format!("expected header `{}`", RANK_HEADER.join(",")),
        });
    }
    let mut entries = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| RankingError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let err = |message: String| RankingError::Parse { line, message };
        let rank = rec[0].parse().map_err(|_| err(format!("bad rank `{}`", &rec[0])))?;
        let value = if rec[2].is_empty() {
            None
        } else {
            Some(rec[2].parse().map_err(|_| err(format!("bad value `{}`", &rec[2])))?)
        };
        entries.push(RankedEntry {
            rank,
            institution: rec[1].to_string(),
            value,
            movement: rec[3].parse().map_err(err)?,
        });
    }
    Ok(RankedTable {
        discipline: discipline.to_string(),
        measure: measure.to_string(),
        entries,
    })
}
