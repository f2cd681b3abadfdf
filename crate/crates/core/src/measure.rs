//! Measure labels and a joined (discipline, institution) -> measure table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::normalize_label;
use crate::metrics::{GroupMetrics, ScoreSet};

/// One column of the assessment data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    /// Funding-formula score `s`.
    S,
    /// Alternative formula `s'`.
    SPrime,
    /// `s` over the output sub-profile.
    SOutput,
    /// `S = s N`.
    Strength,
    /// Normalised citation impact `i`.
    Nci,
    /// h-index over the assessment window, measured in the given year.
    H(i32),
    /// h-index over the following exercise's window (`h_hat`).
    HHat(i32),
}

impl Measure {
    pub fn is_peer_review(&self) -> bool {
        matches!(self, Measure::S | Measure::SPrime | Measure::SOutput | Measure::Strength)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::S => f.write_str("s"),
            Measure::SPrime => f.write_str("s_prime"),
            Measure::SOutput => f.write_str("s_output"),
            Measure::Strength => f.write_str("strength"),
            Measure::Nci => f.write_str("i"),
            Measure::H(y) => write!(f, "h_{y}"),
            Measure::HHat(y) => write!(f, "h_hat_{y}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown measure label `{0}`")]
pub struct UnknownMeasure(pub String);

impl FromStr for Measure {
    type Err = UnknownMeasure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let year = |rest: &str| rest.parse::<i32>().map_err(|_| UnknownMeasure(s.to_string()));
        Ok(match t {
            "s" => Measure::S,
            "s_prime" | "s'" => Measure::SPrime,
            "s_output" => Measure::SOutput,
            "strength" | "S" => Measure::Strength,
            "i" | "nci" => Measure::Nci,
            _ => {
                if let Some(rest) = t.strip_prefix("h_hat_") {
                    Measure::HHat(year(rest)?)
                } else if let Some(rest) = t.strip_prefix("h_") {
                    Measure::H(year(rest)?)
                } else {
                    return Err(UnknownMeasure(s.to_string()));
                }
            }
        })
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Values keyed by discipline, then institution, then measure.
///
/// Discipline keys are normalised labels; institution keys are kept verbatim.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasureTable {
    rows: BTreeMap<String, BTreeMap<String, BTreeMap<Measure, f64>>>,
}

/// Result of joining two measures for one discipline.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinedPairs {
    pub institutions: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Institutions that had one of the two values but not the other.
    pub dropped: usize,
}

impl MeasureTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, discipline: &str, institution: &str, measure: Measure, value: f64) {
        self.rows
            .entry(normalize_label(discipline))
            .or_default()
            .entry(institution.to_string())
            .or_default()
            .insert(measure, value);
    }

    pub fn add_scores(&mut self, scores: &[ScoreSet]) {
        for s in scores {
            self.insert(&s.discipline, &s.institution, Measure::S, s.s);
            self.insert(&s.discipline, &s.institution, Measure::SPrime, s.s_prime);
            if let Some(v) = s.s_output {
                self.insert(&s.discipline, &s.institution, Measure::SOutput, v);
            }
            if let Some(v) = s.strength {
                self.insert(&s.discipline, &s.institution, Measure::Strength, v);
            }
            if let Some(v) = s.nci {
                self.insert(&s.discipline, &s.institution, Measure::Nci, v);
            }
        }
    }

    /// Adds h values as `h_Y` (or `h_hat_Y` when `hat` is set) plus any NCI.
    pub fn add_metrics(&mut self, metrics: &[GroupMetrics], hat: bool) {
        for m in metrics {
            for (&year, &h) in &m.h {
                let measure = if hat { Measure::HHat(year) } else { Measure::H(year) };
                self.insert(&m.discipline, &m.institution, measure, h as f64);
            }
            if let Some(v) = m.nci {
                self.insert(&m.discipline, &m.institution, Measure::Nci, v);
            }
        }
    }

    pub fn disciplines(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn has(&self, discipline: &str, measure: Measure) -> bool {
        self.rows
            .get(&normalize_label(discipline))
            .is_some_and(|d| d.values().any(|m| m.contains_key(&measure)))
    }

    /// Every institution in the discipline that has a value for `measure`.
    pub fn values(&self, discipline: &str, measure: Measure) -> BTreeMap<String, f64> {
        self.rows
            .get(&normalize_label(discipline))
            .map(|d| {
                d.iter()
                    .filter_map(|(inst, m)| m.get(&measure).map(|v| (inst.clone(), *v)))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Pairwise-complete join of two measures, in institution order.
    pub fn join(&self, discipline: &str, x: Measure, y: Measure) -> JoinedPairs {
        let mut out = JoinedPairs {
            institutions: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
            dropped: 0,
        };
        if let Some(d) = self.rows.get(&normalize_label(discipline)) {
            for (inst, m) in d {
                match (m.get(&x), m.get(&y)) {
                    (Some(&a), Some(&b)) => {
                        out.institutions.push(inst.clone());
                        out.x.push(a);
                        out.y.push(b);
                    }
                    (None, None) => {}
                    _ => out.dropped += 1,
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for m in [
            Measure::S,
            Measure::SPrime,
            Measure::SOutput,
            Measure::Strength,
            Measure::Nci,
            Measure::H(2008),
            Measure::HHat(2014),
        ] {
            assert_eq!(m.to_string().parse::<Measure>().unwrap(), m);
        }
        assert_eq!("s'".parse::<Measure>().unwrap(), Measure::SPrime);
        assert!("h_20x8".parse::<Measure>().is_err());
        assert!("q".parse::<Measure>().is_err());
    }

    #[test]
    fn join_drops_incomplete_rows() {
        let mut t = MeasureTable::new();
        t.insert("Physics", "A", Measure::S, 1.0);
        t.insert("physics", "A", Measure::H(2008), 10.0);
        t.insert("physics", "B", Measure::S, 2.0);
        t.insert("physics", "C", Measure::Nci, 2.0);
        let j = t.join("physics", Measure::S, Measure::H(2008));
        assert_eq!(j.institutions, vec!["A"]);
        assert_eq!(j.dropped, 1);
    }
}
