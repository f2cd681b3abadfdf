//! Corpus file formats (CSV, with a JSON mirror) and output table writers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{
    Corpus, CorpusError, DisciplineMap, GradeProfile, ProfileViolation, PublicationRecord,
    QualityProfile,
};
use crate::fmt_f64;
use crate::measure::{Measure, MeasureTable};
use crate::metrics::{HIndexSeries, ScoreSet};
use crate::stats::{CorrelationReport, CorrelationSeries};

pub const PUBLICATIONS_HEADER: &[&str] = &["pub_id", "pub_year", "country", "affiliations", "categories"];
pub const CITATIONS_HEADER: &[&str] = &["pub_id", "citing_year", "count"];
pub const PROFILES_HEADER: &[&str] = &[
    "institution", "discipline", "p4", "p3", "p2", "p1", "pu", "p4_out", "p3_out", "p2_out",
    "p1_out", "pu_out", "staff_fte", "nci",
];
pub const DISCIPLINE_MAP_HEADER: &[&str] = &["discipline", "category"];

pub const PUBLICATIONS_FILE: &str = "publications.csv";
pub const CITATIONS_FILE: &str = "citations.csv";
pub const PROFILES_FILE: &str = "profiles.csv";
pub const DISCIPLINE_MAP_FILE: &str = "discipline_map.csv";

/// Paths of the four corpus files.
#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub publications: PathBuf,
    pub citations: PathBuf,
    pub profiles: PathBuf,
    pub discipline_map: PathBuf,
}

impl CorpusPaths {
    /// The conventional file names inside `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            publications: dir.join(PUBLICATIONS_FILE),
            citations: dir.join(CITATIONS_FILE),
            profiles: dir.join(PROFILES_FILE),
            discipline_map: dir.join(DISCIPLINE_MAP_FILE),
        }
    }
}

/// A list column: `;`-separated in CSV, either an array or a `;` string in JSON.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ListField {
    Items(Vec<String>),
    Joined(String),
}

impl ListField {
    fn into_items(self) -> Vec<String> {
        match self {
            ListField::Items(v) => v.into_iter().map(|s| s.trim().to_string()).collect(),
            ListField::Joined(s) => split_list(&s),
        }
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Deserialize)]
struct JsonPublication {
    pub_id: String,
    pub_year: i32,
    #[serde(default)]
    country: Option<String>,
    affiliations: ListField,
    categories: ListField,
}

#[derive(Debug, Deserialize)]
struct JsonCitation {
    pub_id: String,
    citing_year: i32,
    count: u64,
}

#[derive(Debug, Deserialize)]
struct JsonProfile {
    institution: String,
    discipline: String,
    p4: f64,
    p3: f64,
    p2: f64,
    p1: f64,
    pu: f64,
    #[serde(default)]
    p4_out: Option<f64>,
    #[serde(default)]
    p3_out: Option<f64>,
    #[serde(default)]
    p2_out: Option<f64>,
    #[serde(default)]
    p1_out: Option<f64>,
    #[serde(default)]
    pu_out: Option<f64>,
    staff_fte: f64,
    #[serde(default)]
    nci: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct JsonMapRow {
    discipline: String,
    category: String,
}

/// A parsed row tagged with its 1-based source line (JSON: entry index).
struct Located<T> {
    line: u64,
    row: T,
}

fn file_label(path: &Path) -> String {
    path.display().to_string()
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_text(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn malformed(file: &str, line: u64, field: &str, message: impl Into<String>) -> CorpusError {
    CorpusError::Malformed {
        file: file.to_string(),
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

type Row = HashMap<String, String>;
type CitationRow = (String, i32, u64);

/// Reads a CSV file, checks the header, and yields `(line, fields)` rows
/// keyed by column name.
fn read_csv_rows(path: &Path, expected: &[&str]) -> Result<Vec<(u64, Row)>, CorpusError> {
    let file = file_label(path);
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(&file, 1, "header", e.to_string()))?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    if names.iter().map(String::as_str).ne(expected.iter().copied()) {
        return Err(malformed(
            &file,
            1,
            "header",
            format!("expected `{}`, found `{}`", expected.join(","), names.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(&file, line, "row", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let map = names
            .iter()
            .cloned()
            .zip(record.iter().map(str::to_string))
            .collect();
        rows.push((line, map));
    }
    Ok(rows)
}

fn read_json_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<Located<T>>, CorpusError> {
    let file = file_label(path);
    let text = read_text(path)?;
    let values: Vec<serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| malformed(&file, e.line() as u64, "json", e.to_string()))?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let line = i as u64 + 1;
            serde_json::from_value(v)
                .map(|row| Located { line, row })
                .map_err(|e| malformed(&file, line, "entry", e.to_string()))
        })
        .collect()
}

fn field<'a>(row: &'a HashMap<String, String>, name: &str) -> &'a str {
    row.get(name).map(String::as_str).unwrap_or("")
}

fn parse_required<T: std::str::FromStr>(
    file: &str,
    line: u64,
    row: &HashMap<String, String>,
    name: &str,
    what: &str,
) -> Result<T, CorpusError> {
    let raw = field(row, name);
    raw.parse()
        .map_err(|_| malformed(file, line, name, format!("expected {what}, found `{raw}`")))
}

fn parse_optional_f64(
    file: &str,
    line: u64,
    row: &HashMap<String, String>,
    name: &str,
) -> Result<Option<f64>, CorpusError> {
    let raw = field(row, name);
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| malformed(file, line, name, format!("expected a number, found `{raw}`")))
}

struct PubRow {
    pub_id: String,
    pub_year: i32,
    country: String,
    affiliations: Vec<String>,
    categories: Vec<String>,
}

struct ProfileRow {
    institution: String,
    discipline: String,
    overall: [f64; 5],
    output: [Option<f64>; 5],
    staff_fte: f64,
    nci: Option<f64>,
}

fn read_publications(path: &Path) -> Result<Vec<Located<PubRow>>, CorpusError> {
    let file = file_label(path);
    if is_json(path) {
        return Ok(read_json_rows::<JsonPublication>(path)?
            .into_iter()
            .map(|l| Located {
                line: l.line,
                row: PubRow {
                    pub_id: l.row.pub_id.trim().to_string(),
                    pub_year: l.row.pub_year,
                    country: l.row.country.unwrap_or_default().trim().to_string(),
                    affiliations: l.row.affiliations.into_items(),
                    categories: l.row.categories.into_items(),
                },
            })
            .collect());
    }
    read_csv_rows(path, PUBLICATIONS_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            Ok(Located {
                line,
                row: PubRow {
                    pub_id: field(&row, "pub_id").to_string(),
                    pub_year: parse_required(&file, line, &row, "pub_year", "an integer year")?,
                    country: field(&row, "country").to_string(),
                    affiliations: split_list(field(&row, "affiliations")),
                    categories: split_list(field(&row, "categories")),
                },
            })
        })
        .collect()
}

fn read_citations(path: &Path) -> Result<Vec<Located<CitationRow>>, CorpusError> {
    let file = file_label(path);
    if is_json(path) {
        return Ok(read_json_rows::<JsonCitation>(path)?
            .into_iter()
            .map(|l| Located {
                line: l.line,
                row: (l.row.pub_id.trim().to_string(), l.row.citing_year, l.row.count),
            })
            .collect());
    }
    read_csv_rows(path, CITATIONS_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            Ok(Located {
                line,
                row: (
                    field(&row, "pub_id").to_string(),
                    parse_required(&file, line, &row, "citing_year", "an integer year")?,
                    parse_required(&file, line, &row, "count", "a non-negative integer")?,
                ),
            })
        })
        .collect()
}

fn read_profiles(path: &Path) -> Result<Vec<Located<ProfileRow>>, CorpusError> {
    let file = file_label(path);
    if is_json(path) {
        return Ok(read_json_rows::<JsonProfile>(path)?
            .into_iter()
            .map(|l| {
                let r = l.row;
                Located {
                    line: l.line,
                    row: ProfileRow {
                        institution: r.institution.trim().to_string(),
                        discipline: r.discipline.trim().to_string(),
                        overall: [r.p4, r.p3, r.p2, r.p1, r.pu],
                        output: [r.p4_out, r.p3_out, r.p2_out, r.p1_out, r.pu_out],
                        staff_fte: r.staff_fte,
                        nci: r.nci,
                    },
                }
            })
            .collect());
    }
    read_csv_rows(path, PROFILES_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            let mut overall = [0.0; 5];
            for (slot, name) in overall.iter_mut().zip(["p4", "p3", "p2", "p1", "pu"]) {
                *slot = parse_required(&file, line, &row, name, "a percentage")?;
            }
            let mut output = [None; 5];
            for (slot, name) in output
                .iter_mut()
                .zip(["p4_out", "p3_out", "p2_out", "p1_out", "pu_out"])
            {
                *slot = parse_optional_f64(&file, line, &row, name)?;
            }
            Ok(Located {
                line,
                row: ProfileRow {
                    institution: field(&row, "institution").to_string(),
                    discipline: field(&row, "discipline").to_string(),
                    overall,
                    output,
                    staff_fte: parse_required(&file, line, &row, "staff_fte", "a positive number")?,
                    nci: parse_optional_f64(&file, line, &row, "nci")?,
                },
            })
        })
        .collect()
}

fn read_discipline_map(path: &Path) -> Result<Vec<Located<(String, String)>>, CorpusError> {
    if is_json(path) {
        return Ok(read_json_rows::<JsonMapRow>(path)?
            .into_iter()
            .map(|l| Located {
                line: l.line,
                row: (l.row.discipline.trim().to_string(), l.row.category.trim().to_string()),
            })
            .collect());
    }
    Ok(read_csv_rows(path, DISCIPLINE_MAP_HEADER)?
        .into_iter()
        .map(|(line, row)| Located {
            line,
            row: (
                field(&row, "discipline").to_string(),
                field(&row, "category").to_string(),
            ),
        })
        .collect())
}

/// Reads and validates the four corpus files. Files ending in `.json` are
/// read as JSON arrays of row objects with the same field names.
pub fn ingest_corpus(paths: &CorpusPaths) -> Result<Corpus, CorpusError> {
    let pub_file = file_label(&paths.publications);
    let mut publications = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for Located { line, row } in read_publications(&paths.publications)? {
        if row.pub_id.is_empty() {
            return Err(malformed(&pub_file, line, "pub_id", "empty"));
        }
        if row.affiliations.is_empty() {
            return Err(malformed(&pub_file, line, "affiliations", "at least one institution required"));
        }
        if row.categories.is_empty() {
            return Err(malformed(&pub_file, line, "categories", "at least one category required"));
        }
        if index.insert(row.pub_id.clone(), publications.len()).is_some() {
            return Err(CorpusError::DuplicatePubId {
                file: pub_file,
                line,
                pub_id: row.pub_id,
            });
        }
        publications.push(PublicationRecord {
            pub_id: row.pub_id,
            pub_year: row.pub_year,
            country: row.country,
            affiliations: row.affiliations.into_iter().collect(),
            categories: row.categories.into_iter().collect(),
            citations_by_year: BTreeMap::new(),
        });
    }

    let cit_file = file_label(&paths.citations);
    for Located { line, row: (pub_id, citing_year, count) } in read_citations(&paths.citations)? {
        let Some(&i) = index.get(&pub_id) else {
            return Err(CorpusError::UnknownPublication {
                file: cit_file,
                line,
                pub_id,
            });
        };
        let record = &mut publications[i];
        if citing_year < record.pub_year {
            return Err(CorpusError::CitingBeforePublication {
                file: cit_file,
                line,
                pub_id,
                citing_year,
                pub_year: record.pub_year,
            });
        }
        *record.citations_by_year.entry(citing_year).or_insert(0) += count;
    }

    let profiles = ingest_profiles(&paths.profiles)?;

    let map_file = file_label(&paths.discipline_map);
    let mut order: Vec<String> = Vec::new();
    let mut maps: HashMap<String, BTreeSet<String>> = HashMap::new();
    for Located { line, row: (discipline, category) } in read_discipline_map(&paths.discipline_map)? {
        if discipline.is_empty() || category.is_empty() {
            return Err(malformed(&map_file, line, "category", "empty discipline or category"));
        }
        if !maps.contains_key(&discipline) {
            order.push(discipline.clone());
        }
        maps.entry(discipline).or_default().insert(category);
    }
    let discipline_maps = order
        .into_iter()
        .map(|d| {
            let categories = maps.remove(&d).unwrap_or_default();
            DisciplineMap {
                discipline: d,
                categories,
            }
        })
        .collect();

    Corpus::new(publications, profiles, discipline_maps)
}

/// Reads and validates a profiles file on its own.
pub fn ingest_profiles(path: &Path) -> Result<Vec<QualityProfile>, CorpusError> {
    let prof_file = file_label(path);
    let mut profiles = Vec::new();
    for Located { line, row } in read_profiles(path)? {
        if row.institution.is_empty() {
            return Err(malformed(&prof_file, line, "institution", "empty"));
        }
        if row.discipline.is_empty() {
            return Err(malformed(&prof_file, line, "discipline", "empty"));
        }
        let [p4, p3, p2, p1, pu] = row.overall;
        let output = match row.output {
            [Some(a), Some(b), Some(c), Some(d), Some(e)] => Some(GradeProfile::new(a, b, c, d, e)),
            [None, None, None, None, None] => None,
            _ => {
                return Err(malformed(
                    &prof_file,
                    line,
                    "p4_out",
                    "output sub-profile must be complete or entirely empty",
                ))
            }
        };
        let profile = QualityProfile {
            institution: row.institution,
            discipline: row.discipline,
            overall: GradeProfile::new(p4, p3, p2, p1, pu),
            output,
            staff_fte: row.staff_fte,
            nci: row.nci,
        };
        if let Err(v) = profile.check() {
            return Err(match v {
                ProfileViolation::Sum(sum) | ProfileViolation::OutputSum(sum) => CorpusError::ProfileSum {
                    file: prof_file,
                    line,
                    institution: profile.institution,
                    discipline: profile.discipline,
                    sum,
                },
                ProfileViolation::StaffFte(v) => {
                    malformed(&prof_file, line, "staff_fte", format!("must be positive, found {v}"))
                }
                ProfileViolation::Nci(v) => {
                    malformed(&prof_file, line, "nci", format!("must be non-negative, found {v}"))
                }
            });
        }
        profiles.push(profile);
    }
    Ok(profiles)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory csv writer");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

/// In-memory CSV table builder with a fixed header.
pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv_writer();
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_string(self) -> String {
        finish(self.writer)
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders the four corpus files. Numbers use the shortest round-trip
/// representation so that re-ingesting yields an equal corpus.
pub fn corpus_to_csv(corpus: &Corpus) -> CorpusFiles {
    let join = |set: &BTreeSet<String>| set.iter().cloned().collect::<Vec<_>>().join(";");

    let mut pubs = CsvTable::new(PUBLICATIONS_HEADER);
    let mut cits = CsvTable::new(CITATIONS_HEADER);
    for r in &corpus.publications {
        pubs.row([
            r.pub_id.clone(),
            r.pub_year.to_string(),
            r.country.clone(),
            join(&r.affiliations),
            join(&r.categories),
        ]);
        for (year, count) in &r.citations_by_year {
            cits.row([r.pub_id.clone(), year.to_string(), count.to_string()]);
        }
    }

    let mut profiles = CsvTable::new(PROFILES_HEADER);
    for p in &corpus.profiles {
        let mut fields = vec![p.institution.clone(), p.discipline.clone()];
        fields.extend(p.overall.bands().iter().map(f64::to_string));
        match &p.output {
            Some(out) => fields.extend(out.bands().iter().map(f64::to_string)),
            None => fields.extend(std::iter::repeat_n(String::new(), 5)),
        }
        fields.push(p.staff_fte.to_string());
        fields.push(opt_num(p.nci));
        profiles.row(fields);
    }

    let mut maps = CsvTable::new(DISCIPLINE_MAP_HEADER);
    for m in &corpus.discipline_maps {
        for c in &m.categories {
            maps.row([m.discipline.as_str(), c.as_str()]);
        }
    }

    CorpusFiles {
        publications: pubs.into_string(),
        citations: cits.into_string(),
        profiles: profiles.into_string(),
        discipline_map: maps.into_string(),
    }
}

/// Text of the four corpus CSV files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusFiles {
    pub publications: String,
    pub citations: String,
    pub profiles: String,
    pub discipline_map: String,
}

impl CorpusFiles {
    pub fn write_to(&self, dir: &Path) -> Result<CorpusPaths, CorpusError> {
        fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let paths = CorpusPaths::in_dir(dir);
        for (path, text) in [
            (&paths.publications, &self.publications),
            (&paths.citations, &self.citations),
            (&paths.profiles, &self.profiles),
            (&paths.discipline_map, &self.discipline_map),
        ] {
            write_file(path, text)?;
        }
        Ok(paths)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CorpusError> {
    fs::write(path, text).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub const HSERIES_HEADER: &[&str] = &[
    "institution", "discipline", "window_start", "window_end", "measurement_year", "h",
];
pub const SCORES_HEADER: &[&str] = &[
    "institution", "discipline", "s", "s_prime", "s_output", "strength", "nci",
];
pub const CORRELATIONS_HEADER: &[&str] = &[
    "discipline", "x", "y", "n", "pearson_r", "p_pearson", "sig_pearson", "spearman_rho",
    "p_spearman", "sig_spearman",
];
pub const CORR_SERIES_HEADER: &[&str] = &[
    "discipline", "measurement_year", "x", "y", "n", "pearson_r", "p_pearson", "sig_pearson",
    "spearman_rho", "p_spearman", "sig_spearman",
];
pub const FIG_POINTS_HEADER: &[&str] = &["x_value", "y_value", "institution", "discipline", "x", "y"];
pub const VALUES_HEADER: &[&str] = &["institution", "discipline", "measure", "value"];

fn opt_fixed(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Rows sorted by discipline, institution, then measurement year.
pub fn hseries_csv(series: &[HIndexSeries]) -> String {
    let mut sorted: Vec<&HIndexSeries> = series.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.discipline, &a.institution, a.window.start_year())
            .cmp(&(&b.discipline, &b.institution, b.window.start_year()))
    });
    let mut t = CsvTable::new(HSERIES_HEADER);
    for s in sorted {
        for (year, h) in &s.values {
            t.row([
                s.institution.clone(),
                s.discipline.clone(),
                s.window.start_year().to_string(),
                s.window.end_year().to_string(),
                year.to_string(),
                h.to_string(),
            ]);
        }
    }
    t.into_string()
}

/// Rows sorted by institution, then discipline.
pub fn scores_csv(scores: &[ScoreSet]) -> String {
    let mut sorted: Vec<&ScoreSet> = scores.iter().collect();
    sorted.sort_by(|a, b| (&a.institution, &a.discipline).cmp(&(&b.institution, &b.discipline)));
    let mut t = CsvTable::new(SCORES_HEADER);
    for s in sorted {
        t.row([
            s.institution.clone(),
            s.discipline.clone(),
            fmt_f64(s.s),
            fmt_f64(s.s_prime),
            opt_fixed(s.s_output),
            opt_fixed(s.strength),
            opt_fixed(s.nci),
        ]);
    }
    t.into_string()
}

fn report_fields(r: &CorrelationReport) -> [String; 7] {
    [
        r.n.to_string(),
        fmt_f64(r.pearson_r),
        fmt_f64(r.p_pearson),
        r.significant_pearson.to_string(),
        fmt_f64(r.spearman_rho),
        fmt_f64(r.p_spearman),
        r.significant_spearman.to_string(),
    ]
}

pub fn correlations_csv(reports: &[CorrelationReport]) -> String {
    let mut t = CsvTable::new(CORRELATIONS_HEADER);
    for r in reports {
        let mut row = vec![r.discipline.clone(), r.measure_x.to_string(), r.measure_y.to_string()];
        row.extend(report_fields(r));
        t.row(row);
    }
    t.into_string()
}

/// Per-year rows, then the NCI baseline row (empty `measurement_year`).
pub fn corr_series_csv(series: &[CorrelationSeries]) -> String {
    let mut t = CsvTable::new(CORR_SERIES_HEADER);
    for s in series {
        let rows = s
            .by_year
            .iter()
            .map(|(y, r)| (y.to_string(), r))
            .chain(s.baseline.iter().map(|r| (String::new(), r)));
        for (year, r) in rows {
            let mut row = vec![
                r.discipline.clone(),
                year,
                r.measure_x.to_string(),
                r.measure_y.to_string(),
            ];
            row.extend(report_fields(r));
            t.row(row);
        }
    }
    t.into_string()
}

/// Scatter points for every (discipline, pair) requested.
pub fn fig_points_csv(table: &MeasureTable, disciplines: &[String], pairs: &[(Measure, Measure)]) -> String {
    let mut t = CsvTable::new(FIG_POINTS_HEADER);
    for d in disciplines {
        for &(x, y) in pairs {
            let joined = table.join(d, x, y);
            for ((inst, a), b) in joined.institutions.iter().zip(&joined.x).zip(&joined.y) {
                t.row([fmt_f64(*a), fmt_f64(*b), inst.clone(), d.clone(), x.to_string(), y.to_string()]);
            }
        }
    }
    t.into_string()
}

/// Long-format `institution,discipline,measure,value` table.
pub fn values_csv(table: &MeasureTable, disciplines: &[String], measures: &[Measure]) -> String {
    let mut t = CsvTable::new(VALUES_HEADER);
    for d in disciplines {
        for &m in measures {
            for (inst, v) in table.values(d, m) {
                t.row([inst, d.clone(), m.to_string(), fmt_f64(v)]);
            }
        }
    }
    t.into_string()
}

/// Reads a long-format values file into a [`MeasureTable`].
pub fn read_values(path: &Path) -> Result<MeasureTable, CorpusError> {
    let file = file_label(path);
    let mut table = MeasureTable::new();
    for (line, row) in read_csv_rows(path, VALUES_HEADER)? {
        let measure: Measure = field(&row, "measure")
            .parse()
            .map_err(|e: crate::measure::UnknownMeasure| malformed(&file, line, "measure", e.to_string()))?;
        let institution = field(&row, "institution");
        let discipline = field(&row, "discipline");
        if institution.is_empty() || discipline.is_empty() {
            return Err(malformed(&file, line, "institution", "empty institution or discipline"));
        }
        let value: f64 = parse_required(&file, line, &row, "value", "a number")?;
        table.insert(discipline, institution, measure, value);
    }
    Ok(table)
}
