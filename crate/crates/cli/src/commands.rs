use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};
use serde::Serialize;
use thiserror::Error;

use refh_core::corpus::{Corpus, PublicationWindow};
use refh_core::io::{self, CorpusPaths};
use refh_core::measure::{Measure, MeasureTable};
use refh_core::metrics::HIndexSeries;
use refh_core::pipeline::{self, Exercise, Preset};
use refh_core::ranking::{self, MovementReport, RankedTable, RenderFormat};
use refh_core::stats::{self, CorrelationReport, CorrelationSeries};
use refh_core::synth::{self, CitationModel, SynthConfig, SynthManifest};

use crate::args::{Cli, Command, CorpusArgs, Format, WindowArgs};

#[derive(Debug, Error)]
pub enum Failure {
    /// Bad flags or arguments (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Invalid input data or a failed computation (exit 1).
    #[error("{0}")]
    Data(String),
}

fn data<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Ingest { corpus } => cmd_ingest(cli, corpus),
        Command::Hindex { corpus, window } => cmd_hindex(cli, corpus, window),
        Command::Score { corpus } => cmd_score(cli, corpus),
        Command::Correlate { corpus, window, pairs } => cmd_correlate(cli, corpus, window, pairs.as_deref()),
        Command::Rank {
            corpus,
            window,
            measure,
            baseline,
            values,
            hat_window,
        } => cmd_rank(
            cli,
            corpus,
            window,
            RankRequest {
                measure,
                baseline: baseline.as_deref(),
                values: values.as_deref(),
                hat_window,
            },
        ),
        Command::Synth {
            seed,
            institutions,
            papers,
            model,
            accrual,
            quality_link,
            citation_spread,
            window,
            last_citing_year,
        } => {
            let config = SynthConfig {
                seed: *seed,
                n_institutions: *institutions,
                papers_per_institution: parse_pair(papers, "papers")?,
                window: parse_window(window)?,
                citation_model: parse_model(model)?,
                accrual: *accrual,
                quality_link: *quality_link,
                citation_spread: *citation_spread,
                last_citing_year: *last_citing_year,
                discipline: cli.discipline.clone().unwrap_or_else(|| "physics".into()),
                country: cli.country.clone(),
                ..SynthConfig::default()
            };
            cmd_synth(cli, &config)
        }
    }
}

fn resolve_paths(args: &CorpusArgs) -> Result<CorpusPaths, Failure> {
    let base = args.corpus.as_deref().map(CorpusPaths::in_dir);
    let pick = |explicit: &Option<PathBuf>, from_dir: Option<&PathBuf>, flag: &str| {
        explicit
            .clone()
            .or_else(|| from_dir.cloned())
            .ok_or_else(|| Failure::Usage(format!("missing --{flag} (or --corpus DIR)")))
    };
    Ok(CorpusPaths {
        publications: pick(&args.publications, base.as_ref().map(|b| &b.publications), "publications")?,
        citations: pick(&args.citations, base.as_ref().map(|b| &b.citations), "citations")?,
        profiles: pick(&args.profiles, base.as_ref().map(|b| &b.profiles), "profiles")?,
        discipline_map: pick(&args.map, base.as_ref().map(|b| &b.discipline_map), "map")?,
    })
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus, Failure> {
    let paths = resolve_paths(args)?;
    debug!("ingesting {paths:?}");
    let corpus = io::ingest_corpus(&paths).map_err(data)?;
    info!(
        "corpus: {} publications, {} profiles, {} discipline maps",
        corpus.publications.len(),
        corpus.profiles.len(),
        corpus.discipline_maps.len()
    );
    Ok(corpus)
}

fn parse_pair(text: &str, what: &str) -> Result<(u32, u32), Failure> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("--{what} expects MIN:MAX, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Failure::Usage(format!("--{what}: `{s}` is not a positive integer")))
    };
    Ok((parse(a)?, parse(b)?))
}

pub fn parse_window(text: &str) -> Result<PublicationWindow, Failure> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("window expects START:END, got `{text}`")))?;
    let year = |s: &str| {
        s.trim()
            .parse::<i32>()
            .map_err(|_| Failure::Usage(format!("`{s}` is not a year")))
    };
    PublicationWindow::new(year(a)?, year(b)?).map_err(usage)
}

/// `2008..2014` and `2008..=2014` are inclusive ranges; otherwise a comma list.
pub fn parse_years(text: &str) -> Result<Vec<i32>, Failure> {
    let year = |s: &str| {
        s.trim()
            .parse::<i32>()
            .map_err(|_| Failure::Usage(format!("`{s}` is not a year")))
    };
    let years: Vec<i32> = if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (year(a)?..=year(b)?).collect()
    } else {
        text.split(',').map(year).collect::<Result<_, _>>()?
    };
    if years.is_empty() {
        return Err(Failure::Usage(format!("empty year list `{text}`")));
    }
    if years.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Usage(format!("years must be strictly ascending: `{text}`")));
    }
    Ok(years)
}

fn parse_model(text: &str) -> Result<CitationModel, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Failure::Usage(format!("--model: `{s}` is not a number")))
    };
    match parts.as_slice() {
        ["lognormal", mu, sigma] => Ok(CitationModel::LogNormal {
            mu: num(mu)?,
            sigma: num(sigma)?,
        }),
        ["power-law" | "powerlaw" | "power_law", alpha, x_min] => Ok(CitationModel::PowerLaw {
            alpha: num(alpha)?,
            x_min: num(x_min)?,
        }),
        _ => Err(Failure::Usage(format!(
            "--model expects lognormal:MU:SIGMA or power-law:ALPHA:XMIN, got `{text}`"
        ))),
    }
}

fn preset(cli: &Cli) -> Result<Option<Preset>, Failure> {
    cli.preset.as_deref().map(str::parse).transpose().map_err(Failure::Usage)
}

/// Window and years from the preset (default rae2008) with explicit
/// `--window` / `--years` overriding it. A bare `--window` measures in the
/// year after the window closes.
fn resolve_exercise(cli: &Cli, args: &WindowArgs) -> Result<Exercise, Failure> {
    let mut exercise = preset(cli)?.unwrap_or(Preset::Rae2008).exercise();
    if let Some(w) = &args.window {
        exercise.window = parse_window(w)?;
        exercise.years = vec![exercise.window.end_year() + 1];
    }
    if let Some(y) = &args.years {
        exercise.years = parse_years(y)?;
    }
    if let Some(&bad) = exercise.years.iter().find(|&&y| y <= exercise.window.start_year()) {
        return Err(Failure::Usage(format!(
            "measurement year {bad} is not after the window start {}",
            exercise.window.start_year()
        )));
    }
    Ok(exercise)
}

fn prepare_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Data(format!("{}: {e}", dir.display())))
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn no_markdown(cli: &Cli, command: &str) -> Result<(), Failure> {
    if cli.format == Format::Markdown {
        return Err(Failure::Usage(format!("--format markdown is only supported by `rank`, not `{command}`")));
    }
    Ok(())
}

fn cmd_ingest(_cli: &Cli, args: &CorpusArgs) -> Result<(), Failure> {
    let corpus = load_corpus(args)?;
    let citations: u64 = corpus
        .publications
        .iter()
        .flat_map(|p| p.citations_by_year.values())
        .sum();
    println!("publications: {}", corpus.publications.len());
    println!("citations: {citations}");
    println!("profiles: {}", corpus.profiles.len());
    let maps: Vec<&str> = corpus.discipline_maps.iter().map(|m| m.discipline.as_str()).collect();
    println!("disciplines: {}", maps.join(", "));
    Ok(())
}

fn cmd_hindex(cli: &Cli, args: &CorpusArgs, window: &WindowArgs) -> Result<(), Failure> {
    no_markdown(cli, "hindex")?;
    let exercise = resolve_exercise(cli, window)?;
    let corpus = load_corpus(args)?;
    let mut all: Vec<HIndexSeries> = Vec::new();
    let mut matching = 0;
    for d in pipeline::disciplines(&corpus, cli.discipline.as_deref()) {
        let (series, _, n) = pipeline::group_metrics(&corpus, &cli.country, &d, &exercise).map_err(data)?;
        debug!("{d}: {n} matching publications, {} institutions", series.len());
        matching += n;
        all.extend(series);
    }
    if matching == 0 {
        return Err(Failure::Data(format!(
            "no matching publications for country {} in window {}",
            cli.country, exercise.window
        )));
    }
    prepare_out(&cli.out)?;
    match cli.format {
        Format::Json => write_out(&cli.out, "hseries.json", &to_json(&all)),
        _ => write_out(&cli.out, "hseries.csv", &io::hseries_csv(&all)),
    }
}

fn cmd_score(cli: &Cli, args: &CorpusArgs) -> Result<(), Failure> {
    no_markdown(cli, "score")?;
    let path = args
        .profiles
        .clone()
        .or_else(|| args.corpus.as_deref().map(|d| CorpusPaths::in_dir(d).profiles))
        .ok_or_else(|| Failure::Usage("missing --profiles (or --corpus DIR)".into()))?;
    let profiles = io::ingest_profiles(&path).map_err(data)?;
    let wanted = cli.discipline.as_deref().map(refh_core::corpus::normalize_label);
    let scores = pipeline::scores_for(
        profiles
            .iter()
            .filter(|p| wanted.as_ref().is_none_or(|w| refh_core::corpus::normalize_label(&p.discipline) == *w)),
    );
    prepare_out(&cli.out)?;
    match cli.format {
        Format::Json => write_out(&cli.out, "scores.json", &to_json(&scores)),
        _ => write_out(&cli.out, "scores.csv", &io::scores_csv(&scores)),
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(Measure, Measure)>, Failure> {
    text.split(',')
        .map(|pair| {
            let (x, y) = pair
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("pair `{pair}` must look like x:y")))?;
            Ok((x.parse().map_err(usage)?, y.parse().map_err(usage)?))
        })
        .collect()
}

fn default_pairs(table: &MeasureTable, disciplines: &[String], year: i32) -> Vec<(Measure, Measure)> {
    let any = |m: Measure| disciplines.iter().any(|d| table.has(d, m));
    let h = Measure::H(year);
    let mut pairs = vec![(Measure::S, h), (Measure::SPrime, h)];
    if any(Measure::SOutput) {
        pairs.push((Measure::SOutput, h));
    }
    if any(Measure::Nci) {
        pairs.push((Measure::S, Measure::Nci));
    }
    pairs
}

#[derive(Serialize)]
struct CorrelateOutput<'a> {
    correlations: &'a [CorrelationReport],
    series: &'a [CorrelationSeries],
}

fn cmd_correlate(cli: &Cli, args: &CorpusArgs, window: &WindowArgs, pairs: Option<&str>) -> Result<(), Failure> {
    no_markdown(cli, "correlate")?;
    let exercise = resolve_exercise(cli, window)?;
    let corpus = load_corpus(args)?;
    let disciplines = pipeline::disciplines(&corpus, cli.discipline.as_deref());
    let table = pipeline::measure_table(&corpus, &cli.country, &disciplines, Some(&exercise), None).map_err(data)?;
    let pairs = match pairs {
        Some(p) => parse_pairs(p)?,
        None => default_pairs(&table, &disciplines, exercise.years[0]),
    };

    let mut reports = Vec::new();
    for d in &disciplines {
        for &(x, y) in &pairs {
            reports.push(stats::correlate_pair(&table, d, x, y).map_err(data)?);
        }
    }

    let mut xs: Vec<Measure> = Vec::new();
    for (x, _) in &pairs {
        if x.is_peer_review() && !xs.contains(x) {
            xs.push(*x);
        }
    }
    let mut series = Vec::new();
    for d in &disciplines {
        for &x in &xs {
            series.push(stats::correlation_series(&table, d, x, &exercise.years).map_err(data)?);
        }
    }

    prepare_out(&cli.out)?;
    match cli.format {
        Format::Json => write_out(
            &cli.out,
            "correlations.json",
            &to_json(&CorrelateOutput {
                correlations: &reports,
                series: &series,
            }),
        ),
        _ => {
            write_out(&cli.out, "correlations.csv", &io::correlations_csv(&reports))?;
            write_out(&cli.out, "corr_series.csv", &io::corr_series_csv(&series))?;
            write_out(&cli.out, "fig_points.csv", &io::fig_points_csv(&table, &disciplines, &pairs))
        }
    }
}

struct RankRequest<'a> {
    measure: &'a str,
    baseline: Option<&'a str>,
    values: Option<&'a Path>,
    hat_window: &'a str,
}

#[derive(Serialize)]
struct RankOutput<'a> {
    table: &'a RankedTable,
    movement: Option<&'a MovementReport>,
}

fn file_token(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

fn cmd_rank(cli: &Cli, args: &CorpusArgs, window: &WindowArgs, req: RankRequest<'_>) -> Result<(), Failure> {
    let measure: Measure = req.measure.parse().map_err(usage)?;
    let baseline: Option<Measure> = req.baseline.map(str::parse).transpose().map_err(usage)?;
    let requested: Vec<Measure> = std::iter::once(measure).chain(baseline).collect();

    let (table, disciplines) = match req.values {
        Some(path) => {
            let table = io::read_values(path).map_err(data)?;
            let disciplines: Vec<String> = match cli.discipline.as_deref() {
                Some(d) => vec![refh_core::corpus::normalize_label(d)],
                None => table.disciplines().map(str::to_string).collect(),
            };
            (table, disciplines)
        }
        None => {
            let corpus = load_corpus(args)?;
            let disciplines = pipeline::disciplines(&corpus, cli.discipline.as_deref());
            let years_of = |hat: bool| -> Vec<i32> {
                let mut ys: Vec<i32> = requested
                    .iter()
                    .filter_map(|m| match (m, hat) {
                        (Measure::H(y), false) | (Measure::HHat(y), true) => Some(*y),
                        _ => None,
                    })
                    .collect();
                ys.sort();
                ys.dedup();
                ys
            };
            let h = {
                let years = years_of(false);
                if years.is_empty() {
                    None
                } else {
                    let mut ex = resolve_exercise(cli, window)?;
                    ex.years = years;
                    Some(ex)
                }
            };
            let hat = {
                let years = years_of(true);
                if years.is_empty() {
                    None
                } else {
                    Some(Exercise {
                        window: parse_window(req.hat_window)?,
                        years,
                    })
                }
            };
            for ex in h.iter().chain(hat.iter()) {
                if let Some(&bad) = ex.years.iter().find(|&&y| y <= ex.window.start_year()) {
                    return Err(Failure::Usage(format!(
                        "measurement year {bad} is not after the window start {}",
                        ex.window.start_year()
                    )));
                }
            }
            let table = pipeline::measure_table(&corpus, &cli.country, &disciplines, h.as_ref(), hat.as_ref())
                .map_err(data)?;
            (table, disciplines)
        }
    };

    prepare_out(&cli.out)?;
    for d in &disciplines {
        let values = table.values(d, measure);
        if values.is_empty() {
            return Err(Failure::Data(format!("no values for measure {measure} in discipline {d}")));
        }
        let mut ranked = ranking::rank_table(&values, d, &measure.to_string());
        let mut base_table = None;
        let mut report = None;
        if let Some(b) = baseline {
            let base_values = table.values(d, b);
            if base_values.is_empty() {
                return Err(Failure::Data(format!("no values for baseline measure {b} in discipline {d}")));
            }
            let base = ranking::rank_table(&base_values, d, &b.to_string());
            let r = ranking::movement(&base, &ranked);
            ranked = ranked.with_movement(&r);
            base_table = Some(base);
            report = Some(r);
        }
        let stem = format!("rank_{}_{}", file_token(d), file_token(&measure.to_string()));
        match cli.format {
            Format::Csv => write_out(&cli.out, &format!("{stem}.csv"), &ranking::render_table(&ranked, RenderFormat::Csv))?,
            Format::Json => write_out(
                &cli.out,
                &format!("{stem}.json"),
                &to_json(&RankOutput {
                    table: &ranked,
                    movement: report.as_ref(),
                }),
            )?,
            Format::Markdown => {
                let text = match &base_table {
                    Some(base) => {
                        let s_table = (measure != Measure::S && baseline != Some(Measure::S))
                            .then(|| table.values(d, Measure::S))
                            .filter(|v| !v.is_empty())
                            .map(|v| ranking::rank_table(&v, d, "s"));
                        let mut columns: Vec<&RankedTable> = s_table.iter().collect();
                        columns.push(base);
                        columns.push(&ranked);
                        ranking::render_side_by_side(&columns)
                    }
                    None => ranking::render_table(&ranked, RenderFormat::Markdown),
                };
                write_out(&cli.out, &format!("{stem}.md"), &text)?
            }
        }
    }
    Ok(())
}

fn cmd_synth(cli: &Cli, config: &SynthConfig) -> Result<(), Failure> {
    let corpus = synth::generate(config).map_err(usage)?;
    prepare_out(&cli.out)?;
    io::corpus_to_csv(&corpus).write_to(&cli.out).map_err(data)?;
    write_out(&cli.out, "manifest.json", &to_json(&SynthManifest::new(config, &corpus)))?;
    info!(
        "synthetic corpus: {} publications, {} profiles",
        corpus.publications.len(),
        corpus.profiles.len()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn years_syntax() {
        assert_eq!(parse_years("2008..2010").unwrap(), vec![2008, 2009, 2010]);
        assert_eq!(parse_years("2008..=2009").unwrap(), vec![2008, 2009]);
        assert_eq!(parse_years("2014").unwrap(), vec![2014]);
        assert_eq!(parse_years("2008,2012").unwrap(), vec![2008, 2012]);
        assert!(parse_years("2010,2008").is_err());
        assert!(parse_years("x").is_err());
    }

    #[test]
    fn window_syntax() {
        assert_eq!(parse_window("2001:2007").unwrap(), PublicationWindow::RAE_2008);
        assert!(matches!(parse_window("2007:2001"), Err(Failure::Usage(_))));
        assert!(parse_window("2001-2007").is_err());
    }

    #[test]
    fn model_syntax() {
        assert_eq!(
            parse_model("power-law:2.5:1").unwrap(),
            CitationModel::PowerLaw { alpha: 2.5, x_min: 1.0 }
        );
        assert!(parse_model("gamma:1:2").is_err());
    }

    #[test]
    fn pairs_syntax() {
        assert_eq!(
            parse_pairs("s:h_2008,s_prime:i").unwrap(),
            vec![(Measure::S, Measure::H(2008)), (Measure::SPrime, Measure::Nci)]
        );
        assert!(parse_pairs("s-h_2008").is_err());
        assert!(parse_pairs("s:hindex").is_err());
    }
}
