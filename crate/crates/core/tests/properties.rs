mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use common::*;
use refh_core::corpus::{DisciplineMap, DocumentFilter, GradeProfile, PublicationRecord, PublicationWindow, QualityProfile};
use refh_core::io::{corpus_to_csv, ingest_corpus};
use refh_core::metrics::{citations_to_end_of, compute_h, score_s, score_s_output, score_s_prime};
use refh_core::ranking::{movement, parse_table_csv, rank_table, render_table, RenderFormat};
use refh_core::stats::{fractional_ranks, pearson, significance, spearman, CorrelationKind};
use refh_core::synth::{generate, SynthConfig};

const CATEGORIES: [&str; 3] = ["Physics and Astronomy", "Mathematics", "Chemistry"];
const INSTITUTIONS: [&str; 3] = ["A", "B", "C"];

fn record_strategy(id: usize) -> impl Strategy<Value = PublicationRecord> {
    (
        1998i32..2016,
        prop::sample::select(vec!["GB", "gb", "FR", ""]),
        prop::sample::subsequence(INSTITUTIONS.to_vec(), 1..=3),
        prop::sample::subsequence(CATEGORIES.to_vec(), 1..=3),
        prop::collection::vec((0i32..6, 0u64..20), 0..6),
    )
        .prop_map(move |(year, country, affs, cats, cites)| {
            let mut citations_by_year = BTreeMap::new();
            for (offset, count) in cites {
                *citations_by_year.entry(year + offset).or_insert(0) += count;
            }
            PublicationRecord {
                pub_id: format!("P{id}"),
                pub_year: year,
                country: country.to_string(),
                affiliations: affs.into_iter().map(String::from).collect(),
                categories: cats.into_iter().map(String::from).collect(),
                citations_by_year,
            }
        })
}

fn records_strategy() -> impl Strategy<Value = Vec<PublicationRecord>> {
    (0usize..40).prop_flat_map(|n| (0..n).map(record_strategy).collect::<Vec<_>>())
}

fn window_strategy() -> impl Strategy<Value = PublicationWindow> {
    (1998i32..2016, 0i32..8).prop_map(|(s, len)| PublicationWindow::new(s, s + len).unwrap())
}

/// Five integer shares in tenths of a percent summing to 1000.
fn tenths_profile() -> impl Strategy<Value = [i64; 5]> {
    prop::collection::vec(0i64..=1000, 4).prop_map(|mut cuts| {
        cuts.sort();
        [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], cuts[3] - cuts[2], 1000 - cuts[3]]
    })
}

fn grade(t: [i64; 5]) -> GradeProfile {
    GradeProfile::new(
        t[0] as f64 / 10.0,
        t[1] as f64 / 10.0,
        t[2] as f64 / 10.0,
        t[3] as f64 / 10.0,
        t[4] as f64 / 10.0,
    )
}

fn profile(overall: GradeProfile, output: Option<GradeProfile>) -> QualityProfile {
    QualityProfile {
        institution: "X".into(),
        discipline: "physics".into(),
        overall,
        output,
        staff_fte: 10.0,
        nci: None,
    }
}

fn sample(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| {
        (
            prop::collection::vec(-1000.0f64..1000.0, n),
            prop::collection::vec(-1000.0f64..1000.0, n),
        )
    })
}

fn tied_sample(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| {
        (
            prop::collection::vec((0i32..6).prop_map(f64::from), n),
            prop::collection::vec((0i32..6).prop_map(f64::from), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn h_matches_definitional_scan(counts in prop::collection::vec(0u64..400, 0..200)) {
        let h = compute_h(&counts);
        prop_assert_eq!(h, brute_h(&counts));
        prop_assert!(h as usize <= counts.len());
        prop_assert!(h <= counts.iter().copied().max().unwrap_or(0));
    }

    #[test]
    fn h_never_drops_when_citations_grow(
        counts in prop::collection::vec(0u64..100, 1..80),
        idx in any::<prop::sample::Index>(),
        bump in 0u64..50,
        extra in 0u64..100,
    ) {
        let h = compute_h(&counts);
        let mut grown = counts.clone();
        let i = idx.index(grown.len());
        grown[i] += bump;
        prop_assert!(compute_h(&grown) >= h);
        grown.push(extra);
        prop_assert!(compute_h(&grown) >= h);
    }

    #[test]
    fn h_series_never_decreases(records in records_strategy(), window in window_strategy()) {
        let map = DisciplineMap::new("physics", ["Physics and Astronomy"]);
        for inst in INSTITUTIONS {
            let kept = DocumentFilter::new("GB", window, &map, inst).apply(&records);
            let mut last = 0;
            for year in window.start_year() + 1..=2018 {
                let counts: Vec<u64> = kept.iter().map(|r| citations_to_end_of(r, year - 1)).collect();
                let h = compute_h(&counts);
                prop_assert!(h >= last);
                last = h;
            }
        }
    }

    #[test]
    fn filter_is_idempotent(records in records_strategy(), window in window_strategy()) {
        let map = DisciplineMap::new("physics", ["physics and astronomy "]);
        let filter = DocumentFilter::new("GB", window, &map, "A");
        let once: Vec<PublicationRecord> = filter.apply(&records).into_iter().cloned().collect();
        let twice: Vec<PublicationRecord> = filter.apply(&once).into_iter().cloned().collect();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn filter_is_monotone_in_window_and_categories(
        records in records_strategy(),
        window in window_strategy(),
        widen in 0i32..4,
    ) {
        let narrow_map = DisciplineMap::new("physics", ["Physics and Astronomy"]);
        let wide_map = DisciplineMap::new("physics", ["Physics and Astronomy", "Mathematics"]);
        let wider = PublicationWindow::new(window.start_year() - widen, window.end_year() + widen).unwrap();
        let ids = |f: &DocumentFilter| -> BTreeSet<String> {
            f.apply(&records).into_iter().map(|r| r.pub_id.clone()).collect()
        };
        let base = ids(&DocumentFilter::new("GB", window, &narrow_map, "B"));
        prop_assert!(base.is_subset(&ids(&DocumentFilter::new("GB", wider, &narrow_map, "B"))));
        prop_assert!(base.is_subset(&ids(&DocumentFilter::new("GB", window, &wide_map, "B"))));
    }

    #[test]
    fn every_co_affiliation_gets_full_credit(records in records_strategy(), window in window_strategy()) {
        let map = DisciplineMap::new("physics", ["Physics and Astronomy"]);
        let field: Vec<&PublicationRecord> = records
            .iter()
            .filter(|r| DocumentFilter::new("GB", window, &map, "").matches_field(r))
            .collect();
        for inst in INSTITUTIONS {
            let kept = DocumentFilter::new("GB", window, &map, inst).apply(&records);
            let expected = field.iter().filter(|r| r.affiliations.contains(inst)).count();
            prop_assert_eq!(kept.len(), expected);
        }
    }

    #[test]
    fn scores_match_rational_arithmetic(overall in tenths_profile(), output in tenths_profile()) {
        let p = profile(grade(overall), Some(grade(output)));
        let s = rational_s(tenths(overall[0]), tenths(overall[1]), tenths(overall[2]));
        let sp = rational_s_prime(tenths(overall[0]), tenths(overall[1]));
        let so = rational_s(tenths(output[0]), tenths(output[1]), tenths(output[2]));
        prop_assert!((score_s(&p) - q_to_f64(s)).abs() <= 1e-9);
        prop_assert!((score_s_prime(&p) - q_to_f64(sp)).abs() <= 1e-9);
        prop_assert!((score_s_output(&p).unwrap() - q_to_f64(so)).abs() <= 1e-9);
        prop_assert!((0.0..=100.0).contains(&score_s(&p)));
    }

    #[test]
    fn s_is_linear_in_the_profile(a in tenths_profile(), b in tenths_profile(), alpha in 0.0f64..=1.0) {
        let (ga, gb) = (grade(a), grade(b));
        let mixed = profile(ga.mix(&gb, alpha), None);
        let expected = alpha * score_s(&profile(ga, None)) + (1.0 - alpha) * score_s(&profile(gb, None));
        prop_assert!((score_s(&mixed) - expected).abs() <= 1e-9);
        let expected_prime =
            alpha * score_s_prime(&profile(ga, None)) + (1.0 - alpha) * score_s_prime(&profile(gb, None));
        prop_assert!((score_s_prime(&mixed) - expected_prime).abs() <= 1e-9);
    }

    #[test]
    fn pearson_is_symmetric_and_affine_invariant(
        (x, y) in sample(3..=60),
        a in 0.1f64..10.0,
        b in -100.0f64..100.0,
    ) {
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((pearson(&y, &x).unwrap() - r).abs() < 1e-12);
        let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((pearson(&scaled, &y).unwrap() - r).abs() <= 1e-12);
        let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&flipped, &y).unwrap() + r).abs() <= 1e-12);
        prop_assert!((r - naive_pearson(&x, &y)).abs() < 1e-10);
    }

    #[test]
    fn spearman_ignores_monotone_transforms((x, y) in sample(3..=60)) {
        let rho = spearman(&x, &y).unwrap();
        let cubed: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
        let squashed: Vec<f64> = y.iter().map(|v| (v / 1000.0).atan()).collect();
        prop_assert!((spearman(&cubed, &squashed).unwrap() - rho).abs() < 1e-12);
        prop_assert!((rho - spearman_d2(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn spearman_is_pearson_on_permutations(
        (x, y) in (3usize..60).prop_flat_map(|n| {
            let base: Vec<f64> = (1..=n).map(|v| v as f64).collect();
            (Just(base.clone()).prop_shuffle(), Just(base).prop_shuffle())
        })
    ) {
        prop_assert_eq!(spearman(&x, &y).unwrap(), pearson(&x, &y).unwrap());
    }

    #[test]
    fn spearman_handles_ties((x, y) in tied_sample(3..=60)) {
        let constant = |v: &[f64]| v.iter().all(|w| *w == v[0]);
        match spearman(&x, &y) {
            Ok(rho) => prop_assert!((rho - naive_spearman(&x, &y)).abs() < 1e-10),
            Err(_) => prop_assert!(constant(&x) || constant(&y)),
        }
        let ranks = fractional_ranks(&x);
        let n = x.len() as f64;
        prop_assert!((ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn p_value_shrinks_with_stronger_correlation_and_larger_samples(
        r1 in 0.0f64..0.99,
        dr in 0.0f64..0.5,
        n in 3usize..200,
        dn in 0usize..50,
    ) {
        let r2 = (r1 + dr).min(0.999);
        let p = |r: f64, n: usize| significance(r, n, CorrelationKind::Pearson).unwrap().p;
        prop_assert!(p(r2, n) <= p(r1, n) + 1e-12);
        prop_assert!(p(r1, n + dn) <= p(r1, n) + 1e-12);
        prop_assert!((p(-r1, n) - p(r1, n)).abs() < 1e-15);
    }

    #[test]
    fn p_value_matches_quadrature(r in -0.98f64..0.98, n in 3usize..80) {
        let sig = significance(r, n, CorrelationKind::Spearman).unwrap();
        let t = r * ((n as f64 - 2.0) / (1.0 - r * r)).sqrt();
        let oracle = t_two_sided_p(t, n as u32 - 2);
        prop_assert!((sig.p - oracle).abs() < 1e-8, "p = {}, oracle = {}", sig.p, oracle);
        prop_assert_eq!(sig.significant, sig.p < 0.05);
    }

    #[test]
    fn rank_is_one_plus_strictly_greater(values in prop::collection::btree_map("[a-f]{1,3}", 0u32..20, 0..30)) {
        let map: BTreeMap<String, f64> = values.iter().map(|(k, v)| (k.clone(), *v as f64)).collect();
        let table = rank_table(&map, "physics", "h_2008");
        let pairs: Vec<(String, f64)> = map.clone().into_iter().collect();
        for (inst, expected) in competition_ranks(&pairs) {
            prop_assert_eq!(table.rank_of(&inst), Some(expected));
        }
        for w in table.entries.windows(2) {
            prop_assert!(w[0].value >= w[1].value);
        }
    }

    #[test]
    fn movement_is_antisymmetric(
        a in prop::collection::btree_map("[a-f]{1,2}", 0u32..10, 1..20),
        b in prop::collection::btree_map("[a-f]{1,2}", 0u32..10, 1..20),
    ) {
        let to_f = |m: &BTreeMap<String, u32>| m.iter().map(|(k, v)| (k.clone(), *v as f64)).collect::<BTreeMap<_, _>>();
        let (ta, tb) = (rank_table(&to_f(&a), "d", "a"), rank_table(&to_f(&b), "d", "b"));
        let forward = movement(&ta, &tb);
        let backward = movement(&tb, &ta);
        for (inst, m) in &forward.moves {
            match backward.moves.get(inst) {
                Some(back) => prop_assert_eq!(back.movement, m.movement.reversed()),
                None => prop_assert!(!a.contains_key(inst)),
            }
        }
        let new_forward: BTreeSet<&String> = forward
            .moves
            .iter()
            .filter(|(_, m)| m.old_rank.is_none())
            .map(|(k, _)| k)
            .collect();
        let dropped_backward: BTreeSet<&String> = backward.dropped.iter().collect();
        prop_assert_eq!(new_forward, dropped_backward);
    }

    #[test]
    fn ranked_csv_round_trips(values in prop::collection::btree_map("[a-z]{1,6}", 0u32..100_000, 0..30)) {
        let map: BTreeMap<String, f64> = values.iter().map(|(k, v)| (k.clone(), *v as f64 / 1000.0)).collect();
        let table = rank_table(&map, "physics", "s");
        let text = render_table(&table, RenderFormat::Csv);
        prop_assert_eq!(parse_table_csv(&text, "physics", "s").unwrap(), table);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn corpus_survives_emit_and_ingest(seed in any::<u64>(), institutions in 2u32..6) {
        let corpus = generate(&SynthConfig {
            seed,
            n_institutions: institutions,
            papers_per_institution: (3, 12),
            ..SynthConfig::default()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = corpus_to_csv(&corpus).write_to(dir.path()).unwrap();
        let back = ingest_corpus(&paths).unwrap();
        prop_assert_eq!(back, corpus);
    }
}
