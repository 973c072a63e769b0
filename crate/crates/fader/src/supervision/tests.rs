use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use proptest::prelude::*;

use super::*;
use crate::corpus::{index_posts, tokenize, CorpusOptions, Post};
use crate::kb::{CoarseType, EntityRecord, TypeMapping};

fn tag(s: &str) -> Tag {
    s.parse().unwrap()
}

fn tags(list: &[&str]) -> Vec<Tag> {
    list.iter().map(|s| tag(s)).collect()
}

fn toks(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn mk_post(id: &str, y: i32, m: u32, d: u32, text: &str, rt: bool) -> Post {
    Post {
        id: id.to_string(),
        timestamp: Utc.with_ymd_and_hms(y, m, d, 12, 0, 0).unwrap()
            + chrono::Duration::seconds(id.bytes().map(|b| b as i64).sum::<i64>() % 3600),
        text: text.to_string(),
        tokens: tokenize(text),
        is_retweet: rt,
        lang: "en".into(),
    }
}

fn entity(name: &str, year: i32, ty_cat: &str) -> EntityRecord {
    EntityRecord::new(
        name,
        vec![],
        year,
        vec![ty_cat.to_string()],
        &TypeMapping::default_english(),
        false,
    )
}

#[test]
fn label_single_token_alias() {
    let got = label_mentions(
        &toks(&["Google+", "is", "shutting", "down"]),
        &["Google+".to_string()],
        CoarseType::ServiceProduct,
        true,
    );
    assert_eq!(got, tags(&["U-SERVICE_PRODUCT", "O", "O", "O"]));
}

#[test]
fn label_multi_token_alias() {
    let got = label_mentions(
        &toks(&["Red", "Bull", "Air", "Race", "ends"]),
        &["Red Bull Air Race".to_string()],
        CoarseType::Event,
        true,
    );
    assert_eq!(got, tags(&["B-EVENT", "I-EVENT", "I-EVENT", "L-EVENT", "O"]));
}

#[test]
fn label_no_alias_present() {
    let got = label_mentions(
        &toks(&["nothing", "here"]),
        &["Google+".to_string()],
        CoarseType::ServiceProduct,
        true,
    );
    assert_eq!(got, tags(&["O", "O"]));
}

#[test]
fn label_prefers_longest_match_and_labels_all_mentions() {
    let got = label_mentions(
        &toks(&["Big", "Day", "Out", "then", "Big", "Day"]),
        &["Big Day Out".to_string(), "Big Day".to_string()],
        CoarseType::Event,
        true,
    );
    assert_eq!(
        got,
        tags(&["B-EVENT", "I-EVENT", "L-EVENT", "O", "B-EVENT", "L-EVENT"])
    );
}

#[test]
fn validate_rejects_orphan_inside() {
    let bad = tags(&["O", "I-PERSON"]);
    assert!(validate_tags(&bad).is_err());
    let bad = tags(&["B-PERSON", "I-GROUP", "L-PERSON"]);
    assert!(validate_tags(&bad).is_err());
    let bad = tags(&["B-PERSON"]);
    assert!(validate_tags(&bad).is_err());
    let good = tags(&["B-PERSON", "I-PERSON", "L-PERSON", "O", "U-GROUP"]);
    assert!(validate_tags(&good).is_ok());
}

#[test]
fn span_roundtrip_identity() {
    let t = tags(&["B-EVENT", "I-EVENT", "L-EVENT", "O", "U-GROUP", "O"]);
    let spans = extract_spans(&t);
    assert_eq!(
        spans,
        vec![
            Span {
                start: 0,
                end: 3,
                ty: CoarseType::Event
            },
            Span {
                start: 4,
                end: 5,
                ty: CoarseType::Group
            }
        ]
    );
    assert_eq!(tags_from_spans(t.len(), &spans), t);
}

/// Independent span matcher: longest alias match per position, coded
/// differently from `label_mentions`.
fn brute_force_spans(tokens: &[String], aliases: &[Vec<String>]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut best = 0usize;
        for alias in aliases {
            if alias.is_empty() || i + alias.len() > tokens.len() {
                continue;
            }
            let mut ok = true;
            for (j, a) in alias.iter().enumerate() {
                if &tokens[i + j].to_lowercase() != a {
                    ok = false;
                    break;
                }
            }
            if ok && alias.len() > best {
                best = alias.len();
            }
        }
        if best > 0 {
            spans.push((i, i + best));
            i += best;
        } else {
            i += 1;
        }
    }
    spans
}

proptest! {
    #[test]
    fn label_mentions_valid_and_matches_bruteforce(
        word_ids in prop::collection::vec(0usize..6, 1..25),
        alias_pick in prop::collection::vec((0usize..6, 1usize..4), 1..3),
    ) {
        let words = ["vine", "orkut", "pristin", "ends", "today", "sad"];
        let tokens: Vec<String> = word_ids.iter().map(|&i| words[i].to_string()).collect();
        let aliases: Vec<String> = alias_pick
            .iter()
            .map(|&(start, len)| {
                (0..len)
                    .map(|j| words[(start + j) % words.len()])
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let got = label_mentions(&tokens, &aliases, CoarseType::Group, true);
        prop_assert!(validate_tags(&got).is_ok());
        let alias_tokens: Vec<Vec<String>> = aliases
            .iter()
            .map(|a| a.split(' ').map(|s| s.to_lowercase()).collect())
            .collect();
        let expect = brute_force_spans(&tokens, &alias_tokens);
        let spans: Vec<(usize, usize)> = extract_spans(&got)
            .iter()
            .map(|s| (s.start, s.end))
            .collect();
        prop_assert_eq!(spans, expect);
    }
}

fn burst_corpus() -> (crate::corpus::CorpusIndex, EntityRecord) {
    // Pristin: quiet mentions in 2017-2018, burst on 2019-05-05
    let mut posts = Vec::new();
    for i in 0..30 {
        posts.push(mk_post(
            &format!("old{i}"),
            2017 + (i % 2) as i32,
            1 + (i % 12) as u32,
            1 + (i % 28) as u32,
            "listening to Pristin today",
            false,
        ));
    }
    for i in 0..37 {
        posts.push(mk_post(
            &format!("burst{i}"),
            2019,
            5,
            5,
            "Pristin to disband after 2 years",
            i % 3 == 0,
        ));
    }
    for i in 0..4 {
        posts.push(mk_post(
            &format!("tail{i}"),
            2019,
            6,
            1 + i as u32,
            "remember Pristin",
            false,
        ));
    }
    let (index, _) = index_posts(posts, CorpusOptions::default());
    let e = entity("Pristin", 2019, "Musical_groups");
    (index, e)
}

#[test]
fn positives_come_from_peak_day_and_undersupply() {
    let (index, e) = burst_corpus();
    let cfg = SupervisionConfig {
        k: 100,
        train_years: (2017, 2018),
        test_year: 2019,
        ..SupervisionConfig::default()
    };
    let positives = collect_positive_contexts(&e, &index, &cfg).unwrap();
    assert_eq!(positives.len(), 37);
    let day = NaiveDate::from_ymd_opt(2019, 5, 5).unwrap();
    for s in &positives {
        assert_eq!(s.date, day);
        assert_eq!(s.polarity, Polarity::Positive);
        assert!(s.tags.iter().any(|t| !t.is_outside()));
        assert!(validate_tags(&s.tags).is_ok());
    }
}

#[test]
fn entity_absent_from_year_yields_empty() {
    let (index, _) = burst_corpus();
    let ghost = entity("Ghost Band", 2019, "Musical_groups");
    let cfg = SupervisionConfig::default();
    assert!(collect_positive_contexts(&ghost, &index, &cfg)
        .unwrap()
        .is_empty());
}

#[test]
fn negatives_balanced_and_strictly_earlier() {
    let (index, e) = burst_corpus();
    let cfg = SupervisionConfig {
        k: 10,
        ..SupervisionConfig::default()
    };
    let positives = collect_positive_contexts(&e, &index, &cfg).unwrap();
    assert_eq!(positives.len(), 10);
    let negatives = collect_negative_contexts(&e, &index, &cfg, positives.len()).unwrap();
    assert_eq!(negatives.len(), 10);
    let jan1 = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap();
    for s in &negatives {
        assert!(s.date < jan1);
        assert_eq!(s.polarity, Polarity::Negative);
        assert!(s.tags.iter().all(|t| t.is_outside()));
    }
    // only 30 pre-year mentions exist; ask for more, get what exists
    let many = collect_negative_contexts(&e, &index, &cfg, 100).unwrap();
    assert_eq!(many.len(), 10); // still capped by k
    let cfg_big = SupervisionConfig {
        k: 100,
        ..SupervisionConfig::default()
    };
    let many = collect_negative_contexts(&e, &index, &cfg_big, 100).unwrap();
    assert_eq!(many.len(), 30);
}

#[test]
fn baseline_needs_more_than_ten_and_caps_at_hundred() {
    // 250 retweets on one day in 2018, plenty of old mentions
    let mut posts = Vec::new();
    for i in 0..250 {
        posts.push(mk_post(
            &format!("rt{i}"),
            2018,
            7,
            1,
            "My Local is closing",
            true,
        ));
    }
    for i in 0..150 {
        posts.push(mk_post(
            &format!("old{i}"),
            2016,
            1 + (i % 12) as u32,
            1 + (i % 28) as u32,
            "shopping at My Local",
            false,
        ));
    }
    let (index, _) = index_posts(posts, CorpusOptions::default());
    let e = entity("My Local", 2019, "Retail_companies");
    let (pos, neg) = collect_baseline_contexts(&e, &index, 2018).unwrap();
    assert_eq!(pos.len(), 100);
    assert_eq!(neg.len(), 100);
    assert!(pos.iter().all(|s| s.date == NaiveDate::from_ymd_opt(2018, 7, 1).unwrap()));

    // an entity that never passes 10 mentions per day
    let quiet = entity("Quiet Thing", 2019, "Events");
    let (p, n) = collect_baseline_contexts(&quiet, &index, 2018).unwrap();
    assert!(p.is_empty() && n.is_empty());
}

#[test]
fn baseline_fills_with_non_retweets() {
    let mut posts = Vec::new();
    for i in 0..12 {
        posts.push(mk_post(
            &format!("d{i}"),
            2018,
            3,
            3,
            "Orkut is done",
            i < 5, // 5 retweets, 7 plain
        ));
    }
    for i in 0..30 {
        posts.push(mk_post(
            &format!("o{i}"),
            2015,
            2,
            1 + (i % 28) as u32,
            "chatting on Orkut",
            false,
        ));
    }
    let (index, _) = index_posts(posts, CorpusOptions::default());
    let e = entity("Orkut", 2019, "Internet_properties");
    let (pos, neg) = collect_baseline_contexts(&e, &index, 2018).unwrap();
    assert_eq!(pos.len(), 12);
    assert_eq!(neg.len(), 12);
}

#[test]
fn split_routes_years_and_holds_out_dev() {
    let day = NaiveDate::from_ymd_opt(2018, 6, 1).unwrap();
    let test_day = NaiveDate::from_ymd_opt(2019, 2, 2).unwrap();
    let mut sentences = Vec::new();
    for i in 0..100 {
        sentences.push(LabeledSentence {
            post_id: format!("p{i}"),
            tokens: toks(&["hello"]),
            tags: tags(&["O"]),
            date: day,
            entity_id: "E".into(),
            polarity: Polarity::Negative,
        });
    }
    sentences.push(LabeledSentence {
        post_id: "t0".into(),
        tokens: toks(&["bye"]),
        tags: tags(&["O"]),
        date: test_day,
        entity_id: "E".into(),
        polarity: Polarity::Negative,
    });
    let cfg = SupervisionConfig {
        k: 100,
        train_years: (2012, 2018),
        test_year: 2019,
        dev_fraction: 0.10,
        seed: 5,
    };
    let ds = split_dataset(&sentences, &cfg);
    assert_eq!(ds.dev.len(), 10);
    assert_eq!(ds.train.len(), 90);
    assert_eq!(ds.test.len(), 1);
    let ds2 = split_dataset(&sentences, &cfg);
    assert_eq!(ds.train, ds2.train);
    assert_eq!(ds.dev, ds2.dev);
    // no shared post ids between train and dev
    let train_ids: BTreeSet<&String> = ds.train.iter().map(|s| &s.post_id).collect();
    assert!(ds.dev.iter().all(|s| !train_ids.contains(&s.post_id)));
}

#[test]
fn config_validation() {
    let mut cfg = SupervisionConfig::default();
    assert!(cfg.validate().is_ok());
    cfg.test_year = 2015;
    assert!(cfg.validate().is_err());
    cfg.test_year = 2019;
    cfg.dev_fraction = 1.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn conll_roundtrip_byte_identical() {
    let (index, e) = burst_corpus();
    let cfg = SupervisionConfig {
        k: 5,
        ..SupervisionConfig::default()
    };
    let (pos, neg) = collect_entity_contexts(&e, &index, &cfg).unwrap();
    let mut all: Vec<LabeledSentence> = pos.into_iter().chain(neg).collect();
    canonical_order(&mut all);
    let text = write_conll(&all).unwrap();
    let back = read_conll(&text).unwrap();
    assert_eq!(back, all);
    let text2 = write_conll(&back).unwrap();
    assert_eq!(text, text2);
}

#[test]
fn conll_rejects_orphan_inside_tag() {
    let text = "# id=x date=2019-01-01 entity=E polarity=POS\nfoo\tI-PERSON\n\n";
    let err = read_conll(text).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line") || msg.contains(":2"), "{msg}");
}

#[test]
fn conll_rejects_malformed_tag() {
    let text = "# id=x date=2019-01-01 entity=E polarity=POS\nfoo\tQ-PERSON\n\n";
    assert!(read_conll(text).is_err());
}

#[test]
fn conll_empty_file() {
    assert!(read_conll("").unwrap().is_empty());
}

#[test]
fn conll_entity_names_with_spaces() {
    let s = LabeledSentence {
        post_id: "p1".into(),
        tokens: toks(&["Red", "Bull", "Air", "Race", "ends"]),
        tags: tags(&["B-EVENT", "I-EVENT", "I-EVENT", "L-EVENT", "O"]),
        date: NaiveDate::from_ymd_opt(2019, 9, 8).unwrap(),
        entity_id: "Red Bull Air Race".into(),
        polarity: Polarity::Positive,
    };
    let text = write_conll(std::slice::from_ref(&s)).unwrap();
    let back = read_conll(&text).unwrap();
    assert_eq!(back, vec![s]);
}
