//! Synthetic world generator.
//!
//! Produces a timestamped corpus with known ground truth: which entities
//! die when, which posts carry disappearance cues, and when the KB would be
//! updated. Every other stage can then be verified end to end against the
//! generator's record of what actually happened.
//!
//! Mentions follow a per-day Poisson process at a base rate, multiplied
//! inside the death burst window (and optionally an emergence burst at
//! birth, which is what fools last-burst collection). Burst-window posts
//! carry a cue template with a configurable probability; all other mentions
//! use neutral distractor templates, so negatives are non-trivial.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{self, Post};
use crate::error::{Error, Result};
use crate::evaluation::{DetectionEvent, EvalReport};
use crate::kb::{CoarseType, EntityRecord};
use crate::rng::Rng;
use crate::supervision::{label_mentions, LabeledSentence, Polarity, Tag};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntitySpec {
    pub name: String,
    pub ty: CoarseType,
    pub birth: NaiveDate,
    /// `None` for entities that never disappear (pure distractors).
    pub death: Option<NaiveDate>,
    /// Expected mentions per day outside bursts.
    pub base_rate: f64,
    /// Rate multiplier inside the death burst window.
    pub burst_multiplier: f64,
    /// Probability that a death-burst mention carries a cue template.
    pub cue_probability: f64,
    /// Days between death and the KB update.
    pub kb_lag_days: i64,
    /// Rate multiplier in the emergence window right after birth
    /// (1.0 = no emergence burst).
    #[serde(default = "one")]
    pub emergence_multiplier: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldSpec {
    pub seed: u64,
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Death burst window = death +/- this many days.
    pub burst_radius: i64,
    /// Expected entity-free background posts per day.
    pub background_rate: f64,
    pub retweet_prob: f64,
    /// Criterion for the day-refined-embedding ablation: burst-day entity
    /// posts stay neutral while same-day sibling posts carry the cue words
    /// next to a case-variant of the name.
    #[serde(default)]
    pub sibling_cue_mode: bool,
    pub background_vocab: Vec<String>,
    /// Templates with `{w}` placeholders filled from the vocabulary.
    pub background_templates: Vec<String>,
    /// Entity templates with `{e}` (and optional `{w}`) placeholders that do
    /// not suggest disappearance.
    pub neutral_templates: Vec<String>,
    /// Disappearance-cue templates per coarse type; key "ANY" applies to
    /// every type.
    pub cue_templates: BTreeMap<String, Vec<String>>,
    pub entities: Vec<EntitySpec>,
}

impl WorldSpec {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.start > self.end {
            problems.push("date range reversed".to_string());
        }
        if self.burst_radius < 0 {
            problems.push("burst_radius must be >= 0".to_string());
        }
        if !(0.0..=1.0).contains(&self.retweet_prob) {
            problems.push("retweet_prob must be in [0, 1]".to_string());
        }
        if self.background_rate < 0.0 {
            problems.push("background_rate must be >= 0".to_string());
        }
        if self.background_rate > 0.0
            && (self.background_vocab.is_empty() || self.background_templates.is_empty())
        {
            problems.push("background posts need vocab and templates".to_string());
        }
        if self.entities.is_empty() {
            problems.push("at least one entity required".to_string());
        }
        if self.neutral_templates.is_empty() {
            problems.push("at least one neutral template required".to_string());
        }
        for (key, templates) in &self.cue_templates {
            if key != "ANY" && key.parse::<CoarseType>().is_err() {
                problems.push(format!("cue template key `{key}` is not a coarse type"));
            }
            for t in templates {
                if !t.contains("{e}") {
                    problems.push(format!("cue template `{t}` lacks {{e}}"));
                }
            }
        }
        for t in &self.neutral_templates {
            if !t.contains("{e}") {
                problems.push(format!("neutral template `{t}` lacks {{e}}"));
            }
        }
        for e in &self.entities {
            if corpus::tokenize(&e.name).is_empty() {
                problems.push(format!("entity name `{}` tokenizes to nothing", e.name));
            }
            if let Some(death) = e.death {
                if e.birth >= death {
                    problems.push(format!("entity `{}`: birth must precede death", e.name));
                }
                if self.cue_for(e.ty).is_none() {
                    problems.push(format!(
                        "entity `{}` dies but has no cue template for type {}",
                        e.name, e.ty
                    ));
                }
            }
            if e.base_rate <= 0.0 {
                problems.push(format!("entity `{}`: base_rate must be > 0", e.name));
            }
            if !(0.0..=1.0).contains(&e.cue_probability) {
                problems.push(format!(
                    "entity `{}`: cue_probability must be in [0, 1]",
                    e.name
                ));
            }
            if e.burst_multiplier <= 0.0 || e.emergence_multiplier <= 0.0 {
                problems.push(format!("entity `{}`: multipliers must be > 0", e.name));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "invalid world spec:\n  - {}",
                problems.join("\n  - ")
            )))
        }
    }

    fn cue_for(&self, ty: CoarseType) -> Option<&[String]> {
        self.cue_templates
            .get(ty.as_str())
            .or_else(|| self.cue_templates.get("ANY"))
            .map(|v| v.as_slice())
    }

    pub fn load(path: &Path) -> Result<WorldSpec> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("world spec: {e}")))
    }
}

/// One generated post plus its ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldPost {
    pub post: Post,
    /// Canonically mentioned entity, if any.
    pub entity: Option<String>,
    /// Whether the text carries a disappearance cue.
    pub cue: bool,
    /// Whether this post counts as a true disappearing context.
    pub positive: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntityTruth {
    pub name: String,
    pub ty: CoarseType,
    pub birth: NaiveDate,
    pub death: Option<NaiveDate>,
    pub burst_window: Option<(NaiveDate, NaiveDate)>,
    pub update_day: Option<NaiveDate>,
    /// Number of generated cue-bearing posts.
    pub cue_posts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldWorld {
    pub spec: WorldSpec,
    pub posts: Vec<GoldPost>,
    pub truths: Vec<EntityTruth>,
}

fn fill_template(template: &str, name: &str, vocab: &[String], rng: &mut Rng) -> String {
    let mut out: Vec<String> = Vec::new();
    for piece in template.split(' ') {
        if piece == "{e}" {
            out.push(name.to_string());
        } else if piece == "{w}" {
            out.push(vocab[rng.gen_range(vocab.len())].clone());
        } else {
            out.push(piece.to_string());
        }
    }
    out.join(" ")
}

struct RawPost {
    unit: usize,
    seq: usize,
    day: NaiveDate,
    second: u32,
    text: String,
    rt: bool,
    entity: Option<String>,
    cue: bool,
    positive: bool,
}

/// Generates the world. Deterministic for a given spec; each entity and the
/// background stream draw from independent derived seeds, so generation is
/// order-independent across units before the canonical merge.
pub fn generate(spec: &WorldSpec) -> Result<GoldWorld> {
    spec.validate()?;
    let mut raw: Vec<RawPost> = Vec::new();
    let mut truths = Vec::new();

    for (unit, entity) in spec.entities.iter().enumerate() {
        let mut rng = Rng::new(Rng::derive(spec.seed, unit as u64 + 1));
        let burst_window = entity.death.map(|death| {
            (
                (death - Duration::days(spec.burst_radius)).max(spec.start),
                (death + Duration::days(spec.burst_radius)).min(spec.end),
            )
        });
        let emergence_window = (
            entity.birth.max(spec.start),
            (entity.birth + Duration::days(spec.burst_radius)).min(spec.end),
        );
        let mut cue_posts = 0usize;
        let mut seq = 0usize;
        let mut day = entity.birth.max(spec.start);
        while day <= spec.end {
            let in_burst = burst_window.is_some_and(|(lo, hi)| day >= lo && day <= hi);
            let in_emergence =
                entity.emergence_multiplier > 1.0 && day >= emergence_window.0 && day <= emergence_window.1;
            let mut rate = entity.base_rate;
            if in_burst {
                rate *= entity.burst_multiplier;
            } else if in_emergence {
                rate *= entity.emergence_multiplier;
            }
            let count = rng.poisson(rate);
            for _ in 0..count {
                let cue_roll = in_burst && rng.next_f64() < entity.cue_probability;
                if spec.sibling_cue_mode && in_burst {
                    // the labeled-post text stays neutral; the cue appears in
                    // a separate same-day post next to a lowercased variant
                    let neutral = &spec.neutral_templates
                        [rng.gen_range(spec.neutral_templates.len())];
                    let text =
                        fill_template(neutral, &entity.name, &spec.background_vocab, &mut rng);
                    raw.push(RawPost {
                        unit,
                        seq,
                        day,
                        second: (rng.gen_range(86_400)) as u32,
                        text,
                        rt: rng.next_f64() < spec.retweet_prob,
                        entity: Some(entity.name.clone()),
                        cue: false,
                        positive: true,
                    });
                    seq += 1;
                    if cue_roll {
                        let cues = spec.cue_for(entity.ty).unwrap();
                        let template = &cues[rng.gen_range(cues.len())];
                        let text = fill_template(
                            template,
                            &entity.name.to_lowercase(),
                            &spec.background_vocab,
                            &mut rng,
                        );
                        cue_posts += 1;
                        raw.push(RawPost {
                            unit,
                            seq,
                            day,
                            second: (rng.gen_range(86_400)) as u32,
                            text,
                            rt: rng.next_f64() < spec.retweet_prob,
                            entity: None,
                            cue: true,
                            positive: false,
                        });
                        seq += 1;
                    }
                    continue;
                }
                let template = if cue_roll {
                    let cues = spec.cue_for(entity.ty).unwrap();
                    &cues[rng.gen_range(cues.len())]
                } else {
                    &spec.neutral_templates[rng.gen_range(spec.neutral_templates.len())]
                };
                let text = fill_template(template, &entity.name, &spec.background_vocab, &mut rng);
                cue_posts += cue_roll as usize;
                raw.push(RawPost {
                    unit,
                    seq,
                    day,
                    second: (rng.gen_range(86_400)) as u32,
                    text,
                    rt: rng.next_f64() < spec.retweet_prob,
                    entity: Some(entity.name.clone()),
                    cue: cue_roll,
                    positive: cue_roll,
                });
                seq += 1;
            }
            day += Duration::days(1);
        }
        truths.push(EntityTruth {
            name: entity.name.clone(),
            ty: entity.ty,
            birth: entity.birth,
            death: entity.death,
            burst_window,
            update_day: entity
                .death
                .map(|d| d + Duration::days(entity.kb_lag_days)),
            cue_posts,
        });
    }

    // background stream
    if spec.background_rate > 0.0 {
        let unit = spec.entities.len();
        let mut rng = Rng::new(Rng::derive(spec.seed, unit as u64 + 1));
        let mut seq = 0usize;
        let mut day = spec.start;
        while day <= spec.end {
            for _ in 0..rng.poisson(spec.background_rate) {
                let template =
                    &spec.background_templates[rng.gen_range(spec.background_templates.len())];
                let text = fill_template(template, "", &spec.background_vocab, &mut rng);
                raw.push(RawPost {
                    unit,
                    seq,
                    day,
                    second: (rng.gen_range(86_400)) as u32,
                    text,
                    rt: rng.next_f64() < spec.retweet_prob,
                    entity: None,
                    cue: false,
                    positive: false,
                });
                seq += 1;
            }
            day += Duration::days(1);
        }
    }

    // canonical merge order, then stable ids
    raw.sort_by(|a, b| {
        (a.day, a.second, a.unit, a.seq).cmp(&(b.day, b.second, b.unit, b.seq))
    });
    let width = raw.len().to_string().len().max(6);
    let posts = raw
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let ts = Utc
                .from_utc_datetime(
                    &r.day
                        .and_hms_opt(r.second / 3600, (r.second / 60) % 60, r.second % 60)
                        .unwrap(),
                );
            let tokens = corpus::tokenize(&r.text);
            GoldPost {
                post: Post {
                    id: format!("p{i:0width$}"),
                    timestamp: ts,
                    text: r.text,
                    tokens,
                    is_retweet: r.rt,
                    lang: "en".to_string(),
                },
                entity: r.entity,
                cue: r.cue,
                positive: r.positive,
            }
        })
        .collect();
    Ok(GoldWorld {
        spec: spec.clone(),
        posts,
        truths,
    })
}

impl GoldWorld {
    pub fn truth_of(&self, name: &str) -> Option<&EntityTruth> {
        self.truths.iter().find(|t| t.name == name)
    }

    /// Gold BILOU tags for one post: the mentioned entity is labeled iff the
    /// post is a true disappearing context.
    pub fn gold_tags(&self, gp: &GoldPost) -> Vec<Tag> {
        match (&gp.entity, gp.positive) {
            (Some(name), true) => {
                let ty = self.truth_of(name).map(|t| t.ty).unwrap_or(CoarseType::Unmapped);
                label_mentions(&gp.post.tokens, &[name.clone()], ty, false)
            }
            _ => vec![Tag::Outside; gp.post.tokens.len()],
        }
    }

    /// Entity-mention posts as labeled sentences (the gold test material).
    pub fn gold_sentences(&self) -> Vec<LabeledSentence> {
        self.posts
            .iter()
            .filter_map(|gp| {
                let entity = gp.entity.as_ref()?;
                let tags = self.gold_tags(gp);
                let polarity = if tags.iter().any(|t| !t.is_outside()) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                Some(LabeledSentence {
                    post_id: gp.post.id.clone(),
                    tokens: gp.post.tokens.clone(),
                    tags,
                    date: gp.post.day(),
                    entity_id: entity.clone(),
                    polarity,
                })
            })
            .collect()
    }

    pub fn to_posts(&self) -> Vec<Post> {
        self.posts.iter().map(|gp| gp.post.clone()).collect()
    }

    /// JSONL in the corpus ingestion format.
    pub fn posts_jsonl(&self) -> String {
        let mut out = String::new();
        for gp in &self.posts {
            let record = serde_json::json!({
                "id": gp.post.id,
                "ts": gp.post.timestamp.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
                "text": gp.post.text,
                "rt": gp.post.is_retweet,
                "lang": gp.post.lang,
            });
            writeln!(out, "{record}").unwrap();
        }
        out
    }

    fn category_for(ty: CoarseType) -> &'static str {
        match ty {
            CoarseType::Person => "Deaths",
            CoarseType::CreativeWork => "Web_series",
            CoarseType::Location => "Restaurants",
            CoarseType::Group => "Musical_groups",
            CoarseType::Event => "Events",
            CoarseType::ServiceProduct => "Internet_properties",
            CoarseType::Unmapped => "Uncharted_things",
        }
    }

    /// KB records for the entities that actually die (the ended-entity
    /// list a real pipeline would pull from the KB).
    pub fn entity_records(&self) -> Vec<EntityRecord> {
        self.truths
            .iter()
            .filter_map(|t| {
                let death = t.death?;
                Some(EntityRecord {
                    canonical_name: t.name.clone(),
                    aliases: vec![t.name.clone()],
                    disappearance_year: death.year(),
                    categories: vec![Self::category_for(t.ty).to_string()],
                    coarse_type: t.ty,
                    ambiguous: false,
                })
            })
            .collect()
    }

    /// Entity TSV in the kb module's format.
    pub fn entities_tsv(&self) -> String {
        crate::kb::write_entity_list(&self.entity_records())
    }

    pub fn update_days(&self) -> HashMap<String, NaiveDate> {
        self.truths
            .iter()
            .filter_map(|t| Some((t.name.clone(), t.update_day?)))
            .collect()
    }

    pub fn updates_tsv(&self) -> String {
        let mut rows: Vec<(&str, NaiveDate)> = self
            .truths
            .iter()
            .filter_map(|t| Some((t.name.as_str(), t.update_day?)))
            .collect();
        rows.sort();
        let mut out = String::new();
        for (name, day) in rows {
            writeln!(out, "{name}\t{}", day.format("%Y-%m-%d")).unwrap();
        }
        out
    }

    /// Writes posts.jsonl, gold.conll, entities.tsv, updates.tsv, and
    /// world.json into a directory.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        fs::write(dir.join("posts.jsonl"), self.posts_jsonl())
            .map_err(|e| Error::io(dir.join("posts.jsonl"), e))?;
        crate::supervision::write_conll_file(&dir.join("gold.conll"), &self.gold_sentences())?;
        fs::write(dir.join("entities.tsv"), self.entities_tsv())
            .map_err(|e| Error::io(dir.join("entities.tsv"), e))?;
        fs::write(dir.join("updates.tsv"), self.updates_tsv())
            .map_err(|e| Error::io(dir.join("updates.tsv"), e))?;
        let json = serde_json::to_string_pretty(self).map_err(|e| {
            Error::Other(format!("serializing world: {e}"))
        })?;
        fs::write(dir.join("world.json"), json).map_err(|e| Error::io(dir.join("world.json"), e))
    }

    pub fn read_json(path: &Path) -> Result<GoldWorld> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::CorruptData(format!("world.json: {e}")))
    }
}

/// Artifact outputs to compare against ground truth.
#[derive(Default)]
pub struct ArtifactOutputs<'a> {
    /// Positive sentences produced by distant supervision.
    pub supervision_positives: &'a [LabeledSentence],
    /// Gold test sentences paired with predicted tags.
    pub test_predictions: Option<(&'a [LabeledSentence], &'a [Vec<Tag>])>,
    pub detection_events: &'a [DetectionEvent],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    /// Fraction of supervision positives that are true disappearing
    /// contexts.
    pub ds_label_precision: f64,
    /// Fraction of entities (with any positives) whose sampled day lies in
    /// the generator's burst window.
    pub burst_window_hit_rate: f64,
    pub entities_with_positives: usize,
    pub end_to_end: Option<EvalReport>,
    /// Mean/median of (true death day - first detection day).
    pub lead_vs_death: Option<(f64, f64)>,
}

/// Compares pipeline outputs to the generator's ground truth.
pub fn score_against_gold(world: &GoldWorld, outputs: &ArtifactOutputs) -> Result<OracleReport> {
    let by_id: HashMap<&str, &GoldPost> = world
        .posts
        .iter()
        .map(|gp| (gp.post.id.as_str(), gp))
        .collect();

    let mut true_positive = 0usize;
    let mut entity_days: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for s in outputs.supervision_positives {
        let truth = world.truth_of(&s.entity_id).ok_or_else(|| {
            Error::InvalidArgument(format!("unknown entity `{}` in outputs", s.entity_id))
        })?;
        let gp = by_id.get(s.post_id.as_str()).ok_or_else(|| {
            Error::InvalidArgument(format!("unknown post id `{}` in outputs", s.post_id))
        })?;
        if gp.positive {
            true_positive += 1;
        }
        let _ = truth;
        entity_days.entry(&s.entity_id).or_insert(s.date);
    }
    let n_pos = outputs.supervision_positives.len();
    let ds_label_precision = if n_pos == 0 {
        0.0
    } else {
        true_positive as f64 / n_pos as f64
    };
    let mut hits = 0usize;
    for (name, day) in &entity_days {
        let truth = world.truth_of(name).unwrap();
        if truth
            .burst_window
            .is_some_and(|(lo, hi)| *day >= lo && *day <= hi)
        {
            hits += 1;
        }
    }
    let burst_window_hit_rate = if entity_days.is_empty() {
        0.0
    } else {
        hits as f64 / entity_days.len() as f64
    };

    let end_to_end = match outputs.test_predictions {
        Some((gold, pred)) => Some(crate::evaluation::conll_score(gold, pred)?),
        None => None,
    };

    let mut leads = Vec::new();
    for event in outputs.detection_events {
        let truth = world.truth_of(&event.entity_id).ok_or_else(|| {
            Error::InvalidArgument(format!("unknown entity `{}` in events", event.entity_id))
        })?;
        if let Some(death) = truth.death {
            leads.push((death - event.first_detection).num_days());
        }
    }
    let lead_vs_death = crate::evaluation::aggregate_leads(&leads);

    Ok(OracleReport {
        ds_label_precision,
        burst_window_hit_rate,
        entities_with_positives: entity_days.len(),
        end_to_end,
        lead_vs_death,
    })
}

/// A compact world spec with sensible templates, used by tests, examples,
/// and the reference pipeline. Entities are split between a training cohort
/// dying in `train_death_year` and a test cohort dying in `test_year`.
pub struct PresetOptions {
    pub n_train_entities: usize,
    pub n_test_entities: usize,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub train_death_year: i32,
    pub test_year: i32,
    pub base_rate: f64,
    pub burst_multiplier: f64,
    pub cue_probability: f64,
    pub kb_lag_days: i64,
    pub background_rate: f64,
    pub sibling_cue_mode: bool,
    pub seed: u64,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            n_train_entities: 30,
            n_test_entities: 20,
            start: NaiveDate::from_ymd_opt(2017, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2019, 12, 31).unwrap(),
            train_death_year: 2018,
            test_year: 2019,
            base_rate: 0.35,
            burst_multiplier: 60.0,
            cue_probability: 0.9,
            kb_lag_days: 30,
            background_rate: 25.0,
            sibling_cue_mode: false,
            seed: 1,
        }
    }
}

const NAME_HEADS: [&str; 10] = [
    "Vel", "Kor", "Zan", "Mira", "Tol", "Brev", "Quin", "Sor", "Pax", "Lum",
];
const NAME_TAILS: [&str; 10] = [
    "ora", "ix", "eth", "una", "ar", "io", "esta", "ben", "ova", "uric",
];
const NAME_SUFFIX: [&str; 7] = ["", "", "", " Studio", " Hall", " League", " Online"];

fn preset_name(rng: &mut Rng) -> String {
    let head = NAME_HEADS[rng.gen_range(NAME_HEADS.len())];
    let tail = NAME_TAILS[rng.gen_range(NAME_TAILS.len())];
    let suffix = NAME_SUFFIX[rng.gen_range(NAME_SUFFIX.len())];
    format!("{head}{tail}{suffix}")
}

/// Builds the reference world spec.
pub fn preset_world(opts: &PresetOptions) -> WorldSpec {
    let mut rng = Rng::new(Rng::derive(opts.seed, 0xE17));
    let types = [
        CoarseType::Group,
        CoarseType::ServiceProduct,
        CoarseType::Location,
        CoarseType::Event,
        CoarseType::Person,
        CoarseType::CreativeWork,
    ];
    let mut used = std::collections::HashSet::new();
    let mut entities = Vec::new();
    let total = opts.n_train_entities + opts.n_test_entities;
    for i in 0..total {
        let mut name = preset_name(&mut rng);
        while !used.insert(name.clone()) {
            name = preset_name(&mut rng);
        }
        let death_year = if i < opts.n_train_entities {
            opts.train_death_year
        } else {
            opts.test_year
        };
        let death_doy = 40 + rng.gen_range(280) as u32;
        let death = NaiveDate::from_yo_opt(death_year, death_doy).unwrap();
        let birth_back = 300 + rng.gen_range(400) as i64;
        let birth = (death - Duration::days(birth_back)).max(opts.start);
        entities.push(EntitySpec {
            name,
            ty: types[i % types.len()],
            birth,
            death: Some(death),
            base_rate: opts.base_rate,
            burst_multiplier: opts.burst_multiplier,
            cue_probability: opts.cue_probability,
            kb_lag_days: opts.kb_lag_days,
            emergence_multiplier: 1.0,
        });
    }

    let background_vocab: Vec<String> = [
        "coffee", "weather", "game", "music", "city", "friends", "lunch", "movie", "traffic",
        "morning", "night", "weekend", "news", "photo", "dog", "cat", "train", "beach", "rain",
        "sun", "book", "party", "work", "home", "team", "goal", "song", "show", "street", "food",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let background_templates = vec![
        "enjoying {w} with {w} today".to_string(),
        "so much {w} this {w}".to_string(),
        "thinking about {w} and {w}".to_string(),
        "{w} then {w} later".to_string(),
        "what a {w} kind of {w}".to_string(),
    ];
    let neutral_templates = vec![
        "went to see {e} with {w}".to_string(),
        "{e} was great this {w}".to_string(),
        "talking about {e} over {w}".to_string(),
        "my {w} loves {e} so much".to_string(),
        "{e} again in the {w}".to_string(),
    ];
    let mut cue_templates = BTreeMap::new();
    cue_templates.insert(
        "ANY".to_string(),
        vec![
            "{e} is shutting down for good".to_string(),
            "sad news {e} will close forever".to_string(),
            "cannot believe {e} is ending this {w}".to_string(),
            "farewell {e} you will be missed".to_string(),
            "{e} announced its final {w} today".to_string(),
        ],
    );
    cue_templates.insert(
        CoarseType::Person.as_str().to_string(),
        vec![
            "so sad to hear {e} has died".to_string(),
            "rip {e} gone too soon".to_string(),
            "{e} passed away this {w}".to_string(),
        ],
    );
    cue_templates.insert(
        CoarseType::Group.as_str().to_string(),
        vec![
            "{e} to disband after {w} years".to_string(),
            "{e} is breaking up for good".to_string(),
        ],
    );

    WorldSpec {
        seed: opts.seed,
        start: opts.start,
        end: opts.end,
        burst_radius: 3,
        background_rate: opts.background_rate,
        retweet_prob: 0.3,
        sibling_cue_mode: opts.sibling_cue_mode,
        background_vocab,
        background_templates,
        neutral_templates,
        cue_templates,
        entities,
    }
}
