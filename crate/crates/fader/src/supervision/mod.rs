//! Time-sensitive distant supervision.
//!
//! Positives are sampled from the peak mention day inside an entity's
//! disappearance year; negatives from days strictly before that year. The
//! last-burst baseline collects the most recent high-count day instead,
//! without knowing when the entity disappeared. Mentions are labeled with
//! the BILOU scheme plus the entity's coarse type.

mod conll;

pub use conll::{read_conll, read_conll_file, write_conll, write_conll_file};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusIndex, Post};
use crate::error::{Error, Result};
use crate::kb::{CoarseType, EntityRecord};
use crate::rng::{fnv1a64, Rng};

/// BILOU span position markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BilouPrefix {
    Begin,
    Inside,
    Last,
    Unit,
}

impl BilouPrefix {
    pub fn letter(&self) -> char {
        match self {
            BilouPrefix::Begin => 'B',
            BilouPrefix::Inside => 'I',
            BilouPrefix::Last => 'L',
            BilouPrefix::Unit => 'U',
        }
    }
}

/// One token's tag: outside, or a BILOU-prefixed coarse type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Outside,
    Entity(BilouPrefix, CoarseType),
}

impl Tag {
    pub fn is_outside(&self) -> bool {
        matches!(self, Tag::Outside)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Entity(p, t) => write!(f, "{}-{}", p.letter(), t),
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(Tag::Outside);
        }
        let (prefix, ty) = s
            .split_once('-')
            .ok_or_else(|| Error::InvalidArgument(format!("malformed tag `{s}`")))?;
        let prefix = match prefix {
            "B" => BilouPrefix::Begin,
            "I" => BilouPrefix::Inside,
            "L" => BilouPrefix::Last,
            "U" => BilouPrefix::Unit,
            _ => {
                return Err(Error::InvalidArgument(format!("malformed tag `{s}`")));
            }
        };
        Ok(Tag::Entity(prefix, ty.parse()?))
    }
}

/// A contiguous labeled span, end exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub ty: CoarseType,
}

/// Checks BILOU validity: I/L continue a same-type B/I, every B is closed by
/// an L, and U/O stand alone. Returns the index of the first offending tag.
pub fn validate_tags(tags: &[Tag]) -> std::result::Result<(), (usize, String)> {
    let mut open: Option<CoarseType> = None;
    for (i, tag) in tags.iter().enumerate() {
        match (*tag, open) {
            (Tag::Outside, None) | (Tag::Entity(BilouPrefix::Unit, _), None)
                => {}
            (Tag::Entity(BilouPrefix::Begin, _), None) => {
                if let Tag::Entity(_, t) = tag {
                    open = Some(*t);
                }
            }
            (Tag::Entity(BilouPrefix::Inside, t), Some(o)) if t == o => {}
            (Tag::Entity(BilouPrefix::Last, t), Some(o)) if t == o => open = None,
            (tag, Some(_)) => {
                return Err((i, format!("`{tag}` inside an open span")));
            }
            (tag, None) => {
                return Err((i, format!("`{tag}` without a preceding B/I of its type")));
            }
        }
    }
    if open.is_some() {
        return Err((tags.len(), "span left open at sentence end".into()));
    }
    Ok(())
}

/// Extracts (start, end, type) spans from a valid BILOU sequence.
pub fn extract_spans(tags: &[Tag]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, CoarseType)> = None;
    for (i, tag) in tags.iter().enumerate() {
        match tag {
            Tag::Entity(BilouPrefix::Unit, t) => spans.push(Span {
                start: i,
                end: i + 1,
                ty: *t,
            }),
            Tag::Entity(BilouPrefix::Begin, t) => open = Some((i, *t)),
            Tag::Entity(BilouPrefix::Last, t) => {
                if let Some((start, ot)) = open.take() {
                    debug_assert_eq!(*t, ot);
                    spans.push(Span {
                        start,
                        end: i + 1,
                        ty: *t,
                    });
                }
            }
            _ => {}
        }
    }
    spans
}

/// Writes spans back as BILOU tags over `len` tokens.
pub fn tags_from_spans(len: usize, spans: &[Span]) -> Vec<Tag> {
    let mut tags = vec![Tag::Outside; len];
    for span in spans {
        if span.end - span.start == 1 {
            tags[span.start] = Tag::Entity(BilouPrefix::Unit, span.ty);
        } else {
            tags[span.start] = Tag::Entity(BilouPrefix::Begin, span.ty);
            for t in tags.iter_mut().take(span.end - 1).skip(span.start + 1) {
                *t = Tag::Entity(BilouPrefix::Inside, span.ty);
            }
            tags[span.end - 1] = Tag::Entity(BilouPrefix::Last, span.ty);
        }
    }
    tags
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

/// One weakly labeled training sentence with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSentence {
    pub post_id: String,
    pub tokens: Vec<String>,
    pub tags: Vec<Tag>,
    pub date: NaiveDate,
    pub entity_id: String,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupervisionConfig {
    /// Posts sampled per entity per polarity.
    pub k: usize,
    /// Inclusive year interval used for training data.
    pub train_years: (i32, i32),
    pub test_year: i32,
    /// Fraction of training sentences held out for development.
    pub dev_fraction: f64,
    pub seed: u64,
}

impl Default for SupervisionConfig {
    fn default() -> Self {
        SupervisionConfig {
            k: 100,
            train_years: (2012, 2018),
            test_year: 2019,
            dev_fraction: 0.10,
            seed: 1,
        }
    }
}

impl SupervisionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if !(self.dev_fraction > 0.0 && self.dev_fraction < 1.0) {
            return Err(Error::InvalidConfig(
                "dev_fraction must be in (0, 1)".into(),
            ));
        }
        if self.train_years.0 > self.train_years.1 {
            return Err(Error::InvalidConfig("train_years reversed".into()));
        }
        if (self.train_years.0..=self.train_years.1).contains(&self.test_year) {
            return Err(Error::InvalidConfig(
                "test_year must lie outside train_years".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub train: Vec<LabeledSentence>,
    pub dev: Vec<LabeledSentence>,
    pub test: Vec<LabeledSentence>,
}

/// Labels alias mentions with BILOU tags: greedy longest match, left to
/// right, non-overlapping; everything else O.
pub fn label_mentions(
    tokens: &[String],
    aliases: &[String],
    ty: CoarseType,
    fold_case: bool,
) -> Vec<Tag> {
    let fold = |t: &str| {
        if fold_case {
            t.to_lowercase()
        } else {
            t.to_string()
        }
    };
    let mut alias_tokens: Vec<Vec<String>> = aliases
        .iter()
        .map(|a| corpus::tokenize(a).iter().map(|t| fold(t)).collect())
        .filter(|a: &Vec<String>| !a.is_empty())
        .collect();
    alias_tokens.sort_by_key(|a: &Vec<String>| std::cmp::Reverse(a.len()));
    let folded: Vec<String> = tokens.iter().map(|t| fold(t)).collect();
    let mut tags = vec![Tag::Outside; tokens.len()];
    let mut i = 0usize;
    while i < folded.len() {
        let hit = alias_tokens
            .iter()
            .find(|a| folded[i..].starts_with(a.as_slice()));
        match hit {
            Some(alias) => {
                let n = alias.len();
                if n == 1 {
                    tags[i] = Tag::Entity(BilouPrefix::Unit, ty);
                } else {
                    tags[i] = Tag::Entity(BilouPrefix::Begin, ty);
                    for tag in tags.iter_mut().take(i + n - 1).skip(i + 1) {
                        *tag = Tag::Entity(BilouPrefix::Inside, ty);
                    }
                    tags[i + n - 1] = Tag::Entity(BilouPrefix::Last, ty);
                }
                i += n;
            }
            None => i += 1,
        }
    }
    tags
}

fn alias_token_lists(entity: &EntityRecord) -> Vec<Vec<String>> {
    entity
        .aliases
        .iter()
        .map(|a| corpus::tokenize(a))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Posts of `days` (ascending, then by timestamp and id) that contain any of
/// the alias token sequences.
fn posts_with_any_alias<'a>(
    index: &'a CorpusIndex,
    aliases: &[Vec<String>],
    days: &BTreeSet<NaiveDate>,
) -> Vec<&'a Post> {
    let mut out = Vec::new();
    for &day in days {
        for post in index.posts_of_day(day) {
            if index.options().exclude_rt && post.is_retweet {
                continue;
            }
            if aliases
                .iter()
                .any(|a| index.contains_phrase(&post.tokens, a))
            {
                out.push(post);
            }
        }
    }
    out
}

/// Days (within an optional bound) on which any alias of the entity occurs.
fn alias_days(
    index: &CorpusIndex,
    aliases: &[Vec<String>],
    below: Option<NaiveDate>,
) -> Result<BTreeSet<NaiveDate>> {
    let mut days = BTreeSet::new();
    for alias in aliases {
        let series = corpus::daily_counts(index, alias, corpus::full_range(index))?;
        for (day, _) in series.entries {
            if below.map_or(true, |b| day < b) {
                days.insert(day);
            }
        }
    }
    Ok(days)
}

fn entity_seed(cfg_seed: u64, entity: &EntityRecord, salt: u64) -> u64 {
    Rng::derive(cfg_seed ^ salt, fnv1a64(entity.canonical_name.as_bytes()))
}

fn label_post(
    post: &Post,
    entity: &EntityRecord,
    fold_case: bool,
    polarity: Polarity,
) -> LabeledSentence {
    let tags = match polarity {
        Polarity::Positive => {
            label_mentions(&post.tokens, &entity.aliases, entity.coarse_type, fold_case)
        }
        Polarity::Negative => vec![Tag::Outside; post.tokens.len()],
    };
    LabeledSentence {
        post_id: post.id.clone(),
        tokens: post.tokens.clone(),
        tags,
        date: post.day(),
        entity_id: entity.canonical_name.clone(),
        polarity,
    }
}

/// Collects up to `k` positive contexts from the peak mention day of the
/// entity's disappearance year. Returns an empty list when the entity never
/// appears in that year.
pub fn collect_positive_contexts(
    entity: &EntityRecord,
    index: &CorpusIndex,
    cfg: &SupervisionConfig,
) -> Result<Vec<LabeledSentence>> {
    let canonical = corpus::tokenize(&entity.canonical_name);
    if canonical.is_empty() {
        return Ok(Vec::new());
    }
    let series = corpus::daily_counts(index, &canonical, corpus::full_range(index))?;
    let Some(peak) = corpus::peak_day(&series, entity.disappearance_year) else {
        log::info!(
            "entity `{}` has no mentions in {}; uncovered",
            entity.canonical_name,
            entity.disappearance_year
        );
        return Ok(Vec::new());
    };
    let aliases = alias_token_lists(entity);
    let days = BTreeSet::from([peak]);
    let candidates = posts_with_any_alias(index, &aliases, &days);
    let mut rng = Rng::new(entity_seed(cfg.seed, entity, 0x706f73));
    let sampled = rng.sample(&candidates, cfg.k);
    Ok(sampled
        .into_iter()
        .map(|p| label_post(p, entity, index.options().fold_case, Polarity::Positive))
        .filter(|s| s.tags.iter().any(|t| !t.is_outside()))
        .collect())
}

/// Collects all-O negative contexts from days strictly before January 1 of
/// the disappearance year, balanced to the number of positives actually
/// collected.
pub fn collect_negative_contexts(
    entity: &EntityRecord,
    index: &CorpusIndex,
    cfg: &SupervisionConfig,
    positives_collected: usize,
) -> Result<Vec<LabeledSentence>> {
    let want = cfg.k.min(positives_collected);
    if want == 0 {
        return Ok(Vec::new());
    }
    let jan1 = NaiveDate::from_ymd_opt(entity.disappearance_year, 1, 1).unwrap();
    let aliases = alias_token_lists(entity);
    let days = alias_days(index, &aliases, Some(jan1))?;
    let candidates = posts_with_any_alias(index, &aliases, &days);
    let mut rng = Rng::new(entity_seed(cfg.seed, entity, 0x6e6567));
    let sampled = rng.sample(&candidates, want);
    Ok(sampled
        .into_iter()
        .map(|p| label_post(p, entity, index.options().fold_case, Polarity::Negative))
        .collect())
}

/// Positive and balanced negative contexts for one entity.
pub fn collect_entity_contexts(
    entity: &EntityRecord,
    index: &CorpusIndex,
    cfg: &SupervisionConfig,
) -> Result<(Vec<LabeledSentence>, Vec<LabeledSentence>)> {
    let positives = collect_positive_contexts(entity, index, cfg)?;
    let negatives = collect_negative_contexts(entity, index, cfg, positives.len())?;
    Ok((positives, negatives))
}

/// Posts sampled per entity and polarity by the last-burst baseline.
pub const BASELINE_K: usize = 100;
/// A qualifying baseline day needs strictly more mentions than this.
pub const BASELINE_MIN_COUNT: u32 = 10;

/// Last-burst baseline collection: the positive day is the latest day up to
/// the end of `cutoff_year` on which the entity appears more than ten times;
/// positives prefer retweets of that day, negatives come from more than a
/// year earlier. The disappearance year is never consulted.
pub fn collect_baseline_contexts(
    entity: &EntityRecord,
    index: &CorpusIndex,
    cutoff_year: i32,
) -> Result<(Vec<LabeledSentence>, Vec<LabeledSentence>)> {
    let canonical = corpus::tokenize(&entity.canonical_name);
    if canonical.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let end = NaiveDate::from_ymd_opt(cutoff_year, 12, 31).unwrap();
    let lo = corpus::full_range(index).0;
    if lo > end {
        return Ok((Vec::new(), Vec::new()));
    }
    let series = corpus::daily_counts(index, &canonical, (lo, end))?;
    let Some(positive_day) = series
        .entries
        .iter()
        .rev()
        .find(|&&(_, c)| c > BASELINE_MIN_COUNT)
        .map(|&(d, _)| d)
    else {
        return Ok((Vec::new(), Vec::new()));
    };
    let aliases = alias_token_lists(entity);
    let days = BTreeSet::from([positive_day]);
    let candidates = posts_with_any_alias(index, &aliases, &days);
    let (retweets, rest): (Vec<&Post>, Vec<&Post>) =
        candidates.into_iter().partition(|p| p.is_retweet);
    let mut rng = Rng::new(entity_seed(0xb5a1, entity, 0x626173));
    let mut positives: Vec<&Post> = rng.sample(&retweets, BASELINE_K);
    if positives.len() < BASELINE_K {
        // not enough retweets; fill with ordinary posts of the day
        let fill = rng.sample(&rest, BASELINE_K - positives.len());
        positives.extend(fill);
    }
    let positives: Vec<LabeledSentence> = positives
        .into_iter()
        .map(|p| label_post(p, entity, index.options().fold_case, Polarity::Positive))
        .filter(|s| s.tags.iter().any(|t| !t.is_outside()))
        .collect();

    let horizon = positive_day - Duration::days(365);
    let neg_days = alias_days(index, &aliases, Some(horizon))?;
    let neg_candidates = posts_with_any_alias(index, &aliases, &neg_days);
    let negatives: Vec<LabeledSentence> = rng
        .sample(&neg_candidates, positives.len())
        .into_iter()
        .map(|p| label_post(p, entity, index.options().fold_case, Polarity::Negative))
        .collect();
    Ok((positives, negatives))
}

/// Canonical corpus-independent ordering: (entity, date, post id).
pub fn canonical_order(sentences: &mut [LabeledSentence]) {
    sentences.sort_by(|a, b| {
        (&a.entity_id, a.date, &a.post_id).cmp(&(&b.entity_id, b.date, &b.post_id))
    });
}

/// Splits sentences into train/dev/test by date. Dev is a seeded per-entity
/// fraction of the training sentences; dev and train never share post ids.
pub fn split_dataset(sentences: &[LabeledSentence], cfg: &SupervisionConfig) -> Dataset {
    let mut train_pool: Vec<LabeledSentence> = Vec::new();
    let mut test = Vec::new();
    for s in sentences {
        let year = s.date.year();
        if year == cfg.test_year {
            test.push(s.clone());
        } else if year >= cfg.train_years.0 && year <= cfg.train_years.1 {
            train_pool.push(s.clone());
        }
    }
    canonical_order(&mut train_pool);
    canonical_order(&mut test);

    let mut by_entity: Vec<(String, Vec<usize>)> = Vec::new();
    for (i, s) in train_pool.iter().enumerate() {
        match by_entity.last_mut() {
            Some((name, ids)) if *name == s.entity_id => ids.push(i),
            _ => by_entity.push((s.entity_id.clone(), vec![i])),
        }
    }
    let mut dev_mask = vec![false; train_pool.len()];
    for (name, ids) in &by_entity {
        let n_dev = (ids.len() as f64 * cfg.dev_fraction).round() as usize;
        if n_dev == 0 {
            continue;
        }
        let mut rng = Rng::new(Rng::derive(cfg.seed ^ 0x646576, fnv1a64(name.as_bytes())));
        for i in rng.sample(ids, n_dev) {
            dev_mask[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut dev = Vec::new();
    for (i, s) in train_pool.into_iter().enumerate() {
        if dev_mask[i] {
            dev.push(s);
        } else {
            train.push(s);
        }
    }
    Dataset { train, dev, test }
}

#[cfg(test)]
mod tests;
