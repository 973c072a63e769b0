//! Post ingestion, tokenization, and the time-indexed corpus store.
//!
//! The index answers the per-day phrase-count queries that time-sensitive
//! distant supervision is built on: daily mention series, peak day within a
//! year, first appearance year, and seeded sampling of matching posts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::BufRead;
use std::sync::OnceLock;

use chrono::{DateTime, Datelike, NaiveDate, Utc};
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Longest n-gram kept in the phrase index; longer phrases fall back to a
/// linear scan.
pub const MAX_INDEXED_NGRAM: usize = 6;

/// One timestamped microblog post, tokenized at ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub tokens: Vec<String>,
    pub is_retweet: bool,
    pub lang: String,
}

impl Post {
    /// UTC calendar day used for all time indexing.
    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

/// Wire format of one JSONL record. `rt` and `lang` are optional; unknown
/// keys are ignored.
#[derive(Debug, Serialize, Deserialize)]
pub struct PostRecord {
    pub id: String,
    pub ts: String,
    pub text: String,
    #[serde(default)]
    pub rt: bool,
    #[serde(default = "default_lang")]
    pub lang: String,
}

fn default_lang() -> String {
    "en".to_string()
}

/// Corpus-wide options fixed at ingestion time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusOptions {
    /// Case-fold phrase matching (on for English, off for Japanese).
    pub fold_case: bool,
    /// Exclude retweets from phrase counts and sampling candidates.
    pub exclude_rt: bool,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            fold_case: true,
            exclude_rt: false,
        }
    }
}

/// Daily mention counts for one phrase, ascending by day, zero days omitted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DailySeries {
    pub entries: Vec<(NaiveDate, u32)>,
}

impl DailySeries {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c as u64).sum()
    }
}

/// Counts of what happened during ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub malformed: usize,
    pub duplicates: usize,
}

fn url_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"https?://\S+|t\.co/\S+").unwrap())
}

/// Keep `+ & ' .` at a token edge when the neighbouring interior char is
/// alphanumeric ("Google+", "AT&T", "rock'n", "U.S.").
const PROTECTED_EDGE: [char; 4] = ['+', '&', '\'', '.'];

/// Tokenizes raw post text.
///
/// Rule order: strip URLs, split on Unicode whitespace, drop @-mentions and
/// #-hashtags, trim edge punctuation (protecting `+ & ' .` next to interior
/// alphanumerics), drop empties. Case is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    let cleaned = url_regex().replace_all(text, "");
    cleaned
        .split_whitespace()
        .filter(|tok| !tok.starts_with('@') && !tok.starts_with('#'))
        .filter_map(|tok| {
            let trimmed = trim_token(tok);
            if trimmed.is_empty() {
                None
            } else {
                Some(trimmed.to_string())
            }
        })
        .collect()
}

fn trim_token(tok: &str) -> &str {
    let chars: Vec<char> = tok.chars().collect();
    let mut start = 0usize;
    let mut end = chars.len();
    while start < end {
        let c = chars[start];
        if c.is_alphanumeric() {
            break;
        }
        if PROTECTED_EDGE.contains(&c)
            && start + 1 < end
            && chars[start + 1].is_alphanumeric()
        {
            break;
        }
        start += 1;
    }
    while end > start {
        let c = chars[end - 1];
        if c.is_alphanumeric() {
            break;
        }
        if PROTECTED_EDGE.contains(&c) && end >= 2 && chars[end - 2].is_alphanumeric() {
            break;
        }
        end -= 1;
    }
    let byte_start: usize = chars[..start].iter().map(|c| c.len_utf8()).sum();
    let byte_len: usize = chars[start..end].iter().map(|c| c.len_utf8()).sum();
    &tok[byte_start..byte_start + byte_len]
}

/// Immutable time-indexed post store.
///
/// A post contributes at most 1 to each (phrase, day) cell regardless of how
/// often the phrase repeats inside it, so a single spammy post cannot define
/// a peak day.
#[derive(Debug)]
pub struct CorpusIndex {
    posts: Vec<Post>,
    by_id: HashMap<String, usize>,
    posts_by_day: BTreeMap<NaiveDate, Vec<usize>>,
    phrase_counts: HashMap<String, BTreeMap<NaiveDate, u32>>,
    options: CorpusOptions,
}

impl CorpusIndex {
    pub fn options(&self) -> &CorpusOptions {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn post_by_id(&self, id: &str) -> Option<&Post> {
        self.by_id.get(id).map(|&i| &self.posts[i])
    }

    /// Days present in the index, ascending.
    pub fn days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.posts_by_day.keys().copied()
    }

    /// Posts of one day, sorted by (timestamp, id).
    pub fn posts_of_day(&self, day: NaiveDate) -> impl Iterator<Item = &Post> {
        self.posts_by_day
            .get(&day)
            .into_iter()
            .flat_map(|v| v.iter().map(|&i| &self.posts[i]))
    }

    pub fn fold(&self, token: &str) -> String {
        if self.options.fold_case {
            token.to_lowercase()
        } else {
            token.to_string()
        }
    }

    fn phrase_key(&self, phrase: &[String]) -> String {
        let folded: Vec<String> = phrase.iter().map(|t| self.fold(t)).collect();
        folded.join(" ")
    }

    /// Whether `phrase` occurs as a contiguous token subsequence of `tokens`,
    /// under this index's case policy.
    pub fn contains_phrase(&self, tokens: &[String], phrase: &[String]) -> bool {
        if phrase.is_empty() || phrase.len() > tokens.len() {
            return false;
        }
        let folded_phrase: Vec<String> = phrase.iter().map(|t| self.fold(t)).collect();
        let folded_tokens: Vec<String> = tokens.iter().map(|t| self.fold(t)).collect();
        folded_tokens
            .windows(folded_phrase.len())
            .any(|w| w == folded_phrase.as_slice())
    }

    fn post_counts_for(&self, post: &Post) -> bool {
        !(self.options.exclude_rt && post.is_retweet)
    }
}

struct ParsedLine {
    post: Option<Post>,
}

fn parse_line(line: &str) -> ParsedLine {
    let record: PostRecord = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(_) => return ParsedLine { post: None },
    };
    let timestamp = match DateTime::parse_from_rfc3339(&record.ts) {
        Ok(t) => t.with_timezone(&Utc),
        Err(_) => return ParsedLine { post: None },
    };
    let tokens = tokenize(&record.text);
    ParsedLine {
        post: Some(Post {
            id: record.id,
            timestamp,
            text: record.text,
            tokens,
            is_retweet: record.rt,
            lang: record.lang,
        }),
    }
}

/// Builds a [`CorpusIndex`] from a JSONL stream.
///
/// Malformed lines are counted and skipped; duplicate ids keep the first
/// occurrence. Only an unreadable source is fatal.
pub fn ingest_posts<R: BufRead>(source: R, options: CorpusOptions) -> Result<(CorpusIndex, IngestReport)> {
    let mut report = IngestReport::default();
    let mut posts = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for line in source.lines() {
        let line = line.map_err(|e| Error::io("<stream>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line).post {
            None => report.malformed += 1,
            Some(post) => {
                if by_id.contains_key(&post.id) {
                    report.duplicates += 1;
                } else {
                    by_id.insert(post.id.clone(), posts.len());
                    posts.push(post);
                }
            }
        }
    }
    report.accepted = posts.len();
    Ok((build_index(posts, by_id, options), report))
}

/// Parallel variant: lines are parsed and tokenized across threads, then
/// merged in input order, so the result is identical to [`ingest_posts`].
pub fn ingest_posts_parallel(lines: &[String], options: CorpusOptions) -> (CorpusIndex, IngestReport) {
    let parsed: Vec<ParsedLine> = lines
        .par_iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse_line(l))
        .collect();
    let mut report = IngestReport::default();
    let mut posts = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for p in parsed {
        match p.post {
            None => report.malformed += 1,
            Some(post) => {
                if by_id.contains_key(&post.id) {
                    report.duplicates += 1;
                } else {
                    by_id.insert(post.id.clone(), posts.len());
                    posts.push(post);
                }
            }
        }
    }
    report.accepted = posts.len();
    (build_index(posts, by_id, options), report)
}

/// Builds an index over posts already in memory (used by the synthetic
/// generator and tests).
pub fn index_posts(posts: Vec<Post>, options: CorpusOptions) -> (CorpusIndex, IngestReport) {
    let mut report = IngestReport::default();
    let mut kept = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for post in posts {
        if by_id.contains_key(&post.id) {
            report.duplicates += 1;
        } else {
            by_id.insert(post.id.clone(), kept.len());
            kept.push(post);
        }
    }
    report.accepted = kept.len();
    (build_index(kept, by_id, options), report)
}

fn build_index(posts: Vec<Post>, by_id: HashMap<String, usize>, options: CorpusOptions) -> CorpusIndex {
    let mut index = CorpusIndex {
        posts,
        by_id,
        posts_by_day: BTreeMap::new(),
        phrase_counts: HashMap::new(),
        options,
    };
    for (i, post) in index.posts.iter().enumerate() {
        index.posts_by_day.entry(post.day()).or_default().push(i);
    }
    for ids in index.posts_by_day.values_mut() {
        ids.sort_by(|&a, &b| {
            let pa = &index.posts[a];
            let pb = &index.posts[b];
            (pa.timestamp, &pa.id).cmp(&(pb.timestamp, &pb.id))
        });
    }
    let fold_case = index.options.fold_case;
    let mut counts: HashMap<String, BTreeMap<NaiveDate, u32>> = HashMap::new();
    for post in &index.posts {
        if !index.post_counts_for(post) {
            continue;
        }
        let folded: Vec<String> = post
            .tokens
            .iter()
            .map(|t| if fold_case { t.to_lowercase() } else { t.clone() })
            .collect();
        let mut seen: HashSet<String> = HashSet::new();
        for n in 1..=MAX_INDEXED_NGRAM.min(folded.len()) {
            for window in folded.windows(n) {
                let key = window.join(" ");
                // one post contributes at most 1 per (phrase, day)
                if seen.insert(key.clone()) {
                    *counts.entry(key).or_default().entry(post.day()).or_insert(0) += 1;
                }
            }
        }
    }
    index.phrase_counts = counts;
    index
}

/// Daily mention counts of `phrase` restricted to `range` (inclusive bounds).
pub fn daily_counts(
    index: &CorpusIndex,
    phrase: &[String],
    range: (NaiveDate, NaiveDate),
) -> Result<DailySeries> {
    if phrase.is_empty() {
        return Err(Error::InvalidArgument("phrase must be non-empty".into()));
    }
    let (lo, hi) = range;
    if phrase.len() <= MAX_INDEXED_NGRAM {
        let key = index.phrase_key(phrase);
        let entries = match index.phrase_counts.get(&key) {
            None => Vec::new(),
            Some(days) => days
                .range(lo..=hi)
                .map(|(&d, &c)| (d, c))
                .collect(),
        };
        return Ok(DailySeries { entries });
    }
    // long phrase: linear scan
    let mut out: BTreeMap<NaiveDate, u32> = BTreeMap::new();
    for (&day, ids) in index.posts_by_day.range(lo..=hi) {
        for &i in ids {
            let post = &index.posts[i];
            if index.post_counts_for(post) && index.contains_phrase(&post.tokens, phrase) {
                *out.entry(day).or_insert(0) += 1;
            }
        }
    }
    Ok(DailySeries {
        entries: out.into_iter().collect(),
    })
}

/// Convenience range covering the whole index.
pub fn full_range(index: &CorpusIndex) -> (NaiveDate, NaiveDate) {
    let lo = index
        .days()
        .next()
        .unwrap_or_else(|| NaiveDate::from_ymd_opt(1970, 1, 1).unwrap());
    let hi = index
        .days()
        .last()
        .unwrap_or_else(|| NaiveDate::from_ymd_opt(1970, 1, 1).unwrap());
    (lo, hi)
}

/// Earliest day of `year` achieving the year's maximum count; `None` when
/// the series has no entry in the year.
pub fn peak_day(series: &DailySeries, year: i32) -> Option<NaiveDate> {
    let mut best: Option<(NaiveDate, u32)> = None;
    for &(day, count) in &series.entries {
        if day.year() != year {
            continue;
        }
        match best {
            None => best = Some((day, count)),
            Some((_, best_count)) if count > best_count => best = Some((day, count)),
            _ => {}
        }
    }
    best.map(|(d, _)| d)
}

/// Year of the phrase's earliest observed day, or `None` if never seen.
pub fn first_appearance_year(index: &CorpusIndex, phrase: &[String]) -> Result<Option<i32>> {
    if phrase.is_empty() {
        return Err(Error::InvalidArgument("phrase must be non-empty".into()));
    }
    let series = daily_counts(index, phrase, full_range(index))?;
    Ok(series.entries.first().map(|&(d, _)| d.year()))
}

/// Posts of `day_set` containing `phrase`, in deterministic candidate order.
pub fn matching_posts<'a>(
    index: &'a CorpusIndex,
    phrase: &[String],
    day_set: &[NaiveDate],
) -> Vec<&'a Post> {
    let mut days: Vec<NaiveDate> = day_set.to_vec();
    days.sort_unstable();
    days.dedup();
    let mut out = Vec::new();
    for day in days {
        for post in index.posts_of_day(day) {
            if index.post_counts_for(post) && index.contains_phrase(&post.tokens, phrase) {
                out.push(post);
            }
        }
    }
    out
}

/// Uniform seeded sample (without replacement) of up to `k` posts from
/// `day_set` containing `phrase`. Fewer than `k` matches returns them all.
pub fn sample_posts<'a>(
    index: &'a CorpusIndex,
    phrase: &[String],
    day_set: &[NaiveDate],
    k: usize,
    seed: u64,
) -> Vec<&'a Post> {
    assert!(k >= 1, "k must be >= 1");
    let candidates = matching_posts(index, phrase, day_set);
    let mut rng = Rng::new(seed);
    rng.sample(&candidates, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn post_line(id: &str, ts: &str, text: &str) -> String {
        serde_json::json!({"id": id, "ts": ts, "text": text}).to_string()
    }

    fn small_index(lines: &[String]) -> (CorpusIndex, IngestReport) {
        let joined = lines.join("\n");
        ingest_posts(Cursor::new(joined), CorpusOptions::default()).unwrap()
    }

    #[test]
    fn tokenize_strips_urls_mentions_hashtags() {
        assert_eq!(
            tokenize("RT @u: Google+ is shutting down https://t.co/x"),
            vec!["RT", "Google+", "is", "shutting", "down"]
        );
    }

    #[test]
    fn tokenize_empty() {
        assert_eq!(tokenize(""), Vec::<String>::new());
    }

    #[test]
    fn tokenize_plain_sentence() {
        assert_eq!(
            tokenize("Pristin to disband after 2 years"),
            vec!["Pristin", "to", "disband", "after", "2", "years"]
        );
    }

    #[test]
    fn tokenize_edge_punctuation() {
        assert_eq!(tokenize("(hello!) \"world\""), vec!["hello", "world"]);
        assert_eq!(tokenize("AT&T rocks"), vec!["AT&T", "rocks"]);
        assert_eq!(tokenize("--- ,,, !!"), Vec::<String>::new());
        // bare t.co link without scheme is also removed
        assert_eq!(tokenize("see t.co/abc now"), vec!["see", "now"]);
    }

    #[test]
    fn ingest_counts_malformed_and_duplicates() {
        let lines = vec![
            post_line("a", "2019-01-01T10:00:00Z", "Vine is closing"),
            post_line("b", "2019-01-01T11:00:00Z", "Vine was fun"),
            "{not json".to_string(),
            post_line("a", "2019-01-01T12:00:00Z", "duplicate id"),
            post_line("c", "2019-01-01T13:00:00Z", "I will miss Vine"),
        ];
        let (index, report) = small_index(&lines);
        assert_eq!(
            report,
            IngestReport {
                accepted: 3,
                malformed: 1,
                duplicates: 1
            }
        );
        let series = daily_counts(&index, &["Vine".into()], full_range(&index)).unwrap();
        assert_eq!(
            series.entries,
            vec![(NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(), 3)]
        );
    }

    #[test]
    fn ingest_empty_stream() {
        let (index, report) = small_index(&[]);
        assert!(index.is_empty());
        assert_eq!(report, IngestReport::default());
    }

    #[test]
    fn parallel_ingest_matches_sequential() {
        let mut lines = Vec::new();
        for i in 0..50 {
            lines.push(post_line(
                &format!("p{i}"),
                &format!("2019-01-{:02}T10:00:00Z", (i % 28) + 1),
                &format!("post number {i} about Vine"),
            ));
        }
        lines.push("garbage".to_string());
        lines.push(post_line("p0", "2019-02-01T00:00:00Z", "dup"));
        let (seq, seq_report) = small_index(&lines);
        let (par, par_report) = ingest_posts_parallel(&lines, CorpusOptions::default());
        assert_eq!(seq_report, par_report);
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.posts().iter().zip(par.posts()) {
            assert_eq!(a, b);
        }
        assert_eq!(
            daily_counts(&seq, &["Vine".into()], full_range(&seq)).unwrap(),
            daily_counts(&par, &["Vine".into()], full_range(&par)).unwrap()
        );
    }

    #[test]
    fn phrase_counts_once_per_post() {
        let lines = vec![post_line(
            "a",
            "2019-03-01T00:00:00Z",
            "spam spam spam spam",
        )];
        let (index, _) = small_index(&lines);
        let series = daily_counts(&index, &["spam".into()], full_range(&index)).unwrap();
        assert_eq!(series.entries[0].1, 1);
    }

    #[test]
    fn multi_token_phrase_is_contiguous() {
        let lines = vec![post_line("a", "2019-01-01T00:00:00Z", "Air Race Red Bull")];
        let (index, _) = small_index(&lines);
        let phrase: Vec<String> = ["Red", "Bull", "Air", "Race"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let series = daily_counts(&index, &phrase, full_range(&index)).unwrap();
        assert!(series.is_empty());
    }

    #[test]
    fn daily_counts_rejects_empty_phrase() {
        let (index, _) = small_index(&[]);
        assert!(daily_counts(&index, &[], full_range(&index)).is_err());
    }

    #[test]
    fn peak_day_earliest_argmax() {
        let d = |day| NaiveDate::from_ymd_opt(2019, 3, day).unwrap();
        let series = DailySeries {
            entries: vec![(d(1), 2), (d(2), 7), (d(3), 7)],
        };
        assert_eq!(peak_day(&series, 2019), Some(d(2)));
        assert_eq!(peak_day(&series, 2018), None);
    }

    #[test]
    fn first_appearance_year_boundaries() {
        let lines = vec![
            post_line("a", "2015-06-01T00:00:00Z", "Orkut lives"),
            post_line("b", "2019-12-31T23:59:59Z", "Marumi opens"),
        ];
        let (index, _) = small_index(&lines);
        assert_eq!(
            first_appearance_year(&index, &["Orkut".into()]).unwrap(),
            Some(2015)
        );
        assert_eq!(
            first_appearance_year(&index, &["Marumi".into()]).unwrap(),
            Some(2019)
        );
        assert_eq!(
            first_appearance_year(&index, &["Nothing".into()]).unwrap(),
            None
        );
    }

    #[test]
    fn sample_posts_deterministic_and_bounded() {
        let mut lines = Vec::new();
        for i in 0..10 {
            lines.push(post_line(
                &format!("p{i}"),
                "2019-05-05T10:00:00Z",
                "Pristin to disband",
            ));
        }
        let (index, _) = small_index(&lines);
        let day = vec![NaiveDate::from_ymd_opt(2019, 5, 5).unwrap()];
        let all = sample_posts(&index, &["Pristin".into()], &day, 100, 1);
        assert_eq!(all.len(), 10);
        let a: Vec<&str> = sample_posts(&index, &["Pristin".into()], &day, 2, 7)
            .iter()
            .map(|p| p.id.as_str())
            .collect();
        let b: Vec<&str> = sample_posts(&index, &["Pristin".into()], &day, 2, 7)
            .iter()
            .map(|p| p.id.as_str())
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_posts_chi_square_uniformity() {
        let mut lines = Vec::new();
        for i in 0..10 {
            lines.push(post_line(
                &format!("p{i}"),
                "2019-05-05T10:00:00Z",
                "Pristin to disband",
            ));
        }
        let (index, _) = small_index(&lines);
        let day = vec![NaiveDate::from_ymd_opt(2019, 5, 5).unwrap()];
        let mut counts = HashMap::new();
        let draws = 10_000usize;
        for seed in 0..draws {
            for post in sample_posts(&index, &["Pristin".into()], &day, 2, seed as u64) {
                *counts.entry(post.id.clone()).or_insert(0usize) += 1;
            }
        }
        let expected = (draws * 2) as f64 / 10.0;
        let chi2: f64 = (0..10)
            .map(|i| {
                let observed = *counts.get(&format!("p{i}")).unwrap_or(&0) as f64;
                (observed - expected).powi(2) / expected
            })
            .sum();
        // chi-square critical value, df=9, p=0.01
        assert!(chi2 < 21.666, "chi2 = {chi2}");
    }

    #[test]
    fn fold_case_matching() {
        let lines = vec![post_line("a", "2019-01-01T00:00:00Z", "goodbye VINE forever")];
        let (index, _) = small_index(&lines);
        let series = daily_counts(&index, &["Vine".into()], full_range(&index)).unwrap();
        assert_eq!(series.total(), 1);

        let (strict, _) = ingest_posts(
            Cursor::new(lines.join("\n")),
            CorpusOptions {
                fold_case: false,
                exclude_rt: false,
            },
        )
        .unwrap();
        let series = daily_counts(&strict, &["Vine".into()], full_range(&strict)).unwrap();
        assert!(series.is_empty());
    }

    #[test]
    fn exclude_rt_drops_retweets_from_counts() {
        let lines = vec![
            serde_json::json!({"id": "a", "ts": "2019-01-01T00:00:00Z", "text": "Vine ends", "rt": true})
                .to_string(),
            post_line("b", "2019-01-01T01:00:00Z", "Vine ends"),
        ];
        let (index, _) = ingest_posts(
            Cursor::new(lines.join("\n")),
            CorpusOptions {
                fold_case: true,
                exclude_rt: true,
            },
        )
        .unwrap();
        let series = daily_counts(&index, &["Vine".into()], full_range(&index)).unwrap();
        assert_eq!(series.total(), 1);
    }

    #[test]
    fn ngram_index_matches_bruteforce_rescan() {
        // invariant check: every contiguous n-gram of every post is counted
        // on the post's day
        let mut lines = Vec::new();
        let words = ["alpha", "beta", "gamma", "delta", "epsilon"];
        let mut rng = Rng::new(99);
        for i in 0..200 {
            let n = 1 + rng.gen_range(8);
            let text: Vec<&str> = (0..n).map(|_| words[rng.gen_range(words.len())]).collect();
            lines.push(post_line(
                &format!("p{i}"),
                &format!("2019-01-{:02}T00:00:00Z", 1 + rng.gen_range(28)),
                &text.join(" "),
            ));
        }
        let (index, _) = small_index(&lines);
        for post in index.posts() {
            let day = post.day();
            for n in 1..=MAX_INDEXED_NGRAM.min(post.tokens.len()) {
                for gram in post.tokens.windows(n) {
                    let series =
                        daily_counts(&index, gram, (day, day)).unwrap();
                    assert_eq!(series.entries.len(), 1, "gram {gram:?} missing");
                    // brute-force count over the whole corpus for that day
                    let brute = index
                        .posts()
                        .iter()
                        .filter(|p| p.day() == day && index.contains_phrase(&p.tokens, gram))
                        .count() as u32;
                    assert_eq!(series.entries[0].1, brute);
                }
            }
        }
    }
}
