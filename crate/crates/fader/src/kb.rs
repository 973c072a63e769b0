//! Knowledge-base side of supervision: the list of ended entities, the
//! category-to-type mapping, and the noise filters applied before context
//! collection.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusIndex};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Coarse entity types used for tagging and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoarseType {
    Person,
    CreativeWork,
    Location,
    Group,
    Event,
    ServiceProduct,
    Unmapped,
}

impl CoarseType {
    pub const ALL: [CoarseType; 7] = [
        CoarseType::Person,
        CoarseType::CreativeWork,
        CoarseType::Location,
        CoarseType::Group,
        CoarseType::Event,
        CoarseType::ServiceProduct,
        CoarseType::Unmapped,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CoarseType::Person => "PERSON",
            CoarseType::CreativeWork => "CREATIVE_WORK",
            CoarseType::Location => "LOCATION",
            CoarseType::Group => "GROUP",
            CoarseType::Event => "EVENT",
            CoarseType::ServiceProduct => "SERVICE_PRODUCT",
            CoarseType::Unmapped => "UNMAPPED",
        }
    }
}

impl fmt::Display for CoarseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoarseType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PERSON" => Ok(CoarseType::Person),
            "CREATIVE_WORK" => Ok(CoarseType::CreativeWork),
            "LOCATION" => Ok(CoarseType::Location),
            "GROUP" => Ok(CoarseType::Group),
            "EVENT" => Ok(CoarseType::Event),
            "SERVICE_PRODUCT" => Ok(CoarseType::ServiceProduct),
            "UNMAPPED" => Ok(CoarseType::Unmapped),
            other => Err(Error::InvalidArgument(format!(
                "unknown coarse type `{other}`"
            ))),
        }
    }
}

/// One KB entity known to have ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub canonical_name: String,
    /// Distinct aliases after normalization; always includes the canonical
    /// name.
    pub aliases: Vec<String>,
    pub disappearance_year: i32,
    pub categories: Vec<String>,
    pub coarse_type: CoarseType,
    pub ambiguous: bool,
}

fn normalize_alias(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl EntityRecord {
    pub fn new(
        canonical_name: &str,
        aliases: Vec<String>,
        disappearance_year: i32,
        categories: Vec<String>,
        mapping: &TypeMapping,
        ambiguous: bool,
    ) -> Self {
        let canonical = normalize_alias(canonical_name);
        let mut all = vec![canonical.clone()];
        for a in aliases {
            let a = normalize_alias(&a);
            if !a.is_empty() && !all.contains(&a) {
                all.push(a);
            }
        }
        let coarse_type = map_category_to_type(&categories, mapping);
        EntityRecord {
            canonical_name: canonical,
            aliases: all,
            disappearance_year,
            categories,
            coarse_type,
            ambiguous,
        }
    }
}

/// Ordered category-to-type rules; first match wins. A pattern is either a
/// literal prefix or, when it contains `*`, an anchored glob.
#[derive(Debug, Clone)]
pub struct TypeMapping {
    pub rules: Vec<(String, CoarseType)>,
}

fn glob_match(pattern: &str, text: &str) -> bool {
    // anchored glob with `*` wildcards only
    let parts: Vec<&str> = pattern.split('*').collect();
    let first = parts[0];
    let last = *parts.last().unwrap();
    if !text.starts_with(first) {
        return false;
    }
    let mut pos = first.len();
    if parts.len() == 1 {
        return pos == text.len(); // no wildcard at all: exact match
    }
    for part in &parts[1..parts.len() - 1] {
        if part.is_empty() {
            continue;
        }
        match text[pos..].find(part) {
            Some(found) => pos += found + part.len(),
            None => return false,
        }
    }
    // trailing literal must fit after everything matched so far
    last.is_empty() || (text.len() >= pos + last.len() && text.ends_with(last))
}

impl TypeMapping {
    pub fn matches(pattern: &str, category: &str) -> bool {
        if pattern.contains('*') {
            glob_match(pattern, category)
        } else {
            category.starts_with(pattern)
        }
    }

    /// Built-in English mapping covering the usual ending-entity categories.
    pub fn default_english() -> Self {
        let rules = [
            ("Deaths", CoarseType::Person),
            ("*_deaths", CoarseType::Person),
            ("*_television_series", CoarseType::CreativeWork),
            ("Web_series", CoarseType::CreativeWork),
            ("Magazines_disestablished*", CoarseType::ServiceProduct),
            ("Buildings_and_structures*", CoarseType::Location),
            ("Educational_institutions*", CoarseType::Location),
            ("Restaurants", CoarseType::Location),
            ("Musical_groups*", CoarseType::Group),
            ("Retail_companies*", CoarseType::Group),
            ("Airlines*", CoarseType::Group),
            ("*_companies", CoarseType::Group),
            ("Sporting_events", CoarseType::Event),
            ("Sports_leagues", CoarseType::Event),
            ("Events", CoarseType::Event),
            ("Magazines", CoarseType::ServiceProduct),
            ("Internet_properties", CoarseType::ServiceProduct),
            ("Products_and_services", CoarseType::ServiceProduct),
        ];
        TypeMapping {
            rules: rules
                .iter()
                .map(|&(p, t)| (p.to_string(), t))
                .collect(),
        }
    }

    /// Loads `pattern<TAB>TYPE` lines; `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut rules = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            let pattern = parts.next().unwrap_or("").trim();
            let ty = parts.next().map(str::trim).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: "expected `pattern<TAB>TYPE`".into(),
            })?;
            let coarse = ty.parse::<CoarseType>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("unknown type `{ty}`"),
            })?;
            rules.push((pattern.to_string(), coarse));
        }
        Ok(TypeMapping { rules })
    }
}

/// First category (in listed order) with a matching rule decides the type;
/// no match means `Unmapped`.
pub fn map_category_to_type(categories: &[String], mapping: &TypeMapping) -> CoarseType {
    for category in categories {
        for (pattern, ty) in &mapping.rules {
            if TypeMapping::matches(pattern, category) {
                return *ty;
            }
        }
    }
    CoarseType::Unmapped
}

/// Row-level problems found while loading an entity TSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

/// Loads the ended-entity TSV. Malformed rows are skipped with a warning
/// carrying the row number.
///
/// Columns: `canonical_name<TAB>alias1|alias2<TAB>year<TAB>cat1|cat2<TAB>ambiguous(0/1)`.
/// An optional header is detected by a literal first cell `canonical_name`.
pub fn load_entity_list(
    path: &Path,
    mapping: &TypeMapping,
) -> Result<(Vec<EntityRecord>, Vec<LoadWarning>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if lineno == 0 && cells.first() == Some(&"canonical_name") {
            continue;
        }
        if cells.len() != 5 {
            warnings.push(LoadWarning {
                line: lineno + 1,
                message: format!("expected 5 columns, got {}", cells.len()),
            });
            continue;
        }
        let year = match cells[2].trim().parse::<i32>() {
            Ok(y) if (1000..3000).contains(&y) => y,
            _ => {
                warnings.push(LoadWarning {
                    line: lineno + 1,
                    message: format!("invalid year `{}`", cells[2]),
                });
                continue;
            }
        };
        let ambiguous = match cells[4].trim() {
            "0" => false,
            "1" => true,
            other => {
                warnings.push(LoadWarning {
                    line: lineno + 1,
                    message: format!("invalid ambiguous flag `{other}`"),
                });
                continue;
            }
        };
        let name = cells[0].trim();
        if name.is_empty() {
            warnings.push(LoadWarning {
                line: lineno + 1,
                message: "empty canonical name".into(),
            });
            continue;
        }
        let aliases: Vec<String> = cells[1]
            .split('|')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        let categories: Vec<String> = cells[3]
            .split('|')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        records.push(EntityRecord::new(
            name, aliases, year, categories, mapping, ambiguous,
        ));
    }
    Ok((records, warnings))
}

/// Serializes records back to the TSV format (used by pipeline stages).
pub fn write_entity_list(records: &[EntityRecord]) -> String {
    let mut out = String::new();
    out.push_str("canonical_name\taliases\tdisappearance_year\tcategories\tambiguous\n");
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.canonical_name,
            r.aliases.join("|"),
            r.disappearance_year,
            r.categories.join("|"),
            if r.ambiguous { 1 } else { 0 }
        ));
    }
    out
}

/// Applies the noise filters and per-type undersampling caps.
///
/// Removes ambiguous entities, removes entities whose first Twitter
/// appearance falls in their disappearance year (likely emerging, not
/// disappearing), then keeps a seeded uniform sample of at most `cap`
/// records per capped type. Records pass through unchanged and keep their
/// input order.
pub fn filter_entities(
    records: &[EntityRecord],
    index: &CorpusIndex,
    caps: &HashMap<CoarseType, usize>,
    seed: u64,
) -> Result<Vec<EntityRecord>> {
    let mut kept: Vec<&EntityRecord> = Vec::new();
    for record in records {
        if record.ambiguous {
            continue;
        }
        let phrase = corpus::tokenize(&record.canonical_name);
        if phrase.is_empty() {
            continue;
        }
        let first = corpus::first_appearance_year(index, &phrase)?;
        if first == Some(record.disappearance_year) {
            continue;
        }
        kept.push(record);
    }
    // per-type undersampling: sample positions so input order survives
    let mut selected: Vec<bool> = vec![true; kept.len()];
    for (&ty, &cap) in caps {
        let positions: Vec<usize> = kept
            .iter()
            .enumerate()
            .filter(|(_, r)| r.coarse_type == ty)
            .map(|(i, _)| i)
            .collect();
        if positions.len() > cap {
            let mut rng = Rng::new(Rng::derive(seed, ty as u64));
            let keep: Vec<usize> = rng.sample(&positions, cap);
            let keep_set: std::collections::HashSet<usize> = keep.into_iter().collect();
            for &pos in &positions {
                if !keep_set.contains(&pos) {
                    selected[pos] = false;
                }
            }
        }
    }
    Ok(kept
        .into_iter()
        .enumerate()
        .filter(|(i, _)| selected[*i])
        .map(|(_, r)| r.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{index_posts, CorpusOptions, Post};
    use chrono::{TimeZone, Utc};

    fn mapping() -> TypeMapping {
        TypeMapping::default_english()
    }

    fn mk_post(id: &str, y: i32, m: u32, d: u32, text: &str) -> Post {
        let ts = Utc.with_ymd_and_hms(y, m, d, 12, 0, 0).unwrap();
        Post {
            id: id.to_string(),
            timestamp: ts,
            text: text.to_string(),
            tokens: corpus::tokenize(text),
            is_retweet: false,
            lang: "en".to_string(),
        }
    }

    #[test]
    fn daft_punk_maps_to_group() {
        let r = EntityRecord::new(
            "Daft Punk",
            vec!["Daft Punk".into()],
            2021,
            vec!["Musical_groups".into()],
            &mapping(),
            false,
        );
        assert_eq!(r.coarse_type, CoarseType::Group);
    }

    #[test]
    fn category_table_rows() {
        let m = mapping();
        assert_eq!(
            map_category_to_type(&["Deaths".into()], &m),
            CoarseType::Person
        );
        assert_eq!(
            map_category_to_type(&["American_television_series".into()], &m),
            CoarseType::CreativeWork
        );
        assert_eq!(
            map_category_to_type(&["Restaurants".into()], &m),
            CoarseType::Location
        );
        assert_eq!(
            map_category_to_type(&["Asteroids".into()], &m),
            CoarseType::Unmapped
        );
        assert_eq!(map_category_to_type(&[], &m), CoarseType::Unmapped);
    }

    #[test]
    fn first_listed_category_decides() {
        let m = mapping();
        assert_eq!(
            map_category_to_type(&["Unknown_thing".into(), "Deaths".into()], &m),
            CoarseType::Person
        );
        assert_eq!(
            map_category_to_type(&["Restaurants".into(), "Deaths".into()], &m),
            CoarseType::Location
        );
    }

    #[test]
    fn glob_patterns_anchor() {
        assert!(TypeMapping::matches("*_television_series", "American_television_series"));
        assert!(!TypeMapping::matches("*_television_series", "television_series_fan"));
        assert!(TypeMapping::matches("Deaths", "Deaths_in_2019"));
        assert!(!TypeMapping::matches("Deaths", "Celebrity_Deaths"));
        assert!(TypeMapping::matches("*deaths*", "Celebrity_deaths_2019"));
    }

    #[test]
    fn aliases_deduped_and_normalized() {
        let r = EntityRecord::new(
            "My  Local",
            vec!["My Local".into(), " My Local ".into(), "MyLocal".into()],
            2019,
            vec![],
            &mapping(),
            false,
        );
        assert_eq!(r.canonical_name, "My Local");
        assert_eq!(r.aliases, vec!["My Local".to_string(), "MyLocal".to_string()]);
    }

    #[test]
    fn load_entity_list_skips_bad_rows() {
        let dir = std::env::temp_dir().join("fader-kb-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("entities.tsv");
        std::fs::write(
            &path,
            "canonical_name\taliases\tdisappearance_year\tcategories\tambiguous\n\
             Daft Punk\tDaft Punk\t2021\tMusical_groups\t0\n\
             Bad Row\tonly\tthree\n\
             No Year\tNo Year\tnope\tDeaths\t0\n\
             Dave Laing\tDave Laing\t2019\tDeaths\t0\n",
        )
        .unwrap();
        let (records, warnings) = load_entity_list(&path, &mapping()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].coarse_type, CoarseType::Group);
        assert_eq!(records[1].coarse_type, CoarseType::Person);
        assert_eq!(warnings.len(), 2);
        assert_eq!(warnings[0].line, 3);
        assert_eq!(warnings[1].line, 4);
    }

    fn sample_records(n: usize, ty: CoarseType, year: i32) -> Vec<EntityRecord> {
        (0..n)
            .map(|i| EntityRecord {
                canonical_name: format!("Entity{i}"),
                aliases: vec![format!("Entity{i}")],
                disappearance_year: year,
                categories: vec![],
                coarse_type: ty,
                ambiguous: false,
            })
            .collect()
    }

    #[test]
    fn filter_removes_ambiguous_and_same_year_entities() {
        let posts = vec![
            mk_post("a", 2019, 2, 1, "Newcomer arrives"),
            mk_post("b", 2015, 3, 1, "Oldtimer is here"),
            mk_post("c", 2019, 6, 1, "Oldtimer leaving"),
        ];
        let (index, _) = index_posts(posts, CorpusOptions::default());
        let m = mapping();
        let records = vec![
            EntityRecord::new("Newcomer", vec![], 2019, vec!["Deaths".into()], &m, false),
            EntityRecord::new("Oldtimer", vec![], 2019, vec!["Deaths".into()], &m, false),
            EntityRecord::new("Ghosty", vec![], 2019, vec!["Deaths".into()], &m, true),
        ];
        let kept = filter_entities(&records, &index, &HashMap::new(), 1).unwrap();
        let names: Vec<&str> = kept.iter().map(|r| r.canonical_name.as_str()).collect();
        // Newcomer first appeared in its disappearance year; Ghosty is ambiguous
        assert_eq!(names, vec!["Oldtimer"]);
    }

    #[test]
    fn filter_caps_types_deterministically() {
        let (index, _) = index_posts(vec![], CorpusOptions::default());
        let records = sample_records(1500, CoarseType::Person, 2019);
        let caps = HashMap::from([(CoarseType::Person, 1000usize)]);
        let a = filter_entities(&records, &index, &caps, 42).unwrap();
        let b = filter_entities(&records, &index, &caps, 42).unwrap();
        assert_eq!(a.len(), 1000);
        assert_eq!(a, b);
        let c = filter_entities(&records, &index, &caps, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn filter_is_idempotent_and_subset() {
        let (index, _) = index_posts(vec![], CorpusOptions::default());
        let mut records = sample_records(50, CoarseType::Group, 2018);
        records.extend(sample_records(30, CoarseType::Event, 2018));
        let caps = HashMap::from([(CoarseType::Group, 20usize)]);
        let once = filter_entities(&records, &index, &caps, 7).unwrap();
        let twice = filter_entities(&once, &index, &caps, 7).unwrap();
        assert_eq!(once, twice);
        for r in &once {
            assert!(records.contains(r));
        }
    }
}
