//! Scoring: span-level CoNLL metrics, relative recall with lead-time against
//! KB update dates, and the Fleiss-kappa agreement statistic.

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kb::{CoarseType, EntityRecord};
use crate::supervision::{extract_spans, LabeledSentence, Tag};
use crate::tagger::DetectedSpan;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            0.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    }
}

/// Span-level precision/recall/F1, micro-averaged and per type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: Counts,
    pub per_type: BTreeMap<String, Counts>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    fn from_counts(overall: Counts, per_type: BTreeMap<String, Counts>) -> Self {
        EvalReport {
            precision: overall.precision(),
            recall: overall.recall(),
            f1: overall.f1(),
            overall,
            per_type,
        }
    }
}

/// Exact-match span scoring (CoNLL-2003 convention): a predicted span is a
/// true positive iff gold contains the same (start, end, type) in the same
/// sentence.
pub fn conll_score(gold: &[LabeledSentence], pred: &[Vec<Tag>]) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::InvalidArgument(format!(
            "gold has {} sentences, predictions {}",
            gold.len(),
            pred.len()
        )));
    }
    let mut overall = Counts::default();
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        if g.tokens.len() != p.len() {
            return Err(Error::InvalidArgument(format!(
                "sentence {}: {} tokens but {} predicted tags",
                g.post_id,
                g.tokens.len(),
                p.len()
            )));
        }
        let gold_spans: HashSet<_> = extract_spans(&g.tags).into_iter().collect();
        let pred_spans: HashSet<_> = extract_spans(p).into_iter().collect();
        for span in &pred_spans {
            let entry = per_type.entry(span.ty.to_string()).or_default();
            if gold_spans.contains(span) {
                overall.tp += 1;
                entry.tp += 1;
            } else {
                overall.fp += 1;
                entry.fp += 1;
            }
        }
        for span in &gold_spans {
            if !pred_spans.contains(span) {
                overall.fn_ += 1;
                per_type.entry(span.ty.to_string()).or_default().fn_ += 1;
            }
        }
    }
    Ok(EvalReport::from_counts(overall, per_type))
}

/// One discovered target entity with its detection and KB update days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub entity_id: String,
    pub first_detection: NaiveDate,
    pub update_day: NaiveDate,
}

/// Signed whole days between KB update and first detection; positive means
/// the system was earlier than the KB.
pub fn lead_days(event: &DetectionEvent) -> i64 {
    (event.update_day - event.first_detection).num_days()
}

/// Mean and median of a lead-day list.
pub fn aggregate_leads(leads: &[i64]) -> Option<(f64, f64)> {
    if leads.is_empty() {
        return None;
    }
    let mean = leads.iter().sum::<i64>() as f64 / leads.len() as f64;
    let mut sorted = leads.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    };
    Some((mean, median))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmediacyRow {
    pub label: String,
    pub targets: usize,
    pub found: usize,
    pub found_ratio: f64,
    pub mean_lead: Option<f64>,
    pub median_lead: Option<f64>,
}

/// Per-type relative recall and lead statistics, with TOTAL and
/// TOTAL-without-PERSON rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmediacyReport {
    pub rows: Vec<ImmediacyRow>,
}

#[derive(Debug, Clone, Copy)]
pub struct RecallOptions {
    pub fold_case: bool,
    /// Require the predicted type to match the KB type.
    pub match_type: bool,
}

impl Default for RecallOptions {
    fn default() -> Self {
        RecallOptions {
            fold_case: true,
            match_type: false,
        }
    }
}

fn norm_surface(s: &str, fold: bool) -> String {
    let toks = crate::corpus::tokenize(s);
    let joined = toks.join(" ");
    if fold {
        joined.to_lowercase()
    } else {
        joined
    }
}

/// How many of the year's target entities the detections discover, how early
/// relative to the KB update day, aggregated per coarse type.
///
/// A target counts as found when some detection's surface string equals one
/// of its aliases; lead statistics cover found targets with a known update
/// day.
pub fn relative_recall(
    detections: &[DetectedSpan],
    targets: &[EntityRecord],
    year: i32,
    update_days: &HashMap<String, NaiveDate>,
    options: RecallOptions,
) -> (ImmediacyReport, Vec<DetectionEvent>) {
    // surface -> earliest detection day (optionally per type)
    let mut first_seen: HashMap<(String, Option<CoarseType>), NaiveDate> = HashMap::new();
    for det in detections {
        if det.date.year() != year {
            continue;
        }
        let key_ty = if options.match_type {
            Some(det.ty)
        } else {
            None
        };
        let key = (norm_surface(&det.surface, options.fold_case), key_ty);
        first_seen
            .entry(key)
            .and_modify(|d| {
                if det.date < *d {
                    *d = det.date;
                }
            })
            .or_insert(det.date);
    }

    struct Bucket {
        targets: usize,
        found: usize,
        leads: Vec<i64>,
    }
    let mut buckets: BTreeMap<CoarseType, Bucket> = BTreeMap::new();
    let mut events = Vec::new();
    for target in targets {
        let bucket = buckets.entry(target.coarse_type).or_insert(Bucket {
            targets: 0,
            found: 0,
            leads: Vec::new(),
        });
        bucket.targets += 1;
        let ty_key = if options.match_type {
            Some(target.coarse_type)
        } else {
            None
        };
        let mut first: Option<NaiveDate> = None;
        for alias in &target.aliases {
            let key = (norm_surface(alias, options.fold_case), ty_key);
            if let Some(&d) = first_seen.get(&key) {
                first = Some(match first {
                    Some(cur) if cur <= d => cur,
                    _ => d,
                });
            }
        }
        if let Some(first_detection) = first {
            bucket.found += 1;
            if let Some(&update_day) = update_days.get(&target.canonical_name) {
                let event = DetectionEvent {
                    entity_id: target.canonical_name.clone(),
                    first_detection,
                    update_day,
                };
                bucket.leads.push(lead_days(&event));
                events.push(event);
            }
        }
    }

    let mut rows = Vec::new();
    let mut total = Bucket {
        targets: 0,
        found: 0,
        leads: Vec::new(),
    };
    let mut total_wo_person = Bucket {
        targets: 0,
        found: 0,
        leads: Vec::new(),
    };
    for ty in CoarseType::ALL {
        let Some(bucket) = buckets.get(&ty) else {
            continue;
        };
        let agg = aggregate_leads(&bucket.leads);
        rows.push(ImmediacyRow {
            label: ty.to_string(),
            targets: bucket.targets,
            found: bucket.found,
            found_ratio: ratio(bucket.found, bucket.targets),
            mean_lead: agg.map(|a| a.0),
            median_lead: agg.map(|a| a.1),
        });
        total.targets += bucket.targets;
        total.found += bucket.found;
        total.leads.extend_from_slice(&bucket.leads);
        if ty != CoarseType::Person {
            total_wo_person.targets += bucket.targets;
            total_wo_person.found += bucket.found;
            total_wo_person.leads.extend_from_slice(&bucket.leads);
        }
    }
    for (label, bucket) in [("TOTAL", &total), ("TOTAL w/o PERSON", &total_wo_person)] {
        let agg = aggregate_leads(&bucket.leads);
        rows.push(ImmediacyRow {
            label: label.to_string(),
            targets: bucket.targets,
            found: bucket.found,
            found_ratio: ratio(bucket.found, bucket.targets),
            mean_lead: agg.map(|a| a.0),
            median_lead: agg.map(|a| a.1),
        });
    }
    (ImmediacyReport { rows }, events)
}

fn ratio(num: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        num as f64 / denom as f64
    }
}

/// Fleiss's kappa over an item x category count matrix where every row sums
/// to `raters_per_item`.
pub fn fleiss_kappa(ratings: &[Vec<u32>], raters_per_item: u32) -> Result<f64> {
    let n = raters_per_item;
    if n < 2 {
        return Err(Error::InvalidArgument("need at least 2 raters".into()));
    }
    if ratings.is_empty() {
        return Err(Error::InvalidArgument("need at least 1 item".into()));
    }
    let categories = ratings[0].len();
    for (i, row) in ratings.iter().enumerate() {
        if row.len() != categories {
            return Err(Error::InvalidArgument(format!(
                "row {i} has {} categories, expected {categories}",
                row.len()
            )));
        }
        let sum: u32 = row.iter().sum();
        if sum != n {
            return Err(Error::InvalidArgument(format!(
                "row {i} sums to {sum}, expected {n}"
            )));
        }
    }
    let items = ratings.len() as f64;
    let nf = n as f64;
    // per-item observed agreement
    let p_bar: f64 = ratings
        .iter()
        .map(|row| {
            let sq: f64 = row.iter().map(|&c| (c as f64) * (c as f64)).sum();
            (sq - nf) / (nf * (nf - 1.0))
        })
        .sum::<f64>()
        / items;
    // chance agreement from the category distribution
    let p_e: f64 = (0..categories)
        .map(|j| {
            let mass: f64 = ratings.iter().map(|row| row[j] as f64).sum();
            let p = mass / (items * nf);
            p * p
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-15 {
        // all mass in one category; agreement is perfect by construction
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Tsv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(Error::InvalidArgument(format!(
                "unknown report format `{other}` (expected text, json, or tsv)"
            ))),
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.1}"),
        None => "-".to_string(),
    }
}

pub fn render_eval_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).unwrap(),
        ReportFormat::Tsv => {
            let mut out = String::from("type\tprecision\trecall\tf1\ttp\tfp\tfn\n");
            for (ty, c) in &report.per_type {
                out.push_str(&format!(
                    "{ty}\t{:.5e}\t{:.5e}\t{:.5e}\t{}\t{}\t{}\n",
                    c.precision(),
                    c.recall(),
                    c.f1(),
                    c.tp,
                    c.fp,
                    c.fn_
                ));
            }
            out.push_str(&format!(
                "micro\t{:.5e}\t{:.5e}\t{:.5e}\t{}\t{}\t{}\n",
                report.precision,
                report.recall,
                report.f1,
                report.overall.tp,
                report.overall.fp,
                report.overall.fn_
            ));
            out
        }
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "{:<18} {:>7} {:>7} {:>7}\n",
                "TYPE", "Prec.", "Rec.", "F1"
            ));
            for (ty, c) in &report.per_type {
                out.push_str(&format!(
                    "{:<18} {:>7.3} {:>7.3} {:>7.3}\n",
                    ty,
                    c.precision(),
                    c.recall(),
                    c.f1()
                ));
            }
            out.push_str(&format!(
                "{:<18} {:>7.3} {:>7.3} {:>7.3}\n",
                "micro", report.precision, report.recall, report.f1
            ));
            out
        }
    }
}

pub fn render_immediacy_report(report: &ImmediacyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).unwrap(),
        ReportFormat::Tsv => {
            let mut out =
                String::from("type\tentities\tfound\tfound_ratio\tmean_lead\tmedian_lead\n");
            for row in &report.rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{:.5e}\t{}\t{}\n",
                    row.label,
                    row.targets,
                    row.found,
                    row.found_ratio,
                    row.mean_lead.map_or("-".into(), |v| format!("{v:.5e}")),
                    row.median_lead.map_or("-".into(), |v| format!("{v:.5e}")),
                ));
            }
            out
        }
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!(
                "{:<18} {:>9} {:>16} {:>12} {:>9}\n",
                "TYPE", "#entities", "#found (%)", "lead mean", "(median)"
            ));
            for row in &report.rows {
                out.push_str(&format!(
                    "{:<18} {:>9} {:>8} ({:>5.2}%) {:>12} {:>9}\n",
                    row.label,
                    row.targets,
                    row.found,
                    row.found_ratio * 100.0,
                    fmt_opt(row.mean_lead),
                    fmt_opt(row.median_lead),
                ));
            }
            out
        }
    }
}
