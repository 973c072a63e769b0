//! Subword skip-gram embeddings with negative sampling.
//!
//! A base model (`v_base`) is trained once on the pre-period corpus; a
//! refined copy (`v_d`) continues training on the post stream of a single
//! day with the vocabulary frozen, capturing that day's semantic drift.
//! Words are composed from a word row plus hashed character n-gram rows, so
//! out-of-vocabulary words still get vectors.
//!
//! Defaults mirror full-scale settings (`buckets = 2^21`, `dim = 300`);
//! desk-scale runs should lower `buckets` and `dim` in the config.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{fnv1a64, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dim: usize,
    /// Context radius on each side of the target token.
    pub window: usize,
    /// Negative samples per (target, context) pair.
    pub negatives: usize,
    /// Words below this corpus count stay out of the vocabulary.
    pub min_count: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    /// Subword hash buckets; must be a power of two.
    pub buckets: usize,
    pub epochs_base: usize,
    pub epochs_refine: usize,
    /// Initial base learning rate, decayed linearly to `MIN_LR`.
    pub lr_base: f64,
    /// Fixed refinement learning rate.
    pub lr_refine: f64,
    pub seed: u64,
}

pub const MIN_LR: f64 = 1e-4;

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 300,
            window: 5,
            negatives: 5,
            min_count: 5,
            ngram_min: 3,
            ngram_max: 6,
            buckets: 1 << 21,
            epochs_base: 5,
            epochs_refine: 1,
            lr_base: 0.05,
            lr_refine: 0.01,
            seed: 1,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be positive".into()));
        }
        if self.ngram_min > self.ngram_max || self.ngram_min == 0 {
            return Err(Error::InvalidConfig(
                "need 0 < ngram_min <= ngram_max".into(),
            ));
        }
        if self.buckets == 0 || !self.buckets.is_power_of_two() {
            return Err(Error::InvalidConfig("buckets must be a power of two".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelTag {
    Base,
    Refined(NaiveDate),
}

/// Where a looked-up vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorSource {
    /// Word row averaged with its subword rows.
    InVocab,
    /// Subword rows only (word not in the vocabulary).
    SubwordOnly,
    /// No n-grams could be extracted; the vector is all zeros.
    Empty,
}

#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    pub config: EmbeddingConfig,
    pub tag: ModelTag,
    vocab: Vec<String>,
    vocab_index: HashMap<String, usize>,
    counts: Vec<u64>,
    /// (|vocab| + buckets) x dim input matrix, row-major.
    input: Vec<f64>,
    /// |vocab| x dim output (context) matrix.
    output: Vec<f64>,
    /// Per vocab word: its subword rows (already offset past the vocab).
    subwords: Vec<Vec<usize>>,
    /// Cumulative unigram^0.75 mass for negative sampling.
    neg_cdf: Vec<f64>,
}

/// Character n-grams of the boundary-marked word, hashed into bucket ids.
pub fn subword_buckets(word: &str, cfg: &EmbeddingConfig) -> Vec<usize> {
    let bracketed: Vec<char> = std::iter::once('<')
        .chain(word.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mask = cfg.buckets - 1;
    let mut out = Vec::new();
    for n in cfg.ngram_min..=cfg.ngram_max {
        if n > bracketed.len() {
            break;
        }
        for gram in bracketed.windows(n) {
            let s: String = gram.iter().collect();
            out.push((fnv1a64(s.as_bytes()) & mask as u64) as usize);
        }
    }
    out
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// log(sigmoid(x)), computed stably.
fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Skip-gram negative-sampling loss for one (target, context) pair and its
/// gradients.
///
/// The target representation is the mean of `rows` (word row plus subword
/// rows, or subword rows alone for OOV words):
/// `loss = -log s(u_c . h) - sum_n log s(-u_n . h)`.
///
/// Returns `(loss, grad_rows, grad_ctx, grad_negs)` where `grad_rows` is the
/// shared gradient applied to every contributing input row.
pub fn sgns_pair_loss(
    rows: &[&[f64]],
    ctx: &[f64],
    negs: &[&[f64]],
) -> (f64, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let dim = ctx.len();
    assert!(!rows.is_empty());
    let scale = 1.0 / rows.len() as f64;
    let mut h = vec![0.0; dim];
    for row in rows {
        for (hi, &ri) in h.iter_mut().zip(row.iter()) {
            *hi += ri;
        }
    }
    for hi in &mut h {
        *hi *= scale;
    }

    let s_ctx = dot(ctx, &h);
    let mut loss = -log_sigmoid(s_ctx);
    let g_ctx_score = sigmoid(s_ctx) - 1.0;

    let mut grad_h: Vec<f64> = ctx.iter().map(|&c| g_ctx_score * c).collect();
    let grad_ctx: Vec<f64> = h.iter().map(|&hi| g_ctx_score * hi).collect();

    let mut grad_negs = Vec::with_capacity(negs.len());
    for neg in negs {
        let s_neg = dot(neg, &h);
        loss -= log_sigmoid(-s_neg);
        let g = sigmoid(s_neg);
        for (gh, &ni) in grad_h.iter_mut().zip(neg.iter()) {
            *gh += g * ni;
        }
        grad_negs.push(h.iter().map(|&hi| g * hi).collect());
    }

    let grad_rows: Vec<f64> = grad_h.iter().map(|&g| g * scale).collect();
    (loss, grad_rows, grad_ctx, grad_negs)
}

impl EmbeddingModel {
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vocab_index.contains_key(word)
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    fn input_row(&self, row: usize) -> &[f64] {
        let d = self.config.dim;
        &self.input[row * d..(row + 1) * d]
    }

    fn output_row(&self, row: usize) -> &[f64] {
        let d = self.config.dim;
        &self.output[row * d..(row + 1) * d]
    }

    /// Input rows contributing to a token's representation: the word row and
    /// its subword rows for vocabulary words, subword rows alone otherwise.
    fn rows_for(&self, word: &str) -> Vec<usize> {
        match self.vocab_index.get(word) {
            Some(&w) => {
                let mut rows = vec![w];
                rows.extend(self.subwords[w].iter().map(|&b| self.vocab.len() + b));
                rows
            }
            None => subword_buckets(word, &self.config)
                .into_iter()
                .map(|b| self.vocab.len() + b)
                .collect(),
        }
    }

    /// Deterministic composed vector for any string.
    pub fn lookup(&self, word: &str) -> (Vec<f64>, VectorSource) {
        let source = if self.vocab_index.contains_key(word) {
            VectorSource::InVocab
        } else {
            VectorSource::SubwordOnly
        };
        let rows = self.rows_for(word);
        if rows.is_empty() {
            return (vec![0.0; self.config.dim], VectorSource::Empty);
        }
        let mut v = vec![0.0; self.config.dim];
        for &row in &rows {
            for (vi, &ri) in v.iter_mut().zip(self.input_row(row)) {
                *vi += ri;
            }
        }
        let scale = 1.0 / rows.len() as f64;
        for vi in &mut v {
            *vi *= scale;
        }
        (v, source)
    }

    pub fn all_finite(&self) -> bool {
        self.input.iter().all(|x| x.is_finite()) && self.output.iter().all(|x| x.is_finite())
    }

    fn sample_negative(&self, rng: &mut Rng, exclude: usize) -> usize {
        let total = *self.neg_cdf.last().unwrap();
        for _ in 0..32 {
            let r = rng.next_f64() * total;
            let idx = match self
                .neg_cdf
                .binary_search_by(|probe| probe.partial_cmp(&r).unwrap())
            {
                Ok(i) => i + 1,
                Err(i) => i,
            };
            let idx = idx.min(self.vocab.len() - 1);
            if idx != exclude || self.vocab.len() == 1 {
                return idx;
            }
        }
        exclude // pathological vocabulary; accept the collision
    }

    /// One SGD update on a (target rows, context word) pair. Returns the
    /// pair loss before the update.
    fn train_pair(&mut self, rows: &[usize], context: usize, lr: f64, rng: &mut Rng) -> f64 {
        let d = self.config.dim;
        let negatives: Vec<usize> = (0..self.config.negatives)
            .map(|_| self.sample_negative(rng, context))
            .collect();
        let row_slices: Vec<&[f64]> = rows.iter().map(|&r| self.input_row(r)).collect();
        let neg_slices: Vec<&[f64]> = negatives.iter().map(|&n| self.output_row(n)).collect();
        let (loss, grad_rows, grad_ctx, grad_negs) =
            sgns_pair_loss(&row_slices, self.output_row(context), &neg_slices);
        for &row in rows {
            let base = row * d;
            for (i, &g) in grad_rows.iter().enumerate() {
                self.input[base + i] -= lr * g;
            }
        }
        let base = context * d;
        for (i, &g) in grad_ctx.iter().enumerate() {
            self.output[base + i] -= lr * g;
        }
        for (&neg, grads) in negatives.iter().zip(&grad_negs) {
            let base = neg * d;
            for (i, &g) in grads.iter().enumerate() {
                self.output[base + i] -= lr * g;
            }
        }
        loss
    }
}

fn build_neg_cdf(counts: &[u64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(counts.len());
    let mut acc = 0.0;
    for &c in counts {
        acc += (c as f64).powf(0.75);
        cdf.push(acc);
    }
    cdf
}

/// Trains the base model with skip-gram negative sampling. Single-threaded
/// and bit-deterministic for a given seed.
pub fn train_base<S: AsRef<[String]>>(
    sentences: &[S],
    cfg: &EmbeddingConfig,
) -> Result<EmbeddingModel> {
    cfg.validate()?;
    let mut freq: HashMap<&str, u64> = HashMap::new();
    let mut total_tokens = 0u64;
    for s in sentences {
        for tok in s.as_ref() {
            *freq.entry(tok.as_str()).or_insert(0) += 1;
            total_tokens += 1;
        }
    }
    let mut vocab: Vec<(String, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c as usize >= cfg.min_count)
        .map(|(w, c)| (w.to_string(), c))
        .collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if vocab.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no word reaches min_count {} (corpus has {} tokens)",
            cfg.min_count, total_tokens
        )));
    }

    let words: Vec<String> = vocab.iter().map(|(w, _)| w.clone()).collect();
    let counts: Vec<u64> = vocab.iter().map(|&(_, c)| c).collect();
    let vocab_index: HashMap<String, usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let subwords: Vec<Vec<usize>> = words.iter().map(|w| subword_buckets(w, cfg)).collect();

    let d = cfg.dim;
    let rows_total = words.len() + cfg.buckets;
    let mut rng = Rng::new(cfg.seed);
    let bound = 0.5 / d as f64;
    let mut input = vec![0.0; rows_total * d];
    for x in &mut input {
        *x = rng.uniform(-bound, bound);
    }
    let output = vec![0.0; words.len() * d];

    let mut model = EmbeddingModel {
        config: cfg.clone(),
        tag: ModelTag::Base,
        neg_cdf: build_neg_cdf(&counts),
        vocab: words,
        vocab_index,
        counts,
        input,
        output,
        subwords,
    };

    let planned = (total_tokens.max(1) * cfg.epochs_base as u64) as f64;
    let mut processed = 0u64;
    for _ in 0..cfg.epochs_base {
        for sentence in sentences {
            train_sentence(&mut model, sentence.as_ref(), &mut rng, |done| {
                let progress = done as f64 / planned;
                (cfg.lr_base * (1.0 - progress)).max(MIN_LR)
            }, &mut processed, false);
        }
    }
    Ok(model)
}

/// Applies skip-gram updates over one sentence. `allow_oov_targets` lets
/// refinement update subword buckets of out-of-vocabulary tokens.
fn train_sentence(
    model: &mut EmbeddingModel,
    tokens: &[String],
    rng: &mut Rng,
    lr_at: impl Fn(u64) -> f64,
    processed: &mut u64,
    allow_oov_targets: bool,
) {
    let window = model.config.window;
    let ids: Vec<Option<usize>> = tokens
        .iter()
        .map(|t| model.vocab_index.get(t).copied())
        .collect();
    for i in 0..tokens.len() {
        *processed += 1;
        let lr = lr_at(*processed);
        if ids[i].is_none() && !allow_oov_targets {
            continue;
        }
        let target_rows = model.rows_for(&tokens[i]);
        if target_rows.is_empty() {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(tokens.len() - 1);
        for j in lo..=hi {
            if j == i {
                continue;
            }
            // contexts must be vocabulary words: the output matrix is
            // vocabulary-sized
            if let Some(ctx) = ids[j] {
                model.train_pair(&target_rows, ctx, lr, rng);
            }
        }
    }
}

/// Copies the base model and continues training on one day's posts with the
/// vocabulary frozen. OOV day words contribute only through their shared
/// subword buckets. An empty day stream returns an identical copy.
pub fn refine_for_day<S: AsRef<[String]>>(
    base: &EmbeddingModel,
    day: NaiveDate,
    day_sentences: &[S],
    cfg: &EmbeddingConfig,
) -> Result<EmbeddingModel> {
    if base.tag != ModelTag::Base {
        return Err(Error::InvalidArgument(
            "refinement must start from a base model".into(),
        ));
    }
    let mut model = base.clone();
    model.tag = ModelTag::Refined(day);
    let day_ord: i64 = day.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp();
    let mut rng = Rng::new(Rng::derive(cfg.seed, day_ord as u64));
    let mut processed = 0u64;
    for _ in 0..cfg.epochs_refine {
        for sentence in day_sentences {
            train_sentence(
                &mut model,
                sentence.as_ref(),
                &mut rng,
                |_| cfg.lr_refine,
                &mut processed,
                true,
            );
        }
    }
    Ok(model)
}

/// Cosine similarity of the two composed vectors; 0 when either is zero.
pub fn similarity(model: &EmbeddingModel, a: &str, b: &str) -> f64 {
    let (va, _) = model.lookup(a);
    let (vb, _) = model.lookup(b);
    let na = dot(&va, &va).sqrt();
    let nb = dot(&vb, &vb).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(&va, &vb) / (na * nb)
}

// ---------------------------------------------------------------------------
// text interchange format

fn push_floats(out: &mut String, row: &[f64]) {
    for v in row {
        // 6 significant digits
        write!(out, " {:.5e}", v).unwrap();
    }
    out.push('\n');
}

/// Writes the interchange text format: a header line
/// `<vocab_size> <dim> <buckets> <ngram_min> <ngram_max>`, one line per
/// vocabulary word, then one `#<bucket>` line per bucket with any nonzero
/// component.
pub fn write_text(model: &EmbeddingModel) -> String {
    let mut out = String::new();
    let cfg = &model.config;
    writeln!(
        out,
        "{} {} {} {} {}",
        model.vocab.len(),
        cfg.dim,
        cfg.buckets,
        cfg.ngram_min,
        cfg.ngram_max
    )
    .unwrap();
    for (i, word) in model.vocab.iter().enumerate() {
        out.push_str(word);
        push_floats(&mut out, model.input_row(i));
    }
    for b in 0..cfg.buckets {
        let row = model.input_row(model.vocab.len() + b);
        if row.iter().any(|&x| x != 0.0) {
            write!(out, "#{}", b).unwrap();
            push_floats(&mut out, row);
        }
    }
    out
}

pub fn write_text_file(path: &Path, model: &EmbeddingModel) -> Result<()> {
    fs::write(path, write_text(model)).map_err(|e| Error::io(path, e))
}

/// Reads the text format back. The result supports lookup and similarity but
/// carries no training state (no counts or output vectors), so it cannot be
/// refined further.
pub fn read_text(text: &str) -> Result<EmbeddingModel> {
    let corrupt = |msg: String| Error::CorruptData(format!("embedding text: {msg}"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| corrupt("empty file".into()))?;
    let fields: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| corrupt(format!("bad header: {e}")))?;
    if fields.len() != 5 {
        return Err(corrupt("header needs 5 fields".into()));
    }
    let (vocab_size, dim, buckets, ngram_min, ngram_max) =
        (fields[0], fields[1], fields[2], fields[3], fields[4]);
    let config = EmbeddingConfig {
        dim,
        buckets,
        ngram_min,
        ngram_max,
        ..EmbeddingConfig::default()
    };
    config.validate()?;
    let mut vocab = Vec::with_capacity(vocab_size);
    let mut input = vec![0.0; (vocab_size + buckets) * dim];
    for i in 0..vocab_size {
        let line = lines
            .next()
            .ok_or_else(|| corrupt(format!("expected {vocab_size} word lines")))?;
        let mut parts = line.split(' ');
        let word = parts.next().unwrap_or("");
        if word.is_empty() {
            return Err(corrupt(format!("word line {i} empty")));
        }
        vocab.push(word.to_string());
        parse_row(parts, &mut input[i * dim..(i + 1) * dim], &corrupt)?;
    }
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let head = parts.next().unwrap_or("");
        let bucket: usize = head
            .strip_prefix('#')
            .and_then(|b| b.parse().ok())
            .ok_or_else(|| corrupt(format!("expected `#<bucket>` line, got `{head}`")))?;
        if bucket >= buckets {
            return Err(corrupt(format!("bucket {bucket} out of range")));
        }
        let row = vocab_size + bucket;
        parse_row(parts, &mut input[row * dim..(row + 1) * dim], &corrupt)?;
    }
    let vocab_index: HashMap<String, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let subwords = vocab.iter().map(|w| subword_buckets(w, &config)).collect();
    Ok(EmbeddingModel {
        config,
        tag: ModelTag::Base,
        counts: vec![0; vocab.len()],
        neg_cdf: Vec::new(),
        vocab_index,
        subwords,
        vocab,
        input,
        output: Vec::new(),
    })
}

fn parse_row<'a>(
    parts: impl Iterator<Item = &'a str>,
    dest: &mut [f64],
    corrupt: &impl Fn(String) -> Error,
) -> Result<()> {
    let mut n = 0usize;
    for part in parts {
        if n >= dest.len() {
            return Err(corrupt("too many components on line".into()));
        }
        dest[n] = part
            .parse::<f64>()
            .map_err(|e| corrupt(format!("bad float `{part}`: {e}")))?;
        n += 1;
    }
    if n != dest.len() {
        return Err(corrupt(format!("expected {} components, got {n}", dest.len())));
    }
    Ok(())
}

pub fn read_text_file(path: &Path) -> Result<EmbeddingModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_text(&text)
}

// ---------------------------------------------------------------------------
// binary companion format: full training state for stage handoff

const BIN_MAGIC: &[u8; 8] = b"FADEMB01";

fn w_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn w_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Serializes the complete model (including output vectors and counts) so a
/// later stage can refine it.
pub fn write_binary(model: &EmbeddingModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(BIN_MAGIC);
    let cfg = &model.config;
    for v in [
        cfg.dim,
        cfg.window,
        cfg.negatives,
        cfg.min_count,
        cfg.ngram_min,
        cfg.ngram_max,
        cfg.buckets,
        cfg.epochs_base,
        cfg.epochs_refine,
    ] {
        w_u64(&mut out, v as u64);
    }
    w_f64(&mut out, cfg.lr_base);
    w_f64(&mut out, cfg.lr_refine);
    w_u64(&mut out, cfg.seed);
    match model.tag {
        ModelTag::Base => w_u64(&mut out, 0),
        ModelTag::Refined(day) => {
            w_u64(&mut out, 1);
            w_u64(
                &mut out,
                day.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp() as u64,
            );
        }
    }
    w_u64(&mut out, model.vocab.len() as u64);
    for (word, &count) in model.vocab.iter().zip(&model.counts) {
        w_u64(&mut out, word.len() as u64);
        out.extend_from_slice(word.as_bytes());
        w_u64(&mut out, count);
    }
    for &x in &model.input {
        w_f64(&mut out, x);
    }
    for &x in &model.output {
        w_f64(&mut out, x);
    }
    out
}

pub fn write_binary_file(path: &Path, model: &EmbeddingModel) -> Result<()> {
    let bytes = write_binary(model);
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

struct BinReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BinReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::CorruptData("embedding binary truncated".into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn read_binary(data: &[u8]) -> Result<EmbeddingModel> {
    let mut r = BinReader { data, pos: 0 };
    if r.take(8)? != BIN_MAGIC {
        return Err(Error::CorruptData("not an embedding binary file".into()));
    }
    let dim = r.u64()? as usize;
    let window = r.u64()? as usize;
    let negatives = r.u64()? as usize;
    let min_count = r.u64()? as usize;
    let ngram_min = r.u64()? as usize;
    let ngram_max = r.u64()? as usize;
    let buckets = r.u64()? as usize;
    let epochs_base = r.u64()? as usize;
    let epochs_refine = r.u64()? as usize;
    let lr_base = r.f64()?;
    let lr_refine = r.f64()?;
    let seed = r.u64()?;
    let tag = match r.u64()? {
        0 => ModelTag::Base,
        1 => {
            let ts = r.u64()? as i64;
            let day = chrono::DateTime::from_timestamp(ts, 0)
                .ok_or_else(|| Error::CorruptData("bad refined date".into()))?
                .date_naive();
            ModelTag::Refined(day)
        }
        other => {
            return Err(Error::CorruptData(format!("unknown model tag {other}")));
        }
    };
    let config = EmbeddingConfig {
        dim,
        window,
        negatives,
        min_count,
        ngram_min,
        ngram_max,
        buckets,
        epochs_base,
        epochs_refine,
        lr_base,
        lr_refine,
        seed,
    };
    config.validate()?;
    let vocab_size = r.u64()? as usize;
    let mut vocab = Vec::with_capacity(vocab_size);
    let mut counts = Vec::with_capacity(vocab_size);
    for _ in 0..vocab_size {
        let len = r.u64()? as usize;
        let word = std::str::from_utf8(r.take(len)?)
            .map_err(|_| Error::CorruptData("bad utf8 in vocab".into()))?
            .to_string();
        vocab.push(word);
        counts.push(r.u64()?);
    }
    let rows = vocab_size + buckets;
    let mut input = vec![0.0; rows * dim];
    for x in &mut input {
        *x = r.f64()?;
    }
    let mut output = vec![0.0; vocab_size * dim];
    for x in &mut output {
        *x = r.f64()?;
    }
    if r.pos != data.len() {
        return Err(Error::CorruptData("trailing bytes in embedding binary".into()));
    }
    let vocab_index = vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let subwords = vocab.iter().map(|w| subword_buckets(w, &config)).collect();
    Ok(EmbeddingModel {
        config,
        tag,
        neg_cdf: build_neg_cdf(&counts),
        vocab_index,
        subwords,
        vocab,
        counts,
        input,
        output,
    })
}

pub fn read_binary_file(path: &Path) -> Result<EmbeddingModel> {
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut data = Vec::new();
    f.read_to_end(&mut data).map_err(|e| Error::io(path, e))?;
    read_binary(&data)
}
