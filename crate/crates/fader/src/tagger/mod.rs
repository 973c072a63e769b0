//! The disappearing-entity tagger.
//!
//! Per-token features flow through two word-level bidirectional recurrent
//! stacks: stack A reads a jointly trained character-encoder feature
//! concatenated with the base word embedding; stack B reads the word
//! embedding refined on the sentence's calendar day. Their hidden states are
//! concatenated, projected to per-tag emissions, and decoded by a
//! linear-chain CRF with a hard BILOU transition mask.

pub mod checkpoint;
pub mod crf;
pub mod nn;
mod train;

pub use checkpoint::{read_checkpoint, read_checkpoint_file, write_checkpoint, write_checkpoint_file};
pub use crf::{Crf, TagSet, MASK};
pub use train::{
    train, DirProvider, EpochStats, MapProvider, NoRefined, OnDemandRefiner, RefinedProvider,
    TrainingLog,
};

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::Post;
use crate::embeddings::EmbeddingModel;
use crate::error::{Error, Result};
use crate::kb::CoarseType;
use crate::rng::Rng;
use crate::supervision::{extract_spans, Tag};

use nn::{dropout_mask, BiGru, BiGruCache, Linear, Tensor};

/// What feeds the second recurrent stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StackBMode {
    /// Day-refined embeddings (falling back to base when a day is missing).
    Refined,
    /// Base embeddings; the ablation without day refinement.
    Base,
    /// Stack B hidden states forced to zero.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggerConfig {
    /// Per-direction hidden width of the word-level stacks.
    pub word_hidden: usize,
    pub char_emb: usize,
    /// Per-direction hidden width of the character encoder.
    pub char_hidden: usize,
    /// Dropout on recurrent outputs during training.
    pub dropout: f64,
    pub lr: f64,
    pub batch: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub stack_b: StackBMode,
    /// Epochs without dev-F1 improvement before the learning rate halves.
    pub plateau_patience: usize,
    pub lr_floor: f64,
}

impl Default for TaggerConfig {
    fn default() -> Self {
        TaggerConfig {
            word_hidden: 256,
            char_emb: 30,
            char_hidden: 64,
            dropout: 0.5,
            lr: 0.01,
            batch: 32,
            max_epochs: 50,
            seed: 1,
            stack_b: StackBMode::Refined,
            plateau_patience: 3,
            lr_floor: 1e-4,
        }
    }
}

impl TaggerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.word_hidden == 0 || self.char_emb == 0 || self.char_hidden == 0 {
            return Err(Error::InvalidConfig("hidden sizes must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidConfig("dropout must be in [0, 1)".into()));
        }
        if self.lr <= 0.0 || self.batch == 0 || self.max_epochs == 0 {
            return Err(Error::InvalidConfig(
                "lr, batch, and max_epochs must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A decoded entity span (end exclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedSpan {
    pub post_id: String,
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub ty: CoarseType,
    pub date: NaiveDate,
    /// Viterbi log-score of the whole decoded path.
    pub score: f64,
}

/// Static per-sentence inputs; embeddings are features, not parameters.
#[derive(Debug, Clone)]
pub struct SentenceFeatures {
    pub char_ids: Vec<Vec<usize>>,
    pub base_vecs: Vec<Vec<f64>>,
    pub day_vecs: Vec<Vec<f64>>,
    /// True when the day's refined model was unavailable and stack B fell
    /// back to base vectors.
    pub refined_missing: bool,
}

pub struct TaggerModel {
    pub tagset: TagSet,
    pub config: TaggerConfig,
    pub emb_dim: usize,
    chars: Vec<char>,
    char_index: HashMap<char, usize>,
    char_table: Tensor,
    char_rnn: BiGru,
    stack_a: BiGru,
    stack_b: BiGru,
    emission: Linear,
    crf: Crf,
}

impl TaggerModel {
    /// Builds a freshly initialized model. `chars` is the character
    /// inventory observed in training data; unseen characters map to a
    /// shared unknown row.
    pub fn new(tagset: TagSet, config: TaggerConfig, emb_dim: usize, chars: Vec<char>) -> Result<Self> {
        config.validate()?;
        if emb_dim == 0 {
            return Err(Error::InvalidConfig("embedding dim must be positive".into()));
        }
        let mut rng = Rng::new(config.seed);
        let char_index: HashMap<char, usize> =
            chars.iter().enumerate().map(|(i, &c)| (c, i + 1)).collect();
        let char_table = Tensor::glorot(chars.len() + 1, config.char_emb, &mut rng);
        let char_rnn = BiGru::new(config.char_emb, config.char_hidden, &mut rng);
        let stack_a = BiGru::new(2 * config.char_hidden + emb_dim, config.word_hidden, &mut rng);
        let stack_b = BiGru::new(emb_dim, config.word_hidden, &mut rng);
        let emission = Linear::new(4 * config.word_hidden, tagset.len(), &mut rng);
        let crf = Crf::new(tagset.len(), &mut rng);
        Ok(TaggerModel {
            tagset,
            config,
            emb_dim,
            chars,
            char_index,
            char_table,
            char_rnn,
            stack_a,
            stack_b,
            emission,
            crf,
        })
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn crf(&self) -> &Crf {
        &self.crf
    }

    /// Character ids of one token; unseen characters map to the unknown row
    /// (index 0), and an empty token is treated as a single unknown char.
    pub fn char_ids(&self, token: &str) -> Vec<usize> {
        if token.is_empty() {
            return vec![0];
        }
        token
            .chars()
            .map(|c| self.char_index.get(&c).copied().unwrap_or(0))
            .collect()
    }

    /// Assembles static features for one sentence. `refined` is the day's
    /// refined model when available; its absence makes stack B fall back to
    /// base vectors and flags the sentence.
    pub fn build_features(
        &self,
        tokens: &[String],
        base: &EmbeddingModel,
        refined: Option<&EmbeddingModel>,
    ) -> SentenceFeatures {
        let char_ids = tokens.iter().map(|t| self.char_ids(t)).collect();
        let base_vecs: Vec<Vec<f64>> = tokens.iter().map(|t| base.lookup(t).0).collect();
        let (day_vecs, refined_missing) = match self.config.stack_b {
            StackBMode::Zero => (vec![vec![0.0; self.emb_dim]; tokens.len()], false),
            StackBMode::Base => (base_vecs.clone(), false),
            StackBMode::Refined => match refined {
                Some(model) => (
                    tokens.iter().map(|t| model.lookup(t).0).collect(),
                    false,
                ),
                None => (base_vecs.clone(), true),
            },
        };
        SentenceFeatures {
            char_ids,
            base_vecs,
            day_vecs,
            refined_missing,
        }
    }

    fn char_features(&self, char_ids: &[Vec<usize>]) -> (Vec<Vec<f64>>, Vec<(Vec<Vec<f64>>, BiGruCache, usize)>) {
        let h = self.config.char_hidden;
        let mut feats = Vec::with_capacity(char_ids.len());
        let mut caches = Vec::with_capacity(char_ids.len());
        for ids in char_ids {
            let embeds: Vec<Vec<f64>> = ids
                .iter()
                .map(|&id| self.char_table.row(id).to_vec())
                .collect();
            let (outs, cache) = self.char_rnn.run(&embeds);
            let last = outs.len() - 1;
            let mut feat = vec![0.0; 2 * h];
            feat[..h].copy_from_slice(&outs[last][..h]);
            feat[h..].copy_from_slice(&outs[0][h..]);
            feats.push(feat);
            caches.push((embeds, cache, ids.len()));
        }
        (feats, caches)
    }

    /// Runs the network up to per-token emissions. With `train` set,
    /// dropout masks are drawn from `rng` and recorded for the backward
    /// pass.
    pub fn forward(&self, feats: &SentenceFeatures, train: bool, rng: &mut Rng) -> ForwardPass {
        let n = feats.char_ids.len();
        let wh = self.config.word_hidden;
        let p = if train { self.config.dropout } else { 0.0 };

        let (char_feats, char_caches) = self.char_features(&feats.char_ids);
        let a_inputs: Vec<Vec<f64>> = (0..n)
            .map(|t| {
                let mut v = char_feats[t].clone();
                v.extend_from_slice(&feats.base_vecs[t]);
                v
            })
            .collect();
        let (a_raw, a_cache) = self.stack_a.run(&a_inputs);
        let (b_raw, b_cache) = match self.config.stack_b {
            StackBMode::Zero => (vec![vec![0.0; 2 * wh]; n], None),
            _ => {
                let (out, cache) = self.stack_b.run(&feats.day_vecs);
                (out, Some(cache))
            }
        };

        let masks_a: Vec<Vec<f64>> = (0..n).map(|_| dropout_mask(2 * wh, p, rng)).collect();
        let masks_b: Vec<Vec<f64>> = (0..n).map(|_| dropout_mask(2 * wh, p, rng)).collect();
        let mut concat = Vec::with_capacity(n);
        let mut emissions = Vec::with_capacity(n);
        for t in 0..n {
            let mut v = vec![0.0; 4 * wh];
            for i in 0..2 * wh {
                v[i] = a_raw[t][i] * masks_a[t][i];
                v[2 * wh + i] = b_raw[t][i] * masks_b[t][i];
            }
            emissions.push(self.emission.forward(&v));
            concat.push(v);
        }
        ForwardPass {
            emissions,
            concat,
            masks_a,
            masks_b,
            a_cache,
            b_cache,
            char_caches,
        }
    }

    /// CRF negative log-likelihood plus full backward pass; gradients
    /// accumulate into every parameter tensor.
    pub fn loss_and_backward(
        &mut self,
        feats: &SentenceFeatures,
        gold: &[usize],
        train: bool,
        rng: &mut Rng,
    ) -> Result<f64> {
        let pass = self.forward(feats, train, rng);
        let (loss, d_emissions) =
            crf::loss_and_grad(&mut self.crf, &self.tagset, &pass.emissions, gold)?;
        self.backward(feats, &pass, &d_emissions);
        Ok(loss)
    }

    /// Forward-only loss (used by gradient checking).
    pub fn loss_only(&mut self, feats: &SentenceFeatures, gold: &[usize]) -> Result<f64> {
        let mut rng = Rng::new(0);
        let pass = self.forward(feats, false, &mut rng);
        let log_z = crf::forward(&self.crf, &self.tagset, &pass.emissions);
        if !self.tagset.path_legal(gold) {
            return Err(Error::CorruptData("illegal gold path".into()));
        }
        let gold_score = crf::path_score(&self.crf, &self.tagset, &pass.emissions, gold);
        Ok(log_z - gold_score)
    }

    fn backward(&mut self, feats: &SentenceFeatures, pass: &ForwardPass, d_emissions: &[Vec<f64>]) {
        let n = d_emissions.len();
        let wh = self.config.word_hidden;
        let ch = self.config.char_hidden;

        let mut d_a = vec![vec![0.0; 2 * wh]; n];
        let mut d_b = vec![vec![0.0; 2 * wh]; n];
        for t in 0..n {
            let dv = self.emission.backward(&pass.concat[t], &d_emissions[t]);
            for i in 0..2 * wh {
                d_a[t][i] = dv[i] * pass.masks_a[t][i];
                d_b[t][i] = dv[2 * wh + i] * pass.masks_b[t][i];
            }
        }
        let d_a_inputs = self.stack_a.backward(&d_a, &pass.a_cache);
        if let Some(b_cache) = &pass.b_cache {
            // gradients stop at the day vectors; they are static features
            let _ = self.stack_b.backward(&d_b, b_cache);
        }
        for t in 0..n {
            let d_char_feat = &d_a_inputs[t][..2 * ch];
            let (embeds, cache, len) = &pass.char_caches[t];
            let mut d_outs = vec![vec![0.0; 2 * ch]; *len];
            d_outs[*len - 1][..ch].copy_from_slice(&d_char_feat[..ch]);
            d_outs[0][ch..].copy_from_slice(&d_char_feat[ch..]);
            let d_embeds = self.char_rnn.backward(&d_outs, cache);
            debug_assert_eq!(embeds.len(), d_embeds.len());
            for (i, d_embed) in d_embeds.iter().enumerate() {
                self.char_table.grad_row_add(feats.char_ids[t][i], d_embed);
            }
        }
    }

    /// Viterbi decode; returns tag indices and the path log-score.
    pub fn decode(&self, feats: &SentenceFeatures) -> (Vec<usize>, f64) {
        let mut rng = Rng::new(0);
        let pass = self.forward(feats, false, &mut rng);
        crf::viterbi(&self.crf, &self.tagset, &pass.emissions)
    }

    pub fn decode_tags(&self, feats: &SentenceFeatures) -> (Vec<Tag>, f64) {
        let (ids, score) = self.decode(feats);
        (ids.into_iter().map(|i| self.tagset.tag(i)).collect(), score)
    }

    /// Visits every parameter tensor in a stable order.
    pub fn visit_tensors(&self, f: &mut dyn FnMut(String, &Tensor)) {
        f("char_table".into(), &self.char_table);
        self.char_rnn.fwd.visit("char_rnn.fwd", f);
        self.char_rnn.bwd.visit("char_rnn.bwd", f);
        self.stack_a.fwd.visit("stack_a.fwd", f);
        self.stack_a.bwd.visit("stack_a.bwd", f);
        self.stack_b.fwd.visit("stack_b.fwd", f);
        self.stack_b.bwd.visit("stack_b.bwd", f);
        f("emission.w".into(), &self.emission.w);
        f("emission.b".into(), &self.emission.b);
        f("crf.transitions".into(), &self.crf.transitions);
        f("crf.start".into(), &self.crf.start);
        f("crf.end".into(), &self.crf.end);
    }

    /// Mutable parameter tensors, in the same order as [`visit_tensors`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = vec![&mut self.char_table];
        out.extend(self.char_rnn.fwd.tensors_mut());
        out.extend(self.char_rnn.bwd.tensors_mut());
        out.extend(self.stack_a.fwd.tensors_mut());
        out.extend(self.stack_a.bwd.tensors_mut());
        out.extend(self.stack_b.fwd.tensors_mut());
        out.extend(self.stack_b.bwd.tensors_mut());
        out.push(&mut self.emission.w);
        out.push(&mut self.emission.b);
        out.push(&mut self.crf.transitions);
        out.push(&mut self.crf.start);
        out.push(&mut self.crf.end);
        out
    }

    pub fn param_norm(&self) -> f64 {
        let mut total = 0.0;
        self.visit_tensors(&mut |_, t| {
            total += t.data.iter().map(|x| x * x).sum::<f64>();
        });
        total.sqrt()
    }

    pub fn snapshot(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        self.visit_tensors(&mut |_, t| out.push(t.data.clone()));
        out
    }

    pub fn restore(&mut self, snapshot: &[Vec<f64>]) {
        for (tensor, data) in self.tensors_mut().into_iter().zip(snapshot) {
            tensor.data.copy_from_slice(data);
        }
    }
}

pub struct ForwardPass {
    pub emissions: Vec<Vec<f64>>,
    concat: Vec<Vec<f64>>,
    masks_a: Vec<Vec<f64>>,
    masks_b: Vec<Vec<f64>>,
    a_cache: BiGruCache,
    b_cache: Option<BiGruCache>,
    char_caches: Vec<(Vec<Vec<f64>>, BiGruCache, usize)>,
}

/// Tags one post and extracts detected spans.
pub fn tag_post(
    model: &TaggerModel,
    post: &Post,
    base: &EmbeddingModel,
    provider: &mut dyn RefinedProvider,
) -> Vec<DetectedSpan> {
    if post.tokens.is_empty() {
        return Vec::new();
    }
    let refined = provider.get(post.day());
    let feats = model.build_features(&post.tokens, base, refined);
    let (tags, score) = model.decode_tags(&feats);
    extract_spans(&tags)
        .into_iter()
        .map(|span| DetectedSpan {
            post_id: post.id.clone(),
            start: span.start,
            end: span.end,
            surface: post.tokens[span.start..span.end].join(" "),
            ty: span.ty,
            date: post.day(),
            score,
        })
        .collect()
}
