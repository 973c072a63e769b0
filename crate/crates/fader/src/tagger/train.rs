//! Training loop: mini-batch SGD with dev-F1 model selection and
//! plateau-halved learning rate. Single-threaded and bit-deterministic for a
//! given seed.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusIndex;
use crate::embeddings::{self, EmbeddingConfig, EmbeddingModel, ModelTag};
use crate::error::{Error, Result};
use crate::evaluation;
use crate::rng::Rng;
use crate::supervision::{Dataset, LabeledSentence, Tag};

use super::{SentenceFeatures, TagSet, TaggerConfig, TaggerModel};

/// Supplies the refined embedding model for a calendar day, if one exists.
pub trait RefinedProvider {
    fn get(&mut self, day: NaiveDate) -> Option<&EmbeddingModel>;
}

/// No refined models: every sentence falls back to base vectors.
pub struct NoRefined;

impl RefinedProvider for NoRefined {
    fn get(&mut self, _day: NaiveDate) -> Option<&EmbeddingModel> {
        None
    }
}

/// Pre-built day -> model map.
pub struct MapProvider(pub HashMap<NaiveDate, EmbeddingModel>);

impl RefinedProvider for MapProvider {
    fn get(&mut self, day: NaiveDate) -> Option<&EmbeddingModel> {
        self.0.get(&day)
    }
}

/// Refines the base model on a day's post stream the first time the day is
/// requested. Keeps only the most recent day, so callers should group work
/// by date.
pub struct OnDemandRefiner<'a> {
    base: &'a EmbeddingModel,
    index: &'a CorpusIndex,
    cfg: EmbeddingConfig,
    cache: Option<(NaiveDate, EmbeddingModel)>,
}

impl<'a> OnDemandRefiner<'a> {
    pub fn new(base: &'a EmbeddingModel, index: &'a CorpusIndex, cfg: EmbeddingConfig) -> Self {
        assert_eq!(base.tag, ModelTag::Base, "refiner needs a base model");
        OnDemandRefiner {
            base,
            index,
            cfg,
            cache: None,
        }
    }
}

impl RefinedProvider for OnDemandRefiner<'_> {
    fn get(&mut self, day: NaiveDate) -> Option<&EmbeddingModel> {
        let stale = !matches!(&self.cache, Some((d, _)) if *d == day);
        if stale {
            let day_tokens: Vec<&Vec<String>> =
                self.index.posts_of_day(day).map(|p| &p.tokens).collect();
            let refined =
                embeddings::refine_for_day(self.base, day, &day_tokens, &self.cfg).ok()?;
            self.cache = Some((day, refined));
        }
        self.cache.as_ref().map(|(_, m)| m)
    }
}

/// Loads `<dir>/<YYYY-MM-DD>.embbin` files, caching the most recent day.
pub struct DirProvider {
    dir: PathBuf,
    cache: Option<(NaiveDate, EmbeddingModel)>,
}

impl DirProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DirProvider {
            dir: dir.into(),
            cache: None,
        }
    }
}

impl RefinedProvider for DirProvider {
    fn get(&mut self, day: NaiveDate) -> Option<&EmbeddingModel> {
        let stale = !matches!(&self.cache, Some((d, _)) if *d == day);
        if stale {
            let path = self.dir.join(format!("{}.embbin", day.format("%Y-%m-%d")));
            if !path.exists() {
                return None;
            }
            let model = embeddings::read_binary_file(&path).ok()?;
            self.cache = Some((day, model));
        }
        self.cache.as_ref().map(|(_, m)| m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_f1: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingLog {
    pub epochs: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_dev_f1: f64,
    /// Sentences whose refined model was missing (fell back to base).
    pub refined_fallbacks: usize,
}

fn gold_ids(tagset: &TagSet, sentence: &LabeledSentence) -> Result<Vec<usize>> {
    sentence
        .tags
        .iter()
        .map(|&t| {
            tagset.index_of(t).ok_or_else(|| {
                Error::CorruptData(format!(
                    "tag `{t}` of sentence {} not in the tag set",
                    sentence.post_id
                ))
            })
        })
        .collect()
}

/// Builds features for a batch of sentences, visiting dates in sorted order
/// so a single-slot refined provider never re-refines a day.
fn build_all_features(
    model: &TaggerModel,
    sentences: &[LabeledSentence],
    base: &EmbeddingModel,
    provider: &mut dyn RefinedProvider,
) -> (Vec<SentenceFeatures>, usize) {
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    order.sort_by_key(|&i| sentences[i].date);
    let mut feats: Vec<Option<SentenceFeatures>> = vec![None; sentences.len()];
    let mut fallbacks = 0usize;
    for i in order {
        let s = &sentences[i];
        let refined = provider.get(s.date);
        let f = model.build_features(&s.tokens, base, refined);
        fallbacks += f.refined_missing as usize;
        feats[i] = Some(f);
    }
    (feats.into_iter().map(|f| f.unwrap()).collect(), fallbacks)
}

/// Trains a tagger with mini-batch SGD, returning the parameter snapshot
/// from the epoch with the highest dev F1.
pub fn train(
    dataset: &Dataset,
    base: &EmbeddingModel,
    provider: &mut dyn RefinedProvider,
    cfg: &TaggerConfig,
) -> Result<(TaggerModel, TrainingLog)> {
    cfg.validate()?;
    if dataset.train.is_empty() || dataset.dev.is_empty() {
        return Err(Error::InvalidArgument(
            "training needs non-empty train and dev splits".into(),
        ));
    }

    let tagset = TagSet::full();
    let mut char_set: BTreeSet<char> = BTreeSet::new();
    for s in dataset.train.iter().chain(&dataset.dev) {
        for tok in &s.tokens {
            char_set.extend(tok.chars());
        }
    }
    let chars: Vec<char> = char_set.into_iter().collect();
    let mut model = TaggerModel::new(tagset, cfg.clone(), base.dim(), chars)?;

    let train_gold: Vec<Vec<usize>> = dataset
        .train
        .iter()
        .map(|s| gold_ids(&model.tagset, s))
        .collect::<Result<_>>()?;
    let (train_feats, fb_train) = build_all_features(&model, &dataset.train, base, provider);
    let (dev_feats, fb_dev) = build_all_features(&model, &dataset.dev, base, provider);
    let refined_fallbacks = fb_train + fb_dev;

    let mut rng = Rng::new(cfg.seed);
    let mut lr = cfg.lr;
    let mut log = TrainingLog {
        epochs: Vec::new(),
        best_epoch: 0,
        best_dev_f1: f64::NEG_INFINITY,
        refined_fallbacks,
    };
    let mut best_snapshot = model.snapshot();
    let mut since_improve = 0usize;

    let mut order: Vec<usize> = (0..dataset.train.len()).collect();
    for epoch in 0..cfg.max_epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in order.chunks(cfg.batch).enumerate() {
            for &i in batch {
                let loss =
                    model.loss_and_backward(&train_feats[i], &train_gold[i], true, &mut rng)?;
                if !loss.is_finite() {
                    return Err(Error::Training(format!(
                        "non-finite loss at epoch {epoch}, batch {batch_idx}, \
                         parameter norm {:.3e}",
                        model.param_norm()
                    )));
                }
                epoch_loss += loss;
            }
            let scale = batch.len() as f64;
            for tensor in model.tensors_mut() {
                tensor.sgd_step(lr, scale);
                tensor.zero_grad();
            }
        }
        let train_loss = epoch_loss / dataset.train.len() as f64;

        let pred: Vec<Vec<Tag>> = dev_feats
            .iter()
            .map(|f| model.decode_tags(f).0)
            .collect();
        let dev_f1 = evaluation::conll_score(&dataset.dev, &pred)?.f1;
        log.epochs.push(EpochStats {
            epoch,
            train_loss,
            dev_f1,
            lr,
        });
        if dev_f1 > log.best_dev_f1 {
            log.best_dev_f1 = dev_f1;
            log.best_epoch = epoch;
            best_snapshot = model.snapshot();
            since_improve = 0;
        } else {
            since_improve += 1;
            if since_improve >= cfg.plateau_patience {
                lr = (lr / 2.0).max(cfg.lr_floor);
                since_improve = 0;
            }
        }
    }
    model.restore(&best_snapshot);
    Ok((model, log))
}
