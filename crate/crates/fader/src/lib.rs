//! Detecting disappearing entities in timestamped microblog streams.
//!
//! The pipeline runs in stages:
//!
//! 1. [`corpus`] ingests timestamped posts and serves per-day phrase counts.
//! 2. [`kb`] loads the list of ended entities and filters out noise.
//! 3. [`supervision`] builds weakly labeled BILOU data by sampling each
//!    entity's peak mention day inside its disappearance year (positives)
//!    and earlier years (negatives).
//! 4. [`embeddings`] trains subword skip-gram vectors on the pre-period
//!    corpus and refines a copy on each day's post stream.
//! 5. [`tagger`] trains a dual-stack recurrent CRF model over base and
//!    day-refined embeddings and decodes entity spans.
//! 6. [`evaluation`] scores span predictions, relative recall, and lead time
//!    against knowledge-base update dates.
//! 7. [`synth`] generates synthetic worlds with known ground truth for
//!    end-to-end verification.
//!
//! Every stage is seeded and single-threaded by default, so identical inputs
//! produce byte-identical artifacts. See the crate examples for runnable
//! walkthroughs of each stage, or the `fader` binary for the stage-by-stage
//! command line.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod kb;
pub mod rng;
pub mod supervision;
pub mod synth;
pub mod tagger;

pub use error::{Error, Result};
