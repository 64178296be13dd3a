//! Universal-schema relation prediction by matrix completion.
//!
//! Relations from text (surface patterns) and from structured knowledge bases
//! share one prediction space. Given observed `(relation, entity pair)` facts,
//! the crate learns scores for unobserved facts with three additive models:
//!
//! - a latent feature model (relation and tuple embeddings),
//! - a neighborhood model (directed weights between co-occurring relations),
//! - an entity model (per-relation argument-slot vectors and entity vectors),
//!
//! trained with a pairwise ranking loss and evaluated by mean average
//! precision over held-out facts.
//!
//! ```no_run
//! use unischema::prelude::*;
//!
//! let store = ingest(std::io::stdin().lock(), SourceRule::new(["/"]))?;
//! let cfg = TrainConfig { kind: ModelKind::NFE, latent_dim: 20, entity_dim: 20, ..Default::default() };
//! let (params, report) = train(&store, &cfg)?;
//! # Ok::<(), unischema::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod model_file;
pub mod scoring;
pub mod store;
pub mod training;
pub mod verification;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{
        average_precision, evaluate, evaluate_pooled, mean_average_precision, pool_candidates, rank_candidates,
        EvalSplit, Evaluation, MapWeighting, RelationReport,
    };
    pub use crate::model_file::ModelFile;
    pub use crate::scoring::{confidence, ModelKind, ModelParams, RankedPrediction};
    pub use crate::store::{ingest, Fact, FactStore, FactStoreBuilder, RelationId, RelationSource, SourceRule, TupleId};
    pub use crate::training::{train, train_with, TrainConfig, TrainReport, L2};
    pub use crate::verification::{
        check_gradients, generate_implicature_corpus, generate_lowrank_corpus, GradCheckConfig, ImplicatureRule,
        SynthSpec,
    };
}
