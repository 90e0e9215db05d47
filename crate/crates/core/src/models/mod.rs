//! Meta-models: from-scratch random-forest regression plus the constant
//! and random baselines, wrapped into the nine named model kinds.

mod forest;
mod meta;

pub use forest::{fit_forest, ForestParams, RegressionForest};
pub use meta::{fit_meta, MetaModel, MetaModelKind};
