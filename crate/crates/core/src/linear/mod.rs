//! Feature standardisation and a one-vs-rest ridge classifier whose
//! regularisation strength is chosen by closed-form leave-one-out error.

mod ridge;
mod scaler;

use thiserror::Error;

pub use ridge::{argmax_labels, default_alpha_grid, loo_residuals, predict, predict_scores, ridge_fit, RidgeModel};
pub use scaler::FeatureScaler;

#[derive(Debug, Error, PartialEq)]
pub enum LinearError {
    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("labels contain fewer than two classes")]
    DegenerateLabels,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("expected {expected} columns, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
