//! Random convolutional kernel transforms.
//!
//! [`KernelBank`] holds ROCKET kernels: random length, weights, bias,
//! dilation and padding, each over a random subset of input channels, and
//! yields two features per kernel (max and proportion of positive values).
//! [`MiniRocketParams`] holds the MiniROCKET configuration: 84 fixed
//! length-9 kernels, a dilation ladder and biases fitted from training
//! convolution quantiles, yielding PPV features only.

mod features;
mod kernels;
mod minirocket;

use thiserror::Error;

pub use features::FeatureMatrix;
pub use kernels::{
    apply_kernel, generate_kernels, max_and_ppv, rocket_transform, KernelBank, RocketKernel, RNG_ALGORITHM,
};
pub use minirocket::{
    golden_quantiles, minirocket_fit, minirocket_transform, MiniRocketConfig, MiniRocketParams, MINIROCKET_KERNELS,
};

#[derive(Debug, Error, PartialEq)]
pub enum RocketError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("input shape {found_channels}x{found_length} does not match transform shape {channels}x{length}")]
    ShapeMismatch { channels: usize, length: usize, found_channels: usize, found_length: usize },
    #[error("no training samples")]
    EmptyDataset,
}

fn check_shape<S: AsRef<crate::MultivariateSeries>>(
    samples: &[S],
    channels: usize,
    length: usize,
) -> Result<(), RocketError> {
    for s in samples {
        let s = s.as_ref();
        if s.n_channels() != channels || s.len() != length {
            return Err(RocketError::ShapeMismatch {
                channels,
                length,
                found_channels: s.n_channels(),
                found_length: s.len(),
            });
        }
    }
    Ok(())
}
