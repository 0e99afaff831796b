//! Unsupervised stress detection from RR-interval data.
//!
//! The crate covers the whole pipeline: RRI ingest and windowing ([`rri`]),
//! HRV features ([`features`]), a small reverse-mode neural engine ([`nn`]),
//! convolutional and LSTM autoencoders ([`autoencoder`]), K-means, DBSCAN and
//! KNN ([`cluster`]), marker statistics and stress labelling ([`analysis`]),
//! and the end-to-end run orchestration used by the CLI ([`pipeline`]).

pub mod analysis;
pub mod autoencoder;
pub mod cluster;
pub mod error;
pub mod features;
pub mod nn;
pub mod pipeline;
pub mod rng;
pub mod rri;
pub mod synth;

pub use error::{Error, Result};
pub use features::{FeatureVector, MarkerSet};
pub use rri::{RriSeries, SplitPlan, Window};
