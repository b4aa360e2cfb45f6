//! Self-supervised dense stereo matching at desk scale.
//!
//! The crate implements a bootstrap-and-improve loop for rectified stereo
//! pairs: a small convolutional network produces per-pixel matching costs,
//! a fixed pairwise CRF regularizes them via four-direction scanline
//! aggregation, a conservative left-right consistency check filters the
//! resulting disparity maps, and the surviving pixels are fed back as
//! pseudo-labels to retrain the network. Synthetic stereo corpora with
//! exact ground truth serve as the verification oracle.
//!
//! Module map:
//! - [`imaging`]: raster types, PGM/PPM/PNG/PFM i/o, downscaling, tiling.
//! - [`synthgen`]: synthetic stereo scenes with exact disparity/occlusion GT.
//! - [`unary`]: the learnable data term (conv stack, correlation cost
//!   volume, manual backprop) plus a handcrafted census baseline.
//! - [`crf`]: the pairwise model, energy evaluation, scanline-DP solver,
//!   winner-take-all baseline, exact chain oracle, subpixel refinement.
//! - [`filter`]: left-right consistency filtering.
//! - [`selftrain`]: maximum-likelihood training on pseudo-labels and the
//!   outer generate/filter/retrain loop.
//! - [`eval`]: recall, accuracy-at-threshold, depth conversion, model
//!   comparison tables.

pub mod crf;
pub mod error;
pub mod eval;
pub mod filter;
pub mod imaging;
pub mod seeding;
pub mod selftrain;
pub mod synthgen;
pub mod unary;

pub use crf::{DisparityMap, EnergyBreakdown, PairwiseModel, PenaltyKind};
pub use error::{Error, ErrorClass, Result};
pub use eval::{CameraGeometry, EvalReport};
pub use filter::ConsistencyConfig;
pub use imaging::{Image, ImagePair, Tile};
pub use selftrain::{SelfTrainConfig, TrainConfig};
pub use synthgen::{CorpusSpec, SyntheticScene};
pub use unary::{ConvLayer, CostVolume, FeatureMap, UnaryModel};
