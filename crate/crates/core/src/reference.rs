//! Published reference values used for reporting.

/// Clustering-coefficient interval where accuracy peaks.
pub const CLUSTERING_SWEET_SPOT: (f64, f64) = (0.839, 0.842);

/// Average-path-length interval where accuracy peaks.
pub const PATH_LENGTH_SWEET_SPOT: (f64, f64) = (1.256, 1.307);

/// Threshold for ViT-Tiny affine graphs (192 channels).
pub const VIT_TINY_AFFINE_TAU: f64 = 1.0 / 192.0;

/// Threshold for ViT-Tiny aggregation graphs (196 patches plus a class token).
pub const VIT_TINY_AGGREGATION_TAU: f64 = 1.0 / 197.0;
