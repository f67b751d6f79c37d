//! Spectral classification, complex root finding and ensemble experiments.

pub mod classify;
pub mod roots;
pub mod stats;
pub mod transition;

pub use classify::{classify_spectrum, SpectrumClassification, Tolerances};
pub use roots::{
    find_poles, find_zeros, gain_threshold, grid_seeds, laser_threshold, newton_roots, Region,
    Root, RootOptions, RootReport, Threshold,
};
pub use transition::{
    imbalance_distribution, transition_scan, ImbalanceConfig, ImbalanceReport, ScaleReport,
    TransitionConfig,
    TransitionPoint, TransitionScan,
};
