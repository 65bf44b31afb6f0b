//! Entangled coherent-state key distribution over lossy fiber.
//!
//! The source emits `N/√2 (|α e^{iφ}⟩_A |α e^{-iφ}⟩_B + e^{iθ} |α e^{-iφ}⟩_A |α e^{iφ}⟩_B)`.
//! This crate propagates it through fiber loss and an asymmetric Gaussian cloner on Bob's
//! arm, and evaluates
//!
//! * the third-order entanglement witness 𝒮 ([`moments`]),
//! * the covariance-matrix witness 𝒲 and the distances where it crosses a threshold
//!   ([`covariance`], [`crossing`]),
//! * Gaussian mutual information and the key rate ([`info`]).
//!
//! Every closed form is checked against two brute-force references in [`oracles`].
//! Quadratures are `q = (a + a†)/2`, `p = (a - a†)/(2i)`, so the vacuum variance is ¼.

pub mod covariance;
pub mod crossing;
pub mod error;
pub mod exec;
pub mod info;
pub mod model;
pub mod moments;
pub mod notes;
pub mod oracles;
pub mod sweep;

pub use covariance::{
    apply_cloner_to_covariance, covariance_matrix, covariance_matrix_exact, covariance_with, witness_w,
    CovarianceForm, CovarianceMatrix,
};
pub use crossing::{crossing_closed_forms, crossing_distance_numeric, gamma_threshold, CrossingOptions, CrossingReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use info::{
    entropy_h, eve_information_and_key_rate, mutual_information, symplectic_eigenvalues, InfoReport, SymplecticPair,
};
pub use model::{
    cloner_variances, normalization_sq, photon_decay_distance, propagate_amplitude, Amplitude, ClonerParams,
    LinkParams, LinkTemplate, LossModel, SourceParams, SplitMode, DEFAULT_LOSS_PER_KM,
};
pub use moments::{
    apply_cloner_to_moments, entanglement_witness, moment_set, witness_s, MomentSet, Powers, SignedLog,
    WitnessKind, WitnessValue,
};
