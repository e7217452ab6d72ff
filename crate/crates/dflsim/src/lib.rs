//! Deterministic desk-scale simulator for studying backdoor attacks in
//! decentralized federated learning (DFL).
//!
//! Clients sit on a communication graph and train local models, exchanging
//! parameters only with graph neighbors (synchronous gossip averaging or a
//! simplified asynchronous variant). On top of that substrate the crate
//! implements three trigger-poisoning strategies:
//!
//! - a centralized attack where every adversary stamps the full trigger,
//! - a naive distributed attack where the trigger is split once across all
//!   adversaries,
//! - a cluster-based distributed attack that first infers pairwise hop
//!   distances between adversaries from poison-accuracy signal sequences,
//!   groups them with k-medoids, and then rotates trigger fragments inside
//!   each cluster every round.
//!
//! Everything is seeded: a run is a pure function of its configuration, and
//! repeated runs produce byte-identical metrics files.
//!
//! The library surface is organized by subsystem:
//!
//! - [`topology`] — communication graphs, hop distances, gossip mixing weights
//! - [`nn`] — flat-parameter MLP classifier and LSTM regressor with explicit
//!   gradients and plain SGD
//! - [`data`] — dataset loading/synthesis, client sharding, triggers and
//!   signature images
//! - [`sim`] — the round-based simulation engine and its metrics log
//! - [`attack`] — poisoned batches, signature training, distance-matrix
//!   construction, k-medoids clustering, trigger assignment, ASR evaluation
//! - [`regressor`] — the distance-prediction pipeline (sample generation,
//!   training, evaluation, checkpointing)
//! - [`defense`] — aggregation-time defense hooks (norm clipping,
//!   neighbor-median)
//! - [`experiment`] — config files, presets, experiment/sweep runners
//!
//! See the `examples/` directory for one runnable program per capability, and
//! the `dflsim` binary for the config-driven experiment runner.

pub mod attack;
pub mod data;
pub mod defense;
pub mod error;
pub mod experiment;
pub mod nn;
pub mod regressor;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
