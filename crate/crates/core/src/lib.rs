//! Pointwise predictive-reliability toolkit.
//!
//! `reliakit` decides, per instance, whether a deployed classifier's prediction
//! should be trusted. Two independent checks are fitted against the training
//! data and then applied without it:
//!
//! - **Density check** ([`density`]): an autoencoder is trained to reconstruct
//!   the training distribution; an instance whose reconstruction error exceeds
//!   a threshold is flagged out-of-distribution, hence unreliable.
//! - **Local-fit check** ([`localfit`]): a proxy classifier is trained on
//!   noise-synthesised points labelled by the black-box classifier's accuracy
//!   among their nearest training neighbours; the proxy alone then predicts
//!   whether an instance lies in a locally accurate region.
//!
//! Both fitted models, plus the feature schema, serialize into a single
//! [`bundle::ReliabilityBundle`] that contains no row-level data, so scoring
//! at deployment needs neither the training set nor the original classifier.
//!
//! [`harness`] ships a self-contained 2D simulation (shifted test distribution,
//! reference random forest) used by the integration and acceptance tests.

pub mod bundle;
pub mod data;
pub mod density;
pub mod error;
pub mod harness;
pub mod localfit;
pub mod metrics;
pub mod neighbors;
pub mod nnkit;
pub mod seeding;

pub use error::{Error, Result};
