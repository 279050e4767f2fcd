//! Time series machine learning toolkit.
//!
//! Estimators share a fit/predict lifecycle driven by capability tags
//! ([`estimator`]), operate on the collection data model in [`data`], and
//! build on the elastic distances in [`distances`] and transformers in
//! [`transform`]. Task modules cover classification and extrinsic
//! regression ([`supervised`]), clustering ([`cluster`]) and forecasting
//! ([`forecast`]); [`pipeline`] composes transformers with an estimator.
//!
//! Data-parallel loops (pairwise distances, neighbour search, kernel
//! transforms, cluster assignment) run on rayon when the default
//! `parallel` feature is enabled and sequentially otherwise. Both paths
//! produce identical results.

pub mod cluster;
pub mod data;
pub mod distances;
pub mod error;
pub mod estimator;
pub mod forecast;
mod par;
pub mod pipeline;
pub mod supervised;
pub mod transform;

pub use data::{ClassLabels, Collection, LabelKind, LabelVector, Layout, Series, SeriesView};
pub use distances::{DistanceKind, DistanceSpec};
pub use error::{Error, Result};
pub use estimator::{CollectionEstimator, Estimator, TagSet};
