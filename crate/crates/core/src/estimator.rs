//! Estimator lifecycle, capability tags and input validation.
//!
//! Every estimator declares a [`TagSet`]. Before fitting, the input
//! collection is summarised into a [`CollectionMeta`] and checked against
//! those tags; the meta is then frozen into the estimator's
//! [`EstimatorState`] and later inputs are checked against it.

use std::fmt;

use crate::data::{Collection, LabelVector};
use crate::error::{Error, Result};

/// Declarative capabilities of an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TagSet {
    pub multivariate: bool,
    pub unequal_length: bool,
    pub missing_values: bool,
}

impl TagSet {
    pub const fn new(multivariate: bool, unequal_length: bool) -> Self {
        Self {
            multivariate,
            unequal_length,
            missing_values: false,
        }
    }

    pub const fn all() -> Self {
        Self {
            multivariate: true,
            unequal_length: true,
            missing_values: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionMeta {
    pub n_cases: usize,
    pub n_channels: usize,
    pub length_min: usize,
    pub length_max: usize,
    pub is_equal_length: bool,
    pub has_missing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub tag: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn names(&self, tag: &str) -> bool {
        self.violations.iter().any(|v| v.tag == tag)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.tag, v.detail)?;
        }
        Ok(())
    }
}

pub fn summarize(collection: &Collection) -> Result<CollectionMeta> {
    let lengths = collection.lengths();
    let length_min = *lengths.iter().min().ok_or(Error::EmptyCollection)?;
    let length_max = *lengths.iter().max().ok_or(Error::EmptyCollection)?;
    Ok(CollectionMeta {
        n_cases: collection.n_cases(),
        n_channels: collection.n_channels(),
        length_min,
        length_max,
        is_equal_length: length_min == length_max,
        has_missing: collection.raw_values().iter().any(|v| v.is_nan()),
    })
}

pub fn check_capabilities(tags: &TagSet, meta: &CollectionMeta) -> ValidationReport {
    let mut violations = Vec::new();
    if meta.n_channels > 1 && !tags.multivariate {
        violations.push(Violation {
            tag: "multivariate",
            detail: format!("{} channels given to a univariate estimator", meta.n_channels),
        });
    }
    if !meta.is_equal_length && !tags.unequal_length {
        violations.push(Violation {
            tag: "unequal_length",
            detail: format!(
                "case lengths range over {}..={} but estimator requires equal length",
                meta.length_min, meta.length_max
            ),
        });
    }
    if meta.has_missing && !tags.missing_values {
        violations.push(Violation {
            tag: "missing_values",
            detail: "input contains missing values".into(),
        });
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Unfitted,
    Fitted,
}

/// How strictly predict-time lengths must follow the fitted lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthRule {
    Any,
    /// Fixed-length models: every new case must have the fitted length.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatorState {
    phase: Phase,
    fitted_metadata: Option<CollectionMeta>,
}

impl Default for EstimatorState {
    fn default() -> Self {
        Self::new()
    }
}

impl EstimatorState {
    pub fn new() -> Self {
        Self {
            phase: Phase::Unfitted,
            fitted_metadata: None,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_fitted(&self) -> bool {
        self.phase == Phase::Fitted
    }

    pub fn fitted_metadata(&self) -> Option<&CollectionMeta> {
        self.fitted_metadata.as_ref()
    }

    pub fn reset(&mut self) {
        *self = Self::new();
    }
}

/// Summarises and validates `collection`, then records it as the fitted
/// schema. Re-fitting overwrites any previous state.
pub fn fit_guard(state: &mut EstimatorState, tags: &TagSet, collection: &Collection) -> Result<CollectionMeta> {
    let meta = summarize(collection)?;
    let report = check_capabilities(tags, &meta);
    if !report.ok() {
        return Err(Error::Capability(report));
    }
    state.phase = Phase::Fitted;
    state.fitted_metadata = Some(meta.clone());
    Ok(meta)
}

pub fn predict_guard(state: &EstimatorState, meta_new: &CollectionMeta, rule: LengthRule) -> Result<()> {
    let fitted = match (state.phase, &state.fitted_metadata) {
        (Phase::Fitted, Some(m)) => m,
        _ => return Err(Error::NotFitted),
    };
    let mismatch = || Error::SchemaMismatch {
        fitted: Box::new(fitted.clone()),
        found: Box::new(meta_new.clone()),
    };
    if meta_new.n_channels != fitted.n_channels {
        return Err(mismatch());
    }
    if rule == LengthRule::Exact
        && !(meta_new.is_equal_length && fitted.is_equal_length && meta_new.length_min == fitted.length_min)
    {
        return Err(mismatch());
    }
    Ok(())
}

/// Checks the predict-time collection against the fitted schema and returns its meta.
pub(crate) fn guard_predict(
    state: &EstimatorState,
    tags: &TagSet,
    x: &Collection,
    rule: LengthRule,
) -> Result<CollectionMeta> {
    if !state.is_fitted() {
        return Err(Error::NotFitted);
    }
    let meta = summarize(x)?;
    predict_guard(state, &meta, rule)?;
    let report = check_capabilities(tags, &meta);
    if !report.ok() {
        return Err(Error::Capability(report));
    }
    Ok(meta)
}

pub trait Estimator {
    fn name(&self) -> &'static str;
    fn tags(&self) -> TagSet;
}

/// The shared fit/predict interface of collection estimators
/// (classifiers, regressors and clusterers).
pub trait CollectionEstimator: Estimator + Send + Sync {
    /// Clusterers ignore `labels`.
    fn fit(&mut self, x: &Collection, labels: &LabelVector) -> Result<()>;

    fn predict(&self, x: &Collection) -> Result<LabelVector>;

    fn is_fitted(&self) -> bool;
}
