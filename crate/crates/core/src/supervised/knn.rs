//! k-nearest-neighbours over any distance kind.

use crate::data::{ClassLabels, Collection, LabelVector};
use crate::distances::{cross_distances, DistanceSpec};
use crate::error::{Error, Result};
use crate::estimator::{fit_guard, guard_predict, CollectionEstimator, Estimator, EstimatorState, LengthRule, TagSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Uniform,
    /// Votes weighted by `1 / (d + 1e-8)`.
    InverseDistance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    pub spec: DistanceSpec,
    pub weighting: Weighting,
}

impl KnnConfig {
    pub fn new(k: usize, spec: DistanceSpec) -> Self {
        Self {
            k,
            spec,
            weighting: Weighting::Uniform,
        }
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }
}

/// Classifier or regressor depending on the label kind seen at fit.
#[derive(Debug, Clone)]
pub struct KNeighbors {
    config: KnnConfig,
    state: EstimatorState,
    train: Option<(Collection, LabelVector)>,
}

impl KNeighbors {
    pub fn new(config: KnnConfig) -> Self {
        Self {
            config,
            state: EstimatorState::new(),
            train: None,
        }
    }

    pub fn config(&self) -> &KnnConfig {
        &self.config
    }

    fn length_rule(&self) -> LengthRule {
        if self.config.spec.kind.is_lockstep() {
            LengthRule::Exact
        } else {
            LengthRule::Any
        }
    }

    /// Indices of the `k` nearest training cases; ties go to the lower index.
    fn neighbours(&self, row: &[f64]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        order.truncate(self.config.k);
        order
    }

    fn weight(&self, d: f64) -> f64 {
        match self.config.weighting {
            Weighting::Uniform => 1.0,
            Weighting::InverseDistance => 1.0 / (d + 1e-8),
        }
    }
}

impl Estimator for KNeighbors {
    fn name(&self) -> &'static str {
        "knn"
    }

    fn tags(&self) -> TagSet {
        TagSet::new(true, self.config.spec.kind.is_elastic())
    }
}

impl CollectionEstimator for KNeighbors {
    fn fit(&mut self, x: &Collection, labels: &LabelVector) -> Result<()> {
        self.config.spec.validate()?;
        if labels.kind() == crate::data::LabelKind::None {
            return Err(Error::KindMismatch("k-NN needs class or target labels".into()));
        }
        if x.n_cases() == 0 {
            return Err(Error::EmptyCollection);
        }
        labels.check_len(x.n_cases())?;
        if self.config.k == 0 || self.config.k > x.n_cases() {
            return Err(Error::invalid(format!(
                "k = {} must lie in 1..={}",
                self.config.k,
                x.n_cases()
            )));
        }
        let mut state = EstimatorState::new();
        fit_guard(&mut state, &self.tags(), x)?;
        self.state = state;
        self.train = Some((x.clone(), labels.clone()));
        Ok(())
    }

    fn predict(&self, x: &Collection) -> Result<LabelVector> {
        guard_predict(&self.state, &self.tags(), x, self.length_rule())?;
        let (train, labels) = self.train.as_ref().ok_or(Error::NotFitted)?;
        let dists = cross_distances(x, train, &self.config.spec)?;
        match labels {
            LabelVector::Class(c) => {
                let codes = dists
                    .iter()
                    .map(|row| {
                        let mut votes = vec![0.0; c.n_classes()];
                        for j in self.neighbours(row) {
                            votes[c.codes()[j]] += self.weight(row[j]);
                        }
                        super::ridge::argmax(&votes)
                    })
                    .collect();
                Ok(LabelVector::Class(ClassLabels::new(c.alphabet().to_vec(), codes)?))
            }
            LabelVector::Target(t) => Ok(LabelVector::Target(
                dists
                    .iter()
                    .map(|row| {
                        let (mut num, mut den) = (0.0, 0.0);
                        for j in self.neighbours(row) {
                            let w = self.weight(row[j]);
                            num += w * t[j];
                            den += w;
                        }
                        num / den
                    })
                    .collect(),
            )),
            LabelVector::None => unreachable!("rejected at fit"),
        }
    }

    fn is_fitted(&self) -> bool {
        self.state.is_fitted()
    }
}
