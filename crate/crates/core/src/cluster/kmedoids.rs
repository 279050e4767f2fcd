use super::{assign, check_k, cluster_labels, random_cases, ClusterResult};
use crate::data::{Collection, LabelVector};
use crate::distances::{pairwise, DistanceMatrix, DistanceSpec};
use crate::error::{Error, Result};
use crate::estimator::{fit_guard, guard_predict, CollectionEstimator, Estimator, EstimatorState, LengthRule, TagSet};

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoidsConfig {
    pub k: usize,
    pub spec: DistanceSpec,
    pub max_iter: usize,
    pub seed: u64,
}

impl KMedoidsConfig {
    pub fn new(k: usize, spec: DistanceSpec) -> Self {
        Self {
            k,
            spec,
            max_iter: 50,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn tags(&self) -> TagSet {
        TagSet::new(true, self.spec.kind.is_elastic())
    }
}

/// Nearest medoid per case (ties to the lowest cluster). A medoid always
/// stays in its own cluster, even when another medoid is at distance 0.
fn assign_to_medoids(d: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(d.n());
    let mut inertia = 0.0;
    for i in 0..d.n() {
        let label = match medoids.iter().position(|&m| m == i) {
            Some(own) => own,
            None => {
                let mut best = 0;
                for (c, &m) in medoids.iter().enumerate() {
                    if d.get(i, m) < d.get(i, medoids[best]) {
                        best = c;
                    }
                }
                best
            }
        };
        inertia += d.get(i, medoids[label]);
        labels.push(label);
    }
    (labels, inertia)
}

/// Member minimising the summed distance to the other members. The current
/// medoid is kept unless another member is strictly cheaper; remaining ties go
/// to the lowest case index.
fn best_medoid(d: &DistanceMatrix, members: &[usize], current: usize) -> usize {
    let cost = |c: usize| members.iter().map(|&j| d.get(c, j)).sum::<f64>();
    let mut best = current;
    let mut best_cost = cost(current);
    for &c in members {
        let v = cost(c);
        if v < best_cost {
            best = c;
            best_cost = v;
        }
    }
    best
}

/// Alternates assignment and per-cluster medoid updates over the pairwise
/// distance matrix until the labels stop changing. An update whose inertia
/// would rise in floating point is discarded and ends the search.
pub fn kmedoids_fit(collection: &Collection, config: &KMedoidsConfig) -> Result<ClusterResult> {
    config.spec.validate()?;
    if collection.n_cases() == 0 {
        return Err(Error::EmptyCollection);
    }
    check_k(config.k, collection.n_cases())?;
    let d = pairwise(collection, &config.spec)?;
    let mut medoids = random_cases(d.n(), config.k, config.seed);
    let (mut labels, mut inertia) = assign_to_medoids(&d, &medoids);
    let mut history = vec![inertia];
    let mut n_iter = 0;
    let mut converged = false;
    while n_iter < config.max_iter {
        let candidate: Vec<usize> = medoids
            .iter()
            .enumerate()
            .map(|(c, &m)| {
                let members: Vec<usize> = (0..d.n()).filter(|&i| labels[i] == c).collect();
                best_medoid(&d, &members, m)
            })
            .collect();
        let (next, next_inertia) = assign_to_medoids(&d, &candidate);
        n_iter += 1;
        if next_inertia > inertia {
            converged = true;
            break;
        }
        history.push(next_inertia);
        medoids = candidate;
        inertia = next_inertia;
        let stable = next == labels;
        labels = next;
        if stable {
            converged = true;
            break;
        }
    }
    Ok(ClusterResult {
        labels,
        centers: medoids.iter().map(|&m| collection.case(m).to_series()).collect(),
        inertia,
        n_iter,
        converged,
        inertia_history: history,
        medoids: Some(medoids),
    })
}

#[derive(Debug, Clone)]
pub struct KMedoids {
    config: KMedoidsConfig,
    state: EstimatorState,
    result: Option<ClusterResult>,
}

impl KMedoids {
    pub fn new(config: KMedoidsConfig) -> Self {
        Self {
            config,
            state: EstimatorState::new(),
            result: None,
        }
    }

    pub fn result(&self) -> Option<&ClusterResult> {
        self.result.as_ref()
    }
}

impl Estimator for KMedoids {
    fn name(&self) -> &'static str {
        "kmedoids"
    }

    fn tags(&self) -> TagSet {
        self.config.tags()
    }
}

impl CollectionEstimator for KMedoids {
    fn fit(&mut self, x: &Collection, _labels: &LabelVector) -> Result<()> {
        let mut state = EstimatorState::new();
        fit_guard(&mut state, &self.tags(), x)?;
        let result = kmedoids_fit(x, &self.config)?;
        self.state = state;
        self.result = Some(result);
        Ok(())
    }

    fn predict(&self, x: &Collection) -> Result<LabelVector> {
        let rule = if self.config.spec.kind.is_lockstep() {
            LengthRule::Exact
        } else {
            LengthRule::Any
        };
        guard_predict(&self.state, &self.tags(), x, rule)?;
        let result = self.result.as_ref().ok_or(Error::NotFitted)?;
        let (labels, _) = assign(x, &result.centers, &self.config.spec)?;
        cluster_labels(labels, self.config.k)
    }

    fn is_fitted(&self) -> bool {
        self.state.is_fitted()
    }
}
