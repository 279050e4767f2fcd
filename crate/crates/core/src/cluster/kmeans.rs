use super::{assign, assign_detailed, check_k, cluster_labels, dba, random_cases, ClusterResult};
use crate::data::{Collection, LabelVector, Series};
use crate::distances::{DistanceKind, DistanceSpec};
use crate::error::{Error, Result};
use crate::estimator::{
    check_capabilities, fit_guard, guard_predict, summarize, CollectionEstimator, Estimator, EstimatorState,
    LengthRule, TagSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Pointwise mean; needs equal-length members.
    Arithmetic,
    /// Barycentre averaging; needs a dtw or wdtw spec.
    Dba,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    RandomCases,
    Provided(Vec<Series>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub spec: DistanceSpec,
    pub averaging: Averaging,
    pub max_iter: usize,
    pub tol: f64,
    pub dba_iter: usize,
    pub init: Init,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, spec: DistanceSpec, averaging: Averaging) -> Self {
        Self {
            k,
            spec,
            averaging,
            max_iter: 50,
            tol: 1e-9,
            dba_iter: 10,
            init: Init::RandomCases,
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

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn tags(&self) -> TagSet {
        TagSet::new(true, self.averaging == Averaging::Dba)
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.averaging == Averaging::Dba && !matches!(self.spec.kind, DistanceKind::Dtw | DistanceKind::Wdtw) {
            return Err(Error::InvalidSpec(format!(
                "barycentre averaging needs dtw or wdtw, got {}",
                self.spec.kind
            )));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::invalid("tol must be non-negative"));
        }
        Ok(())
    }
}

fn pointwise_mean(members: &[&Series]) -> Result<Series> {
    let first = members[0];
    let mut values = vec![0.0; first.values().len()];
    for m in members {
        for (acc, v) in values.iter_mut().zip(m.values()) {
            *acc += v;
        }
    }
    let n = members.len() as f64;
    values.iter_mut().for_each(|v| *v /= n);
    Series::from_flat(first.n_channels(), first.n_timepoints(), values)
}

/// New centres from the current assignment. Empty clusters take the case
/// farthest from its centre, each case used at most once.
fn update_centers(
    cases: &[Series],
    labels: &[usize],
    dists: &[f64],
    centers: &[Series],
    config: &KMeansConfig,
) -> Result<Vec<Series>> {
    let mut spare = dists.to_vec();
    let mut out = Vec::with_capacity(centers.len());
    for (c, center) in centers.iter().enumerate() {
        let members: Vec<usize> = (0..cases.len()).filter(|&i| labels[i] == c).collect();
        if members.is_empty() {
            let mut far = 0;
            for (i, &d) in spare.iter().enumerate() {
                if d > spare[far] {
                    far = i;
                }
            }
            spare[far] = f64::NEG_INFINITY;
            out.push(cases[far].clone());
            continue;
        }
        let next = match config.averaging {
            Averaging::Arithmetic => pointwise_mean(&members.iter().map(|&i| &cases[i]).collect::<Vec<_>>())?,
            Averaging::Dba => {
                let group = Collection::ragged(&members.iter().map(|&i| cases[i].clone()).collect::<Vec<_>>())?;
                dba(&group, center, &config.spec, config.dba_iter)?
            }
        };
        out.push(next);
    }
    Ok(out)
}

/// Lloyd-style k-means: assign, recompute centres, and stop once inertia
/// improves by less than `tol` or after `max_iter` updates.
pub fn kmeans_fit(collection: &Collection, config: &KMeansConfig) -> Result<ClusterResult> {
    config.validate()?;
    let meta = summarize(collection)?;
    let report = check_capabilities(&config.tags(), &meta);
    if !report.ok() {
        return Err(Error::Capability(report));
    }
    check_k(config.k, collection.n_cases())?;
    let cases = collection.to_series();
    let mut centers = match &config.init {
        Init::RandomCases => random_cases(cases.len(), config.k, config.seed)
            .into_iter()
            .map(|i| cases[i].clone())
            .collect(),
        Init::Provided(c) => {
            if c.len() != config.k {
                return Err(Error::invalid(format!(
                    "{} centres provided for k = {}",
                    c.len(),
                    config.k
                )));
            }
            c.clone()
        }
    };
    let (mut labels, mut dists) = assign_detailed(collection, &centers, &config.spec)?;
    let mut inertia: f64 = dists.iter().sum();
    let mut history = vec![inertia];
    let mut n_iter = 0;
    let mut converged = false;
    while n_iter < config.max_iter {
        centers = update_centers(&cases, &labels, &dists, &centers, config)?;
        (labels, dists) = assign_detailed(collection, &centers, &config.spec)?;
        n_iter += 1;
        let next: f64 = dists.iter().sum();
        history.push(next);
        let improvement = inertia - next;
        inertia = next;
        if improvement < config.tol {
            converged = true;
            break;
        }
    }
    Ok(ClusterResult {
        labels,
        centers,
        inertia,
        n_iter,
        converged,
        inertia_history: history,
        medoids: None,
    })
}

#[derive(Debug, Clone)]
pub struct KMeans {
    config: KMeansConfig,
    state: EstimatorState,
    result: Option<ClusterResult>,
}

impl KMeans {
    pub fn new(config: KMeansConfig) -> Self {
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

impl Estimator for KMeans {
    fn name(&self) -> &'static str {
        "kmeans"
    }

    fn tags(&self) -> TagSet {
        self.config.tags()
    }
}

impl CollectionEstimator for KMeans {
    fn fit(&mut self, x: &Collection, _labels: &LabelVector) -> Result<()> {
        let mut state = EstimatorState::new();
        fit_guard(&mut state, &self.tags(), x)?;
        let result = kmeans_fit(x, &self.config)?;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_blobs;
    use crate::distances::distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_cluster_is_the_mean() {
        let c = Collection::from_rows(&[vec![0.0, 2.0], vec![2.0, 4.0], vec![4.0, 0.0]]).unwrap();
        let r = kmeans_fit(
            &c,
            &KMeansConfig::new(1, DistanceKind::Euclidean.into(), Averaging::Arithmetic),
        )
        .unwrap();
        assert_eq!(r.centers[0].values(), &[2.0, 2.0]);
        assert!(r.converged && r.n_iter <= 2);
        assert_eq!(r.labels, [0, 0, 0]);
    }

    #[test]
    fn dba_recovers_blobs() {
        let (x, y) = make_blobs(10, 1, 20, &[0.0, 10.0], 0.0, 2).unwrap();
        for seed in 0..5 {
            let cfg = KMeansConfig::new(2, DistanceKind::Dtw.into(), Averaging::Dba).with_seed(seed);
            let r = kmeans_fit(&x, &cfg).unwrap();
            assert_eq!(r.inertia, 0.0);
            let codes = y.as_class().unwrap().codes();
            let flip = r.labels[0] != codes[0];
            for (l, c) in r.labels.iter().zip(codes) {
                assert_eq!(*l, if flip { 1 - c } else { *c });
            }
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let (x, _) = make_blobs(6, 2, 12, &[0.0, 1.0, 2.0], 0.7, 4).unwrap();
        let cfg = KMeansConfig::new(3, DistanceKind::Dtw.into(), Averaging::Dba).with_seed(9);
        assert_eq!(kmeans_fit(&x, &cfg).unwrap(), kmeans_fit(&x, &cfg).unwrap());
    }

    #[test]
    fn squared_lloyd_is_monotone_and_inertia_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..20 {
            let rows: Vec<Vec<f64>> = (0..15)
                .map(|_| (0..6).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let c = Collection::from_rows(&rows).unwrap();
            let spec = DistanceSpec::from(DistanceKind::Squared);
            let r = kmeans_fit(&c, &KMeansConfig::new(4, spec, Averaging::Arithmetic).with_seed(seed)).unwrap();
            assert!(r.inertia_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            let direct: f64 = (0..15)
                .map(|i| distance(c.case(i), r.centers[r.labels[i]].view(), &spec).unwrap())
                .sum();
            assert!((direct - r.inertia).abs() < 1e-9);
            assert!(r.labels.iter().all(|&l| l < 4));
        }
    }

    #[test]
    fn empty_cluster_is_reseeded() {
        let c = Collection::from_rows(&[vec![0.0], vec![1.0], vec![10.0]]).unwrap();
        let init = Init::Provided(vec![
            Series::univariate(vec![0.5]).unwrap(),
            Series::univariate(vec![100.0]).unwrap(),
            Series::univariate(vec![10.0]).unwrap(),
        ]);
        let cfg = KMeansConfig::new(3, DistanceKind::Squared.into(), Averaging::Arithmetic).with_init(init);
        let r = kmeans_fit(&c, &cfg).unwrap();
        assert_eq!(r.inertia, 0.0);
        let mut labels = r.labels.clone();
        labels.sort();
        assert_eq!(labels, [0, 1, 2]);
    }

    #[test]
    fn parameter_errors() {
        let c = Collection::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let k3 = KMeansConfig::new(3, DistanceKind::Euclidean.into(), Averaging::Arithmetic);
        assert!(matches!(kmeans_fit(&c, &k3), Err(Error::InvalidParameter(_))));
        let msm = KMeansConfig::new(1, DistanceKind::Msm.into(), Averaging::Dba);
        assert!(matches!(kmeans_fit(&c, &msm), Err(Error::InvalidSpec(_))));
        let ragged = Collection::ragged(&[
            Series::univariate(vec![0.0, 1.0]).unwrap(),
            Series::univariate(vec![1.0]).unwrap(),
        ])
        .unwrap();
        let arith = KMeansConfig::new(1, DistanceKind::Dtw.into(), Averaging::Arithmetic);
        assert!(kmeans_fit(&ragged, &arith).unwrap_err().is_capability());
        let dba_cfg = KMeansConfig::new(1, DistanceKind::Dtw.into(), Averaging::Dba);
        assert!(kmeans_fit(&ragged, &dba_cfg).is_ok());
    }

    #[test]
    fn estimator_predicts_nearest_centre() {
        let (x, _) = make_blobs(5, 1, 10, &[0.0, 10.0], 0.0, 0).unwrap();
        let mut km = KMeans::new(KMeansConfig::new(2, DistanceKind::Dtw.into(), Averaging::Dba));
        km.fit(&x, &LabelVector::None).unwrap();
        let r = km.result().unwrap().clone();
        let pred = km.predict(&x).unwrap();
        assert_eq!(pred.as_class().unwrap().codes(), &r.labels[..]);
        assert_eq!(pred.as_class().unwrap().alphabet(), ["0", "1"]);
    }
}
