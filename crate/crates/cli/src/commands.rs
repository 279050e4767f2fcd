use std::str::FromStr;
use std::time::Instant;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::{json, Value};

use tsml::cluster::{kmeans_fit, kmedoids_fit, Averaging, ClusterResult, KMeansConfig, KMedoidsConfig};
use tsml::distances::distance;
use tsml::forecast::{
    forecast_metrics, ForecastHorizon, Forecaster, NaiveForecaster, NaiveStrategy, ReductionForecaster, TrendForecaster,
};
use tsml::pipeline::{make_pipeline, Step};
use tsml::supervised::{accuracy, mae, rmse, KNeighbors, KnnConfig, Rocket, RocketConfig};
use tsml::transform::{PadFill, PadPolicy, PadTarget};
use tsml::{CollectionEstimator, DistanceKind, DistanceSpec, Error, LabelVector, Series};

use crate::input::{load_single, load_ts, parse_plain, read};
use crate::{
    AveragingName, ClassifierName, ClassifyArgs, CliError, ClusterArgs, ClustererName, DistArgs, DistanceArgs,
    ForecastArgs, MethodName, StrategyName,
};

#[derive(Debug, Serialize)]
pub struct RunResult {
    pub command: &'static str,
    pub estimator: String,
    pub params: IndexMap<String, Value>,
    pub metrics: IndexMap<String, f64>,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    pub runtime_ms: f64,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

impl DistanceArgs {
    pub fn spec(&self) -> Result<DistanceSpec, CliError> {
        let kind = DistanceKind::from_str(&self.metric)?;
        let mut spec = DistanceSpec::new(kind);
        spec.window = self.window;
        if let Some(g) = self.g {
            spec.g = g;
        }
        if let Some(e) = self.epsilon {
            spec.epsilon = e;
        }
        if let Some(c) = self.c {
            spec.c = c;
        }
        if let Some(nu) = self.nu {
            spec.nu = nu;
        }
        if let Some(l) = self.lambda {
            spec.lambda = l;
        }
        if let Some(g) = self.erp_g {
            spec.erp_g = g;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// The metric name, window and the parameters the kind actually reads.
fn spec_params(spec: &DistanceSpec, params: &mut IndexMap<String, Value>) {
    params.insert("metric".into(), json!(spec.kind.name()));
    params.insert("window".into(), json!(spec.window));
    match spec.kind {
        DistanceKind::Wdtw | DistanceKind::Wddtw => {
            params.insert("g".into(), json!(spec.g));
        }
        DistanceKind::Erp => {
            params.insert("erp_g".into(), json!(spec.erp_g));
        }
        DistanceKind::Edr | DistanceKind::Lcss => {
            params.insert("epsilon".into(), json!(spec.epsilon));
        }
        DistanceKind::Msm => {
            params.insert("c".into(), json!(spec.c));
        }
        DistanceKind::Twe => {
            params.insert("nu".into(), json!(spec.nu));
            params.insert("lambda".into(), json!(spec.lambda));
        }
        _ => {}
    }
}

pub fn classify(args: &ClassifyArgs, seed: u64) -> Result<RunResult, CliError> {
    let start = Instant::now();
    let (train_x, train_y) = load_ts(&args.train)?;
    let (test_x, test_y) = load_ts(&args.test)?;
    match (&train_y, &test_y) {
        (LabelVector::Class(a), LabelVector::Class(b)) if a.alphabet() != b.alphabet() => {
            return Err(Error::Consistency("train and test class alphabets differ".into()).into())
        }
        (LabelVector::Class(_), LabelVector::Class(_)) | (LabelVector::Target(_), LabelVector::Target(_)) => {}
        _ => return Err(Error::KindMismatch("train and test need matching class or target labels".into()).into()),
    }
    let mut params = IndexMap::new();
    let terminal: Box<dyn CollectionEstimator> = match args.estimator {
        ClassifierName::Rocket => {
            params.insert("kernels".into(), json!(args.kernels));
            Box::new(Rocket::new(RocketConfig::new(args.kernels, seed)))
        }
        ClassifierName::Knn => {
            let spec = args.distance.spec()?;
            params.insert("k".into(), json!(args.k));
            spec_params(&spec, &mut params);
            Box::new(KNeighbors::new(KnnConfig::new(args.k, spec)))
        }
    };
    params.insert("pad".into(), json!(args.pad));
    let name = terminal.name();
    let steps = if args.pad {
        vec![Step::Pad(PadPolicy::new(PadFill::Zero, PadTarget::Auto))]
    } else {
        Vec::new()
    };
    let mut model = make_pipeline(steps, terminal);
    model.fit(&train_x, &train_y)?;
    let predicted = model.predict(&test_x)?;
    let mut metrics = IndexMap::new();
    match test_y {
        LabelVector::Class(_) => {
            metrics.insert("accuracy".into(), accuracy(&predicted, &test_y)?);
        }
        _ => {
            metrics.insert("mae".into(), mae(&predicted, &test_y)?);
            metrics.insert("rmse".into(), rmse(&predicted, &test_y)?);
        }
    }
    Ok(RunResult {
        command: "classify",
        estimator: name.into(),
        params,
        metrics,
        n_train: train_x.n_cases(),
        n_test: test_x.n_cases(),
        seed,
        runtime_ms: elapsed_ms(start),
    })
}

/// Best fraction of cases whose cluster maps to their class, over all
/// one-to-one maps between clusters and classes. `None` past 8 groups.
pub fn permutation_agreement(clusters: &[usize], classes: &[usize]) -> Option<f64> {
    let m = clusters.iter().chain(classes).max()? + 1;
    if m > 8 {
        return None;
    }
    let mut table = vec![vec![0usize; m]; m];
    for (&c, &k) in clusters.iter().zip(classes) {
        table[c][k] += 1;
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let score = p.iter().enumerate().map(|(c, &k)| table[c][k]).sum::<usize>();
        best = best.max(score);
    });
    Some(best as f64 / clusters.len() as f64)
}

fn permute(perm: &mut [usize], from: usize, visit: &mut impl FnMut(&[usize])) {
    if from == perm.len() {
        visit(perm);
        return;
    }
    for i in from..perm.len() {
        perm.swap(from, i);
        permute(perm, from + 1, visit);
        perm.swap(from, i);
    }
}

pub fn cluster(args: &ClusterArgs, seed: u64) -> Result<RunResult, CliError> {
    let start = Instant::now();
    let (x, labels) = load_ts(&args.data)?;
    let spec = args.distance.spec()?;
    let mut params = IndexMap::new();
    params.insert("k".into(), json!(args.k));
    spec_params(&spec, &mut params);
    params.insert("max_iter".into(), json!(args.max_iter));
    let (name, result): (&str, ClusterResult) = match args.algorithm {
        ClustererName::Kmeans => {
            let averaging = match args.averaging {
                AveragingName::Mean => Averaging::Arithmetic,
                AveragingName::Dba => Averaging::Dba,
            };
            params.insert(
                "averaging".into(),
                json!(match args.averaging {
                    AveragingName::Mean => "mean",
                    AveragingName::Dba => "dba",
                }),
            );
            let config = KMeansConfig::new(args.k, spec, averaging)
                .with_seed(seed)
                .with_max_iter(args.max_iter);
            ("kmeans", kmeans_fit(&x, &config)?)
        }
        ClustererName::Kmedoids => {
            let config = KMedoidsConfig::new(args.k, spec)
                .with_seed(seed)
                .with_max_iter(args.max_iter);
            ("kmedoids", kmedoids_fit(&x, &config)?)
        }
    };
    let mut metrics = IndexMap::new();
    metrics.insert("inertia".into(), result.inertia);
    metrics.insert("n_iter".into(), result.n_iter as f64);
    metrics.insert("converged".into(), if result.converged { 1.0 } else { 0.0 });
    if let Some(agreement) = labels
        .as_class()
        .and_then(|c| permutation_agreement(&result.labels, c.codes()))
    {
        metrics.insert("agreement".into(), agreement);
    }
    Ok(RunResult {
        command: "cluster",
        estimator: name.into(),
        params,
        metrics,
        n_train: x.n_cases(),
        n_test: 0,
        seed,
        runtime_ms: elapsed_ms(start),
    })
}

pub fn parse_horizon(text: &str) -> Result<ForecastHorizon, CliError> {
    let offsets = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad horizon entry '{t}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ForecastHorizon::new(offsets)?)
}

pub fn forecast(args: &ForecastArgs, seed: u64) -> Result<RunResult, CliError> {
    let start = Instant::now();
    let fh = parse_horizon(&args.fh)?;
    let y = parse_plain(&read(&args.series)?)?;
    let holdout = args.holdout.unwrap_or(0);
    let n = y.n_timepoints();
    if holdout >= n {
        return Err(CliError::Usage(format!(
            "holdout {holdout} leaves no training points out of {n}"
        )));
    }
    let train = Series::univariate(y.channel(0)[..n - holdout].to_vec())?;
    let mut params = IndexMap::new();
    params.insert(
        "method".into(),
        json!(match args.method {
            MethodName::Naive => "naive",
            MethodName::Trend => "trend",
            MethodName::Reduce => "reduce",
        }),
    );
    let mut forecaster: Box<dyn Forecaster> = match args.method {
        MethodName::Naive => {
            let strategy = match args.strategy {
                StrategyName::Last => NaiveStrategy::Last,
                StrategyName::Mean => NaiveStrategy::Mean,
                StrategyName::Seasonal => NaiveStrategy::SeasonalLast(
                    args.sp
                        .ok_or_else(|| CliError::Usage("--sp is required for the seasonal strategy".into()))?,
                ),
            };
            params.insert(
                "strategy".into(),
                json!(match args.strategy {
                    StrategyName::Last => "last",
                    StrategyName::Mean => "mean",
                    StrategyName::Seasonal => "seasonal",
                }),
            );
            if let NaiveStrategy::SeasonalLast(sp) = strategy {
                params.insert("sp".into(), json!(sp));
            }
            Box::new(NaiveForecaster::new(strategy))
        }
        MethodName::Trend => {
            params.insert("degree".into(), json!(args.degree));
            Box::new(TrendForecaster::new(args.degree))
        }
        MethodName::Reduce => {
            params.insert("window".into(), json!(args.window));
            Box::new(ReductionForecaster::new(args.window))
        }
    };
    params.insert("fh".into(), json!(fh.offsets()));
    params.insert("holdout".into(), json!(args.holdout));
    forecaster.fit(&train)?;
    let predicted = forecaster.predict(&fh)?;
    let mut metrics = IndexMap::new();
    for (h, v) in fh.offsets().iter().zip(&predicted) {
        metrics.insert(format!("fh_{h}"), *v);
    }
    if holdout > 0 {
        let scored = forecaster.predict(&ForecastHorizon::steps(holdout)?)?;
        let m = forecast_metrics(&y.channel(0)[n - holdout..], &scored, &train)?;
        metrics.insert("mae".into(), m.mae);
        metrics.insert("rmse".into(), m.rmse);
        metrics.insert("smape".into(), m.smape);
        metrics.insert("mase".into(), m.mase);
    }
    Ok(RunResult {
        command: "forecast",
        estimator: forecaster.name().into(),
        params,
        metrics,
        n_train: train.n_timepoints(),
        n_test: holdout,
        seed,
        runtime_ms: elapsed_ms(start),
    })
}

pub fn dist(args: &DistArgs, seed: u64) -> Result<RunResult, CliError> {
    let start = Instant::now();
    let spec = args.distance.spec()?;
    let a = load_single(&args.a)?;
    let b = load_single(&args.b)?;
    let d = distance(a.view(), b.view(), &spec)?;
    let mut params = IndexMap::new();
    spec_params(&spec, &mut params);
    let mut metrics = IndexMap::new();
    metrics.insert("distance".into(), d);
    Ok(RunResult {
        command: "dist",
        estimator: spec.kind.name().into(),
        params,
        metrics,
        n_train: 1,
        n_test: 1,
        seed,
        runtime_ms: elapsed_ms(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_is_permutation_invariant() {
        assert_eq!(permutation_agreement(&[1, 1, 0, 0], &[0, 0, 1, 1]), Some(1.0));
        assert_eq!(permutation_agreement(&[0, 0, 0, 1], &[0, 1, 1, 1]), Some(0.5));
        assert_eq!(permutation_agreement(&[0, 0, 1, 1], &[1, 1, 1, 0]), Some(0.75));
        assert_eq!(permutation_agreement(&[0, 1, 2], &[0, 0, 0]), Some(1.0 / 3.0));
        assert_eq!(permutation_agreement(&[9], &[0]), None);
    }

    #[test]
    fn horizon_parsing() {
        assert_eq!(parse_horizon("1,2, 3").unwrap().offsets(), &[1, 2, 3]);
        assert!(parse_horizon("2,1").is_err());
        assert!(parse_horizon("0").is_err());
        assert!(parse_horizon("a").is_err());
    }
}
