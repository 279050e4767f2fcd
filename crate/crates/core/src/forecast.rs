//! Forecasting a single univariate series over a relative horizon.

use nalgebra::{DMatrix, DVector};

use crate::data::{Collection, LabelVector, Series};
use crate::error::{Error, Result};
use crate::supervised::{default_lambda_grid, ridge_fit, RidgeModel};
use crate::transform::sliding_window;

/// Strictly increasing steps ahead of the last training point, all ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForecastHorizon(Vec<usize>);

impl ForecastHorizon {
    pub fn new(offsets: Vec<usize>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("forecast horizon is empty"));
        }
        if offsets[0] == 0 || offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "horizon offsets must be positive and strictly increasing",
            ));
        }
        Ok(Self(offsets))
    }

    /// Offsets `1..=h`.
    pub fn steps(h: usize) -> Result<Self> {
        Self::new((1..=h).collect())
    }

    pub fn offsets(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("non-empty")
    }
}

fn univariate(y: &Series) -> Result<&[f64]> {
    if y.n_channels() != 1 {
        return Err(Error::invalid(format!(
            "forecasting needs a univariate series, got {} channels",
            y.n_channels()
        )));
    }
    if y.n_timepoints() == 0 {
        return Err(Error::InsufficientData("empty series".into()));
    }
    Ok(y.channel(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaiveStrategy {
    Last,
    Mean,
    /// Repeats the last full season of length `sp`.
    SeasonalLast(usize),
}

pub fn naive_forecast(y: &Series, fh: &ForecastHorizon, strategy: NaiveStrategy) -> Result<Vec<f64>> {
    let y = univariate(y)?;
    let n = y.len();
    Ok(match strategy {
        NaiveStrategy::Last => vec![y[n - 1]; fh.offsets().len()],
        NaiveStrategy::Mean => vec![y.iter().sum::<f64>() / n as f64; fh.offsets().len()],
        NaiveStrategy::SeasonalLast(sp) => {
            if sp == 0 || sp > n {
                return Err(Error::invalid(format!("seasonal period {sp} must lie in 1..={n}")));
            }
            fh.offsets().iter().map(|h| y[n - sp + (h - 1) % sp]).collect()
        }
    })
}

/// Polynomial in the time index `0..n_train`, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendModel {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub n_train: usize,
}

impl TrendModel {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Least-squares polynomial fit of `y` against its index.
pub fn trend_fit(y: &Series, degree: usize) -> Result<TrendModel> {
    let y = univariate(y)?;
    let n = y.len();
    if n < degree + 1 {
        return Err(Error::InsufficientData(format!(
            "degree {degree} needs at least {} points, got {n}",
            degree + 1
        )));
    }
    let a = DMatrix::from_fn(n, degree + 1, |t, d| (t as f64).powi(d as i32));
    let b = DVector::from_column_slice(y);
    let coef = a
        .svd(true, true)
        .solve(&b, f64::EPSILON)
        .map_err(|e| Error::InsufficientData(e.to_string()))?;
    Ok(TrendModel {
        degree,
        coefficients: coef.iter().copied().collect(),
        n_train: n,
    })
}

pub fn trend_predict(model: &TrendModel, fh: &ForecastHorizon) -> Vec<f64> {
    let last = (model.n_train - 1) as f64;
    fh.offsets().iter().map(|&h| model.evaluate(last + h as f64)).collect()
}

/// Autoregression on the previous `window` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionModel {
    pub window: usize,
    pub inner: RidgeModel,
    pub last_window: Vec<f64>,
}

/// Training pairs `(y[t-window..t], y[t])` for `t` in `window..n`.
pub fn reduction_pairs(y: &Series, window: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let values = univariate(y)?;
    let n = values.len();
    if window == 0 || n < window + 1 {
        return Err(Error::InsufficientData(format!(
            "window {window} needs at least {} points, got {n}",
            window + 1
        )));
    }
    let head = Series::univariate(values[..n - 1].to_vec())?;
    let windows: Collection = sliding_window(head.view(), window, 1)?;
    let features = windows.cases().map(|c| c.channel(0).to_vec()).collect();
    Ok((features, values[window..].to_vec()))
}

pub fn reduce_fit(y: &Series, window: usize, lambda_grid: &[f64]) -> Result<ReductionModel> {
    let (features, targets) = reduction_pairs(y, window)?;
    let inner = ridge_fit(&features, &LabelVector::Target(targets), lambda_grid)?;
    let values = y.channel(0);
    Ok(ReductionModel {
        window,
        inner,
        last_window: values[values.len() - window..].to_vec(),
    })
}

/// Recursive multi-step forecasts: each prediction is appended to the
/// rolling window before the next step.
pub fn reduce_predict(model: &ReductionModel, fh: &ForecastHorizon) -> Result<Vec<f64>> {
    let mut window = model.last_window.clone();
    let mut path = Vec::with_capacity(fh.max());
    for _ in 0..fh.max() {
        let next = model.inner.scores(&window)?[0];
        window.remove(0);
        window.push(next);
        path.push(next);
    }
    Ok(fh.offsets().iter().map(|&h| path[h - 1]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastMetrics {
    pub mae: f64,
    pub rmse: f64,
    pub smape: f64,
    pub mase: f64,
}

/// Error metrics of `predicted` against `actual`; MASE is scaled by the
/// mean absolute one-step difference of `train`.
pub fn forecast_metrics(actual: &[f64], predicted: &[f64], train: &Series) -> Result<ForecastMetrics> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::InsufficientData("no forecasts to score".into()));
    }
    let train = univariate(train)?;
    let n = actual.len() as f64;
    let pairs = || actual.iter().zip(predicted);
    let mae = pairs().map(|(a, p)| (a - p).abs()).sum::<f64>() / n;
    let rmse = (pairs().map(|(a, p)| (a - p) * (a - p)).sum::<f64>() / n).sqrt();
    let smape = pairs()
        .map(|(a, p)| {
            let denom = a.abs() + p.abs();
            if denom == 0.0 {
                0.0
            } else {
                2.0 * (a - p).abs() / denom
            }
        })
        .sum::<f64>()
        / n;
    if train.len() < 2 {
        return Err(Error::DegenerateScale);
    }
    let scale = train.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (train.len() - 1) as f64;
    if scale == 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok(ForecastMetrics {
        mae,
        rmse,
        smape,
        mase: mae / scale,
    })
}

/// Shared fit/predict lifecycle of the forecasters.
pub trait Forecaster {
    fn name(&self) -> &'static str;
    fn fit(&mut self, y: &Series) -> Result<()>;
    fn predict(&self, fh: &ForecastHorizon) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone)]
pub struct NaiveForecaster {
    strategy: NaiveStrategy,
    train: Option<Series>,
}

impl NaiveForecaster {
    pub fn new(strategy: NaiveStrategy) -> Self {
        Self { strategy, train: None }
    }
}

impl Forecaster for NaiveForecaster {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn fit(&mut self, y: &Series) -> Result<()> {
        univariate(y)?;
        if let NaiveStrategy::SeasonalLast(sp) = self.strategy {
            if sp == 0 || sp > y.n_timepoints() {
                return Err(Error::invalid(format!(
                    "seasonal period {sp} must lie in 1..={}",
                    y.n_timepoints()
                )));
            }
        }
        self.train = Some(y.clone());
        Ok(())
    }

    fn predict(&self, fh: &ForecastHorizon) -> Result<Vec<f64>> {
        naive_forecast(self.train.as_ref().ok_or(Error::NotFitted)?, fh, self.strategy)
    }
}

#[derive(Debug, Clone)]
pub struct TrendForecaster {
    degree: usize,
    model: Option<TrendModel>,
}

impl TrendForecaster {
    pub fn new(degree: usize) -> Self {
        Self { degree, model: None }
    }

    pub fn model(&self) -> Option<&TrendModel> {
        self.model.as_ref()
    }
}

impl Forecaster for TrendForecaster {
    fn name(&self) -> &'static str {
        "trend"
    }

    fn fit(&mut self, y: &Series) -> Result<()> {
        self.model = Some(trend_fit(y, self.degree)?);
        Ok(())
    }

    fn predict(&self, fh: &ForecastHorizon) -> Result<Vec<f64>> {
        Ok(trend_predict(self.model.as_ref().ok_or(Error::NotFitted)?, fh))
    }
}

#[derive(Debug, Clone)]
pub struct ReductionForecaster {
    window: usize,
    lambda_grid: Vec<f64>,
    model: Option<ReductionModel>,
}

impl ReductionForecaster {
    pub fn new(window: usize) -> Self {
        Self {
            window,
            lambda_grid: default_lambda_grid(),
            model: None,
        }
    }

    pub fn with_lambda_grid(mut self, grid: Vec<f64>) -> Self {
        self.lambda_grid = grid;
        self
    }

    pub fn model(&self) -> Option<&ReductionModel> {
        self.model.as_ref()
    }
}

impl Forecaster for ReductionForecaster {
    fn name(&self) -> &'static str {
        "reduce"
    }

    fn fit(&mut self, y: &Series) -> Result<()> {
        self.model = Some(reduce_fit(y, self.window, &self.lambda_grid)?);
        Ok(())
    }

    fn predict(&self, fh: &ForecastHorizon) -> Result<Vec<f64>> {
        reduce_predict(self.model.as_ref().ok_or(Error::NotFitted)?, fh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Series {
        Series::univariate(v.to_vec()).unwrap()
    }

    fn fh(v: &[usize]) -> ForecastHorizon {
        ForecastHorizon::new(v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn horizon_validation() {
        assert!(ForecastHorizon::new(vec![]).is_err());
        assert!(ForecastHorizon::new(vec![0, 1]).is_err());
        assert!(ForecastHorizon::new(vec![2, 1]).is_err());
        assert!(ForecastHorizon::new(vec![1, 1]).is_err());
        assert_eq!(ForecastHorizon::steps(3).unwrap().offsets(), &[1, 2, 3]);
    }

    #[test]
    fn naive_strategies() {
        assert_eq!(
            naive_forecast(&s(&[5.0, 7.0]), &fh(&[1, 2]), NaiveStrategy::Last).unwrap(),
            [7.0, 7.0]
        );
        assert_eq!(
            naive_forecast(&s(&[1.0, 2.0, 3.0, 4.0]), &fh(&[1, 2]), NaiveStrategy::SeasonalLast(2)).unwrap(),
            [3.0, 4.0]
        );
        assert_eq!(
            naive_forecast(&s(&[1.0, 2.0, 3.0, 4.0]), &fh(&[3, 5]), NaiveStrategy::SeasonalLast(3)).unwrap(),
            [4.0, 3.0]
        );
        assert_eq!(
            naive_forecast(&s(&[2.0, 4.0]), &fh(&[1]), NaiveStrategy::Mean).unwrap(),
            [3.0]
        );
        assert!(naive_forecast(&s(&[1.0]), &fh(&[1]), NaiveStrategy::SeasonalLast(2)).is_err());
    }

    #[test]
    fn trend_examples() {
        let m = trend_fit(&s(&[1.0, 2.0, 3.0]), 1).unwrap();
        assert!(close(&m.coefficients, &[1.0, 1.0], 1e-10));
        assert!(close(&trend_predict(&m, &fh(&[1, 2, 3])), &[4.0, 5.0, 6.0], 1e-9));
        let flat = trend_fit(&s(&[2.0, 2.0]), 0).unwrap();
        assert!(close(&trend_predict(&flat, &fh(&[1])), &[2.0], 1e-12));
        let q = trend_fit(&s(&[0.0, 1.0, 4.0, 9.0]), 2).unwrap();
        assert!(close(&trend_predict(&q, &fh(&[1])), &[16.0], 1e-8));
        assert!(matches!(trend_fit(&s(&[1.0, 2.0]), 2), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn trend_index_bookkeeping() {
        let y = [1.0, 0.5, 2.0, 3.5, 3.0, 5.0];
        let m = trend_fit(&s(&y), 1).unwrap();
        let next = trend_predict(&m, &fh(&[1, 2]));
        let mut extended = y.to_vec();
        extended.push(next[0]);
        let m2 = trend_fit(&s(&extended), 1).unwrap();
        assert!((trend_predict(&m2, &fh(&[1]))[0] - next[1]).abs() < 1e-9);
    }

    #[test]
    fn reduction_pairs_and_errors() {
        let (x, t) = reduction_pairs(&s(&[1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_eq!(x, vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(t, vec![3.0, 4.0]);
        assert!(matches!(
            reduce_fit(&s(&[1.0, 2.0, 3.0]), 3, &[1.0]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn reduction_on_linear_series() {
        let m = reduce_fit(&s(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), 2, &[1e-10]).unwrap();
        let all = reduce_predict(&m, &fh(&[1, 2, 3])).unwrap();
        assert!(close(&all, &[7.0, 8.0, 9.0], 1e-5), "{all:?}");
        assert_eq!(reduce_predict(&m, &fh(&[2])).unwrap(), [all[1]]);
    }

    #[test]
    fn reduction_on_constant_series() {
        let m = reduce_fit(&s(&[4.0; 8]), 3, &default_lambda_grid()).unwrap();
        assert!(close(&reduce_predict(&m, &fh(&[1, 2, 5])).unwrap(), &[4.0; 3], 1e-6));
    }

    #[test]
    fn metrics() {
        let train = s(&[1.0, 2.0]);
        let perfect = forecast_metrics(&[1.0, 2.0], &[1.0, 2.0], &train).unwrap();
        assert_eq!(
            perfect,
            ForecastMetrics {
                mae: 0.0,
                rmse: 0.0,
                smape: 0.0,
                mase: 0.0
            }
        );
        assert_eq!(forecast_metrics(&[0.0], &[0.0], &train).unwrap().smape, 0.0);
        let m = forecast_metrics(&[2.0], &[1.0], &train).unwrap();
        assert_eq!((m.mae, m.mase), (1.0, 1.0));
        assert_eq!(
            forecast_metrics(&[1.0], &[1.0], &s(&[3.0, 3.0])),
            Err(Error::DegenerateScale)
        );
        assert!(matches!(
            forecast_metrics(&[1.0], &[1.0, 2.0], &train),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn forecasters_require_fit() {
        let h = fh(&[1]);
        assert_eq!(
            NaiveForecaster::new(NaiveStrategy::Last).predict(&h),
            Err(Error::NotFitted)
        );
        assert_eq!(TrendForecaster::new(1).predict(&h), Err(Error::NotFitted));
        assert_eq!(ReductionForecaster::new(2).predict(&h), Err(Error::NotFitted));
        let mut t = TrendForecaster::new(1);
        t.fit(&s(&[1.0, 2.0, 3.0])).unwrap();
        assert!(close(&t.predict(&fh(&[1, 2, 3])).unwrap(), &[4.0, 5.0, 6.0], 1e-9));
    }

    #[test]
    fn shifts_follow_constant_offset() {
        let y = [1.0, 3.0, 2.0, 5.0, 4.0, 6.0];
        let c = 7.5;
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let h = fh(&[1, 2, 3]);
        for strat in [NaiveStrategy::Last, NaiveStrategy::Mean, NaiveStrategy::SeasonalLast(2)] {
            let a = naive_forecast(&s(&y), &h, strat).unwrap();
            let b = naive_forecast(&s(&shifted), &h, strat).unwrap();
            assert!(close(&a.iter().map(|v| v + c).collect::<Vec<_>>(), &b, 1e-12));
        }
        let a = trend_predict(&trend_fit(&s(&y), 2).unwrap(), &h);
        let b = trend_predict(&trend_fit(&s(&shifted), 2).unwrap(), &h);
        assert!(close(&a.iter().map(|v| v + c).collect::<Vec<_>>(), &b, 1e-9));
    }
}
