//! Random dilated convolution kernels and the kernel-transform estimator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ridge::{default_lambda_grid, ridge_fit, ridge_predict, RidgeModel};
use crate::data::{Collection, LabelVector};
use crate::error::{Error, Result};
use crate::estimator::{
    check_capabilities, fit_guard, guard_predict, summarize, CollectionEstimator, Estimator, EstimatorState,
    LengthRule, TagSet,
};
use crate::par;

pub const KERNEL_LENGTHS: [usize; 3] = [7, 9, 11];

#[derive(Debug, Clone, PartialEq)]
pub struct ConvKernel {
    pub length: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub dilation: usize,
    pub padding: usize,
    pub channel: usize,
}

impl ConvKernel {
    pub fn span(&self) -> usize {
        (self.length - 1) * self.dilation + 1
    }

    /// Number of convolution outputs on a series of length `n`.
    pub fn output_len(&self, n: usize) -> usize {
        (n + 2 * self.padding + 1).saturating_sub(self.span())
    }

    /// Returns `(max, ppv)` of the convolution over `x`.
    pub fn apply(&self, x: &[f64]) -> (f64, f64) {
        let out = self.output_len(x.len());
        let mut max = f64::NEG_INFINITY;
        let mut positive = 0usize;
        for t in 0..out {
            let mut z = self.bias;
            for (j, w) in self.weights.iter().enumerate() {
                let idx = (t + j * self.dilation).wrapping_sub(self.padding);
                if let Some(v) = x.get(idx) {
                    z += w * v;
                }
            }
            max = max.max(z);
            if z > 0.0 {
                positive += 1;
            }
        }
        (max, positive as f64 / out as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RocketConfig {
    pub n_kernels: usize,
    pub seed: u64,
}

impl RocketConfig {
    pub fn new(n_kernels: usize, seed: u64) -> Self {
        Self { n_kernels, seed }
    }
}

fn generate_kernel(seed: u64, index: usize, n_channels: usize, series_length: usize) -> ConvKernel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let length = KERNEL_LENGTHS[rng.random_range(0..KERNEL_LENGTHS.len())];
    let mut weights: Vec<f64> = (0..length).map(|_| rng.sample(StandardNormal)).collect();
    let mean = weights.iter().sum::<f64>() / length as f64;
    weights.iter_mut().for_each(|w| *w -= mean);
    let bias = rng.random_range(-1.0..=1.0);
    let upper = (((series_length - 1) as f64) / ((length - 1) as f64)).log2().max(0.0);
    let u = rng.random::<f64>() * upper;
    let dilation = (2f64.powf(u).floor() as usize).max(1);
    let pad_coin = rng.random_bool(0.5);
    let channel = rng.random_range(0..n_channels);
    let span = (length - 1) * dilation + 1;
    // long kernels on short series must be padded to produce any output
    let padding = if pad_coin || span > series_length {
        (length - 1) * dilation / 2
    } else {
        0
    };
    ConvKernel {
        length,
        weights,
        bias,
        dilation,
        padding,
        channel,
    }
}

/// Kernel `i` depends only on `(seed, i)`.
pub fn generate_kernels(config: &RocketConfig, n_channels: usize, series_length: usize) -> Result<Vec<ConvKernel>> {
    if series_length < KERNEL_LENGTHS[0] {
        return Err(Error::SeriesTooShort {
            length: series_length,
            minimum: KERNEL_LENGTHS[0],
        });
    }
    if config.n_kernels == 0 {
        return Err(Error::invalid("n_kernels must be at least 1"));
    }
    if n_channels == 0 {
        return Err(Error::invalid("n_channels must be at least 1"));
    }
    Ok(par::map_range(config.n_kernels, |i| {
        generate_kernel(config.seed, i, n_channels, series_length)
    }))
}

/// Feature matrix with `(max, ppv)` per kernel, interleaved in kernel order.
pub fn rocket_transform(collection: &Collection, kernels: &[ConvKernel]) -> Result<Vec<Vec<f64>>> {
    let meta = summarize(collection)?;
    let report = check_capabilities(&TagSet::new(true, false), &meta);
    if !report.ok() || !collection.is_dense() {
        return Err(Error::Capability(report));
    }
    let n = meta.length_min;
    for k in kernels {
        if k.channel >= meta.n_channels {
            return Err(Error::invalid(format!(
                "kernel channel {} outside {} channels",
                k.channel, meta.n_channels
            )));
        }
        if k.output_len(n) == 0 {
            return Err(Error::invalid(format!(
                "kernel span {} exceeds padded length",
                k.span()
            )));
        }
    }
    Ok(par::map_range(collection.n_cases(), |i| {
        let case = collection.case(i);
        let mut row = Vec::with_capacity(2 * kernels.len());
        for k in kernels {
            let (max, ppv) = k.apply(case.channel(k.channel));
            row.push(max);
            row.push(ppv);
        }
        row
    }))
}

/// Kernel transform followed by a ridge read-out. Works as a classifier or
/// regressor depending on the label kind seen at fit.
#[derive(Debug, Clone)]
pub struct Rocket {
    config: RocketConfig,
    lambda_grid: Vec<f64>,
    state: EstimatorState,
    fitted: Option<(Vec<ConvKernel>, RidgeModel)>,
}

impl Rocket {
    pub fn new(config: RocketConfig) -> Self {
        Self {
            config,
            lambda_grid: default_lambda_grid(),
            state: EstimatorState::new(),
            fitted: None,
        }
    }

    pub fn with_lambda_grid(mut self, grid: Vec<f64>) -> Self {
        self.lambda_grid = grid;
        self
    }

    pub fn config(&self) -> &RocketConfig {
        &self.config
    }

    pub fn kernels(&self) -> Option<&[ConvKernel]> {
        self.fitted.as_ref().map(|(k, _)| k.as_slice())
    }

    pub fn ridge(&self) -> Option<&RidgeModel> {
        self.fitted.as_ref().map(|(_, m)| m)
    }
}

impl Estimator for Rocket {
    fn name(&self) -> &'static str {
        "rocket"
    }

    fn tags(&self) -> TagSet {
        TagSet::new(true, false)
    }
}

impl CollectionEstimator for Rocket {
    fn fit(&mut self, x: &Collection, labels: &LabelVector) -> Result<()> {
        let mut state = EstimatorState::new();
        let meta = fit_guard(&mut state, &self.tags(), x)?;
        let kernels = generate_kernels(&self.config, meta.n_channels, meta.length_min)?;
        let features = rocket_transform(x, &kernels)?;
        let model = ridge_fit(&features, labels, &self.lambda_grid)?;
        self.state = state;
        self.fitted = Some((kernels, model));
        Ok(())
    }

    fn predict(&self, x: &Collection) -> Result<LabelVector> {
        guard_predict(&self.state, &self.tags(), x, LengthRule::Exact)?;
        let (kernels, model) = self.fitted.as_ref().ok_or(Error::NotFitted)?;
        ridge_predict(model, &rocket_transform(x, kernels)?)
    }

    fn is_fitted(&self) -> bool {
        self.state.is_fitted()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_blobs, Series};

    #[test]
    fn kernels_are_centred_and_deterministic() {
        let cfg = RocketConfig::new(100, 42);
        let a = generate_kernels(&cfg, 3, 60).unwrap();
        assert_eq!(a.len(), 100);
        for k in &a {
            assert!(k.weights.iter().sum::<f64>().abs() < 1e-9);
            assert!(KERNEL_LENGTHS.contains(&k.length));
            assert!((-1.0..=1.0).contains(&k.bias));
            assert!(k.channel < 3);
            assert!(k.span() <= 60 + 2 * k.padding);
        }
        assert_eq!(a, generate_kernels(&cfg, 3, 60).unwrap());
        assert_ne!(a, generate_kernels(&RocketConfig::new(100, 43), 3, 60).unwrap());
    }

    #[test]
    fn kernel_prefixes_agree_across_counts() {
        let short = generate_kernels(&RocketConfig::new(5, 1), 1, 30).unwrap();
        let long = generate_kernels(&RocketConfig::new(50, 1), 1, 30).unwrap();
        assert_eq!(short[..], long[..5]);
    }

    #[test]
    fn minimum_length_series() {
        let ks = generate_kernels(&RocketConfig::new(200, 3), 1, 7).unwrap();
        assert!(ks.iter().filter(|k| k.length == 7).all(|k| k.dilation == 1));
        assert!(ks.iter().all(|k| k.dilation == 1));
        assert_eq!(
            generate_kernels(&RocketConfig::new(1, 0), 1, 6),
            Err(Error::SeriesTooShort { length: 6, minimum: 7 })
        );
    }

    #[test]
    fn constant_series_gives_bias() {
        let ks = generate_kernels(&RocketConfig::new(50, 9), 1, 40).unwrap();
        let x = Collection::from_rows(&[vec![3.5; 40]]).unwrap();
        let f = rocket_transform(&x, &ks).unwrap();
        assert_eq!(f[0].len(), 100);
        for (k, pair) in ks.iter().zip(f[0].chunks(2)) {
            if k.padding == 0 {
                assert!((pair[0] - k.bias).abs() < 1e-9);
                assert_eq!(pair[1], if k.bias > 0.0 { 1.0 } else { 0.0 });
            }
            assert!((0.0..=1.0).contains(&pair[1]));
        }
    }

    #[test]
    fn hand_convolution() {
        let k = ConvKernel {
            length: 3,
            weights: vec![1.0, -2.0, 1.0],
            bias: 0.5,
            dilation: 2,
            padding: 2,
            channel: 0,
        };
        let x = [1.0, 4.0, 9.0, 16.0, 25.0];
        // t + 2j - 2 over t in 0..5: z_t = 0.5 + x[t-2] - 2x[t] + x[t+2]
        let z: Vec<f64> = (0..5i64)
            .map(|t| {
                let g = |i: i64| if (0..5).contains(&i) { x[i as usize] } else { 0.0 };
                0.5 + g(t - 2) - 2.0 * g(t) + g(t + 2)
            })
            .collect();
        let (max, ppv) = k.apply(&x);
        assert_eq!(max, z.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        assert_eq!(ppv, z.iter().filter(|&&v| v > 0.0).count() as f64 / 5.0);
    }

    #[test]
    fn ragged_input_rejected() {
        let x = Collection::ragged(&[
            Series::univariate(vec![0.0; 10]).unwrap(),
            Series::univariate(vec![0.0; 12]).unwrap(),
        ])
        .unwrap();
        let ks = generate_kernels(&RocketConfig::new(2, 0), 1, 10).unwrap();
        assert!(matches!(rocket_transform(&x, &ks), Err(Error::Capability(r)) if r.names("unequal_length")));
    }

    #[test]
    fn classifies_blobs() {
        let (x, y) = make_blobs(8, 2, 30, &[0.0, 10.0], 0.0, 0).unwrap();
        let mut r = Rocket::new(RocketConfig::new(100, 0));
        r.fit(&x, &y).unwrap();
        assert_eq!(r.predict(&x).unwrap(), y);
        let short = Collection::from_rows(&[vec![0.0; 29]]).unwrap();
        assert!(r.predict(&short).unwrap_err().is_capability());
    }
}
