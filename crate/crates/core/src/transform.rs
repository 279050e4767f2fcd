//! Series-to-series and series-to-features transformers, plus broadcasting
//! of single-series transformers over a collection.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::data::{Collection, Layout, Series, SeriesView};
use crate::error::{Error, Result};
use crate::par;

/// Named feature values extracted from one series.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<String>,
}

impl FeatureVector {
    fn with_capacity(n: usize) -> Self {
        Self {
            values: Vec::with_capacity(n),
            names: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, name: String, value: f64) {
        self.names.push(name);
        self.values.push(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population standard deviation.
fn std_dev(x: &[f64], mean: f64) -> f64 {
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    match sorted.get(lo + 1) {
        Some(&hi) if frac > 0.0 => sorted[lo] + frac * (hi - sorted[lo]),
        _ => sorted[lo],
    }
}

/// Least-squares slope of `x` against its index.
fn slope(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let t_mean = (n - 1) as f64 / 2.0;
    let x_mean = mean(x);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, &v) in x.iter().enumerate() {
        let dt = t as f64 - t_mean;
        num += dt * (v - x_mean);
        den += dt * dt;
    }
    num / den
}

/// Per-channel z-normalisation. Channels with deviation below `1e-12` become zeros.
pub fn znorm(series: SeriesView<'_>) -> Series {
    let n = series.n_timepoints();
    let mut values = Vec::with_capacity(series.values().len());
    for c in 0..series.n_channels() {
        let ch = series.channel(c);
        let m = mean(ch);
        let sd = std_dev(ch, m);
        if sd < 1e-12 {
            values.extend(std::iter::repeat_n(0.0, n));
        } else {
            values.extend(ch.iter().map(|v| (v - m) / sd));
        }
    }
    Series::from_flat(series.n_channels(), n, values).expect("shape preserved")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadFill {
    Zero,
    LastValue,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadTarget {
    /// The longest case length.
    Auto,
    Length(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadPolicy {
    pub fill: PadFill,
    pub target_length: PadTarget,
}

impl PadPolicy {
    pub fn new(fill: PadFill, target_length: PadTarget) -> Self {
        Self { fill, target_length }
    }
}

fn pad_case(case: SeriesView<'_>, target: usize, fill: PadFill) -> Series {
    let n = case.n_timepoints();
    let mut values = Vec::with_capacity(case.n_channels() * target);
    for c in 0..case.n_channels() {
        let ch = case.channel(c);
        let value = match fill {
            PadFill::Zero => 0.0,
            PadFill::LastValue => ch[n - 1],
            PadFill::Mean => mean(ch),
        };
        values.extend_from_slice(ch);
        values.extend(std::iter::repeat_n(value, target - n));
    }
    Series::from_flat(case.n_channels(), target, values).expect("padded shape")
}

/// Pads every case at the end to a common length.
pub fn pad(collection: &Collection, policy: &PadPolicy) -> Result<Collection> {
    let longest = collection.lengths().iter().copied().max().unwrap_or(0);
    let target = match policy.target_length {
        PadTarget::Auto => longest,
        PadTarget::Length(t) if t < longest => {
            return Err(Error::TargetTooShort {
                target: t,
                length: longest,
            })
        }
        PadTarget::Length(t) => t,
    };
    let cases: Vec<Series> = collection.cases().map(|c| pad_case(c, target, policy.fill)).collect();
    Collection::dense(&cases)
}

/// Truncates every case to `length`, which must not exceed the shortest case.
pub(crate) fn truncate_to(collection: &Collection, length: usize) -> Result<Collection> {
    let cases = collection
        .cases()
        .map(|c| {
            let channels = (0..c.n_channels()).map(|ch| c.channel(ch)[..length].to_vec()).collect();
            Series::new(channels)
        })
        .collect::<Result<Vec<_>>>()?;
    Collection::dense(&cases)
}

/// Truncates every case to the shortest case length.
pub fn truncate(collection: &Collection) -> Collection {
    let shortest = collection.lengths().iter().copied().min().unwrap_or(0);
    truncate_to(collection, shortest).expect("shortest length is valid for every case")
}

pub const SUMMARY_STATS: [&str; 7] = ["mean", "std", "min", "max", "median", "iqr", "slope"];

/// Per channel: mean, population std, min, max, median, IQR and slope.
pub fn summary_features(series: SeriesView<'_>) -> FeatureVector {
    let mut out = FeatureVector::with_capacity(series.n_channels() * SUMMARY_STATS.len());
    for c in 0..series.n_channels() {
        let ch = series.channel(c);
        let m = mean(ch);
        let mut sorted = ch.to_vec();
        sorted.sort_by(f64::total_cmp);
        let stats = [
            m,
            std_dev(ch, m),
            sorted[0],
            sorted[sorted.len() - 1],
            quantile(&sorted, 0.5),
            quantile(&sorted, 0.75) - quantile(&sorted, 0.25),
            slope(ch),
        ];
        for (name, v) in SUMMARY_STATS.iter().zip(stats) {
            out.push(format!("ch{c}_{name}"), v);
        }
    }
    out
}

/// Magnitudes of DFT coefficients `1..=k` per channel, scaled by `2/n`.
pub fn fourier_features(series: SeriesView<'_>, k: usize) -> Result<FeatureVector> {
    let n = series.n_timepoints();
    if k > n / 2 {
        return Err(Error::invalid(format!("k = {k} exceeds n/2 = {}", n / 2)));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut out = FeatureVector::with_capacity(series.n_channels() * k);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for c in 0..series.n_channels() {
        for (b, &v) in buf.iter_mut().zip(series.channel(c)) {
            *b = Complex::new(v, 0.0);
        }
        fft.process(&mut buf);
        for (j, coef) in buf.iter().enumerate().skip(1).take(k) {
            out.push(format!("ch{c}_dftmag{j}"), coef.norm() * 2.0 / n as f64);
        }
    }
    Ok(out)
}

/// Subseries of length `window` starting at `0, stride, 2*stride, ...`.
pub fn sliding_window(series: SeriesView<'_>, window: usize, stride: usize) -> Result<Collection> {
    let n = series.n_timepoints();
    if window == 0 || window > n {
        return Err(Error::invalid(format!("window {window} outside 1..={n}")));
    }
    if stride == 0 {
        return Err(Error::invalid("stride must be at least 1"));
    }
    let count = (n - window) / stride + 1;
    let cases = (0..count)
        .map(|w| {
            let start = w * stride;
            let channels = (0..series.n_channels())
                .map(|c| series.channel(c)[start..start + window].to_vec())
                .collect();
            Series::new(channels)
        })
        .collect::<Result<Vec<_>>>()?;
    Collection::dense(&cases)
}

/// Applies a single-series transformer to every case. The result is dense
/// when all outputs share a length. Errors name the failing case.
pub fn broadcast<F>(transformer: F, collection: &Collection) -> Result<Collection>
where
    F: Fn(SeriesView<'_>) -> Result<Series> + Sync + Send,
{
    let outputs = par::try_map_range(collection.n_cases(), |i| {
        transformer(collection.case(i)).map_err(|e| Error::Case {
            index: i,
            source: Box::new(e),
        })
    })?;
    let first = outputs[0].n_timepoints();
    let layout = if outputs.iter().all(|s| s.n_timepoints() == first) {
        Layout::Dense
    } else {
        Layout::Ragged
    };
    Collection::new(layout, &outputs)
}

/// Applies a series-to-features transformer to every case, one row per case.
pub fn broadcast_features<F>(transformer: F, collection: &Collection) -> Result<Vec<FeatureVector>>
where
    F: Fn(SeriesView<'_>) -> Result<FeatureVector> + Sync + Send,
{
    par::try_map_range(collection.n_cases(), |i| {
        transformer(collection.case(i)).map_err(|e| Error::Case {
            index: i,
            source: Box::new(e),
        })
    })
}
