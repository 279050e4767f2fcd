//! Seeded synthetic datasets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ClassLabels, Collection, LabelVector, Series};
use crate::error::{Error, Result};

fn class_labels(n_classes: usize, n_per_class: usize) -> LabelVector {
    let alphabet = (0..n_classes).map(|c| c.to_string()).collect();
    let codes = (0..n_classes)
        .flat_map(|c| std::iter::repeat_n(c, n_per_class))
        .collect();
    LabelVector::Class(ClassLabels::new(alphabet, codes).expect("codes within alphabet"))
}

/// Cases of class `c` are `class_offsets[c]` plus i.i.d. Gaussian noise.
/// Cases are ordered by class.
pub fn make_blobs(
    n_per_class: usize,
    n_channels: usize,
    n_timepoints: usize,
    class_offsets: &[f64],
    noise_sd: f64,
    seed: u64,
) -> Result<(Collection, LabelVector)> {
    if n_per_class == 0 || n_channels == 0 || n_timepoints == 0 {
        return Err(Error::invalid("blob dimensions must be positive"));
    }
    if class_offsets.len() < 2 {
        return Err(Error::invalid("need at least two class offsets"));
    }
    for (i, a) in class_offsets.iter().enumerate() {
        if !a.is_finite() || class_offsets[..i].contains(a) {
            return Err(Error::invalid("class offsets must be finite and distinct"));
        }
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::invalid("noise_sd must be a finite non-negative real"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(n_per_class * class_offsets.len());
    for &offset in class_offsets {
        for _ in 0..n_per_class {
            let values = (0..n_channels * n_timepoints)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    offset + noise_sd * z
                })
                .collect();
            cases.push(Series::from_flat(n_channels, n_timepoints, values)?);
        }
    }
    Ok((
        Collection::dense(&cases)?,
        class_labels(class_offsets.len(), n_per_class),
    ))
}

/// Class 0: unit sinusoids with random phase and N(0, 0.1) noise.
/// Class 1: N(0, 1) noise.
pub fn make_sine_vs_noise(n_per_class: usize, n_timepoints: usize, seed: u64) -> Result<(Collection, LabelVector)> {
    make_sine_vs_noise_with(n_per_class, n_timepoints, seed, 0.1)
}

/// The sinusoid period is a quarter of the series length.
fn make_sine_vs_noise_with(
    n_per_class: usize,
    n_timepoints: usize,
    seed: u64,
    sine_noise_sd: f64,
) -> Result<(Collection, LabelVector)> {
    if n_per_class == 0 {
        return Err(Error::invalid("n_per_class must be positive"));
    }
    if n_timepoints < 8 {
        return Err(Error::invalid("n_timepoints must be at least 8"));
    }
    let period = n_timepoints as f64 / 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        let phase = rng.random::<f64>() * 2.0 * PI;
        let values = (0..n_timepoints)
            .map(|t| {
                let z: f64 = rng.sample(StandardNormal);
                (2.0 * PI * (t as f64 / period) + phase).sin() + sine_noise_sd * z
            })
            .collect();
        cases.push(Series::univariate(values)?);
    }
    for _ in 0..n_per_class {
        let values = (0..n_timepoints)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        cases.push(Series::univariate(values)?);
    }
    Ok((Collection::dense(&cases)?, class_labels(2, n_per_class)))
}
