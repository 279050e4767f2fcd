//! k-means and k-medoids clustering with elastic distances.

mod dba;
mod kmeans;
mod kmedoids;

pub use dba::{dba, dba_trace};
pub use kmeans::{kmeans_fit, Averaging, Init, KMeans, KMeansConfig};
pub use kmedoids::{kmedoids_fit, KMedoids, KMedoidsConfig};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{ClassLabels, Collection, LabelVector, Layout, Series};
use crate::distances::{cross_distances, DistanceSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub centers: Vec<Series>,
    /// Sum over cases of the distance to the assigned centre.
    pub inertia: f64,
    pub n_iter: usize,
    pub converged: bool,
    /// Inertia after the initial assignment and after every iteration.
    pub inertia_history: Vec<f64>,
    /// Case indices of the centres, for k-medoids.
    pub medoids: Option<Vec<usize>>,
}

/// Index of the smallest value; ties go to the lowest index.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Labels and per-case distances to the nearest centre.
fn assign_detailed(collection: &Collection, centers: &[Series], spec: &DistanceSpec) -> Result<(Vec<usize>, Vec<f64>)> {
    if centers.is_empty() {
        return Err(Error::invalid("at least one centre is required"));
    }
    let centers = Collection::new(Layout::Ragged, centers)?;
    if centers.n_channels() != collection.n_channels() {
        return Err(Error::ChannelMismatch {
            left: collection.n_channels(),
            right: centers.n_channels(),
        });
    }
    let dists = cross_distances(collection, &centers, spec)?;
    Ok(dists
        .iter()
        .map(|row| {
            let c = argmin(row);
            (c, row[c])
        })
        .unzip())
}

/// Assigns every case to its nearest centre (ties to the lowest centre
/// index) and returns the labels with the total distance.
pub fn assign(collection: &Collection, centers: &[Series], spec: &DistanceSpec) -> Result<(Vec<usize>, f64)> {
    let (labels, dists) = assign_detailed(collection, centers, spec)?;
    Ok((labels, dists.iter().sum()))
}

/// Cluster indices as class labels named "0", "1", ...
fn cluster_labels(labels: Vec<usize>, k: usize) -> Result<LabelVector> {
    let alphabet = (0..k).map(|c| c.to_string()).collect();
    Ok(LabelVector::Class(ClassLabels::new(alphabet, labels)?))
}

fn check_k(k: usize, n_cases: usize) -> Result<()> {
    if k == 0 || k > n_cases {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={n_cases}")));
    }
    Ok(())
}

/// `k` distinct case indices drawn uniformly for `seed`.
fn random_cases(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, n, k).into_vec()
}
