//! Barycentre averaging under DTW.

use crate::data::{Collection, Series};
use crate::distances::elastic::{path_prepared, path_weight};
use crate::distances::{AlignmentPath, DistanceKind, DistanceSpec, Prepared};
use crate::error::{Error, Result};
use crate::par;

const MIN_IMPROVEMENT: f64 = 1e-9;

fn alignments(members: &[Prepared], center: &Series, spec: &DistanceSpec) -> Result<(Vec<AlignmentPath>, f64)> {
    let pc = Prepared::new(center.view(), spec)?;
    let results = par::try_map_range(members.len(), |i| {
        path_prepared(&members[i], &pc, spec).map_err(|e| Error::Case {
            index: i,
            source: Box::new(e),
        })
    })?;
    let total = results.iter().map(|(_, d)| d).sum();
    Ok((results.into_iter().map(|(p, _)| p).collect(), total))
}

/// Each centre point becomes the (cost-weighted) mean of the member points
/// aligned to it.
fn update(members: &[Prepared], paths: &[AlignmentPath], center: &Series, spec: &DistanceSpec) -> Result<Series> {
    let (m, dim) = (center.n_timepoints(), center.n_channels());
    let mut sums = vec![0.0; m * dim];
    let mut weights = vec![0.0; m];
    for (member, path) in members.iter().zip(paths) {
        for &(i, t) in &path.pairs {
            let w = path_weight(spec, member.len(), m, i, t);
            weights[t] += w;
            for (c, v) in member.point_at(i).iter().enumerate() {
                sums[t * dim + c] += w * v;
            }
        }
    }
    let mut values = vec![0.0; m * dim];
    for t in 0..m {
        for c in 0..dim {
            values[c * m + t] = sums[t * dim + c] / weights[t];
        }
    }
    Series::from_flat(dim, m, values)
}

/// Runs up to `iterations` averaging steps from `init` and returns the
/// centre together with the summed member distance before the first step
/// and after each accepted step. Stops early once a step improves the sum
/// by less than `1e-9`; a step that would increase it is discarded.
pub fn dba_trace(
    members: &Collection,
    init: &Series,
    spec: &DistanceSpec,
    iterations: usize,
) -> Result<(Series, Vec<f64>)> {
    spec.validate()?;
    if !matches!(spec.kind, DistanceKind::Dtw | DistanceKind::Wdtw) {
        return Err(Error::InvalidSpec(format!(
            "barycentre averaging needs dtw or wdtw, got {}",
            spec.kind
        )));
    }
    if members.n_cases() == 0 {
        return Err(Error::EmptyCollection);
    }
    if members.n_channels() != init.n_channels() {
        return Err(Error::ChannelMismatch {
            left: members.n_channels(),
            right: init.n_channels(),
        });
    }
    let prepared = members
        .cases()
        .map(|c| Prepared::new(c, spec))
        .collect::<Result<Vec<_>>>()?;
    let mut center = init.clone();
    let (mut paths, mut objective) = alignments(&prepared, &center, spec)?;
    let mut history = vec![objective];
    for _ in 0..iterations {
        let candidate = update(&prepared, &paths, &center, spec)?;
        let (new_paths, new_objective) = alignments(&prepared, &candidate, spec)?;
        if new_objective > objective {
            break;
        }
        let improvement = objective - new_objective;
        center = candidate;
        paths = new_paths;
        objective = new_objective;
        history.push(objective);
        if improvement < MIN_IMPROVEMENT {
            break;
        }
    }
    Ok((center, history))
}

/// Barycentre of `members`, with the length of `init`.
pub fn dba(members: &Collection, init: &Series, spec: &DistanceSpec, iterations: usize) -> Result<Series> {
    dba_trace(members, init, spec, iterations).map(|(c, _)| c)
}
