//! Medoids by trying every member.

/// Lowest summed distance from one member to all members of `cluster`, and
/// every member attaining it.
pub fn best_medoids(cluster: &[usize], d: impl Fn(usize, usize) -> f64) -> (f64, Vec<usize>) {
    let costs: Vec<f64> = cluster
        .iter()
        .map(|&c| cluster.iter().map(|&j| d(c, j)).sum())
        .collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let winners = cluster
        .iter()
        .zip(&costs)
        .filter(|(_, &v)| v == best)
        .map(|(&c, _)| c)
        .collect();
    (best, winners)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_the_centre() {
        let pts = [0.0f64, 1.0, 2.0, 10.0];
        let (cost, winners) = best_medoids(&[0, 1, 2], |a, b| (pts[a] - pts[b]).abs());
        assert_eq!((cost, winners), (2.0, vec![1]));
    }
}
