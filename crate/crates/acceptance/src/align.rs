//! Distances by exhaustive enumeration of warping paths and edit scripts.

/// Every warping path between lengths `n` and `m`, as 0-based cell lists from
/// `(0, 0)` to `(n - 1, m - 1)`.
pub fn warping_paths(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    fn walk(n: usize, m: usize, path: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let (i, j) = *path.last().unwrap();
        if (i, j) == (n - 1, m - 1) {
            out.push(path.clone());
            return;
        }
        for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
            if i + di < n && j + dj < m {
                path.push((i + di, j + dj));
                walk(n, m, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(n, m, &mut vec![(0, 0)], &mut out);
    out
}

fn wdtw_weight(g: f64, longest: usize, gap: usize) -> f64 {
    1.0 / (1.0 + (-g * (gap as f64 - longest as f64 / 2.0)).exp())
}

/// Minimum squared-cost warping path. `g` switches on the logistic
/// index-gap weight.
pub fn warping_min(x: &[f64], y: &[f64], g: Option<f64>) -> f64 {
    let longest = x.len().max(y.len());
    warping_paths(x.len(), y.len())
        .iter()
        .map(|p| {
            p.iter().fold(0.0, |acc, &(i, j)| {
                let d = (x[i] - y[j]) * (x[i] - y[j]);
                let w = g.map_or(1.0, |g| wdtw_weight(g, longest, i.abs_diff(j)));
                acc + w * d
            })
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// Consume one element of each series.
    Match,
    /// Consume one element of `x` only.
    DelX,
    /// Consume one element of `y` only.
    InsY,
}

/// Every edit script between lengths `n` and `m`.
pub fn edit_scripts(n: usize, m: usize) -> Vec<Vec<Op>> {
    fn walk(i: usize, j: usize, n: usize, m: usize, script: &mut Vec<Op>, out: &mut Vec<Vec<Op>>) {
        if (i, j) == (n, m) {
            out.push(script.clone());
            return;
        }
        for (op, di, dj) in [(Op::Match, 1, 1), (Op::DelX, 1, 0), (Op::InsY, 0, 1)] {
            if i + di <= n && j + dj <= m {
                script.push(op);
                walk(i + di, j + dj, n, m, script, out);
                script.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(0, 0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Scores a script step by step. `step(op, i, j)` sees the counts consumed
/// before the op and returns `None` when the op is not allowed there.
pub fn script_cost(script: &[Op], mut step: impl FnMut(Op, usize, usize) -> Option<f64>) -> Option<f64> {
    let (mut i, mut j, mut total) = (0, 0, 0.0);
    for &op in script {
        total += step(op, i, j)?;
        match op {
            Op::Match => {
                i += 1;
                j += 1;
            }
            Op::DelX => i += 1,
            Op::InsY => j += 1,
        }
    }
    Some(total)
}

fn min_script(n: usize, m: usize, mut step: impl FnMut(Op, usize, usize) -> Option<f64>) -> f64 {
    edit_scripts(n, m)
        .iter()
        .filter_map(|s| script_cost(s, &mut step))
        .fold(f64::INFINITY, f64::min)
}

pub fn erp(x: &[f64], y: &[f64], g: f64) -> f64 {
    min_script(x.len(), y.len(), |op, i, j| {
        Some(match op {
            Op::Match => (x[i] - y[j]).abs(),
            Op::DelX => (x[i] - g).abs(),
            Op::InsY => (y[j] - g).abs(),
        })
    })
}

pub fn edr(x: &[f64], y: &[f64], eps: f64) -> f64 {
    let raw = min_script(x.len(), y.len(), |op, i, j| {
        Some(match op {
            Op::Match if (x[i] - y[j]).abs() <= eps => 0.0,
            _ => 1.0,
        })
    });
    raw / x.len().max(y.len()) as f64
}

/// One minus the longest within-`eps` matching over the shorter length.
pub fn lcss(x: &[f64], y: &[f64], eps: f64) -> f64 {
    let best = edit_scripts(x.len(), y.len())
        .iter()
        .filter_map(|s| {
            script_cost(s, |op, i, j| match op {
                Op::Match if (x[i] - y[j]).abs() <= eps => Some(1.0),
                Op::Match => None,
                _ => Some(0.0),
            })
        })
        .fold(0.0, f64::max);
    1.0 - best / x.len().min(y.len()) as f64
}

fn msm_split(new: f64, prev: f64, other: f64, c: f64) -> f64 {
    if (prev <= new && new <= other) || (prev >= new && new >= other) {
        c
    } else {
        c + (new - prev).abs().min((new - other).abs())
    }
}

/// Splits and merges copy the previously consumed element, so the first op
/// must be a match.
pub fn msm(x: &[f64], y: &[f64], c: f64) -> f64 {
    min_script(x.len(), y.len(), |op, i, j| match op {
        Op::Match => Some((x[i] - y[j]).abs()),
        Op::DelX if i >= 1 && j >= 1 => Some(msm_split(x[i], x[i - 1], y[j - 1], c)),
        Op::InsY if i >= 1 && j >= 1 => Some(msm_split(y[j], y[j - 1], x[i - 1], c)),
        _ => None,
    })
}

/// Time-stamps are the 1-based indices; both series are prefixed by a zero.
pub fn twe(x: &[f64], y: &[f64], nu: f64, lambda: f64) -> f64 {
    let xp: Vec<f64> = std::iter::once(0.0).chain(x.iter().copied()).collect();
    let yp: Vec<f64> = std::iter::once(0.0).chain(y.iter().copied()).collect();
    min_script(x.len(), y.len(), |op, i, j| match op {
        Op::Match => Some((xp[i + 1] - yp[j + 1]).abs() + (xp[i] - yp[j]).abs() + 2.0 * nu * i.abs_diff(j) as f64),
        Op::DelX if j >= 1 => Some((xp[i + 1] - xp[i]).abs() + nu + lambda),
        Op::InsY if i >= 1 => Some((yp[j + 1] - yp[j]).abs() + nu + lambda),
        _ => None,
    })
}
