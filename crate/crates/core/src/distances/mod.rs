//! Lockstep and elastic distances between series.
//!
//! Pointwise costs between multichannel points are dependent: the DTW family
//! uses the squared Euclidean norm of the difference, ERP/MSM/TWE the
//! Euclidean norm, and EDR/LCSS call two points a match when every channel
//! differs by at most `epsilon`.
//!
//! An optional band restricts which interior cells of the dynamic program
//! may be used. Cell `(i, j)` (0-based into `x` and `y`) lies in the band
//! when `|i*m - j*n| <= window * n * m`, i.e. the deviation from the
//! diagonal, measured along the longer series, is at most `window` times
//! its length.

pub(crate) mod elastic;

use std::fmt;
use std::str::FromStr;

pub use elastic::{alignment_path, cost_matrix, AlignmentPath, CostMatrix};

use crate::data::{Collection, SeriesView};
use crate::error::{Error, Result};
use crate::par;

pub(crate) use elastic::Prepared;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Euclidean,
    Squared,
    Dtw,
    Ddtw,
    Wdtw,
    Wddtw,
    Erp,
    Edr,
    Lcss,
    Msm,
    Twe,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 11] = [
        DistanceKind::Euclidean,
        DistanceKind::Squared,
        DistanceKind::Dtw,
        DistanceKind::Ddtw,
        DistanceKind::Wdtw,
        DistanceKind::Wddtw,
        DistanceKind::Erp,
        DistanceKind::Edr,
        DistanceKind::Lcss,
        DistanceKind::Msm,
        DistanceKind::Twe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Squared => "squared",
            DistanceKind::Dtw => "dtw",
            DistanceKind::Ddtw => "ddtw",
            DistanceKind::Wdtw => "wdtw",
            DistanceKind::Wddtw => "wddtw",
            DistanceKind::Erp => "erp",
            DistanceKind::Edr => "edr",
            DistanceKind::Lcss => "lcss",
            DistanceKind::Msm => "msm",
            DistanceKind::Twe => "twe",
        }
    }

    /// Pointwise comparison at equal indices only.
    pub fn is_lockstep(self) -> bool {
        matches!(self, DistanceKind::Euclidean | DistanceKind::Squared)
    }

    pub fn is_elastic(self) -> bool {
        !self.is_lockstep()
    }

    /// Kinds whose value is the cost of a warping path.
    pub fn is_dtw_family(self) -> bool {
        matches!(
            self,
            DistanceKind::Dtw | DistanceKind::Ddtw | DistanceKind::Wdtw | DistanceKind::Wddtw
        )
    }

    pub fn uses_derivative(self) -> bool {
        matches!(self, DistanceKind::Ddtw | DistanceKind::Wddtw)
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        DistanceKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown distance '{s}'")))
    }
}

/// A distance kind plus its parameters. Parameters irrelevant to the kind are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSpec {
    pub kind: DistanceKind,
    /// Band fraction in `[0, 1]`; `None` is unbounded.
    pub window: Option<f64>,
    /// WDTW/WDDTW weight steepness.
    pub g: f64,
    /// ERP gap reference value.
    pub erp_g: f64,
    /// EDR/LCSS matching threshold.
    pub epsilon: f64,
    /// MSM split/merge cost.
    pub c: f64,
    /// TWE stiffness.
    pub nu: f64,
    /// TWE edit penalty.
    pub lambda: f64,
}

impl DistanceSpec {
    pub fn new(kind: DistanceKind) -> Self {
        Self {
            kind,
            window: None,
            g: 0.05,
            erp_g: 0.0,
            epsilon: 0.1,
            c: 1.0,
            nu: 0.001,
            lambda: 1.0,
        }
    }

    pub fn with_window(mut self, window: f64) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_erp_g(mut self, erp_g: f64) -> Self {
        self.erp_g = erp_g;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_twe(mut self, nu: f64, lambda: f64) -> Self {
        self.nu = nu;
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if let Some(w) = self.window {
            if !(0.0..=1.0).contains(&w) {
                return bad("window must lie in [0, 1]");
            }
        }
        match self.kind {
            DistanceKind::Wdtw | DistanceKind::Wddtw if !(self.g >= 0.0 && self.g.is_finite()) => {
                bad("g must be finite and >= 0")
            }
            DistanceKind::Erp if !self.erp_g.is_finite() => bad("erp_g must be finite"),
            DistanceKind::Edr | DistanceKind::Lcss if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) => {
                bad("epsilon must be finite and >= 0")
            }
            DistanceKind::Msm if !(self.c > 0.0 && self.c.is_finite()) => bad("c must be finite and > 0"),
            DistanceKind::Twe
                if !(self.nu >= 0.0 && self.nu.is_finite() && self.lambda >= 0.0 && self.lambda.is_finite()) =>
            {
                bad("nu and lambda must be finite and >= 0")
            }
            _ => Ok(()),
        }
    }
}

impl From<DistanceKind> for DistanceSpec {
    fn from(kind: DistanceKind) -> Self {
        Self::new(kind)
    }
}

fn lockstep(x: SeriesView<'_>, y: SeriesView<'_>, kind: DistanceKind) -> Result<f64> {
    if x.n_channels() != y.n_channels() {
        return Err(Error::ChannelMismatch {
            left: x.n_channels(),
            right: y.n_channels(),
        });
    }
    if x.n_timepoints() != y.n_timepoints() {
        return Err(Error::LengthMismatch {
            left: x.n_timepoints(),
            right: y.n_timepoints(),
        });
    }
    // accumulate per timepoint so window-0 DTW reproduces this sum exactly
    let mut total = 0.0;
    for t in 0..x.n_timepoints() {
        let mut point = 0.0;
        for c in 0..x.n_channels() {
            let d = x.get(c, t) - y.get(c, t);
            point += d * d;
        }
        total += point;
    }
    Ok(match kind {
        DistanceKind::Euclidean => total.sqrt(),
        _ => total,
    })
}

/// Distance between two series under `spec`.
pub fn distance(x: SeriesView<'_>, y: SeriesView<'_>, spec: &DistanceSpec) -> Result<f64> {
    spec.validate()?;
    if spec.kind.is_lockstep() {
        return lockstep(x, y, spec.kind);
    }
    let px = Prepared::new(x, spec)?;
    let py = Prepared::new(y, spec)?;
    elastic::distance_prepared(&px, &py, spec)
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

enum PreparedSet<'a> {
    Lockstep(&'a Collection),
    Elastic(Vec<Prepared>),
}

impl<'a> PreparedSet<'a> {
    fn new(collection: &'a Collection, spec: &DistanceSpec) -> Result<Self> {
        if spec.kind.is_lockstep() {
            Ok(PreparedSet::Lockstep(collection))
        } else {
            let prepared = par::try_map_range(collection.n_cases(), |i| {
                Prepared::new(collection.case(i), spec).map_err(|e| Error::Case {
                    index: i,
                    source: Box::new(e),
                })
            })?;
            Ok(PreparedSet::Elastic(prepared))
        }
    }

    fn distance(&self, other: &PreparedSet<'_>, i: usize, j: usize, spec: &DistanceSpec) -> Result<f64> {
        match (self, other) {
            (PreparedSet::Lockstep(a), PreparedSet::Lockstep(b)) => lockstep(a.case(i), b.case(j), spec.kind),
            (PreparedSet::Elastic(a), PreparedSet::Elastic(b)) => elastic::distance_prepared(&a[i], &b[j], spec),
            _ => unreachable!("both sets prepared with the same spec"),
        }
    }
}

/// All pairwise distances within `collection`. Each unordered pair is
/// computed once, so the result is exactly symmetric.
pub fn pairwise(collection: &Collection, spec: &DistanceSpec) -> Result<DistanceMatrix> {
    spec.validate()?;
    let n = collection.n_cases();
    let set = PreparedSet::new(collection, spec)?;
    let upper = par::try_map_range(n, |i| {
        ((i + 1)..n)
            .map(|j| set.distance(&set, i, j, spec))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut data = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, data })
}

/// Distances from every case of `a` (rows) to every case of `b` (columns).
pub fn cross_distances(a: &Collection, b: &Collection, spec: &DistanceSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let pa = PreparedSet::new(a, spec)?;
    let pb = PreparedSet::new(b, spec)?;
    par::try_map_range(a.n_cases(), |i| {
        (0..b.n_cases())
            .map(|j| pa.distance(&pb, i, j, spec))
            .collect::<Result<Vec<f64>>>()
            .map_err(|e| Error::Case {
                index: i,
                source: Box::new(e),
            })
    })
}
