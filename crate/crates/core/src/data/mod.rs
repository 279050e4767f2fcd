//! Series and collection value types, label vectors, the `.ts` format and
//! synthetic generators.

mod generators;
mod ts_format;

pub use generators::{make_blobs, make_sine_vs_noise};
pub use ts_format::{parse_ts, write_ts, DatasetMetadata};

use crate::error::{Error, Result};

/// A single multichannel series, stored channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    n_channels: usize,
    n_timepoints: usize,
    values: Vec<f64>,
    name: Option<String>,
}

impl Series {
    /// Builds a series from per-channel rows. Rows must be non-empty and of equal length.
    pub fn new(channels: Vec<Vec<f64>>) -> Result<Self> {
        let n_channels = channels.len();
        if n_channels == 0 {
            return Err(Error::invalid("series needs at least one channel"));
        }
        let n_timepoints = channels[0].len();
        if n_timepoints == 0 {
            return Err(Error::invalid("series needs at least one timepoint"));
        }
        if channels.iter().any(|c| c.len() != n_timepoints) {
            return Err(Error::invalid("channels of a series differ in length"));
        }
        Ok(Self {
            n_channels,
            n_timepoints,
            values: channels.concat(),
            name: None,
        })
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::new(vec![values])
    }

    /// Wraps a channel-major buffer of `n_channels * n_timepoints` values.
    pub fn from_flat(n_channels: usize, n_timepoints: usize, values: Vec<f64>) -> Result<Self> {
        if n_channels == 0 || n_timepoints == 0 {
            return Err(Error::invalid("series dimensions must be positive"));
        }
        if values.len() != n_channels * n_timepoints {
            return Err(Error::invalid("flat buffer size does not match dimensions"));
        }
        Ok(Self {
            n_channels,
            n_timepoints,
            values,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_timepoints(&self) -> usize {
        self.n_timepoints
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.values[c * self.n_timepoints..(c + 1) * self.n_timepoints]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn view(&self) -> SeriesView<'_> {
        SeriesView {
            n_channels: self.n_channels,
            n_timepoints: self.n_timepoints,
            values: &self.values,
        }
    }
}

/// Borrowed view of one series (a standalone [`Series`] or a collection case).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesView<'a> {
    n_channels: usize,
    n_timepoints: usize,
    values: &'a [f64],
}

impl<'a> SeriesView<'a> {
    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_timepoints(&self) -> usize {
        self.n_timepoints
    }

    pub fn channel(&self, c: usize) -> &'a [f64] {
        &self.values[c * self.n_timepoints..(c + 1) * self.n_timepoints]
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    #[inline]
    pub fn get(&self, channel: usize, t: usize) -> f64 {
        self.values[channel * self.n_timepoints + t]
    }

    pub fn to_series(&self) -> Series {
        Series {
            n_channels: self.n_channels,
            n_timepoints: self.n_timepoints,
            values: self.values.to_vec(),
            name: None,
        }
    }
}

impl<'a> From<&'a Series> for SeriesView<'a> {
    fn from(s: &'a Series) -> Self {
        s.view()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Dense,
    Ragged,
}

/// A set of cases sharing a channel count.
///
/// Values live in one contiguous buffer, case after case, each case
/// channel-major. For a dense collection this buffer is exactly the
/// `(n_cases, n_channels, n_timepoints)` row-major array.
#[derive(Debug, Clone, PartialEq)]
pub struct Collection {
    layout: Layout,
    n_channels: usize,
    lengths: Vec<usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl Collection {
    pub fn new(layout: Layout, cases: &[Series]) -> Result<Self> {
        Self::from_views(layout, cases.iter().map(Series::view))
    }

    /// Dense collection; every case must share its length.
    pub fn dense(cases: &[Series]) -> Result<Self> {
        Self::new(Layout::Dense, cases)
    }

    pub fn ragged(cases: &[Series]) -> Result<Self> {
        Self::new(Layout::Ragged, cases)
    }

    /// Dense collection of univariate cases.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cases = rows
            .iter()
            .map(|r| Series::univariate(r.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::dense(&cases)
    }

    pub fn from_views<'a, I>(layout: Layout, cases: I) -> Result<Self>
    where
        I: IntoIterator<Item = SeriesView<'a>>,
    {
        let mut n_channels = None;
        let mut lengths = Vec::new();
        let mut offsets = Vec::new();
        let mut data = Vec::new();
        for case in cases {
            match n_channels {
                None => n_channels = Some(case.n_channels()),
                Some(c) if c != case.n_channels() => {
                    return Err(Error::ChannelMismatch {
                        left: c,
                        right: case.n_channels(),
                    })
                }
                _ => {}
            }
            if layout == Layout::Dense {
                if let Some(&first) = lengths.first() {
                    if first != case.n_timepoints() {
                        return Err(Error::LengthMismatch {
                            left: first,
                            right: case.n_timepoints(),
                        });
                    }
                }
            }
            offsets.push(data.len());
            lengths.push(case.n_timepoints());
            data.extend_from_slice(case.values());
        }
        let n_channels = n_channels.ok_or(Error::EmptyCollection)?;
        Ok(Self {
            layout,
            n_channels,
            lengths,
            offsets,
            data,
        })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn is_dense(&self) -> bool {
        self.layout == Layout::Dense
    }

    pub fn n_cases(&self) -> usize {
        self.lengths.len()
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Shared length when all cases have one.
    pub fn common_length(&self) -> Option<usize> {
        let first = *self.lengths.first()?;
        self.lengths.iter().all(|&l| l == first).then_some(first)
    }

    pub fn case(&self, i: usize) -> SeriesView<'_> {
        let len = self.lengths[i];
        let start = self.offsets[i];
        SeriesView {
            n_channels: self.n_channels,
            n_timepoints: len,
            values: &self.data[start..start + len * self.n_channels],
        }
    }

    pub fn cases(&self) -> impl ExactSizeIterator<Item = SeriesView<'_>> + '_ {
        (0..self.n_cases()).map(move |i| self.case(i))
    }

    /// `(case, channel, t)` indexing.
    pub fn get(&self, case: usize, channel: usize, t: usize) -> f64 {
        self.case(case).get(channel, t)
    }

    /// The contiguous `(n_cases, n_channels, n_timepoints)` buffer of a dense collection.
    pub fn as_dense(&self) -> Option<(&[f64], [usize; 3])> {
        match self.layout {
            Layout::Dense => Some((&self.data, [self.n_cases(), self.n_channels, self.lengths[0]])),
            Layout::Ragged => None,
        }
    }

    /// Raw value buffer, all cases back to back.
    pub fn raw_values(&self) -> &[f64] {
        &self.data
    }

    pub fn to_series(&self) -> Vec<Series> {
        self.cases().map(|c| c.to_series()).collect()
    }

    /// Cases at `indices`, in that order, keeping the layout.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::from_views(self.layout, indices.iter().map(|&i| self.case(i)))
    }
}

/// Class labels as an alphabet plus per-case codes into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLabels {
    alphabet: Vec<String>,
    codes: Vec<usize>,
}

impl ClassLabels {
    pub fn new(alphabet: Vec<String>, codes: Vec<usize>) -> Result<Self> {
        if codes.iter().any(|&c| c >= alphabet.len()) {
            return Err(Error::Consistency("class code outside alphabet".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !alphabet.iter().all(|a| seen.insert(a)) {
            return Err(Error::Consistency("duplicate class in alphabet".into()));
        }
        Ok(Self { alphabet, codes })
    }

    /// Labels from text; the alphabet is the distinct labels in first-seen order.
    pub fn from_text<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut alphabet: Vec<String> = Vec::new();
        let codes = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                match alphabet.iter().position(|a| a == l) {
                    Some(i) => i,
                    None => {
                        alphabet.push(l.to_string());
                        alphabet.len() - 1
                    }
                }
            })
            .collect();
        Self { alphabet, codes }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn n_classes(&self) -> usize {
        self.alphabet.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.alphabet[self.codes[i]]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.codes.iter().map(move |&c| self.alphabet[c].as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    Class,
    Target,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LabelVector {
    Class(ClassLabels),
    Target(Vec<f64>),
    None,
}

impl LabelVector {
    pub fn kind(&self) -> LabelKind {
        match self {
            LabelVector::Class(_) => LabelKind::Class,
            LabelVector::Target(_) => LabelKind::Target,
            LabelVector::None => LabelKind::None,
        }
    }

    /// Number of labelled cases; `None` when the vector carries no labels.
    pub fn len(&self) -> Option<usize> {
        match self {
            LabelVector::Class(c) => Some(c.codes.len()),
            LabelVector::Target(t) => Some(t.len()),
            LabelVector::None => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn as_class(&self) -> Option<&ClassLabels> {
        match self {
            LabelVector::Class(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_target(&self) -> Option<&[f64]> {
        match self {
            LabelVector::Target(t) => Some(t),
            _ => None,
        }
    }

    /// Labels at `indices`, in that order; class alphabets are kept whole.
    pub fn select(&self, indices: &[usize]) -> Self {
        match self {
            LabelVector::Class(c) => LabelVector::Class(ClassLabels {
                alphabet: c.alphabet.clone(),
                codes: indices.iter().map(|&i| c.codes[i]).collect(),
            }),
            LabelVector::Target(t) => LabelVector::Target(indices.iter().map(|&i| t[i]).collect()),
            LabelVector::None => LabelVector::None,
        }
    }

    pub(crate) fn check_len(&self, n_cases: usize) -> Result<()> {
        match self.len() {
            Some(n) if n != n_cases => Err(Error::LengthMismatch {
                left: n_cases,
                right: n,
            }),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_collection_is_contiguous_3d() {
        let c = Collection::dense(&[
            Series::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap(),
            Series::new(vec![vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap(),
        ])
        .unwrap();
        let (buf, shape) = c.as_dense().unwrap();
        assert_eq!(shape, [2, 2, 2]);
        for i in 0..2 {
            for ch in 0..2 {
                for t in 0..2 {
                    assert_eq!(buf[(i * 2 + ch) * 2 + t], c.get(i, ch, t));
                }
            }
        }
        assert_eq!(c.get(1, 1, 0), 7.0);
    }

    #[test]
    fn dense_rejects_unequal_lengths() {
        let r = Collection::dense(&[
            Series::univariate(vec![1.0, 2.0]).unwrap(),
            Series::univariate(vec![1.0]).unwrap(),
        ]);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn channel_counts_must_agree() {
        let r = Collection::ragged(&[
            Series::univariate(vec![1.0]).unwrap(),
            Series::new(vec![vec![1.0], vec![2.0]]).unwrap(),
        ]);
        assert!(matches!(r, Err(Error::ChannelMismatch { .. })));
        assert_eq!(Collection::ragged(&[]), Err(Error::EmptyCollection));
    }

    #[test]
    fn series_rejects_ragged_channels() {
        assert!(Series::new(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(Series::univariate(vec![]).is_err());
    }

    #[test]
    fn class_labels_from_text_keep_first_seen_order() {
        let l = ClassLabels::from_text(&["b", "a", "b"]);
        assert_eq!(l.alphabet(), &["b".to_string(), "a".to_string()]);
        assert_eq!(l.codes(), &[0, 1, 0]);
        assert!(ClassLabels::new(vec!["x".into()], vec![1]).is_err());
    }
}
