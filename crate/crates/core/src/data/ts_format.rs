//! Reader and writer for the `.ts` dataset format.
//!
//! A document is a block of `@keyword value` header lines terminated by
//! `@data`, followed by one case per line. Channels are separated by `:`,
//! values within a channel by `,`, and a labelled document carries the class
//! label or real target as the final `:` field.

use std::fmt::Write as _;

use super::{ClassLabels, Collection, LabelKind, LabelVector, Layout, Series};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMetadata {
    pub problem_name: String,
    pub is_univariate: bool,
    pub is_equal_length: bool,
    /// Present exactly when `is_equal_length`.
    pub series_length: Option<usize>,
    pub label_kind: LabelKind,
    pub class_alphabet: Option<Vec<String>>,
}

impl DatasetMetadata {
    /// Metadata describing `collection` and `labels` as they stand.
    pub fn describe(problem_name: &str, collection: &Collection, labels: &LabelVector) -> Self {
        let is_equal_length = collection.is_dense();
        Self {
            problem_name: problem_name.to_string(),
            is_univariate: collection.n_channels() == 1,
            is_equal_length,
            series_length: if is_equal_length {
                collection.common_length()
            } else {
                None
            },
            label_kind: labels.kind(),
            class_alphabet: labels.as_class().map(|c| c.alphabet().to_vec()),
        }
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_bool(line: usize, key: &str, tok: Option<&str>) -> Result<bool> {
    match tok.map(str::to_ascii_lowercase).as_deref() {
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        _ => Err(perr(line, format!("{key} expects true or false"))),
    }
}

fn parse_count(line: usize, key: &str, tok: Option<&str>) -> Result<usize> {
    tok.and_then(|t| t.parse::<usize>().ok())
        .filter(|&v| v > 0)
        .ok_or_else(|| perr(line, format!("{key} expects a positive integer")))
}

fn parse_real(line: usize, tok: &str) -> Result<f64> {
    let tok = tok.trim();
    if tok == "?" {
        return Err(perr(line, "missing values ('?') are not supported"));
    }
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(perr(line, format!("'{tok}' is not a real number"))),
    }
}

#[derive(Default)]
struct Header {
    problem_name: Option<String>,
    univariate: Option<bool>,
    dimension: Option<usize>,
    equal_length: Option<bool>,
    series_length: Option<usize>,
    class_label: Option<Option<Vec<String>>>,
    target_label: Option<bool>,
}

impl Header {
    fn apply(&mut self, line_no: usize, line: &str) -> Result<()> {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or("").to_ascii_lowercase();
        let dup = |set: bool| {
            if set {
                Err(perr(line_no, format!("duplicate header {key}")))
            } else {
                Ok(())
            }
        };
        match key.as_str() {
            "@problemname" => {
                dup(self.problem_name.is_some())?;
                let name = toks
                    .next()
                    .ok_or_else(|| perr(line_no, "@problemName expects a token"))?;
                self.problem_name = Some(name.to_string());
            }
            "@univariate" => {
                dup(self.univariate.is_some())?;
                self.univariate = Some(parse_bool(line_no, &key, toks.next())?);
            }
            "@dimension" | "@dimensions" => {
                dup(self.dimension.is_some())?;
                self.dimension = Some(parse_count(line_no, &key, toks.next())?);
            }
            "@equallength" => {
                dup(self.equal_length.is_some())?;
                self.equal_length = Some(parse_bool(line_no, &key, toks.next())?);
            }
            "@serieslength" => {
                dup(self.series_length.is_some())?;
                self.series_length = Some(parse_count(line_no, &key, toks.next())?);
            }
            "@classlabel" => {
                dup(self.class_label.is_some())?;
                if parse_bool(line_no, &key, toks.next())? {
                    let alphabet: Vec<String> = toks.by_ref().map(str::to_string).collect();
                    if alphabet.is_empty() {
                        return Err(perr(line_no, "@classLabel true needs at least one label"));
                    }
                    let mut seen = std::collections::HashSet::new();
                    if !alphabet.iter().all(|a| seen.insert(a)) {
                        return Err(perr(line_no, "duplicate class label in @classLabel"));
                    }
                    self.class_label = Some(Some(alphabet));
                } else {
                    self.class_label = Some(None);
                }
            }
            "@targetlabel" => {
                dup(self.target_label.is_some())?;
                self.target_label = Some(parse_bool(line_no, &key, toks.next())?);
            }
            "@timestamps" => {
                if parse_bool(line_no, &key, toks.next())? {
                    return Err(perr(line_no, "timestamped series are not supported"));
                }
            }
            "@missing" => {
                parse_bool(line_no, &key, toks.next())?;
            }
            _ => return Err(perr(line_no, format!("unknown header '{key}'"))),
        }
        if toks.next().is_some() {
            return Err(perr(line_no, format!("trailing tokens after {key}")));
        }
        Ok(())
    }
}

/// Parses a complete `.ts` document.
pub fn parse_ts(text: &str) -> Result<(Collection, LabelVector, DatasetMetadata)> {
    let mut header = Header::default();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut data_line = None;
    for (no, line) in lines.by_ref() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !line.starts_with('@') {
            return Err(perr(no, "expected a header line before @data"));
        }
        if line.eq_ignore_ascii_case("@data") {
            data_line = Some(no);
            break;
        }
        header.apply(no, line)?;
    }
    let data_line = data_line.ok_or_else(|| perr(text.lines().count().max(1), "missing @data marker"))?;

    let problem_name = header
        .problem_name
        .ok_or_else(|| perr(data_line, "missing @problemName"))?;
    let univariate = header
        .univariate
        .ok_or_else(|| perr(data_line, "missing @univariate"))?;
    let equal_length = header
        .equal_length
        .ok_or_else(|| perr(data_line, "missing @equalLength"))?;
    let dimension = match (univariate, header.dimension) {
        (true, Some(d)) if d != 1 => return Err(perr(data_line, "@dimension must be 1 for univariate data")),
        (true, _) => 1,
        (false, Some(d)) => d,
        (false, None) => return Err(perr(data_line, "@dimension required for multivariate data")),
    };
    match (equal_length, header.series_length) {
        (true, None) => return Err(perr(data_line, "@seriesLength required when @equalLength true")),
        (false, Some(_)) => return Err(perr(data_line, "@seriesLength only allowed when @equalLength true")),
        _ => {}
    }
    let class_alphabet = header.class_label.clone().flatten();
    let label_kind = match (header.class_label, header.target_label) {
        (Some(Some(_)), Some(true)) => return Err(perr(data_line, "both @classLabel and @targetLabel are true")),
        (Some(Some(_)), _) => LabelKind::Class,
        (_, Some(true)) => LabelKind::Target,
        (None, None) => return Err(perr(data_line, "missing @classLabel or @targetLabel")),
        _ => LabelKind::None,
    };

    let mut cases = Vec::new();
    let mut codes = Vec::new();
    let mut targets = Vec::new();
    for (no, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields: Vec<&str> = line.split(':').collect();
        match label_kind {
            LabelKind::Class => {
                let lab = fields.pop().unwrap_or("").trim();
                let alphabet = class_alphabet.as_ref().expect("class kind has alphabet");
                let code = alphabet
                    .iter()
                    .position(|a| a == lab)
                    .ok_or_else(|| perr(no, format!("class label '{lab}' not declared")))?;
                codes.push(code);
            }
            LabelKind::Target => {
                let tok = fields.pop().unwrap_or("");
                targets.push(parse_real(no, tok)?);
            }
            LabelKind::None => {}
        }
        if fields.len() != dimension {
            return Err(perr(
                no,
                format!("expected {dimension} channel(s), found {}", fields.len()),
            ));
        }
        let channels = fields
            .iter()
            .map(|f| f.split(',').map(|v| parse_real(no, v)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(perr(no, "channels of a case differ in length"));
        }
        if let Some(m) = header.series_length {
            if len != m {
                return Err(perr(no, format!("case length {len} differs from @seriesLength {m}")));
            }
        }
        cases.push(Series::new(channels).map_err(|e| perr(no, e.to_string()))?);
    }
    if cases.is_empty() {
        return Err(perr(data_line, "no cases after @data"));
    }

    let layout = if equal_length { Layout::Dense } else { Layout::Ragged };
    let collection = Collection::new(layout, &cases)?;
    let labels = match label_kind {
        LabelKind::Class => LabelVector::Class(ClassLabels::new(class_alphabet.clone().unwrap(), codes)?),
        LabelKind::Target => LabelVector::Target(targets),
        LabelKind::None => LabelVector::None,
    };
    let meta = DatasetMetadata {
        problem_name,
        is_univariate: univariate,
        is_equal_length: equal_length,
        series_length: header.series_length,
        label_kind,
        class_alphabet,
    };
    Ok((collection, labels, meta))
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ':' || c == ',')
}

fn check_consistent(collection: &Collection, labels: &LabelVector, meta: &DatasetMetadata) -> Result<()> {
    let fail = |m: &str| Err(Error::Consistency(m.to_string()));
    if !is_token(&meta.problem_name) {
        return fail("problem name must be a single token");
    }
    if meta.is_univariate != (collection.n_channels() == 1) {
        return fail("univariate flag disagrees with channel count");
    }
    if meta.is_equal_length != collection.is_dense() {
        return fail("equal-length flag disagrees with collection layout");
    }
    let expected_len = if meta.is_equal_length {
        collection.common_length()
    } else {
        None
    };
    if meta.series_length != expected_len {
        return fail("series length disagrees with collection");
    }
    if meta.label_kind != labels.kind() {
        return fail("label kind disagrees with labels");
    }
    labels
        .check_len(collection.n_cases())
        .map_err(|_| Error::Consistency("label count differs from case count".into()))?;
    match labels {
        LabelVector::Class(c) => {
            if meta.class_alphabet.as_deref() != Some(c.alphabet()) {
                return fail("class alphabet disagrees with labels");
            }
            if !c.alphabet().iter().all(|a| is_token(a)) {
                return fail("class labels must be single tokens without ':' or ','");
            }
        }
        _ => {
            if meta.class_alphabet.is_some() {
                return fail("class alphabet given for non-class labels");
            }
        }
    }
    if let LabelVector::Target(t) = labels {
        if t.iter().any(|v| !v.is_finite()) {
            return fail("targets must be finite");
        }
    }
    if collection.raw_values().iter().any(|v| !v.is_finite()) {
        return fail("values must be finite");
    }
    Ok(())
}

/// Renders a dataset as a `.ts` document. Reals use the shortest
/// representation that parses back to the same value.
pub fn write_ts(collection: &Collection, labels: &LabelVector, meta: &DatasetMetadata) -> Result<String> {
    check_consistent(collection, labels, meta)?;
    let mut out = String::new();
    let b = |v: bool| if v { "true" } else { "false" };
    writeln!(out, "@problemName {}", meta.problem_name).unwrap();
    writeln!(out, "@univariate {}", b(meta.is_univariate)).unwrap();
    if !meta.is_univariate {
        writeln!(out, "@dimension {}", collection.n_channels()).unwrap();
    }
    writeln!(out, "@equalLength {}", b(meta.is_equal_length)).unwrap();
    if let Some(m) = meta.series_length {
        writeln!(out, "@seriesLength {m}").unwrap();
    }
    match labels {
        LabelVector::Class(c) => writeln!(out, "@classLabel true {}", c.alphabet().join(" ")).unwrap(),
        LabelVector::Target(_) => writeln!(out, "@targetLabel true").unwrap(),
        LabelVector::None => writeln!(out, "@classLabel false").unwrap(),
    }
    writeln!(out, "@data").unwrap();
    for (i, case) in collection.cases().enumerate() {
        for ch in 0..case.n_channels() {
            if ch > 0 {
                out.push(':');
            }
            for (t, v) in case.channel(ch).iter().enumerate() {
                if t > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
        }
        match labels {
            LabelVector::Class(c) => write!(out, ":{}", c.label(i)).unwrap(),
            LabelVector::Target(t) => write!(out, ":{}", t[i]).unwrap(),
            LabelVector::None => {}
        }
        out.push('\n');
    }
    Ok(out)
}
