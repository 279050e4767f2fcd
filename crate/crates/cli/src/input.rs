use std::fs;
use std::path::Path;

use tsml::data::parse_ts;
use tsml::{Collection, Error, LabelVector, Series};

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_ts(path: &Path) -> Result<(Collection, LabelVector), CliError> {
    let (collection, labels, _) = parse_ts(&read(path)?)?;
    Ok((collection, labels))
}

/// One decimal real per line.
pub fn parse_plain(text: &str) -> Result<Series, Error> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let token = line.trim();
        let v: f64 = token.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("expected a real, found '{token}'"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("non-finite value '{token}'"),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "series file is empty".into(),
        });
    }
    Series::univariate(values)
}

fn looks_like_ts(text: &str) -> bool {
    text.lines().map(str::trim).any(|l| l.starts_with('@'))
}

/// A single series from either a one-case `.ts` document or a plain file.
pub fn load_single(path: &Path) -> Result<Series, CliError> {
    let text = read(path)?;
    if !looks_like_ts(&text) {
        return Ok(parse_plain(&text)?);
    }
    let (collection, _, _) = parse_ts(&text)?;
    if collection.n_cases() != 1 {
        return Err(CliError::Usage(format!(
            "{} holds {} cases, expected one",
            path.display(),
            collection.n_cases()
        )));
    }
    Ok(collection.case(0).to_series())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_series() {
        assert_eq!(parse_plain("1\n2.5\n-3\n").unwrap().values(), &[1.0, 2.5, -3.0]);
        assert_eq!(parse_plain("4").unwrap().values(), &[4.0]);
        assert!(matches!(parse_plain("1\nx\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_plain(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_plain("1\n\n2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_plain("inf\n").is_err());
    }

    #[test]
    fn ts_detection() {
        assert!(looks_like_ts("# c\n@problemName x\n"));
        assert!(!looks_like_ts("1\n2\n"));
    }
}
