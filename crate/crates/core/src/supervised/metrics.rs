use crate::data::LabelVector;
use crate::error::{Error, Result};

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(Error::InsufficientData("no predictions to score".into()));
    }
    Ok(())
}

fn targets<'a>(predicted: &'a LabelVector, truth: &'a LabelVector) -> Result<(&'a [f64], &'a [f64])> {
    match (predicted.as_target(), truth.as_target()) {
        (Some(p), Some(t)) => {
            check_lengths(p.len(), t.len())?;
            Ok((p, t))
        }
        _ => Err(Error::KindMismatch("error metrics need target labels".into())),
    }
}

/// Fraction of cases whose class label text agrees.
pub fn accuracy(predicted: &LabelVector, truth: &LabelVector) -> Result<f64> {
    let (p, t) = match (predicted.as_class(), truth.as_class()) {
        (Some(p), Some(t)) => (p, t),
        _ => return Err(Error::KindMismatch("accuracy needs class labels".into())),
    };
    check_lengths(p.codes().len(), t.codes().len())?;
    let hits = p.labels().zip(t.labels()).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / p.codes().len() as f64)
}

pub fn mae(predicted: &LabelVector, truth: &LabelVector) -> Result<f64> {
    let (p, t) = targets(predicted, truth)?;
    Ok(p.iter().zip(t).map(|(a, b)| (a - b).abs()).sum::<f64>() / p.len() as f64)
}

pub fn rmse(predicted: &LabelVector, truth: &LabelVector) -> Result<f64> {
    let (p, t) = targets(predicted, truth)?;
    Ok((p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / p.len() as f64).sqrt())
}
