//! Collection-level transformer steps composed with a terminal estimator.

use crate::data::{Collection, LabelVector};
use crate::error::{Error, Result};
use crate::estimator::{
    fit_guard, guard_predict, summarize, CollectionEstimator, Estimator, EstimatorState, LengthRule, TagSet,
};
use crate::transform::{broadcast, pad, truncate_to, znorm, PadPolicy, PadTarget};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Pad(PadPolicy),
    Truncate,
    ZNorm,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Pad(_) => "pad",
            Step::Truncate => "truncate",
            Step::ZNorm => "znorm",
        }
    }

    /// Whether the step always outputs equal-length collections.
    pub fn equalizes_length(&self) -> bool {
        matches!(self, Step::Pad(_) | Step::Truncate)
    }
}

/// A step with its parameters frozen at fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FittedStep {
    Pad(PadPolicy, usize),
    Truncate(usize),
    ZNorm,
}

fn apply_znorm(x: &Collection) -> Result<Collection> {
    broadcast(|c| Ok(znorm(c)), x)
}

impl FittedStep {
    fn fit(step: Step, x: &Collection) -> Result<(Self, Collection)> {
        let fitted = match step {
            Step::Pad(policy) => {
                let longest = x.lengths().iter().copied().max().unwrap_or(0);
                let target = match policy.target_length {
                    PadTarget::Auto => longest,
                    PadTarget::Length(t) => t,
                };
                FittedStep::Pad(policy, target)
            }
            Step::Truncate => FittedStep::Truncate(x.lengths().iter().copied().min().unwrap_or(0)),
            Step::ZNorm => FittedStep::ZNorm,
        };
        let out = fitted.apply(x)?;
        Ok((fitted, out))
    }

    fn apply(&self, x: &Collection) -> Result<Collection> {
        match *self {
            FittedStep::Pad(policy, target) => pad(x, &PadPolicy::new(policy.fill, PadTarget::Length(target))),
            FittedStep::Truncate(len) => {
                let shortest = x.lengths().iter().copied().min().unwrap_or(0);
                if shortest < len {
                    return Err(Error::LengthMismatch {
                        left: len,
                        right: shortest,
                    });
                }
                truncate_to(x, len)
            }
            FittedStep::ZNorm => apply_znorm(x),
        }
    }
}

pub struct Pipeline {
    steps: Vec<Step>,
    terminal: Box<dyn CollectionEstimator>,
    state: EstimatorState,
    fitted_steps: Vec<FittedStep>,
}

impl std::fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pipeline")
            .field("steps", &self.steps)
            .field("terminal", &self.terminal.name())
            .field("fitted", &self.state.is_fitted())
            .finish()
    }
}

pub fn make_pipeline(steps: Vec<Step>, terminal: Box<dyn CollectionEstimator>) -> Pipeline {
    Pipeline {
        steps,
        terminal,
        state: EstimatorState::new(),
        fitted_steps: Vec::new(),
    }
}

impl Pipeline {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn terminal(&self) -> &dyn CollectionEstimator {
        self.terminal.as_ref()
    }

    /// Terminal tags, widened to unequal length when any step equalizes it.
    pub fn effective_tags(&self) -> TagSet {
        let mut tags = self.terminal.tags();
        tags.unequal_length |= self.steps.iter().any(Step::equalizes_length);
        tags
    }

    /// Runs the frozen steps on `x`.
    pub fn transform(&self, x: &Collection) -> Result<Collection> {
        if !self.state.is_fitted() {
            return Err(Error::NotFitted);
        }
        let mut current = x.clone();
        for step in &self.fitted_steps {
            current = step.apply(&current)?;
        }
        Ok(current)
    }
}

impl Estimator for Pipeline {
    fn name(&self) -> &'static str {
        "pipeline"
    }

    fn tags(&self) -> TagSet {
        self.effective_tags()
    }
}

impl CollectionEstimator for Pipeline {
    fn fit(&mut self, x: &Collection, labels: &LabelVector) -> Result<()> {
        let mut state = EstimatorState::new();
        fit_guard(&mut state, &self.effective_tags(), x)?;
        let mut fitted = Vec::with_capacity(self.steps.len());
        let mut current = x.clone();
        for &step in &self.steps {
            let (f, out) = FittedStep::fit(step, &current)?;
            fitted.push(f);
            current = out;
        }
        self.terminal.fit(&current, labels)?;
        self.fitted_steps = fitted;
        self.state = state;
        Ok(())
    }

    fn predict(&self, x: &Collection) -> Result<LabelVector> {
        guard_predict(&self.state, &self.effective_tags(), x, LengthRule::Any)?;
        let transformed = self.transform(x).map_err(|e| match e {
            Error::TargetTooShort { .. } | Error::LengthMismatch { .. } => Error::SchemaMismatch {
                fitted: Box::new(self.state.fitted_metadata().cloned().expect("fitted")),
                found: Box::new(summarize(x).expect("validated above")),
            },
            e => e,
        })?;
        self.terminal.predict(&transformed)
    }

    fn is_fitted(&self) -> bool {
        self.state.is_fitted()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ClassLabels, Series};
    use crate::distances::DistanceKind;
    use crate::supervised::{KNeighbors, KnnConfig, Rocket, RocketConfig};
    use crate::transform::PadFill;

    fn ragged(lengths: &[usize]) -> Collection {
        let cases: Vec<Series> = lengths
            .iter()
            .enumerate()
            .map(|(i, &n)| Series::univariate((0..n).map(|t| ((t * (i + 1)) % 5) as f64).collect()).unwrap())
            .collect();
        Collection::ragged(&cases).unwrap()
    }

    fn rocket() -> Box<dyn CollectionEstimator> {
        Box::new(Rocket::new(RocketConfig::new(20, 0)))
    }

    fn pad_auto() -> Step {
        Step::Pad(PadPolicy::new(PadFill::Zero, PadTarget::Auto))
    }

    #[test]
    fn tag_propagation() {
        assert!(
            make_pipeline(vec![pad_auto()], rocket())
                .effective_tags()
                .unequal_length
        );
        assert!(
            !make_pipeline(vec![Step::ZNorm], rocket())
                .effective_tags()
                .unequal_length
        );
        let knn = KNeighbors::new(KnnConfig::new(1, DistanceKind::Dtw.into()));
        let tags = knn.tags();
        assert_eq!(make_pipeline(vec![], Box::new(knn)).effective_tags(), tags);
    }

    #[test]
    fn pad_pipeline_on_ragged_rocket() {
        let x = ragged(&[10, 12, 9, 11]);
        let y = LabelVector::Class(ClassLabels::from_text(&["a", "b", "a", "b"]));
        let err = make_pipeline(vec![], rocket()).fit(&x, &y).unwrap_err();
        assert!(matches!(err, Error::Capability(r) if r.names("unequal_length")));
        let mut p = make_pipeline(vec![pad_auto()], rocket());
        p.fit(&x, &y).unwrap();
        assert_eq!(p.predict(&ragged(&[8, 12])).unwrap().len(), Some(2));
        assert!(matches!(p.predict(&ragged(&[13])), Err(Error::SchemaMismatch { .. })));
    }

    #[test]
    fn truncate_freezes_length() {
        let x = ragged(&[10, 12, 9, 11]);
        let y = LabelVector::Class(ClassLabels::from_text(&["a", "b", "a", "b"]));
        let mut p = make_pipeline(vec![Step::Truncate, Step::ZNorm], rocket());
        p.fit(&x, &y).unwrap();
        assert!(p.predict(&ragged(&[9, 30])).is_ok());
        assert!(matches!(p.predict(&ragged(&[8])), Err(Error::SchemaMismatch { .. })));
    }

    #[test]
    fn empty_pipeline_matches_terminal() {
        let x = ragged(&[7, 9, 8, 6]);
        let y = LabelVector::Class(ClassLabels::from_text(&["a", "b", "b", "a"]));
        let cfg = KnnConfig::new(1, DistanceKind::Msm.into());
        let mut alone = KNeighbors::new(cfg.clone());
        alone.fit(&x, &y).unwrap();
        let mut p = make_pipeline(vec![], Box::new(KNeighbors::new(cfg)));
        p.fit(&x, &y).unwrap();
        let test = ragged(&[5, 10]);
        assert_eq!(p.predict(&test).unwrap(), alone.predict(&test).unwrap());
    }

    #[test]
    fn predict_before_fit() {
        let p = make_pipeline(vec![pad_auto()], rocket());
        assert_eq!(p.predict(&ragged(&[8])), Err(Error::NotFitted));
    }
}
