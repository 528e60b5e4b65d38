//! Deterministic synthetic signals: piecewise-linear degradation,
//! piecewise-exponential relaxation and the Runge function.

use crate::error::{Error, Result};
use crate::moments::Timeserie;

/// Samples per stage the default step guarantees for the shortest stage.
pub const MIN_SAMPLES_PER_STAGE: f64 = 500.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    /// `f` is linear inside each stage with slope `rate`.
    LinearDecay,
    /// `ln f` is linear inside each stage with slope `rate`.
    ExponentialDecay,
}

/// Consecutive stages starting at `x = 0` with `f(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageSpec {
    pub rates: Vec<f64>,
    pub lengths: Vec<f64>,
    pub step: f64,
    pub kind: StageKind,
}

impl StageSpec {
    pub fn new(rates: Vec<f64>, lengths: Vec<f64>, step: f64, kind: StageKind) -> Result<Self> {
        let spec = Self {
            rates,
            lengths,
            step,
            kind,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uses [`default_step`] for the sampling interval.
    pub fn with_default_step(rates: Vec<f64>, lengths: Vec<f64>, kind: StageKind) -> Result<Self> {
        let step = default_step(&lengths);
        Self::new(rates, lengths, step, kind)
    }

    fn validate(&self) -> Result<()> {
        if self.rates.is_empty() || self.rates.len() != self.lengths.len() {
            return Err(Error::InvalidParameter(format!(
                "need matching non-empty rates and lengths, got {} and {}",
                self.rates.len(),
                self.lengths.len()
            )));
        }
        if let Some(l) = self.lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "stage length {l} must be > 0"
            )));
        }
        if let Some(r) = self.rates.iter().find(|r| !r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "stage rate {r} is not finite"
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step {} must be > 0",
                self.step
            )));
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Noise-free signal value at `x`.
    pub fn value(&self, x: f64) -> f64 {
        let mut start = 0.0;
        let mut level = 0.0;
        let last = self.rates.len() - 1;
        for (s, (&rate, &len)) in self.rates.iter().zip(&self.lengths).enumerate() {
            if x < start + len || s == last {
                let v = level + rate * (x - start);
                return match self.kind {
                    StageKind::LinearDecay => 1.0 + v,
                    StageKind::ExponentialDecay => v.exp(),
                };
            }
            level += rate * len;
            start += len;
        }
        unreachable!("at least one stage")
    }
}

/// Shortest stage divided by [`MIN_SAMPLES_PER_STAGE`].
pub fn default_step(lengths: &[f64]) -> f64 {
    lengths.iter().copied().fold(f64::INFINITY, f64::min) / MIN_SAMPLES_PER_STAGE
}

/// Samples `x_l = l · step` over the whole stage sequence.
pub fn gen_stages(spec: &StageSpec) -> Result<Timeserie> {
    spec.validate()?;
    let count = (spec.total_length() / spec.step + 1e-9).floor() as usize;
    let xs: Vec<f64> = (0..=count).map(|l| l as f64 * spec.step).collect();
    let fs = xs.iter().map(|&x| spec.value(x)).collect();
    Timeserie::new(xs, fs)
}

/// Piecewise-linear two-stage degradation.
pub fn gen_two_stage(spec: &StageSpec) -> Result<Timeserie> {
    if spec.kind != StageKind::LinearDecay || spec.rates.len() != 2 {
        return Err(Error::InvalidParameter(
            "two-stage model needs two linear-decay stages".into(),
        ));
    }
    gen_stages(spec)
}

/// Piecewise-exponential relaxation with a constant log-slope per stage.
pub fn gen_multistage_exp(spec: &StageSpec) -> Result<Timeserie> {
    if spec.kind != StageKind::ExponentialDecay {
        return Err(Error::InvalidParameter(
            "multi-stage exponential model needs exponential-decay stages".into(),
        ));
    }
    gen_stages(spec)
}

pub fn runge(x: f64) -> f64 {
    1.0 / (1.0 + 25.0 * x * x)
}

/// `m` uniform samples of the Runge function on `[-1, 1]`.
pub fn gen_runge(m: usize) -> Result<Timeserie> {
    if m < 2 {
        return Err(Error::InsufficientData { len: m, min: 2 });
    }
    let last = (m - 1) as f64;
    let xs: Vec<f64> = (0..m).map(|l| -1.0 + 2.0 * l as f64 / last).collect();
    let fs = xs.iter().map(|&x| runge(x)).collect();
    Timeserie::new(xs, fs)
}
