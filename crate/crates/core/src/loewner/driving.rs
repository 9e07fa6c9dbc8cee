use serde::{Deserialize, Serialize};

use crate::{reduce_angle, Error, Result};

/// Slack allowed when a stage time overshoots the horizon by rounding.
const HORIZON_SLACK: f64 = 1e-12;

/// Driving angle `t ↦ β(t)` on `[0, T]`.
///
/// Sampled drivings are linear between samples; the samples are taken as
/// already unwrapped, so a jump of more than π between neighbours is
/// interpolated literally rather than the short way round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DrivingFunction {
    Constant { value: f64, horizon: f64 },
    Linear { start: f64, rate: f64, horizon: f64 },
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!("driving horizon T = {horizon} must be finite and ≥ 0")));
    }
    Ok(())
}

impl DrivingFunction {
    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !value.is_finite() {
            return Err(Error::Domain(format!("driving value {value} is not finite")));
        }
        Ok(DrivingFunction::Constant { value, horizon })
    }

    pub fn linear(start: f64, rate: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !(start.is_finite() && rate.is_finite()) {
            return Err(Error::Domain("linear driving needs finite start and rate".into()));
        }
        Ok(DrivingFunction::Linear { start, rate, horizon })
    }

    /// Samples `(tᵢ, βᵢ)` with `t₀ = 0` and strictly increasing times.
    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Domain(format!(
                "sampled driving needs matching nonempty columns ({} times, {} values)",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::Domain(format!("sampled driving must start at t = 0, got {}", times[0])));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("sampled driving times must be strictly increasing".into()));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled driving contains non-finite entries".into()));
        }
        Ok(DrivingFunction::Sampled { times, values })
    }

    /// Same driving cut (or declared) to a new horizon; sampled drivings
    /// cannot be extended past their last sample.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        match self {
            DrivingFunction::Constant { value, .. } => Self::constant(*value, horizon),
            DrivingFunction::Linear { start, rate, .. } => Self::linear(*start, *rate, horizon),
            DrivingFunction::Sampled { times, .. } => {
                let last = *times.last().unwrap_or(&0.0);
                if horizon > last + HORIZON_SLACK {
                    Err(Error::Domain(format!("sampled driving ends at t = {last}, before T = {horizon}")))
                } else {
                    Ok(self.clone())
                }
            }
        }
    }

    pub fn horizon(&self) -> f64 {
        match self {
            DrivingFunction::Constant { horizon, .. } | DrivingFunction::Linear { horizon, .. } => *horizon,
            DrivingFunction::Sampled { times, .. } => *times.last().unwrap_or(&0.0),
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= -HORIZON_SLACK && t <= self.horizon() + HORIZON_SLACK) {
            return Err(Error::Domain(format!(
                "driving evaluated at t = {t}, outside [0, {}]",
                self.horizon()
            )));
        }
        Ok(())
    }

    /// Unreduced angle, continuous in t.
    pub fn unwrapped(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match self {
            DrivingFunction::Constant { value, .. } => *value,
            DrivingFunction::Linear { start, rate, .. } => start + rate * t,
            DrivingFunction::Sampled { times, values } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    values[0]
                } else if k == times.len() {
                    values[k - 1]
                } else {
                    let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                    values[k - 1] + w * (values[k] - values[k - 1])
                }
            }
        })
    }

    /// β(t) reduced to `[0, 2π)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(reduce_angle(self.unwrapped(t)?))
    }

    /// Right derivative dβ/dt (piecewise constant for sampled drivings).
    pub fn slope(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match self {
            DrivingFunction::Constant { .. } => 0.0,
            DrivingFunction::Linear { rate, .. } => *rate,
            DrivingFunction::Sampled { times, values } => {
                if times.len() < 2 {
                    0.0
                } else {
                    let k = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
                    (values[k] - values[k - 1]) / (times[k] - times[k - 1])
                }
            }
        })
    }
}
