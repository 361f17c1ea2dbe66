use std::fmt;

use super::NetworkError;

pub const SECONDS_PER_DAY: u32 = 86_400;
pub const DEFAULT_STEP_SECONDS: u32 = 300;

/// Discrete simulation clock. The horizon is always a whole number of days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeGrid {
    step_seconds: u32,
    horizon_days: u32,
}

impl TimeGrid {
    pub fn new(step_seconds: u32, horizon_days: u32) -> Result<Self, NetworkError> {
        if step_seconds == 0 || !SECONDS_PER_DAY.is_multiple_of(step_seconds) {
            return Err(NetworkError::InvalidGrid(format!(
                "step_seconds={step_seconds} must be positive and divide 86400"
            )));
        }
        if horizon_days == 0 {
            return Err(NetworkError::InvalidGrid("horizon must be at least one day".into()));
        }
        Ok(TimeGrid { step_seconds, horizon_days })
    }

    pub fn from_horizon_steps(step_seconds: u32, horizon_steps: u32) -> Result<Self, NetworkError> {
        let probe = TimeGrid::new(step_seconds, 1)?;
        let z = probe.steps_per_day();
        if horizon_steps == 0 || !horizon_steps.is_multiple_of(z) {
            return Err(NetworkError::InvalidGrid(format!(
                "horizon_steps={horizon_steps} is not a positive multiple of {z} steps/day"
            )));
        }
        TimeGrid::new(step_seconds, horizon_steps / z)
    }

    pub fn step_seconds(&self) -> u32 {
        self.step_seconds
    }

    pub fn steps_per_day(&self) -> u32 {
        SECONDS_PER_DAY / self.step_seconds
    }

    pub fn horizon_days(&self) -> u32 {
        self.horizon_days
    }

    pub fn horizon_steps(&self) -> u32 {
        self.horizon_days * self.steps_per_day()
    }

    /// Day containing `step`.
    #[inline]
    pub fn day_of(&self, step: u32) -> u32 {
        step / self.steps_per_day()
    }

    #[inline]
    pub fn seconds(&self, step: u32) -> f64 {
        f64::from(step) * f64::from(self.step_seconds)
    }

    /// Whole steps in `seconds`, rounded up.
    pub fn steps_ceil(&self, seconds: u32) -> u32 {
        seconds.div_ceil(self.step_seconds)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { step_seconds: DEFAULT_STEP_SECONDS, horizon_days: 7 }
    }
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s x {} steps/day x {} days", self.step_seconds, self.steps_per_day(), self.horizon_days)
    }
}
