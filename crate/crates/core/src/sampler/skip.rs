use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the reverse process walks from `T` to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SkipMode {
    #[default]
    Full,
    Uniform {
        s: usize,
    },
    /// Interval 2 above `0.7T`, 5 above `0.3T`, 10 below.
    Adaptive,
}

/// Strictly decreasing evaluated timesteps from `T` down to 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipSchedule {
    pub steps: Vec<usize>,
    pub mode: SkipMode,
}

impl SkipSchedule {
    /// Number of evaluated timesteps, counting both ends.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Consecutive `(t, t_next)` transitions.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.steps.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn total_steps(&self) -> usize {
        self.steps[0]
    }
}

/// Adaptive interval at timestep `t` of `total`.
pub fn adaptive_interval(t: usize, total: usize) -> usize {
    let x = t as f64;
    let n = total as f64;
    if x > 0.7 * n {
        2
    } else if x > 0.3 * n {
        5
    } else {
        10
    }
}

pub fn make_skip_schedule(total: usize, mode: SkipMode) -> Result<SkipSchedule> {
    if total < 2 {
        return Err(Error::domain(format!("skip schedules need T >= 2, got {total}")));
    }
    let interval = |t: usize| match mode {
        SkipMode::Full => 1,
        SkipMode::Uniform { s } => s,
        SkipMode::Adaptive => adaptive_interval(t, total),
    };
    if let SkipMode::Uniform { s: 0 } = mode {
        return Err(Error::config("uniform skip interval must be at least 1"));
    }
    let mut steps = vec![total];
    let mut t = total;
    while t > 0 {
        t = t.saturating_sub(interval(t));
        steps.push(t);
    }
    Ok(SkipSchedule { steps, mode })
}
