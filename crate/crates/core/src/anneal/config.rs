use crate::error::{domain, Result};

/// Starting configuration for every run.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialState {
    #[default]
    Zeros,
    Given(Vec<bool>),
}

/// Annealer settings. `None` in a tunable field means "derive automatically"
/// (see [`auto_tune`](super::auto_tune)).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Wall-clock budget in seconds, checked once per sweep.
    pub time_limit_sec: f64,
    pub seed: u64,
    pub t_initial: Option<f64>,
    pub t_final: Option<f64>,
    /// Per-step geometric temperature factor.
    pub decay: Option<f64>,
    pub offset_increment: Option<f64>,
    pub initial_state: InitialState,
    /// Worker threads for candidate evaluation; 0 uses the global pool.
    pub workers: usize,
    /// Optional hard cap on parallel-trial steps.
    pub max_steps: Option<u64>,
    /// Run exactly this many steps and ignore the clock. The schedule is
    /// still sized from `time_limit_sec`, so a recorded run can be replayed.
    pub replay_steps: Option<u64>,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit_sec: 10.0,
            seed: 42,
            t_initial: None,
            t_final: None,
            decay: None,
            offset_increment: None,
            initial_state: InitialState::Zeros,
            workers: 0,
            max_steps: None,
            replay_steps: None,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit_sec = seconds;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_limit_sec > 0.0 && self.time_limit_sec.is_finite()) {
            return Err(domain(format!(
                "time_limit_sec must be positive, got {}",
                self.time_limit_sec
            )));
        }
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => {
                Err(domain(format!("{name} must be positive, got {x}")))
            }
            _ => Ok(()),
        };
        positive("t_initial", self.t_initial)?;
        positive("t_final", self.t_final)?;
        if let Some(d) = self.decay {
            if !(d > 0.0 && d < 1.0) {
                return Err(domain(format!("decay must be in (0, 1), got {d}")));
            }
        }
        if let Some(inc) = self.offset_increment {
            if !(inc >= 0.0 && inc.is_finite()) {
                return Err(domain(format!("offset_increment must be >= 0, got {inc}")));
            }
        }
        Ok(())
    }
}
