use std::fmt::Write as _;
use std::time::Instant;

use super::config::SolverConfig;
use super::par::{collect_ranges, with_workers};
use super::rng::CounterRng;
use super::state::{init_state, SolverState};
use crate::error::Result;
use crate::qubo::Hamiltonian;

/// Candidate evaluations per sweep; the wall-clock budget is checked once
/// per sweep.
pub const SWEEP_WORK: usize = 1 << 18;

/// Throughput assumed when sizing an automatic schedule from the time
/// budget (candidate evaluations per second). Kept independent of the
/// machine so the schedule, and hence the trajectory, is reproducible.
pub const NOMINAL_EVALS_PER_SEC: f64 = 5e7;

const TUNE_SAMPLES: usize = 1000;
const RESYNC_SWEEPS: u64 = 1024;
/// `exp(-40)` is below the smallest non-zero uniform draw (`2^-53`).
const REJECT_EXPONENT: f64 = 40.0;
const TUNE_STREAM: u64 = 0x7475_6e65;

/// Concrete temperature schedule and offset step of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub t_initial: f64,
    pub t_final: f64,
    /// Per-step multiplicative factor, floored at `t_final`.
    pub decay: f64,
    pub offset_increment: f64,
    /// Steps the decay was sized for.
    pub planned_steps: u64,
}

impl Schedule {
    pub fn temperature_at(&self, step: u64) -> f64 {
        (self.t_initial * self.decay.powf(step as f64)).max(self.t_final)
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best_bits: Vec<bool>,
    pub best_energy: f64,
    /// Actual wall-clock seconds spent, including setup and finalization.
    pub solve_time: f64,
    pub sweeps: u64,
    pub steps: u64,
    /// Steps that evaluated every candidate; the rest were settled from the
    /// cached smallest delta and only raised the offset.
    pub scanned_steps: u64,
    pub accepted_flips: u64,
    /// Steps that accepted nothing and raised the dynamic offset.
    pub offset_events: u64,
    /// `(elapsed_sec, best_energy)` at each improvement, when requested.
    pub energy_trace: Option<Vec<(f64, f64)>>,
    pub schedule: Schedule,
}

/// Renders a trace as CSV with header `elapsed_sec,best_energy`.
pub fn trace_csv(trace: &[(f64, f64)]) -> String {
    let mut out = String::from("elapsed_sec,best_energy\n");
    for (t, e) in trace {
        let _ = writeln!(out, "{t},{e}");
    }
    out
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Steps the automatic schedule is sized for under the nominal throughput.
pub fn estimated_steps(dimension: usize, config: &SolverConfig) -> u64 {
    let by_time =
        (config.time_limit_sec * NOMINAL_EVALS_PER_SEC / dimension.max(1) as f64).max(1.0) as u64;
    config.max_steps.map_or(by_time, |cap| by_time.min(cap.max(1)))
}

/// Fills in every automatic schedule value.
///
/// A random walk of 1000 flips from the initial state samples `|Δ|`.
/// `t_initial` gives the median uphill move an acceptance of one half
/// (`median / ln 2`, or 1.0 when nothing is uphill); the offset step is a
/// hundredth of the median `|Δ|`; `t_final` defaults to `t_initial / 10⁴`
/// unless the config fixes it; `decay` spans the two over the estimated step
/// budget.
pub fn auto_tune<H: Hamiltonian>(model: &H, config: &SolverConfig) -> Result<Schedule> {
    config.validate()?;
    let needs_sampling = config.t_initial.is_none() || config.offset_increment.is_none();
    let (mut uphill, mut all) = (Vec::new(), Vec::new());
    if needs_sampling {
        let mut state = init_state(model, config)?;
        let rng = CounterRng::new(config.seed).substream(TUNE_STREAM);
        let n = model.dimension();
        for s in 0..TUNE_SAMPLES as u64 {
            let a = rng.below_at(s, 0, n);
            let d = state.flip_delta(model, a);
            all.push(d.abs());
            if d > 0.0 {
                uphill.push(d);
            }
            state.apply_flip(model, a);
        }
    }
    let t_initial = config.t_initial.unwrap_or_else(|| {
        match median(&mut uphill) {
            Some(m) if m > 0.0 => m / std::f64::consts::LN_2,
            _ => 1.0,
        }
    });
    let offset_increment = config.offset_increment.unwrap_or_else(|| match median(&mut all) {
        Some(m) if m > 0.0 => 0.01 * m,
        _ => 0.01 * t_initial,
    });
    let t_final = config.t_final.unwrap_or(t_initial * 1e-4).min(t_initial);
    let planned_steps = estimated_steps(model.dimension(), config);
    let decay = config.decay.unwrap_or_else(|| {
        let d = (t_final / t_initial).powf(1.0 / planned_steps as f64);
        if d < 1.0 {
            d
        } else {
            1.0 - f64::EPSILON
        }
    });
    Ok(Schedule {
        t_initial,
        t_final,
        decay,
        offset_increment,
        planned_steps,
    })
}

/// Variables whose flip would be accepted at the current state: `Δ − offset`
/// is evaluated for every candidate against the same state and accepted
/// with probability `min(1, exp(−(Δ − offset)/T))`. The uniform draw for
/// variable `a` is `rng(step, a)`. Returns the smallest `Δ` seen.
pub fn trial_acceptances<H: Hamiltonian>(
    model: &H,
    state: &SolverState<H>,
    temperature: f64,
    rng: &CounterRng,
    step: u64,
    out: &mut Vec<usize>,
) -> f64 {
    debug_assert!(temperature > 0.0);
    let offset = state.offset;
    let draws = rng.at(step);
    let scan = |range: std::ops::Range<usize>, out: &mut Vec<usize>| {
        let mut low = f64::INFINITY;
        model.visit_deltas(&state.fields, &state.bits, range, |a, delta| {
            low = low.min(delta);
            if !certain_reject(delta, offset, temperature)
                && (delta <= offset || draws.uniform(a as u64) < (-(delta - offset) / temperature).exp())
            {
                out.push(a);
            }
        });
        low
    };
    collect_ranges(model.dimension(), scan, out)
}

/// True when a candidate is rejected without consulting its random draw.
/// Monotone in `delta`, so it holds for every candidate once it holds for
/// the smallest one.
#[inline]
fn certain_reject(delta: f64, offset: f64, temperature: f64) -> bool {
    let excess = delta - offset;
    excess > 0.0 && excess / temperature >= REJECT_EXPONENT
}

/// One parallel-trial step. If any candidate is accepted, one of them is
/// chosen uniformly (draw `rng(step, N)`) and applied, which clears the
/// offset; otherwise the offset grows by `offset_increment`.
pub fn parallel_trial_step<H: Hamiltonian>(
    model: &H,
    state: &mut SolverState<H>,
    temperature: f64,
    offset_increment: f64,
    rng: &CounterRng,
    step: u64,
    scratch: &mut Vec<usize>,
) -> Option<usize> {
    trial_step(model, state, temperature, offset_increment, rng, step, scratch).0
}

fn trial_step<H: Hamiltonian>(
    model: &H,
    state: &mut SolverState<H>,
    temperature: f64,
    offset_increment: f64,
    rng: &CounterRng,
    step: u64,
    scratch: &mut Vec<usize>,
) -> (Option<usize>, f64) {
    let low = trial_acceptances(model, state, temperature, rng, step, scratch);
    if scratch.is_empty() {
        state.offset += offset_increment;
        return (None, low);
    }
    let n = model.dimension() as u64;
    let chosen = scratch[rng.below_at(step, n, scratch.len())];
    state.apply_flip(model, chosen);
    (Some(chosen), low)
}

/// Runs parallel-trial annealing until the time budget (or the optional
/// step cap) is exhausted, returning the lowest-energy state visited.
pub fn anneal<H: Hamiltonian>(model: &H, config: &SolverConfig) -> Result<SolveResult> {
    let start = Instant::now();
    config.validate()?;
    let mut state = init_state(model, config)?;
    let schedule = auto_tune(model, config)?;
    with_workers(config.workers, move || {
        Ok(run(model, config, &mut state, schedule, start))
    })
}

fn run<H: Hamiltonian>(
    model: &H,
    config: &SolverConfig,
    state: &mut SolverState<H>,
    schedule: Schedule,
    start: Instant,
) -> SolveResult {
    let n = model.dimension();
    let rng = CounterRng::new(config.seed);
    let steps_per_sweep = (SWEEP_WORK / n).max(1) as u64;
    let max_steps = config
        .replay_steps
        .or(config.max_steps)
        .unwrap_or(u64::MAX);
    let tolerance = |e: f64| 1e-12 * (1.0 + e.abs());

    let mut best_bits = state.bits.clone();
    let mut best_energy = state.energy;
    let mut trace = config.record_trace.then(|| vec![(0.0, best_energy)]);
    let mut scratch = Vec::with_capacity(n);
    let mut temperature = schedule.t_initial;
    let mut floor: Option<f64> = None;
    let mut scanned = 0u64;
    let (mut step, mut sweeps, mut accepted, mut offset_events) = (0u64, 0u64, 0u64, 0u64);

    'outer: loop {
        for _ in 0..steps_per_sweep {
            if step >= max_steps {
                break 'outer;
            }
            // While the state is unchanged its smallest delta is known; a
            // step that would reject everything without drawing reduces to
            // raising the offset. Only scanned steps advance the schedule.
            if floor.is_some_and(|d| certain_reject(d, state.offset, temperature)) {
                state.offset += schedule.offset_increment;
                offset_events += 1;
            } else {
                let (chosen, low) = trial_step(
                    model,
                    state,
                    temperature,
                    schedule.offset_increment,
                    &rng,
                    step,
                    &mut scratch,
                );
                scanned += 1;
                temperature = (temperature * schedule.decay).max(schedule.t_final);
                if chosen.is_none() {
                    floor = Some(low);
                    offset_events += 1;
                } else {
                    floor = None;
                    accepted += 1;
                    if state.energy < best_energy - tolerance(best_energy) {
                        best_energy = state.energy;
                        best_bits.copy_from_slice(&state.bits);
                        if let Some(t) = trace.as_mut() {
                            t.push((start.elapsed().as_secs_f64(), best_energy));
                        }
                    }
                }
            }
            step += 1;
        }
        sweeps += 1;
        if sweeps % RESYNC_SWEEPS == 0 {
            state.resync(model);
        }
        if config.replay_steps.is_none() && start.elapsed().as_secs_f64() >= config.time_limit_sec {
            break;
        }
    }

    let best_energy = model.energy(&best_bits);
    SolveResult {
        best_bits,
        best_energy,
        solve_time: start.elapsed().as_secs_f64(),
        sweeps,
        steps: step,
        scanned_steps: scanned,
        accepted_flips: accepted,
        offset_events,
        energy_trace: trace,
        schedule,
    }
}
