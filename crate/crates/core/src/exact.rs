//! Exact path generation by the next reaction method.
//!
//! Each reaction channel carries an internal unit-rate clock: `clock[k]`
//! is the internal time already consumed and `alarm[k]` the internal time
//! of the next firing. The next event is the channel minimizing the
//! residual internal time divided by its current intensity; intensities
//! are recomputed after every jump. This realizes the random time change
//! representation exactly, and the same bookkeeping is reused by the
//! coupled exact/tau simulation where rates also change at grid crossings.

use crate::error::Error;
use crate::model::Model;
use crate::streams::PathStreams;
use crate::trace::{Record, Recorder, Trajectory};

pub const DEFAULT_EVENT_BUDGET: u64 = 1_000_000_000;

/// Configuration for one exact path.
#[derive(Debug, Clone, Copy)]
pub struct ExactConfig {
    pub t_end: f64,
    pub record: Record,
    pub event_budget: u64,
}

impl ExactConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            record: Record::None,
            event_budget: DEFAULT_EVENT_BUDGET,
        }
    }

    pub fn with_record(mut self, record: Record) -> Self {
        self.record = record;
        self
    }

    pub fn with_event_budget(mut self, budget: u64) -> Self {
        self.event_budget = budget;
        self
    }
}

/// One exact sample path.
#[derive(Debug, Clone)]
pub struct ExactPath {
    pub final_state: Vec<i64>,
    /// Firing count per reaction.
    pub firings: Vec<u64>,
    /// Total jumps; the cost proxy for exact simulation.
    pub event_count: u64,
    pub trajectory: Option<Trajectory>,
}

/// Generate one statistically exact path of the network.
///
/// The initial state must be admissible (all counts nonnegative); exact
/// paths then never leave the admissible orthant because propensities
/// vanish at its boundary.
pub fn simulate_exact(
    model: &Model,
    config: &ExactConfig,
    streams: &PathStreams,
) -> Result<ExactPath, Error> {
    if !(config.t_end > 0.0) || !config.t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive and finite, got {}",
            config.t_end
        )));
    }
    if model.initial.iter().any(|&x| x < 0) {
        return Err(Error::InvalidParameter(
            "exact simulation requires a nonnegative initial state".into(),
        ));
    }

    let network = &model.network;
    let num_reactions = network.num_reactions();
    let deltas: Vec<Vec<i64>> = network.reactions().iter().map(|r| r.delta()).collect();

    let mut state = model.initial.clone();
    let mut rates = vec![0.0f64; num_reactions];
    let mut clock = vec![0.0f64; num_reactions];
    let mut alarm = vec![0.0f64; num_reactions];
    let mut channel_streams: Vec<_> = (0..num_reactions)
        .map(|k| streams.stream(k as u32, 1))
        .collect();
    for k in 0..num_reactions {
        alarm[k] = channel_streams[k].exponential(1.0)?;
    }

    let mut firings = vec![0u64; num_reactions];
    let mut events = 0u64;
    let mut t = 0.0f64;
    let mut recorder = Recorder::new(config.record, &state);

    network.propensities_into(&state, &mut rates);
    loop {
        let mut best: Option<(f64, usize)> = None;
        for k in 0..num_reactions {
            if rates[k] > 0.0 {
                let wait = (alarm[k] - clock[k]).max(0.0) / rates[k];
                if best.is_none_or(|(w, _)| wait < w) {
                    best = Some((wait, k));
                }
            }
        }
        let Some((wait, k_next)) = best else {
            break; // absorbing state
        };
        let t_next = t + wait;
        if !(t_next < config.t_end) {
            for k in 0..num_reactions {
                clock[k] += rates[k] * (config.t_end - t);
            }
            break;
        }

        recorder.advance_to(t_next, &state);
        for k in 0..num_reactions {
            clock[k] += rates[k] * wait;
        }
        t = t_next;

        apply_delta(&mut state, &deltas[k_next], 1)?;
        firings[k_next] += 1;
        events += 1;
        if events > config.event_budget {
            return Err(Error::EventBudgetExceeded {
                budget: config.event_budget,
            });
        }
        recorder.observe_jump(t, &state);
        alarm[k_next] += channel_streams[k_next].exponential(1.0)?;
        network.propensities_into(&state, &mut rates);
    }

    Ok(ExactPath {
        trajectory: recorder.finish(config.t_end, &state),
        final_state: state,
        firings,
        event_count: events,
    })
}

/// Total intensity at the model's initial state: the expected events per
/// unit time, for budgeting against the order-of-magnitude path cost.
pub fn estimate_event_rate(model: &Model) -> f64 {
    model.network.propensities(&model.initial).iter().sum()
}

pub(crate) fn apply_delta(state: &mut [i64], delta: &[i64], count: u64) -> Result<(), Error> {
    let count = i64::try_from(count).map_err(|_| Error::StateOverflow)?;
    for (s, &d) in state.iter_mut().zip(delta) {
        let step = d.checked_mul(count).ok_or(Error::StateOverflow)?;
        *s = s.checked_add(step).ok_or(Error::StateOverflow)?;
    }
    Ok(())
}
