//! Fixed-step tau-leaping path generation.
//!
//! The process freezes intensities on the grid `eta(s) = floor(s/h) h` and
//! advances by Poisson-distributed firing counts per step. Intensities
//! clamp to zero outside the admissible orthant but the state itself may
//! go negative; counts are drawn (with rate zero) even then, so every step
//! consumes the same number of draws per reaction.

use crate::error::Error;
use crate::exact::apply_delta;
use crate::model::Model;
use crate::streams::PathStreams;
use crate::trace::{Record, Recorder, Trajectory};

/// One tau-leap path.
#[derive(Debug, Clone)]
pub struct TauPath {
    pub h: f64,
    pub final_state: Vec<i64>,
    pub firings: Vec<u64>,
    pub steps: u64,
    /// Poisson draws performed; the cost proxy for tau-leaping.
    pub poisson_draws: u64,
    pub trajectory: Option<Trajectory>,
}

/// Number of steps for a span `t_end` and stepsize `h`, enforcing that
/// `t_end / h` is a positive integer to relative tolerance 1e-9.
pub fn validate_grid(t_end: f64, h: f64) -> Result<u64, Error> {
    if !(t_end > 0.0) || !t_end.is_finite() || !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidGrid { t_end, h });
    }
    let ratio = t_end / h;
    let steps = ratio.round();
    if steps < 1.0 || (ratio - steps).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::InvalidGrid { t_end, h });
    }
    Ok(steps as u64)
}

/// Generate one tau-leap path with stepsize `h` up to `t_end`.
pub fn simulate_tau(
    model: &Model,
    h: f64,
    t_end: f64,
    streams: &PathStreams,
    record: Record,
) -> Result<TauPath, Error> {
    let steps = validate_grid(t_end, h)?;
    let network = &model.network;
    let num_reactions = network.num_reactions();
    let deltas: Vec<Vec<i64>> = network.reactions().iter().map(|r| r.delta()).collect();

    let mut state = model.initial.clone();
    let mut rates = vec![0.0f64; num_reactions];
    let mut firings = vec![0u64; num_reactions];
    let mut channel_streams: Vec<_> = (0..num_reactions)
        .map(|k| streams.stream(k as u32, 1))
        .collect();
    let mut recorder = Recorder::new(record, &state);

    for step in 0..steps {
        network.propensities_into(&state, &mut rates);
        let t_next = (step + 1) as f64 * h;
        recorder.advance_to(t_next.min(t_end), &state);
        for k in 0..num_reactions {
            let count = channel_streams[k].poisson(rates[k] * h)?;
            if count > 0 {
                apply_delta(&mut state, &deltas[k], count)?;
                firings[k] += count;
            }
        }
    }

    Ok(TauPath {
        h,
        trajectory: recorder.finish(t_end, &state),
        final_state: state,
        firings,
        steps,
        poisson_draws: steps * num_reactions as u64,
    })
}
