//! Tightly coupled path pairs.
//!
//! Each reaction channel is split into a shared stream carrying the
//! pointwise minimum of the two intensities and two residual streams, one
//! per leg. Because the shared stream feeds both legs, the difference of
//! the pair is driven only by the residual intensities, which vanish as
//! the legs coincide. Per reaction the three streams use channels 1
//! (shared), 2 (fine/exact residual) and 3 (coarse/tau residual).

use crate::error::Error;
use crate::exact::apply_delta;
use crate::model::Model;
use crate::streams::{PathStreams, Stream};
use crate::tau::validate_grid;
use crate::trace::{Record, Recorder, Trajectory};

/// A coupled pair of tau-leap paths at neighboring resolutions.
#[derive(Debug, Clone)]
pub struct CoupledTauPair {
    pub h_fine: f64,
    pub refinement: u32,
    pub fine_final: Vec<i64>,
    pub coarse_final: Vec<i64>,
    /// Firing totals per reaction for channels [shared, fine, coarse].
    pub channel_firings: Vec<[u64; 3]>,
    /// Cost proxy: fine step count times the number of reactions.
    pub cost: u64,
    pub fine_trajectory: Option<Trajectory>,
    pub coarse_trajectory: Option<Trajectory>,
}

/// A coupled (exact, tau-leap) pair.
#[derive(Debug, Clone)]
pub struct CoupledExactTauPair {
    pub h: f64,
    pub exact_final: Vec<i64>,
    pub tau_final: Vec<i64>,
    /// Firing totals per reaction for channels [shared, exact, tau].
    pub channel_firings: Vec<[u64; 3]>,
    /// Jumps of the exact leg (shared + exact-residual firings).
    pub exact_jumps: u64,
    /// Cost proxy: exact jumps plus grid steps times reactions.
    pub cost: u64,
    pub exact_trajectory: Option<Trajectory>,
    pub tau_trajectory: Option<Trajectory>,
}

/// Draw the three channel counts for one reaction over one frozen step:
/// shared Poisson(min(lf, lc) h) plus the two residuals. Exactly one
/// residual mean is nonzero, and each leg's total is Poisson with its own
/// intensity by superposition.
pub fn channel_counts(
    shared: &mut Stream,
    fine_residual: &mut Stream,
    coarse_residual: &mut Stream,
    lam_fine: f64,
    lam_coarse: f64,
    h: f64,
) -> Result<(u64, u64, u64), Error> {
    let m = lam_fine.min(lam_coarse);
    let c1 = shared.poisson(m * h)?;
    let c2 = fine_residual.poisson((lam_fine - m) * h)?;
    let c3 = coarse_residual.poisson((lam_coarse - m) * h)?;
    Ok((c1, c2, c3))
}

/// Coupled tau pair on the level ladder: fine stepsize `t_end M^-level`,
/// coarse stepsize `M` times larger.
pub fn coupled_tau_pair(
    model: &Model,
    level: u32,
    refinement: u32,
    t_end: f64,
    streams: &PathStreams,
    record: Record,
) -> Result<CoupledTauPair, Error> {
    if level == 0 {
        return Err(Error::InvalidParameter(
            "a coupled pair needs level >= 1 (the coarse leg is level - 1)".into(),
        ));
    }
    if refinement < 2 {
        return Err(Error::InvalidParameter(
            "refinement factor must be >= 2".into(),
        ));
    }
    let steps = (refinement as u64)
        .checked_pow(level)
        .ok_or(Error::ScheduleOverflow { levels: level })?;
    let h_fine = t_end / steps as f64;
    coupled_tau_pair_with_h(model, h_fine, refinement, t_end, streams, record)
}

/// Coupled tau pair with an explicit fine stepsize.
///
/// `t_end / h_fine` must be an integer; the coarse leg freezes its
/// intensities every `refinement` fine steps, so its final window may be
/// partial when the fine step count is not a multiple of `refinement`.
/// `refinement = 1` degenerates to coupling a path with itself.
pub fn coupled_tau_pair_with_h(
    model: &Model,
    h_fine: f64,
    refinement: u32,
    t_end: f64,
    streams: &PathStreams,
    record: Record,
) -> Result<CoupledTauPair, Error> {
    if refinement < 1 {
        return Err(Error::InvalidParameter(
            "refinement factor must be >= 1".into(),
        ));
    }
    let steps = validate_grid(t_end, h_fine)?;
    let network = &model.network;
    let num_reactions = network.num_reactions();
    let deltas: Vec<Vec<i64>> = network.reactions().iter().map(|r| r.delta()).collect();

    let mut fine = model.initial.clone();
    let mut coarse = model.initial.clone();
    let mut lam_fine = vec![0.0f64; num_reactions];
    let mut lam_coarse = vec![0.0f64; num_reactions];
    let mut channels: Vec<[Stream; 3]> = (0..num_reactions as u32)
        .map(|k| {
            [
                streams.stream(k, 1),
                streams.stream(k, 2),
                streams.stream(k, 3),
            ]
        })
        .collect();
    let mut firings = vec![[0u64; 3]; num_reactions];
    let mut rec_fine = Recorder::new(record, &fine);
    let mut rec_coarse = Recorder::new(record, &coarse);

    for step in 0..steps {
        if step % refinement as u64 == 0 {
            network.propensities_into(&coarse, &mut lam_coarse);
        }
        network.propensities_into(&fine, &mut lam_fine);
        let t_next = ((step + 1) as f64 * h_fine).min(t_end);
        rec_fine.advance_to(t_next, &fine);
        rec_coarse.advance_to(t_next, &coarse);
        for k in 0..num_reactions {
            let [s1, s2, s3] = &mut channels[k];
            let (c1, c2, c3) = channel_counts(s1, s2, s3, lam_fine[k], lam_coarse[k], h_fine)?;
            if c1 + c2 > 0 {
                apply_delta(&mut fine, &deltas[k], c1 + c2)?;
            }
            if c1 + c3 > 0 {
                apply_delta(&mut coarse, &deltas[k], c1 + c3)?;
            }
            firings[k][0] += c1;
            firings[k][1] += c2;
            firings[k][2] += c3;
        }
    }

    Ok(CoupledTauPair {
        h_fine,
        refinement,
        fine_trajectory: rec_fine.finish(t_end, &fine),
        coarse_trajectory: rec_coarse.finish(t_end, &coarse),
        fine_final: fine,
        coarse_final: coarse,
        channel_firings: firings,
        cost: steps * num_reactions as u64,
    })
}

/// Coupled (exact, tau) pair on the ladder: tau stepsize `t_end M^-level`.
pub fn coupled_exact_tau(
    model: &Model,
    level: u32,
    refinement: u32,
    t_end: f64,
    streams: &PathStreams,
    event_budget: u64,
    record: Record,
) -> Result<CoupledExactTauPair, Error> {
    if refinement < 2 {
        return Err(Error::InvalidParameter(
            "refinement factor must be >= 2".into(),
        ));
    }
    let steps = (refinement as u64)
        .checked_pow(level)
        .ok_or(Error::ScheduleOverflow { levels: level })?;
    let h = t_end / steps as f64;
    coupled_exact_tau_with_h(model, h, t_end, streams, event_budget, record)
}

/// Coupled (exact, tau) pair with an explicit tau stepsize.
///
/// Runs a next-reaction simulation over `3K` channels with rates
/// `min(lam_X, lam_Z)`, `lam_X - min` and `lam_Z - min` per reaction, where
/// `lam_X` tracks the exact state at every jump and `lam_Z` is frozen on
/// the tau grid. Channels 1 and 2 advance the exact leg, channels 1 and 3
/// the tau leg; all rates are refreshed at every event and grid crossing.
pub fn coupled_exact_tau_with_h(
    model: &Model,
    h: f64,
    t_end: f64,
    streams: &PathStreams,
    event_budget: u64,
    record: Record,
) -> Result<CoupledExactTauPair, Error> {
    let steps = validate_grid(t_end, h)?;
    if model.initial.iter().any(|&x| x < 0) {
        return Err(Error::InvalidParameter(
            "exact simulation requires a nonnegative initial state".into(),
        ));
    }
    let network = &model.network;
    let num_reactions = network.num_reactions();
    let num_channels = 3 * num_reactions;
    let deltas: Vec<Vec<i64>> = network.reactions().iter().map(|r| r.delta()).collect();

    let mut x = model.initial.clone();
    let mut z = model.initial.clone();
    let mut lam_x = vec![0.0f64; num_reactions];
    let mut lam_z = vec![0.0f64; num_reactions];
    let mut rates = vec![0.0f64; num_channels];
    let mut clock = vec![0.0f64; num_channels];
    let mut alarm = vec![0.0f64; num_channels];
    let mut channel_streams: Vec<Stream> = (0..num_reactions as u32)
        .flat_map(|k| {
            [
                streams.stream(k, 1),
                streams.stream(k, 2),
                streams.stream(k, 3),
            ]
        })
        .collect();
    for (c, stream) in channel_streams.iter_mut().enumerate() {
        alarm[c] = stream.exponential(1.0)?;
    }

    let refresh = |rates: &mut [f64], lam_x: &[f64], lam_z: &[f64]| {
        for k in 0..num_reactions {
            let shared = lam_x[k].min(lam_z[k]);
            rates[3 * k] = shared;
            rates[3 * k + 1] = lam_x[k] - shared;
            rates[3 * k + 2] = lam_z[k] - shared;
        }
    };

    network.propensities_into(&x, &mut lam_x);
    network.propensities_into(&z, &mut lam_z);
    refresh(&mut rates, &lam_x, &lam_z);

    let mut firings = vec![[0u64; 3]; num_reactions];
    let mut exact_jumps = 0u64;
    let mut total_events = 0u64;
    let mut t = 0.0f64;
    let mut grid_index = 1u64;
    let mut rec_x = Recorder::new(record, &x);
    let mut rec_z = Recorder::new(record, &z);

    loop {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..num_channels {
            if rates[c] > 0.0 {
                let wait = (alarm[c] - clock[c]).max(0.0) / rates[c];
                if best.is_none_or(|(w, _)| wait < w) {
                    best = Some((wait, c));
                }
            }
        }
        let boundary = if grid_index >= steps {
            t_end
        } else {
            grid_index as f64 * h
        };
        let t_next = best.map_or(f64::INFINITY, |(w, _)| t + w);

        if t_next > boundary {
            for c in 0..num_channels {
                clock[c] += rates[c] * (boundary - t);
            }
            t = boundary;
            if grid_index >= steps {
                break;
            }
            // grid crossing: refresh the frozen tau intensities
            network.propensities_into(&z, &mut lam_z);
            refresh(&mut rates, &lam_x, &lam_z);
            grid_index += 1;
            continue;
        }

        let (wait, channel) = best.expect("finite t_next implies an active channel");
        rec_x.advance_to(t_next, &x);
        rec_z.advance_to(t_next, &z);
        for c in 0..num_channels {
            clock[c] += rates[c] * wait;
        }
        t = t_next;

        let k = channel / 3;
        match channel % 3 {
            0 => {
                apply_delta(&mut x, &deltas[k], 1)?;
                apply_delta(&mut z, &deltas[k], 1)?;
                exact_jumps += 1;
            }
            1 => {
                apply_delta(&mut x, &deltas[k], 1)?;
                exact_jumps += 1;
            }
            _ => {
                apply_delta(&mut z, &deltas[k], 1)?;
            }
        }
        firings[k][channel % 3] += 1;
        total_events += 1;
        if total_events > event_budget {
            return Err(Error::EventBudgetExceeded {
                budget: event_budget,
            });
        }
        rec_x.observe_jump(t, &x);
        rec_z.observe_jump(t, &z);
        alarm[channel] += channel_streams[channel].exponential(1.0)?;
        network.propensities_into(&x, &mut lam_x);
        refresh(&mut rates, &lam_x, &lam_z);
    }

    Ok(CoupledExactTauPair {
        h,
        exact_trajectory: rec_x.finish(t_end, &x),
        tau_trajectory: rec_z.finish(t_end, &z),
        exact_final: x,
        tau_final: z,
        channel_firings: firings,
        exact_jumps,
        cost: exact_jumps + steps * num_reactions as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{simulate_exact, ExactConfig, DEFAULT_EVENT_BUDGET};
    use crate::parallel::parallel_map;
    use crate::presets;
    use crate::stats;
    use crate::streams::StreamKey;

    fn stream(tag: u64, channel: u8) -> Stream {
        Stream::for_key(StreamKey {
            master_seed: tag,
            level: 0,
            path: 0,
            reaction: 0,
            channel,
        })
    }

    #[test]
    fn equal_intensities_fire_no_residuals() {
        let (mut s1, mut s2, mut s3) = (stream(1, 1), stream(1, 2), stream(1, 3));
        for _ in 0..200 {
            let (_, c2, c3) = channel_counts(&mut s1, &mut s2, &mut s3, 1.3, 1.3, 0.7).unwrap();
            assert_eq!((c2, c3), (0, 0));
        }
    }

    #[test]
    fn at_most_one_residual_mean_is_positive() {
        let (mut s1, mut s2, mut s3) = (stream(2, 1), stream(2, 2), stream(2, 3));
        let mut fired_fine = 0u64;
        let mut fired_coarse = 0u64;
        for i in 0..2000 {
            let (lf, lc) = if i % 2 == 0 { (2.0, 0.5) } else { (0.5, 2.0) };
            let (_, c2, c3) = channel_counts(&mut s1, &mut s2, &mut s3, lf, lc, 1.0).unwrap();
            if lf > lc {
                assert_eq!(c3, 0);
                fired_fine += c2;
            } else {
                assert_eq!(c2, 0);
                fired_coarse += c3;
            }
        }
        assert!(fired_fine > 0 && fired_coarse > 0);
    }

    #[test]
    fn self_coupling_is_pathwise_identical() {
        // refinement 1 couples a path with itself: residuals never fire
        let model = presets::dimerization(1e3, 0.2).unwrap();
        for path in 0..20 {
            let pair = coupled_tau_pair_with_h(
                &model,
                0.03,
                1,
                0.3,
                &PathStreams::new(17, 0, path),
                Record::None,
            )
            .unwrap();
            assert_eq!(pair.fine_final, pair.coarse_final);
            for f in &pair.channel_firings {
                assert_eq!(f[1], 0);
                assert_eq!(f[2], 0);
            }
        }
    }

    #[test]
    fn pair_legs_satisfy_conservation_and_bookkeeping() {
        let model = presets::dimerization(1e3, 0.2).unwrap();
        for path in 0..20 {
            let pair = coupled_tau_pair(
                &model,
                3,
                3,
                0.3,
                &PathStreams::new(19, 3, path),
                Record::None,
            )
            .unwrap();
            assert_eq!(pair.fine_final[0] + 2 * pair.fine_final[1], 600);
            assert_eq!(pair.coarse_final[0] + 2 * pair.coarse_final[1], 600);
            let mut fine = model.initial.clone();
            let mut coarse = model.initial.clone();
            for (k, reaction) in model.network.reactions().iter().enumerate() {
                let f = &pair.channel_firings[k];
                for (i, &z) in reaction.delta().iter().enumerate() {
                    fine[i] += z * (f[0] + f[1]) as i64;
                    coarse[i] += z * (f[0] + f[2]) as i64;
                }
            }
            assert_eq!(fine, pair.fine_final);
            assert_eq!(coarse, pair.coarse_final);
        }
    }

    #[test]
    fn partial_final_coarse_window_is_allowed() {
        // 100 fine steps with refinement 3: the coarse leg's last window is partial
        let model = presets::dimerization(1e3, 0.2).unwrap();
        let pair = coupled_tau_pair_with_h(
            &model,
            0.003,
            3,
            0.3,
            &PathStreams::new(23, 0, 0),
            Record::None,
        )
        .unwrap();
        assert_eq!(pair.cost, 200);
    }

    #[test]
    fn coupling_variance_is_far_below_independent_pairs() {
        let model = presets::dimerization(1e3, 0.2).unwrap();
        let t_end = 0.3;
        let n = 2000u64;
        let coupled: Vec<f64> = parallel_map(n, 2, |i| {
            let pair = coupled_tau_pair(
                &model,
                3,
                3,
                t_end,
                &PathStreams::new(29, 3, i),
                Record::None,
            )
            .unwrap();
            (pair.fine_final[0] - pair.coarse_final[0]) as f64 / 1e3
        });
        let independent: Vec<f64> = parallel_map(n, 2, |i| {
            let fine = crate::tau::simulate_tau(
                &model,
                t_end / 27.0,
                t_end,
                &PathStreams::new(31, 1, i),
                Record::None,
            )
            .unwrap();
            let coarse = crate::tau::simulate_tau(
                &model,
                t_end / 9.0,
                t_end,
                &PathStreams::new(31, 2, i),
                Record::None,
            )
            .unwrap();
            (fine.final_state[0] - coarse.final_state[0]) as f64 / 1e3
        });
        let (_, v_coupled) = stats::mean_variance(&coupled);
        let (_, v_indep) = stats::mean_variance(&independent);
        assert!(
            v_coupled < 0.1 * v_indep,
            "coupled {v_coupled} vs independent {v_indep}"
        );
    }

    #[test]
    fn exact_tau_pair_coincides_for_tiny_steps() {
        // residual intensities scale like the within-cell intensity drift,
        // so the legs coincide with probability -> 1 as h -> 0
        let model = presets::dimerization(1e4, 0.2).unwrap();
        let t_end = 0.3;
        let n = 1000u64;
        let same = parallel_map(n, 2, |i| {
            let pair = coupled_exact_tau_with_h(
                &model,
                t_end / 60_000.0,
                t_end,
                &PathStreams::new(37, 0, i),
                DEFAULT_EVENT_BUDGET,
                Record::None,
            )
            .unwrap();
            u64::from(pair.exact_final == pair.tau_final)
        })
        .into_iter()
        .sum::<u64>();
        assert!(
            same as f64 / n as f64 > 0.99,
            "paths coincide on only {same}/{n}"
        );
    }

    #[test]
    fn exact_marginal_of_pair_matches_plain_exact_simulation() {
        let model = presets::dimerization(1e4, 0.2).unwrap();
        let t_end = 0.3;
        let n = 10_000u64;
        let paired: Vec<f64> = parallel_map(n, 2, |i| {
            coupled_exact_tau(
                &model,
                2,
                3,
                t_end,
                &PathStreams::new(43, 9, i),
                DEFAULT_EVENT_BUDGET,
                Record::None,
            )
            .unwrap()
            .exact_final[0] as f64
        });
        let plain: Vec<f64> = parallel_map(n, 2, |i| {
            simulate_exact(
                &model,
                &ExactConfig::new(t_end),
                &PathStreams::new(47, 0, i),
            )
            .unwrap()
            .final_state[0] as f64
        });
        let (m1, v1) = stats::mean_variance(&paired);
        let (m2, v2) = stats::mean_variance(&plain);
        let se = ((v1 + v2) / n as f64).sqrt();
        assert!(
            (m1 - m2).abs() < 3.0 * se,
            "paired mean {m1} vs exact mean {m2} (3 SE = {})",
            3.0 * se
        );
    }

    #[test]
    fn exact_leg_never_leaves_orthant_tau_leg_may() {
        let model = presets::linear_decay(100.0, 100).unwrap();
        for i in 0..200 {
            let pair = coupled_exact_tau_with_h(
                &model,
                2.0,
                2.0,
                &PathStreams::new(53, 0, i),
                DEFAULT_EVENT_BUDGET,
                Record::None,
            )
            .unwrap();
            assert!(pair.exact_final[0] >= 0);
        }
    }
}
