//! Cross-validates the next-reaction coupled exact/tau simulation against
//! an independent direct-method (SSA-style) implementation of the same
//! jump process. The two algorithms share only the variate generators;
//! the event scheduling, channel bookkeeping and clock handling are
//! disjoint, so agreement in both mean and variance of the pair
//! difference pins down the construction.

use taumc::coupling::coupled_exact_tau_with_h;
use taumc::model::Model;
use taumc::parallel::parallel_map;
use taumc::presets;
use taumc::stats;
use taumc::streams::PathStreams;
use taumc::trace::Record;

/// Direct-method simulation of the coupled pair (X, Z_h): between events
/// and grid crossings all 3K channel rates are constant, so the next event
/// time is exponential with the total rate and the channel is chosen
/// proportionally to its rate. Exponential memorylessness makes discarding
/// the pending event time at a grid crossing exact.
fn coupled_pair_direct(
    model: &Model,
    h: f64,
    t_end: f64,
    streams: &PathStreams,
) -> (Vec<i64>, Vec<i64>) {
    let network = &model.network;
    let k_num = network.num_reactions();
    let deltas: Vec<Vec<i64>> = network.reactions().iter().map(|r| r.delta()).collect();
    let mut x = model.initial.clone();
    let mut z = model.initial.clone();
    let mut lam_x = network.propensities(&x);
    let mut lam_z = network.propensities(&z);
    let mut clock_stream = streams.stream(u32::MAX, 1);
    let mut pick_stream = streams.stream(u32::MAX, 2);
    let steps = (t_end / h).round() as u64;
    let mut t = 0.0f64;
    let mut grid_index = 1u64;
    loop {
        // per-channel rates: [shared, x-residual, z-residual] per reaction
        let mut total = 0.0;
        let mut rates = Vec::with_capacity(3 * k_num);
        for k in 0..k_num {
            let shared = lam_x[k].min(lam_z[k]);
            rates.push(shared);
            rates.push(lam_x[k] - shared);
            rates.push(lam_z[k] - shared);
            total += lam_x[k].max(lam_z[k]);
        }
        let boundary = if grid_index >= steps {
            t_end
        } else {
            grid_index as f64 * h
        };
        let t_next = if total > 0.0 {
            t + clock_stream.exponential(total).unwrap()
        } else {
            f64::INFINITY
        };
        if t_next > boundary {
            t = boundary;
            if grid_index >= steps {
                break;
            }
            lam_z = network.propensities(&z);
            grid_index += 1;
            continue;
        }
        t = t_next;
        let mut target = pick_stream.uniform() * total;
        let mut chosen = 3 * k_num - 1;
        for (c, &r) in rates.iter().enumerate() {
            if target < r {
                chosen = c;
                break;
            }
            target -= r;
        }
        let k = chosen / 3;
        match chosen % 3 {
            0 => {
                for (i, &d) in deltas[k].iter().enumerate() {
                    x[i] += d;
                    z[i] += d;
                }
                lam_x = network.propensities(&x);
            }
            1 => {
                for (i, &d) in deltas[k].iter().enumerate() {
                    x[i] += d;
                }
                lam_x = network.propensities(&x);
            }
            _ => {
                for (i, &d) in deltas[k].iter().enumerate() {
                    z[i] += d;
                }
            }
        }
    }
    (x, z)
}

#[test]
fn next_reaction_and_direct_method_pairs_agree() {
    let model = presets::dimerization(1e4, 0.2).unwrap();
    let (h, t_end) = (0.01, 0.3);
    let n = 30_000u64;

    let diff_nrm: Vec<f64> = parallel_map(n, 0, |i| {
        let pair = coupled_exact_tau_with_h(
            &model,
            h,
            t_end,
            &PathStreams::new(101, 0, i),
            u64::MAX,
            Record::None,
        )
        .unwrap();
        (pair.exact_final[0] - pair.tau_final[0]) as f64 / 1e4
    });
    let diff_direct: Vec<f64> = parallel_map(n, 0, |i| {
        let (x, z) = coupled_pair_direct(&model, h, t_end, &PathStreams::new(202, 0, i));
        (x[0] - z[0]) as f64 / 1e4
    });

    let (m1, v1) = stats::mean_variance(&diff_nrm);
    let (m2, v2) = stats::mean_variance(&diff_direct);
    let se_mean = ((v1 + v2) / n as f64).sqrt();
    assert!(
        (m1 - m2).abs() < 4.0 * se_mean,
        "means differ: {m1} vs {m2} (4 SE = {})",
        4.0 * se_mean
    );
    let se_var = (stats::variance_stderr(&diff_nrm).powi(2)
        + stats::variance_stderr(&diff_direct).powi(2))
    .sqrt();
    assert!(
        (v1 - v2).abs() < 4.0 * se_var,
        "variances differ: {v1} vs {v2} (4 SE = {})",
        4.0 * se_var
    );
}
