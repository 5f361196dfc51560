//! Experiment harness: variance sweeps over (N, h) grids, log-log power-law
//! fitting, mean-field diagnostics and cost-versus-accuracy measurements.

use serde::Serialize;

use crate::coupling::{coupled_exact_tau_with_h, coupled_tau_pair_with_h};
use crate::error::Error;
use crate::exact::{simulate_exact, ExactConfig, DEFAULT_EVENT_BUDGET};
use crate::mlmc::{self, EstimatorKind, MlmcConfig, Observable};
use crate::model::Model;
use crate::parallel::parallel_map;
use crate::stats;
use crate::streams::PathStreams;
use crate::tau::{simulate_tau, validate_grid};
use crate::trace::Record;

/// Which coupled pair a sweep simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    TauTau,
    ExactTau,
}

impl PairKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::TauTau => "tau-tau",
            Self::ExactTau => "exact-tau",
        }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        match text {
            "tau-tau" => Ok(Self::TauTau),
            "exact-tau" => Ok(Self::ExactTau),
            other => Err(Error::InvalidParameter(format!(
                "unknown pair kind `{other}` (expected `tau-tau` or `exact-tau`)"
            ))),
        }
    }
}

/// One cell of a variance sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: f64,
    pub h: f64,
    pub kind: PairKind,
    pub pairs: u64,
    /// Unbiased sample variance of `f(fine) - f(coarse)`.
    pub variance: f64,
    /// Standard error of the variance, via the fourth central moment.
    pub var_stderr: f64,
    pub cost: u64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub t_end: f64,
    /// Coarse/fine step ratio for tau-tau pairs.
    pub refinement: u32,
    pub pairs: u64,
    pub seed: u64,
    pub workers: usize,
    pub event_budget: u64,
}

impl SweepConfig {
    pub fn new(t_end: f64, pairs: u64) -> Self {
        Self {
            t_end,
            refinement: 3,
            pairs,
            seed: 0,
            workers: 0,
            event_budget: DEFAULT_EVENT_BUDGET,
        }
    }
}

/// Simulate coupled pairs over the (N, h) grid and record the sample
/// variance of the observable difference per cell. The base model is
/// re-instantiated at each N (fixed exponents and scaled initial state).
pub fn variance_sweep(
    base_model: &Model,
    n_values: &[f64],
    h_values: &[f64],
    kind: PairKind,
    f: &Observable,
    config: &SweepConfig,
) -> Result<Vec<SweepRow>, Error> {
    if n_values.is_empty() || h_values.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one N and one h".into(),
        ));
    }
    if config.pairs < 100 {
        return Err(Error::InvalidParameter(
            "sweep needs at least 100 pairs per cell".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_values.len() * h_values.len());
    for (ni, &n) in n_values.iter().enumerate() {
        let model = base_model.rescaled(n)?;
        for (hi, &h) in h_values.iter().enumerate() {
            let cell = (ni * h_values.len() + hi) as u32;
            let results: Vec<Result<(f64, u64), Error>> =
                parallel_map(config.pairs, config.workers, |i| {
                    let streams = PathStreams::new(config.seed, cell, i);
                    match kind {
                        PairKind::TauTau => {
                            let pair = coupled_tau_pair_with_h(
                                &model,
                                h,
                                config.refinement,
                                config.t_end,
                                &streams,
                                Record::None,
                            )?;
                            let diff = f.eval_unscaled(&model.scaling, &pair.fine_final)
                                - f.eval_unscaled(&model.scaling, &pair.coarse_final);
                            Ok((diff, pair.cost))
                        }
                        PairKind::ExactTau => {
                            let pair = coupled_exact_tau_with_h(
                                &model,
                                h,
                                config.t_end,
                                &streams,
                                config.event_budget,
                                Record::None,
                            )?;
                            let diff = f.eval_unscaled(&model.scaling, &pair.exact_final)
                                - f.eval_unscaled(&model.scaling, &pair.tau_final);
                            Ok((diff, pair.cost))
                        }
                    }
                });
            let mut diffs = Vec::with_capacity(results.len());
            let mut cost = 0u64;
            for r in results {
                let (d, c) = r?;
                diffs.push(d);
                cost += c;
            }
            let (_, variance) = stats::mean_variance(&diffs);
            rows.push(SweepRow {
                n,
                h,
                kind,
                pairs: config.pairs,
                variance,
                var_stderr: stats::variance_stderr(&diffs),
                cost,
            });
        }
    }
    Ok(rows)
}

/// Least-squares fit of `variance ~ C * N^a * h^b` in log space.
#[derive(Debug, Clone, Serialize)]
pub struct PowerLawFit {
    #[serde(rename = "C")]
    pub coefficient: f64,
    #[serde(rename = "a")]
    pub n_exponent: f64,
    #[serde(rename = "b")]
    pub h_exponent: f64,
    pub residual_rms: f64,
}

/// Ordinary least squares of `log V` on `(1, log N, log h)`.
pub fn fit_power_law(rows: &[SweepRow]) -> Result<PowerLawFit, Error> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.variance > 0.0)
        .map(|r| (r.n.ln(), r.h.ln(), r.variance.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidParameter(
            "power-law fit needs at least 3 rows with positive variance".into(),
        ));
    }
    let distinct = |vals: &mut Vec<f64>| {
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals.len()
    };
    if distinct(&mut pts.iter().map(|p| p.0).collect()) < 2
        || distinct(&mut pts.iter().map(|p| p.1).collect()) < 2
    {
        return Err(Error::SingularDesign);
    }

    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let mv = pts.iter().map(|p| p.2).sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy, mut sxv, mut syv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, v) in &pts {
        let (dx, dy, dv) = (x - mx, y - my, v - mv);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxv += dx * dv;
        syv += dy * dv;
    }
    let det = sxx * syy - sxy * sxy;
    if det.abs() <= 1e-12 * sxx * syy {
        return Err(Error::SingularDesign);
    }
    let a = (syy * sxv - sxy * syv) / det;
    let b = (sxx * syv - sxy * sxv) / det;
    let intercept = mv - a * mx - b * my;

    let residual_sq: f64 = pts
        .iter()
        .map(|&(x, y, v)| {
            let r = v - (intercept + a * x + b * y);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        coefficient: intercept.exp(),
        n_exponent: a,
        h_exponent: b,
        residual_rms: (residual_sq / m).sqrt(),
    })
}

/// Degenerate single-axis fit `variance ~ C * h^b` for tables with only
/// one N value (the N exponent is reported as 0).
pub fn fit_power_law_in_h(rows: &[SweepRow]) -> Result<PowerLawFit, Error> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.variance > 0.0)
        .map(|r| (r.h.ln(), r.variance.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "h-only fit needs at least 2 rows with positive variance".into(),
        ));
    }
    let mut hs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    if hs.len() < 2 {
        return Err(Error::SingularDesign);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (intercept, slope) = stats::ols_line(&xs, &ys);
    let residual_sq: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        coefficient: intercept.exp(),
        n_exponent: 0.0,
        h_exponent: slope,
        residual_rms: (residual_sq / xs.len() as f64).sqrt(),
    })
}

/// Deterministic mean-field trajectory in scaled coordinates.
#[derive(Debug, Clone)]
pub struct MeanFieldPath {
    pub h: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub drift_evals: u64,
}

impl MeanFieldPath {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    /// Piecewise-linear evaluation at an arbitrary time in `[0, t_end]`.
    pub fn at(&self, t: f64, out: &mut [f64]) {
        let last = self.states.len() - 1;
        let idx = ((t / self.h).floor() as usize).min(last.saturating_sub(1));
        let frac = (t - idx as f64 * self.h) / self.h;
        let a = &self.states[idx];
        let b = &self.states[(idx + 1).min(last)];
        for i in 0..out.len() {
            out[i] = a[i] + frac * (b[i] - a[i]);
        }
    }
}

/// Euler iteration `z(t_{j+1}) = z(t_j) + h F^N(z(t_j))` with the scaled
/// drift `F^N(x) = sum_k N^{gamma+c_k} lambda_k^N(x) zeta_k^N`.
pub fn mean_field_euler(model: &Model, h: f64, t_end: f64) -> Result<MeanFieldPath, Error> {
    let steps = validate_grid(t_end, h)?;
    let network = &model.network;
    let scaling = &model.scaling;
    let num_reactions = network.num_reactions();
    let d = network.num_species();
    let scaled_deltas: Vec<Vec<f64>> = network
        .reactions()
        .iter()
        .map(|r| scaling.scaled_delta(r))
        .collect();

    let mut z = model.scaled_initial();
    let mut lam = vec![0.0f64; num_reactions];
    let mut times = Vec::with_capacity(steps as usize + 1);
    let mut states = Vec::with_capacity(steps as usize + 1);
    times.push(0.0);
    states.push(z.clone());
    for step in 0..steps {
        scaling.scaled_propensities_into(network, &z, &mut lam);
        let mut drift = vec![0.0f64; d];
        for k in 0..num_reactions {
            let rate = scaling.intensity_scale(k) * lam[k];
            for i in 0..d {
                drift[i] += rate * scaled_deltas[k][i];
            }
        }
        for i in 0..d {
            z[i] += h * drift[i];
        }
        times.push(((step + 1) as f64 * h).min(t_end));
        states.push(z.clone());
    }
    Ok(MeanFieldPath {
        h,
        times,
        states,
        drift_evals: steps,
    })
}

/// Monte Carlo estimate of the mean squared sup-distance between exact
/// scaled paths and the fine-Euler reference trajectory, evaluated at all
/// jump times and reference grid points. Returns `(moment, stderr)`.
pub fn deviation_moment(
    model: &Model,
    t_end: f64,
    n_paths: u64,
    seed: u64,
    workers: usize,
    reference_steps: u64,
) -> Result<(f64, f64), Error> {
    if n_paths < 100 {
        return Err(Error::InvalidParameter(
            "deviation moment needs at least 100 paths".into(),
        ));
    }
    let reference = mean_field_euler(model, t_end / reference_steps as f64, t_end)?;
    let d = model.network.num_species();
    let h_ref = reference.h;

    let results: Vec<Result<f64, Error>> = parallel_map(n_paths, workers, |p| {
        let config = ExactConfig::new(t_end).with_record(Record::Jumps);
        let path = simulate_exact(model, &config, &PathStreams::new(seed, 0, p))?;
        let traj = path.trajectory.expect("jump recording requested");
        let mut sup_sq = 0.0f64;
        let mut ref_state = vec![0.0f64; d];
        let dist_sq_at = |t: f64, scaled: &[f64], ref_state: &mut Vec<f64>| {
            reference.at(t, ref_state);
            let mut acc = 0.0;
            for i in 0..d {
                let diff = scaled[i] - ref_state[i];
                acc += diff * diff;
            }
            acc
        };
        let mut grid_idx = 0u64;
        for pair in traj.windows(2) {
            let (t_a, ref state_a) = pair[0];
            let (t_b, _) = pair[1];
            let scaled = model.scaling.scaled_state(state_a);
            sup_sq = sup_sq.max(dist_sq_at(t_a, &scaled, &mut ref_state));
            while (grid_idx as f64) * h_ref < t_b {
                let g = grid_idx as f64 * h_ref;
                if g > t_a {
                    sup_sq = sup_sq.max(dist_sq_at(g, &scaled, &mut ref_state));
                }
                grid_idx += 1;
            }
            sup_sq = sup_sq.max(dist_sq_at(t_b, &scaled, &mut ref_state));
        }
        if let Some((t_last, state_last)) = traj.last() {
            let scaled = model.scaling.scaled_state(state_last);
            sup_sq = sup_sq.max(dist_sq_at(*t_last, &scaled, &mut ref_state));
        }
        Ok(sup_sq)
    });

    let mut sups = Vec::with_capacity(results.len());
    for r in results {
        sups.push(r?);
    }
    let (mean, _) = stats::mean_variance(&sups);
    Ok((mean, stats::standard_error(&sups)))
}

/// One row of a cost-versus-accuracy measurement.
#[derive(Debug, Clone)]
pub struct ComplexityRow {
    pub eps: f64,
    pub achieved_variance: f64,
    pub total_cost: u64,
}

/// Observable used by the complexity harness: the first scaled coordinate
/// measured in fortieths, which places the desk-scale accuracy targets
/// inside the sampling-dominated regime where path counts are not pinned
/// at their floors.
pub const COMPLEXITY_OBSERVABLE_SCALE: f64 = 40.0;

/// Run the estimator at each accuracy target and record the measured cost
/// (Poisson draws plus exact-method events, pilots included). Uses the
/// closed-form allocation so the cost trend reflects the budget formulas.
pub fn complexity_sweep(
    model: &Model,
    eps_values: &[f64],
    kind: EstimatorKind,
    t_end: f64,
    refinement: u32,
    seed: u64,
    workers: usize,
) -> Result<Vec<ComplexityRow>, Error> {
    if eps_values.len() < 3 {
        return Err(Error::InvalidParameter(
            "complexity sweep needs at least 3 accuracy targets".into(),
        ));
    }
    if eps_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "accuracy targets must be strictly descending".into(),
        ));
    }
    let mut coeffs = vec![0.0; model.network.num_species()];
    coeffs[0] = COMPLEXITY_OBSERVABLE_SCALE;
    let f = Observable::Linear(coeffs);
    let mut rows = Vec::with_capacity(eps_values.len());
    for (i, &eps) in eps_values.iter().enumerate() {
        let mut config = MlmcConfig::new(t_end, eps);
        config.refinement = refinement;
        config.allocation = mlmc::AllocationMode::Paper;
        config.seed = seed.wrapping_add(i as u64);
        config.workers = workers;
        let estimate = mlmc::run(model, &f, &config, kind)?;
        rows.push(ComplexityRow {
            eps,
            achieved_variance: estimate.variance,
            total_cost: estimate.total_cost,
        });
    }
    Ok(rows)
}

/// Single-level tau-leap comparator: a pilot estimates the variance of
/// `f(Z_h(T))`, the path count is `ceil(V / eps^2)` and the cost is
/// `n * steps * K` (pilot excluded, reported separately).
#[derive(Debug, Clone)]
pub struct SingleLevelReference {
    pub pilot_variance: f64,
    pub n: u64,
    pub cost: u64,
    pub pilot_cost: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn single_level_tau_reference(
    model: &Model,
    h: f64,
    t_end: f64,
    eps: f64,
    f: &Observable,
    pilot_paths: u64,
    seed: u64,
    workers: usize,
) -> Result<SingleLevelReference, Error> {
    let steps = validate_grid(t_end, h)?;
    let results: Vec<Result<(f64, u64), Error>> = parallel_map(pilot_paths, workers, |i| {
        let path = simulate_tau(model, h, t_end, &PathStreams::new(seed, 0, i), Record::None)?;
        Ok((
            f.eval_unscaled(&model.scaling, &path.final_state),
            path.poisson_draws,
        ))
    });
    let mut values = Vec::with_capacity(results.len());
    let mut pilot_cost = 0u64;
    for r in results {
        let (v, c) = r?;
        values.push(v);
        pilot_cost += c;
    }
    let (_, variance) = stats::mean_variance(&values);
    let n = ((variance / (eps * eps)).ceil().max(2.0)) as u64;
    Ok(SingleLevelReference {
        pilot_variance: variance,
        n,
        cost: n * steps * model.network.num_reactions() as u64,
        pilot_cost,
    })
}
