//! Multilevel Monte Carlo estimators over the tau-leap level ladder.
//!
//! The biased estimator telescopes tau-leap levels `l = 0..=L` with step
//! sizes `h_l = T M^-l`; the unbiased estimator adds an exact/tau coupled
//! correction at the finest level. Levels are statistically independent
//! (disjoint stream level ids), so the estimator variance is the sum of
//! per-level sample variances over path counts.

use serde::{Serialize, Serializer};

use crate::coupling::{coupled_exact_tau, coupled_tau_pair};
use crate::error::Error;
use crate::exact::DEFAULT_EVENT_BUDGET;
use crate::model::{Model, ReactionNetwork, ScalingProfile};
use crate::parallel::parallel_map;
use crate::stats;
use crate::streams::PathStreams;
use crate::tau::simulate_tau;
use crate::trace::Record;

/// A terminal-time observable of the scaled state.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// One scaled coordinate `X^N_i`.
    Coordinate(usize),
    /// A linear combination `sum_i a_i X^N_i`.
    Linear(Vec<f64>),
}

impl Observable {
    /// Parse `X[<name>]` or `lin:<a1>,<a2>,...`.
    pub fn parse(text: &str, network: &ReactionNetwork) -> Result<Self, Error> {
        if let Some(inner) = text.strip_prefix("X[").and_then(|s| s.strip_suffix(']')) {
            let name = inner.trim();
            let idx = network
                .species_index(name)
                .ok_or_else(|| Error::InvalidObservable(format!("unknown species `{name}`")))?;
            Ok(Self::Coordinate(idx))
        } else if let Some(rest) = text.strip_prefix("lin:") {
            let coeffs = rest
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| Error::InvalidObservable(format!("bad coefficient: {e}")))?;
            if coeffs.len() != network.num_species() {
                return Err(Error::InvalidObservable(format!(
                    "expected {} coefficients, got {}",
                    network.num_species(),
                    coeffs.len()
                )));
            }
            Ok(Self::Linear(coeffs))
        } else {
            Err(Error::InvalidObservable(
                "expected `X[<name>]` or `lin:<a1>,<a2>,...`".into(),
            ))
        }
    }

    /// Evaluate on a scaled state.
    pub fn eval(&self, scaled_state: &[f64]) -> f64 {
        match self {
            Self::Coordinate(i) => scaled_state[*i],
            Self::Linear(coeffs) => coeffs.iter().zip(scaled_state).map(|(&a, &x)| a * x).sum(),
        }
    }

    /// Evaluate on an unscaled integer state.
    pub fn eval_unscaled(&self, scaling: &ScalingProfile, state: &[i64]) -> f64 {
        self.eval(&scaling.scaled_state(state))
    }
}

/// The level ladder: stepsize `h_l = t_end * refinement^-l` for
/// `l = l0 ..= l_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSchedule {
    pub t_end: f64,
    pub refinement: u32,
    pub l0: u32,
    pub l_max: u32,
}

impl LevelSchedule {
    pub fn steps(&self, level: u32) -> u64 {
        (self.refinement as u64).pow(level)
    }

    pub fn h(&self, level: u32) -> f64 {
        self.t_end / self.steps(level) as f64
    }

    pub fn num_levels(&self) -> u32 {
        self.l_max - self.l0 + 1
    }
}

/// Choose the finest level so that `h_L <= theta * eps`, with `l0 = 0`.
pub fn build_schedule(
    t_end: f64,
    refinement: u32,
    eps: f64,
    theta: f64,
) -> Result<LevelSchedule, Error> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    if refinement < 2 {
        return Err(Error::InvalidParameter(
            "refinement factor must be >= 2".into(),
        ));
    }
    let mut l_max = 0u32;
    while t_end * (refinement as f64).powi(-(l_max as i32)) > theta * eps {
        l_max += 1;
        if l_max > 60 {
            return Err(Error::ScheduleOverflow { levels: l_max });
        }
    }
    Ok(LevelSchedule {
        t_end,
        refinement,
        l0: 0,
        l_max,
    })
}

/// Identifies one independent estimator term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelId {
    /// Plain tau-leap paths at the coarsest level.
    Base(u32),
    /// Coupled tau pair difference at levels `(l, l-1)`.
    Interior(u32),
    /// Coupled exact/tau correction at the finest level.
    ExactCorrection,
}

impl LevelId {
    pub fn label(&self) -> String {
        match self {
            Self::Base(l) | Self::Interior(l) => l.to_string(),
            Self::ExactCorrection => "E".to_string(),
        }
    }
}

impl Serialize for LevelId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

/// Sample summary of one estimator term.
#[derive(Debug, Clone, Serialize)]
pub struct LevelStatistics {
    pub id: LevelId,
    pub h: f64,
    pub n: u64,
    pub mean: f64,
    /// Unbiased sample variance of the per-path values.
    pub var: f64,
    pub cost: u64,
}

/// Average `f` over `n` paths of the base level (single tau-leap paths) or
/// an interior level (coupled tau pair differences).
#[allow(clippy::too_many_arguments)]
pub fn estimate_level(
    model: &Model,
    schedule: &LevelSchedule,
    level: u32,
    n: u64,
    f: &Observable,
    master_seed: u64,
    path_offset: u64,
    workers: usize,
) -> Result<LevelStatistics, Error> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "a level estimate needs n >= 2 paths".into(),
        ));
    }
    let results: Vec<Result<(f64, u64), Error>> = parallel_map(n, workers, |i| {
        let streams = PathStreams::new(master_seed, level, path_offset + i);
        if level == schedule.l0 {
            let path = simulate_tau(
                model,
                schedule.h(level),
                schedule.t_end,
                &streams,
                Record::None,
            )?;
            Ok((
                f.eval_unscaled(&model.scaling, &path.final_state),
                path.poisson_draws,
            ))
        } else {
            let pair = coupled_tau_pair(
                model,
                level,
                schedule.refinement,
                schedule.t_end,
                &streams,
                Record::None,
            )?;
            let diff = f.eval_unscaled(&model.scaling, &pair.fine_final)
                - f.eval_unscaled(&model.scaling, &pair.coarse_final);
            Ok((diff, pair.cost))
        }
    });
    summarize(
        if level == schedule.l0 {
            LevelId::Base(level)
        } else {
            LevelId::Interior(level)
        },
        schedule.h(level),
        results,
    )
}

/// Average `f(X(T)) - f(Z_L(T))` over coupled exact/tau pairs.
#[allow(clippy::too_many_arguments)]
pub fn estimate_exact_correction(
    model: &Model,
    schedule: &LevelSchedule,
    n: u64,
    f: &Observable,
    master_seed: u64,
    path_offset: u64,
    workers: usize,
    event_budget: u64,
) -> Result<LevelStatistics, Error> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "the correction estimate needs n >= 2 paths".into(),
        ));
    }
    let stream_level = schedule.l_max + 1;
    let results: Vec<Result<(f64, u64), Error>> = parallel_map(n, workers, |i| {
        let streams = PathStreams::new(master_seed, stream_level, path_offset + i);
        let pair = coupled_exact_tau(
            model,
            schedule.l_max,
            schedule.refinement,
            schedule.t_end,
            &streams,
            event_budget,
            Record::None,
        )?;
        let diff = f.eval_unscaled(&model.scaling, &pair.exact_final)
            - f.eval_unscaled(&model.scaling, &pair.tau_final);
        Ok((diff, pair.cost))
    });
    summarize(
        LevelId::ExactCorrection,
        schedule.h(schedule.l_max),
        results,
    )
}

fn summarize(
    id: LevelId,
    h: f64,
    results: Vec<Result<(f64, u64), Error>>,
) -> Result<LevelStatistics, Error> {
    let mut values = Vec::with_capacity(results.len());
    let mut cost = 0u64;
    for r in results {
        let (v, c) = r?;
        values.push(v);
        cost += c;
    }
    let (mean, var) = stats::mean_variance(&values);
    Ok(LevelStatistics {
        id,
        h,
        n: values.len() as u64,
        mean,
        var,
        cost,
    })
}

/// Per-level path counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub base: u64,
    /// Counts for interior levels `l0+1 ..= l_max`, in level order.
    pub interior: Vec<u64>,
    pub exact: Option<u64>,
}

/// Path counts from the closed-form budget split:
/// `n_0 = ceil(c_bar N^{gamma-rho} (L - l0 + 1) eps^-2)`,
/// `n_l = ceil(c_bar N^{gamma-rho} (L - l0 + 1) h_l eps^-2)` and, for the
/// unbiased estimator, `n_E = ceil(c_bar N^{gamma-rho} (L + 2) h_L eps^-2)`;
/// every count is floored at 2.
pub fn allocate_paper(
    schedule: &LevelSchedule,
    scaling: &ScalingProfile,
    eps: f64,
    c_bar: f64,
    include_exact: bool,
) -> Allocation {
    let n_factor = scaling.system_size().powf(scaling.gamma() - scaling.rho());
    let levels = f64::from(schedule.num_levels());
    let inv_eps2 = 1.0 / (eps * eps);
    let base = ceil_at_least_2(c_bar * n_factor * levels * inv_eps2);
    let interior = (schedule.l0 + 1..=schedule.l_max)
        .map(|l| ceil_at_least_2(c_bar * n_factor * levels * schedule.h(l) * inv_eps2))
        .collect();
    let exact = include_exact.then(|| {
        let e_levels = f64::from(schedule.l_max + 2);
        ceil_at_least_2(c_bar * n_factor * e_levels * schedule.h(schedule.l_max) * inv_eps2)
    });
    Allocation {
        base,
        interior,
        exact,
    }
}

/// Work-minimizing path counts under the variance constraint
/// `sum_l V_l / n_l <= eps^2`: `n_l` is proportional to `sqrt(V_l / c_l)`
/// with pilot variances `V_l` and per-path costs `c_l`.
pub fn allocate_adaptive(pilot: &[LevelStatistics], eps: f64) -> Result<Allocation, Error> {
    if pilot.is_empty() {
        return Err(Error::InvalidParameter(
            "adaptive allocation needs pilot statistics".into(),
        ));
    }
    if pilot.iter().any(|s| !s.var.is_finite()) {
        return Err(Error::DegeneratePilot);
    }
    let per_path_cost: Vec<f64> = pilot.iter().map(|s| s.cost as f64 / s.n as f64).collect();
    let weight_sum: f64 = pilot
        .iter()
        .zip(&per_path_cost)
        .map(|(s, &c)| (s.var * c).sqrt())
        .sum();
    let inv_eps2 = 1.0 / (eps * eps);

    let mut base = None;
    let mut interior: Vec<(u32, u64)> = Vec::new();
    let mut exact = None;
    for (stat, &c) in pilot.iter().zip(&per_path_cost) {
        let n = ceil_at_least_2((stat.var / c).sqrt() * weight_sum * inv_eps2);
        match stat.id {
            LevelId::Base(_) => base = Some(n),
            LevelId::Interior(l) => interior.push((l, n)),
            LevelId::ExactCorrection => exact = Some(n),
        }
    }
    interior.sort_by_key(|&(l, _)| l);
    Ok(Allocation {
        base: base.ok_or_else(|| {
            Error::InvalidParameter("pilot statistics are missing the base level".into())
        })?,
        interior: interior.into_iter().map(|(_, n)| n).collect(),
        exact,
    })
}

fn ceil_at_least_2(x: f64) -> u64 {
    if !x.is_finite() {
        return 2;
    }
    (x.ceil().max(2.0).min(u64::MAX as f64)) as u64
}

/// Which estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Telescoped tau-leap levels only; unbiased for `E f(Z_L(T))`.
    Biased,
    /// Adds the exact/tau correction; unbiased for `E f(X(T))`.
    Unbiased,
}

impl EstimatorKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Biased => "biased",
            Self::Unbiased => "unbiased",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationMode {
    Paper,
    Adaptive,
}

#[derive(Debug, Clone)]
pub struct MlmcConfig {
    pub t_end: f64,
    pub eps: f64,
    pub refinement: u32,
    /// Bias calibration: the finest stepsize satisfies `h_L <= theta * eps`.
    pub theta: f64,
    pub allocation: AllocationMode,
    pub pilot_paths: u64,
    pub seed: u64,
    pub workers: usize,
    pub event_budget: u64,
}

impl MlmcConfig {
    pub fn new(t_end: f64, eps: f64) -> Self {
        Self {
            t_end,
            eps,
            refinement: 3,
            theta: 1.0,
            allocation: AllocationMode::Adaptive,
            pilot_paths: 100,
            seed: 0,
            workers: 0,
            event_budget: DEFAULT_EVENT_BUDGET,
        }
    }
}

/// A completed multilevel estimate.
#[derive(Debug, Clone, Serialize)]
pub struct MlmcEstimate {
    pub estimate: f64,
    /// Estimated estimator variance `sum_l V_l / n_l`.
    pub variance: f64,
    pub eps: f64,
    pub kind: String,
    pub levels: Vec<LevelStatistics>,
    pub total_cost: u64,
    /// Set when the achieved variance exceeds `eps^2`.
    pub allocation_shortfall: bool,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

/// Run the biased estimator: telescoped tau-leap levels only.
pub fn run_biased(
    model: &Model,
    f: &Observable,
    config: &MlmcConfig,
) -> Result<MlmcEstimate, Error> {
    run(model, f, config, EstimatorKind::Biased)
}

/// Run the unbiased estimator: tau-leap levels plus the exact correction.
pub fn run_unbiased(
    model: &Model,
    f: &Observable,
    config: &MlmcConfig,
) -> Result<MlmcEstimate, Error> {
    run(model, f, config, EstimatorKind::Unbiased)
}

pub fn run(
    model: &Model,
    f: &Observable,
    config: &MlmcConfig,
    kind: EstimatorKind,
) -> Result<MlmcEstimate, Error> {
    let schedule = build_schedule(config.t_end, config.refinement, config.eps, config.theta)?;
    let include_exact = kind == EstimatorKind::Unbiased;
    let mut warnings = Vec::new();

    let nbar = model.scaling.exact_cost_estimate();
    if include_exact && 1.0 / schedule.h(schedule.l_max) > 10.0 * nbar {
        warnings.push(format!(
            "1/h_L = {:.3e} is much larger than the exact-path cost scale {:.3e}; \
             the unbiased correction may dominate the budget",
            1.0 / schedule.h(schedule.l_max),
            nbar
        ));
    }

    let mut pilot_cost = 0u64;
    let allocation = match config.allocation {
        AllocationMode::Paper => {
            let pilot = estimate_level(
                model,
                &schedule,
                schedule.l0,
                config.pilot_paths,
                f,
                config.seed,
                0,
                config.workers,
            )?;
            pilot_cost += pilot.cost;
            let c_bar = pilot.var
                * model
                    .scaling
                    .system_size()
                    .powf(model.scaling.rho() - model.scaling.gamma());
            allocate_paper(&schedule, &model.scaling, config.eps, c_bar, include_exact)
        }
        AllocationMode::Adaptive => {
            let mut pilot_stats = Vec::new();
            for level in schedule.l0..=schedule.l_max {
                let stat = estimate_level(
                    model,
                    &schedule,
                    level,
                    config.pilot_paths,
                    f,
                    config.seed,
                    0,
                    config.workers,
                )?;
                pilot_cost += stat.cost;
                pilot_stats.push(stat);
            }
            if include_exact {
                let stat = estimate_exact_correction(
                    model,
                    &schedule,
                    config.pilot_paths,
                    f,
                    config.seed,
                    0,
                    config.workers,
                    config.event_budget,
                )?;
                pilot_cost += stat.cost;
                pilot_stats.push(stat);
            }
            allocate_adaptive(&pilot_stats, config.eps)?
        }
    };

    let mut levels = Vec::new();
    let base = estimate_level(
        model,
        &schedule,
        schedule.l0,
        allocation.base,
        f,
        config.seed,
        config.pilot_paths,
        config.workers,
    )?;
    levels.push(base);
    for (idx, level) in (schedule.l0 + 1..=schedule.l_max).enumerate() {
        levels.push(estimate_level(
            model,
            &schedule,
            level,
            allocation.interior[idx],
            f,
            config.seed,
            config.pilot_paths,
            config.workers,
        )?);
    }
    if include_exact {
        let n_e = allocation.exact.unwrap_or(2);
        levels.push(estimate_exact_correction(
            model,
            &schedule,
            n_e,
            f,
            config.seed,
            config.pilot_paths,
            config.workers,
            config.event_budget,
        )?);
    }

    let estimate = stats::sum(&levels.iter().map(|s| s.mean).collect::<Vec<f64>>());
    let variance = stats::sum(
        &levels
            .iter()
            .map(|s| s.var / s.n as f64)
            .collect::<Vec<f64>>(),
    );
    let total_cost = pilot_cost + levels.iter().map(|s| s.cost).sum::<u64>();
    let allocation_shortfall = variance > config.eps * config.eps;

    Ok(MlmcEstimate {
        estimate,
        variance,
        eps: config.eps,
        kind: kind.label().to_string(),
        levels,
        total_cost,
        allocation_shortfall,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn schedule_examples() {
        let s = build_schedule(0.3, 3, 0.01, 1.0).unwrap();
        assert_eq!(s.l_max, 4);
        assert_eq!(s.l0, 0);

        let s = build_schedule(0.3, 3, 0.5, 1.0).unwrap();
        assert_eq!(s.l_max, 0);

        let s = build_schedule(1.0, 2, 2f64.powi(-10), 1.0).unwrap();
        assert_eq!(s.l_max, 10);

        assert!(matches!(
            build_schedule(1.0, 2, 1e-40, 1.0),
            Err(Error::ScheduleOverflow { .. })
        ));
    }

    #[test]
    fn schedule_steps_are_exact_powers() {
        let s = build_schedule(0.3, 3, 0.01, 1.0).unwrap();
        for l in 0..=s.l_max {
            assert_eq!(s.steps(l), 3u64.pow(l));
            let ratio = s.h(l) / s.h(l + 1);
            assert!((ratio - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn paper_allocation_formula() {
        // dimerization at N = 1e4: gamma - rho = -1, five levels at eps = 0.005
        let model = presets::dimerization(1e4, 0.2).unwrap();
        let schedule = build_schedule(0.3, 3, 0.005, 1.0).unwrap();
        assert_eq!(schedule.l_max, 4);
        let alloc = allocate_paper(&schedule, &model.scaling, 0.005, 1.0, false);
        // 1e-4 * 5 * 4e4 = 20
        assert_eq!(alloc.base, 20);
        assert_eq!(alloc.interior.len(), 4);
        // interior counts shrink with h_l and are floored at 2
        assert_eq!(alloc.interior[0], 2); // 20 * 0.1 = 2
        assert_eq!(alloc.interior[3], 2);
        assert_eq!(alloc.exact, None);

        let alloc = allocate_paper(&schedule, &model.scaling, 0.005, 1.0, true);
        assert!(alloc.exact.is_some());
    }

    #[test]
    fn paper_allocation_single_level() {
        let model = presets::dimerization(1e4, 0.2).unwrap();
        let schedule = build_schedule(0.3, 3, 0.5, 1.0).unwrap();
        let alloc = allocate_paper(&schedule, &model.scaling, 1.0, 2.0, false);
        // ceil(c_bar * N^{-1} * 1 * eps^-2) = ceil(2e-4 * 4) = 2 (floored)
        assert_eq!(alloc.base, 2);
        assert!(alloc.interior.is_empty());
    }

    #[test]
    fn halving_eps_quadruples_counts_before_ceiling() {
        let schedule = build_schedule(0.3, 3, 0.005, 1.0).unwrap();
        let n_factor = 1e-4;
        let raw = |eps: f64, h: f64| 1.0 * n_factor * 5.0 * h / (eps * eps);
        for l in 1..=4u32 {
            let h = schedule.h(l);
            assert!((raw(0.0025, h) / raw(0.005, h) - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_allocation_closed_form() {
        // V = (4, 1), c = (1, 4), eps = 1: n proportional to (2, 0.5),
        // scaled so sum V_l/n_l = 1 gives n = (8, 2)
        let pilot = vec![
            LevelStatistics {
                id: LevelId::Base(0),
                h: 1.0,
                n: 10,
                mean: 0.0,
                var: 4.0,
                cost: 10,
            },
            LevelStatistics {
                id: LevelId::Interior(1),
                h: 0.5,
                n: 10,
                mean: 0.0,
                var: 1.0,
                cost: 40,
            },
        ];
        let alloc = allocate_adaptive(&pilot, 1.0).unwrap();
        assert_eq!(alloc.base, 8);
        assert_eq!(alloc.interior, vec![2]);
        // the constraint is met with equality
        assert!((4.0f64 / 8.0 + 1.0 / 2.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_allocation_zero_variance_levels_floor_at_two() {
        let pilot = vec![
            LevelStatistics {
                id: LevelId::Base(0),
                h: 1.0,
                n: 10,
                mean: 0.0,
                var: 0.0,
                cost: 10,
            },
            LevelStatistics {
                id: LevelId::Interior(1),
                h: 0.5,
                n: 10,
                mean: 0.0,
                var: 9.0,
                cost: 10,
            },
        ];
        let alloc = allocate_adaptive(&pilot, 0.5).unwrap();
        assert_eq!(alloc.base, 2);
        // all budget goes to the one level with variance
        assert_eq!(alloc.interior, vec![36]);
    }

    #[test]
    fn adaptive_allocation_symmetric_levels_get_equal_counts() {
        let pilot: Vec<LevelStatistics> = (0..3)
            .map(|l| LevelStatistics {
                id: if l == 0 {
                    LevelId::Base(0)
                } else {
                    LevelId::Interior(l)
                },
                h: 1.0,
                n: 10,
                mean: 0.0,
                var: 2.0,
                cost: 30,
            })
            .collect();
        let alloc = allocate_adaptive(&pilot, 0.7).unwrap();
        assert_eq!(alloc.interior, vec![alloc.base, alloc.base]);
    }

    #[test]
    fn degenerate_pilot_is_rejected() {
        let pilot = vec![LevelStatistics {
            id: LevelId::Base(0),
            h: 1.0,
            n: 10,
            mean: 0.0,
            var: f64::NAN,
            cost: 10,
        }];
        assert!(matches!(
            allocate_adaptive(&pilot, 1.0),
            Err(Error::DegeneratePilot)
        ));
    }

    #[test]
    fn observable_parsing() {
        let model = presets::dimerization(1e4, 0.2).unwrap();
        let f = Observable::parse("X[A]", &model.network).unwrap();
        assert_eq!(f, Observable::Coordinate(0));
        assert_eq!(f.eval(&[0.25, 0.5]), 0.25);

        let f = Observable::parse("lin:1,2", &model.network).unwrap();
        assert_eq!(f.eval(&[0.25, 0.5]), 1.25);

        assert!(Observable::parse("X[C]", &model.network).is_err());
        assert!(Observable::parse("lin:1", &model.network).is_err());
        assert!(Observable::parse("nonsense", &model.network).is_err());
    }

    #[test]
    fn constant_observable_gives_zero_interior_levels() {
        let model = presets::dimerization(1e3, 0.2).unwrap();
        let schedule = build_schedule(0.3, 3, 0.05, 1.0).unwrap();
        assert!(schedule.l_max >= 1);
        let f = Observable::Linear(vec![0.0, 0.0]);
        let stat = estimate_level(&model, &schedule, 1, 50, &f, 0, 0, 2).unwrap();
        assert_eq!(stat.mean, 0.0);
        assert_eq!(stat.var, 0.0);

        // a conserved combination is constant up to rounding of the scaled view
        let f = Observable::Linear(vec![1.0, 2.0]);
        let stat = estimate_level(&model, &schedule, 1, 50, &f, 0, 0, 2).unwrap();
        assert!(stat.mean.abs() < 1e-12);
        assert!(stat.var < 1e-24);
    }
}
