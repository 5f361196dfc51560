//! Browser demo bindings: parse a model, draw trajectories, inspect a
//! coupled pair, and measure the variance-scaling surface, all in-page.
//! Every entry point takes the model as text, a master seed, and plain
//! numeric parameters, and returns JSON for the canvas layer to draw.

use wasm_bindgen::prelude::*;

/// The demo logic lives in [`app`] with string errors so it is callable
/// (and testable) on any target; the `wasm_bindgen` exports below only
/// translate errors into JavaScript exceptions.
pub mod app {
    use serde::Serialize;

    use taumc::coupling::{coupled_exact_tau_with_h, coupled_tau_pair_with_h};
    use taumc::exact::{simulate_exact, ExactConfig};
    use taumc::mlmc::Observable;
    use taumc::model::Model;
    use taumc::modelfile;
    use taumc::stats;
    use taumc::streams::PathStreams;
    use taumc::study::{self, PairKind, SweepConfig};
    use taumc::tau::simulate_tau;
    use taumc::trace::{Record, Trajectory};

    const DEMO_EVENT_BUDGET: u64 = 50_000_000;

    fn err_str(e: impl std::fmt::Display) -> String {
        e.to_string()
    }

    fn load(model_text: &str) -> Result<Model, String> {
        modelfile::parse(model_text).map_err(err_str)
    }

    fn json<T: Serialize>(value: &T) -> Result<String, String> {
        serde_json::to_string(value).map_err(err_str)
    }

    #[derive(Serialize)]
    struct ScaledPath {
        times: Vec<f64>,
        /// One series per species, in scaled coordinates.
        series: Vec<Vec<f64>>,
    }

    fn scaled_series(model: &Model, trajectory: &Trajectory) -> ScaledPath {
        let d = model.network.num_species();
        let mut times = Vec::with_capacity(trajectory.len());
        let mut series = vec![Vec::with_capacity(trajectory.len()); d];
        for (t, state) in trajectory {
            times.push(*t);
            let scaled = model.scaling.scaled_state(state);
            for i in 0..d {
                series[i].push(scaled[i]);
            }
        }
        ScaledPath { times, series }
    }

    pub fn default_model() -> String {
        include_str!("../../../models/dimerization.model").to_string()
    }

    /// Model summary for the page header: species, scaling exponents and the
    /// order-of-magnitude cost of one exact path.
    pub fn describe_model(model_text: &str) -> Result<String, String> {
        let model = load(model_text)?;
        #[derive(Serialize)]
        struct Summary {
            species: Vec<String>,
            reactions: usize,
            system_size: f64,
            gamma: f64,
            rho: f64,
            exact_path_cost: f64,
            scaled_initial: Vec<f64>,
        }
        json(&Summary {
            species: model.network.species().to_vec(),
            reactions: model.network.num_reactions(),
            system_size: model.scaling.system_size(),
            gamma: model.scaling.gamma(),
            rho: model.scaling.rho(),
            exact_path_cost: model.scaling.exact_cost_estimate(),
            scaled_initial: model.scaled_initial(),
        })
    }

    /// Simulate `paths` trajectories with the exact or tau-leap method and
    /// return them down-sampled to roughly 200 points each.
    pub fn simulate_trajectories(
        model_text: &str,
        method: &str,
        h: f64,
        t_end: f64,
        paths: u32,
        seed: u64,
    ) -> Result<String, String> {
        let model = load(model_text)?;
        let record = Record::Grid(t_end / 200.0);
        let mut out = Vec::with_capacity(paths as usize);
        for path in 0..u64::from(paths.min(64)) {
            let streams = PathStreams::new(seed, 0, path);
            let trajectory = match method {
                "exact" => {
                    let config = ExactConfig::new(t_end)
                        .with_record(record)
                        .with_event_budget(DEMO_EVENT_BUDGET);
                    simulate_exact(&model, &config, &streams)
                        .map_err(err_str)?
                        .trajectory
                }
                "tau" => {
                    simulate_tau(&model, h, t_end, &streams, record)
                        .map_err(err_str)?
                        .trajectory
                }
                other => return Err(err_str(format!("unknown method `{other}`"))),
            };
            out.push(scaled_series(
                &model,
                &trajectory.expect("recording requested"),
            ));
        }
        #[derive(Serialize)]
        struct Reply {
            species: Vec<String>,
            paths: Vec<ScaledPath>,
        }
        json(&Reply {
            species: model.network.species().to_vec(),
            paths: out,
        })
    }

    /// Simulate one coupled pair and return both legs plus their difference
    /// in the first scaled coordinate.
    pub fn coupled_pair(
        model_text: &str,
        kind: &str,
        level: u32,
        refinement: u32,
        t_end: f64,
        seed: u64,
    ) -> Result<String, String> {
        let model = load(model_text)?;
        let record = Record::Grid(t_end / 200.0);
        let streams = PathStreams::new(seed, level, 0);
        let steps = (refinement.max(2) as u64)
            .checked_pow(level)
            .ok_or_else(|| err_str("level too deep"))?;
        let h = t_end / steps as f64;
        let (fine, coarse, labels) = match kind {
            "tau-tau" => {
                let pair = coupled_tau_pair_with_h(&model, h, refinement, t_end, &streams, record)
                    .map_err(err_str)?;
                (
                    pair.fine_trajectory.expect("recorded"),
                    pair.coarse_trajectory.expect("recorded"),
                    ["fine tau", "coarse tau"],
                )
            }
            "exact-tau" => {
                let pair =
                    coupled_exact_tau_with_h(&model, h, t_end, &streams, DEMO_EVENT_BUDGET, record)
                        .map_err(err_str)?;
                (
                    pair.exact_trajectory.expect("recorded"),
                    pair.tau_trajectory.expect("recorded"),
                    ["exact", "tau"],
                )
            }
            other => return Err(err_str(format!("unknown pair kind `{other}`"))),
        };
        let fine = scaled_series(&model, &fine);
        let coarse = scaled_series(&model, &coarse);
        let difference: Vec<f64> = fine.series[0]
            .iter()
            .zip(&coarse.series[0])
            .map(|(&a, &b)| a - b)
            .collect();
        #[derive(Serialize)]
        struct Reply {
            species: Vec<String>,
            labels: [&'static str; 2],
            h: f64,
            fine: ScaledPath,
            coarse: ScaledPath,
            difference: Vec<f64>,
        }
        json(&Reply {
            species: model.network.species().to_vec(),
            labels,
            h,
            fine,
            coarse,
            difference,
        })
    }

    /// Variance of the coupled-pair difference over an (N, h) grid, with the
    /// fitted power law. Pair counts are capped to keep the page responsive.
    pub fn variance_scaling(
        model_text: &str,
        kind: &str,
        n_values: &str,
        h_values: &str,
        pairs: u32,
        t_end: f64,
        seed: u64,
    ) -> Result<String, String> {
        let model = load(model_text)?;
        let parse_list = |text: &str| -> Result<Vec<f64>, String> {
            text.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(err_str))
                .collect()
        };
        let n_values = parse_list(n_values)?;
        let h_values = parse_list(h_values)?;
        let kind = PairKind::parse(kind).map_err(err_str)?;
        let mut config = SweepConfig::new(t_end, u64::from(pairs.clamp(100, 5000)));
        config.seed = seed;
        config.event_budget = DEMO_EVENT_BUDGET;
        let f = Observable::Coordinate(0);
        let rows = study::variance_sweep(&model, &n_values, &h_values, kind, &f, &config)
            .map_err(err_str)?;

        #[derive(Serialize)]
        struct Row {
            n: f64,
            h: f64,
            variance: f64,
            var_stderr: f64,
        }
        #[derive(Serialize)]
        struct Reply {
            rows: Vec<Row>,
            fit: Option<study::PowerLawFit>,
        }
        let fit = study::fit_power_law(&rows)
            .or_else(|_| study::fit_power_law_in_h(&rows))
            .ok();
        json(&Reply {
            rows: rows
                .iter()
                .map(|r| Row {
                    n: r.n,
                    h: r.h,
                    variance: r.variance,
                    var_stderr: r.var_stderr,
                })
                .collect(),
            fit,
        })
    }

    /// Reference Poisson density for the stream-quality panel in the page
    /// footer: draws `n` variates and returns the empirical histogram beside
    /// the exact probabilities.
    pub fn poisson_histogram(mean: f64, n: u32, seed: u64) -> Result<String, String> {
        let mut stream = taumc::Stream::for_key(taumc::StreamKey {
            master_seed: seed,
            level: 0,
            path: 0,
            reaction: 0,
            channel: 1,
        });
        let n = n.clamp(100, 2_000_000);
        let (lo, pmf) = stats::poisson_pmf_window(mean);
        let mut observed = vec![0u64; pmf.len()];
        for _ in 0..n {
            let x = stream.poisson(mean).map_err(err_str)?;
            let idx = x.saturating_sub(lo).min(pmf.len() as u64 - 1) as usize;
            observed[idx] += 1;
        }
        // trim the window to where either curve is visible
        let visible: Vec<usize> = (0..pmf.len())
            .filter(|&i| pmf[i] * n as f64 >= 0.5 || observed[i] > 0)
            .collect();
        let (first, last) = match (visible.first(), visible.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0, pmf.len() - 1),
        };
        #[derive(Serialize)]
        struct Reply {
            k0: u64,
            expected: Vec<f64>,
            observed: Vec<f64>,
        }
        json(&Reply {
            k0: lo + first as u64,
            expected: pmf[first..=last].iter().map(|p| p * n as f64).collect(),
            observed: observed[first..=last].iter().map(|&o| o as f64).collect(),
        })
    }
} // mod app

fn to_js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub fn default_model() -> String {
    app::default_model()
}

#[wasm_bindgen]
pub fn describe_model(model_text: &str) -> Result<String, JsValue> {
    app::describe_model(model_text).map_err(to_js)
}

#[wasm_bindgen]
pub fn simulate_trajectories(
    model_text: &str,
    method: &str,
    h: f64,
    t_end: f64,
    paths: u32,
    seed: u64,
) -> Result<String, JsValue> {
    app::simulate_trajectories(model_text, method, h, t_end, paths, seed).map_err(to_js)
}

#[wasm_bindgen]
pub fn coupled_pair(
    model_text: &str,
    kind: &str,
    level: u32,
    refinement: u32,
    t_end: f64,
    seed: u64,
) -> Result<String, JsValue> {
    app::coupled_pair(model_text, kind, level, refinement, t_end, seed).map_err(to_js)
}

#[wasm_bindgen]
pub fn variance_scaling(
    model_text: &str,
    kind: &str,
    n_values: &str,
    h_values: &str,
    pairs: u32,
    t_end: f64,
    seed: u64,
) -> Result<String, JsValue> {
    app::variance_scaling(model_text, kind, n_values, h_values, pairs, t_end, seed).map_err(to_js)
}

#[wasm_bindgen]
pub fn poisson_histogram(mean: f64, n: u32, seed: u64) -> Result<String, JsValue> {
    app::poisson_histogram(mean, n, seed).map_err(to_js)
}
