//! Reaction networks, mass-action propensities and the system-size scaling.
//!
//! A network holds `d` species and `K` reactions with input/output
//! stoichiometry `nu`, `nu_prime` and rate constants `kappa`. The scaling
//! writes unscaled counts as `X_i = N^{alpha_i} * X^N_i` and factors every
//! intensity as `lambda_k(X) = N^{gamma + c_k} * lambda_k^N(X^N)`, where the
//! exponents are derived from the mass-action form. States are stored as
//! 64-bit signed integers in unscaled units; scaled views are computed on
//! demand so the two representations cannot drift apart.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A single reaction: inputs `nu`, outputs `nu_prime`, rate constant `kappa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
    pub rate: f64,
}

impl Reaction {
    /// Net state change `zeta = nu' - nu` when the reaction fires.
    pub fn delta(&self) -> Vec<i64> {
        self.inputs
            .iter()
            .zip(&self.outputs)
            .map(|(&i, &o)| i64::from(o) - i64::from(i))
            .collect()
    }

    /// Total input molecularity `sum_i nu_i` (the mass-action order).
    pub fn order(&self) -> u32 {
        self.inputs.iter().sum()
    }
}

/// A reaction network over an ordered species list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self, Error> {
        if species.is_empty() {
            return Err(Error::InvalidParameter(
                "network needs at least one species".into(),
            ));
        }
        if reactions.is_empty() {
            return Err(Error::InvalidParameter(
                "network needs at least one reaction".into(),
            ));
        }
        for (k, r) in reactions.iter().enumerate() {
            if r.inputs.len() != species.len() || r.outputs.len() != species.len() {
                return Err(Error::InvalidParameter(format!(
                    "reaction {k} has stoichiometry for {} species, network has {}",
                    r.inputs.len().max(r.outputs.len()),
                    species.len()
                )));
            }
            if !(r.rate > 0.0) || !r.rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "reaction {k} has non-positive rate {}",
                    r.rate
                )));
            }
        }
        Ok(Self { species, reactions })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Number of species `d`.
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Number of reactions `K`.
    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    /// Mass-action propensities at an integer state.
    ///
    /// `lambda_k(x) = kappa_k * prod_i x_i! / (x_i - nu_ki)!` when every
    /// species count is admissible, and 0 otherwise. A state is inadmissible
    /// for reaction `k` if any count is negative or any reactant count is
    /// below its input stoichiometry; tau-leap paths may produce such states.
    pub fn propensities(&self, x: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.reactions.len()];
        self.propensities_into(x, &mut out);
        out
    }

    /// Allocation-free variant of [`propensities`](Self::propensities).
    pub fn propensities_into(&self, x: &[i64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.species.len());
        debug_assert_eq!(out.len(), self.reactions.len());
        let any_negative = x.iter().any(|&v| v < 0);
        for (k, reaction) in self.reactions.iter().enumerate() {
            out[k] = if any_negative {
                0.0
            } else {
                mass_action(reaction, x)
            };
        }
    }

    /// True iff `w . zeta_k <= 0` for every reaction, a sufficient condition
    /// for the boundedness assumption behind the variance analysis.
    pub fn check_conservation(&self, w: &[f64]) -> bool {
        assert_eq!(w.len(), self.species.len(), "weight vector arity mismatch");
        assert!(w.iter().all(|&wi| wi > 0.0), "weights must be positive");
        self.reactions.iter().all(|r| {
            let dot: f64 = r.delta().iter().zip(w).map(|(&z, &wi)| wi * z as f64).sum();
            dot <= 0.0
        })
    }
}

fn mass_action(reaction: &Reaction, x: &[i64]) -> f64 {
    let mut value = reaction.rate;
    for (i, &nu) in reaction.inputs.iter().enumerate() {
        if nu == 0 {
            continue;
        }
        if x[i] < i64::from(nu) {
            return 0.0;
        }
        for j in 0..i64::from(nu) {
            value *= (x[i] - j) as f64;
        }
    }
    value
}

/// The derived system-size scaling for one network.
///
/// Notation: `rho_k = min{alpha_i : zeta_ki != 0}`, `rho = min_k rho_k`,
/// `r_k = log_N kappa_k + sum_i alpha_i nu_ki`, `gamma = max_k (r_k - rho_k)`
/// and `c_k = r_k - gamma`. The intensity scale `N^{gamma + c_k}` is kept as
/// `kappa_k * N^{sum_i alpha_i nu_ki}` so the identity
/// `lambda_k(X) = N^{gamma+c_k} lambda_k^N(X^N)` holds to rounding error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingProfile {
    n: f64,
    alpha: Vec<f64>,
    r: Vec<f64>,
    rho_k: Vec<f64>,
    rho: f64,
    c: Vec<f64>,
    gamma: f64,
    intensity_scale: Vec<f64>,
    pow_alpha: Vec<f64>,
}

impl ScalingProfile {
    /// Derive the scaling exponents for `network` at system size `n`.
    ///
    /// Rejects models whose time-scale exponent `gamma` is positive; the
    /// estimators implemented here require `gamma <= 0`.
    pub fn derive(network: &ReactionNetwork, n: f64, alpha: &[f64]) -> Result<Self, Error> {
        if !(n > 1.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "system size N must be finite and > 1, got {n}"
            )));
        }
        if alpha.len() != network.num_species() {
            return Err(Error::InvalidParameter(
                "alpha must have one entry per species".into(),
            ));
        }
        if alpha.iter().any(|&a| a < 0.0 || !a.is_finite()) {
            return Err(Error::InvalidParameter(
                "species exponents alpha must be finite and >= 0".into(),
            ));
        }

        let ln_n = n.ln();
        let mut r = Vec::with_capacity(network.num_reactions());
        let mut rho_k = Vec::with_capacity(network.num_reactions());
        let mut intensity_scale = Vec::with_capacity(network.num_reactions());
        for reaction in network.reactions() {
            let order_weight: f64 = reaction
                .inputs
                .iter()
                .enumerate()
                .map(|(i, &nu)| alpha[i] * f64::from(nu))
                .sum();
            let rk = snap_to_rational(reaction.rate.ln() / ln_n + order_weight);
            r.push(rk);
            intensity_scale.push(reaction.rate * n.powf(order_weight));

            let support_min = reaction
                .delta()
                .iter()
                .enumerate()
                .filter(|(_, &z)| z != 0)
                .map(|(i, _)| alpha[i])
                .fold(f64::INFINITY, f64::min);
            rho_k.push(if support_min.is_finite() {
                support_min
            } else {
                0.0
            });
        }

        let gamma = r
            .iter()
            .zip(&rho_k)
            .map(|(&rk, &pk)| rk - pk)
            .fold(f64::NEG_INFINITY, f64::max);
        if gamma > 1e-9 {
            return Err(Error::UnsupportedScaling { gamma });
        }
        // tiny positive residue from float exponent arithmetic is treated as 0
        let gamma = if gamma.abs() <= 1e-9 { 0.0 } else { gamma };

        let c = r.iter().map(|&rk| rk - gamma).collect();
        let rho = rho_k.iter().copied().fold(f64::INFINITY, f64::min);
        let pow_alpha = alpha.iter().map(|&a| n.powf(a)).collect();

        Ok(Self {
            n,
            alpha: alpha.to_vec(),
            r,
            rho_k,
            rho,
            c,
            gamma,
            intensity_scale,
            pow_alpha,
        })
    }

    pub fn system_size(&self) -> f64 {
        self.n
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Per-reaction exponents `r_k` with `lambda_k(X) = N^{r_k} lambda_k^N(X^N)`.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn rho_k(&self) -> &[f64] {
        &self.rho_k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `N^{gamma + c_k}`, the factor relating scaled and unscaled intensities.
    pub fn intensity_scale(&self, k: usize) -> f64 {
        self.intensity_scale[k]
    }

    /// Scaled reaction vector `zeta^N_ki = N^{-alpha_i} zeta_ki`.
    ///
    /// Division by `N^{alpha_i}` is correctly rounded, so integer multiples
    /// of powers of the system size stay exact in the scaled view.
    pub fn scaled_delta(&self, reaction: &Reaction) -> Vec<f64> {
        reaction
            .delta()
            .iter()
            .zip(&self.pow_alpha)
            .map(|(&z, &w)| z as f64 / w)
            .collect()
    }

    /// Scaled view `X^N_i = N^{-alpha_i} X_i` of an integer state.
    pub fn scaled_state(&self, x: &[i64]) -> Vec<f64> {
        x.iter()
            .zip(&self.pow_alpha)
            .map(|(&v, &w)| v as f64 / w)
            .collect()
    }

    /// Scaled intensities `lambda_k^N` at a scaled state, zero-clamped outside
    /// the admissible region exactly like the unscaled propensities.
    pub fn scaled_propensities(&self, network: &ReactionNetwork, xn: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; network.num_reactions()];
        self.scaled_propensities_into(network, xn, &mut out);
        out
    }

    pub fn scaled_propensities_into(&self, network: &ReactionNetwork, xn: &[f64], out: &mut [f64]) {
        debug_assert_eq!(xn.len(), self.alpha.len());
        let any_negative = xn.iter().any(|&v| v < 0.0);
        for (k, reaction) in network.reactions().iter().enumerate() {
            out[k] = if any_negative {
                0.0
            } else {
                scaled_mass_action(reaction, xn, &self.pow_alpha)
            };
        }
    }

    /// Order-of-magnitude cost `N^gamma sum_k N^{c_k}` of one exact path.
    pub fn exact_cost_estimate(&self) -> f64 {
        let n_gamma = self.n.powf(self.gamma);
        n_gamma * self.c.iter().map(|&ck| self.n.powf(ck)).sum::<f64>()
    }
}

fn scaled_mass_action(reaction: &Reaction, xn: &[f64], pow_alpha: &[f64]) -> f64 {
    let mut value = 1.0;
    for (i, &nu) in reaction.inputs.iter().enumerate() {
        if nu == 0 {
            continue;
        }
        // admissibility threshold x_i >= nu_ki expressed in scaled units
        if xn[i] < f64::from(nu) / pow_alpha[i] {
            return 0.0;
        }
        for j in 0..u64::from(nu) {
            value *= xn[i] - j as f64 / pow_alpha[i];
        }
    }
    value
}

/// Round to the nearest rational p/q with small denominator when within
/// 1e-9, protecting derived exponents from logarithm round-off.
fn snap_to_rational(x: f64) -> f64 {
    for q in 1..=24u32 {
        let p = (x * f64::from(q)).round();
        let candidate = p / f64::from(q);
        if (x - candidate).abs() < 1e-9 {
            return candidate;
        }
    }
    x
}

/// A network together with its initial state and scaling declaration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub network: ReactionNetwork,
    pub initial: Vec<i64>,
    pub scaling: ScalingProfile,
}

impl Model {
    pub fn new(
        network: ReactionNetwork,
        initial: Vec<i64>,
        n: f64,
        alpha: &[f64],
    ) -> Result<Self, Error> {
        if initial.len() != network.num_species() {
            return Err(Error::InvalidParameter(
                "initial state must have one entry per species".into(),
            ));
        }
        let scaling = ScalingProfile::derive(&network, n, alpha)?;
        Ok(Self {
            network,
            initial,
            scaling,
        })
    }

    /// Scaled initial state `X^N(0)`.
    pub fn scaled_initial(&self) -> Vec<f64> {
        self.scaling.scaled_state(&self.initial)
    }

    /// Re-instantiate the model family at a different system size.
    ///
    /// Holds the exponents `r_k` and the scaled initial state fixed: rate
    /// constants become `kappa_k * (N'/N)^{r_k - sum_i alpha_i nu_ki}` and
    /// initial counts are `round(X^N_i(0) * N'^{alpha_i})`.
    pub fn rescaled(&self, n_new: f64) -> Result<Self, Error> {
        let alpha = self.scaling.alpha().to_vec();
        let ratio = n_new / self.scaling.system_size();
        let reactions = self
            .network
            .reactions()
            .iter()
            .zip(self.scaling.r())
            .map(|(reaction, &rk)| {
                let order_weight: f64 = reaction
                    .inputs
                    .iter()
                    .enumerate()
                    .map(|(i, &nu)| alpha[i] * f64::from(nu))
                    .sum();
                Reaction {
                    inputs: reaction.inputs.clone(),
                    outputs: reaction.outputs.clone(),
                    rate: reaction.rate * ratio.powf(rk - order_weight),
                }
            })
            .collect();
        let network = ReactionNetwork::new(self.network.species().to_vec(), reactions)?;
        let scaled_init = self.scaled_initial();
        let initial = scaled_init
            .iter()
            .zip(&alpha)
            .map(|(&xi, &a)| (xi * n_new.powf(a)).round() as i64)
            .collect();
        Model::new(network, initial, n_new, &alpha)
    }
}
