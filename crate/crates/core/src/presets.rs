//! Built-in model families used by the experiment harness and the demos.

use crate::error::Error;
use crate::model::{Model, Reaction, ReactionNetwork};

/// Reversible dimerization `2A <-> B` with `kappa_1 = 1/N`, `kappa_2 = 1`,
/// initial counts `X_1(0) = X_2(0) = mass_fraction * N` and classical
/// scaling `alpha = (1, 1)`.
pub fn dimerization(n: f64, mass_fraction: f64) -> Result<Model, Error> {
    let network = ReactionNetwork::new(
        vec!["A".into(), "B".into()],
        vec![
            Reaction {
                inputs: vec![2, 0],
                outputs: vec![0, 1],
                rate: 1.0 / n,
            },
            Reaction {
                inputs: vec![0, 1],
                outputs: vec![2, 0],
                rate: 1.0,
            },
        ],
    )?;
    let count = (mass_fraction * n).round() as i64;
    Model::new(network, vec![count, count], n, &[1.0, 1.0])
}

/// Linear decay `A -> 0` with `kappa = 1`, `alpha = 1` and the given
/// initial count.
pub fn linear_decay(n: f64, initial: i64) -> Result<Model, Error> {
    let network = ReactionNetwork::new(
        vec!["A".into()],
        vec![Reaction {
            inputs: vec![1],
            outputs: vec![0],
            rate: 1.0,
        }],
    )?;
    Model::new(network, vec![initial], n, &[1.0])
}
