//! Reproducible random variate generation.
//!
//! Every consumer of randomness owns a [`Stream`] derived from a
//! [`StreamKey`]; distinct keys give statistically independent streams and
//! identical keys reproduce the identical sequence bit for bit, regardless
//! of scheduling or worker count. Streams are counter-based: the key is
//! hashed into a 256-bit cipher seed, so creating a stream is O(1) and
//! requires no shared state.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::Error;

/// Identifies one independent stream of variates.
///
/// `channel` distinguishes the up-to-three driving processes per reaction
/// used by the coupled simulations (shared minimum and the two residuals).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub level: u32,
    pub path: u64,
    pub reaction: u32,
    pub channel: u8,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    fn seed_bytes(&self) -> [u8; 32] {
        let words = [
            self.master_seed,
            (u64::from(self.level) << 32) | u64::from(self.reaction),
            self.path,
            u64::from(self.channel),
        ];
        // two independent accumulators give a 128-bit key digest, expanded
        // to the 256-bit cipher seed
        let mut h0 = 0x243F_6A88_85A3_08D3u64;
        let mut h1 = 0x1319_8A2E_0370_7344u64;
        for (i, &w) in words.iter().enumerate() {
            h0 = mix(h0 ^ w.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1)));
            h1 = mix(h1 ^ w.wrapping_mul(0xA076_1D64_78BD_642F).wrapping_add(GOLDEN));
        }
        let mut seed = [0u8; 32];
        for (i, chunk) in seed.chunks_exact_mut(8).enumerate() {
            let word = match i {
                0 => mix(h0),
                1 => mix(h0 ^ GOLDEN),
                2 => mix(h1),
                _ => mix(h1 ^ GOLDEN),
            };
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        seed
    }
}

/// A single-owner stream of random variates.
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Deterministic stream for the given key.
    pub fn for_key(key: StreamKey) -> Self {
        Self {
            rng: ChaCha8Rng::from_seed(key.seed_bytes()),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`; safe to pass through `ln`.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential variate with the given rate, by inversion.
    pub fn exponential(&mut self, rate: f64) -> Result<f64, Error> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::InvalidRate(rate));
        }
        Ok(-self.uniform_open().ln() / rate)
    }

    /// Exactly Poisson-distributed count with the given mean.
    ///
    /// Inversion by sequential search below mean 10; transformed rejection
    /// with squeeze (Hormann's PTRS) at and above. Both are exact samplers;
    /// no normal approximation is used at any mean.
    pub fn poisson(&mut self, mean: f64) -> Result<u64, Error> {
        if mean < 0.0 || !mean.is_finite() {
            return Err(Error::InvalidMean(mean));
        }
        if mean < 10.0 {
            Ok(self.poisson_inversion(mean))
        } else {
            Ok(self.poisson_ptrs(mean))
        }
    }

    fn poisson_inversion(&mut self, mean: f64) -> u64 {
        let u = self.uniform();
        let mut p = (-mean).exp();
        let mut cum = p;
        let mut k = 0u64;
        while u > cum {
            k += 1;
            p *= mean / k as f64;
            cum += p;
            // unreachable for mean < 10 except by float saturation
            if k > 512 {
                break;
            }
        }
        k
    }

    fn poisson_ptrs(&mut self, mean: f64) -> u64 {
        let slam = mean.sqrt();
        let loglam = mean.ln();
        let b = 0.931 + 2.53 * slam;
        let a = -0.059 + 0.02483 * b;
        let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        let vr = 0.9277 - 3.6224 / (b - 2.0);
        loop {
            let u = self.uniform() - 0.5;
            let v = self.uniform();
            let us = 0.5 - u.abs();
            let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
            if us >= 0.07 && v <= vr {
                return k as u64;
            }
            if k < 0.0 || (us < 0.013 && v > us) {
                continue;
            }
            if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
                <= k * loglam - mean - ln_factorial(k as u64)
            {
                return k as u64;
            }
        }
    }
}

const LN_FACTORIAL_TABLE_LEN: usize = 1024;

fn ln_factorial_table() -> &'static [f64; LN_FACTORIAL_TABLE_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; LN_FACTORIAL_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; LN_FACTORIAL_TABLE_LEN];
        let mut acc = 0.0f64;
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            acc += (k as f64).ln();
            *slot = acc;
        }
        t
    })
}

/// `ln(k!)`, tabulated for small `k` and by Stirling's series beyond.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < LN_FACTORIAL_TABLE_LEN {
        return ln_factorial_table()[k as usize];
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Stream factory for one simulated path: fixes `(master_seed, level, path)`
/// and hands out per-(reaction, channel) streams.
#[derive(Debug, Clone, Copy)]
pub struct PathStreams {
    pub master_seed: u64,
    pub level: u32,
    pub path: u64,
}

impl PathStreams {
    pub fn new(master_seed: u64, level: u32, path: u64) -> Self {
        Self {
            master_seed,
            level,
            path,
        }
    }

    pub fn stream(&self, reaction: u32, channel: u8) -> Stream {
        Stream::for_key(StreamKey {
            master_seed: self.master_seed,
            level: self.level,
            path: self.path,
            reaction,
            channel,
        })
    }
}
