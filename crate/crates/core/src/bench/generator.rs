use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub m: usize,
    pub n: usize,
    /// Added to every live-alone valuation `v[i][i][r]`.
    pub alpha: f64,
    pub rent: f64,
    pub seed: u64,
}

/// Random instance: a ChaCha8 stream seeded with `cfg.seed` fills
/// `v[i][j][r]` with U[0, 1) draws in `i`, `j`, `r` order, then `alpha` is
/// added on the `i == j` entries.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance> {
    if !(cfg.alpha >= 0.0 && cfg.alpha.is_finite()) {
        return Err(crate::Error::InvalidInstance(
            crate::InstanceViolation::Shape(format!(
                "alpha must be a finite value >= 0, got {}",
                cfg.alpha
            )),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (m, n) = (cfg.m, cfg.n);
    let mut values = vec![vec![vec![0.0; n]; m]; m];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for v in cell.iter_mut() {
                *v = rng.gen::<f64>() + if i == j { cfg.alpha } else { 0.0 };
            }
        }
    }
    Ok(Instance::new(crate::InstanceData {
        m,
        n,
        rent: cfg.rent,
        valuations: values,
    })?)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one trial's substream, mixed from the run seed, a stream name and
/// the trial index. Independent of execution order.
pub fn trial_seed(seed: u64, stream: &str, trial: usize) -> u64 {
    let mut h = splitmix64(seed);
    for b in stream.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ trial as u64)
}
