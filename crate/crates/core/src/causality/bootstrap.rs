use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest replicates accepted; coarser p-value grids are not meaningful.
pub const MIN_REPS: usize = 199;
pub const DEFAULT_BLOCK_LEN: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub reps: usize,
    pub block_len: usize,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(reps: usize, block_len: usize, seed: u64) -> Result<Self> {
        let cfg = BootstrapConfig { reps, block_len, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(Error::Contract(format!(
                "bootstrap needs at least {MIN_REPS} replicates, got {}",
                self.reps
            )));
        }
        if self.block_len == 0 {
            return Err(Error::Contract("bootstrap block length must be positive".into()));
        }
        Ok(())
    }
}

/// Seed for replicate `r`, a SplitMix64 step away from the master seed so
/// replicates can run in any order.
pub fn replicate_seed(master: u64, r: usize) -> u64 {
    let mut z = master.wrapping_add((r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Moving-block resample: concatenate blocks of `block_len` consecutive
/// values starting at uniform offsets until `x.len()` values are drawn.
pub fn block_resample(x: &[f64], block_len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n = x.len();
    let len = block_len.clamp(1, n.max(1));
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let start = rng.random_range(0..=n - len);
        let take = len.min(n - out.len());
        out.extend_from_slice(&x[start..start + take]);
    }
    out
}
