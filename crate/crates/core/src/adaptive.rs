//! Closed-loop rebalancing over a time-varying channel.
//!
//! Each block is decoded at the current level `r`. The receiver reports back
//! which decoding step failed, and the sender moves one layer per block
//! towards the side that failed. Reports arrive before the next block, so a
//! change at block `b` takes effect at block `b + 1`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::code::{AqnccConfig, Family};
use crate::error::{out_of_range, Result};
use crate::sim::{clamp_prior, wilson_interval, SuccessMode, TrialEngine, TrialRecord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Never change `r`.
    Hold,
    /// Phase failure with bit success moves a layer to the phase side; bit
    /// failure with phase success moves one back.
    #[default]
    Feedback,
}

/// Next level under the feedback rule, clamped to `bounds`.
pub fn policy_update(r: u32, outcome: (bool, bool), bounds: (u32, u32)) -> u32 {
    let (lo, hi) = bounds;
    match outcome {
        (false, true) => (r + 1).min(hi),
        (true, false) => r.saturating_sub(1).max(lo),
        _ => r,
    }
}

/// Where the decoder's phase-flip prior comes from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorMode {
    /// Exponentially weighted average of the decoded phase-error density
    /// with time constant `window` blocks, starting from `init`.
    Estimated {
        window: f64,
        init: f64,
    },
    Fixed {
        pz: f64,
    },
    /// The true channel value; an upper reference, not a receiver strategy.
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub p: u32,
    pub i: u32,
    pub askew: bool,
    pub channel: ChannelModel,
    pub policy: Policy,
    pub prior: PriorMode,
    pub horizon: u64,
    pub initial_r: u32,
    pub mode: SuccessMode,
    pub max_iter: usize,
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        AqnccConfig::new(self.p, self.i, self.initial_r, self.askew).validate()?;
        self.channel.validate()?;
        if self.horizon == 0 {
            return Err(out_of_range("horizon", 0, ">= 1"));
        }
        match self.prior {
            PriorMode::Estimated { window, init } => {
                if window.is_nan() || window < 1.0 {
                    return Err(out_of_range("prior window", window, ">= 1"));
                }
                if !(0.0..0.5).contains(&init) {
                    return Err(out_of_range("prior init", init, "[0, 0.5)"));
                }
            }
            PriorMode::Fixed { pz } if !(0.0..0.5).contains(&pz) => {
                return Err(out_of_range("fixed prior", pz, "[0, 0.5)"));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptiveTrace {
    pub config: AdaptiveConfig,
    pub records: Vec<TrialRecord>,
    pub blocks: u64,
    pub phase_fail: u64,
    pub bit_fail: u64,
    pub block_fail: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub r_bounds: (u32, u32),
}

impl AdaptiveTrace {
    /// Smallest and largest level visited.
    pub fn r_range(&self) -> (u32, u32) {
        let it = self.records.iter().map(|r| r.r_used);
        (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
    }
}

/// Runs one trace. Single-threaded; see [`run_adaptive_batch`] for replicates.
pub fn run_adaptive(cfg: &AdaptiveConfig) -> Result<AdaptiveTrace> {
    cfg.validate()?;
    let family = Arc::new(Family::build(cfg.p, cfg.i, cfg.askew)?);
    let bounds = (0, family.max_r());
    let n = family.n;
    let mut engines: HashMap<u32, TrialEngine> = HashMap::new();
    let mut r = cfg.initial_r;
    let mut estimate = match cfg.prior {
        PriorMode::Estimated { init, .. } => init,
        PriorMode::Fixed { pz } => pz,
        PriorMode::Oracle => 0.0,
    };
    let mut records = Vec::with_capacity(cfg.horizon as usize);
    let (mut phase_fail, mut bit_fail, mut block_fail) = (0, 0, 0);

    for block in 0..cfg.horizon {
        let (pz_true, err) = cfg.channel.sample_block(n, block)?;
        let pz_prior = match cfg.prior {
            PriorMode::Oracle => pz_true,
            _ => estimate,
        };
        let engine = match engines.entry(r) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(TrialEngine::new(family.at(r)?, cfg.mode, cfg.max_iter))
            }
        };
        let rec = engine.run(
            &err,
            (clamp_prior(pz_prior), cfg.channel.px),
            block,
            pz_true,
        )?;

        if let PriorMode::Estimated { window, .. } = cfg.prior {
            let density = rec.phase_estimate_weight as f64 / n as f64;
            estimate += (density - estimate) / window;
        }
        phase_fail += u64::from(!rec.phase_ok);
        bit_fail += u64::from(!rec.bit_ok);
        block_fail += u64::from(!rec.block_ok);
        if cfg.policy == Policy::Feedback {
            r = policy_update(r, (rec.phase_ok, rec.bit_ok), bounds);
        }
        records.push(rec);
    }

    let (ci_lo, ci_hi) = wilson_interval(block_fail, cfg.horizon);
    Ok(AdaptiveTrace {
        config: *cfg,
        records,
        blocks: cfg.horizon,
        phase_fail,
        bit_fail,
        block_fail,
        ber: block_fail as f64 / cfg.horizon as f64,
        ci_lo,
        ci_hi,
        r_bounds: bounds,
    })
}

/// Independent traces, concurrently when the `parallel` feature is on.
pub fn run_adaptive_batch(cfgs: &[AdaptiveConfig]) -> Result<Vec<AdaptiveTrace>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cfgs.par_iter().map(run_adaptive).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cfgs.iter().map(run_adaptive).collect()
    }
}
