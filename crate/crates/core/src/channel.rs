//! Asymmetric Pauli channel with independent bit- and phase-flip marginals.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::gf2::BinVector;

/// RNG used for every stochastic step.
pub type SimRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of coordinates into an independent seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |h, &x| splitmix64(h ^ splitmix64(x)))
}

pub fn rng_for(master: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, path))
}

/// One draw of channel noise on `n` qubits. A Y error is a coincident 1 in
/// both vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliPattern {
    pub e_x: BinVector,
    pub e_z: BinVector,
}

impl PauliPattern {
    pub fn identity(n: usize) -> Self {
        PauliPattern {
            e_x: BinVector::zeros(n),
            e_z: BinVector::zeros(n),
        }
    }

    pub fn len(&self) -> usize {
        self.e_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e_x.is_empty()
    }

    /// Number of qubits hit by both a bit and a phase flip.
    pub fn y_count(&self) -> usize {
        self.e_x
            .words()
            .iter()
            .zip(self.e_z.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

fn bernoulli(p: f64) -> Result<Bernoulli> {
    if !(0.0..0.5).contains(&p) {
        return Err(out_of_range("flip probability", p, "[0, 0.5)"));
    }
    Bernoulli::new(p).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn sample_bits(n: usize, dist: &Bernoulli, rng: &mut impl Rng) -> BinVector {
    let mut v = BinVector::zeros(n);
    for i in 0..n {
        if dist.sample(rng) {
            v.set(i, true);
        }
    }
    v
}

/// Independent `Bernoulli(px)` bit flips then `Bernoulli(pz)` phase flips.
pub fn sample_error(n: usize, px: f64, pz: f64, rng: &mut impl Rng) -> Result<PauliPattern> {
    let (bx, bz) = (bernoulli(px)?, bernoulli(pz)?);
    let e_x = sample_bits(n, &bx, rng);
    let e_z = sample_bits(n, &bz, rng);
    Ok(PauliPattern { e_x, e_z })
}

/// How the phase-flip probability evolves over code blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PzProcess {
    Constant {
        pz: f64,
    },
    /// Redrawn uniformly on `[lo, hi]` at the start of every `period` blocks.
    Piecewise {
        period: u64,
        lo: f64,
        hi: f64,
    },
}

/// Channel parameters for a time series of blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub px: f64,
    pub pz: PzProcess,
    pub seed: u64,
}

const PZ_STREAM: u64 = 0x707a;
const ERROR_STREAM: u64 = 0x6572;

impl ChannelModel {
    pub fn new(px: f64, pz: PzProcess, seed: u64) -> Result<Self> {
        let model = ChannelModel { px, pz, seed };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |what: &'static str, p: f64| {
            if (0.0..0.5).contains(&p) {
                Ok(())
            } else {
                Err(out_of_range(what, p, "[0, 0.5)"))
            }
        };
        prob("px", self.px)?;
        match self.pz {
            PzProcess::Constant { pz } => prob("pz", pz),
            PzProcess::Piecewise { period, lo, hi } => {
                if period == 0 {
                    return Err(out_of_range("pz period", period, ">= 1"));
                }
                prob("pz lower bound", lo)?;
                prob("pz upper bound", hi)?;
                if lo > hi {
                    return Err(Error::InvalidConfig(format!(
                        "pz range {lo}..{hi} is empty"
                    )));
                }
                Ok(())
            }
        }
    }

    /// The true phase-flip probability during `block`.
    pub fn pz_at(&self, block: u64) -> f64 {
        match self.pz {
            PzProcess::Constant { pz } => pz,
            PzProcess::Piecewise { period, lo, hi } => {
                let mut rng = rng_for(self.seed, &[PZ_STREAM, block / period]);
                lo + (hi - lo) * rng.random::<f64>()
            }
        }
    }

    /// Noise for `block` on `n` qubits. Depends only on the seed, the block
    /// index and `pz`, so runs sharing a seed see identical patterns.
    pub fn sample_block(&self, n: usize, block: u64) -> Result<(f64, PauliPattern)> {
        let pz = self.pz_at(block);
        let mut rng = rng_for(self.seed, &[ERROR_STREAM, block]);
        Ok((pz, sample_error(n, self.px, pz, &mut rng)?))
    }

    /// A representative pz for decoder priors when the true value is hidden.
    pub fn pz_midpoint(&self) -> f64 {
        match self.pz {
            PzProcess::Constant { pz } => pz,
            PzProcess::Piecewise { lo, hi, .. } => 0.5 * (lo + hi),
        }
    }
}
