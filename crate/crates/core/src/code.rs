//! CSS code pairs built from circulant layers.
//!
//! The phase side `h1` collects the layers that check phase (Z) errors and
//! the bit side `h2` those that check bit (X) errors. Rebalancing moves the
//! first `r` layers of the bit side over to the phase side.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

use crate::designs::{cdm_build, expand, Layer, LayerTag};
use crate::error::{out_of_range, Error, Result};
use crate::gf2::{mul_transpose, rank, BinMatrix};
use crate::girth::{girth, Girth};

/// Family parameters plus a rebalance level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AqnccConfig {
    pub p: u32,
    /// Layers discarded from the tail of each side.
    pub i: u32,
    /// Layers moved from the bit side to the phase side.
    pub r: u32,
    pub askew: bool,
}

impl AqnccConfig {
    pub fn new(p: u32, i: u32, r: u32, askew: bool) -> Self {
        AqnccConfig { p, i, r, askew }
    }

    /// Layers per side before discarding and rebalancing: `((p−1)/2, (p−1)/2)`,
    /// or one more on the phase side for the askew family.
    fn base_split(p: u32, askew: bool) -> (u32, u32) {
        let half = (p - 1) / 2;
        (half + u32::from(askew), half)
    }

    /// Largest legal discard count for prime `p`.
    pub fn max_i(p: u32, askew: bool) -> u32 {
        let half = (p.max(3) - 1) / 2;
        if askew {
            half - 1
        } else {
            half.saturating_sub(2)
        }
    }

    /// Largest legal rebalance level; the bit side keeps at least one layer.
    pub fn max_r(&self) -> u32 {
        let (_, bit) = Self::base_split(self.p.max(3), self.askew);
        bit.saturating_sub(self.i).saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if !crate::designs::is_odd_prime(self.p) {
            return Err(Error::NotOddPrime(self.p));
        }
        let min_p = if self.askew { 3 } else { 5 };
        if self.p < min_p {
            return Err(out_of_range("p", self.p, format!(">= {min_p}")));
        }
        let max_i = Self::max_i(self.p, self.askew);
        if self.i > max_i {
            return Err(out_of_range("i", self.i, format!("0..={max_i}")));
        }
        if self.r > self.max_r() {
            return Err(out_of_range("r", self.r, format!("0..={}", self.max_r())));
        }
        Ok(())
    }

    /// All legal rebalance levels for this family.
    pub fn r_levels(&self) -> std::ops::RangeInclusive<u32> {
        0..=self.max_r()
    }
}

/// The ordered layers of a code family at `r = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub p: u32,
    pub i: u32,
    pub askew: bool,
    /// Column count of every layer.
    pub n: usize,
    pub phase: Vec<Layer>,
    pub bit: Vec<Layer>,
}

impl Family {
    /// The construction's family for `(p, i, askew)`.
    pub fn build(p: u32, i: u32, askew: bool) -> Result<Self> {
        AqnccConfig::new(p, i, 0, askew).validate()?;
        let layers = expand(&cdm_build(p, askew)?)?;
        let (phase_len, bit_len) = AqnccConfig::base_split(p, askew);
        let (phase_len, bit_len) = (phase_len as usize, bit_len as usize);
        let keep_phase = phase_len - i as usize;
        let keep_bit = bit_len - i as usize;
        let phase = layers[..keep_phase].to_vec();
        let bit = layers[phase_len..phase_len + keep_bit].to_vec();
        Ok(Family {
            p,
            i,
            askew,
            n: (p * p) as usize,
            phase,
            bit,
        })
    }

    /// A family from explicit layers, e.g. a user-supplied CDM.
    pub fn from_layers(p: u32, askew: bool, phase: Vec<Layer>, bit: Vec<Layer>) -> Result<Self> {
        let n = phase
            .first()
            .or(bit.first())
            .map(|l| l.matrix.n_cols())
            .ok_or_else(|| Error::InvalidConfig("family needs at least one layer".into()))?;
        if bit.is_empty() {
            return Err(Error::InvalidConfig(
                "bit side needs at least one layer".into(),
            ));
        }
        if let Some(l) = phase.iter().chain(&bit).find(|l| l.matrix.n_cols() != n) {
            return Err(Error::DimensionMismatch(format!(
                "layer {} has {} columns, expected {n}",
                l.tag,
                l.matrix.n_cols()
            )));
        }
        Ok(Family {
            p,
            i: 0,
            askew,
            n,
            phase,
            bit,
        })
    }

    pub fn max_r(&self) -> u32 {
        self.bit.len() as u32 - 1
    }

    /// The pair at rebalance level `r`.
    pub fn at(self: &Arc<Self>, r: u32) -> Result<CodePair> {
        if r > self.max_r() {
            return Err(out_of_range("r", r, format!("0..={}", self.max_r())));
        }
        let r_us = r as usize;
        let phase: Vec<&Layer> = self.phase.iter().chain(&self.bit[..r_us]).collect();
        let bit: Vec<&Layer> = self.bit[r_us..].iter().collect();
        Ok(CodePair {
            family: Arc::clone(self),
            r,
            h1: BinMatrix::vstack(self.n, phase.iter().map(|l| &l.matrix))?,
            h2: BinMatrix::vstack(self.n, bit.iter().map(|l| &l.matrix))?,
            phase_tags: phase.iter().map(|l| l.tag).collect(),
            bit_tags: bit.iter().map(|l| l.tag).collect(),
        })
    }
}

/// A live code: phase-side matrix `h1`, bit-side matrix `h2`, and the layer
/// bookkeeping behind them.
#[derive(Clone, Debug)]
pub struct CodePair {
    family: Arc<Family>,
    r: u32,
    pub h1: BinMatrix,
    pub h2: BinMatrix,
    pub phase_tags: Vec<LayerTag>,
    pub bit_tags: Vec<LayerTag>,
}

impl PartialEq for CodePair {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r
            && self.h1 == other.h1
            && self.h2 == other.h2
            && self.phase_tags == other.phase_tags
            && self.bit_tags == other.bit_tags
    }
}

impl CodePair {
    pub fn family(&self) -> &Arc<Family> {
        &self.family
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.family.n
    }

    pub fn max_r(&self) -> u32 {
        self.family.max_r()
    }

    /// Layers that moved from the bit side, as one matrix.
    pub fn moved_block(&self) -> BinMatrix {
        let moved = &self.family.bit[..self.r as usize];
        BinMatrix::vstack(self.family.n, moved.iter().map(|l| &l.matrix))
            .expect("layers share a column count")
    }
}

pub fn assemble(cfg: &AqnccConfig) -> Result<CodePair> {
    cfg.validate()?;
    Arc::new(Family::build(cfg.p, cfg.i, cfg.askew)?).at(cfg.r)
}

/// The same family re-assembled at level `new_r`.
pub fn rebalance(pair: &CodePair, new_r: u32) -> Result<CodePair> {
    pair.family.at(new_r)
}

/// A weight that is either the same everywhere or not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Constant(usize),
    Irregular,
}

impl Regularity {
    pub fn of(weights: &[usize]) -> Self {
        match weights.split_first() {
            None => Regularity::Constant(0),
            Some((&w, rest)) if rest.iter().all(|&x| x == w) => Regularity::Constant(w),
            _ => Regularity::Irregular,
        }
    }

    pub fn is_regular(self) -> bool {
        matches!(self, Regularity::Constant(_))
    }
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularity::Constant(w) => write!(f, "{w}"),
            Regularity::Irregular => f.write_str("irregular"),
        }
    }
}

impl Serialize for Regularity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Regularity::Constant(w) => s.serialize_u64(*w as u64),
            Regularity::Irregular => s.serialize_str("irregular"),
        }
    }
}

/// `[[n, k; c]]` together with the structural data behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub rank_h1: usize,
    pub rank_h2: usize,
    /// The shorter of the two sides' girths.
    pub girth: Girth,
    pub girth_phase: Girth,
    pub girth_bit: Girth,
    pub row_weight: Regularity,
    pub col_weight_phase: Regularity,
    pub col_weight_bit: Regularity,
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{};{}]]", self.n, self.k, self.c)
    }
}

/// Parameters of `pair`, with every rank computed by elimination.
pub fn params(pair: &CodePair) -> CodeParams {
    let n = pair.n();
    let rank_h1 = rank(&pair.h1);
    let rank_h2 = rank(&pair.h2);
    let c = rank(&mul_transpose(&pair.h1, &pair.h2).expect("sides share a column count"));
    let k = (n + c)
        .checked_sub(rank_h1 + rank_h2)
        .expect("dimension is non-negative");
    let girth_phase = girth(&pair.h1);
    let girth_bit = girth(&pair.h2);
    let mut rows = pair.h1.row_weights();
    rows.extend(pair.h2.row_weights());
    CodeParams {
        n,
        k,
        c,
        rank_h1,
        rank_h2,
        girth: girth_phase.min(girth_bit),
        girth_phase,
        girth_bit,
        row_weight: Regularity::of(&rows),
        col_weight_phase: Regularity::of(&pair.h1.col_weights()),
        col_weight_bit: Regularity::of(&pair.h2.col_weights()),
    }
}

/// Structured description of a pair for export alongside its alist files.
#[derive(Clone, Debug, Serialize)]
pub struct CodeMetadata {
    pub p: u32,
    pub i: u32,
    pub r: u32,
    pub askew: bool,
    pub phase_layers: Vec<String>,
    pub bit_layers: Vec<String>,
    pub params: CodeParams,
    pub notation: String,
}

impl CodeMetadata {
    pub fn of(pair: &CodePair) -> Self {
        let params = params(pair);
        let fam = pair.family();
        CodeMetadata {
            p: fam.p,
            i: fam.i,
            r: pair.r(),
            askew: fam.askew,
            phase_layers: pair.phase_tags.iter().map(ToString::to_string).collect(),
            bit_layers: pair.bit_tags.iter().map(ToString::to_string).collect(),
            notation: params.to_string(),
            params,
        }
    }
}
