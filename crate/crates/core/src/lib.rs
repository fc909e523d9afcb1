//! Entanglement-assisted adaptive quantum noise control codes.
//!
//! Codes are built from the multiplicative cyclic difference matrix over
//! `Z_p`: every CDM row expands into a layer of `p` circulant permutation
//! matrices, half the layers check phase errors and half check bit errors.
//! Any two rows from distinct layers share exactly one column, so the pair
//! needs a single ebit and stays free of 4-cycles however the layers are
//! split. Moving layers between the two sides trades phase-error correction
//! for bit-error correction without changing `n`, `k` or `c`.
//!
//! The simulation side decodes each side with syndrome sum-product and runs
//! static sweeps or a closed feedback loop over a drifting channel.

pub mod adaptive;
pub mod alist;
pub mod channel;
pub mod code;
pub mod criteria;
pub mod decoder;
pub mod designs;
pub mod error;
pub mod gf2;
pub mod girth;
pub mod output;
pub mod sim;

pub use adaptive::{policy_update, run_adaptive, AdaptiveConfig, AdaptiveTrace, Policy, PriorMode};
pub use channel::{sample_error, ChannelModel, PauliPattern, PzProcess};
pub use code::{assemble, params, rebalance, AqnccConfig, CodePair, CodeParams, Family};
pub use criteria::{check_criteria, CriteriaReport};
pub use decoder::{bp_syndrome_decode, BpDecoder, DecodeOutcome};
pub use designs::{cdm_build, cdm_verify, circulant, expand, Cdm, Layer};
pub use error::{Error, Result};
pub use gf2::{in_rowspace, mul_transpose, rank, BinMatrix, BinVector};
pub use girth::{girth, Girth};
pub use sim::{
    run_sweep, run_trial, Execution, SuccessMode, SweepConfig, SweepResult, TrialRecord,
};
