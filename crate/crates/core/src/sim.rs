//! Per-block trials and static parameter sweeps.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::{rng_for, sample_error, PauliPattern};
use crate::code::{AqnccConfig, CodePair, Family};
use crate::decoder::{BpDecoder, DEFAULT_MAX_ITER};
use crate::error::{out_of_range, Error, Result};
use crate::gf2::RowSpace;

/// Smallest prior handed to a decoder; a zero-probability channel still
/// needs a finite log-likelihood ratio.
pub const PRIOR_FLOOR: f64 = 1e-6;
/// Largest prior handed to a decoder.
pub const PRIOR_CEIL: f64 = 0.49;

pub(crate) fn clamp_prior(p: f64) -> f64 {
    p.clamp(PRIOR_FLOOR, PRIOR_CEIL)
}

/// What counts as a successful decode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessMode {
    /// The estimate equals the error.
    #[default]
    Exact,
    /// The estimate differs from the error by an element of the other
    /// side's row space. Entanglement-assisted degeneracy is subtle; treat
    /// these rates as optimistic.
    Degenerate,
}

/// How a sweep distributes trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Serial,
    /// Data-parallel over trials. Falls back to serial without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

/// Outcome of one code block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub block_index: u64,
    pub pz_true: f64,
    pub r_used: u32,
    pub phase_ok: bool,
    pub bit_ok: bool,
    pub block_ok: bool,
    pub phase_iterations: usize,
    pub bit_iterations: usize,
    /// Weight of the phase-error estimate, visible to the receiver.
    pub phase_estimate_weight: usize,
}

/// Decoders and row spaces for one code pair, built once and shared by
/// every trial against it.
#[derive(Clone, Debug)]
pub struct TrialEngine {
    pair: CodePair,
    phase: BpDecoder,
    bit: BpDecoder,
    // row spaces of H2′ and H1′ respectively, for degenerate mode
    phase_equiv: Option<RowSpace>,
    bit_equiv: Option<RowSpace>,
    mode: SuccessMode,
    max_iter: usize,
}

impl TrialEngine {
    pub fn new(pair: CodePair, mode: SuccessMode, max_iter: usize) -> Self {
        let (phase_equiv, bit_equiv) = match mode {
            SuccessMode::Exact => (None, None),
            SuccessMode::Degenerate => {
                (Some(RowSpace::new(&pair.h2)), Some(RowSpace::new(&pair.h1)))
            }
        };
        TrialEngine {
            phase: BpDecoder::new(&pair.h1),
            bit: BpDecoder::new(&pair.h2),
            pair,
            phase_equiv,
            bit_equiv,
            mode,
            max_iter,
        }
    }

    pub fn pair(&self) -> &CodePair {
        &self.pair
    }

    /// Decodes `err` in two steps: phase flips against `h1`, bit flips
    /// against `h2`. `priors` is `(pz, px)`.
    pub fn run(
        &self,
        err: &PauliPattern,
        priors: (f64, f64),
        block_index: u64,
        pz_true: f64,
    ) -> Result<TrialRecord> {
        let n = self.pair.n();
        if err.len() != n || err.e_z.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "error pattern on {} qubits against code length {n}",
                err.len()
            )));
        }
        let (pz, px) = (clamp_prior(priors.0), clamp_prior(priors.1));
        let s_z = self.pair.h1.mul_vec(&err.e_z)?;
        let s_x = self.pair.h2.mul_vec(&err.e_x)?;
        let z_out = self.phase.decode(&s_z, pz, self.max_iter)?;
        let x_out = self.bit.decode(&s_x, px, self.max_iter)?;

        let judge = |converged: bool,
                     est: &crate::gf2::BinVector,
                     truth: &crate::gf2::BinVector,
                     equiv: &Option<RowSpace>|
         -> Result<bool> {
            if !converged {
                return Ok(false);
            }
            let diff = est.xor(truth)?;
            match (self.mode, equiv) {
                (SuccessMode::Degenerate, Some(space)) => space.contains(&diff),
                _ => Ok(diff.is_zero()),
            }
        };
        let phase_ok = judge(
            z_out.converged,
            &z_out.estimate,
            &err.e_z,
            &self.phase_equiv,
        )?;
        let bit_ok = judge(x_out.converged, &x_out.estimate, &err.e_x, &self.bit_equiv)?;
        Ok(TrialRecord {
            block_index,
            pz_true,
            r_used: self.pair.r(),
            phase_ok,
            bit_ok,
            block_ok: phase_ok && bit_ok,
            phase_iterations: z_out.iterations_used,
            bit_iterations: x_out.iterations_used,
            phase_estimate_weight: z_out.estimate.weight(),
        })
    }
}

/// One block against `pair` with the default iteration limit.
pub fn run_trial(
    pair: &CodePair,
    err: &PauliPattern,
    priors: (f64, f64),
    mode: SuccessMode,
) -> Result<TrialRecord> {
    TrialEngine::new(pair.clone(), mode, DEFAULT_MAX_ITER).run(err, priors, 0, priors.0)
}

/// Grid definition for a static sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub p: u32,
    pub i: u32,
    pub askew: bool,
    pub r_values: Vec<u32>,
    pub px_values: Vec<f64>,
    pub pz_values: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub mode: SuccessMode,
    pub max_iter: usize,
    pub execution: Execution,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(out_of_range("trials", 0, ">= 1"));
        }
        if self.r_values.is_empty() || self.px_values.is_empty() || self.pz_values.is_empty() {
            return Err(Error::InvalidConfig("sweep grid has an empty axis".into()));
        }
        for &r in &self.r_values {
            AqnccConfig::new(self.p, self.i, r, self.askew).validate()?;
        }
        for &p in self.px_values.iter().chain(&self.pz_values) {
            if !(0.0..0.5).contains(&p) {
                return Err(out_of_range("flip probability", p, "[0, 0.5)"));
            }
        }
        Ok(())
    }
}

/// Aggregated outcome at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub p: u32,
    pub i: u32,
    pub r: u32,
    pub askew: bool,
    pub px: f64,
    pub pz: f64,
    pub trials: u64,
    pub phase_fail: u64,
    pub bit_fail: u64,
    pub block_fail: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

/// Two-sided 95% Wilson score interval for `failures / trials`.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let phat = failures as f64 / n;
    let denom = 1.0 + Z * Z / n;
    let center = (phat + Z * Z / (2.0 * n)) / denom;
    let half = Z * (phat * (1.0 - phat) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if failures == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
struct Counts {
    phase: u64,
    bit: u64,
    block: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            phase: self.phase + o.phase,
            bit: self.bit + o.bit,
            block: self.block + o.block,
        }
    }
}

fn point_path(cfg: &SweepConfig, r: u32, px: f64, pz: f64) -> [u64; 6] {
    [
        cfg.p as u64,
        cfg.i as u64,
        cfg.askew as u64,
        r as u64,
        px.to_bits(),
        pz.to_bits(),
    ]
}

fn one_trial(
    engine: &TrialEngine,
    cfg: &SweepConfig,
    path: &[u64; 6],
    px: f64,
    pz: f64,
    t: u64,
) -> Result<Counts> {
    let mut full = [0u64; 7];
    full[..6].copy_from_slice(path);
    full[6] = t;
    let mut rng = rng_for(cfg.seed, &full);
    let err = sample_error(engine.pair().n(), px, pz, &mut rng)?;
    let rec = engine.run(&err, (pz, px), t, pz)?;
    Ok(Counts {
        phase: u64::from(!rec.phase_ok),
        bit: u64::from(!rec.bit_ok),
        block: u64::from(!rec.block_ok),
    })
}

fn count_point(
    engine: &TrialEngine,
    cfg: &SweepConfig,
    r: u32,
    px: f64,
    pz: f64,
) -> Result<Counts> {
    let path = point_path(cfg, r, px, pz);
    match cfg.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| one_trial(engine, cfg, &path, px, pz, t))
                .try_reduce(Counts::default, |a, b| Ok(a + b))
        }
        _ => (0..cfg.trials).try_fold(Counts::default(), |acc, t| {
            Ok(acc + one_trial(engine, cfg, &path, px, pz, t)?)
        }),
    }
}

/// Runs `f` with data-parallel work limited to `jobs` threads. `None` uses
/// the machine's parallelism.
pub fn with_thread_limit<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        return Ok(pool.install(f));
    }
    let _ = jobs;
    Ok(f())
}

/// Runs every `(r, px, pz)` point of the grid, `r` outermost. Each trial's
/// noise is seeded from the master seed, the grid point and the trial
/// index, so counts do not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepResult>> {
    cfg.validate()?;
    let family = Arc::new(Family::build(cfg.p, cfg.i, cfg.askew)?);
    let mut out = Vec::new();
    for &r in &cfg.r_values {
        let engine = TrialEngine::new(family.at(r)?, cfg.mode, cfg.max_iter);
        for &px in &cfg.px_values {
            for &pz in &cfg.pz_values {
                let c = count_point(&engine, cfg, r, px, pz)?;
                let (ci_lo, ci_hi) = wilson_interval(c.block, cfg.trials);
                out.push(SweepResult {
                    p: cfg.p,
                    i: cfg.i,
                    r,
                    askew: cfg.askew,
                    px,
                    pz,
                    trials: cfg.trials,
                    phase_fail: c.phase,
                    bit_fail: c.bit,
                    block_fail: c.block,
                    ber: c.block as f64 / cfg.trials as f64,
                    ci_lo,
                    ci_hi,
                    seed: cfg.seed,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::assemble;
    use crate::gf2::BinVector;

    fn pair7() -> CodePair {
        assemble(&AqnccConfig::new(7, 0, 0, false)).unwrap()
    }

    #[test]
    fn zero_error_succeeds() {
        let rec = run_trial(
            &pair7(),
            &PauliPattern::identity(49),
            (0.02, 0.005),
            SuccessMode::Exact,
        )
        .unwrap();
        assert!(rec.block_ok && rec.phase_ok && rec.bit_ok);
        assert_eq!((rec.phase_iterations, rec.bit_iterations), (0, 0));
    }

    #[test]
    fn weight_one_phase_errors_succeed() {
        let engine = TrialEngine::new(pair7(), SuccessMode::Exact, DEFAULT_MAX_ITER);
        for v in 0..49 {
            let mut err = PauliPattern::identity(49);
            err.e_z.set(v, true);
            let rec = engine.run(&err, (0.02, 0.005), 0, 0.02).unwrap();
            assert!(rec.phase_ok, "qubit {v}");
            assert_eq!(rec.block_ok, rec.phase_ok && rec.bit_ok);
        }
    }

    #[test]
    fn degenerate_never_worse_than_exact() {
        let pair = assemble(&AqnccConfig::new(11, 0, 2, false)).unwrap();
        let exact = TrialEngine::new(pair.clone(), SuccessMode::Exact, 30);
        let degen = TrialEngine::new(pair, SuccessMode::Degenerate, 30);
        let mut rng = rng_for(3, &[]);
        for t in 0..200 {
            let err = sample_error(121, 0.03, 0.08, &mut rng).unwrap();
            let a = exact.run(&err, (0.08, 0.03), t, 0.08).unwrap();
            let b = degen.run(&err, (0.08, 0.03), t, 0.08).unwrap();
            assert!(!a.phase_ok || b.phase_ok);
            assert!(!a.bit_ok || b.bit_ok);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let engine = TrialEngine::new(pair7(), SuccessMode::Exact, 10);
        let err = PauliPattern {
            e_x: BinVector::zeros(25),
            e_z: BinVector::zeros(25),
        };
        assert!(engine.run(&err, (0.01, 0.01), 0, 0.01).is_err());
    }

    fn small_sweep(execution: Execution) -> SweepConfig {
        SweepConfig {
            p: 7,
            i: 0,
            askew: false,
            r_values: vec![0, 1, 2],
            px_values: vec![0.01],
            pz_values: vec![0.02, 0.06],
            trials: 300,
            seed: 17,
            mode: SuccessMode::Exact,
            max_iter: 50,
            execution,
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let mut cfg = small_sweep(Execution::Serial);
        cfg.trials = 0;
        assert!(run_sweep(&cfg).is_err());
        let mut cfg = small_sweep(Execution::Serial);
        cfg.r_values = vec![3];
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let serial = run_sweep(&small_sweep(Execution::Serial)).unwrap();
        let parallel = run_sweep(&small_sweep(Execution::Parallel)).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial.len(), 6);
        for row in &serial {
            assert_eq!(row.ber, row.block_fail as f64 / row.trials as f64);
            assert!(row.block_fail <= row.phase_fail + row.bit_fail);
            assert!(row.ci_lo <= row.ber && row.ber <= row.ci_hi);
        }
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
