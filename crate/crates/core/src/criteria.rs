//! Audit of the six design criteria for adaptive noise control codes.
//!
//! 1. `H1`, `H2` define isomorphic but not identical codes free of 4-cycles.
//! 2. `rank(H1·H2ᵀ) = 1`.
//! 3. Every legal move keeps `rank(H1′·H2′ᵀ) = 1` without creating 4-cycles.
//! 4. `rank(H1′) + rank(H2′)` does not depend on the move.
//! 5. Both sides are row and column regular.
//! 6. Every moved block has constant column weight.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::code::{AqnccConfig, Family, Regularity};
use crate::designs::shear_column_permutation;
use crate::error::Result;
use crate::gf2::{mul_transpose, rank, BinMatrix};
use crate::girth::{girth, Girth};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The criterion does not apply to this family.
    NotRequired,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub number: u8,
    pub status: Status,
    pub evidence: String,
}

/// Per-level structural data gathered while checking criteria 3 and 4.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelAudit {
    pub r: u32,
    pub rank_h1: usize,
    pub rank_h2: usize,
    pub c: usize,
    pub girth_phase: Girth,
    pub girth_bit: Girth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriteriaReport {
    pub p: u32,
    pub i: u32,
    pub askew: bool,
    pub criteria: Vec<CriterionResult>,
    pub levels: Vec<LevelAudit>,
}

impl CriteriaReport {
    pub fn criterion(&self, number: u8) -> &CriterionResult {
        &self.criteria[number as usize - 1]
    }

    /// True when no criterion failed.
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.status != Status::Fail)
    }
}

impl fmt::Display for CriteriaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "criteria for p={} i={}{}",
            self.p,
            self.i,
            if self.askew { " (askew)" } else { "" }
        )?;
        for c in &self.criteria {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::NotRequired => "N/A ",
            };
            writeln!(f, "  {} {}) {}", status, c.number, c.evidence)?;
        }
        Ok(())
    }
}

/// Searches for a shear `t` carrying the bit-side layers onto the phase-side
/// layers in order, then confirms it on the assembled matrices.
fn isomorphism_witness(family: &Family, h1: &BinMatrix, h2: &BinMatrix) -> Option<u32> {
    if family.phase.len() != family.bit.len() || h1.n_cols() != (family.p * family.p) as usize {
        return None;
    }
    let p = family.p;
    let gens = |ls: &[crate::designs::Layer]| -> Option<Vec<u32>> {
        ls.iter().map(|l| l.tag.generator).collect()
    };
    let (phase, bit) = (gens(&family.phase)?, gens(&family.bit)?);
    let t = (bit[0] + p - phase[0]) % p;
    let consistent = bit.iter().zip(&phase).all(|(&b, &a)| (b + p - t) % p == a);
    if !consistent {
        return None;
    }
    let mapped = h2.permute_columns(&shear_column_permutation(p, t)).ok()?;
    (&mapped == h1).then_some(t)
}

pub fn check_criteria(p: u32, i: u32, askew: bool) -> Result<CriteriaReport> {
    Ok(check_family(&Arc::new(Family::build(p, i, askew)?)))
}

/// Runs the audit on any family; failures are reported, never raised.
pub fn check_family(family: &Arc<Family>) -> CriteriaReport {
    let base = family.at(0).expect("r = 0 is always legal");
    let mut criteria = Vec::with_capacity(6);

    // 1
    let g1 = girth(&base.h1);
    let g2 = girth(&base.h2);
    criteria.push(if family.askew {
        CriterionResult {
            number: 1,
            status: Status::NotRequired,
            evidence: format!("askew: not required (girth {g1}/{g2})"),
        }
    } else {
        let distinct = base.h1 != base.h2;
        let witness = isomorphism_witness(family, &base.h1, &base.h2);
        let ok =
            distinct && witness.is_some() && g1.is_four_cycle_free() && g2.is_four_cycle_free();
        CriterionResult {
            number: 1,
            status: Status::of(ok),
            evidence: format!(
                "isomorphic: {}; identical: {}; girth {g1}/{g2}",
                witness.map_or("no witness".to_string(), |t| format!("shear by {t}")),
                !distinct
            ),
        }
    });

    // 2
    let c0 = rank(&mul_transpose(&base.h1, &base.h2).expect("same width"));
    criteria.push(CriterionResult {
        number: 2,
        status: Status::of(c0 == 1),
        evidence: format!("rank(H1·H2ᵀ) = {c0}"),
    });

    // 3 and 4
    let mut levels = Vec::new();
    let mut moved_weights_ok = true;
    let mut moved_evidence = Vec::new();
    for r in 0..=family.max_r() {
        let pair = family.at(r).expect("r within bounds");
        let moved = pair.moved_block();
        let w = Regularity::of(&moved.col_weights());
        moved_weights_ok &= w.is_regular();
        moved_evidence.push(format!("r={r}:{w}"));
        levels.push(LevelAudit {
            r,
            rank_h1: rank(&pair.h1),
            rank_h2: rank(&pair.h2),
            c: rank(&mul_transpose(&pair.h1, &pair.h2).expect("same width")),
            girth_phase: girth(&pair.h1),
            girth_bit: girth(&pair.h2),
        });
    }
    let bad3: Vec<u32> = levels
        .iter()
        .filter(|l| {
            l.c != 1 || !l.girth_phase.is_four_cycle_free() || !l.girth_bit.is_four_cycle_free()
        })
        .map(|l| l.r)
        .collect();
    criteria.push(CriterionResult {
        number: 3,
        status: Status::of(bad3.is_empty()),
        evidence: if bad3.is_empty() {
            format!("c = 1 and no 4-cycles for r = 0..={}", family.max_r())
        } else {
            let detail: Vec<String> = levels
                .iter()
                .filter(|l| bad3.contains(&l.r))
                .map(|l| {
                    format!(
                        "r={} c={} girth {}/{}",
                        l.r, l.c, l.girth_phase, l.girth_bit
                    )
                })
                .collect();
            format!("violated at {}", detail.join(", "))
        },
    });

    let sums: Vec<usize> = levels.iter().map(|l| l.rank_h1 + l.rank_h2).collect();
    let constant = sums.windows(2).all(|w| w[0] == w[1]);
    criteria.push(CriterionResult {
        number: 4,
        status: Status::of(constant),
        evidence: format!("rank sums over r: {sums:?}"),
    });

    // 5
    let regular = |m: &BinMatrix| {
        (
            Regularity::of(&m.row_weights()),
            Regularity::of(&m.col_weights()),
        )
    };
    let (r1, c1) = regular(&base.h1);
    let (r2, c2) = regular(&base.h2);
    criteria.push(CriterionResult {
        number: 5,
        status: Status::of(
            r1.is_regular() && c1.is_regular() && r2.is_regular() && c2.is_regular(),
        ),
        evidence: format!("H1 rows {r1} cols {c1}; H2 rows {r2} cols {c2}"),
    });

    // 6
    criteria.push(CriterionResult {
        number: 6,
        status: Status::of(moved_weights_ok),
        evidence: format!("moved block column weights {}", moved_evidence.join(" ")),
    });

    CriteriaReport {
        p: family.p,
        i: family.i,
        askew: family.askew,
        criteria,
        levels,
    }
}

/// Convenience wrapper taking a config whose `r` is ignored.
pub fn check_config(cfg: &AqnccConfig) -> Result<CriteriaReport> {
    check_criteria(cfg.p, cfg.i, cfg.askew)
}
