//! Syndrome-based sum-product decoding.
//!
//! Flooding schedule over the Tanner graph of one check matrix. A check whose
//! syndrome bit is 1 flips the sign of every message it sends, so the decoder
//! searches for the most likely error pattern consistent with the syndrome
//! rather than with the all-zero syndrome.

use crate::error::{out_of_range, Error, Result};
use crate::gf2::{BinMatrix, BinVector};

pub const DEFAULT_MAX_ITER: usize = 100;

/// Check-node products are clamped to `±(1 − TANH_CLAMP)` before the inverse
/// hyperbolic tangent, which caps message magnitudes near 36.
pub const TANH_CLAMP: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub estimate: BinVector,
    /// The hard decision reproduces the syndrome.
    pub converged: bool,
    pub iterations_used: usize,
}

/// Tanner graph of a check matrix in edge-list form, reusable across decodes.
///
/// Edges are numbered check-major: the edges of check `j` are
/// `check_start[j]..check_start[j + 1]`.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    n_vars: usize,
    check_start: Vec<usize>,
    edge_var: Vec<u32>,
    var_start: Vec<usize>,
    var_edges: Vec<u32>,
}

#[inline]
fn half_tanh(m: f64) -> f64 {
    let e = (-m.abs()).exp();
    ((1.0 - e) / (1.0 + e)).copysign(m)
}

#[inline]
fn twice_atanh(x: f64) -> f64 {
    let x = x.clamp(-1.0 + TANH_CLAMP, 1.0 - TANH_CLAMP);
    ((1.0 + x) / (1.0 - x)).ln()
}

impl BpDecoder {
    pub fn new(h: &BinMatrix) -> Self {
        let n_vars = h.n_cols();
        let mut check_start = Vec::with_capacity(h.n_rows() + 1);
        let mut edge_var = Vec::new();
        let mut var_degree = vec![0usize; n_vars];
        check_start.push(0);
        for j in 0..h.n_rows() {
            for v in h.row_ones(j) {
                edge_var.push(v as u32);
                var_degree[v] += 1;
            }
            check_start.push(edge_var.len());
        }
        let mut var_start = Vec::with_capacity(n_vars + 1);
        var_start.push(0);
        for d in &var_degree {
            var_start.push(var_start.last().unwrap() + d);
        }
        let mut fill = var_start[..n_vars].to_vec();
        let mut var_edges = vec![0u32; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }
        BpDecoder {
            n_vars,
            check_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    pub fn n_checks(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    fn satisfies(&self, hard: &[u8], syndrome: &BinVector) -> bool {
        (0..self.n_checks()).all(|j| {
            let parity = self.edge_var[self.check_start[j]..self.check_start[j + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ hard[v as usize]);
            (parity == 1) == syndrome.get(j)
        })
    }

    pub fn decode(
        &self,
        syndrome: &BinVector,
        prior_p: f64,
        max_iter: usize,
    ) -> Result<DecodeOutcome> {
        if syndrome.len() != self.n_checks() {
            return Err(Error::DimensionMismatch(format!(
                "syndrome length {} against {} checks",
                syndrome.len(),
                self.n_checks()
            )));
        }
        if !(prior_p > 0.0 && prior_p < 0.5) {
            return Err(out_of_range("prior probability", prior_p, "(0, 0.5)"));
        }

        let mut hard = vec![0u8; self.n_vars];
        if syndrome.is_zero() {
            return Ok(DecodeOutcome {
                estimate: BinVector::zeros(self.n_vars),
                converged: true,
                iterations_used: 0,
            });
        }

        let prior_llr = ((1.0 - prior_p) / prior_p).ln();
        let n_edges = self.n_edges();
        // Variable-to-check messages, overwritten in place by their half tanh.
        let mut to_check = vec![prior_llr; n_edges];
        let mut to_var = vec![0.0f64; n_edges];
        let mut converged = false;
        let mut iterations_used = 0;

        for it in 1..=max_iter {
            iterations_used = it;
            for j in 0..self.n_checks() {
                let (a, b) = (self.check_start[j], self.check_start[j + 1]);
                let sign = if syndrome.get(j) { -1.0 } else { 1.0 };
                let t = &mut to_check[a..b];
                let out = &mut to_var[a..b];
                let mut acc = 1.0;
                for (tk, ok) in t.iter_mut().zip(out.iter_mut()) {
                    *tk = half_tanh(*tk);
                    *ok = acc;
                    acc *= *tk;
                }
                acc = 1.0;
                for (tk, ok) in t.iter().zip(out.iter_mut()).rev() {
                    let excl = *ok * acc;
                    acc *= *tk;
                    *ok = sign * twice_atanh(excl);
                }
            }

            for (v, bit) in hard.iter_mut().enumerate() {
                let edges = &self.var_edges[self.var_start[v]..self.var_start[v + 1]];
                let total = prior_llr + edges.iter().map(|&e| to_var[e as usize]).sum::<f64>();
                *bit = u8::from(total < 0.0);
                for &e in edges {
                    to_check[e as usize] = total - to_var[e as usize];
                }
            }

            if self.satisfies(&hard, syndrome) {
                converged = true;
                break;
            }
        }

        Ok(DecodeOutcome {
            estimate: BinVector::from_ones(
                self.n_vars,
                hard.iter()
                    .enumerate()
                    .filter(|(_, &b)| b == 1)
                    .map(|(i, _)| i),
            ),
            converged,
            iterations_used,
        })
    }
}

/// One-shot decode of `syndrome` against `h` with a uniform bit-flip prior.
pub fn bp_syndrome_decode(
    h: &BinMatrix,
    syndrome: &BinVector,
    prior_p: f64,
    max_iter: usize,
) -> Result<DecodeOutcome> {
    BpDecoder::new(h).decode(syndrome, prior_p, max_iter)
}
