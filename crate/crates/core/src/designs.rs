//! Cyclic difference matrices and their expansion into circulant layers.
//!
//! A `(v, mu)` cyclic difference matrix has `mu` rows over `Z_v` such that
//! the coordinate-wise difference of any two rows hits every residue exactly
//! once. Replacing each entry `x` by the `p × p` circulant permutation `I(x)`
//! turns one row into a *layer*: a `p × p²` matrix with row weight `p` and
//! column weight 1.

use std::fmt::Write as _;

use crate::error::{out_of_range, Error, Result};
use crate::gf2::BinMatrix;

pub fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The circulant permutation matrix `I(x)`: row `y` has its one at column
/// `(x + y) mod p`.
pub fn circulant(x: u32, p: u32) -> Result<BinMatrix> {
    if x >= p {
        return Err(out_of_range("circulant shift", x, format!("0..{p}")));
    }
    let p = p as usize;
    let mut m = BinMatrix::zeros(p, p);
    for y in 0..p {
        m.set(y, (x as usize + y) % p, true);
    }
    Ok(m)
}

/// A `mu × v` matrix over `Z_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cdm {
    v: u32,
    entries: Vec<Vec<u32>>,
    askew: bool,
}

impl Cdm {
    /// Wraps raw entries. Shapes and residue ranges are checked here; the
    /// difference property is checked by [`cdm_verify`].
    pub fn new(v: u32, entries: Vec<Vec<u32>>, askew: bool) -> Result<Self> {
        if v == 0 {
            return Err(Error::NotCdm("order must be positive".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != v as usize {
                return Err(Error::DimensionMismatch(format!(
                    "CDM row {i} has {} entries, expected {v}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&e| e >= v) {
                return Err(out_of_range("CDM entry", bad, format!("0..{v}")));
            }
        }
        Ok(Cdm { v, entries, askew })
    }

    pub fn order(&self) -> u32 {
        self.v
    }

    pub fn n_rows(&self) -> usize {
        self.entries.len()
    }

    pub fn is_askew(&self) -> bool {
        self.askew
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.entries
    }

    /// The multiplier `a` when row `i` is the progression `(0, a, 2a, …)`.
    pub fn generator(&self, i: usize) -> Option<u32> {
        let row = &self.entries[i];
        let a = *row.get(1).unwrap_or(&0);
        row.iter()
            .enumerate()
            .all(|(l, &e)| e as u64 == (l as u64 * a as u64) % self.v as u64)
            .then_some(a)
    }

    /// Text form: a `v mu askew` header followed by one line of residues per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {}",
            self.v,
            self.entries.len(),
            u8::from(self.askew)
        );
        for row in &self.entries {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty CDM file".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || Error::Parse {
            line: hline + 1,
            msg: format!("expected `v mu askew`, found {header:?}"),
        };
        if fields.len() != 3 {
            return Err(bad_header());
        }
        let v: u32 = fields[0].parse().map_err(|_| bad_header())?;
        let mu: usize = fields[1].parse().map_err(|_| bad_header())?;
        let askew = match fields[2] {
            "0" | "false" => false,
            "1" | "true" => true,
            _ => return Err(bad_header()),
        };
        let mut entries = Vec::with_capacity(mu);
        for (n, line) in lines {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>().map_err(|_| Error::Parse {
                        line: n + 1,
                        msg: format!("bad residue {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            entries.push(row);
        }
        if entries.len() != mu {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("header declares {mu} rows, found {}", entries.len()),
            });
        }
        Cdm::new(v, entries, askew)
    }
}

/// The multiplicative family: rows `(0, a, 2a, …, (p−1)a)` for `a = 1..p−1`,
/// with the zero row prepended when `askew`.
pub fn cdm_build(p: u32, askew: bool) -> Result<Cdm> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let min = if askew { 3 } else { 5 };
    if p < min {
        return Err(out_of_range(
            if askew { "askew prime" } else { "prime" },
            p,
            format!(">= {min}"),
        ));
    }
    let first = if askew { 0 } else { 1 };
    let entries = (first..p)
        .map(|a| (0..p).map(|l| (l * a) % p).collect())
        .collect();
    Cdm::new(p, entries, askew)
}

/// Whether every pair of rows has coordinate-wise differences covering `Z_v`.
pub fn cdm_verify(m: &Cdm) -> bool {
    let v = m.v as usize;
    let mut seen = vec![false; v];
    for i in 0..m.entries.len() {
        for j in i + 1..m.entries.len() {
            seen.iter_mut().for_each(|s| *s = false);
            for (&a, &b) in m.entries[i].iter().zip(&m.entries[j]) {
                let d = (a as usize + v - b as usize) % v;
                if std::mem::replace(&mut seen[d], true) {
                    return false;
                }
            }
        }
    }
    true
}

/// Which CDM row a layer came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct LayerTag {
    /// Row index within the CDM.
    pub row: usize,
    /// The multiplier `a` when the row is `(0, a, 2a, …)`, i.e. the layer
    /// coming from `r_a`.
    pub generator: Option<u32>,
}

impl std::fmt::Display for LayerTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.generator {
            Some(a) => write!(f, "r{a}"),
            None => write!(f, "row{}", self.row),
        }
    }
}

/// One expanded CDM row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub matrix: BinMatrix,
    pub tag: LayerTag,
}

/// Expands every CDM row into a layer of `p` circulant blocks.
pub fn expand(m: &Cdm) -> Result<Vec<Layer>> {
    if !cdm_verify(m) {
        return Err(Error::NotCdm("difference property fails".into()));
    }
    let p = m.v as usize;
    let layers = m
        .entries
        .iter()
        .enumerate()
        .map(|(row, entries)| {
            let mut mat = BinMatrix::zeros(p, p * p);
            for (block, &x) in entries.iter().enumerate() {
                for y in 0..p {
                    mat.set(y, block * p + (x as usize + y) % p, true);
                }
            }
            Layer {
                matrix: mat,
                tag: LayerTag {
                    row,
                    generator: m.generator(row),
                },
            }
        })
        .collect();
    Ok(layers)
}

/// Column map `(block j, offset c) → (block j, −c mod p)`. Together with
/// [`negation_row_permutation`] it carries the layer of `r_a` onto the layer
/// of `r_{p−a}`.
pub fn negation_column_permutation(p: u32) -> Vec<usize> {
    let p = p as usize;
    (0..p * p)
        .map(|col| {
            let (j, c) = (col / p, col % p);
            j * p + (p - c) % p
        })
        .collect()
}

/// Row map `y → −y mod p` within a layer.
pub fn negation_row_permutation(p: u32) -> Vec<usize> {
    let p = p as usize;
    (0..p).map(|y| (p - y) % p).collect()
}

/// Column map `(block j, offset c) → (block j, c − t·j mod p)`. It carries the
/// layer of `r_a` onto the layer of `r_{a−t}` row for row.
pub fn shear_column_permutation(p: u32, t: u32) -> Vec<usize> {
    let p = p as usize;
    let t = t as usize % p;
    (0..p * p)
        .map(|col| {
            let (j, c) = (col / p, col % p);
            j * p + (c + p * p - t * j % p) % p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{mul_transpose, rank};

    #[test]
    fn primes() {
        let odd: Vec<u32> = (0..40).filter(|&p| is_odd_prime(p)).collect();
        assert_eq!(odd, vec![3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn circulant_zero_is_identity() {
        for p in [3, 5, 7, 29] {
            assert_eq!(circulant(0, p).unwrap(), BinMatrix::identity(p as usize));
        }
        assert!(circulant(7, 7).is_err());
    }

    #[test]
    fn circulant_two_of_seven() {
        let expected = BinMatrix::from_dense(
            7,
            &[
                [0u8, 0, 1, 0, 0, 0, 0],
                [0, 0, 0, 1, 0, 0, 0],
                [0, 0, 0, 0, 1, 0, 0],
                [0, 0, 0, 0, 0, 1, 0],
                [0, 0, 0, 0, 0, 0, 1],
                [1, 0, 0, 0, 0, 0, 0],
                [0, 1, 0, 0, 0, 0, 0],
            ],
        )
        .unwrap();
        assert_eq!(circulant(2, 7).unwrap(), expected);
    }

    #[test]
    fn circulant_inverse_pairs() {
        for p in [5u32, 7] {
            for x in 0..p {
                let a = circulant(x, p).unwrap();
                // I(p−x)ᵀ, and mul_transpose multiplies by the transpose again.
                let b = circulant((p - x) % p, p).unwrap().transpose();
                assert_eq!(
                    mul_transpose(&a, &b).unwrap(),
                    BinMatrix::identity(p as usize)
                );
                assert_eq!(
                    mul_transpose(&a, &a).unwrap(),
                    BinMatrix::identity(p as usize)
                );
            }
        }
    }

    #[test]
    fn seven_six_display() {
        let cdm = cdm_build(7, false).unwrap();
        let shown: [[u32; 7]; 6] = [
            [0, 1, 2, 3, 4, 5, 6],
            [0, 2, 4, 6, 1, 3, 5],
            [0, 3, 6, 2, 5, 1, 4],
            [0, 4, 1, 5, 2, 6, 3],
            [0, 5, 3, 1, 6, 4, 2],
            [0, 6, 5, 4, 3, 2, 1],
        ];
        assert_eq!(cdm.n_rows(), 6);
        for (row, want) in cdm.rows().iter().zip(shown) {
            assert_eq!(row.as_slice(), want.as_slice());
        }
    }

    #[test]
    fn askew_prepends_zero_row() {
        let cdm = cdm_build(5, true).unwrap();
        assert_eq!(cdm.row(0), &[0, 0, 0, 0, 0]);
        assert_eq!(cdm.n_rows(), 5);
        assert_eq!(cdm.generator(0), Some(0));
    }

    #[test]
    fn build_rejects_bad_primes() {
        assert!(matches!(cdm_build(9, false), Err(Error::NotOddPrime(9))));
        assert!(matches!(cdm_build(2, true), Err(Error::NotOddPrime(2))));
        assert!(cdm_build(3, false).is_err());
        assert!(cdm_build(3, true).is_ok());
    }

    #[test]
    fn family_verifies() {
        for p in [5, 7, 11, 13, 29] {
            for askew in [false, true] {
                assert!(
                    cdm_verify(&cdm_build(p, askew).unwrap()),
                    "p={p} askew={askew}"
                );
            }
        }
    }

    #[test]
    fn broken_matrices_fail_verification() {
        let dup = Cdm::new(5, vec![vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3, 4]], false).unwrap();
        assert!(!cdm_verify(&dup));

        let mut rows = cdm_build(7, false).unwrap().rows().to_vec();
        rows[2][3] = (rows[2][3] + 1) % 7;
        let perturbed = Cdm::new(7, rows, false).unwrap();
        assert!(!cdm_verify(&perturbed));
        assert!(matches!(expand(&perturbed), Err(Error::NotCdm(_))));
    }

    #[test]
    fn malformed_shapes_error() {
        assert!(Cdm::new(5, vec![vec![0, 1, 2]], false).is_err());
        assert!(Cdm::new(5, vec![vec![0, 1, 2, 3, 5]], false).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let cdm = cdm_build(7, true).unwrap();
        let text = cdm.to_text();
        assert!(text.starts_with("7 7 1\n0 0 0 0 0 0 0\n"));
        assert_eq!(Cdm::from_text(&text).unwrap(), cdm);
        assert!(Cdm::from_text("7 2 0\n0 1 2 3 4 5 6\n").is_err());
        assert!(Cdm::from_text("7 1 maybe\n0 1 2 3 4 5 6\n").is_err());
    }

    #[test]
    fn expansion_shape_and_weights() {
        let layers = expand(&cdm_build(7, false).unwrap()).unwrap();
        let stacked = BinMatrix::vstack(49, layers.iter().map(|l| &l.matrix)).unwrap();
        assert_eq!((stacked.n_rows(), stacked.n_cols()), (42, 49));
        for (k, layer) in layers.iter().enumerate() {
            assert_eq!(layer.tag.generator, Some(k as u32 + 1));
            assert!(layer.matrix.row_weights().iter().all(|&w| w == 7));
            assert!(layer.matrix.col_weights().iter().all(|&w| w == 1));
        }
    }

    #[test]
    fn zero_row_layer_is_identity_strip() {
        let layers = expand(&cdm_build(5, true).unwrap()).unwrap();
        let blocks: Vec<BinMatrix> = (0..5).map(|_| BinMatrix::identity(5)).collect();
        assert_eq!(layers[0].matrix, BinMatrix::hstack(&blocks).unwrap());
    }

    #[test]
    fn pairwise_row_intersections_p5() {
        let layers = expand(&cdm_build(5, true).unwrap()).unwrap();
        for (la, a) in layers.iter().enumerate() {
            for (lb, b) in layers.iter().enumerate() {
                for ra in 0..5 {
                    for rb in 0..5 {
                        let sa: Vec<usize> = a.matrix.row_ones(ra).collect();
                        let common = b.matrix.row_ones(rb).filter(|c| sa.contains(c)).count();
                        let want = match (la == lb, ra == rb) {
                            (true, true) => 5,
                            (true, false) => 0,
                            (false, _) => 1,
                        };
                        assert_eq!(common, want, "layers {la},{lb} rows {ra},{rb}");
                    }
                }
            }
        }
    }

    #[test]
    fn layer_ranks_follow_count() {
        let layers = expand(&cdm_build(5, false).unwrap()).unwrap();
        assert_eq!(
            (layers[0].matrix.n_rows(), layers[0].matrix.n_cols()),
            (5, 25)
        );
        assert_eq!(rank(&layers[0].matrix), 5);
        let two = BinMatrix::vstack(25, [&layers[0].matrix, &layers[1].matrix]).unwrap();
        assert_eq!(rank(&two), 9);
    }

    #[test]
    fn negation_witness() {
        for p in [5u32, 7, 11] {
            let layers = expand(&cdm_build(p, false).unwrap()).unwrap();
            let cols = negation_column_permutation(p);
            let rows = negation_row_permutation(p);
            for a in 1..p {
                let src = &layers[(a - 1) as usize].matrix;
                let dst = &layers[(p - a - 1) as usize].matrix;
                let mapped = src
                    .permute_columns(&cols)
                    .unwrap()
                    .permute_rows(&rows)
                    .unwrap();
                assert_eq!(&mapped, dst, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn shear_witness() {
        let p = 7;
        let layers = expand(&cdm_build(p, true).unwrap()).unwrap();
        for t in 0..p {
            let cols = shear_column_permutation(p, t);
            for a in 0..p {
                let mapped = layers[a as usize].matrix.permute_columns(&cols).unwrap();
                assert_eq!(mapped, layers[((a + p - t) % p) as usize].matrix);
            }
        }
    }
}
