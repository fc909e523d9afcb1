//! Short-cycle detection on the Tanner graph of a parity-check matrix.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::gf2::BinMatrix;

/// Girth class of a parity-check matrix, ordered from shortest cycle up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Four,
    Six,
    /// Cycles exist, none shorter than eight.
    AtLeastEight,
    /// The Tanner graph is a forest.
    Acyclic,
}

impl Girth {
    /// True when the matrix has no 4-cycles.
    pub fn is_four_cycle_free(self) -> bool {
        self != Girth::Four
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Girth::Four => "4",
            Girth::Six => "6",
            Girth::AtLeastEight => ">=8",
            Girth::Acyclic => "acyclic",
        })
    }
}

impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Whether some pair of rows shares two or more columns.
pub fn has_four_cycle(m: &BinMatrix) -> bool {
    (0..m.n_rows()).any(|a| {
        let ra = m.row_words(a);
        (a + 1..m.n_rows()).any(|b| {
            ra.iter()
                .zip(m.row_words(b))
                .map(|(x, y)| (x & y).count_ones())
                .sum::<u32>()
                >= 2
        })
    })
}

/// Whether three rows meet pairwise in three distinct columns. Only
/// meaningful on 4-cycle-free matrices, where any two rows share at most one
/// column.
fn has_six_cycle(rows: &[Vec<usize>], cols: &[Vec<usize>]) -> bool {
    // via[a] = column through which row `a` meets the current pivot row
    let mut via = vec![usize::MAX; rows.len()];
    for (b, row_b) in rows.iter().enumerate() {
        for &x in row_b {
            for &a in &cols[x] {
                if a != b {
                    via[a] = x;
                }
            }
        }
        for &x in row_b {
            for &a in cols[x].iter().filter(|&&a| a != b) {
                for &z in rows[a].iter().filter(|&&z| z != x) {
                    for &c in &cols[z] {
                        if c != a && c != b && via[c] != usize::MAX && via[c] != x {
                            return true;
                        }
                    }
                }
            }
        }
        for &x in row_b {
            for &a in &cols[x] {
                via[a] = usize::MAX;
            }
        }
    }
    false
}

fn has_any_cycle(m: &BinMatrix, rows: &[Vec<usize>]) -> bool {
    // Union-find over row nodes 0..n_rows and column nodes after them.
    let mut parent: Vec<usize> = (0..m.n_rows() + m.n_cols()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            let (a, b) = (find(&mut parent, r), find(&mut parent, m.n_rows() + c));
            if a == b {
                return true;
            }
            parent[a] = b;
        }
    }
    false
}

/// Girth class of `m`. A 4-cycle is a 2×2 all-ones submatrix; a 6-cycle a
/// 3×3 submatrix with every row and column weight exactly two.
pub fn girth(m: &BinMatrix) -> Girth {
    if has_four_cycle(m) {
        return Girth::Four;
    }
    let rows = m.row_supports();
    let cols = m.col_supports();
    if has_six_cycle(&rows, &cols) {
        Girth::Six
    } else if has_any_cycle(m, &rows) {
        Girth::AtLeastEight
    } else {
        Girth::Acyclic
    }
}
