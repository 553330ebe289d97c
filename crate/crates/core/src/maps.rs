//! Closed-form bijections between ordered column tuples and expanded column
//! indices.
//!
//! For an input width `D`, the degree-2 polynomial expansion has one output
//! column per pair `(i, j)` with `i <= j < D`, laid out in lexicographic
//! order; interaction mode drops the repeated indices (`i < j`). Degree 3
//! extends both to triples. Each map and its inverse evaluates in O(1) and
//! O(log D) respectively, using only triangle and tetrahedral numbers, so
//! expansion never materializes a combination table.

use crate::error::{Error, Result};
use crate::simplex::{tet_u128, tetrahedral, tri_u128, triangle};
use alloc::format;
use core::fmt;

/// Expansion degree. Degrees 2 and 3 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    Two,
    Three,
}

impl Degree {
    pub fn as_usize(self) -> usize {
        match self {
            Degree::Two => 2,
            Degree::Three => 3,
        }
    }
}

/// Whether repeated indices are admitted in a tuple.
///
/// `Polynomial` expands all combinations with repetition (`x_i * x_j` with
/// `i <= j`); `Interaction` keeps only distinct indices (`i < j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Polynomial,
    Interaction,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Polynomial => f.write_str("polynomial"),
            Mode::Interaction => f.write_str("interaction"),
        }
    }
}

/// One of the four supported expansions: degree 2 or 3, polynomial or
/// interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MappingKind {
    pub degree: Degree,
    pub mode: Mode,
}

impl MappingKind {
    pub const fn new(degree: Degree, mode: Mode) -> Self {
        MappingKind { degree, mode }
    }

    pub const POLY2: MappingKind = MappingKind::new(Degree::Two, Mode::Polynomial);
    pub const POLY3: MappingKind = MappingKind::new(Degree::Three, Mode::Polynomial);
    pub const INTER2: MappingKind = MappingKind::new(Degree::Two, Mode::Interaction);
    pub const INTER3: MappingKind = MappingKind::new(Degree::Three, Mode::Interaction);

    pub const ALL: [MappingKind; 4] = [
        MappingKind::POLY2,
        MappingKind::POLY3,
        MappingKind::INTER2,
        MappingKind::INTER3,
    ];

    /// The degree-2 kind with the same mode. Used for augmenting degree-3
    /// output with the pairwise block.
    pub const fn degree_two(self) -> MappingKind {
        MappingKind::new(Degree::Two, self.mode)
    }
}

impl fmt::Display for MappingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degree-{} {}", self.degree.as_usize(), self.mode)
    }
}

/// An ordered tuple of 2 or 3 input column indices naming one expanded
/// column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureTuple {
    len: u8,
    ix: [usize; 3],
}

impl FeatureTuple {
    pub fn pair(i: usize, j: usize) -> Self {
        FeatureTuple { len: 2, ix: [i, j, 0] }
    }

    pub fn triple(i: usize, j: usize, k: usize) -> Self {
        FeatureTuple { len: 3, ix: [i, j, k] }
    }

    pub fn degree(&self) -> Degree {
        match self.len {
            2 => Degree::Two,
            _ => Degree::Three,
        }
    }

    /// The tuple's indices, in order.
    pub fn indices(&self) -> &[usize] {
        &self.ix[..self.len as usize]
    }
}

impl fmt::Display for FeatureTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, ix) in self.indices().iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{ix}")?;
        }
        Ok(())
    }
}

/// Expanded column of the pair `(i, j)` with `i < j < n_cols`, interaction
/// layout.
///
/// Pairs are numbered lexicographically: with 4 columns, `(0,1) -> 0`,
/// `(0,2) -> 1`, ..., `(2,3) -> 5`. Row `i` starts after the
/// `T2(n_cols-1) - T2(n_cols-i-1)` pairs of all earlier rows.
pub fn map2_interaction(i: usize, j: usize, n_cols: usize) -> Result<usize> {
    if !(i < j && j < n_cols) {
        return Err(Error::Domain(format!(
            "pair ({i}, {j}) is not strictly increasing below {n_cols}"
        )));
    }
    let base = tri_u128((n_cols - 1) as u128) - tri_u128((n_cols - i - 1) as u128);
    to_index(base + (j - i - 1) as u128, "map2_interaction")
}

/// Expanded column of the pair `(i, j)` with `i <= j < n_cols`, polynomial
/// layout.
pub fn map2_polynomial(i: usize, j: usize, n_cols: usize) -> Result<usize> {
    if !(i <= j && j < n_cols) {
        return Err(Error::Domain(format!(
            "pair ({i}, {j}) is not non-decreasing below {n_cols}"
        )));
    }
    let base = tri_u128(n_cols as u128) - tri_u128((n_cols - i) as u128);
    to_index(base + (j - i) as u128, "map2_polynomial")
}

/// Expanded column of the triple `(i, j, k)` with `i < j < k < n_cols`,
/// interaction layout.
pub fn map3_interaction(i: usize, j: usize, k: usize, n_cols: usize) -> Result<usize> {
    if !(i < j && j < k && k < n_cols) {
        return Err(Error::Domain(format!(
            "triple ({i}, {j}, {k}) is not strictly increasing below {n_cols}"
        )));
    }
    // i <= n_cols - 3 here, so the simplex arguments cannot wrap.
    let base = tet_u128((n_cols - 2) as u128) - tet_u128((n_cols - i - 3) as u128)
        - tri_u128((n_cols - j - 1) as u128);
    to_index(base + (k - j - 1) as u128, "map3_interaction")
}

/// Expanded column of the triple `(i, j, k)` with `i <= j <= k < n_cols`,
/// polynomial layout.
pub fn map3_polynomial(i: usize, j: usize, k: usize, n_cols: usize) -> Result<usize> {
    if !(i <= j && j <= k && k < n_cols) {
        return Err(Error::Domain(format!(
            "triple ({i}, {j}, {k}) is not non-decreasing below {n_cols}"
        )));
    }
    let base = tet_u128(n_cols as u128) - tet_u128((n_cols - i - 1) as u128)
        - tri_u128((n_cols - j) as u128);
    to_index(base + (k - j) as u128, "map3_polynomial")
}

fn to_index(value: u128, what: &str) -> Result<usize> {
    usize::try_from(value).map_err(|_| Error::Overflow(format!("{what} result exceeds usize")))
}

/// Expanded column of `tuple` under `kind`. The tuple's length must match
/// the kind's degree.
pub fn forward_map(tuple: FeatureTuple, n_cols: usize, kind: MappingKind) -> Result<usize> {
    if tuple.degree() != kind.degree {
        return Err(Error::Domain(format!(
            "tuple ({tuple}) has the wrong length for a {kind} map"
        )));
    }
    let ix = tuple.indices();
    match (kind.degree, kind.mode) {
        (Degree::Two, Mode::Polynomial) => map2_polynomial(ix[0], ix[1], n_cols),
        (Degree::Two, Mode::Interaction) => map2_interaction(ix[0], ix[1], n_cols),
        (Degree::Three, Mode::Polynomial) => map3_polynomial(ix[0], ix[1], ix[2], n_cols),
        (Degree::Three, Mode::Interaction) => map3_interaction(ix[0], ix[1], ix[2], n_cols),
    }
}

/// Number of expanded columns produced by `kind` over `n_cols` input
/// columns: combinations of `K` columns with repetition (polynomial) or
/// without (interaction). Interaction kinds yield 0 when `n_cols < K`.
pub fn expanded_dim(n_cols: usize, kind: MappingKind) -> Result<usize> {
    combination_count(n_cols, kind)
}

/// Number of output entries generated for a row with `nnz` nonzeros: every
/// combination of `K` of its nonzero columns (with repetition for
/// polynomial mode) contributes one entry.
pub fn row_output_nnz(nnz: usize, kind: MappingKind) -> Result<usize> {
    combination_count(nnz, kind)
}

fn combination_count(n: usize, kind: MappingKind) -> Result<usize> {
    match (kind.degree, kind.mode) {
        (Degree::Two, Mode::Polynomial) => triangle(n),
        (Degree::Three, Mode::Polynomial) => tetrahedral(n),
        (Degree::Two, Mode::Interaction) => {
            if n < 2 {
                Ok(0)
            } else {
                triangle(n - 1)
            }
        }
        (Degree::Three, Mode::Interaction) => {
            if n < 3 {
                Ok(0)
            } else {
                tetrahedral(n - 2)
            }
        }
    }
}

/// Inverse of [`forward_map`]: recovers the tuple whose expanded column is
/// `col`. Costs O(log n_cols) via binary search over block starts.
pub fn invert_map(col: usize, n_cols: usize, kind: MappingKind) -> Result<FeatureTuple> {
    let dim = expanded_dim(n_cols, kind)?;
    if col >= dim {
        return Err(Error::Domain(format!(
            "column {col} is outside the {dim} expanded columns of a {kind} map over {n_cols} inputs"
        )));
    }
    let d = n_cols;
    let target = col as u128;
    let t2 = |n: usize| tri_u128(n as u128);
    let t3 = |n: usize| tet_u128(n as u128);
    match (kind.degree, kind.mode) {
        (Degree::Two, Mode::Polynomial) => {
            // Block of leading index i starts at f(i, i) = T2(d) - T2(d-i).
            let i = max_with_start_leq(0, d - 1, target, |m| t2(d) - t2(d - m));
            let j = i + (target - (t2(d) - t2(d - i))) as usize;
            Ok(FeatureTuple::pair(i, j))
        }
        (Degree::Two, Mode::Interaction) => {
            // Block of leading index i starts at f(i, i+1).
            let i = max_with_start_leq(0, d - 2, target, |m| t2(d - 1) - t2(d - m - 1));
            let j = i + 1 + (target - (t2(d - 1) - t2(d - i - 1))) as usize;
            Ok(FeatureTuple::pair(i, j))
        }
        (Degree::Three, Mode::Polynomial) => {
            // Outer block starts at f(i, i, i), inner at f(i, j, j).
            let i = max_with_start_leq(0, d - 1, target, |m| t3(d) - t3(d - m - 1) - t2(d - m));
            let j = max_with_start_leq(i, d - 1, target, |m| t3(d) - t3(d - i - 1) - t2(d - m));
            let k = j + (target - (t3(d) - t3(d - i - 1) - t2(d - j))) as usize;
            Ok(FeatureTuple::triple(i, j, k))
        }
        (Degree::Three, Mode::Interaction) => {
            // Outer block starts at f(i, i+1, i+2), inner at f(i, j, j+1).
            let i = max_with_start_leq(0, d - 3, target, |m| {
                t3(d - 2) - t3(d - m - 3) - t2(d - m - 2)
            });
            let j = max_with_start_leq(i + 1, d - 2, target, |m| {
                t3(d - 2) - t3(d - i - 3) - t2(d - m - 1)
            });
            let k = j + 1 + (target - (t3(d - 2) - t3(d - i - 3) - t2(d - j - 1))) as usize;
            Ok(FeatureTuple::triple(i, j, k))
        }
    }
}

/// Largest `m` in `[lo, hi]` with `start(m) <= target`. Requires
/// `start(lo) <= target` and `start` nondecreasing on the range.
fn max_with_start_leq<F: Fn(usize) -> u128>(
    mut lo: usize,
    mut hi: usize,
    target: u128,
    start: F,
) -> usize {
    debug_assert!(lo <= hi && start(lo) <= target);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if start(mid) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Iterator over all tuples of `kind` for `n_cols` input columns, in
/// lexicographic order, which is exactly ascending expanded-column order.
pub fn tuples(n_cols: usize, kind: MappingKind) -> TupleIter {
    let first = match (kind.degree, kind.mode) {
        (Degree::Two, Mode::Polynomial) if n_cols >= 1 => Some(FeatureTuple::pair(0, 0)),
        (Degree::Two, Mode::Interaction) if n_cols >= 2 => Some(FeatureTuple::pair(0, 1)),
        (Degree::Three, Mode::Polynomial) if n_cols >= 1 => Some(FeatureTuple::triple(0, 0, 0)),
        (Degree::Three, Mode::Interaction) if n_cols >= 3 => Some(FeatureTuple::triple(0, 1, 2)),
        _ => None,
    };
    TupleIter {
        n_cols,
        kind,
        upcoming: first,
    }
}

/// See [`tuples`].
#[derive(Debug, Clone)]
pub struct TupleIter {
    n_cols: usize,
    kind: MappingKind,
    upcoming: Option<FeatureTuple>,
}

impl Iterator for TupleIter {
    type Item = FeatureTuple;

    fn next(&mut self) -> Option<FeatureTuple> {
        let current = self.upcoming?;
        self.upcoming = self.advance(current);
        Some(current)
    }
}

impl TupleIter {
    fn advance(&self, t: FeatureTuple) -> Option<FeatureTuple> {
        let d = self.n_cols;
        let ix = t.indices();
        match (self.kind.degree, self.kind.mode) {
            (Degree::Two, Mode::Polynomial) => {
                let (i, j) = (ix[0], ix[1]);
                if j + 1 < d {
                    Some(FeatureTuple::pair(i, j + 1))
                } else if i + 1 < d {
                    Some(FeatureTuple::pair(i + 1, i + 1))
                } else {
                    None
                }
            }
            (Degree::Two, Mode::Interaction) => {
                let (i, j) = (ix[0], ix[1]);
                if j + 1 < d {
                    Some(FeatureTuple::pair(i, j + 1))
                } else if i + 2 < d {
                    Some(FeatureTuple::pair(i + 1, i + 2))
                } else {
                    None
                }
            }
            (Degree::Three, Mode::Polynomial) => {
                let (i, j, k) = (ix[0], ix[1], ix[2]);
                if k + 1 < d {
                    Some(FeatureTuple::triple(i, j, k + 1))
                } else if j + 1 < d {
                    Some(FeatureTuple::triple(i, j + 1, j + 1))
                } else if i + 1 < d {
                    Some(FeatureTuple::triple(i + 1, i + 1, i + 1))
                } else {
                    None
                }
            }
            (Degree::Three, Mode::Interaction) => {
                let (i, j, k) = (ix[0], ix[1], ix[2]);
                if k + 1 < d {
                    Some(FeatureTuple::triple(i, j, k + 1))
                } else if j + 2 < d {
                    Some(FeatureTuple::triple(i, j + 1, j + 2))
                } else if i + 3 < d {
                    Some(FeatureTuple::triple(i + 1, i + 2, i + 3))
                } else {
                    None
                }
            }
        }
    }
}
