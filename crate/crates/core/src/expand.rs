//! Feature expansion: sparse two-pass construction and the dense baseline.
//!
//! The sparse path walks each row's nonzeros with `K` nested loops, placing
//! every product directly at its expanded column through the closed-form
//! maps; a first pass computes exact per-row entry counts so the output
//! buffers are allocated once and never grow. The dense path
//! ([`expand_dense`]) instead walks all column combinations with a running
//! counter and never consults the maps, which is what makes it usable as an
//! independent oracle for the sparse path.

use crate::csr::{CsrMatrix, DenseMatrix};
use crate::error::{Error, Result};
use crate::maps::{expanded_dim, invert_map, row_output_nnz, Degree, FeatureTuple, MappingKind, Mode};
use crate::simplex::{tet_u128, tri_u128};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// What to expand and which blocks to emit.
///
/// The output column layout is, left to right: an optional bias column
/// (all ones), the original columns when lower degrees are included, the
/// degree-2 block when the degree is 3 and lower degrees are included, and
/// finally the degree-K block. Omitting lower degrees yields the bare
/// degree-K block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionSpec {
    kind: MappingKind,
    include_lower_degrees: bool,
    include_bias: bool,
}

impl ExpansionSpec {
    /// A bias column without the lower-degree blocks would leave column
    /// semantics ambiguous, so `include_bias` requires
    /// `include_lower_degrees`.
    pub fn new(kind: MappingKind, include_lower_degrees: bool, include_bias: bool) -> Result<Self> {
        if include_bias && !include_lower_degrees {
            return Err(Error::Argument(
                "include_bias requires include_lower_degrees".into(),
            ));
        }
        Ok(ExpansionSpec {
            kind,
            include_lower_degrees,
            include_bias,
        })
    }

    /// Only the degree-K block, no augmentation.
    pub fn degree_only(kind: MappingKind) -> Self {
        ExpansionSpec {
            kind,
            include_lower_degrees: false,
            include_bias: false,
        }
    }

    pub fn kind(&self) -> MappingKind {
        self.kind
    }

    pub fn include_lower_degrees(&self) -> bool {
        self.include_lower_degrees
    }

    pub fn include_bias(&self) -> bool {
        self.include_bias
    }
}

/// Multiplication counts from one expansion run.
///
/// `products` counts the entry-producing multiplications in the degree-K
/// block: one per emitted entry, `C(nnz+K-1, K)` (polynomial) or
/// `C(nnz, K)` (interaction) for a row with `nnz` stored entries.
/// `augment_products` counts the same for the degree-2 augmentation block
/// emitted when a degree-3 expansion includes lower degrees; it stays 0
/// otherwise. Bias and copied linear entries multiply nothing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExpandStats {
    pub products: u64,
    pub augment_products: u64,
}

/// Column layout of the expanded matrix for one (n_cols, spec) choice.
struct Layout {
    bias_cols: usize,
    linear_off: usize,
    linear_cols: usize,
    pair_off: usize,
    pair_cols: usize,
    top_off: usize,
    top_cols: usize,
    total: usize,
}

impl Layout {
    fn new(n_cols: usize, spec: ExpansionSpec) -> Result<Layout> {
        let overflow = || Error::Overflow(format!("expanded width for {n_cols} columns exceeds usize"));
        let bias_cols = spec.include_bias as usize;
        let linear_cols = if spec.include_lower_degrees { n_cols } else { 0 };
        let pair_cols = if spec.include_lower_degrees && spec.kind.degree == Degree::Three {
            expanded_dim(n_cols, spec.kind.degree_two())?
        } else {
            0
        };
        let top_cols = expanded_dim(n_cols, spec.kind)?;
        let linear_off = bias_cols;
        let pair_off = linear_off.checked_add(linear_cols).ok_or_else(overflow)?;
        let top_off = pair_off.checked_add(pair_cols).ok_or_else(overflow)?;
        let total = top_off.checked_add(top_cols).ok_or_else(overflow)?;
        Ok(Layout {
            bias_cols,
            linear_off,
            linear_cols,
            pair_off,
            pair_cols,
            top_off,
            top_cols,
            total,
        })
    }

    /// Entries a row with `nnz` stored values contributes to each block.
    fn row_entries(&self, nnz: usize, spec: ExpansionSpec) -> Result<usize> {
        let overflow = || Error::Overflow("expanded row entry count exceeds usize".into());
        let mut count = self.bias_cols;
        if self.linear_cols > 0 {
            count = count.checked_add(nnz).ok_or_else(overflow)?;
        }
        if self.pair_cols > 0 {
            let pairs = row_output_nnz(nnz, spec.kind.degree_two())?;
            count = count.checked_add(pairs).ok_or_else(overflow)?;
        }
        let top = row_output_nnz(nnz, spec.kind)?;
        count.checked_add(top).ok_or_else(overflow)
    }
}

/// Expands `m` according to `spec`. Output is canonical CSR; no dense
/// intermediate is formed and each output entry is placed in O(1).
pub fn expand(m: &CsrMatrix, spec: ExpansionSpec) -> Result<CsrMatrix> {
    expand_with_stats(m, spec).map(|(out, _)| out)
}

/// [`expand`] plus multiplication counts.
pub fn expand_with_stats(m: &CsrMatrix, spec: ExpansionSpec) -> Result<(CsrMatrix, ExpandStats)> {
    let d = m.n_cols();
    let lay = Layout::new(d, spec)?;

    let mut row_ptr = Vec::with_capacity(m.n_rows() + 1);
    row_ptr.push(0usize);
    let mut total = 0usize;
    for i in 0..m.n_rows() {
        let count = lay.row_entries(m.row_nnz(i), spec)?;
        total = total
            .checked_add(count)
            .ok_or_else(|| Error::Overflow("expanded nnz exceeds usize".into()))?;
        row_ptr.push(total);
    }

    let mut cols = Vec::with_capacity(total);
    let mut vals = Vec::with_capacity(total);
    let mut stats = ExpandStats::default();
    for i in 0..m.n_rows() {
        let (ci, vi) = m.row(i);
        if lay.bias_cols > 0 {
            cols.push(0);
            vals.push(1.0);
        }
        if lay.linear_cols > 0 {
            for (&c, &v) in ci.iter().zip(vi) {
                cols.push(lay.linear_off + c);
                vals.push(v);
            }
        }
        if lay.pair_cols > 0 {
            fill_pairs(
                ci,
                vi,
                d,
                spec.kind.mode,
                lay.pair_off,
                &mut cols,
                &mut vals,
                &mut stats.augment_products,
            );
        }
        match spec.kind.degree {
            Degree::Two => fill_pairs(
                ci,
                vi,
                d,
                spec.kind.mode,
                lay.top_off,
                &mut cols,
                &mut vals,
                &mut stats.products,
            ),
            Degree::Three => fill_triples(
                ci,
                vi,
                d,
                spec.kind.mode,
                lay.top_off,
                &mut cols,
                &mut vals,
                &mut stats.products,
            ),
        }
        debug_assert_eq!(cols.len(), row_ptr[i + 1]);
    }

    let out = CsrMatrix::from_parts_unchecked(m.n_rows(), lay.total, row_ptr, cols, vals);
    Ok((out, stats))
}

/// Emits the degree-2 products of one row at `offset`, in lexicographic
/// tuple order. Column placement inlines the pair maps: the per-leading-
/// index base is hoisted out of the inner loop, which then only adds.
#[allow(clippy::too_many_arguments)]
fn fill_pairs(
    ci: &[usize],
    vi: &[f64],
    d: usize,
    mode: Mode,
    offset: usize,
    cols: &mut Vec<usize>,
    vals: &mut Vec<f64>,
    products: &mut u64,
) {
    // Bounded by a successful Layout computation, so the casts cannot
    // truncate.
    let t2 = |n: usize| tri_u128(n as u128) as usize;
    match mode {
        Mode::Polynomial => {
            for (a, (&ja, &va)) in ci.iter().zip(vi).enumerate() {
                let pre = offset + t2(d) - t2(d - ja);
                for (&jb, &vb) in ci[a..].iter().zip(&vi[a..]) {
                    cols.push(pre + jb - ja);
                    vals.push(va * vb);
                    *products += 1;
                }
            }
        }
        Mode::Interaction => {
            for (a, (&ja, &va)) in ci.iter().zip(vi).enumerate() {
                let pre = offset + t2(d - 1) - t2(d - ja - 1);
                for (&jb, &vb) in ci[a + 1..].iter().zip(&vi[a + 1..]) {
                    cols.push(pre + jb - ja - 1);
                    vals.push(va * vb);
                    *products += 1;
                }
            }
        }
    }
}

/// Degree-3 analogue of [`fill_pairs`]: tetrahedral base per leading index,
/// triangular base per middle index, and a pure add in the innermost loop.
#[allow(clippy::too_many_arguments)]
fn fill_triples(
    ci: &[usize],
    vi: &[f64],
    d: usize,
    mode: Mode,
    offset: usize,
    cols: &mut Vec<usize>,
    vals: &mut Vec<f64>,
    products: &mut u64,
) {
    let t2 = |n: usize| tri_u128(n as u128) as usize;
    let t3 = |n: usize| tet_u128(n as u128) as usize;
    let n = ci.len();
    match mode {
        Mode::Polynomial => {
            for a in 0..n {
                let (ja, va) = (ci[a], vi[a]);
                let head = offset + t3(d) - t3(d - ja - 1);
                for b in a..n {
                    let (jb, vab) = (ci[b], va * vi[b]);
                    let pre = head - t2(d - jb);
                    for (&jc, &vc) in ci[b..].iter().zip(&vi[b..]) {
                        cols.push(pre + jc - jb);
                        vals.push(vab * vc);
                        *products += 1;
                    }
                }
            }
        }
        Mode::Interaction => {
            // A triple needs two positions after `a`, so rows with fewer
            // than 3 entries emit nothing and `d - ja - 3` cannot wrap.
            for a in 0..n.saturating_sub(2) {
                let (ja, va) = (ci[a], vi[a]);
                let head = offset + t3(d - 2) - t3(d - ja - 3);
                for b in (a + 1)..(n - 1) {
                    let (jb, vab) = (ci[b], va * vi[b]);
                    let pre = head - t2(d - jb - 1);
                    for (&jc, &vc) in ci[b + 1..].iter().zip(&vi[b + 1..]) {
                        cols.push(pre + jc - jb - 1);
                        vals.push(vab * vc);
                        *products += 1;
                    }
                }
            }
        }
    }
}

/// Dense expansion: walks every column combination per row with a running
/// output counter. Baseline for benchmarks and the oracle for [`expand`];
/// it never touches the index maps, so the two paths agree only if the
/// maps match the enumeration order.
pub fn expand_dense(m: &DenseMatrix, spec: ExpansionSpec) -> Result<DenseMatrix> {
    let d = m.n_cols();
    let lay = Layout::new(d, spec)?;
    let total = m.n_rows().checked_mul(lay.total).ok_or_else(|| {
        Error::Overflow(format!(
            "dense {} x {} expansion exceeds usize",
            m.n_rows(),
            lay.total
        ))
    })?;
    let mut entries = vec![0.0; total];
    for i in 0..m.n_rows() {
        let row = m.row(i);
        let out = &mut entries[i * lay.total..(i + 1) * lay.total];
        let mut q = 0;
        if lay.bias_cols > 0 {
            out[q] = 1.0;
            q += 1;
        }
        if lay.linear_cols > 0 {
            out[q..q + d].copy_from_slice(row);
            q += d;
        }
        if lay.pair_cols > 0 {
            q = dense_pairs(row, spec.kind.mode, out, q);
        }
        q = match spec.kind.degree {
            Degree::Two => dense_pairs(row, spec.kind.mode, out, q),
            Degree::Three => dense_triples(row, spec.kind.mode, out, q),
        };
        debug_assert_eq!(q, lay.total);
    }
    DenseMatrix::from_entries(m.n_rows(), lay.total, entries)
}

fn dense_pairs(row: &[f64], mode: Mode, out: &mut [f64], mut q: usize) -> usize {
    let d = row.len();
    let skip = match mode {
        Mode::Polynomial => 0,
        Mode::Interaction => 1,
    };
    for j1 in 0..d {
        for j2 in (j1 + skip)..d {
            out[q] = row[j1] * row[j2];
            q += 1;
        }
    }
    q
}

fn dense_triples(row: &[f64], mode: Mode, out: &mut [f64], mut q: usize) -> usize {
    let d = row.len();
    let skip = match mode {
        Mode::Polynomial => 0,
        Mode::Interaction => 1,
    };
    for j1 in 0..d {
        for j2 in (j1 + skip)..d {
            let p = row[j1] * row[j2];
            for v3 in &row[j2 + skip..] {
                out[q] = p * v3;
                q += 1;
            }
        }
    }
    q
}

/// What an expanded column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureName {
    /// The all-ones bias column.
    Bias,
    /// A copy of the input column with this index.
    Input(usize),
    /// The product of the input columns named by the tuple.
    Product(FeatureTuple),
}

/// Name of every expanded column, in column order: position `q` describes
/// column `q` of [`expand`]'s output for the same `(n_cols, spec)`.
pub fn feature_names(n_cols: usize, spec: ExpansionSpec) -> Result<Vec<FeatureName>> {
    let lay = Layout::new(n_cols, spec)?;
    let mut names = Vec::with_capacity(lay.total);
    if lay.bias_cols > 0 {
        names.push(FeatureName::Bias);
    }
    for c in 0..lay.linear_cols {
        names.push(FeatureName::Input(c));
    }
    for q in 0..lay.pair_cols {
        names.push(FeatureName::Product(invert_map(
            q,
            n_cols,
            spec.kind.degree_two(),
        )?));
    }
    for q in 0..lay.top_cols {
        names.push(FeatureName::Product(invert_map(q, n_cols, spec.kind)?));
    }
    debug_assert_eq!(names.len(), lay.total);
    Ok(names)
}
