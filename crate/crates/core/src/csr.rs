//! CSR and dense matrix types, canonicalization, and reproducible random
//! generation.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sparse matrix in compressed sparse row form.
///
/// `row_ptr` has `n_rows + 1` entries; row `i` owns `col_indices[row_ptr[i]
/// .. row_ptr[i+1]]` and the matching slice of `values`. Canonical form is
/// enforced on construction: column indices strictly increase within each
/// row, so there are no duplicates. Stored values may be exactly 0.0 when a
/// caller supplies them through [`CsrMatrix::new`]; [`CsrMatrix::from_triplets`]
/// and [`CsrMatrix::from_dense`] never store zeros.
///
/// Instances are immutable after construction and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR parts, validating every invariant.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<CsrMatrix> {
        let m = CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_indices,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a canonical matrix from (row, col, value) triplets in any
    /// order. Duplicate cells are summed; cells whose sum is exactly 0.0
    /// are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<CsrMatrix> {
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Index(format!(
                    "triplet ({r}, {c}) outside a {n_rows} x {n_cols} matrix"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        // Row `open_row` is the one currently receiving entries; rows before
        // it already have their end boundary pushed.
        let mut open_row = 0;
        let mut pos = 0;
        while pos < sorted.len() {
            let (r, c, _) = sorted[pos];
            let mut sum = 0.0;
            while pos < sorted.len() && sorted[pos].0 == r && sorted[pos].1 == c {
                sum += sorted[pos].2;
                pos += 1;
            }
            if sum != 0.0 {
                while open_row < r {
                    row_ptr.push(col_indices.len());
                    open_row += 1;
                }
                col_indices.push(c);
                values.push(sum);
            }
        }
        while open_row < n_rows {
            row_ptr.push(col_indices.len());
            open_row += 1;
        }
        debug_assert_eq!(row_ptr.len(), n_rows + 1);
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_indices,
            values,
        })
    }

    /// Generates a matrix whose cells are independently nonzero with
    /// probability `density`, with values uniform in (0, 1].
    ///
    /// The generator is fixed so output is bit-identical across runs and
    /// platforms: ChaCha8 keyed by four successive SplitMix64 outputs of
    /// `seed` (little-endian), then, walking cells in row-major order, one
    /// inclusion draw per cell and one value draw per included cell. Each
    /// draw takes the top 53 bits of the next 64-bit word; inclusion
    /// compares a uniform [0, 1) value against `density`, so density 0
    /// keeps nothing and density 1 keeps everything, exactly.
    pub fn random(n_rows: usize, n_cols: usize, density: f64, seed: u64) -> Result<CsrMatrix> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::Argument(format!(
                "density must lie in [0, 1], got {density}"
            )));
        }
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let mut rng = ChaCha8Rng::from_seed(expand_seed(seed));
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for _ in 0..n_rows {
            for c in 0..n_cols {
                let include = (rng.next_u64() >> 11) as f64 * SCALE;
                if include < density {
                    let value = ((rng.next_u64() >> 11) + 1) as f64 * SCALE;
                    col_indices.push(c);
                    values.push(value);
                }
            }
            row_ptr.push(col_indices.len());
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_indices,
            values,
        })
    }

    /// Converts a dense matrix to canonical CSR, storing exactly the
    /// nonzero entries.
    pub fn from_dense(m: &DenseMatrix) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(m.n_rows() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..m.n_rows() {
            for (c, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_indices.len());
        }
        CsrMatrix {
            n_rows: m.n_rows(),
            n_cols: m.n_cols(),
            row_ptr,
            col_indices,
            values,
        }
    }

    /// Materializes the full dense form. Fails only when `n_rows * n_cols`
    /// does not fit in the index type.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let total = self.n_rows.checked_mul(self.n_cols).ok_or_else(|| {
            Error::Overflow(format!(
                "dense {} x {} entry count exceeds usize",
                self.n_rows, self.n_cols
            ))
        })?;
        let mut entries = vec![0.0; total];
        for i in 0..self.n_rows {
            let base = i * self.n_cols;
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                entries[base + c] = v;
            }
        }
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        })
    }

    /// Checks every representation invariant, in the order structure,
    /// index range, canonical ordering.
    pub fn validate(&self) -> Result<()> {
        if self.row_ptr.len() != self.n_rows + 1 {
            return Err(Error::Structure(format!(
                "row_ptr has {} entries, expected {}",
                self.row_ptr.len(),
                self.n_rows + 1
            )));
        }
        if self.row_ptr[0] != 0 {
            return Err(Error::Structure(format!(
                "row_ptr starts at {}, expected 0",
                self.row_ptr[0]
            )));
        }
        if self.row_ptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Structure("row_ptr is not non-decreasing".into()));
        }
        let nnz = self.row_ptr[self.n_rows];
        if nnz != self.col_indices.len() || self.col_indices.len() != self.values.len() {
            return Err(Error::Structure(format!(
                "row_ptr ends at {nnz} but there are {} column indices and {} values",
                self.col_indices.len(),
                self.values.len()
            )));
        }
        for i in 0..self.n_rows {
            let row = &self.col_indices[self.row_ptr[i]..self.row_ptr[i + 1]];
            let mut prev: Option<usize> = None;
            for &c in row {
                if c >= self.n_cols {
                    return Err(Error::Index(format!(
                        "row {i} references column {c}, but n_cols is {}",
                        self.n_cols
                    )));
                }
                if let Some(p) = prev {
                    if c <= p {
                        return Err(Error::NonCanonical(format!(
                            "row {i} columns are not strictly increasing ({p} then {c})"
                        )));
                    }
                }
                prev = Some(c);
            }
        }
        Ok(())
    }

    /// Assembles a matrix from parts already known to satisfy the
    /// invariants (expansion output is canonical by construction).
    pub(crate) fn from_parts_unchecked(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> CsrMatrix {
        let m = CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_indices,
            values,
        };
        debug_assert!(m.validate().is_ok());
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        assert!(i < self.n_rows, "row {i} out of {}", self.n_rows);
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_indices[span.clone()], &self.values[span])
    }

    /// Number of stored entries in row `i`.
    pub fn row_nnz(&self, i: usize) -> usize {
        assert!(i < self.n_rows, "row {i} out of {}", self.n_rows);
        self.row_ptr[i + 1] - self.row_ptr[i]
    }
}

/// Row-major dense matrix. Used by the dense baseline and the oracle path.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps a row-major entry buffer. The buffer length must equal
    /// `n_rows * n_cols`.
    pub fn from_entries(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<DenseMatrix> {
        let expected = n_rows.checked_mul(n_cols).ok_or_else(|| {
            Error::Overflow(format!("dense {n_rows} x {n_cols} entry count exceeds usize"))
        })?;
        if entries.len() != expected {
            return Err(Error::Structure(format!(
                "entry buffer has {} values, expected {expected}",
                entries.len()
            )));
        }
        Ok(DenseMatrix {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        assert!(i < self.n_rows, "row {i} out of {}", self.n_rows);
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(j < self.n_cols, "column {j} out of {}", self.n_cols);
        self.row(i)[j]
    }
}

/// Expands a 64-bit seed into a ChaCha8 key with four SplitMix64 steps.
fn expand_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
