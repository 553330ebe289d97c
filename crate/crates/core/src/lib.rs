//! Polynomial and interaction feature expansion for sparse matrices in CSR
//! form, without densifying the input or the output.
//!
//! Expanding a matrix with `D` input columns to degree `K` conceptually
//! produces one output column per combination of `K` input columns
//! (combinations with repetition for polynomial mode, without repetition for
//! interaction mode). The expanded column for a combination is located with a
//! closed-form bijection built from triangle and tetrahedral numbers, so each
//! nonzero output entry costs O(1) to place and a row with `d` nonzeros costs
//! O(d^K) regardless of the total column count. A dense counter-walk
//! expansion ([`expand_dense`]) is provided as an independent baseline; it
//! never consults the index maps.
//!
//! The crate is `no_std` (it allocates through `alloc`) and requires a
//! 64-bit `usize`. All size and index arithmetic that can overflow is
//! checked and reported as [`Error::Overflow`].

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod csr;
mod error;
mod expand;
mod maps;
mod simplex;

pub use csr::{CsrMatrix, DenseMatrix};
pub use error::{Error, Result};
pub use expand::{
    expand, expand_dense, expand_with_stats, feature_names, ExpandStats, ExpansionSpec,
    FeatureName,
};
pub use maps::{
    expanded_dim, forward_map, invert_map, map2_interaction, map2_polynomial, map3_interaction,
    map3_polynomial, row_output_nnz, tuples, Degree, FeatureTuple, MappingKind, Mode, TupleIter,
};
pub use simplex::{binomial, tetrahedral, triangle};

const _: () = assert!(
    usize::BITS >= 64,
    "csrpoly-core requires a 64-bit usize for its index arithmetic"
);
