use alloc::string::String;
use core::fmt;

/// Errors reported by matrix construction, index mapping, and expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The row pointer array is malformed: wrong length, nonzero start,
    /// decreasing entries, or a final entry disagreeing with the data length.
    Structure(String),
    /// A row or column index lies outside the matrix shape.
    Index(String),
    /// Column indices within a row are unsorted or duplicated.
    NonCanonical(String),
    /// An argument is outside its documented range.
    Argument(String),
    /// A size or index computation does not fit in the index type.
    Overflow(String),
    /// A tuple or expanded column is outside the domain of the requested map.
    Domain(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Structure(msg) => write!(f, "malformed row pointers: {msg}"),
            Error::Index(msg) => write!(f, "index out of bounds: {msg}"),
            Error::NonCanonical(msg) => write!(f, "non-canonical row: {msg}"),
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Overflow(msg) => write!(f, "size overflow: {msg}"),
            Error::Domain(msg) => write!(f, "outside mapping domain: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
