//! Standard-library companion to `csrpoly-core`: Matrix Market file I/O,
//! the scaling benchmark harness, and the self-verification runner. The
//! `csrpoly` binary exposes all of it on the command line.

pub mod bench;
pub mod mm;
pub mod verify;
