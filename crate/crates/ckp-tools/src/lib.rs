//! IO-side companion to ckp-core: reproducible instance generation, the
//! trivial-instance filter, LP-format model export, and a benchmark harness.
//! The `ckp` binary wires these behind a CLI.

#![forbid(unsafe_code)]

pub mod bench;
pub mod export;
pub mod gen;
pub mod trivial;
