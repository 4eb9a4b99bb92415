//! Exact toolkit for the colored knapsack problem: pick a subset of colored
//! items with maximum total profit and weight at most `b`, such that the
//! picked items can be lined up with no two adjacent items of the same color.
//!
//! The crate is `no_std` (with `alloc`); the `std` feature only adds
//! `std::error::Error` impls for the error types.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dp1;
pub mod dp2;
pub mod kp;
pub mod lp;
pub mod model;
pub mod oracle;

mod sweep;
