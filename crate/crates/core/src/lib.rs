//! toricq: exact-arithmetic toolkit for smooth complete toric varieties.
//!
//! Pipeline: fan combinatorics ([`fan`]) -> divisor/curve bookkeeping
//! ([`picard`]) -> rational cohomology ring ([`cohomology`]) -> truncated
//! Laurent/Novikov series ([`series`]) -> I-function machinery with mirror
//! maps ([`ifunction`]). [`jsonio`] holds the byte-stable JSON interfaces
//! and [`cli`] the `toricq` command implementations.
//!
//! All coefficient arithmetic is exact (`BigRational`); lattice data is
//! `i64`. Nothing here ever rounds.

pub mod cli;
pub mod cohomology;
pub mod fan;
pub mod ifunction;
pub mod jsonio;
pub mod linalg;
pub mod picard;
pub mod series;
