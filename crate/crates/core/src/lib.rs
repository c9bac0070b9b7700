//! Totally elliptic representations of punctured-surface groups into PSL(2,R)
//! and PSL(2,C): geometry kernel, word combinatorics, certification,
//! triangle chains and the top-level classifier.

pub mod moebius;
pub mod surface;
pub mod rep;
pub mod chains;
pub mod complexify;
pub mod verdict;

/// Library version recorded in every artifact.
pub const VERSION: &str = concat!("totally-elliptic ", env!("CARGO_PKG_VERSION"));
