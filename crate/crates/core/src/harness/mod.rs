//! Graph families, JSON interchange, experiment sweeps and plotting.

pub mod document;
pub mod generators;
pub mod sweep;
