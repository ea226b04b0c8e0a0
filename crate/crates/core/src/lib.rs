//! Rank and select on static bit vectors with worst-case constant query time.
//!
//! The index has two halves:
//!
//! - a *summary tree* ([`summary`]) of cache-line sized L1-blocks (and
//!   optionally L2-blocks) that answers `rank` directly and `select` inside a
//!   single superblock, at 512 bits per L1-block (0.78 % of the input for
//!   2048-bit L0-blocks);
//! - a *sample tree* per bit value that narrows a `select` query down to at
//!   most `alpha` superblocks. [`sample3`] is the three-level bit-compressed
//!   tree; [`sample2`] is the two-level baseline.
//!
//! [`RankSelect`] combines both behind one interface. Everything in this crate
//! is `no_std` (it needs `alloc`); file formats, instance generators and the
//! benchmark CLI live in the `rs3-cli` crate.
//!
//! Select ranks are 0-based: `select1(0)` is the position of the first 1-bit.
//!
//! ```
//! use rs3::{BitVector, Preset, RankSelect, RsConfig};
//!
//! let bits: BitVector = (0..10_000).map(|i| i % 3 == 0).collect();
//! let rs = RankSelect::build(bits, RsConfig::preset(Preset::Robust)).unwrap();
//! assert_eq!(rs.rank1(9).unwrap(), 3);
//! assert_eq!(rs.select1(2).unwrap(), 6);
//! assert_eq!(rs.select0(0).unwrap(), 1);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bitcore;
mod error;
pub mod oracle;
pub mod rankselect;
pub mod sample2;
pub mod sample3;
pub mod summary;

pub use bitcore::{Bit, BitVector, PackedArray};
pub use error::Error;
pub use rankselect::{
    APolicy, Part, Preset, RankSelect, RsConfig, SelectIndex, SpaceReport, TreeKind,
};
pub use sample3::{SampleLevel, SelectTrace};
pub use summary::SummaryTree;

pub type Result<T, E = Error> = core::result::Result<T, E>;
