//! Planar pushing with anisotropic surface friction and the dynamics of an
//! automated push / drag-back data-collection loop.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod collection;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod friction;
pub mod geometry;
pub mod io;
pub mod pipeline;

pub use error::{Error, Result};
