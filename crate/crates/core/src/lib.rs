#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod eigen;
pub mod error;
pub mod groups;
pub mod machines;
pub mod measures;
pub mod spectra;
pub mod tree;
pub mod walks;
pub mod words;
pub mod zeta;

pub use error::{Error, Result};
