//! Device and circuit models for antiferromagnetic tunnel junction (AFMTJ)
//! memory: coupled-sublattice magnetization dynamics, the bitline RC
//! network, behavioral peripheral circuits and the Monte Carlo reliability
//! machinery. Pure computation only; file formats and the command line
//! live in the companion `afmtj` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod circuit;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod montecarlo;
pub mod peripherals;
pub mod vec3;
pub mod waveform;

pub use error::{Error, Result};
pub use vec3::{UnitVector3, Vec3};

/// A stored bit. `Zero` is the parallel (low resistance) state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn flipped(self) -> Bit {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}
