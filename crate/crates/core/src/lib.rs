//! Exact desk-scale experiments on congruences with products of variables
//! from short intervals.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: factorization, totients, primitive roots and discrete-log tables.
//! * [`sets`]: intervals and dense residue sets with product, sum and dilation.
//! * [`chars`]: multiplicative characters, multiplicative energy and its
//!   character-sum identity.
//! * [`smooth`]: smooth-number counts and greedy splitting of smooth integers
//!   into bounded parts.
//! * [`growth`]: iterated product sets `A^n` in `Z_m^*`, subgroup detection and
//!   explicit representations.
//! * [`solver`]: exact solvability of `a x_1⋯x_6 + b x_7⋯x_13 ≡ c (mod p)` over
//!   boxes of intervals.
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; its code listings are compiled and run as doc-tests of this
//! crate.

pub mod arith;
pub mod chars;
pub mod error;
pub mod growth;
pub mod rng;
pub mod sets;
pub mod smooth;
pub mod solver;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub struct Intro;
    #[doc = include_str!("../../../book/src/residue-sets.md")]
    pub struct ResidueSets;
    #[doc = include_str!("../../../book/src/character-sums.md")]
    pub struct CharacterSums;
    #[doc = include_str!("../../../book/src/smooth-numbers.md")]
    pub struct SmoothNumbers;
    #[doc = include_str!("../../../book/src/subgroup-growth.md")]
    pub struct SubgroupGrowth;
    #[doc = include_str!("../../../book/src/solver.md")]
    pub struct Solver;
}
