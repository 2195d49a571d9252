//! Conventional strategies for the Mean King's problem.
//!
//! A physicist prepares a `d`-level state, the king measures it in one of
//! `d + 1` mutually unbiased bases, the physicist measures in a basis of her
//! own, learns which basis the king used, and guesses his outcome. This crate
//! evaluates and optimizes that guessing probability, encodes two strategies
//! that beat the bound `(2 sqrt(d) + d - 1) / (sqrt(d) (d + 1))` once claimed
//! for all inputs, and certifies that the bound does hold when the input is
//! itself a MUB vector.

pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod linalg;
pub mod mub;
pub mod search;
pub mod strategy;

pub use error::{Error, Result};
pub use linalg::{Basis, Ket, Operator, C64};
pub use mub::MubFamily;
