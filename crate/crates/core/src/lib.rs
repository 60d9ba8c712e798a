//! Exact weighted-basket arithmetic for terminal 3-fold singularities.
//!
//! The crate evaluates Reid's Riemann–Roch formula on weighted baskets,
//! explores prime packings, synthesizes `B^(5)` baskets from plurigenus data,
//! runs the numeric birationality-bound calculus and drives the scenario
//! searches that produce candidate basket lists. Everything is exact rational
//! arithmetic.

pub mod b5;
pub mod basket;
pub mod bounds;
pub mod classify;
pub mod error;
pub mod manifest;
pub mod packing;
pub mod rational;

pub use basket::{
    cartier_index, k3, l_pair, normalize_pair, plurigenus, Basket, Pair, ValidateOptions,
    ValidityReport, WeightedBasket,
};
pub use error::{Error, Result};
pub use rational::Rational;
