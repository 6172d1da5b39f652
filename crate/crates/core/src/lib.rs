//! Exact q-series arithmetic for half-integral weight forms with eta
//! multiplier: Hecke operators, the Shimura lift, congruence criteria and a
//! finite-group model of the relevant `SL₂(F_ℓ)` facts.

pub mod arith;
pub mod characters;
pub mod criteria;
pub mod hecke;
pub mod multiplier;
pub mod par;
pub mod qexp;
pub mod selftest;
pub mod shimura;
pub mod sl2;
