//! CM forms, Hecke characters and the explicit constants of a p-adic
//! triple-product L-function, at desk scale.

pub mod arith;
pub mod quadfield;
pub mod numfield;
pub mod padic;
pub mod heckechar;
pub mod exec;
pub mod qexp;
pub mod petersson;
pub mod localint;
pub mod fixture;
