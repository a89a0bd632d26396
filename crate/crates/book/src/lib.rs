//! Runs the guide's code listings as doc-tests: one module per chapter, so a
//! failure names the chapter it came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/fitting.md")]
pub mod fitting {}
#[doc = include_str!("../../../book/src/aec.md")]
pub mod aec_score {}
#[doc = include_str!("../../../book/src/linear_shap.md")]
pub mod linear_shap {}
#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
