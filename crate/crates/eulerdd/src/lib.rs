//! File formats, parallel sweeps and the `eulerdd` command line on top of
//! [`eulerdd_core`].
//!
//! | extension | contents |
//! |-----------|----------|
//! | `.bf`     | a Boolean function, as a formula or a satisfying set |
//! | `.tid`    | a tuple-independent database |
//! | `.ddc`    | a circuit over the facts of a database |
//! | `.trace`  | a sequence of rewrite steps |

pub mod bf;
pub mod cli;
pub mod ddc;
mod error;
pub mod par;
pub mod selftest;
pub mod tid;
pub mod trace;

pub use error::FormatError;
pub use eulerdd_core as core;
