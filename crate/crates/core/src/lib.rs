//! Generalized convex hulls with respect to function families, computed through the
//! feature (Gelfand) embedding and LP separation, together with exhaustion functions,
//! polygon exhaustions and completeness witnesses on discretized domains.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod certify;
pub mod chain;
pub mod cli;
pub mod error;
pub mod exhaustion;
pub mod families;
pub mod gelfand;
pub mod grid;
pub mod hull;
pub mod lp;
pub mod output;
pub mod scenario;

pub use error::{Error, Result};
pub use families::{BasisFunction, Dim, FunctionFamily, Point, Structure};
