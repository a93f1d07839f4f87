//! Block designs for comparing test treatments with a control.
//!
//! Build designs ([`design`]), compute their information matrices
//! ([`info`]), score them ([`criteria`]), construct and recognize optimal
//! families ([`constructors`]), and certify optimality claims by exhaustive
//! enumeration on small instances ([`oracle`]).

pub mod cli;
pub mod constructors;
pub mod criteria;
pub mod design;
pub mod error;
pub mod info;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod scalar;

pub use criteria::{evaluate, Criterion, CriterionValue};
pub use design::{AnyDesign, ApproximateDesign, BlockDesign, ExactDesign};
pub use error::{Error, Result};
pub use scalar::{Rational, Value};
