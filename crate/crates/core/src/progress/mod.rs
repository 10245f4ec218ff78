//! Type inhabitation, partner construction and the bounded progress check.
//!
//! ```
//! use spi_core::progress::inhabit;
//! use spi_core::surface::parse_type;
//! use spi_core::syntax::Chan;
//!
//! let ty = parse_type("?[int].![bool].end").unwrap();
//! let (p, _) = inhabit(&ty, &Chan::free("k"));
//! assert_eq!(p.to_string(), "k?(x).k!(true).0");
//! ```

mod certify;
mod inhabit;
mod partner;

pub use certify::{
    check_progress, check_progress_bounded, Certificate, Counterexample, Decomposition,
    FailedCondition, Inconclusive, InconclusiveReason, ProgressVerdict, MAX_STATES,
};
pub use inhabit::{canonical_value, inhabit, inhabit_avoiding};
pub use partner::{construct_partner, PartnerError};
