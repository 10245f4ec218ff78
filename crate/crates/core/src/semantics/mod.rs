//! Reduction semantics over normal forms.
//!
//! ```
//! use spi_core::semantics::{explore_seeded, redexes};
//! use spi_core::surface::parse_process;
//!
//! let p = parse_process("sessions k; k?(x).k!(x + 1).0 | k!(41).k?(y).0").unwrap();
//! assert_eq!(redexes(&p).len(), 1);
//! let run = explore_seeded(&p, 10, 0);
//! assert_eq!(run.len(), 2);
//! assert!(run.last.to_string() == "0");
//! ```

mod eval;
mod explore;
mod reduce;
mod trace;

pub use eval::{eval_expr, EvalError};
pub use explore::{explore_all, explore_bounded, explore_seeded, Exploration, State};
pub(crate) use reduce::redexes_of;
pub use reduce::{redexes, step, Redex, RuleTag, StepError};
pub use trace::{Trace, TraceRecord};
