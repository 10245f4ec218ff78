//! Abstract syntax: names, expressions, session types, processes and
//! environments.

mod alpha;
mod env;
mod expr;
mod names;
mod process;
mod types;

pub use alpha::{alpha_equivalent, alpha_key, alpha_key_opaque};
pub use env::{DuplicateBinding, Entry, ServiceEnv, SessionEnv};
pub use expr::{BinOp, Expr, Value};
pub use names::{Chan, Label, Name, Var, RESERVED_PREFIX};
pub use process::Process;
pub use types::{Basic, Payload, SessionType, Sort};
