//! Concrete syntax: the `.spi` file format, its parser and printer.

mod error;
mod lexer;
mod parser;
mod printer;

pub use error::{ParseError, ParseErrorKind};
pub use lexer::KEYWORDS;
pub use parser::{parse_process, parse_source, parse_type, SourceFile};
pub use printer::{
    print_expr, print_process, print_service_env, print_session_env, print_sort, print_source,
    print_type,
};
