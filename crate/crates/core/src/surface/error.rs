use super::lexer::Pos;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError {
            line: pos.line,
            col: pos.col,
            kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    BadChar(char),
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("unknown escape `\\{0}`")]
    BadEscape(char),
    #[error("integer literal out of range")]
    IntOverflow,
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("`{0}` is a session channel, but a service or variable is expected here")]
    SessionInServicePosition(String),
    #[error("`{0}` is a service or variable, but a session channel is expected here")]
    ServiceInSessionPosition(String),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("`{0}` is declared twice")]
    DuplicateDeclaration(String),
}
