use std::collections::BTreeSet;

use super::error::{ParseError, ParseErrorKind};
use super::lexer::{tokenize, Pos, Tok};
use crate::syntax::{
    Basic, BinOp, Chan, Expr, Label, Payload, Process, ServiceEnv, SessionType, Sort, Var,
};

/// A parsed `.spi` file: declared free sessions, the service environment and
/// the process body.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub sessions: Vec<Chan>,
    pub env: ServiceEnv,
    pub process: Process,
}

/// Parses a complete source file (header, environment block, process).
pub fn parse_source(text: &str) -> Result<SourceFile, ParseError> {
    let mut p = Parser::new(text)?;
    let file = p.source_file()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(file)
}

/// Parses a source file and returns only its process.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    parse_source(text).map(|f| f.process)
}

pub fn parse_type(text: &str) -> Result<SessionType, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.session_type()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(t)
}

#[derive(Clone, Debug)]
enum Binding {
    Session(Chan),
    Bound(Var),
    Service(Var),
    Basic(Var),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    scope: Vec<(String, Binding)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.at + n).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError::new(
            self.pos(),
            ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().describe(),
            },
        ))
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    /// Accepts `>` or the first half of `>>`.
    fn expect_gt(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Gt => {
                self.bump();
                Ok(())
            }
            Tok::Shr => {
                self.toks[self.at].0 = Tok::Gt;
                self.toks[self.at].1.col += 1;
                Ok(())
            }
            _ => self.unexpected("`>`"),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => self.unexpected(what),
        }
    }

    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
    }

    fn session(&mut self) -> PResult<Chan> {
        let (name, pos) = self.ident("a session channel")?;
        match self.lookup(&name) {
            Some(Binding::Session(k)) => Ok(k.clone()),
            Some(_) => Err(ParseError::new(
                pos,
                ParseErrorKind::ServiceInSessionPosition(name),
            )),
            None => Err(ParseError::new(pos, ParseErrorKind::Undeclared(name))),
        }
    }

    fn service(&mut self) -> PResult<Var> {
        let (name, pos) = self.ident("a service name")?;
        self.service_named(name, pos)
    }

    fn service_named(&self, name: String, pos: Pos) -> PResult<Var> {
        match self.lookup(&name) {
            Some(Binding::Bound(x) | Binding::Service(x) | Binding::Basic(x)) => Ok(x.clone()),
            Some(Binding::Session(_)) => Err(ParseError::new(
                pos,
                ParseErrorKind::SessionInServicePosition(name),
            )),
            None => Err(ParseError::new(pos, ParseErrorKind::Undeclared(name))),
        }
    }

    fn with_session<T>(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Self, &Chan) -> PResult<T>,
    ) -> PResult<(Chan, T)> {
        let k = Chan::fresh(name);
        self.scope
            .push((name.to_string(), Binding::Session(k.clone())));
        let r = f(self, &k);
        self.scope.pop();
        Ok((k, r?))
    }

    fn source_file(&mut self) -> PResult<SourceFile> {
        let mut declared = BTreeSet::new();
        let mut sessions = Vec::new();
        if self.eat(&Tok::Sessions) {
            loop {
                let (name, pos) = self.ident("a session channel name")?;
                if !declared.insert(name.clone()) {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::DuplicateDeclaration(name),
                    ));
                }
                let k = Chan::free(&name);
                self.scope.push((name, Binding::Session(k.clone())));
                sessions.push(k);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Semi, "`;`")?;
        }
        let mut env = ServiceEnv::new();
        if self.eat(&Tok::Env) {
            while matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Colon {
                let (name, pos) = self.ident("a name")?;
                self.bump();
                if !declared.insert(name.clone()) {
                    return Err(ParseError::new(
                        pos,
                        ParseErrorKind::DuplicateDeclaration(name),
                    ));
                }
                let x = Var::free(&name);
                let sort = self.sort()?;
                let binding = match &sort {
                    Sort::Service(_) => Binding::Service(x.clone()),
                    Sort::Basic(_) => Binding::Basic(x.clone()),
                };
                self.scope.push((name, binding));
                env.insert(x, sort).expect("declared names are unique");
                self.expect(Tok::Semi, "`;`")?;
            }
        }
        let process = self.par()?;
        Ok(SourceFile {
            sessions,
            env,
            process,
        })
    }

    fn par(&mut self) -> PResult<Process> {
        let mut p = self.unit()?;
        while self.eat(&Tok::Bar) {
            let q = self.unit()?;
            p = Process::par(p, q);
        }
        Ok(p)
    }

    fn cont(&mut self) -> PResult<Process> {
        if self.eat(&Tok::Dot) {
            self.unit()
        } else {
            Ok(Process::Inact)
        }
    }

    fn unit(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Int(0) => {
                self.bump();
                Ok(Process::Inact)
            }
            Tok::LParen => {
                self.bump();
                let p = self.par()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Tok::New => {
                self.bump();
                let mut names = vec![self.ident("a session channel name")?.0];
                while self.eat(&Tok::Comma) {
                    names.push(self.ident("a session channel name")?.0);
                }
                self.expect(Tok::Dot, "`.`")?;
                self.restricted(&names)
            }
            Tok::If => {
                self.bump();
                let guard = self.expr()?;
                self.expect(Tok::Then, "`then`")?;
                let then = self.unit()?;
                self.expect(Tok::Else, "`else`")?;
                let other = self.unit()?;
                Ok(Process::cond(guard, then, other))
            }
            Tok::Star => {
                self.bump();
                let a = self.service()?;
                self.expect(Tok::LParen, "`(`")?;
                let (name, _) = self.ident("a session channel name")?;
                self.expect(Tok::RParen, "`)`")?;
                let (k, body) = self.with_session(&name, |p, _| p.cont())?;
                Ok(Process::rep_serv(&a, &k, body))
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                match self.peek_at(1) {
                    Tok::LParen => {
                        self.bump();
                        let a = self.service_named(name, pos)?;
                        self.bump();
                        let (kname, _) = self.ident("a session channel name")?;
                        self.expect(Tok::RParen, "`)`")?;
                        let (k, body) = self.with_session(&kname, |p, _| p.cont())?;
                        Ok(Process::serv(&a, &k, body))
                    }
                    Tok::Lt => {
                        self.bump();
                        let a = self.service_named(name, pos)?;
                        self.bump();
                        let (kname, _) = self.ident("a session channel name")?;
                        self.expect_gt()?;
                        let (k, body) = self.with_session(&kname, |p, _| p.cont())?;
                        Ok(Process::request(&a, &k, body))
                    }
                    Tok::Question | Tok::Bang | Tok::Shr | Tok::Shl => self.session_prefix(),
                    _ => {
                        self.bump();
                        self.unexpected("`(`, `<`, `?`, `!`, `>>` or `<<`")
                    }
                }
            }
            _ => self.unexpected("a process"),
        }
    }

    fn restricted(&mut self, names: &[String]) -> PResult<Process> {
        match names.split_first() {
            None => self.unit(),
            Some((first, rest)) => {
                let (k, body) = self.with_session(first, |p, _| p.restricted(rest))?;
                Ok(Process::restrict(&k, body))
            }
        }
    }

    fn session_prefix(&mut self) -> PResult<Process> {
        let k = self.session()?;
        match self.bump() {
            Tok::Question => {
                self.expect(Tok::LParen, "`(`")?;
                if self.eat(&Tok::LParen) {
                    let (name, _) = self.ident("a session channel name")?;
                    self.expect(Tok::RParen, "`)`")?;
                    self.expect(Tok::RParen, "`)`")?;
                    let (b, body) = self.with_session(&name, |p, _| p.cont())?;
                    Ok(Process::input_s(&k, &b, body))
                } else {
                    let (name, _) = self.ident("a variable name")?;
                    self.expect(Tok::RParen, "`)`")?;
                    let x = Var::fresh(&name);
                    self.scope.push((name, Binding::Bound(x.clone())));
                    let body = self.cont();
                    self.scope.pop();
                    Ok(Process::input(&k, &x, body?))
                }
            }
            Tok::Bang => {
                self.expect(Tok::LParen, "`(`")?;
                if let (Tok::LParen, Tok::Ident(name), Tok::RParen, Tok::RParen) = (
                    self.peek(),
                    self.peek_at(1),
                    self.peek_at(2),
                    self.peek_at(3),
                ) {
                    if let Some(Binding::Session(sent)) = self.lookup(name) {
                        let sent = sent.clone();
                        for _ in 0..4 {
                            self.bump();
                        }
                        let body = self.cont()?;
                        return Ok(Process::delegate(&k, &sent, body));
                    }
                }
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let body = self.cont()?;
                Ok(Process::output(&k, e, body))
            }
            Tok::Shr => {
                self.expect(Tok::LBrace, "`{`")?;
                let mut arms: Vec<(Label, Process)> = Vec::new();
                loop {
                    let (l, pos) = self.ident("a label")?;
                    if arms.iter().any(|(m, _)| m.as_str() == l) {
                        return Err(ParseError::new(pos, ParseErrorKind::DuplicateLabel(l)));
                    }
                    self.expect(Tok::Colon, "`:`")?;
                    let p = self.par()?;
                    arms.push((Label::new(l), p));
                    if !self.eat(&Tok::Comma) || self.peek() == &Tok::RBrace {
                        break;
                    }
                }
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Process::Branch { chan: k, arms })
            }
            Tok::Shl => {
                let (l, _) = self.ident("a label")?;
                let body = self.cont()?;
                Ok(Process::select(&k, l, body))
            }
            _ => unreachable!("guarded by the caller"),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.cmp_expr()?;
        while self.eat(&Tok::AndAnd) {
            let r = self.cmp_expr()?;
            e = Expr::bin(BinOp::And, e, r);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let e = self.add_expr()?;
        let op = match self.peek() {
            Tok::Le => BinOp::Le,
            Tok::EqEq => BinOp::Eq,
            _ => return Ok(e),
        };
        self.bump();
        let r = self.add_expr()?;
        Ok(Expr::bin(op, e, r))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            let r = self.mul_expr()?;
            e = Expr::bin(op, e, r);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut e = self.unary_expr()?;
        while self.eat(&Tok::Star) {
            let r = self.unary_expr()?;
            e = Expr::bin(BinOp::Mul, e, r);
        }
        Ok(e)
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Not) {
            return Ok(Expr::negate(self.unary_expr()?));
        }
        self.atom_expr()
    }

    fn atom_expr(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                i64::try_from(n)
                    .map(Expr::int)
                    .map_err(|_| ParseError::new(pos, ParseErrorKind::IntOverflow))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        0i64.checked_sub_unsigned(n)
                            .map(Expr::int)
                            .ok_or(ParseError::new(pos, ParseErrorKind::IntOverflow))
                    }
                    _ => self.unexpected("an integer literal"),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::str(s))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::bool(false))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match self.lookup(&name) {
                    Some(Binding::Bound(x) | Binding::Basic(x)) => Ok(Expr::var(x)),
                    Some(Binding::Service(a)) => Ok(Expr::service(a)),
                    Some(Binding::Session(_)) => Err(ParseError::new(
                        pos,
                        ParseErrorKind::SessionInServicePosition(name),
                    )),
                    None => Err(ParseError::new(pos, ParseErrorKind::Undeclared(name))),
                }
            }
            _ => self.unexpected("an expression"),
        }
    }

    fn sort(&mut self) -> PResult<Sort> {
        if let Some(b) = self.basic() {
            return Ok(Sort::Basic(b));
        }
        self.expect(Tok::Lt, "a sort")?;
        let t = self.session_type()?;
        self.expect_gt()?;
        Ok(Sort::Service(t))
    }

    fn basic(&mut self) -> Option<Basic> {
        let b = match self.peek() {
            Tok::IntTy => Basic::Int,
            Tok::BoolTy => Basic::Bool,
            Tok::StringTy => Basic::Str,
            _ => return None,
        };
        self.bump();
        Some(b)
    }

    fn payload(&mut self) -> PResult<Payload> {
        if let Some(b) = self.basic() {
            return Ok(Payload::Basic(b));
        }
        if self.eat(&Tok::Lt) {
            let t = self.session_type()?;
            self.expect_gt()?;
            return Ok(Payload::Service(t));
        }
        Ok(Payload::Session(self.session_type()?))
    }

    fn type_cont(&mut self) -> PResult<SessionType> {
        if self.eat(&Tok::Dot) {
            self.session_type()
        } else {
            Ok(SessionType::End)
        }
    }

    fn session_type(&mut self) -> PResult<SessionType> {
        match self.peek() {
            Tok::End => {
                self.bump();
                Ok(SessionType::End)
            }
            Tok::LParen => {
                self.bump();
                let t = self.session_type()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Question | Tok::Bang => {
                let input = self.bump() == Tok::Question;
                self.expect(Tok::LBracket, "`[`")?;
                let p = self.payload()?;
                self.expect(Tok::RBracket, "`]`")?;
                let cont = self.type_cont()?;
                Ok(if input {
                    SessionType::input(p, cont)
                } else {
                    SessionType::output(p, cont)
                })
            }
            Tok::Amp | Tok::Plus => {
                let branch = self.bump() == Tok::Amp;
                self.expect(Tok::LBrace, "`{`")?;
                let mut arms = std::collections::BTreeMap::new();
                loop {
                    let (l, pos) = self.ident("a label")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let t = self.session_type()?;
                    if arms.insert(Label::new(&l), t).is_some() {
                        return Err(ParseError::new(pos, ParseErrorKind::DuplicateLabel(l)));
                    }
                    if !self.eat(&Tok::Comma) || self.peek() == &Tok::RBrace {
                        break;
                    }
                }
                self.expect(Tok::RBrace, "`}`")?;
                Ok(if branch {
                    SessionType::Branch(arms)
                } else {
                    SessionType::Select(arms)
                })
            }
            _ => self.unexpected("a session type"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_output() {
        let p = parse_process("sessions k; k!(5).0").unwrap();
        assert_eq!(
            p,
            Process::output(&Chan::free("k"), Expr::int(5), Process::Inact)
        );
    }

    #[test]
    fn duplicate_label_is_rejected() {
        let e = parse_process("sessions k; k >> { ok: 0, ok: 0 }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateLabel("ok".into()));
        assert_eq!((e.line, e.col), (1, 27));
    }

    #[test]
    fn undeclared_free_session() {
        let e = parse_process("k!(5).0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Undeclared("k".into()));
    }

    #[test]
    fn sort_clash_is_rejected() {
        let e = parse_process("sessions k; env a : <end>; a<a>.0 | k!(a)").unwrap();
        // The request binder shadows `a` as a session; the free `a` stays a service.
        let _ = e;
        let e = parse_process("sessions k; k<k>.0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::SessionInServicePosition("k".into()));
        let e = parse_process("env a : <end>; a!(1)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ServiceInSessionPosition("a".into()));
    }

    #[test]
    fn buy_type() {
        let t = parse_type("![int].&{ok: ![string].end, stop: end}").unwrap();
        let expected = SessionType::output(
            Payload::Basic(Basic::Int),
            SessionType::branch([
                (
                    "ok",
                    SessionType::output(Payload::Basic(Basic::Str), SessionType::End),
                ),
                ("stop", SessionType::End),
            ]),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn nested_session_payload() {
        let t = parse_type("?[?[int].![int].end].![int].end").unwrap();
        let inner = SessionType::input(
            Payload::Basic(Basic::Int),
            SessionType::output(Payload::Basic(Basic::Int), SessionType::End),
        );
        let expected = SessionType::input(
            Payload::Session(inner),
            SessionType::output(Payload::Basic(Basic::Int), SessionType::End),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn service_sort_closing_angles() {
        let t = parse_type("?[<![<end>].end>]").unwrap();
        let inner = SessionType::output(Payload::Service(SessionType::End), SessionType::End);
        assert_eq!(
            t,
            SessionType::input(Payload::Service(inner), SessionType::End)
        );
    }

    #[test]
    fn delegation_vs_parenthesised_output() {
        let src = "sessions k, k'; env x : int; k!((k')).0 | k!((x)).0";
        let p = parse_process(src).unwrap();
        let (k, k2) = (Chan::free("k"), Chan::free("k'"));
        let x = Var::free("x");
        assert_eq!(
            p,
            Process::par(
                Process::delegate(&k, &k2, Process::Inact),
                Process::output(&k, Expr::var(&x), Process::Inact)
            )
        );
    }

    #[test]
    fn binders_are_fresh_and_scoped() {
        let p = parse_process("env a : <?[int].end>; a(k).k?(x).0 | a(k).0").unwrap();
        let Process::Par(l, r) = p else { panic!() };
        let (Process::Serv { chan: k1, .. }, Process::Serv { chan: k2, .. }) = (*l, *r) else {
            panic!()
        };
        assert_ne!(k1, k2);
        assert_eq!(k1.text(), "k");
    }

    #[test]
    fn expression_precedence() {
        let p = parse_process("sessions k; k!(1 + 2 * 3 <= 7 && not true).0").unwrap();
        let Process::Output { expr, .. } = p else {
            panic!()
        };
        let expected = Expr::bin(
            BinOp::And,
            Expr::bin(
                BinOp::Le,
                Expr::bin(
                    BinOp::Add,
                    Expr::int(1),
                    Expr::bin(BinOp::Mul, Expr::int(2), Expr::int(3)),
                ),
                Expr::int(7),
            ),
            Expr::negate(Expr::bool(true)),
        );
        assert_eq!(expr, expected);
    }
}
