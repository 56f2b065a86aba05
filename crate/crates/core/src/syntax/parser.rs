//! Surface grammar:
//!
//! ```text
//! formula  := iff
//! iff      := imp ("<->" imp)*
//! imp      := or ("->" imp)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | ("exists" | "forall") VAR+ "." formula | primary
//! primary  := "true" | "false" | "(" formula ")" | atom | term ("=" | "!=") term
//! ```
//!
//! Uppercase (or `_`) identifiers are variables, lowercase ones symbols.
//! A leading `?` makes the input a question.

use super::formula::{Formula, Question};
use super::signature::{is_reserved_symbol, Rigidity, Signature};
use super::term::{Term, Var};
use crate::error::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Symbol(String),
    Variable(String),
    Number(usize),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    Equals,
    NotEquals,
    Question,
    Slash,
}

impl std::fmt::Display for TokenKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TokenKind::Symbol(s) | TokenKind::Variable(s) => write!(f, "`{s}`"),
            TokenKind::Number(n) => write!(f, "`{n}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Tilde => f.write_str("`~`"),
            TokenKind::Amp => f.write_str("`&`"),
            TokenKind::Bar => f.write_str("`|`"),
            TokenKind::Arrow => f.write_str("`->`"),
            TokenKind::DoubleArrow => f.write_str("`<->`"),
            TokenKind::Equals => f.write_str("`=`"),
            TokenKind::NotEquals => f.write_str("`!=`"),
            TokenKind::Question => f.write_str("`?`"),
            TokenKind::Slash => f.write_str("`/`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

/// Tokenizes `text`; `%` starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        let push = |kind, out: &mut Vec<Token>| out.push(Token { kind, line: tl, column: tc });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                push(TokenKind::LParen, &mut out);
                advance(1, &mut i, &mut col);
            }
            ')' => {
                push(TokenKind::RParen, &mut out);
                advance(1, &mut i, &mut col);
            }
            ',' => {
                push(TokenKind::Comma, &mut out);
                advance(1, &mut i, &mut col);
            }
            '.' => {
                push(TokenKind::Dot, &mut out);
                advance(1, &mut i, &mut col);
            }
            '~' => {
                push(TokenKind::Tilde, &mut out);
                advance(1, &mut i, &mut col);
            }
            '&' => {
                push(TokenKind::Amp, &mut out);
                advance(1, &mut i, &mut col);
            }
            '|' => {
                push(TokenKind::Bar, &mut out);
                advance(1, &mut i, &mut col);
            }
            '?' => {
                push(TokenKind::Question, &mut out);
                advance(1, &mut i, &mut col);
            }
            '/' => {
                push(TokenKind::Slash, &mut out);
                advance(1, &mut i, &mut col);
            }
            '=' => {
                push(TokenKind::Equals, &mut out);
                advance(1, &mut i, &mut col);
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                push(TokenKind::NotEquals, &mut out);
                advance(2, &mut i, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(TokenKind::Arrow, &mut out);
                advance(2, &mut i, &mut col);
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(TokenKind::DoubleArrow, &mut out);
                advance(3, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let n = s.parse().map_err(|_| ParseError {
                    line: tl,
                    column: tc,
                    kind: ParseErrorKind::Invalid(format!("number `{s}` out of range")),
                })?;
                push(TokenKind::Number(n), &mut out);
            }
            c if c.is_alphabetic() || c == '_' || c == '$' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                while i < chars.len() && chars[i] == '\'' {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let kind = if c.is_uppercase() || c == '_' { TokenKind::Variable(s) } else { TokenKind::Symbol(s) };
                push(kind, &mut out);
            }
            other => {
                return Err(ParseError { line: tl, column: tc, kind: ParseErrorKind::BadCharacter(other) });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Admit generated names (`$sk0`, `p'`, `_G1`); used when re-reading
    /// engine output.
    pub allow_reserved: bool,
}

/// Recursive-descent parser over a token slice. Symbols are declared in the
/// signature as they are encountered.
pub struct FormulaParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    sig: &'a mut Signature,
    opts: ParseOptions,
}

impl<'a> FormulaParser<'a> {
    pub fn new(tokens: &'a [Token], sig: &'a mut Signature, opts: ParseOptions) -> Self {
        FormulaParser { tokens, pos: 0, sig, opts }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn next_token(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = match self.tokens.get(self.pos).or(self.tokens.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        };
        ParseError { line, column, kind }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(tok) => {
                self.error_here(ParseErrorKind::Unexpected { found: tok.to_string(), expected: expected.to_string() })
            }
            None => self.error_here(ParseErrorKind::UnexpectedEof(expected.to_string())),
        }
    }

    pub fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&kind.to_string()))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn check_reserved(&self, name: &str, is_var: bool) -> Result<(), ParseError> {
        if self.opts.allow_reserved {
            return Ok(());
        }
        let reserved = if is_var { name.starts_with('_') } else { is_reserved_symbol(name) };
        if reserved {
            Err(self.error_here(ParseErrorKind::ReservedSymbol(name.to_string())))
        } else {
            Ok(())
        }
    }

    /// Parses a formula without renaming bound variables.
    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        self.iff()
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while self.eat(&TokenKind::DoubleArrow) {
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&TokenKind::Arrow) {
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&TokenKind::Bar) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(TokenKind::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(TokenKind::Symbol(s)) if s == "exists" || s == "forall" => {
                let universal = s == "forall";
                self.pos += 1;
                let mut vars = Vec::new();
                loop {
                    match self.peek() {
                        Some(TokenKind::Variable(v)) => {
                            let v = v.clone();
                            self.check_reserved(&v, true)?;
                            self.pos += 1;
                            vars.push(Var::new(v));
                            self.eat(&TokenKind::Comma);
                        }
                        _ if !vars.is_empty() => break,
                        _ => return Err(self.unexpected("a variable")),
                    }
                }
                self.expect(TokenKind::Dot)?;
                let body = self.formula()?;
                Ok(if universal { Formula::forall_many(&vars, body) } else { Formula::exists_many(&vars, body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(TokenKind::Symbol(s)) if s == "true" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(TokenKind::Symbol(s)) if s == "false" => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(TokenKind::RParen)?;
                Ok(f)
            }
            Some(TokenKind::Variable(_)) => {
                let lhs = self.term()?;
                self.equality_rest(lhs)
            }
            Some(TokenKind::Symbol(name)) => {
                let start = self.pos;
                self.check_reserved(&name, false)?;
                self.pos += 1;
                let args = if self.peek() == Some(&TokenKind::LParen) { self.arguments()? } else { Vec::new() };
                if matches!(self.peek(), Some(TokenKind::Equals | TokenKind::NotEquals)) {
                    // The symbol was a term after all.
                    self.pos = start;
                    let lhs = self.term()?;
                    return self.equality_rest(lhs);
                }
                self.sig.declare_predicate(&name, args.len()).map_err(|e| self.error_at(start, e.into()))?;
                Ok(Formula::Atom(name.into(), args))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        let t = &self.tokens[pos.min(self.tokens.len().saturating_sub(1))];
        ParseError { line: t.line, column: t.column, kind }
    }

    fn equality_rest(&mut self, lhs: Term) -> Result<Formula, ParseError> {
        if self.eat(&TokenKind::Equals) {
            Ok(Formula::Equal(lhs, self.term()?))
        } else if self.eat(&TokenKind::NotEquals) {
            Ok(Formula::not(Formula::Equal(lhs, self.term()?)))
        } else {
            Err(self.unexpected("`=` after a term"))
        }
    }

    fn arguments(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(TokenKind::LParen)?;
        let mut args = vec![self.term()?];
        while self.eat(&TokenKind::Comma) {
            args.push(self.term()?);
        }
        self.expect(TokenKind::RParen)?;
        Ok(args)
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(TokenKind::Variable(v)) => {
                self.check_reserved(&v, true)?;
                self.pos += 1;
                Ok(Term::var(v))
            }
            Some(TokenKind::Symbol(name)) if name != "exists" && name != "forall" => {
                let start = self.pos;
                self.check_reserved(&name, false)?;
                self.pos += 1;
                let args = if self.peek() == Some(&TokenKind::LParen) { self.arguments()? } else { Vec::new() };
                self.sig
                    .declare_function(&name, args.len(), Rigidity::NonRigid)
                    .map_err(|e| self.error_at(start, e.into()))?;
                Ok(Term::App(name.into(), args))
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

/// Result of [`parse`]: a plain formula, or a question when the input starts
/// with `?`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Formula(Formula),
    Question(Question),
}

/// Parses `text`, declaring new symbols in `sig`. Bound variables are renamed
/// apart.
pub fn parse(text: &str, sig: &mut Signature) -> Result<Parsed, ParseError> {
    parse_with(text, sig, ParseOptions::default())
}

pub fn parse_with(text: &str, sig: &mut Signature, opts: ParseOptions) -> Result<Parsed, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = FormulaParser::new(&tokens, sig, opts);
    let question = p.eat(&TokenKind::Question);
    let f = p.formula()?.rename_bound_apart();
    if !p.at_end() {
        return Err(p.unexpected("end of input"));
    }
    Ok(if question { Parsed::Question(Question::new(f)) } else { Parsed::Formula(f) })
}

/// Parses a formula; a leading `?` is rejected.
pub fn parse_formula(text: &str, sig: &mut Signature) -> Result<Formula, ParseError> {
    match parse(text, sig)? {
        Parsed::Formula(f) => Ok(f),
        Parsed::Question(_) => Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::Invalid("expected a formula, found a question".into()),
        }),
    }
}

/// Parses a question; the leading `?` is optional.
pub fn parse_question(text: &str, sig: &mut Signature) -> Result<Question, ParseError> {
    match parse(text, sig)? {
        Parsed::Question(q) => Ok(q),
        Parsed::Formula(f) => Ok(Question::new(f)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s, &mut Signature::new()).unwrap()
    }

    fn atom(name: &str, args: &[&str]) -> Formula {
        Formula::atom(
            name,
            args.iter()
                .map(|a| if a.chars().next().unwrap().is_uppercase() { Term::var(*a) } else { Term::constant(*a) })
                .collect(),
        )
    }

    #[test]
    fn disjunction_desugars_to_core() {
        let f = p("(p(a) & p(c)) | (p(b) & p(c))");
        let expected = Formula::not(Formula::and(
            Formula::not(Formula::and(atom("p", &["a"]), atom("p", &["c"]))),
            Formula::not(Formula::and(atom("p", &["b"]), atom("p", &["c"]))),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn constants() {
        assert_eq!(p("true"), Formula::Top);
        assert_eq!(p("false"), Formula::Bottom);
    }

    #[test]
    fn question_free_variables() {
        let Parsed::Question(q) = parse("? p(X)", &mut Signature::new()).unwrap() else { panic!() };
        assert_eq!(q.body(), &atom("p", &["X"]));
        assert_eq!(q.free_vars(), &[Var::new("X")]);
    }

    #[test]
    fn precedence() {
        assert_eq!(
            p("~p & q | r"),
            Formula::or(Formula::and(Formula::not(atom("p", &[])), atom("q", &[])), atom("r", &[]))
        );
        assert_eq!(
            p("p -> q -> r"),
            Formula::implies(atom("p", &[]), Formula::implies(atom("q", &[]), atom("r", &[])))
        );
        assert_eq!(p("p | q <-> r"), Formula::iff(Formula::or(atom("p", &[]), atom("q", &[])), atom("r", &[])));
    }

    #[test]
    fn quantifier_extends_right() {
        let f = p("exists X. p(X) & q(X)");
        assert_eq!(f, Formula::exists(Var::new("X"), Formula::and(atom("p", &["X"]), atom("q", &["X"]))));
    }

    #[test]
    fn equality_and_terms() {
        let f = p("f(X) = c");
        assert_eq!(f, Formula::Equal(Term::app("f", vec![Term::var("X")]), Term::constant("c")));
        assert_eq!(p("X != Y"), Formula::not(Formula::Equal(Term::var("X"), Term::var("Y"))));
    }

    #[test]
    fn bound_variables_are_renamed_apart() {
        let f = p("p(X) & exists X. q(X) & exists X. r(X)");
        let mut binders = Vec::new();
        f.visit(&mut |g| {
            if let Formula::Exists(v, _) = g {
                binders.push(v.clone());
            }
        });
        assert_eq!(binders.len(), 2);
        assert!(!binders.contains(&Var::new("X")));
        assert_ne!(binders[0], binders[1]);
        assert_eq!(f.free_variables(), vec![Var::new("X")]);
    }

    #[test]
    fn arity_mismatch_is_reported_with_position() {
        let err = parse_formula("p(a) & p(a, b)", &mut Signature::new()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Signature(_)));
        assert_eq!((err.line, err.column), (1, 8));
    }

    #[test]
    fn predicate_function_clash() {
        assert!(parse_formula("p(p)", &mut Signature::new()).is_err());
    }

    #[test]
    fn reserved_symbols_rejected() {
        let err = parse_formula("p'(a)", &mut Signature::new()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ReservedSymbol(_)));
        assert!(parse_formula("p($sk0)", &mut Signature::new()).is_err());
        assert!(parse_formula("p(_G1)", &mut Signature::new()).is_err());
        let ok = parse_with("p'($sk0)", &mut Signature::new(), ParseOptions { allow_reserved: true });
        assert!(ok.is_ok());
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_formula("p(a) &\n  & q", &mut Signature::new()).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }
}
