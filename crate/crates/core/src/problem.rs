//! Problem files: line-based declarations ending in `.`, `%` comments.
//!
//! ```text
//! rigid a, b, f/2.
//! axiom (p(a) & p(c)) | (p(b) & p(c)).
//! context forall X. (i(X) <-> p(X)).
//! question p(X).
//! common i(X).
//! conjecture p(a).
//! ```

use std::path::Path;

use crate::error::{ParseError, ParseErrorKind, ProblemError};
use crate::syntax::{
    alpha_eq, tokenize, Formula, FormulaParser, ParseOptions, Question, Rigidity, Signature, Token, TokenKind,
};

#[derive(Clone, Debug, Default)]
pub struct Problem {
    pub sig: Signature,
    pub axioms: Vec<Formula>,
    /// Conjunction of all `context` statements.
    pub context: Option<Formula>,
    pub questions: Vec<Question>,
    pub common: Vec<Question>,
    pub conjecture: Option<Formula>,
}

/// The common-ground questions followed by those of `phi` not already among
/// them.
pub fn fold_common_ground(theta: &[Question], phi: &[Question]) -> Vec<Question> {
    let mut out: Vec<Question> = Vec::new();
    for q in theta.iter().chain(phi) {
        if !out.iter().any(|o| alpha_eq(o.body(), q.body())) {
            out.push(q.clone());
        }
    }
    out
}

impl Problem {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProblemError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
        Problem::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let tokens = tokenize(text)?;
        let mut problem = Problem::default();
        let mut pos = 0;
        while pos < tokens.len() {
            let keyword = match &tokens[pos].kind {
                TokenKind::Symbol(s) => s.clone(),
                other => return Err(at(&tokens[pos], format!("expected a declaration keyword, found {other}")).into()),
            };
            pos += 1;
            if keyword == "rigid" {
                pos = problem.rigid(&tokens, pos)?;
                continue;
            }
            let mut parser = FormulaParser::new(&tokens[pos..], &mut problem.sig, ParseOptions::default());
            let is_question = parser.peek() == Some(&TokenKind::Question);
            if is_question {
                parser.next_token();
            }
            let f = parser.formula()?.rename_bound_apart();
            parser.expect(TokenKind::Dot)?;
            let start = pos;
            pos += parser.position();
            let closed = |what: &str| -> Result<(), ProblemError> {
                if f.is_closed() {
                    Ok(())
                } else {
                    Err(at(&tokens[start], format!("{what} must be closed: {f}")).into())
                }
            };
            if is_question && !matches!(keyword.as_str(), "question" | "common" | "conjecture") {
                return Err(at(&tokens[start], format!("`?` is not allowed in {keyword}")).into());
            }
            match keyword.as_str() {
                "axiom" => {
                    closed("axiom")?;
                    problem.axioms.push(f);
                }
                "context" => {
                    closed("context")?;
                    problem.context = Some(match problem.context.take() {
                        Some(c) => Formula::and(c, f),
                        None => f,
                    });
                }
                "question" => problem.questions.push(Question::new(f)),
                "common" => problem.common.push(Question::new(f)),
                "conjecture" => {
                    if problem.conjecture.is_some() {
                        return Err(at(&tokens[start], "only one conjecture is allowed".into()).into());
                    }
                    problem.conjecture = Some(f);
                }
                other => return Err(at(&tokens[start - 1], format!("unknown declaration `{other}`")).into()),
            }
        }
        Ok(problem)
    }

    fn rigid(&mut self, tokens: &[Token], mut pos: usize) -> Result<usize, ProblemError> {
        let eof = |pos: usize| at(&tokens[pos.min(tokens.len()) - 1], "unexpected end of input in rigid".into());
        loop {
            let tok = tokens.get(pos).ok_or_else(|| eof(pos))?;
            let TokenKind::Symbol(name) = &tok.kind else {
                return Err(at(tok, format!("expected a symbol, found {}", tok.kind)).into());
            };
            pos += 1;
            let mut arity = 0;
            if tokens.get(pos).map(|t| &t.kind) == Some(&TokenKind::Slash) {
                match tokens.get(pos + 1).map(|t| &t.kind) {
                    Some(TokenKind::Number(n)) => arity = *n,
                    _ => return Err(at(&tokens[pos], "expected an arity after `/`".into()).into()),
                }
                pos += 2;
            }
            self.sig.declare_function(name, arity, Rigidity::Rigid).map_err(|e| ParseError {
                line: tok.line,
                column: tok.column,
                kind: e.into(),
            })?;
            let sep = tokens.get(pos).ok_or_else(|| eof(pos))?;
            pos += 1;
            match sep.kind {
                TokenKind::Comma => {}
                TokenKind::Dot => return Ok(pos),
                ref other => return Err(at(sep, format!("expected `,` or `.`, found {other}")).into()),
            }
        }
    }

    /// Common ground folded into the question set.
    pub fn effective_questions(&self) -> Vec<Question> {
        fold_common_ground(&self.common, &self.questions)
    }

    pub fn context_formula(&self) -> Formula {
        self.context.clone().unwrap_or(Formula::Top)
    }
}

fn at(tok: &Token, message: String) -> ParseError {
    ParseError { line: tok.line, column: tok.column, kind: ParseErrorKind::Invalid(message) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_branch_file() {
        let p =
            Problem::parse("% two branches\nrigid a, b, c.\naxiom (p(a) & p(c)) | (p(b) & p(c)).\nquestion p(X).\n")
                .unwrap();
        assert_eq!(p.axioms.len(), 1);
        assert_eq!(p.questions.len(), 1);
        assert_eq!(p.questions[0].body().to_string(), "p(X)");
        assert!(p.sig.is_rigid("a") && p.sig.is_rigid("c"));
    }

    #[test]
    fn context_and_arity() {
        let p = Problem::parse("rigid f/2.\ncontext forall X. (i(X) <-> p(X)).\nquestion ?p(X).\naxiom q(f(a, b)).")
            .unwrap();
        assert_eq!(p.context_formula().to_string(), "forall X. i(X) <-> p(X)");
        assert!(p.sig.is_rigid("f"));
        assert!(!p.sig.is_rigid("a"));
    }

    #[test]
    fn rigid_after_use_still_wins() {
        let p = Problem::parse("axiom p(a).\nrigid a.\nquestion p(X).").unwrap();
        assert!(p.sig.is_rigid("a"));
    }

    #[test]
    fn empty_axioms() {
        let p = Problem::parse("question p(X).").unwrap();
        assert!(p.axioms.is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        let e = Problem::parse("axiom p(a).\naxiom p(X).").unwrap_err();
        assert!(e.to_string().starts_with("2:"), "{e}");
        let e = Problem::parse("axiom p(a)").unwrap_err();
        assert!(e.to_string().contains("end of input"), "{e}");
        let e = Problem::parse("rigid a/1.\naxiom p(a).").unwrap_err();
        assert!(e.to_string().contains("arity"), "{e}");
        assert!(Problem::parse("lemma p(a).").is_err());
    }

    #[test]
    fn common_ground_folding() {
        let p = Problem::parse("common i(X).\nquestion p(X).").unwrap();
        let qs: Vec<String> = p.effective_questions().iter().map(|q| q.body().to_string()).collect();
        assert_eq!(qs, vec!["i(X)", "p(X)"]);
        let same = fold_common_ground(&p.questions, &p.questions);
        assert_eq!(same.len(), 1);
        assert_eq!(fold_common_ground(&[], &p.questions), p.questions);
    }
}
